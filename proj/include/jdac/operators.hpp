#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "jdac/volume.hpp"

namespace jdac {

/// Denoiser plug-in. Following the residual-prediction convention, a
/// denoiser does not return the clean image: raw_predict returns its
/// estimate of noise / sigma^2, and the framework rescales by sigma_e^2 and
/// subtracts (see denoise_with).
///
/// Implementations must be deterministic and return a volume with the
/// input's dims. They may be called concurrently on distinct inputs.
class Denoiser {
public:
    virtual ~Denoiser() = default;
    virtual std::string name() const = 0;
    virtual Volume raw_predict(const Volume& x, double sigma_e) const = 0;
};

/// Artifact-correction plug-in: maps a corrupted volume to a corrected one
/// of the same dims.
class Corrector {
public:
    virtual ~Corrector() = default;
    virtual std::string name() const = 0;
    virtual Volume correct(const Volume& x) const = 0;
};

/// x - sigma_e^2 * d.raw_predict(x, sigma_e). Returns x untouched when
/// sigma_e is zero.
Volume denoise_with(const Denoiser& d, const Volume& x, double sigma_e);

/// Runs the corrector and enforces the dims contract.
Volume correct_with(const Corrector& c, const Volume& x);

// ---------------------------------------------------------------------------
// Baseline operators

class IdentityDenoiser final : public Denoiser {
public:
    std::string name() const override { return "identity"; }
    Volume raw_predict(const Volume& x, double sigma_e) const override;
};

class IdentityCorrector final : public Corrector {
public:
    std::string name() const override { return "identity"; }
    Volume correct(const Volume& x) const override { return x; }
};

/// Separable Gaussian smoothing whose kernel std (in voxels) follows the
/// conditioning noise level: w = width_scale * max(sigma_e, 0.01). The
/// kernel is truncated at 3w and edges are replicated, so constants are
/// fixed points.
class GaussianDenoiser final : public Denoiser {
public:
    static constexpr double kDefaultWidthScale = 10.0;

    explicit GaussianDenoiser(double width_scale = kDefaultWidthScale);

    std::string name() const override;
    Volume raw_predict(const Volume& x, double sigma_e) const override;

    double kernel_std(double sigma_e) const;
    Volume smooth(const Volume& x, double sigma_e) const;

private:
    double width_scale_;
};

/// Removes isolated k-space outliers: any non-DC coefficient whose magnitude
/// exceeds z_threshold times the median magnitude of its radial band is
/// pulled down to that median, phase kept.
///
/// Replacement is applied symmetrically to conjugate pairs, so a real input
/// maps to a real output and the real part is returned. Taking the
/// magnitude instead would rectify the signed intermediates the iteration
/// engine feeds in.
class SpikeNotchCorrector final : public Corrector {
public:
    explicit SpikeNotchCorrector(double z_threshold = 8.0);

    std::string name() const override;
    Volume correct(const Volume& x) const override;

private:
    double z_threshold_;
};

std::unique_ptr<Denoiser> identity_denoiser();
std::unique_ptr<Corrector> identity_corrector();
std::unique_ptr<Denoiser> gaussian_denoiser(double width_scale = GaussianDenoiser::kDefaultWidthScale);
std::unique_ptr<Corrector> spike_notch_corrector(double z_threshold = 8.0);

// ---------------------------------------------------------------------------
// Losses. All are mean-per-voxel L1 values.

struct LossReport {
    double l_n = 0.0; // noise-prediction loss; zero when no noise pair given
    double l_m = 0.0; // image L1
    double l_g = 0.0; // gradient L1
    double l_a = 0.0; // l_m + l_g
};

double loss_noise(const Volume& n_hat, const Volume& xi);
double loss_motion(const Volume& m, const Volume& m_hat);
double loss_gradient(const Volume& m, const Volume& m_hat);

LossReport loss_total(const Volume& m, const Volume& m_hat);
LossReport loss_total(const Volume& m, const Volume& m_hat, const Volume& n_hat, const Volume& xi);

} // namespace jdac
