#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "jdac/kspace.hpp"
#include "jdac/volume.hpp"

namespace jdac {

// ---------------------------------------------------------------------------
// Noise

enum class NoiseKind { None, Gaussian, Rician, Speckle, SaltPepper };

struct NoiseSpec {
    NoiseKind kind = NoiseKind::None;
    double sigma = 0.0;   // gaussian / rician std, speckle multiplicative std
    double density = 0.0; // salt & pepper only
    std::uint64_t seed = 0;
};

/// v + N(0, sigma^2), unclipped.
Volume add_gaussian(const Volume& v, double sigma, std::uint64_t seed);

/// sqrt((v + n1)^2 + n2^2). Requires a non-residual input.
Volume add_rician(const Volume& v, double sigma, std::uint64_t seed);

/// v * (1 + n), n ~ N(0, sigma^2).
Volume add_speckle(const Volume& v, double sigma, std::uint64_t seed);

/// Each voxel becomes 1 with probability density/2, 0 with probability
/// density/2, and is otherwise left alone.
Volume add_salt_pepper(const Volume& v, double density, std::uint64_t seed);

Volume add_noise(const Volume& v, const NoiseSpec& spec);

// ---------------------------------------------------------------------------
// k-space artifacts

enum class ArtifactKind { None, Gibbs, Motion, Ghosting, Spike };

struct MotionParams {
    std::array<double, 2> rot_deg_range{5.0, 8.0};
    std::array<double, 2> trans_mm_range{3.0, 5.0};
    int num_transforms = 4;
};

struct GhostingParams {
    std::array<int, 2> num_ghosts{4, 10};
    std::array<double, 2> intensity{0.5, 1.0};
    int axis = 1;
};

struct SpikeParams {
    int num_spikes = 1;
    double intensity = 0.5;
};

struct ArtifactSpec {
    ArtifactKind kind = ArtifactKind::None;
    double gibbs_alpha = 0.0;
    MotionParams motion;
    GhostingParams ghosting;
    SpikeParams spike;
    std::uint64_t seed = 0;
};

void validate(const NoiseSpec& spec);
void validate(const ArtifactSpec& spec);

/// Zero every coefficient whose normalised radial frequency exceeds
/// (1 - alpha) * r_max, where r_max is the largest radius on the grid.
void gibbs_truncate(KSpace& k, double alpha);
Volume apply_gibbs(const Volume& v, double alpha);

/// Rigid motion during acquisition: k-space is split into
/// num_transforms + 1 contiguous slabs along z (in centred frequency order);
/// slab 0 comes from the unmoved volume, slab t from the t-th moved copy.
Volume apply_motion(const Volume& v, const MotionParams& params, std::uint64_t seed);

/// Attenuates every g-th k-space plane perpendicular to `axis` (DC plane
/// excluded) by (1 - s), with g and s drawn from their ranges.
Volume apply_ghosting(const Volume& v, const GhostingParams& params, std::uint64_t seed);

struct SpikeLocation {
    std::size_t i, j, k;
};

/// Adds a spike of magnitude intensity * |DC| and uniform random phase to
/// num_spikes random non-DC coefficients. Intensity 0 leaves k untouched.
std::vector<SpikeLocation> inject_spikes(KSpace& k, const SpikeParams& params, std::uint64_t seed);
/// Spike in k-space, real part of the inverse transform.
Volume apply_spike(const Volume& v, const SpikeParams& params, std::uint64_t seed);

Volume apply_artifact(const Volume& v, const ArtifactSpec& spec);

/// y = A(x) + noise: artifact first, then noise.
Volume corrupt(const Volume& v, const ArtifactSpec& artifact, const NoiseSpec& noise);

// ---------------------------------------------------------------------------
// Canonical text forms: "gaussian:0.10", "rician:0.05", "speckle:0.2",
// "saltpepper:0.1", "none"; "gibbs:0.7", "motion:default",
// "motion:5,8,3,5,4", "ghosting:4,0.8,1", "ghosting:default", "spike:1,0.5".

NoiseSpec parse_noise_spec(std::string_view text, std::uint64_t seed = 0);
ArtifactSpec parse_artifact_spec(std::string_view text, std::uint64_t seed = 0);
std::string to_string(const NoiseSpec& spec);
std::string to_string(const ArtifactSpec& spec);

} // namespace jdac
