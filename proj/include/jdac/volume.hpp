#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace jdac {

struct Dims {
    std::size_t x = 0;
    std::size_t y = 0;
    std::size_t z = 0;

    std::size_t voxels() const noexcept { return x * y * z; }
    std::size_t operator[](std::size_t axis) const noexcept { return axis == 0 ? x : axis == 1 ? y : z; }
    std::size_t min_extent() const noexcept;
    bool operator==(const Dims&) const = default;
};

std::string to_string(const Dims& d);

// Millimetres per voxel along each axis.
struct Spacing {
    double x = 1.0;
    double y = 1.0;
    double z = 1.0;

    double operator[](std::size_t axis) const noexcept { return axis == 0 ? x : axis == 1 ? y : z; }
    bool operator==(const Spacing&) const = default;
};

/// Dense scalar field on a regular grid, stored x-fastest:
/// linear index = i + L*(j + W*k).
///
/// Volumes that hold signed quantities (noise, residuals, multipliers) carry
/// the `residual` marker; everything else is expected to lie in [0, 1].
class Volume {
public:
    Volume() = default;
    explicit Volume(Dims dims, Spacing spacing = {}, double fill = 0.0);
    Volume(Dims dims, Spacing spacing, std::vector<double> data);

    const Dims& dims() const noexcept { return dims_; }
    const Spacing& spacing() const noexcept { return spacing_; }
    std::size_t size() const noexcept { return data_.size(); }

    bool residual() const noexcept { return residual_; }
    void set_residual(bool r) noexcept { residual_ = r; }

    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }

    double& operator[](std::size_t n) noexcept { return data_[n]; }
    double operator[](std::size_t n) const noexcept { return data_[n]; }

    std::size_t index(std::size_t i, std::size_t j, std::size_t k) const noexcept {
        return i + dims_.x * (j + dims_.y * k);
    }
    double& at(std::size_t i, std::size_t j, std::size_t k) noexcept { return data_[index(i, j, k)]; }
    double at(std::size_t i, std::size_t j, std::size_t k) const noexcept { return data_[index(i, j, k)]; }

    // Same geometry, new contents.
    Volume like(double fill = 0.0) const;

private:
    Dims dims_{};
    Spacing spacing_{};
    std::vector<double> data_;
    bool residual_ = false;
};

void require_same_dims(const Volume& a, const Volume& b, std::string_view context);

// Element-wise arithmetic. Both operands must share dims; the result keeps
// the left operand's spacing.
Volume operator+(const Volume& a, const Volume& b);
Volume operator-(const Volume& a, const Volume& b);
Volume operator*(double s, const Volume& v);
Volume operator+(const Volume& v, double c);

/// a*(1-t) + b*t, evaluated as a + t*(b - a).
Volume lerp(const Volume& a, const Volume& b, double t);

Volume clamp(const Volume& v, double lo, double hi);

struct GradientField {
    std::array<Volume, 3> axes;
    const Dims& dims() const noexcept { return axes[0].dims(); }
};

struct VolumeStats {
    double mean = 0.0;
    double std = 0.0; // population
    double min = 0.0;
    double max = 0.0;
};

/// Central differences in voxel units; one-sided at the faces so the output
/// has the input's dims. Every extent must be at least 3.
GradientField gradient(const Volume& v);

/// Euclidean norm of the three gradient components at each voxel.
Volume gradient_magnitude(const GradientField& g);

/// Population std over the concatenation of the three components.
double pooled_std(const GradientField& g);

VolumeStats stats(const Volume& v);

enum class PhantomKind { Ellipsoids, CheckerSmooth, SheppLogan };

PhantomKind parse_phantom_kind(std::string_view name);
std::string_view to_string(PhantomKind kind);

/// Deterministic synthetic head-like volume in [0, 1] with a zero background.
Volume make_phantom(Dims dims, PhantomKind kind, std::uint64_t seed, Spacing spacing = {});

} // namespace jdac
