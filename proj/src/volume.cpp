#include "jdac/volume.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "jdac/error.hpp"
#include "jdac/rng.hpp"

namespace jdac {

std::size_t Dims::min_extent() const noexcept { return std::min({x, y, z}); }

std::string to_string(const Dims& d) {
    return std::to_string(d.x) + "x" + std::to_string(d.y) + "x" + std::to_string(d.z);
}

namespace {

void check_geometry(const Dims& dims, const Spacing& spacing) {
    if (dims.x == 0 || dims.y == 0 || dims.z == 0) {
        throw InvalidArgument("volume dims must be positive, got " + to_string(dims));
    }
    if (!(spacing.x > 0.0 && spacing.y > 0.0 && spacing.z > 0.0)) {
        throw InvalidArgument("voxel spacing must be strictly positive");
    }
}

} // namespace

Volume::Volume(Dims dims, Spacing spacing, double fill)
    : dims_(dims), spacing_(spacing) {
    check_geometry(dims_, spacing_);
    data_.assign(dims_.voxels(), fill);
}

Volume::Volume(Dims dims, Spacing spacing, std::vector<double> data)
    : dims_(dims), spacing_(spacing), data_(std::move(data)) {
    check_geometry(dims_, spacing_);
    if (data_.size() != dims_.voxels()) {
        throw DimensionMismatch("data length " + std::to_string(data_.size()) + " does not match dims " +
                                to_string(dims_));
    }
}

Volume Volume::like(double fill) const {
    Volume out(dims_, spacing_, fill);
    out.residual_ = residual_;
    return out;
}

void require_same_dims(const Volume& a, const Volume& b, std::string_view context) {
    if (a.dims() != b.dims()) {
        throw DimensionMismatch(std::string(context) + ": " + to_string(a.dims()) + " vs " + to_string(b.dims()));
    }
}

namespace {

template <typename Op>
Volume zip(const Volume& a, const Volume& b, std::string_view context, Op op) {
    require_same_dims(a, b, context);
    Volume out(a.dims(), a.spacing());
    auto o = out.data();
    auto x = a.data();
    auto y = b.data();
    for (std::size_t n = 0; n < o.size(); ++n) o[n] = op(x[n], y[n]);
    return out;
}

template <typename Op>
Volume map(const Volume& a, Op op) {
    Volume out(a.dims(), a.spacing());
    out.set_residual(a.residual());
    auto o = out.data();
    auto x = a.data();
    for (std::size_t n = 0; n < o.size(); ++n) o[n] = op(x[n]);
    return out;
}

} // namespace

Volume operator+(const Volume& a, const Volume& b) {
    return zip(a, b, "volume addition", [](double p, double q) { return p + q; });
}

Volume operator-(const Volume& a, const Volume& b) {
    return zip(a, b, "volume subtraction", [](double p, double q) { return p - q; });
}

Volume operator*(double s, const Volume& v) {
    return map(v, [s](double p) { return s * p; });
}

Volume operator+(const Volume& v, double c) {
    return map(v, [c](double p) { return p + c; });
}

Volume lerp(const Volume& a, const Volume& b, double t) {
    // a + t(b - a) returns a bit-exactly when a == b.
    return zip(a, b, "volume blend", [t](double p, double q) { return p + t * (q - p); });
}

Volume clamp(const Volume& v, double lo, double hi) {
    return map(v, [lo, hi](double p) { return std::clamp(p, lo, hi); });
}

GradientField gradient(const Volume& v) {
    const Dims d = v.dims();
    if (d.min_extent() < 3) {
        throw DimensionTooSmall("gradient needs at least 3 voxels per axis, got " + to_string(d));
    }
    GradientField g{{Volume(d, v.spacing()), Volume(d, v.spacing()), Volume(d, v.spacing())}};
    for (auto& a : g.axes) a.set_residual(true);

    const std::array<std::size_t, 3> stride{1, d.x, d.x * d.y};
    const auto src = v.data();
    for (std::size_t axis = 0; axis < 3; ++axis) {
        auto dst = g.axes[axis].data();
        const std::size_t s = stride[axis];
        const std::size_t last = d[axis] - 1;
        for (std::size_t k = 0; k < d.z; ++k) {
            for (std::size_t j = 0; j < d.y; ++j) {
                for (std::size_t i = 0; i < d.x; ++i) {
                    const std::size_t n = v.index(i, j, k);
                    const std::size_t pos = axis == 0 ? i : axis == 1 ? j : k;
                    if (pos == 0) {
                        dst[n] = src[n + s] - src[n];
                    } else if (pos == last) {
                        dst[n] = src[n] - src[n - s];
                    } else {
                        dst[n] = 0.5 * (src[n + s] - src[n - s]);
                    }
                }
            }
        }
    }
    return g;
}

Volume gradient_magnitude(const GradientField& g) {
    Volume out(g.dims(), g.axes[0].spacing());
    auto o = out.data();
    auto gx = g.axes[0].data();
    auto gy = g.axes[1].data();
    auto gz = g.axes[2].data();
    for (std::size_t n = 0; n < o.size(); ++n) {
        o[n] = std::sqrt(gx[n] * gx[n] + gy[n] * gy[n] + gz[n] * gz[n]);
    }
    return out;
}

double pooled_std(const GradientField& g) {
    // Two-pass for accuracy; the mean is near zero but not exactly.
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& a : g.axes) {
        for (double x : a.data()) sum += x;
        count += a.size();
    }
    const double mean = sum / static_cast<double>(count);
    double ss = 0.0;
    for (const auto& a : g.axes) {
        for (double x : a.data()) ss += (x - mean) * (x - mean);
    }
    return std::sqrt(ss / static_cast<double>(count));
}

VolumeStats stats(const Volume& v) {
    VolumeStats s;
    const auto d = v.data();
    if (d.empty()) return s;
    double sum = 0.0;
    s.min = d[0];
    s.max = d[0];
    for (double x : d) {
        sum += x;
        s.min = std::min(s.min, x);
        s.max = std::max(s.max, x);
    }
    s.mean = sum / static_cast<double>(d.size());
    double ss = 0.0;
    for (double x : d) ss += (x - s.mean) * (x - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(d.size()));
    // Rounding in the mean can push it a hair outside [min, max] for
    // constant data.
    s.mean = std::clamp(s.mean, s.min, s.max);
    return s;
}

PhantomKind parse_phantom_kind(std::string_view name) {
    if (name == "ellipsoids") return PhantomKind::Ellipsoids;
    if (name == "checker-smooth") return PhantomKind::CheckerSmooth;
    if (name == "shepp-logan-like" || name == "shepp-logan") return PhantomKind::SheppLogan;
    throw UnknownPhantomKind(std::string(name));
}

std::string_view to_string(PhantomKind kind) {
    switch (kind) {
    case PhantomKind::Ellipsoids: return "ellipsoids";
    case PhantomKind::CheckerSmooth: return "checker-smooth";
    case PhantomKind::SheppLogan: return "shepp-logan-like";
    }
    return "unknown";
}

namespace {

struct Ellipsoid {
    std::array<double, 3> centre;
    std::array<double, 3> semi_axes;
    double yaw; // rotation about z, radians
    double intensity;

    // Point in normalised [-1, 1]^3 coordinates.
    bool contains(double x, double y, double z) const {
        const double dx = x - centre[0];
        const double dy = y - centre[1];
        const double dz = z - centre[2];
        const double c = std::cos(yaw);
        const double s = std::sin(yaw);
        const double u = (c * dx + s * dy) / semi_axes[0];
        const double v = (-s * dx + c * dy) / semi_axes[1];
        const double w = dz / semi_axes[2];
        return u * u + v * v + w * w <= 1.0;
    }
};

double normalised_coord(std::size_t i, std::size_t n) {
    return (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(n) - 1.0;
}

template <typename Fn>
Volume sample(Dims dims, Spacing spacing, Fn fn) {
    Volume out(dims, spacing);
    for (std::size_t k = 0; k < dims.z; ++k) {
        const double z = normalised_coord(k, dims.z);
        for (std::size_t j = 0; j < dims.y; ++j) {
            const double y = normalised_coord(j, dims.y);
            for (std::size_t i = 0; i < dims.x; ++i) {
                const double x = normalised_coord(i, dims.x);
                out.at(i, j, k) = std::clamp(fn(x, y, z), 0.0, 1.0);
            }
        }
    }
    return out;
}

// A low-contrast "head" with a handful of painted inner structures. The
// contrast levels keep the clean gradient-map std well under the 0.028
// early-stop level at 64^3.
Volume ellipsoid_phantom(Dims dims, Spacing spacing, std::uint64_t seed) {
    auto rng = make_stream(seed, "phantom.ellipsoids");
    auto uniform = [&rng](double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); };

    const double base = uniform(0.14, 0.17);
    const Ellipsoid head{{uniform(-0.03, 0.03), uniform(-0.03, 0.03), uniform(-0.03, 0.03)},
                         {uniform(0.70, 0.78), uniform(0.76, 0.84), uniform(0.66, 0.74)},
                         uniform(-0.2, 0.2),
                         base};

    std::vector<Ellipsoid> inner;
    const int count = std::uniform_int_distribution<int>(4, 6)(rng);
    for (int n = 0; n < count; ++n) {
        Ellipsoid e;
        e.centre = {uniform(-0.3, 0.3), uniform(-0.3, 0.3), uniform(-0.25, 0.25)};
        e.semi_axes = {uniform(0.10, 0.26), uniform(0.10, 0.26), uniform(0.10, 0.22)};
        e.yaw = uniform(0.0, std::numbers::pi);
        const double sign = (rng() & 1U) ? 1.0 : -1.0;
        e.intensity = base + sign * uniform(0.05, 0.10);
        inner.push_back(e);
    }
    const double fx = uniform(0.5, 1.0);
    const double fy = uniform(0.5, 1.0);

    return sample(dims, spacing, [&](double x, double y, double z) {
        if (!head.contains(x, y, z)) return 0.0;
        double value = head.intensity * (1.0 + 0.08 * std::cos(fx * x) * std::cos(fy * y));
        for (const auto& e : inner) {
            if (e.contains(x, y, z)) value = e.intensity;
        }
        return value;
    });
}

Volume checker_phantom(Dims dims, Spacing spacing, std::uint64_t seed) {
    auto rng = make_stream(seed, "phantom.checker");
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    const double px = phase(rng);
    const double py = phase(rng);
    const double pz = phase(rng);
    const Ellipsoid body{{0.0, 0.0, 0.0}, {0.75, 0.8, 0.7}, 0.0, 0.25};
    constexpr double freq = 1.5 * std::numbers::pi;
    return sample(dims, spacing, [&](double x, double y, double z) {
        if (!body.contains(x, y, z)) return 0.0;
        return body.intensity +
               0.08 * std::sin(freq * x + px) * std::sin(freq * y + py) * std::sin(freq * z + pz);
    });
}

// Modified 3D Shepp-Logan (high-contrast variant); the seed is unused.
Volume shepp_logan_phantom(Dims dims, Spacing spacing) {
    constexpr double deg = std::numbers::pi / 180.0;
    const std::array<Ellipsoid, 10> parts{{
        {{0.0, 0.0, 0.0}, {0.69, 0.92, 0.81}, 0.0, 1.0},
        {{0.0, -0.0184, 0.0}, {0.6624, 0.874, 0.78}, 0.0, -0.8},
        {{0.22, 0.0, 0.0}, {0.11, 0.31, 0.22}, -18.0 * deg, -0.2},
        {{-0.22, 0.0, 0.0}, {0.16, 0.41, 0.28}, 18.0 * deg, -0.2},
        {{0.0, 0.35, -0.15}, {0.21, 0.25, 0.41}, 0.0, 0.1},
        {{0.0, 0.1, 0.25}, {0.046, 0.046, 0.05}, 0.0, 0.1},
        {{0.0, -0.1, 0.25}, {0.046, 0.046, 0.05}, 0.0, 0.1},
        {{-0.08, -0.605, 0.0}, {0.046, 0.023, 0.05}, 0.0, 0.1},
        {{0.0, -0.606, 0.0}, {0.023, 0.023, 0.02}, 0.0, 0.1},
        {{0.06, -0.605, 0.0}, {0.023, 0.046, 0.02}, 0.0, 0.1},
    }};
    return sample(dims, spacing, [&](double x, double y, double z) {
        double value = 0.0;
        for (const auto& e : parts) {
            if (e.contains(x, y, z)) value += e.intensity;
        }
        return value;
    });
}

} // namespace

Volume make_phantom(Dims dims, PhantomKind kind, std::uint64_t seed, Spacing spacing) {
    if (dims.min_extent() < 32) {
        throw DimensionTooSmall("phantoms need at least 32 voxels per axis, got " + to_string(dims));
    }
    switch (kind) {
    case PhantomKind::Ellipsoids: return ellipsoid_phantom(dims, spacing, seed);
    case PhantomKind::CheckerSmooth: return checker_phantom(dims, spacing, seed);
    case PhantomKind::SheppLogan: return shepp_logan_phantom(dims, spacing);
    }
    throw UnknownPhantomKind("unhandled kind");
}

} // namespace jdac
