#include "jdac/corruption.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>

#include "jdac/error.hpp"
#include "jdac/rng.hpp"

namespace jdac {

// ---------------------------------------------------------------------------
// Noise

namespace {

void require_nonnegative(double sigma, std::string_view what) {
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
        throw InvalidArgument(std::string(what) + " must be a finite value >= 0");
    }
}

} // namespace

Volume add_gaussian(const Volume& v, double sigma, std::uint64_t seed) {
    require_nonnegative(sigma, "gaussian sigma");
    Volume out = v;
    if (sigma == 0.0) return out;
    auto rng = make_stream(seed, "noise.gaussian");
    std::normal_distribution<double> noise(0.0, sigma);
    for (double& x : out.data()) x += noise(rng);
    return out;
}

Volume add_rician(const Volume& v, double sigma, std::uint64_t seed) {
    require_nonnegative(sigma, "rician sigma");
    if (v.residual()) throw InvalidArgument("rician noise is defined for magnitude images, not residual volumes");
    Volume out = v;
    if (sigma == 0.0) {
        for (double& x : out.data()) x = std::abs(x);
        return out;
    }
    auto rng = make_stream(seed, "noise.rician");
    std::normal_distribution<double> noise(0.0, sigma);
    for (double& x : out.data()) {
        const double re = x + noise(rng);
        const double im = noise(rng);
        x = std::sqrt(re * re + im * im);
    }
    return out;
}

Volume add_speckle(const Volume& v, double sigma, std::uint64_t seed) {
    require_nonnegative(sigma, "speckle sigma");
    Volume out = v;
    if (sigma == 0.0) return out;
    auto rng = make_stream(seed, "noise.speckle");
    std::normal_distribution<double> noise(0.0, sigma);
    for (double& x : out.data()) x *= 1.0 + noise(rng);
    return out;
}

Volume add_salt_pepper(const Volume& v, double density, std::uint64_t seed) {
    if (!(density >= 0.0 && density <= 1.0)) throw InvalidArgument("salt & pepper density must lie in [0, 1]");
    Volume out = v;
    if (density == 0.0) return out;
    auto rng = make_stream(seed, "noise.saltpepper");
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double half = 0.5 * density;
    for (double& x : out.data()) {
        const double r = u(rng);
        if (r < half) {
            x = 1.0;
        } else if (r < density) {
            x = 0.0;
        }
    }
    return out;
}

Volume add_noise(const Volume& v, const NoiseSpec& spec) {
    validate(spec);
    switch (spec.kind) {
    case NoiseKind::None: return v;
    case NoiseKind::Gaussian: return add_gaussian(v, spec.sigma, spec.seed);
    case NoiseKind::Rician: return add_rician(v, spec.sigma, spec.seed);
    case NoiseKind::Speckle: return add_speckle(v, spec.sigma, spec.seed);
    case NoiseKind::SaltPepper: return add_salt_pepper(v, spec.density, spec.seed);
    }
    throw InvalidArgument("unhandled noise kind");
}

// ---------------------------------------------------------------------------
// Validation

void validate(const NoiseSpec& spec) {
    require_nonnegative(spec.sigma, "noise sigma");
    if (!(spec.density >= 0.0 && spec.density <= 1.0)) throw InvalidArgument("noise density must lie in [0, 1]");
}

void validate(const ArtifactSpec& spec) {
    if (!(spec.gibbs_alpha >= 0.0 && spec.gibbs_alpha < 1.0)) throw InvalidArgument("gibbs alpha must lie in [0, 1)");
    const auto& m = spec.motion;
    if (m.rot_deg_range[0] > m.rot_deg_range[1] || m.trans_mm_range[0] > m.trans_mm_range[1]) {
        throw InvalidArgument("motion ranges must satisfy low <= high");
    }
    if (m.rot_deg_range[0] < 0.0 || m.trans_mm_range[0] < 0.0) {
        throw InvalidArgument("motion ranges are magnitudes and must be >= 0");
    }
    if (m.num_transforms < 0) throw InvalidArgument("motion num_transforms must be >= 0");
    const auto& g = spec.ghosting;
    if (g.num_ghosts[0] < 1 || g.num_ghosts[0] > g.num_ghosts[1]) {
        throw InvalidArgument("ghost count range must satisfy 1 <= low <= high");
    }
    if (g.intensity[0] < 0.0 || g.intensity[0] > g.intensity[1] || g.intensity[1] > 1.0) {
        throw InvalidArgument("ghost intensity range must satisfy 0 <= low <= high <= 1");
    }
    if (g.axis < 0 || g.axis > 2) throw InvalidArgument("ghost axis must be 0, 1 or 2");
    if (spec.spike.num_spikes < 0) throw InvalidArgument("spike count must be >= 0");
    if (spec.spike.intensity < 0.0) throw InvalidArgument("spike intensity must be >= 0");
}

// ---------------------------------------------------------------------------
// Gibbs

namespace {

double normalised_radius(const Dims& d, std::size_t i, std::size_t j, std::size_t k) {
    const double fx = static_cast<double>(signed_frequency(i, d.x)) / static_cast<double>(d.x);
    const double fy = static_cast<double>(signed_frequency(j, d.y)) / static_cast<double>(d.y);
    const double fz = static_cast<double>(signed_frequency(k, d.z)) / static_cast<double>(d.z);
    return std::sqrt(fx * fx + fy * fy + fz * fz);
}

double max_normalised_radius(const Dims& d) {
    auto peak = [](std::size_t n) {
        return static_cast<double>(n / 2) / static_cast<double>(n);
    };
    const double x = peak(d.x), y = peak(d.y), z = peak(d.z);
    return std::sqrt(x * x + y * y + z * z);
}

} // namespace

void gibbs_truncate(KSpace& k, double alpha) {
    if (!(alpha >= 0.0 && alpha < 1.0)) throw InvalidArgument("gibbs alpha must lie in [0, 1)");
    const double cutoff = (1.0 - alpha) * max_normalised_radius(k.dims);
    for (std::size_t z = 0; z < k.dims.z; ++z) {
        for (std::size_t y = 0; y < k.dims.y; ++y) {
            for (std::size_t x = 0; x < k.dims.x; ++x) {
                if (normalised_radius(k.dims, x, y, z) > cutoff) k.at(x, y, z) = Complex{0.0, 0.0};
            }
        }
    }
}

Volume apply_gibbs(const Volume& v, double alpha) {
    KSpace k = fft3(v);
    gibbs_truncate(k, alpha);
    return ifft3(k, Recovery::Magnitude);
}

// ---------------------------------------------------------------------------
// Motion

namespace {

using Mat3 = std::array<std::array<double, 3>, 3>;

Mat3 multiply(const Mat3& a, const Mat3& b) {
    Mat3 r{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int n = 0; n < 3; ++n) r[i][j] += a[i][n] * b[n][j];
    return r;
}

Mat3 rotation_xyz(const std::array<double, 3>& rad) {
    const double cx = std::cos(rad[0]), sx = std::sin(rad[0]);
    const double cy = std::cos(rad[1]), sy = std::sin(rad[1]);
    const double cz = std::cos(rad[2]), sz = std::sin(rad[2]);
    const Mat3 rx{{{1, 0, 0}, {0, cx, -sx}, {0, sx, cx}}};
    const Mat3 ry{{{cy, 0, sy}, {0, 1, 0}, {-sy, 0, cy}}};
    const Mat3 rz{{{cz, -sz, 0}, {sz, cz, 0}, {0, 0, 1}}};
    return multiply(rz, multiply(ry, rx));
}

struct RigidTransform {
    Mat3 rotation;                   // about the volume centre
    std::array<double, 3> shift_vox; // applied after rotation
};

double trilinear_zero(const Volume& v, double x, double y, double z) {
    const Dims& d = v.dims();
    const double fx = std::floor(x), fy = std::floor(y), fz = std::floor(z);
    const long x0 = static_cast<long>(fx), y0 = static_cast<long>(fy), z0 = static_cast<long>(fz);
    const double tx = x - fx, ty = y - fy, tz = z - fz;
    double acc = 0.0;
    for (int c = 0; c < 8; ++c) {
        const long xi = x0 + (c & 1), yi = y0 + ((c >> 1) & 1), zi = z0 + ((c >> 2) & 1);
        if (xi < 0 || yi < 0 || zi < 0 || xi >= static_cast<long>(d.x) || yi >= static_cast<long>(d.y) ||
            zi >= static_cast<long>(d.z)) {
            continue;
        }
        const double w = ((c & 1) ? tx : 1.0 - tx) * (((c >> 1) & 1) ? ty : 1.0 - ty) *
                         (((c >> 2) & 1) ? tz : 1.0 - tz);
        acc += w * v.at(static_cast<std::size_t>(xi), static_cast<std::size_t>(yi), static_cast<std::size_t>(zi));
    }
    return acc;
}

// out(p) = v(R^T (p - c - t) + c)
Volume resample(const Volume& v, const RigidTransform& t) {
    const Dims& d = v.dims();
    const std::array<double, 3> c{0.5 * (static_cast<double>(d.x) - 1.0), 0.5 * (static_cast<double>(d.y) - 1.0),
                                  0.5 * (static_cast<double>(d.z) - 1.0)};
    const Mat3& r = t.rotation;
    Volume out = v.like();
    for (std::size_t k = 0; k < d.z; ++k) {
        for (std::size_t j = 0; j < d.y; ++j) {
            for (std::size_t i = 0; i < d.x; ++i) {
                const double px = static_cast<double>(i) - c[0] - t.shift_vox[0];
                const double py = static_cast<double>(j) - c[1] - t.shift_vox[1];
                const double pz = static_cast<double>(k) - c[2] - t.shift_vox[2];
                const double sx = r[0][0] * px + r[1][0] * py + r[2][0] * pz + c[0];
                const double sy = r[0][1] * px + r[1][1] * py + r[2][1] * pz + c[1];
                const double sz = r[0][2] * px + r[1][2] * py + r[2][2] * pz + c[2];
                out.at(i, j, k) = trilinear_zero(v, sx, sy, sz);
            }
        }
    }
    return out;
}

double signed_uniform(std::mt19937_64& rng, const std::array<double, 2>& range) {
    const double mag = std::uniform_real_distribution<double>(range[0], range[1])(rng);
    return (rng() & 1U) ? mag : -mag;
}

} // namespace

Volume apply_motion(const Volume& v, const MotionParams& params, std::uint64_t seed) {
    ArtifactSpec check;
    check.motion = params;
    validate(check);

    auto rng = make_stream(seed, "artifact.motion");
    const double deg = std::numbers::pi / 180.0;
    const Spacing& sp = v.spacing();
    std::vector<RigidTransform> transforms;
    for (int t = 0; t < params.num_transforms; ++t) {
        std::array<double, 3> angles{};
        for (auto& a : angles) a = signed_uniform(rng, params.rot_deg_range) * deg;
        std::array<double, 3> shift{};
        for (std::size_t a = 0; a < 3; ++a) shift[a] = signed_uniform(rng, params.trans_mm_range) / sp[a];
        transforms.push_back({rotation_xyz(angles), shift});
    }

    KSpace composite = fft3(v);
    const Dims& d = v.dims();
    const std::size_t slabs = transforms.size() + 1;
    // Slab membership of each kz storage index, counted in centred order.
    std::vector<std::size_t> slab_of(d.z);
    for (std::size_t k = 0; k < d.z; ++k) {
        const std::size_t centred = (k + d.z / 2) % d.z;
        slab_of[k] = centred * slabs / d.z;
    }
    const std::size_t plane = d.x * d.y;
    for (std::size_t t = 1; t < slabs; ++t) {
        const KSpace moved = fft3(resample(v, transforms[t - 1]));
        for (std::size_t k = 0; k < d.z; ++k) {
            if (slab_of[k] != t) continue;
            std::copy_n(moved.data.begin() + static_cast<std::ptrdiff_t>(k * plane), plane,
                        composite.data.begin() + static_cast<std::ptrdiff_t>(k * plane));
        }
    }
    return ifft3(composite, Recovery::Magnitude);
}

// ---------------------------------------------------------------------------
// Ghosting

Volume apply_ghosting(const Volume& v, const GhostingParams& params, std::uint64_t seed) {
    ArtifactSpec check;
    check.ghosting = params;
    validate(check);

    auto rng = make_stream(seed, "artifact.ghosting");
    const int ghosts = std::uniform_int_distribution<int>(params.num_ghosts[0], params.num_ghosts[1])(rng);
    const double strength = params.intensity[0] == params.intensity[1]
                                ? params.intensity[0]
                                : std::uniform_real_distribution<double>(params.intensity[0], params.intensity[1])(rng);

    KSpace k = fft3(v);
    const Dims& d = k.dims;
    const auto axis = static_cast<std::size_t>(params.axis);
    const auto g = static_cast<std::size_t>(ghosts);
    const double factor = 1.0 - strength;
    for (std::size_t z = 0; z < d.z; ++z) {
        for (std::size_t y = 0; y < d.y; ++y) {
            for (std::size_t x = 0; x < d.x; ++x) {
                const std::size_t pos = axis == 0 ? x : axis == 1 ? y : z;
                if (pos != 0 && pos % g == 0) k.at(x, y, z) *= factor;
            }
        }
    }
    return ifft3(k, Recovery::Magnitude);
}

// ---------------------------------------------------------------------------
// Spike

std::vector<SpikeLocation> inject_spikes(KSpace& k, const SpikeParams& params, std::uint64_t seed) {
    ArtifactSpec check;
    check.spike = params;
    validate(check);
    if (k.data.size() < 2) throw DimensionTooSmall("spike injection needs at least one non-DC coefficient");

    auto rng = make_stream(seed, "artifact.spike");
    std::uniform_int_distribution<std::size_t> pick(1, k.data.size() - 1);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    const double magnitude = params.intensity * std::abs(k.data[0]);

    std::vector<SpikeLocation> where;
    for (int s = 0; s < params.num_spikes; ++s) {
        const std::size_t n = pick(rng);
        k.data[n] += std::polar(magnitude, phase(rng));
        const std::size_t i = n % k.dims.x;
        const std::size_t j = (n / k.dims.x) % k.dims.y;
        const std::size_t kk = n / (k.dims.x * k.dims.y);
        where.push_back({i, j, kk});
    }
    return where;
}

// The real part is kept: a single injected coefficient then shows up as a
// raised-cosine stripe v + s*mean(v)*cos(2*pi*k.x + phase). The magnitude
// would instead fold the stripe into a constant offset over the background.
Volume apply_spike(const Volume& v, const SpikeParams& params, std::uint64_t seed) {
    KSpace k = fft3(v);
    inject_spikes(k, params, seed);
    const std::vector<Complex> image = ifft3_complex(k);
    Volume out = v.like();
    auto o = out.data();
    for (std::size_t n = 0; n < o.size(); ++n) o[n] = image[n].real();
    return out;
}

// ---------------------------------------------------------------------------

Volume apply_artifact(const Volume& v, const ArtifactSpec& spec) {
    validate(spec);
    switch (spec.kind) {
    case ArtifactKind::None: return v;
    case ArtifactKind::Gibbs: return apply_gibbs(v, spec.gibbs_alpha);
    case ArtifactKind::Motion: return apply_motion(v, spec.motion, spec.seed);
    case ArtifactKind::Ghosting: return apply_ghosting(v, spec.ghosting, spec.seed);
    case ArtifactKind::Spike: return apply_spike(v, spec.spike, spec.seed);
    }
    throw InvalidArgument("unhandled artifact kind");
}

Volume corrupt(const Volume& v, const ArtifactSpec& artifact, const NoiseSpec& noise) {
    return add_noise(apply_artifact(v, artifact), noise);
}

// ---------------------------------------------------------------------------
// Text forms

namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const std::size_t at = s.find(sep, start);
        parts.push_back(s.substr(start, at == std::string_view::npos ? std::string_view::npos : at - start));
        if (at == std::string_view::npos) break;
        start = at + 1;
    }
    return parts;
}

template <typename T>
T parse_number(std::string_view s, std::string_view context) {
    T value{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
        throw SpecParseError("bad number '" + std::string(s) + "' in " + std::string(context));
    }
    return value;
}

// "a" or "a-b"
template <typename T>
std::array<T, 2> parse_range(std::string_view s, std::string_view context) {
    const auto parts = split(s, '-');
    if (parts.size() == 1) {
        const T v = parse_number<T>(parts[0], context);
        return {v, v};
    }
    if (parts.size() == 2) return {parse_number<T>(parts[0], context), parse_number<T>(parts[1], context)};
    throw SpecParseError("bad range '" + std::string(s) + "' in " + std::string(context));
}

std::string number(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

template <typename T>
std::string range_text(const std::array<T, 2>& r) {
    if (r[0] == r[1]) return number(r[0]);
    return number(r[0]) + "-" + number(r[1]);
}

std::pair<std::string_view, std::string_view> split_kind(std::string_view text) {
    const std::size_t colon = text.find(':');
    if (colon == std::string_view::npos) return {text, {}};
    return {text.substr(0, colon), text.substr(colon + 1)};
}

} // namespace

NoiseSpec parse_noise_spec(std::string_view text, std::uint64_t seed) {
    const auto [kind, args] = split_kind(text);
    NoiseSpec spec;
    spec.seed = seed;
    if (kind == "none") {
        if (!args.empty()) throw SpecParseError("'none' noise takes no arguments");
        return spec;
    }
    if (args.empty()) throw SpecParseError("noise spec '" + std::string(text) + "' needs a parameter");
    const double value = parse_number<double>(args, text);
    if (kind == "gaussian") {
        spec.kind = NoiseKind::Gaussian;
        spec.sigma = value;
    } else if (kind == "rician") {
        spec.kind = NoiseKind::Rician;
        spec.sigma = value;
    } else if (kind == "speckle") {
        spec.kind = NoiseKind::Speckle;
        spec.sigma = value;
    } else if (kind == "saltpepper") {
        spec.kind = NoiseKind::SaltPepper;
        spec.density = value;
    } else {
        throw SpecParseError("unknown noise kind '" + std::string(kind) + "'");
    }
    try {
        validate(spec);
    } catch (const InvalidArgument& e) {
        throw SpecParseError(e.what());
    }
    return spec;
}

ArtifactSpec parse_artifact_spec(std::string_view text, std::uint64_t seed) {
    const auto [kind, args] = split_kind(text);
    ArtifactSpec spec;
    spec.seed = seed;
    const auto fields = split(args, ',');
    if (kind == "none") {
        if (!args.empty()) throw SpecParseError("'none' artifact takes no arguments");
    } else if (kind == "gibbs") {
        spec.kind = ArtifactKind::Gibbs;
        spec.gibbs_alpha = parse_number<double>(args, text);
    } else if (kind == "motion") {
        spec.kind = ArtifactKind::Motion;
        if (args != "default") {
            if (fields.size() != 5) throw SpecParseError("motion expects 'default' or rot_lo,rot_hi,trans_lo,trans_hi,n");
            spec.motion.rot_deg_range = {parse_number<double>(fields[0], text), parse_number<double>(fields[1], text)};
            spec.motion.trans_mm_range = {parse_number<double>(fields[2], text), parse_number<double>(fields[3], text)};
            spec.motion.num_transforms = parse_number<int>(fields[4], text);
        }
    } else if (kind == "ghosting") {
        spec.kind = ArtifactKind::Ghosting;
        if (args != "default") {
            if (fields.size() != 3) throw SpecParseError("ghosting expects 'default' or ghosts,intensity,axis");
            spec.ghosting.num_ghosts = parse_range<int>(fields[0], text);
            spec.ghosting.intensity = parse_range<double>(fields[1], text);
            spec.ghosting.axis = parse_number<int>(fields[2], text);
        }
    } else if (kind == "spike") {
        spec.kind = ArtifactKind::Spike;
        if (args != "default") {
            if (fields.size() != 2) throw SpecParseError("spike expects 'default' or count,intensity");
            spec.spike.num_spikes = parse_number<int>(fields[0], text);
            spec.spike.intensity = parse_number<double>(fields[1], text);
        }
    } else {
        throw SpecParseError("unknown artifact kind '" + std::string(kind) + "'");
    }
    try {
        validate(spec);
    } catch (const InvalidArgument& e) {
        throw SpecParseError(e.what());
    }
    return spec;
}

std::string to_string(const NoiseSpec& spec) {
    switch (spec.kind) {
    case NoiseKind::None: return "none";
    case NoiseKind::Gaussian: return "gaussian:" + number(spec.sigma);
    case NoiseKind::Rician: return "rician:" + number(spec.sigma);
    case NoiseKind::Speckle: return "speckle:" + number(spec.sigma);
    case NoiseKind::SaltPepper: return "saltpepper:" + number(spec.density);
    }
    return "none";
}

std::string to_string(const ArtifactSpec& spec) {
    switch (spec.kind) {
    case ArtifactKind::None: return "none";
    case ArtifactKind::Gibbs: return "gibbs:" + number(spec.gibbs_alpha);
    case ArtifactKind::Motion: {
        const auto& m = spec.motion;
        return "motion:" + number(m.rot_deg_range[0]) + "," + number(m.rot_deg_range[1]) + "," +
               number(m.trans_mm_range[0]) + "," + number(m.trans_mm_range[1]) + "," +
               std::to_string(m.num_transforms);
    }
    case ArtifactKind::Ghosting: {
        const auto& g = spec.ghosting;
        return "ghosting:" + range_text(g.num_ghosts) + "," + range_text(g.intensity) + "," + std::to_string(g.axis);
    }
    case ArtifactKind::Spike:
        return "spike:" + std::to_string(spec.spike.num_spikes) + "," + number(spec.spike.intensity);
    }
    return "none";
}

} // namespace jdac
