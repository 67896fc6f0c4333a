#include "jdac/operators.hpp"

#include <algorithm>
#include <cmath>

#include "jdac/error.hpp"
#include "jdac/kspace.hpp"

namespace jdac {

Volume denoise_with(const Denoiser& d, const Volume& x, double sigma_e) {
    if (!(sigma_e >= 0.0) || !std::isfinite(sigma_e)) throw InvalidArgument("sigma_e must be finite and >= 0");
    if (sigma_e == 0.0) return x;
    const Volume r = d.raw_predict(x, sigma_e);
    if (r.dims() != x.dims()) {
        throw OperatorContractViolation("denoiser '" + d.name() + "' returned " + to_string(r.dims()) +
                                        " for input " + to_string(x.dims()));
    }
    const double scale = sigma_e * sigma_e;
    Volume out = x;
    auto o = out.data();
    auto p = r.data();
    for (std::size_t n = 0; n < o.size(); ++n) o[n] -= scale * p[n];
    return out;
}

Volume correct_with(const Corrector& c, const Volume& x) {
    Volume out = c.correct(x);
    if (out.dims() != x.dims()) {
        throw OperatorContractViolation("corrector '" + c.name() + "' returned " + to_string(out.dims()) +
                                        " for input " + to_string(x.dims()));
    }
    return out;
}

Volume IdentityDenoiser::raw_predict(const Volume& x, double) const {
    Volume zero = x.like(0.0);
    zero.set_residual(true);
    return zero;
}

// ---------------------------------------------------------------------------

namespace {

std::string with_param(const char* base, double p) {
    std::string s = std::to_string(p);
    s.erase(s.find_last_not_of('0') + 1);
    if (!s.empty() && s.back() == '.') s.pop_back();
    return std::string(base) + ":" + s;
}

std::vector<double> gaussian_kernel(double std_vox) {
    const auto radius = static_cast<long>(std::ceil(3.0 * std_vox));
    std::vector<double> k(static_cast<std::size_t>(2 * radius + 1));
    double sum = 0.0;
    for (long t = -radius; t <= radius; ++t) {
        const double w = std::exp(-0.5 * static_cast<double>(t * t) / (std_vox * std_vox));
        k[static_cast<std::size_t>(t + radius)] = w;
        sum += w;
    }
    for (double& w : k) w /= sum;
    return k;
}

// One separable pass along `axis` with replicated edges.
Volume convolve_axis(const Volume& in, const std::vector<double>& kernel, std::size_t axis) {
    const Dims& d = in.dims();
    const long radius = static_cast<long>(kernel.size() / 2);
    const long n = static_cast<long>(d[axis]);
    const std::size_t stride = axis == 0 ? 1 : axis == 1 ? d.x : d.x * d.y;
    Volume out = in.like();
    const auto src = in.data();
    auto dst = out.data();
    std::vector<double> line(static_cast<std::size_t>(n));
    for (std::size_t k = 0; k < (axis == 2 ? 1 : d.z); ++k) {
        for (std::size_t j = 0; j < (axis == 1 ? 1 : d.y); ++j) {
            for (std::size_t i = 0; i < (axis == 0 ? 1 : d.x); ++i) {
                const std::size_t base = in.index(i, j, k);
                for (long p = 0; p < n; ++p) line[static_cast<std::size_t>(p)] = src[base + static_cast<std::size_t>(p) * stride];
                for (long p = 0; p < n; ++p) {
                    double acc = 0.0;
                    for (long t = -radius; t <= radius; ++t) {
                        const long q = std::clamp(p + t, 0L, n - 1);
                        acc += kernel[static_cast<std::size_t>(t + radius)] * line[static_cast<std::size_t>(q)];
                    }
                    dst[base + static_cast<std::size_t>(p) * stride] = acc;
                }
            }
        }
    }
    return out;
}

} // namespace

GaussianDenoiser::GaussianDenoiser(double width_scale) : width_scale_(width_scale) {
    if (!(width_scale > 0.0)) throw InvalidArgument("gaussian denoiser width_scale must be > 0");
}

std::string GaussianDenoiser::name() const { return with_param("gauss", width_scale_); }

double GaussianDenoiser::kernel_std(double sigma_e) const { return width_scale_ * std::max(sigma_e, 0.01); }

Volume GaussianDenoiser::smooth(const Volume& x, double sigma_e) const {
    const auto kernel = gaussian_kernel(kernel_std(sigma_e));
    Volume out = convolve_axis(x, kernel, 0);
    out = convolve_axis(out, kernel, 1);
    return convolve_axis(out, kernel, 2);
}

Volume GaussianDenoiser::raw_predict(const Volume& x, double sigma_e) const {
    if (!(sigma_e > 0.0)) throw InvalidArgument("raw_predict needs sigma_e > 0");
    const Volume smoothed = smooth(x, sigma_e);
    const double inv_var = 1.0 / (sigma_e * sigma_e);
    Volume r = x.like();
    r.set_residual(true);
    auto o = r.data();
    auto a = x.data();
    auto b = smoothed.data();
    for (std::size_t n = 0; n < o.size(); ++n) o[n] = (a[n] - b[n]) * inv_var;
    return r;
}

// ---------------------------------------------------------------------------

SpikeNotchCorrector::SpikeNotchCorrector(double z_threshold) : z_threshold_(z_threshold) {
    if (!(z_threshold > 2.0)) throw InvalidArgument("spike-notch threshold must be > 2");
}

std::string SpikeNotchCorrector::name() const { return with_param("spike-notch", z_threshold_); }

Volume SpikeNotchCorrector::correct(const Volume& x) const {
    KSpace k = fft3(x);
    const Dims& d = k.dims;
    const double scale = static_cast<double>(d.min_extent());

    // Radial band of every coefficient, in units of the shortest axis' index.
    std::vector<std::size_t> band(k.data.size());
    std::size_t bands = 0;
    for (std::size_t z = 0; z < d.z; ++z) {
        const double fz = static_cast<double>(signed_frequency(z, d.z)) / static_cast<double>(d.z);
        for (std::size_t y = 0; y < d.y; ++y) {
            const double fy = static_cast<double>(signed_frequency(y, d.y)) / static_cast<double>(d.y);
            for (std::size_t xi = 0; xi < d.x; ++xi) {
                const double fx = static_cast<double>(signed_frequency(xi, d.x)) / static_cast<double>(d.x);
                const auto b = static_cast<std::size_t>(std::lround(scale * std::sqrt(fx * fx + fy * fy + fz * fz)));
                band[k.index(xi, y, z)] = b;
                bands = std::max(bands, b + 1);
            }
        }
    }

    std::vector<std::vector<double>> members(bands);
    for (std::size_t n = 0; n < k.data.size(); ++n) members[band[n]].push_back(std::abs(k.data[n]));
    std::vector<double> median(bands, 0.0);
    for (std::size_t b = 0; b < bands; ++b) {
        auto& m = members[b];
        if (m.empty()) continue;
        const std::size_t mid = m.size() / 2;
        std::nth_element(m.begin(), m.begin() + static_cast<std::ptrdiff_t>(mid), m.end());
        double med = m[mid];
        if (m.size() % 2 == 0) {
            med = 0.5 * (med + *std::max_element(m.begin(), m.begin() + static_cast<std::ptrdiff_t>(mid)));
        }
        median[b] = med;
    }

    // Decide per conjugate pair so both members change together.
    const std::vector<Complex> original = k.data;
    for (std::size_t z = 0; z < d.z; ++z) {
        for (std::size_t y = 0; y < d.y; ++y) {
            for (std::size_t xi = 0; xi < d.x; ++xi) {
                const std::size_t n = k.index(xi, y, z);
                if (n == 0) continue;
                const std::size_t m = k.index((d.x - xi) % d.x, (d.y - y) % d.y, (d.z - z) % d.z);
                const double mag = 0.5 * (std::abs(original[n]) + std::abs(original[m]));
                if (mag > z_threshold_ * median[band[n]]) {
                    k.data[n] = std::polar(median[band[n]], std::arg(original[n]));
                }
            }
        }
    }

    Volume out = ifft3(k, Recovery::RealPart);
    out.set_residual(x.residual());
    return out;
}

std::unique_ptr<Denoiser> identity_denoiser() { return std::make_unique<IdentityDenoiser>(); }
std::unique_ptr<Corrector> identity_corrector() { return std::make_unique<IdentityCorrector>(); }
std::unique_ptr<Denoiser> gaussian_denoiser(double width_scale) { return std::make_unique<GaussianDenoiser>(width_scale); }
std::unique_ptr<Corrector> spike_notch_corrector(double z_threshold) {
    return std::make_unique<SpikeNotchCorrector>(z_threshold);
}

// ---------------------------------------------------------------------------
// Losses

namespace {

double mean_abs_diff(const Volume& a, const Volume& b, std::string_view context) {
    require_same_dims(a, b, context);
    const auto p = a.data();
    const auto q = b.data();
    double sum = 0.0;
    for (std::size_t n = 0; n < p.size(); ++n) sum += std::abs(p[n] - q[n]);
    return sum / static_cast<double>(p.size());
}

} // namespace

double loss_noise(const Volume& n_hat, const Volume& xi) { return mean_abs_diff(n_hat, xi, "noise loss"); }

double loss_motion(const Volume& m, const Volume& m_hat) { return mean_abs_diff(m, m_hat, "motion loss"); }

double loss_gradient(const Volume& m, const Volume& m_hat) {
    require_same_dims(m, m_hat, "gradient loss");
    const GradientField a = gradient(m);
    const GradientField b = gradient(m_hat);
    double sum = 0.0;
    for (std::size_t axis = 0; axis < 3; ++axis) {
        const auto p = a.axes[axis].data();
        const auto q = b.axes[axis].data();
        for (std::size_t n = 0; n < p.size(); ++n) sum += std::abs(p[n] - q[n]);
    }
    return sum / (3.0 * static_cast<double>(m.size()));
}

LossReport loss_total(const Volume& m, const Volume& m_hat) {
    LossReport r;
    r.l_m = loss_motion(m, m_hat);
    r.l_g = loss_gradient(m, m_hat);
    r.l_a = r.l_m + r.l_g;
    return r;
}

LossReport loss_total(const Volume& m, const Volume& m_hat, const Volume& n_hat, const Volume& xi) {
    LossReport r = loss_total(m, m_hat);
    r.l_n = loss_noise(n_hat, xi);
    return r;
}

} // namespace jdac
