#include "jdac/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "jdac/error.hpp"

namespace jdac {

double rmse(const Volume& test, const Volume& ref) {
    require_same_dims(test, ref, "rmse");
    const auto a = test.data();
    const auto b = ref.data();
    double ss = 0.0;
    for (std::size_t n = 0; n < a.size(); ++n) ss += (a[n] - b[n]) * (a[n] - b[n]);
    return std::sqrt(ss / static_cast<double>(a.size()));
}

double psnr_from_rmse(double e, double data_range) {
    if (e == 0.0) return std::numeric_limits<double>::infinity();
    return 20.0 * std::log10(data_range / e);
}

double psnr(const Volume& test, const Volume& ref, double data_range) {
    return psnr_from_rmse(rmse(test, ref), data_range);
}

namespace {

int effective_window(const Dims& d, int requested) {
    int w = std::min<int>(requested, static_cast<int>(d.min_extent()));
    if (w % 2 == 0) --w;
    return std::max(w, 1);
}

std::vector<double> window_weights(int size, double std_dev) {
    std::vector<double> w(static_cast<std::size_t>(size));
    const int r = size / 2;
    for (int t = -r; t <= r; ++t) w[static_cast<std::size_t>(t + r)] = std::exp(-0.5 * t * t / (std_dev * std_dev));
    const double sum = std::accumulate(w.begin(), w.end(), 0.0);
    for (double& x : w) x /= sum;
    return w;
}

// Plain row-major buffer for the shrinking "valid" convolution passes.
struct Grid {
    std::size_t nx, ny, nz;
    std::vector<double> data;
    double& at(std::size_t i, std::size_t j, std::size_t k) { return data[i + nx * (j + ny * k)]; }
    double at(std::size_t i, std::size_t j, std::size_t k) const { return data[i + nx * (j + ny * k)]; }
};

Grid valid_filter(const Grid& in, const std::vector<double>& w, std::size_t axis) {
    const std::size_t taps = w.size();
    Grid out{in.nx, in.ny, in.nz, {}};
    if (axis == 0) out.nx -= taps - 1;
    if (axis == 1) out.ny -= taps - 1;
    if (axis == 2) out.nz -= taps - 1;
    out.data.assign(out.nx * out.ny * out.nz, 0.0);
    for (std::size_t k = 0; k < out.nz; ++k) {
        for (std::size_t j = 0; j < out.ny; ++j) {
            for (std::size_t i = 0; i < out.nx; ++i) {
                double acc = 0.0;
                for (std::size_t t = 0; t < taps; ++t) {
                    acc += w[t] * (axis == 0   ? in.at(i + t, j, k)
                                   : axis == 1 ? in.at(i, j + t, k)
                                               : in.at(i, j, k + t));
                }
                out.at(i, j, k) = acc;
            }
        }
    }
    return out;
}

Grid local_mean(const Grid& g, const std::vector<double>& w) {
    return valid_filter(valid_filter(valid_filter(g, w, 0), w, 1), w, 2);
}

} // namespace

SsimTerms ssim3d_terms(const Volume& test, const Volume& ref, const SsimOptions& opt) {
    require_same_dims(test, ref, "ssim");
    const Dims d = test.dims();
    const int size = effective_window(d, opt.window);
    const auto w = window_weights(size, opt.gaussian_std);

    const auto a = test.data();
    const auto b = ref.data();
    auto make = [&](auto fn) {
        Grid g{d.x, d.y, d.z, std::vector<double>(a.size())};
        for (std::size_t n = 0; n < a.size(); ++n) g.data[n] = fn(a[n], b[n]);
        return local_mean(g, w);
    };
    const Grid mu_a = make([](double p, double) { return p; });
    const Grid mu_b = make([](double, double q) { return q; });
    const Grid e_aa = make([](double p, double) { return p * p; });
    const Grid e_bb = make([](double, double q) { return q * q; });
    const Grid e_ab = make([](double p, double q) { return p * q; });

    const double c1 = (opt.k1 * opt.data_range) * (opt.k1 * opt.data_range);
    const double c2 = (opt.k2 * opt.data_range) * (opt.k2 * opt.data_range);
    double sum_ssim = 0.0;
    double sum_cs = 0.0;
    const std::size_t count = mu_a.data.size();
    for (std::size_t n = 0; n < count; ++n) {
        const double ma = mu_a.data[n];
        const double mb = mu_b.data[n];
        const double var_a = e_aa.data[n] - ma * ma;
        const double var_b = e_bb.data[n] - mb * mb;
        const double cov = e_ab.data[n] - ma * mb;
        const double lum = (2.0 * ma * mb + c1) / (ma * ma + mb * mb + c1);
        const double cs = (2.0 * cov + c2) / (var_a + var_b + c2);
        sum_ssim += lum * cs;
        sum_cs += cs;
    }
    return {sum_ssim / static_cast<double>(count), sum_cs / static_cast<double>(count)};
}

double ssim3d(const Volume& test, const Volume& ref, const SsimOptions& opt) {
    return ssim3d_terms(test, ref, opt).ssim;
}

int ms_ssim_scales(const Dims& dims, int max_scales) {
    int scales = 1;
    std::size_t extent = dims.min_extent();
    while (scales < max_scales && (extent / 2) >= 11) {
        extent /= 2;
        ++scales;
    }
    return scales;
}

Volume downsample2(const Volume& v) {
    const Dims d = v.dims();
    const Dims h{std::max<std::size_t>(d.x / 2, 1), std::max<std::size_t>(d.y / 2, 1),
                 std::max<std::size_t>(d.z / 2, 1)};
    const Spacing s{v.spacing().x * 2.0, v.spacing().y * 2.0, v.spacing().z * 2.0};
    Volume out(h, s);
    for (std::size_t k = 0; k < h.z; ++k) {
        for (std::size_t j = 0; j < h.y; ++j) {
            for (std::size_t i = 0; i < h.x; ++i) {
                double acc = 0.0;
                int n = 0;
                for (std::size_t c = 0; c < 8; ++c) {
                    const std::size_t x = 2 * i + (c & 1), y = 2 * j + ((c >> 1) & 1), z = 2 * k + ((c >> 2) & 1);
                    if (x >= d.x || y >= d.y || z >= d.z) continue;
                    acc += v.at(x, y, z);
                    ++n;
                }
                out.at(i, j, k) = acc / n;
            }
        }
    }
    return out;
}

double ms_ssim3d(const Volume& test, const Volume& ref, int scales, std::span<const double> weights,
                 const SsimOptions& opt) {
    require_same_dims(test, ref, "ms-ssim");
    if (scales < 1 || static_cast<std::size_t>(scales) > weights.size()) {
        throw InvalidArgument("ms-ssim needs 1 <= scales <= number of weights");
    }
    const int used = ms_ssim_scales(test.dims(), scales);
    const double total = std::accumulate(weights.begin(), weights.begin() + used, 0.0);

    Volume a = test;
    Volume b = ref;
    double result = 1.0;
    for (int s = 0; s < used; ++s) {
        const SsimTerms t = ssim3d_terms(a, b, opt);
        const double w = weights[static_cast<std::size_t>(s)] / total;
        // Negative contrast-structure terms would make the fractional power
        // undefined; they are clamped at zero.
        const double term = (s == used - 1) ? t.ssim : t.cs;
        result *= std::pow(std::max(term, 0.0), w);
        if (s + 1 < used) {
            a = downsample2(a);
            b = downsample2(b);
        }
    }
    return result;
}

std::string_view to_string(MetricDomain d) { return d == MetricDomain::Image ? "image" : "gradient"; }

MetricsReport image_metrics(const Volume& test, const Volume& ref) {
    MetricsReport r;
    r.rmse = rmse(test, ref);
    r.psnr_db = psnr_from_rmse(r.rmse);
    r.ssim = ssim3d(test, ref);
    r.ms_ssim = ms_ssim3d(test, ref);
    r.domain = MetricDomain::Image;
    return r;
}

MetricsReport gradient_metrics(const Volume& test, const Volume& ref) {
    require_same_dims(test, ref, "gradient metrics");
    MetricsReport r = image_metrics(gradient_magnitude(gradient(test)), gradient_magnitude(gradient(ref)));
    r.domain = MetricDomain::Gradient;
    return r;
}

} // namespace jdac
