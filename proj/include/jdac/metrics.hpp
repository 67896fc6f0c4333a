#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "jdac/volume.hpp"

namespace jdac {

inline constexpr std::array<double, 5> kMsSsimWeights{0.0448, 0.2856, 0.3001, 0.2363, 0.1333};

struct SsimOptions {
    int window = 11;          // shrunk to the largest odd size <= smallest extent
    double gaussian_std = 1.5;
    double data_range = 1.0;
    double k1 = 0.01;
    double k2 = 0.03;
};

double rmse(const Volume& test, const Volume& ref);

/// 20 log10(range / rmse); +infinity for identical inputs.
double psnr(const Volume& test, const Volume& ref, double data_range = 1.0);
double psnr_from_rmse(double rmse, double data_range = 1.0);

/// Mean SSIM over every window that fits fully inside the volume, with
/// Gaussian-weighted local moments.
double ssim3d(const Volume& test, const Volume& ref, const SsimOptions& opt = {});

/// Mean luminance and contrast-structure terms at one scale.
struct SsimTerms {
    double ssim = 1.0; // mean of l * cs
    double cs = 1.0;   // mean of cs
};
SsimTerms ssim3d_terms(const Volume& test, const Volume& ref, const SsimOptions& opt = {});

/// Number of dyadic scales MS-SSIM will use for these dims: the largest
/// count <= max_scales whose coarsest level still has every extent >= 11.
int ms_ssim_scales(const Dims& dims, int max_scales = 5);

/// 2x2x2 mean pooling; odd trailing planes are dropped.
Volume downsample2(const Volume& v);

double ms_ssim3d(const Volume& test, const Volume& ref, int scales = 5,
                 std::span<const double> weights = kMsSsimWeights, const SsimOptions& opt = {});

enum class MetricDomain { Image, Gradient };
std::string_view to_string(MetricDomain d);

struct MetricsReport {
    double psnr_db = 0.0;
    double rmse = 0.0;
    double ssim = 1.0;
    double ms_ssim = 1.0;
    MetricDomain domain = MetricDomain::Image;
};

MetricsReport image_metrics(const Volume& test, const Volume& ref);

/// All four metrics on the gradient-magnitude volumes of the pair.
MetricsReport gradient_metrics(const Volume& test, const Volume& ref);

} // namespace jdac
