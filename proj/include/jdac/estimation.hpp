#pragma once

#include <numbers>
#include <span>

#include "jdac/volume.hpp"

namespace jdac {

/// Central differences halve the variance of i.i.d. noise, so the pooled
/// gradient std of pure noise with std s is s / sqrt(2).
inline constexpr double kDefaultCalibration = std::numbers::sqrt2;

/// Raw gradient-map std of clean volumes above which a volume is treated as
/// still noisy.
inline constexpr double kDefaultStopThreshold = 0.028;

struct NoiseEstimate {
    double sigma_e = 0.0;     // calibration * raw_std
    double raw_std = 0.0;     // pooled std of the gradient map
    double calibration = kDefaultCalibration;
};

/// Noise level from the spread of the gradient map. Uses the whole volume,
/// background included.
NoiseEstimate estimate_noise(const Volume& v, double calibration = kDefaultCalibration);

/// Mean raw gradient std over a corpus of clean volumes; a replacement for
/// the default stop threshold on a different corpus.
double calibrate_threshold(std::span<const Volume> clean_volumes);

} // namespace jdac
