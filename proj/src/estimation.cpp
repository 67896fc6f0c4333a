#include "jdac/estimation.hpp"

#include "jdac/error.hpp"

namespace jdac {

NoiseEstimate estimate_noise(const Volume& v, double calibration) {
    if (!(calibration > 0.0)) throw InvalidArgument("calibration factor must be > 0");
    NoiseEstimate e;
    e.calibration = calibration;
    e.raw_std = pooled_std(gradient(v));
    e.sigma_e = calibration * e.raw_std;
    return e;
}

double calibrate_threshold(std::span<const Volume> clean_volumes) {
    if (clean_volumes.empty()) throw EmptyCorpus("threshold calibration needs at least one volume");
    double sum = 0.0;
    for (const auto& v : clean_volumes) sum += estimate_noise(v).raw_std;
    return sum / static_cast<double>(clean_volumes.size());
}

} // namespace jdac
