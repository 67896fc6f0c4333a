#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <random>
#include <utility>

#include "jdac/volume.hpp"

namespace jdac::test {

// 64-bit LCG shared with tests/oracles/ms_ssim_reference.py so offline
// reference values can be regenerated bit-for-bit.
inline Volume lcg_volume(Dims d, std::uint64_t seed) {
    Volume v(d);
    std::uint64_t state = seed;
    for (double& x : v.data()) {
        state = state * 6364136223846793005ULL + 1442695040888963407ULL;
        x = static_cast<double>(state >> 11) * (1.0 / 9007199254740992.0);
    }
    return v;
}

/// a uniform in [0,1), b = 0.7 a + 0.3 (independent uniform).
inline std::pair<Volume, Volume> lcg_pair(Dims d, std::uint64_t seed_a, std::uint64_t seed_b) {
    Volume a = lcg_volume(d, seed_a);
    Volume b = lcg_volume(d, seed_b);
    for (std::size_t n = 0; n < b.size(); ++n) b[n] = 0.7 * a[n] + 0.3 * b[n];
    return {a, b};
}

inline Volume uniform_volume(Dims d, std::uint64_t seed, double lo = 0.0, double hi = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    Volume v(d);
    for (double& x : v.data()) x = u(rng);
    return v;
}

inline Volume gaussian_volume(Dims d, double sigma, std::uint64_t seed, double mean = 0.0) {
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    std::normal_distribution<double> n(mean, sigma);
    Volume v(d);
    for (double& x : v.data()) x = n(rng);
    v.set_residual(true);
    return v;
}

inline double max_abs_diff(const Volume& a, const Volume& b) {
    double m = 0.0;
    for (std::size_t n = 0; n < a.size(); ++n) m = std::max(m, std::abs(a[n] - b[n]));
    return m;
}

inline bool bit_identical(const Volume& a, const Volume& b) {
    if (a.dims() != b.dims()) return false;
    for (std::size_t n = 0; n < a.size(); ++n) {
        if (std::bit_cast<std::uint64_t>(a[n]) != std::bit_cast<std::uint64_t>(b[n])) return false;
    }
    return true;
}

} // namespace jdac::test
