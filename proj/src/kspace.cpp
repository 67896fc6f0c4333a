#include "jdac/kspace.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>

#include "jdac/error.hpp"

namespace jdac {

namespace {

// FFTW's planner is not re-entrant; execution is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

void transform_in_place(std::vector<Complex>& buf, const Dims& d, int sign) {
    auto* p = reinterpret_cast<fftw_complex*>(buf.data());
    fftw_plan plan = nullptr;
    {
        std::lock_guard lock(planner_mutex());
        // FFTW is row-major with the last index fastest, so z leads.
        plan = fftw_plan_dft_3d(static_cast<int>(d.z), static_cast<int>(d.y), static_cast<int>(d.x), p, p, sign,
                                FFTW_ESTIMATE);
    }
    if (plan == nullptr) throw Error("FFTW failed to create a plan for " + to_string(d));
    fftw_execute(plan);
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
}

} // namespace

long signed_frequency(std::size_t i, std::size_t n) noexcept {
    return i <= n / 2 ? static_cast<long>(i) : static_cast<long>(i) - static_cast<long>(n);
}

KSpace fft3(const Volume& v) {
    KSpace k{v.dims(), v.spacing(), {}};
    k.data.assign(v.data().begin(), v.data().end());
    transform_in_place(k.data, k.dims, FFTW_FORWARD);
    return k;
}

std::vector<Complex> ifft3_complex(const KSpace& k) {
    if (k.data.size() != k.dims.voxels()) {
        throw DimensionMismatch("k-space payload does not match dims " + to_string(k.dims));
    }
    std::vector<Complex> buf = k.data;
    transform_in_place(buf, k.dims, FFTW_BACKWARD);
    const double scale = 1.0 / static_cast<double>(buf.size());
    for (auto& c : buf) c *= scale;
    return buf;
}

Volume ifft3(const KSpace& k, Recovery recovery) {
    const std::vector<Complex> buf = ifft3_complex(k);
    Volume out(k.dims, k.spacing);
    auto o = out.data();
    if (recovery == Recovery::Magnitude) {
        for (std::size_t n = 0; n < o.size(); ++n) o[n] = std::abs(buf[n]);
        return out;
    }
    double max_re = 0.0;
    double max_im = 0.0;
    for (std::size_t n = 0; n < o.size(); ++n) {
        o[n] = buf[n].real();
        max_re = std::max(max_re, std::abs(buf[n].real()));
        max_im = std::max(max_im, std::abs(buf[n].imag()));
    }
    if (max_im > 0.0 && !(max_im < 1e-5 * max_re)) {
        throw NonNegligibleImaginaryPart("max |Im| = " + std::to_string(max_im) +
                                         ", max |Re| = " + std::to_string(max_re));
    }
    return out;
}

} // namespace jdac
