#pragma once

#include <complex>
#include <vector>

#include "jdac/volume.hpp"

namespace jdac {

using Complex = std::complex<double>;

/// Frequency-domain counterpart of a Volume. Same x-fastest layout; the DC
/// term sits at (0,0,0) and index i along an axis of extent n stands for
/// signed frequency i (i <= n/2) or i - n (otherwise).
struct KSpace {
    Dims dims{};
    Spacing spacing{};
    std::vector<Complex> data;

    std::size_t index(std::size_t i, std::size_t j, std::size_t k) const noexcept {
        return i + dims.x * (j + dims.y * k);
    }
    Complex& at(std::size_t i, std::size_t j, std::size_t k) noexcept { return data[index(i, j, k)]; }
    const Complex& at(std::size_t i, std::size_t j, std::size_t k) const noexcept { return data[index(i, j, k)]; }
};

/// Signed frequency of storage index i on an axis of extent n.
long signed_frequency(std::size_t i, std::size_t n) noexcept;

/// Unnormalised forward DFT.
KSpace fft3(const Volume& v);

enum class Recovery {
    RealPart,  // imaginary residue must be negligible
    Magnitude, // |z|, the MR magnitude-image convention
};

/// Inverse DFT with 1/N normalisation. With RealPart, throws
/// NonNegligibleImaginaryPart when max|Im| >= 1e-5 * max|Re|.
Volume ifft3(const KSpace& k, Recovery recovery = Recovery::RealPart);

/// Complex inverse transform without recovery to a real volume.
std::vector<Complex> ifft3_complex(const KSpace& k);

} // namespace jdac
