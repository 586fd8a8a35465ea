#pragma once

#include <cmath>
#include <complex>

namespace psg {

using cpx = std::complex<double>;

inline bool is_finite(const cpx& z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
}

// |z|^2 without the sqrt of std::abs.
inline double norm2(const cpx& z) {
    return z.real() * z.real() + z.imag() * z.imag();
}

}  // namespace psg
