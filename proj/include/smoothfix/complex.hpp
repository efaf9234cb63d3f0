#pragma once

#include <cmath>
#include <complex>
#include <numbers>

namespace smoothfix {

using Complex = std::complex<double>;

inline constexpr Complex kI{0.0, 1.0};

inline bool is_finite(Complex z) noexcept {
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}

// Principal-branch power u^zeta for a real base u in (0, 1].
inline Complex real_pow(double u, Complex zeta) noexcept {
  return std::exp(zeta * std::log(u));
}

// Real inner product <xi, z> = xi_1 x + xi_2 y under C ~ R^2.
inline double inner(Complex xi, Complex z) noexcept {
  return xi.real() * z.real() + xi.imag() * z.imag();
}

}  // namespace smoothfix
