#ifndef CONVSPEC_NUMERICS_BESSEL_HPP
#define CONVSPEC_NUMERICS_BESSEL_HPP

#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

#include "convspec/error.hpp"

namespace convspec::numerics {

namespace detail {

// Ascending series (A&S 9.6.11 with 9.6.10 for I0, I1), good for 0 < x < 2.
inline std::pair<double, double> bessel_k01_series(double x) {
  constexpr double euler_gamma = 0.57721566490153286061;
  const double y = x * x / 4;
  const double log_half = std::log(x / 2);

  double i0 = 0, i1 = 0, k0_sum = 0, k1_sum = 0;
  double term0 = 1;       // y^k / (k!)^2
  double term1 = 1;       // y^k / (k! (k+1)!)
  double harmonic = 0;    // H_k
  for (int k = 0; k < 60; ++k) {
    if (k > 0) {
      term0 *= y / (double(k) * k);
      term1 *= y / (double(k) * (k + 1));
      harmonic += 1.0 / k;
    }
    const double psi1 = -euler_gamma + harmonic;              // psi(k+1)
    const double psi2 = psi1 + 1.0 / (k + 1);                 // psi(k+2)
    i0 += term0;
    i1 += term1;
    k0_sum += term0 * psi1;
    k1_sum += term1 * (psi1 + psi2);
    if (term0 < 1e-18 * i0 && k > 2) break;
  }
  i1 *= x / 2;
  const double k0 = -log_half * i0 + k0_sum;
  const double k1 = 1.0 / x + log_half * i1 - x / 4 * k1_sum;
  return {k0, k1};
}

// Steed's continued fraction (Temme's CF2 for K_nu) at nu = 0; x >= 2.
inline std::pair<double, double> bessel_k01_cf2(double x) {
  constexpr double eps = 1e-17;
  double b = 2 * (1 + x);
  double d = 1 / b;
  double h = d, delh = d;
  double q1 = 0, q2 = 1;
  const double a1 = 0.25;
  double q = a1, c = a1;
  double a = -a1;
  double s = 1 + q * delh;
  for (int i = 1; i < 100000; ++i) {
    a -= 2 * i;
    c = -a * c / (i + 1.0);
    const double qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2;
    d = 1 / (b + a * d);
    delh = (b * d - 1) * delh;
    h += delh;
    const double dels = q * delh;
    s += dels;
    if (std::abs(dels / s) < eps) break;
  }
  h = a1 * h;
  const double k0 = std::sqrt(std::numbers::pi / (2 * x)) * std::exp(-x) / s;
  const double k1 = k0 * (x + 0.5 - h) / x;
  return {k0, k1};
}

}  // namespace detail

/// K0(x) and K1(x) together; both cost the same as one.
inline std::pair<double, double> bessel_k01(double x) {
  if (!(x > 0)) throw DomainError("bessel_k: argument must be positive");
  if (x > 700) return {0.0, 0.0};
  return x < 2 ? detail::bessel_k01_series(x) : detail::bessel_k01_cf2(x);
}

inline double bessel_k0(double x) { return bessel_k01(x).first; }
inline double bessel_k1(double x) { return bessel_k01(x).second; }

}  // namespace convspec::numerics

#endif  // CONVSPEC_NUMERICS_BESSEL_HPP
