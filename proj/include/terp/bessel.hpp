#pragma once

// Modified Bessel functions K0 and K1 on the positive axis. The ascending
// power series suffers e^{2x} cancellation, so it is summed in extended
// precision and handed over to the asymptotic expansion (with adaptive
// truncation at the smallest term) once that expansion reaches full accuracy.

#include <cmath>
#include <stdexcept>

namespace terp {

namespace detail {

inline constexpr long double kEulerGammaL = 0.57721566490153286060651209008L;

// I0, I1 and the K-series companions in long double.
inline long double bessel_k_series(double xd, int nu) {
  const long double x = xd;
  const long double q = x * x / 4.0L;
  const long double logx2 = std::log(x / 2.0L);
  if (nu == 0) {
    long double i0 = 1.0L, term = 1.0L, sum = 0.0L, hk = 0.0L;
    for (int k = 1; k <= 200; ++k) {
      term *= q / (static_cast<long double>(k) * k);
      i0 += term;
      hk += 1.0L / k;
      sum += term * hk;
      if (term < 1e-24L * i0) break;
    }
    return -(logx2 + kEulerGammaL) * i0 + sum;
  }
  // K1(x) = 1/x + log(x/2) I1(x) - (x/4) sum_{k>=0} [psi(k+1)+psi(k+2)] q^k / (k! (k+1)!)
  long double i1 = x / 2.0L, term = x / 2.0L;
  for (int k = 1; k <= 200; ++k) {
    term *= q / (static_cast<long double>(k) * (k + 1.0L));
    i1 += term;
    if (term < 1e-24L * std::abs(i1)) break;
  }
  long double psi_a = -kEulerGammaL;          // psi(1)
  long double psi_b = 1.0L - kEulerGammaL;    // psi(2)
  long double coeff = 1.0L;                   // q^k / (k! (k+1)!)
  long double sum = (psi_a + psi_b) * coeff;
  for (int k = 1; k <= 200; ++k) {
    coeff *= q / (static_cast<long double>(k) * (k + 1.0L));
    psi_a += 1.0L / k;
    psi_b += 1.0L / (k + 1.0L);
    long double t = (psi_a + psi_b) * coeff;
    sum += t;
    if (std::abs(t) < 1e-24L * std::abs(sum)) break;
  }
  return 1.0L / x + logx2 * i1 - (x / 4.0L) * sum;
}

// sqrt(pi/2x) e^{-x} sum a_k(nu) / x^k, truncated at the smallest term.
inline long double bessel_k_asymptotic(double xd, int nu) {
  const long double x = xd;
  const long double mu = 4.0L * nu * nu;
  long double term = 1.0L, sum = 1.0L, prev = 1e30L;
  for (int k = 1; k <= 60; ++k) {
    long double num = mu - (2.0L * k - 1.0L) * (2.0L * k - 1.0L);
    term *= num / (8.0L * k * x);
    if (std::abs(term) >= prev) break;  // smallest-term truncation
    sum += term;
    prev = std::abs(term);
  }
  return std::sqrt(static_cast<long double>(M_PI) / (2.0L * x)) * std::exp(-x) * sum;
}

inline constexpr double kBesselCrossover = 10.5;

}  // namespace detail

inline double bessel_k0(double x) {
  if (!(x > 0.0)) throw std::invalid_argument("bessel_k0 requires x > 0");
  if (x <= detail::kBesselCrossover)
    return static_cast<double>(detail::bessel_k_series(x, 0));
  return static_cast<double>(detail::bessel_k_asymptotic(x, 0));
}

inline double bessel_k1(double x) {
  if (!(x > 0.0)) throw std::invalid_argument("bessel_k1 requires x > 0");
  if (x <= detail::kBesselCrossover)
    return static_cast<double>(detail::bessel_k_series(x, 1));
  return static_cast<double>(detail::bessel_k_asymptotic(x, 1));
}

// d/dx K0 = -K1.
inline double bessel_k0_prime(double x) { return -bessel_k1(x); }

}  // namespace terp
