#pragma once

// Gamma, log-gamma and polygamma for complex arguments, plus the matrix
// function Gamma(alpha I + X) for nilpotent X, assembled as
//   Gamma(alpha) * exp( sum_{k>=1} psi^{(k-1)}(alpha) X^k / k! )
// which is exact up to floating round-off because X is nilpotent.

#include "terp/linalg.hpp"

#include <array>
#include <cmath>

namespace terp {

// Lanczos approximation (g = 7, 9 terms), valid for Re(z) > 0.
inline Complex log_gamma(Complex z) {
  static const std::array<double, 9> c = {
      0.99999999999980993,      676.5203681218851,     -1259.1392167224028,
      771.32342877765313,      -176.61502916214059,    12.507343278686905,
      -0.13857109526572012,     9.9843695780195716e-6, 1.5056327351493116e-7};
  if (z.real() < 0.5) {
    // reflection: log Gamma(z) = log(pi / sin(pi z)) - log Gamma(1 - z)
    return std::log(kPi / std::sin(kPi * z)) - log_gamma(1.0 - z);
  }
  z -= 1.0;
  Complex a = c[0];
  Complex t = z + 7.5;
  for (int i = 1; i < 9; ++i) a += c[i] / (z + static_cast<double>(i));
  return 0.5 * std::log(2.0 * kPi) + (z + 0.5) * std::log(t) - t + std::log(a);
}

inline Complex gamma_fn(Complex z) { return std::exp(log_gamma(z)); }

// psi^{(k)}(z): digamma and higher derivatives via the shift recurrence to
// Re(z) >= 12 followed by the asymptotic (Bernoulli) series.
inline Complex polygamma(int k, Complex z) {
  static const std::array<double, 8> bern = {
      1.0 / 6,   -1.0 / 30,  1.0 / 42,   -1.0 / 30,
      5.0 / 66,  -691.0 / 2730, 7.0 / 6, -3617.0 / 510};
  Complex shift = 0.0;
  double sgn = (k % 2 == 0) ? 1.0 : -1.0;  // (-1)^k
  double kfact = 1.0;
  for (int i = 1; i <= k; ++i) kfact *= i;
  while (z.real() < 12.0) {
    // psi^{(k)}(z) = psi^{(k)}(z+1) - (-1)^k k! z^{-k-1}
    shift -= sgn * kfact * std::pow(z, Complex(-(k + 1.0)));
    z += 1.0;
  }
  Complex res;
  if (k == 0) {
    res = std::log(z) - 0.5 / z;
    Complex z2 = 1.0 / (z * z), zp = z2;
    for (size_t n = 0; n < bern.size(); ++n) {
      res -= bern[n] / (2.0 * (n + 1.0)) * zp;
      zp *= z2;
    }
  } else {
    // d^k/dz^k [ log z - 1/(2z) - sum B_{2n} / (2n z^{2n}) ]
    double f = 1.0;
    for (int i = 1; i < k; ++i) f *= i;           // (k-1)!
    res = -sgn * f * std::pow(z, Complex(-(double)k));  // (-1)^{k-1} (k-1)! z^-k
    double fk = f * k;                            // k!
    res -= sgn * 0.5 * fk * std::pow(z, Complex(-(k + 1.0)));
    for (size_t n = 0; n < bern.size(); ++n) {
      double m = 2.0 * (n + 1.0);
      double rising = 1.0;  // (m)(m+1)...(m+k-1)
      for (int i = 0; i < k; ++i) rising *= (m + i);
      res -= sgn * bern[n] / m * rising * std::pow(z, Complex(-(m + k)));
    }
  }
  return res + shift;
}

// Gamma(alpha I + X) for nilpotent X, and its inverse (the same series for
// 1/Gamma). Requires Re(alpha) > 0.
inline CMatrix matrix_gamma(Complex alpha, const CMatrix& x, const Tolerance& tol = {},
                            bool inverse = false) {
  const int dim = static_cast<int>(x.rows());
  CMatrix l = CMatrix::Zero(dim, dim);
  CMatrix xp = CMatrix::Identity(dim, dim);
  double kfact = 1.0;
  for (int k = 1; k <= dim; ++k) {
    xp = xp * x;
    if (xp.norm() <= 1e-300) break;
    kfact *= k;
    l += (polygamma(k - 1, alpha) / kfact) * xp;
  }
  if (inverse) l = -l;
  Complex scale = inverse ? std::exp(-log_gamma(alpha)) : std::exp(log_gamma(alpha));
  return scale * linalg::nilpotent_exp(l, tol);
}

}  // namespace terp
