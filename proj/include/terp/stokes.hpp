#pragma once

// Finite encodings of semi-simple TERP-structures: eigenvalues u_1..u_n of
// the pole part, a non-Stokes direction xi on the unit circle, and a unit
// upper-triangular Stokes matrix T. Monodromy is (-1)^w T^{-1} T^t and the
// flat pairing is T + T^t.

#include "terp/linalg.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace terp {

struct StokesData {
  int w = 0;
  std::vector<Complex> u;  // pairwise distinct pole-part eigenvalues
  Complex xi{1.0, 0.0};    // unit modulus, not a Stokes direction
  CMatrix t;               // unit upper triangular

  int dim() const { return static_cast<int>(u.size()); }
};

// All xi on S^1 with Re((u_i - u_j)/xi) = 0 for some i != j, as arguments in
// [0, 2 pi).
inline std::vector<double> stokes_directions(const std::vector<Complex>& u,
                                             const Tolerance& tol = {}) {
  const double two_pi = 2.0 * kPi;
  std::vector<double> args;
  for (size_t i = 0; i < u.size(); ++i)
    for (size_t j = 0; j < u.size(); ++j) {
      if (i == j) continue;
      Complex d = u[i] - u[j];
      if (std::abs(d) <= tol.rel)
        throw std::invalid_argument("repeated pole-part eigenvalues");
      double a = std::arg(d) + kPi / 2.0;
      a = std::fmod(std::fmod(a, two_pi) + two_pi, two_pi);
      args.push_back(a);
    }
  std::sort(args.begin(), args.end());
  std::vector<double> out;
  for (double a : args) {
    if (out.empty() || std::abs(a - out.back()) > 1e-12) out.push_back(a);
  }
  if (out.size() > 1 && std::abs(out.back() - out.front() - two_pi) < 1e-12)
    out.pop_back();
  return out;
}

inline bool is_stokes_direction(const std::vector<Complex>& u, Complex xi,
                                const Tolerance& tol = {}) {
  for (size_t i = 0; i < u.size(); ++i)
    for (size_t j = i + 1; j < u.size(); ++j) {
      Complex q = (u[i] - u[j]) / xi;
      if (std::abs(q.real()) <= tol.rel * std::max(1.0, std::abs(q))) return true;
    }
  return false;
}

// The listed eigenvalue order agrees strictly with the xi-order
// Re(u_i / xi) < Re(u_j / xi) for i < j.
inline bool validate_order(const StokesData& data, const Tolerance& tol = {}) {
  if (is_stokes_direction(data.u, data.xi, tol))
    throw std::invalid_argument("xi is a Stokes direction");
  for (size_t i = 0; i + 1 < data.u.size(); ++i) {
    double a = (data.u[i] / data.xi).real();
    double b = (data.u[i + 1] / data.xi).real();
    if (!(a < b)) return false;
  }
  return true;
}

// (-1)^w T^{-1} T^t.
inline CMatrix stokes_monodromy(const CMatrix& t, int w) {
  double sign = (w % 2 == 0) ? 1.0 : -1.0;
  return sign * t.inverse() * t.transpose();
}

inline CMatrix stokes_monodromy(const StokesData& d) {
  return stokes_monodromy(d.t, d.w);
}

// Integer version, exact for integer Stokes matrices (unit triangular, so the
// inverse is integral).
using IMatrix = Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic>;

inline IMatrix imatrix_inverse_unit_upper(const IMatrix& t) {
  const int n = static_cast<int>(t.rows());
  IMatrix inv = IMatrix::Identity(n, n);
  // back substitution; diagonal is 1
  for (int col = 0; col < n; ++col)
    for (int row = col - 1; row >= 0; --row) {
      long long acc = 0;
      for (int k = row + 1; k <= col; ++k) acc += t(row, k) * inv(k, col);
      inv(row, col) = -acc;
    }
  return inv;
}

inline IMatrix stokes_monodromy_exact(const IMatrix& t, int w) {
  long long sign = (w % 2 == 0) ? 1 : -1;
  return sign * imatrix_inverse_unit_upper(t) * t.transpose();
}

struct HypothesisReport {
  Verdict positive = Verdict::no;    // T + T^t positive definite
  bool eigenvalues_unit = false;     // all monodromy eigenvalues of modulus 1
  bool excluded_eigenvalue_absent = false;  // (-1)^{w+1} not an eigenvalue
  std::vector<Complex> monodromy_eigenvalues;
  Verdict overall = Verdict::no;
};

// Hypothesis of the positivity conjecture for semi-simple data: T + T^t
// positive definite, and the consequences on the monodromy spectrum.
inline HypothesisReport conjecture_hypothesis(const StokesData& d,
                                              const Tolerance& tol = {}) {
  HypothesisReport rep;
  double iscale = std::max(1.0, d.t.norm());
  if (d.t.imag().norm() > tol.rel * iscale)
    throw std::invalid_argument("hypothesis check requires a real Stokes matrix");
  RMatrix tre = d.t.real();
  RMatrix sym = tre + tre.transpose();
  Eigen::SelfAdjointEigenSolver<RMatrix> es(sym);
  double lo = es.eigenvalues().minCoeff();
  double scale = std::max(1.0, sym.norm());
  rep.positive = lo > tol.rel * scale    ? Verdict::yes
                 : lo < -tol.rel * scale ? Verdict::no
                                         : Verdict::indeterminate;
  CMatrix m = stokes_monodromy(d.t, d.w);
  Eigen::ComplexEigenSolver<CMatrix> mes(m);
  rep.monodromy_eigenvalues.assign(mes.eigenvalues().data(),
                                   mes.eigenvalues().data() + mes.eigenvalues().size());
  rep.eigenvalues_unit = true;
  rep.excluded_eigenvalue_absent = true;
  double excluded = (d.w % 2 == 0) ? -1.0 : 1.0;  // (-1)^{w+1}
  for (Complex ev : rep.monodromy_eigenvalues) {
    if (std::abs(std::abs(ev) - 1.0) > 1e-10) rep.eigenvalues_unit = false;
    if (std::abs(ev - excluded) < 1e-8) rep.excluded_eigenvalue_absent = false;
  }
  rep.overall = rep.positive;
  if (rep.positive == Verdict::yes &&
      (!rep.eigenvalues_unit || !rep.excluded_eigenvalue_absent))
    rep.overall = Verdict::indeterminate;  // hypothesis holds but spectrum is off: numerics
  return rep;
}

// Canonical representative of the sign-equivalence class {B T B}. Nonzero
// off-diagonal entries are processed in row-major order; each union-find tree
// edge pins one sign so that the entry gets nonnegative real part (ties by
// nonnegative imaginary part). Constant on classes and idempotent.
inline CMatrix sign_normalize(const CMatrix& t) {
  const int n = static_cast<int>(t.rows());
  std::vector<int> parent(n), order(n, 0);
  std::vector<double> sign_to_root(n, 1.0);
  for (int i = 0; i < n; ++i) parent[i] = i;
  std::function<std::pair<int, double>(int)> find = [&](int v) -> std::pair<int, double> {
    if (parent[v] == v) return {v, 1.0};
    auto [root, s] = find(parent[v]);
    parent[v] = root;
    sign_to_root[v] *= s;
    return {root, sign_to_root[v]};
  };
  auto canonical_positive = [](Complex z) {
    if (std::abs(z.real()) > 1e-14) return z.real() > 0.0;
    return z.imag() >= 0.0;
  };
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (std::abs(t(i, j)) == 0.0) continue;
      auto [ri, si] = find(i);
      auto [rj, sj] = find(j);
      if (ri == rj) continue;  // sign already pinned by earlier entries
      // choose the sign of j's tree so that s_i * s_j * t(i,j) is canonical
      double need = canonical_positive(si * sj * t(i, j)) ? 1.0 : -1.0;
      parent[rj] = ri;
      sign_to_root[rj] = need;
    }
  }
  Eigen::VectorXd b(n);
  for (int i = 0; i < n; ++i) b(i) = find(i).second;
  CMatrix out = t;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out(i, j) = b(i) * b(j) * t(i, j);
  return out;
}

}  // namespace terp
