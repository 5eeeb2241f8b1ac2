#pragma once

// Curated TERP instances shared between the unit tests and the acceptance
// suite. Each builder returns data that already satisfies the structural
// invariants; polarization signs are chosen per instance.

#include "terp/terp_structure.hpp"

#include <random>

namespace terp::testing {

inline CMatrix column(std::initializer_list<Complex> entries) {
  CMatrix m(static_cast<int>(entries.size()), 1);
  int i = 0;
  for (Complex z : entries) m(i++, 0) = z;
  return m;
}

// rank 1, eigenvalue 1, even weight: F^{w/2} = H.
inline TerpData rank1_unit(int w, double s) {
  TerpData t;
  t.w = w;
  t.monodromy.ms = RMatrix::Identity(1, 1);
  t.monodromy.n = RMatrix::Zero(1, 1);
  t.monodromy.classes.push_back({Complex(1.0, 0.0), CMatrix::Identity(1, 1)});
  t.s = s * CMatrix::Identity(1, 1);
  t.f = Filtration(1, {{w / 2, CMatrix::Identity(1, 1)}});
  return t;
}

// rank 2, eigenvalue -1, odd weight w: the filtration has the line
// F^{(w+1)/2} = F^{(w-1)/2} = span(v) of a weight-(w-1) structure. The line
// must be isotropic for the supplied real symmetric pairing.
inline TerpData rank2_minus_one(int w, const CMatrix& line, const CMatrix& s) {
  TerpData t;
  t.w = w;
  t.monodromy.ms = -RMatrix::Identity(2, 2);
  t.monodromy.n = RMatrix::Zero(2, 2);
  t.monodromy.classes.push_back({Complex(0.5, 0.0), CMatrix::Identity(2, 2)});
  t.s = s;
  int top = (w + 1) / 2;  // the line level; (w-1)/2 + 1
  t.f = Filtration(2, {{top, line}, {top - 1, line}, {top - 2, CMatrix::Identity(2, 2)}});
  return t;
}

// rank 2, complex conjugate eigenvalue pair exp(-+ 2 pi i alpha), odd weight,
// polarized pure for s_sign = +1.
inline TerpData rank2_complex_pair(double alpha, int w, double s_sign) {
  TerpData t;
  t.w = w;
  double theta = -2.0 * kPi * alpha;  // eigenvalue exp(i theta)
  RMatrix rot(2, 2);
  rot << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  t.monodromy.ms = rot;
  t.monodromy.n = RMatrix::Zero(2, 2);
  // rot (e1 -+ i e2) = exp(+- i theta) (e1 -+ i e2)
  CMatrix v = column({Complex(1, 0), Complex(0, -1)}) / std::sqrt(2.0);
  CMatrix vbar = v.conjugate();
  t.monodromy.classes.push_back({Complex(alpha, 0.0), v});
  t.monodromy.classes.push_back({Complex(1.0 - alpha, 0.0), vbar});
  t.s = s_sign * CMatrix::Identity(2, 2);
  int mid = (w - 1) / 2;  // dual levels a + a' = w - 1 with a = a'
  t.f = Filtration(2, {{mid, CMatrix::Identity(2, 2)}});
  return t;
}

// 2x2 Jordan block on the eigenvalue-1 class at odd weight w. The twisted
// filtration is span(e2) at its top level; polarized (mixed) for sign = +1.
inline TerpData jordan2(int w, double sign, const Tolerance& tol = {}) {
  TerpData t;
  t.w = w;
  t.monodromy.ms = RMatrix::Identity(2, 2);
  t.monodromy.n = RMatrix::Zero(2, 2);
  t.monodromy.n(0, 1) = 1.0;
  t.monodromy.classes.push_back({Complex(1.0, 0.0), CMatrix::Identity(2, 2)});
  CMatrix s(2, 2);
  s << 0, 1, -1, 0;
  t.s = sign * s;
  int top = (w + 1) / 2;
  std::map<int, CMatrix> ft_jumps{{top, column({0.0, 1.0})},
                                  {top - 1, CMatrix::Identity(2, 2)}};
  Filtration ftw(2, std::move(ft_jumps));
  CMatrix g = gamma_twist(t.monodromy, TwistDirection::forward, tol);
  t.f = ftw.map(g, tol);
  return t;
}

// 3x3 Jordan block on the eigenvalue-1 class at even weight w; polarized
// (mixed) for sign = +1.
inline TerpData jordan3(int w, double sign, const Tolerance& tol = {}) {
  TerpData t;
  t.w = w;
  t.monodromy.ms = RMatrix::Identity(3, 3);
  t.monodromy.n = RMatrix::Zero(3, 3);
  t.monodromy.n(0, 1) = 1.0;
  t.monodromy.n(1, 2) = 1.0;
  t.monodromy.classes.push_back({Complex(1.0, 0.0), CMatrix::Identity(3, 3)});
  CMatrix s = CMatrix::Zero(3, 3);
  s(0, 2) = 1.0;
  s(1, 1) = -1.0;
  s(2, 0) = 1.0;
  t.s = sign * s;
  int mid = w / 2;
  std::map<int, CMatrix> ft_jumps{{mid + 1, column({0.0, 0.0, 1.0})},
                                  {mid, column({0.0, 0.0, 1.0})},
                                  {mid - 1, CMatrix::Identity(3, 3)}};
  // F~ levels: span(e3) at mid+1, span(e3,e2) at mid, everything below
  CMatrix two(3, 2);
  two << 0, 0, 0, 1, 1, 0;
  ft_jumps[mid] = two;
  Filtration ftw(3, std::move(ft_jumps));
  CMatrix g = gamma_twist(t.monodromy, TwistDirection::forward, tol);
  t.f = ftw.map(g, tol);
  return t;
}

// direct sum of two instances (classes, pairing and filtration blockwise)
inline TerpData direct_sum(const TerpData& a, const TerpData& b,
                           const Tolerance& tol = {}) {
  if (a.w != b.w) throw std::invalid_argument("direct sum needs equal weights");
  const int na = a.dim(), nb = b.dim(), n = na + nb;
  TerpData t;
  t.w = a.w;
  t.monodromy.ms = RMatrix::Zero(n, n);
  t.monodromy.ms.topLeftCorner(na, na) = a.monodromy.ms;
  t.monodromy.ms.bottomRightCorner(nb, nb) = b.monodromy.ms;
  t.monodromy.n = RMatrix::Zero(n, n);
  t.monodromy.n.topLeftCorner(na, na) = a.monodromy.n;
  t.monodromy.n.bottomRightCorner(nb, nb) = b.monodromy.n;
  auto lift = [&](const CMatrix& m, bool top) {
    CMatrix out = CMatrix::Zero(n, m.cols());
    if (top)
      out.topRows(na) = m;
    else
      out.bottomRows(nb) = m;
    return out;
  };
  auto add_class = [&](Complex alpha0, const CMatrix& basis) {
    for (auto& cls : t.monodromy.classes) {
      if (std::abs(cls.alpha0 - alpha0) < 1e-12) {
        CMatrix joined(n, cls.basis.cols() + basis.cols());
        joined << cls.basis, basis;
        cls.basis = joined;
        return;
      }
    }
    t.monodromy.classes.push_back({alpha0, basis});
  };
  for (const auto& cls : a.monodromy.classes) add_class(cls.alpha0, lift(cls.basis, true));
  for (const auto& cls : b.monodromy.classes) add_class(cls.alpha0, lift(cls.basis, false));
  t.s = CMatrix::Zero(n, n);
  t.s.topLeftCorner(na, na) = a.s;
  t.s.bottomRightCorner(nb, nb) = b.s;
  std::map<int, CMatrix> jumps;
  int lo = std::min(a.f.lowest_level(), b.f.lowest_level());
  int hi = std::max(a.f.highest_level(), b.f.highest_level());
  for (int p = lo; p <= hi; ++p) {
    CMatrix fa = a.f.at(p), fb = b.f.at(p);
    CMatrix joint(n, fa.cols() + fb.cols());
    joint << lift(fa, true), lift(fb, false);
    jumps[p] = linalg::orthonormal_basis(joint, tol);
  }
  t.f = Filtration(n, std::move(jumps));
  return t;
}

// conjugate the whole instance by a random real orthogonal matrix
inline TerpData conjugate_by_orthogonal(const TerpData& t, std::mt19937_64& rng,
                                        const Tolerance& tol = {}) {
  const int n = t.dim();
  std::normal_distribution<double> nd;
  RMatrix g = RMatrix::NullaryExpr(n, n, [&](Eigen::Index, Eigen::Index) { return nd(rng); });
  Eigen::HouseholderQR<RMatrix> qr(g);
  RMatrix q = qr.householderQ();
  TerpData out = t;
  out.monodromy.ms = q * t.monodromy.ms * q.transpose();
  out.monodromy.n = q * t.monodromy.n * q.transpose();
  for (auto& cls : out.monodromy.classes) cls.basis = q.cast<Complex>() * cls.basis;
  out.s = q.cast<Complex>() * t.s * q.transpose().cast<Complex>();
  out.f = t.f.map(q.cast<Complex>(), tol);
  return out;
}

// random orthogonality-valid instance: a direct sum of valid building blocks
// in a random real orthogonal frame
inline TerpData random_valid_instance(std::mt19937_64& rng, const Tolerance& tol = {}) {
  std::uniform_real_distribution<double> ur(0.05, 0.45);
  std::uniform_int_distribution<int> coin(0, 1);
  int w = coin(rng) == 0 ? 1 : 3;  // odd weights keep all blocks available
  CMatrix anti(2, 2);
  anti << 0, 1, 1, 0;
  auto pick_block = [&](int which) -> TerpData {
    switch (which) {
      case 0:
        return rank2_minus_one(w, column({Complex(1, 0), Complex(0, 1)}),
                               CMatrix(-CMatrix::Identity(2, 2)));
      case 1:
        return rank2_minus_one(w, column({Complex(1, 0), Complex(0, 0)}), anti);
      case 2: return rank2_complex_pair(ur(rng), w, 1.0);
      default: return jordan2(w, coin(rng) ? 1.0 : -1.0, tol);
    }
  };
  std::uniform_int_distribution<int> nblocks(1, 3), which(0, 3);
  TerpData t = pick_block(which(rng));
  int extra = nblocks(rng) - 1;
  for (int i = 0; i < extra; ++i) t = direct_sum(t, pick_block(which(rng)), tol);
  return conjugate_by_orthogonal(t, rng, tol);
}

}  // namespace terp::testing
