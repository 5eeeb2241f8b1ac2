#pragma once

// Hodge-structure checks on filtrations of C^n: pure and polarized Hodge
// structures, classifying-space membership, polarized mixed Hodge structures
// with the weight filtration of a nilpotent infinitesimal isometry, and
// nilpotent-orbit scans e^{rho N} F.

#include "terp/filtration.hpp"
#include "terp/weight_filtration.hpp"

#include <atomic>
#include <optional>
#include <thread>

namespace terp {

// i^k as an exact complex unit.
inline Complex unit_i_pow(long long k) {
  switch (((k % 4) + 4) % 4) {
    case 0: return {1, 0};
    case 1: return {0, 1};
    case 2: return {-1, 0};
    default: return {0, -1};
  }
}

// F^p (+) conj(F^{w+1-p}) = C^n for all p.
inline bool is_hodge_structure(const Filtration& f, int w, const Tolerance& tol = {}) {
  const int n = f.n();
  int lo = std::min(f.lowest_level(), w + 1 - f.highest_level()) - 1;
  int hi = std::max(f.highest_level(), w + 1 - f.lowest_level()) + 1;
  for (int p = lo; p <= hi; ++p) {
    CMatrix a = f.at(p);
    CMatrix b = f.at(w + 1 - p).conjugate();
    int da = linalg::rank(a, tol), db = linalg::rank(b, tol);
    if (da + db != n) return false;
    CMatrix j(n, a.cols() + b.cols());
    j << a, b;
    if (linalg::rank(j, tol) != n) return false;
  }
  return true;
}

// S(F^p, F^{w+1-p}) = 0 for all p.
inline bool s_orthogonal(const Filtration& f, const CMatrix& s, int w,
                         const Tolerance& tol = {}) {
  int lo = f.lowest_level(), hi = f.highest_level();
  for (int p = lo; p <= hi + 1; ++p) {
    CMatrix a = f.at(p), b = f.at(w + 1 - p);
    if (a.cols() == 0 || b.cols() == 0) continue;
    CMatrix vals = a.transpose() * s * b;
    if (vals.norm() > tol.rel * std::max(1.0, s.norm())) return false;
  }
  return true;
}

// Positivity of i^{p-(w-p)} S(a, conj a) on every Hodge piece H^{p,w-p}.
inline Verdict hodge_positivity(const Filtration& f, const CMatrix& s, int w,
                                const Tolerance& tol = {}) {
  Verdict acc = Verdict::yes;
  for (int p = f.lowest_level() - 1; p <= f.highest_level() + 1; ++p) {
    CMatrix piece = linalg::intersect(f.at(p), CMatrix(f.at(w - p).conjugate()), tol);
    if (piece.cols() == 0) continue;
    CMatrix gram = unit_i_pow(2LL * p - w) *
                   (piece.transpose() * s * piece.conjugate());
    acc = verdict_and(acc, linalg::positive_definite(gram, tol));
    if (acc == Verdict::no) return acc;
  }
  return acc;
}

inline Verdict is_polarized_hodge_structure(const Filtration& f, const PairingS& s,
                                            int w, const Tolerance& tol = {}) {
  double sign = (w % 2 == 0) ? 1.0 : -1.0;
  if ((s.matrix - sign * s.matrix.transpose()).norm() >
      tol.rel * std::max(1.0, s.matrix.norm()))
    throw std::invalid_argument("pairing symmetry does not match the weight");
  if (!is_hodge_structure(f, w, tol)) return Verdict::no;
  if (!s_orthogonal(f, s.matrix, w, tol)) return Verdict::no;
  return hodge_positivity(f, s.matrix, w, tol);
}

// Membership in the compact dual: dimension profile matches the reference and
// F is S-isotropic in the (w+1-p) sense.
inline bool in_check_d(const Filtration& f, const CMatrix& s, int w,
                       const std::map<int, int>& reference_dims,
                       const Tolerance& tol = {}) {
  // reference_dims lists dims at jump levels; between jumps the filtration is
  // constant, so the dim at p is that of the smallest listed level >= p.
  auto ref_at = [&](int p) {
    auto it = reference_dims.lower_bound(p);
    return it == reference_dims.end() ? 0 : it->second;
  };
  int lo = std::min(f.lowest_level(), reference_dims.begin()->first) - 1;
  int hi = std::max(f.highest_level(), reference_dims.rbegin()->first) + 1;
  for (int p = lo; p <= hi; ++p)
    if (f.dim_at(p, tol) != ref_at(p)) return false;
  return s_orthogonal(f, s, w, tol);
}

inline Verdict in_d(const Filtration& f, const PairingS& s, int w,
                    const std::map<int, int>& reference_dims,
                    const Tolerance& tol = {}) {
  if (!in_check_d(f, s.matrix, w, reference_dims, tol)) return Verdict::no;
  if (!is_hodge_structure(f, w, tol)) return Verdict::no;
  return hodge_positivity(f, s.matrix, w, tol);
}

// ---------------------------------------------------------------------------
// PMHS
// ---------------------------------------------------------------------------

struct PmhsReport {
  bool graded_pure = false;       // axiom 1: F induces pure HS on each Gr^W_k
  bool strict = false;            // axiom 2: N(F^p) in F^{p-1}
  bool orthogonal = false;        // axiom 3: S(F^p, F^{w+1-p}) = 0
  Verdict positivity = Verdict::no;  // axiom 4 on primitive parts
  Verdict overall = Verdict::no;
  std::string failed_axiom;       // empty when overall != no
};

namespace detail {

// Filtration induced on Gr_level = W_level / W_{level-1}, in the coordinates
// of the real graded basis q (columns complement W_{level-1} in W_level).
inline Filtration induced_on_graded(const Filtration& f, const WeightFiltration& wf,
                                    int level, const RMatrix& q, const Tolerance& tol) {
  RMatrix prev = wf.at(level - 1);
  RMatrix cur = wf.at(level);
  std::map<int, CMatrix> out;
  for (const auto& [p, basis] : f.jumps()) {
    CMatrix inter = linalg::intersect(basis, CMatrix(cur.cast<Complex>()), tol);
    // project (F^p /\ W_level) onto span(q) along span(prev)
    if (inter.cols() == 0) { out[p] = CMatrix(q.cols(), 0); continue; }
    Eigen::Index nq = q.cols(), np = prev.cols();
    CMatrix mix(q.rows(), nq + np);
    mix << q.cast<Complex>(), prev.cast<Complex>();
    CMatrix coef = mix.completeOrthogonalDecomposition().solve(inter);
    out[p] = linalg::orthonormal_basis(CMatrix(coef.topRows(nq)), tol);
  }
  return Filtration(static_cast<int>(q.cols()), std::move(out));
}

}  // namespace detail

// Polarized mixed Hodge structure test with per-axiom report. The weight
// filtration is derived from n inside; s must make n an infinitesimal
// isometry.
inline PmhsReport is_pmhs(const Filtration& f, const RMatrix& n, const CMatrix& s,
                          int w, const Tolerance& tol = {}) {
  double scale = std::max(1.0, s.norm()) * std::max(1.0, n.norm());
  if ((n.transpose().cast<Complex>() * s + s * n.cast<Complex>()).norm() >
      tol.rel * scale * 10.0)
    throw std::invalid_argument("N is not an infinitesimal isometry of S");

  PmhsReport rep;
  WeightFiltration wf = weight_filtration(n, w, tol);

  // axiom 2
  rep.strict = true;
  for (const auto& [p, basis] : f.jumps()) {
    CMatrix img = n.cast<Complex>() * basis;
    if (!linalg::contains(f.at(p - 1), linalg::orthonormal_basis(img, tol), tol)) {
      rep.strict = false;
      break;
    }
  }

  // axiom 3
  rep.orthogonal = s_orthogonal(f, s, w, tol);

  // axiom 1
  rep.graded_pure = true;
  std::map<int, RMatrix> graded_bases;
  for (int k = wf.lowest_level(); k <= wf.highest_level(); ++k) {
    RMatrix q = graded_basis(wf, k, tol);
    graded_bases[k] = q;
    if (q.cols() == 0) continue;
    Filtration fk = detail::induced_on_graded(f, wf, k, q, tol);
    if (fk.empty() || fk.dim_at(fk.lowest_level(), tol) != q.cols() ||
        !is_hodge_structure(fk, k, tol)) {
      rep.graded_pure = false;
      break;
    }
  }

  // axiom 4: i^{p-(w+l-p)} S_l positive on F^p P_{w+l} /\ conj(F^{w+l-p} P_{w+l})
  rep.positivity = Verdict::yes;
  if (rep.graded_pure) {
    PrimitiveDecomposition pd = primitive_decomposition(n, wf, w, tol);
    for (const auto& prim : pd.primitives) {
      if (prim.basis.cols() == 0) continue;
      int l = prim.level - w;
      RMatrix q = graded_bases[prim.level];
      Filtration fk = detail::induced_on_graded(f, wf, prim.level, q, tol);
      // primitive part in graded coordinates
      CMatrix mixq = q.cast<Complex>();
      CMatrix prim_coords =
          mixq.completeOrthogonalDecomposition().solve(prim.basis.cast<Complex>());
      prim_coords = linalg::orthonormal_basis(prim_coords, tol);
      // S_l in graded coordinates
      RMatrix nl = RMatrix::Identity(n.rows(), n.cols());
      for (int e = 0; e < l; ++e) nl = n * nl;
      CMatrix sl = q.transpose().cast<Complex>() * s * (nl * q).cast<Complex>();
      for (int p = fk.lowest_level() - 1; p <= fk.highest_level() + 1; ++p) {
        CMatrix fp = linalg::intersect(fk.at(p), prim_coords, tol);
        CMatrix fq = linalg::intersect(CMatrix(fk.at(w + l - p).conjugate()),
                                       CMatrix(prim_coords.conjugate()), tol);
        CMatrix piece = linalg::intersect(fp, fq, tol);
        if (piece.cols() == 0) continue;
        CMatrix gram = unit_i_pow(2LL * p - (w + l)) *
                       (piece.transpose() * sl * piece.conjugate());
        rep.positivity = verdict_and(rep.positivity, linalg::positive_definite(gram, tol));
        if (rep.positivity == Verdict::no) break;
      }
      if (rep.positivity == Verdict::no) break;
    }
  }

  if (!rep.graded_pure) rep.failed_axiom = "graded-pure";
  else if (!rep.strict) rep.failed_axiom = "strictness";
  else if (!rep.orthogonal) rep.failed_axiom = "orthogonality";
  else if (rep.positivity == Verdict::no) rep.failed_axiom = "positivity";

  if (!rep.graded_pure || !rep.strict || !rep.orthogonal)
    rep.overall = Verdict::no;
  else
    rep.overall = rep.positivity;
  return rep;
}

// ---------------------------------------------------------------------------
// Nilpotent-orbit scans
// ---------------------------------------------------------------------------

inline CMatrix nilpotent_exp_scaled(const RMatrix& n, Complex rho) {
  const int dim = static_cast<int>(n.rows());
  CMatrix term = CMatrix::Identity(dim, dim);
  CMatrix sum = term;
  CMatrix nc = n.cast<Complex>();
  for (int k = 1; k <= dim; ++k) {
    term = (term * nc) * (rho / static_cast<double>(k));
    sum += term;
    if (term.norm() == 0.0) break;
  }
  return sum;
}

// in_d verdict of exp(rho N) F over a grid of rho values. Grid order is
// preserved; rows are independent and evaluated in parallel.
inline std::vector<std::pair<Complex, Verdict>> orbit_region(
    const Filtration& f, const RMatrix& n, const PairingS& s, int w,
    const std::vector<Complex>& rho_grid, const Tolerance& tol = {}) {
  if (rho_grid.empty()) throw std::invalid_argument("empty rho grid");
  std::map<int, int> ref = f.dimension_profile(tol);
  std::vector<std::pair<Complex, Verdict>> rows(rho_grid.size());
  auto eval = [&](size_t i) {
    Filtration fr = f.map(nilpotent_exp_scaled(n, rho_grid[i]), tol);
    rows[i] = {rho_grid[i], in_d(fr, s, w, ref, tol)};
  };
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (rho_grid.size() < 4 || hw == 1) {
    for (size_t i = 0; i < rho_grid.size(); ++i) eval(i);
  } else {
    std::vector<std::thread> pool;
    std::atomic<size_t> next{0};
    for (unsigned t = 0; t < std::min<size_t>(hw, rho_grid.size()); ++t)
      pool.emplace_back([&] {
        for (size_t i = next++; i < rho_grid.size(); i = next++) eval(i);
      });
    for (auto& th : pool) th.join();
  }
  return rows;
}

// Smallest sampled bound b such that Im(rho) > b stays inside D, probed on a
// doubling ladder up to `cap` and refined by bisection. nullopt when even the
// cap fails.
inline std::optional<double> orbit_bound(const Filtration& f, const RMatrix& n,
                                         const PairingS& s, int w,
                                         double cap = 1 << 20,
                                         const Tolerance& tol = {}) {
  std::map<int, int> ref = f.dimension_profile(tol);
  auto member = [&](double b) {
    Filtration fr = f.map(nilpotent_exp_scaled(n, Complex(0.0, b)), tol);
    return in_d(fr, s, w, ref, tol) == Verdict::yes;
  };
  double pass = -1.0;
  for (double b = 1.0; b <= cap; b *= 2.0) {
    if (member(b)) { pass = b; break; }
  }
  if (pass < 0.0) return std::nullopt;
  double fail = pass / 2.0;
  if (pass == 1.0) {
    if (member(0.25)) return 0.25;  // already inside for small Im rho
    fail = 0.25;
  }
  for (int it = 0; it < 40 && (pass - fail) > 1e-3 * std::max(1.0, pass); ++it) {
    double mid = 0.5 * (pass + fail);
    (member(mid) ? pass : fail) = mid;
  }
  return pass;
}

}  // namespace terp
