#pragma once

// Dense subspace arithmetic over C^n (and R^n) used throughout the library.
// Subspaces are column spans; every rank decision goes through one singular
// value threshold so that tolerance behaviour is uniform.

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <vector>

namespace terp {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;
inline const Complex kTwoPiI{0.0, 2.0 * kPi};

// Relative singular-value threshold. All rank/membership decisions in the
// library are made at `rel` times the largest singular value of the matrix
// under inspection.
struct Tolerance {
  double rel = 1e-9;

  double cut(double largest_sv) const { return rel * std::max(largest_sv, 1.0); }
};

// Three-valued verdict for positivity-style checks whose boolean answer can
// sit on a numerical wall.
enum class Verdict { no, indeterminate, yes };

inline Verdict verdict_and(Verdict a, Verdict b) {
  if (a == Verdict::no || b == Verdict::no) return Verdict::no;
  if (a == Verdict::indeterminate || b == Verdict::indeterminate)
    return Verdict::indeterminate;
  return Verdict::yes;
}

inline bool definitely(Verdict v) { return v == Verdict::yes; }

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::no: return "no";
    case Verdict::indeterminate: return "indeterminate";
    default: return "yes";
  }
}

namespace linalg {

template <typename M>
int rank(const M& a, const Tolerance& tol) {
  if (a.cols() == 0 || a.rows() == 0) return 0;
  Eigen::JacobiSVD<M> svd(a);
  const auto& sv = svd.singularValues();
  double cut = tol.cut(sv(0));
  int r = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > cut) ++r;
  return r;
}

// Orthonormal basis of the column span.
template <typename M>
M orthonormal_basis(const M& a, const Tolerance& tol) {
  if (a.cols() == 0) return M(a.rows(), 0);
  Eigen::JacobiSVD<M> svd(a, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) <= 0.0) return M(a.rows(), 0);
  double cut = tol.cut(sv(0));
  int r = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > cut) ++r;
  return svd.matrixU().leftCols(r);
}

// Right null space (kernel) of a, as an orthonormal basis.
template <typename M>
M kernel(const M& a, const Tolerance& tol) {
  if (a.cols() == 0) return M(0, 0);
  if (a.rows() == 0) return M::Identity(a.cols(), a.cols());
  Eigen::JacobiSVD<M> svd(a, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  double cut = sv.size() ? tol.cut(sv(0)) : 0.0;
  int r = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > cut) ++r;
  return svd.matrixV().rightCols(a.cols() - r);
}

template <typename M>
M subspace_sum(const M& a, const M& b, const Tolerance& tol) {
  M j(a.rows(), a.cols() + b.cols());
  j << a, b;
  return orthonormal_basis(j, tol);
}

// Intersection of two column spans.
template <typename M>
M intersect(const M& a, const M& b, const Tolerance& tol) {
  if (a.cols() == 0 || b.cols() == 0) return M(a.rows(), 0);
  M oa = orthonormal_basis(a, tol);
  M ob = orthonormal_basis(b, tol);
  if (oa.cols() == 0 || ob.cols() == 0) return M(a.rows(), 0);
  M j(a.rows(), oa.cols() + ob.cols());
  j << oa, -ob;
  M k = kernel(j, tol);
  if (k.cols() == 0) return M(a.rows(), 0);
  M result = oa * k.topRows(oa.cols());
  return orthonormal_basis(result, tol);
}

// Does span(b) lie inside span(a)?
template <typename M>
bool contains(const M& a, const M& b, const Tolerance& tol) {
  if (b.cols() == 0) return true;
  M oa = orthonormal_basis(a, tol);
  M ob = orthonormal_basis(b, tol);
  if (ob.cols() > oa.cols()) return false;
  for (int i = 0; i < ob.cols(); ++i) {
    auto v = ob.col(i);
    auto resid = v - oa * (oa.adjoint() * v);
    if (resid.norm() > 10.0 * tol.rel * std::max(1.0, v.norm())) return false;
  }
  return true;
}

template <typename M>
bool same_subspace(const M& a, const M& b, const Tolerance& tol) {
  return rank(a, tol) == rank(b, tol) && contains(a, b, tol) && contains(b, a, tol);
}

// Orthogonal complement of span(w) inside span(v), with respect to the
// standard inner product. Both inputs are assumed to satisfy span(w) <= span(v).
template <typename M>
M complement_in(const M& w, const M& v, const Tolerance& tol) {
  M ov = orthonormal_basis(v, tol);
  M ow = orthonormal_basis(w, tol);
  if (ow.cols() == 0) return ov;
  M proj = ov - ow * (ow.adjoint() * ov);
  return orthonormal_basis(proj, tol);
}

// Vectors v in span(part) with  b^T S v = 0 for every column b of sub.
// This is the right orthogonal complement for a bilinear form S; for the
// (anti)symmetric forms used here left and right complements agree.
inline CMatrix bilinear_complement_in(const CMatrix& sub, const CMatrix& part,
                                      const CMatrix& s, const Tolerance& tol) {
  CMatrix opart = orthonormal_basis(part, tol);
  if (sub.cols() == 0) return opart;
  CMatrix cond = sub.transpose() * s * opart;  // (#sub) x (#part)
  CMatrix k = kernel(cond, tol);
  if (k.cols() == 0) return CMatrix(part.rows(), 0);
  return orthonormal_basis(CMatrix(opart * k), tol);
}

// Matrix exponential of a nilpotent matrix by its (finite) Taylor series.
template <typename M>
M nilpotent_exp(const M& n, const Tolerance& tol) {
  const int dim = static_cast<int>(n.rows());
  M term = M::Identity(dim, dim);
  M sum = term;
  for (int k = 1; k <= dim; ++k) {
    term = (term * n) / static_cast<double>(k);
    if (term.norm() <= tol.rel * std::max(1.0, sum.norm())) break;
    sum += term;
  }
  return sum;
}

// Smallest m >= 0 with n^m = 0 (at tolerance). Returns -1 when n^dim is not
// negligible, i.e. the matrix is not nilpotent.
inline int nilpotency_index(const RMatrix& n, const Tolerance& tol) {
  const int dim = static_cast<int>(n.rows());
  double scale = std::max(1.0, n.norm());
  RMatrix p = RMatrix::Identity(dim, dim);
  for (int m = 0; m <= dim; ++m) {
    if (p.norm() <= tol.rel * std::pow(scale, m)) return m;
    p = p * n;
  }
  return -1;
}

// Positive definiteness of a (numerically) hermitian Gram matrix, with an
// indeterminate band around zero.
inline Verdict positive_definite(const CMatrix& g, const Tolerance& tol) {
  if (g.rows() == 0) return Verdict::yes;
  CMatrix h = 0.5 * (g + g.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  double scale = std::max(1.0, h.norm());
  double lo = es.eigenvalues().minCoeff();
  if (lo > tol.rel * scale) return Verdict::yes;
  if (lo < -tol.rel * scale) return Verdict::no;
  return Verdict::indeterminate;
}

inline double min_eigenvalue(const CMatrix& g) {
  if (g.rows() == 0) return 0.0;
  CMatrix h = 0.5 * (g + g.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  return es.eigenvalues().minCoeff();
}

}  // namespace linalg
}  // namespace terp
