#pragma once

// Decreasing exhaustive filtrations of C^n, stored as jump levels with a
// spanning basis per level. Between jumps the filtration is constant; above
// the highest listed level it is zero and at (and below) the lowest listed
// level it must span the whole space.

#include "terp/linalg.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <sstream>

namespace terp {

class Filtration {
 public:
  Filtration() = default;

  // jumps: level -> basis of F^level (whole subspace, not an increment).
  Filtration(int n, std::map<int, CMatrix> jumps) : n_(n) {
    for (auto& [p, basis] : jumps) {
      if (basis.rows() != n)
        throw std::invalid_argument("filtration basis has wrong row count");
      jumps_.emplace_back(p, std::move(basis));
    }
    std::sort(jumps_.begin(), jumps_.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
  }

  int n() const { return n_; }
  bool empty() const { return jumps_.empty(); }
  int lowest_level() const { return jumps_.front().first; }
  int highest_level() const { return jumps_.back().first; }

  const std::vector<std::pair<int, CMatrix>>& jumps() const { return jumps_; }

  // F^p as a (possibly non-orthonormal) basis matrix.
  CMatrix at(int p) const {
    for (const auto& [level, basis] : jumps_)
      if (level >= p) return basis;
    return CMatrix(n_, 0);
  }

  int dim_at(int p, const Tolerance& tol) const {
    return linalg::rank(at(p), tol);
  }

  std::map<int, int> dimension_profile(const Tolerance& tol) const {
    std::map<int, int> dims;
    for (const auto& [level, basis] : jumps_) dims[level] = linalg::rank(basis, tol);
    return dims;
  }

  // Nesting, full column ranks, exhaustiveness.
  void validate(const Tolerance& tol) const {
    if (jumps_.empty()) throw std::invalid_argument("filtration has no jumps");
    for (const auto& [level, basis] : jumps_) {
      if (linalg::rank(CMatrix(basis), tol) != basis.cols()) {
        std::ostringstream os;
        os << "filtration basis at level " << level << " is column-rank deficient";
        throw std::invalid_argument(os.str());
      }
    }
    if (linalg::rank(CMatrix(jumps_.front().second), tol) != n_)
      throw std::invalid_argument("filtration is not exhaustive: lowest level does not span");
    for (size_t i = 1; i < jumps_.size(); ++i) {
      if (!linalg::contains(jumps_[i - 1].second, jumps_[i].second, tol)) {
        std::ostringstream os;
        os << "filtration not nested between levels " << jumps_[i - 1].first
           << " and " << jumps_[i].first;
        throw std::invalid_argument(os.str());
      }
    }
  }

  // Image filtration m . F (levelwise), bases orthonormalized.
  Filtration map(const CMatrix& m, const Tolerance& tol) const {
    std::map<int, CMatrix> out;
    for (const auto& [level, basis] : jumps_)
      out[level] = linalg::orthonormal_basis(CMatrix(m * basis), tol);
    return Filtration(static_cast<int>(m.rows()), std::move(out));
  }

  // Entrywise conjugate filtration.
  Filtration conjugate() const {
    std::map<int, CMatrix> out;
    for (const auto& [level, basis] : jumps_) out[level] = basis.conjugate();
    return Filtration(n_, std::move(out));
  }

  // Filtration induced on a subspace, expressed in the coordinates of the
  // given orthonormal (real or complex) basis of that subspace.
  Filtration restrict_to(const CMatrix& part_basis, const Tolerance& tol) const {
    std::map<int, CMatrix> out;
    int k = static_cast<int>(part_basis.cols());
    for (const auto& [level, basis] : jumps_) {
      CMatrix inter = linalg::intersect(basis, part_basis, tol);
      out[level] = part_basis.adjoint() * inter;  // coordinates in the part
    }
    return Filtration(k, std::move(out));
  }

  bool equals(const Filtration& other, const Tolerance& tol) const {
    if (n_ != other.n_) return false;
    int lo = std::min(lowest_level(), other.lowest_level()) - 1;
    int hi = std::max(highest_level(), other.highest_level()) + 1;
    for (int p = lo; p <= hi; ++p)
      if (!linalg::same_subspace(at(p), other.at(p), tol)) return false;
    return true;
  }

 private:
  int n_ = 0;
  std::vector<std::pair<int, CMatrix>> jumps_;  // ascending levels
};

// Nondegenerate (-1)^w-symmetric pairing, real on the real form.
struct PairingS {
  CMatrix matrix;
  int w = 0;

  int sign() const { return (w % 2 == 0) ? 1 : -1; }

  void validate(const Tolerance& tol) const {
    double scale = std::max(1.0, matrix.norm());
    CMatrix skew = matrix - static_cast<double>(sign()) * matrix.transpose();
    if (skew.norm() > tol.rel * scale)
      throw std::invalid_argument("pairing does not have (-1)^w symmetry");
    if (matrix.imag().norm() > tol.rel * scale)
      throw std::invalid_argument("pairing is not real on the real form");
    if (linalg::rank(matrix, tol) != matrix.rows())
      throw std::invalid_argument("pairing is degenerate");
  }
};

inline Complex bilinear(const CMatrix& s, const CVector& a, const CVector& b) {
  return (a.transpose() * s * b)(0, 0);
}

}  // namespace terp
