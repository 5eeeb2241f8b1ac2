#pragma once

// Exact integer models of the ADE root systems in the simple-root basis
// (Gram matrix = Cartan matrix), reflection factorizations of a Coxeter
// element, the Hurwitz braid moves on them, and exhaustive counting of
// factorization classes up to componentwise sign change.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace terp::ade {

using IVec = std::vector<long long>;
using IMat = std::vector<IVec>;  // row major

enum class Kind { A, D, E };

inline Kind kind_from_char(char c) {
  switch (c) {
    case 'A': case 'a': return Kind::A;
    case 'D': case 'd': return Kind::D;
    case 'E': case 'e': return Kind::E;
    default: throw std::invalid_argument("unknown root system type");
  }
}

struct RootSystem {
  Kind kind = Kind::A;
  int rank = 0;
  IMat cartan;              // Gram matrix of the simple roots, (beta,beta) = 2
  std::vector<IVec> roots;  // all roots in simple-root coordinates

  long long pairing(const IVec& a, const IVec& b) const {
    long long s = 0;
    for (int i = 0; i < rank; ++i)
      for (int j = 0; j < rank; ++j) s += a[i] * cartan[i][j] * b[j];
    return s;
  }

  // s_beta(x) = x - (beta, x) beta  for a root beta.
  IVec reflect(const IVec& beta, const IVec& x) const {
    long long c = pairing(beta, x);
    IVec out(x);
    for (int i = 0; i < rank; ++i) out[i] -= c * beta[i];
    return out;
  }

  bool is_root(const IVec& v) const {
    return std::binary_search(roots.begin(), roots.end(), v);
  }
};

inline IMat cartan_matrix(Kind kind, int rank) {
  if (rank < 1) throw std::invalid_argument("rank must be positive");
  if (kind == Kind::D && rank < 3) throw std::invalid_argument("D requires rank >= 3");
  if (kind == Kind::E && (rank < 6 || rank > 8))
    throw std::invalid_argument("E requires rank 6, 7 or 8");
  IMat c(rank, IVec(rank, 0));
  for (int i = 0; i < rank; ++i) c[i][i] = 2;
  auto link = [&](int i, int j) { c[i][j] = c[j][i] = -1; };
  switch (kind) {
    case Kind::A:
      for (int i = 0; i + 1 < rank; ++i) link(i, i + 1);
      break;
    case Kind::D:
      // chain 0-1-...-(rank-3), fork at rank-3 to rank-2 and rank-1
      for (int i = 0; i + 1 < rank - 1; ++i) link(i, i + 1);
      link(rank - 3, rank - 1);
      break;
    case Kind::E:
      // Bourbaki: chain 0-2-3-4-... with node 1 attached to node 3
      link(0, 2);
      for (int i = 2; i + 1 < rank; ++i) link(i, i + 1);
      link(1, 3);
      break;
  }
  return c;
}

inline RootSystem root_system(Kind kind, int rank) {
  RootSystem rs;
  rs.kind = kind;
  rs.rank = rank;
  rs.cartan = cartan_matrix(kind, rank);
  // orbit closure of the simple roots under simple reflections
  std::set<IVec> seen;
  std::vector<IVec> queue;
  for (int i = 0; i < rank; ++i) {
    IVec e(rank, 0);
    e[i] = 1;
    seen.insert(e);
    queue.push_back(e);
    IVec me(rank, 0);
    me[i] = -1;
    seen.insert(me);
    queue.push_back(me);
  }
  while (!queue.empty()) {
    IVec v = queue.back();
    queue.pop_back();
    for (int i = 0; i < rank; ++i) {
      IVec simple(rank, 0);
      simple[i] = 1;
      long long c = 0;
      for (int j = 0; j < rank; ++j) c += rs.cartan[i][j] * v[j];
      IVec w(v);
      w[i] -= c;
      if (seen.insert(w).second) queue.push_back(w);
    }
  }
  rs.roots.assign(seen.begin(), seen.end());
  std::sort(rs.roots.begin(), rs.roots.end());
  return rs;
}

// Matrix of s_beta in the simple-root basis (columns are images of the
// simple roots).
inline IMat reflection_matrix(const RootSystem& rs, const IVec& beta) {
  const int n = rs.rank;
  IMat m(n, IVec(n, 0));
  for (int j = 0; j < n; ++j) {
    IVec e(n, 0);
    e[j] = 1;
    IVec img = rs.reflect(beta, e);
    for (int i = 0; i < n; ++i) m[i][j] = img[i];
  }
  return m;
}

inline IMat imat_mul(const IMat& a, const IMat& b) {
  const int n = static_cast<int>(a.size());
  IMat c(n, IVec(n, 0));
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      long long aik = a[i][k];
      if (aik == 0) continue;
      for (int j = 0; j < n; ++j) c[i][j] += aik * b[k][j];
    }
  return c;
}

inline IMat imat_identity(int n) {
  IMat m(n, IVec(n, 0));
  for (int i = 0; i < n; ++i) m[i][i] = 1;
  return m;
}

inline IVec imat_apply(const IMat& m, const IVec& v) {
  const int n = static_cast<int>(m.size());
  IVec out(n, 0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out[i] += m[i][j] * v[j];
  return out;
}

// Product of the reflections of the given roots, left to right.
inline IMat reflection_product(const RootSystem& rs, const std::vector<IVec>& betas) {
  IMat m = imat_identity(rs.rank);
  for (const IVec& b : betas) m = imat_mul(m, reflection_matrix(rs, b));
  return m;
}

// Coxeter element: product of the simple reflections in the listed order.
inline IMat coxeter_element(const RootSystem& rs) {
  std::vector<IVec> simples;
  for (int i = 0; i < rs.rank; ++i) {
    IVec e(rs.rank, 0);
    e[i] = 1;
    simples.push_back(e);
  }
  return reflection_product(rs, simples);
}

inline int matrix_order(const IMat& m, int cap = 512) {
  IMat p = m;
  IMat id = imat_identity(static_cast<int>(m.size()));
  for (int k = 1; k <= cap; ++k) {
    if (p == id) return k;
    p = imat_mul(p, m);
  }
  throw std::runtime_error("matrix order exceeds cap");
}

struct CoxeterFactorization {
  std::vector<IVec> betas;
  IMat c;  // target Coxeter element
};

inline bool is_coxeter_factorization(const RootSystem& rs,
                                     const std::vector<IVec>& betas, const IMat& c) {
  for (const IVec& b : betas)
    if (!rs.is_root(b)) return false;
  return reflection_product(rs, betas) == c;
}

// Hurwitz move at position i (0-based): (b_i, b_{i+1}) -> (b_{i+1}, s_{b_{i+1}} b_i);
// the inverse move is (s_{b_i} b_{i+1}, b_i). Preserves the product.
inline CoxeterFactorization hurwitz_move(const RootSystem& rs,
                                         const CoxeterFactorization& f, int i,
                                         bool inverse = false) {
  if (i < 0 || i + 1 >= static_cast<int>(f.betas.size()))
    throw std::out_of_range("hurwitz move index out of range");
  CoxeterFactorization out = f;
  const IVec a = f.betas[i];
  const IVec b = f.betas[i + 1];
  if (!inverse) {
    out.betas[i] = b;
    out.betas[i + 1] = rs.reflect(b, a);
  } else {
    out.betas[i] = rs.reflect(a, b);
    out.betas[i + 1] = a;
  }
  return out;
}

// Unit upper-triangular Stokes matrix with T_ij = (beta_i, beta_j) for i < j.
inline IMat stokes_from_factorization(const RootSystem& rs,
                                      const std::vector<IVec>& betas) {
  const int n = static_cast<int>(betas.size());
  IMat t(n, IVec(n, 0));
  for (int i = 0; i < n; ++i) {
    t[i][i] = 1;
    for (int j = i + 1; j < n; ++j) t[i][j] = rs.pairing(betas[i], betas[j]);
  }
  return t;
}

// Reflection length lower bound: codim of the fixed space of g (Carter).
// Used to prune the factorization search.
inline int fixed_space_codim(const IMat& g) {
  const int n = static_cast<int>(g.size());
  // rank of (g - id) over Q by fraction-free elimination on doubles is fine
  // for these small integer matrices; use exact-ish Gauss with pivot checks.
  std::vector<std::vector<double>> m(n, std::vector<double>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m[i][j] = static_cast<double>(g[i][j]) - (i == j ? 1.0 : 0.0);
  int rank = 0;
  for (int col = 0; col < n && rank < n; ++col) {
    int piv = -1;
    double best = 1e-9;
    for (int row = rank; row < n; ++row)
      if (std::abs(m[row][col]) > best) { best = std::abs(m[row][col]); piv = row; }
    if (piv < 0) continue;
    std::swap(m[piv], m[rank]);
    for (int row = rank + 1; row < n; ++row) {
      double f = m[row][col] / m[rank][col];
      for (int j = col; j < n; ++j) m[row][j] -= f * m[rank][j];
    }
    ++rank;
  }
  return rank;
}

struct CountResult {
  long long classes = 0;
  bool budget_exceeded = false;
  long long nodes_visited = 0;
};

// Exhaustive count of tuples (beta_1..beta_n) of roots with
// s_{beta_1} ... s_{beta_n} = c, up to componentwise sign change. Reflections
// do not see the sign, so the count enumerates roots up to sign directly.
// A node budget guards against blowup; exceeding it is reported, never
// silently truncated.
inline CountResult count_classes(Kind kind, int rank,
                                 long long node_budget = 200000000) {
  RootSystem rs = root_system(kind, rank);
  IMat c = coxeter_element(rs);

  // roots up to sign
  std::vector<IVec> half;
  for (const IVec& r : rs.roots) {
    IVec neg(r);
    for (auto& x : neg) x = -x;
    if (r < neg) half.push_back(r);
  }
  std::vector<IMat> refl;
  refl.reserve(half.size());
  for (const IVec& r : half) refl.push_back(reflection_matrix(rs, r));

  CountResult res;
  // DFS tracking the remaining target: need refl[i1] ... refl[ik] = target.
  // Prune via Carter's bound (codim of the fixed space is the reflection
  // length, with matching parity).
  std::function<void(const IMat&, int)> go = [&](const IMat& target, int remaining) {
    if (res.budget_exceeded) return;
    if (++res.nodes_visited > node_budget) {
      res.budget_exceeded = true;
      return;
    }
    int codim = fixed_space_codim(target);
    if (codim > remaining || ((remaining - codim) % 2) != 0) return;
    if (remaining == 0) {
      ++res.classes;  // target is the identity (codim 0 and nothing left)
      return;
    }
    for (size_t i = 0; i < refl.size(); ++i) {
      // choose beta_1 = half[i]: new target = refl[i] * target ... careful:
      // refl_1 * (rest) = target  =>  rest = refl_1 * target
      go(imat_mul(refl[i], target), remaining - 1);
      if (res.budget_exceeded) return;
    }
  };
  go(c, rank);
  return res;
}

// All factorization classes (up to sign) for small ranks, with their Stokes
// matrices; used by the CLI --emit-stokes path and the Hurwitz-orbit tests.
inline std::vector<std::vector<IVec>> enumerate_factorizations(
    Kind kind, int rank, long long node_budget = 200000000) {
  RootSystem rs = root_system(kind, rank);
  IMat c = coxeter_element(rs);
  std::vector<IVec> half;
  for (const IVec& r : rs.roots) {
    IVec neg(r);
    for (auto& x : neg) x = -x;
    if (r < neg) half.push_back(r);
  }
  std::vector<std::vector<IVec>> out;
  std::vector<IVec> cur;
  long long nodes = 0;
  std::function<void(const IMat&, int)> go = [&](const IMat& target, int remaining) {
    if (++nodes > node_budget)
      throw std::runtime_error("factorization enumeration budget exceeded");
    int codim = fixed_space_codim(target);
    if (codim > remaining || ((remaining - codim) % 2) != 0) return;
    if (remaining == 0) {
      out.push_back(cur);
      return;
    }
    for (const IVec& r : half) {
      cur.push_back(r);
      go(imat_mul(reflection_matrix(rs, r), target), remaining - 1);
      cur.pop_back();
    }
  };
  go(c, rank);
  return out;
}

}  // namespace terp::ade
