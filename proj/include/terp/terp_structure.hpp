#pragma once

// TERP-structures generated by elementary sections, presented by their
// linear data (H_infty, H_infty_R, M, F, S, w). Monodromy eigenvalue classes
// carry a fixed order representative alpha0 with Re(alpha0) in (0,1]; all
// pairing and twist formulas below are keyed to that window.

#include "terp/gammafn.hpp"
#include "terp/hodge.hpp"

#include <atomic>
#include <limits>
#include <numeric>
#include <optional>
#include <thread>

namespace terp {

// A generalized monodromy eigenspace: eigenvalue exp(-2 pi i alpha0) with
// Re(alpha0) in (0,1], spanned by the columns of basis.
struct EigenClass {
  Complex alpha0;
  CMatrix basis;

  Complex eigenvalue() const { return std::exp(-kTwoPiI * alpha0); }
};

// arg(lambda) = 0 means lambda on the positive real axis.
inline bool arg_zero_eigenvalue(Complex lambda, const Tolerance& tol = {}) {
  return std::abs(lambda.imag()) <= tol.rel * std::abs(lambda) &&
         lambda.real() > 0.0;
}

struct MonodromyData {
  RMatrix ms;                      // semisimple part, real invertible
  RMatrix n;                       // nilpotent log of the unipotent part
  std::vector<EigenClass> classes; // jointly spanning C^n, closed under conj

  int dim() const { return static_cast<int>(ms.rows()); }

  RMatrix full() const {
    Tolerance tol;
    return ms * linalg::nilpotent_exp(n, tol).real();
  }

  // Matrix of an endomorphism that preserves a class, in class coordinates.
  static CMatrix restrict_to(const CMatrix& op, const CMatrix& basis) {
    return basis.completeOrthogonalDecomposition().solve(op * basis);
  }

  void validate(const Tolerance& tol = {}) const {
    const int d = dim();
    double scale = std::max(1.0, ms.norm());
    if ((ms * n - n * ms).norm() > tol.rel * scale * std::max(1.0, n.norm()) * 10.0)
      throw std::invalid_argument("semisimple and nilpotent parts do not commute");
    if (linalg::nilpotency_index(n, tol) < 0)
      throw std::invalid_argument("nilpotent part is not nilpotent");
    CMatrix all(d, 0);
    for (const auto& cls : classes) {
      if (cls.alpha0.real() <= 0.0 || cls.alpha0.real() > 1.0)
        throw std::invalid_argument("class representative alpha0 outside (0,1]");
      Complex lambda = cls.eigenvalue();
      CMatrix resid = ms.cast<Complex>() * cls.basis - lambda * cls.basis;
      if (resid.norm() > tol.rel * scale * std::max(1.0, cls.basis.norm()) * 100.0)
        throw std::invalid_argument("class basis is not an eigenbasis of Ms");
      CMatrix img = n.cast<Complex>() * cls.basis;
      if (!linalg::contains(cls.basis, linalg::orthonormal_basis(img, tol), tol))
        throw std::invalid_argument("N does not preserve an eigenvalue class");
      CMatrix joined(d, all.cols() + cls.basis.cols());
      joined << all, cls.basis;
      all = joined;
    }
    if (linalg::rank(all, tol) != d)
      throw std::invalid_argument("eigenvalue classes do not span");
    // closure under conjugation
    for (const auto& cls : classes) {
      Complex conj_lambda = std::conj(cls.eigenvalue());
      bool found = false;
      for (const auto& other : classes) {
        if (std::abs(other.eigenvalue() - conj_lambda) <
            1e-8 * std::max(1.0, std::abs(conj_lambda))) {
          if (linalg::same_subspace(CMatrix(cls.basis.conjugate()), other.basis, tol))
            found = true;
          break;
        }
      }
      if (!found)
        throw std::invalid_argument("eigenvalue classes not closed under conjugation");
    }
  }

  const EigenClass* class_of_eigenvalue(Complex lambda) const {
    for (const auto& cls : classes)
      if (std::abs(cls.eigenvalue() - lambda) < 1e-8 * std::max(1.0, std::abs(lambda)))
        return &cls;
    return nullptr;
  }
};

struct TerpData {
  int w = 0;
  MonodromyData monodromy;
  CMatrix s;      // the pairing on H_infty, real on the real form
  Filtration f;   // Ms-invariant, N F^p in F^{p-1}

  int dim() const { return monodromy.dim(); }

  void validate(const Tolerance& tol = {}) const {
    monodromy.validate(tol);
    f.validate(tol);
    const int d = dim();
    if (f.n() != d || s.rows() != d || s.cols() != d)
      throw std::invalid_argument("dimension mismatch in TERP data");
    double sscale = std::max(1.0, s.norm());
    if (s.imag().norm() > tol.rel * sscale)
      throw std::invalid_argument("pairing is not real on the real form");
    if (linalg::rank(s, tol) != d)
      throw std::invalid_argument("pairing is degenerate");
    // monodromy invariance
    CMatrix m = monodromy.full().cast<Complex>();
    if ((m.transpose() * s * m - s).norm() > tol.rel * sscale * 100.0)
      throw std::invalid_argument("pairing is not monodromy invariant");
    // mixed symmetry: (-1)^(w-1) on arg != 0, (-1)^w on arg = 0
    CMatrix skew = s - ((w % 2 == 0) ? -1.0 : 1.0) * s.transpose();  // arg != 0 part
    CMatrix skew0 = s - ((w % 2 == 0) ? 1.0 : -1.0) * s.transpose(); // arg = 0 part
    CMatrix bneq(d, 0), beq(d, 0);
    for (const auto& cls : monodromy.classes) {
      CMatrix joined;
      if (arg_zero_eigenvalue(cls.eigenvalue(), tol)) {
        joined.resize(d, beq.cols() + cls.basis.cols());
        joined << beq, cls.basis;
        beq = joined;
      } else {
        joined.resize(d, bneq.cols() + cls.basis.cols());
        joined << bneq, cls.basis;
        bneq = joined;
      }
    }
    if (bneq.cols() > 0 &&
        (bneq.transpose() * skew * bneq).norm() > tol.rel * sscale * 100.0)
      throw std::invalid_argument("pairing symmetry wrong on the arg != 0 part");
    if (beq.cols() > 0 &&
        (beq.transpose() * skew0 * beq).norm() > tol.rel * sscale * 100.0)
      throw std::invalid_argument("pairing symmetry wrong on the arg = 0 part");
    // filtration compatibilities
    for (const auto& [p, basis] : f.jumps()) {
      CMatrix img = monodromy.ms.cast<Complex>() * basis;
      if (!linalg::same_subspace(CMatrix(basis), linalg::orthonormal_basis(img, tol), tol))
        throw std::invalid_argument("filtration is not Ms-invariant");
      CMatrix nimg = monodromy.n.cast<Complex>() * basis;
      if (!linalg::contains(f.at(p - 1), linalg::orthonormal_basis(nimg, tol), tol))
        throw std::invalid_argument("filtration is not N-strict");
    }
  }
};

// ---------------------------------------------------------------------------
// Gamma twist
// ---------------------------------------------------------------------------

enum class TwistDirection { forward, inverse };

// The blockwise operator Gamma(alpha Id - N / 2 pi i) on C^n (forward), or
// the same series for 1/Gamma (inverse).
inline CMatrix gamma_twist(const MonodromyData& mono, TwistDirection dir,
                           const Tolerance& tol = {}) {
  const int d = mono.dim();
  CMatrix cols(d, 0);
  CMatrix imgs(d, 0);
  for (const auto& cls : mono.classes) {
    if (cls.alpha0.real() <= 0.0 || cls.alpha0.real() > 1.0)
      throw std::invalid_argument("alpha representative outside (0,1]");
    CMatrix n_cls = MonodromyData::restrict_to(mono.n.cast<Complex>(), cls.basis);
    CMatrix x = -n_cls / kTwoPiI;
    CMatrix g = matrix_gamma(cls.alpha0, x, tol, dir == TwistDirection::inverse);
    CMatrix joined_cols(d, cols.cols() + cls.basis.cols());
    joined_cols << cols, cls.basis;
    cols = joined_cols;
    CMatrix joined_imgs(d, imgs.cols() + cls.basis.cols());
    joined_imgs << imgs, cls.basis * g;
    imgs = joined_imgs;
  }
  return imgs * cols.inverse();
}

// Twisted filtration F~ = G^{-1} F.
inline Filtration twisted_filtration(const TerpData& t, const Tolerance& tol = {}) {
  return t.f.map(gamma_twist(t.monodromy, TwistDirection::inverse, tol), tol);
}

// ---------------------------------------------------------------------------
// S <-> L conversion
// ---------------------------------------------------------------------------

namespace detail {

// The operator K with S(a,b) = L(a, K b), block by eigenvalue class.
inline CMatrix s_from_l_operator(const MonodromyData& mono, int w,
                                 const Tolerance& tol = {}) {
  const int d = mono.dim();
  Complex twopiw = std::pow(kTwoPiI, Complex(static_cast<double>(w)));
  CMatrix m = mono.full().cast<Complex>();
  CMatrix cols(d, 0), imgs(d, 0);
  for (const auto& cls : mono.classes) {
    Complex lambda = cls.eigenvalue();
    CMatrix m_cls = MonodromyData::restrict_to(m, cls.basis);
    CMatrix n_cls = MonodromyData::restrict_to(mono.n.cast<Complex>(), cls.basis);
    const int k = static_cast<int>(cls.basis.cols());
    CMatrix block(k, k);
    if (!arg_zero_eigenvalue(lambda, tol)) {
      block = -twopiw * (m_cls - CMatrix::Identity(k, k)).inverse();
    } else if (std::abs(lambda - 1.0) < 1e-10) {
      // (sum_{j>=1} N^{j-1}/j!)^{-1}
      CMatrix series = CMatrix::Zero(k, k);
      CMatrix np = CMatrix::Identity(k, k);
      double fact = 1.0;
      for (int j = 1; j <= k + 1; ++j) {
        fact *= j;
        series += np / fact;
        np = np * n_cls;
        if (np.norm() == 0.0) break;
      }
      block = twopiw * series.inverse();
    } else {
      // lambda real positive, != 1: beta = i ln(lambda) / 2 pi in i R
      Complex beta = Complex(0.0, 1.0) * std::log(lambda.real()) / (2.0 * kPi);
      CMatrix num = -kTwoPiI * beta * CMatrix::Identity(k, k) + n_cls;
      block = twopiw * num * (m_cls - CMatrix::Identity(k, k)).inverse();
    }
    CMatrix jc(d, cols.cols() + k);
    jc << cols, cls.basis;
    cols = jc;
    CMatrix ji(d, imgs.cols() + k);
    ji << imgs, cls.basis * block;
    imgs = ji;
  }
  return imgs * cols.inverse();
}

}  // namespace detail

// S(a,b) = L(a, K b) as matrices: S = L K.
inline CMatrix s_from_l(const CMatrix& l, const MonodromyData& mono, int w,
                        const Tolerance& tol = {}) {
  return l * detail::s_from_l_operator(mono, w, tol);
}

inline CMatrix l_from_s(const CMatrix& s, const MonodromyData& mono, int w,
                        const Tolerance& tol = {}) {
  return s * detail::s_from_l_operator(mono, w, tol).inverse();
}

// ---------------------------------------------------------------------------
// Pairing of elementary sections
// ---------------------------------------------------------------------------

struct ElementaryPairing {
  int z_exponent = 0;
  Complex value{0.0, 0.0};
};

// P(es(G A, alpha), es(G B, beta)) for window representatives alpha, beta:
// both in (0,1)+iR gives z * (2 pi i)^{1-w} S(A,B); both in 1+iR gives
// z^2 * (-1) (2 pi i)^{-w} S(A,B); otherwise the classes do not pair.
inline ElementaryPairing pairing_elementary(const CVector& a, Complex alpha,
                                            const CVector& b, Complex beta,
                                            const CMatrix& s, int w) {
  auto in_open = [](Complex z) { return z.real() > 0.0 && z.real() < 1.0; };
  auto on_one = [](Complex z) { return std::abs(z.real() - 1.0) < 1e-12; };
  if (!(in_open(alpha) || on_one(alpha)) || !(in_open(beta) || on_one(beta)))
    throw std::invalid_argument("unnormalized alpha/beta representative");
  Complex sum = alpha + beta;
  bool paired = std::abs(sum - std::round(sum.real())) < 1e-10 &&
                std::abs(sum.imag()) < 1e-10;
  Complex sval = bilinear(s, a, b);
  if (in_open(alpha) && in_open(beta)) {
    if (!paired) return {1, 0.0};
    return {1, std::pow(kTwoPiI, Complex(1.0 - w)) * sval};
  }
  if (on_one(alpha) && on_one(beta)) {
    if (!paired) return {2, 0.0};
    return {2, -std::pow(kTwoPiI, Complex(static_cast<double>(-w))) * sval};
  }
  return {0, 0.0};  // mixed windows never pair
}

// ---------------------------------------------------------------------------
// Parts (arg = 0 and arg != 0) in real coordinates
// ---------------------------------------------------------------------------

struct Part {
  RMatrix real_basis;              // n x k, orthonormal, conj-stable span
  CMatrix s;                       // pairing in part coordinates (real entries)
  RMatrix n;                       // nilpotent in part coordinates
  std::vector<int> class_indices;  // classes composing the part
};

inline Part extract_part(const TerpData& t, bool arg_zero, const Tolerance& tol = {}) {
  const int d = t.dim();
  CMatrix cb(d, 0);
  Part part;
  for (size_t i = 0; i < t.monodromy.classes.size(); ++i) {
    const auto& cls = t.monodromy.classes[i];
    if (arg_zero_eigenvalue(cls.eigenvalue(), tol) == arg_zero) {
      CMatrix joined(d, cb.cols() + cls.basis.cols());
      joined << cb, cls.basis;
      cb = joined;
      part.class_indices.push_back(static_cast<int>(i));
    }
  }
  RMatrix reim(d, 2 * cb.cols());
  reim << cb.real(), cb.imag();
  part.real_basis = linalg::orthonormal_basis(reim, tol);
  if (part.real_basis.cols() != cb.cols())
    throw std::invalid_argument("part real form has unexpected dimension");
  part.s = part.real_basis.transpose().cast<Complex>() * t.s *
           part.real_basis.cast<Complex>();
  part.n = part.real_basis.transpose() * t.monodromy.n * part.real_basis;
  return part;
}

// ---------------------------------------------------------------------------
// Orthogonality (TERP-structure certificate)
// ---------------------------------------------------------------------------

inline bool check_orthogonality(const TerpData& t, const Tolerance& tol = {}) {
  Filtration ft = twisted_filtration(t, tol);
  for (bool arg_zero : {false, true}) {
    Part part = extract_part(t, arg_zero, tol);
    if (part.real_basis.cols() == 0) continue;
    CMatrix pb = part.real_basis.cast<Complex>();
    Filtration fpart = ft.restrict_to(pb, tol);
    int dual_shift = arg_zero ? t.w + 1 : t.w;  // (F^p)^perp = F^{dual_shift - p}
    int lo = fpart.empty() ? 0 : fpart.lowest_level();
    int hi = fpart.empty() ? 0 : fpart.highest_level();
    CMatrix full = CMatrix::Identity(part.real_basis.cols(), part.real_basis.cols());
    for (int p = std::min(lo, dual_shift - hi) - 1;
         p <= std::max(hi, dual_shift - lo) + 1; ++p) {
      CMatrix fp = fpart.at(p);
      CMatrix perp = linalg::bilinear_complement_in(fp, full, part.s, tol);
      if (!linalg::same_subspace(perp, fpart.at(dual_shift - p), tol)) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Spectrum
// ---------------------------------------------------------------------------

// Multiset { alpha0 + w - 1 - p } with multiplicity dim Gr_F^p restricted to
// the class of alpha0, ordered by the lexicographic total order.
inline std::vector<Complex> spectrum(const TerpData& t, const Tolerance& tol = {}) {
  std::vector<Complex> out;
  for (const auto& cls : t.monodromy.classes) {
    int lo = t.f.lowest_level(), hi = t.f.highest_level();
    for (int p = lo; p <= hi; ++p) {
      int dp = linalg::rank(linalg::intersect(t.f.at(p), cls.basis, tol), tol);
      int dp1 = linalg::rank(linalg::intersect(t.f.at(p + 1), cls.basis, tol), tol);
      for (int c = 0; c < dp - dp1; ++c)
        out.push_back(cls.alpha0 + static_cast<double>(t.w - 1 - p));
    }
  }
  std::sort(out.begin(), out.end(), [](Complex a, Complex b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return out;
}

// ---------------------------------------------------------------------------
// Rescaling
// ---------------------------------------------------------------------------

// pi_r^* on elementary-section data: F -> exp(-(log r / 2 pi i) N) F.
inline TerpData rescale(const TerpData& t, double r, const Tolerance& tol = {}) {
  if (!(r > 0.0)) throw std::invalid_argument("rescale requires r > 0");
  TerpData out = t;
  Complex rho = std::log(r) / kTwoPiI;
  out.f = t.f.map(nilpotent_exp_scaled(t.monodromy.n, -rho), tol);
  return out;
}

// ---------------------------------------------------------------------------
// Purity, hermitian form, polarization
// ---------------------------------------------------------------------------

// The glued twistor is pure of weight 0 iff F is a Hodge structure of weight
// w-1 on the arg != 0 part and of weight w on the arg = 0 part.
inline bool is_pure(const TerpData& t, const Tolerance& tol = {}) {
  if (!check_orthogonality(t, tol))
    throw std::invalid_argument("orthogonality violated: not a TERP-structure");
  for (bool arg_zero : {false, true}) {
    Part part = extract_part(t, arg_zero, tol);
    if (part.real_basis.cols() == 0) continue;
    Filtration fpart = t.f.restrict_to(part.real_basis.cast<Complex>(), tol);
    if (!is_hodge_structure(fpart, arg_zero ? t.w : t.w - 1, tol)) return false;
  }
  return true;
}

namespace detail {

struct GlobalSectionBasis {
  std::vector<CVector> vectors;   // Hodge-piece vectors A_i in C^n
  std::vector<Complex> alpha;     // class representative of A_i
  std::vector<int> level;         // Hodge level p of A_i
  std::vector<bool> arg_zero;
};

// Basis of global twistor sections from the Hodge decomposition, ordered by
// (eigenvalue class as stored, p descending), QR-orthonormalized per piece.
inline GlobalSectionBasis global_section_basis(const TerpData& t,
                                               const Tolerance& tol) {
  GlobalSectionBasis out;
  Filtration fbar = t.f.conjugate();
  for (const auto& cls : t.monodromy.classes) {
    bool az = arg_zero_eigenvalue(cls.eigenvalue(), tol);
    int lo = t.f.lowest_level(), hi = t.f.highest_level();
    for (int p = hi; p >= lo; --p) {
      int q = az ? t.w - p : t.w - 1 - p;
      CMatrix piece = linalg::intersect(
          linalg::intersect(t.f.at(p), fbar.at(q), tol), cls.basis, tol);
      // drop the part already counted at higher p
      CMatrix higher = linalg::intersect(
          linalg::intersect(t.f.at(p + 1), fbar.at(q), tol), cls.basis, tol);
      piece = linalg::complement_in(higher, piece, tol);
      for (int c = 0; c < piece.cols(); ++c) {
        out.vectors.push_back(piece.col(c));
        out.alpha.push_back(cls.alpha0);
        out.level.push_back(p);
        out.arg_zero.push_back(az);
      }
    }
  }
  return out;
}

}  // namespace detail

// Gram matrix of h(a,b) = z^{-w} P(a, tau b) on the canonical global-section
// basis. Defined (and a basis) exactly when the structure is pure.
inline CMatrix hermitian_form(const TerpData& t, const Tolerance& tol = {}) {
  if (!is_pure(t, tol))
    throw std::invalid_argument("hermitian form requires a pure structure");
  detail::GlobalSectionBasis basis = detail::global_section_basis(t, tol);
  const int n = t.dim();
  if (static_cast<int>(basis.vectors.size()) != n)
    throw std::runtime_error("global sections do not span; purity is numerically degenerate");
  CMatrix ginv = gamma_twist(t.monodromy, TwistDirection::inverse, tol);
  CMatrix h = CMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      Complex li = std::exp(-kTwoPiI * basis.alpha[i]);
      Complex lj = std::exp(-kTwoPiI * basis.alpha[j]);
      // classes pair in h iff lambda_i * conj(lambda_j) = 1
      if (std::abs(li * std::conj(lj) - 1.0) > 1e-8) continue;
      if (basis.level[i] != basis.level[j]) continue;  // z-degree mismatch
      int p = basis.level[i];
      CVector xi = ginv * basis.vectors[i];
      CVector xj = ginv * basis.vectors[j].conjugate();
      Complex sval = bilinear(t.s, xi, xj);
      double sign = (p % 2 == 0) ? 1.0 : -1.0;
      Complex factor = basis.arg_zero[i]
                           ? std::pow(kTwoPiI, Complex(static_cast<double>(-t.w)))
                           : std::pow(kTwoPiI, Complex(1.0 - t.w));
      h(i, j) = sign * factor * sval;
    }
  }
  return h;
}

struct PolarizedPureReport {
  Verdict verdict = Verdict::no;
  Verdict hermitian_path = Verdict::no;   // (a): pure + positive hermitian form
  Verdict classifying_path = Verdict::no; // (b): twisted filtration in D
  double min_eig_h = std::numeric_limits<double>::quiet_NaN();
  bool pure = false;
  bool disagreement = false;
};

// Two independent polarization computations that must agree: the hermitian
// form of the glued twistor, and classifying-space membership of the twisted
// filtration as a sum of PHS of weights w-1 and w.
inline PolarizedPureReport is_polarized_pure(const TerpData& t,
                                             const Tolerance& tol = {}) {
  if (!check_orthogonality(t, tol))
    throw std::invalid_argument("orthogonality violated: not a TERP-structure");
  PolarizedPureReport rep;
  rep.pure = is_pure(t, tol);
  if (rep.pure) {
    CMatrix h = hermitian_form(t, tol);
    rep.min_eig_h = linalg::min_eigenvalue(h);
    rep.hermitian_path = linalg::positive_definite(h, tol);
  } else {
    rep.hermitian_path = Verdict::no;
  }

  Filtration ft = twisted_filtration(t, tol);
  rep.classifying_path = Verdict::yes;
  for (bool arg_zero : {false, true}) {
    Part part = extract_part(t, arg_zero, tol);
    if (part.real_basis.cols() == 0) continue;
    Filtration fpart = ft.restrict_to(part.real_basis.cast<Complex>(), tol);
    int weight = arg_zero ? t.w : t.w - 1;
    if (!is_hodge_structure(fpart, weight, tol) ||
        !s_orthogonal(fpart, part.s, weight, tol)) {
      rep.classifying_path = Verdict::no;
      break;
    }
    rep.classifying_path =
        verdict_and(rep.classifying_path, hodge_positivity(fpart, part.s, weight, tol));
    if (rep.classifying_path == Verdict::no) break;
  }

  if (rep.hermitian_path != Verdict::indeterminate &&
      rep.classifying_path != Verdict::indeterminate &&
      rep.hermitian_path != rep.classifying_path)
    rep.disagreement = true;
  rep.verdict = verdict_and(rep.hermitian_path, rep.classifying_path);
  return rep;
}

// ---------------------------------------------------------------------------
// Splitting type
// ---------------------------------------------------------------------------

struct SplittingType {
  std::map<int, int> degrees;  // degree -> multiplicity

  int total_multiplicity() const {
    int n = 0;
    for (auto& [d, m] : degrees) n += m;
    return n;
  }
  int degree_sum() const {
    int s = 0;
    for (auto& [d, m] : degrees) s += d * m;
    return s;
  }
  bool all_zero() const {
    for (auto& [d, m] : degrees)
      if (d != 0 && m > 0) return false;
    return true;
  }
};

// Bifiltration multiplicities of (F, conj F) per eigenvalue class; exact for
// semisimple monodromy, heuristic when N != 0 (checked only through the
// degree-sum and purity invariants).
inline SplittingType splitting_type(const TerpData& t, const Tolerance& tol = {}) {
  if (!check_orthogonality(t, tol))
    throw std::invalid_argument("orthogonality violated: not a TERP-structure");
  Filtration fbar = t.f.conjugate();
  SplittingType out;
  for (const auto& cls : t.monodromy.classes) {
    bool az = arg_zero_eigenvalue(cls.eigenvalue(), tol);
    int lo = t.f.lowest_level() - 1, hi = t.f.highest_level() + 1;
    auto dim_pq = [&](int p, int q) {
      return linalg::rank(
          linalg::intersect(linalg::intersect(t.f.at(p), fbar.at(q), tol),
                            cls.basis, tol),
          tol);
    };
    for (int p = lo; p <= hi; ++p) {
      for (int q = lo; q <= hi; ++q) {
        int m = dim_pq(p, q) - dim_pq(p + 1, q) - dim_pq(p, q + 1) +
                dim_pq(p + 1, q + 1);
        if (m < 0)
          throw std::runtime_error("negative bifiltration multiplicity: numerical degeneracy");
        if (m > 0) out.degrees[p + q - (az ? t.w : t.w - 1)] += m;
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Orbit scans
// ---------------------------------------------------------------------------

enum class OrbitDirection { to_zero, to_infinity };

struct OrbitRow {
  double r = 0.0;        // grid value
  double factor = 0.0;   // actual rescale factor applied
  Verdict pure = Verdict::no;
  Verdict polarized = Verdict::no;
  double min_eig_h = std::numeric_limits<double>::quiet_NaN();
  bool spectrum_unchanged = false;
};

struct OrbitScanResult {
  std::vector<OrbitRow> rows;
  bool orbit_detected = false;
  double threshold = std::numeric_limits<double>::quiet_NaN();
};

inline OrbitScanResult orbit_scan(const TerpData& t, OrbitDirection dir,
                                  const std::vector<double>& r_grid,
                                  const Tolerance& tol = {}) {
  if (r_grid.empty()) throw std::invalid_argument("empty rescaling grid");
  if (!check_orthogonality(t, tol))
    throw std::invalid_argument("orthogonality violated: rejected before scanning");
  std::vector<Complex> base_spec = spectrum(t, tol);
  OrbitScanResult out;
  out.rows.resize(r_grid.size());
  auto eval = [&](size_t i) {
    double r = r_grid[i];
    double factor = dir == OrbitDirection::to_zero ? r : 1.0 / r;
    TerpData tr = rescale(t, factor, tol);
    OrbitRow row;
    row.r = r;
    row.factor = factor;
    PolarizedPureReport rep = is_polarized_pure(tr, tol);
    if (rep.disagreement)
      throw std::runtime_error("polarization paths disagree during orbit scan");
    row.pure = rep.pure ? Verdict::yes : Verdict::no;
    row.polarized = rep.verdict;
    row.min_eig_h = rep.min_eig_h;
    std::vector<Complex> sp = spectrum(tr, tol);
    row.spectrum_unchanged = sp.size() == base_spec.size();
    for (size_t k = 0; row.spectrum_unchanged && k < sp.size(); ++k)
      if (std::abs(sp[k] - base_spec[k]) > 1e-9) row.spectrum_unchanged = false;
    out.rows[i] = row;
  };
  for (size_t i = 0; i < r_grid.size(); ++i) eval(i);

  // Orbit verdict: pass for all sufficiently small r (to_zero) resp. all
  // sufficiently large actual factor (to_infinity). The grid is ascending in
  // r; in both conventions the relevant prefix is the small-r one.
  size_t prefix = 0;
  while (prefix < out.rows.size() &&
         definitely(out.rows[prefix].polarized))
    ++prefix;
  if (prefix > 0) {
    out.orbit_detected = true;
    out.threshold = out.rows[prefix - 1].r;
  }
  return out;
}

inline OrbitScanResult induces_orbit(const TerpData& t, OrbitDirection dir,
                                     const std::vector<double>& r_grid,
                                     const Tolerance& tol = {}) {
  return orbit_scan(t, dir, r_grid, tol);
}

// ---------------------------------------------------------------------------
// Mixed TERP (regular singular case)
// ---------------------------------------------------------------------------

// (H_infty, H_infty_R, -N, S, F~) defines a PMHS of weight w-1 on the
// arg != 0 part and of weight w on the arg = 0 part.
inline Verdict mixed_terp_regular_singular(const TerpData& t,
                                           const Tolerance& tol = {}) {
  Filtration ft = twisted_filtration(t, tol);
  Verdict acc = Verdict::yes;
  for (bool arg_zero : {false, true}) {
    Part part = extract_part(t, arg_zero, tol);
    if (part.real_basis.cols() == 0) continue;
    Filtration fpart = ft.restrict_to(part.real_basis.cast<Complex>(), tol);
    PmhsReport rep = is_pmhs(fpart, RMatrix(-part.n), part.s,
                             arg_zero ? t.w : t.w - 1, tol);
    acc = verdict_and(acc, rep.overall);
    if (acc == Verdict::no) break;
  }
  return acc;
}

}  // namespace terp
