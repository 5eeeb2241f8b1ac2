#pragma once

// Radial sinh-Gordon equation u'' + u'/r = sinh u, integrated with an
// embedded Dormand-Prince 5(4) pair. Blow-up radii r_k are genuine movable
// singularities (double poles and zeros of w = e^u); the solver passes
// through them exactly by switching to the meromorphic variable
// Y = exp(-s u / 2), which crosses zero linearly, and keeps a sign ledger
// for the 2 pi i branch bookkeeping of the continued solution.

#include "terp/bessel.hpp"
#include "terp/linalg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace terp {

enum class SweepDirection { inward, outward };

struct SolverConfig {
  double r_max = 15.0;            // seed radius for inward runs
  double r_min = 1e-3;            // stop radius (seed radius for outward runs)
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double blowup_threshold = 30.0; // |u| at which a singularity is recorded
  SweepDirection direction = SweepDirection::inward;
  double record_stride = 0.0;     // 0: record every accepted step

  void validate() const {
    if (!(0.0 < r_min && r_min < r_max))
      throw std::invalid_argument("need 0 < r_min < r_max");
    if (!(rel_tol > 0.0 && abs_tol > 0.0))
      throw std::invalid_argument("tolerances must be positive");
    if (!(blowup_threshold > 4.0))
      throw std::invalid_argument("blowup threshold too small");
  }
};

enum class SolutionStatus { smooth, singular, budget_exceeded };

struct Singularity {
  double r = 0.0;         // fitted pole location
  double c = 0.0;         // fitted constant of  s u = -2 log|r - r_k| + c
  double fit_residual = 0.0;
  int sign = 1;           // sign of u at blow-up
};

struct SinhGordonSolution {
  std::vector<double> grid;  // radii in integration order
  std::vector<double> u;     // real branch values
  std::vector<double> du;    // derivative values
  std::vector<int> branch;   // accumulated sign ledger (+1 / -1) per sample
  std::vector<Singularity> singularities;
  SolutionStatus status = SolutionStatus::smooth;
  double last_radius = 0.0;
  std::string message;
};

namespace detail {

struct State {
  double u, du;
};

inline State ode_rhs(double r, const State& y) {
  double uc = std::min(std::max(y.u, -40.0), 40.0);
  return {y.du, std::sinh(uc) - y.du / r};
}

// One Dormand-Prince 5(4) step; returns the 5th-order solution and an error
// estimate.
inline void dopri5_step(double r, const State& y, double h, State& out, double& err) {
  static const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static const double a21 = 1.0 / 5;
  static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                      a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                      a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                      b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static const double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                      e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  auto axpy = [](const State& y, double h, double c1, const State& k1, double c2_,
                 const State& k2, double c3_, const State& k3, double c4_,
                 const State& k4, double c5_, const State& k5) {
    return State{y.u + h * (c1 * k1.u + c2_ * k2.u + c3_ * k3.u + c4_ * k4.u + c5_ * k5.u),
                 y.du + h * (c1 * k1.du + c2_ * k2.du + c3_ * k3.du + c4_ * k4.du + c5_ * k5.du)};
  };

  State k1 = ode_rhs(r, y);
  State k2 = ode_rhs(r + c2 * h, {y.u + h * a21 * k1.u, y.du + h * a21 * k1.du});
  State k3 = ode_rhs(r + c3 * h, axpy(y, h, a31, k1, a32, k2, 0, k1, 0, k1, 0, k1));
  State k4 = ode_rhs(r + c4 * h, axpy(y, h, a41, k1, a42, k2, a43, k3, 0, k1, 0, k1));
  State k5 = ode_rhs(r + c5 * h, axpy(y, h, a51, k1, a52, k2, a53, k3, a54, k4, 0, k1));
  State k6 = ode_rhs(r + h, axpy(y, h, a61, k1, a62, k2, a63, k3, a64, k4, a65, k5));
  out = {y.u + h * (b1 * k1.u + b3 * k3.u + b4 * k4.u + b5 * k5.u + b6 * k6.u),
         y.du + h * (b1 * k1.du + b3 * k3.du + b4 * k4.du + b5 * k5.du + b6 * k6.du)};
  State k7 = ode_rhs(r + h, out);
  double eu = h * (e1 * k1.u + e3 * k3.u + e4 * k4.u + e5 * k5.u + e6 * k6.u + e7 * k7.u);
  double edu = h * (e1 * k1.du + e3 * k3.du + e4 * k4.du + e5 * k5.du + e6 * k6.du + e7 * k7.du);
  err = std::sqrt(eu * eu + edu * edu);
}

// RHS of the pole-crossing variable Y = exp(-s u / 2):
//   Y'' = (Y'^2 - 1/4 + Y^4/4) / Y - Y'/r.
// The numerator vanishes linearly with Y at a crossing, so the quotient stays
// bounded; a fixed small RK4 step carries the state through Y = 0.
struct YState {
  double y, dy;
};

inline YState y_rhs(double r, const YState& s) {
  double num = s.dy * s.dy - 0.25 + 0.25 * s.y * s.y * s.y * s.y;
  double y = s.y;
  if (std::abs(y) < 1e-300) y = (y >= 0.0 ? 1e-300 : -1e-300);
  return {s.dy, num / y - s.dy / r};
}

inline YState y_rk4(double r, const YState& s, double h) {
  YState k1 = y_rhs(r, s);
  YState k2 = y_rhs(r + h / 2, {s.y + h / 2 * k1.y, s.dy + h / 2 * k1.dy});
  YState k3 = y_rhs(r + h / 2, {s.y + h / 2 * k2.y, s.dy + h / 2 * k2.dy});
  YState k4 = y_rhs(r + h, {s.y + h * k3.y, s.dy + h * k3.dy});
  return {s.y + h / 6 * (k1.y + 2 * k2.y + 2 * k3.y + k4.y),
          s.dy + h / 6 * (k1.dy + 2 * k2.dy + 2 * k3.dy + k4.dy)};
}

// Least-squares fit of  s u = -2 log|r - rk| + c  over tail samples before a
// blow-up. rk is refined by golden-section search around an initial estimate.
struct PoleFit {
  double rk = 0.0, c = 0.0, residual = 0.0;
};

inline PoleFit fit_pole(const std::vector<double>& rs, const std::vector<double>& us,
                        int sign, double rk0, bool approach_from_below) {
  auto eval = [&](double rk) {
    double num = 0.0;
    int n = 0;
    for (size_t i = 0; i < rs.size(); ++i) {
      double x = std::abs(rs[i] - rk);
      if (x <= 0.0) return std::pair<double, double>(1e30, 0.0);
      num += sign * us[i] + 2.0 * std::log(x);
      ++n;
    }
    double c = num / n;
    double ss = 0.0;
    for (size_t i = 0; i < rs.size(); ++i) {
      double x = std::abs(rs[i] - rk);
      double resid = sign * us[i] + 2.0 * std::log(x) - c;
      ss += resid * resid;
    }
    return std::pair<double, double>(std::sqrt(ss / n), c);
  };
  // bracket rk on the blow-up side of the samples
  double edge = approach_from_below ? *std::max_element(rs.begin(), rs.end())
                                    : *std::min_element(rs.begin(), rs.end());
  double lo, hi;
  double width = std::abs(rk0 - edge);
  if (approach_from_below) {
    lo = edge + 0.01 * width;
    hi = edge + 10.0 * width;
  } else {
    lo = edge - 10.0 * width;
    hi = edge - 0.01 * width;
  }
  const double gr = 0.61803398874989484;
  double a = lo, b = hi;
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = eval(x1).first, f2 = eval(x2).first;
  for (int it = 0; it < 200 && (b - a) > 1e-15 * std::max(1.0, std::abs(b)); ++it) {
    if (f1 < f2) {
      b = x2; x2 = x1; f2 = f1;
      x1 = b - gr * (b - a);
      f1 = eval(x1).first;
    } else {
      a = x1; x1 = x2; f1 = f2;
      x2 = a + gr * (b - a);
      f2 = eval(x2).first;
    }
  }
  double rk = 0.5 * (a + b);
  auto [resid, c] = eval(rk);
  return {rk, c, resid};
}

}  // namespace detail

// Integrate with far-field seed u = a K0, u' = a K0' at the start radius
// (r_max for inward runs, r_min for outward runs).
inline SinhGordonSolution integrate(double amplitude, const SolverConfig& cfg) {
  cfg.validate();
  using detail::State;
  const bool inward = cfg.direction == SweepDirection::inward;
  const double dir = inward ? -1.0 : 1.0;
  double r = inward ? cfg.r_max : cfg.r_min;
  const double r_stop = inward ? cfg.r_min : cfg.r_max;

  SinhGordonSolution sol;
  State y{amplitude * bessel_k0(r), amplitude * bessel_k0_prime(r)};
  if (std::abs(y.u) >= cfg.blowup_threshold)
    throw std::invalid_argument("seed value already beyond the blow-up threshold");

  int ledger = 1;
  const double u_switch = std::min(14.0, cfg.blowup_threshold - 2.0);
  const double u_exit = u_switch - 2.0;
  double h = dir * 1e-4 * std::max(1.0, r);
  long long steps = 0;
  const long long max_steps = 80000000;
  double last_recorded = std::numeric_limits<double>::quiet_NaN();

  auto record = [&](double rr, double uu, double duu) {
    if (cfg.record_stride > 0.0 && !std::isnan(last_recorded) &&
        std::abs(rr - last_recorded) < cfg.record_stride)
      return;
    sol.grid.push_back(rr);
    sol.u.push_back(uu);
    sol.du.push_back(duu);
    sol.branch.push_back(ledger);
    last_recorded = rr;
  };
  record(r, y.u, y.du);

  auto done = [&](double rr) { return inward ? rr <= r_stop : rr >= r_stop; };

  while (!done(r)) {
    if (++steps > max_steps) {
      sol.status = SolutionStatus::budget_exceeded;
      sol.last_radius = r;
      sol.message = "step budget exceeded";
      return sol;
    }
    if (std::abs(y.u) >= u_switch) {
      // ---- pole crossing in the Y variable ----
      int s = y.u > 0.0 ? 1 : -1;
      detail::YState ys{std::exp(-s * y.u / 2.0), -s * y.du / 2.0 * std::exp(-s * y.u / 2.0)};
      const double y_exit = std::exp(-u_exit / 2.0);
      double hy = dir * 2e-6;
      bool crossed = false;
      double cross_r = 0.0;
      std::vector<double> tail_r, tail_u;
      long long ysteps = 0;
      while (true) {
        if (++ysteps > 4000000) {
          sol.status = SolutionStatus::budget_exceeded;
          sol.last_radius = r;
          sol.message = "pole-crossing step budget exceeded";
          return sol;
        }
        detail::YState next = detail::y_rk4(r, ys, hy);
        r += hy;
        if (!crossed) {
          double uu = -2.0 * std::log(std::abs(next.y));
          if (uu <= cfg.blowup_threshold && uu >= u_exit) {
            tail_r.push_back(r);
            tail_u.push_back(s * uu);
          }
          if ((ys.y > 0.0) != (next.y > 0.0)) {
            crossed = true;
            cross_r = r - hy * next.y / (next.y - ys.y);  // linear interpolation
          }
        }
        ys = next;
        if (std::abs(ys.y) >= y_exit) break;
        if (done(r)) break;
      }
      if (crossed) {
        // fit the -2 log model on the last samples before |u| hit the
        // blow-up threshold (approach side of the pole)
        size_t keep = std::min<size_t>(tail_r.size(), 50);
        std::vector<double> fr(tail_r.end() - keep, tail_r.end());
        std::vector<double> fu(tail_u.end() - keep, tail_u.end());
        detail::PoleFit fit{cross_r, std::log(4.0), 0.0};
        if (keep >= 5) {
          fit = detail::fit_pole(fr, fu, s, cross_r, !inward);
          if (fit.residual > 1e-2) {
            sol.status = SolutionStatus::budget_exceeded;
            sol.last_radius = r;
            sol.message = "pole fit residual too large";
            return sol;
          }
        }
        Singularity rec;
        rec.r = fit.rk;
        rec.c = fit.c;
        rec.fit_residual = fit.residual;
        rec.sign = s;
        sol.singularities.push_back(rec);
        ledger = -ledger;
      }
      if (done(r)) break;
      // back to the u variable: u = -2 s log|Y| on either side of the
      // crossing; the 2 pi i sheet lives in the ledger
      double mag = -2.0 * std::log(std::abs(ys.y));
      double dmag = -2.0 * ys.dy / ys.y;
      y = {s * mag, s * dmag};
      record(r, y.u, y.du);
      h = dir * 1e-6;
      continue;
    }

    // ---- regular adaptive step ----
    if (inward ? (r + h < r_stop) : (r + h > r_stop)) h = r_stop - r;
    State next;
    double err;
    detail::dopri5_step(r, y, h, next, err);
    double scale = cfg.abs_tol + cfg.rel_tol * std::max({std::abs(y.u), std::abs(y.du),
                                                         std::abs(next.u), std::abs(next.du)});
    double ratio = err / scale;
    if (ratio <= 1.0) {
      r += h;
      y = next;
      record(r, y.u, y.du);
    }
    double fac = 0.9 * std::pow(std::max(ratio, 1e-10), -0.2);
    fac = std::min(5.0, std::max(0.2, fac));
    h *= fac;
    if (std::abs(h) < 1e-15 * std::max(1.0, std::abs(r))) {
      sol.status = SolutionStatus::budget_exceeded;
      sol.last_radius = r;
      sol.message = "step underflow";
      return sol;
    }
  }

  sol.last_radius = r;
  sol.status = sol.singularities.empty() ? SolutionStatus::smooth
                                         : SolutionStatus::singular;
  // inward runs record decreasing radii by construction; report singularities
  // sorted the same way
  if (inward)
    std::sort(sol.singularities.begin(), sol.singularities.end(),
              [](const Singularity& a, const Singularity& b) { return a.r > b.r; });
  else
    std::sort(sol.singularities.begin(), sol.singularities.end(),
              [](const Singularity& a, const Singularity& b) { return a.r < b.r; });
  return sol;
}

// Hermitian metric of the rank-2 family at a real value of u: determinant one
// and positive definite for every real u.
inline CMatrix sinh_gordon_metric(double u) {
  CMatrix m(2, 2);
  double ch = std::cosh(u / 2.0), sh = std::sinh(u / 2.0);
  m(0, 0) = ch;
  m(0, 1) = Complex(0.0, -sh);
  m(1, 0) = Complex(0.0, sh);
  m(1, 1) = ch;
  return m;
}

struct SpacingReport {
  std::vector<double> gaps;      // successive differences, ascending radii
  double fitted_slope = 0.0;     // slope of r_k ~ slope (k - 1/2) + c log k + d
  double fitted_log_coeff = 0.0;
  double fitted_offset = 0.0;
};

// Gap statistics of the singular chain and the linear fit of r_k against
// pi (k - 1/2) + c log k.
inline SpacingReport singularity_spacing(const SinhGordonSolution& sol) {
  if (sol.singularities.size() < 4)
    throw std::invalid_argument("too few singularities for a spacing analysis");
  std::vector<double> rk;
  for (const auto& s : sol.singularities) rk.push_back(s.r);
  std::sort(rk.begin(), rk.end());
  SpacingReport rep;
  for (size_t i = 0; i + 1 < rk.size(); ++i) rep.gaps.push_back(rk[i + 1] - rk[i]);
  // least squares for r_k = slope (k - 1/2) + c log k + d
  const int n = static_cast<int>(rk.size());
  Eigen::MatrixXd a(n, 3);
  Eigen::VectorXd b(n);
  for (int i = 0; i < n; ++i) {
    double k = i + 1.0;
    a(i, 0) = k - 0.5;
    a(i, 1) = std::log(k);
    a(i, 2) = 1.0;
    b(i) = rk[i];
  }
  Eigen::Vector3d coef = a.colPivHouseholderQr().solve(b);
  rep.fitted_slope = coef(0);
  rep.fitted_log_coeff = coef(1);
  rep.fitted_offset = coef(2);
  return rep;
}

// Bisection for the boundary of the smooth family inside [a_lo, a_hi].
inline double smooth_window(double a_lo, double a_hi, const SolverConfig& cfg,
                            double resolution = 1e-4) {
  auto smooth = [&](double a) {
    SinhGordonSolution s = integrate(a, cfg);
    if (s.status == SolutionStatus::budget_exceeded)
      throw std::runtime_error("solver budget exceeded during bisection: " + s.message);
    return s.status == SolutionStatus::smooth;
  };
  bool lo_smooth = smooth(a_lo);
  bool hi_smooth = smooth(a_hi);
  if (lo_smooth == hi_smooth)
    throw std::invalid_argument(lo_smooth ? "bracket endpoints are both smooth"
                                          : "bracket endpoints are both singular");
  while (std::abs(a_hi - a_lo) > resolution) {
    double mid = 0.5 * (a_lo + a_hi);
    if (smooth(mid) == lo_smooth)
      a_lo = mid;
    else
      a_hi = mid;
  }
  return 0.5 * (a_lo + a_hi);
}

}  // namespace terp
