#pragma once

// Finite-difference solver for the stationary HJB equation
//
//   beta v = 1/2 sigma^2 x^2 v'' + (x^alpha - mu x) v' + H(x, v'),
//
// with H = U~(p) for unbounded consumption and H = U~_L(x, p) under the bound
// c <= L. The equation is discretized in y = log x on a uniform grid, where it
// reads
//
//   beta v = 1/2 sigma^2 v_yy + m(c) v_y + U(c x),  m(c) = x^(alpha-1) - mu - sigma^2/2 - c,
//
// and solved by Howard policy iteration. Each row uses centered differences
// for v_y whenever |m| <= sigma^2/h (the row is still an M-matrix) and
// upwinding otherwise; the policy step maximizes the discrete Hamiltonian
// exactly over the three regimes. The left end carries no boundary data:
// the drift there points into the domain, so a forward difference closes the
// system. The right end uses a ghost node with the asymptotic marginal value
// for power utility and a zero-curvature closure otherwise.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ramsey/closedform.hpp"
#include "ramsey/errors.hpp"
#include "ramsey/grid.hpp"
#include "ramsey/model.hpp"
#include "ramsey/policy.hpp"
#include "ramsey/tridiagonal.hpp"

namespace ramsey::hjb {

enum class RightClosure { asymptotic_neumann, zero_curvature };

inline std::string to_string(RightClosure c) {
  return c == RightClosure::asymptotic_neumann ? "asymptotic-neumann" : "zero-curvature";
}

struct SolverOptions {
  double tol_scale = 1e-8;   // tol_res = tol_scale * (1 + max|v|)
  int max_iter = 200;
  double policy_tol = 1e-10;  // max relative change of any nodal rate
  double p_min = 1e-12;       // floor on the marginal value fed to (U')^{-1}

  bool operator==(const SolverOptions&) const = default;
};

struct SolveReport {
  int iterations = 0;
  double residual = INFINITY;  // L-inf norm of the discrete HJB residual
  double tol_res = 0.0;
  bool converged = false;
  std::vector<double> policy_change;  // per sweep
  std::vector<double> value_increase;  // per sweep after the first, min_i (v_new - v_old)_i
  double min_row_margin = INFINITY;    // smallest diag - |offdiag| over all sweeps
  RightClosure right_closure = RightClosure::asymptotic_neumann;
  double left_drift = 0.0;  // log-coordinate drift at x_min under the final policy
  std::vector<std::string> warnings;
};

/// Nodal values on a log-uniform grid together with the metadata needed to
/// differentiate them consistently with the scheme that produced them.
struct ValueFunction {
  GridSpec grid;
  std::vector<double> x;
  std::vector<double> v;
  double bound = kInf;
  RightClosure right_closure = RightClosure::zero_curvature;
  std::optional<double> right_log_slope;  // v_y at x_max imposed by the Neumann closure
  std::vector<double> solver_policy;      // rates from the final policy-improvement step
  SolveReport report;

  static ValueFunction from_values(const GridSpec& grid, std::vector<double> values,
                                   double bound = kInf,
                                   std::optional<double> right_log_slope = std::nullopt) {
    ValueFunction vf;
    vf.grid = grid;
    vf.x = grid.nodes();
    if (values.size() != vf.x.size()) throw DomainError("value count does not match the grid");
    vf.v = std::move(values);
    vf.bound = bound;
    vf.right_log_slope = right_log_slope;
    vf.right_closure =
        right_log_slope ? RightClosure::asymptotic_neumann : RightClosure::zero_curvature;
    return vf;
  }

  std::size_t size() const { return v.size(); }
  double h() const { return grid.log_step(); }

  /// dv/dy at node i: centered inside, second-order one-sided at x_min,
  /// the imposed slope (or one-sided) at x_max.
  double log_slope(std::size_t i) const {
    const std::size_t n = size();
    const double hh = h();
    if (i == 0) return (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * hh);
    if (i == n - 1) {
      if (right_log_slope) return *right_log_slope;
      return (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * hh);
    }
    return (v[i + 1] - v[i - 1]) / (2.0 * hh);
  }

  double log_curvature(std::size_t i) const {
    const std::size_t n = size();
    const double hh = h();
    if (i == 0) return (v[0] - 2.0 * v[1] + v[2]) / (hh * hh);
    if (i == n - 1) {
      if (right_log_slope) return (2.0 * v[n - 2] - 2.0 * v[n - 1] + 2.0 * hh * *right_log_slope) / (hh * hh);
      return (v[n - 1] - 2.0 * v[n - 2] + v[n - 3]) / (hh * hh);
    }
    return (v[i + 1] - 2.0 * v[i] + v[i - 1]) / (hh * hh);
  }

  double dv(std::size_t i) const { return log_slope(i) / x[i]; }

  double d2v(std::size_t i) const {
    return (log_curvature(i) - log_slope(i)) / (x[i] * x[i]);
  }

  /// Linear interpolation in log x; requires x inside the grid.
  double value_at(double xq) const {
    if (!(xq >= x.front() && xq <= x.back()))
      throw DomainError("value_at: point outside the grid");
    const double t = (std::log(xq) - std::log(x.front())) / h();
    std::size_t i = std::min(static_cast<std::size_t>(t), size() - 2);
    const double w = t - static_cast<double>(i);
    return (1.0 - w) * v[i] + w * v[i + 1];
  }

  double max_abs() const {
    double m = 0.0;
    for (double a : v) m = std::max(m, std::abs(a));
    return m;
  }
};

namespace detail {

enum class Regime { forward, central, backward };

struct NodeChoice {
  double c;
  Regime regime;
  double hamiltonian;  // (m0 - c) D + U(c x), diffusion excluded
};

struct Discretization {
  const ModelParams& p;
  const Utility& u;
  double bound;
  std::vector<double> x, m0;
  double h, s2, central_limit;
  RightClosure closure;
  double right_log_slope = 0.0;
  double p_min;

  Discretization(const ModelParams& params, const Utility& util, double L, const GridSpec& g,
                 double pmin)
      : p(params), u(util), bound(L), x(g.nodes()), h(g.log_step()),
        s2(0.5 * params.sigma * params.sigma), central_limit(params.sigma * params.sigma / h),
        p_min(pmin) {
    m0.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
      m0[i] = std::pow(x[i], p.alpha - 1.0) - p.mu - s2;
    if (auto gamma = u.gamma()) {
      closure = RightClosure::asymptotic_neumann;
      const double k = closedform::bounded_marginal_asymptote(p, *gamma, bound);
      right_log_slope = k * std::pow(x.back(), 1.0 - *gamma);
    } else {
      closure = RightClosure::zero_curvature;
    }
  }

  // Best rate for derivative estimate D on [lo, hi] intersected with [0, L].
  NodeChoice best_in(std::size_t i, double d, double lo, double hi, Regime r) const {
    lo = std::max(lo, 0.0);
    hi = std::min(hi, bound);
    if (!(lo <= hi)) return {0.0, r, -INFINITY};
    const double xi = x[i];
    const double marginal = std::max(d / xi, p_min);
    double c = u.inverse_marginal(marginal) / xi;
    if (c >= bound) c = bound;  // corner wins ties
    c = std::clamp(c, lo, hi);
    return {c, r, (m0[i] - c) * d + u.value(c * xi)};
  }

  // Hamiltonian of a given rate at node i, with the regime the rate implies.
  NodeChoice evaluate(std::span<const double> v, std::size_t i, double c) const {
    const std::size_t n = x.size();
    double d;
    Regime r;
    if (i == 0) {
      d = (v[1] - v[0]) / h;
      r = Regime::forward;
    } else if (i == n - 1) {
      if (closure == RightClosure::asymptotic_neumann) {
        d = right_log_slope;
        r = Regime::central;
      } else {
        d = (v[i] - v[i - 1]) / h;
        r = Regime::backward;
      }
    } else {
      const double m = m0[i] - c;
      if (m > central_limit) {
        d = (v[i + 1] - v[i]) / h;
        r = Regime::forward;
      } else if (m < -central_limit) {
        d = (v[i] - v[i - 1]) / h;
        r = Regime::backward;
      } else {
        d = 0.5 * (v[i + 1] - v[i - 1]) / h;
        r = Regime::central;
      }
    }
    return {c, r, (m0[i] - c) * d + u.value(c * x[i])};
  }

  NodeChoice improve(std::span<const double> v, std::size_t i) const {
    const std::size_t n = x.size();
    if (i == 0) {
      // state constraint: the forward row needs inward drift at x_min
      const double f = (v[1] - v[0]) / h;
      return best_in(0, f, 0.0, m0[0] * (1.0 - 1e-9), Regime::forward);
    }
    if (i == n - 1) {
      if (closure == RightClosure::asymptotic_neumann)
        return best_in(i, right_log_slope, 0.0, INFINITY, Regime::central);
      const double b = (v[i] - v[i - 1]) / h;
      return best_in(i, b, m0[i], INFINITY, Regime::backward);
    }
    const double f = (v[i + 1] - v[i]) / h;
    const double b = (v[i] - v[i - 1]) / h;
    const double cen = 0.5 * (f + b);
    NodeChoice best = best_in(i, cen, m0[i] - central_limit, m0[i] + central_limit, Regime::central);
    const NodeChoice fw = best_in(i, f, 0.0, m0[i] - central_limit, Regime::forward);
    if (fw.hamiltonian > best.hamiltonian) best = fw;
    const NodeChoice bw = best_in(i, b, m0[i] + central_limit, INFINITY, Regime::backward);
    if (bw.hamiltonian > best.hamiltonian) best = bw;
    return best;
  }

  void fill_row(std::size_t i, const NodeChoice& ch, Tridiagonal& a, std::vector<double>& rhs) const {
    const std::size_t n = x.size();
    const double beta = p.beta;
    const double m = m0[i] - ch.c;
    const double diff = s2 / (h * h);
    rhs[i] = u.value(ch.c * x[i]);
    if (i == 0) {
      if (!(m > 0.0))
        throw NumericalError("left boundary drift is not inward at x_min = " +
                             ramsey::detail::fmt(x[0]) + " (m = " + ramsey::detail::fmt(m) +
                             "); lower x_min");
      a.upper[0] = m / h;
      a.diag[0] = beta + a.upper[0];
      return;
    }
    if (i == n - 1) {
      if (closure == RightClosure::asymptotic_neumann) {
        a.lower[i] = 2.0 * diff;
        a.diag[i] = beta + a.lower[i];
        rhs[i] += 2.0 * s2 * right_log_slope / h + m * right_log_slope;
      } else {
        if (m > 0.0)
          throw NumericalError("zero-curvature closure needs outward drift at x_max; raise x_max");
        a.lower[i] = -m / h;
        a.diag[i] = beta + a.lower[i];
      }
      return;
    }
    switch (ch.regime) {
      case Regime::forward:
        a.lower[i] = diff;
        a.upper[i] = diff + m / h;
        break;
      case Regime::backward:
        a.lower[i] = diff - m / h;
        a.upper[i] = diff;
        break;
      case Regime::central:
        // exactly zero at the edges of the central band; drop the roundoff
        a.lower[i] = std::max(0.0, diff - 0.5 * m / h);
        a.upper[i] = std::max(0.0, diff + 0.5 * m / h);
        break;
    }
    a.diag[i] = beta + a.lower[i] + a.upper[i];
  }

  struct Sweep {
    std::vector<NodeChoice> choice;
    double residual;  // max_i |beta v_i - max_c (A(c) v + U)_i|
  };

  // A node keeps its previous rate unless the new one is better by more than
  // roundoff; this makes the policy sequence terminate.
  Sweep improve_all(std::span<const double> v, const std::vector<NodeChoice>* previous = nullptr) const {
    const std::size_t n = x.size();
    Sweep s{std::vector<NodeChoice>(n), 0.0};
    Tridiagonal a(n);
    std::vector<double> rhs(n);
    for (std::size_t i = 0; i < n; ++i) {
      s.choice[i] = improve(v, i);
      if (previous) {
        const NodeChoice old = evaluate(v, i, (*previous)[i].c);
        const double scale = std::abs(old.hamiltonian) + std::abs(u.value(old.c * x[i]));
        if (s.choice[i].hamiltonian <= old.hamiltonian + 1e-13 * scale) s.choice[i] = old;
      }
      fill_row(i, s.choice[i], a, rhs);
      double av = a.diag[i] * v[i];
      if (i > 0) av -= a.lower[i] * v[i - 1];
      if (i + 1 < n) av -= a.upper[i] * v[i + 1];
      s.residual = std::max(s.residual, std::abs(av - rhs[i]));
    }
    return s;
  }
};

}  // namespace detail

/// Howard policy iteration. Returns the best iterate; report.converged is
/// false when max_iter sweeps did not reach tol_res with a stationary policy.
inline ValueFunction solve(const ModelParams& p, const Utility& u, double bound,
                           const GridSpec& grid, const SolverOptions& opt = {}) {
  grid.validate();
  if (!(bound > 0.0)) throw DomainError("bound L must be positive (or +inf)");
  detail::Discretization disc(p, u, bound, grid, opt.p_min);
  const std::size_t n = disc.x.size();

  // Initial guess: a x^(1-gamma) + b for power utility, (x + phi0)/2 otherwise.
  // The power ansatz is fitted crudely to (x + phi0)/2 at x = 1 (value and
  // slope), not to the asymptotic constants.
  const double phi0 = phi0_bound(p, u);
  std::vector<double> v(n);
  if (auto gamma = u.gamma()) {
    const double a = 0.5, b = 0.5 * (1.0 + phi0) - a / (1.0 - *gamma);
    for (std::size_t i = 0; i < n; ++i) v[i] = a * std::pow(disc.x[i], 1.0 - *gamma) / (1.0 - *gamma) + b;
  } else {
    for (std::size_t i = 0; i < n; ++i) v[i] = 0.5 * (disc.x[i] + phi0);
  }

  SolveReport rep;
  rep.right_closure = disc.closure;
  auto sweep = disc.improve_all(v);
  std::vector<double> rhs(n);
  for (int it = 1; it <= opt.max_iter; ++it) {
    Tridiagonal a(n);
    for (std::size_t i = 0; i < n; ++i) disc.fill_row(i, sweep.choice[i], a, rhs);
    const auto mono = a.check_monotone();
    if (!mono.off_diagonals_nonnegative || !(mono.min_margin > 0.0))
      throw NumericalError("discrete operator lost monotonicity at x = " +
                           ramsey::detail::fmt(disc.x[mono.worst_row]) +
                           "; refine the grid or move the boundaries");
    rep.min_row_margin = std::min(rep.min_row_margin, mono.min_margin);
    std::vector<double> next = a.solve(rhs);

    // the initial guess is not the value of a policy, so monotonicity starts
    // with the second sweep
    if (it > 1) {
      double increase = INFINITY;
      for (std::size_t i = 0; i < n; ++i) increase = std::min(increase, next[i] - v[i]);
      rep.value_increase.push_back(increase);
    }
    v = std::move(next);

    auto fresh = disc.improve_all(v, &sweep.choice);
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double c_old = sweep.choice[i].c, c_new = fresh.choice[i].c;
      const double scale = std::max({std::abs(c_old), std::abs(c_new), 1e-300});
      change = std::max(change, std::abs(c_new - c_old) / scale);
    }
    rep.policy_change.push_back(change);
    rep.iterations = it;
    rep.residual = fresh.residual;
    sweep = std::move(fresh);

    double vmax = 0.0;
    for (double a_i : v) vmax = std::max(vmax, std::abs(a_i));
    rep.tol_res = opt.tol_scale * (1.0 + vmax);
    if (rep.residual <= rep.tol_res && change <= opt.policy_tol) {
      rep.converged = true;
      break;
    }
  }
  if (!rep.converged)
    rep.warnings.push_back("policy iteration did not converge within max_iter sweeps");
  rep.left_drift = disc.m0[0] - sweep.choice[0].c;

  ValueFunction vf;
  vf.grid = grid;
  vf.x = disc.x;
  vf.v = std::move(v);
  vf.bound = bound;
  vf.right_closure = disc.closure;
  if (disc.closure == RightClosure::asymptotic_neumann) vf.right_log_slope = disc.right_log_slope;
  vf.solver_policy.resize(n);
  for (std::size_t i = 0; i < n; ++i) vf.solver_policy[i] = sweep.choice[i].c;
  vf.report = std::move(rep);
  return vf;
}

/// Recomputes the discrete HJB residual that the solver reports.
inline double discrete_residual(const ValueFunction& vf, const ModelParams& p, const Utility& u,
                                const SolverOptions& opt = {}) {
  detail::Discretization disc(p, u, vf.bound, vf.grid, opt.p_min);
  return disc.improve_all(vf.v).residual;
}

struct ResidualReport {
  double max_abs;
  std::size_t argmax;
  double x_at_max;
};

/// Direct substitution of the nodal values into the continuous equation with
/// centered differences at interior nodes.
inline ResidualReport residual(const ValueFunction& vf, const ModelParams& p, const Utility& u) {
  ResidualReport out{0.0, 0, 0.0};
  for (std::size_t i = 1; i + 1 < vf.size(); ++i) {
    const double xi = vf.x[i];
    const double d1 = vf.dv(i);
    double r;
    if (!(d1 > 0.0)) {
      r = INFINITY;
    } else {
      const double d2 = vf.d2v(i);
      r = p.beta * vf.v[i] - 0.5 * p.sigma * p.sigma * xi * xi * d2 -
          (std::pow(xi, p.alpha) - p.mu * xi) * d1 - u_tilde_bounded(u, xi, d1, vf.bound);
    }
    if (!(std::abs(r) <= out.max_abs)) {
      out.max_abs = std::abs(r);
      out.argmax = i;
      out.x_at_max = xi;
    }
  }
  return out;
}

/// Feedback consumption c(x) = min{(U')^{-1}(V'(x))/x, L} at the nodes, with
/// tails fitted to the known asymptotes: for power utility c ~ x^(alpha/gamma-1)
/// as x -> 0 and c -> const as x -> inf; otherwise log-log slopes of the
/// outermost decade.
inline Policy extract_policy(const ValueFunction& vf, const ModelParams& p, const Utility& u) {
  const std::size_t n = vf.size();
  std::vector<double> c(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double d1 = vf.dv(i);
    if (!(d1 > 0.0)) {
      if (i > 0 && i + 1 < n)
        throw NumericalError("nonpositive marginal value at x = " + ramsey::detail::fmt(vf.x[i]));
      c[i] = vf.bound;  // one-sided edge estimate; clamp below handles the unbounded case
      if (std::isinf(c[i])) throw NumericalError("nonpositive marginal value at a grid edge");
      continue;
    }
    c[i] = bounded_maximizer(u, vf.x[i], d1, vf.bound);
  }

  auto loglog_slope = [&](std::size_t a, std::size_t b) {
    if (c[a] <= 0.0 || c[b] <= 0.0) return 0.0;
    return (std::log(c[b]) - std::log(c[a])) / (std::log(vf.x[b]) - std::log(vf.x[a]));
  };
  const std::size_t decade =
      std::clamp<std::size_t>(static_cast<std::size_t>(vf.grid.nodes_per_decade()), 1, n - 1);
  double k_left, k_right;
  if (auto gamma = u.gamma()) {
    k_left = p.alpha / *gamma - 1.0;
    k_right = 0.0;
  } else {
    k_left = loglog_slope(0, decade);
    k_right = loglog_slope(n - 1 - decade, n - 1);
  }
  PowerTail left{vf.x.front(), c.front(), k_left};
  PowerTail right{vf.x.back(), c.back(), k_right};
  return Policy::tabulated(vf.x, std::move(c), vf.bound, left, right);
}

// ---------------------------------------------------------------------------
// Asymptote diagnostics

struct LeftAsymptoteReport {
  std::vector<double> x;
  std::vector<double> scaled_marginal;  // x^alpha v'(x), expected to plateau at beta V(0+)
  std::vector<double> consumption_ratio;  // (U')^{-1}(v'(x)) / x^alpha, expected to decay to 0
  double plateau_estimate = 0.0;  // scaled_marginal at the lowest interior node
  double plateau_spread = 0.0;    // (max-min)/mean on the bottom decade
  double next_decade_spread = 0.0;
  bool plateau_positive = false;
  bool plateau_flattening = false;  // spread on the bottom decade below the next one (or < 1%)
  bool decay_monotone = false;      // consumption_ratio increasing in x on the bottom decade
  bool ok() const { return plateau_positive && plateau_flattening && decay_monotone; }
};

namespace detail {

inline double relative_spread(std::span<const double> s) {
  if (s.empty()) return 0.0;
  const auto [mn, mx] = std::minmax_element(s.begin(), s.end());
  double mean = 0.0;
  for (double a : s) mean += a;
  mean /= static_cast<double>(s.size());
  return (*mx - *mn) / std::abs(mean);
}

}  // namespace detail

inline LeftAsymptoteReport left_asymptote(const ValueFunction& vf, const ModelParams& p,
                                          const Utility& u) {
  if (vf.grid.nodes_per_decade() < 16.0)
    throw DomainError("left_asymptote needs at least 16 nodes per decade near x_min");
  LeftAsymptoteReport r;
  const double top = 10.0 * vf.x.front();
  std::vector<double> next;
  for (std::size_t i = 1; i + 1 < vf.size() && vf.x[i] <= 100.0 * vf.x.front(); ++i) {
    const double d1 = vf.dv(i);
    const double sm = std::pow(vf.x[i], p.alpha) * d1;
    if (vf.x[i] <= top) {
      r.x.push_back(vf.x[i]);
      r.scaled_marginal.push_back(sm);
      r.consumption_ratio.push_back(d1 > 0.0 ? u.inverse_marginal(d1) / std::pow(vf.x[i], p.alpha)
                                             : INFINITY);
    } else {
      next.push_back(sm);
    }
  }
  if (r.x.size() < 2) throw DomainError("left_asymptote: bottom decade has too few nodes");
  r.plateau_estimate = r.scaled_marginal.front();
  r.plateau_positive =
      std::all_of(r.scaled_marginal.begin(), r.scaled_marginal.end(), [](double a) { return a > 0.0; });
  r.plateau_spread = detail::relative_spread(r.scaled_marginal);
  r.next_decade_spread = detail::relative_spread(next);
  r.plateau_flattening = r.plateau_spread < 0.01 || r.plateau_spread < r.next_decade_spread;
  r.decay_monotone = true;
  for (std::size_t k = 1; k < r.consumption_ratio.size(); ++k)
    if (!(r.consumption_ratio[k] > r.consumption_ratio[k - 1])) r.decay_monotone = false;
  return r;
}

struct RightAsymptoteReport {
  std::vector<double> x;
  std::vector<double> scaled_marginal;  // x^gamma v'(x) on the top decade
  double target = 0.0;
  double max_rel_deviation = 0.0;
  bool asymptotic_regime = true;  // x_max^(alpha-1)/mu <= 0.01
  std::vector<std::string> warnings;
};

/// Compares x^gamma v'(x) on the top decade (interior nodes only) with its
/// closed-form limit.
inline RightAsymptoteReport right_asymptote(const ValueFunction& vf, const ModelParams& p,
                                            double gamma) {
  RightAsymptoteReport r;
  r.target = closedform::bounded_marginal_asymptote(p, gamma, vf.bound);
  const double ratio = std::pow(vf.x.back(), p.alpha - 1.0) / p.mu;
  if (ratio > 0.01) {
    r.asymptotic_regime = false;
    r.warnings.push_back("x_max^(alpha-1)/mu = " + ramsey::detail::fmt(ratio) +
                         " > 0.01: asymptote not yet reached");
  }
  for (std::size_t i = 1; i + 1 < vf.size(); ++i) {
    if (vf.x[i] < vf.x.back() / 10.0) continue;
    const double s = std::pow(vf.x[i], gamma) * vf.dv(i);
    r.x.push_back(vf.x[i]);
    r.scaled_marginal.push_back(s);
    r.max_rel_deviation = std::max(r.max_rel_deviation, std::abs(s / r.target - 1.0));
  }
  return r;
}

struct MembershipReport {
  bool strictly_increasing = false;
  bool concave = false;
  bool linear_growth = false;
  bool left_decay = false;
  double growth_exponent = 0.0;   // log-log slope of v on the top decade
  double max_concavity_violation = 0.0;
  bool all() const { return strictly_increasing && concave && linear_growth && left_decay; }
};

/// Membership in the uniqueness class: strictly increasing, concave, at most
/// linear growth, and (U')^{-1}(v'(x))/x^alpha decaying as x -> 0.
inline MembershipReport validate_candidate(const ValueFunction& vf, const ModelParams& p,
                                           const Utility& u) {
  MembershipReport r;
  const std::size_t n = vf.size();
  r.strictly_increasing = true;
  for (std::size_t i = 1; i < n; ++i)
    if (!(vf.v[i] > vf.v[i - 1])) r.strictly_increasing = false;

  std::vector<double> slope(n - 1);
  double smax = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    slope[i] = (vf.v[i + 1] - vf.v[i]) / (vf.x[i + 1] - vf.x[i]);
    smax = std::max(smax, std::abs(slope[i]));
  }
  const double tol = 1e-9 * (1.0 + smax);
  for (std::size_t i = 1; i < slope.size(); ++i)
    r.max_concavity_violation = std::max(r.max_concavity_violation, slope[i] - slope[i - 1]);
  r.concave = r.max_concavity_violation <= tol;

  std::size_t k = n - 1;
  while (k > 0 && vf.x[k] > vf.x.back() / 10.0) --k;
  if (vf.v[k] > 0.0 && vf.v.back() > 0.0) {
    r.growth_exponent =
        (std::log(vf.v.back()) - std::log(vf.v[k])) / (std::log(vf.x.back()) - std::log(vf.x[k]));
    r.linear_growth = r.growth_exponent <= 1.0 + 1e-6;
  }

  r.left_decay = true;
  double prev = -INFINITY;
  for (std::size_t i = 1; i + 1 < n && vf.x[i] <= 10.0 * vf.x.front(); ++i) {
    const double d1 = vf.dv(i);
    if (!(d1 > 0.0)) {
      r.left_decay = false;
      break;
    }
    const double ratio = u.inverse_marginal(d1) / std::pow(vf.x[i], p.alpha);
    if (!(ratio > prev)) r.left_decay = false;
    prev = ratio;
  }
  return r;
}

}  // namespace ramsey::hjb
