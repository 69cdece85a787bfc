#pragma once

// Model primitives: parameter records, utility functions and the pointwise
// Hamiltonian transforms shared by the solver, the simulator and the
// boundary tests.

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>

#include "ramsey/errors.hpp"

namespace ramsey {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Economic and diffusion constants of the capital-per-capita dynamics
///   dX = (X^alpha - mu X - c X) dt - sigma X dW.
/// Construct through make_params / make_params_from_mu; the factory enforces
/// the invariants, and every other routine assumes a validated record.
struct ModelParams {
  double alpha = 0.5;  // Cobb-Douglas exponent, in (0,1)
  std::optional<double> lambda;  // depreciation rate; absent when mu was given directly
  std::optional<double> n;       // labor drift; absent when mu was given directly
  double sigma = 0.2;  // labor volatility, > 0
  double beta = 0.05;  // discount rate, > 0
  double mu = 0.1;     // lambda + n - sigma^2, > 0

  /// eta = 1/(1-alpha), the exponent mapping Z = X^(1-alpha) back to X.
  double eta() const { return 1.0 / (1.0 - alpha); }

  bool operator==(const ModelParams&) const = default;
};

namespace detail {

inline std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

inline void check_common(double alpha, double sigma, double beta) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw DomainError("alpha must lie in (0,1), got " + fmt(alpha));
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    throw DomainError("sigma must be positive, got " + fmt(sigma));
  if (!(beta > 0.0) || !std::isfinite(beta))
    throw DomainError("beta must be positive, got " + fmt(beta));
}

}  // namespace detail

inline ModelParams make_params(double alpha, double lambda, double n, double sigma,
                               double beta) {
  detail::check_common(alpha, sigma, beta);
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw DomainError("lambda must be nonnegative, got " + detail::fmt(lambda));
  if (!std::isfinite(n)) throw DomainError("n must be finite");
  const double mu = lambda + n - sigma * sigma;
  if (!(mu > 0.0))
    throw DomainError("mu = lambda+n-sigma^2 must be positive, got " + detail::fmt(mu));
  return ModelParams{alpha, lambda, n, sigma, beta, mu};
}

/// Variant that takes the drift constant directly, skipping the
/// (lambda, n) decomposition. Only mu enters any downstream computation.
inline ModelParams make_params_from_mu(double alpha, double mu, double sigma, double beta) {
  detail::check_common(alpha, sigma, beta);
  if (!(mu > 0.0) || !std::isfinite(mu))
    throw DomainError("mu must be positive, got " + detail::fmt(mu));
  return ModelParams{alpha, std::nullopt, std::nullopt, sigma, beta, mu};
}

/// Re-checks every invariant of an existing record.
inline void validate(const ModelParams& p) {
  if (p.lambda.has_value() != p.n.has_value())
    throw DomainError("lambda and n must be given together");
  if (p.lambda) {
    const ModelParams q = make_params(p.alpha, *p.lambda, *p.n, p.sigma, p.beta);
    if (q.mu != p.mu) throw DomainError("mu does not equal lambda+n-sigma^2");
  } else {
    (void)make_params_from_mu(p.alpha, p.mu, p.sigma, p.beta);
  }
}

// ---------------------------------------------------------------------------
// Utility

/// Utility U with marginal U' and inverse marginal (U')^{-1}.
///
/// The isoelastic family U(y) = y^(1-gamma)/(1-gamma), 0 < gamma < 1, has
/// closed-form fast paths everywhere downstream. Other utilities are supplied
/// through evaluation hooks and must satisfy U(0)=0, U'(0+)=inf, U'(inf)=0,
/// U(inf)=inf with U strictly increasing and strictly concave.
class Utility {
 public:
  using Fn = std::function<double(double)>;

  static Utility power(double gamma) {
    if (!(gamma > 0.0 && gamma < 1.0))
      throw DomainError("power utility needs gamma in (0,1), got " + detail::fmt(gamma));
    Utility u;
    u.gamma_ = gamma;
    u.name_ = "power";
    return u;
  }

  static Utility custom(Fn value, Fn marginal, Fn inverse_marginal, std::string name = "custom") {
    if (!value || !marginal || !inverse_marginal)
      throw DomainError("custom utility needs all three evaluation hooks");
    Utility u;
    u.value_ = std::move(value);
    u.marginal_ = std::move(marginal);
    u.inverse_marginal_ = std::move(inverse_marginal);
    u.name_ = std::move(name);
    return u;
  }

  bool is_power() const { return gamma_.has_value(); }
  std::optional<double> gamma() const { return gamma_; }
  const std::string& name() const { return name_; }

  double value(double y) const {
    if (gamma_) {
      if (y <= 0.0) return 0.0;
      return std::pow(y, 1.0 - *gamma_) / (1.0 - *gamma_);
    }
    return value_(y);
  }

  double marginal(double y) const {
    if (gamma_) return y <= 0.0 ? kInf : std::pow(y, -*gamma_);
    return marginal_(y);
  }

  double inverse_marginal(double p) const {
    if (gamma_) return std::pow(p, -1.0 / *gamma_);
    return inverse_marginal_(p);
  }

 private:
  Utility() = default;

  std::optional<double> gamma_;
  Fn value_, marginal_, inverse_marginal_;
  std::string name_;
};

/// Legendre-type transform sup_{y>=0} {U(y) - y p}, p > 0.
inline double u_tilde(const Utility& u, double p) {
  if (!(p > 0.0)) throw DomainError("u_tilde needs p > 0 (the transform blows up at 0+)");
  if (auto g = u.gamma()) return (*g / (1.0 - *g)) * std::pow(p, (*g - 1.0) / *g);
  const double y = u.inverse_marginal(p);
  return u.value(y) - y * p;
}

/// Constrained consumption maximizer min{(U')^{-1}(p)/x, L}. A tie between the
/// interior candidate and L resolves to the corner.
inline double bounded_maximizer(const Utility& u, double x, double p, double bound) {
  const double c = u.inverse_marginal(p) / x;
  return c >= bound ? bound : c;
}

/// sup_{0<=c<=L} {U(c x) - c x p}; L = +inf gives u_tilde(p).
inline double u_tilde_bounded(const Utility& u, double x, double p, double bound) {
  if (!(x > 0.0) || !(p > 0.0) || !(bound > 0.0))
    throw DomainError("u_tilde_bounded needs x, p, L > 0");
  if (std::isinf(bound)) return u_tilde(u, p);
  const double c = bounded_maximizer(u, x, p, bound);
  return u.value(c * x) - c * x * p;
}

// ---------------------------------------------------------------------------
// Drift peak and the linear value bound

struct DriftPeak {
  double x_star;  // maximizer of x^alpha - mu x
  double A;       // the maximum value
};

inline DriftPeak drift_peak(const ModelParams& p) {
  const double x = std::pow(p.alpha / p.mu, 1.0 / (1.0 - p.alpha));
  return {x, std::pow(x, p.alpha) - p.mu * x};
}

/// S = sup_{y>=0} {U(y) - y}. Closed form gamma/(1-gamma) for power utility;
/// otherwise a ternary search over log y, which is exact up to tolerance
/// because y -> U(y) - y is concave.
inline double utility_surplus(const Utility& u) {
  if (auto g = u.gamma()) return *g / (1.0 - *g);
  double lo = std::log(1e-12), hi = std::log(1e12);
  auto f = [&](double s) {
    const double y = std::exp(s);
    return u.value(y) - y;
  };
  for (int it = 0; it < 300 && hi - lo > 1e-12; ++it) {
    const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
    if (f(m1) < f(m2))
      lo = m1;
    else
      hi = m2;
  }
  const double s = 0.5 * (lo + hi);
  if (s < std::log(1e-12) + 1e-6 || s > std::log(1e12) - 1e-6)
    throw NumericalError("sup{U(y)-y} could not be bracketed in [1e-12, 1e12]");
  const double val = f(s);
  if (!std::isfinite(val)) throw NumericalError("sup{U(y)-y} is not finite");
  return val;
}

inline constexpr double kPhi0Margin = 1e-3;

/// phi0 such that V_L(x) <= x + phi0 for every x > 0 and every bound L:
/// (1+delta)(A+S)/beta makes -beta phi0 + A + S strictly negative.
inline double phi0_bound(const ModelParams& p, const Utility& u, double delta = kPhi0Margin) {
  const DriftPeak peak = drift_peak(p);
  return (1.0 + delta) * (peak.A + utility_surplus(u)) / p.beta;
}

}  // namespace ramsey
