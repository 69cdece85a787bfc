#pragma once

// Exact formulas for isoelastic utility. With gamma == alpha the value
// function is V(x) = zeta (x^(1-alpha)/(1-alpha) + 1/beta) and the optimal
// consumption rate is constant; for any gamma the marginal value has a known
// power-law limit at infinity.

#include <cmath>
#include <optional>
#include <string>

#include "ramsey/errors.hpp"
#include "ramsey/model.hpp"

namespace ramsey::closedform {

struct GammaEqAlphaSolution {
  double zeta;    // value scale
  double c_hat;   // constant optimal consumption rate
  double L_star;  // smallest bound at which clipping the policy is harmless
};

inline void require_gamma_eq_alpha(const ModelParams& p, const Utility& u) {
  const auto g = u.gamma();
  if (!g || std::abs(*g - p.alpha) > 1e-12 * p.alpha)
    throw DomainError("closed form requires power utility with gamma == alpha");
}

inline double zeta(const ModelParams& p) {
  const double a = p.alpha;
  return std::pow(a / (p.beta + p.mu * (1.0 - a) + 0.5 * p.sigma * p.sigma * a * (1.0 - a)), a);
}

/// beta/alpha + (1-alpha)(mu/alpha + sigma^2/2). Shared by c_hat and L_star so
/// the two are bitwise identical.
inline double corner_threshold(const ModelParams& p) {
  const double a = p.alpha;
  return p.beta / a + (1.0 - a) * (p.mu / a + 0.5 * p.sigma * p.sigma);
}

inline double corner_threshold(const ModelParams& p, const Utility& u) {
  require_gamma_eq_alpha(p, u);
  return corner_threshold(p);
}

inline GammaEqAlphaSolution gamma_eq_alpha_solution(const ModelParams& p, const Utility& u) {
  require_gamma_eq_alpha(p, u);
  const double l = corner_threshold(p);
  return {zeta(p), l, l};
}

inline double value_gamma_eq_alpha(const ModelParams& p, const Utility& u, double x) {
  require_gamma_eq_alpha(p, u);
  if (!(x > 0.0)) throw DomainError("value_gamma_eq_alpha needs x > 0");
  return zeta(p) * (std::pow(x, 1.0 - p.alpha) / (1.0 - p.alpha) + 1.0 / p.beta);
}

/// V(0+) = zeta/beta.
inline double value_at_origin_gamma_eq_alpha(const ModelParams& p, const Utility& u) {
  require_gamma_eq_alpha(p, u);
  return zeta(p) / p.beta;
}

struct BoundedConstantSolution {
  double zeta_L;               // scale of v(x) = zeta_L (x^(1-alpha)/(1-alpha) + 1/beta)
  double interior_candidate;   // zeta_L^(-1/alpha)
  double L;
  bool corner_active;          // interior_candidate >= L
};

/// Constant-consumption solution of the bounded problem when c == L at every
/// x: zeta_L = L^(1-alpha) / (beta + (1-alpha)(mu + L + alpha sigma^2/2)).
inline BoundedConstantSolution bounded_constant_solution(const ModelParams& p, const Utility& u,
                                                         double L) {
  require_gamma_eq_alpha(p, u);
  if (!(L > 0.0) || !std::isfinite(L)) throw DomainError("bound L must be positive and finite");
  const double a = p.alpha;
  const double zl =
      std::pow(L, 1.0 - a) / (p.beta + (1.0 - a) * (p.mu + L + 0.5 * a * p.sigma * p.sigma));
  const double cand = std::pow(zl, -1.0 / a);
  return {zl, cand, L, cand >= L};
}

/// lim_{x->inf} x^gamma V'(x) = (gamma / (beta + mu(1-gamma) + sigma^2 gamma(1-gamma)/2))^gamma.
inline double marginal_asymptote(const ModelParams& p, double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw DomainError("gamma must lie in (0,1)");
  const double d =
      p.beta + p.mu * (1.0 - gamma) + 0.5 * p.sigma * p.sigma * gamma * (1.0 - gamma);
  return std::pow(gamma / d, gamma);
}

/// lim_{x->inf} c_hat(x) = beta/gamma + (1-gamma)(mu/gamma + sigma^2/2).
inline double consumption_limit_at_infinity(const ModelParams& p, double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw DomainError("gamma must lie in (0,1)");
  return p.beta / gamma + (1.0 - gamma) * (p.mu / gamma + 0.5 * p.sigma * p.sigma);
}

/// Large-x marginal constant for the bound L: if the unconstrained limit
/// consumption exceeds L, the corner c = L is active far out and
///   x^gamma V_L'(x) -> L^(1-gamma) / (beta + (1-gamma)(mu + L + gamma sigma^2/2)).
inline double bounded_marginal_asymptote(const ModelParams& p, double gamma, double L) {
  if (std::isinf(L) || consumption_limit_at_infinity(p, gamma) <= L)
    return marginal_asymptote(p, gamma);
  return std::pow(L, 1.0 - gamma) /
         (p.beta + (1.0 - gamma) * (p.mu + L + 0.5 * gamma * p.sigma * p.sigma));
}

enum class OriginBehavior { zero, finite_positive, infinite };

inline std::string to_string(OriginBehavior b) {
  switch (b) {
    case OriginBehavior::zero: return "zero";
    case OriginBehavior::finite_positive: return "finite-positive";
    case OriginBehavior::infinite: return "infinite";
  }
  return "?";
}

struct ConsumptionLimits {
  double at_infinity;
  OriginBehavior at_origin;
  std::optional<double> origin_value;  // (beta V(0+))^(-1/gamma) when gamma == alpha and V(0+) is known
};

/// Limits of c_hat(x) = (U')^{-1}(V'(x))/x at both ends of (0, inf).
inline ConsumptionLimits c_hat_limits(const ModelParams& p, double gamma,
                                      std::optional<double> v0plus = std::nullopt) {
  ConsumptionLimits out{consumption_limit_at_infinity(p, gamma), OriginBehavior::finite_positive,
                        std::nullopt};
  if (std::abs(gamma - p.alpha) <= 1e-12 * p.alpha) {
    if (v0plus) out.origin_value = std::pow(p.beta * *v0plus, -1.0 / gamma);
  } else if (gamma < p.alpha) {
    out.at_origin = OriginBehavior::zero;
  } else {
    out.at_origin = OriginBehavior::infinite;
  }
  return out;
}

}  // namespace ramsey::closedform
