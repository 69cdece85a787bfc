#pragma once

// Feller's test for the controlled diffusion dX = (X^alpha - mu X - c(X) X) dt - sigma X dW.
// With the scale density
//
//   s(r) = exp(2 ∫_r^ell f(y) dy),   f(y) = (y^alpha - mu y - c(y) y) / (sigma^2 y^2),
//
// infinity is not reached in finite time when ∫_ell^inf s = inf and the
// origin is inaccessible when ∫_0^ell s = inf. Both integrals are evaluated
// on nested cutoffs in log space; in u = log y the inner integrand is
// (y^(alpha-1) - mu - c(y)) / sigma^2.

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "ramsey/errors.hpp"
#include "ramsey/io.hpp"
#include "ramsey/model.hpp"
#include "ramsey/policy.hpp"

namespace ramsey::feller {

enum class Side { origin, infinity };
enum class Verdict { diverges, converges, inconclusive };

inline std::string to_string(Side s) { return s == Side::origin ? "origin" : "infinity"; }

inline std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::diverges: return "diverges";
    case Verdict::converges: return "converges";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

struct QuadratureOptions {
  double inner_tol = 1e-9;
  double outer_tol = 1e-9;
  unsigned max_depth = 15;
};

namespace detail {

inline double log_sum_exp(double a, double b) {
  if (a == -INFINITY) return b;
  if (b == -INFINITY) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

}  // namespace detail

/// Evaluator for s(r), kept in log form: log_density(r) = 2 ∫_r^ell f.
class ScaleIntegrand {
 public:
  ScaleIntegrand(const ModelParams& p, Policy policy, double ell, QuadratureOptions q = {})
      : p_(p), policy_(std::move(policy)), ell_(ell), q_(q) {
    if (!(ell > 0.0) || !std::isfinite(ell)) throw DomainError("reference point ell must be positive");
    anchors_[0] = 0.0;
  }

  double ell() const { return ell_; }

  /// Integrand of the inner integral in u = log y.
  double inner(double u) const {
    const double c = policy_.at_log(u);
    if (!std::isfinite(c)) throw NumericalError("policy not evaluable at y = " + io::format_double(std::exp(u)));
    return (std::exp((p_.alpha - 1.0) * u) - p_.mu - c) / (p_.sigma * p_.sigma);
  }

  /// log s(r) = 2 ∫_{log r}^{log ell} inner(u) du.
  double log_density(double r) const {
    if (!(r > 0.0)) throw DomainError("scale density needs r > 0");
    const double v = std::log(r) - std::log(ell_);  // offset from log ell
    // nearest decade anchor between ell and r, filled outward from ell
    const double decade = std::log(10.0);
    const long k = static_cast<long>(v / decade);
    const double base = anchor(k);
    return base + 2.0 * integrate_inner(v, static_cast<double>(k) * decade);
  }

  double operator()(double r) const { return std::exp(log_density(r)); }

 private:
  // 2 ∫ of inner from offset a up to offset b (b closer to ell)
  double integrate_inner(double a, double b) const {
    if (a == b) return 0.0;
    const double l = std::log(ell_);
    double err = 0.0;
    const double val = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        [&](double w) { return inner(l + w); }, a, b, q_.max_depth, q_.inner_tol, &err);
    if (!std::isfinite(val)) throw NumericalError("inner quadrature failed");
    return val;
  }

  // log s at offset k decades from ell
  double anchor(long k) const {
    auto it = anchors_.find(k);
    if (it != anchors_.end()) return it->second;
    const double decade = std::log(10.0);
    const long toward = k > 0 ? k - 1 : k + 1;
    const double val = anchor(toward) +
                       2.0 * integrate_inner(static_cast<double>(k) * decade, static_cast<double>(toward) * decade);
    anchors_[k] = val;
    return val;
  }

  ModelParams p_;
  Policy policy_;
  double ell_;
  QuadratureOptions q_;
  mutable std::map<long, double> anchors_;
};

struct BoundaryVerdict {
  Side side = Side::infinity;
  double ell = 1.0;
  std::vector<double> cutoffs;
  std::vector<double> log10_partial;  // log10 of the partial integral up to each cutoff
  std::vector<double> log10_ratio;    // successive ratios, first entry NaN
  Verdict verdict = Verdict::inconclusive;
  std::optional<bool> delta_condition;  // origin only: c(y) y < y^alpha / 2 on the smallest decade
  std::string note;

  double min_log10_ratio() const {
    double m = INFINITY;
    for (std::size_t i = 1; i < log10_ratio.size(); ++i) m = std::min(m, log10_ratio[i]);
    return m;
  }
};

struct ClassifyOptions {
  double divergence_factor = 2.0;  // sustained growth per level that counts as divergence
  std::size_t sustained_levels = 3;
  double convergence_slack = 1e-6;  // ratio - 1 below this counts as converged
  std::size_t delta_points = 32;
  QuadratureOptions quadrature;
};

inline std::vector<double> default_levels(Side side) {
  if (side == Side::infinity) return {1e1, 1e2, 1e3, 1e4, 1e5, 1e6};
  return {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
}

/// Partial integrals of s over nested ranges [ell, R_k] (infinity) or
/// [r_k, ell] (origin), with the verdict read off the last growth ratios.
inline BoundaryVerdict classify_boundary(const ModelParams& p, const Policy& policy, Side side,
                                         std::vector<double> levels, double ell = 1.0,
                                         const ClassifyOptions& opt = {}) {
  if (levels.size() < opt.sustained_levels + 1)
    throw DomainError("classify_boundary needs at least sustained_levels + 1 cutoffs");
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const bool outward = side == Side::infinity ? levels[i] > ell : (levels[i] < ell && levels[i] > 0.0);
    if (!outward) throw DomainError("cutoffs must lie beyond ell on the requested side");
    if (i > 0) {
      const bool nested = side == Side::infinity ? levels[i] > levels[i - 1] : levels[i] < levels[i - 1];
      if (!nested) throw DomainError("cutoffs must move monotonically toward the boundary");
    }
  }
  const ScaleIntegrand s(p, policy, ell, opt.quadrature);
  BoundaryVerdict out;
  out.side = side;
  out.ell = ell;
  out.cutoffs = levels;

  // piece [va, vb] in v = log r: log ∫ s(e^v) e^v dv
  auto log_piece = [&](double va, double vb) {
    auto logf = [&](double v) { return s.log_density(std::exp(v)) + v; };
    const double shift = std::max(logf(va), logf(vb));
    double err = 0.0;
    const double val = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        [&](double v) { return std::exp(logf(v) - shift); }, va, vb, opt.quadrature.max_depth,
        opt.quadrature.outer_tol, &err);
    if (!std::isfinite(val) || val < 0.0) throw NumericalError("outer quadrature failed");
    return shift + std::log(val);
  };

  double acc = -INFINITY;
  double prev = std::log(ell);
  const double ln10 = std::log(10.0);
  for (double level : levels) {
    const double v = std::log(level);
    // split long pieces into decades so each quadrature sees moderate dynamic range
    const double span = std::abs(v - prev);
    const int n = std::max(1, static_cast<int>(std::ceil(span / ln10 - 1e-12)));
    for (int i = 0; i < n; ++i) {
      const double a = prev + (v - prev) * i / n, b = prev + (v - prev) * (i + 1) / n;
      acc = detail::log_sum_exp(acc, log_piece(std::min(a, b), std::max(a, b)));
    }
    prev = v;
    out.log10_partial.push_back(acc / ln10);
  }
  out.log10_ratio.push_back(NAN);
  for (std::size_t i = 1; i < out.log10_partial.size(); ++i)
    out.log10_ratio.push_back(out.log10_partial[i] - out.log10_partial[i - 1]);

  const std::size_t n = out.log10_ratio.size();
  bool grows = true, flat = true;
  for (std::size_t i = n - opt.sustained_levels; i < n; ++i) {
    if (!(out.log10_ratio[i] >= std::log10(opt.divergence_factor))) grows = false;
    if (!(out.log10_ratio[i] <= std::log10(1.0 + opt.convergence_slack))) flat = false;
  }
  out.verdict = grows ? Verdict::diverges : flat ? Verdict::converges : Verdict::inconclusive;

  if (side == Side::origin) {
    const double lo = levels.back();
    bool ok = true;
    for (std::size_t i = 0; i < opt.delta_points; ++i) {
      const double y = lo * std::pow(10.0, static_cast<double>(i) / static_cast<double>(opt.delta_points - 1));
      if (!(policy(y) * y < 0.5 * std::pow(y, p.alpha))) ok = false;
    }
    out.delta_condition = ok;
    if (!ok) {
      out.verdict = Verdict::inconclusive;
      out.note = "delta-condition c(y) y < y^alpha/2 fails on the smallest decade; verdict withheld";
    }
  }
  return out;
}

/// CSV with header cutoff,log10_partial,ratio; ratio is empty on the first
/// row and "inf" when it exceeds the double range.
inline void write_csv(const BoundaryVerdict& v, std::ostream& os) {
  os << "cutoff,log10_partial,ratio\n";
  for (std::size_t i = 0; i < v.cutoffs.size(); ++i) {
    os << io::format_double(v.cutoffs[i]) << ',' << io::format_double(v.log10_partial[i]) << ',';
    if (i > 0) {
      const double r = std::pow(10.0, v.log10_ratio[i]);
      os << (std::isfinite(r) ? io::format_double(r) : std::string("inf"));
    }
    os << '\n';
  }
}

}  // namespace ramsey::feller
