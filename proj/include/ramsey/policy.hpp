#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "ramsey/errors.hpp"
#include "ramsey/model.hpp"

namespace ramsey {

/// Power-law tail c(x) = anchor_c * (x / anchor_x)^exponent used outside the
/// tabulated range.
struct PowerTail {
  double anchor_x = 1.0;
  double anchor_c = 0.0;
  double exponent = 0.0;

  double operator()(double x) const { return at_log(std::log(x)); }

  double at_log(double lx) const {
    if (exponent == 0.0 || anchor_c == 0.0) return anchor_c;
    return anchor_c * std::exp(exponent * (lx - std::log(anchor_x)));
  }
};

/// Feedback consumption map x -> c(x) >= 0, either constant or tabulated on
/// increasing nodes with linear interpolation in log x and power-law tails.
/// Values are clamped to [0, bound].
class Policy {
 public:
  static Policy constant(double c) {
    if (!(c >= 0.0) || !std::isfinite(c)) throw DomainError("constant policy needs finite c >= 0");
    Policy p;
    p.constant_ = c;
    return p;
  }

  static Policy tabulated(std::vector<double> x, std::vector<double> c, double bound = kInf,
                          std::optional<PowerTail> left = std::nullopt,
                          std::optional<PowerTail> right = std::nullopt) {
    if (x.size() < 2 || x.size() != c.size())
      throw DomainError("tabulated policy needs at least two (x, c) pairs");
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (!(x[i] > 0.0)) throw DomainError("policy nodes must be positive");
      if (i > 0 && !(x[i] > x[i - 1])) throw DomainError("policy nodes must be increasing");
      if (!(c[i] >= 0.0) || !std::isfinite(c[i]))
        throw DomainError("policy rates must be finite and nonnegative");
      if (c[i] > bound) throw DomainError("policy rate exceeds its bound");
    }
    Policy p;
    p.bound_ = bound;
    p.log_x_.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) p.log_x_[i] = std::log(x[i]);
    const double h = (p.log_x_.back() - p.log_x_.front()) / static_cast<double>(x.size() - 1);
    p.uniform_ = true;
    for (std::size_t i = 1; i < x.size(); ++i)
      if (std::abs(p.log_x_[i] - p.log_x_[i - 1] - h) > 1e-9 * std::max(1.0, std::abs(h)))
        p.uniform_ = false;
    p.log_step_ = h;
    p.left_ = left.value_or(PowerTail{x.front(), c.front(), 0.0});
    p.right_ = right.value_or(PowerTail{x.back(), c.back(), 0.0});
    p.x_ = std::move(x);
    p.c_ = std::move(c);
    return p;
  }

  bool is_constant() const { return constant_.has_value(); }
  std::optional<double> constant_value() const { return constant_; }
  double bound() const { return bound_; }
  std::span<const double> nodes() const { return x_; }
  std::span<const double> rates() const& { return c_; }
  std::vector<double> rates() && { return std::move(c_); }
  const PowerTail& left_tail() const { return left_; }
  const PowerTail& right_tail() const { return right_; }

  double operator()(double x) const {
    if (constant_) return *constant_;
    return at_log(std::log(x));
  }

  /// c at x = exp(lx); saves the exp/log round trip inside simulation loops.
  double at_log(double lx) const {
    if (constant_) return *constant_;
    double c;
    if (lx <= log_x_.front()) {
      c = left_.at_log(lx);
    } else if (lx >= log_x_.back()) {
      c = right_.at_log(lx);
    } else {
      std::size_t i;
      if (uniform_) {
        i = static_cast<std::size_t>((lx - log_x_.front()) / log_step_);
        i = std::min(i, x_.size() - 2);
        // guard against rounding at node boundaries
        while (i > 0 && lx < log_x_[i]) --i;
        while (i + 2 < x_.size() && lx > log_x_[i + 1]) ++i;
      } else {
        i = static_cast<std::size_t>(std::upper_bound(log_x_.begin(), log_x_.end(), lx) -
                                     log_x_.begin()) - 1;
      }
      const double w = (lx - log_x_[i]) / (log_x_[i + 1] - log_x_[i]);
      c = (1.0 - w) * c_[i] + w * c_[i + 1];
    }
    return std::clamp(c, 0.0, bound_);
  }

 private:
  Policy() = default;

  std::optional<double> constant_;
  std::vector<double> x_, c_, log_x_;
  bool uniform_ = false;
  double log_step_ = 0.0;
  double bound_ = kInf;
  PowerTail left_, right_;
};

}  // namespace ramsey
