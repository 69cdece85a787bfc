#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "ramsey/errors.hpp"

namespace ramsey {

/// Grid uniform in log x on [x_min, x_max]. x_min stays strictly positive:
/// the value function has no meaning at the origin itself.
struct GridSpec {
  double x_min = 1e-3;
  double x_max = 1e3;
  std::size_t n_nodes = 2048;

  static constexpr std::size_t kMinNodes = 16;

  void validate() const {
    if (!(x_min > 0.0) || !std::isfinite(x_min)) throw DomainError("grid x_min must be positive");
    if (!(x_max > x_min) || !std::isfinite(x_max)) throw DomainError("grid x_max must exceed x_min");
    if (n_nodes < kMinNodes) throw DomainError("grid needs at least 16 nodes");
  }

  double log_step() const {
    return (std::log(x_max) - std::log(x_min)) / static_cast<double>(n_nodes - 1);
  }

  double nodes_per_decade() const { return std::log(10.0) / log_step(); }

  /// Node abscissae; the endpoints are exactly x_min and x_max.
  std::vector<double> nodes() const {
    validate();
    std::vector<double> x(n_nodes);
    const double y0 = std::log(x_min), h = log_step();
    for (std::size_t i = 0; i < n_nodes; ++i) x[i] = std::exp(y0 + h * static_cast<double>(i));
    x.front() = x_min;
    x.back() = x_max;
    return x;
  }

  bool operator==(const GridSpec&) const = default;
};

}  // namespace ramsey
