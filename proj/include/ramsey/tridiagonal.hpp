#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "ramsey/errors.hpp"

namespace ramsey {

/// Tridiagonal system  -lower[i] u[i-1] + diag[i] u[i] - upper[i] u[i+1] = rhs[i].
///
/// Off-diagonals are stored with the sign flipped so that a monotone scheme
/// has lower, upper >= 0 and diag >= lower + upper (an M-matrix).
/// lower[0] and upper[n-1] are ignored.
struct Tridiagonal {
  std::vector<double> lower, diag, upper;

  explicit Tridiagonal(std::size_t n) : lower(n, 0.0), diag(n, 0.0), upper(n, 0.0) {}

  std::size_t size() const { return diag.size(); }

  /// Smallest row margin diag - lower - upper, and whether any off-diagonal
  /// has the wrong sign. Strict diagonal dominance with nonnegative stored
  /// off-diagonals certifies the M-matrix property.
  struct MonotonicityCheck {
    double min_margin;
    bool off_diagonals_nonnegative;
    std::size_t worst_row;
  };

  MonotonicityCheck check_monotone() const {
    MonotonicityCheck out{INFINITY, true, 0};
    const std::size_t n = size();
    for (std::size_t i = 0; i < n; ++i) {
      const double lo = i > 0 ? lower[i] : 0.0;
      const double up = i + 1 < n ? upper[i] : 0.0;
      if (lo < 0.0 || up < 0.0) out.off_diagonals_nonnegative = false;
      const double margin = diag[i] - lo - up;
      if (margin < out.min_margin) {
        out.min_margin = margin;
        out.worst_row = i;
      }
    }
    return out;
  }

  /// y = A u, used for residual recomputation.
  std::vector<double> apply(std::span<const double> u) const {
    const std::size_t n = size();
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      double s = diag[i] * u[i];
      if (i > 0) s -= lower[i] * u[i - 1];
      if (i + 1 < n) s -= upper[i] * u[i + 1];
      y[i] = s;
    }
    return y;
  }

  /// Thomas algorithm. Stable without pivoting for diagonally dominant rows.
  std::vector<double> solve(std::span<const double> rhs) const {
    const std::size_t n = size();
    if (rhs.size() != n) throw DomainError("tridiagonal solve: size mismatch");
    std::vector<double> c(n), d(n);
    double denom = diag[0];
    if (denom == 0.0) throw NumericalError("tridiagonal solve: zero pivot at row 0");
    c[0] = n > 1 ? -upper[0] / denom : 0.0;
    d[0] = rhs[0] / denom;
    for (std::size_t i = 1; i < n; ++i) {
      denom = diag[i] + lower[i] * c[i - 1];
      if (denom == 0.0) throw NumericalError("tridiagonal solve: zero pivot");
      c[i] = i + 1 < n ? -upper[i] / denom : 0.0;
      d[i] = (rhs[i] + lower[i] * d[i - 1]) / denom;
    }
    std::vector<double> u(n);
    u[n - 1] = d[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) u[i] = d[i] - c[i] * u[i + 1];
    return u;
  }
};

}  // namespace ramsey
