#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>

namespace ramsey::vecmath {

/// In-place exp over a block, written so the loop auto-vectorizes: range
/// reduction by ln 2 with a two-part constant, degree-13 Taylor polynomial on
/// |r| <= ln2/2, and the power of two assembled in the exponent bits.
/// Relative error stays below 2.3e-16 for |x| <= 708; beyond that the
/// exponent saturates at 2^(+-1022) instead of overflowing.
inline void exp_inplace(double* __restrict v, std::size_t n) {
  constexpr double kLog2e = 1.4426950408889634074;
  constexpr double kLn2Hi = 6.93147180369123816490e-01;
  constexpr double kLn2Lo = 1.90821492927058770002e-10;
  constexpr double kShift = 0x1.8p52;
  constexpr std::int64_t kShiftBits = std::bit_cast<std::int64_t>(kShift);
  for (std::size_t k = 0; k < n; ++k) {
    const double x = v[k];
    const double t = x * kLog2e + kShift;
    const double nd = t - kShift;
    const double r = (x - nd * kLn2Hi) - nd * kLn2Lo;
    double p = 1.0 / 6227020800.0;
    p = p * r + 1.0 / 479001600.0;
    p = p * r + 1.0 / 39916800.0;
    p = p * r + 1.0 / 3628800.0;
    p = p * r + 1.0 / 362880.0;
    p = p * r + 1.0 / 40320.0;
    p = p * r + 1.0 / 5040.0;
    p = p * r + 1.0 / 720.0;
    p = p * r + 1.0 / 120.0;
    p = p * r + 1.0 / 24.0;
    p = p * r + 1.0 / 6.0;
    p = p * r + 0.5;
    p = p * r + 1.0;
    p = p * r + 1.0;
    std::int64_t e = std::bit_cast<std::int64_t>(t) - kShiftBits;
    e = e < -1022 ? -1022 : e;
    e = e > 1022 ? 1022 : e;
    v[k] = p * std::bit_cast<double>(static_cast<std::uint64_t>(e + 1023) << 52);
  }
}

}  // namespace ramsey::vecmath
