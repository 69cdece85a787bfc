#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <vector>

#include "ramsey/rng.hpp"
#include "ramsey/vecmath.hpp"

using namespace ramsey;

namespace {

std::uint64_t fnv_bits(const std::vector<double>& v) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (double d : v) {
    std::uint64_t b;
    std::memcpy(&b, &d, 8);
    for (int k = 0; k < 8; ++k) {
      h ^= (b >> (8 * k)) & 0xFF;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

}  // namespace

TEST(SplitMix64, ReferenceSequence) {
  // first outputs for seed 1234567 from the reference implementation
  SplitMix64 g(1234567);
  EXPECT_EQ(g(), 6457827717110365317ULL);
  EXPECT_EQ(g(), 3203168211198807973ULL);
  EXPECT_EQ(g(), 9817491932198370423ULL);
}

TEST(PathStream, StreamsDifferAcrossPathsAndSeeds) {
  EXPECT_NE(path_stream(1, 0)(), path_stream(1, 1)());
  EXPECT_NE(path_stream(1, 0)(), path_stream(2, 0)());
  auto a = path_stream(9, 17), b = path_stream(9, 17);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a(), b());
}

// Frozen digest of the first 10^5 normals of one stream. The same value is
// required from the native and the portable build of this test.
TEST(NormalStream, DigestIsIndependentOfTheInstructionSet) {
  NormalStream s(path_stream(42, 3));
  std::vector<double> v(100000);
  for (auto& x : v) x = s.next();
  EXPECT_EQ(fnv_bits(v), 0x33e5c4b51b1682daULL);
}

TEST(NormalStream, FillMatchesNext) {
  NormalStream a(path_stream(5, 0)), b(path_stream(5, 0));
  std::vector<double> x(3000), y(3000);
  for (auto& v : x) v = a.next();
  b.fill(y.data(), 1000);
  b.fill(y.data() + 1000, 2000);
  EXPECT_EQ(x, y);
}

TEST(NormalStream, RectangleStepMatchesScalarFormula) {
  const auto& t = detail::ZigguratTable::get();
  SplitMix64 g(77);
  std::vector<std::uint64_t> bits(1031);
  for (auto& b : bits) b = g();
  std::vector<double> out(bits.size()), rej(bits.size());
  detail::rectangle_step(bits.data(), t.x, out.data(), rej.data(), bits.size());
  for (std::size_t k = 0; k < bits.size(); ++k) {
    const std::size_t i = bits[k] & 0xFF;
    const double u = static_cast<double>(bits[k] >> 12) * 0x1.0p-52 * 2.0 - 1.0;
    const double x = u * t.x[i];
    EXPECT_EQ(out[k], x);
    EXPECT_EQ(rej[k] != 0.0, std::abs(x) >= t.x[i + 1]);
  }
}

TEST(NormalStream, MomentsAndTails) {
  NormalStream s(path_stream(2024, 0));
  const int n = 2000000;
  double m1 = 0, m2 = 0, m3 = 0, m4 = 0;
  int beyond3 = 0;
  for (int i = 0; i < n; ++i) {
    const double x = s.next();
    m1 += x;
    m2 += x * x;
    m3 += x * x * x;
    m4 += x * x * x * x;
    if (std::abs(x) > 3.0) ++beyond3;
  }
  m1 /= n;
  m2 /= n;
  m3 /= n;
  m4 /= n;
  EXPECT_NEAR(m1, 0.0, 5.0 / std::sqrt(n));
  EXPECT_NEAR(m2, 1.0, 5.0 * std::sqrt(2.0 / n));
  EXPECT_NEAR(m3, 0.0, 5.0 * std::sqrt(15.0 / n));
  EXPECT_NEAR(m4, 3.0, 5.0 * std::sqrt(96.0 / n));
  const double p3 = std::erfc(3.0 / std::sqrt(2.0));  // 0.0026998
  EXPECT_NEAR(static_cast<double>(beyond3) / n, p3, 5.0 * std::sqrt(p3 / n));
}

// Kolmogorov-Smirnov distance against the normal CDF.
TEST(NormalStream, DistributionMatchesNormalCdf) {
  NormalStream s(path_stream(31, 4));
  std::vector<double> v(200000);
  for (auto& x : v) x = s.next();
  std::sort(v.begin(), v.end());
  double d = 0.0;
  const double n = static_cast<double>(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double F = 0.5 * std::erfc(-v[i] / std::sqrt(2.0));
    d = std::max({d, std::abs(F - i / n), std::abs(F - (i + 1) / n)});
  }
  EXPECT_LT(d, 1.63 / std::sqrt(n));  // 1% critical value
}

TEST(VecMath, ExpMatchesStd) {
  std::vector<double> x;
  for (int i = -7000; i <= 7000; ++i) x.push_back(i * 0.1 + 1e-3 * (i % 7));
  x.push_back(-800.0);
  x.push_back(800.0);
  std::vector<double> y = x;
  vecmath::exp_inplace(y.data(), y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = std::exp(x[i]);
    // out of range the exponent saturates at 2^(+-1022)
    if (e < 1e-300) {
      EXPECT_LE(std::abs(y[i]), 1e-300) << x[i];
      continue;
    }
    if (e > 1e300) {
      EXPECT_GE(y[i], 1e300) << x[i];
      continue;
    }
    EXPECT_NEAR(y[i], e, 4e-16 * e) << x[i];
  }
}
