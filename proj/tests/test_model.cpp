#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ramsey/model.hpp"

using namespace ramsey;

TEST(Params, DerivesMuFromRates) {
  const auto p = make_params(0.5, 0.06, 0.08, 0.2, 0.05);
  EXPECT_NEAR(p.mu, 0.1, 1e-15);
  EXPECT_DOUBLE_EQ(p.eta(), 2.0);
  EXPECT_NO_THROW(validate(p));
}

TEST(Params, RejectsInvalidInput) {
  EXPECT_THROW(make_params_from_mu(0.0, 0.1, 0.2, 0.05), DomainError);
  EXPECT_THROW(make_params_from_mu(1.0, 0.1, 0.2, 0.05), DomainError);
  EXPECT_THROW(make_params_from_mu(0.5, -0.1, 0.2, 0.05), DomainError);
  EXPECT_THROW(make_params_from_mu(0.5, 0.0, 0.2, 0.05), DomainError);
  EXPECT_THROW(make_params_from_mu(0.5, 0.1, 0.0, 0.05), DomainError);
  EXPECT_THROW(make_params_from_mu(0.5, 0.1, 0.2, 0.0), DomainError);
  // lambda + n - sigma^2 = 0.01 + 0.02 - 0.04 < 0
  EXPECT_THROW(make_params(0.5, 0.01, 0.02, 0.2, 0.05), DomainError);
  EXPECT_THROW(Utility::power(1.0), DomainError);
  EXPECT_THROW(Utility::power(0.0), DomainError);
}

TEST(Params, ValidateCatchesInconsistentRecord) {
  auto p = make_params(0.5, 0.06, 0.08, 0.2, 0.05);
  p.mu = 0.2;
  EXPECT_THROW(validate(p), DomainError);
}

TEST(Utility, PowerHooksAreConsistent) {
  const auto u = Utility::power(0.7);
  for (double y : {1e-3, 0.1, 1.0, 7.0, 1e3}) {
    EXPECT_NEAR(u.value(y), std::pow(y, 0.3) / 0.3, 1e-12 * u.value(y));
    EXPECT_NEAR(u.inverse_marginal(u.marginal(y)), y, 1e-12 * y);
  }
  EXPECT_EQ(u.value(0.0), 0.0);
}

// u_tilde against a brute-force maximization over a fine log grid of y.
TEST(Utility, TransformMatchesBruteForce) {
  const auto u = Utility::power(0.5);
  for (double p : {0.05, 0.3, 1.0, 4.0}) {
    double best = 0.0;
    for (int k = 0; k <= 200000; ++k) {
      const double y = std::exp(-12.0 + 24.0 * k / 200000.0);
      best = std::max(best, u.value(y) - y * p);
    }
    EXPECT_NEAR(u_tilde(u, p), best, 1e-6 * best);
  }
  EXPECT_THROW(u_tilde(u, 0.0), DomainError);
}

TEST(Utility, BoundedTransformClampsAtTheCorner) {
  const auto u = Utility::power(0.5);
  // interior maximizer (U')^{-1}(p)/x = 1/(p^2 x) = 4 at x = 1, p = 0.5
  EXPECT_DOUBLE_EQ(bounded_maximizer(u, 1.0, 0.5, kInf), 4.0);
  EXPECT_DOUBLE_EQ(bounded_maximizer(u, 1.0, 0.5, 2.0), 2.0);
  EXPECT_DOUBLE_EQ(u_tilde_bounded(u, 1.0, 0.5, 2.0), 2.0 * std::sqrt(2.0) - 1.0);
  EXPECT_DOUBLE_EQ(u_tilde_bounded(u, 1.0, 0.5, kInf), u_tilde(u, 0.5));
  EXPECT_LE(u_tilde_bounded(u, 1.0, 0.5, 2.0), u_tilde(u, 0.5));
}

TEST(Utility, SurplusForCustomUtilityMatchesPower) {
  const double g = 0.6;
  const auto custom = Utility::custom([g](double y) { return y <= 0 ? 0.0 : std::pow(y, 1 - g) / (1 - g); },
                                      [g](double y) { return std::pow(y, -g); },
                                      [g](double q) { return std::pow(q, -1 / g); });
  EXPECT_NEAR(utility_surplus(custom), utility_surplus(Utility::power(g)), 1e-9);
  EXPECT_DOUBLE_EQ(utility_surplus(Utility::power(g)), g / (1 - g));
}

TEST(Bounds, DriftPeakAndPhi0) {
  const auto p = make_params_from_mu(0.5, 0.1, 0.2, 0.05);
  const auto peak = drift_peak(p);
  EXPECT_DOUBLE_EQ(peak.x_star, 25.0);
  EXPECT_DOUBLE_EQ(peak.A, 2.5);
  // (1 + 1e-3)(2.5 + 1)/0.05
  EXPECT_NEAR(phi0_bound(p, Utility::power(0.5)), 70.07, 1e-12);
}

TEST(Bounds, Phi0MakesTheSupersolutionStrict) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> a(0.05, 0.95), m(0.01, 1.0), s(0.01, 1.0), b(0.005, 0.5), g(0.05, 0.95);
  for (int k = 0; k < 200; ++k) {
    const auto p = make_params_from_mu(a(rng), m(rng), s(rng), b(rng));
    const auto u = Utility::power(g(rng));
    const auto peak = drift_peak(p);
    EXPECT_LT(-p.beta * phi0_bound(p, u) + peak.A + utility_surplus(u), 0.0);
  }
}
