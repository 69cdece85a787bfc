#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ramsey/closedform.hpp"

using namespace ramsey;
namespace cf = ramsey::closedform;

namespace {

// Reference values computed independently at 30 digits.
constexpr double kZeta = 2.18217890235992381266;
constexpr double kV1 = 48.0079358519183238785;
constexpr double kV01 = 45.0237091658831846888;
constexpr double kV10 = 57.4448892340455606091;
constexpr double kV0 = 43.6435780471984762532;
constexpr double kK07 = 4.40402893788133021736;
constexpr double kCinf07 = 0.120285714285714285714;
constexpr double kZetaL01 = 2.04017913559250279484;

ModelParams bench() { return make_params_from_mu(0.5, 0.1, 0.2, 0.05); }

}  // namespace

TEST(GammaEqAlpha, BenchmarkConstants) {
  const auto p = bench();
  const auto u = Utility::power(0.5);
  const auto s = cf::gamma_eq_alpha_solution(p, u);
  EXPECT_NEAR(s.zeta, kZeta, 1e-14);
  EXPECT_NEAR(s.c_hat, 0.21, 1e-15);
  EXPECT_EQ(s.c_hat, s.L_star);
  EXPECT_NEAR(cf::value_gamma_eq_alpha(p, u, 1.0), kV1, 1e-12);
  EXPECT_NEAR(cf::value_gamma_eq_alpha(p, u, 0.1), kV01, 1e-12);
  EXPECT_NEAR(cf::value_gamma_eq_alpha(p, u, 10.0), kV10, 1e-12);
  EXPECT_NEAR(cf::value_at_origin_gamma_eq_alpha(p, u), kV0, 1e-12);
}

TEST(GammaEqAlpha, RequiresMatchingExponents) {
  EXPECT_THROW(cf::gamma_eq_alpha_solution(bench(), Utility::power(0.7)), DomainError);
  EXPECT_THROW(cf::value_gamma_eq_alpha(bench(), Utility::power(0.5), 0.0), DomainError);
}

// beta V = u_tilde(V') + (x^a - mu x) V' + sigma^2 x^2 V''/2 at every x.
TEST(GammaEqAlpha, SolvesTheStationaryEquation) {
  const auto p = bench();
  const auto u = Utility::power(0.5);
  const double z = cf::zeta(p), a = p.alpha;
  for (double x : {1e-3, 0.1, 1.0, 10.0, 1e3}) {
    const double v = cf::value_gamma_eq_alpha(p, u, x);
    const double d1 = z * std::pow(x, -a);
    const double d2 = -a * z * std::pow(x, -a - 1.0);
    const double lhs = p.beta * v;
    const double rhs =
        u_tilde(u, d1) + (std::pow(x, a) - p.mu * x) * d1 + 0.5 * p.sigma * p.sigma * x * x * d2;
    EXPECT_NEAR(lhs, rhs, 1e-12 * lhs) << "x = " << x;
  }
}

TEST(Asymptotes, MarginalAndConsumptionLimits) {
  const auto p = make_params_from_mu(0.3, 0.1, 0.2, 0.05);
  EXPECT_NEAR(cf::marginal_asymptote(p, 0.7), kK07, 1e-13);
  EXPECT_NEAR(cf::consumption_limit_at_infinity(p, 0.7), kCinf07, 1e-15);
  // unconstrained limit 0.1203 is below 0.5, so the bound leaves K unchanged
  EXPECT_EQ(cf::bounded_marginal_asymptote(p, 0.7, 0.5), cf::marginal_asymptote(p, 0.7));
  const double L = 0.05;
  EXPECT_NEAR(cf::bounded_marginal_asymptote(p, 0.7, L),
              std::pow(L, 0.3) / (0.05 + 0.3 * (0.1 + L + 0.5 * 0.7 * 0.04)), 1e-14);
  // gamma == alpha: the marginal limit is zeta itself
  EXPECT_NEAR(cf::marginal_asymptote(bench(), 0.5), kZeta, 1e-14);
}

TEST(Asymptotes, OriginBehaviorByRegime) {
  const auto p = make_params_from_mu(0.3, 0.1, 0.2, 0.05);
  EXPECT_EQ(cf::c_hat_limits(p, 0.7).at_origin, cf::OriginBehavior::infinite);
  EXPECT_EQ(cf::c_hat_limits(p, 0.2).at_origin, cf::OriginBehavior::zero);
  const auto eq = cf::c_hat_limits(bench(), 0.5, kV0);
  EXPECT_EQ(eq.at_origin, cf::OriginBehavior::finite_positive);
  EXPECT_NEAR(*eq.origin_value, 0.21, 1e-14);
}

TEST(Bounded, ConstantSolutionAtTheCorner) {
  const auto p = bench();
  const auto u = Utility::power(0.5);
  const auto b = cf::bounded_constant_solution(p, u, 0.1);
  EXPECT_NEAR(b.zeta_L, kZetaL01, 1e-14);
  EXPECT_NEAR(b.interior_candidate, 0.24025, 1e-14);
  EXPECT_TRUE(b.corner_active);
  // at L = L_star the bounded scale equals zeta
  const auto s = cf::bounded_constant_solution(p, u, 0.21);
  EXPECT_NEAR(s.zeta_L, kZeta, 1e-14);
}

// zeta_L^(-1/alpha) >= L exactly when L <= L_star.
TEST(Bounded, CornerIdentityOnRandomParameters) {
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> a(0.05, 0.95), m(0.01, 0.5), s(0.01, 0.8), b(0.005, 0.3), w(0.05, 3.0);
  int below = 0, above = 0;
  for (int k = 0; k < 1000; ++k) {
    const auto p = make_params_from_mu(a(rng), m(rng), s(rng), b(rng));
    const auto u = Utility::power(p.alpha);
    const double Ls = cf::corner_threshold(p, u);
    const double L = Ls * w(rng);
    const auto sol = cf::bounded_constant_solution(p, u, L);
    EXPECT_EQ(sol.interior_candidate >= L, L <= Ls) << "L = " << L << ", L_star = " << Ls;
    (L <= Ls ? below : above)++;
  }
  EXPECT_GT(below, 100);
  EXPECT_GT(above, 100);
  // exactly at the threshold the corner and the interior candidate coincide
  const auto p = bench();
  const auto at = cf::bounded_constant_solution(p, Utility::power(0.5), cf::corner_threshold(p));
  EXPECT_NEAR(at.interior_candidate, 0.21, 1e-14);
}
