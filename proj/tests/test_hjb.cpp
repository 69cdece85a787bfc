#include <gtest/gtest.h>

#include <cmath>

#include "ramsey/closedform.hpp"
#include "ramsey/hjb.hpp"
#include "ramsey/tridiagonal.hpp"

using namespace ramsey;

namespace {

ModelParams bench() { return make_params_from_mu(0.5, 0.1, 0.2, 0.05); }
ModelParams params07() { return make_params_from_mu(0.3, 0.1, 0.2, 0.05); }

std::vector<double> closed_form_values(const GridSpec& g) {
  const auto p = bench();
  const auto u = Utility::power(0.5);
  std::vector<double> v;
  for (double x : g.nodes()) v.push_back(closedform::value_gamma_eq_alpha(p, u, x));
  return v;
}

}  // namespace

TEST(Tridiagonal, ThomasSolveMatchesApply) {
  const std::size_t n = 50;
  Tridiagonal t(n);
  t.lower.assign(n, 1.0);
  t.upper.assign(n, 1.5);
  t.diag.assign(n, 3.0);
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = std::sin(0.3 * i) + 2.0;
  const auto b = t.apply(x);
  const auto y = t.solve(b);
  for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(y[i], x[i], 1e-13);
  const auto m = t.check_monotone();
  EXPECT_TRUE(m.off_diagonals_nonnegative);
  EXPECT_DOUBLE_EQ(m.min_margin, 0.5);
  t.upper[7] = -0.1;
  EXPECT_FALSE(t.check_monotone().off_diagonals_nonnegative);
}

TEST(Solve, BenchmarkMatchesClosedForm) {
  const auto p = bench();
  const auto u = Utility::power(0.5);
  const auto vf = hjb::solve(p, u, kInf, GridSpec{});
  ASSERT_TRUE(vf.report.converged);
  EXPECT_LE(vf.report.iterations, 200);
  for (double x : {0.1, 1.0, 10.0}) {
    const double exact = closedform::value_gamma_eq_alpha(p, u, x);
    EXPECT_LT(std::abs(vf.value_at(x) - exact) / exact, 5e-3) << "x = " << x;
  }
  EXPECT_NEAR(vf.value_at(1.0), 48.0079358519183, 0.05);
}

TEST(Solve, ExtractedPolicyIsNearlyConstant) {
  const auto p = bench();
  const auto u = Utility::power(0.5);
  const auto vf = hjb::solve(p, u, kInf, GridSpec{});
  const auto pol = hjb::extract_policy(vf, p, u);
  const auto c = pol.rates();
  for (std::size_t i = 1; i + 1 < c.size(); ++i) EXPECT_NEAR(c[i], 0.21, 0.0021) << "node " << i;
}

TEST(Solve, MonotoneSchemeAndHowardIncrease) {
  for (double g : {0.5, 0.7}) {
    const auto p = g == 0.5 ? bench() : params07();
    const auto vf = hjb::solve(p, Utility::power(g), kInf, GridSpec{1e-3, 1e6, 2048});
    ASSERT_TRUE(vf.report.converged);
    EXPECT_GE(vf.report.min_row_margin, 0.0);
    for (double inc : vf.report.value_increase) EXPECT_GE(inc, -vf.report.tol_res);
  }
}

// Residual of the injected closed form drops ~4x per grid doubling.
TEST(Residual, SecondOrderConsistency) {
  const auto p = bench();
  const auto u = Utility::power(0.5);
  std::vector<double> r;
  for (std::size_t n : {257u, 513u, 1025u, 2049u}) {
    const GridSpec g{1e-2, 1e2, n};
    const auto vf = hjb::ValueFunction::from_values(g, closed_form_values(g));
    r.push_back(hjb::residual(vf, p, u).max_abs);
  }
  for (std::size_t k = 1; k < r.size(); ++k) {
    const double ratio = r[k - 1] / r[k];
    EXPECT_GT(ratio, 3.5) << "doubling " << k;
    EXPECT_LT(ratio, 4.5) << "doubling " << k;
  }
}

TEST(Bounded, ValuesIncreaseWithTheBound) {
  const auto p = params07();
  const auto u = Utility::power(0.7);
  const GridSpec g{1e-3, 1e6, 1024};
  const auto v1 = hjb::solve(p, u, 0.3, g);
  const auto v2 = hjb::solve(p, u, 0.6, g);
  const auto vi = hjb::solve(p, u, kInf, g);
  const double tol = 2.0 * std::max({v1.report.tol_res, v2.report.tol_res, vi.report.tol_res});
  for (std::size_t i = 0; i < g.n_nodes; ++i) {
    EXPECT_LE(v1.v[i], v2.v[i] + tol);
    EXPECT_LE(v2.v[i], vi.v[i] + tol);
  }
  EXPECT_LT(v1.value_at(1.0), vi.value_at(1.0) - 10.0 * tol);
  for (double c : hjb::extract_policy(v1, p, u).rates()) EXPECT_LE(c, 0.3);
}

TEST(Bounded, BenchmarkCornerMatchesConstantSolution) {
  const auto p = bench();
  const auto u = Utility::power(0.5);
  const auto vf = hjb::solve(p, u, 0.1, GridSpec{});
  const auto b = closedform::bounded_constant_solution(p, u, 0.1);
  const double exact = b.zeta_L * (1.0 / 0.5 + 1.0 / p.beta);
  EXPECT_LT(std::abs(vf.value_at(1.0) - exact) / exact, 5e-3);
  for (double c : hjb::extract_policy(vf, p, u).rates()) EXPECT_DOUBLE_EQ(c, 0.1);
}

TEST(Solution, StaysInsideTheLinearBound) {
  for (double g : {0.5, 0.7}) {
    const auto p = g == 0.5 ? bench() : params07();
    const auto u = Utility::power(g);
    const auto vf = hjb::solve(p, u, kInf, GridSpec{1e-3, 1e6, 2048});
    const double phi0 = phi0_bound(p, u);
    for (std::size_t i = 0; i < vf.size(); ++i) EXPECT_LE(vf.v[i], vf.x[i] + phi0);
    const auto m = hjb::validate_candidate(vf, p, u);
    EXPECT_TRUE(m.strictly_increasing);
    EXPECT_TRUE(m.concave);
    EXPECT_TRUE(m.linear_growth);
  }
}

TEST(Asymptotes, RightAndLeftBehavior) {
  const auto p = params07();
  const auto u = Utility::power(0.7);
  const auto vf = hjb::solve(p, u, kInf, GridSpec{1e-3, 1e8, 4096});
  ASSERT_TRUE(vf.report.converged);
  const auto r = hjb::right_asymptote(vf, p, 0.7);
  EXPECT_NEAR(r.target, 4.40402893788133, 1e-12);
  EXPECT_LT(r.max_rel_deviation, 0.02);
  EXPECT_TRUE(r.asymptotic_regime);
  const auto l = hjb::left_asymptote(vf, p, u);
  EXPECT_TRUE(l.plateau_positive);
  EXPECT_TRUE(l.decay_monotone);
}

TEST(Solve, RejectsBadInput) {
  const auto p = bench();
  const auto u = Utility::power(0.5);
  EXPECT_THROW(hjb::solve(p, u, kInf, GridSpec{1.0, 0.5, 100}), DomainError);
  EXPECT_THROW(hjb::solve(p, u, kInf, GridSpec{1e-3, 1e3, 8}), DomainError);
  EXPECT_THROW(hjb::solve(p, u, -1.0, GridSpec{}), DomainError);
  EXPECT_THROW(hjb::left_asymptote(hjb::solve(p, u, kInf, GridSpec{1e-3, 1e3, 64}), p, u), DomainError);
}

TEST(Solve, ReportsNonConvergence) {
  const auto p = params07();
  hjb::SolverOptions opt;
  opt.max_iter = 1;
  const auto vf = hjb::solve(p, Utility::power(0.7), kInf, GridSpec{}, opt);
  EXPECT_FALSE(vf.report.converged);
  EXPECT_EQ(vf.report.iterations, 1);
}
