#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "ramsey/closedform.hpp"
#include "ramsey/sde.hpp"

using namespace ramsey;

namespace {

ModelParams bench() { return make_params_from_mu(0.5, 0.1, 0.2, 0.05); }

}  // namespace

TEST(TimeGrid, RequiresIntegerStepCount) {
  EXPECT_EQ(sde::TimeGrid::make(400.0, 0.01).steps, 40000u);
  EXPECT_THROW(sde::TimeGrid::make(1.0, 0.3), DomainError);
  EXPECT_THROW(sde::TimeGrid::make(-1.0, 0.1), DomainError);
}

// As sigma -> 0, Z = X^(1-a) follows z' = (1-a)(1 - (mu + c) z).
TEST(Simulate, SmallNoiseFollowsTheOde) {
  const auto p = make_params_from_mu(0.5, 0.1, 1e-6, 0.05);
  const double c = 0.21, x0 = 0.5, T = 10.0;
  sde::SimulationOptions opt{8, 1, 1000, 1};
  const auto b = sde::simulate_given_consumption(p, sde::RateSchedule::constant(c), x0, T, 0.01, opt);
  const double k = 0.5 * (p.mu + c);
  const double z0 = std::sqrt(x0), zinf = 1.0 / (p.mu + c);
  const double z = zinf + (z0 - zinf) * std::exp(-k * T);
  EXPECT_NEAR(b.states(0, 1), z * z, 1e-5 * z * z);  // trapezoid error is O(dt^2)
}

TEST(Simulate, ReproducibleAcrossThreadCounts) {
  const auto p = bench();
  sde::SimulationOptions a{37, 99, 10, 1}, b{37, 99, 10, 3};
  const auto x = sde::simulate_given_consumption(p, sde::RateSchedule::constant(0.21), 1.0, 5.0, 0.01, a);
  const auto y = sde::simulate_given_consumption(p, sde::RateSchedule::constant(0.21), 1.0, 5.0, 0.01, b);
  EXPECT_TRUE(x.states == y.states);
  const auto pol = Policy::tabulated({0.1, 1.0, 10.0}, {0.15, 0.2, 0.3});
  const auto f1 = sde::simulate_feedback(p, pol, 1.0, 5.0, 0.01, a);
  const auto f3 = sde::simulate_feedback(p, pol, 1.0, 5.0, 0.01, b);
  EXPECT_TRUE(f1.states == f3.states);
  EXPECT_TRUE(f1.consumptions == f3.consumptions);
  const auto e1 = sde::mc_value(p, Utility::power(0.5), pol, 1.0, 20.0, 0.01, {64, 5, 1, 16});
  const auto e3 = sde::mc_value(p, Utility::power(0.5), pol, 1.0, 20.0, 0.01, {64, 5, 4, 16});
  EXPECT_EQ(e1.mean, e3.mean);
  EXPECT_EQ(e1.std_error, e3.std_error);
  EXPECT_EQ(e1.allowance->delta, e3.allowance->delta);
}

TEST(Simulate, PathsArePrefixStable) {
  // the first k paths do not depend on how many paths are drawn
  const auto p = bench();
  const auto a = sde::simulate_given_consumption(p, sde::RateSchedule::constant(0.21), 1.0, 2.0, 0.01,
                                                 {5, 3, 20, 1});
  const auto b = sde::simulate_given_consumption(p, sde::RateSchedule::constant(0.21), 1.0, 2.0, 0.01,
                                                 {40, 3, 20, 1});
  EXPECT_TRUE(a.states == b.states.topRows(5));
}

TEST(Simulate, ConstantFeedbackEqualsOpenLoop) {
  const auto p = bench();
  sde::SimulationOptions o{16, 4, 50, 1};
  const auto a = sde::simulate_feedback(p, Policy::constant(0.3), 2.0, 3.0, 0.01, o);
  const auto b = sde::simulate_given_consumption(p, sde::RateSchedule::constant(0.3), 2.0, 3.0, 0.01, o);
  EXPECT_TRUE(a.states == b.states);
}

TEST(Value, ConstantOptimalRateMatchesClosedForm) {
  const auto p = bench();
  const auto u = Utility::power(0.5);
  const auto e = sde::mc_value(p, u, Policy::constant(0.21), 1.0, 400.0, 0.02, {4000, 11, 1, 500});
  const double exact = closedform::value_gamma_eq_alpha(p, u, 1.0);
  EXPECT_LT(std::abs(e.mean - exact), 3.0 * e.std_error + e.tail_bound + e.allowance->value());
  EXPECT_NEAR(e.tail_bound, 6.597177065219077e-4, 1e-15);
}

TEST(Value, ZeroConsumptionHasZeroValue) {
  const auto e = sde::mc_value(bench(), Utility::power(0.5), Policy::constant(0.0), 1.0, 10.0, 0.01,
                               {16, 1, 1, 0});
  EXPECT_EQ(e.mean, 0.0);
  EXPECT_EQ(e.std_error, 0.0);
}

TEST(Value, TimeDependentScheduleIsSampledOnTheGrid) {
  // a schedule equal to 0.21 everywhere through the function path agrees with the constant
  const auto p = bench();
  const auto u = Utility::power(0.5);
  const auto a = sde::mc_value(p, u, sde::RateSchedule::function([](double) { return 0.21; }), 1.0, 50.0, 0.01,
                               {64, 8, 1, 0});
  const auto b = sde::mc_value(p, u, sde::RateSchedule::constant(0.21), 1.0, 50.0, 0.01, {64, 8, 1, 0});
  EXPECT_NEAR(a.mean, b.mean, 1e-12 * b.mean);
}

TEST(Audits, MomentBoundsAndPositivity) {
  const auto p = bench();
  for (double x0 : {0.5, 2.0}) {
    const auto b = sde::simulate_given_consumption(p, sde::RateSchedule::constant(0.21), x0, 2.0, 0.01,
                                                   {4000, 8, 50, 1});
    const auto r = sde::check_moment_bounds(b, p);
    EXPECT_TRUE(r.passed());
    EXPECT_TRUE(r.positive);
    EXPECT_GT(r.min_state, 0.0);
  }
}

TEST(Audits, ContinuityBound) {
  const auto r = sde::check_continuity(bench(), sde::RateSchedule::constant(0.21), 1.0, 1.1, 1.0, 0.01,
                                       {2000, 3, 1, 1}, 0.1);
  EXPECT_TRUE(r.passed());
  EXPECT_GT(r.mean_abs_diff, 0.0);
}

TEST(Entrance, StartsAtZeroAndLeavesImmediately) {
  const auto b = sde::simulate_entrance(bench(), 0.21, 1.0, 0.01, {256, 12, 1, 1});
  EXPECT_TRUE(b.entrance);
  for (Eigen::Index i = 0; i < b.states.rows(); ++i) {
    EXPECT_EQ(b.states(i, 0), 0.0);
    for (Eigen::Index j = 1; j < b.states.cols(); ++j) ASSERT_GT(b.states(i, j), 0.0);
  }
  const auto t = sde::trivial_entrance_batch(0.21, 1.0, 0.01, {4, 1, 10, 1});
  EXPECT_TRUE(t.trivial);
  EXPECT_EQ(t.states.maxCoeff(), 0.0);
}

TEST(Export, BinaryRoundTrip) {
  const auto b = sde::simulate_feedback(bench(), Policy::tabulated({0.5, 2.0}, {0.2, 0.25}), 1.0, 1.0, 0.01,
                                        {9, 77, 10, 1});
  std::stringstream ss;
  sde::write_binary(b, ss);
  const auto r = sde::read_binary(ss);
  EXPECT_EQ(r.times, b.times);
  EXPECT_TRUE(r.states == b.states);
  EXPECT_TRUE(r.consumptions == b.consumptions);
  EXPECT_EQ(r.seed, 77u);
  EXPECT_EQ(r.dt, 0.01);
  EXPECT_EQ(r.x0, 1.0);
  std::stringstream bad("not a batch at all");
  EXPECT_THROW(sde::read_binary(bad), DomainError);
}

TEST(Export, CsvLayout) {
  const auto b = sde::simulate_given_consumption(bench(), sde::RateSchedule::constant(0.21), 1.0, 0.02, 0.01,
                                                 {2, 1, 1, 1});
  std::stringstream ss;
  sde::write_csv(b, ss);
  std::string line;
  std::getline(ss, line);
  EXPECT_EQ(line, "path,t,x,c");
  std::getline(ss, line);
  EXPECT_EQ(line, "0,0,1,0.21");
  int rows = 1;
  while (std::getline(ss, line)) ++rows;
  EXPECT_EQ(rows, 6);
}

TEST(Inputs, Rejected) {
  const auto p = bench();
  EXPECT_THROW(sde::simulate_given_consumption(p, sde::RateSchedule::constant(0.2), 0.0, 1.0, 0.1, {}),
               DomainError);
  EXPECT_THROW(sde::RateSchedule::constant(-1.0), DomainError);
  EXPECT_THROW(sde::simulate_given_consumption(p, sde::RateSchedule::constant(0.2), 1.0, 1.0, 0.1, {4, 0, 3, 1}),
               DomainError);
}
