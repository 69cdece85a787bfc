#include <gtest/gtest.h>

#include "ramsey/config.hpp"

using namespace ramsey;
using config::json;

TEST(Config, DefaultsRoundTrip) {
  const config::RunConfig c;
  EXPECT_EQ(config::from_json(config::to_json(c)), c);
}

TEST(Config, RoundTripPreservesEveryField) {
  config::RunConfig c;
  c.model.mu.reset();
  c.model.lambda = 0.06;
  c.model.n = 0.08;
  c.model.gamma = 0.7;
  c.model.alpha = 0.3;
  c.grid = {1e-4, 1e6, 1000};
  c.solver.bound = 0.5;
  c.solver.tol = 3e-9;
  c.mc.seed = 0xFFFFFFFFFFFFFFFFULL;
  c.mc.policy = "constant:0.123";
  c.mc.dt = 0.1 + 0.2;  // not exactly representable as a short decimal
  c.mc.T = 30.000000000000004;
  c.experiments.Ls = {0.5, 1.0};
  c.experiments.clip_L = 0.75;
  c.output.prefix = "run_";
  const auto back = config::from_json(json::parse(config::to_json(c).dump()));
  EXPECT_EQ(back, c);
  EXPECT_EQ(config::hash(back), config::hash(c));
}

TEST(Config, RejectsUnknownKeysAtEveryLevel) {
  EXPECT_THROW(config::from_json(json::parse(R"({"alpha": 0.5, "theta": 1})")), DomainError);
  EXPECT_THROW(config::from_json(json::parse(R"({"grid": {"nodes": 100, "step": 1}})")), DomainError);
  EXPECT_THROW(config::from_json(json::parse(R"({"mc": {"steps": 100}})")), DomainError);
  EXPECT_THROW(config::from_json(json::parse(R"({"output": {"file": "a"}})")), DomainError);
}

TEST(Config, MuAndRatesAreExclusive) {
  EXPECT_THROW(config::from_json(json::parse(R"({"mu": 0.1, "lambda": 0.06, "n": 0.08})")), DomainError);
  EXPECT_THROW(config::from_json(json::parse(R"({"lambda": 0.06})")), DomainError);
  const auto c = config::from_json(json::parse(R"({"lambda": 0.06, "n": 0.08, "sigma": 0.2})"));
  EXPECT_NEAR(c.params().mu, 0.1, 1e-15);
}

TEST(Config, ValidatesValues) {
  EXPECT_THROW(config::from_json(json::parse(R"({"mu": -0.1})")), DomainError);
  EXPECT_THROW(config::from_json(json::parse(R"({"gamma": 1.5})")), DomainError);
  EXPECT_THROW(config::from_json(json::parse(R"({"grid": {"nodes": 4}})")), DomainError);
  EXPECT_THROW(config::from_json(json::parse(R"({"solver": {"bound": "huge"}})")), DomainError);
  EXPECT_THROW(config::from_json(json::parse(R"({"mc": {"T": 1, "dt": 0.3}})")), DomainError);
  EXPECT_THROW(config::from_json(json::parse(R"({"experiments": {"Ls": [1, 0.5]}})")), DomainError);
  EXPECT_THROW(config::from_json(json::parse(R"({"alpha": "half"})")), DomainError);
  const auto c = config::from_json(json::parse(R"({"solver": {"bound": "inf"}})"));
  EXPECT_TRUE(std::isinf(c.solver.bound));
}

TEST(Config, HashIgnoresOutputLocation) {
  config::RunConfig a, b;
  b.output.dir = "/tmp/elsewhere";
  EXPECT_EQ(config::hash(a), config::hash(b));
  b.mc.seed = 1;
  EXPECT_NE(config::hash(a), config::hash(b));
  EXPECT_EQ(config::hash(a).size(), 16u);
}
