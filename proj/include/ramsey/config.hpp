#pragma once

// Run configuration shared by every CLI command. Model keys sit at the top
// level of the JSON object; everything else lives in named sections.
//
//   {
//     "alpha": 0.5, "mu": 0.1, "sigma": 0.2, "beta": 0.05, "gamma": 0.5,
//     "grid":   {"x_min": 1e-3, "x_max": 1e3, "nodes": 2048},
//     "solver": {"tol": 1e-8, "max_iter": 200, "policy_tol": 1e-10, "bound": "inf"},
//     "mc":     {"x0": 1, "T": 400, "dt": 0.01, "paths": 10000, "seed": 0, ...},
//     "experiments": {"Ls": [...], "xs": [...], "x0s": [...], ...},
//     "output": {"dir": ".", "prefix": ""}
//   }
//
// Either mu or the pair (lambda, n) must be given, never both. Unknown keys
// are rejected at every level.

#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ramsey/errors.hpp"
#include "ramsey/feller.hpp"
#include "ramsey/grid.hpp"
#include "ramsey/hjb.hpp"
#include "ramsey/model.hpp"
#include "ramsey/sde.hpp"

namespace ramsey::config {

using json = nlohmann::json;

struct ModelConfig {
  double alpha = 0.5;
  std::optional<double> lambda;
  std::optional<double> n;
  std::optional<double> mu = 0.1;
  double sigma = 0.2;
  double beta = 0.05;
  double gamma = 0.5;

  bool operator==(const ModelConfig&) const = default;
};

struct SolverConfig {
  double tol = 1e-8;
  int max_iter = 200;
  double policy_tol = 1e-10;
  double bound = kInf;

  bool operator==(const SolverConfig&) const = default;
};

struct McConfig {
  double x0 = 1.0;
  double T = 400.0;
  double dt = 0.01;
  std::size_t paths = 10000;
  std::uint64_t seed = 0;
  std::size_t allowance_paths = 0;
  std::string policy = "optimal";  // optimal | constant:<c> | <csv file with x and c columns>
  std::size_t export_paths = 10;
  std::size_t record_every = 100;

  bool operator==(const McConfig&) const = default;
};

struct ExperimentsConfig {
  std::vector<double> Ls;
  std::vector<double> xs = {0.5, 1.0, 2.0};
  std::vector<double> x0s = {0.25, 1.0, 4.0};
  std::optional<double> clip_L;
  double suboptimal_factor = 2.0;
  double ell = 1.0;
  std::vector<double> infinity_levels = feller::default_levels(feller::Side::infinity);
  std::vector<double> origin_levels = feller::default_levels(feller::Side::origin);

  bool operator==(const ExperimentsConfig&) const = default;
};

struct OutputConfig {
  std::string dir = ".";
  std::string prefix;

  bool operator==(const OutputConfig&) const = default;
};

struct RunConfig {
  ModelConfig model;
  GridSpec grid;
  SolverConfig solver;
  McConfig mc;
  ExperimentsConfig experiments;
  OutputConfig output;

  bool operator==(const RunConfig&) const = default;

  ModelParams params() const {
    if (model.mu) return make_params_from_mu(model.alpha, *model.mu, model.sigma, model.beta);
    return make_params(model.alpha, *model.lambda, *model.n, model.sigma, model.beta);
  }

  Utility utility() const { return Utility::power(model.gamma); }

  hjb::SolverOptions solver_options() const {
    hjb::SolverOptions o;
    o.tol_scale = solver.tol;
    o.max_iter = solver.max_iter;
    o.policy_tol = solver.policy_tol;
    return o;
  }

  /// Throws DomainError on the first inconsistency.
  void validate() const;
};

namespace detail {

inline void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw DomainError(where + " must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) throw DomainError("unknown key '" + it.key() + "' in " + where);
}

inline double number(const json& j, const std::string& key) {
  if (!j.is_number()) throw DomainError("'" + key + "' must be a number");
  return j.get<double>();
}

inline std::size_t count(const json& j, const std::string& key) {
  if (!j.is_number_integer() || j.get<long long>() < 0)
    throw DomainError("'" + key + "' must be a nonnegative integer");
  return j.get<std::size_t>();
}

// "inf" or a positive number
inline double bound_value(const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "inf") return kInf;
    throw DomainError("'bound' must be a number or \"inf\"");
  }
  return number(j, "bound");
}

inline json bound_json(double b) { return std::isinf(b) ? json("inf") : json(b); }

inline std::vector<double> numbers(const json& j, const std::string& key) {
  if (!j.is_array()) throw DomainError("'" + key + "' must be an array of numbers");
  std::vector<double> out;
  for (const auto& e : j) out.push_back(number(e, key));
  return out;
}

template <class T, class F>
void read(const json& j, const char* key, T& dst, F convert) {
  if (j.contains(key)) dst = convert(j.at(key), key);
}

inline bool increasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] > v[i - 1])) return false;
  return true;
}

}  // namespace detail

inline void RunConfig::validate() const {
  const bool has_mu = model.mu.has_value();
  const bool has_split = model.lambda.has_value() || model.n.has_value();
  if (has_mu && has_split) throw DomainError("give either mu or (lambda, n), not both");
  if (!has_mu && !(model.lambda && model.n)) throw DomainError("both lambda and n are required when mu is absent");
  (void)params();  // model invariants
  (void)utility();
  grid.validate();
  if (!(solver.tol > 0.0)) throw DomainError("solver.tol must be positive");
  if (solver.max_iter < 1) throw DomainError("solver.max_iter must be at least 1");
  if (!(solver.policy_tol > 0.0)) throw DomainError("solver.policy_tol must be positive");
  if (!(solver.bound > 0.0)) throw DomainError("solver.bound must be positive or \"inf\"");
  if (!(mc.x0 >= 0.0) || !std::isfinite(mc.x0)) throw DomainError("mc.x0 must be finite and nonnegative");
  (void)sde::TimeGrid::make(mc.T, mc.dt);
  if (mc.paths < 2) throw DomainError("mc.paths must be at least 2");
  if (mc.record_every < 1) throw DomainError("mc.record_every must be at least 1");
  if (!detail::increasing(experiments.Ls)) throw DomainError("experiments.Ls must be increasing");
  for (double L : experiments.Ls)
    if (!(L > 0.0) || !std::isfinite(L)) throw DomainError("experiments.Ls must be finite and positive");
  for (double x : experiments.xs)
    if (!(x > 0.0)) throw DomainError("experiments.xs must be positive");
  for (double x : experiments.x0s)
    if (!(x > 0.0)) throw DomainError("experiments.x0s must be positive");
  if (experiments.clip_L && !(*experiments.clip_L > 0.0 && std::isfinite(*experiments.clip_L)))
    throw DomainError("experiments.clip_L must be finite and positive");
  if (!(experiments.suboptimal_factor > 0.0)) throw DomainError("experiments.suboptimal_factor must be positive");
  if (!(experiments.ell > 0.0)) throw DomainError("experiments.ell must be positive");
}

inline RunConfig from_json(const json& j) {
  using namespace detail;
  reject_unknown(j,
                 {"alpha", "lambda", "n", "mu", "sigma", "beta", "gamma", "grid", "solver", "mc", "experiments",
                  "output"},
                 "config");
  auto num = [](const json& v, const char* k) { return number(v, k); };
  auto opt_num = [](const json& v, const char* k) { return std::optional<double>(number(v, k)); };
  auto cnt = [](const json& v, const char* k) { return count(v, k); };
  auto vec = [](const json& v, const char* k) { return numbers(v, k); };
  auto str = [](const json& v, const char* k) {
    if (!v.is_string()) throw DomainError(std::string("'") + k + "' must be a string");
    return v.get<std::string>();
  };

  RunConfig c;
  read(j, "alpha", c.model.alpha, num);
  if (j.contains("lambda") || j.contains("n")) c.model.mu.reset();
  read(j, "lambda", c.model.lambda, opt_num);
  read(j, "n", c.model.n, opt_num);
  read(j, "mu", c.model.mu, opt_num);
  read(j, "sigma", c.model.sigma, num);
  read(j, "beta", c.model.beta, num);
  read(j, "gamma", c.model.gamma, num);

  if (j.contains("grid")) {
    const json& g = j.at("grid");
    reject_unknown(g, {"x_min", "x_max", "nodes"}, "grid");
    read(g, "x_min", c.grid.x_min, num);
    read(g, "x_max", c.grid.x_max, num);
    read(g, "nodes", c.grid.n_nodes, cnt);
  }
  if (j.contains("solver")) {
    const json& s = j.at("solver");
    reject_unknown(s, {"tol", "max_iter", "policy_tol", "bound"}, "solver");
    read(s, "tol", c.solver.tol, num);
    read(s, "max_iter", c.solver.max_iter, [](const json& v, const char* k) { return static_cast<int>(count(v, k)); });
    read(s, "policy_tol", c.solver.policy_tol, num);
    read(s, "bound", c.solver.bound, [](const json& v, const char*) { return bound_value(v); });
  }
  if (j.contains("mc")) {
    const json& m = j.at("mc");
    reject_unknown(m, {"x0", "T", "dt", "paths", "seed", "allowance_paths", "policy", "export_paths", "record_every"},
                   "mc");
    read(m, "x0", c.mc.x0, num);
    read(m, "T", c.mc.T, num);
    read(m, "dt", c.mc.dt, num);
    read(m, "paths", c.mc.paths, cnt);
    read(m, "seed", c.mc.seed, [](const json& v, const char* k) {
      if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
        throw DomainError(std::string("'") + k + "' must be a nonnegative integer");
      return v.get<std::uint64_t>();
    });
    read(m, "allowance_paths", c.mc.allowance_paths, cnt);
    read(m, "policy", c.mc.policy, str);
    read(m, "export_paths", c.mc.export_paths, cnt);
    read(m, "record_every", c.mc.record_every, cnt);
  }
  if (j.contains("experiments")) {
    const json& e = j.at("experiments");
    reject_unknown(e, {"Ls", "xs", "x0s", "clip_L", "suboptimal_factor", "ell", "infinity_levels", "origin_levels"},
                   "experiments");
    read(e, "Ls", c.experiments.Ls, vec);
    read(e, "xs", c.experiments.xs, vec);
    read(e, "x0s", c.experiments.x0s, vec);
    if (e.contains("clip_L") && !e.at("clip_L").is_null()) c.experiments.clip_L = number(e.at("clip_L"), "clip_L");
    read(e, "suboptimal_factor", c.experiments.suboptimal_factor, num);
    read(e, "ell", c.experiments.ell, num);
    read(e, "infinity_levels", c.experiments.infinity_levels, vec);
    read(e, "origin_levels", c.experiments.origin_levels, vec);
  }
  if (j.contains("output")) {
    const json& o = j.at("output");
    reject_unknown(o, {"dir", "prefix"}, "output");
    read(o, "dir", c.output.dir, str);
    read(o, "prefix", c.output.prefix, str);
  }
  c.validate();
  return c;
}

/// Resolved config; from_json(to_json(c)) == c.
inline json to_json(const RunConfig& c, bool with_output = true) {
  json j;
  j["alpha"] = c.model.alpha;
  if (c.model.mu) j["mu"] = *c.model.mu;
  if (c.model.lambda) j["lambda"] = *c.model.lambda;
  if (c.model.n) j["n"] = *c.model.n;
  j["sigma"] = c.model.sigma;
  j["beta"] = c.model.beta;
  j["gamma"] = c.model.gamma;
  j["grid"] = {{"x_min", c.grid.x_min}, {"x_max", c.grid.x_max}, {"nodes", c.grid.n_nodes}};
  j["solver"] = {{"tol", c.solver.tol},
                 {"max_iter", c.solver.max_iter},
                 {"policy_tol", c.solver.policy_tol},
                 {"bound", detail::bound_json(c.solver.bound)}};
  j["mc"] = {{"x0", c.mc.x0},
             {"T", c.mc.T},
             {"dt", c.mc.dt},
             {"paths", c.mc.paths},
             {"seed", c.mc.seed},
             {"allowance_paths", c.mc.allowance_paths},
             {"policy", c.mc.policy},
             {"export_paths", c.mc.export_paths},
             {"record_every", c.mc.record_every}};
  json e = {{"Ls", c.experiments.Ls},
            {"xs", c.experiments.xs},
            {"x0s", c.experiments.x0s},
            {"suboptimal_factor", c.experiments.suboptimal_factor},
            {"ell", c.experiments.ell},
            {"infinity_levels", c.experiments.infinity_levels},
            {"origin_levels", c.experiments.origin_levels}};
  e["clip_L"] = c.experiments.clip_L ? json(*c.experiments.clip_L) : json(nullptr);
  j["experiments"] = e;
  if (with_output) j["output"] = {{"dir", c.output.dir}, {"prefix", c.output.prefix}};
  return j;
}

inline RunConfig load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open config file " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw DomainError("config " + path + " is not valid JSON: " + e.what());
  }
  return from_json(j);
}

/// FNV-1a over the compact, key-sorted dump of the config without its
/// output section, as 16 hex digits.
inline std::string hash(const RunConfig& c) {
  const std::string s = to_json(c, false).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace ramsey::config
