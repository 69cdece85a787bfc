// ramsey: command-line driver for the solver, simulator and experiments.
//
//   ramsey <solve|simulate|oracle|feller|compare|crosscheck> [--config file.json] [overrides]
//
// Exit codes: 0 success, 1 numerical failure, 2 validation error. Errors are
// reported on stderr as {"error": {"kind": ..., "message": ...}}.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "ramsey.hpp"

namespace fs = std::filesystem;
using ramsey::config::json;
using ramsey::config::RunConfig;

namespace {

struct Overrides {
  std::string config_path;
  std::map<std::string, double> top;  // model keys
  std::optional<double> x_min, x_max, bound_num;
  std::optional<std::size_t> nodes;
  std::string bound;
  std::optional<double> x0, T, dt, clip_L;
  std::optional<std::size_t> paths, allowance_paths, export_paths, record_every;
  std::optional<std::uint64_t> seed;
  std::string policy, out, prefix;
  std::vector<double> Ls, xs, x0s;
  unsigned threads = 0;
};

void add_options(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config_path, "JSON config file")->check(CLI::ExistingFile);
  for (const char* k : {"alpha", "lambda", "n", "mu", "sigma", "beta", "gamma"})
    cmd->add_option_function<double>(std::string("--") + k, [&o, k](double v) { o.top[k] = v; },
                                     std::string("model parameter ") + k);
  cmd->add_option("--x-min", o.x_min, "grid lower end");
  cmd->add_option("--x-max", o.x_max, "grid upper end");
  cmd->add_option("--nodes", o.nodes, "grid node count");
  cmd->add_option("--bound", o.bound, "consumption bound L, or inf");
  cmd->add_option("--x0", o.x0, "initial state");
  cmd->add_option("--T", o.T, "simulation horizon");
  cmd->add_option("--dt", o.dt, "time step");
  cmd->add_option("--paths", o.paths, "Monte Carlo paths");
  cmd->add_option("--seed", o.seed, "base seed");
  cmd->add_option("--allowance-paths", o.allowance_paths, "paths rerun at 2 dt for the discretization allowance");
  cmd->add_option("--export-paths", o.export_paths, "paths written to the batch export");
  cmd->add_option("--record-every", o.record_every, "keep every k-th time node in the export");
  cmd->add_option("--policy", o.policy, "optimal | constant:<c> | <csv with x and c columns>");
  cmd->add_option("--Ls", o.Ls, "bounds for compare")->delimiter(',');
  cmd->add_option("--xs", o.xs, "comparison points")->delimiter(',');
  cmd->add_option("--x0s", o.x0s, "cross-check starting points")->delimiter(',');
  cmd->add_option("--clip-L", o.clip_L, "bound for the policy clipping check");
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--prefix", o.prefix, "output file prefix");
  cmd->add_option("--threads", o.threads, "worker threads (0 = all cores); outputs do not depend on it");
}

RunConfig resolve(const Overrides& o) {
  json j = json::object();
  if (!o.config_path.empty()) {
    std::ifstream in(o.config_path);
    try {
      j = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ramsey::DomainError("config " + o.config_path + " is not valid JSON: " + e.what());
    }
  }
  if (!j.is_object()) throw ramsey::DomainError("config must be a JSON object");
  // defaults first, so overrides always land in a complete object
  json base = ramsey::config::to_json(RunConfig{});
  if (j.contains("lambda") || j.contains("n")) base.erase("mu");
  base.merge_patch(j);
  j = base;
  for (const auto& [k, v] : o.top) {
    if (k == "mu") {
      j.erase("lambda");
      j.erase("n");
    } else if (k == "lambda" || k == "n") {
      j.erase("mu");
    }
    j[k] = v;
  }
  if (o.x_min) j["grid"]["x_min"] = *o.x_min;
  if (o.x_max) j["grid"]["x_max"] = *o.x_max;
  if (o.nodes) j["grid"]["nodes"] = *o.nodes;
  if (!o.bound.empty()) {
    if (o.bound == "inf") {
      j["solver"]["bound"] = "inf";
    } else {
      try {
        std::size_t used = 0;
        const double b = std::stod(o.bound, &used);
        if (used != o.bound.size()) throw std::invalid_argument("trailing");
        j["solver"]["bound"] = b;
      } catch (const std::exception&) {
        throw ramsey::DomainError("--bound must be a number or inf");
      }
    }
  }
  if (o.x0) j["mc"]["x0"] = *o.x0;
  if (o.T) j["mc"]["T"] = *o.T;
  if (o.dt) j["mc"]["dt"] = *o.dt;
  if (o.paths) j["mc"]["paths"] = *o.paths;
  if (o.seed) j["mc"]["seed"] = *o.seed;
  if (o.allowance_paths) j["mc"]["allowance_paths"] = *o.allowance_paths;
  if (o.export_paths) j["mc"]["export_paths"] = *o.export_paths;
  if (o.record_every) j["mc"]["record_every"] = *o.record_every;
  if (!o.policy.empty()) j["mc"]["policy"] = o.policy;
  if (!o.Ls.empty()) j["experiments"]["Ls"] = o.Ls;
  if (!o.xs.empty()) j["experiments"]["xs"] = o.xs;
  if (!o.x0s.empty()) j["experiments"]["x0s"] = o.x0s;
  if (o.clip_L) j["experiments"]["clip_L"] = *o.clip_L;
  if (!o.out.empty()) j["output"]["dir"] = o.out;
  if (!o.prefix.empty()) j["output"]["prefix"] = o.prefix;
  return ramsey::config::from_json(j);
}

unsigned thread_count(unsigned requested) {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

// Output files and the run envelope shared by all commands.
class Run {
 public:
  Run(std::string command, const RunConfig& cfg) : command_(std::move(command)), cfg_(cfg) {
    fs::create_directories(cfg.output.dir);
  }

  std::string path(const std::string& suffix) const {
    return (fs::path(cfg_.output.dir) / (cfg_.output.prefix + command_ + suffix)).string();
  }

  std::ofstream open(const std::string& suffix, bool binary = false) {
    const std::string p = path(suffix);
    std::ofstream os(p, binary ? std::ios::binary : std::ios::out);
    if (!os) throw ramsey::DomainError("cannot write " + p);
    files_.push_back(fs::path(p).filename().string());
    return os;
  }

  void finish(json body) {
    json out;
    out["command"] = command_;
    out["config"] = ramsey::config::to_json(cfg_, false);
    out["config_hash"] = ramsey::config::hash(cfg_);
    out["files"] = files_;
    files_.push_back(fs::path(path(".json")).filename().string());
    out["files"] = files_;
    for (auto& [k, v] : body.items()) out[k] = v;
    std::ofstream os(path(".json"));
    if (!os) throw ramsey::DomainError("cannot write " + path(".json"));
    os << out.dump(2) << '\n';
    std::cout << path(".json") << '\n';
  }

 private:
  std::string command_;
  const RunConfig& cfg_;
  std::vector<std::string> files_;
};

std::string fmt(double v) { return ramsey::io::format_double(v); }

json report_json(const ramsey::hjb::SolveReport& r) {
  return {{"iterations", r.iterations},
          {"residual", r.residual},
          {"tol_res", r.tol_res},
          {"converged", r.converged},
          {"policy_change", r.policy_change},
          {"value_increase", r.value_increase},
          {"min_row_margin", r.min_row_margin},
          {"right_closure", ramsey::hjb::to_string(r.right_closure)},
          {"left_drift", r.left_drift},
          {"warnings", r.warnings}};
}

json estimate_json(const ramsey::sde::MCEstimate& e) {
  json j = {{"mean", e.mean},           {"std_error", e.std_error}, {"n_paths", e.n_paths},
            {"T", e.T},                 {"dt", e.dt},               {"tail_bound", e.tail_bound},
            {"seed", e.seed},           {"allowance", nullptr}};
  if (e.allowance)
    j["allowance"] = {{"delta", e.allowance->delta},
                      {"delta_se", e.allowance->delta_se},
                      {"n_paths", e.allowance->n_paths},
                      {"value", e.allowance->value()}};
  return j;
}

// Tabulated policy from a CSV with header columns named x and c.
ramsey::Policy policy_from_csv(const std::string& file, double bound) {
  std::ifstream in(file);
  if (!in) throw ramsey::DomainError("cannot open policy file " + file);
  std::string line;
  std::getline(in, line);
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string f;
    while (std::getline(ss, f, ',')) out.push_back(f);
    return out;
  };
  const auto header = split(line);
  const auto find = [&](const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw ramsey::DomainError("policy file " + file + " has no '" + name + "' column");
  };
  const std::size_t ix = find("x"), ic = find("c");
  std::vector<double> x, c;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != header.size()) throw ramsey::DomainError("ragged row in policy file " + file);
    try {
      x.push_back(std::stod(f[ix]));
      c.push_back(std::stod(f[ic]));
    } catch (const std::exception&) {
      throw ramsey::DomainError("non-numeric entry in policy file " + file);
    }
  }
  return ramsey::Policy::tabulated(std::move(x), std::move(c), bound);
}

ramsey::Policy resolve_policy(const RunConfig& cfg, std::optional<ramsey::hjb::SolveReport>& solved) {
  const std::string& s = cfg.mc.policy;
  if (s == "optimal") {
    const auto vf = ramsey::hjb::solve(cfg.params(), cfg.utility(), cfg.solver.bound, cfg.grid, cfg.solver_options());
    solved = vf.report;
    if (!vf.report.converged) throw ramsey::NumericalError("solver did not converge; no optimal policy to use");
    return ramsey::hjb::extract_policy(vf, cfg.params(), cfg.utility());
  }
  if (s.rfind("constant:", 0) == 0) {
    double c;
    try {
      std::size_t used = 0;
      c = std::stod(s.substr(9), &used);
      if (used != s.size() - 9) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ramsey::DomainError("policy '" + s + "' is not constant:<number>");
    }
    if (c > cfg.solver.bound) throw ramsey::DomainError("constant policy exceeds the bound");
    return ramsey::Policy::constant(c);
  }
  return policy_from_csv(s, cfg.solver.bound);
}

int cmd_solve(const RunConfig& cfg, unsigned) {
  const auto p = cfg.params();
  const auto u = cfg.utility();
  const auto vf = ramsey::hjb::solve(p, u, cfg.solver.bound, cfg.grid, cfg.solver_options());
  Run run("solve", cfg);
  {
    const auto pol = ramsey::hjb::extract_policy(vf, p, u);
    auto os = run.open(".csv");
    os << "x,v,dv_dx,d2v_dx2,c\n";
    for (std::size_t i = 0; i < vf.size(); ++i)
      os << fmt(vf.x[i]) << ',' << fmt(vf.v[i]) << ',' << fmt(vf.dv(i)) << ',' << fmt(vf.d2v(i)) << ','
         << fmt(pol.rates()[i]) << '\n';
  }
  const auto res = ramsey::hjb::residual(vf, p, u);
  run.finish({{"report", report_json(vf.report)},
              {"pde_residual", {{"max_abs", res.max_abs}, {"x_at_max", res.x_at_max}}}});
  return vf.report.converged ? 0 : 1;
}

int cmd_simulate(const RunConfig& cfg, unsigned threads) {
  const auto p = cfg.params();
  const auto u = cfg.utility();
  std::optional<ramsey::hjb::SolveReport> solved;
  const auto pol = resolve_policy(cfg, solved);
  ramsey::sde::SimulationOptions so{cfg.mc.export_paths, cfg.mc.seed, cfg.mc.record_every, threads};
  Run run("simulate", cfg);
  json body;
  ramsey::sde::PathBatch batch;
  if (cfg.mc.x0 == 0.0) {
    if (!pol.is_constant()) throw ramsey::DomainError("a start at x0 = 0 needs a constant policy");
    batch = ramsey::sde::simulate_entrance(p, *pol.constant_value(), cfg.mc.T, cfg.mc.dt, so);
    body["estimate"] = nullptr;
  } else {
    batch = ramsey::sde::simulate_feedback(p, pol, cfg.mc.x0, cfg.mc.T, cfg.mc.dt, so);
    ramsey::sde::MCOptions mo{cfg.mc.paths, cfg.mc.seed, threads, cfg.mc.allowance_paths};
    body["estimate"] = estimate_json(ramsey::sde::mc_value(p, u, pol, cfg.mc.x0, cfg.mc.T, cfg.mc.dt, mo));
  }
  {
    auto os = run.open("_paths.csv");
    ramsey::sde::write_csv(batch, os);
  }
  {
    auto os = run.open("_paths.bin", true);
    ramsey::sde::write_binary(batch, os);
  }
  body["scheme"] = batch.scheme;
  body["solve"] = solved ? report_json(*solved) : json(nullptr);
  run.finish(body);
  return 0;
}

int cmd_oracle(const RunConfig& cfg, unsigned) {
  namespace cf = ramsey::closedform;
  const auto p = cfg.params();
  const auto u = cfg.utility();
  const double g = cfg.model.gamma;
  const auto peak = ramsey::drift_peak(p);
  json j;
  j["mu"] = p.mu;
  j["eta"] = p.eta();
  j["drift_peak"] = {{"x_star", peak.x_star}, {"A", peak.A}};
  j["utility_surplus"] = ramsey::utility_surplus(u);
  j["phi0"] = ramsey::phi0_bound(p, u);
  j["marginal_asymptote"] = cf::marginal_asymptote(p, g);
  j["c_hat_at_infinity"] = cf::consumption_limit_at_infinity(p, g);
  j["tail_bound"] = cfg.mc.x0 > 0.0 ? json(ramsey::sde::tail_bound(p, u, cfg.mc.x0, cfg.mc.T)) : json(nullptr);
  const bool eq = std::abs(g - p.alpha) <= 1e-12 * p.alpha;
  std::optional<double> v0;
  if (eq) {
    const auto s = cf::gamma_eq_alpha_solution(p, u);
    v0 = cf::value_at_origin_gamma_eq_alpha(p, u);
    j["zeta"] = s.zeta;
    j["c_hat"] = s.c_hat;
    j["L_star"] = s.L_star;
    j["value_at_origin"] = *v0;
    j["value_at_x0"] = cfg.mc.x0 > 0.0 ? json(cf::value_gamma_eq_alpha(p, u, cfg.mc.x0)) : json(*v0);
  }
  const auto lim = cf::c_hat_limits(p, g, v0);
  j["c_hat_at_origin"] = {{"behavior", cf::to_string(lim.at_origin)},
                          {"value", lim.origin_value ? json(*lim.origin_value) : json(nullptr)}};
  if (std::isfinite(cfg.solver.bound)) {
    j["bounded_marginal_asymptote"] = cf::bounded_marginal_asymptote(p, g, cfg.solver.bound);
    if (eq) {
      const auto b = cf::bounded_constant_solution(p, u, cfg.solver.bound);
      j["bounded"] = {{"L", b.L},
                      {"zeta_L", b.zeta_L},
                      {"interior_candidate", b.interior_candidate},
                      {"corner_active", b.corner_active}};
    }
  }
  Run run("oracle", cfg);
  run.finish({{"constants", j}});
  return 0;
}

int cmd_feller(const RunConfig& cfg, unsigned) {
  namespace fl = ramsey::feller;
  const auto p = cfg.params();
  std::optional<ramsey::hjb::SolveReport> solved;
  const auto pol = resolve_policy(cfg, solved);
  Run run("feller", cfg);
  json verdicts = json::object();
  bool decided = true;
  for (auto side : {fl::Side::infinity, fl::Side::origin}) {
    const auto& levels =
        side == fl::Side::infinity ? cfg.experiments.infinity_levels : cfg.experiments.origin_levels;
    const auto v = fl::classify_boundary(p, pol, side, levels, cfg.experiments.ell);
    {
      auto os = run.open("_" + fl::to_string(side) + ".csv");
      fl::write_csv(v, os);
    }
    json e = {{"verdict", fl::to_string(v.verdict)}, {"log10_partial", v.log10_partial}, {"note", v.note}};
    e["delta_condition"] = v.delta_condition ? json(*v.delta_condition) : json(nullptr);
    verdicts[fl::to_string(side)] = e;
    if (v.verdict == fl::Verdict::inconclusive) decided = false;
  }
  run.finish({{"boundaries", verdicts}, {"solve", solved ? report_json(*solved) : json(nullptr)}});
  return decided ? 0 : 1;
}

int cmd_compare(const RunConfig& cfg, unsigned) {
  namespace ex = ramsey::experiments;
  if (cfg.experiments.Ls.empty()) throw ramsey::DomainError("compare needs experiments.Ls (or --Ls)");
  const auto p = cfg.params();
  const auto u = cfg.utility();
  const auto t = ex::compare_bounded(p, u, cfg.experiments.Ls, cfg.experiments.xs, cfg.grid, cfg.solver_options());
  Run run("compare", cfg);
  {
    auto os = run.open(".csv");
    os << "L,x,V_L,V,gap,tol_res,verdict,converged\n";
    for (std::size_t l = 0; l < t.Ls.size(); ++l)
      for (std::size_t i = 0; i < t.xs.size(); ++i)
        os << fmt(t.Ls[l]) << ',' << fmt(t.xs[i]) << ',' << fmt(t.values[l][i]) << ',' << fmt(t.unbounded[i]) << ','
           << fmt(t.gaps[l][i]) << ',' << fmt(t.tol_res[l]) << ',' << t.verdicts[l] << ','
           << (t.converged[l] ? 1 : 0) << '\n';
  }
  json body = {{"verdicts", t.verdicts},
               {"converged", t.converged},
               {"unbounded_converged", t.unbounded_converged},
               {"order_ok", t.order_ok},
               {"max_order_violation", t.max_order_violation},
               {"gaps_nonnegative", t.gaps_nonnegative},
               {"min_gap", t.min_gap}};
  if (cfg.experiments.clip_L) {
    std::vector<double> xs;  // empty: all interior nodes
    const auto c = ex::policy_clip_check(p, u, *cfg.experiments.clip_L, xs, cfg.grid, cfg.solver_options());
    auto os = run.open("_clip.csv");
    os << "x,c_L,c_clipped\n";
    for (std::size_t i = 0; i < c.xs.size(); ++i)
      os << fmt(c.xs[i]) << ',' << fmt(c.c_bounded[i]) << ',' << fmt(c.c_clipped[i]) << '\n';
    json cj = {{"L", c.L},
               {"max_deviation", c.max_deviation},
               {"x_at_max", c.x_at_max},
               {"combined_tol", c.combined_tol},
               {"verdict", c.verdict},
               {"note", c.note}};
    cj["interior_candidate"] = c.interior_candidate ? json(*c.interior_candidate) : json(nullptr);
    cj["L_star"] = c.L_star ? json(*c.L_star) : json(nullptr);
    body["clip"] = cj;
  }
  run.finish(body);
  bool ok = t.unbounded_converged && t.order_ok && t.gaps_nonnegative;
  for (bool c : t.converged) ok = ok && c;
  return ok ? 0 : 1;
}

int cmd_crosscheck(const RunConfig& cfg, unsigned threads) {
  namespace ex = ramsey::experiments;
  ex::CrossCheckConfig cc;
  cc.T = cfg.mc.T;
  cc.dt = cfg.mc.dt;
  cc.suboptimal_factor = cfg.experiments.suboptimal_factor;
  const std::size_t allowance = cfg.mc.allowance_paths > 0 ? cfg.mc.allowance_paths : std::max<std::size_t>(2, cfg.mc.paths / 10);
  cc.mc = {cfg.mc.paths, cfg.mc.seed, threads, allowance};
  const auto r = ex::mc_cross_check(cfg.params(), cfg.utility(), cfg.solver.bound, cfg.experiments.x0s, cc, cfg.grid,
                                    cfg.solver_options());
  Run run("crosscheck", cfg);
  json rows = json::array();
  {
    auto os = run.open(".csv");
    os << "x0,pde,mc,std_error,tail_bound,allowance,tolerance,matches,suboptimal_rate,suboptimal_mc,"
          "suboptimal_std_error,suboptimal_below\n";
    for (const auto& row : r.rows) {
      os << fmt(row.x0) << ',' << fmt(row.pde) << ',' << fmt(row.mc.mean) << ',' << fmt(row.mc.std_error) << ','
         << fmt(row.mc.tail_bound) << ',' << fmt(row.mc.allowance->value()) << ',' << fmt(row.tolerance) << ','
         << (row.matches ? 1 : 0) << ',' << fmt(row.suboptimal_rate) << ',' << fmt(row.suboptimal.mean) << ','
         << fmt(row.suboptimal.std_error) << ',' << (row.suboptimal_below ? 1 : 0) << '\n';
      rows.push_back({{"x0", row.x0},
                      {"pde", row.pde},
                      {"mc", estimate_json(row.mc)},
                      {"tolerance", row.tolerance},
                      {"matches", row.matches},
                      {"suboptimal_rate", row.suboptimal_rate},
                      {"suboptimal", estimate_json(row.suboptimal)},
                      {"suboptimal_below", row.suboptimal_below}});
    }
  }
  run.finish({{"rows", rows}, {"passed", r.passed()}, {"allowance_paths", allowance}, {"solve", report_json(r.solve)}});
  return r.passed() ? 0 : 1;
}

int fail(const std::string& kind, const std::string& message, int code) {
  std::cerr << json{{"error", {{"kind", kind}, {"message", message}}}}.dump() << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic Ramsey model: HJB solver, Monte Carlo and boundary tests"};
  app.require_subcommand(1);
  using Handler = int (*)(const RunConfig&, unsigned);
  const std::vector<std::tuple<const char*, const char*, Handler>> commands = {
      {"solve", "solve the HJB equation; writes x,v,dv_dx,d2v_dx2,c", cmd_solve},
      {"simulate", "simulate paths and estimate the value of a policy", cmd_simulate},
      {"oracle", "closed-form constants", cmd_oracle},
      {"feller", "Feller boundary classification", cmd_feller},
      {"compare", "bounded versus unbounded values and policy clipping", cmd_compare},
      {"crosscheck", "Monte Carlo versus PDE values", cmd_crosscheck}};
  Overrides o;
  for (const auto& [name, help, fn] : commands) add_options(app.add_subcommand(name, help), o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what(), 2);
  }

  try {
    const RunConfig cfg = resolve(o);
    for (const auto& [name, help, fn] : commands)
      if (app.got_subcommand(name)) return fn(cfg, thread_count(o.threads));
  } catch (const ramsey::DomainError& e) {
    return fail("validation", e.what(), 2);
  } catch (const ramsey::NumericalError& e) {
    return fail("numerical", e.what(), 1);
  } catch (const std::exception& e) {
    return fail("internal", e.what(), 1);
  }
  return 2;
}
