#pragma once

// Monte Carlo for the capital-per-capita process
//
//   dX = (X^alpha - mu X - c X) dt - sigma X dW.
//
// In Z = X^(1-alpha) the dynamics are linear, and with G_t = exp(a ∫(mu + c +
// sigma^2/2) ds + a sigma W_t), a = 1-alpha,
//
//   Z_t = (Z_0 + a ∫_0^t G_s ds) / G_t.
//
// With c frozen over a step, G advances by its exact log-increment and the
// ds-integral by the trapezoid rule, which gives the overflow-free recursion
//
//   Z_{k+1} = r_k Z_k + (r_k + 1) a dt / 2,   r_k = G_k / G_{k+1}.
//
// Z stays positive for Z_0 >= 0, and Z_0 = 0 gives the entrance solution.
//
// Paths run in groups of kLanes so the serial recursion vectorizes across
// paths. Every path draws from its own stream keyed by (seed, path), and all
// arithmetic for a path depends only on its index, so results do not depend
// on the thread count.

#include <Eigen/Core>
#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <istream>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "ramsey/errors.hpp"
#include "ramsey/io.hpp"
#include "ramsey/model.hpp"
#include "ramsey/policy.hpp"
#include "ramsey/rng.hpp"
#include "ramsey/vecmath.hpp"

namespace ramsey::sde {

struct TimeGrid {
  double T = 1.0;
  double dt = 1e-2;
  std::size_t steps = 100;

  static TimeGrid make(double T, double dt) {
    if (!(T > 0.0) || !std::isfinite(T)) throw DomainError("horizon T must be positive");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("step dt must be positive");
    const double n = std::round(T / dt);
    if (n < 1.0 || std::abs(n * dt - T) > 1e-9 * T)
      throw DomainError("T must be an integer multiple of dt");
    return {T, dt, static_cast<std::size_t>(n)};
  }

  double time(std::size_t k) const { return k == steps ? T : static_cast<double>(k) * dt; }
};

/// Open-loop consumption rate t -> c(t) >= 0, sampled at the left end of
/// each step.
class RateSchedule {
 public:
  static RateSchedule constant(double c) {
    if (!(c >= 0.0) || !std::isfinite(c))
      throw DomainError("consumption rate must be finite and nonnegative");
    RateSchedule s;
    s.constant_ = c;
    return s;
  }

  static RateSchedule function(std::function<double(double)> fn) {
    if (!fn) throw DomainError("empty consumption schedule");
    RateSchedule s;
    s.fn_ = std::move(fn);
    return s;
  }

  std::optional<double> constant_value() const { return constant_; }

  double at(double t) const {
    const double c = constant_ ? *constant_ : fn_(t);
    if (!std::isfinite(c)) throw DomainError("non-finite consumption sample at t = " + io::format_double(t));
    if (c < 0.0) throw DomainError("negative consumption sample at t = " + io::format_double(t));
    return c;
  }

 private:
  std::optional<double> constant_;
  std::function<double(double)> fn_;
};

struct SimulationOptions {
  std::size_t n_paths = 1000;
  std::uint64_t seed = 0;
  std::size_t record_every = 1;  // keep every k-th node; must divide the step count
  unsigned threads = 1;
};

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct PathBatch {
  std::vector<double> times;
  RowMatrix states;        // one row per path
  RowMatrix consumptions;  // rate applied from each recorded node on
  std::uint64_t seed = 0;
  double dt = 0.0;
  double x0 = 0.0;
  std::string scheme;
  bool entrance = false;  // nontrivial solution started at x = 0
  bool trivial = false;   // the solution X = 0

  std::size_t n_paths() const { return static_cast<std::size_t>(states.rows()); }
  std::size_t n_times() const { return times.size(); }
};

struct Allowance {
  double delta = 0.0;      // mean of (fine - coarse) over the paired paths
  double delta_se = 0.0;   // its standard error
  std::size_t n_paths = 0;
  double value() const { return std::abs(delta) + 3.0 * delta_se; }
};

struct MCEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n_paths = 0;
  double T = 0.0;
  double dt = 0.0;
  double tail_bound = 0.0;
  std::uint64_t seed = 0;
  std::optional<Allowance> allowance;
};

struct MCOptions {
  std::size_t n_paths = 10000;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::size_t allowance_paths = 0;  // paths rerun at 2 dt for the discretization allowance; 0 skips it
};

/// e^{-beta T} (2^{eta-1}(x + T^eta) + phi0): bound on the discounted utility
/// beyond the horizon.
inline double tail_bound(const ModelParams& p, const Utility& u, double x0, double T) {
  const double eta = p.eta();
  return std::exp(-p.beta * T) * (std::pow(2.0, eta - 1.0) * (x0 + std::pow(T, eta)) + phi0_bound(p, u));
}

namespace detail {

inline constexpr std::size_t kLanes = 8;
inline constexpr std::size_t kChunk = 256;

enum class Noise { fine, paired };  // paired: each step uses (xi_1 + xi_2)/sqrt 2

struct Coeffs {
  double a, h, base, vol, dt, eta;
};

inline Coeffs make_coeffs(const ModelParams& p, double dt) {
  const double a = 1.0 - p.alpha;
  return {a, 0.5 * a * dt, a * (p.mu + 0.5 * p.sigma * p.sigma) * dt, a * p.sigma * std::sqrt(dt), dt,
          p.eta()};
}

inline void draw(NormalStream& s, double* out, std::size_t n, Noise mode) {
  if (mode == Noise::fine) {
    s.fill(out, n);
    return;
  }
  constexpr double kInvSqrt2 = 0.70710678118654752440;
  for (std::size_t j = 0; j < n; ++j) {
    const double a = s.next();
    const double b = s.next();
    out[j] = (a + b) * kInvSqrt2;
  }
}

struct Buffers {
  alignas(64) std::array<double, kChunk * kLanes> noise;  // [lane][j]
  alignas(64) std::array<double, kChunk * kLanes> r;      // [j][lane]
  alignas(64) std::array<double, kChunk * kLanes> q;
  alignas(64) std::array<double, kChunk * kLanes> z;
  alignas(64) std::array<double, kChunk * kLanes> c;
};

/// Sink interface:
///   begin_group(first_path, lanes)
///   nodes(first_path, lanes, k0, len, z, c)   z[j*kLanes + l] is Z at node k0+j
///   end_group(first_path, lanes)
template <class Sink>
void run_open_loop(const Coeffs& cf, std::span<const double> rate, double z0, std::size_t steps,
                   std::uint64_t seed, std::size_t path_begin, std::size_t path_end, Noise mode,
                   Sink& sink) {
  auto buf = std::make_unique<Buffers>();
  for (std::size_t g = path_begin; g < path_end; g += kLanes) {
    const std::size_t lanes = std::min(kLanes, path_end - g);
    std::vector<NormalStream> streams;
    streams.reserve(lanes);
    for (std::size_t l = 0; l < lanes; ++l) streams.emplace_back(path_stream(seed, g + l));
    alignas(64) double z[kLanes];
    std::fill(z, z + kLanes, z0);
    sink.begin_group(g, lanes);
    for (std::size_t k0 = 0; k0 <= steps; k0 += kChunk) {
      const std::size_t len = std::min(kChunk, steps + 1 - k0);
      const std::size_t nstep = k0 + len - 1 < steps ? len : len - 1;
      buf->noise.fill(0.0);
      for (std::size_t l = 0; l < lanes; ++l) draw(streams[l], buf->noise.data() + l * kChunk, nstep, mode);
      for (std::size_t j = 0; j < kChunk; ++j) {
        const double drift = j < nstep ? cf.base + cf.a * rate[k0 + j] * cf.dt : 0.0;
        for (std::size_t l = 0; l < kLanes; ++l)
          buf->r[j * kLanes + l] = -drift - cf.vol * buf->noise[l * kChunk + j];
      }
      vecmath::exp_inplace(buf->r.data(), kChunk * kLanes);
      for (std::size_t i = 0; i < kChunk * kLanes; ++i) buf->q[i] = (buf->r[i] + 1.0) * cf.h;
      for (std::size_t j = 0; j < len; ++j) {
        double* zj = buf->z.data() + j * kLanes;
        double* cj = buf->c.data() + j * kLanes;
        const double* rj = buf->r.data() + j * kLanes;
        const double* qj = buf->q.data() + j * kLanes;
        const double ck = rate[k0 + j];
        for (std::size_t l = 0; l < kLanes; ++l) {
          zj[l] = z[l];
          cj[l] = ck;
        }
        if (j < nstep)
          for (std::size_t l = 0; l < kLanes; ++l) z[l] = rj[l] * z[l] + qj[l];
      }
      sink.nodes(g, lanes, k0, len, buf->z.data(), buf->c.data());
    }
    sink.end_group(g, lanes);
  }
}

template <class Sink>
void run_feedback(const Coeffs& cf, const Policy& policy, double z0, std::size_t steps,
                  std::uint64_t seed, std::size_t path_begin, std::size_t path_end, Noise mode,
                  Sink& sink) {
  auto buf = std::make_unique<Buffers>();
  for (std::size_t g = path_begin; g < path_end; g += kLanes) {
    const std::size_t lanes = std::min(kLanes, path_end - g);
    std::vector<NormalStream> streams;
    streams.reserve(lanes);
    for (std::size_t l = 0; l < lanes; ++l) streams.emplace_back(path_stream(seed, g + l));
    double z[kLanes];
    std::fill(z, z + kLanes, z0);
    sink.begin_group(g, lanes);
    for (std::size_t k0 = 0; k0 <= steps; k0 += kChunk) {
      const std::size_t len = std::min(kChunk, steps + 1 - k0);
      const std::size_t nstep = k0 + len - 1 < steps ? len : len - 1;
      buf->noise.fill(0.0);
      for (std::size_t l = 0; l < lanes; ++l) draw(streams[l], buf->noise.data() + l * kChunk, nstep, mode);
      for (std::size_t j = 0; j < kChunk; ++j)
        for (std::size_t l = 0; l < kLanes; ++l)
          buf->r[j * kLanes + l] = -cf.base - cf.vol * buf->noise[l * kChunk + j];
      vecmath::exp_inplace(buf->r.data(), kChunk * kLanes);
      for (std::size_t j = 0; j < len; ++j) {
        for (std::size_t l = 0; l < lanes; ++l) {
          const double zl = z[l];
          const double c = policy.at_log(cf.eta * std::log(zl));
          if (!std::isfinite(c) || c < 0.0)
            throw NumericalError("policy returned an invalid rate at x = " +
                                 io::format_double(std::pow(zl, cf.eta)));
          buf->z[j * kLanes + l] = zl;
          buf->c[j * kLanes + l] = c;
          if (j < nstep) {
            const double rr = buf->r[j * kLanes + l] * std::exp(-cf.a * c * cf.dt);
            z[l] = rr * zl + (rr + 1.0) * cf.h;
          }
        }
      }
      sink.nodes(g, lanes, k0, len, buf->z.data(), buf->c.data());
    }
    sink.end_group(g, lanes);
  }
}

/// Splits [0, n) into contiguous lane-aligned ranges and calls work(begin, end)
/// once per range, one thread each.
template <class Work>
void parallel_paths(std::size_t n, unsigned threads, Work work) {
  const std::size_t groups = (n + kLanes - 1) / kLanes;
  const std::size_t t = std::max<std::size_t>(1, std::min<std::size_t>(threads, groups));
  if (t == 1) {
    work(std::size_t{0}, n);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(t);
  for (std::size_t i = 0; i < t; ++i) {
    const std::size_t b = std::min(n, (groups * i / t) * kLanes);
    const std::size_t e = std::min(n, (groups * (i + 1) / t) * kLanes);
    pool.emplace_back([&, i, b, e] {
      try {
        work(b, e);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& err : errors)
    if (err) std::rethrow_exception(err);
}

struct RecordSink {
  PathBatch& batch;
  std::size_t every;
  double eta;

  void begin_group(std::size_t, std::size_t) {}
  void end_group(std::size_t, std::size_t) {}

  void nodes(std::size_t g, std::size_t lanes, std::size_t k0, std::size_t len, const double* z,
             const double* c) {
    for (std::size_t j = 0; j < len; ++j) {
      const std::size_t k = k0 + j;
      if (k % every != 0) continue;
      const auto col = static_cast<Eigen::Index>(k / every);
      for (std::size_t l = 0; l < lanes; ++l) {
        const auto row = static_cast<Eigen::Index>(g + l);
        const double zz = z[j * kLanes + l];
        batch.states(row, col) = zz > 0.0 ? std::pow(zz, eta) : 0.0;
        batch.consumptions(row, col) = c[j * kLanes + l];
      }
    }
  }
};

/// Accumulates sum_k w_k U(c_k X_k) per path.
struct ValueSink {
  std::span<const double> weight;  // trapezoid weight * dt * exp(-beta t_k)
  const Utility& u;
  double eta;
  std::vector<double>& out;
  alignas(64) double acc[kLanes] = {};
  alignas(64) std::array<double, kChunk * kLanes> val{};

  void begin_group(std::size_t, std::size_t) { std::fill(acc, acc + kLanes, 0.0); }

  void end_group(std::size_t g, std::size_t lanes) {
    for (std::size_t l = 0; l < lanes; ++l) out[g + l] = acc[l];
  }

  void nodes(std::size_t, std::size_t, std::size_t k0, std::size_t len, const double* z,
             const double* c) {
    const std::size_t n = len * kLanes;
    if (auto gamma = u.gamma()) {
      // U(c X) = exp((1-gamma) log c + theta log Z) / (1-gamma), theta = (1-gamma)/(1-alpha)
      const double g1 = 1.0 - *gamma;
      const double theta = g1 * eta;
      for (std::size_t i = 0; i < n; ++i)
        val[i] = c[i] > 0.0 && z[i] > 0.0 ? g1 * std::log(c[i]) + theta * std::log(z[i]) : 0.0;
      vecmath::exp_inplace(val.data(), n);
      for (std::size_t i = 0; i < n; ++i) val[i] = c[i] > 0.0 && z[i] > 0.0 ? val[i] / g1 : 0.0;
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        const double x = z[i] > 0.0 ? std::pow(z[i], eta) : 0.0;
        val[i] = u.value(c[i] * x);
      }
    }
    for (std::size_t j = 0; j < len; ++j) {
      const double w = weight[k0 + j];
      for (std::size_t l = 0; l < kLanes; ++l) acc[l] += w * val[j * kLanes + l];
    }
  }
};

/// Open-loop value sink for power utility with gamma == alpha, where
/// U(c X) = c^(1-alpha) Z / (1-alpha) is linear in Z.
struct LinearValueSink {
  std::span<const double> weight;  // includes c_k^(1-alpha)/(1-alpha)
  std::vector<double>& out;
  alignas(64) double acc[kLanes] = {};

  void begin_group(std::size_t, std::size_t) { std::fill(acc, acc + kLanes, 0.0); }
  void end_group(std::size_t g, std::size_t lanes) {
    for (std::size_t l = 0; l < lanes; ++l) out[g + l] = acc[l];
  }
  void nodes(std::size_t, std::size_t, std::size_t k0, std::size_t len, const double* z,
             const double*) {
    for (std::size_t j = 0; j < len; ++j) {
      const double w = weight[k0 + j];
      for (std::size_t l = 0; l < kLanes; ++l) acc[l] += w * z[j * kLanes + l];
    }
  }
};

inline std::vector<double> sample_rates(const RateSchedule& s, const TimeGrid& tg) {
  std::vector<double> r(tg.steps + 1);
  for (std::size_t k = 0; k <= tg.steps; ++k) r[k] = s.at(tg.time(k));
  return r;
}

inline std::vector<double> discount_weights(double beta, const TimeGrid& tg) {
  std::vector<double> w(tg.steps + 1);
  for (std::size_t k = 0; k <= tg.steps; ++k) w[k] = tg.dt * std::exp(-beta * tg.time(k));
  w.front() *= 0.5;
  w.back() *= 0.5;
  return w;
}

inline PathBatch empty_batch(const TimeGrid& tg, const SimulationOptions& opt, double x0,
                             std::string scheme) {
  if (opt.n_paths == 0) throw DomainError("n_paths must be positive");
  if (opt.record_every == 0 || tg.steps % opt.record_every != 0)
    throw DomainError("record_every must divide the number of steps");
  PathBatch b;
  const std::size_t nt = tg.steps / opt.record_every + 1;
  b.times.resize(nt);
  for (std::size_t j = 0; j < nt; ++j) b.times[j] = tg.time(j * opt.record_every);
  b.states.resize(static_cast<Eigen::Index>(opt.n_paths), static_cast<Eigen::Index>(nt));
  b.consumptions.resize(static_cast<Eigen::Index>(opt.n_paths), static_cast<Eigen::Index>(nt));
  b.seed = opt.seed;
  b.dt = tg.dt;
  b.x0 = x0;
  b.scheme = std::move(scheme);
  return b;
}

inline PathBatch simulate_open_loop(const ModelParams& p, const RateSchedule& rate, double x0,
                                    double T, double dt, const SimulationOptions& opt) {
  const TimeGrid tg = TimeGrid::make(T, dt);
  PathBatch b = empty_batch(tg, opt, x0, "exact-G/trapezoid/open-loop");
  const auto rates = sample_rates(rate, tg);
  const Coeffs cf = make_coeffs(p, dt);
  const double z0 = x0 > 0.0 ? std::pow(x0, 1.0 - p.alpha) : 0.0;
  parallel_paths(opt.n_paths, opt.threads, [&](std::size_t begin, std::size_t end) {
    RecordSink sink{b, opt.record_every, cf.eta};
    run_open_loop(cf, rates, z0, tg.steps, opt.seed, begin, end, Noise::fine, sink);
  });
  b.states.col(0).setConstant(x0);
  return b;
}

}  // namespace detail

inline PathBatch simulate_given_consumption(const ModelParams& p, const RateSchedule& rate,
                                            double x0, double T, double dt,
                                            const SimulationOptions& opt) {
  if (!(x0 > 0.0) || !std::isfinite(x0)) throw DomainError("initial state x0 must be positive");
  return detail::simulate_open_loop(p, rate, x0, T, dt, opt);
}

inline PathBatch simulate_feedback(const ModelParams& p, const Policy& policy, double x0, double T,
                                   double dt, const SimulationOptions& opt) {
  if (!(x0 > 0.0) || !std::isfinite(x0)) throw DomainError("initial state x0 must be positive");
  if (auto c = policy.constant_value())
    return detail::simulate_open_loop(p, RateSchedule::constant(*c), x0, T, dt, opt);
  const TimeGrid tg = TimeGrid::make(T, dt);
  PathBatch b = detail::empty_batch(tg, opt, x0, "exact-G/trapezoid/frozen-feedback");
  const detail::Coeffs cf = detail::make_coeffs(p, dt);
  const double z0 = std::pow(x0, 1.0 - p.alpha);
  detail::parallel_paths(opt.n_paths, opt.threads, [&](std::size_t begin, std::size_t end) {
    detail::RecordSink sink{b, opt.record_every, cf.eta};
    detail::run_feedback(cf, policy, z0, tg.steps, opt.seed, begin, end, detail::Noise::fine, sink);
  });
  b.states.col(0).setConstant(x0);
  return b;
}

/// Nontrivial solution started at the origin with constant consumption.
inline PathBatch simulate_entrance(const ModelParams& p, double c, double T, double dt,
                                   const SimulationOptions& opt) {
  PathBatch b = detail::simulate_open_loop(p, RateSchedule::constant(c), 0.0, T, dt, opt);
  b.entrance = true;
  b.scheme = "exact-G/trapezoid/entrance";
  return b;
}

/// The other solution from the origin: X = 0 for all t.
inline PathBatch trivial_entrance_batch(double c, double T, double dt, const SimulationOptions& opt) {
  const TimeGrid tg = TimeGrid::make(T, dt);
  PathBatch b = detail::empty_batch(tg, opt, 0.0, "trivial");
  b.states.setZero();
  b.consumptions.setConstant(RateSchedule::constant(c).at(0.0));
  b.trivial = true;
  return b;
}

namespace detail {

// Per-path discounted utility under a policy (or schedule) at step dt_eff.
inline std::vector<double> path_values(const ModelParams& p, const Utility& u,
                                       const std::optional<RateSchedule>& schedule,
                                       const Policy* policy, double x0, const TimeGrid& tg,
                                       std::size_t n_paths, std::uint64_t seed, unsigned threads,
                                       Noise mode) {
  const Coeffs cf = make_coeffs(p, tg.dt);
  const double z0 = std::pow(x0, 1.0 - p.alpha);
  const auto weight = discount_weights(p.beta, tg);
  std::vector<double> out(n_paths);
  if (schedule) {
    const auto rates = sample_rates(*schedule, tg);
    const auto g = u.gamma();
    if (g && std::abs(*g - p.alpha) <= 1e-12 * p.alpha) {
      std::vector<double> w(weight.size());
      for (std::size_t k = 0; k < w.size(); ++k)
        w[k] = rates[k] > 0.0 ? weight[k] * std::pow(rates[k], 1.0 - *g) / (1.0 - *g) : 0.0;
      parallel_paths(n_paths, threads, [&](std::size_t b, std::size_t e) {
        LinearValueSink sink{w, out};
        run_open_loop(cf, rates, z0, tg.steps, seed, b, e, mode, sink);
      });
    } else {
      parallel_paths(n_paths, threads, [&](std::size_t b, std::size_t e) {
        ValueSink sink{weight, u, cf.eta, out};
        run_open_loop(cf, rates, z0, tg.steps, seed, b, e, mode, sink);
      });
    }
  } else {
    parallel_paths(n_paths, threads, [&](std::size_t b, std::size_t e) {
      ValueSink sink{weight, u, cf.eta, out};
      run_feedback(cf, *policy, z0, tg.steps, seed, b, e, mode, sink);
    });
  }
  return out;
}

inline std::pair<double, double> mean_and_se(std::span<const double> v) {
  const double n = static_cast<double>(v.size());
  double m = 0.0;
  for (double a : v) m += a;
  m /= n;
  if (v.size() < 2) return {m, 0.0};
  double ss = 0.0;
  for (double a : v) ss += (a - m) * (a - m);
  return {m, std::sqrt(ss / (n - 1.0) / n)};
}

inline MCEstimate mc_value_impl(const ModelParams& p, const Utility& u,
                                const std::optional<RateSchedule>& schedule, const Policy* policy,
                                double x0, double T, double dt, const MCOptions& opt) {
  if (!(x0 > 0.0) || !std::isfinite(x0)) throw DomainError("initial state x0 must be positive");
  if (opt.n_paths == 0) throw DomainError("n_paths must be positive");
  const TimeGrid tg = TimeGrid::make(T, dt);
  const auto values = path_values(p, u, schedule, policy, x0, tg, opt.n_paths, opt.seed, opt.threads,
                                  Noise::fine);
  MCEstimate est;
  std::tie(est.mean, est.std_error) = mean_and_se(values);
  est.n_paths = opt.n_paths;
  est.T = T;
  est.dt = dt;
  est.seed = opt.seed;
  est.tail_bound = tail_bound(p, u, x0, T);
  if (opt.allowance_paths > 0) {
    if (tg.steps % 2 != 0) throw DomainError("the allowance run needs an even step count");
    const std::size_t m = std::min(opt.allowance_paths, opt.n_paths);
    const TimeGrid coarse{T, 2.0 * dt, tg.steps / 2};
    const auto cv = path_values(p, u, schedule, policy, x0, coarse, m, opt.seed, opt.threads,
                                Noise::paired);
    std::vector<double> d(m);
    for (std::size_t i = 0; i < m; ++i) d[i] = values[i] - cv[i];
    Allowance a;
    std::tie(a.delta, a.delta_se) = mean_and_se(d);
    a.n_paths = m;
    est.allowance = a;
  }
  return est;
}

}  // namespace detail

/// E[∫_0^T e^{-beta t} U(c_t X_t) dt] under a feedback policy, trapezoid in
/// time along each path. A constant policy takes the open-loop path and
/// reproduces simulate_given_consumption exactly.
inline MCEstimate mc_value(const ModelParams& p, const Utility& u, const Policy& policy, double x0,
                           double T, double dt, const MCOptions& opt) {
  if (auto c = policy.constant_value())
    return detail::mc_value_impl(p, u, RateSchedule::constant(*c), nullptr, x0, T, dt, opt);
  return detail::mc_value_impl(p, u, std::nullopt, &policy, x0, T, dt, opt);
}

inline MCEstimate mc_value(const ModelParams& p, const Utility& u, const RateSchedule& rate,
                           double x0, double T, double dt, const MCOptions& opt) {
  return detail::mc_value_impl(p, u, rate, nullptr, x0, T, dt, opt);
}

// ---------------------------------------------------------------------------
// Audits

struct MomentRow {
  double t = 0.0;
  double mean1 = 0.0, se1 = 0.0, bound1 = 0.0;
  double mean2 = 0.0, se2 = 0.0, bound2 = 0.0;
  bool ok1() const { return mean1 <= bound1 + 3.0 * se1; }
  bool ok2() const { return mean2 <= bound2 + 3.0 * se2; }
  double margin1() const { return bound1 + 3.0 * se1 - mean1; }
  double margin2() const { return bound2 + 3.0 * se2 - mean2; }
};

struct MomentReport {
  std::vector<MomentRow> rows;
  double min_state = INFINITY;  // over all nodes after t = 0
  bool positive = true;
  bool passed() const {
    if (!positive) return false;
    for (const auto& r : rows)
      if (!r.ok1() || !r.ok2()) return false;
    return true;
  }
};

/// E[X_t] <= 2^{eta-1}(x + t^eta),
/// E[X_t^2] <= 2^{2 eta-1} e^{sigma^2 t}(x^2 + t^{2 eta-1}/sigma^2).
inline double first_moment_bound(const ModelParams& p, double x, double t) {
  const double eta = p.eta();
  return std::pow(2.0, eta - 1.0) * (x + std::pow(t, eta));
}

inline double second_moment_bound(const ModelParams& p, double x, double t) {
  const double eta = p.eta(), s2 = p.sigma * p.sigma;
  return std::pow(2.0, 2.0 * eta - 1.0) * std::exp(s2 * t) * (x * x + std::pow(t, 2.0 * eta - 1.0) / s2);
}

inline MomentReport check_moment_bounds(const PathBatch& b, const ModelParams& p) {
  MomentReport rep;
  const auto n = b.states.rows();
  for (std::size_t j = 0; j < b.n_times(); ++j) {
    const auto col = static_cast<Eigen::Index>(j);
    std::vector<double> x(static_cast<std::size_t>(n)), x2(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
      const double v = b.states(i, col);
      x[static_cast<std::size_t>(i)] = v;
      x2[static_cast<std::size_t>(i)] = v * v;
      if (j > 0 || b.x0 > 0.0) {
        rep.min_state = std::min(rep.min_state, v);
        if (!(v > 0.0)) rep.positive = false;
      }
    }
    MomentRow r;
    r.t = b.times[j];
    std::tie(r.mean1, r.se1) = detail::mean_and_se(x);
    std::tie(r.mean2, r.se2) = detail::mean_and_se(x2);
    r.bound1 = first_moment_bound(p, b.x0, r.t);
    r.bound2 = second_moment_bound(p, b.x0, r.t);
    rep.rows.push_back(r);
  }
  return rep;
}

/// C_eps = 2^{eta^2} ((eta-1)/eps)^{eta-1}.
inline double continuity_constant(const ModelParams& p, double eps) {
  const double eta = p.eta();
  return std::pow(2.0, eta * eta) * std::pow((eta - 1.0) / eps, eta - 1.0);
}

struct ContinuityReport {
  double t = 0.0;
  double mean_abs_diff = 0.0;
  double std_error = 0.0;
  double bound = 0.0;
  bool passed() const { return mean_abs_diff <= bound; }
};

/// Mean |X^x_t - X^y_t| for two starting points driven by the same noise,
/// against C_eps |x - y| + eps (x + y + t^eta).
inline ContinuityReport check_continuity(const ModelParams& p, const RateSchedule& rate, double x,
                                         double y, double t, double dt, SimulationOptions opt,
                                         double eps = 0.1) {
  const TimeGrid tg = TimeGrid::make(t, dt);
  opt.record_every = tg.steps;
  const PathBatch bx = simulate_given_consumption(p, rate, x, t, dt, opt);
  const PathBatch by = simulate_given_consumption(p, rate, y, t, dt, opt);
  std::vector<double> d(bx.n_paths());
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    d[i] = std::abs(bx.states(row, 1) - by.states(row, 1));
  }
  ContinuityReport r;
  r.t = t;
  std::tie(r.mean_abs_diff, r.std_error) = detail::mean_and_se(d);
  r.bound = continuity_constant(p, eps) * std::abs(x - y) + eps * (x + y + std::pow(t, p.eta()));
  return r;
}

// ---------------------------------------------------------------------------
// Export

/// CSV with header path,t,x,c and one row per (path, recorded time).
inline void write_csv(const PathBatch& b, std::ostream& os) {
  os << "path,t,x,c\n";
  for (std::size_t i = 0; i < b.n_paths(); ++i)
    for (std::size_t j = 0; j < b.n_times(); ++j) {
      const auto r = static_cast<Eigen::Index>(i), c = static_cast<Eigen::Index>(j);
      os << i << ',' << io::format_double(b.times[j]) << ',' << io::format_double(b.states(r, c))
         << ',' << io::format_double(b.consumptions(r, c)) << '\n';
    }
}

inline constexpr char kBinaryMagic[8] = {'R', 'A', 'M', 'S', 'E', 'Y', 'P', 'B'};
inline constexpr std::uint32_t kBinaryVersion = 1;

/// Little-endian layout: magic[8], u32 version, u32 flags (bit 0 entrance,
/// bit 1 trivial), u64 n_paths, u64 n_times, u64 seed, f64 dt, f64 x0,
/// f64 times[n_times], f64 states[n_paths][n_times], f64 consumptions[n_paths][n_times].
inline void write_binary(const PathBatch& b, std::ostream& os) {
  os.write(kBinaryMagic, sizeof kBinaryMagic);
  io::write_raw(os, kBinaryVersion);
  const std::uint32_t flags = (b.entrance ? 1u : 0u) | (b.trivial ? 2u : 0u);
  io::write_raw(os, flags);
  io::write_raw(os, static_cast<std::uint64_t>(b.n_paths()));
  io::write_raw(os, static_cast<std::uint64_t>(b.n_times()));
  io::write_raw(os, b.seed);
  io::write_raw(os, b.dt);
  io::write_raw(os, b.x0);
  os.write(reinterpret_cast<const char*>(b.times.data()),
           static_cast<std::streamsize>(b.times.size() * sizeof(double)));
  os.write(reinterpret_cast<const char*>(b.states.data()),
           static_cast<std::streamsize>(b.states.size() * sizeof(double)));
  os.write(reinterpret_cast<const char*>(b.consumptions.data()),
           static_cast<std::streamsize>(b.consumptions.size() * sizeof(double)));
}

inline PathBatch read_binary(std::istream& is) {
  char magic[8];
  is.read(magic, sizeof magic);
  if (!is || !std::equal(magic, magic + 8, kBinaryMagic)) throw DomainError("not a path batch file");
  if (io::read_raw<std::uint32_t>(is) != kBinaryVersion) throw DomainError("unsupported batch version");
  const auto flags = io::read_raw<std::uint32_t>(is);
  const auto np = io::read_raw<std::uint64_t>(is);
  const auto nt = io::read_raw<std::uint64_t>(is);
  PathBatch b;
  b.seed = io::read_raw<std::uint64_t>(is);
  b.dt = io::read_raw<double>(is);
  b.x0 = io::read_raw<double>(is);
  b.entrance = flags & 1u;
  b.trivial = flags & 2u;
  b.times.resize(nt);
  b.states.resize(static_cast<Eigen::Index>(np), static_cast<Eigen::Index>(nt));
  b.consumptions.resize(static_cast<Eigen::Index>(np), static_cast<Eigen::Index>(nt));
  is.read(reinterpret_cast<char*>(b.times.data()), static_cast<std::streamsize>(nt * sizeof(double)));
  is.read(reinterpret_cast<char*>(b.states.data()),
          static_cast<std::streamsize>(np * nt * sizeof(double)));
  is.read(reinterpret_cast<char*>(b.consumptions.data()),
          static_cast<std::streamsize>(np * nt * sizeof(double)));
  if (!is) throw DomainError("truncated path batch file");
  return b;
}

}  // namespace ramsey::sde
