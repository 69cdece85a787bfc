// Solves the benchmark problem and prints the value and policy next to the
// closed form.

#include <cstdio>

#include "ramsey.hpp"

int main() {
  using namespace ramsey;
  const auto p = make_params_from_mu(0.5, 0.1, 0.2, 0.05);
  const auto u = Utility::power(0.5);

  const auto vf = hjb::solve(p, u, kInf, GridSpec{1e-3, 1e3, 2048});
  std::printf("converged=%d sweeps=%d residual=%.3g\n", vf.report.converged, vf.report.iterations,
              vf.report.residual);

  const auto policy = hjb::extract_policy(vf, p, u);
  std::printf("%8s %14s %14s %10s\n", "x", "V", "exact", "c(x)");
  for (double x : {0.01, 0.1, 1.0, 10.0, 100.0})
    std::printf("%8g %14.8f %14.8f %10.6f\n", x, vf.value_at(x), closedform::value_gamma_eq_alpha(p, u, x),
                policy(x));
  std::printf("L* = %.6f\n", closedform::corner_threshold(p, u));
}
