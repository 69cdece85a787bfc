// Monte Carlo value of a feedback policy from the PDE, with the
// discretization allowance from a paired coarse run.

#include <cstdio>

#include "ramsey.hpp"

int main() {
  using namespace ramsey;
  const auto p = make_params_from_mu(0.3, 0.1, 0.2, 0.05);
  const auto u = Utility::power(0.7);

  const auto vf = hjb::solve(p, u, kInf, GridSpec{1e-3, 1e6, 2048});
  const auto policy = hjb::extract_policy(vf, p, u);

  for (double x0 : {0.5, 1.0, 2.0}) {
    const auto e = sde::mc_value(p, u, policy, x0, 300.0, 0.02, {4000, 7, 0, 400});
    std::printf("x0=%-4g pde=%.5f mc=%.5f se=%.2g allowance=%.2g tail=%.2g\n", x0, vf.value_at(x0), e.mean,
                e.std_error, e.allowance->value(), e.tail_bound);
  }
}
