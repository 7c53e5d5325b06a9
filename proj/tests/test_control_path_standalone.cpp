// Compile-level guarantee that the control path is self-contained: this
// translation unit includes only the boundary-data headers (signals, NtD
// kernel, operator algebra, solvers) and must build and run without the
// forward solver or the medium model. The solves below run on a synthetic
// kernel, exactly as a physical measurement device would provide it.
#include "wavefocus/boundary_ops.hpp"
#include "wavefocus/control_solve.hpp"
#include "wavefocus/ntd.hpp"
#include "wavefocus/rng.hpp"
#include "wavefocus/time_signal.hpp"

#include <cstdio>
#include <cstdlib>

using namespace wavefocus;

int main() {
  const int n = 1 << 5;
  const double t_final = 2.0;
  TimeSignal kernel(n, t_final);
  const double h = kernel.h();
  kernel[1] = -0.5 * h;
  for (int j = 2; j < kernel.size(); ++j) kernel[j] = -h;
  const NtdOperator ntd{std::move(kernel)};

  const SolveReport hr = solve_h(ntd, 0.5, 1e-3);
  if (!hr.converged || !hr.norm_bound_ok) {
    std::fprintf(stderr, "control-path solve_h failed\n");
    return 1;
  }
  const SolveReport ar = solve_a(ntd, hr.solution, 0.5, 1.02e-4);
  if (ar.solution.size() != 2 * n + 1) {
    std::fprintf(stderr, "control-path solve_a failed\n");
    return 1;
  }
  const double vol = -inner_v(d_dt_discrete(ar.solution),
                              phi_t_signal(n, t_final));
  if (!std::isfinite(vol)) {
    std::fprintf(stderr, "control-path functional failed\n");
    return 1;
  }
  std::puts("control path standalone: ok");
  return 0;
}
