#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "wavefocus/control_solve.hpp"  // ConfigurationError
#include "wavefocus/medium.hpp"
#include "wavefocus/ntd.hpp"
#include "wavefocus/time_signal.hpp"

namespace wavefocus {

/// Space-time grid of the forward solver. The spatial domain [0, x_max] is the
/// truncated half-line; horizon is the full data window 2T.
struct SolverGrid {
  int n_x = 1 << 13;
  int n_t = 1 << 15;
  double x_max = 3.08;
  double horizon = 4.0;      // 2T
  double cfl_factor = 0.5;   // required: c_max * dt / dx <= cfl_factor

  double dx() const { return x_max / n_x; }
  double dt() const { return horizon / n_t; }
  double final_time() const { return 0.5 * horizon; }
};

/// Reference resolution: 2^13 spatial and 2^15 temporal cells over [0, 2T],
/// truncation at x_max = 1.1 * c1 * T so far-end reflections cannot reach the
/// boundary within the data window.
inline SolverGrid reference_grid(double final_time = 2.0, double c1 = 1.4) {
  SolverGrid g;
  g.x_max = 1.1 * c1 * final_time;
  g.horizon = 2.0 * final_time;
  return g;
}

/// Spatial samples of (u(., t), u_t(., t)) at a fixed time. Used only by the
/// verification oracles; the control algorithm never reads these.
struct FieldSnapshot {
  double time = 0.0;
  double x_max = 0.0;
  std::vector<double> u;
  std::vector<double> ut;

  double dx() const { return x_max / (static_cast<double>(u.size()) - 1.0); }
};

struct ForwardResult {
  TimeSignal trace;  // u(0, .) resampled onto the signal node grid
  std::vector<FieldSnapshot> snapshots;
};

/// Second-order leapfrog for u_tt = c^2 u_xx on [0, x_max] with the Neumann
/// condition du/dx(0,t) = f(t) enforced by the ghost node u_{-1} = u_1 - 2 dx f,
/// homogeneous Dirichlet at the truncated far end, zero initial data.
/// Snapshot time derivatives are centered differences of adjacent levels.
inline ForwardResult solve_neumann(const MediumProfile& profile, const TimeSignal& f,
                                   const SolverGrid& grid,
                                   const std::vector<double>& snapshot_times = {}) {
  const double dx = grid.dx();
  const double dt = grid.dt();
  if (profile.max_speed() * dt / dx > grid.cfl_factor)
    throw ConfigurationError("solve_neumann: CFL bound c_max*dt/dx <= cfl_factor violated");
  if (profile.travel_time(0.0, std::min(grid.x_max, profile.x_max())) <=
          grid.final_time() ||
      grid.x_max > profile.x_max() + 1e-12)
    throw ConfigurationError(
        "solve_neumann: truncation too small, travel_time(0, x_max) must exceed T");
  for (double ts : snapshot_times)
    if (ts < 0.0 || ts > grid.horizon)
      throw std::invalid_argument("solve_neumann: snapshot time outside [0, 2T]");

  const int nx = grid.n_x;
  std::vector<double> lam(static_cast<std::size_t>(nx) + 1);
  for (int i = 0; i <= nx; ++i) {
    const double c = profile.speed(i * dx);
    lam[static_cast<std::size_t>(i)] = (dt * c / dx) * (dt * c / dx);
  }

  // snapshot bookkeeping: we need levels n-1 and n+1 around the rounded step
  struct Pending {
    int step;
    double time;
    std::vector<double> u_at;
    std::vector<double> u_prev;
  };
  std::vector<Pending> pending;
  pending.reserve(snapshot_times.size());
  for (double ts : snapshot_times) {
    int s = static_cast<int>(std::lround(ts / dt));
    s = std::max(1, std::min(s, grid.n_t - 1));
    pending.push_back({s, ts, {}, {}});
  }

  std::vector<double> up(static_cast<std::size_t>(nx) + 1, 0.0);
  std::vector<double> u(static_cast<std::size_t>(nx) + 1, 0.0);
  std::vector<double> un(static_cast<std::size_t>(nx) + 1, 0.0);
  std::vector<double> trace(static_cast<std::size_t>(grid.n_t) + 1, 0.0);

  std::vector<FieldSnapshot> snaps(pending.size());

  for (int n = 0; n < grid.n_t; ++n) {
    const double fn = f.value_at(n * dt);
    for (int i = 1; i < nx; ++i)
      un[static_cast<std::size_t>(i)] =
          2.0 * u[static_cast<std::size_t>(i)] - up[static_cast<std::size_t>(i)] +
          lam[static_cast<std::size_t>(i)] *
              (u[static_cast<std::size_t>(i + 1)] - 2.0 * u[static_cast<std::size_t>(i)] +
               u[static_cast<std::size_t>(i - 1)]);
    un[0] = 2.0 * u[0] - up[0] + lam[0] * (2.0 * u[1] - 2.0 * u[0] - 2.0 * dx * fn);
    un[static_cast<std::size_t>(nx)] = 0.0;
    if (n == 0)
      for (double& x : un) x *= 0.5;  // Taylor start from zero initial data
    std::swap(up, u);
    std::swap(u, un);
    trace[static_cast<std::size_t>(n + 1)] = u[0];

    for (std::size_t p = 0; p < pending.size(); ++p) {
      if (n + 1 == pending[p].step) {
        pending[p].u_at = u;
        pending[p].u_prev = up;
      } else if (n + 1 == pending[p].step + 1) {
        FieldSnapshot& s = snaps[p];
        s.time = pending[p].time;
        s.x_max = grid.x_max;
        s.u = pending[p].u_at;
        s.ut.resize(s.u.size());
        for (std::size_t i = 0; i < s.u.size(); ++i)
          s.ut[i] = (u[i] - pending[p].u_prev[i]) / (2.0 * dt);
      }
    }
  }

  ForwardResult out;
  out.snapshots = std::move(snaps);
  out.trace = TimeSignal(f.n(), f.final_time());
  const double h = out.trace.h();
  for (int j = 0; j < out.trace.size(); ++j) {
    const double t = j * h;
    const double s = t / dt;
    const int k = std::min(static_cast<int>(s), grid.n_t - 1);
    const double w = s - k;
    out.trace[j] = (1.0 - w) * trace[static_cast<std::size_t>(k)] +
                   w * trace[static_cast<std::size_t>(k + 1)];
  }
  return out;
}

/// Builds the discrete Neumann-to-Dirichlet operator from a single forward
/// solve with the first hat source; all other columns follow from translation
/// invariance in time.
inline NtdOperator build_ntd(const MediumProfile& profile, int node_param,
                             const SolverGrid& grid) {
  if (grid.n_t % (2 * node_param) != 0 || grid.n_t / (2 * node_param) < 2)
    throw ConfigurationError("build_ntd: solver grid does not resolve the node grid");
  const TimeSignal phi1 = hat_basis(1, node_param, grid.final_time());
  return NtdOperator(solve_neumann(profile, phi1, grid).trace);
}

// ---------------------------------------------------------------------------
// Volume-side oracles. These integrate against the weighted measure
// c^{-2} dx, the L^2(M) inner product of the variable-speed problem.
// ---------------------------------------------------------------------------

inline double volume_inner_product(const std::vector<double>& a,
                                   const std::vector<double>& b,
                                   const MediumProfile& profile, double x_max) {
  if (a.size() != b.size() || a.size() < 2)
    throw std::invalid_argument("volume_inner_product: grid mismatch");
  const int last = static_cast<int>(a.size()) - 1;
  const double dx = x_max / last;
  double acc = 0.0;
  for (int i = 0; i <= last; ++i) {
    const double c = profile.speed(i * dx);
    acc += trapezoid_weight(i, last) * a[static_cast<std::size_t>(i)] *
           b[static_cast<std::size_t>(i)] / (c * c);
  }
  return acc * dx;
}

inline double volume_inner_product(const FieldSnapshot& a, const FieldSnapshot& b,
                                   const MediumProfile& profile) {
  if (a.u.size() != b.u.size() || a.x_max != b.x_max)
    throw std::invalid_argument("volume_inner_product: grid mismatch");
  return volume_inner_product(a.u, b.u, profile, a.x_max);
}

/// E(t) = ||u_t||^2_{L^2(M)} + ||grad_g u||^2_{L^2(M)}; in one dimension the
/// gradient term reduces to the flat integral of u_x^2.
inline double field_energy(const FieldSnapshot& s, const MediumProfile& profile) {
  if (s.ut.empty()) throw std::invalid_argument("field_energy: snapshot lacks u_t");
  const int last = static_cast<int>(s.u.size()) - 1;
  const double dx = s.dx();
  double acc = 0.0;
  for (int i = 0; i <= last; ++i) {
    const double c = profile.speed(i * dx);
    double ux;
    if (i == 0)
      ux = (s.u[1] - s.u[0]) / dx;
    else if (i == last)
      ux = (s.u[static_cast<std::size_t>(last)] - s.u[static_cast<std::size_t>(last - 1)]) / dx;
    else
      ux = (s.u[static_cast<std::size_t>(i + 1)] - s.u[static_cast<std::size_t>(i - 1)]) /
           (2.0 * dx);
    const double ut = s.ut[static_cast<std::size_t>(i)];
    acc += trapezoid_weight(i, last) * (ut * ut / (c * c) + ux * ux);
  }
  return acc * dx;
}

}  // namespace wavefocus
