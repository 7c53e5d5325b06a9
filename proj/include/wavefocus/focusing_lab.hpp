#pragma once

#include <algorithm>
#include <cmath>
#include <future>
#include <stdexcept>
#include <string>
#include <vector>

#include "wavefocus/boundary_ops.hpp"
#include "wavefocus/control_solve.hpp"
#include "wavefocus/medium.hpp"
#include "wavefocus/ntd.hpp"
#include "wavefocus/rng.hpp"
#include "wavefocus/time_signal.hpp"
#include "wavefocus/wave_forward.hpp"

namespace wavefocus {

// ---------------------------------------------------------------------------
// Trial signals for the identity oracles: low-pass random sine series.
// The Y trials carry a smooth sin^2 envelope so they start from rest with zero
// slope; the forward-difference derivative pairing drops the first time cell,
// and trials with a'(0) != 0 would pick up an O(h) boundary term there.
// ---------------------------------------------------------------------------

inline TimeSignal trial_signal_v(Rng& rng, int node_param, double final_time,
                                 int modes = 10) {
  TimeSignal s(node_param, final_time);
  std::vector<double> coef(static_cast<std::size_t>(modes));
  for (int m = 0; m < modes; ++m) coef[static_cast<std::size_t>(m)] = rng.normal() / (m + 1);
  for (int j = 0; j < s.size(); ++j) {
    const double t = s.time_at(j);
    double acc = 0.0;
    for (int m = 1; m <= modes; ++m)
      acc += coef[static_cast<std::size_t>(m - 1)] *
             std::sin(m * M_PI * t / (2.0 * final_time));
    s[j] = acc;
  }
  return s;
}

inline TimeSignal trial_signal_y(Rng& rng, int node_param, double final_time,
                                 int modes = 8) {
  TimeSignal s(node_param, final_time);
  std::vector<double> coef(static_cast<std::size_t>(modes));
  for (int m = 0; m < modes; ++m) coef[static_cast<std::size_t>(m)] = rng.normal() / (m + 1);
  for (int j = 0; j <= node_param; ++j) {
    const double t = s.time_at(j);
    double acc = 0.0;
    for (int m = 1; m <= modes; ++m)
      acc += coef[static_cast<std::size_t>(m - 1)] * std::sin(m * M_PI * t / final_time);
    const double env = std::sin(M_PI * t / final_time);
    s[j] = acc * env * env;
  }
  return s;
}

// ---------------------------------------------------------------------------
// Identity oracles (Blagovestchenskii checks and friends)
// ---------------------------------------------------------------------------

/// One identity comparison: lhs from the volume/energy oracle, rhs from
/// boundary operators only. Relative error is |lhs-rhs|/max(|lhs|,|rhs|,floor).
struct IdentityReport {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double relative_error = 0.0;
  int node_param = 0;
  int n_x = 0;
  int n_t = 0;
};

inline double identity_relative_error(double lhs, double rhs, double floor = 1e-12) {
  return std::abs(lhs - rhs) / std::max({std::abs(lhs), std::abs(rhs), floor});
}

namespace detail {

template <class F>
void parallel_for(int count, int jobs, F&& body) {
  jobs = std::max(1, jobs);
  if (jobs == 1 || count <= 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::future<void>> pool;
  int next = 0;
  while (next < count || !pool.empty()) {
    while (static_cast<int>(pool.size()) < jobs && next < count) {
      pool.push_back(std::async(std::launch::async, [&body](int i) { body(i); }, next));
      ++next;
    }
    pool.front().get();
    pool.erase(pool.begin());
  }
}

inline double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  return v[mid];
}

}  // namespace detail

/// Runs `trials` random-trial comparisons of one identity and returns the
/// worst case. Known names: blago1, blago2, energy, h1norm, duality.
inline IdentityReport verify_identity(const std::string& name,
                                      const NtdOperator& ntd,
                                      const MediumProfile& profile,
                                      const SolverGrid& grid, int trials,
                                      uint64_t seed,
                                      std::vector<IdentityReport>* per_trial = nullptr,
                                      int jobs = 1) {
  if (name != "blago1" && name != "blago2" && name != "energy" &&
      name != "h1norm" && name != "duality")
    throw std::invalid_argument("verify_identity: unknown identity name " + name);
  const int nn = ntd.n();
  const double t_final = ntd.final_time();
  const std::vector<double> at_t = {t_final};
  std::vector<IdentityReport> reports(static_cast<std::size_t>(trials));

  detail::parallel_for(trials, jobs, [&](int i) {
    Rng rng(seed + 1000003ull * static_cast<uint64_t>(i));
    IdentityReport rep;
    rep.name = name;
    rep.node_param = nn;
    rep.n_x = grid.n_x;
    rep.n_t = grid.n_t;
    if (name == "blago1") {
      const TimeSignal f = trial_signal_v(rng, nn, t_final);
      const TimeSignal g = trial_signal_v(rng, nn, t_final);
      const FieldSnapshot uf = solve_neumann(profile, f, grid, at_t).snapshots[0];
      const FieldSnapshot ug = solve_neumann(profile, g, grid, at_t).snapshots[0];
      rep.lhs = volume_inner_product(uf, ug, profile);
      rep.rhs = inner_v(connecting_k(ntd, f), g);
    } else if (name == "blago2") {
      const TimeSignal a = trial_signal_y(rng, nn, t_final);
      const FieldSnapshot ua = solve_neumann(profile, a, grid, at_t).snapshots[0];
      const std::vector<double> ones(ua.u.size(), 1.0);
      rep.lhs = volume_inner_product(ua.u, ones, profile, ua.x_max);
      rep.rhs = -inner_v(a, phi_t_signal(nn, t_final));
    } else if (name == "energy") {
      const TimeSignal a = trial_signal_y(rng, nn, t_final);
      const FieldSnapshot ua = solve_neumann(profile, a, grid, at_t).snapshots[0];
      rep.lhs = field_energy(ua, profile);
      rep.rhs = -2.0 * inner_v(a, project_first_half(d_dt_discrete(ntd.apply(a))));
    } else if (name == "h1norm") {
      const TimeSignal a = trial_signal_y(rng, nn, t_final);
      const FieldSnapshot ua = solve_neumann(profile, a, grid, at_t).snapshots[0];
      // ||u||_{H^1}^2 = ||u||^2 + ||u_x||^2 from the snapshot
      const double dx = ua.dx();
      double grad = 0.0;
      const int last = static_cast<int>(ua.u.size()) - 1;
      for (int k = 0; k <= last; ++k) {
        double ux;
        if (k == 0)
          ux = (ua.u[1] - ua.u[0]) / dx;
        else if (k == last)
          ux = (ua.u[static_cast<std::size_t>(last)] -
                ua.u[static_cast<std::size_t>(last - 1)]) / dx;
        else
          ux = (ua.u[static_cast<std::size_t>(k + 1)] -
                ua.u[static_cast<std::size_t>(k - 1)]) / (2.0 * dx);
        grad += trapezoid_weight(k, last) * ux * ux;
      }
      rep.lhs = volume_inner_product(ua.u, ua.u, profile, ua.x_max) + grad * dx;
      const TimeSignal da = d_dt_discrete(a);
      rep.rhs = -2.0 * inner_v(a, project_first_half(d_dt_discrete(ntd.apply(a)))) -
                inner_v(da, connecting_k(ntd, da)) + inner_v(a, connecting_k(ntd, a));
    } else {  // duality: pure boundary-side, no forward solves
      const TimeSignal f = trial_signal_v(rng, nn, t_final);
      const TimeSignal a = trial_signal_y(rng, nn, t_final);
      rep.lhs = inner_y(project_y(greens_q(f)), a);
      rep.rhs = inner_v(f, a);
    }
    rep.relative_error = identity_relative_error(rep.lhs, rep.rhs);
    reports[static_cast<std::size_t>(i)] = rep;
  });

  IdentityReport worst = reports.front();
  for (const auto& r : reports)
    if (r.relative_error > worst.relative_error) worst = r;
  if (per_trial) *per_trial = std::move(reports);
  return worst;
}

// ---------------------------------------------------------------------------
// Indicator reconstruction (first minimization, replayed through the oracle)
// ---------------------------------------------------------------------------

struct IndicatorExperiment {
  double r = 0.0;
  double alpha = 0.0;
  double x_r = 0.0;  // plateau target edge x(r)
  SolveReport h_report;
  FieldSnapshot snapshot;     // u^{P h_alpha}(., T)
  double misfit_rel = 0.0;    // ||u - 1_{M(r)}|| / ||1_{M(r)}|| in L^2(mu)
  double plateau_median = 0.0;
  double edge = 0.0;          // outermost x with u >= 0.1 * plateau median
};

inline IndicatorExperiment reconstruct_indicator(const MediumProfile& profile,
                                                 const NtdOperator& ntd,
                                                 const SolverGrid& grid, double r,
                                                 double alpha,
                                                 const RegularizationConfig& cfg = {}) {
  IndicatorExperiment ex;
  ex.r = r;
  ex.alpha = alpha;
  ex.x_r = profile.point_at_travel_time(r);
  ex.h_report = solve_h(ntd, r, alpha, cfg);
  const TimeSignal ph = project_window(ex.h_report.solution, r);
  ex.snapshot = solve_neumann(profile, ph, grid, {grid.final_time()}).snapshots[0];

  const int last = static_cast<int>(ex.snapshot.u.size()) - 1;
  const double dx = ex.snapshot.dx();
  std::vector<double> indicator(ex.snapshot.u.size(), 0.0);
  std::vector<double> diff(ex.snapshot.u.size(), 0.0);
  std::vector<double> plateau_samples;
  for (int i = 0; i <= last; ++i) {
    const double x = i * dx;
    indicator[static_cast<std::size_t>(i)] = (x <= ex.x_r) ? 1.0 : 0.0;
    diff[static_cast<std::size_t>(i)] =
        ex.snapshot.u[static_cast<std::size_t>(i)] - indicator[static_cast<std::size_t>(i)];
    if (x >= 0.2 * ex.x_r && x <= 0.8 * ex.x_r)
      plateau_samples.push_back(ex.snapshot.u[static_cast<std::size_t>(i)]);
  }
  const double mis = volume_inner_product(diff, diff, profile, ex.snapshot.x_max);
  const double nrm = volume_inner_product(indicator, indicator, profile, ex.snapshot.x_max);
  ex.misfit_rel = std::sqrt(mis / nrm);
  ex.plateau_median = detail::median(std::move(plateau_samples));

  // support edge: outermost crossing of 10% of the plateau level
  const double level = 0.1 * ex.plateau_median;
  ex.edge = 0.0;
  for (int i = last; i >= 1; --i) {
    const double ui = ex.snapshot.u[static_cast<std::size_t>(i)];
    if (ui >= level) {
      const double un = ex.snapshot.u[static_cast<std::size_t>(std::min(i + 1, last))];
      double frac = 0.0;
      if (i < last && un < level && ui != un) frac = (ui - level) / (ui - un);
      ex.edge = (i + frac) * dx;
      break;
    }
  }
  return ex;
}

// ---------------------------------------------------------------------------
// Slab focusing (second minimization, difference of two sources)
// ---------------------------------------------------------------------------

struct FocusExperiment {
  double r1 = 0.0, r2 = 0.0, alpha = 0.0, beta = 0.0;
  double x_r1 = 0.0, x_r2 = 0.0;
  SolveReport h1, h2, a1, a2;
  TimeSignal b;          // a2 - a1
  FieldSnapshot wave;    // (u^b, u_t^b) at time T
  TimeSignal trace;      // boundary trace of u^b on the node grid
  double error_value = 0.0;      // || u_t^b(.,T) - 1_slab ||_{L^2(mu)}
  double mass_fraction = 0.0;    // weighted L^2 mass of u_t^b inside the widened slab
  double osc_fraction = 0.0;     // mass fraction on [0, l0] (spurious oscillations)
  double slab_volume = 0.0;          // int_slab c^{-2} dx (oracle)
  double slab_centroid = 0.0;        // weighted centroid of the slab (oracle)
  double volume_estimate = 0.0;      // boundary-only volume
  double coordinate_estimate = 0.0;  // boundary-only coordinate
};

/// Boundary-only volume functional: -<d_t b, Phi_T>_V (sign fixed by the
/// second Blagovestchenskii identity applied to the derivative source).
inline double slab_volume_from_boundary(const TimeSignal& b) {
  return -inner_v(d_dt_discrete(b), phi_t_signal(b.n(), b.final_time()));
}

/// Normalized focusing source b / volume; a volume below the floor means the
/// slab is degenerate and there is nothing to normalize.
inline TimeSignal normalized_focus_source(const TimeSignal& b, double floor = 1e-9) {
  const double vol = slab_volume_from_boundary(b);
  if (std::abs(vol) < floor)
    throw std::domain_error("normalized_focus_source: degenerate slab, volume below floor");
  return (1.0 / vol) * b;
}

/// Boundary-only coordinate functional <R Lambda R Phi_T, f>_V / (-<f, Phi_T>_V):
/// the weighted first moment of u^f(T) over its weighted mass. Scale-invariant
/// in f; the lab evaluates it on the derivative source d_t b.
inline double recover_coordinate(const TimeSignal& f, const NtdOperator& ntd,
                                 double floor = 1e-9) {
  const TimeSignal phi = phi_t_signal(f.n(), f.final_time());
  const double denom = -inner_v(f, phi);
  if (std::abs(denom) < floor)
    throw std::domain_error("recover_coordinate: denominator below floor");
  return inner_v(ntd.apply_time_reversed(phi), f) / denom;
}

inline FocusExperiment focus_slab(const MediumProfile& profile, const NtdOperator& ntd,
                                  const SolverGrid& grid, double r1, double r2,
                                  double alpha, double beta,
                                  const RegularizationConfig& cfg = {}) {
  if (!(r1 < r2)) throw std::invalid_argument("focus_slab: need r1 < r2");
  FocusExperiment ex;
  ex.r1 = r1;
  ex.r2 = r2;
  ex.alpha = alpha;
  ex.beta = beta;
  ex.x_r1 = profile.point_at_travel_time(r1);
  ex.x_r2 = profile.point_at_travel_time(r2);
  ex.h1 = solve_h(ntd, r1, alpha, cfg);
  ex.h2 = solve_h(ntd, r2, alpha, cfg);
  ex.a1 = solve_a(ntd, ex.h1.solution, r1, beta, cfg);
  ex.a2 = solve_a(ntd, ex.h2.solution, r2, beta, cfg);
  ex.b = ex.a2.solution - ex.a1.solution;

  ForwardResult replay = solve_neumann(profile, ex.b, grid, {grid.final_time()});
  ex.wave = std::move(replay.snapshots[0]);
  ex.trace = std::move(replay.trace);

  const int last = static_cast<int>(ex.wave.u.size()) - 1;
  const double dx = ex.wave.dx();
  std::vector<double> slab(ex.wave.u.size(), 0.0), diff(ex.wave.u.size(), 0.0),
      inside(ex.wave.u.size(), 0.0), near_origin(ex.wave.u.size(), 0.0),
      xslab(ex.wave.u.size(), 0.0);
  for (int i = 0; i <= last; ++i) {
    const double x = i * dx;
    const double ut = ex.wave.ut[static_cast<std::size_t>(i)];
    slab[static_cast<std::size_t>(i)] = (x > ex.x_r1 && x <= ex.x_r2) ? 1.0 : 0.0;
    diff[static_cast<std::size_t>(i)] = ut - slab[static_cast<std::size_t>(i)];
    if (x >= ex.x_r1 - 0.02 && x <= ex.x_r2 + 0.02) inside[static_cast<std::size_t>(i)] = ut;
    if (x <= profile.bounds().l0) near_origin[static_cast<std::size_t>(i)] = ut;
    xslab[static_cast<std::size_t>(i)] = x * slab[static_cast<std::size_t>(i)];
  }
  const double x_max = ex.wave.x_max;
  ex.error_value = std::sqrt(volume_inner_product(diff, diff, profile, x_max));
  const double mass = volume_inner_product(ex.wave.ut, ex.wave.ut, profile, x_max);
  ex.mass_fraction = volume_inner_product(inside, inside, profile, x_max) / mass;
  ex.osc_fraction = volume_inner_product(near_origin, near_origin, profile, x_max) / mass;
  const std::vector<double> ones(ex.wave.u.size(), 1.0);
  ex.slab_volume = volume_inner_product(slab, ones, profile, x_max);
  ex.slab_centroid = volume_inner_product(xslab, ones, profile, x_max) / ex.slab_volume;
  ex.volume_estimate = slab_volume_from_boundary(ex.b);
  ex.coordinate_estimate = recover_coordinate(d_dt_discrete(ex.b), ntd);
  return ex;
}

// ---------------------------------------------------------------------------
// Observation time of the focused wave
// ---------------------------------------------------------------------------

struct ObservationReport {
  double threshold_fraction = 0.0;
  double arrival = 0.0;    // earliest t > T with |trace| >= threshold * max
  double predicted = 0.0;  // T + d(0, x_hat), x_hat the weighted slab centroid
  double trace_max = 0.0;
};

inline ObservationReport observation_time(const MediumProfile& profile,
                                          const FocusExperiment& ex,
                                          double threshold_fraction = 0.1) {
  if (!(threshold_fraction > 0.0 && threshold_fraction < 1.0))
    throw std::invalid_argument("observation_time: threshold_fraction must be in (0,1)");
  const TimeSignal& tr = ex.trace;
  const int nn = tr.n();
  ObservationReport rep;
  rep.threshold_fraction = threshold_fraction;
  double mx = 0.0;
  for (int j = nn + 1; j < tr.size(); ++j) mx = std::max(mx, std::abs(tr[j]));
  if (mx <= 0.0)
    throw std::out_of_range("observation_time: empty trace window after T");
  rep.trace_max = mx;
  rep.arrival = -1.0;
  for (int j = nn + 1; j < tr.size(); ++j) {
    if (std::abs(tr[j]) >= threshold_fraction * mx) {
      rep.arrival = tr.time_at(j);
      break;
    }
  }
  if (rep.arrival < 0.0)
    throw std::out_of_range("observation_time: trace window too short, no crossing");
  rep.predicted = tr.final_time() + profile.travel_time(0.0, ex.slab_centroid);
  return rep;
}

// ---------------------------------------------------------------------------
// Convergence study over the node count
// ---------------------------------------------------------------------------

/// Per-N regularization schedule alpha(N) = alpha0 * (N0/N)^p (same for beta).
struct ScheduleConfig {
  double alpha0 = 1e-3;
  double beta0 = 1.02e-4;
  int n0 = 1 << 11;
  double p = 1.0;

  double alpha(int n) const { return alpha0 * std::pow(static_cast<double>(n0) / n, p); }
  double beta(int n) const { return beta0 * std::pow(static_cast<double>(n0) / n, p); }
};

struct SweepRow {
  int node_param = 0;
  double alpha = 0.0, beta = 0.0;
  double error = 0.0;
  double mass_fraction = 0.0;
  double osc_fraction = 0.0;
  double volume_rel_error = 0.0;
  bool ok = false;
  std::string message;
};

struct SweepTable {
  std::vector<SweepRow> rows;
  double slope = std::numeric_limits<double>::quiet_NaN();  // log-log fit of error vs N
};

inline SweepTable convergence_sweep(const MediumProfile& profile, const SolverGrid& grid,
                                    double r1, double r2, const std::vector<int>& n_list,
                                    const ScheduleConfig& schedule = {},
                                    const RegularizationConfig& cfg = {}, int jobs = 1) {
  SweepTable table;
  table.rows.resize(n_list.size());
  detail::parallel_for(static_cast<int>(n_list.size()), jobs, [&](int i) {
    SweepRow& row = table.rows[static_cast<std::size_t>(i)];
    row.node_param = n_list[static_cast<std::size_t>(i)];
    row.alpha = schedule.alpha(row.node_param);
    row.beta = schedule.beta(row.node_param);
    try {
      const NtdOperator ntd = build_ntd(profile, row.node_param, grid);
      const FocusExperiment ex =
          focus_slab(profile, ntd, grid, r1, r2, row.alpha, row.beta, cfg);
      row.error = ex.error_value;
      row.mass_fraction = ex.mass_fraction;
      row.osc_fraction = ex.osc_fraction;
      row.volume_rel_error =
          std::abs(ex.volume_estimate - ex.slab_volume) / ex.slab_volume;
      row.ok = true;
    } catch (const std::exception& e) {
      row.ok = false;
      row.message = e.what();
    }
  });
  // least-squares slope in log-log axes over the successful rows
  std::vector<double> lx, ly;
  for (const auto& row : table.rows)
    if (row.ok && row.error > 0.0) {
      lx.push_back(std::log(static_cast<double>(row.node_param)));
      ly.push_back(std::log(row.error));
    }
  if (lx.size() >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double m = static_cast<double>(lx.size());
    for (std::size_t k = 0; k < lx.size(); ++k) {
      sx += lx[k];
      sy += ly[k];
      sxx += lx[k] * lx[k];
      sxy += lx[k] * ly[k];
    }
    table.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  }
  return table;
}

}  // namespace wavefocus
