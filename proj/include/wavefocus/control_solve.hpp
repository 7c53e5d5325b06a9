#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wavefocus/boundary_ops.hpp"
#include "wavefocus/ntd.hpp"
#include "wavefocus/rng.hpp"
#include "wavefocus/time_signal.hpp"

namespace wavefocus {

struct ConfigurationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GmresConfig {
  int outer_max = 6;
  int restart = 10;
  double tol = 1e-12;
};

struct NeumannConfig {
  int n_max = 30000;
  double tol = 1e-13;  // relative step-size stop
};

struct RegularizationConfig {
  double alpha = 1e-3;
  double beta = 1.02e-4;
  double omega = 0.0;  // 0 = auto: 2.2 * (1 + ||L|| from power iteration)
  GmresConfig gmres;
  NeumannConfig neumann;
  std::string method = "gmres";  // "gmres" | "neumann_iteration"
  bool symmetrize_neumann = true;
};

/// Solution plus convergence diagnostics for one regularized linear solve.
/// Non-convergence is data, not an exception.
struct SolveReport {
  TimeSignal solution;
  std::vector<double> residual_history;  // nonincreasing across restarts
  int outer_iterations = 0;
  bool converged = false;
  std::string method;
  double relative_residual = 0.0;
  bool norm_bound_ok = true;  // Thm 3.1 bound, filled by solve_h
};

namespace detail {

inline double dot(const TimeSignal& a, const TimeSignal& b) {
  double s = 0.0;
  for (int i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}
inline double norm2(const TimeSignal& a) { return std::sqrt(dot(a, a)); }

}  // namespace detail

/// Restarted GMRES with Arnoldi + Givens rotations, zero initial guess.
/// Defaults follow the reference setup: 6 outer iterations, restart length 10,
/// tolerance 1e-12 relative to the right-hand side.
inline SolveReport gmres_restarted(const SignalMap& op, const TimeSignal& rhs,
                                   const GmresConfig& cfg = {}) {
  SolveReport rep;
  rep.method = "gmres";
  TimeSignal x(rhs.n(), rhs.final_time());
  const double rhs_norm = detail::norm2(rhs);
  if (rhs_norm == 0.0) {
    rep.solution = x;
    rep.converged = true;
    return rep;
  }
  const int m = cfg.restart;
  std::vector<TimeSignal> basis;
  std::vector<std::vector<double>> hess(static_cast<std::size_t>(m) + 1,
                                        std::vector<double>(static_cast<std::size_t>(m), 0.0));
  std::vector<double> cs(static_cast<std::size_t>(m)), sn(static_cast<std::size_t>(m)),
      g(static_cast<std::size_t>(m) + 1);

  for (int outer = 0; outer < cfg.outer_max && !rep.converged; ++outer) {
    rep.outer_iterations = outer + 1;
    TimeSignal r = rhs - op(x);
    const double beta = detail::norm2(r);
    if (beta <= cfg.tol * rhs_norm) {
      rep.converged = true;
      break;
    }
    basis.assign(1, (1.0 / beta) * r);
    std::fill(g.begin(), g.end(), 0.0);
    g[0] = beta;
    int steps = 0;
    bool breakdown = false;
    for (int j = 0; j < m; ++j) {
      TimeSignal w = op(basis[static_cast<std::size_t>(j)]);
      for (int k = 0; k <= j; ++k) {
        const double hkj = detail::dot(w, basis[static_cast<std::size_t>(k)]);
        hess[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)] = hkj;
        w -= hkj * basis[static_cast<std::size_t>(k)];
      }
      double hnext = detail::norm2(w);
      hess[static_cast<std::size_t>(j + 1)][static_cast<std::size_t>(j)] = hnext;
      // previously accumulated rotations, then a new one for this column
      for (int k = 0; k < j; ++k) {
        double& a = hess[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)];
        double& b = hess[static_cast<std::size_t>(k + 1)][static_cast<std::size_t>(j)];
        const double ta = cs[static_cast<std::size_t>(k)] * a + sn[static_cast<std::size_t>(k)] * b;
        const double tb = -sn[static_cast<std::size_t>(k)] * a + cs[static_cast<std::size_t>(k)] * b;
        a = ta;
        b = tb;
      }
      {
        double& a = hess[static_cast<std::size_t>(j)][static_cast<std::size_t>(j)];
        double& b = hess[static_cast<std::size_t>(j + 1)][static_cast<std::size_t>(j)];
        const double rho = std::hypot(a, b);
        cs[static_cast<std::size_t>(j)] = (rho == 0.0) ? 1.0 : a / rho;
        sn[static_cast<std::size_t>(j)] = (rho == 0.0) ? 0.0 : b / rho;
        a = rho;
        b = 0.0;
      }
      g[static_cast<std::size_t>(j + 1)] = -sn[static_cast<std::size_t>(j)] * g[static_cast<std::size_t>(j)];
      g[static_cast<std::size_t>(j)] = cs[static_cast<std::size_t>(j)] * g[static_cast<std::size_t>(j)];
      steps = j + 1;
      rep.residual_history.push_back(std::abs(g[static_cast<std::size_t>(j + 1)]));
      const bool happy = hnext <= 1e-14 * rhs_norm;
      if (std::abs(g[static_cast<std::size_t>(j + 1)]) <= cfg.tol * rhs_norm || happy) {
        rep.converged = true;
        breakdown = happy;
        break;
      }
      if (j + 1 < m) basis.push_back((1.0 / hnext) * w);
    }
    // back-substitute the triangular system and update x
    std::vector<double> y(static_cast<std::size_t>(steps), 0.0);
    for (int i = steps - 1; i >= 0; --i) {
      double s = g[static_cast<std::size_t>(i)];
      for (int k = i + 1; k < steps; ++k)
        s -= hess[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] * y[static_cast<std::size_t>(k)];
      const double d = hess[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)];
      y[static_cast<std::size_t>(i)] = (d != 0.0) ? s / d : 0.0;
    }
    for (int i = 0; i < steps; ++i) x += y[static_cast<std::size_t>(i)] * basis[static_cast<std::size_t>(i)];
    if (breakdown) break;
  }
  rep.solution = x;
  rep.relative_residual = detail::norm2(rhs - op(x)) / rhs_norm;
  if (rep.relative_residual <= cfg.tol * 10.0 && !rep.residual_history.empty())
    rep.converged = true;
  return rep;
}

/// Operator norm estimate by power iteration (deterministic start).
inline double operator_norm_estimate(const SignalMap& op, int node_param,
                                     double final_time, int iterations = 30,
                                     uint64_t seed = 0x9d2c5680u) {
  Rng rng(seed);
  TimeSignal v(node_param, final_time);
  for (int j = 0; j < v.size(); ++j) v[j] = rng.normal();
  double nrm = detail::norm2(v);
  for (int it = 0; it < iterations; ++it) {
    v = op(v);
    nrm = detail::norm2(v);
    if (nrm == 0.0) return 0.0;
    v *= 1.0 / nrm;
  }
  return nrm;
}

/// Modified time-reversal iteration for (op + alpha) g = rhs with op
/// selfadjoint and non-negative:
///   g_0 = rhs/omega,  g_n = g_0 + S g_{n-1},  S = (1 - alpha/omega) I - op/omega,
/// convergent when omega > 2 (1 + ||op||). Step norms are recorded; a
/// persistent step-ratio above one means omega was too small.
inline SolveReport neumann_iterate(const SignalMap& op, const TimeSignal& rhs,
                                   double alpha, double omega, int n_max,
                                   double tol) {
  if (!(alpha > 0.0)) throw std::invalid_argument("neumann_iterate: alpha must be positive");
  if (!(omega > 0.0)) throw std::invalid_argument("neumann_iterate: omega must be positive");
  SolveReport rep;
  rep.method = "neumann_iteration";
  const TimeSignal g0 = (1.0 / omega) * rhs;
  TimeSignal g = g0;
  const double q = 1.0 - alpha / omega;
  double prev_step = -1.0;
  int expanding = 0;
  for (int it = 0; it < n_max; ++it) {
    TimeSignal gn = g0 + q * g - (1.0 / omega) * op(g);
    const double step = detail::norm2(gn - g);
    rep.residual_history.push_back(step);
    g = gn;
    rep.outer_iterations = it + 1;
    if (prev_step > 0.0) {
      expanding = (step > prev_step * (1.0 + 1e-12)) ? expanding + 1 : 0;
      if (expanding >= 5)
        throw ConfigurationError("neumann_iterate: step norms expanding, omega too small");
    }
    prev_step = step;
    const double scale = std::max(detail::norm2(g), 1e-300);
    if (step <= tol * scale) {
      rep.converged = true;
      break;
    }
  }
  rep.solution = g;
  const double rhs_norm = detail::norm2(rhs);
  rep.relative_residual =
      rhs_norm > 0.0 ? detail::norm2(rhs - (op(g) + alpha * g)) / rhs_norm : 0.0;
  return rep;
}

// ---------------------------------------------------------------------------
// The two regularized normal equations.
// ---------------------------------------------------------------------------

inline SignalMap make_eq1_operator(const NtdOperator& ntd, double r, double alpha) {
  return [&ntd, r, alpha](const TimeSignal& v) {
    return project_window(connecting_k(ntd, project_window(v, r)), r) + alpha * v;
  };
}

/// Symmetrized window operator (P K P + P K^T P)/2 + alpha, used by the
/// iteration path. On window-supported signals the discrete P K P is already
/// symmetric to round-off, so this is a numerical no-op kept for the contract.
inline SignalMap make_eq1_operator_symmetrized(const NtdOperator& ntd, double r,
                                               double alpha) {
  return [&ntd, r, alpha](const TimeSignal& v) {
    const TimeSignal pv = project_window(v, r);
    TimeSignal kv = project_window(connecting_k(ntd, pv), r);
    kv += project_window(connecting_k_adjoint(ntd, pv), r);
    return 0.5 * kv + alpha * v;
  };
}

namespace detail {

/// Transpose of the discrete forward difference.
inline TimeSignal d_dt_adjoint(const TimeSignal& v) {
  const int nn = v.n();
  TimeSignal out(nn, v.final_time());
  const double inv_h = 1.0 / v.h();
  for (int k = 1; k < 2 * nn; ++k) {
    double s = 0.0;
    if (k >= 2 && k <= 2 * nn - 1) s += v[k - 1];
    if (k <= 2 * nn - 2) s -= v[k];
    out[k] = s * inv_h;
  }
  return out;
}

/// Transpose of the trapezoid Green's operator: Q^T = W Q W^{-1} with W the
/// trapezoid weight matrix (the kernel itself is symmetric).
inline TimeSignal greens_q_adjoint(const TimeSignal& v) {
  TimeSignal w = v;
  w[0] *= 2.0;
  w[w.size() - 1] *= 2.0;
  TimeSignal out = greens_q(w);
  out[0] *= 0.5;
  out[out.size() - 1] *= 0.5;
  return out;
}

/// Transpose of the support-shrinking projector N_Y.
inline TimeSignal project_y_adjoint(const TimeSignal& v) {
  const int nn = v.n();
  TimeSignal out(nn, v.final_time());
  const double inv = 1.0 / std::sinh(v.final_time());
  double acc = 0.0;
  for (int j = 1; j < nn; ++j) {
    out[j] = v[j];
    acc += std::sinh(v.time_at(j)) * inv * v[j];
  }
  out[nn] = -acc;
  return out;
}

}  // namespace detail

inline SignalMap make_eq2_operator(const NtdOperator& ntd, double beta) {
  return [&ntd, beta](const TimeSignal& v) { return operator_l(ntd, v) + beta * v; };
}

/// L^T v = X^T Q^T N_Y^T v with X^T = P-hat d_t^T Lambda - R Lambda R d_t^T P-hat + K^T.
inline TimeSignal operator_l_adjoint(const NtdOperator& ntd, const TimeSignal& v) {
  const TimeSignal q = detail::greens_q_adjoint(detail::project_y_adjoint(v));
  const TimeSignal t1 = project_first_half(detail::d_dt_adjoint(ntd.apply(q)));
  const TimeSignal t2 = ntd.apply_time_reversed(detail::d_dt_adjoint(project_first_half(q)));
  return t1 - t2 + connecting_k_adjoint(ntd, q);
}

inline SignalMap make_eq2_operator_symmetrized(const NtdOperator& ntd, double beta) {
  return [&ntd, beta](const TimeSignal& v) {
    return 0.5 * (operator_l(ntd, v) + operator_l_adjoint(ntd, v)) + beta * v;
  };
}

inline double resolve_omega(const RegularizationConfig& cfg, const SignalMap& op,
                            int node_param, double final_time) {
  if (cfg.omega > 0.0) return cfg.omega;
  return 2.2 * (1.0 + operator_norm_estimate(op, node_param, final_time));
}

/// Solves (P K P + alpha) h = -P Phi_T. The solution is supported on the
/// window nodes automatically (the right-hand side is, and the operator
/// preserves the support).
inline SolveReport solve_h(const NtdOperator& ntd, double r, double alpha,
                           const RegularizationConfig& cfg = {}) {
  if (!(alpha > 0.0)) throw std::invalid_argument("solve_h: alpha must be positive");
  const int nn = ntd.n();
  const double t_final = ntd.final_time();
  const TimeSignal rhs = -1.0 * project_window(phi_t_signal(nn, t_final), r);
  SolveReport rep;
  if (cfg.method == "neumann_iteration") {
    const SignalMap raw = [&ntd, r](const TimeSignal& v) {
      return project_window(connecting_k(ntd, project_window(v, r)), r);
    };
    const SignalMap sym = [&ntd, r](const TimeSignal& v) {
      const TimeSignal pv = project_window(v, r);
      TimeSignal kv = project_window(connecting_k(ntd, pv), r);
      kv += project_window(connecting_k_adjoint(ntd, pv), r);
      return 0.5 * kv;
    };
    const SignalMap& op = cfg.symmetrize_neumann ? sym : raw;
    const double omega = resolve_omega(cfg, op, nn, t_final);
    rep = neumann_iterate(op, rhs, alpha, omega, cfg.neumann.n_max, cfg.neumann.tol);
  } else {
    rep = gmres_restarted(make_eq1_operator(ntd, r, alpha), rhs, cfg.gmres);
  }
  const double bound = (1.0 + t_final) * (1.0 + t_final) / alpha;
  rep.norm_bound_ok = inner_v(rep.solution, rep.solution) <= bound * (1.0 + 1e-12);
  return rep;
}

/// Solves (L + beta) a = -N_Y Q d_t K P h_alpha in Y.
inline SolveReport solve_a(const NtdOperator& ntd, const TimeSignal& h_alpha,
                           double r, double beta,
                           const RegularizationConfig& cfg = {}) {
  if (!(beta > 0.0)) throw std::invalid_argument("solve_a: beta must be positive");
  const TimeSignal rhs = -1.0 * project_y(greens_q(d_dt_discrete(
                             connecting_k(ntd, project_window(h_alpha, r)))));
  if (cfg.method == "neumann_iteration") {
    const SignalMap raw = [&ntd](const TimeSignal& v) { return operator_l(ntd, v); };
    const SignalMap sym = [&ntd](const TimeSignal& v) {
      return 0.5 * (operator_l(ntd, v) + operator_l_adjoint(ntd, v));
    };
    const SignalMap& op = cfg.symmetrize_neumann ? sym : raw;
    const double omega = resolve_omega(cfg, op, ntd.n(), ntd.final_time());
    return neumann_iterate(op, rhs, beta, omega, cfg.neumann.n_max, cfg.neumann.tol);
  }
  return gmres_restarted(make_eq2_operator(ntd, beta), rhs, cfg.gmres);
}

// ---------------------------------------------------------------------------
// Boundary-computable functionals of the two minimization problems.
// ---------------------------------------------------------------------------

/// F1 without its constant <1_N, 1_N> term (not computable from boundary
/// data): 2 <Ph, Phi_T> + <Ph, K Ph> + alpha <h, h>.
inline double functional_f1_reduced(const NtdOperator& ntd, const TimeSignal& h,
                                    double alpha, double r) {
  const TimeSignal ph = project_window(h, r);
  const TimeSignal phi = phi_t_signal(h.n(), h.final_time());
  return 2.0 * inner_v(ph, phi) + inner_v(ph, connecting_k(ntd, ph)) +
         alpha * inner_v(h, h);
}

/// F2 as the boundary expression (plus the beta <a,a>_Y term of the minimized
/// functional): <Ph,KPh> - 2<Ph,K da> + <da,K da> - 2<a,Phat dt Lambda a>
///              - <da,K da> + <a,Ka> + beta <a,a>_Y.
inline double functional_f2(const NtdOperator& ntd, const TimeSignal& a,
                            double beta, const TimeSignal& h, double r) {
  const TimeSignal ph = project_window(h, r);
  const TimeSignal da = d_dt_discrete(a);
  const TimeSignal k_ph = connecting_k(ntd, ph);
  const TimeSignal k_da = connecting_k(ntd, da);
  const double quad_da = inner_v(da, k_da);
  return inner_v(ph, k_ph) - 2.0 * inner_v(ph, k_da) + quad_da -
         2.0 * inner_v(a, project_first_half(d_dt_discrete(ntd.apply(a)))) -
         quad_da + inner_v(a, connecting_k(ntd, a)) + beta * inner_y(a, a);
}

}  // namespace wavefocus
