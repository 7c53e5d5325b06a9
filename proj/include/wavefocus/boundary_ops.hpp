#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "wavefocus/ntd.hpp"
#include "wavefocus/time_signal.hpp"

namespace wavefocus {

// ---------------------------------------------------------------------------
// Quadrature pairings. All V/Y pairings use composite trapezoid on the node
// grid, consistent with the hat discretization order.
// ---------------------------------------------------------------------------

inline double trapezoid_weight(int j, int last) { return (j == 0 || j == last) ? 0.5 : 1.0; }

/// L^2(0,2T) pairing by composite trapezoid.
inline double inner_v(const TimeSignal& f, const TimeSignal& g) {
  f.check_grid(g);
  const int last = f.size() - 1;
  double acc = 0.0;
  for (int j = 0; j <= last; ++j) acc += trapezoid_weight(j, last) * f[j] * g[j];
  return acc * f.h();
}

/// Rf(t) = f(2T - t): node j -> node 2N - j.
inline TimeSignal time_reverse(const TimeSignal& f) {
  TimeSignal out(f.n(), f.final_time());
  const int last = f.size() - 1;
  for (int j = 0; j <= last; ++j) out[j] = f[last - j];
  return out;
}

namespace detail {
inline std::vector<double> trapezoid_prefix(const TimeSignal& f) {
  std::vector<double> cum(static_cast<std::size_t>(f.size()), 0.0);
  const double h = f.h();
  for (int j = 1; j < f.size(); ++j)
    cum[static_cast<std::size_t>(j)] =
        cum[static_cast<std::size_t>(j - 1)] + 0.5 * (f[j - 1] + f[j]) * h;
  return cum;
}
}  // namespace detail

/// Time filter Jf(t) = 1/2 int over { s > t, s + t <= 2T } f(s) ds
///                   = 1/2 int_t^{2T-t} f(s) ds for t <= T, zero for t >= T.
inline TimeSignal time_filter(const TimeSignal& f) {
  const auto cum = detail::trapezoid_prefix(f);
  TimeSignal out(f.n(), f.final_time());
  const int nn = f.n();
  for (int j = 0; j <= nn; ++j)
    out[j] = 0.5 * (cum[static_cast<std::size_t>(2 * nn - j)] -
                    cum[static_cast<std::size_t>(j)]);
  return out;
}

/// Transpose of the trapezoid matrix of J (needed for the symmetrized path).
/// Row k of J weights columns i in [k, 2N-k] with h/2 (1/2 at the ends); the
/// transpose accumulates prefix sums of the input.
inline TimeSignal time_filter_adjoint(const TimeSignal& v) {
  const int nn = v.n();
  const int last = 2 * nn;
  TimeSignal out(nn, v.final_time());
  std::vector<double> prefix(static_cast<std::size_t>(last) + 1, 0.0);
  double acc = 0.0;
  for (int k = 0; k <= last; ++k) {
    prefix[static_cast<std::size_t>(k)] = acc;  // sum of v_0..v_{k-1}
    acc += v[k];
  }
  for (int i = 0; i <= last; ++i) {
    const int m = std::min(i, last - i);
    double s = prefix[static_cast<std::size_t>(m)];
    if (m <= nn - 1) s += 0.5 * v[m];  // the half-weighted row end, if that row exists
    out[i] = 0.5 * v.h() * s;
  }
  return out;
}

/// Connecting operator K = R Lambda R J - J Lambda.
inline TimeSignal connecting_k(const NtdOperator& ntd, const TimeSignal& f) {
  return ntd.apply_time_reversed(time_filter(f)) - time_filter(ntd.apply(f));
}

/// K^T = J^T Lambda - R Lambda R J^T  (uses Lambda^* = R Lambda R exactly).
inline TimeSignal connecting_k_adjoint(const NtdOperator& ntd, const TimeSignal& f) {
  return ntd.apply(time_filter_adjoint(f)) -
         time_filter_adjoint(ntd.apply_time_reversed(f));
}

/// P_r: multiplication by the indicator of the window (T-r, T); zeroes every
/// node with j h outside it. Idempotent.
inline TimeSignal project_window(const TimeSignal& f, double r) {
  const double t_final = f.final_time();
  if (!(r > 0.0 && r <= t_final))
    throw std::out_of_range("project_window: need 0 < r <= T");
  TimeSignal out(f.n(), t_final);
  for (int j = 0; j < f.size(); ++j) {
    const double t = f.time_at(j);
    if (t > t_final - r && t < t_final) out[j] = f[j];
  }
  return out;
}

/// P-hat: multiplication by the indicator of (0, T).
inline TimeSignal project_first_half(const TimeSignal& f) {
  TimeSignal out(f.n(), f.final_time());
  for (int j = 1; j < f.n(); ++j) out[j] = f[j];
  return out;
}

/// Nodal samples of Phi_T(t) = (T - t)_+.
inline TimeSignal phi_t_signal(int node_param, double final_time) {
  TimeSignal out(node_param, final_time);
  for (int j = 0; j < out.size(); ++j)
    out[j] = std::max(final_time - out.time_at(j), 0.0);
  return out;
}

/// Green's operator for (1 - d_t^2) with zero endpoint values on (0, 2T):
/// Qf(t) = int g(t,s) f(s) ds with g(t,s) = sinh(t_<) sinh(2T - t_>)/sinh(2T),
/// evaluated by trapezoid using prefix sums of the separable kernel.
inline TimeSignal greens_q(const TimeSignal& f) {
  const int last = f.size() - 1;
  const double h = f.h();
  const double two_t = f.horizon();
  const double denom = std::sinh(two_t);
  std::vector<double> wf(static_cast<std::size_t>(last) + 1);
  std::vector<double> sh(wf.size()), sh_rev(wf.size());
  for (int j = 0; j <= last; ++j) {
    const double t = f.time_at(j);
    sh[static_cast<std::size_t>(j)] = std::sinh(t);
    sh_rev[static_cast<std::size_t>(j)] = std::sinh(two_t - t);
    wf[static_cast<std::size_t>(j)] = trapezoid_weight(j, last) * f[j] * h;
  }
  std::vector<double> up(wf.size()), down(wf.size());
  double acc = 0.0;
  for (int j = 0; j <= last; ++j) {
    acc += sh[static_cast<std::size_t>(j)] * wf[static_cast<std::size_t>(j)];
    up[static_cast<std::size_t>(j)] = acc;  // sum_{k<=j} sinh(t_k) w_k f_k
  }
  acc = 0.0;
  for (int j = last; j >= 0; --j) {
    acc += sh_rev[static_cast<std::size_t>(j)] * wf[static_cast<std::size_t>(j)];
    down[static_cast<std::size_t>(j)] = acc;  // sum_{k>=j} sinh(2T-t_k) w_k f_k
  }
  TimeSignal out(f.n(), f.final_time());
  for (int j = 0; j <= last; ++j) {
    const std::size_t u = static_cast<std::size_t>(j);
    out[j] = (sh_rev[u] * up[u] + sh[u] * (down[u] - sh_rev[u] * wf[u])) / denom;
  }
  return out;
}

/// Support-shrinking projector N_Y (orthogonal projection of Z onto Y):
/// on [0, T]: f(t) - sinh(t)/sinh(T) f(T); zero on (T, 2T]. Requires f in Z,
/// i.e. vanishing endpoint values, checked at tolerance.
inline TimeSignal project_y(const TimeSignal& f, double z_tolerance = 1e-8) {
  const double scale = std::max(1.0, f.max_abs());
  if (std::abs(f[0]) > z_tolerance * scale ||
      std::abs(f[f.size() - 1]) > z_tolerance * scale)
    throw std::invalid_argument("project_y: input must vanish at t = 0 and t = 2T");
  const int nn = f.n();
  const double t_final = f.final_time();
  const double f_t = f[nn];
  TimeSignal out(nn, t_final);
  const double inv = 1.0 / std::sinh(t_final);
  for (int j = 1; j < nn; ++j)
    out[j] = f[j] - std::sinh(f.time_at(j)) * inv * f_t;
  return out;  // nodes 0, N..2N stay zero
}

/// First-order forward differences on the hat coefficients,
/// (d_t f)_j = (f_{j+1} - f_j)/h for j = 1..2N-2, remaining coefficients zero.
inline TimeSignal d_dt_discrete(const TimeSignal& f) {
  TimeSignal out(f.n(), f.final_time());
  const double inv_h = 1.0 / f.h();
  for (int j = 1; j <= 2 * f.n() - 2; ++j) out[j] = (f[j + 1] - f[j]) * inv_h;
  return out;
}

inline bool in_y_space(const TimeSignal& a, double tolerance = 1e-8) {
  const double scale = std::max(1.0, a.max_abs());
  if (std::abs(a[0]) > tolerance * scale) return false;
  for (int j = a.n(); j < a.size(); ++j)
    if (std::abs(a[j]) > tolerance * scale) return false;
  return true;
}

/// L a = N_Y Q (R Lambda R d_t P-hat - P-hat d_t Lambda + K) a  for a in Y.
inline TimeSignal operator_l(const NtdOperator& ntd, const TimeSignal& a) {
  if (!in_y_space(a))
    throw std::invalid_argument("operator_l: input must lie in Y (vanish at 0 and on [T,2T])");
  const TimeSignal t1 =
      ntd.apply_time_reversed(d_dt_discrete(project_first_half(a)));
  const TimeSignal t2 = project_first_half(d_dt_discrete(ntd.apply(a)));
  return project_y(greens_q(t1 - t2 + connecting_k(ntd, a)));
}

/// Y pairing: <a1, a2>_V + <d_t a1, d_t a2>_V with the discrete derivative.
inline double inner_y(const TimeSignal& a1, const TimeSignal& a2) {
  return inner_v(a1, a2) + inner_v(d_dt_discrete(a1), d_dt_discrete(a2));
}

// ---------------------------------------------------------------------------
// Diagnostics
// ---------------------------------------------------------------------------

using SignalMap = std::function<TimeSignal(const TimeSignal&)>;

/// Dense matrix of a map in the hat basis (interior nodes 1..2N-1), column by
/// column. Meant for spectral diagnostics and small-instance oracles.
inline std::vector<std::vector<double>> materialize_interior(const SignalMap& op,
                                                             int node_param,
                                                             double final_time) {
  const int dim = 2 * node_param - 1;
  std::vector<std::vector<double>> mat(static_cast<std::size_t>(dim),
                                       std::vector<double>(static_cast<std::size_t>(dim), 0.0));
  for (int k = 0; k < dim; ++k) {
    const TimeSignal col = op(hat_basis(k + 1, node_param, final_time));
    for (int i = 0; i < dim; ++i)
      mat[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] = col[i + 1];
  }
  return mat;
}

}  // namespace wavefocus
