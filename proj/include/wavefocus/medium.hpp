#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace wavefocus {

/// One raised-cosine speed bump: c contribution amplitude*cos^2(pi*u/2) for
/// u = (x-center)/half_width in (-1,1), zero outside.
struct SpeedBump {
  double center = 0.0;
  double half_width = 0.0;
  double amplitude = 0.0;
};

struct SpeedBounds {
  double c0 = 0.8;   // lower speed bound
  double c1 = 1.4;   // upper speed bound
  double l0 = 0.05;  // inhomogeneity support lower end
  double l1 = 0.55;  // upper end
};

/// Variable wave speed c(x) on the truncated domain [0, x_max] with c = 1
/// outside (l0, l1) and c0 <= c <= c1. Immutable after construction; the
/// cumulative travel-time table is built once and shared read-only.
class MediumProfile {
 public:
  /// Analytic bump profile.
  MediumProfile(double x_max, int n_cells, std::vector<SpeedBump> bumps,
                SpeedBounds bounds = {})
      : x_max_(x_max), n_cells_(n_cells), bounds_(bounds), bumps_(std::move(bumps)) {
    validate_and_build();
  }

  /// Profile given by speed samples at cell centers x = (i+1/2)*dx.
  MediumProfile(double x_max, std::vector<double> cell_samples, SpeedBounds bounds = {})
      : x_max_(x_max), n_cells_(static_cast<int>(cell_samples.size())),
        bounds_(bounds), samples_(std::move(cell_samples)) {
    validate_and_build();
  }

  double x_max() const { return x_max_; }
  int n_cells() const { return n_cells_; }
  const SpeedBounds& bounds() const { return bounds_; }
  const std::vector<SpeedBump>& bumps() const { return bumps_; }
  bool is_sampled() const { return !samples_.empty(); }
  const std::vector<double>& cell_samples() const { return samples_; }

  double speed(double x) const {
    if (!samples_.empty()) {
      // piecewise linear between cell centers, clamped at the ends
      const double dx = x_max_ / n_cells_;
      const double s = x / dx - 0.5;
      if (s <= 0.0) return samples_.front();
      if (s >= n_cells_ - 1) return samples_.back();
      const int i = static_cast<int>(s);
      const double w = s - i;
      return (1.0 - w) * samples_[i] + w * samples_[i + 1];
    }
    double c = 1.0;
    for (const auto& b : bumps_) {
      const double u = (x - b.center) / b.half_width;
      if (u > -1.0 && u < 1.0) {
        const double ph = std::cos(0.5 * M_PI * u);
        c += b.amplitude * ph * ph;
      }
    }
    return c;
  }

  double max_speed() const { return c_max_; }

  /// Travel time d(x1, x2) = int_{x1}^{x2} 1/c dx by composite trapezoid on the
  /// profile grid (linear interpolation of the cumulative table between nodes,
  /// so concatenated intervals add exactly).
  double travel_time(double x1, double x2) const {
    if (!(0.0 <= x1 && x1 <= x2 && x2 <= x_max_ + 1e-12))
      throw std::domain_error("travel_time: need 0 <= x1 <= x2 <= x_max");
    return table_at(x2) - table_at(x1);
  }

  double boundary_travel_time() const { return table_.back(); }  // d(0, x_max)

  /// x(r): the point with d(0, x(r)) = r. Monotone inverse of the cumulative
  /// table; exact up to one table cell. r = 0 returns the boundary point.
  double point_at_travel_time(double r) const {
    if (r < 0.0 || r > table_.back() * (1.0 + 1e-12))
      throw std::out_of_range("point_at_travel_time: r outside [0, d(0,x_max)]");
    if (r <= 0.0) return 0.0;
    const auto it = std::lower_bound(table_.begin(), table_.end(), r);
    if (it == table_.begin()) return 0.0;
    if (it == table_.end()) return x_max_;
    const std::size_t j = static_cast<std::size_t>(it - table_.begin());
    const double d0 = table_[j - 1], d1 = table_[j];
    const double w = (d1 > d0) ? (r - d0) / (d1 - d0) : 0.0;
    const double dx = x_max_ / n_cells_;
    return dx * (static_cast<double>(j - 1) + w);
  }

  /// M(r) = { x : d(0,x) <= r } = [0, x(r)].
  std::pair<double, double> domain_of_influence(double r) const {
    return {0.0, point_at_travel_time(r)};
  }

  /// Samples of 1_{M(r2) \ M(r1)} = 1_{(x(r1), x(r2)]} on a uniform grid of
  /// n_points nodes over [0, x_max].
  std::vector<double> slab_indicator(double r1, double r2, int n_points) const {
    if (!(r1 >= 0.0 && r1 < r2))
      throw std::invalid_argument("slab_indicator: need 0 <= r1 < r2");
    const double a = point_at_travel_time(r1);
    const double b = point_at_travel_time(std::min(r2, table_.back()));
    std::vector<double> out(static_cast<std::size_t>(n_points), 0.0);
    const double dx = x_max_ / (n_points - 1);
    for (int i = 0; i < n_points; ++i) {
      const double x = i * dx;
      out[static_cast<std::size_t>(i)] = (x > a && x <= b) ? 1.0 : 0.0;
    }
    return out;
  }

 private:
  void validate_and_build() {
    if (!(x_max_ > 0.0) || n_cells_ < 2)
      throw std::invalid_argument("MediumProfile: need x_max > 0 and n_cells >= 2");
    if (!(0.0 < bounds_.l0 && bounds_.l0 < bounds_.l1 && bounds_.l1 < x_max_))
      throw std::invalid_argument("MediumProfile: need 0 < l0 < l1 < x_max");
    const double dx = x_max_ / n_cells_;
    c_max_ = 0.0;
    for (int i = 0; i <= n_cells_; ++i) {
      const double x = i * dx;
      const double c = speed(x);
      if (!(c >= bounds_.c0 - 1e-12 && c <= bounds_.c1 + 1e-12))
        throw std::invalid_argument("MediumProfile: speed bound c0 <= c <= c1 violated");
      if ((x <= bounds_.l0 || x >= bounds_.l1) && std::abs(c - 1.0) > 1e-12)
        throw std::invalid_argument("MediumProfile: c must equal 1 outside (l0, l1)");
      c_max_ = std::max(c_max_, c);
    }
    // cumulative trapezoid of 1/c at the profile nodes
    table_.assign(static_cast<std::size_t>(n_cells_) + 1, 0.0);
    double prev = 1.0 / speed(0.0);
    for (int i = 1; i <= n_cells_; ++i) {
      const double s = 1.0 / speed(i * dx);
      table_[static_cast<std::size_t>(i)] =
          table_[static_cast<std::size_t>(i - 1)] + 0.5 * (prev + s) * dx;
      prev = s;
    }
  }

  double table_at(double x) const {
    const double dx = x_max_ / n_cells_;
    const double s = std::clamp(x / dx, 0.0, static_cast<double>(n_cells_));
    const int i = std::min(static_cast<int>(s), n_cells_ - 1);
    const double w = s - i;
    return (1.0 - w) * table_[static_cast<std::size_t>(i)] +
           w * table_[static_cast<std::size_t>(i + 1)];
  }

  double x_max_ = 0.0;
  int n_cells_ = 0;
  SpeedBounds bounds_;
  std::vector<SpeedBump> bumps_;
  std::vector<double> samples_;
  std::vector<double> table_;
  double c_max_ = 1.0;
};

/// The repository's reference profile. Two travel-time balanced bumps: the
/// half-widths satisfy w_fast*(1 - 1/sqrt(1.4)) = w_slow*(1/sqrt(0.8) - 1),
/// using int over a full bump of 1/(1+A cos^2(pi u/2)) du = 2w/sqrt(1+A).
/// Both bumps lie left of x = 0.48, so d(0,x) = x for x >= 0.48 and
/// x(1/2) = 0.5, x(5/8) = 0.625 hold exactly.
inline MediumProfile reference_profile(double x_max = 3.08, int n_cells = 1 << 13) {
  const double w_slow = 0.10;
  const double w_fast =
      w_slow * (1.0 / std::sqrt(0.8) - 1.0) / (1.0 - 1.0 / std::sqrt(1.4));
  return MediumProfile(
      x_max, n_cells,
      {SpeedBump{0.15, w_fast, +0.4}, SpeedBump{0.38, w_slow, -0.2}});
}

/// Homogeneous medium, c = 1 everywhere (bounds kept wide for validity).
inline MediumProfile unit_profile(double x_max = 3.08, int n_cells = 1 << 13) {
  return MediumProfile(x_max, n_cells, std::vector<SpeedBump>{},
                       SpeedBounds{0.8, 1.4, 0.05, 0.55});
}

}  // namespace wavefocus
