#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace wavefocus {

/// A boundary function on [0, 2T] sampled at the 2N+1 uniform nodes t_j = j*h,
/// h = T/N. This is the common currency of all boundary operators: the interior
/// nodes j = 1..2N-1 carry the hat-basis coefficients, the endpoint values are
/// kept so that signals such as (T-t)_+ can be represented literally.
class TimeSignal {
 public:
  TimeSignal() = default;

  TimeSignal(int node_param, double final_time)
      : n_(node_param), final_time_(final_time), v_(2 * node_param + 1, 0.0) {
    if (node_param < 1 || !(final_time > 0.0))
      throw std::invalid_argument("TimeSignal: need N >= 1 and T > 0");
  }

  static TimeSignal from_samples(int node_param, double final_time,
                                 std::vector<double> values) {
    TimeSignal s(node_param, final_time);
    if (values.size() != s.v_.size())
      throw std::invalid_argument("TimeSignal: sample count must be 2N+1");
    s.v_ = std::move(values);
    return s;
  }

  int n() const { return n_; }                    // the N parameter
  double final_time() const { return final_time_; }  // T
  double horizon() const { return 2.0 * final_time_; }
  double h() const { return final_time_ / n_; }
  int size() const { return static_cast<int>(v_.size()); }  // 2N+1

  double time_at(int j) const { return j * h(); }

  double& operator[](int j) { return v_[static_cast<std::size_t>(j)]; }
  double operator[](int j) const { return v_[static_cast<std::size_t>(j)]; }

  const std::vector<double>& values() const { return v_; }
  std::vector<double>& values() { return v_; }

  /// Piecewise-linear evaluation between nodes; clamps outside [0, 2T].
  double value_at(double t) const {
    const double hh = h();
    if (t <= 0.0) return v_.front();
    if (t >= horizon()) return v_.back();
    const double s = t / hh;
    const int j = static_cast<int>(s);
    const double w = s - j;
    if (j + 1 >= size()) return v_.back();
    return (1.0 - w) * v_[j] + w * v_[j + 1];
  }

  bool same_grid(const TimeSignal& o) const {
    return n_ == o.n_ && final_time_ == o.final_time_;
  }

  TimeSignal& operator+=(const TimeSignal& o) {
    check_grid(o);
    for (std::size_t i = 0; i < v_.size(); ++i) v_[i] += o.v_[i];
    return *this;
  }
  TimeSignal& operator-=(const TimeSignal& o) {
    check_grid(o);
    for (std::size_t i = 0; i < v_.size(); ++i) v_[i] -= o.v_[i];
    return *this;
  }
  TimeSignal& operator*=(double c) {
    for (double& x : v_) x *= c;
    return *this;
  }

  friend TimeSignal operator+(TimeSignal a, const TimeSignal& b) { return a += b; }
  friend TimeSignal operator-(TimeSignal a, const TimeSignal& b) { return a -= b; }
  friend TimeSignal operator*(double c, TimeSignal a) { return a *= c; }

  double max_abs() const {
    double m = 0.0;
    for (double x : v_) m = std::max(m, std::abs(x));
    return m;
  }

  void check_grid(const TimeSignal& o) const {
    if (!same_grid(o)) throw std::invalid_argument("TimeSignal: grid mismatch");
  }

 private:
  int n_ = 0;
  double final_time_ = 0.0;
  std::vector<double> v_;
};

/// Hat function phi_{k,N}: supported on [(k-1)h, (k+1)h], peak 1 at k*h.
inline TimeSignal hat_basis(int k, int node_param, double final_time) {
  if (k < 1 || k > 2 * node_param - 1)
    throw std::out_of_range("hat_basis: index must satisfy 1 <= k <= 2N-1");
  TimeSignal s(node_param, final_time);
  s[k] = 1.0;
  return s;
}

/// Nodal interpolation P^N f = sum f(j h) phi_{j,N}: samples f at the interior
/// nodes and zeroes the endpoints. Exact on piecewise-affine functions of the
/// same grid.
template <class F>
TimeSignal interpolate_nodal(F&& f, int node_param, double final_time) {
  TimeSignal s(node_param, final_time);
  for (int j = 1; j < 2 * node_param; ++j) s[j] = f(s.time_at(j));
  return s;
}

inline TimeSignal interpolate_nodal(const TimeSignal& fine, int node_param,
                                    double final_time) {
  return interpolate_nodal([&](double t) { return fine.value_at(t); },
                           node_param, final_time);
}

}  // namespace wavefocus
