#pragma once

// Shared test helpers: a dense direct solver used as the independent oracle
// for the matrix-free iterative paths, plus small conveniences. The oracle
// must stay independent of the solver code under test, so it is implemented
// here and not in the library.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "wavefocus/time_signal.hpp"

namespace testsupport {

using Matrix = std::vector<std::vector<double>>;

/// Dense LU solve with partial pivoting (in-place copy).
inline std::vector<double> dense_solve(Matrix a, std::vector<double> b) {
  const std::size_t n = a.size();
  if (n == 0 || a[0].size() != n || b.size() != n)
    throw std::invalid_argument("dense_solve: shape mismatch");
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    if (a[piv][col] == 0.0) throw std::runtime_error("dense_solve: singular matrix");
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double m = a[r][col] / a[col][col];
      if (m == 0.0) continue;
      a[r][col] = 0.0;
      for (std::size_t c = col + 1; c < n; ++c) a[r][c] -= m * a[col][c];
      b[r] -= m * b[col];
    }
  }
  std::vector<double> x(n, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t c = i + 1; c < n; ++c) s -= a[i][c] * x[c];
    x[i] = s / a[i][i];
  }
  return x;
}

inline double max_abs_diff(const wavefocus::TimeSignal& a, const wavefocus::TimeSignal& b) {
  double m = 0.0;
  for (int j = 0; j < a.size(); ++j) m = std::max(m, std::abs(a[j] - b[j]));
  return m;
}

inline double euclid_norm(const wavefocus::TimeSignal& a) {
  double s = 0.0;
  for (int j = 0; j < a.size(); ++j) s += a[j] * a[j];
  return std::sqrt(s);
}

}  // namespace testsupport
