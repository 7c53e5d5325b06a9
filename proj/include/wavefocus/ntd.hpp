#pragma once

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "wavefocus/time_signal.hpp"

namespace wavefocus {

/// Discretized Neumann-to-Dirichlet map on the hat grid. Stores the response
/// kernel to the first hat source; applications use translation invariance in
/// time, so the nodal matrix is lower-triangular Toeplitz:
///   (Lambda f)(i h) = sum_{k=1..i} f_k * kernel[i-k+1].
class NtdOperator {
 public:
  NtdOperator() = default;

  explicit NtdOperator(TimeSignal kernel) : kernel_(std::move(kernel)) {
    kernel_[0] = 0.0;  // causality: no response before the source acts
    kernel_[kernel_.size() - 1] = 0.0;
  }

  const TimeSignal& kernel() const { return kernel_; }
  int n() const { return kernel_.n(); }
  double final_time() const { return kernel_.final_time(); }

  /// Applies the operator to the nodal coefficients of f. Output lies in the
  /// hat space (zero endpoints); endpoint values of f are ignored.
  TimeSignal apply(const TimeSignal& f) const {
    kernel_.check_grid(f);
    const int m = 2 * f.n();  // last node index
    TimeSignal out(f.n(), f.final_time());
    for (int i = 1; i < m; ++i) {
      double acc = 0.0;
      for (int k = 1; k <= i; ++k) acc += f[k] * kernel_[i - k + 1];
      out[i] = acc;
    }
    return out;
  }

  /// R Lambda R: equals the transpose of the nodal matrix exactly, since the
  /// reflection of a lower-triangular Toeplitz matrix is its transpose.
  TimeSignal apply_time_reversed(const TimeSignal& f) const {
    kernel_.check_grid(f);
    const int m = 2 * f.n();
    TimeSignal out(f.n(), f.final_time());
    for (int i = 1; i < m; ++i) {
      double acc = 0.0;
      for (int k = i; k < m; ++k) acc += f[k] * kernel_[k - i + 1];
      out[i] = acc;
    }
    return out;
  }

  uint64_t checksum() const {
    uint64_t h = 1469598103934665603ull;  // FNV-1a over the byte image
    auto mix = [&h](const void* p, std::size_t n) {
      const auto* b = static_cast<const unsigned char*>(p);
      for (std::size_t i = 0; i < n; ++i) {
        h ^= b[i];
        h *= 1099511628211ull;
      }
    };
    const int nn = kernel_.n();
    const double t = kernel_.final_time();
    mix(&nn, sizeof nn);
    mix(&t, sizeof t);
    mix(kernel_.values().data(), kernel_.values().size() * sizeof(double));
    return h;
  }

  void save_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("NtdOperator: cannot write " + path);
    out << "# ntd_kernel,N=" << kernel_.n() << ",T=" << format(kernel_.final_time())
        << ",checksum=" << checksum() << "\n";
    out << "t,value\n";
    for (int j = 0; j < kernel_.size(); ++j)
      out << format(kernel_.time_at(j)) << "," << format(kernel_[j]) << "\n";
  }

  static NtdOperator load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("NtdOperator: cannot read " + path);
    std::string header;
    std::getline(in, header);
    int n = 0;
    double t = 0.0;
    uint64_t sum = 0;
    if (std::sscanf(header.c_str(), "# ntd_kernel,N=%d,T=%lf,checksum=%llu", &n, &t,
                    reinterpret_cast<unsigned long long*>(&sum)) != 3)
      throw std::runtime_error("NtdOperator: bad kernel header in " + path);
    std::string line;
    std::getline(in, line);  // column names
    TimeSignal kernel(n, t);
    for (int j = 0; j < kernel.size(); ++j) {
      if (!std::getline(in, line))
        throw std::runtime_error("NtdOperator: truncated kernel file " + path);
      const auto comma = line.find(',');
      if (comma == std::string::npos)
        throw std::runtime_error("NtdOperator: malformed kernel row in " + path);
      kernel[j] = std::stod(line.substr(comma + 1));
    }
    NtdOperator op(std::move(kernel));
    if (op.checksum() != sum)
      throw std::runtime_error("NtdOperator: checksum mismatch in " + path);
    return op;
  }

 private:
  static std::string format(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
  }

  TimeSignal kernel_;
};

}  // namespace wavefocus
