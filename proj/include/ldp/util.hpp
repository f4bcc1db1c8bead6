#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "ldp/errors.hpp"

namespace ldp {

/// Dense row-major matrix of doubles. Used for grid-indexed controls
/// (rows = time cells, cols = modes or marks).
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(int r, int c, double value = 0.0)
      : rows(r), cols(c), data(static_cast<size_t>(r) * c, value) {}

  double& operator()(int r, int c) { return data[static_cast<size_t>(r) * cols + c]; }
  double operator()(int r, int c) const { return data[static_cast<size_t>(r) * cols + c]; }

  const double* row(int r) const { return data.data() + static_cast<size_t>(r) * cols; }
  double* row(int r) { return data.data() + static_cast<size_t>(r) * cols; }

  bool empty() const { return rows == 0 || cols == 0; }
};

/// Uniform time grid on [0, t_final] with `steps` cells.
struct TimeGrid {
  double t_final = 1.0;
  int steps = 1;

  TimeGrid() = default;
  TimeGrid(double T, int K) : t_final(T), steps(K) {
    if (T <= 0.0) throw ParameterError("TimeGrid: t_final must be positive");
    if (K < 1) throw ParameterError("TimeGrid: steps must be >= 1");
  }

  double dt() const { return t_final / steps; }
  double node(int m) const { return t_final * m / steps; }
  int n_nodes() const { return steps + 1; }
};

/// Stable (exp(x)-1)/x.
inline double phi1(double x) {
  if (std::abs(x) < 1e-8) return 1.0 + 0.5 * x + x * x / 6.0;
  return std::expm1(x) / x;
}

/// Run fn(i) for i in [0, n) on up to `threads` workers. Results must be
/// written to disjoint slots so the outcome is independent of scheduling.
void parallel_for(int n, const std::function<void(int)>& fn, int threads = 0);

/// FNV-1a 64-bit hash of a byte string, as fixed-width hex.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace ldp
