#pragma once

// Independent reference computations for the unit and acceptance tests.
// Nothing here calls into the value or search machinery under test.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace oracle {

/// Closed-form eikonal value with A = 0, F = u, U = [-1, 1], q = 0, phi = |x|.
inline double eikonal_value(double x, double t, double T) {
  return std::max(0.0, std::abs(x) - (T - t));
}

/// Brute force over every control sequence for the scalar system
/// x_{k+1} = x_k + h u (A = 0, F = u), cost = terminal(whole sample list).
inline double enumerate_scalar(std::vector<double> samples, int remaining, double h,
                               const std::vector<double>& controls,
                               const std::function<double(const std::vector<double>&)>& terminal,
                               long long* leaves = nullptr) {
  if (remaining == 0) {
    if (leaves) ++*leaves;
    return terminal(samples);
  }
  double best = std::numeric_limits<double>::infinity();
  for (double u : controls) {
    samples.push_back(samples.back() + h * u);
    best = std::min(best, enumerate_scalar(samples, remaining - 1, h, controls, terminal, leaves));
    samples.pop_back();
  }
  return best;
}

inline double abs_last(const std::vector<double>& xs) { return std::abs(xs.back()); }

inline double max_abs(const std::vector<double>& xs) {
  double m = 0.0;
  for (double x : xs) m = std::max(m, std::abs(x));
  return m;
}

/// x' = -x + 1 from x(0) = 0: x(t) = 1 - e^{-t}.
inline double relaxation(double t) { return 1.0 - std::exp(-t); }

/// Least-squares slope of log(err) over log(h).
inline double slope(const std::vector<double>& h, const std::vector<double>& err) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double x = std::log(h[i]), y = std::log(err[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace oracle
