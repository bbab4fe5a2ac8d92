#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "phjb/path.hpp"

namespace phjb {

/// Controls are labelled by real numbers; the control set is finite.
using Control = double;

/// Problem data (F, q, phi, U, L) of the controlled path-dependent equation
///   dX = A X ds + F(X_s, u(s)) ds,   J = int_t^T q(X_s, u) ds + phi(X_T).
struct Coefficients {
  std::string name;
  std::vector<Control> controls;
  std::function<HVec(const Path&, Control)> drift;
  std::function<double(const Path&, Control)> running_cost;
  std::function<double(const Path&)> terminal_cost;
  double lipschitz = 1.0;
  /// Optional sufficient statistic of a prefix: two prefixes at the same
  /// horizon with equal statistics must have equal values. Used to collapse
  /// the dynamic-programming tree.
  std::function<std::vector<double>(const Path&)> statistic;
};

/// Piecewise-constant control on [t0, t1], one value per grid interval.
struct ControlSignal {
  TimeGrid grid;
  int start_index = 0;
  std::vector<Control> values;

  static ControlSignal constant(const TimeGrid& grid, double from, double to, Control u);
  int end_index() const { return start_index + static_cast<int>(values.size()); }
  /// Control on the interval [k step, (k+1) step].
  Control on_interval(int k) const;
};

struct SolveOptions {
  /// Iterate the trapezoid corrector to convergence instead of a single pass.
  bool picard_to_convergence = false;
  double picard_tolerance = 1e-10;
  int picard_cap = 100;
};

/// One exponential-trapezoid step from the end of `prefix` with control `u`:
///   pred = e^{hA}(X + h F(X, u)),
///   next = e^{hA} X + h/2 [e^{hA} F(X, u) + F(X ++ pred, u)].
HVec mild_step(const Coefficients& c, const Path& prefix, Control u,
               const SolveOptions& options = {});

/// Mild solution X^{g, u} on [0, until] (default T), agreeing with g on [0, t].
Path mild_solve(const Coefficients& c, const Path& g, const ControlSignal& u,
                std::optional<double> until = std::nullopt, const SolveOptions& options = {});

struct HypothesisLine {
  std::string name;
  double worst_ratio = 0.0;
  bool passed = true;
};

struct HypothesisReport {
  std::vector<HypothesisLine> lines;
  int trials = 0;
  bool passed = true;
  const HypothesisLine& line(const std::string& name) const;
};

/// Spot-checks the growth and Lipschitz bounds certified by c.lipschitz on
/// seeded random paths; a line fails if its worst ratio exceeds 1 + 1e-9.
HypothesisReport validate_hypothesis(const Coefficients& c, const SpacePtr& space,
                                     const TimeGrid& grid, int trials, std::uint64_t seed);

struct StateConstants {
  double step = 0.0;
  double lipschitz_c1 = 0.0;   // ||X^g_T - X^h_T||_0 / ||g - h||_0
  double growth_c1 = 0.0;      // ||X^g_T||_0 / (1 + ||g||_0)
  double speed = 0.0;          // |X(s) - e^{(s-t)A} g(t)| / ((1 + ||g||_0)(s - t))
  double shift = 0.0;          // ||X^h_T - X^{g_{t,tbar,A}}_T||_0 / ((1+||h||_0)(tbar-t) + ||h-g||_0)
};

struct StateEstimateReport {
  std::vector<StateConstants> per_grid;
  double gronwall_bound = 0.0;  // e^{L M1 T}
  bool finite = true;
  bool stable = true;
  bool passed = true;
};

/// Smallest empirical constants of the trajectory estimates, computed on the
/// same seeded instances at `grid` and at `refinements` successive halvings.
StateEstimateReport verify_state_estimates(const Coefficients& c, const SpacePtr& space,
                                           const TimeGrid& grid, int trials, std::uint64_t seed,
                                           int refinements = 1, double stability = 0.1);

}  // namespace phjb
