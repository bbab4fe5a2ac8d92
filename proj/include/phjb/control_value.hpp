#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "phjb/dynamics.hpp"

namespace phjb {

/// Trapezoid cost on [t, T] plus phi(X_T). Interval k contributes
///   dt/2 [q(X_{<=k}, u_k) + q(X_{<=k+1}, u_k)],
/// and the sum is accumulated from T backwards so that it matches the
/// dynamic-programming recursion bit for bit.
double cost_J(const Coefficients& c, const Path& g, const ControlSignal& u,
              const SolveOptions& options = {});

/// Running cost of one interval, as used by cost_J and value_dpp.
double interval_cost(const Coefficients& c, const Path& prefix, const Path& next, Control u);

enum class Sense { kSup, kInf };

struct HamiltonianValue {
  double value = 0.0;
  Control argopt = 0.0;  // first optimal control in list order
};

/// opt over u in U of (p, F(g, u)) + q(g, u). kSup gives the printed
/// Hamiltonian; kInf is the one matching a minimized cost.
HamiltonianValue hamiltonian(const Coefficients& c, const Path& g, const HVec& p,
                             Sense sense = Sense::kSup);

/// Memo of the backward recursion. Keys are (step, quantized signature).
/// Concurrent readers and writers are allowed; the first insert wins.
class ValueTable {
 public:
  struct Entry {
    double value = 0.0;
    std::vector<Control> plan;  // optimal controls from the keyed step to T
  };

  std::optional<Entry> find(const std::string& key) const;
  /// Inserts unless present; returns the stored entry either way.
  Entry insert_if_absent(const std::string& key, Entry entry);
  std::size_t size() const;

 private:
  mutable std::shared_mutex mutex_;
  std::map<std::string, Entry> entries_;
};

struct ValueOptions {
  /// Signature resolution. 0 disables memoization (exhaustive enumeration).
  double quantum = 1e-9;
  /// Cap on |U|^steps when enumerating without memoization.
  std::uint64_t enumeration_budget = 20'000'000;
  /// Evaluate the root branches concurrently.
  bool parallel = false;
  SolveOptions solve;
};

struct ValueResult {
  double value = 0.0;
  std::vector<Control> controls;
  Path trajectory;
  std::size_t memo_entries = 0;
};

/// Minimum of cost_J over all piecewise-constant controls on the remaining
/// grid intervals. Pass a shared table to reuse work across calls with the
/// same coefficients and grid.
ValueResult value_dpp(const Coefficients& c, const Path& g, const ValueOptions& options = {},
                      ValueTable* table = nullptr);

/// |V(g) - min over controls on [t, s] of [int_t^s q + V(X_s)]|.
double verify_dpp_consistency(const Coefficients& c, const Path& g, double s,
                              const ValueOptions& options = {}, ValueTable* table = nullptr);

/// Largest |V_memo - V_enumerated| over random prefixes; zero when the
/// declared statistic (or the quantized prefix) is a faithful signature.
double validate_signature(const Coefficients& c, const SpacePtr& space, const TimeGrid& grid,
                          int trials, std::uint64_t seed, const ValueOptions& options = {});

struct ValueConstants {
  double step = 0.0;
  double bound = 0.0;       // |V(g)| / (1 + ||g||_0)
  double time_shift = 0.0;  // |V(g_{t,tbar,A}) - V(g)| / ((1 + ||g||_0)(tbar - t))
  double space = 0.0;       // |V(g) - V(h)| / ||g - h||_0, equal horizons
  double combined = 0.0;    // |V(g_{t,tbar,A}) - V(h)| / ((1+||h||_0)(tbar-t) + ||h-g||_0)
};

struct ValueRegularityReport {
  std::vector<ValueConstants> per_grid;
  bool finite = true;
  bool stable = true;
  bool passed = true;
};

/// Empirical constants of the value bounds on fixed seeded instances, at
/// `grid` and `refinements` successive halvings. Stable means every constant
/// stays within `stability` (relative) of its coarse-grid value.
ValueRegularityReport verify_value_regularity(const Coefficients& c, const SpacePtr& space,
                                              const TimeGrid& grid, int trials, std::uint64_t seed,
                                              int refinements = 2, double stability = 0.1,
                                              const ValueOptions& options = {});

}  // namespace phjb
