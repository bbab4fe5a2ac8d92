#include "phjb/control_value.hpp"

#include <cmath>
#include <cstring>
#include <future>
#include <limits>
#include <mutex>

#include "phjb/error.hpp"
#include "phjb/sampling.hpp"

namespace phjb {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// |U|^m, saturating at UINT64_MAX.
std::uint64_t tree_size(std::size_t branching, int m) {
  std::uint64_t total = 1;
  for (int i = 0; i < m; ++i) {
    if (total > std::numeric_limits<std::uint64_t>::max() / branching) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    total *= branching;
  }
  return total;
}

void append_quantized(std::string& key, double x, double quantum) {
  const double scaled = std::round(x / quantum);
  if (!std::isfinite(scaled) || std::abs(scaled) > 9.0e18) {
    throw NumericalError("value signature overflow; increase the memo quantum");
  }
  const auto q = static_cast<std::int64_t>(scaled);
  char buf[sizeof q];
  std::memcpy(buf, &q, sizeof q);
  key.append(buf, sizeof q);
}

class Recursion {
 public:
  Recursion(const Coefficients& c, const ValueOptions& options, ValueTable* table, int steps)
      : c_(c), options_(options), table_(table), steps_(steps) {}

  ValueTable::Entry solve(const Path& p) const {
    if (p.last_index() == steps_) return {c_.terminal_cost(p), {}};
    const bool memo = options_.quantum > 0.0;
    std::string k;
    if (memo) {
      k = key(p);
      if (auto hit = table_->find(k)) return *hit;
    }
    ValueTable::Entry best{kInf, {}};
    for (Control u : c_.controls) {
      const Path next = p.appended(mild_step(c_, p, u, options_.solve));
      const ValueTable::Entry child = solve(next);
      consider(best, u, interval_cost(c_, p, next, u), child);
    }
    if (!std::isfinite(best.value)) throw NumericalError("non-finite value in the control tree");
    return memo ? table_->insert_if_absent(k, std::move(best)) : best;
  }

  ValueTable::Entry solve_parallel(const Path& p) const {
    if (p.last_index() == steps_) return solve(p);
    std::vector<std::future<std::pair<double, ValueTable::Entry>>> branches;
    for (Control u : c_.controls) {
      branches.push_back(std::async(std::launch::async, [this, &p, u] {
        const Path next = p.appended(mild_step(c_, p, u, options_.solve));
        return std::make_pair(interval_cost(c_, p, next, u), solve(next));
      }));
    }
    ValueTable::Entry best{kInf, {}};
    for (std::size_t i = 0; i < branches.size(); ++i) {
      auto [r, child] = branches[i].get();
      consider(best, c_.controls[i], r, child);
    }
    if (!std::isfinite(best.value)) throw NumericalError("non-finite value in the control tree");
    return best;
  }

  static void consider(ValueTable::Entry& best, Control u, double running,
                       const ValueTable::Entry& child) {
    const double v = running + child.value;
    if (v < best.value) {
      best.value = v;
      best.plan.assign(1, u);
      best.plan.insert(best.plan.end(), child.plan.begin(), child.plan.end());
    }
  }

 private:
  std::string key(const Path& p) const {
    std::string k;
    const int step = p.last_index();
    k.append(reinterpret_cast<const char*>(&step), sizeof step);
    if (c_.statistic) {
      for (double x : c_.statistic(p)) append_quantized(k, x, options_.quantum);
    } else {
      for (const HVec& x : p.samples()) {
        for (int i = 0; i < x.size(); ++i) append_quantized(k, x[i], options_.quantum);
      }
    }
    return k;
  }

  const Coefficients& c_;
  const ValueOptions& options_;
  ValueTable* table_;
  int steps_;
};

void check_budget(const Coefficients& c, const ValueOptions& options, int remaining) {
  if (options.quantum > 0.0) return;
  const std::uint64_t size = tree_size(c.controls.size(), remaining);
  if (size > options.enumeration_budget) {
    throw BudgetExceeded("enumeration of " + std::to_string(c.controls.size()) + "^" +
                         std::to_string(remaining) + " control sequences exceeds the budget of " +
                         std::to_string(options.enumeration_budget));
  }
}

}  // namespace

double interval_cost(const Coefficients& c, const Path& prefix, const Path& next, Control u) {
  return 0.5 * prefix.grid().step * (c.running_cost(prefix, u) + c.running_cost(next, u));
}

double cost_J(const Coefficients& c, const Path& g, const ControlSignal& u,
              const SolveOptions& options) {
  const Path x = mild_solve(c, g, u, std::nullopt, options);
  double total = c.terminal_cost(x);
  for (int k = x.last_index() - 1; k >= g.last_index(); --k) {
    total = interval_cost(c, x.truncated(k), x.truncated(k + 1), u.on_interval(k)) + total;
  }
  return total;
}

HamiltonianValue hamiltonian(const Coefficients& c, const Path& g, const HVec& p, Sense sense) {
  if (c.controls.empty()) throw PreconditionError("hamiltonian: empty control set");
  g.space().check_dim(p);
  HamiltonianValue best{sense == Sense::kSup ? -kInf : kInf, c.controls.front()};
  for (Control u : c.controls) {
    const double v = p.dot(c.drift(g, u)) + c.running_cost(g, u);
    if (sense == Sense::kSup ? v > best.value : v < best.value) best = {v, u};
  }
  return best;
}

std::optional<ValueTable::Entry> ValueTable::find(const std::string& key) const {
  std::shared_lock lock(mutex_);
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

ValueTable::Entry ValueTable::insert_if_absent(const std::string& key, Entry entry) {
  std::unique_lock lock(mutex_);
  return entries_.try_emplace(key, std::move(entry)).first->second;
}

std::size_t ValueTable::size() const {
  std::shared_lock lock(mutex_);
  return entries_.size();
}

ValueResult value_dpp(const Coefficients& c, const Path& g, const ValueOptions& options,
                      ValueTable* table) {
  if (c.controls.empty()) throw PreconditionError("value_dpp: empty control set");
  const int steps = g.grid().steps();
  check_budget(c, options, steps - g.last_index());
  ValueTable local;
  if (table == nullptr) table = &local;
  const Recursion rec(c, options, table, steps);
  ValueTable::Entry best = options.parallel ? rec.solve_parallel(g) : rec.solve(g);

  ControlSignal u{g.grid(), g.last_index(), best.plan};
  Path trajectory = mild_solve(c, g, u, std::nullopt, options.solve);
  return ValueResult{best.value, std::move(best.plan), std::move(trajectory), table->size()};
}

double verify_dpp_consistency(const Coefficients& c, const Path& g, double s,
                              const ValueOptions& options, ValueTable* table) {
  const TimeGrid& grid = g.grid();
  const int si = grid.index_of(s);
  if (si < g.last_index()) throw PreconditionError("verify_dpp_consistency: s precedes the horizon");
  check_budget(c, options, grid.steps() - g.last_index());
  ValueTable local;
  if (table == nullptr) table = &local;
  const double v = value_dpp(c, g, options, table).value;

  // min over first-segment controls of [int_t^s q + V(X_s)], summed backwards.
  std::function<double(const Path&)> segment = [&](const Path& p) {
    if (p.last_index() == si) return value_dpp(c, p, options, table).value;
    double best = kInf;
    for (Control u : c.controls) {
      const Path next = p.appended(mild_step(c, p, u, options.solve));
      best = std::min(best, interval_cost(c, p, next, u) + segment(next));
    }
    return best;
  };
  return std::abs(v - segment(g));
}

double validate_signature(const Coefficients& c, const SpacePtr& space, const TimeGrid& grid,
                          int trials, std::uint64_t seed, const ValueOptions& options) {
  Rng rng(seed);
  ValueOptions exhaustive = options;
  exhaustive.quantum = 0.0;
  ValueTable table;
  double worst = 0.0;
  for (int i = 0; i < trials; ++i) {
    const int ti = static_cast<int>(rng.index(static_cast<std::size_t>(grid.steps()) + 1));
    const Path g = random_path(rng, space, grid, ti, 1.0);
    const double memo = value_dpp(c, g, options, &table).value;
    worst = std::max(worst, std::abs(memo - value_dpp(c, g, exhaustive).value));
  }
  return worst;
}

ValueRegularityReport verify_value_regularity(const Coefficients& c, const SpacePtr& space,
                                              const TimeGrid& grid, int trials, std::uint64_t seed,
                                              int refinements, double stability,
                                              const ValueOptions& options) {
  if (trials < 1) throw PreconditionError("verify_value_regularity: trials must be >= 1");
  const int n = grid.steps();
  struct Instance {
    PathSketch gamma, eta;
    int tbar_knot;
  };
  Rng rng(seed);
  std::vector<Instance> instances;
  for (int i = 0; i < trials; ++i) {
    const int ti = static_cast<int>(rng.index(static_cast<std::size_t>(n)));
    const double scale = rng.bernoulli(0.5) ? 0.5 : 1.5;
    PathSketch gamma = random_sketch(rng, space->dim(), grid.step, ti, scale);
    PathSketch eta = gamma.plus(random_sketch(rng, space->dim(), grid.step, ti, 0.1 * scale));
    const int tb = ti + 1 + static_cast<int>(rng.index(static_cast<std::size_t>(n - ti)));
    instances.push_back({std::move(gamma), std::move(eta), tb});
  }

  ValueRegularityReport report;
  for (int level = 0; level <= refinements; ++level) {
    const TimeGrid fine = grid.refined(1 << level);
    ValueTable table;
    auto V = [&](const Path& p) { return value_dpp(c, p, options, &table).value; };
    ValueConstants k;
    k.step = fine.step;
    for (const auto& inst : instances) {
      const Path g = inst.gamma.materialize(space, fine);
      const Path h = inst.eta.materialize(space, fine);
      const double tbar = inst.tbar_knot * grid.step;
      const double vg = V(g);
      const double vh = V(h);
      const double vs = V(extend_semigroup(g, tbar));
      const double norm_g = sup_norm(g);
      const double gap = sup_norm(g - h);
      const double elapsed = tbar - g.horizon();
      k.bound = std::max(k.bound, std::abs(vg) / (1.0 + norm_g));
      k.time_shift = std::max(k.time_shift, std::abs(vs - vg) / ((1.0 + norm_g) * elapsed));
      if (gap > 0.0) k.space = std::max(k.space, std::abs(vg - vh) / gap);
      k.combined = std::max(k.combined, std::abs(vs - vh) / ((1.0 + sup_norm(h)) * elapsed + gap));
    }
    report.per_grid.push_back(k);
  }

  auto close = [stability](double a, double b) {
    return std::abs(a - b) <= stability * std::abs(a) || (a == 0.0 && std::abs(b) <= 1e-12);
  };
  const ValueConstants& base = report.per_grid.front();
  for (const auto& k : report.per_grid) {
    report.finite = report.finite && std::isfinite(k.bound) && std::isfinite(k.time_shift) &&
                    std::isfinite(k.space) && std::isfinite(k.combined);
    report.stable = report.stable && close(base.bound, k.bound) &&
                    close(base.time_shift, k.time_shift) && close(base.space, k.space) &&
                    close(base.combined, k.combined);
  }
  report.passed = report.finite && report.stable;
  return report;
}

}  // namespace phjb
