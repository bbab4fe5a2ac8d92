#include "phjb/dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "phjb/error.hpp"
#include "phjb/sampling.hpp"

namespace phjb {

namespace {

void require_finite(const HVec& v, const Path& at, Control u) {
  if (!v.allFinite()) {
    std::ostringstream msg;
    msg << "non-finite drift at horizon " << at.horizon() << " with control " << u
        << " (|gamma(t)| = " << at.back().norm() << ")";
    throw NumericalError(msg.str());
  }
}

}  // namespace

ControlSignal ControlSignal::constant(const TimeGrid& grid, double from, double to, Control u) {
  const int a = grid.index_of(from);
  const int b = grid.index_of(to);
  if (b < a) throw PreconditionError("ControlSignal::constant: to < from");
  return ControlSignal{grid, a, std::vector<Control>(static_cast<std::size_t>(b - a), u)};
}

Control ControlSignal::on_interval(int k) const {
  if (k < start_index || k >= end_index()) {
    throw PreconditionError("control signal undefined on interval " + std::to_string(k));
  }
  return values[static_cast<std::size_t>(k - start_index)];
}

HVec mild_step(const Coefficients& c, const Path& prefix, Control u, const SolveOptions& options) {
  const SpectralSpace& space = prefix.space();
  const double h = prefix.grid().step;
  const HVec f0 = c.drift(prefix, u);
  require_finite(f0, prefix, u);
  const HVec decayed_f0 = space.semigroup_apply(h, f0);
  const HVec base = space.semigroup_apply(h, prefix.back());

  auto correct = [&](const HVec& guess) {
    const Path extended = prefix.appended(guess);
    const HVec f1 = c.drift(extended, u);
    require_finite(f1, extended, u);
    return HVec(base + (0.5 * h) * (decayed_f0 + f1));
  };

  HVec next = correct(base + h * decayed_f0);
  if (options.picard_to_convergence) {
    for (int it = 0; it < options.picard_cap; ++it) {
      HVec again = correct(next);
      const double change = (again - next).norm();
      next = std::move(again);
      if (change <= options.picard_tolerance * std::max(1.0, next.norm())) break;
    }
  }
  return next;
}

Path mild_solve(const Coefficients& c, const Path& g, const ControlSignal& u,
                std::optional<double> until, const SolveOptions& options) {
  const TimeGrid& grid = g.grid();
  const int last = until ? grid.index_of(*until) : grid.steps();
  if (last < g.last_index()) throw PreconditionError("mild_solve: until precedes the path horizon");
  if (u.start_index > g.last_index() || u.end_index() < last) {
    throw PreconditionError("mild_solve: control does not cover [t, until]");
  }
  Path current = g;
  for (int k = g.last_index(); k < last; ++k) {
    HVec next = mild_step(c, current, u.on_interval(k), options);
    current = current.appended(next);
  }
  return current;
}

const HypothesisLine& HypothesisReport::line(const std::string& name) const {
  for (const auto& l : lines) {
    if (l.name == name) return l;
  }
  throw PreconditionError("no hypothesis line named " + name);
}

HypothesisReport validate_hypothesis(const Coefficients& c, const SpacePtr& space,
                                     const TimeGrid& grid, int trials, std::uint64_t seed) {
  if (trials < 1) throw PreconditionError("validate_hypothesis: trials must be >= 1");
  if (c.controls.empty()) throw PreconditionError("validate_hypothesis: empty control set");
  Rng rng(seed);
  const double L = c.lipschitz;
  const int n = grid.steps();
  constexpr std::array<double, 3> kScales = {0.1, 1.0, 4.0};

  double f_growth = 0, f_lip = 0, q_lip = 0, q_growth = 0, phi_lip = 0, phi_growth = 0;
  auto bump = [](double& worst, double ratio) {
    if (std::isnan(ratio)) ratio = INFINITY;
    worst = std::max(worst, ratio);
  };

  for (int trial = 0; trial < trials; ++trial) {
    const double scale = kScales[rng.index(kScales.size())];
    const int ti = static_cast<int>(rng.index(static_cast<std::size_t>(n) + 1));
    const Path gamma = random_path(rng, space, grid, ti, scale);
    const Control u = c.controls[rng.index(c.controls.size())];

    Path eta = gamma;
    switch (rng.index(3)) {
      case 0: {
        const int si = static_cast<int>(rng.index(static_cast<std::size_t>(n) + 1));
        eta = random_path(rng, space, grid, si, scale);
        break;
      }
      case 1:
        eta = gamma + random_path(rng, space, grid, ti, 0.01 * scale);
        break;
      default: {
        const int si = ti + static_cast<int>(rng.index(static_cast<std::size_t>(n - ti) + 1));
        eta = extend_semigroup(gamma, grid.time(si)) + random_path(rng, space, grid, si, 0.01 * scale);
        break;
      }
    }

    const HVec fg = c.drift(gamma, u);
    const double norm_g = sup_norm(gamma);
    bump(f_growth, fg.squaredNorm() / (L * L * (1.0 + norm_g * norm_g)));
    const double qg = c.running_cost(gamma, u);
    bump(q_growth, std::abs(qg) / (L * (1.0 + norm_g)));
    const double d = metric_d_infty(gamma, eta);
    if (d > 0.0) {
      bump(f_lip, (fg - c.drift(eta, u)).norm() / (L * d));
      bump(q_lip, std::abs(qg - c.running_cost(eta, u)) / (L * d));
    }

    const Path zeta = random_path(rng, space, grid, n, scale);
    Path zeta2 = zeta;
    switch (rng.index(3)) {
      case 0:
        zeta2 = random_path(rng, space, grid, n, scale);
        break;
      case 1:
        zeta2 = zeta + random_path(rng, space, grid, n, 0.01 * scale);
        break;
      default: {
        const double factor = 1.0 + 0.05 * rng.normal();
        std::vector<HVec> scaled;
        for (const auto& x : zeta.samples()) scaled.push_back(factor * x);
        zeta2 = Path(space, grid, std::move(scaled));
        break;
      }
    }
    const double phi1 = c.terminal_cost(zeta);
    const double norm_z = sup_norm(zeta);
    bump(phi_growth, std::abs(phi1) / (L * (1.0 + norm_z)));
    const double dz = sup_norm(zeta - zeta2);
    if (dz > 0.0) bump(phi_lip, std::abs(phi1 - c.terminal_cost(zeta2)) / (L * dz));
  }

  HypothesisReport report;
  report.trials = trials;
  auto add = [&](const char* name, double worst) {
    const bool ok = worst <= 1.0 + 1e-9;
    report.lines.push_back({name, worst, ok});
    report.passed = report.passed && ok;
  };
  add("F growth", f_growth);
  add("F lipschitz", f_lip);
  add("q lipschitz", q_lip);
  add("q growth", q_growth);
  add("phi lipschitz", phi_lip);
  add("phi growth", phi_growth);
  return report;
}

StateEstimateReport verify_state_estimates(const Coefficients& c, const SpacePtr& space,
                                           const TimeGrid& grid, int trials, std::uint64_t seed,
                                           int refinements, double stability) {
  if (trials < 1) throw PreconditionError("verify_state_estimates: trials must be >= 1");
  const int n = grid.steps();
  if (n < 1) throw PreconditionError("verify_state_estimates: grid needs at least one step");

  struct Instance {
    PathSketch gamma, eta;
    int tbar_block;
    ControlSketch control;
  };
  Rng rng(seed);
  std::vector<Instance> instances;
  for (int trial = 0; trial < trials; ++trial) {
    const int ti = static_cast<int>(rng.index(static_cast<std::size_t>(n)));
    const double scale = rng.bernoulli(0.5) ? 1.0 : 3.0;
    PathSketch gamma = random_sketch(rng, space->dim(), grid.step, ti, scale);
    PathSketch eta = gamma.plus(random_sketch(rng, space->dim(), grid.step, ti, 0.1 * scale));
    const int tb = ti + 1 + static_cast<int>(rng.index(static_cast<std::size_t>(n - ti)));
    instances.push_back({std::move(gamma), std::move(eta), tb,
                         random_control_sketch(rng, c.controls, grid.step, ti, n)});
  }

  StateEstimateReport report;
  report.gronwall_bound = std::exp(c.lipschitz * space->semigroup_bound() * grid.final_time);
  for (int level = 0; level <= refinements; ++level) {
    const int factor = 1 << level;
    const TimeGrid fine = grid.refined(factor);
    StateConstants k;
    k.step = fine.step;
    for (const auto& inst : instances) {
      const Path g = inst.gamma.materialize(space, fine);
      const Path h = inst.eta.materialize(space, fine);
      const ControlSignal u = inst.control.materialize(fine);
      const Path xg = mild_solve(c, g, u);
      const Path xh = mild_solve(c, h, u);
      const double norm_g = sup_norm(g);
      const double gap = sup_norm(g - h);
      if (gap > 0.0) k.lipschitz_c1 = std::max(k.lipschitz_c1, sup_norm(xg - xh) / gap);
      k.growth_c1 = std::max(k.growth_c1, sup_norm(xg) / (1.0 + norm_g));
      const int ti = g.last_index();
      for (int s = ti + 1; s <= fine.steps(); ++s) {
        const double elapsed = (s - ti) * fine.step;
        const HVec free = space->semigroup_apply(elapsed, g.back());
        k.speed = std::max(k.speed, (xg.at(s) - free).norm() / ((1.0 + norm_g) * elapsed));
      }
      const double tbar = inst.tbar_block * grid.step;
      const Path shifted = extend_semigroup(g, tbar);
      const int tb = fine.index_of(tbar);
      ControlSignal tail{fine, tb,
                         std::vector<Control>(u.values.begin() + (tb - u.start_index), u.values.end())};
      const Path xs = mild_solve(c, shifted, tail);
      const double denom = (1.0 + sup_norm(h)) * (tbar - g.horizon()) + gap;
      k.shift = std::max(k.shift, sup_norm(xh - xs) / denom);
    }
    report.per_grid.push_back(k);
  }

  auto finite = [](const StateConstants& k) {
    return std::isfinite(k.lipschitz_c1) && std::isfinite(k.growth_c1) && std::isfinite(k.speed) &&
           std::isfinite(k.shift);
  };
  auto close = [stability](double a, double b) {
    return std::abs(a - b) <= stability * std::max(std::abs(a), 1e-9);
  };
  const StateConstants& base = report.per_grid.front();
  for (const auto& k : report.per_grid) {
    report.finite = report.finite && finite(k);
    report.stable = report.stable && close(base.lipschitz_c1, k.lipschitz_c1) &&
                    close(base.growth_c1, k.growth_c1) && close(base.speed, k.speed) &&
                    close(base.shift, k.shift);
  }
  report.passed = report.finite && report.stable;
  return report;
}

}  // namespace phjb
