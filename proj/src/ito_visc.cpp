#include "phjb/ito_visc.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "phjb/error.hpp"

namespace phjb {

DerivativeMismatch compare_derivatives(const TestFunctionParts& parts,
                                       const std::vector<Path>& paths) {
  DerivativeMismatch out;
  for (const Path& p : paths) {
    const DupireDerivatives numeric = dupire_derivatives(parts.value, p);
    const HVec dx = parts.dx(p);
    const double dx_scale = std::max(1.0, dx.norm());
    out.worst_dx = std::max(out.worst_dx, (dx - numeric.dx).lpNorm<Eigen::Infinity>() / dx_scale);
    if (p.last_index() < p.grid().steps()) {
      const auto coarse = dupire_derivatives(parts.value, refine_linear(p, 256)).dt;
      const auto fine = dupire_derivatives(parts.value, refine_linear(p, 512)).dt;
      const double extrapolated = 2.0 * *fine - *coarse;
      const double dt = parts.dt(p);
      out.worst_dt = std::max(out.worst_dt, std::abs(dt - extrapolated) / std::max(1.0, std::abs(dt)));
    }
    ++out.checked;
  }
  return out;
}

TestFunctionPhi::TestFunctionPhi(TestFunctionParts parts, const std::vector<Path>& paths)
    : parts_(std::move(parts)) {
  if (!parts_.value || !parts_.dt || !parts_.dx) {
    throw PreconditionError("test function '" + parts_.name + "' is missing a component");
  }
  validation_ = compare_derivatives(parts_, paths);
  if (validation_.worst_dx > 1e-5 || validation_.worst_dt > 1e-5) {
    std::ostringstream msg;
    msg << "test function '" << parts_.name << "': analytic derivatives disagree with numerical ones"
        << " (dx " << validation_.worst_dx << ", dt " << validation_.worst_dt << ")";
    throw PreconditionError(msg.str());
  }
}

namespace {

std::vector<HVec> cylinder_args(const std::vector<double>& taus, const Path& g) {
  std::vector<HVec> xs{g.back()};
  const double t = g.horizon();
  for (double tau : taus) xs.push_back(g.value_at(std::min(t, tau)));
  return xs;
}

}  // namespace

TestFunctionParts cylinder(CylinderSpec spec) {
  for (double tau : spec.taus) {
    if (tau < 0.0) throw PreconditionError("cylinder: negative sample time");
  }
  TestFunctionParts parts;
  parts.name = spec.name;
  auto shared = std::make_shared<CylinderSpec>(std::move(spec));
  parts.value = [shared](const Path& g) {
    return shared->f(g.horizon(), cylinder_args(shared->taus, g));
  };
  parts.dt = [shared](const Path& g) {
    return shared->f_t(g.horizon(), cylinder_args(shared->taus, g));
  };
  parts.dx = [shared](const Path& g) {
    const double t = g.horizon();
    const std::vector<HVec> grads = shared->grad(t, cylinder_args(shared->taus, g));
    HVec dx = grads.at(0);
    for (std::size_t j = 0; j < shared->taus.size(); ++j) {
      // g(min(t, tau_j)) moves with the endpoint exactly when tau_j >= t.
      if (shared->taus[j] >= t - 1e-12 * std::max(1.0, t)) dx += grads.at(j + 1);
    }
    return dx;
  };
  parts.a_star_dx_continuous = true;
  return parts;
}

OuterFunction OuterFunction::zero() {
  return {[](double, double) { return 0.0; }, [](double, double) { return 0.0; },
          [](double, double) { return 0.0; }};
}

GaugePack GaugePack::none() { return GaugePack{}; }

GaugePack GaugePack::anchored(const Path& anchor, double delta) {
  GaugePack pack;
  pack.weights = {delta};
  pack.anchors = {anchor};
  return pack;
}

void GaugePack::validate() const {
  if (weights.size() != anchors.size()) throw PreconditionError("gauge pack: weights/anchors mismatch");
  if (params.M < 2.0) throw PreconditionError("gauge pack: M must be >= 2");
  double total = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!(weights[i] >= 0.0)) throw PreconditionError("gauge pack: negative weight");
    total += weights[i];
    if (sup_norm(anchors[i]) > bound) throw PreconditionError("gauge pack: anchor exceeds N");
  }
  if (total > bound) throw PreconditionError("gauge pack: total weight exceeds N");
}

namespace {

void require_earlier(const Path& anchor, const Path& g) {
  if (anchor.horizon() > g.horizon()) {
    throw PreconditionError("gauge pack: anchor horizon exceeds the evaluation horizon");
  }
}

}  // namespace

double GaugePack::value(const Path& g) const {
  double v = outer.h(g.horizon(), eval_upsilon(params, g));
  for (std::size_t i = 0; i < weights.size(); ++i) {
    require_earlier(anchors[i], g);
    v += weights[i] * eval_upsilon_pair(params, anchors[i], g, true);
  }
  return v;
}

double GaugePack::dt(const Path& g) const {
  const double s = g.horizon();
  double v = outer.h_t(s, eval_upsilon(params, g));
  for (std::size_t i = 0; i < weights.size(); ++i) v += 2.0 * weights[i] * (s - anchors[i].horizon());
  return v;
}

HVec GaugePack::dx(const Path& g) const {
  HVec v = outer.h_y(g.horizon(), eval_upsilon(params, g)) * grad_upsilon(params, g);
  for (std::size_t i = 0; i < weights.size(); ++i) {
    require_earlier(anchors[i], g);
    v += weights[i] * grad_upsilon(params, gauge_difference(anchors[i], g));
  }
  return v;
}

double ito_residual(const TestFunctionPhi& phi, const Coefficients& c, const Path& g,
                    const ControlSignal& u, double tbar, double s, const SolveOptions& options) {
  if (!phi.a_star_dx_continuous()) {
    throw PreconditionError("ito_residual: A* dx phi must be continuous");
  }
  const TimeGrid& grid = g.grid();
  const int ib = grid.index_of(tbar);
  const int is = grid.index_of(s);
  if (ib < g.last_index() || is <= ib) throw PreconditionError("ito_residual: need t <= tbar < s");
  const Path x = mild_solve(c, g, u, s, options);
  const SpectralSpace& space = g.space();
  auto integrand = [&](int k, Control v) {
    const Path y = x.truncated(k);
    const HVec p = phi.dx(y);
    return phi.dt(y) + space.adjoint_apply(p).dot(y.back()) + p.dot(c.drift(y, v));
  };
  double quad = 0.0;
  for (int k = ib; k < is; ++k) {
    const Control v = u.on_interval(k);
    quad += 0.5 * grid.step * (integrand(k, v) + integrand(k + 1, v));
  }
  return phi(x) - phi(x.truncated(ib)) - quad;
}

double upsilon_inequality_check(const Coefficients& c, const Path& g, const Path& eta,
                                const ControlSignal& u, double s, double M,
                                const SolveOptions& options) {
  if (M < 2.0) throw PreconditionError("upsilon_inequality_check: M must be >= 2");
  if (eta.last_index() != g.last_index()) {
    throw PreconditionError("upsilon_inequality_check: eta and g need the same horizon");
  }
  const GaugeParams params{M};
  const TimeGrid& grid = g.grid();
  const int ti = g.last_index();
  const int is = grid.index_of(s);
  if (is < ti) throw PreconditionError("upsilon_inequality_check: s precedes the horizon");
  const Path x = mild_solve(c, g, u, s, options);
  auto diff = [&](int k) { return x.truncated(k) - extend_semigroup(eta, grid.time(k)); };
  auto integrand = [&](int k, Control v) {
    return grad_upsilon(params, diff(k)).dot(c.drift(x.truncated(k), v));
  };
  double rhs = eval_upsilon(params, diff(ti));
  for (int k = ti; k < is; ++k) {
    const Control v = u.on_interval(k);
    rhs += 0.5 * grid.step * (integrand(k, v) + integrand(k + 1, v));
  }
  return rhs - eval_upsilon(params, diff(is));
}

HjbResidual viscosity_check(const PathFunctional& w, const TestFunctionPhi& phi,
                            const GaugePack& gauge, const Path& point, Side side,
                            const Coefficients& c, const std::vector<Path>& net,
                            const ViscosityOptions& options) {
  if (!phi.a_star_dx_continuous()) throw PreconditionError("viscosity_check: phi is not in the test class");
  if (point.last_index() >= point.grid().steps()) {
    throw PreconditionError("viscosity_check: the touching point must have horizon < T");
  }
  gauge.validate();
  const double t = point.horizon();
  const double sign = side == Side::kSub ? 1.0 : -1.0;
  // Sub: w - phi - g has a max 0 at the point. Super: w + phi + g has a min 0,
  // i.e. -(w + phi + g) has a max 0.
  const PathFunctional gap = [&](const Path& p) {
    return side == Side::kSub ? w(p) - phi(p) - gauge.value(p) : -(w(p) + phi(p) + gauge.value(p));
  };

  HjbResidual r;
  r.side = side;
  r.time = t;
  r.tolerance = options.tolerance;
  const double at_point = gap(point);
  if (std::abs(at_point) > options.premise_tolerance) {
    std::ostringstream msg;
    msg << "viscosity_check: test functional does not touch w at the point (gap " << at_point << ")";
    throw PremiseViolation(msg.str(), point, at_point);
  }
  std::vector<Path> later;
  bool has_point = false;
  r.worst_net_gap = at_point;
  for (const Path& eta : net) {
    if (!eta.grid().same_as(point.grid())) throw PreconditionError("viscosity_check: net grid mismatch");
    if (eta.horizon() < t) continue;
    const double v = gap(eta);
    if (v > options.premise_tolerance) {
      std::ostringstream msg;
      msg << "viscosity_check: premise fails on the net at horizon " << eta.horizon() << " (gap " << v << ")";
      throw PremiseViolation(msg.str(), eta, v);
    }
    r.worst_net_gap = std::max(r.worst_net_gap, v);
    has_point = has_point || eta == point;
    later.push_back(eta);
  }
  if (!has_point) later.push_back(point);
  r.net_size = later.size();

  if (options.run_bp) {
    const double eps = 2.0 * options.premise_tolerance + 1e-15;
    const BPResult bp = bp_search(gap, later, upsilon_bar_gauge(), eps, point);
    r.bp_confirms_point = later[bp.maximizer] == point;
  }

  const HVec dphi = phi.dx(point);
  const HVec p = sign * (dphi + gauge.dx(point));
  r.dt_phi = phi.dt(point);
  r.dt_gauge = gauge.dt(point);
  r.pairing = point.space().adjoint_apply(dphi).dot(point.back());
  r.hamiltonian = hamiltonian(c, point, p, options.sense).value;
  r.margin = sign * (r.dt_phi + r.dt_gauge + r.pairing) + r.hamiltonian;
  r.passed = side == Side::kSub ? r.margin >= -options.tolerance : r.margin <= options.tolerance;
  return r;
}

double terminal_gap(const PathFunctional& w, const Coefficients& c,
                    const std::vector<Path>& terminal_paths, Side side) {
  double worst = -INFINITY;
  for (const Path& p : terminal_paths) {
    if (p.last_index() != p.grid().steps()) throw PreconditionError("terminal_gap: path horizon is not T");
    const double d = w(p) - c.terminal_cost(p);
    worst = std::max(worst, side == Side::kSub ? d : -d);
  }
  return worst;
}

ClassicalReport classical_check(const TestFunctionPhi& w, const Coefficients& c,
                                const std::vector<Path>& points, const ClassicalOptions& options) {
  ClassicalReport report;
  for (const Path& g : points) {
    ClassicalPoint cp;
    cp.time = g.horizon();
    if (g.last_index() == g.grid().steps()) {
      cp.terminal = true;
      cp.residual = std::abs(w(g) - c.terminal_cost(g));
      report.terminal_mismatch = std::max(report.terminal_mismatch, cp.residual);
      report.points.push_back(cp);
      continue;
    }
    const double h = options.kink_step;
    const double center = w(g);
    for (int k = 0; k < g.space().dim(); ++k) {
      const HVec e = h * g.space().unit(k);
      const double right = (w(vertical_bump(g, e)) - center) / h;
      const double left = (center - w(vertical_bump(g, -e))) / h;
      cp.kink = std::max(cp.kink, std::abs(right - left));
    }
    cp.differentiable = cp.kink <= options.kink_tolerance;
    if (!cp.differentiable) {
      ++report.non_differentiable;
      report.points.push_back(cp);
      continue;
    }
    const HVec dx = w.dx(g);
    cp.residual = w.dt(g) + g.space().adjoint_apply(dx).dot(g.back()) +
                  hamiltonian(c, g, dx, options.sense).value;
    report.max_residual = std::max(report.max_residual, std::abs(cp.residual));
    report.points.push_back(cp);
  }
  report.passed = report.max_residual <= options.tolerance &&
                  report.terminal_mismatch <= options.tolerance;
  return report;
}

Coefficients perturbed(const Coefficients& c, const SpacePtr& space, Perturbation kind, double eps) {
  Coefficients out = c;
  out.lipschitz = c.lipschitz + std::abs(eps);
  switch (kind) {
    case Perturbation::kTerminal:
      out.name = c.name + "+eps.phi";
      out.terminal_cost = [phi = c.terminal_cost, eps](const Path& g) { return phi(g) + eps; };
      break;
    case Perturbation::kRunning:
      out.name = c.name + "+eps.q";
      out.running_cost = [q = c.running_cost, eps](const Path& g, Control u) { return q(g, u) + eps; };
      break;
    case Perturbation::kDrift:
      out.name = c.name + "+eps.F";
      out.drift = [f = c.drift, e = HVec(eps * space->unit(0))](const Path& g, Control u) {
        return HVec(f(g, u) + e);
      };
      break;
  }
  return out;
}

StabilityReport stability_experiment(const Coefficients& c, const SpacePtr& space,
                                     const TimeGrid& grid, Perturbation kind,
                                     const std::vector<double>& epsilons,
                                     const std::vector<Path>& tests,
                                     const StabilityOptions& options) {
  if (tests.empty()) throw PreconditionError("stability_experiment: empty test set");
  StabilityReport report;
  report.kind = kind;
  report.bound_factor = std::exp(c.lipschitz * grid.final_time);
  ValueTable base_table;
  std::vector<double> base;
  for (const Path& p : tests) base.push_back(value_dpp(c, p, options.value, &base_table).value);

  std::vector<double> order = epsilons;
  std::sort(order.begin(), order.end(), std::greater<>());
  for (double eps : order) {
    if (!(eps > 0.0)) throw PreconditionError("stability_experiment: eps must be > 0");
    StabilityEntry e;
    e.eps = eps;
    const Coefficients ce = perturbed(c, space, kind, eps);
    e.hypothesis = validate_hypothesis(ce, space, grid, options.hypothesis_trials, options.seed).passed;
    if (e.hypothesis) {
      ValueTable table;
      for (std::size_t i = 0; i < tests.size(); ++i) {
        e.gap = std::max(e.gap, std::abs(value_dpp(ce, tests[i], options.value, &table).value - base[i]));
      }
      e.ratio = e.gap / eps;
    } else {
      e.gap = e.ratio = NAN;
    }
    report.entries.push_back(e);
  }

  bool hypotheses = true;
  for (std::size_t i = 0; i < report.entries.size(); ++i) {
    const auto& e = report.entries[i];
    hypotheses = hypotheses && e.hypothesis;
    if (!e.hypothesis) continue;
    report.within_bound = report.within_bound && e.gap <= report.bound_factor * e.eps;
    if (i > 0 && report.entries[i - 1].hypothesis) {
      report.monotone = report.monotone && e.gap <= report.entries[i - 1].gap;
    }
  }
  if (options.limit_probe) report.probe = options.limit_probe();
  report.passed = hypotheses && report.monotone && report.within_bound && report.probe.value_or(true);
  return report;
}

}  // namespace phjb
