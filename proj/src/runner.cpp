#include "phjb/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

#include "phjb/certificates.hpp"
#include "phjb/error.hpp"
#include "phjb/sampling.hpp"

namespace phjb {

using nlohmann::json;

namespace {

std::string fmt(double x) {
  std::ostringstream out;
  out << x;
  return out.str();
}

// Check parameters. Wrong JSON types are parse errors, out-of-range values
// validation errors; both name the field.
struct Params {
  const json& p;
  std::string where;

  bool has(const char* key) const { return p.is_object() && p.contains(key); }
  std::string field(const char* key) const { return where + "." + key; }

  int integer(const char* key, int def, int lo = 0) const {
    if (!has(key)) return def;
    const json& v = p[key];
    long long out = 0;
    if (v.is_number_integer()) {
      out = v.get<long long>();
    } else {
      const double d = parse_decimal(v, field(key));
      if (d != std::floor(d)) throw ValidationError(field(key) + ": expected an integer");
      out = static_cast<long long>(d);
    }
    if (out < lo) throw ValidationError(field(key) + ": must be >= " + std::to_string(lo));
    return static_cast<int>(out);
  }

  double real(const char* key, double def) const {
    return has(key) ? parse_decimal(p[key], field(key)) : def;
  }

  double positive(const char* key, double def) const {
    const double x = real(key, def);
    if (!(x > 0.0)) throw ValidationError(field(key) + ": must be > 0");
    return x;
  }

  std::vector<double> reals(const char* key, std::vector<double> def) const {
    if (!has(key)) return def;
    const json& v = p[key];
    if (!v.is_array()) throw ParseError(field(key) + ": expected an array");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      out.push_back(parse_decimal(v[i], field(key) + "[" + std::to_string(i) + "]"));
    }
    return out;
  }

  std::string text(const char* key, const std::string& def) const {
    if (!has(key)) return def;
    if (!p[key].is_string()) throw ParseError(field(key) + ": expected a string");
    return p[key].get<std::string>();
  }

  bool flag(const char* key, bool def) const {
    if (!has(key)) return def;
    if (!p[key].is_boolean()) throw ParseError(field(key) + ": expected true or false");
    return p[key].get<bool>();
  }
};

ValueOptions value_options(const Params& p) {
  ValueOptions o;
  o.quantum = p.real("quantum", o.quantum);
  if (o.quantum < 0.0) throw ValidationError(p.field("quantum") + ": must be >= 0");
  o.parallel = p.flag("parallel", false);
  o.solve.picard_to_convergence = p.flag("picard", false);
  return o;
}

// Random prefixes with horizons strictly before T.
std::vector<Path> test_prefixes(const Scenario& s, int count, Rng& rng) {
  std::vector<Path> out;
  const int n = s.grid.steps();
  for (int i = 0; i < count; ++i) {
    const int ti = static_cast<int>(rng.index(static_cast<std::size_t>(n)));
    out.push_back(random_path(rng, s.space, s.grid, ti, rng.uniform(0.3, 1.5)));
  }
  return out;
}

Record check_hypothesis(const Scenario& s, const Coefficients& c, const Params& p) {
  const int trials = p.integer("trials", 2000, 1);
  const HypothesisReport r = validate_hypothesis(c, s.space, s.grid, trials, s.seed);
  Record rec;
  rec.name = "hypothesis";
  for (const HypothesisLine& line : r.lines) {
    rec.margins.push_back({line.name, 1.0 + 1e-9 - line.worst_ratio});
    rec.constants[line.name] = line.worst_ratio;
  }
  rec.details["lipschitz"] = c.lipschitz;
  rec.details["trials"] = trials;
  rec.passed = r.passed;
  return rec;
}

Record check_state_estimates(const Scenario& s, const Coefficients& c, const Params& p) {
  const int trials = p.integer("trials", 30, 1);
  const int refinements = p.integer("refinements", 1, 0);
  const double stability = p.positive("stability", 0.1);
  const StateEstimateReport r =
      verify_state_estimates(c, s.space, s.grid, trials, s.seed, refinements, stability);
  Record rec;
  rec.name = "state_estimates";
  double worst_lipschitz = 0.0;
  for (const StateConstants& k : r.per_grid) {
    const std::string at = "[step=" + fmt(k.step) + "]";
    rec.constants["lipschitz_c1" + at] = k.lipschitz_c1;
    rec.constants["growth_c1" + at] = k.growth_c1;
    rec.constants["speed" + at] = k.speed;
    rec.constants["shift" + at] = k.shift;
    worst_lipschitz = std::max(worst_lipschitz, k.lipschitz_c1);
  }
  rec.constants["gronwall_bound"] = r.gronwall_bound;
  // The scheme may overshoot the continuous Gronwall bound by its own error.
  const double slack = 1.05 * r.gronwall_bound - worst_lipschitz;
  rec.margins.push_back({"lipschitz_vs_gronwall", slack});
  rec.details["finite"] = r.finite;
  rec.details["stable"] = r.stable;
  rec.passed = r.passed && slack >= 0.0;
  return rec;
}

Record check_value(const Scenario& s, const Coefficients& c, const Params& p) {
  const ValueOptions opts = value_options(p);
  const Path g = s.initial_path();
  ValueTable table;
  const ValueResult r = value_dpp(c, g, opts, &table);
  Record rec;
  rec.name = "value";
  rec.constants["value"] = r.value;
  rec.details["value"] = r.value;
  rec.details["controls"] = r.controls;
  rec.details["trajectory"] = path_to_json(r.trajectory);
  rec.details["memo_entries"] = r.memo_entries;
  if (p.has("expect")) {
    const double expect = p.real("expect", 0.0);
    const double tol = p.positive("tolerance", 1e-12);
    rec.margins.push_back({"expect", tol - std::abs(r.value - expect)});
    rec.details["expect"] = expect;
    rec.passed = std::abs(r.value - expect) <= tol;
  }
  return rec;
}

Record check_dpp(const Scenario& s, const Coefficients& c, const Params& p) {
  const ValueOptions opts = value_options(p);
  const double tol = p.positive("tolerance", 1e-9);
  const Path g = s.initial_path();
  ValueTable table;
  Record rec;
  rec.name = "dpp";
  double worst = 0.0;
  for (int k = g.last_index() + 1; k <= s.grid.steps(); ++k) {
    const double res = verify_dpp_consistency(c, g, s.grid.time(k), opts, &table);
    rec.margins.push_back({"s=" + fmt(s.grid.time(k)), tol - res});
    worst = std::max(worst, res);
  }
  rec.constants["max_residual"] = worst;
  rec.passed = worst <= tol;
  return rec;
}

Record check_signature(const Scenario& s, const Coefficients& c, const Params& p) {
  const int trials = p.integer("trials", 20, 1);
  const double tol = p.positive("tolerance", 1e-9);
  const double worst = validate_signature(c, s.space, s.grid, trials, s.seed, value_options(p));
  Record rec;
  rec.name = "signature";
  rec.constants["max_gap"] = worst;
  rec.margins.push_back({"memo_vs_enumeration", tol - worst});
  rec.passed = worst <= tol;
  return rec;
}

Record check_value_regularity(const Scenario& s, const Coefficients& c, const Params& p) {
  const int trials = p.integer("trials", 12, 1);
  const int refinements = p.integer("refinements", 2, 0);
  const double stability = p.positive("stability", 0.1);
  const ValueRegularityReport r = verify_value_regularity(c, s.space, s.grid, trials, s.seed,
                                                          refinements, stability, value_options(p));
  Record rec;
  rec.name = "value_regularity";
  using Field = double ValueConstants::*;
  const std::pair<const char*, Field> fields[] = {{"bound", &ValueConstants::bound},
                                                  {"time_shift", &ValueConstants::time_shift},
                                                  {"space", &ValueConstants::space},
                                                  {"combined", &ValueConstants::combined}};
  for (const auto& [label, field] : fields) {
    double drift = 0.0;
    const double base = r.per_grid.front().*field;
    for (const ValueConstants& k : r.per_grid) {
      rec.constants[std::string(label) + "[step=" + fmt(k.step) + "]"] = k.*field;
      const double x = k.*field;
      if (std::abs(base) <= 1e-12 && std::abs(x) <= 1e-12) continue;
      drift = std::max(drift, std::abs(x - base) / std::max(std::abs(base), 1e-9));
    }
    rec.margins.push_back({label, stability - drift});
  }
  rec.details["finite"] = r.finite;
  rec.details["stable"] = r.stable;
  rec.passed = r.passed;
  return rec;
}

json residual_json(const HjbResidual& r) {
  return {{"margin", r.margin},       {"dt_phi", r.dt_phi},         {"dt_gauge", r.dt_gauge},
          {"pairing", r.pairing},     {"hamiltonian", r.hamiltonian}, {"passed", r.passed},
          {"net_size", r.net_size},   {"worst_net_gap", r.worst_net_gap},
          {"bp_confirms_point", r.bp_confirms_point}};
}

std::vector<Path> derivative_probes(const Path& point, const std::vector<Path>& net) {
  std::vector<Path> out{point};
  for (const Path& q : net) {
    if (out.size() >= 6) break;
    if (q.last_index() < q.grid().steps() && !(q == point)) out.push_back(q);
  }
  return out;
}

std::vector<TouchingPoint> touching_points(const Scenario& s) {
  if (s.coefficients == "eikonal") return eikonal_touching_points(s.space, s.grid);
  return runmax_touching_points(s.space, s.grid);
}

Record check_viscosity(const Scenario& s, const Coefficients& c, const Params& p) {
  if (s.coefficients != "eikonal" && s.coefficients != "runmax") {
    throw ValidationError(p.where + ": touching points exist only for eikonal and runmax");
  }
  const int depth = p.integer("depth", 4, 0);
  const int samples = p.integer("samples", 200, 0);
  const double shift = p.real("shift", 0.0);
  ViscosityOptions vo;
  vo.tolerance = p.positive("tolerance", 1e-3);
  vo.run_bp = p.flag("bp", true);
  const ValueOptions opts = value_options(p);
  const double T = s.grid.final_time;
  const NetStyle style = s.coefficients == "eikonal" ? NetStyle::kLatticeEndpoint : NetStyle::kAnyPath;

  ValueTable table;
  const PathFunctional w = [&](const Path& g) {
    return value_dpp(c, g, opts, &table).value + shift * (T - g.horizon());
  };

  Record rec;
  rec.name = "viscosity";
  rec.details["shift"] = shift;
  rec.details["points"] = json::array();
  Rng rng(s.seed);
  const auto points = touching_points(s);
  std::vector<Path> terminal;
  for (const TouchingPoint& tp : points) {
    const std::vector<Path> net = touching_net(c, tp.point, depth, samples, rng, style);
    for (const Path& q : net) {
      if (q.last_index() == s.grid.steps()) terminal.push_back(q);
    }
    const auto probes = derivative_probes(tp.point, net);
    json entry = {{"label", tp.label}, {"time", tp.point.horizon()}, {"net_size", net.size()}};
    const std::pair<Side, const char*> sides[] = {{Side::kSub, "sub"}, {Side::kSuper, "super"}};
    for (const auto& [side, tag] : sides) {
      const bool sub = side == Side::kSub;
      const TestFunctionPhi phi(time_shifted(sub ? tp.sub_phi : tp.super_phi, sub ? shift : -shift, T),
                                probes);
      const GaugePack& gauge = sub ? tp.sub_gauge : tp.super_gauge;
      const std::string label = tp.label + " " + tag;
      try {
        const HjbResidual r = viscosity_check(w, phi, gauge, tp.point, side, c, net, vo);
        const double slack = sub ? r.margin + vo.tolerance : vo.tolerance - r.margin;
        rec.margins.push_back({label, slack});
        entry[tag] = residual_json(r);
        rec.passed = rec.passed && r.passed;
      } catch (const PremiseViolation& e) {
        rec.margins.push_back({label, -std::abs(e.gap())});
        entry[tag] = {{"premise_violation", e.what()}, {"gap", e.gap()},
                      {"witness", path_to_json(e.witness())}};
        rec.passed = false;
      }
    }
    rec.details["points"].push_back(std::move(entry));
  }
  for (int i = 0; i < 20; ++i) {
    terminal.push_back(random_path(rng, s.space, s.grid, s.grid.steps(), rng.uniform(0.2, 2.0)));
  }
  const double sub_gap = terminal_gap(w, c, terminal, Side::kSub);
  const double super_gap = terminal_gap(w, c, terminal, Side::kSuper);
  rec.margins.push_back({"terminal sub", vo.tolerance - sub_gap});
  rec.margins.push_back({"terminal super", vo.tolerance - super_gap});
  rec.constants["touching_points"] = static_cast<double>(points.size());
  rec.constants["memo_entries"] = static_cast<double>(table.size());
  rec.passed = rec.passed && sub_gap <= vo.tolerance && super_gap <= vo.tolerance;
  return rec;
}

Record check_classical(const Scenario& s, const Coefficients& c, const Params& p) {
  if (s.coefficients != "transport") {
    throw ValidationError(p.where + ": a closed-form classical solution is known only for transport");
  }
  const SpacePtr space = s.space;
  const double T = s.grid.final_time;
  HVec dir = space->unit(0);
  if (s.params.direction) {
    dir = Eigen::Map<const HVec>(s.params.direction->data(), space->dim());
  }
  TestFunctionParts parts;
  parts.name = "transport_solution";
  parts.value = [=](const Path& g) { return dir.dot(space->semigroup_apply(T - g.horizon(), g.back())); };
  parts.dt = [=](const Path& g) {
    return -dir.dot(space->generator_apply(space->semigroup_apply(T - g.horizon(), g.back())));
  };
  parts.dx = [=](const Path& g) { return space->semigroup_apply(T - g.horizon(), dir); };

  const int count = p.integer("points", 20, 1);
  Rng rng(s.seed);
  std::vector<Path> points = test_prefixes(s, count, rng);
  const TestFunctionPhi w(parts, points);
  for (int i = 0; i < 4; ++i) {
    points.push_back(random_path(rng, space, s.grid, s.grid.steps(), rng.uniform(0.3, 1.5)));
  }
  ClassicalOptions co;
  co.tolerance = p.positive("tolerance", 1e-9);
  const ClassicalReport r = classical_check(w, c, points, co);
  Record rec;
  rec.name = "classical";
  rec.margins.push_back({"residual", co.tolerance - r.max_residual});
  rec.margins.push_back({"terminal", co.tolerance - r.terminal_mismatch});
  rec.constants["max_residual"] = r.max_residual;
  rec.constants["terminal_mismatch"] = r.terminal_mismatch;
  rec.constants["non_differentiable"] = r.non_differentiable;
  rec.passed = r.passed;
  return rec;
}

Perturbation perturbation_kind(const Params& p) {
  const std::string kind = p.text("perturbation", "terminal");
  if (kind == "terminal") return Perturbation::kTerminal;
  if (kind == "running") return Perturbation::kRunning;
  if (kind == "drift") return Perturbation::kDrift;
  throw ValidationError(p.field("perturbation") + ": expected terminal, running or drift");
}

Record check_stability(const Scenario& s, const Coefficients& c, const Params& p) {
  const Perturbation kind = perturbation_kind(p);
  const std::vector<double> eps = p.reals("epsilons", {0.1, 0.05, 0.025});
  for (double e : eps) {
    if (!(e > 0.0)) throw ValidationError(p.field("epsilons") + ": entries must be > 0");
  }
  Rng rng(s.seed);
  const std::vector<Path> tests = test_prefixes(s, p.integer("tests", 8, 1), rng);
  StabilityOptions so;
  so.value = value_options(p);
  so.hypothesis_trials = p.integer("trials", 200, 1);
  so.seed = s.seed;
  if (s.coefficients == "eikonal" || s.coefficients == "runmax") {
    // The unperturbed value must still pass the sub-side test at one point.
    so.limit_probe = [&s, &c, &so]() {
      const TouchingPoint tp = touching_points(s).front();
      Rng net_rng(s.seed);
      const NetStyle style =
          s.coefficients == "eikonal" ? NetStyle::kLatticeEndpoint : NetStyle::kAnyPath;
      const auto net = touching_net(c, tp.point, 2, 50, net_rng, style);
      ValueTable table;
      const PathFunctional w = [&](const Path& g) { return value_dpp(c, g, so.value, &table).value; };
      const TestFunctionPhi phi(tp.sub_phi, derivative_probes(tp.point, net));
      try {
        return viscosity_check(w, phi, tp.sub_gauge, tp.point, Side::kSub, c, net).passed;
      } catch (const PremiseViolation&) {
        return false;
      }
    };
  }
  const StabilityReport r = stability_experiment(c, s.space, s.grid, kind, eps, tests, so);
  Record rec;
  rec.name = "stability";
  rec.details["perturbation"] = p.text("perturbation", "terminal");
  rec.details["entries"] = json::array();
  for (std::size_t i = 0; i < r.entries.size(); ++i) {
    const StabilityEntry& e = r.entries[i];
    rec.margins.push_back({"eps=" + fmt(e.eps) + " bound", r.bound_factor * e.eps - e.gap});
    if (i + 1 < r.entries.size()) {
      rec.margins.push_back({"eps=" + fmt(e.eps) + " monotone", e.gap - r.entries[i + 1].gap});
    }
    rec.details["entries"].push_back(
        {{"eps", e.eps}, {"gap", e.gap}, {"ratio", e.ratio}, {"hypothesis", e.hypothesis}});
  }
  rec.constants["bound_factor"] = r.bound_factor;
  if (r.probe) rec.details["probe"] = *r.probe;
  rec.passed = r.passed;
  return rec;
}

// Least-squares slope of log(err) against log(step).
double fitted_order(const std::vector<double>& steps, const std::vector<double>& errs) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (!(errs[i] > 0.0)) continue;
    const double x = std::log(steps[i]);
    const double y = std::log(errs[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  if (m < 2) return std::numeric_limits<double>::quiet_NaN();
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

Record check_ito(const Scenario& s, const Coefficients& c, const Params& p) {
  const int refinements = p.integer("refinements", 4, 1);
  const int sketches = p.integer("paths", 3, 1);
  const double exact = p.positive("exact_tolerance", 1e-12);
  const double min_order = p.real("min_order", 0.9);
  const int n = s.grid.steps();
  if (n < 4) throw ValidationError(p.where + ": needs a grid with at least 4 steps");
  const int tbar_knot = n / 4;
  const double tbar = s.grid.time(tbar_knot);
  const double tau = s.grid.time(tbar_knot + (n - tbar_knot) / 2);

  Rng rng(s.seed);
  std::vector<PathSketch> paths;
  std::vector<ControlSketch> controls;
  for (int i = 0; i < sketches; ++i) {
    paths.push_back(random_sketch(rng, s.space->dim(), s.grid.step, tbar_knot, 0.8));
    controls.push_back(random_control_sketch(rng, c.controls, s.grid.step, tbar_knot, n));
  }
  std::vector<Path> probes;
  for (const PathSketch& sk : paths) probes.push_back(sk.materialize(s.space, s.grid));

  std::vector<TestFunctionParts> functionals = ito_test_functionals(s.space->dim(), tau);
  functionals.push_back(linear_test_functional(s.space->dim()));

  Record rec;
  rec.name = "ito";
  rec.details["functionals"] = json::array();
  for (const TestFunctionParts& parts : functionals) {
    const TestFunctionPhi phi(parts, probes);
    std::vector<double> steps, worst;
    for (int level = 0; level <= refinements; ++level) {
      const TimeGrid grid = s.grid.refined(1 << level);
      double w = 0.0;
      for (int i = 0; i < sketches; ++i) {
        const Path g = paths[static_cast<std::size_t>(i)].materialize(s.space, grid);
        const ControlSignal u = controls[static_cast<std::size_t>(i)].materialize(grid);
        w = std::max(w, std::abs(ito_residual(phi, c, g, u, tbar, s.grid.final_time)));
      }
      steps.push_back(grid.step);
      worst.push_back(w);
    }
    const double largest = *std::max_element(worst.begin(), worst.end());
    const double order = fitted_order(steps, worst);
    const bool is_exact = largest <= exact;
    const bool ok = is_exact || order >= min_order;
    rec.margins.push_back({parts.name, is_exact ? exact - largest : order - min_order});
    rec.constants[parts.name + " order"] = order;
    rec.constants[parts.name + " max_residual"] = largest;
    rec.details["functionals"].push_back(
        {{"name", parts.name}, {"steps", steps}, {"residuals", worst}, {"exact", is_exact}});
    rec.passed = rec.passed && ok;
  }
  return rec;
}

Record check_upsilon_inequality(const Scenario& s, const Coefficients& c, const Params& p) {
  const int trials = p.integer("trials", 1000, 1);
  const std::vector<double> Ms = p.reals("M", {2.0, 5.0});
  for (double M : Ms) {
    if (M < 2.0) throw ValidationError(p.field("M") + ": entries must be >= 2");
  }
  const double c0 = p.positive("c0", 1.0);
  const int n = s.grid.steps();
  Rng rng(s.seed);
  double worst = std::numeric_limits<double>::infinity();
  double total = 0.0;
  for (int i = 0; i < trials; ++i) {
    const int ti = static_cast<int>(rng.index(static_cast<std::size_t>(n)));
    const Path g = random_path(rng, s.space, s.grid, ti, rng.uniform(0.2, 2.0));
    const Path eta = random_path(rng, s.space, s.grid, ti, rng.uniform(0.2, 2.0));
    const ControlSignal u =
        random_control_sketch(rng, c.controls, s.grid.step, ti, n).materialize(s.grid);
    const int si = ti + 1 + static_cast<int>(rng.index(static_cast<std::size_t>(n - ti)));
    const double M = Ms[static_cast<std::size_t>(i) % Ms.size()];
    const double margin = upsilon_inequality_check(c, g, eta, u, s.grid.time(si), M);
    worst = std::min(worst, margin);
    total += margin;
  }
  const double floor = -c0 * s.grid.step;
  Record rec;
  rec.name = "upsilon_inequality";
  rec.margins.push_back({"min_margin", worst - floor});
  rec.constants["min_margin"] = worst;
  rec.constants["mean_margin"] = total / trials;
  rec.constants["c0"] = c0;
  rec.passed = worst >= floor;
  return rec;
}

Record check_bp_search(const Scenario& s, const Coefficients& c, const Params& p) {
  const int depth = p.integer("depth", 3, 0);
  const int perturbations = p.integer("perturbations", 2, 0);
  const double eps = p.positive("eps", 0.1);
  BPOptions bo;
  bo.delta0 = p.positive("delta0", 1.0);
  bo.max_anchors = p.integer("max_anchors", 64, 1);

  const Path root = s.initial_path();
  std::vector<Path> net{root};
  std::vector<Path> frontier{root};
  for (int level = 0; level < depth && frontier.front().last_index() < s.grid.steps(); ++level) {
    std::vector<Path> next;
    for (const Path& q : frontier) {
      for (Control u : c.controls) next.push_back(q.appended(mild_step(c, q, u)));
    }
    net.insert(net.end(), next.begin(), next.end());
    frontier = std::move(next);
  }
  Rng rng(s.seed);
  const std::size_t tree = net.size();
  for (std::size_t i = 1; i < tree; ++i) {
    for (int k = 0; k < perturbations; ++k) {
      HVec bump = s.space->zero();
      for (int d = 0; d < s.space->dim(); ++d) bump[d] = 0.05 * rng.normal();
      net.push_back(vertical_bump(net[i], bump));
    }
  }
  if (net.size() > 10000) throw ValidationError(p.where + ": net exceeds 10^4 paths");

  const GaugeFn rho = upsilon_bar_gauge();
  const Path target = frontier.back();
  const PathFunctional f = [&](const Path& g) { return -rho.eval(target, g); };
  // Start from the eps-maximizer farthest from the target.
  std::size_t start = 0;
  double farthest = -1.0;
  for (std::size_t i = 0; i < net.size(); ++i) {
    const double v = f(net[i]);
    if (v >= -eps && -v > farthest) {
      farthest = -v;
      start = i;
    }
  }
  const BPResult r = bp_search(f, net, rho, eps, net[start], bo);
  const BPCheck chk = check_bp_result(f, net, rho, eps, net[start], r, bo);

  Record rec;
  rec.name = "bp_search";
  double closeness = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < r.anchors.size(); ++i) {
    const double allowed = eps / (std::ldexp(1.0, static_cast<int>(i)) * bo.delta0);
    closeness = std::min(closeness, allowed - r.anchors[i].gauge_to_maximizer);
  }
  rec.margins.push_back({"closeness", closeness});
  rec.margins.push_back({"improvement", r.perturbed_value - f(net[start])});
  rec.margins.push_back({"summable", 2.0 * eps / bo.delta0 - r.perturbation});
  rec.margins.push_back({"start_to_maximizer", eps - rho.eval(net[start], net[r.maximizer])});
  rec.constants["net_size"] = static_cast<double>(net.size());
  rec.constants["anchors"] = static_cast<double>(r.anchors.size());
  rec.details["maximizer"] = path_to_json(net[r.maximizer]);
  rec.details["strict_max"] = chk.strict_max;
  rec.details["time_stalled"] = r.time_stalled;
  rec.details["capped"] = r.capped;
  if (!chk.detail.empty()) rec.details["detail"] = chk.detail;
  rec.passed = chk.passed();
  return rec;
}

using CheckFn = std::function<Record(const Scenario&, const Coefficients&, const Params&)>;

const std::map<std::string, CheckFn>& registry() {
  static const std::map<std::string, CheckFn> table = {
      {"hypothesis", check_hypothesis},
      {"state_estimates", check_state_estimates},
      {"value", check_value},
      {"dpp", check_dpp},
      {"signature", check_signature},
      {"value_regularity", check_value_regularity},
      {"viscosity", check_viscosity},
      {"classical", check_classical},
      {"stability", check_stability},
      {"ito", check_ito},
      {"upsilon_inequality", check_upsilon_inequality},
      {"bp_search", check_bp_search},
  };
  return table;
}

}  // namespace

Record run_check(const Scenario& s, const CheckSpec& check) {
  auto it = registry().find(check.kind);
  if (it == registry().end()) throw ValidationError("checks: unknown check '" + check.kind + "'");
  const Params params{check.params, "checks[" + check.kind + "]"};
  const Coefficients c = s.build();
  try {
    return it->second(s, c, params);
  } catch (const ParseError&) {
    throw;
  } catch (const ValidationError&) {
    throw;
  } catch (const std::exception& e) {
    Record rec;
    rec.name = check.kind;
    rec.passed = false;
    rec.details["error"] = e.what();
    return rec;
  }
}

Report run_checks(const Scenario& s, const std::vector<CheckSpec>& checks) {
  const auto start = std::chrono::steady_clock::now();
  Report r;
  r.scenario = s.source;
  r.grid = s.grid;
  for (const CheckSpec& check : checks) r.records.push_back(run_check(s, check));
  r.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

Report run_scenario(const Scenario& s) { return run_checks(s, s.checks); }

int exit_code(const Report& r) { return r.passed() ? 0 : 1; }

}  // namespace phjb
