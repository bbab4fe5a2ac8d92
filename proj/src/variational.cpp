#include "phjb/variational.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "phjb/error.hpp"
#include "phjb/random.hpp"
#include "phjb/sampling.hpp"

namespace phjb {

GaugeFn upsilon_bar_gauge(GaugeParams params) {
  if (params.M < 2.0) throw PreconditionError("upsilon_bar_gauge: M must be >= 2");
  GaugeFn rho;
  rho.name = "upsilon_bar";
  rho.eval = [params](const Path& anchor, const Path& g) {
    return eval_upsilon_pair(params, anchor, g, true);
  };
  rho.modulus = [](double delta) { return (1.0 + std::sqrt(3.0)) * std::sqrt(delta); };
  return rho;
}

GaugeCheck validate_gauge(const GaugeFn& rho, const SpacePtr& space, const TimeGrid& grid,
                          int samples, std::uint64_t seed) {
  Rng rng(seed);
  GaugeCheck check;
  check.samples = samples;
  const int n = grid.steps();
  for (int i = 0; i < samples; ++i) {
    const int ti = static_cast<int>(rng.index(static_cast<std::size_t>(n) + 1));
    const Path g = random_path(rng, space, grid, ti, 1.0);
    check.worst_self = std::max(check.worst_self, rho.eval(g, g));
    const double size = std::pow(10.0, -4.0 * rng.uniform());
    Path h = g;
    switch (rng.index(3)) {
      case 0:
        h = g + random_path(rng, space, grid, ti, size);
        break;
      case 1: {
        const int si = ti + static_cast<int>(rng.index(static_cast<std::size_t>(n - ti) + 1));
        h = extend_semigroup(g, grid.time(si)) + random_path(rng, space, grid, si, size);
        break;
      }
      default:
        h = random_path(rng, space, grid, static_cast<int>(rng.index(static_cast<std::size_t>(n) + 1)), 1.0);
        break;
    }
    const double r = rho.eval(g, h);
    const double d = metric_d_infty(g, h);
    const double ratio = r > 0.0 ? d / rho.modulus(r) : (d > 1e-12 ? INFINITY : 0.0);
    check.worst_ratio = std::max(check.worst_ratio, ratio);
  }
  check.passed = check.worst_self == 0.0 && check.worst_ratio <= 1.0;
  return check;
}

namespace {

std::size_t locate(const std::vector<Path>& net, const Path& p) {
  for (std::size_t i = 0; i < net.size(); ++i) {
    if (net[i] == p) return i;
  }
  throw PreconditionError("bp_search: start is not in the net");
}

std::vector<double> evaluate(const PathFunctional& f, const std::vector<Path>& net) {
  std::vector<double> values;
  values.reserve(net.size());
  for (const Path& p : net) {
    const double v = f(p);
    if (!std::isfinite(v)) throw NumericalError("bp_search: non-finite objective on the net");
    values.push_back(v);
  }
  return values;
}

}  // namespace

BPResult bp_search(const PathFunctional& f, const std::vector<Path>& net, const GaugeFn& rho,
                   double eps, const Path& start, const BPOptions& options) {
  if (!(eps > 0.0)) throw PreconditionError("bp_search: eps must be > 0");
  if (!(options.delta0 > 0.0)) throw PreconditionError("bp_search: delta0 must be > 0");
  if (options.max_anchors < 1) throw PreconditionError("bp_search: max_anchors must be >= 1");
  const std::size_t s0 = locate(net, start);
  const std::vector<double> fv = evaluate(f, net);
  const double top = *std::max_element(fv.begin(), fv.end());
  if (fv[s0] < top - eps) {
    std::ostringstream msg;
    msg << "bp_search: f(start) = " << fv[s0] << " is below sup - eps = " << top - eps;
    throw PreconditionError(msg.str());
  }

  BPResult result;
  // Perturbed objective G_k on the surviving set.
  std::vector<std::size_t> alive;
  std::vector<double> G;
  const double t0 = net[s0].horizon();
  for (std::size_t i = 0; i < net.size(); ++i) {
    if (net[i].horizon() < t0) continue;
    const double g = fv[i] - options.delta0 * rho.eval(net[s0], net[i]);
    if (g >= fv[s0]) {
      alive.push_back(i);
      G.push_back(g);
    }
  }
  result.anchors.push_back({s0, t0, options.delta0, 0.0});
  std::size_t current = s0;

  for (int k = 0;; ++k) {
    double reach = 0.0;
    for (std::size_t j : alive) reach = std::max(reach, rho.eval(net[current], net[j]));
    result.iterations = k + 1;
    if (alive.size() == 1 || reach <= options.stop_gauge) break;

    // Next anchor among near-maximizers of G_k.
    const double weight = options.delta0 * std::ldexp(1.0, -(k + 1));
    const bool exact = static_cast<int>(result.anchors.size()) + 1 >= options.max_anchors;
    result.capped = result.capped || exact;
    const double slack = exact ? 0.0 : 0.5 * eps * (weight / options.delta0) * (weight / options.delta0);
    const double sup = *std::max_element(G.begin(), G.end());
    std::size_t pick = alive.size();
    double nearest = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < alive.size(); ++a) {
      if (G[a] < sup - slack) continue;
      const double r = rho.eval(net[current], net[alive[a]]);
      if (pick == alive.size() || r < nearest) {
        pick = a;
        nearest = r;
      }
    }
    const std::size_t next = alive[pick];
    const double g_next = G[pick];
    const double t_next = net[next].horizon();
    if (t_next == net[current].horizon()) result.time_stalled = true;

    std::vector<std::size_t> survivors;
    std::vector<double> G2;
    for (std::size_t a = 0; a < alive.size(); ++a) {
      const std::size_t j = alive[a];
      if (net[j].horizon() < t_next) continue;
      const double g = G[a] - weight * rho.eval(net[next], net[j]);
      if (j == next || g >= g_next) {
        survivors.push_back(j);
        G2.push_back(j == next ? g_next : g);
      }
    }
    alive = std::move(survivors);
    G = std::move(G2);
    result.anchors.push_back({next, t_next, weight, 0.0});
    current = next;
    if (static_cast<int>(result.anchors.size()) > options.max_anchors + 1) {
      throw NumericalError("bp_search: anchor loop failed to isolate a maximizer");
    }
  }

  result.maximizer = current;
  result.time = net[current].horizon();
  for (auto& a : result.anchors) {
    a.gauge_to_maximizer = rho.eval(net[a.index], net[current]);
    result.perturbation += a.weight * a.gauge_to_maximizer;
  }
  result.perturbed_value = fv[current] - result.perturbation;
  return result;
}

BPCheck check_bp_result(const PathFunctional& f, const std::vector<Path>& net, const GaugeFn& rho,
                        double eps, const Path& start, const BPResult& result,
                        const BPOptions& options) {
  BPCheck check;
  std::ostringstream detail;
  const Path& best = net.at(result.maximizer);
  auto perturbed = [&](const Path& p) {
    double s = f(p);
    for (const auto& a : result.anchors) s -= a.weight * rho.eval(net.at(a.index), p);
    return s;
  };

  double total = 0.0;
  for (std::size_t i = 0; i < result.anchors.size(); ++i) {
    const auto& a = result.anchors[i];
    const double r = rho.eval(net.at(a.index), best);
    total += a.weight * r;
    const double bound = eps / (std::ldexp(1.0, static_cast<int>(i)) * options.delta0);
    if (r > bound) {
      check.closeness = false;
      detail << "anchor " << i << " gauge " << r << " exceeds " << bound << "; ";
    }
  }
  const double top = perturbed(best);
  if (top < f(start)) {
    check.improvement = false;
    detail << "perturbed value " << top << " below f(start) " << f(start) << "; ";
  }
  if (total > 2.0 * eps / options.delta0) {
    check.summable = false;
    detail << "perturbation " << total << " exceeds 2 eps / delta0; ";
  }
  for (std::size_t i = 0; i < net.size(); ++i) {
    if (i == result.maximizer || net[i].horizon() < result.time || net[i] == best) continue;
    const double v = perturbed(net[i]);
    if (!(v < top)) {
      check.strict_max = false;
      detail << "net point " << i << " reaches " << v << " >= " << top << "; ";
      break;
    }
  }
  check.detail = detail.str();
  return check;
}

}  // namespace phjb
