#include <cmath>

#include <gtest/gtest.h>

#include "phjb/error.hpp"
#include "phjb/library.hpp"
#include "phjb/sampling.hpp"
#include "phjb/variational.hpp"

using namespace phjb;

namespace {

const SpacePtr kLine = make_space({0.0});

// Barred gauge with A = 0 from raw samples: the earlier path is held flat.
double reference_gauge(const Path& a, const Path& b, double M) {
  const Path& early = a.horizon() <= b.horizon() ? a : b;
  const Path& late = a.horizon() <= b.horizon() ? b : a;
  double sup2 = 0.0;
  double last2 = 0.0;
  for (int i = 0; i <= late.last_index(); ++i) {
    const HVec& e = early.at(std::min(i, early.last_index()));
    const double d2 = (late.at(i) - e).squaredNorm();
    sup2 = std::max(sup2, d2);
    if (i == late.last_index()) last2 = d2;
  }
  const double S = sup2 > 0.0 ? (sup2 - last2) * (sup2 - last2) / sup2 : 0.0;
  const double dt = late.horizon() - early.horizon();
  return S + M * last2 + dt * dt;
}

std::vector<Path> control_tree(const Coefficients& c, const Path& root, int depth) {
  std::vector<Path> net{root};
  std::vector<Path> frontier{root};
  for (int level = 0; level < depth; ++level) {
    std::vector<Path> next;
    for (const Path& p : frontier) {
      for (Control u : c.controls) next.push_back(p.appended(mild_step(c, p, u)));
    }
    net.insert(net.end(), next.begin(), next.end());
    frontier = std::move(next);
  }
  return net;
}

}  // namespace

TEST(UpsilonBarGauge, MatchesReferenceAndModulus) {
  const TimeGrid grid{1.0, 0.125};
  const GaugeFn rho = upsilon_bar_gauge();
  EXPECT_DOUBLE_EQ(rho.modulus(4.0), 2.0 * (1.0 + std::sqrt(3.0)));
  Rng rng(21);
  for (int i = 0; i < 500; ++i) {
    const Path a = random_path(rng, kLine, grid, static_cast<int>(rng.index(9)), 1.0);
    const Path b = random_path(rng, kLine, grid, static_cast<int>(rng.index(9)), 1.0);
    EXPECT_NEAR(rho.eval(a, b), reference_gauge(a, b, 2.0), 1e-12 * (1.0 + reference_gauge(a, b, 2.0)));
    EXPECT_EQ(rho.eval(a, a), 0.0);
  }
  EXPECT_THROW(upsilon_bar_gauge(GaugeParams{1.0}), PreconditionError);
}

TEST(UpsilonBarGauge, ValidatesOnSpectralSpaces) {
  const TimeGrid grid{1.0, 0.125};
  for (const SpacePtr& space : {kLine, make_space({-1.0, -0.5}), make_space({-2.0, 0.0, -0.1})}) {
    const GaugeCheck chk = validate_gauge(upsilon_bar_gauge(), space, grid, 1000, 5);
    EXPECT_TRUE(chk.passed);
    EXPECT_EQ(chk.worst_self, 0.0);
    EXPECT_LE(chk.worst_ratio, 1.0);
  }
}

TEST(UpsilonBarGauge, BrokenModulusIsCaught) {
  GaugeFn rho = upsilon_bar_gauge();
  rho.modulus = [](double delta) { return 0.1 * std::sqrt(delta); };
  EXPECT_FALSE(validate_gauge(rho, kLine, TimeGrid{1.0, 0.125}, 500, 5).passed);
}

TEST(BPSearch, StrictMaxAtStartNeedsNoPerturbation) {
  const TimeGrid grid{0.375, 0.125};
  const Coefficients c = eikonal(kLine);
  const std::vector<Path> net = control_tree(c, Path::scalar(kLine, grid, {0.5}), 3);
  const GaugeFn rho = upsilon_bar_gauge();
  const Path& start = net.front();
  const PathFunctional f = [&](const Path& g) { return -rho.eval(start, g); };
  const BPResult r = bp_search(f, net, rho, 0.1, start);
  EXPECT_EQ(r.maximizer, 0u);
  EXPECT_EQ(r.perturbation, 0.0);
  EXPECT_TRUE(check_bp_result(f, net, rho, 0.1, start, r).passed());
}

TEST(BPSearch, ConstantObjectiveKeepsStart) {
  const TimeGrid grid{0.375, 0.125};
  const Coefficients c = eikonal(kLine);
  const std::vector<Path> net = control_tree(c, Path::scalar(kLine, grid, {0.5}), 3);
  const GaugeFn rho = upsilon_bar_gauge();
  const PathFunctional f = [](const Path&) { return 1.0; };
  const Path& start = net[5];
  const BPResult r = bp_search(f, net, rho, 0.25, start);
  EXPECT_EQ(net[r.maximizer], start);
  EXPECT_TRUE(check_bp_result(f, net, rho, 0.25, start, r).passed());
}

TEST(BPSearch, ExhaustiveTargetNet) {
  const TimeGrid grid{0.375, 0.125};
  const Coefficients c = eikonal(kLine);
  const std::vector<Path> net = control_tree(c, Path::scalar(kLine, grid, {0.5}), 3);
  ASSERT_EQ(net.size(), 40u);
  const GaugeFn rho = upsilon_bar_gauge();
  const BPOptions options;
  for (std::size_t t : {std::size_t{13}, std::size_t{26}, std::size_t{39}}) {
    const Path& target = net[t];
    const PathFunctional f = [&](const Path& g) { return -reference_gauge(target, g, 2.0); };
    for (std::size_t si = 0; si < net.size(); ++si) {
      const Path& start = net[si];
      const double eps = -f(start) + 0.01;
      const BPResult r = bp_search(f, net, rho, eps, start, options);
      const Path& best = net[r.maximizer];
      // (i) the maximizer is gauge-close to the start
      EXPECT_LE(reference_gauge(start, best, 2.0), eps / options.delta0 + 1e-12);
      // (ii) every anchor sits close to the maximizer, and the weights are summable
      double total = 0.0;
      for (std::size_t i = 0; i < r.anchors.size(); ++i) {
        const double d = reference_gauge(net[r.anchors[i].index], best, 2.0);
        EXPECT_LE(d, eps / (std::ldexp(1.0, static_cast<int>(i)) * options.delta0) + 1e-12);
        EXPECT_DOUBLE_EQ(r.anchors[i].weight, options.delta0 * std::ldexp(1.0, -static_cast<int>(i)));
        total += r.anchors[i].weight * d;
      }
      EXPECT_NEAR(total, r.perturbation, 1e-12);
      EXPECT_LE(total, 2.0 * eps / options.delta0);
      // (iii) strict maximum of the perturbed objective over later horizons
      auto perturbed = [&](const Path& g) {
        double v = f(g);
        for (const BPAnchor& a : r.anchors) v -= a.weight * reference_gauge(net[a.index], g, 2.0);
        return v;
      };
      const double top = perturbed(best);
      EXPECT_GE(top, f(start) - 1e-12);
      for (const Path& g : net) {
        if (g.horizon() >= best.horizon() && !(g == best)) {
          EXPECT_LT(perturbed(g), top);
        }
      }
      EXPECT_TRUE(check_bp_result(f, net, rho, eps, start, r, options).passed());
    }
  }
}

TEST(BPSearch, PerturbedFeedbackNet) {
  const SpacePtr space = make_space({-1.0, -0.5});
  const TimeGrid grid{1.0, 0.125};
  const Coefficients c = feedback(space);
  HVec x0(2);
  x0 << 0.8, -0.3;
  std::vector<Path> net = control_tree(c, Path::constant(space, grid, 0.0, x0), 4);
  Rng rng(22);
  const std::size_t tree = net.size();
  for (std::size_t i = 1; i < tree; ++i) {
    HVec b(2);
    b << 0.05 * rng.normal(), 0.05 * rng.normal();
    net.push_back(vertical_bump(net[i], b));
  }
  ASSERT_LE(net.size(), 10000u);
  const GaugeFn rho = upsilon_bar_gauge();
  const PathFunctional f = [](const Path& g) { return -g.back().squaredNorm() + 0.1 * g.horizon(); };
  for (double eps : {0.5, 0.1, 0.02}) {
    double top = -INFINITY;
    for (const Path& g : net) top = std::max(top, f(g));
    std::size_t start = 0;
    for (std::size_t i = 0; i < net.size(); ++i) {
      if (f(net[i]) >= top - eps) start = i;
    }
    const BPResult r = bp_search(f, net, rho, eps, net[start]);
    const BPCheck chk = check_bp_result(f, net, rho, eps, net[start], r);
    EXPECT_TRUE(chk.passed()) << chk.detail;
  }
}

TEST(BPSearch, Preconditions) {
  const TimeGrid grid{0.375, 0.125};
  const Coefficients c = eikonal(kLine);
  const std::vector<Path> net = control_tree(c, Path::scalar(kLine, grid, {0.5}), 2);
  const GaugeFn rho = upsilon_bar_gauge();
  const PathFunctional f = [](const Path& g) { return g.back()[0]; };
  const Path outside = Path::scalar(kLine, grid, {7.0});
  EXPECT_THROW(bp_search(f, net, rho, 0.1, outside), PreconditionError);
  EXPECT_THROW(bp_search(f, net, rho, 0.0, net[0]), PreconditionError);
  // The worst point is not an eps-maximizer.
  std::size_t worst = 0;
  for (std::size_t i = 0; i < net.size(); ++i) {
    if (f(net[i]) < f(net[worst])) worst = i;
  }
  EXPECT_THROW(bp_search(f, net, rho, 0.01, net[worst]), PreconditionError);
  BPOptions bad;
  bad.delta0 = 0.0;
  EXPECT_THROW(bp_search(f, net, rho, 0.1, net[0], bad), PreconditionError);
  const PathFunctional nan = [](const Path&) { return NAN; };
  EXPECT_THROW(bp_search(nan, net, rho, 0.1, net[0]), NumericalError);
}
