#include <cmath>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "phjb/control_value.hpp"
#include "phjb/error.hpp"
#include "phjb/library.hpp"
#include "phjb/sampling.hpp"

using namespace phjb;

namespace {

const SpacePtr kLine = make_space({0.0});

Path start_at(const TimeGrid& grid, double x) { return Path::constant(kLine, grid, 0.0, HVec::Constant(1, x)); }

std::vector<double> scalars(const Path& g) {
  std::vector<double> xs;
  for (const HVec& x : g.samples()) xs.push_back(x[0]);
  return xs;
}

}  // namespace

TEST(CostJ, Examples) {
  const TimeGrid grid{1.0, 0.25};
  Coefficients c = eikonal(kLine);
  const Path g = start_at(grid, 0.5);
  const ControlSignal down = ControlSignal::constant(grid, 0.0, 1.0, -1.0);
  EXPECT_EQ(cost_J(c, g, down), 0.5);
  EXPECT_EQ(cost_J(c, g, down), c.terminal_cost(mild_solve(c, g, down)));
  c.running_cost = [](const Path&, Control) { return 1.0; };
  c.terminal_cost = [](const Path&) { return 0.0; };
  const Path later = Path::constant(kLine, grid, 0.25, HVec::Zero(1));
  EXPECT_EQ(cost_J(c, later, ControlSignal::constant(grid, 0.25, 1.0, 0.0)), 0.75);
}

TEST(Hamiltonian, Examples) {
  const TimeGrid grid{1.0, 0.25};
  Coefficients c = eikonal(kLine);
  const Path g = start_at(grid, -0.7);
  const HamiltonianValue a = hamiltonian(c, g, HVec::Constant(1, 2.0));
  EXPECT_EQ(a.value, 2.0);
  EXPECT_EQ(a.argopt, 1.0);
  EXPECT_EQ(hamiltonian(c, g, HVec::Zero(1)).value, 0.0);
  EXPECT_EQ(hamiltonian(c, g, HVec::Zero(1)).argopt, -1.0);  // first in list order
  c.running_cost = [](const Path& p, Control) { return p.back().norm(); };
  const HamiltonianValue b = hamiltonian(c, g, HVec::Constant(1, -3.0));
  EXPECT_DOUBLE_EQ(b.value, 3.0 + 0.7);
  EXPECT_EQ(b.argopt, -1.0);
  const HamiltonianValue inf = hamiltonian(c, g, HVec::Constant(1, -3.0), Sense::kInf);
  EXPECT_DOUBLE_EQ(inf.value, -3.0 + 0.7);
  EXPECT_EQ(inf.argopt, 1.0);
}

TEST(Hamiltonian, JointScalingKeepsArgmax) {
  const SpacePtr space = make_space({-1.0, -0.5});
  const Coefficients c = feedback(space);
  Rng rng(1);
  for (int i = 0; i < 100; ++i) {
    const Path g = random_path(rng, space, TimeGrid{1.0, 0.125}, 3, 1.0);
    const HVec p = HVec::Random(2) * 3.0;
    for (double k : {0.5, 2.0, 7.0}) {
      Coefficients scaled = c;
      scaled.drift = [&c, k](const Path& x, Control u) { return HVec(k * c.drift(x, u)); };
      scaled.running_cost = [&c, k](const Path& x, Control u) { return k * c.running_cost(x, u); };
      const HamiltonianValue a = hamiltonian(c, g, p), b = hamiltonian(scaled, g, p);
      EXPECT_NEAR(b.value, k * a.value, 1e-12 * (1 + std::abs(b.value)));
      EXPECT_EQ(b.argopt, a.argopt);
    }
  }
}

TEST(ValueDpp, TerminalCondition) {
  const TimeGrid grid{1.0, 0.25};
  const Coefficients c = runmax(kLine);
  const Path g = Path::scalar(kLine, grid, {0.1, -0.9, 0.3, 0.2, 0.5});
  EXPECT_EQ(value_dpp(c, g).value, 0.9);
}

TEST(ValueDpp, EikonalBruteForce) {
  const TimeGrid grid{1.0, 0.25};
  const Coefficients c = eikonal(kLine);
  for (double x0 : {0.5, 1.5, -0.25, 2.0, 0.0}) {
    long long leaves = 0;
    const double brute = oracle::enumerate_scalar({x0}, 4, 0.25, c.controls, oracle::abs_last, &leaves);
    EXPECT_EQ(leaves, 81);
    EXPECT_EQ(value_dpp(c, start_at(grid, x0)).value, brute) << x0;
    ValueOptions exhaustive;
    exhaustive.quantum = 0.0;
    EXPECT_EQ(value_dpp(c, start_at(grid, x0), exhaustive).value, brute);
  }
  EXPECT_EQ(value_dpp(c, start_at(grid, 0.5)).value, 0.0);
  EXPECT_EQ(value_dpp(c, start_at(grid, 1.5)).value, 0.5);
}

TEST(ValueDpp, RunmaxHoldingIsOptimal) {
  const TimeGrid grid{1.5, 0.25};
  const Coefficients c = runmax(kLine);
  Rng rng(2);
  for (int i = 0; i < 20; ++i) {
    const int last = static_cast<int>(rng.index(4));
    const Path g = random_path(rng, kLine, grid, last, 1.0);
    const double brute = oracle::enumerate_scalar(scalars(g), 6 - last, 0.25, c.controls, oracle::max_abs);
    EXPECT_EQ(brute, sup_norm(g));
    EXPECT_EQ(value_dpp(c, g).value, brute);
  }
}

TEST(ValueDpp, PlanAttainsTheValue) {
  const SpacePtr space = make_space({-1.0, -0.5});
  const Coefficients c = feedback(space);
  const TimeGrid grid{1.0, 0.125};
  Rng rng(3);
  for (int i = 0; i < 5; ++i) {
    const Path g = random_path(rng, space, grid, 2, 1.0);
    const ValueResult r = value_dpp(c, g);
    EXPECT_EQ(cost_J(c, g, ControlSignal{grid, 2, r.controls}), r.value);
    EXPECT_EQ(r.trajectory.last_index(), 8);
  }
}

TEST(ValueDpp, BelowEveryExplicitControl) {
  const SpacePtr space = make_space({-1.0, -0.5});
  const Coefficients c = feedback(space);
  const TimeGrid grid{1.0, 0.125};
  Rng rng(4);
  for (int i = 0; i < 20; ++i) {
    const Path g = random_path(rng, space, grid, 1, 1.0);
    const double v = value_dpp(c, g).value;
    for (int j = 0; j < 10; ++j) {
      const ControlSignal u = random_control_sketch(rng, c.controls, 0.125, 1, 8).materialize(grid);
      EXPECT_LE(v, cost_J(c, g, u));
    }
  }
}

TEST(ValueDpp, EnlargingControlsNeverIncreases) {
  const SpacePtr space = make_space({-1.0});
  const TimeGrid grid{1.0, 0.125};
  LibraryParams small;
  small.controls = std::vector<Control>{0.0, 1.0};
  const Coefficients a = feedback(space, small), b = feedback(space);
  Rng rng(5);
  for (int i = 0; i < 10; ++i) {
    const Path g = random_path(rng, space, grid, 2, 1.0);
    EXPECT_LE(value_dpp(b, g).value, value_dpp(a, g).value);
  }
}

TEST(ValueDpp, RefinementChangesEikonalByAtMostStep) {
  const Coefficients c = eikonal(kLine);
  for (double x0 : {0.3, 1.1, 1.7, -1.37}) {
    for (double h : {0.25, 0.125}) {
      const double coarse = value_dpp(c, start_at(TimeGrid{1.0, h}, x0)).value;
      const double fine = value_dpp(c, start_at(TimeGrid{1.0, h / 2}, x0)).value;
      EXPECT_LE(std::abs(coarse - fine), h + 1e-15);
    }
    EXPECT_NEAR(value_dpp(c, start_at(TimeGrid{1.0, 1.0 / 64}, x0)).value, oracle::eikonal_value(x0, 0, 1), 1.0 / 64);
  }
}

TEST(ValueDpp, ParallelMatchesSerialAndTablesAreShared) {
  const SpacePtr space = make_space({-1.0, -0.5});
  const Coefficients c = feedback(space);
  const TimeGrid grid{1.0, 0.125};
  Rng rng(6);
  ValueTable shared;
  for (int i = 0; i < 4; ++i) {
    const Path g = random_path(rng, space, grid, 1, 1.0);
    ValueOptions par;
    par.parallel = true;
    const double serial = value_dpp(c, g).value;
    EXPECT_EQ(value_dpp(c, g, par).value, serial);
    EXPECT_EQ(value_dpp(c, g, {}, &shared).value, serial);
  }
  EXPECT_GT(shared.size(), 0u);
}

TEST(ValueDpp, BudgetGuard) {
  ValueOptions exhaustive;
  exhaustive.quantum = 0.0;
  exhaustive.enumeration_budget = 1000;
  const Coefficients c = eikonal(kLine);
  EXPECT_THROW(value_dpp(c, start_at(TimeGrid{1.0, 0.125}, 0.2), exhaustive), BudgetExceeded);
  EXPECT_NO_THROW(value_dpp(c, start_at(TimeGrid{1.0, 0.25}, 0.2), exhaustive));
}

TEST(ValueTable, FirstInsertWins) {
  ValueTable t;
  EXPECT_FALSE(t.find("k").has_value());
  EXPECT_EQ(t.insert_if_absent("k", {1.0, {0.0}}).value, 1.0);
  EXPECT_EQ(t.insert_if_absent("k", {2.0, {1.0}}).value, 1.0);
  EXPECT_EQ(t.find("k")->value, 1.0);
  EXPECT_EQ(t.size(), 1u);
}

TEST(Dpp, Consistency) {
  const TimeGrid grid{1.0, 0.25};
  const Coefficients c = eikonal(kLine);
  const Path g = start_at(grid, 0.8);
  EXPECT_EQ(verify_dpp_consistency(c, g, 0.0), 0.0);
  EXPECT_EQ(verify_dpp_consistency(c, g, 1.0), 0.0);
  EXPECT_LE(verify_dpp_consistency(c, g, 0.5), 1e-9);
  const SpacePtr space = make_space({-1.0, -0.5});
  const Coefficients f = feedback(space);
  Rng rng(7);
  const Path h = random_path(rng, space, TimeGrid{1.0, 0.125}, 2, 1.0);
  for (int k = 2; k <= 8; ++k) EXPECT_LE(verify_dpp_consistency(f, h, k * 0.125), 1e-9);
}

TEST(Signature, DeclaredStatisticsAreFaithful) {
  const TimeGrid grid{1.0, 0.125};
  for (const char* name : {"eikonal", "runmax"}) {
    EXPECT_LE(validate_signature(make_coefficients(name, kLine), kLine, grid, 10, 8), 1e-12) << name;
  }
  const SpacePtr space = make_space({-1.0, -0.5});
  EXPECT_LE(validate_signature(feedback(space), space, TimeGrid{1.0, 0.25}, 10, 8), 1e-12);
}

TEST(Signature, WrongStatisticIsDetected) {
  Coefficients c = runmax(kLine);
  c.statistic = [](const Path& g) { return std::vector<double>{g.back()[0]}; };
  // Same endpoint, different running maximum: the endpoint alone collides.
  const TimeGrid grid{1.0, 0.125};
  const Path low = Path::scalar(kLine, grid, {0.1, 0.2, 0.1});
  const Path high = Path::scalar(kLine, grid, {0.1, 0.9, 0.1});
  ValueTable table;
  EXPECT_NEAR(value_dpp(c, low, {}, &table).value, 0.2, 1e-12);
  EXPECT_GT(std::abs(value_dpp(c, high, {}, &table).value - 0.9), 0.1);
  EXPECT_EQ(value_dpp(runmax(kLine), high).value, 0.9);
}

TEST(ValueRegularity, Eikonal) {
  const ValueRegularityReport r = verify_value_regularity(eikonal(kLine), kLine, TimeGrid{1.0, 0.125}, 12, 10);
  EXPECT_TRUE(r.passed);
  for (const ValueConstants& k : r.per_grid) EXPECT_LE(k.space, 1.0 + 1e-12);
}

TEST(ValueRegularity, RunmaxTimeShiftVanishes) {
  const ValueRegularityReport r = verify_value_regularity(runmax(kLine), kLine, TimeGrid{1.0, 0.125}, 12, 11);
  EXPECT_TRUE(r.passed);
  for (const ValueConstants& k : r.per_grid) EXPECT_EQ(k.time_shift, 0.0);
}

TEST(ValueRegularity, TransportInheritsPhiConstant) {
  const SpacePtr space = make_space({-1.0, 0.0});
  LibraryParams p;
  p.direction = std::vector<double>{0.6, -0.8};
  const ValueRegularityReport r = verify_value_regularity(transport(space, p), space, TimeGrid{1.0, 0.125}, 12, 12);
  EXPECT_TRUE(r.passed);
  for (const ValueConstants& k : r.per_grid) EXPECT_LE(k.space, 1.0 + 1e-12);
}
