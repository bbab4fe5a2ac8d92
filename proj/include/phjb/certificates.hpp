#pragma once

#include <string>
#include <vector>

#include "phjb/ito_visc.hpp"
#include "phjb/random.hpp"

namespace phjb {

// Hand-built touching test functionals for the desk scenarios. Each point
// carries a sub-side pair (phi, g) with w - phi - g maximal at the point and
// a super-side pair with w + phi + g minimal there.

struct TouchingPoint {
  std::string label;
  Path point;
  TestFunctionParts sub_phi;
  GaugePack sub_gauge;
  TestFunctionParts super_phi;
  GaugePack super_gauge;
};

/// Eikonal (A = 0, n = 1): V = (|x| - (T - t))^+. Flat points use phi = 0
/// with an anchored gauge of weight 2/d, d = T - t - |x|; linear points use
/// phi = +-(sign(x) x + t - T) with weight 1/a, a = |x| - (T - t).
/// Endpoints sit on the lattice x0 + k step so discrete and exact V agree.
std::vector<TouchingPoint> eikonal_touching_points(const SpacePtr& space, const TimeGrid& grid);

/// Runmax (A = 0): V = ||gamma||_0. Points have a strict past maximum at
/// tau < t; phi = +-|gamma(tau)| and the sub-side gauge has weight 2/b,
/// b the gap between the maximum and every other sample.
std::vector<TouchingPoint> runmax_touching_points(const SpacePtr& space, const TimeGrid& grid);

/// The test functional phi + k (T - t), for comparing w + k (T - t).
TestFunctionParts time_shifted(const TestFunctionParts& phi, double k, double final_time);

/// Three cylinder functionals for Ito checks, with tau a grid time:
///   |gamma(t)|^2,
///   t (e_1, gamma(t)) + (gamma(t ^ tau), gamma(t)),
///   e^{-t} sin(gamma(t)_1) + |gamma(t ^ tau)|^2 / 2.
std::vector<TestFunctionParts> ito_test_functionals(int dim, double tau);

/// (c, gamma(t)) with c = e_1.
TestFunctionParts linear_test_functional(int dim);

enum class NetStyle { kAnyPath, kLatticeEndpoint };

/// Premise net around `point`: every control-tree continuation of depth
/// <= `depth`, plus `samples` random later-horizon perturbations. With
/// kLatticeEndpoint the perturbed endpoints are snapped to point(t) + k step.
std::vector<Path> touching_net(const Coefficients& c, const Path& point, int depth, int samples,
                               Rng& rng, NetStyle style);

}  // namespace phjb
