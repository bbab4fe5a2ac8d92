#pragma once

#include <vector>

#include "phjb/dynamics.hpp"
#include "phjb/random.hpp"

namespace phjb {

/// Piecewise-linear path with knots on a coarse grid. The same sketch can be
/// materialized on every grid whose step divides `knot_step`, which is how
/// refinement studies keep their instances fixed.
struct PathSketch {
  double knot_step = 0.25;
  std::vector<HVec> knots;

  double horizon() const { return knot_step * static_cast<double>(knots.size() - 1); }
  Path materialize(const SpacePtr& space, const TimeGrid& grid) const;
  PathSketch plus(const PathSketch& other) const;
};

/// Random-walk sketch: knot 0 ~ N(0, scale^2), increments ~ N(0, scale^2 knot_step).
PathSketch random_sketch(Rng& rng, int dim, double knot_step, int last_knot, double scale);

/// Random-walk path on `grid` with horizon index `last_index`.
Path random_path(Rng& rng, const SpacePtr& space, const TimeGrid& grid, int last_index,
                 double scale);

/// Control values held constant over blocks of length `block_step`.
struct ControlSketch {
  double block_step = 0.25;
  int start_block = 0;
  std::vector<Control> blocks;

  ControlSignal materialize(const TimeGrid& grid) const;
};

ControlSketch random_control_sketch(Rng& rng, const std::vector<Control>& controls,
                                    double block_step, int start_block, int end_block);

}  // namespace phjb
