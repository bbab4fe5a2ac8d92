#include "phjb/sampling.hpp"

#include <cmath>

#include "phjb/error.hpp"

namespace phjb {

namespace {

int ratio_of(double coarse, double fine) {
  const double r = coarse / fine;
  const double n = std::round(r);
  if (n < 1.0 || std::abs(n - r) > 1e-9 * n) {
    throw PreconditionError("grid step must divide the sketch step");
  }
  return static_cast<int>(n);
}

}  // namespace

Path PathSketch::materialize(const SpacePtr& space, const TimeGrid& grid) const {
  if (knots.empty()) throw PreconditionError("PathSketch: no knots");
  const int factor = ratio_of(knot_step, grid.step);
  std::vector<HVec> samples;
  samples.reserve((knots.size() - 1) * static_cast<std::size_t>(factor) + 1);
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    for (int j = 0; j < factor; ++j) {
      const double w = static_cast<double>(j) / factor;
      samples.push_back((1.0 - w) * knots[i] + w * knots[i + 1]);
    }
  }
  samples.push_back(knots.back());
  return Path(space, grid, std::move(samples));
}

PathSketch PathSketch::plus(const PathSketch& other) const {
  if (other.knots.size() != knots.size()) throw PreconditionError("PathSketch::plus: size mismatch");
  PathSketch out = *this;
  for (std::size_t i = 0; i < knots.size(); ++i) out.knots[i] += other.knots[i];
  return out;
}

PathSketch random_sketch(Rng& rng, int dim, double knot_step, int last_knot, double scale) {
  PathSketch sketch;
  sketch.knot_step = knot_step;
  HVec x(dim);
  for (int k = 0; k < dim; ++k) x[k] = scale * rng.normal();
  sketch.knots.push_back(x);
  const double sd = scale * std::sqrt(knot_step);
  for (int i = 0; i < last_knot; ++i) {
    for (int k = 0; k < dim; ++k) x[k] += sd * rng.normal();
    sketch.knots.push_back(x);
  }
  return sketch;
}

Path random_path(Rng& rng, const SpacePtr& space, const TimeGrid& grid, int last_index,
                 double scale) {
  return random_sketch(rng, space->dim(), grid.step, last_index, scale).materialize(space, grid);
}

ControlSignal ControlSketch::materialize(const TimeGrid& grid) const {
  const int factor = ratio_of(block_step, grid.step);
  ControlSignal u;
  u.grid = grid;
  u.start_index = start_block * factor;
  for (Control v : blocks) u.values.insert(u.values.end(), static_cast<std::size_t>(factor), v);
  return u;
}

ControlSketch random_control_sketch(Rng& rng, const std::vector<Control>& controls,
                                    double block_step, int start_block, int end_block) {
  ControlSketch sketch;
  sketch.block_step = block_step;
  sketch.start_block = start_block;
  for (int b = start_block; b < end_block; ++b) sketch.blocks.push_back(controls[rng.index(controls.size())]);
  return sketch;
}

}  // namespace phjb
