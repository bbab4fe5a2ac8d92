#include "phjb/path.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "phjb/error.hpp"

namespace phjb {

namespace {

constexpr double kGridTolerance = 1e-12;

void require_compatible(const Path& a, const Path& b, const char* what) {
  if (!(a.space() == b.space())) {
    throw PreconditionError(std::string(what) + ": paths live in different spaces");
  }
  if (!a.grid().same_as(b.grid())) {
    throw PreconditionError(std::string(what) + ": paths use different time grids");
  }
}

}  // namespace

TimeGrid TimeGrid::make(double final_time, double step) {
  if (!(step > 0.0) || !std::isfinite(step)) throw PreconditionError("TimeGrid: step must be > 0");
  if (!(final_time > 0.0) || !std::isfinite(final_time)) {
    throw PreconditionError("TimeGrid: T must be > 0");
  }
  const double ratio = final_time / step;
  const double n = std::round(ratio);
  if (n < 1.0 || std::abs(n * step - final_time) > kGridTolerance * std::max(1.0, final_time)) {
    throw PreconditionError("TimeGrid: T/step must be a positive integer");
  }
  return TimeGrid{final_time, step};
}

int TimeGrid::steps() const { return static_cast<int>(std::llround(final_time / step)); }

bool TimeGrid::on_grid(double t) const {
  if (!std::isfinite(t)) return false;
  const double k = std::round(t / step);
  return k >= 0 && k <= steps() && std::abs(k * step - t) <= kGridTolerance * std::max(1.0, std::abs(t));
}

int TimeGrid::index_of(double t) const {
  if (!on_grid(t)) {
    throw PreconditionError("time " + std::to_string(t) + " is not on the grid (step " +
                            std::to_string(step) + ", T " + std::to_string(final_time) + ")");
  }
  return static_cast<int>(std::llround(t / step));
}

bool TimeGrid::same_as(const TimeGrid& other) const {
  return std::abs(step - other.step) <= kGridTolerance * std::max(1.0, step) &&
         std::abs(final_time - other.final_time) <= kGridTolerance * std::max(1.0, final_time);
}

TimeGrid TimeGrid::refined(int factor) const {
  if (factor < 1) throw PreconditionError("TimeGrid::refined: factor must be >= 1");
  return TimeGrid{final_time, step / factor};
}

Path::Path(SpacePtr space, TimeGrid grid, std::vector<HVec> samples)
    : space_(std::move(space)), grid_(grid), samples_(std::move(samples)) {
  if (!space_) throw PreconditionError("Path: null space");
  if (samples_.empty()) throw PreconditionError("Path: at least one sample required");
  if (last_index() > grid_.steps()) throw PreconditionError("Path: horizon beyond T");
  for (const auto& x : samples_) space_->check_dim(x);
}

Path Path::constant(SpacePtr space, TimeGrid grid, double horizon, const HVec& value) {
  const int n = grid.index_of(horizon);
  return Path(std::move(space), grid, std::vector<HVec>(static_cast<std::size_t>(n) + 1, value));
}

Path Path::from_function(SpacePtr space, TimeGrid grid, double horizon,
                         const std::function<HVec(double)>& fn) {
  const int n = grid.index_of(horizon);
  std::vector<HVec> samples;
  samples.reserve(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) samples.push_back(fn(grid.time(i)));
  return Path(std::move(space), grid, std::move(samples));
}

Path Path::scalar(SpacePtr space, TimeGrid grid, const std::vector<double>& values) {
  std::vector<HVec> samples;
  samples.reserve(values.size());
  for (double v : values) samples.push_back(HVec::Constant(1, v));
  return Path(std::move(space), grid, std::move(samples));
}

const HVec& Path::value_at(double s) const {
  const int k = grid_.index_of(s);
  return samples_[static_cast<std::size_t>(std::min(k, last_index()))];
}

Path Path::truncated(int index) const {
  if (index < 0 || index > last_index()) throw PreconditionError("Path::truncated: index out of range");
  return Path(space_, grid_,
              std::vector<HVec>(samples_.begin(), samples_.begin() + index + 1));
}

Path Path::appended(const HVec& next) const {
  if (last_index() >= grid_.steps()) throw PreconditionError("Path::appended: already at T");
  std::vector<HVec> samples = samples_;
  samples.push_back(next);
  return Path(space_, grid_, std::move(samples));
}

bool Path::operator==(const Path& other) const {
  if (!(space() == other.space()) || !grid_.same_as(other.grid_)) return false;
  if (samples_.size() != other.samples_.size()) return false;
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    if (samples_[i] != other.samples_[i]) return false;
  }
  return true;
}

Path refine_linear(const Path& g, int factor) {
  const TimeGrid fine = g.grid().refined(factor);
  std::vector<HVec> samples;
  samples.reserve(static_cast<std::size_t>(g.last_index() * factor) + 1);
  for (int i = 0; i < g.last_index(); ++i) {
    for (int j = 0; j < factor; ++j) {
      const double w = static_cast<double>(j) / factor;
      samples.push_back((1.0 - w) * g.at(i) + w * g.at(i + 1));
    }
  }
  samples.push_back(g.back());
  return Path(g.space_ptr(), fine, std::move(samples));
}

Path operator-(const Path& a, const Path& b) {
  require_compatible(a, b, "path difference");
  if (a.last_index() != b.last_index()) throw PreconditionError("path difference: horizons differ");
  std::vector<HVec> out;
  out.reserve(a.samples().size());
  for (std::size_t i = 0; i < a.samples().size(); ++i) out.push_back(a.samples()[i] - b.samples()[i]);
  return Path(a.space_ptr(), a.grid(), std::move(out));
}

Path operator+(const Path& a, const Path& b) {
  require_compatible(a, b, "path sum");
  if (a.last_index() != b.last_index()) throw PreconditionError("path sum: horizons differ");
  std::vector<HVec> out;
  out.reserve(a.samples().size());
  for (std::size_t i = 0; i < a.samples().size(); ++i) out.push_back(a.samples()[i] + b.samples()[i]);
  return Path(a.space_ptr(), a.grid(), std::move(out));
}

Path vertical_bump(const Path& g, const HVec& x) {
  g.space().check_dim(x);
  std::vector<HVec> samples = g.samples();
  samples.back() += x;
  return Path(g.space_ptr(), g.grid(), std::move(samples));
}

Path extend_flat(const Path& g, double tbar) {
  const int n = g.grid().index_of(tbar);
  if (n < g.last_index()) throw PreconditionError("extend_flat: tbar < horizon");
  std::vector<HVec> samples = g.samples();
  samples.resize(static_cast<std::size_t>(n) + 1, g.back());
  return Path(g.space_ptr(), g.grid(), std::move(samples));
}

Path extend_semigroup(const Path& g, double tbar) {
  const int n = g.grid().index_of(tbar);
  const int t_index = g.last_index();
  if (n < t_index) throw PreconditionError("extend_semigroup: tbar < horizon");
  std::vector<HVec> samples = g.samples();
  samples.reserve(static_cast<std::size_t>(n) + 1);
  for (int i = t_index + 1; i <= n; ++i) {
    samples.push_back(g.space().semigroup_apply((i - t_index) * g.grid().step, g.back()));
  }
  return Path(g.space_ptr(), g.grid(), std::move(samples));
}

double sup_norm(const Path& g) {
  double m = 0.0;
  for (const auto& x : g.samples()) m = std::max(m, x.norm());
  return m;
}

double sup_norm_before_horizon(const Path& g) {
  double m = 0.0;
  for (int i = 0; i < g.last_index(); ++i) m = std::max(m, g.at(i).norm());
  return m;
}

double metric_d_infty(const Path& g, const Path& h) {
  require_compatible(g, h, "metric_d_infty");
  const TimeGrid& grid = g.grid();
  const int n = grid.steps();
  const int tg = g.last_index();
  const int th = h.last_index();
  double sup = 0.0;
  for (int i = 0; i <= n; ++i) {
    const HVec a = i <= tg ? g.at(i) : g.space().semigroup_apply((i - tg) * grid.step, g.back());
    const HVec b = i <= th ? h.at(i) : h.space().semigroup_apply((i - th) * grid.step, h.back());
    sup = std::max(sup, (a - b).norm());
  }
  return std::abs(g.horizon() - h.horizon()) + sup;
}

DupireDerivatives dupire_derivatives(const PathFunctional& f, const Path& g,
                                     std::optional<double> bump) {
  DupireDerivatives out;
  const double h = bump.value_or(1e-5 * std::max(1.0, g.back().norm()));
  if (!(h > 0.0)) throw PreconditionError("dupire_derivatives: bump must be > 0");
  out.bump = h;
  const int n = g.space().dim();
  out.dx = HVec::Zero(n);
  for (int k = 0; k < n; ++k) {
    const HVec e = h * g.space().unit(k);
    out.dx[k] = (f(vertical_bump(g, e)) - f(vertical_bump(g, -e))) / (2.0 * h);
  }
  if (g.last_index() < g.grid().steps()) {
    const double step = g.grid().step;
    out.dt = (f(extend_flat(g, g.horizon() + step)) - f(g)) / step;
  }
  return out;
}

}  // namespace phjb
