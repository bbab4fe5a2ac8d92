#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "phjb/hilbert.hpp"

namespace phjb {

/// Uniform time grid 0, step, 2 step, ..., T with T/step a positive integer.
struct TimeGrid {
  double final_time = 1.0;
  double step = 0.25;

  /// Validating constructor; throws PreconditionError if T/step is not a positive integer.
  static TimeGrid make(double final_time, double step);

  int steps() const;
  double time(int index) const { return index * step; }
  /// Grid index of `t`; throws if `t` is not a grid time within 1e-12 relative.
  int index_of(double t) const;
  bool on_grid(double t) const;
  bool same_as(const TimeGrid& other) const;
  /// The grid with `factor` times as many steps.
  TimeGrid refined(int factor) const;
};

/// A grid-sampled path gamma_t on [0, t], t = horizon(). Immutable value type.
class Path {
 public:
  Path(SpacePtr space, TimeGrid grid, std::vector<HVec> samples);

  static Path constant(SpacePtr space, TimeGrid grid, double horizon, const HVec& value);
  static Path from_function(SpacePtr space, TimeGrid grid, double horizon,
                            const std::function<HVec(double)>& fn);
  /// Scalar (dim 1) path from raw sample values.
  static Path scalar(SpacePtr space, TimeGrid grid, const std::vector<double>& values);

  const SpectralSpace& space() const { return *space_; }
  const SpacePtr& space_ptr() const { return space_; }
  const TimeGrid& grid() const { return grid_; }
  const std::vector<HVec>& samples() const { return samples_; }

  int last_index() const { return static_cast<int>(samples_.size()) - 1; }
  double horizon() const { return grid_.time(last_index()); }
  const HVec& at(int index) const { return samples_.at(static_cast<std::size_t>(index)); }
  const HVec& back() const { return samples_.back(); }
  /// gamma_t(min(s, t)) for a grid time s.
  const HVec& value_at(double s) const;

  /// Restriction gamma_t|[0, s] to the grid index `index`.
  Path truncated(int index) const;
  /// Path on [0, t + step] whose new final sample is `next`.
  Path appended(const HVec& next) const;

  bool operator==(const Path& other) const;

 private:
  SpacePtr space_;
  TimeGrid grid_;
  std::vector<HVec> samples_;
};

/// The same path on grid.refined(factor), linearly interpolated between samples.
Path refine_linear(const Path& g, int factor);

/// Sample-wise difference of two paths with equal horizons.
Path operator-(const Path& a, const Path& b);
Path operator+(const Path& a, const Path& b);

/// gamma^x_t: identical to g except the final sample becomes g(t) + x.
Path vertical_bump(const Path& g, const HVec& x);
/// gamma_{t, tbar}: flat continuation of g(t) on (t, tbar].
Path extend_flat(const Path& g, double tbar);
/// gamma_{t, tbar, A}: continuation e^{(s - t)A} g(t) on (t, tbar].
Path extend_semigroup(const Path& g, double tbar);

/// ||g||_0 over grid samples.
double sup_norm(const Path& g);
/// max over grid samples strictly before the horizon (0 for a single-sample path).
double sup_norm_before_horizon(const Path& g);

/// d_inf(g, h) = |t_g - t_h| + ||g_{t,T,A} - h_{s,T,A}||_0.
double metric_d_infty(const Path& g, const Path& h);

using PathFunctional = std::function<double(const Path&)>;

struct DupireDerivatives {
  /// Forward-difference horizontal derivative; empty at the final horizon T.
  std::optional<double> dt;
  /// Central-difference vertical derivative.
  HVec dx;
  double bump = 0.0;
};

/// Numerical Dupire derivatives of `f` at `g`. The vertical step defaults to
/// 1e-5 * max(1, |g(t)|); the horizontal step is one grid step.
DupireDerivatives dupire_derivatives(const PathFunctional& f, const Path& g,
                                     std::optional<double> bump = std::nullopt);

}  // namespace phjb
