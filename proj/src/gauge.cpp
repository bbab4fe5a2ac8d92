#include "phjb/gauge.hpp"

#include "phjb/error.hpp"

namespace phjb {

double eval_S(const Path& g) {
  const double m = sup_norm(g);
  const double sup2 = m * m;
  if (sup2 == 0.0) return 0.0;
  const double gap = sup2 - g.back().squaredNorm();
  return gap * gap / sup2;
}

HVec grad_S(const Path& g) {
  const double m = sup_norm(g);
  const double sup2 = m * m;
  if (sup2 == 0.0) return g.space().zero();
  const double gap = sup2 - g.back().squaredNorm();
  return (-4.0 * gap / sup2) * g.back();
}

double eval_upsilon(const GaugeParams& params, const Path& g) {
  return eval_S(g) + params.M * g.back().squaredNorm();
}

HVec grad_upsilon(const GaugeParams& params, const Path& g) {
  return grad_S(g) + (2.0 * params.M) * g.back();
}

Path gauge_difference(const Path& anchor, const Path& g) {
  if (anchor.horizon() > g.horizon()) return gauge_difference(g, anchor);
  return g - extend_semigroup(anchor, g.horizon());
}

double eval_upsilon_pair(const GaugeParams& params, const Path& anchor, const Path& g,
                         bool with_time) {
  const double value = eval_upsilon(params, gauge_difference(anchor, g));
  if (!with_time) return value;
  const double dt = g.horizon() - anchor.horizon();
  return value + dt * dt;
}

}  // namespace phjb
