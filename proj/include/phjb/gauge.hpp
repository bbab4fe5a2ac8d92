#pragma once

#include "phjb/path.hpp"

namespace phjb {

// Smooth substitutes for ||.||_0^2. S is C^1 in the Dupire sense and
//   ||g||_0^2 <= S(g) + 2|g(t)|^2 <= 3||g||_0^2,
// so Upsilon^M = S + M|g(t)|^2 is norm-equivalent for M >= 2.

struct GaugeParams {
  double M = 2.0;
};

/// S(g) = (||g||_0^2 - |g(t)|^2)^2 / ||g||_0^2, and 0 on the zero path.
double eval_S(const Path& g);
/// Vertical derivative of S: -4 (||g||_0^2 - |g(t)|^2) g(t) / ||g||_0^2.
/// The horizontal derivative of S is identically zero.
HVec grad_S(const Path& g);

double eval_upsilon(const GaugeParams& params, const Path& g);
HVec grad_upsilon(const GaugeParams& params, const Path& g);

/// The difference path g - anchor_{t,s,A} where the earlier-horizon argument
/// is extended by the semigroup to the later horizon. Symmetric in the sense
/// of swapping the arguments when anchor.horizon() > g.horizon().
Path gauge_difference(const Path& anchor, const Path& g);

/// Upsilon^M(anchor, g), plus |s - t|^2 when `with_time` (the barred form).
double eval_upsilon_pair(const GaugeParams& params, const Path& anchor, const Path& g,
                         bool with_time);

}  // namespace phjb
