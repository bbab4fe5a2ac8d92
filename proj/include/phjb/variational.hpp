#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "phjb/gauge.hpp"

namespace phjb {

/// A gauge-type function rho on paths together with a modulus: rho <= delta
/// must force d_inf <= modulus(delta).
struct GaugeFn {
  std::string name;
  std::function<double(const Path&, const Path&)> eval;
  std::function<double(double)> modulus;
};

/// rho(anchor, g) = barred Upsilon^M(anchor, g). For M >= 2 the sandwich bound gives
/// modulus(delta) = (1 + sqrt 3) sqrt(delta).
GaugeFn upsilon_bar_gauge(GaugeParams params = {});

struct GaugeCheck {
  int samples = 0;
  double worst_self = 0.0;   // max rho(g, g)
  double worst_ratio = 0.0;  // max d_inf / modulus(rho)
  bool passed = true;
};

/// Samples random pairs (including near-diagonal ones) and checks rho(g, g) = 0
/// and d_inf(g, h) <= modulus(rho(g, h)).
GaugeCheck validate_gauge(const GaugeFn& rho, const SpacePtr& space, const TimeGrid& grid,
                          int samples, std::uint64_t seed);

struct BPOptions {
  double delta0 = 1.0;  // delta_i = delta0 2^-i
  int max_anchors = 64;
  double stop_gauge = 1e-12;
};

struct BPAnchor {
  std::size_t index = 0;  // position in the net
  double time = 0.0;
  double weight = 0.0;
  double gauge_to_maximizer = 0.0;
};

struct BPResult {
  std::size_t maximizer = 0;  // position in the net
  double time = 0.0;
  std::vector<BPAnchor> anchors;
  double perturbation = 0.0;     // sum_i delta_i rho(anchor_i, maximizer)
  double perturbed_value = 0.0;  // f(maximizer) - perturbation
  int iterations = 0;
  /// Some anchor repeated its predecessor's horizon.
  bool time_stalled = false;
  /// The anchor cap forced an exact argmax step.
  bool capped = false;
};

/// Borwein-Preiss search on a finite net. Requires start in the net and
/// f(start) >= max_net f - eps. Anchors are near-maximizers of the current
/// perturbed functional over the surviving later-horizon set, chosen closest
/// in rho to the previous anchor; the set shrinks until only the maximizer remains.
BPResult bp_search(const PathFunctional& f, const std::vector<Path>& net, const GaugeFn& rho,
                   double eps, const Path& start, const BPOptions& options = {});

struct BPCheck {
  bool closeness = true;   // rho(anchor_i, maximizer) <= eps / (2^i delta0)
  bool improvement = true; // f(max) - sum delta_i rho(anchor_i, max) >= f(start)
  bool strict_max = true;  // strict maximizer over later-horizon net points
  bool summable = true;    // perturbation <= 2 eps / delta0
  std::string detail;
  bool passed() const { return closeness && improvement && strict_max && summable; }
};

/// Recomputes the three conclusions of the principle from scratch over the whole net.
BPCheck check_bp_result(const PathFunctional& f, const std::vector<Path>& net, const GaugeFn& rho,
                        double eps, const Path& start, const BPResult& result,
                        const BPOptions& options = {});

}  // namespace phjb
