#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "phjb/control_value.hpp"
#include "phjb/gauge.hpp"
#include "phjb/variational.hpp"

namespace phjb {

/// A smooth test functional with analytic Dupire derivatives.
struct TestFunctionParts {
  std::string name;
  PathFunctional value;
  std::function<double(const Path&)> dt;
  std::function<HVec(const Path&)> dx;
  bool a_star_dx_continuous = true;
};

struct DerivativeMismatch {
  double worst_dx = 0.0;  // relative to max(1, |dx|)
  double worst_dt = 0.0;  // relative to max(1, |dt|)
  int checked = 0;
};

/// Compares analytic derivatives with numerical ones on `paths`. The
/// horizontal check refines the path linearly (factor 256) and applies one
/// Richardson step to the forward difference; it is skipped at T.
DerivativeMismatch compare_derivatives(const TestFunctionParts& parts,
                                       const std::vector<Path>& paths);

class TestFunctionPhi {
 public:
  /// Validates the derivatives on `paths`; throws PreconditionError when a
  /// mismatch exceeds 1e-5.
  TestFunctionPhi(TestFunctionParts parts, const std::vector<Path>& paths);

  const std::string& name() const { return parts_.name; }
  double operator()(const Path& g) const { return parts_.value(g); }
  double dt(const Path& g) const { return parts_.dt(g); }
  HVec dx(const Path& g) const { return parts_.dx(g); }
  bool a_star_dx_continuous() const { return parts_.a_star_dx_continuous; }
  const TestFunctionParts& parts() const { return parts_; }
  const DerivativeMismatch& validation() const { return validation_; }

 private:
  TestFunctionParts parts_;
  DerivativeMismatch validation_;
};

/// f(t, x_0, x_1, ..., x_m) with x_0 = g(t) and x_j = g(min(t, tau_j)).
struct CylinderSpec {
  std::string name;
  std::vector<double> taus;
  std::function<double(double, const std::vector<HVec>&)> f;
  std::function<double(double, const std::vector<HVec>&)> f_t;
  /// Partial gradients with respect to x_0, ..., x_m.
  std::function<std::vector<HVec>(double, const std::vector<HVec>&)> grad;
};

/// Cylinder functional: dx = grad_0 + sum over tau_j >= t of grad_j, dt = f_t.
TestFunctionParts cylinder(CylinderSpec spec);

/// Outer function h(s, y) of a gauge pack, with h_y >= 0.
struct OuterFunction {
  std::function<double(double, double)> h;
  std::function<double(double, double)> h_t;
  std::function<double(double, double)> h_y;

  static OuterFunction zero();
};

/// g(gamma_s) = h(s, Upsilon^M(gamma_s)) + sum_i delta_i barUpsilon^M(gamma_s - anchor_i).
struct GaugePack {
  OuterFunction outer = OuterFunction::zero();
  std::vector<double> weights;
  std::vector<Path> anchors;
  GaugeParams params;
  double bound = 1e6;  // N

  static GaugePack none();
  /// Single anchor with weight `delta` and zero outer function.
  static GaugePack anchored(const Path& anchor, double delta);

  /// Checks weights >= 0, sum <= N, anchor norms <= N.
  void validate() const;
  double value(const Path& g) const;
  /// h_t + 2 sum delta_i (s - t_i).
  double dt(const Path& g) const;
  /// h_y dx Upsilon + sum delta_i dx Upsilon(g - anchor_i).
  HVec dx(const Path& g) const;
};

/// phi(X_s) - phi(X_tbar) minus the trapezoid quadrature of
/// dt phi + (A* dx phi, X) + (dx phi, F(X, u)) over [tbar, s].
double ito_residual(const TestFunctionPhi& phi, const Coefficients& c, const Path& g,
                    const ControlSignal& u, double tbar, double s,
                    const SolveOptions& options = {});

/// RHS - LHS of
///   Upsilon^M(X_s - eta_{t,s,A}) <= Upsilon^M(X_t - eta_t)
///                                 + int_t^s (dx Upsilon^M(X - eta_{t,.,A}), F(X, u)).
double upsilon_inequality_check(const Coefficients& c, const Path& g, const Path& eta,
                                const ControlSignal& u, double s, double M,
                                const SolveOptions& options = {});

enum class Side { kSub, kSuper };

struct HjbResidual {
  Side side = Side::kSub;
  double time = 0.0;
  double dt_phi = 0.0;
  double dt_gauge = 0.0;
  double pairing = 0.0;      // (A* dx phi, gamma(t))
  double hamiltonian = 0.0;  // H evaluated at +-(dx phi + dx g)
  double margin = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  // Premise certificate over the net.
  std::size_t net_size = 0;
  double worst_net_gap = 0.0;  // max over the net of (w - phi - g) (sub) or -(w + phi + g) (super)
  bool bp_confirms_point = false;
};

/// Thrown when the touching premise fails on the net; carries the witness.
class PremiseViolation : public std::runtime_error {
 public:
  PremiseViolation(const std::string& what, Path witness, double gap)
      : std::runtime_error(what), witness_(std::move(witness)), gap_(gap) {}
  const Path& witness() const { return witness_; }
  double gap() const { return gap_; }

 private:
  Path witness_;
  double gap_;
};

struct ViscosityOptions {
  double tolerance = 1e-3;
  double premise_tolerance = 1e-9;
  Sense sense = Sense::kInf;
  bool run_bp = true;
};

/// Definition-level check at `point`. Sub side: at a maximum of w - phi - g,
///   dt phi + dt g + (A* dx phi, gamma(t)) + H(gamma, dx phi + dx g) >= -tol.
/// Super side: at a minimum of w + phi + g,
///   -dt phi - dt g - (A* dx phi, gamma(t)) + H(gamma, -dx phi - dx g) <= tol.
/// The premise is verified over `net` (points with horizon >= t).
HjbResidual viscosity_check(const PathFunctional& w, const TestFunctionPhi& phi,
                            const GaugePack& gauge, const Path& point, Side side,
                            const Coefficients& c, const std::vector<Path>& net,
                            const ViscosityOptions& options = {});

/// max over terminal paths of w - phi (sub) or phi - w (super).
double terminal_gap(const PathFunctional& w, const Coefficients& c,
                    const std::vector<Path>& terminal_paths, Side side);

struct ClassicalPoint {
  double time = 0.0;
  bool terminal = false;
  bool differentiable = true;
  double kink = 0.0;      // max one-sided vertical slope disagreement
  double residual = 0.0;  // equation residual, or terminal mismatch at T
};

struct ClassicalReport {
  std::vector<ClassicalPoint> points;
  double max_residual = 0.0;
  double terminal_mismatch = 0.0;
  int non_differentiable = 0;
  bool passed = true;
};

struct ClassicalOptions {
  double kink_step = 1e-4;
  double kink_tolerance = 1e-3;
  double tolerance = 1e-9;
  Sense sense = Sense::kInf;
};

/// Pointwise residual dt w + (A* dx w, gamma(t)) + H(gamma, dx w) and terminal
/// mismatch. Points where one-sided vertical slopes disagree are flagged and
/// excluded from the residual maximum.
ClassicalReport classical_check(const TestFunctionPhi& w, const Coefficients& c,
                                const std::vector<Path>& points,
                                const ClassicalOptions& options = {});

enum class Perturbation { kTerminal, kRunning, kDrift };

/// (F, q, phi) shifted by eps in the chosen slot: phi + eps, q + eps, or
/// F + eps e_1. The declared constant becomes L + eps.
Coefficients perturbed(const Coefficients& c, const SpacePtr& space, Perturbation kind,
                       double eps);

struct StabilityEntry {
  double eps = 0.0;
  double gap = 0.0;    // sup over the test set of |v_eps - v|
  double ratio = 0.0;  // gap / eps
  bool hypothesis = true;
};

struct StabilityReport {
  Perturbation kind = Perturbation::kTerminal;
  std::vector<StabilityEntry> entries;
  double bound_factor = 0.0;  // e^{L T}
  bool monotone = true;
  bool within_bound = true;
  std::optional<bool> probe;
  bool passed = true;
};

struct StabilityOptions {
  ValueOptions value;
  int hypothesis_trials = 200;
  std::uint64_t seed = 7;
  /// Extra check run on the unperturbed instance (e.g. a viscosity probe).
  std::function<bool()> limit_probe;
};

/// v_eps = value_dpp under the perturbed data, compared with v on `tests`.
/// Passes when gaps decrease with eps, the smallest-eps gap is within
/// e^{LT} eps, and the probe (if any) passes.
StabilityReport stability_experiment(const Coefficients& c, const SpacePtr& space,
                                     const TimeGrid& grid, Perturbation kind,
                                     const std::vector<double>& epsilons,
                                     const std::vector<Path>& tests,
                                     const StabilityOptions& options = {});

}  // namespace phjb
