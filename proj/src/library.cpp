#include "phjb/library.hpp"

#include <algorithm>

#include "phjb/error.hpp"

namespace phjb {

namespace {

std::vector<double> endpoint(const Path& g) {
  const HVec& x = g.back();
  return std::vector<double>(x.data(), x.data() + x.size());
}

std::vector<double> norm_and_endpoint(const Path& g) {
  std::vector<double> s{sup_norm(g)};
  const HVec& x = g.back();
  s.insert(s.end(), x.data(), x.data() + x.size());
  return s;
}

void apply(Coefficients& c, const LibraryParams& params) {
  if (params.lipschitz) {
    if (!(*params.lipschitz > 0.0)) throw PreconditionError("lipschitz must be > 0");
    c.lipschitz = *params.lipschitz;
  }
  if (params.controls) {
    if (params.controls->empty()) throw PreconditionError("control set must be nonempty");
    c.controls = *params.controls;
  }
}

}  // namespace

Coefficients eikonal(const SpacePtr& space, const LibraryParams& params) {
  Coefficients c;
  c.name = "eikonal";
  c.controls = {-1.0, 0.0, 1.0};
  const HVec e1 = space->unit(0);
  c.drift = [e1](const Path&, Control u) { return HVec(u * e1); };
  c.running_cost = [](const Path&, Control) { return 0.0; };
  c.terminal_cost = [](const Path& g) { return g.back().norm(); };
  c.lipschitz = 1.0;
  c.statistic = endpoint;
  apply(c, params);
  return c;
}

Coefficients runmax(const SpacePtr& space, const LibraryParams& params) {
  Coefficients c = eikonal(space);
  c.name = "runmax";
  c.terminal_cost = [](const Path& g) { return sup_norm(g); };
  c.statistic = norm_and_endpoint;
  apply(c, params);
  return c;
}

Coefficients feedback(const SpacePtr& space, const LibraryParams& params) {
  Coefficients c;
  c.name = "feedback";
  c.controls = {-1.0, 0.0, 1.0};
  const HVec e1 = space->unit(0);
  c.drift = [e1](const Path& g, Control u) {
    const HVec& x = g.back();
    const HVec projected = x / std::max(1.0, x.norm());
    return HVec(u * e1 - 0.5 * projected - 0.5 * std::min(1.0, sup_norm(g)) * e1);
  };
  c.running_cost = [](const Path&, Control u) { return 0.25 * std::abs(u); };
  c.terminal_cost = [](const Path& g) { return g.back().norm(); };
  c.lipschitz = 2.0;
  c.statistic = norm_and_endpoint;
  apply(c, params);
  return c;
}

Coefficients transport(const SpacePtr& space, const LibraryParams& params) {
  HVec dir = space->unit(0);
  if (params.direction) {
    if (static_cast<int>(params.direction->size()) != space->dim()) {
      throw PreconditionError("transport direction has the wrong dimension");
    }
    dir = Eigen::Map<const HVec>(params.direction->data(), space->dim());
  }
  Coefficients c;
  c.name = "transport";
  c.controls = {0.0};
  c.drift = [n = space->dim()](const Path&, Control) { return HVec(HVec::Zero(n)); };
  c.running_cost = [](const Path&, Control) { return 0.0; };
  c.terminal_cost = [dir](const Path& g) { return dir.dot(g.back()); };
  c.lipschitz = std::max(1.0, dir.norm());
  c.statistic = endpoint;
  apply(c, params);
  return c;
}

Coefficients make_coefficients(const std::string& name, const SpacePtr& space,
                               const LibraryParams& params) {
  if (name == "eikonal") return eikonal(space, params);
  if (name == "runmax") return runmax(space, params);
  if (name == "feedback") return feedback(space, params);
  if (name == "transport") return transport(space, params);
  throw PreconditionError("unknown coefficients '" + name + "'");
}

std::vector<std::string> library_names() { return {"eikonal", "runmax", "feedback", "transport"}; }

}  // namespace phjb
