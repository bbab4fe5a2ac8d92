#include "phjb/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "phjb/error.hpp"

namespace phjb {

using nlohmann::json;

namespace {

const json& require(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) throw ParseError(where + ": expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(where + "." + key + ": missing");
  return *it;
}

std::string require_string(const json& v, const std::string& field) {
  if (!v.is_string()) throw ParseError(field + ": expected a string");
  return v.get<std::string>();
}

std::int64_t parse_integer(const json& v, const std::string& field) {
  if (v.is_number_integer()) return v.get<std::int64_t>();
  if (!v.is_string()) throw ParseError(field + ": expected an integer");
  const std::string s = v.get<std::string>();
  std::int64_t out = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError(field + ": '" + s + "' is not an integer");
  }
  return out;
}

std::vector<double> decimal_list(const json& v, const std::string& field) {
  if (!v.is_array()) throw ParseError(field + ": expected an array");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(parse_decimal(v[i], field + "[" + std::to_string(i) + "]"));
  }
  return out;
}

TimeGrid make_grid(double T, double step, const std::string& field) {
  try {
    return TimeGrid::make(T, step);
  } catch (const PreconditionError& e) {
    std::ostringstream msg;
    msg << field << ": T/step = " << T / step << " is not a positive integer";
    throw ValidationError(msg.str());
  }
}

}  // namespace

double parse_decimal(const json& value, const std::string& field) {
  if (!value.is_string()) throw ParseError(field + ": expected a decimal string");
  const std::string s = value.get<std::string>();
  double out = 0.0;
  const char* begin = s.data();
  if (!s.empty() && s.front() == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, s.data() + s.size(), out);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw ParseError(field + ": '" + s + "' is not a decimal number");
  }
  if (!std::isfinite(out)) throw ValidationError(field + ": must be finite");
  return out;
}

std::vector<std::string> check_kinds() {
  return {"hypothesis", "state_estimates", "value",    "dpp",       "signature",
          "value_regularity", "viscosity", "classical", "stability", "ito",
          "upsilon_inequality",   "bp_search"};
}

Scenario parse_scenario(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  if (!root.is_object()) throw ParseError("config: expected a JSON object");

  Scenario s;
  s.source = root;
  s.name = root.contains("name") ? require_string(root["name"], "name") : "scenario";

  const json& space = require(root, "space", "config");
  const std::int64_t dim = parse_integer(require(space, "dim", "space"), "space.dim");
  s.eigenvalues = decimal_list(require(space, "eigenvalues", "space"), "space.eigenvalues");
  if (dim < 1) throw ValidationError("space.dim: must be >= 1");
  if (static_cast<std::int64_t>(s.eigenvalues.size()) != dim) {
    throw ValidationError("space.eigenvalues: expected " + std::to_string(dim) + " entries");
  }
  for (std::size_t k = 0; k < s.eigenvalues.size(); ++k) {
    if (s.eigenvalues[k] > 0.0) {
      throw ValidationError("space.eigenvalues[" + std::to_string(k) + "]: must be <= 0 (contraction)");
    }
  }
  s.space = make_space(s.eigenvalues);

  const json& grid = require(root, "grid", "config");
  const double T = parse_decimal(require(grid, "T", "grid"), "grid.T");
  const double step = parse_decimal(require(grid, "step", "grid"), "grid.step");
  if (!(T > 0.0)) throw ValidationError("grid.T: must be > 0");
  if (!(step > 0.0)) throw ValidationError("grid.step: must be > 0");
  s.grid = make_grid(T, step, "grid.step");
  s.sample_step = s.grid.step;

  const json& coeff = require(root, "coefficients", "config");
  s.coefficients = require_string(require(coeff, "name", "coefficients"), "coefficients.name");
  const auto names = library_names();
  if (std::find(names.begin(), names.end(), s.coefficients) == names.end()) {
    throw ValidationError("coefficients.name: unknown coefficients '" + s.coefficients + "'");
  }
  if (coeff.contains("lipschitz")) {
    const double L = parse_decimal(coeff["lipschitz"], "coefficients.lipschitz");
    if (!(L > 0.0)) throw ValidationError("coefficients.lipschitz: must be > 0");
    s.params.lipschitz = L;
  }
  if (coeff.contains("controls")) {
    s.params.controls = decimal_list(coeff["controls"], "coefficients.controls");
    if (s.params.controls->empty()) throw ValidationError("coefficients.controls: must be nonempty");
  }
  if (coeff.contains("direction")) {
    s.params.direction = decimal_list(coeff["direction"], "coefficients.direction");
    if (static_cast<std::int64_t>(s.params.direction->size()) != dim) {
      throw ValidationError("coefficients.direction: expected " + std::to_string(dim) + " entries");
    }
  }

  if (root.contains("initial_path")) {
    const json& ip = root["initial_path"];
    s.initial_horizon = parse_decimal(require(ip, "horizon", "initial_path"), "initial_path.horizon");
    const json& samples = require(ip, "samples", "initial_path");
    if (!samples.is_array()) throw ParseError("initial_path.samples: expected an array");
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const std::string field = "initial_path.samples[" + std::to_string(i) + "]";
      s.initial_samples.push_back(decimal_list(samples[i], field));
      if (static_cast<std::int64_t>(s.initial_samples.back().size()) != dim) {
        throw ValidationError(field + ": expected " + std::to_string(dim) + " coordinates");
      }
    }
    if (!s.grid.on_grid(s.initial_horizon) || s.initial_horizon > T) {
      throw ValidationError("initial_path.horizon: not a grid time in [0, T]");
    }
    const auto expected = static_cast<std::size_t>(s.grid.index_of(s.initial_horizon)) + 1;
    if (s.initial_samples.size() != expected) {
      throw ValidationError("initial_path.samples: expected " + std::to_string(expected) +
                            " samples for the horizon");
    }
  } else {
    s.initial_samples.assign(1, std::vector<double>(static_cast<std::size_t>(dim), 0.0));
  }

  if (root.contains("seed")) {
    const std::int64_t seed = parse_integer(root["seed"], "seed");
    if (seed < 0) throw ValidationError("seed: must be >= 0");
    s.seed = static_cast<std::uint64_t>(seed);
  }

  if (root.contains("checks")) {
    const json& checks = root["checks"];
    if (!checks.is_array()) throw ParseError("checks: expected an array");
    const auto kinds = check_kinds();
    for (std::size_t i = 0; i < checks.size(); ++i) {
      const std::string field = "checks[" + std::to_string(i) + "]";
      CheckSpec spec;
      if (checks[i].is_string()) {
        spec.kind = checks[i].get<std::string>();
      } else if (checks[i].is_object()) {
        spec.kind = require_string(require(checks[i], "kind", field), field + ".kind");
        spec.params = checks[i];
      } else {
        throw ParseError(field + ": expected a string or an object");
      }
      if (std::find(kinds.begin(), kinds.end(), spec.kind) == kinds.end()) {
        throw ValidationError(field + ".kind: unknown check '" + spec.kind + "'");
      }
      s.checks.push_back(std::move(spec));
    }
  }
  return s;
}

Scenario load_scenario(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw ParseError(file + ": cannot open");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

void override_step(Scenario& s, const std::string& step) {
  const double h = parse_decimal(json(step), "--grid");
  if (!(h > 0.0)) throw ValidationError("--grid: must be > 0");
  const TimeGrid grid = make_grid(s.grid.final_time, h, "--grid");
  if (s.initial_samples.size() > 1) {
    const double ratio = s.sample_step / h;
    if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio || std::round(ratio) < 1.0) {
      throw ValidationError("--grid: must divide the step of initial_path.samples");
    }
  }
  s.grid = grid;
}

Coefficients Scenario::build() const { return make_coefficients(coefficients, space, params); }

Path Scenario::initial_path() const {
  std::vector<HVec> samples;
  for (const auto& row : initial_samples) {
    samples.push_back(Eigen::Map<const HVec>(row.data(), static_cast<Eigen::Index>(row.size())));
  }
  if (samples.size() == 1) return Path(space, grid, std::move(samples));
  const TimeGrid given{grid.final_time, sample_step};
  const Path coarse(space, given, std::move(samples));
  const int factor = static_cast<int>(std::lround(sample_step / grid.step));
  return factor == 1 ? coarse : refine_linear(coarse, factor);
}

}  // namespace phjb
