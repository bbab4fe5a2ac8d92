#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "phjb/library.hpp"

namespace phjb {

/// Malformed JSON, missing fields, or fields of the wrong type (exit code 2).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Well-formed input that violates a constraint (exit code 3). The message
/// starts with the offending field path.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CheckSpec {
  std::string kind;
  nlohmann::json params = nlohmann::json::object();
};

/// Scenario file. Real numbers are decimal strings ("0.125", "-1e-3").
///
///   {
///     "name": "eikonal-desk",
///     "space": {"dim": 1, "eigenvalues": ["0"]},
///     "grid": {"T": "1", "step": "0.125"},
///     "coefficients": {"name": "eikonal", "lipschitz": "1", "controls": ["-1", "0", "1"]},
///     "initial_path": {"horizon": "0", "samples": [["0.5"]]},
///     "seed": 7,
///     "checks": ["hypothesis", {"kind": "value", "expect": "0"}]
///   }
struct Scenario {
  std::string name;
  std::vector<double> eigenvalues;
  SpacePtr space;
  TimeGrid grid;
  std::string coefficients;
  LibraryParams params;
  double initial_horizon = 0.0;
  std::vector<std::vector<double>> initial_samples;
  double sample_step = 0.0;  // grid step the samples were given on
  std::uint64_t seed = 1;
  std::vector<CheckSpec> checks;
  nlohmann::json source;

  Coefficients build() const;
  /// The initial path on the current grid (linearly refined if the grid was overridden).
  Path initial_path() const;
};

Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::string& file);

/// Replaces the grid step; the original step must be an integer multiple of it.
void override_step(Scenario& s, const std::string& step);

/// Locale-independent decimal parsing; `field` names the value in errors.
double parse_decimal(const nlohmann::json& value, const std::string& field);

std::vector<std::string> check_kinds();

}  // namespace phjb
