#pragma once

#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "phjb/path.hpp"

namespace phjb {

struct Margin {
  std::string label;
  double value = 0.0;
};

struct Record {
  std::string name;
  bool passed = true;
  std::vector<Margin> margins;
  std::map<std::string, double> constants;
  nlohmann::json details = nlohmann::json::object();
};

/// Everything except `wall_clock_seconds` is a deterministic function of
/// the scenario and seed.
struct Report {
  nlohmann::json scenario = nlohmann::json::object();
  TimeGrid grid;
  std::vector<Record> records;
  double wall_clock_seconds = 0.0;

  bool passed() const;
};

enum class Format { kJson, kCsv };

nlohmann::json to_json(const Report& r);
Report report_from_json(const nlohmann::json& j);
/// Header `record,label,value,passed`, one row per margin.
std::string to_csv(const Report& r);

/// Writes to `destination`, or stdout for "-". Throws std::runtime_error
/// naming the path on I/O failure.
void emit_report(const Report& r, Format format, const std::string& destination);

nlohmann::json path_to_json(const Path& g);

extern const char* const kVersion;

}  // namespace phjb
