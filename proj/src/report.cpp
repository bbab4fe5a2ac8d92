#include "phjb/report.hpp"

#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace phjb {

using nlohmann::json;

const char* const kVersion = "0.3.0";

bool Report::passed() const {
  for (const auto& r : records) {
    if (!r.passed) return false;
  }
  return true;
}

json path_to_json(const Path& g) {
  json samples = json::array();
  for (const HVec& x : g.samples()) samples.push_back(std::vector<double>(x.data(), x.data() + x.size()));
  return {{"horizon", g.horizon()}, {"step", g.grid().step}, {"samples", samples}};
}

json to_json(const Report& r) {
  json records = json::array();
  for (const auto& rec : r.records) {
    json margins = json::array();
    for (const auto& m : rec.margins) margins.push_back({{"label", m.label}, {"value", m.value}});
    records.push_back({{"name", rec.name},
                       {"passed", rec.passed},
                       {"margins", margins},
                       {"constants", rec.constants},
                       {"details", rec.details}});
  }
  return {{"version", kVersion},
          {"scenario", r.scenario},
          {"grid", {{"T", r.grid.final_time}, {"step", r.grid.step}}},
          {"passed", r.passed()},
          {"records", records},
          {"timing", {{"wall_clock_seconds", r.wall_clock_seconds}}}};
}

namespace {

double number_or_nan(const json& v) {
  return v.is_number() ? v.get<double>() : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

Report report_from_json(const json& j) {
  Report r;
  r.scenario = j.at("scenario");
  r.grid = TimeGrid{j.at("grid").at("T").get<double>(), j.at("grid").at("step").get<double>()};
  for (const auto& rec : j.at("records")) {
    Record out;
    out.name = rec.at("name").get<std::string>();
    out.passed = rec.at("passed").get<bool>();
    for (const auto& m : rec.at("margins")) {
      out.margins.push_back({m.at("label").get<std::string>(), number_or_nan(m.at("value"))});
    }
    for (const auto& [k, v] : rec.at("constants").items()) out.constants[k] = number_or_nan(v);
    out.details = rec.at("details");
    r.records.push_back(std::move(out));
  }
  if (j.contains("timing")) r.wall_clock_seconds = j["timing"].value("wall_clock_seconds", 0.0);
  return r;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string to_csv(const Report& r) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "record,label,value,passed\n";
  for (const auto& rec : r.records) {
    for (const auto& m : rec.margins) {
      out << csv_field(rec.name) << ',' << csv_field(m.label) << ',' << m.value << ','
          << (rec.passed ? "true" : "false") << '\n';
    }
  }
  return out.str();
}

void emit_report(const Report& r, Format format, const std::string& destination) {
  const std::string text = format == Format::kJson ? to_json(r).dump(2) + "\n" : to_csv(r);
  if (destination == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(destination);
  if (!out) throw std::runtime_error(destination + ": cannot open for writing");
  out << text;
  if (!out) throw std::runtime_error(destination + ": write failed");
}

}  // namespace phjb
