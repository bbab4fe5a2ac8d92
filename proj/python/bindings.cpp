// Thin Python surface: scenario runs return report JSON text, plus a few
// direct evaluators for interactive use.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "phjb/control_value.hpp"
#include "phjb/gauge.hpp"
#include "phjb/report.hpp"
#include "phjb/runner.hpp"
#include "phjb/scenario.hpp"

namespace py = pybind11;
using namespace phjb;

namespace {

Scenario prepare(const std::string& text, const std::optional<std::string>& grid,
                 const std::optional<std::uint64_t>& seed) {
  Scenario s = parse_scenario(text);
  if (grid) {
    override_step(s, *grid);
    s.source["grid"]["step"] = *grid;
  }
  if (seed) {
    s.seed = *seed;
    s.source["seed"] = *seed;
  }
  return s;
}

std::vector<CheckSpec> check_list(const std::optional<std::vector<std::string>>& kinds,
                                  const Scenario& s) {
  if (!kinds) return s.checks;
  std::vector<CheckSpec> out;
  for (const std::string& k : *kinds) out.push_back(CheckSpec{k});
  return out;
}

}  // namespace

PYBIND11_MODULE(_phjb, m) {
  m.doc() = "Path-dependent HJB verification workbench";
  m.attr("__version__") = kVersion;

  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);

  m.def(
      "run_json",
      [](const std::string& text, const std::optional<std::vector<std::string>>& checks,
         const std::optional<std::string>& grid, const std::optional<std::uint64_t>& seed) {
        const Scenario s = prepare(text, grid, seed);
        const std::vector<CheckSpec> list = check_list(checks, s);
        Report r;
        {
          py::gil_scoped_release release;
          r = run_checks(s, list);
        }
        return to_json(r).dump();
      },
      py::arg("config"), py::arg("checks") = py::none(), py::arg("grid") = py::none(),
      py::arg("seed") = py::none(), "Run checks on a scenario given as JSON text; returns report JSON.");

  m.def(
      "report_csv",
      [](const std::string& report_json) { return to_csv(report_from_json(nlohmann::json::parse(report_json))); },
      py::arg("report"));

  m.def(
      "value",
      [](const std::string& text, const std::optional<std::string>& grid) {
        const Scenario s = prepare(text, grid, std::nullopt);
        return value_dpp(s.build(), s.initial_path()).value;
      },
      py::arg("config"), py::arg("grid") = py::none(), "Value at the scenario's initial path.");

  m.def(
      "gauge_S",
      [](const std::vector<std::vector<double>>& samples, double step, double final_time,
         const std::vector<double>& eigenvalues) {
        const SpacePtr space = make_space(eigenvalues);
        std::vector<HVec> xs;
        for (const auto& row : samples) xs.push_back(Eigen::Map<const HVec>(row.data(), static_cast<Eigen::Index>(row.size())));
        return eval_S(Path(space, TimeGrid::make(final_time, step), std::move(xs)));
      },
      py::arg("samples"), py::arg("step"), py::arg("final_time"), py::arg("eigenvalues"));

  m.def("check_kinds", &check_kinds);
}
