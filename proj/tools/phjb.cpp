// phjb: run verification scenarios and emit JSON or CSV reports.
//
// Exit codes: 0 all checks pass, 1 a check failed, 2 parse error,
// 3 validation error.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "phjb/runner.hpp"

namespace {

struct Common {
  std::string config;
  std::string grid;
  std::optional<long long> seed;
  std::string format = "json";
  std::string out = "-";
};

void add_common(CLI::App* cmd, Common& o) {
  cmd->add_option("config", o.config, "Scenario file (JSON)")->required();
  cmd->add_option("--grid", o.grid, "Override the time step, e.g. 0.0625");
  cmd->add_option("--seed", o.seed, "Override the scenario seed");
  cmd->add_option("--format", o.format, "Report format")
      ->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--out", o.out, "Output file, '-' for stdout");
}

phjb::Scenario load(const Common& o) {
  phjb::Scenario s = phjb::load_scenario(o.config);
  if (!o.grid.empty()) {
    phjb::override_step(s, o.grid);
    s.source["grid"]["step"] = o.grid;
  }
  if (o.seed) {
    if (*o.seed < 0) throw phjb::ValidationError("--seed: must be >= 0");
    s.seed = static_cast<std::uint64_t>(*o.seed);
    s.source["seed"] = *o.seed;
  }
  return s;
}

// The declared check of this kind (with its parameters), or a default one.
phjb::CheckSpec declared(const phjb::Scenario& s, const std::string& kind) {
  for (const auto& c : s.checks) {
    if (c.kind == kind) return c;
  }
  return phjb::CheckSpec{kind};
}

int finish(const phjb::Report& r, const Common& o) {
  phjb::emit_report(r, o.format == "csv" ? phjb::Format::kCsv : phjb::Format::kJson, o.out);
  return phjb::exit_code(r);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Path-dependent HJB verification workbench"};
  app.set_version_flag("--version", phjb::kVersion);
  app.require_subcommand(1);

  Common o;
  std::string perturbation;
  std::string eps;
  std::string shift;

  auto* run = app.add_subcommand("run", "Run every check declared in the scenario");
  add_common(run, o);
  auto* value = app.add_subcommand("value", "Value functional at the initial path");
  add_common(value, o);
  auto* ito = app.add_subcommand("check-ito", "Functional Ito residuals under refinement");
  add_common(ito, o);
  auto* visc = app.add_subcommand("check-viscosity", "Sub/super tests at touching points");
  add_common(visc, o);
  visc->add_option("--shift", shift, "Test w = V + k (T - t) instead of V");
  auto* classical = app.add_subcommand("check-classical", "Pointwise residual of a classical solution");
  add_common(classical, o);
  auto* stab = app.add_subcommand("stability", "Value gaps under shrinking perturbations");
  add_common(stab, o);
  stab->add_option("--perturbation", perturbation, "terminal, running or drift");
  auto* bp = app.add_subcommand("bp-search", "Borwein-Preiss search on a control-tree net");
  add_common(bp, o);
  bp->add_option("--eps", eps, "Near-maximality slack");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    const phjb::Scenario s = load(o);
    if (run->parsed()) return finish(phjb::run_scenario(s), o);

    std::string kind;
    if (value->parsed()) kind = "value";
    if (ito->parsed()) kind = "ito";
    if (visc->parsed()) kind = "viscosity";
    if (classical->parsed()) kind = "classical";
    if (stab->parsed()) kind = "stability";
    if (bp->parsed()) kind = "bp_search";
    phjb::CheckSpec check = declared(s, kind);
    if (!shift.empty()) check.params["shift"] = shift;
    if (!perturbation.empty()) check.params["perturbation"] = perturbation;
    if (!eps.empty()) check.params["eps"] = eps;
    return finish(phjb::run_checks(s, {check}), o);
  } catch (const phjb::ParseError& e) {
    std::cerr << "phjb: parse error: " << e.what() << "\n";
    return 2;
  } catch (const phjb::ValidationError& e) {
    std::cerr << "phjb: invalid input: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "phjb: " << e.what() << "\n";
    return 3;
  }
}
