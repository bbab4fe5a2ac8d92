#pragma once

#include <vector>

#include "phjb/report.hpp"
#include "phjb/scenario.hpp"

namespace phjb {

/// Runs one check. Exceptions raised by the check itself (precondition,
/// numerical, budget) become a failed record carrying an "error" detail;
/// ValidationError for bad check parameters propagates.
Record run_check(const Scenario& s, const CheckSpec& check);

/// Executes `checks` in order against the scenario.
Report run_checks(const Scenario& s, const std::vector<CheckSpec>& checks);

/// run_checks with the scenario's declared checks.
Report run_scenario(const Scenario& s);

/// 0 when every record passed, 1 otherwise.
int exit_code(const Report& r);

}  // namespace phjb
