#pragma once

#include "qakns/config.hpp"
#include "qakns/report.hpp"

#include <string>
#include <vector>

namespace qakns {

struct SuiteOptions {
    // check-name prefixes; empty runs everything the config selects
    std::vector<std::string> only;
    // "" or "corrupt-dressing": adds a constant diagonal to w_1 before the bilinear checks
    std::string inject;
};

// Runs the selected checks in dependency order. A check that throws is
// recorded as an error and the run continues.
Report run_suite(const RunConfig& cfg, const SuiteOptions& o = {});

// Names run_suite can produce for cfg, in order.
std::vector<std::string> check_names(const RunConfig& cfg);

} // namespace qakns
