#pragma once

#include "qakns/residual.hpp"

#include "json.hpp"

#include <optional>
#include <string>
#include <vector>

namespace qakns {

enum class Status { Pass, Fail, Error };

std::string to_string(Status s);

struct CheckRecord {
    std::string name;
    nlohmann::json params = nlohmann::json::object();
    Status status = Status::Pass;
    std::optional<Residual> residual; // absent for checks that are not a coefficient scan
    std::string message;
    double ms = 0;
};

struct Report {
    std::string config_hash;
    std::vector<CheckRecord> checks;

    bool passed() const;
    int count(Status s) const;
};

// timing = false writes "ms": 0 so equal configs give equal bytes
nlohmann::json to_json(const Report& r, bool timing = true);
std::string to_text(const Report& r);
// format is "json" or "text"
std::string emit_report(const Report& r, const std::string& format, bool timing = true);

} // namespace qakns
