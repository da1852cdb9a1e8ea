#include "qakns/report.hpp"

#include "qakns/errors.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

namespace qakns {

using nlohmann::json;

std::string to_string(Status s)
{
    switch (s) {
    case Status::Pass: return "pass";
    case Status::Fail: return "fail";
    case Status::Error: return "error";
    }
    return "error";
}

bool Report::passed() const
{
    return std::all_of(checks.begin(), checks.end(), [](const CheckRecord& c) { return c.status == Status::Pass; });
}

int Report::count(Status s) const
{
    return static_cast<int>(std::count_if(checks.begin(), checks.end(), [s](const CheckRecord& c) { return c.status == s; }));
}

namespace {

json degrees(const std::optional<Residual>& r)
{
    if (!r || r->checked == 0) return nullptr;
    json j;
    j["z"] = r->min_z == INT_MAX ? json(nullptr) : json(r->min_z);
    j["x"] = r->max_x;
    j["t"] = r->max_t < 0 ? json(nullptr) : json(r->max_t);
    j["coefficients"] = r->checked;
    return j;
}

json term(const std::optional<Residual>& r)
{
    if (!r || r->zero || !r->first) return nullptr;
    const Term& t = *r->first;
    return {{"z_degree", t.z_degree}, {"x_degree", t.x_degree}, {"row", t.row + 1},
            {"col", t.col + 1},       {"monomial", t.monomial}, {"value", to_string(t.value)}};
}

std::string term_text(const Term& t)
{
    std::ostringstream os;
    os << "z^" << t.z_degree << " x^" << t.x_degree;
    if (!t.monomial.empty()) os << " " << t.monomial;
    os << " (" << t.row + 1 << "," << t.col + 1 << ") = " << to_string(t.value);
    return os.str();
}

} // namespace

json to_json(const Report& r, bool timing)
{
    json checks = json::array();
    for (const auto& c : r.checks) {
        json j;
        j["name"] = c.name;
        j["params"] = c.params;
        j["status"] = to_string(c.status);
        j["max_degree_verified"] = degrees(c.residual);
        j["first_failure"] = term(c.residual);
        if (!c.message.empty()) j["message"] = c.message;
        j["ms"] = timing ? std::round(c.ms * 1000) / 1000 : 0.0;
        checks.push_back(j);
    }
    return {{"config_hash", r.config_hash}, {"checks", checks}};
}

std::string to_text(const Report& r)
{
    size_t w = 5;
    for (const auto& c : r.checks) w = std::max(w, c.name.size());
    std::ostringstream os;
    os << "config " << r.config_hash << "\n";
    os << std::left << std::setw(static_cast<int>(w) + 2) << "check" << std::setw(7) << "status" << std::setw(16)
       << "depth z/x/t" << std::right << std::setw(10) << "ms" << "  detail\n";
    for (const auto& c : r.checks) {
        std::string depth = "-";
        if (c.residual && c.residual->checked > 0) {
            const Residual& res = *c.residual;
            depth = (res.min_z == INT_MAX ? std::string("-") : std::to_string(res.min_z)) + "/" +
                    std::to_string(res.max_x) + "/" + (res.max_t < 0 ? std::string("-") : std::to_string(res.max_t));
        }
        std::string detail = c.message;
        if (c.residual && !c.residual->zero && c.residual->first) {
            if (!detail.empty()) detail += "; ";
            detail += "first nonzero " + term_text(*c.residual->first);
        }
        std::ostringstream ms;
        ms << std::fixed << std::setprecision(1) << c.ms;
        os << std::left << std::setw(static_cast<int>(w) + 2) << c.name << std::setw(7) << to_string(c.status)
           << std::setw(16) << depth << std::right << std::setw(10) << ms.str() << "  " << detail << "\n";
    }
    os << r.count(Status::Pass) << " passed, " << r.count(Status::Fail) << " failed, " << r.count(Status::Error)
       << " errors\n";
    return os.str();
}

std::string emit_report(const Report& r, const std::string& format, bool timing)
{
    if (format == "json") return to_json(r, timing).dump(2) + "\n";
    if (format == "text") return to_text(r);
    throw ConfigError("unknown report format '" + format + "' (json or text)");
}

} // namespace qakns
