#include "qakns/config.hpp"

#include <openssl/evp.h>

#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

namespace qakns {

using nlohmann::json;

namespace {

const std::set<std::string> kChecks{"q_calculus", "pairing", "hierarchy", "bilinear", "tau", "classical"};

void only_keys(const json& j, const std::set<std::string>& keys, const std::string& where)
{
    if (!j.is_object()) throw ConfigError(where + " must be an object");
    for (const auto& [k, v] : j.items())
        if (!keys.count(k)) throw ConfigError("unknown key '" + k + "' in " + where);
}

Scalar scalar(const json& j, const std::string& where)
{
    if (j.is_string()) return parse_scalar(j.get<std::string>());
    if (j.is_number_integer()) return Scalar(j.get<long>());
    throw ConfigError(where + ": rationals are written as \"p/q\" strings or integers");
}

int integer(const json& j, const std::string& where, int lo = 0)
{
    if (!j.is_number_integer()) throw ConfigError(where + " must be an integer");
    const long v = j.get<long>();
    if (v < lo || v > 1000000) throw ConfigError(where + " out of range");
    return static_cast<int>(v);
}

std::vector<Scalar> scalars(const json& j, const std::string& where)
{
    if (!j.is_array()) throw ConfigError(where + " must be an array");
    std::vector<Scalar> out;
    for (const auto& e : j) out.push_back(scalar(e, where));
    return out;
}

FlowIndex flow(const json& j, int n, const std::string& where)
{
    if (!j.is_array() || j.size() != 2) throw ConfigError(where + ": a flow is [k, alpha]");
    FlowIndex f{integer(j[0], where + " k", 1), integer(j[1], where + " alpha", 1) - 1};
    if (f.alpha >= n) throw ConfigError(where + ": channel " + std::to_string(f.alpha + 1) + " exceeds n");
    return f;
}

TimePoly time_poly(const json& terms, const TimeSpace& space, int nx, const std::string& where)
{
    if (!terms.is_array()) throw ConfigError(where + " must be a list of terms");
    TimePoly p(space, nx);
    for (const auto& t : terms) {
        only_keys(t, {"coeff", "x", "t"}, where);
        const Scalar c = scalar(t.at("coeff"), where + " coeff");
        const int xd = t.contains("x") ? integer(t["x"], where + " x") : 0;
        Monomial m = p.unit_monomial();
        if (t.contains("t")) {
            for (const auto& v : t["t"]) {
                if (!v.is_array() || v.size() != 3) throw ConfigError(where + ": a time factor is [k, alpha, exponent]");
                FlowIndex f{integer(v[0], where + " k", 1), integer(v[1], where + " alpha", 1) - 1};
                if (f.k > space.kmax || f.alpha >= space.n) throw ConfigError(where + ": time outside kmax or n");
                const int e = integer(v[2], where + " exponent");
                if (e > 200) throw ConfigError(where + ": exponent too large");
                m[static_cast<size_t>(space.index(f))] = static_cast<std::uint8_t>(m[static_cast<size_t>(space.index(f))] + e);
            }
        }
        if (xd > nx) continue;
        p.add(m, XSeries::monomial(nx, xd, c));
    }
    return p;
}

json time_poly_json(const TimePoly& p)
{
    json out = json::array();
    for (const auto& [m, c] : p.terms()) {
        for (int k = 0; k < c.precision(); ++k) {
            if (c[k] == 0) continue;
            json ts = json::array();
            for (size_t v = 0; v < m.size(); ++v)
                if (m[v]) {
                    FlowIndex f = p.space().variable(static_cast<int>(v));
                    ts.push_back({f.k, f.alpha + 1, int(m[v])});
                }
            out.push_back({{"coeff", to_string(c[k])}, {"x", k}, {"t", ts}});
        }
    }
    return out;
}

json scalars_json(const std::vector<Scalar>& v)
{
    json out = json::array();
    for (const auto& s : v) out.push_back(to_string(s));
    return out;
}

} // namespace

LaxData RunConfig::lax() const
{
    LaxData l;
    l.structure = classical ? DifferenceStructure::classical() : DifferenceStructure(q);
    l.a = a;
    l.nx = trunc.nx;
    l.nz = trunc.nz;
    const int dim = n();
    l.u = MatX(dim, XSeries(trunc.nx));
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) {
            auto c = u[static_cast<size_t>(i)][static_cast<size_t>(j)];
            if (static_cast<int>(c.size()) > trunc.nx + 1) throw ConfigError("U entry longer than N_x + 1");
            l.u(i, j) = XSeries(trunc.nx, c);
        }
    return l;
}

RunConfig parse_config(const json& j)
{
    only_keys(j, {"name", "a", "q", "structure", "u", "truncation", "flows", "lambda_max", "l_max", "pairing",
                  "limit_ms", "tau", "checks"},
              "config");
    RunConfig c;
    if (j.contains("name")) c.name = j["name"].get<std::string>();
    if (!j.contains("a")) throw ConfigError("config needs the diagonal of A as \"a\"");
    c.a = scalars(j["a"], "a");
    const int n = c.n();
    if (j.contains("q")) c.q = scalar(j["q"], "q");
    if (c.q == 0 || c.q == 1) throw ConfigError("q must differ from 0 and 1");
    if (j.contains("structure")) {
        const std::string s = j["structure"].get<std::string>();
        if (s != "q" && s != "classical") throw ConfigError("structure is \"q\" or \"classical\"");
        c.classical = s == "classical";
    }
    if (j.contains("truncation")) {
        const json& t = j["truncation"];
        only_keys(t, {"nx", "nz", "nd", "nt", "k", "j"}, "truncation");
        if (t.contains("nx")) c.trunc.nx = integer(t["nx"], "N_x", 1);
        if (t.contains("nz")) c.trunc.nz = integer(t["nz"], "N_z", 1);
        if (t.contains("nd")) c.trunc.nd = integer(t["nd"], "N_D", 1);
        if (t.contains("nt")) c.trunc.nt = integer(t["nt"], "N_t", 0);
        if (t.contains("k")) c.trunc.k = integer(t["k"], "K", 1);
        if (t.contains("j")) c.trunc.j = integer(t["j"], "J", 1);
    }
    c.u.assign(static_cast<size_t>(n), std::vector<std::vector<Scalar>>(static_cast<size_t>(n)));
    if (j.contains("u")) {
        const json& u = j["u"];
        if (!u.is_array() || static_cast<int>(u.size()) != n) throw ConfigError("U must have n rows");
        for (int r = 0; r < n; ++r) {
            if (!u[static_cast<size_t>(r)].is_array() || static_cast<int>(u[static_cast<size_t>(r)].size()) != n)
                throw ConfigError("U must have n columns");
            for (int s = 0; s < n; ++s)
                c.u[static_cast<size_t>(r)][static_cast<size_t>(s)] =
                    scalars(u[static_cast<size_t>(r)][static_cast<size_t>(s)], "u entry");
        }
    }
    if (j.contains("flows")) {
        c.flows.clear();
        for (const auto& f : j["flows"]) c.flows.push_back(flow(f, n, "flows"));
    } else {
        c.flows.erase(std::remove_if(c.flows.begin(), c.flows.end(), [n](const FlowIndex& f) { return f.alpha >= n; }),
                      c.flows.end());
    }
    if (j.contains("lambda_max")) c.lambda_max = integer(j["lambda_max"], "lambda_max");
    if (j.contains("l_max")) c.l_max = integer(j["l_max"], "l_max");
    if (j.contains("pairing")) {
        const json& p = j["pairing"];
        only_keys(p, {"pairs", "seed", "q"}, "pairing");
        if (p.contains("pairs")) c.pairing_pairs = integer(p["pairs"], "pairing pairs");
        if (p.contains("seed")) c.seed = static_cast<unsigned>(integer(p["seed"], "pairing seed"));
        if (p.contains("q")) c.pairing_qs = scalars(p["q"], "pairing q");
        for (const auto& q : c.pairing_qs)
            if (q == 0 || q == 1 || q == -1) throw ConfigError("pairing q must avoid 0 and +-1");
    }
    if (j.contains("limit_ms")) {
        c.limit_ms.clear();
        for (const auto& m : j["limit_ms"]) c.limit_ms.push_back(integer(m, "limit_ms", 1));
    }
    if (j.contains("tau")) {
        const json& t = j["tau"];
        only_keys(t, {"families", "nx", "kmax", "nz", "l_max", "custom"}, "tau");
        if (t.contains("families")) {
            c.tau.families.clear();
            for (const auto& f : t["families"]) {
                const std::string name = f.get<std::string>();
                if (name != "vacuum" && name != "h1" && name != "h2" && name != "h3" && name != "probe")
                    throw ConfigError("unknown tau family '" + name + "'");
                c.tau.families.push_back(name);
            }
        }
        if (t.contains("nx")) c.tau.nx = integer(t["nx"], "tau nx", 1);
        if (t.contains("kmax")) c.tau.kmax = integer(t["kmax"], "tau kmax", 1);
        if (t.contains("nz")) c.tau.nz = integer(t["nz"], "tau nz", 1);
        if (t.contains("l_max")) c.tau.l_max = integer(t["l_max"], "tau l_max");
        if (t.contains("custom")) {
            const json& cu = t["custom"];
            only_keys(cu, {"name", "tau", "companions"}, "tau custom");
            TauFamily f;
            f.name = cu.contains("name") ? cu["name"].get<std::string>() : "custom";
            f.space = TimeSpace{n, c.tau.kmax};
            f.nx = c.tau.nx;
            f.tau = time_poly(cu.at("tau"), f.space, f.nx, "tau");
            if (cu.contains("companions")) {
                for (const auto& [key, terms] : cu["companions"].items()) {
                    if (key.size() != 2) throw ConfigError("companion keys are two channel digits, e.g. \"12\"");
                    const int al = key[0] - '1', be = key[1] - '1';
                    if (al < 0 || be < 0 || al >= n || be >= n || al == be)
                        throw ConfigError("companion tau_" + key + " is not off-diagonal");
                    f.companions[{al, be}] = time_poly(terms, f.space, f.nx, "tau_" + key);
                }
            }
            c.tau.custom = std::move(f);
        }
        if (n != 2 && !c.tau.families.empty()) {
            for (const auto& f : c.tau.families)
                if (f != "vacuum") throw ConfigError("built-in tau family '" + f + "' needs n = 2");
        }
    }
    if (j.contains("checks")) {
        c.checks.clear();
        for (const auto& s : j["checks"]) {
            const std::string name = s.get<std::string>();
            if (!kChecks.count(name)) throw ConfigError("unknown check group '" + name + "'");
            c.checks.push_back(name);
        }
    }
    validate(c.lax());
    return c;
}

RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config " + path + " does not parse: " + e.what());
    }
    try {
        return parse_config(j);
    } catch (const json::exception& e) {
        throw ConfigError("config " + path + ": " + e.what());
    }
}

json to_json(const RunConfig& c)
{
    json j;
    j["name"] = c.name;
    j["a"] = scalars_json(c.a);
    j["q"] = to_string(c.q);
    j["structure"] = c.classical ? "classical" : "q";
    json u = json::array();
    for (const auto& row : c.u) {
        json r = json::array();
        for (const auto& e : row) r.push_back(scalars_json(e));
        u.push_back(r);
    }
    j["u"] = u;
    j["truncation"] = {{"nx", c.trunc.nx}, {"nz", c.trunc.nz}, {"nd", c.trunc.nd},
                       {"nt", c.trunc.nt}, {"k", c.trunc.k},   {"j", c.trunc.j}};
    json flows = json::array();
    for (const auto& f : c.flows) flows.push_back({f.k, f.alpha + 1});
    j["flows"] = flows;
    j["lambda_max"] = c.lambda_max;
    j["l_max"] = c.l_max;
    j["pairing"] = {{"pairs", c.pairing_pairs}, {"seed", c.seed}, {"q", scalars_json(c.pairing_qs)}};
    j["limit_ms"] = c.limit_ms;
    json tau = {{"families", c.tau.families}, {"nx", c.tau.nx}, {"kmax", c.tau.kmax}, {"nz", c.tau.nz}, {"l_max", c.tau.l_max}};
    if (c.tau.custom) {
        json comp = json::object();
        for (const auto& [ab, p] : c.tau.custom->companions)
            comp[std::to_string(ab.first + 1) + std::to_string(ab.second + 1)] = time_poly_json(p);
        tau["custom"] = {{"name", c.tau.custom->name}, {"tau", time_poly_json(c.tau.custom->tau)}, {"companions", comp}};
    }
    j["tau"] = tau;
    j["checks"] = c.checks;
    return j;
}

std::string config_hash(const RunConfig& c)
{
    const std::string text = to_json(c).dump();
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!EVP_Digest(text.data(), text.size(), md, &len, EVP_sha256(), nullptr)) throw Error("SHA-256 failed");
    std::ostringstream os;
    for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
    return os.str();
}

RunConfig builtin_config(const std::string& name)
{
    json j = {{"name", name}, {"a", {"1", "-1"}}, {"q", "2"}};
    if (name == "triangular") {
        j["u"] = json::array({json::array({json::array(), json::array({"1", "1"})}),
                              json::array({json::array(), json::array()})});
    } else if (name == "coupled") {
        j["u"] = json::array({json::array({json::array(), json::array({"1"})}),
                              json::array({json::array({"1"}), json::array()})});
    } else if (name == "coupled-x") {
        j["u"] = json::array({json::array({json::array(), json::array({"0", "1"})}),
                              json::array({json::array({"1"}), json::array()})});
    } else if (name == "vacuum") {
        j["u"] = json::array({json::array({json::array(), json::array()}), json::array({json::array(), json::array()})});
    } else {
        throw ConfigError("no built-in config named '" + name + "'");
    }
    return parse_config(j);
}

} // namespace qakns
