#include "qakns/suite.hpp"

#include "CLI11.hpp"

#include <iostream>

using namespace qakns;

namespace {

struct Common {
    std::string config;
    std::string builtin;
    std::string format = "text";
    std::vector<std::string> checks;
    std::string inject;
    bool no_timing = false;
    bool list = false;
};

void add_common(CLI::App* app, Common& c, bool with_config = true)
{
    if (with_config) {
        auto* cfg = app->add_option("--config", c.config, "JSON run configuration");
        app->add_option("--builtin", c.builtin, "built-in configuration: triangular, coupled, coupled-x, vacuum")
            ->excludes(cfg);
    }
    app->add_option("--format", c.format, "report format")->check(CLI::IsMember({"json", "text"}));
    app->add_option("--check", c.checks, "run only checks whose name starts with this (repeatable)");
    app->add_option("--inject", c.inject, "failure injection")->check(CLI::IsMember({"corrupt-dressing"}));
    app->add_flag("--no-timing", c.no_timing, "write ms as 0 for byte-stable reports");
    app->add_flag("--list", c.list, "print the selected check names and exit");
}

// intersection of the verb's own prefixes with --check
std::vector<std::string> narrow(const std::vector<std::string>& verb, const std::vector<std::string>& user)
{
    if (user.empty()) return verb;
    if (verb.empty()) return user;
    std::vector<std::string> out;
    for (const auto& u : user)
        for (const auto& v : verb) {
            if (u.rfind(v, 0) == 0)
                out.push_back(u);
            else if (v.rfind(u, 0) == 0)
                out.push_back(v);
        }
    if (out.empty()) out.push_back("\x01"); // nothing matches
    return out;
}

void print_series(std::ostream& os, const std::string& label, const MZSeries& s, int deepest)
{
    for (int d = 0; d >= deepest && s.known(d); --d) {
        const MatX m = s.coeff(d);
        for (int i = 0; i < m.dim(); ++i)
            for (int j = 0; j < m.dim(); ++j)
                if (!m(i, j).is_zero())
                    os << label << " z^" << d << " (" << i + 1 << "," << j + 1 << "): " << m(i, j).to_string() << "\n";
    }
}

int run(const std::string& verb, const Common& c, const std::string& example)
{
    RunConfig cfg;
    if (verb == "demo")
        cfg = builtin_config(example);
    else if (!c.config.empty())
        cfg = load_config(c.config);
    else
        cfg = builtin_config(c.builtin.empty() ? "triangular" : c.builtin);

    std::vector<std::string> own;
    if (verb == "dressing") own = {"hierarchy.dressing", "hierarchy.routes"};
    if (verb == "resolvent") own = {"hierarchy.qr_residual", "hierarchy.routes", "hierarchy.orthogonality"};
    if (verb == "bilinear") own = {"bilinear", "classical"};
    if (verb == "tau") own = {"tau"};

    SuiteOptions o;
    o.only = narrow(own, c.checks);
    o.inject = c.inject;

    if (c.list) {
        for (const auto& name : check_names(cfg))
            if (o.only.empty() || std::any_of(o.only.begin(), o.only.end(),
                                              [&name](const std::string& p) { return name.rfind(p, 0) == 0; }))
                std::cout << name << "\n";
        return 0;
    }

    Report r = run_suite(cfg, o);
    std::cout << emit_report(r, c.format, !c.no_timing);

    if (c.format == "text" && (verb == "dressing" || verb == "resolvent")) {
        LaxData l = cfg.lax();
        if (verb == "dressing") {
            Dressing d = solve_dressing(l, max_dressing_depth(l, cfg.trunc.k));
            std::cout << "\ndressing through depth " << d.depth << "\n";
            print_series(std::cout, "w", d.w, -d.depth);
        } else {
            for (int a = 0; a < l.n(); ++a) {
                Resolvent res = solve_resolvent_direct(l, a, cfg.trunc.j);
                std::cout << "\nresolvent R_" << a + 1 << "\n";
                print_series(std::cout, "R_" + std::to_string(a + 1), res.r, -std::min(res.depth, 3));
            }
        }
    }
    return r.passed() ? 0 : 1;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"exact verification of the q-deformed AKNS-D hierarchy"};
    app.require_subcommand(1);

    struct Verb {
        const char* name;
        const char* help;
    };
    const Verb verbs[] = {
        {"verify", "run every selected check"},
        {"dressing", "dressing solve and route comparison"},
        {"resolvent", "resolvent identities"},
        {"bilinear", "q-bilinear and classical residue checks"},
        {"tau", "tau-function checks"},
        {"demo", "full run on a built-in n = 2 example"},
    };
    std::map<std::string, Common> opts;
    std::string example = "triangular";
    for (const auto& v : verbs) {
        CLI::App* sub = app.add_subcommand(v.name, v.help);
        const bool demo = std::string(v.name) == "demo";
        add_common(sub, opts[v.name], !demo);
        if (demo)
            sub->add_option("--example", example, "built-in example")
                ->check(CLI::IsMember({"triangular", "coupled", "coupled-x", "vacuum"}));
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    for (const auto& v : verbs) {
        if (!app.got_subcommand(v.name)) continue;
        try {
            return run(v.name, opts[v.name], example);
        } catch (const ConfigError& e) {
            std::cerr << "config error: " << e.what() << "\n";
            return 2;
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 1;
        }
    }
    return 2;
}
