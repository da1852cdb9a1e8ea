// One PASS/FAIL line per acceptance criterion. With an argument N only
// criterion N runs and the exit status reflects it.

#include "qakns/suite.hpp"

#include <chrono>
#include <functional>
#include <iostream>

using namespace qakns;

namespace {

const std::vector<Scalar> kQs{Scalar(2), Scalar(1, 2), Scalar(3, 5)};

struct Verdict {
    bool pass = true;
    std::vector<std::string> notes;

    void need(bool ok, const std::string& what)
    {
        if (!ok) pass = false;
        notes.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
    }
};

RunConfig base(const std::string& example, const Scalar& q, std::vector<std::string> checks)
{
    RunConfig c = builtin_config(example);
    c.q = q;
    c.checks = std::move(checks);
    return c;
}

std::string summary(const CheckRecord& r)
{
    std::string s = r.name + " " + to_string(r.status);
    if (r.residual && r.residual->checked) {
        s += " (" + std::to_string(r.residual->checked) + " coefficients";
        if (r.residual->min_z != INT_MAX) s += ", down to z^" + std::to_string(r.residual->min_z);
        s += ", x^" + std::to_string(r.residual->max_x) + ")";
    }
    if (!r.message.empty()) s += ": " + r.message;
    return s;
}

void need_all(Verdict& v, const Report& r, const std::string& tag)
{
    if (r.checks.empty()) v.need(false, tag + ": no checks ran");
    for (const auto& c : r.checks) v.need(c.status == Status::Pass, tag + " " + summary(c));
}

// the six q-calculus identities at q in {2, 1/2, 3/5}, N_x = 8
Verdict criterion1()
{
    Verdict v;
    RunConfig c = base("triangular", Scalar(2), {"q_calculus"});
    c.trunc.nx = 8;
    c.pairing_qs = kQs;
    Report r = run_suite(c);
    need_all(v, r, "");
    v.need(r.checks.size() == 6, "six identities evaluated");
    return v;
}

Verdict criterion2()
{
    Verdict v;
    RunConfig c = base("triangular", Scalar(2), {"pairing"});
    c.pairing_qs = kQs;
    c.pairing_pairs = 24;
    Report r = run_suite(c);
    need_all(v, r, "");
    int pairs = 0;
    for (const auto& rec : r.checks)
        if (rec.name == "pairing.convention") pairs = std::atoi(rec.message.c_str());
    v.need(pairs >= 20, std::to_string(pairs) + " random band-2 pairs compared");
    return v;
}

MatX expected_r1(int nx)
{
    MatX m(2, XSeries(nx));
    m(0, 1) = XSeries::constant(nx, Scalar(-1, 2));
    m(1, 0) = XSeries::constant(nx, Scalar(-1, 2));
    return m;
}

bool agrees(const MatX& a, const MatX& b)
{
    for (int i = 0; i < a.dim(); ++i)
        for (int j = 0; j < a.dim(); ++j)
            if (!agree(a(i, j), b(i, j))) return false;
    return true;
}

std::string entries(const MatX& m)
{
    std::string s = "[[";
    for (int i = 0; i < m.dim(); ++i) {
        for (int j = 0; j < m.dim(); ++j) s += m(i, j).truncated(3).to_string() + (j + 1 < m.dim() ? ", " : "");
        s += i + 1 < m.dim() ? "], [" : "]]";
    }
    return s;
}

// n = 2, A = diag(1, -1), U = [[0,1],[1,0]] and [[0,x],[1,0]]
Verdict criterion3()
{
    Verdict v;
    for (const auto& example : {"coupled", "coupled-x"})
        for (const auto& q : kQs) {
            const std::string tag = std::string(example) + " q=" + to_string(q);
            RunConfig c = base(example, q, {"hierarchy"});
            c.trunc.j = 7; // residual through z^-6
            SuiteOptions o;
            o.only = {"hierarchy.qr_residual", "hierarchy.orthogonality", "hierarchy.u_flow",
                      "hierarchy.zero_curvature"};
            need_all(v, run_suite(c, o), tag);

            const LaxData l = c.lax();
            const MatX want = expected_r1(l.nx);
            const MatX direct = solve_resolvent_direct(l, 0, 2).r.coeff(-1);
            const int depth = max_dressing_depth(l, 2);
            const MatX dressed = resolvent_from_dressing(solve_dressing(l, depth), 0).r.coeff(-1);
            v.need(agrees(direct, want), tag + " R_1^(1) by the direct route = " + entries(direct));
            v.need(agrees(dressed, want), tag + " R_1^(1) from the dressing = " + entries(dressed));
        }
    return v;
}

// qb1 for l <= 4, m in {0,1}, |lambda| <= 2 on solver data; round trip; corruption caught
Verdict criterion4()
{
    Verdict v;
    for (const auto& example : {"triangular", "vacuum"})
        for (const auto& q : kQs) {
            const std::string tag = std::string(example) + " q=" + to_string(q);
            RunConfig c = base(example, q, {"bilinear"});
            SuiteOptions o;
            o.only = {"bilinear.qb1", "bilinear.qb2", "bilinear.inverse_transpose", "bilinear.reconstruct"};
            if (std::string(example) == "triangular") o.only.push_back("bilinear.corruption_detected");
            need_all(v, run_suite(c, o), tag);
        }
    // the injected corruption must turn the suite red
    RunConfig c = base("triangular", Scalar(2), {"bilinear"});
    SuiteOptions bad;
    bad.only = {"bilinear.qb1"};
    bad.inject = "corrupt-dressing";
    Report r = run_suite(c, bad);
    v.need(!r.passed(), "injected corruption fails bilinear.qb1: " + (r.checks.empty() ? "" : summary(r.checks[0])));
    return v;
}

// expqo through z^4, x^8; vacuum precheck and q-bilinear; paths agree; limit ratios
Verdict criterion5()
{
    Verdict v;
    for (const auto& q : kQs) {
        RunConfig c = base("triangular", q, {"tau"});
        c.pairing_qs = kQs;
        need_all(v, run_suite(c), "q=" + to_string(q));
    }
    return v;
}

// the classical bilinear relation under d/dx on the same examples
Verdict criterion6()
{
    Verdict v;
    for (const auto& example : {"coupled", "coupled-x", "triangular", "vacuum"}) {
        RunConfig c = base(example, Scalar(2), {"classical"});
        need_all(v, run_suite(c), example);
    }
    return v;
}

} // namespace

int main(int argc, char** argv)
{
    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
        {"q-calculus identities", criterion1},
        {"residue pairing", criterion2},
        {"hierarchy suite on the coupled examples", criterion3},
        {"q-bilinear suite", criterion4},
        {"tau suite", criterion5},
        {"classical cross-check", criterion6},
    };
    int only = argc > 1 ? std::atoi(argv[1]) : 0;
    bool all = true;
    for (size_t i = 0; i < criteria.size(); ++i) {
        const int n = static_cast<int>(i) + 1;
        if (only && only != n) continue;
        const auto start = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = criteria[i].second();
        } catch (const std::exception& e) {
            v.need(false, std::string("threw: ") + e.what());
        }
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        for (const auto& note : v.notes) std::cout << "    " << note << "\n";
        std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << n << ": " << criteria[i].first << " (" << s
                  << " s)\n";
        all = all && v.pass;
    }
    return all ? 0 : 1;
}
