#include "qakns/suite.hpp"

#include "qakns/bilinear.hpp"
#include "qakns/tau.hpp"

#include <chrono>
#include <functional>
#include <random>

namespace qakns {

using nlohmann::json;

namespace {

struct Outcome {
    Status status = Status::Pass;
    std::optional<Residual> residual;
    std::string message;
};

Outcome from_residual(const Residual& r, std::string message = {})
{
    return {r.zero ? Status::Pass : Status::Fail, r, std::move(message)};
}

struct Task {
    std::string name;
    json params;
    std::function<Outcome()> run;
};

json scalars_json(const std::vector<Scalar>& v)
{
    json out = json::array();
    for (const auto& s : v) out.push_back(to_string(s));
    return out;
}

json flows_json(const std::vector<FlowIndex>& flows)
{
    json out = json::array();
    for (const auto& f : flows) out.push_back({f.k, f.alpha + 1});
    return out;
}

void inspect_diff(const XSeries& a, const XSeries& b, Residual& r) { inspect(a - b, 0, 0, 0, r); }

void inspect_diff(const MatX& a, const MatX& b, int z, Residual& r) { inspect(a - b, z, r); }

XSeries random_series(std::mt19937& rng, int order, int degree)
{
    std::uniform_int_distribution<int> num(-5, 5), den(1, 4);
    std::vector<Scalar> c;
    for (int k = 0; k <= std::min(order, degree); ++k) {
        Scalar s(num(rng), den(rng));
        s.canonicalize();
        c.push_back(s);
    }
    return XSeries(order, c);
}

MatX random_matrix(std::mt19937& rng, int n, int order, int degree)
{
    MatX m(n, XSeries(order));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = random_series(rng, order, degree);
    return m;
}

// sum over k + l = -1 of (-q)^l p_k A^{-1} g_l(x/q), read straight off the symbol product
MatX pairing_oracle(const std::map<int, MatX>& p, const std::map<int, MatX>& g, const SqMatrix& a, const Scalar& q,
                    int nx)
{
    const int n = a.dim();
    SqMatrix ainv = a;
    for (int i = 0; i < n; ++i) ainv(i, i) = 1 / a(i, i);
    MatX out(n, XSeries(nx));
    for (const auto& [k, pk] : p) {
        auto it = g.find(-1 - k);
        if (it == g.end()) continue;
        MatX gl = it->second.map([&q](const XSeries& f) { return dilate(f, 1 / q); });
        out += power(-q, it->first) * (pk * lift(ainv, nx) * gl);
    }
    return out;
}

// n = 1: both symbols as explicit Laurent polynomials in z, coefficient of z^{-1}
XSeries brute_force_scalar(const std::map<int, XSeries>& p, const std::map<int, XSeries>& g, const Scalar& a,
                           const Scalar& q, int nx)
{
    std::map<int, XSeries> prod;
    for (const auto& [k, pk] : p)
        for (const auto& [l, gl] : g) {
            XSeries t = (power(a, k) * pk) * (power(-a * q, l) * dilate(gl, 1 / q));
            auto it = prod.find(k + l);
            if (it == prod.end())
                prod.emplace(k + l, t);
            else
                it->second += t;
        }
    auto it = prod.find(-1);
    return it == prod.end() ? XSeries(nx) : it->second;
}

std::string case_text(const ResidueCase& c)
{
    return "l=" + std::to_string(c.l) + " m=" + std::to_string(c.m) + " lambda=" + to_string(c.lambda);
}

Outcome from_bilinear(const BilinearReport& r)
{
    Outcome o = from_residual(r.total());
    if (const ResidueCase* f = r.first_failure()) o.message = "first failing case " + case_text(*f);
    o.message += (o.message.empty() ? "" : "; ") + std::to_string(r.cases.size()) + " residues";
    return o;
}

Outcome reconstruct_outcome(const LaxData& l, const Dressing& d)
{
    LaxData back;
    try {
        back = reconstruct_from_bilinear(l.structure, d, adjoint_baker(d), l.a);
    } catch (const ConsistencyError& e) {
        return {Status::Fail, std::nullopt, e.what()};
    }
    Residual r;
    for (int i = 0; i < l.n(); ++i)
        for (int j = 0; j < l.n(); ++j) {
            const XSeries& b = back.u(i, j);
            const XSeries& u = l.u(i, j);
            const int p = std::min(b.precision(), u.precision());
            inspect(b.truncated(p) - u.truncated(p), 0, i, j, r);
        }
    Outcome o = from_residual(r);
    if (back.a != l.a) {
        o.status = Status::Fail;
        o.message = "recovered A differs from the input";
    }
    return o;
}

// Lazily solved objects shared between checks.
class Context {
public:
    explicit Context(const RunConfig& c) : cfg(c), lax(c.lax()) {}

    const RunConfig& cfg;
    LaxData lax;

    const std::vector<Resolvent>& direct()
    {
        if (!direct_) {
            direct_.emplace();
            for (int a = 0; a < lax.n(); ++a) direct_->push_back(solve_resolvent_direct(lax, a, cfg.trunc.j));
        }
        return *direct_;
    }

    // deepest consistent dressing up to K, with the reason it stopped
    const Dressing& dressing() { return solved(lax, dressing_, dressing_note_); }
    const std::string& dressing_note()
    {
        dressing();
        return dressing_note_;
    }
    // the bilinear checks need the full depth K
    const Dressing& deep_dressing()
    {
        const Dressing& d = dressing();
        if (d.depth < cfg.trunc.k) throw DepthError(dressing_note_);
        return d;
    }
    const Dressing& classical_dressing()
    {
        if (!classical_lax_) classical_lax_ = lax.with_structure(DifferenceStructure::classical());
        const Dressing& d = solved(*classical_lax_, classical_, classical_note_);
        if (d.depth < cfg.trunc.k) throw DepthError(classical_note_);
        return d;
    }
    const LaxData& classical_lax()
    {
        classical_dressing();
        return *classical_lax_;
    }

    BilinearOptions bilinear_options() const
    {
        BilinearOptions o;
        o.l_max = cfg.l_max;
        o.lambdas = flow_sequences(cfg.flows, cfg.lambda_max);
        return o;
    }

private:
    const Dressing& solved(const LaxData& l, std::optional<Dressing>& slot, std::string& note)
    {
        if (!slot) {
            const int depth = max_dressing_depth(l, cfg.trunc.k);
            slot = solve_dressing(l, depth);
            if (depth < cfg.trunc.k) {
                note = "dressing solve is consistent only through depth " + std::to_string(depth) + " of " +
                       std::to_string(cfg.trunc.k);
                try {
                    solve_dressing(l, depth + 1);
                } catch (const std::exception& e) {
                    note += ": " + std::string(e.what());
                }
            }
        }
        return *slot;
    }

    std::optional<std::vector<Resolvent>> direct_;
    std::optional<Dressing> dressing_, classical_;
    std::optional<LaxData> classical_lax_;
    std::string dressing_note_, classical_note_;
};

bool selected(const RunConfig& cfg, const std::string& group)
{
    return std::find(cfg.checks.begin(), cfg.checks.end(), group) != cfg.checks.end();
}

void q_calculus_tasks(Context& ctx, std::vector<Task>& out)
{
    const RunConfig& cfg = ctx.cfg;
    const int nx = cfg.trunc.nx;
    const json params = {{"q", scalars_json(cfg.pairing_qs)}, {"N_x", nx}, {"seed", cfg.seed}};
    // one pair of random series per q, shared by the identities
    auto samples = std::make_shared<std::vector<std::pair<XSeries, XSeries>>>();
    auto sample = [samples, &cfg, nx](size_t i) {
        if (samples->empty()) {
            std::mt19937 rng(cfg.seed);
            for (size_t k = 0; k < cfg.pairing_qs.size(); ++k)
                samples->emplace_back(random_series(rng, nx, nx), random_series(rng, nx, nx));
        }
        return (*samples)[i];
    };
    const auto& qs = cfg.pairing_qs;

    out.push_back({"q_calculus.power_composition", params, [=, &qs] {
                       Residual r;
                       std::string msg;
                       for (size_t i = 0; i < qs.size(); ++i) {
                           const XSeries f = sample(i).first;
                           std::vector<XSeries> pw{f};
                           for (int k = 1; k <= nx; ++k) pw.push_back(q_derive(pw.back(), qs[i]));
                           for (int m = 0; m <= nx; ++m)
                               for (int n = 0; m + n <= nx; ++n) {
                                   XSeries lhs = pw[static_cast<size_t>(n)];
                                   for (int k = 0; k < m; ++k) lhs = q_derive(lhs, qs[i]);
                                   inspect_diff(lhs, pw[static_cast<size_t>(m + n)], r);
                                   if (lhs.precision() != nx + 1 - m - n && msg.empty())
                                       msg = "D_q^m D_q^n lost precision at m=" + std::to_string(m);
                               }
                       }
                       Outcome o = from_residual(r, msg);
                       if (!msg.empty()) o.status = Status::Fail;
                       return o;
                   }});
    out.push_back({"q_calculus.leibniz_dilated_left", params, [=, &qs] {
                       Residual r;
                       for (size_t i = 0; i < qs.size(); ++i) {
                           auto [f, g] = sample(i);
                           inspect_diff(q_derive(f * g, qs[i]), dilate(f, qs[i]) * q_derive(g, qs[i]) + q_derive(f, qs[i]) * g, r);
                       }
                       return from_residual(r);
                   }});
    out.push_back({"q_calculus.leibniz_dilated_right", params, [=, &qs] {
                       Residual r;
                       for (size_t i = 0; i < qs.size(); ++i) {
                           auto [f, g] = sample(i);
                           inspect_diff(q_derive(f * g, qs[i]), f * q_derive(g, qs[i]) + q_derive(f, qs[i]) * dilate(g, qs[i]), r);
                       }
                       return from_residual(r);
                   }});
    // eigenvalues: every a_i and one generic rational
    std::vector<Scalar> cs = cfg.a;
    cs.emplace_back(-2, 3);
    out.push_back({"q_calculus.exp_eigen", params, [=, &qs] {
                       Residual r;
                       for (const auto& q : qs)
                           for (const auto& c : cs) {
                               XSeries e = exp_q_series(nx, c, q);
                               inspect_diff(q_derive(e, q), (c * e).truncated(nx), r);
                           }
                       return from_residual(r);
                   }});
    out.push_back({"q_calculus.exp_log", params, [=, &qs] {
                       Residual r;
                       for (const auto& q : qs) {
                           std::vector<std::pair<int, Scalar>> args;
                           for (int k = 1; k <= nx; ++k) args.emplace_back(k, q_shift_coefficient(k, q));
                           inspect_diff(exp_series(nx, args), exp_q_series(nx, Scalar(1), q), r);
                       }
                       return from_residual(r);
                   }});
    out.push_back({"q_calculus.exp_inverse", params, [=, &qs] {
                       Residual r;
                       for (const auto& q : qs)
                           for (const auto& c : cs)
                               inspect_diff(exp_q_series(nx, c, q) * exp_q_series(nx, -c, 1 / q), XSeries::constant(nx, 1), r);
                       return from_residual(r);
                   }});
}

void pairing_tasks(Context& ctx, std::vector<Task>& out)
{
    const RunConfig& cfg = ctx.cfg;
    const int nx = std::min(cfg.trunc.nx, 6), nz = cfg.trunc.nz, nd = cfg.trunc.nd, n = cfg.n();
    const int per_q = (cfg.pairing_pairs + static_cast<int>(cfg.pairing_qs.size()) - 1) /
                      std::max<int>(1, static_cast<int>(cfg.pairing_qs.size()));
    const json params = {{"q", scalars_json(cfg.pairing_qs)}, {"pairs", cfg.pairing_pairs}, {"band", 2},
                         {"seed", cfg.seed}, {"N_x", nx}, {"N_D", nd}};
    auto build = [nx, nz, nd](const DifferenceStructure& s, int dim, const std::map<int, MatX>& t) {
        QDOp op(s, dim, nx, nz, nd);
        for (const auto& [i, m] : t) op.set(i, MZSeries::constant(m, nz));
        return op;
    };

    out.push_back({"pairing.convention", params, [=, &cfg] {
                       std::mt19937 rng(cfg.seed);
                       const SqMatrix a = diagonal(cfg.a);
                       Residual r;
                       int count = 0;
                       for (const auto& q : cfg.pairing_qs) {
                           DifferenceStructure s(q);
                           for (int t = 0; t < per_q; ++t) {
                               std::map<int, MatX> pt, gt;
                               for (int i = -2; i <= 2; ++i) {
                                   pt[i] = random_matrix(rng, n, nx, 3);
                                   gt[i] = random_matrix(rng, n, nx, 3);
                               }
                               PairingResult pr = residue_pairing(build(s, n, pt), build(s, n, gt), a);
                               inspect_diff(pr.lhs, pr.rhs, -1, r);
                               inspect_diff(pr.lhs, pairing_oracle(pt, gt, a, q, nx), -1, r);
                               ++count;
                           }
                       }
                       return from_residual(r, std::to_string(count) + " pairs");
                   }});
    out.push_back({"pairing.brute_force", params, [=, &cfg] {
                       std::mt19937 rng(cfg.seed + 1);
                       Residual r;
                       auto one = [nx](const XSeries& f) {
                           MatX m(1, XSeries(nx));
                           m(0, 0) = f;
                           return m;
                       };
                       for (const auto& q : cfg.pairing_qs) {
                           DifferenceStructure s(q);
                           const SqMatrix unit = diagonal({Scalar(1)});
                           // delta against g delta^{-2}: q^{-2} g(x/q)
                           const XSeries g(nx, {2, -1, 0, 3});
                           PairingResult pr = residue_pairing(build(s, 1, {{1, one(XSeries::constant(nx, 1))}}),
                                                              build(s, 1, {{-2, one(g)}}), unit);
                           inspect_diff(pr.lhs(0, 0), (1 / (q * q)) * dilate(g, 1 / q), r);
                           inspect_diff(pr.lhs(0, 0),
                                        brute_force_scalar({{1, XSeries::constant(nx, 1)}}, {{-2, g}}, 1, q, nx), r);
                           // random scalar band-2 pairs with a != 1
                           const Scalar a(-3, 2);
                           for (int t = 0; t < 4; ++t) {
                               std::map<int, XSeries> p, h;
                               std::map<int, MatX> pm, hm;
                               for (int i = -2; i <= 2; ++i) {
                                   p[i] = random_series(rng, nx, 3);
                                   h[i] = random_series(rng, nx, 3);
                                   pm[i] = one(p[i]);
                                   hm[i] = one(h[i]);
                               }
                               PairingResult rr = residue_pairing(build(s, 1, pm), build(s, 1, hm), diagonal({a}));
                               inspect_diff(rr.lhs(0, 0), brute_force_scalar(p, h, a, q, nx), r);
                           }
                       }
                       return from_residual(r);
                   }});
}

void hierarchy_tasks(Context& ctx, std::vector<Task>& out)
{
    const RunConfig& cfg = ctx.cfg;
    const int j = cfg.trunc.j, k = cfg.trunc.k;
    const json base = {{"q", cfg.classical ? "classical" : to_string(cfg.q)}, {"N_x", cfg.trunc.nx},
                       {"N_z", cfg.trunc.nz}};
    auto with = [&base](json extra) {
        json p = base;
        p.update(extra);
        return p;
    };

    out.push_back({"hierarchy.qr_residual", with({{"J", j}}), [&ctx, j] {
                       Residual r;
                       for (const auto& res : ctx.direct()) r.merge(check_zero(qr_residual(ctx.lax, res.r), -(j - 1), 0));
                       return from_residual(r);
                   }});
    out.push_back({"hierarchy.dressing", with({{"K", k}}), [&ctx, k] {
                       const Dressing& d = ctx.dressing();
                       Outcome o = from_residual(check_zero(dressing_residual(ctx.lax, d.w)));
                       if (d.depth < k) {
                           o.status = Status::Fail;
                           o.message = ctx.dressing_note();
                       }
                       return o;
                   }});
    out.push_back({"hierarchy.routes", with({{"J", j}, {"K", k}}), [&ctx] {
                       const Dressing& d = ctx.dressing();
                       Residual r;
                       for (int a = 0; a < ctx.lax.n(); ++a)
                           r.merge(check_zero(ctx.direct()[static_cast<size_t>(a)].r - resolvent_from_dressing(d, a).r));
                       return from_residual(r, "compared through z^-" + std::to_string(d.depth));
                   }});
    out.push_back({"hierarchy.orthogonality", with({{"J", j}}), [&ctx] {
                       const auto& rs = ctx.direct();
                       const int n = ctx.lax.n();
                       Residual r;
                       MZSeries sum = rs[0].r.zero();
                       for (int a = 0; a < n; ++a) {
                           sum += rs[static_cast<size_t>(a)].r;
                           for (int b = 0; b < n; ++b) {
                               MZSeries p = rs[static_cast<size_t>(a)].r * rs[static_cast<size_t>(b)].r;
                               if (a == b) p -= rs[static_cast<size_t>(b)].r;
                               r.merge(check_zero(p));
                           }
                       }
                       r.merge(check_zero(sum - MZSeries::identity(n, ctx.lax.nz, XSeries(ctx.lax.nx))));
                       return from_residual(r);
                   }});
    out.push_back({"hierarchy.u_flow", with({{"flows", flows_json(cfg.flows)}, {"N_D", cfg.trunc.nd}}), [&ctx] {
                       Residual r;
                       std::string msg;
                       for (const auto& f : ctx.cfg.flows) {
                           UFlow u = u_flow(ctx.lax, ctx.direct()[static_cast<size_t>(f.alpha)], f.k, ctx.cfg.trunc.nd);
                           const std::string tag = "(" + std::to_string(f.k) + "," + std::to_string(f.alpha + 1) + ")";
                           if (msg.empty()) {
                               if (!u.z_free()) msg = "flow " + tag + " depends on z";
                               else if (!u.dq_free()) msg = "flow " + tag + " contains powers of delta";
                               else if (!u.zero_diagonal()) msg = "flow " + tag + " has a nonzero diagonal";
                           }
                           r.merge(u.z_dependence);
                           r.merge(u.dq_dependence);
                           r.merge(u.diagonal);
                       }
                       return from_residual(r, msg);
                   }});
    out.push_back({"hierarchy.zero_curvature", with({{"flows", flows_json(cfg.flows)}, {"J", j}}), [&ctx] {
                       Residual r;
                       const auto& fl = ctx.cfg.flows;
                       for (size_t a = 0; a < fl.size(); ++a)
                           for (size_t b = a; b < fl.size(); ++b)
                               r.merge(check_zero(zero_curvature_residual(fl[a], fl[b], ctx.direct())));
                       return from_residual(r);
                   }});
}

void bilinear_tasks(Context& ctx, std::vector<Task>& out, bool corrupt)
{
    const RunConfig& cfg = ctx.cfg;
    const json params = {{"q", cfg.classical ? "classical" : to_string(cfg.q)}, {"l_max", cfg.l_max},
                         {"m", {0, 1}}, {"flows", flows_json(cfg.flows)}, {"lambda_max", cfg.lambda_max},
                         {"K", cfg.trunc.k}, {"N_x", cfg.trunc.nx}, {"N_z", cfg.trunc.nz},
                         {"injected", corrupt ? "corrupt-dressing" : ""}};
    // the dressing the bilinear checks see, corrupted on request
    auto data = [&ctx, corrupt] {
        const Dressing& d = ctx.deep_dressing();
        return corrupt ? corrupt_dressing(d, Scalar(1, 3)) : d;
    };
    out.push_back({"bilinear.qb1", params, [&ctx, data] {
                       return from_bilinear(check_q_bilinear(data(), ctx.lax, ctx.bilinear_options()));
                   }});
    out.push_back({"bilinear.qb2", params, [&ctx, data] {
                       BilinearOptions o = ctx.bilinear_options();
                       o.form = InverseForm::AdjointTranspose;
                       return from_bilinear(check_q_bilinear(data(), ctx.lax, o));
                   }});
    out.push_back({"bilinear.inverse_transpose", params, [data] {
                       Dressing d = data();
                       return from_residual(check_inverse_transpose(d.w, adjoint_baker(d)));
                   }});
    out.push_back({"bilinear.reconstruct", params, [&ctx, data] { return reconstruct_outcome(ctx.lax, data()); }});
    out.push_back({"bilinear.corruption_detected", params, [&ctx] {
                       BilinearReport r =
                           check_q_bilinear(corrupt_dressing(ctx.deep_dressing(), Scalar(1, 3)), ctx.lax, ctx.bilinear_options());
                       Outcome o;
                       if (const ResidueCase* f = r.first_failure()) {
                           o.message = "w_1 + I/3 caught at " + case_text(*f);
                       } else {
                           o.status = Status::Fail;
                           o.message = "w_1 + I/3 passes every residue (a gauge for these data)";
                       }
                       return o;
                   }});
}

void classical_tasks(Context& ctx, std::vector<Task>& out)
{
    const RunConfig& cfg = ctx.cfg;
    const json params = {{"structure", "classical"}, {"l_max", cfg.l_max}, {"m", {0, 1}},
                         {"flows", flows_json(cfg.flows)}, {"lambda_max", cfg.lambda_max}, {"K", cfg.trunc.k}};
    out.push_back({"classical.bilinear", params, [&ctx] {
                       Outcome o = from_bilinear(
                           check_q_bilinear(ctx.classical_dressing(), ctx.classical_lax(), ctx.bilinear_options()));
                       return o;
                   }});
    out.push_back({"classical.reconstruct", params,
                   [&ctx] { return reconstruct_outcome(ctx.classical_lax(), ctx.classical_dressing()); }});
}

struct FamilyPlan {
    TauFamily family;
    int weight;
    int limit_weight;
    int limit_nz;
};

void tau_tasks(Context& ctx, std::vector<Task>& out)
{
    const RunConfig& cfg = ctx.cfg;
    const TauSpec& ts = cfg.tau;
    const int n = cfg.n();

    std::vector<Scalar> qs{cfg.q};
    for (const auto& q : cfg.pairing_qs)
        if (std::find(qs.begin(), qs.end(), q) == qs.end()) qs.push_back(q);
    out.push_back({"tau.expqo", {{"q", scalars_json(qs)}, {"depth", 8}, {"N_x", ts.nx}}, [&cfg, qs] {
                       Residual r;
                       for (const auto& q : qs) r.merge(verify_expqo(cfg.a, q, cfg.tau.nx, 8).total());
                       return from_residual(r);
                   }});

    std::vector<FlowIndex> flows;
    for (const auto& f : cfg.flows)
        if (f.k >= 1 && f.k <= ts.kmax && f.alpha < n) flows.push_back(f);
    TauOptions base;
    base.q = cfg.q;
    base.nz = ts.nz;
    base.l_max = ts.l_max;
    base.flows = flows;
    base.max_len = cfg.lambda_max;
    base.expqo_depth = 8;

    std::vector<FamilyPlan> plans;
    for (const auto& name : ts.families) {
        if (name == "vacuum")
            plans.push_back({vacuum_tau(n, ts.kmax, ts.nx), kUnboundedWeight, kUnboundedWeight, 6});
        else if (name == "probe")
            plans.push_back({linear_probe(ts.kmax, ts.nx), cfg.trunc.nt, 8, 10});
        else
            plans.push_back({schur_tau(name[1] - '0', ts.kmax, ts.nx), cfg.trunc.nt, kUnboundedWeight, 6});
    }
    if (ts.custom) plans.push_back({*ts.custom, cfg.trunc.nt, cfg.trunc.nt, ts.nz});

    for (const auto& plan : plans) {
        const std::string prefix = "tau." + plan.family.name;
        TauOptions o = base;
        o.weight = plan.weight;
        const json params = {{"q", to_string(cfg.q)}, {"weight", plan.weight == kUnboundedWeight ? json("exact") : json(plan.weight)},
                             {"N_z", ts.nz}, {"l_max", ts.l_max}, {"flows", flows_json(flows)},
                             {"lambda_max", cfg.lambda_max}, {"kmax", ts.kmax}, {"N_x", ts.nx}};
        auto precheck = std::make_shared<std::optional<BilinearReport>>();
        auto paths = std::make_shared<std::optional<std::vector<PathCase>>>();
        const TauFamily fam = plan.family;
        auto run_precheck = [precheck, fam, o] {
            if (!*precheck)
                *precheck = classical_precheck(fam, o.weight, o.nz, o.l_max, flow_sequences(o.flows, o.max_len));
            return **precheck;
        };
        auto run_paths = [paths, run_precheck, fam, o, &cfg]() -> const std::vector<PathCase>& {
            if (!*paths) {
                if (!run_precheck().passed())
                    throw ConsistencyError(fam.name + " was rejected before the q-stage: not a classical tau function");
                *paths = tau_paths(fam, cfg.a, o);
            }
            return **paths;
        };
        out.push_back({prefix + ".precheck", params, [run_precheck] { return from_bilinear(run_precheck()); }});
        out.push_back({prefix + ".q_bilinear", params, [run_paths] {
                           Residual r;
                           for (const auto& p : run_paths()) r.merge(p.direct);
                           return from_residual(r);
                       }});
        out.push_back({prefix + ".paths", params, [run_paths] {
                           Residual r;
                           int lo = INT_MAX, hi = -1, exact = 0;
                           const auto& ps = run_paths();
                           for (const auto& p : ps) {
                               r.merge(p.difference);
                               if (p.taylor_weight >= kUnboundedWeight) {
                                   ++exact;
                               } else {
                                   lo = std::min(lo, p.taylor_weight);
                                   hi = std::max(hi, p.taylor_weight);
                               }
                           }
                           std::string msg = std::to_string(ps.size()) + " cases, " + std::to_string(exact) + " exact";
                           if (hi >= 0) msg += ", the rest compared to time weight " + std::to_string(lo) + ".." + std::to_string(hi);
                           return from_residual(r, msg);
                       }});
        json lp = {{"m", cfg.limit_ms}, {"window", {"9/20", "11/20"}}};
        out.push_back({prefix + ".classical_limit", lp, [fam, plan, &cfg] {
                           LimitReport l = classical_limit_check(fam, cfg.a, cfg.limit_ms, plan.limit_weight, plan.limit_nz);
                           Outcome o;
                           o.status = l.passed() ? Status::Pass : Status::Fail;
                           std::string s = "ratios";
                           for (const auto& r : l.ratios) s += " " + to_string(r);
                           if (l.ratios.empty()) s = "residual identically zero";
                           o.message = s;
                           return o;
                       }});
    }

    if (n == 2) {
        TauOptions o = base;
        o.weight = cfg.trunc.nt;
        out.push_back({"tau.probe_rejected", {{"tau", "1 + t11"}}, [o, &cfg] {
                           Outcome out;
                           try {
                               verify_tau_theorem(linear_probe(cfg.tau.kmax, cfg.tau.nx), cfg.a, o);
                               out.status = Status::Fail;
                               out.message = "1 + t11 was accepted as a tau function";
                           } catch (const ConsistencyError& e) {
                               out.message = e.what();
                           }
                           return out;
                       }});
    }
}

std::vector<Task> plan(Context& ctx, const SuiteOptions& o)
{
    std::vector<Task> tasks;
    const RunConfig& cfg = ctx.cfg;
    if (selected(cfg, "q_calculus")) q_calculus_tasks(ctx, tasks);
    if (selected(cfg, "pairing")) pairing_tasks(ctx, tasks);
    if (selected(cfg, "hierarchy")) hierarchy_tasks(ctx, tasks);
    if (selected(cfg, "bilinear")) bilinear_tasks(ctx, tasks, o.inject == "corrupt-dressing");
    if (selected(cfg, "classical")) classical_tasks(ctx, tasks);
    if (selected(cfg, "tau")) tau_tasks(ctx, tasks);
    if (!o.only.empty()) {
        std::erase_if(tasks, [&o](const Task& t) {
            return std::none_of(o.only.begin(), o.only.end(),
                                [&t](const std::string& p) { return t.name.rfind(p, 0) == 0; });
        });
    }
    return tasks;
}

} // namespace

std::vector<std::string> check_names(const RunConfig& cfg)
{
    Context ctx(cfg);
    std::vector<std::string> out;
    for (const auto& t : plan(ctx, {})) out.push_back(t.name);
    return out;
}

Report run_suite(const RunConfig& cfg, const SuiteOptions& o)
{
    if (!o.inject.empty() && o.inject != "corrupt-dressing")
        throw ConfigError("unknown injection '" + o.inject + "' (corrupt-dressing)");
    Report report;
    report.config_hash = config_hash(cfg);
    Context ctx(cfg);
    for (auto& t : plan(ctx, o)) {
        CheckRecord rec;
        rec.name = t.name;
        rec.params = t.params;
        const auto start = std::chrono::steady_clock::now();
        try {
            Outcome out = t.run();
            rec.status = out.status;
            rec.residual = out.residual;
            rec.message = out.message;
        } catch (const std::exception& e) {
            rec.status = Status::Error;
            rec.message = t.name + ": " + e.what();
        }
        rec.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        report.checks.push_back(std::move(rec));
    }
    return report;
}

} // namespace qakns
