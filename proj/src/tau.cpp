#include "qakns/tau.hpp"

#include <algorithm>
#include <climits>
#include <functional>

namespace qakns {

namespace {

constexpr int kAllDepths = INT_MAX / 4;

Scalar q_factorial(int k, const Scalar& q)
{
    Scalar r(1);
    for (int i = 1; i <= k; ++i) r *= q_number(i, q);
    return r;
}

TimePoly x_power(const TimeSpace& space, int nx, int k, const Scalar& c)
{
    if (k > nx) return TimePoly(space, nx);
    return TimePoly::constant(space, XSeries::monomial(nx, k, c));
}

// x^s p with the weight budget raised by s (the factor x^s is exact).
TimePoly times_x_power(const TimePoly& p, int s, const Scalar& c)
{
    const int nx = p.nx();
    TimePoly r(p.space(), nx, p.bounded() ? p.weight() + s : p.weight());
    for (const auto& [m, f] : p.terms()) {
        std::vector<Scalar> v(static_cast<size_t>(std::min(f.precision() + s, nx + 1)));
        for (int k = 0; k + s < static_cast<int>(v.size()); ++k) v[static_cast<size_t>(k + s)] = c * f[k];
        r.add(m, XSeries::partial(nx, std::move(v)));
    }
    return r;
}

Mat<TimePoly> unit_matrix(int n, int alpha, const TimePoly& proto)
{
    Mat<TimePoly> e(n, zero_like(proto));
    e(alpha, alpha) = unit_like(proto);
    return e;
}

TimePoly check_tau(const TauFamily& f, int weight)
{
    TimePoly tau = f.tau.truncated(weight);
    const XSeries c = at_zero_times(tau);
    if (c.precision() == 0 || c[0] == 0) throw ConsistencyError("tau has a vanishing constant term");
    return tau;
}

Scalar norm(const TimePoly& p)
{
    Scalar best(0);
    for (const auto& [m, c] : p.terms())
        for (int k = 0; k < c.precision(); ++k) best = std::max(best, abs(c[k]));
    return best;
}

} // namespace

TimePoly complete_homogeneous(const TimeSpace& space, int nx, int j, const std::vector<Scalar>& c)
{
    if (static_cast<int>(c.size()) != space.n) throw Error("one coefficient per channel expected");
    std::vector<TimePoly> s(static_cast<size_t>(space.kmax + 1), TimePoly(space, nx));
    for (int k = 1; k <= space.kmax; ++k)
        for (int alpha = 0; alpha < space.n; ++alpha)
            if (c[static_cast<size_t>(alpha)] != 0)
                s[static_cast<size_t>(k)] += c[static_cast<size_t>(alpha)] * TimePoly::variable(space, nx, {k, alpha});
    // j h_j = sum_k k s_k h_{j-k}
    std::vector<TimePoly> h{TimePoly::constant(space, XSeries::constant(nx, 1))};
    for (int i = 1; i <= j; ++i) {
        TimePoly acc(space, nx);
        for (int k = 1; k <= std::min(i, space.kmax); ++k)
            acc += Scalar(k) * (s[static_cast<size_t>(k)] * h[static_cast<size_t>(i - k)]);
        h.push_back(Scalar(1, i) * acc);
    }
    return h.back();
}

TauFamily vacuum_tau(int n, int kmax, int nx)
{
    TauFamily f;
    f.name = "vacuum";
    f.space = TimeSpace{n, kmax};
    f.nx = nx;
    f.tau = TimePoly::constant(f.space, XSeries::constant(nx, 1));
    return f;
}

TauFamily schur_tau(int m, int kmax, int nx)
{
    TauFamily f = vacuum_tau(2, kmax, nx);
    f.name = "h" + std::to_string(m);
    f.companions[{0, 1}] = complete_homogeneous(f.space, nx, m, {Scalar(1), Scalar(-1)});
    return f;
}

TauFamily linear_probe(int kmax, int nx)
{
    TauFamily f = vacuum_tau(2, kmax, nx);
    f.name = "1+t11";
    f.tau += TimePoly::variable(f.space, nx, {1, 0});
    return f;
}

TZSeries baker_from_tau(const TauFamily& f, int weight, int nz)
{
    const int n = f.n();
    const TimePoly tau = check_tau(f, weight);
    const TimePoly inv = series_inverse(tau);
    const TimePoly proto(f.space, f.nx);
    std::map<int, Mat<TimePoly>> coeffs;
    auto put = [&](int d, int i, int j, const TimePoly& v) {
        auto it = coeffs.try_emplace(d, n, zero_like(proto)).first;
        it->second(i, j) += v;
    };
    bool deep = false;
    // a truncated source leaves every degree undetermined beyond its weight
    auto bounded_zeros = [&](const TimePoly& src, int i, int j, int offset) {
        if (!src.bounded()) return;
        for (int d = offset; d >= -nz; --d) put(d, i, j, TimePoly(f.space, f.nx, src.weight() + d - offset));
        if (src.weight() - nz - 1 - offset >= 0) deep = true;
    };
    for (int alpha = 0; alpha < n; ++alpha) {
        bounded_zeros(tau, alpha, alpha, 0);
        for (const auto& [d, p] : miwa_shift(tau, alpha, kAllDepths)) put(d, alpha, alpha, p * inv);
    }
    for (const auto& [ab, c] : f.companions) {
        const auto [alpha, beta] = ab;
        if (alpha == beta || alpha < 0 || beta < 0 || alpha >= n || beta >= n)
            throw ConfigError("companion tau_{" + std::to_string(alpha + 1) + std::to_string(beta + 1) +
                              "} is not off-diagonal");
        const TimePoly cw = c.truncated(weight);
        bounded_zeros(cw, alpha, beta, -1);
        for (const auto& [d, p] : miwa_shift(cw, beta, kAllDepths)) put(d - 1, alpha, beta, p * inv);
    }
    TZSeries w(n, nz, proto);
    for (auto& [d, m] : coeffs) w.set(d, std::move(m));
    if (deep) w.restrict_low(-nz);
    return w;
}

BakerFlows::BakerFlows(TZSeries w) : w_(std::move(w)), winv_(z_invert(w_)) {}

const TZSeries& BakerFlows::f(const MultiIndex& lambda)
{
    auto it = memo_.find(lambda);
    if (it != memo_.end()) return it->second;
    TZSeries out;
    if (lambda.empty()) {
        out = TZSeries::identity(w_.dim(), w_.nz(), w_.proto());
    } else {
        const FlowIndex c = lambda.back();
        // w depends on times beyond the space only through exp(xi)
        const bool inside = c.k <= w_.proto().space().kmax;
        auto dc = [c, inside](const TimePoly& p) { return inside ? derive_t(p, c) : TimePoly(p.space(), p.nx()); };
        if (lambda.size() == 1) {
            TZSeries ze = (w_ * unit_matrix(w_.dim(), c.alpha, w_.proto())).shift(c.k);
            out = (w_.map_entries(dc) + ze) * winv_;
        } else {
            const TZSeries& prev = f(MultiIndex(lambda.begin(), lambda.end() - 1));
            out = prev.map_entries(dc) + prev * f({c});
        }
    }
    return memo_.emplace(lambda, std::move(out)).first->second;
}

BilinearReport classical_precheck(const TauFamily& f, int weight, int nz, int l_max,
                                  const std::vector<MultiIndex>& lambdas)
{
    BakerFlows flows(baker_from_tau(f, weight, nz));
    BilinearReport rep;
    for (const auto& lambda : lambdas) {
        const TZSeries& fl = flows.f(lambda);
        for (int l = 0; l <= l_max; ++l) rep.cases.push_back({l, 0, lambda, residue_residual(fl, l)});
    }
    return rep;
}

bool ExpqoReport::passed() const
{
    return std::all_of(channels.begin(), channels.end(), [](const Residual& r) { return r.zero; });
}

Residual ExpqoReport::total() const
{
    Residual r;
    for (const auto& c : channels) r.merge(c);
    return r;
}

ExpqoReport verify_expqo(const std::vector<Scalar>& a, const Scalar& q, int nx, int depth)
{
    const int n = static_cast<int>(a.size());
    const TimeSpace space{n, std::max(depth, 1)};
    ExpqoReport rep;
    rep.depth = depth;
    for (int alpha = 0; alpha < n; ++alpha) {
        std::vector<Scalar> c(static_cast<size_t>(n));
        c[static_cast<size_t>(alpha)] = 1;
        std::vector<TimePoly> h;
        for (int j = 0; j <= depth; ++j) h.push_back(complete_homogeneous(space, nx, j, c));
        Residual r;
        for (int j = 0; j <= depth; ++j) {
            TimePoly lhs(space, nx);
            for (int i = 0; i <= j; ++i) {
                const Scalar e = power(a[static_cast<size_t>(alpha)], i) / q_factorial(i, q);
                lhs += x_power(space, nx, i, e) * h[static_cast<size_t>(j - i)];
            }
            const TimePoly rhs = q_shift_times(h[static_cast<size_t>(j)], a, q);
            inspect(lhs - rhs, j, alpha, alpha, r);
        }
        rep.channels.push_back(r);
    }
    return rep;
}

namespace {

// Sum over nonempty multisets eta of Delta^eta / (eta! x (q-1)) shift(res_z(z^l F_{lambda.eta})).
Mat<TimePoly> taylor_residue(BakerFlows& cl, const MultiIndex& lambda, int l, const std::vector<Scalar>& a,
                             const Scalar& q, const TimeSpace& space, int nx)
{
    const int n = space.n;
    // every flow up to the x-cap, including times the tau family does not involve
    std::vector<FlowIndex> vars;
    for (int k = 1; k <= nx + 1; ++k)
        for (int beta = 0; beta < n; ++beta) vars.push_back({k, beta});
    const int nv = static_cast<int>(vars.size());
    std::vector<Scalar> delta(static_cast<size_t>(nv));
    for (int v = 0; v < nv; ++v) {
        const FlowIndex f = vars[static_cast<size_t>(v)];
        delta[static_cast<size_t>(v)] = q_shift_coefficient(f.k, q) * (power(q, f.k) - 1) *
                                        power(a[static_cast<size_t>(f.alpha)], f.k);
    }
    const TimePoly proto(space, nx);
    Mat<TimePoly> sum(n, zero_like(proto));
    int cap = kUnboundedWeight;
    std::vector<int> eta(static_cast<size_t>(nv), 0);

    // visit every multiset of exact weight w over variables >= v
    std::function<void(int, int, int)> visit = [&](int v, int left, int w) {
        if (left == 0) {
            MultiIndex seq = lambda;
            Scalar coef = 1 / (q - 1);
            for (int u = 0; u < nv; ++u)
                for (int e = 1; e <= eta[static_cast<size_t>(u)]; ++e) {
                    seq.push_back(vars[static_cast<size_t>(u)]);
                    coef *= delta[static_cast<size_t>(u)] / e;
                }
            Mat<TimePoly> res;
            try {
                res = cl.f(seq).shift(l).coeff(-1);
            } catch (const DepthError&) {
                // this term starts at total weight w - 1
                cap = std::min(cap, w - 2);
                return;
            }
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    TimePoly t = times_x_power(q_shift_times(res(i, j), a, q), w - 1, coef);
                    cap = std::min(cap, t.weight());
                    sum(i, j) += t;
                }
            return;
        }
        for (int u = v; u < nv; ++u) {
            const int wt = vars[static_cast<size_t>(u)].k;
            if (wt > left) continue;
            ++eta[static_cast<size_t>(u)];
            visit(u, left - wt, w);
            --eta[static_cast<size_t>(u)];
        }
    };
    for (int w = 1; w - 1 <= std::min(nx, cap); ++w) visit(0, w, w);
    if (cap < kUnboundedWeight)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) sum(i, j) = sum(i, j).truncated(cap);
    return sum;
}

} // namespace

std::vector<PathCase> tau_paths(const TauFamily& f, const std::vector<Scalar>& a, const TauOptions& o)
{
    if (static_cast<int>(a.size()) != f.n()) throw ConfigError("A and the tau family have different sizes");
    if (o.q == 1) throw ConfigError("the q-stage needs q != 1");
    const TZSeries wcl = baker_from_tau(f, o.weight, o.nz);
    BakerFlows cl(wcl);
    BakerFlows qf(wcl.map_entries([&](const TimePoly& p) { return q_shift_times(p, a, o.q); }));
    const TZSeries g = baker_generator(o.q, a, qf.w(), qf.inverse());
    std::vector<PathCase> out;
    for (const auto& lambda : flow_sequences(o.flows, o.max_len)) {
        const TZSeries& fq = qf.f(lambda);
        const TZSeries m1 = lift_m1(o.q, fq, g);
        for (int m : {0, 1}) {
            const TZSeries& x = m == 0 ? fq : m1;
            for (int l = 0; l <= o.l_max; ++l) {
                PathCase pc{l, m, lambda, {}, {}, kUnboundedWeight};
                const Mat<TimePoly> direct = x.shift(l).coeff(-1);
                Mat<TimePoly> taylor;
                if (m == 0) {
                    taylor = cl.f(lambda).shift(l).coeff(-1).map(
                        [&](const TimePoly& p) { return q_shift_times(p, a, o.q); });
                } else {
                    taylor = taylor_residue(cl, lambda, l, a, o.q, f.space, f.nx);
                }
                for (int i = 0; i < f.n(); ++i)
                    for (int j = 0; j < f.n(); ++j) pc.taylor_weight = std::min(pc.taylor_weight, taylor(i, j).weight());
                inspect(direct, -1, pc.direct);
                inspect(direct - taylor, -1, pc.difference);
                out.push_back(std::move(pc));
            }
        }
    }
    return out;
}

bool TauReport::q_bilinear_passed() const
{
    return std::all_of(paths.begin(), paths.end(), [](const PathCase& p) { return p.direct.zero; });
}

bool TauReport::paths_agree() const
{
    return std::all_of(paths.begin(), paths.end(), [](const PathCase& p) { return p.difference.zero; });
}

TauReport verify_tau_theorem(const TauFamily& f, const std::vector<Scalar>& a, const TauOptions& o)
{
    TauReport rep;
    rep.precheck = classical_precheck(f, o.weight, o.nz, o.l_max, flow_sequences(o.flows, o.max_len));
    if (const ResidueCase* bad = rep.precheck.first_failure())
        throw ConsistencyError(f.name + " is not a classical tau function: res_z(z^" + std::to_string(bad->l) +
                               " F" + to_string(bad->lambda) + ") != 0");
    rep.expqo = verify_expqo(a, o.q, f.nx, o.expqo_depth);
    rep.paths = tau_paths(f, a, o);
    return rep;
}

bool LimitReport::passed() const
{
    if (norms.empty()) return false;
    const bool all_zero = std::all_of(norms.begin(), norms.end(), [](const Scalar& s) { return s == 0; });
    if (all_zero) return true;
    if (ratios.size() + 1 != norms.size()) return false;
    return std::all_of(ratios.begin(), ratios.end(), [&](const Scalar& r) { return r >= lo && r <= hi; });
}

LimitReport classical_limit_check(const TauFamily& f, const std::vector<Scalar>& a, const std::vector<int>& ms,
                                  int weight, int nz)
{
    if (static_cast<int>(a.size()) != f.n()) throw ConfigError("A and the tau family have different sizes");
    std::vector<TimePoly> objects{f.tau.truncated(weight)};
    for (const auto& [ab, c] : f.companions) objects.push_back(c.truncated(weight));
    const XSeries c0 = at_zero_times(f.tau);
    if (c0.precision() > 0 && c0[0] != 0) {
        const TZSeries w = baker_from_tau(f, weight, nz);
        for (const auto& [d, m] : w.terms())
            for (int i = 0; i < f.n(); ++i)
                for (int j = 0; j < f.n(); ++j) objects.push_back(m(i, j));
    }
    LimitReport rep;
    for (int m : ms) {
        const Scalar q = 1 + power(Scalar(2), -m);
        Scalar best(0);
        for (const auto& obj : objects) {
            const TimePoly shifted = q_shift_times(obj, a, q);
            TimePoly r = q_derive(shifted, q);
            for (int beta = 0; beta < f.n(); ++beta)
                r -= a[static_cast<size_t>(beta)] * derive_t(shifted, {1, beta});
            best = std::max(best, norm(r));
        }
        rep.qs.push_back(q);
        rep.norms.push_back(best);
    }
    for (size_t i = 1; i < rep.norms.size(); ++i)
        if (rep.norms[i - 1] != 0) rep.ratios.push_back(rep.norms[i] / rep.norms[i - 1]);
    return rep;
}

} // namespace qakns
