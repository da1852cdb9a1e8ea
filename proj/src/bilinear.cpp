#include "qakns/bilinear.hpp"

#include <algorithm>
#include <sstream>

namespace qakns {

std::string to_string(const MultiIndex& lambda)
{
    std::ostringstream os;
    os << "[";
    for (size_t i = 0; i < lambda.size(); ++i) os << (i ? "," : "") << "(" << lambda[i].k << "," << lambda[i].alpha + 1 << ")";
    os << "]";
    return os.str();
}

FlowWord flow_word(const MultiIndex& lambda)
{
    FlowWord f;
    f[{}] = Scalar(1);
    for (const FlowIndex& c : lambda) {
        FlowWord g;
        for (const auto& [word, coef] : f) {
            // Leibniz over the factors
            for (size_t p = 0; p < word.size(); ++p) {
                auto w = word;
                auto& mu = w[p].mu;
                mu.insert(std::upper_bound(mu.begin(), mu.end(), c), c);
                g[w] += coef;
            }
            auto w = word;
            w.push_back(FlowFactor{c, {}});
            g[w] += coef;
        }
        std::erase_if(g, [](const auto& kv) { return kv.second == 0; });
        f = std::move(g);
    }
    return f;
}

std::string to_string(const FlowWord& f)
{
    if (f.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [word, coef] : f) {
        if (!first) os << " + ";
        first = false;
        if (coef != 1 || word.empty()) os << coef.get_str() << (word.empty() ? "" : "*");
        for (size_t i = 0; i < word.size(); ++i) {
            if (i) os << "*";
            const auto& fac = word[i];
            for (const auto& m : fac.mu) os << "d" << m.k << (m.alpha + 1);
            os << "B" << fac.flow.k << (fac.flow.alpha + 1);
        }
    }
    return os.str();
}

FlowCalculus::FlowCalculus(std::vector<Resolvent> resolvents) : rs_(std::move(resolvents)) {}

const Resolvent& FlowCalculus::resolvent(int beta) const
{
    for (const auto& r : rs_)
        if (r.alpha == beta) return r;
    throw Error("no resolvent for channel " + std::to_string(beta + 1));
}

const MZSeries& FlowCalculus::r(int beta, const MultiIndex& mu)
{
    auto key = std::make_pair(beta, mu);
    auto it = r_memo_.find(key);
    if (it != r_memo_.end()) return it->second;
    MZSeries out;
    if (mu.empty()) {
        out = resolvent(beta).r;
    } else {
        // d^{rest + c} R = sum over S in rest of [d^S B_c, d^{rest \ S} R]
        const FlowIndex c = mu.back();
        const MultiIndex rest(mu.begin(), mu.end() - 1);
        const size_t m = rest.size();
        bool any = false;
        for (size_t mask = 0; mask < (size_t(1) << m); ++mask) {
            MultiIndex s, t;
            for (size_t i = 0; i < m; ++i) ((mask >> i) & 1 ? s : t).push_back(rest[i]);
            const MZSeries& bc = b(FlowFactor{c, s});
            const MZSeries& rt = r(beta, t);
            MZSeries term = commutator(bc, rt);
            if (!any) {
                out = std::move(term);
                any = true;
            } else {
                out += term;
            }
        }
    }
    return r_memo_.emplace(key, std::move(out)).first->second;
}

const MZSeries& FlowCalculus::b(const FlowFactor& f)
{
    auto it = b_memo_.find(f);
    if (it != b_memo_.end()) return it->second;
    MZSeries zr = r(f.flow.alpha, f.mu).shift(f.flow.k);
    if (!zr.known(0)) {
        std::string d;
        for (const auto& m : f.mu) d += "d" + std::to_string(m.k) + std::to_string(m.alpha + 1);
        throw DepthError(d + "B" + std::to_string(f.flow.k) + std::to_string(f.flow.alpha + 1) +
                         " needs more resolvent depth than available");
    }
    return b_memo_.emplace(f, zr.plus()).first->second;
}

MZSeries FlowCalculus::evaluate(const FlowWord& f)
{
    if (rs_.empty()) throw Error("flow calculus needs resolvents");
    const MZSeries& r0 = rs_.front().r;
    MZSeries sum = r0.zero();
    for (const auto& [word, coef] : f) {
        MZSeries prod = MZSeries::identity(r0.dim(), r0.nz(), r0.proto());
        for (const auto& fac : word) prod = prod * b(fac);
        sum += coef * prod;
    }
    return sum;
}

MZSeries flow_polynomial(const MultiIndex& lambda, const std::vector<Resolvent>& resolvents)
{
    FlowCalculus calc(resolvents);
    return calc.evaluate(flow_word(lambda));
}

std::vector<MultiIndex> flow_sequences(const std::vector<FlowIndex>& flows, int max_len)
{
    std::vector<MultiIndex> out{{}};
    size_t begin = 0;
    for (int len = 1; len <= max_len; ++len) {
        const size_t end = out.size();
        for (size_t i = begin; i < end; ++i)
            for (const auto& f : flows) {
                MultiIndex m = out[i];
                m.push_back(f);
                out.push_back(std::move(m));
            }
        begin = end;
    }
    return out;
}

bool BilinearReport::passed() const
{
    return std::all_of(cases.begin(), cases.end(), [](const ResidueCase& c) { return c.residual.zero; });
}

Residual BilinearReport::total() const
{
    Residual r;
    for (const auto& c : cases) r.merge(c.residual);
    return r;
}

const ResidueCase* BilinearReport::first_failure() const
{
    for (const auto& c : cases)
        if (!c.residual.zero) return &c;
    return nullptr;
}

BilinearReport check_q_bilinear(const Dressing& d, const LaxData& l, const BilinearOptions& o)
{
    const auto& s = l.structure;
    std::vector<Resolvent> rs;
    for (int alpha = 0; alpha < l.n(); ++alpha) rs.push_back(resolvent_from_dressing(d, alpha));
    FlowCalculus calc(rs);
    const MZSeries winv = o.form == InverseForm::Inverse ? z_invert(d.w) : adjoint_baker(d).transpose();
    const MZSeries g = baker_generator(s.q(), l.a, d.w, winv);
    BilinearReport rep;
    for (const auto& lambda : o.lambdas) {
        const MZSeries f = calc.evaluate(flow_word(lambda));
        for (int m : o.m) {
            if (m != 0 && m != 1) throw Error("m must be 0 or 1");
            const MZSeries x = m == 0 ? f : lift_m1(s.q(), f, g);
            for (int li = 0; li <= o.l_max; ++li) rep.cases.push_back({li, m, lambda, residue_residual(x, li)});
        }
    }
    return rep;
}

MZSeries adjoint_baker(const Dressing& d) { return z_invert(d.w).transpose(); }

Residual check_inverse_transpose(const MZSeries& w, const MZSeries& wstar)
{
    MZSeries one = MZSeries::identity(w.dim(), w.nz(), w.proto());
    return check_zero(w * wstar.transpose() - one);
}

LaxData reconstruct_from_bilinear(const DifferenceStructure& s, const Dressing& d, const MZSeries& wstar,
                                  const std::vector<Scalar>& a)
{
    const MZSeries g = baker_generator(s.q(), a, d.w, wstar.transpose());
    const int n = d.w.dim();
    const int nx = d.w.proto().order();
    const int low = std::max(g.low(), g.floor());
    for (int deg = -1; deg >= low; --deg) {
        Residual neg;
        inspect(g.coeff(deg), deg, neg);
        if (neg.zero) continue;
        const Term& t = *neg.first;
        throw ConsistencyError("bilinear identity violated: D_q w w^{-1} has a nonzero z^" + std::to_string(deg) +
                               " term at (" + std::to_string(t.row + 1) + "," + std::to_string(t.col + 1) + ")");
    }
    const MatX top = g.coeff(1);
    LaxData out;
    out.structure = s;
    out.nx = nx;
    out.nz = d.w.nz();
    for (int i = 0; i < n; ++i) {
        const XSeries& e = top(i, i);
        out.a.push_back(e.precision() > 0 ? e[0] : Scalar(0));
    }
    const MatX expect = lift(diagonal(out.a), nx);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (!agree(top(i, j), expect(i, j)))
                throw ConsistencyError("top symbol of D_q w w^{-1} is not a constant diagonal matrix");
    out.u = -g.coeff(0);
    return out;
}

Dressing corrupt_dressing(const Dressing& d, const Scalar& c)
{
    Dressing out = d;
    const int n = d.w.dim();
    MatX ci = lift(c * diagonal(std::vector<Scalar>(static_cast<size_t>(n), Scalar(1))), d.w.proto().order());
    out.w.add(-1, ci);
    return out;
}

} // namespace qakns
