#include "qakns/hierarchy.hpp"

namespace qakns {

std::pair<MZSeries, MZSeries> b_split(const Resolvent& r, int k)
{
    if (k < 0) throw Error("flow index k must be nonnegative");
    MZSeries zk = r.r.shift(k);
    if (!zk.known(0))
        throw DepthError("B_{" + std::to_string(k) + "} needs the resolvent to depth " + std::to_string(k) +
                         ", have " + std::to_string(r.depth));
    return {zk.plus(), zk.minus()};
}

UFlow u_flow(const LaxData& l, const Resolvent& r, int k, int nd)
{
    const MZSeries b = b_split(r, k).first;
    const QDOp lax = lax_operator(l, nd);
    UFlow out;
    out.bracket = q_commutator(b, lax);
    out.value = MatX(l.n(), XSeries(l.nx));
    for (const auto& [i, c] : out.bracket.terms()) {
        for (const auto& [d, m] : c.terms()) {
            if (i == 0 && d == 0) {
                out.value = m;
                continue;
            }
            inspect(m, d, i == 0 ? out.z_dependence : out.dq_dependence);
        }
    }
    for (int i = 0; i < l.n(); ++i) inspect(out.value(i, i), 0, i, i, out.diagonal);
    return out;
}

MZSeries resolvent_flow(const MZSeries& b, const MZSeries& r_beta) { return commutator(b, r_beta); }

namespace {

const Resolvent& find_resolvent(const std::vector<Resolvent>& rs, int alpha)
{
    for (const auto& r : rs)
        if (r.alpha == alpha) return r;
    throw Error("no resolvent for channel " + std::to_string(alpha + 1));
}

} // namespace

MZSeries zero_curvature_residual(FlowIndex ka, FlowIndex lb, const std::vector<Resolvent>& resolvents)
{
    const Resolvent& ra = find_resolvent(resolvents, ka.alpha);
    const Resolvent& rb = find_resolvent(resolvents, lb.alpha);
    const MZSeries bk = b_split(ra, ka.k).first;
    const MZSeries bl = b_split(rb, lb.k).first;
    MZSeries dk_bl = resolvent_flow(bk, rb.r).shift(lb.k);
    MZSeries dl_bk = resolvent_flow(bl, ra.r).shift(ka.k);
    if (!dk_bl.known(0) || !dl_bk.known(0))
        throw DepthError("zero-curvature check needs resolvents to depth k + l = " + std::to_string(ka.k + lb.k));
    return dk_bl.plus() - dl_bk.plus() - commutator(bk, bl);
}

} // namespace qakns
