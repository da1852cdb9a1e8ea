#include "qakns/hierarchy.hpp"

#include <optional>
#include <string>

namespace qakns {

namespace {

std::string entry_name(int i, int j) { return "(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")"; }

MZSeries constant_series(const MatX& m, int nz) { return MZSeries::constant(m, nz); }

MatX dilation(const DifferenceStructure& s, const MatX& m)
{
    return m.map([&s](const XSeries& f) { return s.dilation(f); });
}

MatX delta(const DifferenceStructure& s, const MatX& m)
{
    return m.map([&s](const XSeries& f) { return s.delta(f); });
}

// Solve (D X) A - A X = rhs entrywise. Off-diagonal entries invert
// (a_j D - a_i); diagonal entries invert a_i (D - 1) above the constant
// term, which is left zero. Under the classical structure the diagonal of
// rhs must vanish and the diagonal of X is left for the caller.
MatX solve_twisted(const LaxData& l, const MatX& rhs, int order)
{
    const auto& s = l.structure;
    const int n = l.n();
    MatX x(n, XSeries(l.nx));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const XSeries& b = rhs(i, j);
            std::vector<Scalar> c(static_cast<size_t>(b.precision()));
            for (int m = 0; m < b.precision(); ++m) {
                const Scalar ev = s.eigenvalue(l.a[static_cast<size_t>(j)], l.a[static_cast<size_t>(i)], m);
                if (ev != 0) {
                    c[static_cast<size_t>(m)] = b[m] / ev;
                    continue;
                }
                if (i != j)
                    throw ResonanceError("a_j q^m = a_i at entry " + entry_name(i, j) + ", m=" + std::to_string(m));
                if (b[m] != 0)
                    throw ConsistencyError("order " + std::to_string(order) + ": (D-1) must be inverted on x^" +
                                           std::to_string(m) + " coefficient " + b[m].get_str() + " at entry " +
                                           entry_name(i, i));
            }
            x(i, j) = XSeries::partial(l.nx, std::move(c));
        }
    return x;
}

struct PartialDressing {
    std::vector<MatX> w;
    std::optional<std::string> failure;
};

PartialDressing dressing_orders(const LaxData& l, int depth)
{
    const auto& s = l.structure;
    const int n = l.n();
    PartialDressing out;
    out.w.push_back(lift(SqMatrix::identity(n, Scalar(0)), l.nx));
    for (int k = 0; k < depth; ++k) {
        const MatX& wk = out.w.back();
        MatX rhs = -(delta(s, wk) + l.u * wk);
        MatX next;
        try {
            next = solve_twisted(l, rhs, k);
        } catch (const ConsistencyError& e) {
            out.failure = e.what();
            break;
        }
        if (s.is_classical()) {
            MatX uw = l.u * next;
            for (int i = 0; i < n; ++i) next(i, i) = -s.delta_inverse(uw(i, i));
        }
        out.w.push_back(std::move(next));
    }
    return out;
}

} // namespace

void validate(const LaxData& l)
{
    const int n = l.n();
    if (n < 1) throw ConfigError("dimension n must be at least 1");
    if (l.u.dim() != n) throw ConfigError("U must be " + std::to_string(n) + "x" + std::to_string(n));
    for (int i = 0; i < n; ++i) {
        if (l.a[static_cast<size_t>(i)] == 0) throw ConfigError("a_" + std::to_string(i + 1) + " must be nonzero");
        for (int j = 0; j < i; ++j)
            if (l.a[static_cast<size_t>(i)] == l.a[static_cast<size_t>(j)])
                throw ConfigError("A needs distinct eigenvalues: a_" + std::to_string(j + 1) + " = a_" +
                                  std::to_string(i + 1));
    }
    for (int i = 0; i < n; ++i) {
        if (l.u(i, i).order() != l.nx) throw ConfigError("U entries must have order N_x");
        if (!l.u(i, i).is_zero())
            throw ConfigError("u_ii=0 violated at u_" + std::to_string(i + 1) + std::to_string(i + 1));
    }
    if (l.structure.is_classical()) return;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            for (int m = 0; m <= l.nx; ++m)
                if (l.structure.eigenvalue(l.a[static_cast<size_t>(j)], l.a[static_cast<size_t>(i)], m) == 0)
                    throw ConfigError("non-resonance violated: a_" + std::to_string(j + 1) + " q^" +
                                      std::to_string(m) + " = a_" + std::to_string(i + 1));
        }
    // q must not be a root of unity for the q-antiderivative
    if (l.structure.q() == -1) throw ConfigError("q = -1 is a root of unity");
}

QDOp lax_operator(const LaxData& l, int nd)
{
    QDOp op(l.structure, l.n(), l.nx, l.nz, nd);
    op.set(1, MZSeries::identity(l.n(), l.nz, XSeries(l.nx)));
    MZSeries v = constant_series(l.u, l.nz);
    v -= constant_series(lift(l.A(), l.nx), l.nz).shift(1);
    op.set(0, v);
    return op;
}

Dressing solve_dressing(const LaxData& l, int depth)
{
    if (depth > l.nz) throw DepthError("dressing depth " + std::to_string(depth) + " exceeds N_z");
    PartialDressing p = dressing_orders(l, depth);
    if (p.failure) throw ConsistencyError("dressing has no power-series solution: " + *p.failure);
    Dressing d;
    d.depth = depth;
    d.w = MZSeries(l.n(), l.nz, XSeries(l.nx));
    for (int k = 0; k <= depth; ++k) d.w.set(-k, p.w[static_cast<size_t>(k)]);
    d.w.restrict_low(-depth);
    return d;
}

int max_dressing_depth(const LaxData& l, int limit)
{
    PartialDressing p = dressing_orders(l, limit);
    return static_cast<int>(p.w.size()) - 1;
}

MZSeries dressing_residual(const LaxData& l, const MZSeries& w)
{
    const auto& s = l.structure;
    MZSeries a = constant_series(lift(l.A(), l.nx), l.nz);
    MZSeries v = constant_series(l.u, l.nz) - a.shift(1);
    MZSeries dw = w.map_entries([&s](const XSeries& f) { return s.dilation(f); });
    MZSeries qw = w.map_entries([&s](const XSeries& f) { return s.delta(f); });
    return qw + v * w + (dw * a).shift(1);
}

Resolvent solve_resolvent_direct(const LaxData& l, int alpha, int depth, Normalization norm)
{
    if (alpha < 0 || alpha >= l.n()) throw Error("channel out of range");
    if (depth > l.nz) throw DepthError("resolvent depth " + std::to_string(depth) + " exceeds N_z");
    const auto& s = l.structure;
    const int n = l.n();
    std::vector<MatX> r;
    r.push_back(lift(unit_diagonal(n, alpha), l.nx));
    for (int j = 0; j < depth; ++j) {
        const MatX& rj = r.back();
        // -(delta R_j - [R_j, U]_q)
        MatX rhs = -(delta(s, rj) - dilation(s, rj) * l.u + l.u * rj);
        MatX next = solve_twisted(l, rhs, j);
        if (s.is_classical()) {
            MatX c = next * l.u - l.u * next;
            for (int i = 0; i < n; ++i) next(i, i) = s.delta_inverse(c(i, i));
        }
        if (norm == Normalization::Idempotent) {
            const int order = j + 1;
            MatX sum(n, XSeries(l.nx));
            for (int a = 1; a < order; ++a) sum += r[static_cast<size_t>(a)] * r[static_cast<size_t>(order - a)];
            for (int i = 0; i < n; ++i) {
                if (next(i, i).precision() == 0 || sum(i, i).precision() == 0) continue;
                std::vector<Scalar> c = next(i, i).coefficients();
                c[0] = (i == alpha) ? Scalar(-sum(i, i)[0]) : sum(i, i)[0];
                next(i, i) = XSeries::partial(l.nx, std::move(c));
            }
        }
        r.push_back(std::move(next));
    }
    Resolvent out;
    out.alpha = alpha;
    out.depth = depth;
    out.r = MZSeries(n, l.nz, XSeries(l.nx));
    for (int j = 0; j <= depth; ++j) out.r.set(-j, r[static_cast<size_t>(j)]);
    out.r.restrict_low(-depth);
    return out;
}

Resolvent resolvent_from_dressing(const Dressing& d, int alpha)
{
    const int n = d.w.dim();
    MatX e = lift(unit_diagonal(n, alpha), d.w.proto().order());
    Resolvent out;
    out.alpha = alpha;
    out.depth = d.depth;
    out.r = (d.w * e) * z_invert(d.w);
    return out;
}

MZSeries qr_residual(const LaxData& l, const MZSeries& r)
{
    const auto& s = l.structure;
    MZSeries a = constant_series(lift(l.A(), l.nx), l.nz);
    MZSeries v = constant_series(l.u, l.nz) - a.shift(1);
    MZSeries dr = r.map_entries([&s](const XSeries& f) { return s.dilation(f); });
    MZSeries qr = r.map_entries([&s](const XSeries& f) { return s.delta(f); });
    return qr - (dr * v - v * r);
}

} // namespace qakns
