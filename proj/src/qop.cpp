#include "qakns/qop.hpp"

#include <algorithm>
#include <sstream>

namespace qakns {

namespace {

MZSeries coeff_dilation(const DifferenceStructure& s, const MZSeries& f)
{
    if (s.is_classical()) return f;
    return f.map_entries([&s](const XSeries& e) { return s.dilation(e); });
}

MZSeries coeff_inverse_dilation(const DifferenceStructure& s, const MZSeries& f)
{
    if (s.is_classical()) return f;
    return f.map_entries([&s](const XSeries& e) { return s.inverse_dilation(e); });
}

MZSeries coeff_delta(const DifferenceStructure& s, const MZSeries& f)
{
    return f.map_entries([&s](const XSeries& e) { return s.delta(e); });
}

bool exact_zero(const MZSeries& f) { return f.is_exact_zero_series(); }

int low_of_product(const QDOp& p, const QDOp& r, bool p_has_negative)
{
    if (p.exact() && r.exact() && !p_has_negative) return kExactLow;
    int low = -p.nd();
    if (!p.exact() && r.top() != kExactLow) low = std::max(low, p.low() + r.top());
    if (!r.exact() && p.top() != kExactLow) low = std::max(low, r.low() + p.top());
    return low;
}

// delta o X
QDOp left_delta(const QDOp& x)
{
    const auto& s = x.structure();
    QDOp r(s, x.dim(), x.nx(), x.nz(), x.nd());
    if (!x.exact()) r.restrict_low(x.low() + 1);
    for (const auto& [j, g] : x.terms()) {
        r.add(j + 1, coeff_dilation(s, g));
        r.add(j, coeff_delta(s, g));
    }
    return r;
}

// delta^{-1} o g = sum_i (-1)^i (D^{-1} T^i g) delta^{-1-i},  T = delta D^{-1}
QDOp left_delta_inverse(const QDOp& x)
{
    const auto& s = x.structure();
    QDOp r(s, x.dim(), x.nx(), x.nz(), x.nd());
    bool dropped = false;
    for (const auto& [j, g] : x.terms()) {
        MZSeries h = coeff_inverse_dilation(s, g); // D^{-1} T^i g
        for (int i = 0;; ++i) {
            const int pw = j - 1 - i;
            if (exact_zero(h)) break;
            if (pw < -x.nd()) {
                dropped = true;
                break;
            }
            MZSeries term = h;
            if (i % 2) term = -term;
            r.add(pw, term);
            h = coeff_inverse_dilation(s, coeff_delta(s, h));
        }
    }
    int low = kExactLow;
    if (!x.exact()) low = std::max(x.low() - 1, -x.nd());
    if (dropped) low = std::max(low, -x.nd());
    if (low != kExactLow) r.restrict_low(low);
    return r;
}

void require_same_basis(const QDOp& a, const QDOp& b)
{
    if (!(a.structure() == b.structure()))
        throw TruncationMismatch("operators live in different bases (" + a.structure().name() + " vs " +
                                 b.structure().name() + ")");
}

MZSeries lifted(const SqMatrix& m, int nx, int nz) { return MZSeries::constant(lift(m, nx), nz); }

SqMatrix diag_power(const SqMatrix& a, int k)
{
    SqMatrix r = a;
    for (int i = 0; i < a.dim(); ++i) r(i, i) = qakns::power(a(i, i), k);
    return r;
}

void require_invertible_diagonal(const SqMatrix& a)
{
    for (int i = 0; i < a.dim(); ++i)
        for (int j = 0; j < a.dim(); ++j) {
            if (i != j && a(i, j) != 0) throw Error("A must be diagonal");
            if (i == j && a(i, i) == 0) throw Error("A must be invertible");
        }
}

} // namespace

QDOp::QDOp(DifferenceStructure s, int n, int nx, int nz, int nd)
    : s_(std::move(s)), n_(n), nx_(nx), nz_(nz), nd_(nd)
{
}

QDOp QDOp::multiplication(const MZSeries& f, DifferenceStructure s, int nd)
{
    QDOp r(std::move(s), f.dim(), f.proto().order(), f.nz(), nd);
    r.set(0, f);
    return r;
}

QDOp QDOp::power(int i, DifferenceStructure s, int n, int nx, int nz, int nd)
{
    QDOp r(std::move(s), n, nx, nz, nd);
    r.set(i, MZSeries::identity(n, nz, XSeries(nx)));
    return r;
}

int QDOp::top() const
{
    if (!c_.empty()) return c_.rbegin()->first;
    return exact() ? kExactLow : low_ - 1;
}

MZSeries QDOp::zero_coeff() const { return MZSeries(n_, nz_, XSeries(nx_)); }

MZSeries QDOp::coeff(int i) const
{
    if (i < low_)
        throw DepthError("power " + std::to_string(i) + " is below the determined band (from " +
                         std::to_string(low_) + ")");
    auto it = c_.find(i);
    return it == c_.end() ? zero_coeff() : it->second;
}

void QDOp::set(int i, MZSeries c)
{
    if (i < low_) return;
    if (i < -nd_) {
        if (!c.is_exact_zero_series()) mark_dropped();
        return;
    }
    if (c.is_exact_zero_series())
        c_.erase(i);
    else
        c_[i] = std::move(c);
}

void QDOp::add(int i, const MZSeries& c)
{
    if (i < low_) return;
    auto it = c_.find(i);
    if (it == c_.end() || i < -nd_)
        set(i, c);
    else {
        it->second += c;
        if (it->second.is_exact_zero_series()) c_.erase(it);
    }
}

QDOp& QDOp::restrict_low(int i)
{
    if (i <= low_) return *this;
    low_ = i;
    c_.erase(c_.begin(), c_.lower_bound(i));
    return *this;
}

void QDOp::check(const QDOp& o) const
{
    require_same_basis(*this, o);
    if (o.n_ != n_ || o.nx_ != nx_ || o.nz_ != nz_ || o.nd_ != nd_)
        throw TruncationMismatch("operator carriers differ");
}

QDOp& QDOp::operator+=(const QDOp& o)
{
    check(o);
    restrict_low(o.low_);
    for (const auto& [i, c] : o.c_) add(i, c);
    return *this;
}

QDOp& QDOp::operator-=(const QDOp& o)
{
    check(o);
    restrict_low(o.low_);
    for (const auto& [i, c] : o.c_) add(i, -c);
    return *this;
}

QDOp& QDOp::operator*=(const Scalar& s)
{
    for (auto& [i, c] : c_) c *= s;
    return *this;
}

std::string QDOp::to_string() const
{
    std::ostringstream os;
    const char* sym = "D";
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) {
        os << "[" << sym << "^" << it->first << "]";
        for (const auto& [d, m] : it->second.terms()) {
            os << " z^" << d << ":";
            for (int i = 0; i < n_; ++i)
                for (int j = 0; j < n_; ++j)
                    if (!m(i, j).is_zero()) os << " (" << i + 1 << "," << j + 1 << ")=" << m(i, j).to_string();
        }
        os << "\n";
    }
    if (!exact()) os << "+ O(D^" << low_ - 1 << ")\n";
    return os.str();
}

QDOp op_power_left(int i, const QDOp& r)
{
    QDOp x = r;
    for (int k = 0; k < i; ++k) x = left_delta(x);
    for (int k = 0; k > i; --k) x = left_delta_inverse(x);
    return x;
}

QDOp op_mul_left(const MZSeries& f, const QDOp& r)
{
    return r.map_coeffs([&f](const MZSeries& c) { return f * c; });
}

QDOp op_mul_right(const QDOp& r, const MZSeries& f)
{
    return r.map_coeffs([&f](const MZSeries& c) { return c * f; });
}

QDOp op_compose(const QDOp& p, const QDOp& r)
{
    require_same_basis(p, r);
    QDOp out(p.structure(), p.dim(), p.nx(), p.nz(), p.nd());
    bool negative = false;
    for (const auto& [i, c] : p.terms()) {
        if (i < 0) negative = true;
        out += op_mul_left(c, op_power_left(i, r));
    }
    int low = low_of_product(p, r, negative);
    if (low != kExactLow) out.restrict_low(low);
    return out;
}

QDOp symbol_compose(const QDOp& p, const QDOp& r)
{
    require_same_basis(p, r);
    QDOp out(p.structure(), p.dim(), p.nx(), p.nz(), p.nd());
    for (const auto& [i, a] : p.terms())
        for (const auto& [j, b] : r.terms()) out.add(i + j, a * b);
    int low = low_of_product(p, r, false);
    if (low != kExactLow) out.restrict_low(low);
    return out;
}

MZSeries op_apply(const QDOp& p, const MZSeries& f)
{
    if (!p.terms().empty() && p.terms().begin()->first < 0)
        throw Error("operator with negative powers does not act on functions");
    if (!p.exact() && p.low() > -p.nd())
        throw DepthError("operator band is not determined down to power 0");
    MZSeries out = f.zero();
    MZSeries g = f;
    int k = 0;
    for (const auto& [i, c] : p.terms()) {
        for (; k < i; ++k) g = coeff_delta(p.structure(), g);
        out += c * g;
    }
    return out;
}

QDOp op_adjoint(const QDOp& p)
{
    const DifferenceStructure dual = p.structure().dual();
    QDOp out(dual, p.dim(), p.nx(), p.nz(), p.nd());
    const Scalar factor = Scalar(-1) / p.structure().q();
    bool negative = false;
    for (const auto& [j, g] : p.terms()) {
        if (j < 0) negative = true;
        QDOp term = op_power_left(j, QDOp::multiplication(g.transpose(), dual, p.nd()));
        term *= qakns::power(factor, j);
        out += term;
    }
    if (!p.exact())
        out.restrict_low(std::max(p.low(), -p.nd()));
    else if (negative)
        out.restrict_low(std::max(out.low(), -p.nd()));
    return out;
}

QDOp shift_x_over_q(const QDOp& p)
{
    const Scalar& q = p.structure().q();
    QDOp out(p.structure(), p.dim(), p.nx(), p.nz(), p.nd());
    if (!p.exact()) out.restrict_low(p.low());
    for (const auto& [j, g] : p.terms()) {
        MZSeries h = coeff_inverse_dilation(p.structure(), g);
        h *= qakns::power(q, j);
        out.set(j, h);
    }
    return out;
}

QDOp reflect(const QDOp& p)
{
    QDOp out(p.structure(), p.dim(), p.nx(), p.nz(), p.nd());
    if (!p.exact()) out.restrict_low(p.low());
    for (const auto& [j, g] : p.terms()) out.set(j, (j % 2) ? -g : g);
    return out;
}

MZSeries res_dq(const QDOp& p) { return p.coeff(-1); }

QDOp q_commutator(const QDOp& a, const QDOp& b)
{
    const auto& s = a.structure();
    QDOp da = a.map_coeffs([&s](const MZSeries& c) { return coeff_dilation(s, c); });
    return op_compose(da, b) - op_compose(b, a);
}

QDOp q_commutator(const MZSeries& a, const QDOp& b)
{
    return q_commutator(QDOp::multiplication(a, b.structure(), b.nd()), b);
}

MZSeries op_symbol(const QDOp& p, const SqMatrix& a)
{
    require_invertible_diagonal(a);
    MZSeries out(p.dim(), p.nz(), XSeries(p.nx()));
    int zmax = 0;
    for (const auto& [k, c] : p.terms()) {
        out += (c * lifted(diag_power(a, k), p.nx(), p.nz())).shift(k);
        if (!c.terms().empty()) zmax = std::max(zmax, c.top());
    }
    if (!p.exact()) out.restrict_low(p.low() + zmax);
    return out;
}

namespace {

void require_z_free(const QDOp& p)
{
    for (const auto& [i, c] : p.terms())
        if (!c.exact() || (!c.terms().empty() && (c.terms().begin()->first != 0 || c.top() != 0)))
            throw Error("residue pairing needs z-free coefficients");
}

} // namespace

PairingResult residue_pairing(const QDOp& p, const QDOp& q_op, const SqMatrix& a)
{
    require_same_basis(p, q_op);
    require_invertible_diagonal(a);
    require_z_free(p);
    require_z_free(q_op);
    for (const QDOp* op : {&p, &q_op})
        if (!op->terms().empty() &&
            (op->terms().begin()->first < -op->nd() || op->terms().rbegin()->first > op->nd()))
            throw DepthError("operator band exceeds N_D");

    const Scalar& q = p.structure().q();
    const int nx = p.nx(), nz = p.nz();

    // starred factor: sum_l (-q)^l A^l z^l g_l(x/q)
    MZSeries star(p.dim(), nz, XSeries(nx));
    for (const auto& [l, g] : q_op.terms()) {
        MZSeries h = lifted(diag_power(a, l), nx, nz) * coeff_inverse_dilation(p.structure(), g);
        h *= qakns::power(-q, l);
        star += h.shift(l);
    }
    if (!q_op.exact()) star.restrict_low(q_op.low());

    PairingResult out;
    out.lhs = (op_symbol(p, a) * star).residue();

    const QDOp ainv = QDOp::multiplication(lifted(diag_power(a, -1), nx, nz), p.structure(), p.nd());
    out.rhs = res_dq(symbol_compose(symbol_compose(p, ainv), reflect(shift_x_over_q(q_op)))).coeff(0);
    out.rhs_leibniz = res_dq(op_compose(op_compose(p, ainv), q_op)).coeff(0);
    return out;
}

} // namespace qakns
