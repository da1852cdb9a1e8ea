#include "qakns/xseries.hpp"

#include "qakns/errors.hpp"

#include <algorithm>
#include <sstream>

namespace qakns {

namespace {

void require_same_order(const XSeries& a, const XSeries& b)
{
    if (a.order() != b.order())
        throw TruncationMismatch("x-series orders differ: " + std::to_string(a.order()) + " vs " +
                                 std::to_string(b.order()));
}

} // namespace

XSeries::XSeries(int order) : order_(order), c_(static_cast<size_t>(order + 1))
{
    if (order < 0) throw Error("negative x-series order");
}

XSeries::XSeries(int order, std::vector<Scalar> coeffs) : XSeries(order)
{
    for (size_t k = 0; k < coeffs.size(); ++k) {
        if (static_cast<int>(k) <= order)
            c_[k] = std::move(coeffs[k]);
        else if (coeffs[k] != 0)
            throw TruncationMismatch("polynomial degree exceeds x-series order " + std::to_string(order));
    }
}

XSeries XSeries::partial(int order, std::vector<Scalar> known)
{
    XSeries r(order);
    if (static_cast<int>(known.size()) > order + 1) known.resize(static_cast<size_t>(order + 1));
    r.c_ = std::move(known);
    return r;
}

XSeries XSeries::constant(int order, const Scalar& c)
{
    XSeries r(order);
    r.c_[0] = c;
    return r;
}

XSeries XSeries::monomial(int order, int k, const Scalar& c)
{
    XSeries r(order);
    if (k < 0) throw Error("negative monomial degree");
    if (k <= order) r.c_[static_cast<size_t>(k)] = c;
    return r;
}

const Scalar& XSeries::operator[](int k) const
{
    if (k < 0 || k >= precision())
        throw DepthError("x-coefficient " + std::to_string(k) + " beyond precision " + std::to_string(precision()));
    return c_[static_cast<size_t>(k)];
}

bool XSeries::is_zero() const
{
    return std::all_of(c_.begin(), c_.end(), [](const Scalar& s) { return s == 0; });
}

std::optional<int> XSeries::first_nonzero() const
{
    for (size_t k = 0; k < c_.size(); ++k)
        if (c_[k] != 0) return static_cast<int>(k);
    return std::nullopt;
}

XSeries XSeries::truncated(int precision) const
{
    XSeries r = *this;
    if (precision < r.precision()) r.c_.resize(static_cast<size_t>(std::max(precision, 0)));
    return r;
}

XSeries& XSeries::operator+=(const XSeries& o)
{
    require_same_order(*this, o);
    if (o.c_.size() < c_.size()) c_.resize(o.c_.size());
    for (size_t k = 0; k < c_.size(); ++k) c_[k] += o.c_[k];
    return *this;
}

XSeries& XSeries::operator-=(const XSeries& o)
{
    require_same_order(*this, o);
    if (o.c_.size() < c_.size()) c_.resize(o.c_.size());
    for (size_t k = 0; k < c_.size(); ++k) c_[k] -= o.c_[k];
    return *this;
}

XSeries operator*(const XSeries& a, const XSeries& b)
{
    require_same_order(a, b);
    // An exact zero annihilates even unknown coefficients.
    if ((a.exact() && a.is_zero()) || (b.exact() && b.is_zero())) return XSeries(a.order_);
    // a = A + O(x^pa) with A of valuation va: the error term starts at min(pa + vb, pb + va)
    const size_t pa = a.c_.size(), pb = b.c_.size();
    const size_t va = static_cast<size_t>(a.first_nonzero().value_or(static_cast<int>(pa)));
    const size_t vb = static_cast<size_t>(b.first_nonzero().value_or(static_cast<int>(pb)));
    const size_t p = std::min({static_cast<size_t>(a.order_) + 1, pa + vb, pb + va});
    XSeries r(a.order_);
    r.c_.assign(p, Scalar(0));
    // Skip zero rows; U and most solver data are sparse in x.
    Scalar t;
    for (size_t i = 0; i < std::min(p, pa); ++i) {
        if (a.c_[i] == 0) continue;
        for (size_t j = 0; i + j < p && j < pb; ++j) {
            if (b.c_[j] == 0) continue;
            mpq_mul(t.get_mpq_t(), a.c_[i].get_mpq_t(), b.c_[j].get_mpq_t());
            r.c_[i + j] += t;
        }
    }
    return r;
}

XSeries& XSeries::operator*=(const XSeries& o)
{
    *this = *this * o;
    return *this;
}

XSeries& XSeries::operator*=(const Scalar& s)
{
    for (auto& c : c_) c *= s;
    return *this;
}

XSeries operator-(XSeries a)
{
    for (auto& c : a.c_) c = -c;
    return a;
}

std::string XSeries::to_string(const std::string& var) const
{
    std::ostringstream os;
    bool first = true;
    for (size_t k = 0; k < c_.size(); ++k) {
        if (c_[k] == 0) continue;
        if (!first) os << " + ";
        first = false;
        os << c_[k].get_str();
        if (k == 1) os << "*" << var;
        if (k > 1) os << "*" << var << "^" << k;
    }
    if (first) os << "0";
    if (!exact()) os << " + O(" << var << "^" << c_.size() << ")";
    return os.str();
}

bool agree(const XSeries& a, const XSeries& b)
{
    require_same_order(a, b);
    const int p = std::min(a.precision(), b.precision());
    for (int k = 0; k < p; ++k)
        if (a[k] != b[k]) return false;
    return true;
}

XSeries dilate(const XSeries& f, const Scalar& c)
{
    std::vector<Scalar> r(f.coefficients());
    Scalar p(1);
    for (size_t k = 1; k < r.size(); ++k) {
        p *= c;
        r[k] *= p;
    }
    return XSeries::partial(f.order(), std::move(r));
}

XSeries q_derive(const XSeries& f, const Scalar& q)
{
    const int p = f.precision();
    std::vector<Scalar> r;
    r.reserve(static_cast<size_t>(std::max(p - 1, 0)));
    Scalar qk(1), bracket(0);
    for (int k = 1; k < p; ++k) {
        bracket += qk; // [k]_q
        qk *= q;
        r.push_back(bracket * f[k]);
    }
    return XSeries::partial(f.order(), std::move(r));
}

XSeries q_antiderive(const XSeries& g, const Scalar& q)
{
    const int p = std::min(g.precision() + 1, g.order() + 1);
    std::vector<Scalar> r(static_cast<size_t>(p));
    Scalar qk(1), bracket(0);
    for (int k = 1; k < p; ++k) {
        bracket += qk;
        qk *= q;
        if (bracket == 0) throw ResonanceError("[" + std::to_string(k) + "]_q vanishes; q is a root of unity");
        r[static_cast<size_t>(k)] = g[k - 1] / bracket;
    }
    return XSeries::partial(g.order(), std::move(r));
}

XSeries series_inverse(const XSeries& f)
{
    if (f.precision() == 0 || f[0] == 0) throw Error("series inverse needs a nonzero constant term");
    const int p = f.precision();
    std::vector<Scalar> r(static_cast<size_t>(p));
    const Scalar inv0 = Scalar(1) / f[0];
    r[0] = inv0;
    for (int m = 1; m < p; ++m) {
        Scalar s(0);
        for (int i = 1; i <= m; ++i)
            if (f[i] != 0) s += f[i] * r[static_cast<size_t>(m - i)];
        r[static_cast<size_t>(m)] = -s * inv0;
    }
    return XSeries::partial(f.order(), std::move(r));
}

XSeries exp_q_series(int order, const Scalar& c, const Scalar& q)
{
    std::vector<Scalar> r(static_cast<size_t>(order + 1));
    r[0] = 1;
    for (int k = 1; k <= order; ++k) {
        Scalar b = q_number(k, q);
        if (b == 0) throw Error("q-factorial vanishes at k = " + std::to_string(k));
        r[static_cast<size_t>(k)] = r[static_cast<size_t>(k - 1)] * c / b;
    }
    return XSeries(order, std::move(r));
}

XSeries exp_series(int order, const std::vector<std::pair<int, Scalar>>& args)
{
    std::vector<Scalar> c(static_cast<size_t>(order + 1));
    for (const auto& [k, v] : args) {
        if (k < 1) throw Error("exp_series argument of degree " + std::to_string(k) + "; degrees must be >= 1");
        if (k <= order) c[static_cast<size_t>(k)] += v;
    }
    // m e_m = sum_k k c_k e_{m-k}
    std::vector<Scalar> e(static_cast<size_t>(order + 1));
    e[0] = 1;
    for (int m = 1; m <= order; ++m) {
        Scalar s(0);
        for (int k = 1; k <= m; ++k)
            if (c[static_cast<size_t>(k)] != 0) s += k * c[static_cast<size_t>(k)] * e[static_cast<size_t>(m - k)];
        e[static_cast<size_t>(m)] = s / m;
    }
    return XSeries(order, std::move(e));
}

Scalar q_shift_coefficient(int k, const Scalar& q)
{
    if (k < 1) throw Error("shift coefficient needs k >= 1");
    // (1-q)^k / (k (1-q^k)) = (1-q)^{k-1} / (k [k]_q)
    return power(Scalar(1) - q, k - 1) / (k * q_number(k, q));
}

} // namespace qakns
