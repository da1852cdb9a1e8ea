#include "qakns/timepoly.hpp"

#include <algorithm>
#include <sstream>

namespace qakns {

int TimeSpace::index(FlowIndex f) const
{
    if (f.k < 1 || f.k > kmax || f.alpha < 0 || f.alpha >= n)
        throw Error("time t_" + std::to_string(f.k) + std::to_string(f.alpha + 1) + " outside the time space");
    return (f.k - 1) * n + f.alpha;
}

TimePoly::TimePoly(TimeSpace space, int nx, int weight) : space_(space), nx_(nx), weight_(weight) {}

TimePoly TimePoly::constant(TimeSpace space, const XSeries& c, int weight)
{
    TimePoly p(space, c.order(), weight);
    p.add(p.unit_monomial(), c);
    return p;
}

TimePoly TimePoly::variable(TimeSpace space, int nx, FlowIndex f, int weight)
{
    TimePoly p(space, nx, weight);
    Monomial m = p.unit_monomial();
    m[static_cast<size_t>(space.index(f))] = 1;
    p.add(m, XSeries::constant(nx, 1));
    return p;
}

int TimePoly::monomial_weight(const Monomial& m) const
{
    int w = 0;
    for (size_t i = 0; i < m.size(); ++i) w += m[i] * space_.weight(static_cast<int>(i));
    return w;
}

int TimePoly::precision(const Monomial& m) const
{
    if (!bounded()) return nx_ + 1;
    return std::clamp(weight_ - monomial_weight(m) + 1, 0, nx_ + 1);
}

XSeries TimePoly::coeff(const Monomial& m) const
{
    auto it = t_.find(m);
    if (it != t_.end()) return it->second;
    return XSeries::partial(nx_, std::vector<Scalar>(static_cast<size_t>(precision(m))));
}

void TimePoly::add(const Monomial& m, const XSeries& c)
{
    const int p = precision(m);
    if (p <= 0) return;
    auto it = t_.find(m);
    if (it == t_.end()) {
        XSeries v = c.truncated(p);
        // a zero known to less than the implied precision must stay visible
        if (!v.is_zero() || v.precision() < p) t_.emplace(m, std::move(v));
        return;
    }
    it->second += c.truncated(p);
    if (it->second.is_zero() && it->second.precision() >= p) t_.erase(it);
}

bool TimePoly::is_zero() const
{
    return std::all_of(t_.begin(), t_.end(), [](const auto& kv) { return kv.second.is_zero(); });
}

TimePoly TimePoly::truncated(int weight) const
{
    if (weight >= weight_) return *this;
    TimePoly r(space_, nx_, weight);
    for (const auto& [m, c] : t_) r.add(m, c);
    return r;
}

void TimePoly::check(const TimePoly& o) const
{
    if (!(o.space_ == space_) || o.nx_ != nx_) throw TruncationMismatch("time polynomials live in different spaces");
}

TimePoly& TimePoly::operator+=(const TimePoly& o)
{
    check(o);
    if (o.weight_ < weight_) *this = truncated(o.weight_);
    for (const auto& [m, c] : o.t_) add(m, c);
    return *this;
}

TimePoly& TimePoly::operator-=(const TimePoly& o)
{
    check(o);
    if (o.weight_ < weight_) *this = truncated(o.weight_);
    for (const auto& [m, c] : o.t_) add(m, -c);
    return *this;
}

TimePoly& TimePoly::operator*=(const Scalar& s)
{
    if (s == 0) {
        t_.clear();
        return *this;
    }
    for (auto& [m, c] : t_) c *= s;
    return *this;
}

TimePoly operator*(const TimePoly& a, const TimePoly& b)
{
    a.check(b);
    if (is_exact_zero(a) || is_exact_zero(b)) return TimePoly(a.space_, a.nx_);
    TimePoly r(a.space_, a.nx_, std::min(a.weight_, b.weight_));
    Monomial m(a.unit_monomial());
    for (const auto& [ma, ca] : a.t_) {
        const int wa = a.monomial_weight(ma);
        if (wa > r.weight_) continue;
        for (const auto& [mb, cb] : b.t_) {
            const int w = wa + b.monomial_weight(mb);
            if (w > r.weight_) continue;
            for (size_t i = 0; i < m.size(); ++i) m[i] = static_cast<std::uint8_t>(ma[i] + mb[i]);
            const int p = r.precision(m);
            r.add(m, ca.truncated(p) * cb.truncated(p));
        }
    }
    return r;
}

std::string TimePoly::monomial_string(const Monomial& m) const
{
    std::ostringstream os;
    bool first = true;
    for (size_t i = 0; i < m.size(); ++i) {
        if (!m[i]) continue;
        FlowIndex f = space_.variable(static_cast<int>(i));
        if (!first) os << "*";
        first = false;
        os << "t" << f.k << (f.alpha + 1);
        if (m[i] > 1) os << "^" << int(m[i]);
    }
    return first ? "1" : os.str();
}

std::string TimePoly::to_string() const
{
    if (t_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [m, c] : t_) {
        if (!first) os << " + ";
        first = false;
        os << "(" << c.to_string() << ")*" << monomial_string(m);
    }
    return os.str();
}

bool agree(const TimePoly& a, const TimePoly& b)
{
    const int w = std::min(a.weight(), b.weight());
    auto same = [&](const Monomial& m) {
        if (a.monomial_weight(m) > w) return true;
        const int p = std::min(a.precision(m), b.precision(m));
        return agree(a.coeff(m).truncated(p), b.coeff(m).truncated(p));
    };
    for (const auto& [m, c] : a.terms())
        if (!same(m)) return false;
    for (const auto& [m, c] : b.terms())
        if (!same(m)) return false;
    return true;
}

TimePoly derive_t(const TimePoly& p, FlowIndex f)
{
    const int v = p.space().index(f);
    TimePoly r(p.space(), p.nx(), p.bounded() ? p.weight() - f.k : p.weight());
    for (const auto& [m, c] : p.terms()) {
        if (!m[static_cast<size_t>(v)]) continue;
        Monomial d = m;
        const int e = d[static_cast<size_t>(v)]--;
        r.add(d, Scalar(e) * c);
    }
    return r;
}

TimePoly dilate(const TimePoly& p, const Scalar& c)
{
    return p.map_coeffs([&c](const XSeries& f) { return dilate(f, c); }, p.weight());
}

TimePoly q_derive(const TimePoly& p, const Scalar& q)
{
    return p.map_coeffs([&q](const XSeries& f) { return q_derive(f, q); }, p.bounded() ? p.weight() - 1 : p.weight());
}

TimePoly series_inverse(const TimePoly& p)
{
    const Monomial one = p.unit_monomial();
    const XSeries c = p.coeff(one);
    if (c.precision() == 0 || c[0] == 0) throw Error("time polynomial has no invertible constant term");
    const Scalar c0 = c[0];
    // p = c0 (1 + u)
    TimePoly u = p;
    u.add(one, XSeries::constant(p.nx(), -c0));
    u *= 1 / c0;
    TimePoly unit = TimePoly::constant(p.space(), XSeries::constant(p.nx(), 1), p.weight());
    TimePoly sum = unit, term = unit;
    const int limit = p.bounded() ? p.weight() + 1 : p.nx() + 1;
    for (int j = 1;; ++j) {
        term = -(term * u);
        if (term.is_zero()) break;
        if (j > limit) throw Error("inverse of an unbounded time polynomial does not terminate");
        sum += term;
    }
    sum *= 1 / c0;
    return sum;
}

TimePoly shift_times(const TimePoly& p, const std::vector<XSeries>& shift)
{
    const TimeSpace& sp = p.space();
    if (static_cast<int>(shift.size()) != sp.size()) throw Error("shift needs one entry per time variable");
    TimePoly r(sp, p.nx(), p.weight());
    // (t_v + y_v)^e, memoized per (v, e)
    std::map<std::pair<int, int>, TimePoly> cache;
    auto factor = [&](int v, int e) -> const TimePoly& {
        auto key = std::make_pair(v, e);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
        TimePoly f(sp, p.nx(), p.weight());
        XSeries ypow = XSeries::constant(p.nx(), 1);
        Scalar binom(1);
        for (int j = 0; j <= e; ++j) {
            Monomial m = f.unit_monomial();
            m[static_cast<size_t>(v)] = static_cast<std::uint8_t>(e - j);
            f.add(m, binom * ypow);
            ypow = ypow * shift[static_cast<size_t>(v)];
            binom = binom * (e - j) / (j + 1);
        }
        return cache.emplace(key, std::move(f)).first->second;
    };
    for (const auto& [m, c] : p.terms()) {
        TimePoly acc = TimePoly::constant(sp, c, p.weight());
        for (size_t v = 0; v < m.size(); ++v)
            if (m[v]) acc = acc * factor(static_cast<int>(v), m[v]);
        r += acc;
    }
    return r;
}

TimePoly q_shift_times(const TimePoly& p, const std::vector<Scalar>& a, const Scalar& q)
{
    const TimeSpace& sp = p.space();
    if (static_cast<int>(a.size()) != sp.n) throw Error("q-shift needs one eigenvalue per channel");
    std::vector<XSeries> shift;
    for (int v = 0; v < sp.size(); ++v) {
        FlowIndex f = sp.variable(v);
        if (f.k > p.nx()) throw DepthError("q-shift of t_" + std::to_string(f.k) + " exceeds N_x");
        shift.push_back(XSeries::monomial(p.nx(), f.k,
                                          q_shift_coefficient(f.k, q) * power(a[static_cast<size_t>(f.alpha)], f.k)));
    }
    return shift_times(p, shift);
}

std::map<int, TimePoly> miwa_shift(const TimePoly& p, int beta, int depth)
{
    const TimeSpace& sp = p.space();
    std::map<int, TimePoly> out;
    auto slot = [&](int d) -> TimePoly& {
        auto it = out.find(-d);
        if (it != out.end()) return it->second;
        return out.emplace(-d, TimePoly(sp, p.nx(), p.bounded() ? p.weight() - d : p.weight())).first->second;
    };
    std::vector<int> vars;
    for (int k = 1; k <= sp.kmax; ++k) vars.push_back(sp.index(FlowIndex{k, beta}));
    for (const auto& [m, c] : p.terms()) {
        // enumerate j_k in [0, e_k] for the channel-beta variables
        std::vector<int> j(vars.size(), 0);
        while (true) {
            int d = 0;
            Scalar coef(1);
            Monomial mm = m;
            for (size_t i = 0; i < vars.size(); ++i) {
                const int k = static_cast<int>(i) + 1;
                const int e = m[static_cast<size_t>(vars[i])];
                d += k * j[i];
                // binom(e, j) (-1/k)^j
                Scalar b(1);
                for (int r = 0; r < j[i]; ++r) b = b * (e - r) / (r + 1);
                coef *= b * power(Scalar(-1, k), j[i]);
                mm[static_cast<size_t>(vars[i])] = static_cast<std::uint8_t>(e - j[i]);
            }
            if (d <= depth) slot(d).add(mm, coef * c);
            size_t i = 0;
            for (; i < vars.size(); ++i) {
                if (j[i] < m[static_cast<size_t>(vars[i])]) {
                    ++j[i];
                    break;
                }
                j[i] = 0;
            }
            if (i == vars.size()) break;
        }
    }
    return out;
}

XSeries at_zero_times(const TimePoly& p) { return p.coeff(p.unit_monomial()); }

void inspect(const TimePoly& p, int z, int i, int j, Residual& r)
{
    r.min_z = std::min(r.min_z, z);
    r.max_z = std::max(r.max_z, z);
    // absent monomials are zeros known to the implied precision
    ++r.checked;
    if (p.bounded()) {
        r.max_t = std::max(r.max_t, p.weight());
        r.max_x = std::max(r.max_x, std::min(p.nx(), p.weight()));
    } else {
        r.max_x = std::max(r.max_x, p.nx());
    }
    for (const auto& [m, c] : p.terms()) {
        r.max_t = std::max(r.max_t, p.monomial_weight(m));
        for (int k = 0; k < c.precision(); ++k) {
            ++r.checked;
            r.max_x = std::max(r.max_x, k);
            if (c[k] != 0 && r.zero) {
                r.zero = false;
                r.first = Term{z, i, j, k, p.monomial_string(m), c[k]};
            }
        }
    }
}

} // namespace qakns
