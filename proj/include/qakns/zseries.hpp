#pragma once

#include "qakns/errors.hpp"
#include "qakns/matrix.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <string>
#include <utility>

namespace qakns {

// Marks a z-series whose every coefficient is determined.
inline constexpr int kExactLow = std::numeric_limits<int>::min() / 4;

// Matrix-valued Laurent series in z, truncated below at degree -nz.
// Coefficients of degree >= low() are determined; below that they are
// unknown (either dropped by the truncation or never computed).
template <class C>
class ZLaurent {
public:
    ZLaurent() = default;
    ZLaurent(int n, int nz, C proto) : n_(n), nz_(nz), proto_(zero_like(proto)) {}

    static ZLaurent constant(const Mat<C>& m, int nz)
    {
        ZLaurent r(m.dim(), nz, m(0, 0));
        r.set(0, m);
        return r;
    }
    static ZLaurent identity(int n, int nz, const C& proto)
    {
        return constant(Mat<C>::identity(n, proto), nz);
    }

    int dim() const { return n_; }
    int nz() const { return nz_; }
    int floor() const { return -nz_; }
    int low() const { return low_; }
    bool exact() const { return low_ == kExactLow; }
    const C& proto() const { return proto_; }
    const std::map<int, Mat<C>>& terms() const { return t_; }

    Mat<C> zero_matrix() const { return Mat<C>(n_, proto_); }

    bool known(int d) const { return d >= low_; }

    Mat<C> coeff(int d) const
    {
        if (d < low_)
            throw DepthError("z-degree " + std::to_string(d) + " is below the determined range (from " +
                             std::to_string(low_) + ")");
        auto it = t_.find(d);
        return it == t_.end() ? zero_matrix() : it->second;
    }

    // Highest degree that may be nonzero; kExactLow for an exact zero.
    int top() const
    {
        if (!t_.empty()) return t_.rbegin()->first;
        return exact() ? kExactLow : low_ - 1;
    }
    bool is_exact_zero_series() const { return t_.empty() && exact(); }

    void set(int d, Mat<C> m)
    {
        if (d < low_) return;
        if (d < floor()) {
            mark_dropped();
            return;
        }
        if (m.all_exact_zero())
            t_.erase(d);
        else
            t_[d] = std::move(m);
    }
    void add(int d, const Mat<C>& m)
    {
        if (d < low_) return;
        if (d < floor()) {
            mark_dropped();
            return;
        }
        auto it = t_.find(d);
        if (it == t_.end())
            set(d, m);
        else
            it->second += m;
    }

    // Forget every coefficient below degree d.
    ZLaurent& restrict_low(int d)
    {
        if (d <= low_) return *this;
        low_ = d;
        t_.erase(t_.begin(), t_.lower_bound(d));
        return *this;
    }

    ZLaurent& operator+=(const ZLaurent& o)
    {
        check(o);
        restrict_low(o.low_);
        for (const auto& [d, m] : o.t_) add(d, m);
        return *this;
    }
    ZLaurent& operator-=(const ZLaurent& o)
    {
        check(o);
        restrict_low(o.low_);
        for (const auto& [d, m] : o.t_) add(d, -m);
        return *this;
    }
    ZLaurent& operator*=(const Scalar& s)
    {
        for (auto& [d, m] : t_) m *= s;
        return *this;
    }

    friend ZLaurent operator+(ZLaurent a, const ZLaurent& b) { return a += b; }
    friend ZLaurent operator-(ZLaurent a, const ZLaurent& b) { return a -= b; }
    friend ZLaurent operator-(ZLaurent a)
    {
        for (auto& [d, m] : a.t_) m = -m;
        return a;
    }
    friend ZLaurent operator*(const Scalar& s, ZLaurent a) { return a *= s; }

    friend ZLaurent operator*(const ZLaurent& a, const ZLaurent& b)
    {
        a.check(b);
        ZLaurent r(a.n_, a.nz_, a.proto_);
        if (a.is_exact_zero_series() || b.is_exact_zero_series()) return r;
        int low = kExactLow;
        if (!a.exact()) low = std::max(low, a.low_ + b.top());
        if (!b.exact()) low = std::max(low, b.low_ + a.top());
        r.low_ = low;
        for (const auto& [da, ma] : a.t_)
            for (const auto& [db, mb] : b.t_) r.add(da + db, ma * mb);
        return r;
    }

    friend ZLaurent operator*(const Mat<C>& m, const ZLaurent& s)
    {
        ZLaurent r = s;
        for (auto& [d, c] : r.t_) c = m * c;
        return r;
    }
    friend ZLaurent operator*(const ZLaurent& s, const Mat<C>& m)
    {
        ZLaurent r = s;
        for (auto& [d, c] : r.t_) c = c * m;
        return r;
    }

    friend bool operator==(const ZLaurent& a, const ZLaurent& b)
    {
        return a.n_ == b.n_ && a.nz_ == b.nz_ && a.low_ == b.low_ && a.t_ == b.t_;
    }

    // Multiply by z^k.
    ZLaurent shift(int k) const
    {
        ZLaurent r(n_, nz_, proto_);
        if (!exact()) r.low_ = low_ + k;
        for (const auto& [d, m] : t_) r.add(d + k, m);
        if (!r.exact() && r.low_ < r.floor()) r.low_ = r.floor();
        return r;
    }

    ZLaurent plus() const
    {
        ZLaurent r = *this;
        r.t_.erase(r.t_.begin(), r.t_.lower_bound(0));
        if (low_ <= 0) r.low_ = kExactLow;
        return r;
    }
    ZLaurent minus() const
    {
        ZLaurent r = *this;
        r.t_.erase(r.t_.lower_bound(0), r.t_.end());
        return r;
    }
    Mat<C> residue() const { return coeff(-1); }

    ZLaurent transpose() const { return map_matrices([](const Mat<C>& m) { return m.transpose(); }); }

    template <class F>
    ZLaurent map_matrices(F&& f) const
    {
        ZLaurent r(n_, nz_, proto_);
        r.low_ = low_;
        for (const auto& [d, m] : t_) r.set(d, f(m));
        return r;
    }
    template <class F>
    ZLaurent map_entries(F&& f) const
    {
        return map_matrices([&f](const Mat<C>& m) { return m.map(f); });
    }

    // Same carriers, zero value, exact.
    ZLaurent zero() const { return ZLaurent(n_, nz_, proto_); }
    ZLaurent with_nz(int nz) const
    {
        ZLaurent r = *this;
        r.nz_ = nz;
        if (!r.exact() && r.low_ < -nz) r.low_ = -nz;
        r.t_.erase(r.t_.begin(), r.t_.lower_bound(-nz));
        return r;
    }

private:
    void mark_dropped()
    {
        if (low_ < floor()) low_ = floor();
    }
    void check(const ZLaurent& o) const
    {
        if (o.n_ != n_ || o.nz_ != nz_)
            throw TruncationMismatch("z-series carriers differ (n " + std::to_string(n_) + "/" +
                                     std::to_string(o.n_) + ", N_z " + std::to_string(nz_) + "/" +
                                     std::to_string(o.nz_) + ")");
    }

    int n_ = 0;
    int nz_ = 0;
    int low_ = kExactLow;
    C proto_{};
    std::map<int, Mat<C>> t_;
};

using MZSeries = ZLaurent<XSeries>;

// s must be I plus strictly negative degrees.
template <class C>
ZLaurent<C> z_invert(const ZLaurent<C>& s)
{
    const int n = s.dim();
    const Mat<C> one = Mat<C>::identity(n, s.proto());
    if (s.top() > 0 || !s.known(0)) throw Error("z_invert needs a series of the form I + O(1/z)");
    const Mat<C> lead = s.coeff(0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (!agree(lead(i, j), one(i, j))) throw Error("z_invert needs a series of the form I + O(1/z)");
    ZLaurent<C> r(n, s.nz(), s.proto());
    std::map<int, Mat<C>> rc;
    // the leading coefficient is I to its own precision
    rc[0] = lead;
    r.set(0, lead);
    const int stop = std::max(s.floor(), s.exact() ? s.floor() : s.low());
    for (int d = 1; -d >= stop; ++d) {
        Mat<C> acc = s.zero_matrix();
        bool any = false;
        for (int i = 1; i <= d; ++i) {
            auto it = s.terms().find(-i);
            if (it == s.terms().end()) continue;
            auto jt = rc.find(-(d - i));
            if (jt == rc.end()) continue;
            if (!any) {
                acc = it->second * jt->second;
                any = true;
            } else {
                acc += it->second * jt->second;
            }
        }
        if (any) {
            rc[-d] = -acc;
            r.set(-d, -acc);
        }
    }
    // An exact finite s = I has an exact inverse; otherwise the tail stops at the floor.
    bool trivial = s.exact() && s.terms().size() == 1;
    if (!trivial) r.restrict_low(stop);
    return r;
}

template <class C>
ZLaurent<C> dilate(const ZLaurent<C>& s, const Scalar& c)
{
    return s.map_entries([&c](const C& f) { return dilate(f, c); });
}

template <class C>
ZLaurent<C> q_derive(const ZLaurent<C>& s, const Scalar& q)
{
    return s.map_entries([&q](const C& f) { return q_derive(f, q); });
}

// Coefficient-wise (non-q) commutator.
template <class C>
ZLaurent<C> commutator(const ZLaurent<C>& a, const ZLaurent<C>& b)
{
    return a * b - b * a;
}

} // namespace qakns
