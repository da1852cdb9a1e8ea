#pragma once

#include "qakns/errors.hpp"
#include "qakns/scalar.hpp"
#include "qakns/xseries.hpp"

#include <string>
#include <utility>
#include <vector>

namespace qakns {

// Coefficient-ring hooks used by the generic containers below.
inline bool is_exact_zero(const Scalar& s) { return s == 0; }
inline bool agree(const Scalar& a, const Scalar& b) { return a == b; }
inline Scalar zero_like(const Scalar&) { return Scalar(0); }
inline Scalar unit_like(const Scalar&) { return Scalar(1); }

inline bool is_exact_zero(const XSeries& f) { return f.exact() && f.is_zero(); }
inline XSeries zero_like(const XSeries& f) { return XSeries(f.order()); }
inline XSeries unit_like(const XSeries& f) { return XSeries::constant(f.order(), 1); }

template <class C>
class Mat {
public:
    Mat() = default;
    Mat(int n, const C& fill) : n_(n), e_(static_cast<size_t>(n * n), fill) {}

    static Mat identity(int n, const C& proto)
    {
        Mat m(n, zero_like(proto));
        for (int i = 0; i < n; ++i) m(i, i) = unit_like(proto);
        return m;
    }

    int dim() const { return n_; }
    C& operator()(int i, int j) { return e_[static_cast<size_t>(i * n_ + j)]; }
    const C& operator()(int i, int j) const { return e_[static_cast<size_t>(i * n_ + j)]; }

    Mat& operator+=(const Mat& o)
    {
        check(o);
        for (size_t k = 0; k < e_.size(); ++k) e_[k] += o.e_[k];
        return *this;
    }
    Mat& operator-=(const Mat& o)
    {
        check(o);
        for (size_t k = 0; k < e_.size(); ++k) e_[k] -= o.e_[k];
        return *this;
    }
    Mat& operator*=(const Scalar& s)
    {
        for (auto& e : e_) e *= s;
        return *this;
    }

    friend Mat operator+(Mat a, const Mat& b) { return a += b; }
    friend Mat operator-(Mat a, const Mat& b) { return a -= b; }
    friend Mat operator-(Mat a)
    {
        for (auto& e : a.e_) e = -e;
        return a;
    }
    friend Mat operator*(const Scalar& s, Mat a) { return a *= s; }

    friend Mat operator*(const Mat& a, const Mat& b)
    {
        a.check(b);
        const int n = a.n_;
        Mat r(n, zero_like(a.e_.front()));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                C acc = zero_like(a(i, 0));
                bool any = false;
                for (int k = 0; k < n; ++k) {
                    if (is_exact_zero(a(i, k)) || is_exact_zero(b(k, j))) continue;
                    if (!any) {
                        acc = a(i, k) * b(k, j);
                        any = true;
                    } else {
                        acc += a(i, k) * b(k, j);
                    }
                }
                r(i, j) = std::move(acc);
            }
        return r;
    }

    friend bool operator==(const Mat& a, const Mat& b) { return a.n_ == b.n_ && a.e_ == b.e_; }

    Mat transpose() const
    {
        Mat r = *this;
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) r(i, j) = (*this)(j, i);
        return r;
    }

    template <class F>
    auto map(F&& f) const
    {
        using R = decltype(f(e_.front()));
        Mat<R> r;
        r.reset(n_);
        for (size_t k = 0; k < e_.size(); ++k) r.raw()[k] = f(e_[k]);
        return r;
    }

    bool all_exact_zero() const
    {
        for (const auto& e : e_)
            if (!is_exact_zero(e)) return false;
        return true;
    }

    void reset(int n)
    {
        n_ = n;
        e_.assign(static_cast<size_t>(n * n), C{});
    }
    std::vector<C>& raw() { return e_; }
    const std::vector<C>& raw() const { return e_; }

private:
    void check(const Mat& o) const
    {
        if (o.n_ != n_)
            throw TruncationMismatch("matrix dimensions differ: " + std::to_string(n_) + " vs " +
                                     std::to_string(o.n_));
    }

    int n_ = 0;
    std::vector<C> e_;
};

using SqMatrix = Mat<Scalar>;
using MatX = Mat<XSeries>;

inline SqMatrix diagonal(const std::vector<Scalar>& d)
{
    SqMatrix m(static_cast<int>(d.size()), Scalar(0));
    for (size_t i = 0; i < d.size(); ++i) m(static_cast<int>(i), static_cast<int>(i)) = d[i];
    return m;
}

// E_alpha, zero-based channel.
inline SqMatrix unit_diagonal(int n, int alpha)
{
    SqMatrix m(n, Scalar(0));
    m(alpha, alpha) = 1;
    return m;
}

inline MatX lift(const SqMatrix& m, int order)
{
    return m.map([order](const Scalar& s) { return XSeries::constant(order, s); });
}

inline MatX dilate(const MatX& m, const Scalar& c)
{
    return m.map([&c](const XSeries& f) { return dilate(f, c); });
}

inline MatX q_derive(const MatX& m, const Scalar& q)
{
    return m.map([&q](const XSeries& f) { return q_derive(f, q); });
}

} // namespace qakns
