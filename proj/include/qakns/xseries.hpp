#pragma once

#include "qakns/scalar.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace qakns {

// Truncated power series in x with a fixed cap `order` (N_x) and a
// precision: coefficients 0..precision()-1 are determined, the rest are
// unknown. An exact polynomial of degree <= order has full precision
// order+1. Derivatives lose one coefficient, antiderivatives gain one.
class XSeries {
public:
    XSeries() : XSeries(0) {}
    explicit XSeries(int order);
    // Exact polynomial; trailing entries past `order` must be zero.
    XSeries(int order, std::vector<Scalar> coeffs);

    // Only the given coefficients are known.
    static XSeries partial(int order, std::vector<Scalar> known);
    static XSeries constant(int order, const Scalar& c);
    static XSeries monomial(int order, int k, const Scalar& c);

    int order() const { return order_; }
    int precision() const { return static_cast<int>(c_.size()); }
    bool exact() const { return precision() == order_ + 1; }

    // Throws DepthError for k >= precision().
    const Scalar& operator[](int k) const;
    const std::vector<Scalar>& coefficients() const { return c_; }

    // Every known coefficient vanishes.
    bool is_zero() const;
    std::optional<int> first_nonzero() const;
    XSeries truncated(int precision) const;
    XSeries with_precision_at_most(int precision) const { return truncated(precision); }

    XSeries& operator+=(const XSeries& o);
    XSeries& operator-=(const XSeries& o);
    XSeries& operator*=(const XSeries& o);
    XSeries& operator*=(const Scalar& s);

    friend XSeries operator+(XSeries a, const XSeries& b) { return a += b; }
    friend XSeries operator-(XSeries a, const XSeries& b) { return a -= b; }
    friend XSeries operator*(const XSeries& a, const XSeries& b);
    friend XSeries operator*(const Scalar& s, XSeries a) { return a *= s; }
    friend XSeries operator*(XSeries a, const Scalar& s) { return a *= s; }
    friend XSeries operator-(XSeries a);

    friend bool operator==(const XSeries& a, const XSeries& b)
    {
        return a.order_ == b.order_ && a.c_ == b.c_;
    }

    std::string to_string(const std::string& var = "x") const;

private:
    int order_;
    std::vector<Scalar> c_;
};

// Equal on the coefficients both operands know.
bool agree(const XSeries& a, const XSeries& b);

XSeries dilate(const XSeries& f, const Scalar& c);
// D_q; at q = 1 this is d/dx.
XSeries q_derive(const XSeries& f, const Scalar& q);
// Right inverse of D_q with zero constant term.
XSeries q_antiderive(const XSeries& g, const Scalar& q);
// 1/f; requires a nonzero constant term.
XSeries series_inverse(const XSeries& f);

// exp_q(c x) = sum c^k x^k / [k]_q!, identical to c^k (1-q)^k/(q;q)_k.
XSeries exp_q_series(int order, const Scalar& c, const Scalar& q);
// exp(sum c_k x^k), all degrees k >= 1.
XSeries exp_series(int order, const std::vector<std::pair<int, Scalar>>& args);

// (1-q)^k / (k (1-q^k)); at q = 1 this is 1 for k = 1 and 0 beyond.
Scalar q_shift_coefficient(int k, const Scalar& q);

} // namespace qakns
