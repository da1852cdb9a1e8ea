#pragma once

#include "qakns/hierarchy.hpp"
#include "qakns/residual.hpp"
#include "qakns/xseries.hpp"
#include "qakns/zseries.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace qakns {

inline constexpr int kUnboundedWeight = 1 << 20;

// Variables t_{k alpha}, k = 1..kmax, alpha = 0..n-1.
struct TimeSpace {
    int n = 1;
    int kmax = 1;

    int size() const { return n * kmax; }
    int index(FlowIndex f) const;
    FlowIndex variable(int i) const { return FlowIndex{i / n + 1, i % n}; }
    int weight(int i) const { return i / n + 1; }
    friend bool operator==(const TimeSpace&, const TimeSpace&) = default;
};

using Monomial = std::vector<std::uint8_t>;

// Polynomial in the times with x-series coefficients, graded by
// wt(t_{k alpha}) = k and wt(x) = 1. Everything of total weight <= weight()
// is determined: the coefficient of a monomial mu carries x-degrees up to
// weight() - wt(mu). t-derivatives lower the weight by k, D_q by one.
class TimePoly {
public:
    TimePoly() = default;
    TimePoly(TimeSpace space, int nx, int weight = kUnboundedWeight);

    static TimePoly constant(TimeSpace space, const XSeries& c, int weight = kUnboundedWeight);
    static TimePoly variable(TimeSpace space, int nx, FlowIndex f, int weight = kUnboundedWeight);

    const TimeSpace& space() const { return space_; }
    int nx() const { return nx_; }
    int weight() const { return weight_; }
    bool bounded() const { return weight_ < kUnboundedWeight; }
    const std::map<Monomial, XSeries>& terms() const { return t_; }

    int monomial_weight(const Monomial& m) const;
    // x-precision implied for monomial m
    int precision(const Monomial& m) const;
    Monomial unit_monomial() const { return Monomial(static_cast<size_t>(space_.size()), 0); }

    XSeries coeff(const Monomial& m) const;
    void add(const Monomial& m, const XSeries& c);

    TimePoly truncated(int weight) const;
    // every determined coefficient vanishes
    bool is_zero() const;

    TimePoly& operator+=(const TimePoly& o);
    TimePoly& operator-=(const TimePoly& o);
    TimePoly& operator*=(const Scalar& s);
    TimePoly& operator*=(const TimePoly& o)
    {
        *this = *this * o;
        return *this;
    }
    friend TimePoly operator+(TimePoly a, const TimePoly& b) { return a += b; }
    friend TimePoly operator-(TimePoly a, const TimePoly& b) { return a -= b; }
    friend TimePoly operator*(const Scalar& s, TimePoly a) { return a *= s; }
    friend TimePoly operator-(TimePoly a) { return a *= Scalar(-1); }
    friend TimePoly operator*(const TimePoly& a, const TimePoly& b);
    friend bool operator==(const TimePoly& a, const TimePoly& b)
    {
        return a.space_ == b.space_ && a.nx_ == b.nx_ && a.weight_ == b.weight_ && a.t_ == b.t_;
    }

    template <class F>
    TimePoly map_coeffs(F&& f, int weight) const
    {
        TimePoly r(space_, nx_, weight);
        for (const auto& [m, c] : t_) r.add(m, f(c));
        return r;
    }

    std::string monomial_string(const Monomial& m) const;
    std::string to_string() const;

private:
    void check(const TimePoly& o) const;

    TimeSpace space_;
    int nx_ = 0;
    int weight_ = kUnboundedWeight;
    std::map<Monomial, XSeries> t_;
};

inline bool is_exact_zero(const TimePoly& p) { return p.terms().empty() && !p.bounded(); }
inline TimePoly zero_like(const TimePoly& p) { return TimePoly(p.space(), p.nx()); }
inline TimePoly unit_like(const TimePoly& p) { return TimePoly::constant(p.space(), XSeries::constant(p.nx(), 1)); }

// Equal on everything both determine.
bool agree(const TimePoly& a, const TimePoly& b);

TimePoly derive_t(const TimePoly& p, FlowIndex f);
TimePoly dilate(const TimePoly& p, const Scalar& c);
TimePoly q_derive(const TimePoly& p, const Scalar& q);
// 1/p by a geometric series; p needs an invertible constant term.
TimePoly series_inverse(const TimePoly& p);

// t_v -> t_v + shift[v] for every variable v (shift entries are x-series).
TimePoly shift_times(const TimePoly& p, const std::vector<XSeries>& shift);
// t_{k alpha} -> t_{k alpha} + (1-q)^k/(k(1-q^k)) (a_alpha x)^k
TimePoly q_shift_times(const TimePoly& p, const std::vector<Scalar>& a, const Scalar& q);
// t_{k beta} -> t_{k beta} - z^{-k}/k; keys are z-degrees <= 0; the z^{-j}
// coefficient has weight weight() - j.
std::map<int, TimePoly> miwa_shift(const TimePoly& p, int beta, int depth);

// Evaluate at t = 0.
XSeries at_zero_times(const TimePoly& p);

void inspect(const TimePoly& p, int z, int i, int j, Residual& r);

using TZSeries = ZLaurent<TimePoly>;

} // namespace qakns
