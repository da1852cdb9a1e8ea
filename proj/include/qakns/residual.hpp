#pragma once

#include "qakns/zseries.hpp"

#include <climits>
#include <optional>
#include <string>

namespace qakns {

// First nonzero coefficient met while scanning a residual.
struct Term {
    int z_degree = 0;
    int row = 0, col = 0; // zero-based
    int x_degree = 0;
    std::string monomial; // t-monomial, empty for plain x-series
    Scalar value;
};

// Outcome of scanning an identity's residual over its determined range.
struct Residual {
    bool zero = true;
    long checked = 0;       // coefficients examined
    int min_z = INT_MAX;    // deepest z-degree examined
    int max_z = INT_MIN;
    int max_x = -1;         // highest x-degree examined
    int max_t = -1;         // highest time weight examined
    std::optional<Term> first;

    void merge(const Residual& o)
    {
        if (!o.zero && zero) first = o.first;
        zero = zero && o.zero;
        checked += o.checked;
        min_z = std::min(min_z, o.min_z);
        max_z = std::max(max_z, o.max_z);
        max_x = std::max(max_x, o.max_x);
        max_t = std::max(max_t, o.max_t);
    }
};

inline void inspect(const XSeries& f, int z, int i, int j, Residual& r)
{
    for (int k = 0; k < f.precision(); ++k) {
        ++r.checked;
        r.max_x = std::max(r.max_x, k);
        if (f[k] != 0 && r.zero) {
            r.zero = false;
            r.first = Term{z, i, j, k, "", f[k]};
        }
    }
    r.min_z = std::min(r.min_z, z);
    r.max_z = std::max(r.max_z, z);
}

template <class C>
void inspect(const Mat<C>& m, int z, Residual& r)
{
    for (int i = 0; i < m.dim(); ++i)
        for (int j = 0; j < m.dim(); ++j) inspect(m(i, j), z, i, j, r);
}

// Scan degrees from..to (inclusive); throws DepthError if any is undetermined.
template <class C>
Residual check_zero(const ZLaurent<C>& s, int from, int to)
{
    if (from < s.low())
        throw DepthError("identity requested down to z^" + std::to_string(from) + " but only determined to z^" +
                         std::to_string(s.low()));
    Residual r;
    // Degrees above the window still belong to the identity.
    const int hi = s.terms().empty() ? to : std::max(to, s.terms().rbegin()->first);
    for (int d = from; d <= hi; ++d) inspect(s.coeff(d), d, r);
    return r;
}

// Scan every determined degree.
template <class C>
Residual check_zero(const ZLaurent<C>& s)
{
    Residual r;
    int from = std::max(s.low(), s.floor());
    if (s.exact()) from = s.terms().empty() ? 0 : std::min(0, s.terms().begin()->first);
    const int to = s.terms().empty() ? 0 : std::max(0, s.terms().rbegin()->first);
    for (int d = from; d <= to; ++d) inspect(s.coeff(d), d, r);
    return r;
}

} // namespace qakns
