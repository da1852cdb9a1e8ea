#pragma once

#include "qakns/errors.hpp"
#include "qakns/matrix.hpp"
#include "qakns/scalar.hpp"
#include "qakns/xseries.hpp"

#include <string>

namespace qakns {

// The dilation D, the derivation delta and a right inverse of delta.
// base q != 1 gives D f(x) = f(qx), delta = D_q; base 1 gives the
// classical structure D = id, delta = d/dx. The solvers only see this.
class DifferenceStructure {
public:
    DifferenceStructure() : q_(1) {}
    explicit DifferenceStructure(Scalar base) : q_(std::move(base))
    {
        if (q_ == 0) throw ConfigError("q must be nonzero");
    }
    static DifferenceStructure classical() { return DifferenceStructure(Scalar(1)); }

    const Scalar& q() const { return q_; }
    bool is_classical() const { return q_ == 1; }
    // Structure of the adjoint basis, D_{1/q}.
    DifferenceStructure dual() const { return DifferenceStructure(Scalar(1) / q_); }

    XSeries dilation(const XSeries& f) const { return is_classical() ? f : dilate(f, q_); }
    XSeries inverse_dilation(const XSeries& f) const { return is_classical() ? f : dilate(f, Scalar(1) / q_); }
    XSeries delta(const XSeries& f) const { return q_derive(f, q_); }
    XSeries delta_inverse(const XSeries& g) const { return q_antiderive(g, q_); }

    // Action of (a_j D - a_i) on x^m.
    Scalar eigenvalue(const Scalar& aj, const Scalar& ai, int m) const { return aj * power(q_, m) - ai; }

    std::string name() const { return is_classical() ? "classical" : "q=" + q_.get_str(); }

    friend bool operator==(const DifferenceStructure& a, const DifferenceStructure& b) { return a.q_ == b.q_; }

private:
    Scalar q_;
};

} // namespace qakns
