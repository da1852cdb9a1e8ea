#pragma once

#include "qakns/structure.hpp"
#include "qakns/zseries.hpp"

#include <map>
#include <string>

namespace qakns {

// Finite-band pseudo-difference operator sum_i p_i delta^i with MZSeries
// coefficients written to the left. The structure fixes the basis:
// base q is the D_q basis, base 1/q the D_{1/q} basis of adjoints.
// Powers below -nd are truncated; powers >= low() are determined.
class QDOp {
public:
    QDOp() = default;
    QDOp(DifferenceStructure s, int n, int nx, int nz, int nd);

    static QDOp multiplication(const MZSeries& f, DifferenceStructure s, int nd);
    // delta^i with identity coefficient.
    static QDOp power(int i, DifferenceStructure s, int n, int nx, int nz, int nd);

    const DifferenceStructure& structure() const { return s_; }
    int dim() const { return n_; }
    int nx() const { return nx_; }
    int nz() const { return nz_; }
    int nd() const { return nd_; }
    int low() const { return low_; }
    bool exact() const { return low_ == kExactLow; }
    const std::map<int, MZSeries>& terms() const { return c_; }
    int top() const;

    MZSeries zero_coeff() const;
    MZSeries coeff(int i) const;
    void set(int i, MZSeries c);
    void add(int i, const MZSeries& c);
    QDOp& restrict_low(int i);

    QDOp& operator+=(const QDOp& o);
    QDOp& operator-=(const QDOp& o);
    QDOp& operator*=(const Scalar& s);
    friend QDOp operator+(QDOp a, const QDOp& b) { return a += b; }
    friend QDOp operator-(QDOp a, const QDOp& b) { return a -= b; }
    friend QDOp operator*(const Scalar& s, QDOp a) { return a *= s; }
    friend QDOp operator-(QDOp a) { return a *= Scalar(-1); }

    friend bool operator==(const QDOp& a, const QDOp& b)
    {
        return a.s_ == b.s_ && a.n_ == b.n_ && a.nd_ == b.nd_ && a.low_ == b.low_ && a.c_ == b.c_;
    }

    template <class F>
    QDOp map_coeffs(F&& f) const
    {
        QDOp r(s_, n_, nx_, nz_, nd_);
        r.low_ = low_;
        for (const auto& [i, c] : c_) r.set(i, f(c));
        return r;
    }

    std::string to_string() const;

private:
    void check(const QDOp& o) const;
    void mark_dropped()
    {
        if (low_ < -nd_) low_ = -nd_;
    }

    DifferenceStructure s_;
    int n_ = 0, nx_ = 0, nz_ = 0, nd_ = 0;
    int low_ = kExactLow;
    std::map<int, MZSeries> c_;
};

// Composition by the Leibniz rule delta o f = (Df) delta + (delta f).
QDOp op_compose(const QDOp& p, const QDOp& r);
// delta^i o r for any integer i.
QDOp op_power_left(int i, const QDOp& r);
// f o r and r o f for a multiplication operator f.
QDOp op_mul_left(const MZSeries& f, const QDOp& r);
QDOp op_mul_right(const QDOp& r, const MZSeries& f);

// sum p_i (delta^i f); negative powers are rejected.
MZSeries op_apply(const QDOp& p, const MZSeries& f);

// (sum g_j D_q^j)* = sum (-1/q)^j D_{1/q}^j o g_j^T, in the dual basis.
QDOp op_adjoint(const QDOp& p);

// coefficient j -> q^j g_j(x/q)
QDOp shift_x_over_q(const QDOp& p);
// coefficient j -> (-1)^j g_j
QDOp reflect(const QDOp& p);
// Normal-ordered product: coefficients multiply, powers add, no Leibniz terms.
QDOp symbol_compose(const QDOp& p, const QDOp& r);

// Coefficient of delta^{-1}.
MZSeries res_dq(const QDOp& p);

// (D A) o B - B o A with D acting on the coefficients of A.
QDOp q_commutator(const QDOp& a, const QDOp& b);
QDOp q_commutator(const MZSeries& a, const QDOp& b);

struct PairingResult {
    // res_z of the symbol product sum_{k,l} (-q)^l p_k A^{k+l} g_l(x/q) z^{k+l}
    MatX lhs;
    // res of P A^{-1} (reflect o shift_x_over_q)(Q) under symbol_compose
    MatX rhs;
    // res of P o A^{-1} o Q under op_compose, kept for comparison
    MatX rhs_leibniz;
};

// P and Q must have z-free coefficients; A invertible diagonal.
PairingResult residue_pairing(const QDOp& p, const QDOp& q_op, const SqMatrix& a);

// Symbol sum_k p_k A^k z^k of P acting on exp_q(zAx).
MZSeries op_symbol(const QDOp& p, const SqMatrix& a);

} // namespace qakns
