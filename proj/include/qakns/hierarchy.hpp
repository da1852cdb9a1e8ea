#pragma once

#include "qakns/qop.hpp"
#include "qakns/residual.hpp"

#include <utility>
#include <vector>

namespace qakns {

// L = delta - zA + U
struct LaxData {
    DifferenceStructure structure;
    std::vector<Scalar> a; // diagonal of A
    MatX u;
    int nx = 8;
    int nz = 6;

    int n() const { return static_cast<int>(a.size()); }
    SqMatrix A() const { return diagonal(a); }
    LaxData with_structure(DifferenceStructure s) const
    {
        LaxData r = *this;
        r.structure = std::move(s);
        return r;
    }
};

// Distinct nonzero a_i, u_ii = 0, a_j q^m != a_i for i != j, m <= N_x.
void validate(const LaxData& l);

QDOp lax_operator(const LaxData& l, int nd);

struct Dressing {
    MZSeries w; // I + sum_{k=1..depth} w_k z^{-k}
    int depth = 0;
};

struct Resolvent {
    int alpha = 0; // zero-based channel
    MZSeries r;    // determined through z^{-depth}
    int depth = 0;
};

enum class Normalization {
    // diagonal constants make R^2 = R order by order
    Idempotent,
    // diagonal constants set to zero
    ZeroConstant,
};

// Solves (D w_{k+1}) A - A w_{k+1} = -delta w_k - U w_k with zero diagonal constants.
Dressing solve_dressing(const LaxData& l, int depth);
// Largest depth <= limit for which the dressing solve is consistent.
int max_dressing_depth(const LaxData& l, int limit);

// delta w + (U - zA) w + z (Dw) A
MZSeries dressing_residual(const LaxData& l, const MZSeries& w);

Resolvent solve_resolvent_direct(const LaxData& l, int alpha, int depth,
                                 Normalization norm = Normalization::Idempotent);
Resolvent resolvent_from_dressing(const Dressing& d, int alpha);

// delta R - [R, U - zA]_q
MZSeries qr_residual(const LaxData& l, const MZSeries& r);

// (B, Bbar) with B = (z^k R)_+ and B + Bbar = z^k R.
std::pair<MZSeries, MZSeries> b_split(const Resolvent& r, int k);

struct UFlow {
    MatX value;    // multiplication part of [B_{k alpha}, L]_q
    QDOp bracket;  // the full q-commutator
    Residual z_dependence;   // nonzero z-degrees
    Residual dq_dependence;  // nonzero delta powers
    Residual diagonal;       // diagonal of value
    bool z_free() const { return z_dependence.zero; }
    bool dq_free() const { return dq_dependence.zero; }
    bool zero_diagonal() const { return diagonal.zero; }
};

UFlow u_flow(const LaxData& l, const Resolvent& r, int k, int nd);

// [B_{k alpha}, R_beta]
MZSeries resolvent_flow(const MZSeries& b, const MZSeries& r_beta);

struct FlowIndex {
    int k = 1;
    int alpha = 0; // zero-based
    friend bool operator==(const FlowIndex&, const FlowIndex&) = default;
    friend auto operator<=>(const FlowIndex&, const FlowIndex&) = default;
};

// d_{k a} B_{l b} - d_{l b} B_{k a} - [B_{k a}, B_{l b}]
MZSeries zero_curvature_residual(FlowIndex ka, FlowIndex lb, const std::vector<Resolvent>& resolvents);

} // namespace qakns
