#pragma once

#include "qakns/hierarchy.hpp"

#include <map>
#include <string>
#include <vector>

namespace qakns {

using MultiIndex = std::vector<FlowIndex>;

std::string to_string(const MultiIndex& lambda);

// d^{mu} B_{flow}; mu is kept sorted since the flows commute.
struct FlowFactor {
    FlowIndex flow;
    MultiIndex mu;
    friend auto operator<=>(const FlowFactor&, const FlowFactor&) = default;
    friend bool operator==(const FlowFactor&, const FlowFactor&) = default;
};

// Noncommutative polynomial in the d^{mu} B's: word -> coefficient.
using FlowWord = std::map<std::vector<FlowFactor>, Scalar>;

// f(lambda) with d^{[lambda]} w = f(lambda) w, as a symbolic word sum:
// f(empty) = 1, f(lambda.c) = d_c f(lambda) + f(lambda) B_c.
FlowWord flow_word(const MultiIndex& lambda);
std::string to_string(const FlowWord& f);

// Evaluates words against resolvents, with d_c R_b = [B_c, R_b] and
// d^{mu} B_{l b} = (z^l d^{mu} R_b)_+. Memoizes every derivative.
class FlowCalculus {
public:
    explicit FlowCalculus(std::vector<Resolvent> resolvents);

    const MZSeries& r(int beta, const MultiIndex& mu);
    const MZSeries& b(const FlowFactor& f);
    MZSeries evaluate(const FlowWord& f);

private:
    const Resolvent& resolvent(int beta) const;

    std::vector<Resolvent> rs_;
    std::map<std::pair<int, MultiIndex>, MZSeries> r_memo_;
    std::map<FlowFactor, MZSeries> b_memo_;
};

MZSeries flow_polynomial(const MultiIndex& lambda, const std::vector<Resolvent>& resolvents);

// Every sequence of length <= max_len over flows, the empty one first.
std::vector<MultiIndex> flow_sequences(const std::vector<FlowIndex>& flows, int max_len);

// G = (delta w + z (Dw) A) w^{-1}, the generator with D_q w = G w for the
// full Baker function; equals zA - U when w dresses L. winv is w^{-1} or (w*)^T.
template <class C>
ZLaurent<C> baker_generator(const Scalar& q, const std::vector<Scalar>& a, const ZLaurent<C>& w,
                            const ZLaurent<C>& winv)
{
    const int n = w.dim();
    Mat<C> am(n, zero_like(w.proto()));
    for (int i = 0; i < n; ++i) am(i, i) = a[static_cast<size_t>(i)] * unit_like(w.proto());
    ZLaurent<C> dw = dilate(w, q);
    ZLaurent<C> qw = q_derive(w, q);
    return (qw + (dw * am).shift(1)) * winv;
}

// res_z(z^l X) as a one-degree residual.
template <class C>
Residual residue_residual(const ZLaurent<C>& x, int l)
{
    Residual r;
    inspect(x.shift(l).coeff(-1), -1, r);
    return r;
}

// res_z(z^l (delta^m f) ...) for m = 1: delta f + (D f) G.
template <class C>
ZLaurent<C> lift_m1(const Scalar& q, const ZLaurent<C>& f, const ZLaurent<C>& g)
{
    return q_derive(f, q) + dilate(f, q) * g;
}

struct ResidueCase {
    int l = 0;
    int m = 0;
    MultiIndex lambda;
    Residual residual;
};

struct BilinearReport {
    std::vector<ResidueCase> cases;

    bool passed() const;
    Residual total() const;
    const ResidueCase* first_failure() const;
};

enum class InverseForm {
    Inverse,          // w^{-1} by series inversion
    AdjointTranspose, // (w*)^T with w* the adjoint Baker series
};

struct BilinearOptions {
    int l_max = 4;
    std::vector<int> m{0, 1};
    std::vector<MultiIndex> lambdas;
    InverseForm form = InverseForm::Inverse;
};

// res_z(z^l (delta^m d^{[lambda]} w) w^{-1}) for every requested (l, m, lambda),
// reduced to f(lambda) and G built from the dressing and its own resolvents.
BilinearReport check_q_bilinear(const Dressing& d, const LaxData& l, const BilinearOptions& o);

// w* = (w^{-1})^T
MZSeries adjoint_baker(const Dressing& d);
// w (w*)^T - I over its determined range.
Residual check_inverse_transpose(const MZSeries& w, const MZSeries& wstar);

// A from the top of G, U = -G_0; throws ConsistencyError when G has negative degrees.
LaxData reconstruct_from_bilinear(const DifferenceStructure& s, const Dressing& d, const MZSeries& wstar,
                                  const std::vector<Scalar>& a);

// Adds c I to w_1, for checking that the bilinear checks can fail.
Dressing corrupt_dressing(const Dressing& d, const Scalar& c);

} // namespace qakns
