#pragma once

#include "qakns/bilinear.hpp"
#include "qakns/timepoly.hpp"

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace qakns {

// tau together with its off-diagonal companions tau_{alpha beta}.
struct TauFamily {
    std::string name;
    TimeSpace space;
    int nx = 8;
    TimePoly tau;
    std::map<std::pair<int, int>, TimePoly> companions; // zero-based (alpha, beta), alpha != beta

    int n() const { return space.n; }
};

// h_j(s) with s_k = sum_alpha c_alpha t_{k alpha}: exp(sum_k s_k z^k) = sum_j h_j z^j.
TimePoly complete_homogeneous(const TimeSpace& space, int nx, int j, const std::vector<Scalar>& c);

TauFamily vacuum_tau(int n, int kmax, int nx);
// n = 2: tau = 1, tau_12 = h_m(t_{k1} - t_{k2}), tau_21 = 0.
TauFamily schur_tau(int m, int kmax, int nx);
// tau = 1 + t_11 with no companions; fails the classical bilinear relation.
TauFamily linear_probe(int kmax, int nx);

// w_{aa} = tau(t - [z^{-1}]_a)/tau, w_{ab} = z^{-1} tau_{ab}(t - [z^{-1}]_b)/tau,
// every time polynomial cut to total weight <= weight.
TZSeries baker_from_tau(const TauFamily& f, int weight, int nz);

// (d^{[lambda]} w) w^{-1} for a time-dependent dressing w, with
// F_c = (d_c w + w z^k E_a) w^{-1} and F_{lambda.c} = d_c F_lambda + F_lambda F_c.
class BakerFlows {
public:
    explicit BakerFlows(TZSeries w);

    const TZSeries& w() const { return w_; }
    const TZSeries& inverse() const { return winv_; }
    const TZSeries& f(const MultiIndex& lambda);

private:
    TZSeries w_;
    TZSeries winv_;
    std::map<MultiIndex, TZSeries> memo_;
};

// res_z(z^l F_lambda) = 0 under the classical structure (m = 0).
BilinearReport classical_precheck(const TauFamily& f, int weight, int nz, int l_max,
                                  const std::vector<MultiIndex>& lambdas);

struct ExpqoReport {
    std::vector<Residual> channels; // z-degree j of exp_q(z a x) exp(xi) - exp(xi')
    int depth = 0;
    bool passed() const;
    Residual total() const;
};

// exp_q(z a_a x) exp(sum z^k t_{ka}) = exp(sum z^k t'_{ka}) through z^depth, every channel.
ExpqoReport verify_expqo(const std::vector<Scalar>& a, const Scalar& q, int nx, int depth);

struct TauOptions {
    Scalar q{2};
    int weight = kUnboundedWeight;
    int nz = 6;
    int l_max = 2;
    std::vector<FlowIndex> flows{{1, 0}, {1, 1}};
    int max_len = 2;
    int expqo_depth = 4;
};

struct PathCase {
    int l = 0;
    int m = 0;
    MultiIndex lambda;
    Residual direct;     // residue from w_q
    Residual difference; // direct minus Taylor
    int taylor_weight = 0;
};

struct TauReport {
    BilinearReport precheck;
    ExpqoReport expqo;
    std::vector<PathCase> paths;

    bool q_bilinear_passed() const;
    bool paths_agree() const;
    bool passed() const { return precheck.passed() && expqo.passed() && q_bilinear_passed() && paths_agree(); }
};

// Residues of the q-shifted family along both evaluation paths: directly
// from w_q(t; x) = w(t + [Ax]_q), and from the Taylor expansion of D_q in
// the time shift Delta_{k b} = c_k (q^k - 1)(a_b x)^k.
std::vector<PathCase> tau_paths(const TauFamily& f, const std::vector<Scalar>& a, const TauOptions& o);

// Classical precheck (throws ConsistencyError on failure), then expqo and both paths.
TauReport verify_tau_theorem(const TauFamily& f, const std::vector<Scalar>& a, const TauOptions& o);

struct LimitReport {
    std::vector<Scalar> qs;
    std::vector<Scalar> norms;
    std::vector<Scalar> ratios;
    Scalar lo{9, 20};
    Scalar hi{11, 20};
    bool passed() const;
};

// max |D_q X - sum_b a_b d_{1b} X| over tau, companions and w_q entries for
// q = 1 + 2^{-m}; the ratios between successive q must sit in [lo, hi].
LimitReport classical_limit_check(const TauFamily& f, const std::vector<Scalar>& a, const std::vector<int>& ms,
                                  int weight, int nz);

} // namespace qakns
