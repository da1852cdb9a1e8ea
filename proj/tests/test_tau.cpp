#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "qakns/tau.hpp"

using namespace qakns;

namespace {

constexpr int kNx = 8;
const Scalar kQs[] = {Scalar(2), Scalar(1, 2), Scalar(3, 5)};
const std::vector<Scalar> kA{Scalar(1), Scalar(-1)};

TimePoly t(const TimeSpace& s, int k, int alpha) { return TimePoly::variable(s, kNx, {k, alpha}); }
TimePoly one(const TimeSpace& s) { return TimePoly::constant(s, XSeries::constant(kNx, 1)); }

TauOptions options(const Scalar& q, int weight)
{
    TauOptions o;
    o.q = q;
    o.weight = weight;
    o.nz = 14;
    o.l_max = 4;
    o.flows = {{1, 0}, {1, 1}, {2, 0}};
    return o;
}

} // namespace

TEST_CASE("complete homogeneous polynomials")
{
    const TimeSpace s{2, 3};
    const std::vector<Scalar> c{Scalar(1), Scalar(-1)};
    TimePoly s1 = t(s, 1, 0) - t(s, 1, 1);
    TimePoly s2 = t(s, 2, 0) - t(s, 2, 1);
    TimePoly s3 = t(s, 3, 0) - t(s, 3, 1);
    CHECK(agree(complete_homogeneous(s, kNx, 0, c), one(s)));
    CHECK(agree(complete_homogeneous(s, kNx, 1, c), s1));
    CHECK(agree(complete_homogeneous(s, kNx, 2, c), Scalar(1, 2) * s1 * s1 + s2));
    CHECK(agree(complete_homogeneous(s, kNx, 3, c), Scalar(1, 6) * s1 * s1 * s1 + s1 * s2 + s3));
}

TEST_CASE("Baker series from tau")
{
    // vacuum
    TZSeries w0 = baker_from_tau(vacuum_tau(2, 3, kNx), kUnboundedWeight, 6);
    CHECK(check_zero(w0 - TZSeries::identity(2, 6, w0.proto())).zero);

    // tau = 1 + t11: w_11 = (1 + t11 - z^{-1}) / (1 + t11)
    TauFamily probe = linear_probe(3, kNx);
    TZSeries w = baker_from_tau(probe, 6, 8);
    const TimePoly tau = probe.tau.truncated(6);
    CHECK(agree(w.coeff(0)(0, 0) * tau, tau));
    CHECK(agree(w.coeff(-1)(0, 0) * tau, -one(probe.space)));
    CHECK(w.coeff(-1)(0, 0).weight() == 5);
    CHECK(agree(w.coeff(-2)(0, 0), TimePoly(probe.space, kNx)));
    CHECK(agree(w.coeff(-1)(1, 1), TimePoly(probe.space, kNx)));

    // off-diagonal entries start at z^{-1}
    TZSeries wh = baker_from_tau(schur_tau(2, 3, kNx), kUnboundedWeight, 6);
    CHECK(wh.top() == 0);
    CHECK(agree(wh.coeff(0)(0, 1), TimePoly(probe.space, kNx)));
    CHECK(agree(wh.coeff(-1)(0, 1), complete_homogeneous(probe.space, kNx, 2, kA)));
    // h_2(s + [z^{-1}]): z^{-2} coefficient h_1, z^{-3} coefficient h_0
    CHECK(agree(wh.coeff(-2)(0, 1), complete_homogeneous(probe.space, kNx, 1, kA)));
    CHECK(agree(wh.coeff(-3)(0, 1), one(probe.space)));

    TauFamily bad = vacuum_tau(2, 3, kNx);
    bad.tau = t(bad.space, 1, 0);
    CHECK_THROWS_AS(baker_from_tau(bad, 6, 6), ConsistencyError);
}

TEST_CASE("classical precheck")
{
    const auto lambdas = flow_sequences({{1, 0}, {1, 1}, {2, 0}}, 2);
    CHECK(classical_precheck(vacuum_tau(2, 3, kNx), kUnboundedWeight, 14, 4, lambdas).passed());
    for (int m = 1; m <= 3; ++m) CHECK(classical_precheck(schur_tau(m, 3, kNx), 10, 14, 4, lambdas).passed());
    BilinearReport r = classical_precheck(linear_probe(3, kNx), 10, 14, 4, lambdas);
    CHECK_FALSE(r.passed());
    REQUIRE(r.first_failure());
    CHECK(r.first_failure()->lambda == MultiIndex{{1, 0}});
}

TEST_CASE("exp_q times exp(xi) is exp(xi) at shifted times")
{
    for (const Scalar& q : kQs) {
        ExpqoReport r = verify_expqo({Scalar(1), Scalar(-1), Scalar(3, 2)}, q, kNx, 8);
        CHECK(r.channels.size() == 3);
        CHECK(r.passed());
        CHECK(r.total().max_x == kNx);
    }
    // z^1: t_1 + a x
    const TimeSpace s{2, 2};
    TimePoly h1 = complete_homogeneous(s, kNx, 1, {Scalar(1), Scalar(0)});
    CHECK(agree(q_shift_times(h1, {Scalar(3), Scalar(5)}, Scalar(2)),
                t(s, 1, 0) + TimePoly::constant(s, XSeries(kNx, {0, 3}))));
}

TEST_CASE("tau theorem on the vacuum and the Schur family")
{
    for (const Scalar& q : {Scalar(2), Scalar(3, 5)}) {
        TauReport v = verify_tau_theorem(vacuum_tau(2, 4, kNx), kA, options(q, kUnboundedWeight));
        CHECK(v.passed());
        CHECK(v.paths.size() == 13 * 2 * 5);
        for (int m = 1; m <= 3; ++m) {
            TauReport r = verify_tau_theorem(schur_tau(m, 4, kNx), kA, options(q, 10));
            CHECK(r.passed());
            CHECK(r.q_bilinear_passed());
            CHECK(r.paths_agree());
        }
    }
    CHECK_THROWS_AS(verify_tau_theorem(linear_probe(4, kNx), kA, options(Scalar(2), 10)), ConsistencyError);
}

TEST_CASE("Taylor and direct paths agree on a non-tau input")
{
    for (const Scalar& q : kQs) {
        auto paths = tau_paths(linear_probe(4, kNx), kA, options(q, 8));
        bool some_nonzero = false;
        for (const auto& p : paths) {
            CHECK(p.difference.zero);
            if (!p.direct.zero) some_nonzero = true;
        }
        CHECK(some_nonzero);
    }
}

TEST_CASE("classical limit")
{
    const std::vector<int> ms{3, 4, 5, 6};
    LimitReport v = classical_limit_check(vacuum_tau(2, 3, kNx), kA, ms, kUnboundedWeight, 6);
    CHECK(v.passed());
    for (const auto& n : v.norms) CHECK(n == 0);

    // n = 1, tau = t11: D_q picks a d_11 exactly
    TauFamily lin;
    lin.name = "t11";
    lin.space = TimeSpace{1, 2};
    lin.nx = kNx;
    lin.tau = t(lin.space, 1, 0);
    LimitReport l1 = classical_limit_check(lin, {Scalar(1)}, ms, kUnboundedWeight, 6);
    CHECK(l1.passed());
    for (const auto& n : l1.norms) CHECK(n == 0);

    // h_2: residual 2x(q-1), ratio exactly 1/2
    LimitReport h2 = classical_limit_check(schur_tau(2, 3, kNx), kA, ms, kUnboundedWeight, 6);
    CHECK(h2.passed());
    CHECK(h2.norms.front() == Scalar(1, 4));
    for (const auto& r : h2.ratios) CHECK(r == Scalar(1, 2));

    LimitReport h3 = classical_limit_check(schur_tau(3, 3, kNx), kA, ms, kUnboundedWeight, 6);
    CHECK(h3.passed());
    CHECK(h3.ratios.size() == 3);

    LimitReport probe = classical_limit_check(linear_probe(3, kNx), kA, ms, 8, 10);
    CHECK(probe.passed());

    LimitReport fake;
    fake.norms = {Scalar(1), Scalar(1)};
    fake.ratios = {Scalar(1)};
    CHECK_FALSE(fake.passed());
    fake.norms = {Scalar(0), Scalar(1)};
    fake.ratios = {};
    CHECK_FALSE(fake.passed());
}
