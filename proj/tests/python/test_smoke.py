from fractions import Fraction

import pytest

import qakns


def test_shift_coefficients():
    assert qakns.q_shift_coefficient(1, 2) == 1
    q = Fraction(2)
    assert qakns.q_shift_coefficient(2, q) == (1 - q) / (2 * (1 + q))


def test_exp_q_eigen_relation():
    q = Fraction(3, 5)
    e = qakns.exp_q(6, Fraction(-2, 3), q)
    d = qakns.q_derive(e, q)
    assert d == [Fraction(-2, 3) * c for c in e[: len(d)]]


def test_config_validation():
    cfg = qakns.builtin_config("triangular")
    assert cfg["a"] == ["1", "-1"]
    assert qakns.config_hash(cfg) == qakns.config_hash(qakns.normalize_config(cfg))
    bad = dict(cfg, a=["1", "1"])
    with pytest.raises(qakns.ConfigError, match="distinct eigenvalues"):
        qakns.normalize_config(bad)
    bad = dict(cfg, u=[[["1"], []], [[], []]])
    with pytest.raises(qakns.ConfigError, match="u_ii=0"):
        qakns.normalize_config(bad)
    with pytest.raises(ValueError):
        qakns.normalize_config("{not json")


def test_coupled_first_order():
    cfg = qakns.builtin_config("coupled")
    w = qakns.dressing(cfg)
    assert sorted(w) == [-1, 0]
    assert w[-1][0][1][0] == Fraction(1, 2)
    assert w[-1][1][0][0] == Fraction(-1, 2)
    r = qakns.resolvent(cfg, 1, 2)
    assert r[-1][0][1][0] == Fraction(-1, 2)


def test_suite_subset():
    cfg = qakns.builtin_config("triangular")
    cfg["checks"] = ["q_calculus", "bilinear"]
    rep = qakns.run_suite(cfg, only=["q_calculus", "bilinear.qb1"], timing=False)
    assert rep["config_hash"] == qakns.config_hash(cfg)
    assert [c["status"] for c in rep["checks"]] == ["pass"] * len(rep["checks"])
    assert rep["checks"][-1]["name"] == "bilinear.qb1"

    bad = qakns.run_suite(cfg, only=["bilinear.qb1"], inject="corrupt-dressing")
    (rec,) = bad["checks"]
    assert rec["status"] == "fail"
    assert rec["first_failure"]["value"] == "1/3"

    assert qakns.run_suite(dict(cfg, checks=[]))["checks"] == []
