"""Exact checks for the q-deformed AKNS-D hierarchy.

Configs are dicts in the same JSON shape the command line tool reads;
rationals are "p/q" strings.
"""

import json
from fractions import Fraction

from . import _core
from ._core import ConfigError, ConsistencyError, DepthError, Error

__all__ = [
    "ConfigError",
    "ConsistencyError",
    "DepthError",
    "Error",
    "builtin_config",
    "check_names",
    "config_hash",
    "dressing",
    "exp_q",
    "load_config",
    "normalize_config",
    "q_derive",
    "q_shift_coefficient",
    "resolvent",
    "run_suite",
]


def _text(config):
    return config if isinstance(config, str) else json.dumps(config)


def _fractions(values):
    return [Fraction(v) for v in values]


def load_config(path):
    return json.loads(_core.load_config(str(path)))


def normalize_config(config):
    return json.loads(_core.normalize_config(_text(config)))


def builtin_config(name="triangular"):
    return json.loads(_core.builtin_config(name))


def config_hash(config):
    return _core.config_hash(_text(config))


def check_names(config):
    return _core.check_names(_text(config))


def run_suite(config, only=(), inject="", timing=True):
    return json.loads(_core.run_suite(_text(config), list(only), inject, timing))


def _matrices(raw):
    return {d: [[_fractions(e) for e in row] for row in rows] for d, rows in raw.items()}


def dressing(config, depth=None):
    """{z-degree: matrix of x-coefficient lists}; depth defaults to the deepest consistent one."""
    text = _text(config)
    if depth is None:
        depth = _core.max_dressing_depth(text, normalize_config(text)["truncation"]["k"])
    return _matrices(_core.dressing(text, depth))


def resolvent(config, alpha, depth):
    return _matrices(_core.resolvent(_text(config), alpha, depth))


def q_shift_coefficient(k, q):
    return Fraction(_core.q_shift_coefficient(k, str(Fraction(q))))


def exp_q(order, c, q):
    return _fractions(_core.exp_q(order, str(Fraction(c)), str(Fraction(q))))


def q_derive(coeffs, q):
    return _fractions(_core.q_derive([str(Fraction(c)) for c in coeffs], str(Fraction(q))))
