"""Tests for the finite-blocklength error model and its linear surrogate."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from risnoma.fbl import (
    CodeSpec,
    linearization_params,
    psi_exact,
    psi_exact_vec,
    psi_linear,
)

# the two working points used throughout: a rate-3 control code and a
# rate-1 payload code, both over 100 channel uses
CODE_C = CodeSpec(m=100, bits=300)
CODE_E = CodeSpec(m=100, bits=100)


def test_code_spec_validation():
    with pytest.raises(ValueError):
        CodeSpec(m=0, bits=100)
    with pytest.raises(ValueError):
        CodeSpec(m=100, bits=0)
    with pytest.raises(ValueError):
        CodeSpec(m=-5, bits=10)
    assert CODE_C.rate == 3.0
    assert CODE_E.rate == 1.0


def test_linearization_frozen_values():
    lin_c = linearization_params(CODE_C)
    assert lin_c.beta == pytest.approx(7.0, abs=1e-12)
    assert lin_c.delta == pytest.approx(0.05026200292434228, rel=1e-14)
    assert lin_c.v == pytest.approx(6.005212743406519, rel=1e-14)
    assert lin_c.u == pytest.approx(7.994787256593481, rel=1e-14)

    lin_e = linearization_params(CODE_E)
    assert lin_e.beta == pytest.approx(1.0, abs=1e-12)
    assert lin_e.delta == pytest.approx(0.23032943298089034, rel=1e-14)
    assert lin_e.v == pytest.approx(0.7829196236325198, rel=1e-14)
    assert lin_e.u == pytest.approx(1.2170803763674802, rel=1e-14)


@settings(max_examples=60)
@given(st.integers(min_value=10, max_value=2000), st.integers(min_value=1, max_value=1200))
def test_linearization_knee_width_identity(m, bits):
    # the ramp width is pinned to the slope: delta*sqrt(m)*(u - v) = 1
    lin = linearization_params(CodeSpec(m=m, bits=bits))
    assert lin.delta * math.sqrt(m) * (lin.u - lin.v) == pytest.approx(1.0, rel=1e-12)
    assert lin.v < lin.beta < lin.u


def test_psi_exact_anchors():
    # capacity equals rate exactly at beta, where the error probability is 1/2
    assert psi_exact(7.0, CODE_C) == pytest.approx(0.5, abs=1e-14)
    assert psi_exact(1.0, CODE_E) == pytest.approx(0.5, abs=1e-14)
    assert psi_exact(0.0, CODE_C) == 1.0
    assert psi_exact(1e9, CODE_C) == 0.0
    with pytest.raises(ValueError):
        psi_exact(-0.1, CODE_C)


def test_psi_exact_monotone_and_bounded():
    grid = np.geomspace(1e-6, 1e4, 300)
    vals = [psi_exact(float(g), CODE_C) for g in grid]
    assert all(0.0 <= p <= 1.0 for p in vals)
    assert all(a >= b for a, b in zip(vals, vals[1:]))


def test_psi_exact_vec_matches_scalar():
    grid = np.geomspace(1e-9, 1e6, 400)
    vec = psi_exact_vec(grid, CODE_E)
    scalar = np.array([psi_exact(float(g), CODE_E) for g in grid])
    # scalar path uses math.erfc, vector path the numpy one; they drift a
    # few ulps apart deep in the tail (values below 1e-140) but nowhere
    # else, and may disagree about clipping a subnormal to exact zero
    np.testing.assert_allclose(vec, scalar, rtol=1e-11, atol=1e-300)
    body = scalar > 1e-12
    np.testing.assert_allclose(vec[body], scalar[body], rtol=1e-13, atol=0.0)


def test_psi_exact_vec_handles_zero_block():
    out = psi_exact_vec(np.zeros(5), CODE_C)
    assert out.tolist() == [1.0] * 5


def test_psi_linear_shape():
    lin = linearization_params(CODE_C)
    eps = 1e-9
    assert psi_linear(lin.v - eps, lin) == 1.0
    assert psi_linear(lin.u + eps, lin) == 0.0
    assert psi_linear(lin.beta, lin) == pytest.approx(0.5, abs=1e-12)
    # affine on the ramp: midpoint of (v, beta) sits at 3/4
    assert psi_linear(0.5 * (lin.v + lin.beta), lin) == pytest.approx(0.75, abs=1e-9)


@settings(max_examples=40)
@given(st.floats(min_value=0.0, max_value=20.0), st.floats(min_value=0.0, max_value=20.0))
def test_psi_linear_monotone(g1, g2):
    lin = linearization_params(CODE_E)
    lo, hi = sorted((g1, g2))
    assert psi_linear(lo, lin) >= psi_linear(hi, lin)


def test_surrogate_gap_frozen():
    # worst-case |exact - linear| over a dense grid around the ramp; these
    # levels are what the closed-form averages inherit as model error
    for code, frozen in ((CODE_C, 0.1191291566608661), (CODE_E, 0.1241343776705385)):
        lin = linearization_params(code)
        grid = np.linspace(max(lin.v - 1.0, 0.0), lin.u + 1.0, 20001)
        gap = max(abs(psi_exact(float(g), code) - psi_linear(float(g), lin)) for g in grid)
        assert gap == pytest.approx(frozen, abs=2e-3)
        assert gap < 0.15
