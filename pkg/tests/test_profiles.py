import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad
from scipy.special import erf

from couette.errors import NonMonotoneProfile, NotOdd, ValidationError
from couette.profiles import ShearProfile, general_h_b0, read_h_table

gammas = st.floats(0.01, 0.3)
amps = st.floats(-1.5, 3.0)


def test_couette_is_linear():
    p = ShearProfile.couette()
    y = np.linspace(-1, 1, 11)
    assert p.is_couette
    np.testing.assert_allclose(p.U(y), y)
    np.testing.assert_allclose(p.Q(y), 0.0)


def test_q_at_center_matches_limit():
    # U''/U -> U'''(0)/U'(0) at y = 0
    p = ShearProfile(0.1, 1.0)
    expected = p.d3U(0.0) / p.dU(0.0)
    assert p.Q(0.0) == pytest.approx(expected, rel=1e-12)
    assert p.Q(0.0) == pytest.approx(-20.279, abs=1e-3)
    fd = float(p.d2U(1e-6) / p.U(1e-6))
    assert p.Q(0.0) == pytest.approx(fd, rel=1e-6)


@given(gammas, amps)
def test_q_matches_direct_quotient_away_from_center(g, a):
    try:
        p = ShearProfile(g, a)
    except NonMonotoneProfile:
        return
    y = np.array([-0.9, -0.3, 0.2 * g, 0.5, 1.0])
    np.testing.assert_allclose(p.Q(y), p.d2U(y) / p.U(y), rtol=1e-9, atol=1e-12)


@given(gammas, amps)
def test_derivative_chain(g, a):
    try:
        p = ShearProfile(g, a)
    except NonMonotoneProfile:
        return
    y = np.linspace(-0.95, 0.95, 7)
    h = 1e-6
    np.testing.assert_allclose((p.U(y + h) - p.U(y - h)) / (2 * h), p.dU(y), rtol=1e-7, atol=1e-8)
    np.testing.assert_allclose((p.dU(y + h) - p.dU(y - h)) / (2 * h), p.d2U(y), rtol=1e-5, atol=1e-6)
    np.testing.assert_allclose((p.psi0(y + h) - p.psi0(y - h)) / (2 * h), p.U(y), rtol=1e-7, atol=1e-8)


@given(gammas, amps)
def test_odd_even_symmetry(g, a):
    try:
        p = ShearProfile(g, a)
    except NonMonotoneProfile:
        return
    y = np.linspace(0, 1, 9)
    np.testing.assert_allclose(p.U(-y), -p.U(y), atol=1e-15)
    np.testing.assert_allclose(p.Q(-y), p.Q(y), atol=1e-12)
    np.testing.assert_allclose(p.psi0(-y), p.psi0(y), atol=1e-15)


def test_psi0_by_quadrature():
    p = ShearProfile(0.1, 1.3)
    for y in (0.05, 0.3, 1.0):
        val, _ = quad(lambda t: float(p.U(t)), 0, y, epsabs=1e-14)
        assert float(p.psi0(y)) == pytest.approx(val, rel=1e-12)


def test_dq_dz_by_differences():
    p = ShearProfile(0.05, 1.0)
    y = np.array([0.01, 0.05, 0.1, 0.3])
    dz = 1e-7
    z = 0.5 * y**2
    fd = (p.Q(np.sqrt(2 * (z + dz))) - p.Q(np.sqrt(2 * (z - dz)))) / (2 * dz)
    np.testing.assert_allclose(p.dQ_dz(y), fd, rtol=1e-5)


def test_non_monotone_rejected():
    with pytest.raises(NonMonotoneProfile):
        ShearProfile(0.5, -2.0)
    with pytest.raises(ValidationError):
        ShearProfile(0.0, 1.0)


def test_h_table_round_trip(tmp_path):
    x = np.linspace(-8, 8, 801)
    path = tmp_path / "h.csv"
    np.savetxt(path, np.c_[x, erf(x)], delimiter=",", header="x,h", comments="")
    xs, hs = read_h_table(path)
    p = ShearProfile.from_config({"kind": "h", "gamma": 0.1, "a": 1.0, "h_table_path": "h.csv"}, tmp_path)
    q = ShearProfile(0.1, 1.0)
    y = np.linspace(-1, 1, 41)
    np.testing.assert_allclose(p.U(y), q.U(y), atol=1e-7)
    np.testing.assert_allclose(p.psi0(y), q.psi0(y), atol=1e-8)
    assert general_h_b0(xs, hs) == pytest.approx(4.0, rel=1e-4)


def test_even_table_rejected():
    x = np.linspace(-4, 4, 101)
    with pytest.raises(NotOdd):
        ShearProfile.from_h_table(0.1, 1.0, x, np.cos(x))
