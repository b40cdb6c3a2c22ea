import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import solve_bvp

from couette import damping as dmp
from couette.errors import NonPositiveNorm, ValidationError

ys = st.floats(-1, 1)
ks = st.integers(1, 40)


def test_green_value_at_center():
    assert dmp.green_function(1, 0.0, 0.0) == pytest.approx(math.tanh(1) / 2, rel=1e-14)


@given(ks, ys, ys)
def test_green_symmetric_and_vanishing_on_walls(k, y, y0):
    g = dmp.green_function(k, y, y0)
    assert g == pytest.approx(dmp.green_function(k, y0, y), rel=1e-12, abs=1e-300)
    assert dmp.green_function(k, -1.0, y0) == 0.0
    assert abs(dmp.green_function(k, 1.0, y0)) < 1e-300 + 1e-15
    assert g >= 0


def test_green_branches_agree_at_switch():
    y = np.linspace(-1, 1, 9)
    k = 30
    lo, hi = np.minimum(y, 0.2), np.maximum(y, 0.2)
    direct = np.sinh(k * (lo + 1)) * np.sinh(k * (1 - hi)) / (k * math.sinh(2 * k))
    np.testing.assert_allclose(dmp.green_function(k, y, 0.2), direct, rtol=1e-12, atol=1e-300)


def test_green_route_against_bvp_solver():
    mode = dmp.cosine_mode(2)
    t = 3.0
    st_ = dmp.modal_stream(mode, t)
    w = dmp.free_stream(mode, t)

    def rhs(y, z):
        # psi'' = k^2 psi - omega, real and imaginary parts stacked
        om = w(y)
        return np.vstack((z[1], 4 * z[0] - om.real, z[3], 4 * z[2] - om.imag))

    bc = lambda za, zb: np.array([za[0], zb[0], za[2], zb[2]])  # noqa: E731
    y = np.linspace(-1, 1, 401)
    sol = solve_bvp(rhs, bc, y, np.zeros((4, y.size)), tol=1e-10, max_nodes=200000)
    ref = sol.sol(st_.y)
    np.testing.assert_allclose(st_.psi.real, ref[0], atol=1e-8)
    np.testing.assert_allclose(st_.psi.imag, ref[2], atol=1e-8)
    np.testing.assert_allclose(st_.dpsi.real, ref[1], atol=1e-7)


@pytest.mark.parametrize("t", [0.0, 7.3, 55.0])
def test_green_and_direct_routes_agree(t):
    assert dmp.solver_agreement(dmp.cosine_mode(1), t) <= 1e-8


def test_linearity_in_initial_data():
    a, b = dmp.cosine_mode(1), dmp.jump_mode(1)
    both = dmp.ModalVorticity(1, lambda y: a(y) + 2 * b(y))
    sa, sb, sab = (dmp.modal_stream(m, 9.0) for m in (a, b, both))
    np.testing.assert_allclose(sab.psi, sa.psi + 2 * sb.psi, atol=1e-13)


def test_time_shift_semigroup():
    m = dmp.cosine_mode(1)
    a = dmp.modal_stream(m, 12.0)
    b = dmp.modal_stream(m.shifted(5.0), 7.0, panels=len(a.y) - 1)
    np.testing.assert_allclose(a.psi, b.psi, atol=1e-12)


def test_decay_rates_for_smooth_mode():
    m = dmp.cosine_mode(1)
    times = dmp.log_times(10, 100, 8)
    assert -1.1 <= dmp.decay_fit([m], times, "u").exponent <= -0.9
    assert -2.1 <= dmp.decay_fit([m], times, "v").exponent <= -1.9


def test_rough_data_decays_without_claiming_a_rate():
    rng = np.random.default_rng(11)
    modes = dmp.rough_modes(rng, k_max=4, rho=0.6, sigma=0.0)
    times = dmp.log_times(10, 200, 5)
    norms = [dmp.velocity_norms(modes, t) for t in times]
    u = [n[0] for n in norms]
    v = [n[1] for n in norms]
    assert u[-1] < u[0] and v[-1] < v[0]
    fit = dmp.fit_series(times, v, "v_L2")
    assert math.isfinite(fit.exponent)


def test_vorticity_norm_is_conserved():
    modes = [dmp.cosine_mode(1), dmp.jump_mode(3)]
    assert dmp.vorticity_l2(modes, 0.0) == pytest.approx(dmp.vorticity_l2(modes, 40.0), rel=1e-10)


def test_velocity_field_is_divergence_free():
    x, y, u, v = dmp.velocity_field([dmp.cosine_mode(1)], 2.0, nx=64, ny=2049)
    kx = np.fft.fftfreq(len(x), 1 / len(x))
    ux = np.real(np.fft.ifft(1j * kx[:, None] * np.fft.fft(u, axis=0), axis=0))
    vy = np.gradient(v, y, axis=1)
    assert np.max(np.abs(ux + vy)[:, 5:-5]) < 1e-4 * np.max(np.abs(u))


def test_asymptotic_profile_converges_and_is_nonzero():
    asym = dmp.single_mode_asymptotics(dmp.cosine_mode(1), [10, 20, 40, 80])
    bounds = [r.bound for r in asym.rows[:-1]]
    assert max(bounds) <= 2 * min(bounds)
    assert asym.nonvanishing


def test_decay_fit_validation():
    m = dmp.cosine_mode(1)
    with pytest.raises(ValidationError):
        dmp.decay_fit([m], [10, 20], "u")
    with pytest.raises(ValidationError):
        dmp.decay_fit([m], [10, 20, 100], "u")
    with pytest.raises(NonPositiveNorm):
        dmp.fit_series([1, 2, 3], [1.0, 0.0, 1.0])
    with pytest.raises(ValidationError):
        dmp.ModalVorticity(0, lambda y: y)
