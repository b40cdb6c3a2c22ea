import math
import warnings

import numpy as np
import pytest

from couette import steady
from couette.errors import BracketInvalid, RangeEscape, ValidationError
from couette.profiles import ShearProfile

PROF = ShearProfile(0.1, 1.0)


@pytest.fixture(scope="module")
def setup():
    f = steady.build_nonlinearity(PROF)
    grid = steady.SteadyGrid.for_profile(PROF, 8.0, 8)
    k0, _ = steady.bifurcation_point(PROF, f, grid)
    return f, grid, k0


@pytest.fixture(scope="module")
def branch(setup):
    f, grid, k0 = setup
    return steady.continue_branch(f, PROF, k0, 2e-4, 7, grid)


def test_nonlinearity_reproduces_base_vorticity(setup):
    f = setup[0]
    y = np.linspace(-1, 1, 101)
    np.testing.assert_allclose(f(PROF.psi0(y)), PROF.dU(y), atol=1e-12)
    np.testing.assert_allclose(f(PROF.psi0(y), 1), PROF.Q(y), rtol=1e-6, atol=1e-6)
    assert f(0.0) == pytest.approx(1 + 2 * PROF.a * PROF.gamma / math.sqrt(math.pi), abs=1e-14)


def test_nonlinearity_extension_is_smooth(setup):
    f = setup[0]
    for edge in (f.psi_min, f.psi_max):
        for nu in (0, 1, 2):
            lo, hi = f(edge - 1e-12, nu), f(edge + 1e-12, nu)
            # the first table interval is only ~dy^2/2 wide in psi, so f'' there carries roundoff
            assert abs(lo - hi) <= 1e-5 * max(1.0, abs(lo))
    assert f(f.support[0] - 1e-3) == 0.0 and f(f.support[1] + 1e-3) == 0.0


def test_jacobian_against_finite_differences(setup):
    f, grid, k0 = setup
    rng = np.random.default_rng(3)
    v = 1e-3 * rng.standard_normal(grid.shape)
    d = rng.standard_normal(grid.shape)
    jac = steady.jacobian(v, k0, f, PROF, grid)
    eps = 1e-6
    fd = (steady.residual_values(v + eps * d, k0, f, PROF, grid)
          - steady.residual_values(v - eps * d, k0, f, PROF, grid)) / (2 * eps)
    lin = (jac @ d.ravel()).reshape(grid.shape)
    assert np.max(np.abs(lin - fd)) <= 1e-6 * max(1.0, np.max(np.abs(lin)))


def test_trivial_state_has_zero_residual(setup):
    f, grid, k0 = setup
    st = steady.shear_state(PROF, 2 * math.pi, grid, f)
    assert np.max(np.abs(steady.residual(st.phi, k0, f, PROF, grid).values)) == 0.0
    rep = steady.classify_streamlines(st)
    assert not rep.cats_eye and rep.points == []


def test_branch_residuals_and_leading_order(branch):
    assert all(s.residual <= 1e-9 for s in branch)
    amps = [s.amplitude for s in branch]
    assert all(a < b for a, b in zip(amps, amps[1:]))
    assert branch[0].remainder() / branch[0].amplitude <= 0.2


def test_branch_is_even_in_xi(branch):
    assert branch[-1].odd_energy() <= 1e-20


def test_opposite_amplitude_is_half_period_shift(setup, branch):
    f, grid, k0 = setup
    neg = steady.continue_branch(f, PROF, k0, -2e-4, 2, grid)
    for p, n in zip(branch[:2], neg):
        assert n.alpha_sq == pytest.approx(p.alpha_sq, abs=1e-9)
        np.testing.assert_allclose(n.values[:, ::-1], p.values, atol=1e-10)


def test_cats_eye_height_scales_like_root_amplitude(setup):
    f, grid, _ = setup
    h = [steady.classify_streamlines(steady.state_at_amplitude(PROF, r, grid, f)).eye_half_height
         for r in (2e-4, 8e-4)]
    assert h[1] / h[0] == pytest.approx(2.0, rel=0.15)


def test_streamline_points(branch):
    rep = steady.classify_streamlines(branch[-1])
    assert rep.cats_eye
    assert sorted(p.kind for p in rep.points) == ["center", "saddle"]
    assert all(p.grad_norm < 1e-8 for p in rep.points)


def test_vorticity_distance_vanishes_for_couette():
    c = ShearProfile.couette()
    st = steady.shear_state(c, 2 * math.pi, steady.SteadyGrid(8, steady.DirichletGrid(127)))
    assert steady.vorticity_distance(st, c, 1.0) < 1e-12


def test_range_escape_is_warned(setup, branch):
    f, grid, _ = setup
    big = 50 * branch[-1].values
    with warnings.catch_warnings(record=True) as rec:
        warnings.simplefilter("always")
        steady.residual(big, branch[-1].alpha_sq, f, PROF, grid)
    assert any(issubclass(w.category, RangeEscape) for w in rec)


def test_refined_residual_small_at_small_amplitude(setup):
    f, grid, _ = setup
    st = steady.state_at_amplitude(PROF, 1e-5, grid, f)
    assert steady.refined_residual(st) <= 1e-5


def test_bad_bracket_rejected():
    with pytest.raises(BracketInvalid):
        steady.match_period(0.1, 2 * math.pi, 1e-5, (1.5, 2.0), cells_per_width=8.0, modes=8)
    with pytest.raises(BracketInvalid):
        steady.match_period(0.1, 2 * math.pi, 1e-5, (1.0, 0.6))


def test_stable_profile_has_no_branch():
    with pytest.raises(Exception):
        steady.state_at_amplitude(ShearProfile(0.1, 0.3), 1e-5)
    with pytest.raises(ValidationError):
        steady.continue_branch(steady.build_nonlinearity(PROF), PROF, -1.0, 1e-4, 3)
