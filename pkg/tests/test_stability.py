import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from couette import stability as stab
from couette.errors import NotMonotone, ValidationError
from couette.profiles import ShearProfile

ORDER = {stab.STABLE: 0, stab.INDETERMINATE: 1, stab.UNSTABLE: 2}


@pytest.mark.parametrize("T", [1.0, 2 * math.pi, 100.0])
def test_couette_is_stable(T):
    assert stab.classify(ShearProfile.couette(), T).verdict == stab.STABLE


def test_inflected_profile_is_unstable_above_window():
    p = ShearProfile(0.05, 1.0)
    v = stab.classify(p, 2 * math.pi)
    assert v.verdict == stab.UNSTABLE
    w = stab.unstable_period_window(p)
    assert w.t_min == pytest.approx(2 * math.pi / math.sqrt(-v.eigenvalues[0]), rel=1e-6)
    assert stab.classify(p, 0.8 * w.t_min).verdict == stab.STABLE


@given(st.floats(0.5, 60.0), st.floats(1.01, 3.0))
def test_verdict_monotone_in_period(T, factor):
    p = ShearProfile(0.1, 1.0)
    a, b = stab.classify(p, T).verdict, stab.classify(p, factor * T).verdict
    assert ORDER[a] <= ORDER[b]


def test_window_empty_for_small_amplitude():
    w = stab.unstable_period_window(ShearProfile(0.05, 0.4))
    assert w.empty and w.lam > 0


def test_window_shrinks_with_amplitude():
    t = [stab.unstable_period_window(ShearProfile(0.05, a)).t_min for a in (0.8, 1.0, 2.0)]
    assert t[0] > t[1] > t[2]


def test_inflections_found():
    sh = stab.ShearFunction(lambda y: y + 0.1 * np.sin(np.pi * y), lambda y: 1 + 0.1 * np.pi * np.cos(np.pi * y),
                            lambda y: -0.1 * np.pi**2 * np.sin(np.pi * y),
                            lambda y: -0.1 * np.pi**3 * np.cos(np.pi * y))
    data = stab.find_inflections(sh)
    assert [round(p.y, 12) for p in data.points] == [0.0]
    assert stab.classify(sh, 2 * math.pi).verdict == stab.STABLE


def test_couette_is_degenerate():
    assert stab.find_inflections(ShearProfile.couette()).degenerate


def test_potential_matches_family_quotient():
    p = ShearProfile(0.1, 1.0)
    data = stab.find_inflections(p)
    y = np.linspace(-1, 1, 101)
    np.testing.assert_allclose(data.potential(0)(y), p.Q(y))
    generic = stab._quotient(p, data.points[0])
    np.testing.assert_allclose(generic(y), p.Q(y), rtol=1e-5, atol=1e-5)


def test_sampled_shear_matches_exact():
    p = ShearProfile(0.3, 0.05)
    y = np.linspace(-1, 1, 401)
    sh = stab.ShearFunction.from_samples(y, p.U(y))
    assert stab.classify(sh, 20.0).verdict == stab.classify(p, 20.0).verdict == stab.STABLE


def test_small_perturbations_are_stable():
    rng = np.random.default_rng(5)
    for _ in range(5):
        sh = stab.perturbed_shear(rng, 0.005)
        assert stab.classify(sh, 2 * math.pi).verdict == stab.STABLE


def test_non_monotone_rejected():
    sh = stab.ShearFunction(lambda y: y**2, lambda y: 2 * y, lambda y: 2 + 0 * y)
    with pytest.raises(NotMonotone):
        stab.classify(sh, 1.0)
    with pytest.raises(ValidationError):
        stab.classify(ShearProfile.couette(), -1.0)
