"""Inflection-value stability test for monotone shear flows.

For every inflection value U_s = U(y_i) the operator -d^2/dy^2 + Q_i with
Q_i = U''/(U - U_s) is formed.  If all lowest Dirichlet eigenvalues exceed
-(2 pi/T)^2 the flow is stable to x-period T.  For the single-inflection
family U = y + a gamma^2 h(y/gamma) a negative eigenvalue lambda gives
instability for every period above 2 pi/sqrt(-lambda).  Anything else is
reported as indeterminate.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import make_interp_spline
from scipy.optimize import brentq

from .errors import NotMonotone, ValidationError
from .profiles import ShearProfile
from .sobolev import hs_norm_1d
from .spectral1d import DirichletGrid, converged_eigenvalue, lowest_eigenpair

STABLE, UNSTABLE, INDETERMINATE = "Stable", "Unstable", "Indeterminate"
BLEND = 1e-3


@dataclass(frozen=True, eq=False)
class ShearFunction:
    """A shear U(y) on [-1, 1] given by callables for U and its derivatives."""

    U: object
    dU: object
    d2U: object
    d3U: object = None

    @classmethod
    def from_samples(cls, y, u) -> "ShearFunction":
        """Quintic interpolating spline through samples of U."""
        spl = make_interp_spline(np.asarray(y, float), np.asarray(u, float), k=5)
        return cls(spl, spl.derivative(1), spl.derivative(2), spl.derivative(3))

    def third(self, y):
        if self.d3U is not None:
            return self.d3U(y)
        h = 1e-5
        return (self.d2U(y + h) - self.d2U(y - h)) / (2 * h)


@dataclass(frozen=True)
class Inflection:
    y: float
    value: float


@dataclass(frozen=True, eq=False)
class InflectionData:
    points: list
    degenerate: bool
    shear: object = field(repr=False)

    def potential(self, i: int):
        """Q_i(y) = U''/(U - U_s) with the removable point at y_i filled in."""
        sh = self.shear
        p = self.points[i]
        if isinstance(sh, ShearProfile) and len(self.points) == 1 and p.y == 0.0 and p.value == 0.0:
            return sh.Q
        return _quotient(sh, p)


def _derivs(shear):
    if isinstance(shear, ShearProfile):
        return shear.U, shear.dU, shear.d2U, shear.d3U
    return shear.U, shear.dU, shear.d2U, shear.third


def _quotient(shear, p: Inflection):
    U, dU, d2U, d3U = _derivs(shear)
    q0 = float(d3U(p.y) / dU(p.y))

    def direct(y):
        return d2U(y) / (U(y) - p.value)

    qp, qm = float(direct(p.y + BLEND)), float(direct(p.y - BLEND))
    c1 = (qp - qm) / (2 * BLEND)
    c2 = (qp + qm - 2 * q0) / (2 * BLEND**2)

    def q(y):
        y = np.asarray(y, dtype=float)
        d = y - p.y
        near = np.abs(d) < BLEND
        safe = np.where(near, p.y + 2 * BLEND, y)
        return np.where(near, q0 + c1 * d + c2 * d * d, direct(safe))

    return q


def find_inflections(shear, n: int = 4001) -> InflectionData:
    """Inflection points of U by a sign-change scan of U'' and a root polish."""
    U, dU, d2U, _ = _derivs(shear)
    y = np.linspace(-1.0, 1.0, n)
    slope = dU(y)
    if not (np.all(slope > 0) or np.all(slope < 0)):
        raise NotMonotone("U' changes sign or vanishes")
    u2 = np.asarray(d2U(y), dtype=float)
    scale = float(np.max(np.abs(u2)))
    if scale <= 1e-12 * float(np.max(np.abs(slope))):
        return InflectionData([], True, shear)
    tiny = 1e-13 * scale
    sgn = np.where(np.abs(u2) <= tiny, 0, np.sign(u2))
    roots = []
    i = 1
    while i < n - 1:
        if sgn[i] == 0:
            j = i
            while j < n - 1 and sgn[j] == 0:
                j += 1
            left, right = sgn[i - 1], sgn[j] if j < n else 0
            if left * right < 0 and j - i == 1:
                roots.append(y[i])
            i = j
            continue
        if sgn[i] * sgn[i + 1] < 0 and i + 1 < n - 1:
            roots.append(brentq(lambda t: float(d2U(t)), y[i], y[i + 1], xtol=1e-15))
        i += 1
    if sgn[0] * sgn[1] < 0:
        roots.insert(0, brentq(lambda t: float(d2U(t)), y[0], y[1], xtol=1e-15))
    points = []
    for r in roots:
        if abs(float(d2U(r))) > 1e-10 * scale:
            continue
        points.append(Inflection(float(r), float(U(r))))
    return InflectionData(points, False, shear)


@dataclass(frozen=True)
class PeriodWindow:
    t_min: float
    lam: float

    @property
    def empty(self) -> bool:
        return math.isinf(self.t_min)


@dataclass(frozen=True)
class StabilityVerdict:
    verdict: str
    eigenvalues: list
    errors: list
    threshold: float
    period: float
    window: PeriodWindow | None
    inflections: list


def _in_family(shear, data: InflectionData) -> bool:
    return (isinstance(shear, ShearProfile) and not shear.is_couette and len(data.points) == 1
            and data.points[0].y == 0.0 and data.points[0].value == 0.0)


def _lowest(q, grid: DirichletGrid):
    """Richardson value of the lowest eigenvalue and its error estimate."""
    lams = []
    for _ in range(3):
        lams.append(lowest_eigenpair(q, grid).lam)
        grid = grid.refined()
    r1 = (4 * lams[1] - lams[0]) / 3
    r2 = (4 * lams[2] - lams[1]) / 3
    return r2, abs(r2 - r1)


def _grid_for(shear) -> DirichletGrid:
    if isinstance(shear, ShearProfile) and not shear.is_couette:
        return DirichletGrid.for_width(shear.gamma, 8.0, n_min=127)
    return DirichletGrid(127)


def classify(shear, T: float, margin_factor: float = 10.0) -> StabilityVerdict:
    """Stable / Unstable / Indeterminate for perturbations of x-period T."""
    if not T > 0:
        raise ValidationError("period must be positive")
    data = find_inflections(shear)
    threshold = -((2 * math.pi / T) ** 2)
    grid = _grid_for(shear)
    if data.degenerate or not data.points:
        lam, err = _lowest(lambda y: np.zeros_like(y), grid)
        lams, errs = [lam], [err]
    else:
        lams, errs = [], []
        for i in range(len(data.points)):
            lam, err = _lowest(data.potential(i), grid)
            lams.append(lam)
            errs.append(err)
    margins = [margin_factor * e + 1e-12 * max(1.0, abs(threshold)) for e in errs]
    window = None
    if all(lam > threshold + m for lam, m in zip(lams, margins)):
        verdict = STABLE
    elif _in_family(shear, data):
        lam = lams[0]
        window = PeriodWindow(2 * math.pi / math.sqrt(-lam), lam) if lam < 0 else PeriodWindow(math.inf, lam)
        verdict = UNSTABLE if lam < threshold - margins[0] else INDETERMINATE
    else:
        verdict = INDETERMINATE
    return StabilityVerdict(verdict, lams, errs, threshold, float(T), window, data.points)


def unstable_period_window(profile: ShearProfile) -> PeriodWindow:
    """(T_min, infinity) with T_min = 2 pi/sqrt(-lambda); empty (t_min = inf) if lambda >= 0."""
    if not isinstance(profile, ShearProfile):
        raise ValidationError("the window is defined for the single-inflection family")
    if profile.is_couette:
        return PeriodWindow(math.inf, math.pi**2 / 4)
    lam, _, _ = converged_eigenvalue(profile)
    if lam >= 0:
        return PeriodWindow(math.inf, lam)
    return PeriodWindow(2 * math.pi / math.sqrt(-lam), lam)


def perturbed_shear(rng: np.random.Generator, size: float, n_terms: int = 6) -> ShearFunction:
    """U = y + int_0^y g with g a random trigonometric sum, ||g||_{H^2} = size."""
    j = np.arange(1, n_terms + 1)
    a = rng.standard_normal(n_terms) / j**2
    b = rng.standard_normal(n_terms) / j**2
    w = 0.5 * math.pi * j

    def g(y, nu=0):
        ph = np.multiply.outer(np.asarray(y, float), w)
        if nu == 0:
            return np.cos(ph) @ a + np.sin(ph) @ b
        if nu == 1:
            return (-np.sin(ph) * w) @ a + (np.cos(ph) * w) @ b
        return (-np.cos(ph) * w**2) @ a + (-np.sin(ph) * w**2) @ b

    scale = size / hs_norm_1d(g(np.linspace(-1, 1, 1025)), 2.0)
    a *= scale
    b *= scale

    def anti(y):
        ph = np.multiply.outer(np.asarray(y, float), w)
        return (np.sin(ph) / w) @ a + ((1 - np.cos(ph)) / w) @ b

    return ShearFunction(lambda y: np.asarray(y) + anti(y), lambda y: 1 + g(y),
                         lambda y: g(y, 1), lambda y: g(y, 2))
