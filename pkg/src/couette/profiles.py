"""Shear profiles near Couette flow and their Rayleigh potentials.

The family is ``U(y) = y + a*gamma**2 * h(y/gamma)`` on the channel [-1, 1]
with ``h = erf`` by default.  A user supplied odd ``h`` can be given as a
sampled table; it is represented by a cubic spline and all derivatives are
those of the spline.
"""
from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.interpolate import CubicSpline
from scipy.special import erf

from .errors import NonMonotoneProfile, NonPositiveB0, NotOdd, ValidationError

log = logging.getLogger(__name__)

SQRT_PI = math.sqrt(math.pi)
TWO_OVER_SQRT_PI = 2.0 / SQRT_PI
MIN_SLOPE = 1e-8

# Taylor coefficients of erf(x)/x = (2/sqrt(pi)) * sum c_n x^(2n)
_LAMBDA_SERIES = [(-1) ** n / (math.factorial(n) * (2 * n + 1)) for n in range(14)]


def sigma(x):
    """Normalized Gaussian exp(-x^2)/sqrt(pi)."""
    return np.exp(-np.square(x)) / SQRT_PI


def erf_over_x(x):
    """Lambda(x) = erf(x)/x, with the removable singularity at 0 filled in."""
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < 1e-3
    xs = np.where(small, 1.0, x)
    out = erf(xs) / xs
    x2 = np.square(x)
    series = TWO_OVER_SQRT_PI * (1.0 - x2 / 3.0 + x2 * x2 / 10.0)
    return np.where(small, series, out)


def erf_over_x_deriv_over_x(x):
    """Lambda'(x)/x, needed for the second derivative of f."""
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < 0.5
    xs = np.where(small, 1.0, x)
    direct = (TWO_OVER_SQRT_PI * xs * np.exp(-xs * xs) - erf(xs)) / xs**3
    x2 = np.square(x)
    series = np.zeros_like(x2)
    for n in range(len(_LAMBDA_SERIES) - 1, 0, -1):
        series = series * x2 + 2 * n * _LAMBDA_SERIES[n]
    series *= TWO_OVER_SQRT_PI
    return np.where(small, series, direct)


@dataclass(frozen=True, eq=False)
class ShearProfile:
    """Monotone shear ``U(y) = y + a gamma^2 h(y/gamma)`` on [-1, 1].

    ``kind`` is ``"erf"`` or ``"h"``; for ``"h"`` the odd function h is given
    by samples ``h_x``, ``h_values`` on a symmetric window [-R, R] and is
    continued by constants outside it.
    """

    gamma: float
    a: float
    kind: str = "erf"
    h_x: np.ndarray | None = None
    h_values: np.ndarray | None = None
    _spline: CubicSpline | None = field(default=None, init=False, repr=False)
    _anti: CubicSpline | None = field(default=None, init=False, repr=False)

    def __post_init__(self):
        if not (self.gamma > 0 and math.isfinite(self.gamma)):
            raise ValidationError(f"gamma must be positive, got {self.gamma}")
        if not math.isfinite(self.a):
            raise ValidationError("a must be finite")
        if self.kind == "h":
            if self.h_x is None or self.h_values is None:
                raise ValidationError("kind='h' needs h_x and h_values")
            x = np.asarray(self.h_x, dtype=float)
            h = np.asarray(self.h_values, dtype=float)
            if x.ndim != 1 or x.shape != h.shape or len(x) < 8:
                raise ValidationError("h table must be two equal 1-D columns (>= 8 rows)")
            if np.any(np.diff(x) <= 0):
                raise ValidationError("h table abscissae must be strictly increasing")
            spline = CubicSpline(x, h)
            probe = np.linspace(0.0, min(-x[0], x[-1]), 257)
            scale = max(np.max(np.abs(h)), 1e-300)
            if np.max(np.abs(spline(probe) + spline(-probe))) > 1e-6 * scale:
                raise NotOdd("h must be odd: h(-x) = -h(x)")
            object.__setattr__(self, "h_x", x)
            object.__setattr__(self, "h_values", h)
            object.__setattr__(self, "_spline", spline)
            object.__setattr__(self, "_anti", spline.antiderivative())
        elif self.kind != "erf":
            raise ValidationError(f"unknown profile kind {self.kind!r}")
        y = np.linspace(-1.0, 1.0, 20001)
        slope = self.dU(y)
        if np.min(slope) <= MIN_SLOPE:
            raise NonMonotoneProfile(
                f"U' must stay above {MIN_SLOPE}; min U' = {np.min(slope):.3e}"
            )

    # -- constructors -------------------------------------------------------
    @classmethod
    def couette(cls) -> "ShearProfile":
        return cls(gamma=1.0, a=0.0)

    @classmethod
    def from_h_table(cls, gamma, a, x, h) -> "ShearProfile":
        return cls(gamma=gamma, a=a, kind="h", h_x=np.asarray(x), h_values=np.asarray(h))

    @classmethod
    def from_config(cls, block: dict, base_dir: str | Path = ".") -> "ShearProfile":
        """Build from ``{kind, gamma, a, h_table_path?}``."""
        kind = block.get("kind", "erf").lower()
        gamma = float(block["gamma"])
        a = float(block["a"])
        if kind == "erf":
            return cls(gamma=gamma, a=a)
        if kind in ("h", "generalh", "general_h"):
            x, h = read_h_table(Path(base_dir) / block["h_table_path"])
            return cls.from_h_table(gamma, a, x, h)
        raise ValidationError(f"unknown profile kind {kind!r}")

    @property
    def is_couette(self) -> bool:
        return self.a == 0.0

    # -- h and its derivatives (general kind) -------------------------------
    def _h(self, x, nu=0):
        lo, hi = self.h_x[0], self.h_x[-1]
        xc = np.clip(x, lo, hi)
        val = self._spline(xc, nu)
        if nu > 0:
            val = np.where((x < lo) | (x > hi), 0.0, val)
        return val

    def _h_integral(self, x):
        """int_0^x h, continued linearly outside the table window."""
        lo, hi = self.h_x[0], self.h_x[-1]
        xc = np.clip(x, lo, hi)
        out = self._anti(xc) - self._anti(0.0)
        out = out + np.where(x > hi, self._spline(hi) * (x - hi), 0.0)
        out = out + np.where(x < lo, self._spline(lo) * (x - lo), 0.0)
        return out

    # -- evaluators ---------------------------------------------------------
    def U(self, y):
        y = np.asarray(y, dtype=float)
        x = y / self.gamma
        if self.kind == "erf":
            return y + self.a * self.gamma**2 * erf(x)
        return y + self.a * self.gamma**2 * self._h(x)

    def dU(self, y):
        y = np.asarray(y, dtype=float)
        x = y / self.gamma
        if self.kind == "erf":
            return 1.0 + TWO_OVER_SQRT_PI * self.a * self.gamma * np.exp(-x * x)
        return 1.0 + self.a * self.gamma * self._h(x, 1)

    def d2U(self, y):
        y = np.asarray(y, dtype=float)
        x = y / self.gamma
        if self.kind == "erf":
            return -2.0 * TWO_OVER_SQRT_PI * self.a * x * np.exp(-x * x)
        return self.a * self._h(x, 2)

    def d3U(self, y):
        y = np.asarray(y, dtype=float)
        x = y / self.gamma
        if self.kind == "erf":
            return -2.0 * TWO_OVER_SQRT_PI * self.a / self.gamma * (1 - 2 * x * x) * np.exp(-x * x)
        return self.a / self.gamma * self._h(x, 3)

    def Q(self, y):
        """Rayleigh potential U''/U in factored form (finite at y = 0)."""
        y = np.asarray(y, dtype=float)
        x = y / self.gamma
        g, a = self.gamma, self.a
        if self.kind == "erf":
            return -4.0 * a / g * sigma(x) / (1.0 + g * a * erf_over_x(x))
        small = np.abs(x) < 1e-8
        xs = np.where(small, 1.0, x)
        h2_over_x = np.where(small, self._h(0.0, 3), self._h(xs, 2) / xs)
        h_over_x = np.where(small, self._h(0.0, 1), self._h(xs) / xs)
        return a / g * h2_over_x / (1.0 + a * g * h_over_x)

    def dQ_dz(self, y):
        """Derivative of Q with respect to z = y^2/2 (even, finite at 0)."""
        y = np.asarray(y, dtype=float)
        x = y / self.gamma
        g, a = self.gamma, self.a
        if self.kind == "erf":
            D = 1.0 + g * a * erf_over_x(x)
            return 4 * a * sigma(x) / g**3 * (2.0 / D + g * a * erf_over_x_deriv_over_x(x) / D**2)
        # spline h''' is only piecewise constant: difference Q in z instead
        z = 0.5 * y * y
        dz = 1e-3 * g * g
        lo = np.maximum(z - dz, 0.0)
        hi = z + dz
        return (self.Q(np.sqrt(2 * hi)) - self.Q(np.sqrt(2 * lo))) / (hi - lo)

    def psi0(self, y):
        """Base stream function: psi0' = U, psi0(0) = 0 (even in y)."""
        y = np.asarray(y, dtype=float)
        x = y / self.gamma
        g, a = self.gamma, self.a
        if self.kind == "erf":
            return 0.5 * y * y + a * g**3 * (x * erf(x) + (np.exp(-x * x) - 1.0) / SQRT_PI)
        return 0.5 * y * y + a * g**3 * self._h_integral(x)

    def potential(self) -> "RayleighPotential":
        return RayleighPotential(self)

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "gamma": self.gamma, "a": self.a}
        if self.kind == "h":
            out["h_window"] = [float(self.h_x[0]), float(self.h_x[-1])]
        return out


@dataclass(frozen=True)
class RayleighPotential:
    """Q(y) = U''(y)/U(y) of a shear profile."""

    profile: ShearProfile

    def __call__(self, y):
        return self.profile.Q(y)

    @property
    def width(self) -> float:
        return self.profile.gamma


def eval_U(profile: ShearProfile, y):
    return profile.U(y)


def eval_U_prime(profile: ShearProfile, y):
    return profile.dU(y)


def eval_Q(potential: RayleighPotential | ShearProfile, y):
    prof = potential.profile if isinstance(potential, RayleighPotential) else potential
    return prof.Q(y)


def read_h_table(path) -> tuple[np.ndarray, np.ndarray]:
    """Read a two-column CSV ``x, h(x)``; a non-numeric first row is a header."""
    xs, hs = [], []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or not row[0].strip():
                continue
            try:
                xs.append(float(row[0]))
                hs.append(float(row[1]))
            except ValueError:
                if xs:
                    raise ValidationError(f"bad row in {path}: {row}") from None
    return np.array(xs), np.array(hs)


def general_h_b0(h_x, h_values, return_tail: bool = False):
    """b0 = -int_R h''(x)/x dx for an odd table h (equals 4 for h = erf).

    The integral is taken over the table window with an 8-point Gauss rule per
    spline interval; the neglected tails are bounded by 2|h'(R)|/R.
    """
    x = np.asarray(h_x, dtype=float)
    h = np.asarray(h_values, dtype=float)
    spline = CubicSpline(x, h)
    probe = np.linspace(0.0, min(-x[0], x[-1]), 129)
    if np.max(np.abs(spline(probe) + spline(-probe))) > 1e-6 * max(np.max(np.abs(h)), 1e-300):
        raise NotOdd("h must be odd")
    nodes, weights = leggauss(8)
    edges = x
    if not np.any(edges == 0.0) and edges[0] < 0 < edges[-1]:
        edges = np.sort(np.append(edges, 0.0))
    lo, hi = edges[:-1], edges[1:]
    mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
    pts = mid[:, None] + half[:, None] * nodes[None, :]
    integrand = spline(pts, 2) / pts
    total = float(np.sum(half[:, None] * weights[None, :] * integrand))
    R = min(-x[0], x[-1])
    tail = 2.0 * abs(float(spline(R, 1))) / R
    b0 = -total
    log.debug("b0 = %.12g (tail bound %.2e)", b0, tail)
    if b0 <= 0:
        raise NonPositiveB0(f"b0 = {b0:.6g} <= 0: profile family not admissible")
    return (b0, tail) if return_tail else b0
