"""Integer and fractional Sobolev norms on (-1, 1) and on periodic strips.

Fractional orders use the Sobolev-Slobodeckij (Gagliardo) seminorm

    |v|_{sigma}^2 = int int |v(x) - v(y)|^2 / |x - y|^(1 + 2 sigma) dx dy,

evaluated with the tensor trapezoid rule.  The diagonal is left out and
replaced by its leading singular term, which is the zeta-function correction
of the trapezoid rule for |t|^(1 - 2 sigma).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.integrate import quad, simpson
from scipy.interpolate import CubicSpline
from scipy.special import gamma as gamma_fn
from scipy.special import zeta

from .errors import ExponentOutOfRange, NonVanishing, UnresolvedField, ValidationError, ZeroMeanViolation
from .spectral1d import fit_loglog


@dataclass(frozen=True, eq=False)
class Field1D:
    """Samples on the uniform grid ``linspace(-1, 1, len(values))``."""

    values: np.ndarray
    func: object = None

    def __post_init__(self):
        v = np.asarray(self.values)
        if v.ndim != 1 or len(v) < 64:
            raise ValidationError("Field1D needs at least 64 samples")
        object.__setattr__(self, "values", v)

    @classmethod
    def from_function(cls, func, n: int = 513) -> "Field1D":
        y = np.linspace(-1.0, 1.0, n)
        return cls(np.asarray(func(y)), func)

    @property
    def y(self) -> np.ndarray:
        return np.linspace(-1.0, 1.0, len(self.values))

    @property
    def dy(self) -> float:
        return 2.0 / (len(self.values) - 1)

    def __call__(self, y):
        if self.func is not None:
            return self.func(y)
        if np.iscomplexobj(self.values):
            re = CubicSpline(self.y, self.values.real)
            im = CubicSpline(self.y, self.values.imag)
            return re(y) + 1j * im(y)
        return CubicSpline(self.y, self.values)(y)


def _l2_sq(v, dy):
    return float(simpson(np.abs(v) ** 2, dx=dy))


def derivatives(v: np.ndarray, dy: float, m: int) -> list[np.ndarray]:
    """[v, v', ..., v^(m)] by second-order finite differences."""
    out = [v]
    for _ in range(m):
        out.append(np.gradient(out[-1], dy, edge_order=2))
    return out


def gagliardo_sq(v: np.ndarray, dy: float, sigma: float, dv: np.ndarray | None = None) -> float:
    """Squared Gagliardo seminorm of order sigma in (0, 1) of grid samples."""
    if not 0.0 < sigma < 1.0:
        raise ValidationError("sigma must lie in (0, 1)")
    n = len(v)
    w = np.full(n, dy)
    w[0] = w[-1] = 0.5 * dy
    idx = np.arange(n)
    expo = 1.0 + 2.0 * sigma
    total = 0.0
    chunk = max(1, 4_000_000 // n)
    for start in range(0, n, chunk):
        rows = slice(start, min(n, start + chunk))
        diff = np.abs(v[rows, None] - v[None, :]) ** 2
        dist = np.abs(idx[rows, None] - idx[None, :]).astype(float) * dy
        dist[dist == 0.0] = np.inf
        total += float(w[rows] @ (diff / dist**expo) @ w)
    if dv is None:
        dv = np.gradient(v, dy, edge_order=2)
    p = 1.0 - 2.0 * sigma
    sides = np.full(n, 2.0)
    sides[0] = sides[-1] = 1.0
    local = -zeta(-p) * dy ** (1.0 + p) * float(np.sum(w * sides * np.abs(dv) ** 2))
    return total + local


def _hs_sq(v: np.ndarray, dy: float, s: float) -> float:
    m = int(math.floor(s + 1e-12))
    sig = s - m
    ders = derivatives(v, dy, m + (1 if sig > 1e-12 else 0))
    total = sum(_l2_sq(d, dy) for d in ders[: m + 1])
    if sig > 1e-12:
        total += gagliardo_sq(ders[m], dy, sig, ders[m + 1])
    return total


def hs_norm_1d(u: Field1D | np.ndarray, s: float, check: bool = True) -> float:
    """H^s(-1, 1) norm, 0 <= s <= 3.

    Integer part: sum of L^2 norms of derivatives up to floor(s).  Fractional
    part: Gagliardo seminorm of the floor(s)-th derivative.  With ``check``
    the value is recomputed on every other sample and UnresolvedField is
    raised if the two differ by more than 1%.
    """
    if not 0.0 <= s <= 3.0:
        raise ValidationError(f"s = {s} outside [0, 3]")
    v = np.asarray(u.values if isinstance(u, Field1D) else u)
    if len(v) < 64:
        raise ValidationError("need at least 64 samples")
    dy = 2.0 / (len(v) - 1)
    val = math.sqrt(_hs_sq(v, dy, s))
    if check and len(v) % 2 == 1 and (len(v) - 1) // 2 >= 64:
        coarse = math.sqrt(_hs_sq(v[::2], 2 * dy, s))
        if abs(coarse - val) > 0.01 * max(val, 1e-300):
            raise UnresolvedField(
                f"H^{s} norm changes by {abs(coarse - val) / val:.1%} under grid halving"
            )
    return val


def gaussian_field(gamma: float, points_per_width: float = 20.0) -> Field1D:
    """gamma * exp(-(y/gamma)^2) sampled with spacing <= gamma/points_per_width."""
    cells = math.ceil(2.0 * points_per_width / gamma)
    cells += cells % 2
    cells = max(cells, 128)
    func = lambda y: gamma * np.exp(-((np.asarray(y) / gamma) ** 2))  # noqa: E731
    return Field1D.from_function(func, cells + 1)


def gaussian_constant(s: float) -> float:
    """C_s with ||gamma exp(-(y/gamma)^2)||_{Hdot^s(R)} = C_s gamma^(3/2 - s), by quadrature."""
    val, _ = quad(lambda xi: xi ** (2 * s) * math.exp(-0.5 * xi * xi), 0.0, np.inf, limit=200)
    # C_s^2 = (1/2pi) * pi * int_R |xi|^(2s) e^(-xi^2/2) = int_0^inf
    return math.sqrt(val)


def gaussian_constant_closed(s: float) -> float:
    return math.sqrt(0.5 * 2 ** (s + 0.5) * gamma_fn(s + 0.5))


@dataclass(frozen=True)
class GaussianScaling:
    s: float
    gammas: list
    norms: list
    exponent: float
    prefactor: float
    c_s: float
    fit_gammas: list


def gaussian_hs_scaling(s: float, gammas, drop_largest: bool | None = None,
                        points_per_width: float = 20.0) -> GaussianScaling:
    """Log-log fit of ||gamma exp(-(y/gamma)^2)||_{H^s(-1,1)} against gamma.

    The largest gamma is dropped from the fit when at least three points
    remain (``drop_largest=None``).
    """
    if not 0.0 <= s <= 1.4 + 1e-12:
        raise ValidationError("s must lie in [0, 1.4]")
    gammas = [float(g) for g in gammas]
    if any(g > 0.2 for g in gammas) or any(b >= a for a, b in zip(gammas, gammas[1:])):
        raise ValidationError("gammas must be decreasing and <= 0.2")
    norms = [hs_norm_1d(gaussian_field(g, points_per_width), s) for g in gammas]
    if drop_largest is None:
        drop_largest = len(gammas) >= 4
    start = 1 if drop_largest else 0
    slope, icpt = fit_loglog(gammas[start:], norms[start:])
    return GaussianScaling(s, gammas, norms, slope, math.exp(icpt), gaussian_constant(s), gammas[start:])


@dataclass(frozen=True, eq=False)
class Field2D:
    """Values on ``x_i = i*T/nx`` (periodic) times ``y = linspace(-1, 1, ny)``."""

    values: np.ndarray
    period: float = 2 * math.pi

    def __post_init__(self):
        v = np.asarray(self.values)
        if v.ndim != 2 or v.shape[1] < 64:
            raise ValidationError("Field2D needs shape (nx, ny) with ny >= 64")
        object.__setattr__(self, "values", v)

    @property
    def x(self) -> np.ndarray:
        nx = self.values.shape[0]
        return self.period * np.arange(nx) / nx

    @property
    def y(self) -> np.ndarray:
        return np.linspace(-1.0, 1.0, self.values.shape[1])

    def modes(self):
        """(integer wavenumbers k, coefficients h_k(y)) with h = sum_k e^{2 pi i k x/T} h_k."""
        nx = self.values.shape[0]
        coeffs = np.fft.fft(self.values, axis=0) / nx
        ks = np.rint(np.fft.fftfreq(nx) * nx).astype(int)
        return ks, coeffs

    @classmethod
    def from_modes(cls, modes: dict, nx: int, y: np.ndarray, period: float = 2 * math.pi):
        x = period * np.arange(nx) / nx
        vals = np.zeros((nx, len(y)), dtype=complex)
        for k, hk in modes.items():
            vals += np.exp(2j * math.pi * k * x / period)[:, None] * np.asarray(hk)[None, :]
        if np.max(np.abs(vals.imag)) <= 1e-14 * max(np.max(np.abs(vals)), 1e-300):
            vals = vals.real
        return cls(vals, period)


def _active(coeffs, tol=1e-15):
    amp = np.max(np.abs(coeffs), axis=1)
    return amp > tol * max(np.max(amp), 1e-300)


def hs_norm_2d(h: Field2D, s_x: float, s_y: float) -> float:
    """Mixed norm (sum_k |2 pi k/T|^(2 s_x) ||h_k||_{H^{s_y}}^2)^(1/2)."""
    ks, coeffs = h.modes()
    dy = 2.0 / (h.values.shape[1] - 1)
    scale = max(np.max(np.abs(h.values)), 1e-300)
    zero = ks == 0
    if s_x < 0 and np.max(np.abs(coeffs[zero])) > 1e-12 * scale:
        raise ZeroMeanViolation("negative s_x needs a field with zero x-mean")
    active = _active(coeffs)
    total = 0.0
    for k, ck, on in sorted(zip(ks, coeffs, active), key=lambda t: (abs(t[0]), t[0])):
        if not on:
            continue
        if k == 0:
            if s_x != 0:
                continue
            weight = 1.0
        else:
            weight = abs(2 * math.pi * k / h.period) ** (2 * s_x)
        total += weight * _hs_sq(ck, dy, s_y)
    return math.sqrt(total)


def hs_norm_2d_isotropic(h: Field2D, s: float) -> float:
    """Equivalent H^s((0,T) x (-1,1)) norm built from mode-wise 1-D norms.

    ``T * sum_k [((1 + kappa_k^2)^s - 1) ||h_k||_{L^2}^2 + ||h_k||_{H^s}^2]``;
    for x-independent fields this is sqrt(T) times the 1-D H^s norm.
    """
    ks, coeffs = h.modes()
    dy = 2.0 / (h.values.shape[1] - 1)
    active = _active(coeffs)
    total = 0.0
    for k, ck, on in sorted(zip(ks, coeffs, active), key=lambda t: (abs(t[0]), t[0])):
        if not on:
            continue
        kappa = 2 * math.pi * k / h.period
        total += ((1 + kappa**2) ** s - 1) * _l2_sq(ck, dy) + _hs_sq(ck, dy, s)
    return math.sqrt(h.period * total)


def _lp_of_quotient(u, y0: float, p: float, n_panels: int) -> float:
    edges = np.linspace(-1.0, 1.0, n_panels + 1)
    if -1.0 < y0 < 1.0:
        # merge the nearest edge into y0 so no sliver panel forms next to it
        edges[1 + np.argmin(np.abs(edges[1:-1] - y0))] = y0
        edges = np.unique(edges)
    nodes, weights = leggauss(10)
    lo, hi = edges[:-1], edges[1:]
    mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
    pts = mid[:, None] + half[:, None] * nodes[None, :]
    vals = np.abs(np.asarray(u(pts.ravel())).reshape(pts.shape) / (pts - y0)) ** p
    return float(np.sum(half[:, None] * weights[None, :] * vals)) ** (1.0 / p)


def hardy_ratio(u: Field1D, y0: float, p: float, s: float) -> float:
    """||u/(y - y0)||_{L^p} / ||u||_{H^s} for u vanishing at y0.

    The quotient is integrated with a 10-point Gauss rule on panels that end
    at y0, so the (at worst |y - y0|^(s - 3/2)) singularity is never sampled.
    The endpoint p = 1/(3/2 - s) is accepted; beyond it ExponentOutOfRange.
    """
    if not 0.5 < s < 1.5:
        raise ValidationError("s must lie in (1/2, 3/2)")
    if not -1.0 <= y0 <= 1.0:
        raise ValidationError("y0 must lie in [-1, 1]")
    p_max = 1.0 / (1.5 - s)
    if p < 1.0 or p > p_max * (1 + 1e-12):
        raise ExponentOutOfRange(f"need 1 <= p <= {p_max:.4g}, got p = {p}")
    scale = max(1.0, float(np.max(np.abs(u.values))))
    at = abs(complex(u(np.array([y0]))[0]))
    if at > 1e-10 * scale:
        raise NonVanishing(f"|u(y0)| = {at:.2e}")
    num = _lp_of_quotient(u, y0, p, len(u.values) - 1)
    return num / hs_norm_1d(u, s)


def band_limited_vanishing(rng: np.random.Generator, y0: float, modes: int = 8):
    """Random trigonometric polynomial on [-1, 1] shifted to vanish at y0."""
    m = np.arange(1, modes + 1)
    a = rng.standard_normal(modes) / m
    b = rng.standard_normal(modes) / m
    c = rng.standard_normal()

    def g(y):
        y = np.asarray(y, dtype=float)
        ph = np.pi * np.multiply.outer(y, m) / 2
        return c * y + np.cos(ph) @ a + np.sin(ph) @ b

    g0 = float(g(np.array([y0]))[0])
    return lambda y: g(y) - g0
