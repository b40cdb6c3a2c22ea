"""Linearized inviscid damping around Couette flow.

Around U = y the vorticity is transported exactly, omega(t, x, y) =
omega0(x - t*y, y), so each x-mode k only picks up the factor exp(-i k t y).
The stream function of mode k solves

    (-d^2/dy^2 + k^2) psi_k = omega0_k(y) exp(-i k t y),   psi_k(+-1) = 0,

which is done in two independent ways: Green's-function quadrature with
composite Gauss-Legendre panels and a Numerov tridiagonal solve with one
Richardson step.  Period in x is 2*pi throughout.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.integrate import simpson
from scipy.interpolate import CubicHermiteSpline, CubicSpline
from scipy.linalg import solve_banded

from .errors import NonPositiveNorm, OscillationUnresolved, ValidationError
from .spectral1d import fit_loglog

MAX_POINTS = 2**20
_GAUSS = leggauss(10)


@dataclass(frozen=True, eq=False)
class ModalVorticity:
    """One x-mode ``exp(i k x) omega0_k(y)`` of the initial vorticity."""

    k: int
    omega0: object

    def __post_init__(self):
        if int(self.k) != self.k or self.k == 0:
            raise ValidationError("mode number k must be a nonzero integer")
        object.__setattr__(self, "k", int(self.k))
        if not callable(self.omega0):
            vals = np.asarray(self.omega0)
            if vals.ndim != 1 or len(vals) < 4:
                raise ValidationError("sampled omega0 needs at least 4 values on [-1, 1]")
            y = np.linspace(-1.0, 1.0, len(vals))
            re, im = CubicSpline(y, vals.real), CubicSpline(y, np.imag(vals))
            object.__setattr__(self, "omega0", lambda yy: re(yy) + 1j * im(yy))

    def __call__(self, y):
        return np.asarray(self.omega0(np.asarray(y, dtype=float)), dtype=complex)

    def scaled(self, c) -> "ModalVorticity":
        return ModalVorticity(self.k, lambda y: c * self(y))

    def shifted(self, t0: float) -> "ModalVorticity":
        """The free-streamed mode at time t0, used as a new initial condition."""
        return ModalVorticity(self.k, free_stream(self, t0))


@dataclass(frozen=True, eq=False)
class ModalStream:
    k: int
    t: float
    y: np.ndarray = field(repr=False)
    psi: np.ndarray = field(repr=False)
    dpsi: np.ndarray = field(repr=False)

    def l2(self) -> float:
        return math.sqrt(simpson(np.abs(self.psi) ** 2, x=self.y))

    def dl2(self) -> float:
        return math.sqrt(simpson(np.abs(self.dpsi) ** 2, x=self.y))


@dataclass(frozen=True)
class DecayFit:
    times: list
    norms: list
    exponent: float
    residual: float
    kind: str
    constant: float
    window: tuple


def free_stream(mode: ModalVorticity, t: float):
    """y -> omega0_k(y) exp(-i k t y)."""
    if t < 0:
        raise ValidationError("time must be nonnegative")
    k = mode.k
    return lambda y: mode(y) * np.exp(-1j * k * t * np.asarray(y, dtype=float))


def green_function(k: int, y, y0):
    """Dirichlet Green's function of -d^2/dy^2 + k^2 on [-1, 1].

    G = sinh k(y_< + 1) sinh k(1 - y_>) / (k sinh 2k); for |k| >= 30 the
    exponentially scaled form is used.
    """
    if k == 0:
        raise ValidationError("k must be nonzero")
    k = abs(k)
    y, y0 = np.asarray(y, dtype=float), np.asarray(y0, dtype=float)
    lo, hi = np.minimum(y, y0), np.maximum(y, y0)
    if k < 30:
        return np.sinh(k * (lo + 1)) * np.sinh(k * (1 - hi)) / (k * math.sinh(2 * k))
    a, b = k * (lo + 1), k * (1 - hi)
    return (np.exp(a + b - 2 * k) * (-np.expm1(-2 * a)) * (-np.expm1(-2 * b))
            / (2 * k * -math.expm1(-4 * k)))


def _panels(k: int, t: float, max_width: float, min_panels: int = 64) -> int:
    width = max_width
    if t > 0:
        width = min(width, math.pi / (4 * abs(k) * t))
    n = max(min_panels, math.ceil(2.0 / width))
    n += n % 2
    if n > MAX_POINTS:
        raise OscillationUnresolved(f"{n} panels needed for k t = {abs(k) * t:.3g}")
    return n


def _green_solve(k: int, g, edges: np.ndarray):
    """psi and psi' at the panel edges for right-hand side g (callable)."""
    k = abs(k)
    x, w = _GAUSS
    lo, hi = edges[:-1], edges[1:]
    half = 0.5 * (hi - lo)
    pts = 0.5 * (lo + hi)[:, None] + half[:, None] * x[None, :]
    gv = g(pts.ravel()).reshape(pts.shape)
    wts = half[:, None] * w[None, :]
    # left sums: int_{-1}^{y} exp(-k(y - s)) (1 - exp(-2k(s + 1))) g(s) ds
    left_pan = np.sum(wts * np.exp(-k * (hi[:, None] - pts)) * -np.expm1(-2 * k * (pts + 1)) * gv, axis=1)
    right_pan = np.sum(wts * np.exp(-k * (pts - lo[:, None])) * -np.expm1(-2 * k * (1 - pts)) * gv, axis=1)
    decay = np.exp(-k * (hi - lo))
    n = len(edges)
    left = np.zeros(n, dtype=complex)
    right = np.zeros(n, dtype=complex)
    for j in range(n - 1):
        left[j + 1] = decay[j] * left[j] + left_pan[j]
    for j in range(n - 2, -1, -1):
        right[j] = decay[j] * right[j + 1] + right_pan[j]
    denom = 2 * k * -math.expm1(-4 * k)
    em_r = np.exp(-2 * k * (1 - edges))
    em_l = np.exp(-2 * k * (edges + 1))
    psi = ((1 - em_r) * left + (1 - em_l) * right) / denom
    dpsi = k * (-(1 + em_r) * left + (1 + em_l) * right) / denom
    return psi, dpsi


def _numerov(k: int, g, n: int):
    """Numerov solution on n intervals; returns (y, psi) including the walls."""
    y = np.linspace(-1.0, 1.0, n + 1)
    h = 2.0 / n
    gv = g(y)
    c = h * h * k * k / 12.0
    m = n - 1
    ab = np.zeros((3, m), dtype=complex)
    ab[0, 1:] = 1 - c
    ab[1] = -(2 + 10 * c)
    ab[2, :-1] = 1 - c
    rhs = -(h * h / 12.0) * (gv[2:] + 10 * gv[1:-1] + gv[:-2])
    psi = np.zeros(n + 1, dtype=complex)
    psi[1:-1] = solve_banded((1, 1), ab, rhs)
    return y, psi


def _direct_solve(k: int, g, n: int):
    """Numerov on n and 4n intervals with Richardson (order 4), sampled at the n-grid."""
    y, coarse = _numerov(k, g, n)
    _, fine = _numerov(k, g, 4 * n)
    psi = fine[::4] + (fine[::4] - coarse) / 255.0
    return y, psi


def modal_stream(mode: ModalVorticity, t: float, route: str = "green",
                 max_width: float = 1.0 / 64, panels: int | None = None) -> ModalStream:
    """Stream function of one mode at time t on a uniform grid that resolves exp(-i k t y).

    ``route`` is "green" (panel quadrature of the Green kernel) or "direct"
    (Numerov tridiagonal solve; psi' by central differences).
    """
    if t < 0:
        raise ValidationError("time must be nonnegative")
    g = free_stream(mode, t)
    n = panels or _panels(mode.k, t, max_width)
    if route == "green":
        y = np.linspace(-1.0, 1.0, n + 1)
        psi, dpsi = _green_solve(mode.k, g, y)
        psi[0] = psi[-1] = 0.0
    elif route == "direct":
        sub = 4
        if 16 * n * sub > MAX_POINTS:
            raise OscillationUnresolved("direct solve exceeds the grid cap")
        yf, psif = _direct_solve(mode.k, g, n * sub)
        y, psi = yf[::sub], psif[::sub]
        dpsi = np.gradient(psif, yf, edge_order=2)[::sub]
    else:
        raise ValidationError(f"unknown route {route!r}")
    return ModalStream(mode.k, float(t), y, psi, dpsi)


def solver_agreement(mode: ModalVorticity, t: float) -> float:
    """max |psi_green - psi_direct| / max |psi| on the shared grid."""
    a = modal_stream(mode, t, "green")
    b = modal_stream(mode, t, "direct", panels=len(a.y) - 1)
    scale = max(np.max(np.abs(a.psi)), 1e-300)
    return float(np.max(np.abs(a.psi - b.psi)) / scale)


def velocity_norms(modes, t: float, max_width: float = 1.0 / 64) -> tuple[float, float]:
    """(||u||_{L^2}, ||v||_{L^2}) over (0, 2 pi) x (-1, 1), u = psi_y, v = -psi_x."""
    modes = list(modes)
    if not modes:
        raise ValidationError("need at least one mode")
    u2 = v2 = 0.0
    for mode in sorted(modes, key=lambda m: (abs(m.k), m.k)):
        st = modal_stream(mode, t, max_width=max_width)
        v2 += mode.k**2 * st.l2() ** 2
        u2 += st.dl2() ** 2
    return math.sqrt(2 * math.pi * u2), math.sqrt(2 * math.pi * v2)


def velocity_field(modes, t: float, nx: int = 32, ny: int = 257):
    """Real velocity (u, v) on a tensor grid from the modes and their conjugates."""
    x = 2 * math.pi * np.arange(nx) / nx
    y = np.linspace(-1.0, 1.0, ny)
    u = np.zeros((nx, ny))
    v = np.zeros((nx, ny))
    for mode in modes:
        st = modal_stream(mode, t)
        re = CubicHermiteSpline(st.y, st.psi.real, st.dpsi.real)
        im = CubicHermiteSpline(st.y, st.psi.imag, st.dpsi.imag)
        psi = re(y) + 1j * im(y)
        dpsi = re(y, 1) + 1j * im(y, 1)
        e = np.exp(1j * mode.k * x)[:, None]
        u += 2 * np.real(e * dpsi[None, :])
        v += 2 * np.real(-1j * mode.k * e * psi[None, :])
    return x, y, u, v


def vorticity_l2(modes, t: float, n: int = 4097) -> float:
    y = np.linspace(-1.0, 1.0, n)
    total = sum(simpson(np.abs(free_stream(m, t)(y)) ** 2, x=y) for m in modes)
    return math.sqrt(2 * math.pi * total)


_KINDS = {"u": "u_L2", "u_L2": "u_L2", "v": "v_L2", "v_L2": "v_L2",
          "velocity": "velocity_L2", "velocity_L2": "velocity_L2"}


def fit_series(times, norms, kind: str = "series") -> DecayFit:
    times = np.asarray(times, dtype=float)
    norms = np.asarray(norms, dtype=float)
    if np.any(np.diff(times) <= 0):
        raise ValidationError("times must increase strictly")
    if not np.all(np.isfinite(norms)) or np.any(norms <= 0):
        raise NonPositiveNorm("norms must be finite and positive")
    slope, icpt = fit_loglog(times, norms)
    resid = float(np.sqrt(np.mean((np.log(norms) - (icpt + slope * np.log(times))) ** 2)))
    const = float(np.max(times ** abs(slope) * norms))
    return DecayFit(times.tolist(), norms.tolist(), slope, resid, kind, const,
                    (float(times[0]), float(times[-1])))


def log_times(t0: float, t1: float, n: int) -> np.ndarray:
    return np.geomspace(t0, t1, n)


def decay_fit(modes, times, norm_kind: str = "v_L2") -> DecayFit:
    """Least-squares slope of log ||.|| against log t."""
    kind = _KINDS.get(norm_kind)
    if kind is None:
        raise ValidationError(f"unknown norm kind {norm_kind!r}")
    times = np.asarray(times, dtype=float)
    if len(times) < 3 or times[0] < 5 or times[-1] < 10 * times[0] * (1 - 1e-12):
        raise ValidationError("need >= 3 times from t >= 5 spanning at least one decade")
    ratios = times[1:] / times[:-1]
    if np.max(np.abs(ratios / ratios[0] - 1)) > 1e-6:
        raise ValidationError("times must be log-spaced")
    norms = []
    for t in times:
        u, v = velocity_norms(modes, t)
        norms.append({"u_L2": u, "v_L2": v, "velocity_L2": math.hypot(u, v)}[kind])
    return fit_series(times, norms, kind)


@dataclass(frozen=True)
class AsymptoticRow:
    t: float
    norm: float
    change: float
    bound: float


@dataclass(frozen=True)
class Asymptotics:
    rows: list
    limit_norm: float
    nonvanishing: bool


def profile_at(mode: ModalVorticity, t: float, y: np.ndarray) -> np.ndarray:
    """f_k(t, y) = t^2 exp(i k t y) psi_k(t, y) on the given nodes."""
    st = modal_stream(mode, t)
    re = CubicSpline(st.y, st.psi.real)(y)
    im = CubicSpline(st.y, st.psi.imag)(y)
    return t * t * np.exp(1j * mode.k * t * y) * (re + 1j * im)


def single_mode_asymptotics(mode: ModalVorticity, t_list, n: int = 1025,
                            threshold: float = 1e-4) -> Asymptotics:
    """Cauchy table of f_k(t): change between consecutive times and change*t."""
    t_list = sorted(float(t) for t in t_list)
    if len(t_list) < 2 or t_list[0] <= 0:
        raise ValidationError("need at least two positive times")
    y = np.linspace(-1.0, 1.0, n)
    prof = [profile_at(mode, t, y) for t in t_list]
    norm = lambda v: math.sqrt(simpson(np.abs(v) ** 2, x=y))  # noqa: E731
    rows = []
    for i, t in enumerate(t_list):
        change = norm(prof[i + 1] - prof[i]) if i + 1 < len(t_list) else math.nan
        rows.append(AsymptoticRow(t, norm(prof[i]), change, change * t))
    last = rows[-1].norm
    return Asymptotics(rows, last, last > threshold)


# ---------------------------------------------------------------------------
# initial data
# ---------------------------------------------------------------------------

def cosine_mode(k: int = 1) -> ModalVorticity:
    return ModalVorticity(k, lambda y: np.cos(0.5 * math.pi * np.asarray(y)))


def jump_mode(k: int = 1) -> ModalVorticity:
    """cos(pi y/2) with its sign flipped for y < 0 (a jump at y = 0)."""
    return ModalVorticity(k, lambda y: np.sign(y) * np.cos(0.5 * math.pi * np.asarray(y)))


NAMED_PROFILES = {"cos": cosine_mode, "jump": jump_mode}


def rough_modes(rng: np.random.Generator, k_max: int = 8, rho: float = 0.6,
                sigma: float = 0.0, n_y: int = 32) -> list[ModalVorticity]:
    """Random modes with ||omega0_k|| ~ |k|^(-rho) and sine coefficients ~ j^(-1/2 - sigma)."""
    modes = []
    j = np.arange(1, n_y + 1)
    for k in range(1, k_max + 1):
        c = (rng.standard_normal(n_y) + 1j * rng.standard_normal(n_y)) * j ** (-0.5 - sigma)
        c *= k ** (-rho) / math.sqrt(np.sum(np.abs(c) ** 2))

        def w(y, c=c):
            return np.sin(0.5 * math.pi * np.multiply.outer(np.asarray(y) + 1, j)) @ c

        modes.append(ModalVorticity(k, w))
    return modes
