"""Steady cat's-eye states near a shear flow.

A steady Euler flow with stream function ``psi = psi0(y) + phi(xi, y)``,
``xi = alpha*x``, satisfies

    alpha^2 phi_xixi + phi_yy = f(psi0 + phi) - f(psi0),

where the vorticity function f is built from the base shear through
``f(psi0(y)) = U'(y)``.  The perturbation is even and 2*pi periodic in xi and
vanishes at y = +-1.  We discretize with cosine collocation in xi and second
order differences in y, then follow the branch leaving the trivial solution
at ``alpha^2 = k0^2`` with a bordered Newton method.
"""
from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.interpolate import BPoly, CubicSpline
from scipy.optimize import brentq
from scipy.sparse.linalg import splu

from .errors import (
    BifurcationNotFound,
    BracketInvalid,
    DegenerateHessian,
    NewtonDiverged,
    NonMonotoneProfile,
    NotOdd,
    RangeEscape,
    ValidationError,
)
from .profiles import ShearProfile
from .sobolev import Field2D, hs_norm_2d_isotropic
from .spectral1d import DirichletGrid, eigenpair, limit_beta

log = logging.getLogger(__name__)

RESIDUAL_TOL = 1e-9


# ---------------------------------------------------------------------------
# vorticity function f
# ---------------------------------------------------------------------------

def _smooth_cutoff(t, nu=0):
    """1 - smoothstep(t) on [0, 1], 0 beyond; C^2 at both ends."""
    t = np.clip(t, 0.0, 1.0)
    if nu == 0:
        return 1.0 - t**3 * (10.0 - 15.0 * t + 6.0 * t * t)
    if nu == 1:
        return -30.0 * t**2 * (1.0 - t) ** 2
    return -60.0 * t * (1.0 - t) * (1.0 - 2.0 * t)


def _u_over_y(profile: ShearProfile, y):
    y = np.asarray(y, dtype=float)
    safe = np.where(y == 0.0, 1.0, y)
    return np.where(y == 0.0, profile.dU(0.0), profile.U(safe) / safe)


@dataclass(frozen=True, eq=False)
class NonlinearityF:
    """Vorticity function f with f(psi0(y)) = U'(y) on the core range.

    The core is a quintic Hermite table in psi built from the exact values
    f = U', f' = Q and f'' = Q'/U at the nodes psi0(y_j).  Outside
    [psi_min, psi_max] the second order Taylor polynomial at the nearest end
    is multiplied by a C^2 cutoff that reaches zero after ``margin``.
    """

    psi_min: float
    psi_max: float
    margin: float
    table: BPoly = field(repr=False)
    dtable: BPoly = field(repr=False)
    ends: tuple = field(repr=False)

    def _extension(self, psi, side, nu):
        if side < 0:
            end, (f0, f1, f2) = self.psi_min, self.ends[0]
            delta = psi - end
            t, dt = -delta / self.margin, -1.0 / self.margin
        else:
            end, (f0, f1, f2) = self.psi_max, self.ends[1]
            delta = psi - end
            t, dt = delta / self.margin, 1.0 / self.margin
        p = (f0 + f1 * delta + 0.5 * f2 * delta**2, f1 + f2 * delta, np.full_like(delta, f2))
        c = (_smooth_cutoff(t), _smooth_cutoff(t, 1) * dt, _smooth_cutoff(t, 2) * dt * dt)
        if nu == 0:
            return p[0] * c[0]
        if nu == 1:
            return p[1] * c[0] + p[0] * c[1]
        return p[2] * c[0] + 2 * p[1] * c[1] + p[0] * c[2]

    def __call__(self, psi, nu: int = 0):
        psi = np.asarray(psi, dtype=float)
        lo, hi = self.psi_min, self.psi_max
        core = np.clip(psi, lo, hi)
        if nu == 0:
            out = self.table(core)
        elif nu == 1:
            out = self.dtable(core)
        elif nu == 2:
            out = self.dtable(core, 1)
        else:
            raise ValidationError("only f, f' and f'' are available")
        left, right = psi < lo, psi > hi
        if np.any(left):
            out = np.where(left, self._extension(psi, -1, nu), out)
        if np.any(right):
            out = np.where(right, self._extension(psi, 1, nu), out)
        return out

    def deriv(self, psi):
        return self(psi, 1)

    def in_core(self, psi) -> np.ndarray:
        psi = np.asarray(psi)
        return (psi >= self.psi_min) & (psi <= self.psi_max)

    @property
    def support(self) -> tuple[float, float]:
        return self.psi_min - self.margin, self.psi_max + self.margin


def _table_nodes(gamma: float, n_inner: int = 1200, n_outer: int = 300) -> np.ndarray:
    edge = min(1.0, 12.0 * gamma)
    y = np.linspace(0.0, edge, n_inner)
    if edge < 1.0:
        y = np.concatenate((y, np.linspace(edge, 1.0, n_outer)[1:]))
    return y


def build_nonlinearity(profile: ShearProfile) -> NonlinearityF:
    """Tabulate f on the image of psi0 over [0, 1] and extend it to C^2_0(R)."""
    probe = np.linspace(0.0, 1.0, 2001)
    u_pos, u_neg = profile.U(probe), profile.U(-probe)
    if np.max(np.abs(u_pos + u_neg)) > 1e-12 * max(1.0, np.max(np.abs(u_pos))):
        raise NotOdd("U must be odd with U(0) = 0")
    y = _table_nodes(profile.gamma)
    psi = profile.psi0(y)
    if np.any(np.diff(psi) <= 0):
        raise NonMonotoneProfile("psi0 must increase strictly on (0, 1]")
    f0 = profile.dU(y)
    f1 = profile.Q(y)
    f2 = profile.dQ_dz(y) / _u_over_y(profile, y)
    table = BPoly.from_derivatives(psi, np.column_stack((f0, f1, f2)))
    lo, hi = float(psi[0]), float(psi[-1])
    ends = ((f0[0], f1[0], f2[0]), (f0[-1], f1[-1], f2[-1]))
    return NonlinearityF(lo, hi, 0.25 * (hi - lo), table, table.derivative(), ends)


# ---------------------------------------------------------------------------
# discretization
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SteadyGrid:
    """Cosine collocation points xi_j = j*pi/M (j = 0..M) times interior y nodes."""

    modes: int
    ygrid: DirichletGrid

    def __post_init__(self):
        if int(self.modes) != self.modes or not 4 <= self.modes <= 64:
            raise ValidationError("number of cosine modes must lie in [4, 64]")
        m = np.arange(self.modes + 1)
        xi = math.pi * m / self.modes
        ends = np.ones(self.modes + 1)
        ends[0] = ends[-1] = 0.5
        synth = np.cos(np.outer(xi, m))
        analysis = (2.0 / self.modes) * (ends[:, None] * synth.T) * ends[None, :]
        object.__setattr__(self, "_synth", synth)
        object.__setattr__(self, "_analysis", analysis)
        object.__setattr__(self, "_d2", synth @ np.diag(-(m**2.0)) @ analysis)

    @classmethod
    def for_profile(cls, profile: ShearProfile, cells_per_width: float = 16.0,
                    modes: int = 16, n_min: int = 127) -> "SteadyGrid":
        return cls(modes, DirichletGrid.for_width(profile.gamma, cells_per_width, n_min))

    @property
    def n(self) -> int:
        return self.ygrid.n

    @property
    def shape(self) -> tuple[int, int]:
        return (self.ygrid.n, self.modes + 1)

    @property
    def xi(self) -> np.ndarray:
        return math.pi * np.arange(self.modes + 1) / self.modes

    @property
    def y(self) -> np.ndarray:
        return self.ygrid.nodes

    @property
    def xi_weights(self) -> np.ndarray:
        """Weights of int_0^{2 pi} d xi for even functions sampled at xi_j."""
        w = np.full(self.modes + 1, 2 * math.pi / self.modes)
        w[0] = w[-1] = math.pi / self.modes
        return w

    @property
    def d2_xi(self) -> np.ndarray:
        return self._d2

    def coefficients(self, values: np.ndarray) -> np.ndarray:
        """Cosine coefficients along the last axis."""
        return values @ self._analysis.T

    def l2(self, values: np.ndarray) -> float:
        """L^2 norm over (0, 2 pi) x (-1, 1)."""
        return math.sqrt(self.ygrid.dy * float(np.sum(values**2 @ self.xi_weights)))

    def inner(self, u: np.ndarray, v: np.ndarray) -> float:
        """L^2 inner product divided by pi, so that ||phi0 cos xi|| = 1."""
        return self.ygrid.dy * float(np.sum((u * v) @ self.xi_weights)) / math.pi

    def refined(self) -> "SteadyGrid":
        return SteadyGrid(self.modes, self.ygrid.refined())

    def laplacian(self, alpha_sq: float) -> sp.csr_matrix:
        n, m1 = self.shape
        dy = self.ygrid.dy
        dyy = sp.diags([np.full(n - 1, 1.0), np.full(n, -2.0), np.full(n - 1, 1.0)],
                       [-1, 0, 1]) / dy**2
        return (alpha_sq * sp.kron(sp.identity(n), sp.csr_matrix(self._d2))
                + sp.kron(dyy, sp.identity(m1))).tocsr()


def _apply_laplacian(values, alpha_sq, grid: SteadyGrid):
    dy = grid.ygrid.dy
    padded = np.pad(values, ((1, 1), (0, 0)))
    phi_yy = (padded[2:] - 2 * values + padded[:-2]) / dy**2
    return alpha_sq * values @ grid.d2_xi.T + phi_yy


def _base(profile, f, grid):
    psi0 = profile.psi0(grid.y)
    return psi0, f(psi0)


def residual_values(values, alpha_sq, f: NonlinearityF, profile, grid: SteadyGrid,
                    base=None) -> np.ndarray:
    """alpha^2 phi_xixi + phi_yy - (f(phi + psi0) - f(psi0)) on the collocation grid."""
    psi0, f_base = base if base is not None else _base(profile, f, grid)
    return _apply_laplacian(values, alpha_sq, grid) - (f(psi0[:, None] + values) - f_base[:, None])


def jacobian(values, alpha_sq, f: NonlinearityF, profile, grid: SteadyGrid, base=None):
    """Sparse derivative of ``residual_values`` in phi (row-major y, xi ordering)."""
    psi0 = base[0] if base is not None else profile.psi0(grid.y)
    fp = f(psi0[:, None] + values, 1).ravel()
    return (grid.laplacian(alpha_sq) - sp.diags(fp)).tocsc()


def _as_collocation(phi, grid: SteadyGrid) -> np.ndarray:
    if isinstance(phi, Field2D):
        vals = np.asarray(phi.values)
        if vals.shape != (2 * grid.modes, grid.n + 2):
            raise ValidationError("Field2D layout does not match the steady grid")
        return vals[: grid.modes + 1, 1:-1].T.copy()
    vals = np.asarray(phi, dtype=float)
    if vals.shape != grid.shape:
        raise ValidationError(f"expected collocation values of shape {grid.shape}")
    return vals


def _to_field(values: np.ndarray, grid: SteadyGrid, period: float = 2 * math.pi,
              boundary=(0.0, 0.0)) -> Field2D:
    full = np.concatenate((values.T, values.T[-2:0:-1]), axis=0)
    lo = np.broadcast_to(np.asarray(boundary[0], dtype=float), (full.shape[0], 1))
    hi = np.broadcast_to(np.asarray(boundary[1], dtype=float), (full.shape[0], 1))
    return Field2D(np.hstack((lo, full, hi)), period)


def residual(phi, alpha_sq: float, f: NonlinearityF, profile: ShearProfile,
             grid: SteadyGrid | None = None, warn: bool = True) -> Field2D:
    """Residual of the steady equation as a field on [0, 2 pi) x [-1, 1].

    ``phi`` is a Field2D in the layout of ``SteadyState.phi`` or a collocation
    array of shape ``grid.shape``.
    """
    if grid is None:
        if not isinstance(phi, Field2D):
            raise ValidationError("a grid is needed for collocation arrays")
        nx, ny = np.asarray(phi.values).shape
        grid = SteadyGrid(nx // 2, DirichletGrid(ny - 2))
    values = _as_collocation(phi, grid)
    psi0 = profile.psi0(grid.y)
    psi = psi0[:, None] + values
    if warn and not np.all(f.in_core(psi)):
        warnings.warn(
            f"psi reaches {psi.min():.3e}..{psi.max():.3e}, outside the core range "
            f"[{f.psi_min:.3e}, {f.psi_max:.3e}]", RangeEscape, stacklevel=2)
    res = residual_values(values, alpha_sq, f, profile, grid, (psi0, f(psi0)))
    return _to_field(res, grid)


# ---------------------------------------------------------------------------
# states and continuation
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SteadyState:
    alpha_sq: float
    amplitude: float
    values: np.ndarray = field(repr=False)
    grid: SteadyGrid = field(repr=False)
    residual: float
    profile: ShearProfile = field(repr=False)
    f: NonlinearityF = field(repr=False)
    kernel: np.ndarray = field(repr=False)
    psi_range: tuple = (0.0, 0.0)

    @property
    def alpha(self) -> float:
        return math.sqrt(self.alpha_sq)

    @property
    def period(self) -> float:
        return 2 * math.pi / self.alpha

    @property
    def phi(self) -> Field2D:
        return _to_field(self.values, self.grid)

    @property
    def coefficients(self) -> np.ndarray:
        """Cosine coefficients c_m(y), shape (n, M+1)."""
        return self.grid.coefficients(self.values)

    @property
    def escaped(self) -> bool:
        """True when psi left the core range of f (only the eye interior does)."""
        return self.psi_range[0] < self.f.psi_min or self.psi_range[1] > self.f.psi_max

    def remainder(self) -> float:
        """||phi - amplitude * phi0 cos xi|| in the norm where ||phi0 cos xi|| = 1."""
        lead = self.amplitude * self.kernel[:, None] * np.cos(self.grid.xi)[None, :]
        d = self.values - lead
        return math.sqrt(self.grid.inner(d, d))

    def odd_energy(self) -> float:
        """Energy of the part odd in xi on the full periodic grid."""
        full = np.asarray(self.phi.values)
        odd = 0.5 * (full - np.roll(full[::-1], 1, axis=0))
        return float(np.sum(odd**2))


@dataclass
class _Problem:
    profile: ShearProfile
    f: NonlinearityF
    grid: SteadyGrid
    kernel: np.ndarray
    base: tuple = None

    def __post_init__(self):
        self.base = _base(self.profile, self.f, self.grid)
        self.kdir = self.kernel[:, None] * np.cos(self.grid.xi)[None, :]
        self.wmat = (self.grid.ygrid.dy / math.pi) * np.broadcast_to(
            self.grid.xi_weights, self.grid.shape)

    def F(self, values, alpha_sq):
        return residual_values(values, alpha_sq, self.f, self.profile, self.grid, self.base)

    def amplitude(self, values) -> float:
        return self.grid.inner(values, self.kdir)

    def state(self, values, alpha_sq, res) -> SteadyState:
        psi = self.base[0][:, None] + values
        return SteadyState(alpha_sq, self.amplitude(values), values, self.grid, res,
                           self.profile, self.f, self.kernel, (float(psi.min()), float(psi.max())))


def _newton(prob: _Problem, values, alpha_sq, cvec, calpha, rhs,
            tol: float = RESIDUAL_TOL, max_iter: int = 25, last_good=None):
    """Bordered Newton for F = 0 and cvec.phi + calpha*alpha^2 = rhs."""
    grid = prob.grid

    def merit(v, a2):
        r = prob.F(v, a2)
        g = float(np.sum(cvec * v)) + calpha * a2 - rhs
        return r, g, math.hypot(grid.l2(r), g)

    r, g, norm = merit(values, alpha_sq)
    for _ in range(max_iter):
        if norm <= 1e-3 * tol:
            break
        J = jacobian(values, alpha_sq, prob.f, prob.profile, grid, prob.base)
        col = (values @ grid.d2_xi.T).ravel()
        A = sp.bmat([[J, sp.csc_matrix(col[:, None])],
                     [sp.csr_matrix(cvec.ravel()[None, :]), sp.csr_matrix([[calpha]])]]).tocsc()
        step = splu(A).solve(-np.concatenate((r.ravel(), [g])))
        dv, da = step[:-1].reshape(grid.shape), step[-1]
        t = 1.0
        for _ in range(9):
            r_new, g_new, n_new = merit(values + t * dv, alpha_sq + t * da)
            if n_new < (1 - 1e-4 * t) * norm:
                break
            t *= 0.5
        else:
            if norm <= tol:
                break
            raise NewtonDiverged(f"line search failed at residual {norm:.3e}", last_good)
        values, alpha_sq, r, g, norm = values + t * dv, alpha_sq + t * da, r_new, g_new, n_new
    if not norm <= tol:
        raise NewtonDiverged(f"Newton stopped at residual {norm:.3e}", last_good)
    return values, alpha_sq, grid.l2(r)


def bifurcation_point(profile: ShearProfile, f: NonlinearityF, grid: SteadyGrid):
    """Lowest eigenpair of -d^2/dy^2 + f'(psi0) on the steady grid: (k0^2, phi0)."""
    q = f(profile.psi0(grid.y), 1)
    pair = eigenpair(q, grid.ygrid)
    return -pair.lam, pair.phi


def _fixed_amplitude(prob: _Problem, beta: float):
    return prob.wmat * prob.kdir, 0.0, beta


def continue_branch(f: NonlinearityF, profile: ShearProfile, k0_sq: float, step: float,
                    n_steps: int, grid: SteadyGrid | None = None,
                    switch_after: float = 5.0, bifurcation_tol: float = 1e-3) -> list[SteadyState]:
    """Follow the branch from (0, k0^2) in the direction +phi0 cos xi (sign of step).

    Amplitudes up to ``switch_after*|step|`` are imposed exactly; beyond that
    pseudo-arclength steps of the same length are taken.
    """
    if not k0_sq > 0:
        raise ValidationError("k0^2 must be positive (lambda < 0)")
    if step == 0 or n_steps < 1:
        raise ValidationError("need a nonzero step and n_steps >= 1")
    grid = grid or SteadyGrid.for_profile(profile)
    k0_grid, phi0 = bifurcation_point(profile, f, grid)
    if abs(k0_grid - k0_sq) > bifurcation_tol * max(1.0, k0_sq):
        raise BifurcationNotFound(
            f"linearization not singular at k0^2 = {k0_sq:.6f}: grid value {k0_grid:.6f}")
    prob = _Problem(profile, f, grid, phi0)
    states: list[SteadyState] = []
    hist = [(np.zeros(grid.shape), k0_grid)]
    sign = math.copysign(1.0, step)
    h = abs(step)
    for i in range(1, n_steps + 1):
        last_good = states[-1] if states else None
        (v1, a1) = hist[-1]
        if i <= switch_after + 1e-9:
            beta = sign * h * i
            if len(hist) >= 2:
                v0, a0 = hist[-2]
                guess = (2 * v1 - v0, 2 * a1 - a0)
            else:
                guess = (beta * prob.kdir, k0_grid)
            cons = _fixed_amplitude(prob, beta)
        else:
            v0, a0 = hist[-2]
            dv, da = v1 - v0, a1 - a0
            scale = math.sqrt(grid.inner(dv, dv) + da * da)
            tv, ta = dv / scale, da / scale
            guess = (v1 + h * tv, a1 + h * ta)
            cvec = prob.wmat * tv
            cons = (cvec, ta, float(np.sum(cvec * v1)) + ta * a1 + h)
        v, a2, res = _newton(prob, guess[0], guess[1], *cons, last_good=last_good)
        states.append(prob.state(v, a2, res))
        hist.append((v, a2))
        log.debug("branch step %d: beta=%.4e alpha^2=%.8f res=%.2e", i, states[-1].amplitude, a2, res)
    return states


def state_at_amplitude(profile: ShearProfile, r: float, grid: SteadyGrid | None = None,
                       f: NonlinearityF | None = None, max_step: float | None = None) -> SteadyState:
    """Branch state with amplitude exactly r, reached by fixed-amplitude steps."""
    f = f or build_nonlinearity(profile)
    grid = grid or SteadyGrid.for_profile(profile)
    k0_sq, phi0 = bifurcation_point(profile, f, grid)
    if not k0_sq > 0:
        raise BifurcationNotFound("no negative eigenvalue: the shear has no cat's-eye branch")
    prob = _Problem(profile, f, grid, phi0)
    if r == 0:
        return prob.state(np.zeros(grid.shape), k0_sq, 0.0)
    max_step = max_step or abs(r)
    n = max(1, math.ceil(abs(r) / max_step - 1e-12))
    v, a2 = np.zeros(grid.shape), k0_sq
    state = None
    for i in range(1, n + 1):
        beta = r * i / n
        guess = v * (i / (i - 1)) if i > 1 else beta * prob.kdir
        v, a2, res = _newton(prob, guess, a2, *_fixed_amplitude(prob, beta), last_good=state)
        state = prob.state(v, a2, res)
    return state


def shear_state(profile: ShearProfile, period: float = 2 * math.pi,
                grid: SteadyGrid | None = None, f: NonlinearityF | None = None) -> SteadyState:
    """The trivial solution phi = 0 viewed with x-period ``period``."""
    f = f or build_nonlinearity(profile)
    grid = grid or SteadyGrid.for_profile(profile)
    zeros = np.zeros(grid.shape)
    psi0 = profile.psi0(grid.y)
    return SteadyState((2 * math.pi / period) ** 2, 0.0, zeros, grid, 0.0, profile, f,
                       np.zeros(grid.n), (float(psi0.min()), float(psi0.max())))


def refined_residual(state: SteadyState) -> float:
    """Residual of the state interpolated (cubic, in y) onto the once-refined grid."""
    fine = state.grid.refined()
    full_y = state.grid.ygrid.full_nodes
    padded = np.pad(state.values, ((1, 1), (0, 0)))
    values = CubicSpline(full_y, padded, axis=0)(fine.y)
    res = residual_values(values, state.alpha_sq, state.f, state.profile, fine)
    return fine.l2(res)


# ---------------------------------------------------------------------------
# period matching
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PeriodSample:
    a: float
    period: float


def _period_for(profile, r, cells_per_width, modes):
    f = build_nonlinearity(profile)
    grid = SteadyGrid.for_profile(profile, cells_per_width, modes)
    k0_sq, _ = bifurcation_point(profile, f, grid)
    if k0_sq <= 0:
        return math.inf, None
    state = state_at_amplitude(profile, r, grid, f)
    return state.period, state


def match_period(gamma: float, target_T: float, r: float, bracket=(0.6, 1.0), family=None,
                 cells_per_width: float = 16.0, modes: int = 16, rtol: float = 1e-7,
                 max_iter: int = 80):
    """Find a in the bracket so that the branch state of amplitude r has period target_T.

    The period decreases as a grows, so the bracket must satisfy
    T(a1) > target_T > T(a2).  Returns (state, samples); ``state.profile.a``
    is the matched a.
    """
    if not target_T > 0:
        raise ValidationError("target period must be positive")
    family = family or (lambda a: ShearProfile(gamma=gamma, a=a))
    a1, a2 = map(float, bracket)
    if not a1 < a2:
        raise BracketInvalid("need a1 < a2")
    samples = []
    t1, _ = _period_for(family(a1), r, cells_per_width, modes)
    t2, s2 = _period_for(family(a2), r, cells_per_width, modes)
    samples += [PeriodSample(a1, t1), PeriodSample(a2, t2)]
    if not (t1 - target_T) * (t2 - target_T) < 0:
        raise BracketInvalid(
            f"T({a1}) = {t1:.6g} and T({a2}) = {t2:.6g} do not straddle {target_T:.6g}")
    best = s2
    for _ in range(max_iter):
        mid = 0.5 * (a1 + a2)
        tm, sm = _period_for(family(mid), r, cells_per_width, modes)
        samples.append(PeriodSample(mid, tm))
        if sm is not None:
            best = sm
        if abs(tm - target_T) <= rtol * target_T:
            break
        if (tm - target_T) * (t1 - target_T) > 0:
            a1, t1 = mid, tm
        else:
            a2, t2 = mid, tm
    else:
        raise NewtonDiverged("period bisection did not reach the tolerance", best)
    return best, samples


def predicted_bracket(target_T: float, bracket=(0.6, 1.0)) -> tuple[float, float]:
    """Limit wavenumbers beta_{a1}, beta_{a2} for the bracket (gamma -> 0)."""
    return limit_beta(bracket[0]).beta, limit_beta(bracket[1]).beta


# ---------------------------------------------------------------------------
# streamlines, vorticity and the steady-Euler check
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CriticalPoint:
    xi: float
    y: float
    kind: str
    det_hessian: float
    grad_norm: float


@dataclass(frozen=True)
class StreamlineReport:
    points: list
    cats_eye: bool
    eye_half_height: float


class _StreamFunction:
    """psi(xi, y) = psi0(y) + sum_m c_m(y) cos(m xi) with splined c_m."""

    def __init__(self, state: SteadyState):
        self.profile = state.profile
        coeffs = np.pad(state.coefficients, ((1, 1), (0, 0)))
        self.spline = CubicSpline(state.grid.ygrid.full_nodes, coeffs, axis=0)
        self.m = np.arange(coeffs.shape[1])

    def derivs(self, xi, y):
        c, cy, cyy = self.spline(y), self.spline(y, 1), self.spline(y, 2)
        cos, sin = np.cos(self.m * xi), np.sin(self.m * xi)
        m = self.m
        psi = float(self.profile.psi0(y)) + c @ cos
        grad = np.array([-(m * c) @ sin, float(self.profile.U(y)) + cy @ cos])
        hess = np.array([[-(m * m * c) @ cos, -(m * cy) @ sin],
                         [-(m * cy) @ sin, float(self.profile.dU(y)) + cyy @ cos]])
        return psi, grad, hess


def _critical_point(sf: _StreamFunction, xi, y, tol=1e-8, max_iter=50):
    for _ in range(max_iter):
        _, grad, hess = sf.derivs(xi, y)
        if np.linalg.norm(grad) <= 1e-3 * tol:
            break
        dxi, dy = np.linalg.solve(hess, -grad)
        xi, y = xi + dxi, y + dy
    _, grad, hess = sf.derivs(xi, y)
    return xi, y, grad, hess


def classify_streamlines(state: SteadyState, profile: ShearProfile | None = None) -> StreamlineReport:
    """Critical points of psi seeded at (0, 0) and (pi, 0), typed by det Hess."""
    if state.amplitude == 0 or not np.any(state.values):
        return StreamlineReport([], False, 0.0)
    if profile is not None and profile is not state.profile:
        state = SteadyState(state.alpha_sq, state.amplitude, state.values, state.grid,
                            state.residual, profile, state.f, state.kernel, state.psi_range)
    sf = _StreamFunction(state)
    points = []
    for seed in (0.0, math.pi):
        xi, y, grad, hess = _critical_point(sf, seed, 0.0)
        det = float(np.linalg.det(hess))
        if abs(det) < 1e-12:
            raise DegenerateHessian(f"det Hess = {det:.3e} at ({xi:.4f}, {y:.4f})")
        if np.linalg.norm(grad) > 1e-8 or abs(y) >= 1:
            continue
        xi = xi % (2 * math.pi)
        if any(abs(p.xi - xi) < 1e-6 and abs(p.y - y) < 1e-6 for p in points):
            continue
        points.append(CriticalPoint(xi, y, "saddle" if det < 0 else "center", det,
                                    float(np.linalg.norm(grad))))
    saddles = [p for p in points if p.kind == "saddle"]
    centers = [p for p in points if p.kind == "center"]
    eye = len(saddles) == 1 and len(centers) == 1
    height = 0.0
    if eye:
        level = sf.derivs(saddles[0].xi, saddles[0].y)[0]
        c = centers[0]
        g = lambda yy: sf.derivs(c.xi, yy)[0] - level  # noqa: E731
        if g(c.y) < 0 < g(0.99):
            height = brentq(g, c.y, 0.99, xtol=1e-14) - c.y
    return StreamlineReport(points, eye, height)


def vorticity_field(state: SteadyState) -> Field2D:
    """omega = f(psi) on [0, T) x [-1, 1] (x = xi/alpha)."""
    full_y = state.grid.ygrid.full_nodes
    psi0 = state.profile.psi0(full_y)
    padded = np.pad(state.values, ((1, 1), (0, 0)))
    omega = state.f(psi0[:, None] + padded)
    full = np.concatenate((omega.T, omega.T[-2:0:-1]), axis=0)
    return Field2D(full, state.period)


def vorticity_distance(state: SteadyState, profile: ShearProfile | None = None, s: float = 1.0) -> float:
    """H^s((0, T) x (-1, 1)) distance of the vorticity to the Couette value 1."""
    omega = vorticity_field(state)
    return hs_norm_2d_isotropic(Field2D(omega.values - 1.0, omega.period), s)


def _d1_4(v, dy):
    return (v[:-4] - 8 * v[1:-3] + 8 * v[3:-1] - v[4:]) / (12 * dy)


def _d2_4(v, dy):
    return (-v[:-4] + 16 * v[1:-3] - 30 * v[2:-2] + 16 * v[3:-1] - v[4:]) / (12 * dy * dy)


def advection_residual(state: SteadyState) -> float:
    """||u . grad omega||_{L^2} with omega = Laplacian(psi) by fourth-order differences.

    psi0 enters through its exact derivatives U, U', U''.

    Nodes within four cells of the walls are left out.
    """
    grid = state.grid
    dy = grid.ygrid.dy
    y = grid.ygrid.full_nodes
    phi = np.pad(state.values, ((1, 1), (0, 0)))
    m = np.arange(grid.modes + 1)
    xi = grid.xi
    coeffs = grid.coefficients(phi)
    a = state.alpha
    phi_xi = -(coeffs * m) @ np.sin(np.outer(m, xi))
    phi_xixi = -(coeffs * m * m) @ np.cos(np.outer(m, xi))
    omega = a * a * phi_xixi[2:-2] + _d2_4(phi, dy)
    c_om = grid.coefficients(omega)
    omega_xi = -(c_om * m) @ np.sin(np.outer(m, xi))
    omega_y = _d1_4(omega, dy) + state.profile.d2U(y[4:-4])[:, None]
    u = state.profile.U(y[4:-4])[:, None] + _d1_4(phi, dy)[2:-2]
    v = -a * phi_xi[4:-4]
    adv = u * a * omega_xi[2:-2] + v * omega_y
    return math.sqrt(dy * float(np.sum(adv**2 @ grid.xi_weights)) / a)
