"""Dirichlet Sturm-Liouville problem ``-phi'' + Q phi = lambda phi`` on (-1, 1).

Second-order central differences on a uniform grid give a symmetric
tridiagonal matrix.  Its lowest eigenvalue is isolated by Sturm-sequence
bisection and the eigenvector is recovered by inverse iteration.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_banded

from .errors import GridTooCoarse, NoConvergence, NotNormalized, OutOfRange, ValidationError
from .profiles import RayleighPotential, ShearProfile


@dataclass(frozen=True)
class DirichletGrid:
    """Interior nodes ``y_j = -1 + j*dy``, ``j = 1..n``, ``dy = 2/(n+1)``."""

    n: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 16:
            raise ValidationError(f"grid needs n >= 16 interior points, got {self.n}")

    @property
    def dy(self) -> float:
        return 2.0 / (self.n + 1)

    @property
    def nodes(self) -> np.ndarray:
        return -1.0 + self.dy * np.arange(1, self.n + 1)

    @property
    def full_nodes(self) -> np.ndarray:
        """Nodes including the two boundary points."""
        return np.linspace(-1.0, 1.0, self.n + 2)

    def refined(self) -> "DirichletGrid":
        """Grid with half the spacing (old nodes are kept)."""
        return DirichletGrid(2 * self.n + 1)

    @classmethod
    def for_width(cls, width: float, cells_per_width: float = 4.0, n_min: int = 63):
        """Smallest grid with ``dy <= width/cells_per_width``; n is odd so y = 0 is a node."""
        cells = max(math.ceil(2.0 * cells_per_width / width), n_min + 1)
        cells += cells % 2
        return cls(cells - 1)


@dataclass(frozen=True, eq=False)
class EigenPair:
    lam: float
    phi: np.ndarray
    residual: float
    grid: DirichletGrid

    @property
    def y(self) -> np.ndarray:
        return self.grid.nodes

    @property
    def k0_sq(self) -> float:
        return -self.lam

    def h1_norm(self) -> float:
        dy = self.grid.dy
        full = np.concatenate(([0.0], self.phi, [0.0]))
        return math.sqrt(dy * np.sum(self.phi**2) + np.sum(np.diff(full) ** 2) / dy)


@dataclass(frozen=True)
class LimitBeta:
    a: float
    beta: float

    @property
    def lam(self) -> float:
        return -self.beta**2


def _potential_values(potential, grid: DirichletGrid | None):
    """Return (Q at nodes, grid), choosing and checking the grid when Q has a width."""
    width = None
    if isinstance(potential, ShearProfile):
        potential = potential.potential()
    if isinstance(potential, RayleighPotential):
        width = potential.width
        if potential.profile.is_couette:
            width = None
    if grid is None:
        if width is not None:
            grid = DirichletGrid.for_width(width)
        elif callable(potential):
            grid = DirichletGrid(255)
        else:
            grid = DirichletGrid(len(potential))
    if width is not None and grid.dy > width / 4 * (1 + 1e-12):
        raise GridTooCoarse(f"dy = {grid.dy:.3e} exceeds gamma/4 = {width / 4:.3e}")
    if callable(potential):
        q = np.asarray(potential(grid.nodes), dtype=float)
    else:
        q = np.asarray(potential, dtype=float)
        if q.shape != (grid.n,):
            raise ValidationError(f"need {grid.n} potential samples, got {q.shape}")
    if not np.all(np.isfinite(q)):
        raise ValidationError("potential must be finite on the grid")
    return q, grid


def operator_bands(q: np.ndarray, dy: float):
    """Diagonal and off-diagonal of the discrete ``-d^2/dy^2 + Q``."""
    diag = 2.0 / dy**2 + q
    off = np.full(len(q) - 1, -1.0 / dy**2)
    return diag, off


def sturm_count(diag, off, x: float) -> int:
    """Number of eigenvalues of the tridiagonal matrix strictly below x."""
    count = 0
    q = 1.0
    e2 = [0.0] + (np.asarray(off) ** 2).tolist()
    tiny = 1e-300
    for d, ee in zip(diag.tolist(), e2):
        q = d - x - (ee / q if ee else 0.0)
        if q == 0.0:
            q = -tiny
        if q < 0:
            count += 1
    return count


def tridiagonal_eigenvalue(diag, off, index: int = 0, rtol: float = 1e-15) -> float:
    """Eigenvalue number ``index`` (ascending) by Sturm bisection."""
    diag = np.asarray(diag, dtype=float)
    off = np.asarray(off, dtype=float)
    rad = np.zeros_like(diag)
    rad[:-1] += np.abs(off)
    rad[1:] += np.abs(off)
    lo = float(np.min(diag - rad))
    hi = float(np.max(diag + rad))
    scale = max(abs(lo), abs(hi))
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if sturm_count(diag, off, mid) > index:
            hi = mid
        else:
            lo = mid
        if hi - lo <= rtol * scale + 1e-300:
            break
    return 0.5 * (lo + hi)


def tridiagonal_eigenpair(diag, off, index: int = 0, weight: float = 1.0, max_iter: int = 8):
    """Eigenvalue by bisection, eigenvector by shifted inverse iteration.

    The vector is normalized so that ``weight * sum(v**2) == 1``.
    """
    diag = np.asarray(diag, dtype=float)
    off = np.asarray(off, dtype=float)
    n = len(diag)
    lam = tridiagonal_eigenvalue(diag, off, index)
    scale = max(np.max(np.abs(diag)), 1.0)
    shift = lam - 1e-10 * scale
    ab = np.zeros((3, n))
    ab[0, 1:] = off
    ab[1] = diag - shift
    ab[2, :-1] = off
    v = np.ones(n) / math.sqrt(n)
    v += 1e-3 * np.sin(np.arange(n) * 0.7)
    for _ in range(max_iter):
        w = solve_banded((1, 1), ab, v)
        v = w / np.linalg.norm(w)
    av = diag * v
    av[:-1] += off * v[1:]
    av[1:] += off * v[:-1]
    rq = float(v @ av)
    # keep the bisection value unless the Rayleigh quotient is plainly better
    if abs(rq - lam) < 1e-12 * scale:
        lam = rq
    v = v / math.sqrt(weight * np.sum(v * v))
    return lam, v


def _residual(diag, off, lam, v, dy):
    av = diag * v
    av[:-1] += off * v[1:]
    av[1:] += off * v[:-1]
    return math.sqrt(dy * np.sum((av - lam * v) ** 2))


def _fix_sign(v: np.ndarray, nodes: np.ndarray) -> np.ndarray:
    j = int(np.argmin(np.abs(nodes)))
    return -v if v[j] < 0 else v


def lowest_eigenpair(potential, grid: DirichletGrid | None = None) -> EigenPair:
    """Lowest eigenpair of ``-d^2/dy^2 + Q`` with Dirichlet conditions at +-1.

    ``potential`` is a RayleighPotential/ShearProfile (grid chosen so that
    dy <= gamma/4 if omitted), a callable Q(y), or an array of Q at the nodes.
    """
    return eigenpair(potential, grid, index=0)


def eigenpair(potential, grid: DirichletGrid | None = None, index: int = 0) -> EigenPair:
    q, grid = _potential_values(potential, grid)
    diag, off = operator_bands(q, grid.dy)
    lam, v = tridiagonal_eigenpair(diag, off, index, weight=grid.dy)
    res = _residual(diag, off, lam, v, grid.dy)
    if res > 1e-8 * (1 + abs(lam)):
        raise NoConvergence(f"eigen residual {res:.2e} above target")
    if index == 0:
        v = _fix_sign(v, grid.nodes)
    return EigenPair(lam=lam, phi=v, residual=res, grid=grid)


def beta_coth_beta(beta: float) -> float:
    if beta == 0.0:
        return 1.0
    if abs(beta) < 1e-4:
        return 1.0 + beta * beta / 3.0
    return beta / math.tanh(beta)


def limit_beta(a: float) -> LimitBeta:
    """Root of ``2a = beta*coth(beta)`` (the gamma -> 0 eigenvalue is -beta^2)."""
    if not a > 0.5:
        raise OutOfRange(f"2a = beta coth beta has no positive root for a = {a} <= 1/2")
    target = 2.0 * a
    lo, hi = 0.0, target + 1.0
    for _ in range(300):
        mid = 0.5 * (lo + hi)
        if beta_coth_beta(mid) < target:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 2e-16 * hi:
            break
    beta = lo if abs(beta_coth_beta(lo) - target) <= abs(beta_coth_beta(hi) - target) else hi
    return LimitBeta(a=a, beta=beta)


def rayleigh_quotient(q, phi, grid: DirichletGrid | None = None) -> float:
    """Discrete ``||phi'||^2 + int Q phi^2`` for a normalized Dirichlet vector."""
    phi = np.asarray(phi, dtype=float)
    if grid is None:
        grid = DirichletGrid(len(phi))
    qv = np.asarray(q(grid.nodes) if callable(q) else q, dtype=float)
    dy = grid.dy
    norm = math.sqrt(dy * np.sum(phi**2))
    if abs(norm - 1.0) > 1e-8:
        raise NotNormalized(f"||phi|| = {norm:.12f}")
    full = np.concatenate(([0.0], phi, [0.0]))
    return float(np.sum(np.diff(full) ** 2) / dy + dy * np.sum(qv * phi**2))


@dataclass(frozen=True)
class ConvergenceRow:
    gamma: float
    lam: float
    beta_gamma: float
    error: float
    grid_change: float
    n: int


@dataclass(frozen=True)
class ConvergenceStudy:
    a: float
    beta_limit: float
    rows: list
    exponent: float


def converged_eigenvalue(profile: ShearProfile, cells_per_width: float = 8.0):
    """Richardson-extrapolated lowest eigenvalue from three nested grids.

    Returns (lam, change, n) where ``change`` is the difference between the
    two extrapolants (grid error estimate) and n the finest grid size.
    """
    grid = DirichletGrid.for_width(profile.gamma, cells_per_width)
    lams = []
    for _ in range(3):
        lams.append(lowest_eigenpair(profile, grid).lam)
        last, grid = grid, grid.refined()
    r1 = (4 * lams[1] - lams[0]) / 3
    r2 = (4 * lams[2] - lams[1]) / 3
    return r2, abs(r2 - r1), last.n


def fit_loglog(x, y) -> tuple[float, float]:
    """Least-squares slope and intercept of log y against log x."""
    lx, ly = np.log(np.asarray(x, float)), np.log(np.asarray(y, float))
    slope, icpt = np.polyfit(lx, ly, 1)
    return float(slope), float(icpt)


def convergence_study(a: float, gammas, cells_per_width: float = 8.0) -> ConvergenceStudy:
    """Distance of sqrt(-lambda_{gamma,a}) to its gamma -> 0 limit, with log-log rate."""
    beta = limit_beta(a).beta
    rows = []
    for g in gammas:
        lam, change, n = converged_eigenvalue(ShearProfile(gamma=g, a=a), cells_per_width)
        if lam >= 0:
            raise ValidationError(f"lambda >= 0 at gamma = {g}; gamma too large")
        bg = math.sqrt(-lam)
        rows.append(ConvergenceRow(g, lam, bg, abs(bg - beta), change / (2 * bg), n))
    slope, _ = fit_loglog([r.gamma for r in rows], [r.error for r in rows])
    return ConvergenceStudy(a=a, beta_limit=beta, rows=rows, exponent=slope)
