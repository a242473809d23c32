"""1D Schrödinger machinery on [0,1].

Everything here revolves around -v'' + q v = z v.  Cauchy solutions are
propagated in the rescaled frame u(x) * exp(-kappa*|x - x0|) with
kappa = sqrt(max(-z, 0)), so the state stays O(1) while the true solution
grows like exp(kappa); the exponential factor is reattached through
:class:`ExtScalar` bookkeeping.  On top of that sit the characteristic
function, the two Weyl-Titchmarsh functions, the decaying Weyl solutions,
Dirichlet eigenvalues and a finite-difference oracle used only for
cross-checking.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.integrate import simpson, solve_ivp
from scipy.linalg import solve_banded

from .errors import (
    GridError,
    InvalidPotentialError,
    NearDirichletError,
    SearchWindowError,
)
from .extscalar import ExtScalar

__all__ = [
    "IntegratorSettings",
    "Potential",
    "FundamentalData",
    "WeylData",
    "SolutionTrace",
    "propagate",
    "weyl_data",
    "weyl_traces",
    "weyl_difference_integral",
    "dirichlet_values",
    "hadamard_check",
    "bvp_oracle",
]

_PI2 = math.pi**2


@dataclass(frozen=True)
class IntegratorSettings:
    """Tolerances for the adaptive embedded 4(5) Runge-Kutta propagation.

    Defaults are one decade tighter than the nominal 1e-10/1e-12 so that the
    Wronskian conservation check passes at 1e-10 with margin on the longest
    runs (kappa up to 500).
    """

    rtol: float = 1e-11
    atol: float = 1e-13
    grid_size: int = 64  # max_step = 1/grid_size


DEFAULT_SETTINGS = IntegratorSettings()


class Potential:
    """Real potential q on [0,1], given as a scalar callable.

    A uniform sample (``samples`` panels) is cached for the L2 norm, the sup
    norm and the finite-difference oracle; propagation always calls the
    exact callable.
    """

    def __init__(
        self,
        fn: Callable[[float], float],
        name: str = "",
        samples: int = 4096,
        symmetrized: bool = False,
        expr=None,
        expr_symbol=None,
    ):
        self._fn = fn
        self.name = name
        self.symmetrized = symmetrized
        self.expr = expr
        self.expr_symbol = expr_symbol
        xs = np.linspace(0.0, 1.0, samples + 1)
        try:
            vals = np.array([float(fn(float(t))) for t in xs])
        except (ArithmeticError, ValueError, TypeError) as exc:
            raise InvalidPotentialError(f"potential {name or fn!r} failed to evaluate: {exc}") from exc
        if not np.all(np.isfinite(vals)):
            bad = xs[~np.isfinite(vals)][0]
            raise InvalidPotentialError(f"potential {name or fn!r} is non-finite near x={bad:.6g}")
        self.sample_grid = xs
        self.sample_values = vals
        self.l2_norm = float(math.sqrt(max(simpson(vals**2, x=xs), 0.0)))
        self.sup_norm = float(np.max(np.abs(vals)))
        self.mean = float(simpson(vals, x=xs))
        self._cache: dict = {}

    def __call__(self, x: float) -> float:
        return float(self._fn(x))

    def reflected(self) -> "Potential":
        """The reflected potential x -> q(1-x)."""
        fn = self._fn
        expr = None
        sym = self.expr_symbol
        if self.expr is not None and sym is not None:
            expr = self.expr.subs(sym, 1 - sym)
        return Potential(
            lambda t, _f=fn: _f(1.0 - t),
            name=self.name + "~reflected",
            symmetrized=not self.symmetrized,
            expr=expr,
            expr_symbol=sym,
        )


def as_potential(q) -> Potential:
    if isinstance(q, Potential):
        return q
    return Potential(q)


@dataclass
class FundamentalData:
    """Endpoint values of the Cauchy solution pairs, with exponent headroom.

    ``from_left`` holds (c0, c0', s0, s0') at x=1; ``from_right`` holds
    (c1, c1', s1, s1') at x=0.  Only the propagated side is populated.
    """

    z: float
    c0_1: Optional[ExtScalar] = None
    c0p_1: Optional[ExtScalar] = None
    s0_1: Optional[ExtScalar] = None
    s0p_1: Optional[ExtScalar] = None
    c1_0: Optional[ExtScalar] = None
    c1p_0: Optional[ExtScalar] = None
    s1_0: Optional[ExtScalar] = None
    s1p_0: Optional[ExtScalar] = None
    wronskian_defect: float = math.nan


@dataclass
class WeylData:
    """Characteristic and Weyl-Titchmarsh data at one spectral point."""

    z: float
    delta: ExtScalar
    d_fun: ExtScalar
    e_fun: ExtScalar
    m_fun: float
    n_fun: float


_TRACE_KINDS = ("Psi", "Phi", "c0", "s0", "c1", "s1", "bvp")


@dataclass
class SolutionTrace:
    grid: np.ndarray
    values: list  # list of ExtScalar
    which: str = "bvp"

    def __post_init__(self):
        if self.which not in _TRACE_KINDS:
            raise ValueError(f"unknown trace kind {self.which!r}")
        g = np.asarray(self.grid, dtype=float)
        if g.ndim != 1 or len(g) != len(self.values):
            raise GridError("trace grid and values disagree")
        if len(g) >= 2 and not np.all(np.diff(g) > 0):
            raise GridError("trace grid must be strictly increasing")
        self.grid = g

    def native(self) -> np.ndarray:
        """Values as doubles; entries below the native range flush to 0."""
        return np.array([v.to_float_or_zero() for v in self.values])

    def log_magnitudes(self) -> np.ndarray:
        return np.array([v.ln_mag for v in self.values])

    def signs(self) -> np.ndarray:
        return np.array([v.sign for v in self.values], dtype=int)


# ----------------------------------------------------------------------
# propagation core


def _kappa(z: float) -> float:
    return math.sqrt(max(-z, 0.0))


def _solve_pair(q: Potential, z: float, from_left: bool, settings: IntegratorSettings,
                t_eval=None):
    """Integrate the rescaled (c, c', s, s') system across [0,1].

    Returns (kappa, x_nodes, Y) where Y has shape (4, len(x_nodes)) and the
    true solution is Y * exp(kappa * d(x)) with d the distance from the
    launch endpoint.
    """
    kappa = _kappa(z)
    fn = q._fn

    if from_left:
        def field(x, y):
            qq = float(fn(x))
            u1, w1, u2, w2 = y
            return (
                w1 - kappa * u1,
                (qq - z) * u1 - kappa * w1,
                w2 - kappa * u2,
                (qq - z) * u2 - kappa * w2,
            )
        span = (0.0, 1.0)
    else:
        def field(x, y):
            qq = float(fn(x))
            u1, w1, u2, w2 = y
            return (
                w1 + kappa * u1,
                (qq - z) * u1 + kappa * w1,
                w2 + kappa * u2,
                (qq - z) * u2 + kappa * w2,
            )
        span = (1.0, 0.0)

    y0 = (1.0, 0.0, 0.0, 1.0)
    sol = solve_ivp(
        field,
        span,
        y0,
        method="RK45",
        rtol=settings.rtol,
        atol=settings.atol,
        max_step=1.0 / settings.grid_size,
        t_eval=t_eval,
        dense_output=False,
    )
    if not sol.success:  # pragma: no cover - guarded by finite-potential check
        raise InvalidPotentialError(f"propagation failed at z={z}: {sol.message}")
    return kappa, sol.t, sol.y


def _cached_pair(q: Potential, z: float, from_left: bool, settings: IntegratorSettings,
                 grid: Optional[np.ndarray] = None):
    key = ("pair", z, from_left, settings.rtol, settings.atol,
           None if grid is None else (len(grid), float(grid[0]), float(grid[-1])))
    hit = q._cache.get(key)
    if hit is not None:
        return hit
    t_eval = None
    if grid is not None:
        t_eval = np.asarray(grid, dtype=float)
        if not from_left:
            t_eval = t_eval[::-1]
    out = _solve_pair(q, z, from_left, settings, t_eval=t_eval)
    q._cache[key] = out
    return out


def propagate(q, z: float, from_left: bool = True, grid_size: int = 64,
              settings: Optional[IntegratorSettings] = None) -> FundamentalData:
    """Endpoint values/derivatives of the Cauchy solutions at the far end.

    ``grid_size`` caps the adaptive step at 1/grid_size (>= 16 required).
    No native overflow occurs for kappa = sqrt(-z) up to 500; results carry
    the exp(kappa) factor in their ExtScalar exponents.
    """
    if grid_size < 16:
        raise GridError(f"grid_size must be >= 16, got {grid_size}")
    q = as_potential(q)
    if settings is None:
        settings = IntegratorSettings(grid_size=grid_size)
    kappa, xs, Y = _cached_pair(q, z, from_left, settings)
    y_end = Y[:, -1]
    growth = ExtScalar.exp(kappa)  # exp(kappa * 1) at the far endpoint

    u1, w1, u2, w2 = (float(v) for v in y_end)
    # rescaled Wronskian is exp(-2 kappa); measure the defect against the
    # term magnitude so the check is scale-free
    term1, term2 = u1 * w2, w1 * u2
    scale = abs(term1) + abs(term2)
    defect = abs((term1 - term2) - math.exp(-2.0 * kappa)) / max(scale, 1.0)

    vals = [ExtScalar.from_float(v) * growth for v in (u1, w1, u2, w2)]
    if from_left:
        return FundamentalData(
            z=z, c0_1=vals[0], c0p_1=vals[1], s0_1=vals[2], s0p_1=vals[3],
            wronskian_defect=defect,
        )
    return FundamentalData(
        z=z, c1_0=vals[0], c1p_0=vals[1], s1_0=vals[2], s1p_0=vals[3],
        wronskian_defect=defect,
    )


# ----------------------------------------------------------------------
# Weyl-Titchmarsh data


def weyl_data(q, z: float, settings: IntegratorSettings = DEFAULT_SETTINGS) -> WeylData:
    """Delta, D, E, M, N at a real spectral point z below the Dirichlet spectrum.

    Delta = s0(1), D = c0(1), E = s0'(1), M = -D/Delta, N = -E/Delta.
    """
    q = as_potential(q)
    key = ("weyl", z, settings.rtol, settings.atol)
    hit = q._cache.get(key)
    if hit is not None:
        return hit
    fd = propagate(q, z, from_left=True, grid_size=settings.grid_size, settings=settings)
    delta, d_fun, e_fun = fd.s0_1, fd.c0_1, fd.s0p_1
    # a characteristic-function value below the propagation's own noise floor
    # (relative to the companion solutions) cannot be distinguished from an
    # exact Dirichlet eigenvalue hit
    scale = max(d_fun.ln_mag, e_fun.ln_mag, 0.0)
    floor = math.log(max(1e-300, 100.0 * settings.rtol))
    if delta.is_zero or delta.ln_mag < scale + floor:
        raise NearDirichletError(
            f"characteristic function vanishes at z={z:.6g} (Dirichlet eigenvalue hit)"
        )
    out = WeylData(
        z=z,
        delta=delta,
        d_fun=d_fun,
        e_fun=e_fun,
        m_fun=-(d_fun / delta).to_float(),
        n_fun=-(e_fun / delta).to_float(),
    )
    q._cache[key] = out
    return out


def weyl_traces(q, z: float, grid: Sequence[float],
                settings: IntegratorSettings = DEFAULT_SETTINGS):
    """Traces of the Weyl solutions Psi (=1 at 0, =0 at 1) and Phi (mirror).

    Psi = -s1/Delta and Phi = s0/Delta; each is computed by propagating the
    defining Cauchy solution in its growing direction and self-normalizing,
    so the traces are relative-accurate all the way down to exp(-kappa).
    """
    q = as_potential(q)
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or len(grid) < 2 or abs(grid[0]) > 1e-15 or abs(grid[-1] - 1.0) > 1e-15:
        raise GridError("trace grid must run from 0 to 1")
    weyl_data(q, z, settings)  # raises NearDirichletError early

    key = ("traces", z, settings.rtol, settings.atol, len(grid))
    hit = q._cache.get(key)
    if hit is not None:
        return hit

    kappa, xs_r, Yr = _cached_pair(q, z, from_left=False, settings=settings, grid=grid)
    kappa, xs_l, Yl = _cached_pair(q, z, from_left=True, settings=settings, grid=grid)

    # right side: s1 components over reversed grid
    s1_resc = Yr[2][::-1]  # aligned with grid ascending
    anchor = s1_resc[0]    # rescaled s1(0); s1(0) = -Delta
    psi_vals = []
    for i, x in enumerate(grid):
        if i == 0:
            psi_vals.append(ExtScalar.from_float(1.0))
        elif i == len(grid) - 1:
            psi_vals.append(ExtScalar.from_float(0.0))
        else:
            ratio = s1_resc[i] / anchor
            psi_vals.append(ExtScalar.from_float(float(ratio)) * ExtScalar.exp(-kappa * float(x)))

    s0_resc = Yl[2]
    anchor_l = s0_resc[-1]  # rescaled s0(1)
    phi_vals = []
    for i, x in enumerate(grid):
        if i == 0:
            phi_vals.append(ExtScalar.from_float(0.0))
        elif i == len(grid) - 1:
            phi_vals.append(ExtScalar.from_float(1.0))
        else:
            ratio = s0_resc[i] / anchor_l
            phi_vals.append(ExtScalar.from_float(float(ratio)) * ExtScalar.exp(-kappa * float(1.0 - x)))

    out = (
        SolutionTrace(grid=grid, values=psi_vals, which="Psi"),
        SolutionTrace(grid=grid, values=phi_vals, which="Phi"),
    )
    q._cache[key] = out
    return out


def weyl_difference_integral(q, z: float, grid: Optional[Sequence[float]] = None,
                             settings: IntegratorSettings = DEFAULT_SETTINGS) -> float:
    """M(z) - N(z) as the integral of (q(1-x)-q(x)) Psi(x) Phi(1-x).

    Differentiating the Wronskian of s1(x) and s0(1-x) gives
    Delta*(D - E) = -int (q - q_reflected) s1 s0(1-x) dx, and dividing by
    Delta^2 turns the left side into N - M; the sign above makes the result
    equal M - N.  Unlike the direct difference of M and N this form is free
    of the O(kappa)-scale cancellation, which matters when the asymmetry is
    tiny.
    """
    q = as_potential(q)
    if grid is None:
        grid = np.linspace(0.0, 1.0, 2049)
    grid = np.asarray(grid, dtype=float)
    if len(grid) % 2 == 0:
        raise GridError("difference integral needs an odd number of grid points")
    psi, phi = weyl_traces(q, z, grid, settings)
    L = np.array([q(float(1.0 - x)) - q(float(x)) for x in grid])
    phi_rev = phi.values[::-1]  # Phi(1-x) on a symmetric uniform grid
    integrand = np.array(
        [Lv * (pv * fv).to_float_or_zero() for Lv, pv, fv in zip(L, psi.values, phi_rev)]
    )
    return float(simpson(integrand, x=grid))


# ----------------------------------------------------------------------
# Dirichlet eigenvalues


def _endpoint_s_many(q: Potential, zs: np.ndarray, settings: IntegratorSettings) -> np.ndarray:
    """Rescaled s0(1) for a batch of spectral points (one stacked solve)."""
    zs = np.asarray(zs, dtype=float)
    kap = np.sqrt(np.maximum(-zs, 0.0))
    n = len(zs)
    fn = q._fn

    def field(x, y):
        u = y[:n]
        w = y[n:]
        qq = float(fn(x))
        return np.concatenate((w - kap * u, (qq - zs) * u - kap * w))

    y0 = np.concatenate((np.zeros(n), np.ones(n)))
    sol = solve_ivp(field, (0.0, 1.0), y0, method="RK45",
                    rtol=settings.rtol, atol=settings.atol,
                    max_step=1.0 / settings.grid_size)
    if not sol.success:  # pragma: no cover
        raise InvalidPotentialError(f"stacked propagation failed: {sol.message}")
    return sol.y[:n, -1]


def dirichlet_values(q, count: int, settings: IntegratorSettings = DEFAULT_SETTINGS) -> list:
    """First ``count`` Dirichlet eigenvalues of -d2/dx2 + q, count <= 64.

    Zeros of the characteristic function are bracketed by a pi^2/4 sign scan
    over [-sup|q|-10, (count+2)^2 pi^2 + sup|q| + 10] and refined by
    bisection to absolute tolerance 1e-9.
    """
    if not (1 <= count <= 64):
        raise ValueError(f"count must be in [1, 64], got {count}")
    q = as_potential(q)
    lo = -q.sup_norm - 10.0
    hi = (count + 2) ** 2 * _PI2 + q.sup_norm + 10.0
    step = _PI2 / 4.0
    zs = np.arange(lo, hi + step, step)
    vals = _endpoint_s_many(q, zs, settings)
    sgn = np.sign(vals)
    flips = np.nonzero(sgn[:-1] * sgn[1:] < 0)[0]
    if len(flips) < count:
        raise SearchWindowError(
            f"found {len(flips)} sign changes, need {count}, in window [{lo:.3g}, {hi:.3g}]"
        )
    flips = flips[:count]
    a = zs[flips].copy()
    b = zs[flips + 1].copy()
    fa = vals[flips].copy()
    # bisect all brackets in lockstep; 34 halvings take pi^2/4 below 1e-9
    for _ in range(34):
        mid = 0.5 * (a + b)
        fm = _endpoint_s_many(q, mid, settings)
        left = fa * fm > 0
        a = np.where(left, mid, a)
        fa = np.where(left, fm, fa)
        b = np.where(left, b, mid)
    roots = (0.5 * (a + b)).tolist()
    if any(r2 - r1 <= 0 for r1, r2 in zip(roots, roots[1:])):  # pragma: no cover
        raise SearchWindowError("Dirichlet eigenvalues not strictly increasing")
    return roots


def hadamard_check(q, z: float, truncation: int,
                   settings: IntegratorSettings = DEFAULT_SETTINGS,
                   exact_roots: int = 10) -> float:
    """Ratio of Delta(z)/Delta(0) to the truncated zero product.

    The first ``exact_roots`` Dirichlet eigenvalues are located numerically;
    the tail uses alpha_k ~ k^2 pi^2 + mean(q), whose O(1/k^2) error is far
    below the product's own truncation tail.  The ratio tends to 1 as the
    truncation grows.
    """
    if truncation < 10:
        raise ValueError("truncation must be >= 10")
    q = as_potential(q)
    if z == 0.0:
        return 1.0
    n_exact = min(exact_roots, truncation)
    roots = dirichlet_values(q, n_exact, settings)
    qbar = q.mean
    log_prod = 0.0
    for k in range(1, truncation + 1):
        alpha = roots[k - 1] if k <= n_exact else k * k * _PI2 + qbar
        log_prod += math.log1p(-z / alpha)
    num = weyl_data(q, z, settings).delta / weyl_data(q, 0.0, settings).delta
    return num.to_float() / math.exp(log_prod)


# ----------------------------------------------------------------------
# finite-difference oracle


def bvp_oracle(q, z: float, left_value: float, right_value: float,
               grid: Sequence[float]) -> SolutionTrace:
    """Second-order finite-difference solve of -v'' + q v = z v on a uniform grid.

    Independent of the propagation path; used only to cross-check Weyl
    solution combinations.
    """
    q = as_potential(q)
    grid = np.asarray(grid, dtype=float)
    n = len(grid)
    if n < 3:
        raise GridError("bvp grid needs at least 3 points")
    h = grid[1] - grid[0]
    if not np.allclose(np.diff(grid), h, rtol=0, atol=1e-12):
        raise GridError("bvp oracle requires a uniform grid")
    qs = np.array([q(float(x)) for x in grid])
    m = n - 2
    diag = 2.0 / h**2 + qs[1:-1] - z
    off = -1.0 / h**2
    rhs = np.zeros(m)
    rhs[0] += left_value / h**2
    rhs[-1] += right_value / h**2
    ab = np.zeros((3, m))
    ab[0, 1:] = off
    ab[1, :] = diag
    ab[2, :-1] = off
    try:
        interior = solve_banded((1, 1), ab, rhs)
    except np.linalg.LinAlgError as exc:  # pragma: no cover
        raise NearDirichletError(f"singular finite-difference system at z={z}") from exc
    if not np.all(np.isfinite(interior)):
        raise NearDirichletError(f"finite-difference solve blew up at z={z}")
    v = np.concatenate(([left_value], interior, [right_value]))
    return SolutionTrace(grid=grid, values=[ExtScalar.from_float(float(t)) for t in v],
                         which="bvp")
