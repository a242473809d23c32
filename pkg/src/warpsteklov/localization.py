"""Where eigenfunctions concentrate, and the flea-on-the-elephant sweeps.

Classification is quantitative: the weighted mass split between the two
half-intervals decides the dominant boundary component, and log-linear fits
of ln|w| near each endpoint measure the exponential decay rates.  All log
magnitudes come straight from the extended-exponent representation, so the
diagnostics keep working long after |w| underflows a double.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
import sympy as sp
from scipy.integrate import simpson

from . import asymptotics as asy
from . import geometry as geom
from . import steklov as stk
from .errors import CaseMismatchError, DegenerateTraceError
from .extscalar import ExtScalar
from .geometry import TransversalSpectrum, WarpingProfile, X
from .steklov import EigenfunctionTrace
from .sturm import DEFAULT_SETTINGS, IntegratorSettings
from .util import ordered_parallel_map

__all__ = [
    "LocalizationReport",
    "BoundTemplate",
    "FleaBump",
    "FleaSweepReport",
    "classify",
    "bound_check",
    "bound_template",
    "flea_sweep",
    "branch_side_prediction",
    "BOTH_THRESHOLD",
]

GAMMA0 = "Gamma0"
GAMMA1 = "Gamma1"
BOTH = "both"

BOTH_THRESHOLD = 0.05
# decay-rate fit windows exclude 5% collars at the endpoints
_LEFT_WINDOW = (0.05, 0.30)
_RIGHT_WINDOW = (0.70, 0.95)


@dataclass
class LocalizationReport:
    mu: float
    branch: str
    endpoint_log_magnitudes: tuple      # (ln|w(0)|, ln|w(1)|)
    mass_split: float                   # weighted mass fraction on [0, 1/2]
    dominant: str                       # Gamma0 | Gamma1 | both
    decay_rate_0: float                 # decay rate of ln|w| moving away from x=0
    decay_rate_1: float                 # decay rate of ln|w| moving away from x=1
    residual_decay_rate: Optional[float] = None
    bound_residual: Optional[float] = None


def _fit_slope(xs: np.ndarray, ys: np.ndarray) -> float:
    A = np.vstack([xs, np.ones(len(xs))]).T
    slope, _ = np.linalg.lstsq(A, ys, rcond=None)[0]
    return float(slope)


def classify(trace: EigenfunctionTrace, p: WarpingProfile,
             both_threshold: float = BOTH_THRESHOLD,
             template: Optional["BoundTemplate"] = None) -> LocalizationReport:
    """Localization report for one eigenfunction trace (boundary-L2)."""
    grid = trace.grid
    w = trace.native()
    if np.all(w == 0.0):
        raise DegenerateTraceError("trace is identically zero")
    fv = p.f_grid(grid)
    dens = w * w * fv
    total = simpson(dens, x=grid)
    half = np.searchsorted(grid, 0.5)
    if abs(grid[half] - 0.5) > 1e-12:
        raise DegenerateTraceError("classification grid must contain x = 1/2")
    left = simpson(dens[: half + 1], x=grid[: half + 1])
    split = float(left / total)
    if abs(split - 0.5) <= both_threshold:
        dominant = BOTH
    elif split > 0.5:
        dominant = GAMMA0
    else:
        dominant = GAMMA1

    lnw = trace.log_magnitudes()
    finite = np.isfinite(lnw)

    def window_slope(lo, hi):
        mask = finite & (grid >= lo) & (grid <= hi)
        if mask.sum() < 4:
            return math.nan
        return _fit_slope(grid[mask], lnw[mask])

    slope_l = window_slope(*_LEFT_WINDOW)
    slope_r = window_slope(*_RIGHT_WINDOW)
    rate0 = -slope_l           # positive when |w| decays away from Gamma0
    rate1 = +slope_r           # positive when |w| decays away from Gamma1

    residual_rate = None
    if dominant == GAMMA0:
        residual_rate = abs(slope_r)
    elif dominant == GAMMA1:
        residual_rate = abs(slope_l)

    report = LocalizationReport(
        mu=trace.mu,
        branch=trace.branch,
        endpoint_log_magnitudes=(float(lnw[0]), float(lnw[-1])),
        mass_split=split,
        dominant=dominant,
        decay_rate_0=rate0,
        decay_rate_1=rate1,
        residual_decay_rate=residual_rate,
    )
    if template is not None:
        report.bound_residual = bound_check(trace, template)
    return report


# ----------------------------------------------------------------------
# pointwise bound templates


@dataclass
class BoundTemplate:
    """Positive envelope x -> template(x) for one (case, branch, mu)."""

    case: str
    branch: str
    mu: float
    fn: Callable[[float], float]

    def __call__(self, x: float) -> float:
        return self.fn(x)


def bound_template(model: asy.CaseModel, branch: str, mu: float,
                   epsilon: Optional[float] = None) -> BoundTemplate:
    """Envelope for |w| from the case taxonomy; mu must be positive."""
    if mu <= 0:
        raise CaseMismatchError("bound templates are undefined at mu = 0")
    root = math.sqrt(mu)
    eps = model.epsilon if epsilon is None else epsilon

    if model.tag in ("I-symmetric",) or (model.tag == "explicit" and model.k not in (0,)):
        def fn(x):
            return math.exp(-root * x) + math.exp(-root * (1.0 - x))
        return BoundTemplate(model.tag, branch, mu, fn)

    if model.tag == "explicit" and model.k == 0:
        plus_at_zero = model.f0 < model.f1
        toward0 = (branch == "plus") == plus_at_zero
        if toward0:
            def fn(x):
                return math.exp(-root * x) + math.exp(-root * (2.0 - x))
        else:
            def fn(x):
                return math.exp(-root * (1.0 + x)) + math.exp(-root * (1.0 - x))
        return BoundTemplate(model.tag, branch, mu, fn)

    if model.tag == "IIA":
        poly = mu ** (model.alpha_exponent - 0.5)
        plus_small_side = model.constant < 0  # plus tracks Gamma1 when the constant is negative
        toward1 = (branch == "plus") == plus_small_side
        if toward1:
            def fn(x):
                return poly * math.exp(-root * (1.0 + x)) + math.exp(-root * (1.0 - x))
        else:
            def fn(x):
                return math.exp(-root * x) + poly * math.exp(-root * (2.0 - x))
        return BoundTemplate(model.tag, branch, mu, fn)

    if model.tag == "IIB":
        a = model.a
        plus_at_zero = model.sign > 0
        toward0 = (branch == "plus") == plus_at_zero
        if toward0:
            def fn(x):
                return math.exp(-root * x) + math.exp(-root * (2.0 - 2.0 * (a + eps) - x))
        else:
            def fn(x):
                return math.exp(-root * (1.0 - 2.0 * (a + eps) + x)) + math.exp(-root * (1.0 - x))
        return BoundTemplate(model.tag, branch, mu, fn)

    if model.tag == "IIC":
        if branch == "plus":
            def fn(x):
                return math.exp(-root * x) + eps * math.exp(-root * (1.0 - x))
        else:
            def fn(x):
                return eps * math.exp(-root * x) + math.exp(-root * (1.0 - x))
        return BoundTemplate(model.tag, branch, mu, fn)

    raise CaseMismatchError(f"no template for case {model.tag!r}")


def bound_check(trace: EigenfunctionTrace, template: BoundTemplate) -> float:
    """Max over the grid of ln|w| - ln(C * template) with one fitted constant.

    C is anchored at both endpoints (the worse of the two); anchoring only
    the dominant side would fold the profile-dependent amplitude of the
    residual boundary layer into the residual, hiding the shape statement
    the check is after.  Values <= 0 up to ~0.1 log-units mean the envelope
    shape holds.
    """
    if template.mu != trace.mu:
        raise CaseMismatchError(
            f"template at mu={template.mu} applied to trace at mu={trace.mu}"
        )
    lnw = trace.log_magnitudes()
    anchors = []
    for i in (0, len(trace.grid) - 1):
        if math.isfinite(lnw[i]):
            anchors.append(lnw[i] - math.log(template(float(trace.grid[i]))))
    if not anchors:
        raise DegenerateTraceError("trace vanishes at both endpoints")
    ln_c = max(anchors)
    worst = -math.inf
    for x, lv in zip(trace.grid, lnw):
        if not math.isfinite(lv):
            continue
        worst = max(worst, lv - ln_c - math.log(template(float(x))))
    return worst


# ----------------------------------------------------------------------
# flea sweeps


@dataclass(frozen=True)
class FleaBump:
    """Asymmetric perturbation shape added as delta * g(x) to a symmetric base.

    kinds: "boundary-value" (g = x^2 (3-2x): breaks f(0)=f(1), order 0),
    "boundary-slope" (g = x - x^3: breaks the first-derivative parity, order 1),
    "interior" (one-sided C-infinity bump on [start, start+width]).
    """

    kind: str = "boundary-value"
    start: float = 0.25
    width: float = 0.1
    sharpness: float = 0.1

    def expr(self):
        if self.kind == "boundary-value":
            return X**2 * (3 - 2 * X)
        if self.kind == "boundary-slope":
            return X - X**3
        if self.kind == "interior":
            return geom.bump_expr(self.start, self.width, self.sharpness)
        raise ValueError(f"unknown flea bump kind {self.kind!r}")


@dataclass
class FleaModeResult:
    delta: float
    mode_index: int
    mu: float
    dominant_plus: str
    dominant_minus: str
    gap: float
    gap_log: float
    coupling_log: float    # ln |(A-C)/B|; -inf for exactly symmetric


@dataclass
class FleaSweepReport:
    deltas: list
    mus: list
    results: list                       # FleaModeResult, ordered by (delta, mode)
    m_star: dict                        # delta -> smallest all-flipped mode index or None
    predictions: dict                   # delta -> branch side mapping or None

    def rows_for(self, delta: float) -> list:
        return [r for r in self.results if r.delta == delta]


def perturbed_profile(base: WarpingProfile, bump: FleaBump, delta: float) -> WarpingProfile:
    if base.kind != "builtin-symbolic":
        raise ValueError("flea sweeps need a symbolic base profile")
    expr = base.expr + sp.Float(delta) * bump.expr()
    interval = (bump.start, bump.start + bump.width) if bump.kind == "interior" and delta != 0 else None
    return geom.profile_from_expr(expr, base.n, base.omega,
                                  name=f"{base.name}+{delta}*{bump.kind}",
                                  bump_interval=interval,
                                  bump_sign=math.copysign(1.0, delta) if interval else 0.0)


def flea_sweep(base: WarpingProfile, bump: FleaBump, deltas: Sequence[float],
               spec: TransversalSpectrum,
               settings: IntegratorSettings = DEFAULT_SETTINGS,
               grid_points: int = 1025,
               workers: int = 1) -> FleaSweepReport:
    """Dominant-side tags, gaps and couplings across (delta, mode).

    For each delta the report records m*(delta): the smallest mode index
    from which on both branches are single-sided.
    """
    if not base.is_symmetric:
        raise ValueError("flea sweep base profile must be symmetric")
    grid = np.linspace(0.0, 1.0, grid_points)
    mus = spec.mus()

    tasks = []
    for delta in deltas:
        prof = perturbed_profile(base, bump, delta)
        for m, (mu, _) in enumerate(spec):
            tasks.append((delta, prof, m, mu))

    def one(task):
        delta, prof, m, mu = task
        block = stk.dn_block(prof, mu, settings)
        pair = stk.steklov_pair(block)
        tags = {}
        for branch in ("plus", "minus"):
            tr = stk.eigenfunction_trace(prof, mu, branch, grid, settings=settings)
            tags[branch] = classify(tr, prof).dominant
        if block.ac_diff:
            coupling = (abs(ExtScalar.from_float(block.ac_diff) / block.b_ext)).ln_mag
        else:
            coupling = -math.inf
        return FleaModeResult(
            delta=delta, mode_index=m, mu=mu,
            dominant_plus=tags["plus"], dominant_minus=tags["minus"],
            gap=pair.gap, gap_log=pair.gap_ext.ln_mag, coupling_log=coupling,
        )

    results = ordered_parallel_map(one, tasks, workers)

    m_star = {}
    predictions = {}
    for delta in deltas:
        rows = [r for r in results if r.delta == delta]
        flipped = [r.dominant_plus != BOTH and r.dominant_minus != BOTH for r in rows]
        star = None
        for i in range(len(rows)):
            if all(flipped[i:]):
                star = rows[i].mode_index
                break
        m_star[delta] = star
        if delta != 0.0:
            model = asy.case_constants(perturbed_profile(base, bump, delta))
            try:
                predictions[delta] = branch_side_prediction(model)
            except CaseMismatchError:
                predictions[delta] = None
        else:
            predictions[delta] = None

    return FleaSweepReport(deltas=list(deltas), mus=mus, results=results,
                           m_star=m_star, predictions=predictions)


def branch_side_prediction(model: asy.CaseModel) -> dict:
    """Which boundary each branch localizes on, from the case constants."""
    if model.tag == "I-symmetric":
        raise CaseMismatchError("symmetric profiles localize on both components")
    if model.tag == "IIA" or (model.tag == "explicit" and model.k == 0):
        const = model.constant
        if const is None or const == 0.0:
            raise CaseMismatchError("case model carries no sign information")
        if const < 0:
            return {"plus": GAMMA1, "minus": GAMMA0}
        return {"plus": GAMMA0, "minus": GAMMA1}
    if model.tag == "IIB":
        if model.sign > 0:
            return {"plus": GAMMA0, "minus": GAMMA1}
        return {"plus": GAMMA1, "minus": GAMMA0}
    raise CaseMismatchError(f"no side prediction for case {model.tag!r}")
