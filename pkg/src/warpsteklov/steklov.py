"""Per-mode Dirichlet-to-Neumann blocks and the Steklov spectrum.

Each transversal eigenvalue mu contributes a symmetric 2x2 block

    [[A, B], [B, C]],   A = -M(-mu)/sqrt(f(0)) + (n-2) f'(0)/(4 f(0)^{3/2}),
                        C = -N(-mu)/sqrt(f(1)) - (n-2) f'(1)/(4 f(1)^{3/2}),
                        B = -(f(0) f(1))^{-1/4} / Delta(-mu),

whose eigenvalues are the two Steklov eigenvalues attached to mu.  B decays
like exp(-sqrt(mu)) and is kept in ExtScalar form end to end; eigenvector
ratios can reach exp(+-sqrt(mu)) and get the same treatment.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.integrate import simpson

from . import sturm
from .errors import DegenerateTraceError, GridError
from .extscalar import ExtScalar
from .geometry import TransversalSpectrum, WarpingProfile
from .sturm import DEFAULT_SETTINGS, IntegratorSettings
from .util import ordered_parallel_map

__all__ = [
    "DnBlock",
    "SteklovPair",
    "EigenfunctionTrace",
    "SpectrumRow",
    "dn_block",
    "steklov_pair",
    "splitting_lower_bound",
    "eigenfunction_trace",
    "bulk_norm",
    "full_spectrum",
]

# below this relative size the native A - C difference is cancellation noise
# and the off-diagonal difference is recomputed through the integral identity
_DIFF_REFINE_THRESHOLD = 1e-4


@dataclass
class DnBlock:
    """Entries of one 2x2 DN block, with a cancellation-safe A - C."""

    mu: float
    a_entry: float
    c_entry: float
    b_ext: ExtScalar
    ac_diff: float          # A - C, refined when the native difference cancels
    diff_route: str         # "native" | "bridge" | "symmetric"
    m_minus_n: Optional[float] = None

    @property
    def b_entry(self) -> float:
        return self.b_ext.to_float_or_zero()


@dataclass
class SteklovPair:
    """The two eigenvalues of a DN block plus eigenvector data."""

    mu: float
    lambda_plus: float
    lambda_minus: float
    gap: float
    gap_ext: ExtScalar
    ratio_plus_ext: ExtScalar
    ratio_minus_ext: ExtScalar
    norm_plus_ext: ExtScalar
    norm_minus_ext: ExtScalar

    @property
    def ratio_plus(self) -> float:
        return self.ratio_plus_ext.to_float_or_zero()

    @property
    def ratio_minus(self) -> float:
        return self.ratio_minus_ext.to_float_or_zero()

    @property
    def norm_plus(self) -> float:
        return self.norm_plus_ext.to_float_or_zero()

    @property
    def norm_minus(self) -> float:
        return self.norm_minus_ext.to_float_or_zero()

    def ratio(self, branch: str) -> ExtScalar:
        return self.ratio_plus_ext if branch == "plus" else self.ratio_minus_ext

    def norm(self, branch: str) -> ExtScalar:
        return self.norm_plus_ext if branch == "plus" else self.norm_minus_ext


@dataclass
class EigenfunctionTrace:
    branch: str
    mu: float
    grid: np.ndarray
    w_values: list                  # list of ExtScalar
    phi_factor: np.ndarray          # f(x)^{(2-n)/4}
    normalization: str              # "boundary-L2" | "bulk-L2"
    bulk_norm_value: Optional[float] = None

    def native(self) -> np.ndarray:
        return np.array([v.to_float_or_zero() for v in self.w_values])

    def log_magnitudes(self) -> np.ndarray:
        return np.array([v.ln_mag for v in self.w_values])


def _weights(p: WarpingProfile):
    f0, f1 = p.f(0.0), p.f(1.0)
    return f0, f1, 1.0 / math.sqrt(f0), 1.0 / math.sqrt(f1)


def dn_block(p: WarpingProfile, mu: float,
             settings: IntegratorSettings = DEFAULT_SETTINGS) -> DnBlock:
    """Assemble the DN block at transversal eigenvalue mu.

    For symmetric profiles A = C exactly (the two Weyl functions coincide).
    Otherwise, when the native A - C sits below the cancellation floor, the
    difference is recomputed from the integral identity for M - N, which is
    accurate relative to its own (possibly exponentially small) scale.
    """
    q = p.potential()
    wd = sturm.weyl_data(q, -mu, settings)
    f0, f1, w0, w1 = _weights(p)
    corr = p.n - 2
    g0 = corr * p.deriv(1, 0.0) / (4.0 * f0**1.5)
    g1 = corr * p.deriv(1, 1.0) / (4.0 * f1**1.5)
    a_entry = -wd.m_fun * w0 + g0
    c_entry = -wd.n_fun * w1 - g1
    b_ext = -((f0 * f1) ** -0.25) / wd.delta

    if p.is_symmetric:
        # M = N and f'(0) = -f'(1) under reflection symmetry
        c_entry = a_entry
        return DnBlock(mu=mu, a_entry=a_entry, c_entry=c_entry, b_ext=b_ext,
                       ac_diff=0.0, diff_route="symmetric", m_minus_n=0.0)

    native_diff = a_entry - c_entry
    scale = abs(a_entry) + abs(c_entry)
    if abs(native_diff) >= _DIFF_REFINE_THRESHOLD * scale:
        return DnBlock(mu=mu, a_entry=a_entry, c_entry=c_entry, b_ext=b_ext,
                       ac_diff=native_diff, diff_route="native",
                       m_minus_n=wd.m_fun - wd.n_fun)

    mn = sturm.weyl_difference_integral(q, -mu, settings=settings)
    # A - C = -(M-N)/sqrt(f0) + N (1/sqrt(f1) - 1/sqrt(f0)) + g0 + g1,
    # every term now free of large-scale cancellation
    refined = -mn * w0 + wd.n_fun * (w1 - w0) + g0 + g1
    return DnBlock(mu=mu, a_entry=a_entry, c_entry=c_entry, b_ext=b_ext,
                   ac_diff=refined, diff_route="bridge", m_minus_n=mn)


def steklov_pair(block: DnBlock) -> SteklovPair:
    """Eigenvalues and eigenvector ratios of a DN block.

    ratio_pm = (lambda_pm - A)/B is evaluated on the numerically stable
    branch: the large root of the pair comes from the same-sign combination
    and the small one from the exact relation ratio_plus * ratio_minus = -1,
    so nothing cancels even when |C - A| >> |B|.
    """
    b = block.b_ext
    if b.is_zero:
        raise DegenerateTraceError("DN block has vanishing off-diagonal entry")
    t = ExtScalar.from_float(-block.ac_diff) / b if block.ac_diff != 0.0 else ExtScalar.from_float(0.0)
    disc = (t * t + 4.0).sqrt()
    gap_ext = abs(b) * disc
    gap = gap_ext.to_float_or_zero()
    s = block.a_entry + block.c_entry
    lam_plus = 0.5 * (s + gap)
    lam_minus = 0.5 * (s - gap)

    sb = b.sign
    if abs(t) <= ExtScalar.from_float(1.0):
        r_plus = (t + sb * disc) * 0.5
        r_minus = (t - sb * disc) * 0.5
    else:
        st = t.sign
        big = (t + st * disc) * 0.5
        small = -1.0 / big
        if st == sb:
            r_plus, r_minus = big, small
        else:
            r_plus, r_minus = small, big

    n_plus = (r_plus * r_plus + 1.0).sqrt()
    n_minus = (r_minus * r_minus + 1.0).sqrt()
    return SteklovPair(
        mu=block.mu,
        lambda_plus=lam_plus,
        lambda_minus=lam_minus,
        gap=gap,
        gap_ext=gap_ext,
        ratio_plus_ext=r_plus,
        ratio_minus_ext=r_minus,
        norm_plus_ext=n_plus,
        norm_minus_ext=n_minus,
    )


def splitting_lower_bound(p: WarpingProfile, mu: float) -> float:
    """Universal lower bound for the gap at transversal eigenvalue mu."""
    if mu <= 0.0:
        return 0.0
    f0, f1, _, _ = _weights(p)
    root = math.sqrt(mu)
    qn = p.potential().l2_norm
    sinh_ext = (ExtScalar.exp(root) - ExtScalar.exp(-root)) * 0.5
    denom = sinh_ext * root + ExtScalar.exp(root + qn)
    bound = (2.0 * mu) / (((f0 * f1) ** 0.25) * denom)
    return bound.to_float_or_zero()


def eigenfunction_trace(p: WarpingProfile, mu: float, branch: str,
                        grid: Optional[Sequence[float]] = None,
                        normalization: str = "boundary-L2",
                        settings: IntegratorSettings = DEFAULT_SETTINGS) -> EigenfunctionTrace:
    """Profile w(x) of the eigenfunction attached to (mu, branch).

    w = (1/n) Psi/f(0)^{1/4} + (ratio/n) Phi/f(1)^{1/4} with the boundary-L2
    normalization built in; "bulk-L2" divides by the weighted L2 norm.
    """
    if branch not in ("plus", "minus"):
        raise ValueError(f"branch must be 'plus' or 'minus', got {branch!r}")
    if grid is None:
        grid = np.linspace(0.0, 1.0, 1025)
    grid = np.asarray(grid, dtype=float)
    q = p.potential()
    block = dn_block(p, mu, settings)
    pair = steklov_pair(block)
    psi, phi = sturm.weyl_traces(q, -mu, grid, settings)

    f0, f1, _, _ = _weights(p)
    inv_norm = 1.0 / pair.norm(branch)
    coef_psi = inv_norm * (f0 ** -0.25)
    coef_phi = (pair.ratio(branch) / pair.norm(branch)) * (f1 ** -0.25)
    w_values = [coef_psi * pv + coef_phi * fv for pv, fv in zip(psi.values, phi.values)]

    expo = (2.0 - p.n) / 4.0
    phi_factor = np.array([p.f(float(x)) ** expo for x in grid])

    trace = EigenfunctionTrace(branch=branch, mu=mu, grid=grid, w_values=w_values,
                               phi_factor=phi_factor, normalization="boundary-L2")
    if normalization == "boundary-L2":
        return trace
    if normalization != "bulk-L2":
        raise ValueError(f"unknown normalization {normalization!r}")
    bn = bulk_norm(trace, p)
    scale = ExtScalar.from_float(1.0 / bn)
    trace.w_values = [v * scale for v in trace.w_values]
    trace.normalization = "bulk-L2"
    trace.bulk_norm_value = bn
    return trace


def bulk_norm(trace: EigenfunctionTrace, p: WarpingProfile) -> float:
    """Weighted L2 norm (integral of |w|^2 f) of a boundary-normalized trace."""
    if trace.normalization != "boundary-L2":
        raise ValueError("bulk_norm expects a boundary-L2 trace")
    if len(trace.grid) < 128:
        raise GridError("bulk norm needs at least 128 grid points")
    w = trace.native()
    fv = p.f_grid(trace.grid)
    val = simpson(w * w * fv, x=trace.grid)
    return float(math.sqrt(max(val, 0.0)))


@dataclass(frozen=True)
class SpectrumRow:
    lam: float
    branch: str
    mode_index: int
    mu: float
    multiplicity: int


def full_spectrum(p: WarpingProfile, spec: TransversalSpectrum,
                  settings: IntegratorSettings = DEFAULT_SETTINGS,
                  workers: int = 1) -> list:
    """All Steklov eigenvalues of the profile over the given transversal
    spectrum, merged and sorted, with provenance tags."""

    def one(indexed):
        m, (mu, mult) = indexed
        pair = steklov_pair(dn_block(p, mu, settings))
        return (
            SpectrumRow(pair.lambda_minus, "minus", m, mu, mult),
            SpectrumRow(pair.lambda_plus, "plus", m, mu, mult),
        )

    rows = []
    for pair_rows in ordered_parallel_map(one, list(enumerate(spec)), workers):
        rows.extend(pair_rows)
    rows.sort(key=lambda r: (r.lam, r.mode_index, r.branch))
    return rows
