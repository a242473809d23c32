"""Closed-form asymptotic predictions and internal consistency identities.

The large-mu expansion of the Weyl-Titchmarsh function drives everything:
its coefficients decide which boundary each eigenvalue branch tracks, the
leading constants of the gap laws, and the exponential rates measured by
the fitting helpers.  Two recursion variants for the expansion coefficients
are shipped; a constant-potential oracle arbitrates between them (the
"oracle-corrected" variant wins and is the default).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import sympy as sp

from . import sturm
from .errors import CaseMismatchError, InsufficientSmoothnessError
from .extscalar import ExtScalar
from .geometry import WarpingProfile, TransversalSpectrum, taylor_mismatch_order
from .steklov import dn_block
from .sturm import DEFAULT_SETTINGS, IntegratorSettings, Potential

__all__ = [
    "ExpansionCoefficients",
    "CaseModel",
    "Prediction",
    "GapRateFit",
    "beta_coefficients",
    "m_expansion_check",
    "case_constants",
    "predict",
    "bridge_integral",
    "gap_rate_fit",
    "subsequence_search",
    "VARIANT_PAPER",
    "VARIANT_ORACLE",
]

VARIANT_PAPER = "paper-stated"
VARIANT_ORACLE = "oracle-corrected"


@dataclass
class ExpansionCoefficients:
    betas: list          # expansion coefficients at x=0
    gammas: list         # same recursion applied to the reflected potential
    recursion_variant: str


def _recursion(q_expr, x, order: int, variant: str):
    """Symbolic coefficient functions beta_0(x) .. beta_order(x)."""
    betas = [q_expr / 2]
    for j in range(order):
        if variant == VARIANT_PAPER:
            nxt = sp.diff(betas[j], x) / 2 + sum(
                betas[l] * betas[j - l] for l in range(j + 1)
            ) / 2
        elif variant == VARIANT_ORACLE:
            if j == 0:
                nxt = sp.diff(betas[0], x) / 2
            else:
                nxt = sp.diff(betas[j], x) / 2 - sum(
                    betas[l] * betas[j - 1 - l] for l in range(j)
                ) / 2
        else:
            raise ValueError(f"unknown recursion variant {variant!r}")
        betas.append(sp.simplify(nxt))
    return betas


def beta_coefficients(q: Potential, order: int,
                      variant: str = VARIANT_ORACLE) -> ExpansionCoefficients:
    """Expansion coefficients beta_0..beta_order of M and gamma_0..gamma_order of N.

    Needs a symbolic potential (smooth profiles); order is capped at 4.
    """
    if order > 4 or order < 0:
        raise ValueError("order must be in [0, 4]")
    if q.expr is None or q.expr_symbol is None:
        raise InsufficientSmoothnessError(
            "expansion coefficients need a symbolic potential"
        )
    x = q.expr_symbol
    betas_fn = _recursion(q.expr, x, order, variant)
    gammas_fn = _recursion(q.expr.subs(x, 1 - x), x, order, variant)
    betas = [float(b.subs(x, 0)) for b in betas_fn]
    gammas = [float(g.subs(x, 0)) for g in gammas_fn]
    return ExpansionCoefficients(betas=betas, gammas=gammas, recursion_variant=variant)


def m_expansion_check(q: Potential, kappa: float, order: int,
                      variant: str = VARIANT_ORACLE,
                      settings: IntegratorSettings = DEFAULT_SETTINGS) -> float:
    """Scaled residual of the large-kappa expansion of M.

    Returns |M(-kappa^2) + kappa + sum_j beta_j kappa^{-j-1}| * kappa^{order+2};
    bounded in kappa exactly when the recursion variant is the correct one.
    """
    if kappa < 5:
        raise ValueError("expansion check needs kappa >= 5")
    coeffs = beta_coefficients(q, order, variant)
    m = sturm.weyl_data(q, -kappa * kappa, settings).m_fun
    series = -kappa - sum(b * kappa ** (-j - 1) for j, b in enumerate(coeffs.betas))
    return abs(m - series) * kappa ** (order + 2)


# ----------------------------------------------------------------------
# case taxonomy


@dataclass
class CaseModel:
    """Which asymptotic regime a profile falls in, plus its constants.

    tag: "I-symmetric" | "explicit" (n=2, omega=0) | "IIA" | "IIB" | "IIC".
    For IIA, ``constant`` is the leading gap constant (a_k for n=2, b_k for
    n>=3) and ``alpha_exponent`` the power entering the remainder estimates.
    For IIB, ``a`` is the width of exact boundary symmetry and ``sign``
    the sign of q(x)-q(1-x) just past it.
    """

    tag: str
    n: int
    omega: float
    f0: float
    f1: float
    k: Optional[int] = None
    a: Optional[float] = None
    sign: float = 0.0
    constant: Optional[float] = None
    alpha_exponent: Optional[float] = None
    epsilon: float = 0.05
    q_l2_norm: float = 0.0


def _alpha_exponent(n: int, k: int) -> float:
    if k == 0:
        return 0.5
    return (k + 3) / 2.0 if n == 2 else (k + 1) / 2.0


def case_constants(p: WarpingProfile, tol: float = 1e-9, probe_order: int = 6,
                   epsilon: float = 0.05) -> CaseModel:
    """Classify the profile and compute its leading case constants."""
    f0, f1 = p.f(0.0), p.f(1.0)
    q = p.potential()
    base = dict(n=p.n, omega=p.omega, f0=f0, f1=f1, epsilon=epsilon,
                q_l2_norm=q.l2_norm)

    if p.is_symmetric:
        return CaseModel(tag="I-symmetric", **base)

    k = taylor_mismatch_order(p, tol=tol, probe_order=probe_order)
    if k is None:
        if p.bump_interval is not None:
            a = p.bump_interval[0]
            mid = 0.5 * (p.bump_interval[0] + p.bump_interval[1])
            sign = math.copysign(1.0, q(mid) - q(1.0 - mid))
            return CaseModel(tag="IIB", a=a, sign=sign, **base)
        return CaseModel(tag="IIC", **base)

    if p.n == 2 and p.omega == 0.0:
        if k == 0:
            return CaseModel(tag="explicit", k=0,
                             constant=1.0 / math.sqrt(f0) - 1.0 / math.sqrt(f1),
                             alpha_exponent=_alpha_exponent(2, 0), **base)
        # with zero potential only the boundary values of f matter; a
        # higher-order mismatch behaves exactly like the symmetric case
        return CaseModel(tag="explicit", k=k, **base)

    if k == 0:
        const = 1.0 / math.sqrt(f0) - 1.0 / math.sqrt(f1)
    else:
        jump = p.deriv(k, 0.0) - (-1.0) ** k * p.deriv(k, 1.0)
        if p.n == 2:
            const = -p.omega * jump / (2.0 ** (k + 1) * math.sqrt(f0))
        else:
            const = (p.n - 2) * jump / (2.0 ** (k + 1) * f0 ** 1.5)
    return CaseModel(tag="IIA", k=k, constant=const,
                     alpha_exponent=_alpha_exponent(p.n, k), **base)


@dataclass
class Prediction:
    lambda_plus: float
    lambda_minus: float
    gap: Optional[float]
    gap_lower: Optional[float] = None
    gap_upper: Optional[float] = None


def predict(model: CaseModel, mu: float) -> Prediction:
    """Leading-order eigenvalue/gap prediction for one transversal eigenvalue."""
    root = math.sqrt(mu)
    w0 = 1.0 / math.sqrt(model.f0)
    w1 = 1.0 / math.sqrt(model.f1)

    if model.tag == "I-symmetric":
        lam = root * w0
        return Prediction(lam, lam, gap=2.0 * w0 * root * math.exp(-root))

    if model.tag == "explicit":
        if mu == 0.0:
            return Prediction(w0 + w1, 0.0, gap=w0 + w1)
        coth = 1.0 / math.tanh(root)
        disc = math.sqrt((w0 - w1) ** 2 * coth**2 + 4.0 * w0 * w1 / math.sinh(root) ** 2)
        lam_p = 0.5 * root * ((w0 + w1) * coth + disc)
        lam_m = 0.5 * root * ((w0 + w1) * coth - disc)
        return Prediction(lam_p, lam_m, gap=lam_p - lam_m)

    if model.tag == "IIA":
        lam_p = max(w0, w1) * root
        lam_m = min(w0, w1) * root
        k = model.k
        c = abs(model.constant)
        if k == 0:
            gap = c * root
        elif model.n == 2:
            gap = c * mu ** (-(1 + k) / 2.0)
        else:
            gap = c * mu ** ((1 - k) / 2.0)
        return Prediction(lam_p, lam_m, gap=gap)

    if model.tag == "IIB":
        lam = root * w0
        eps = model.epsilon
        return Prediction(
            lam, lam, gap=None,
            gap_lower=math.exp(-2.0 * (model.a + eps) * root),
            gap_upper=math.exp(-2.0 * (model.a - eps) * root),
        )

    if model.tag == "IIC":
        lam = root * w0
        lower = None
        if mu > 0:
            sinh_ext = (ExtScalar.exp(root) - ExtScalar.exp(-root)) * 0.5
            denom = sinh_ext * root + ExtScalar.exp(root + model.q_l2_norm)
            lower = ((2.0 * mu) / (((model.f0 * model.f1) ** 0.25) * denom)).to_float_or_zero()
        return Prediction(lam, lam, gap=None, gap_lower=lower)

    raise CaseMismatchError(f"unknown case tag {model.tag!r}")


# ----------------------------------------------------------------------
# identities and fits


def bridge_integral(q: Potential, z: float, grid: Optional[Sequence[float]] = None,
                    settings: IntegratorSettings = DEFAULT_SETTINGS) -> float:
    """Quadrature form of M(z) - N(z) (independent of the direct difference)."""
    return sturm.weyl_difference_integral(q, z, grid, settings)


@dataclass
class GapRateFit:
    rate: float
    intercept: float
    n_points: int
    exponential: bool    # False when the gaps do not decay exponentially


def gap_rate_fit(gaps: Sequence, window=(10.0, 40.0)) -> GapRateFit:
    """Least-squares slope of -ln(gap) against sqrt(mu) inside the window.

    ``gaps`` holds (mu, gap) pairs where gap may be an ExtScalar (preferred:
    log magnitudes survive native underflow) or a positive float.
    """
    roots, logs = [], []
    for mu, d in gaps:
        if isinstance(d, ExtScalar):
            if d.is_zero:
                raise ValueError("gap rate fit needs positive gaps")
            ln = d.ln_mag
        else:
            if d <= 0:
                raise ValueError("gap rate fit needs positive gaps")
            ln = math.log(d)
        r = math.sqrt(mu)
        if window[0] <= r <= window[1]:
            roots.append(r)
            logs.append(-ln)
    if len(roots) < 4:
        raise ValueError(f"need >= 4 samples in window {window}, got {len(roots)}")
    A = np.vstack([roots, np.ones(len(roots))]).T
    slope, intercept = np.linalg.lstsq(A, np.array(logs), rcond=None)[0]
    exponential = bool(slope > 0.1)
    return GapRateFit(rate=float(slope), intercept=float(intercept),
                      n_points=len(roots), exponential=exponential)


def subsequence_search(p: WarpingProfile, spec: TransversalSpectrum,
                       threshold_power: float = 0.25,
                       settings: IntegratorSettings = DEFAULT_SETTINGS) -> list:
    """Mode indices where |(A-C)/B| exceeds mu^threshold_power.

    Empirical counterpart of the statement that the off-diagonal coupling is
    eventually negligible along a subsequence for generic asymmetry.
    """
    selected = []
    for m, (mu, _) in enumerate(spec):
        if mu <= 0:
            continue
        block = dn_block(p, mu, settings)
        ratio = abs(ExtScalar.from_float(block.ac_diff) / block.b_ext) if block.ac_diff else ExtScalar.from_float(0.0)
        if not ratio.is_zero and ratio.ln_mag > threshold_power * math.log(mu):
            selected.append(m)
    return selected
