"""Warping profiles, effective potentials and transversal spectra.

A profile is the positive warping function f on [0,1] together with the
dimension n and the frequency omega.  Built-in kinds are symbolic (sympy
expressions lambdified to scalar callables, derivatives exact to any order
we need); tabulated profiles get a cubic spline and derivatives up to
order 2 only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
import sympy as sp
from scipy.integrate import cumulative_simpson
from scipy.interpolate import CubicSpline

from .errors import InsufficientSmoothnessError, InvalidPotentialError
from .sturm import Potential

__all__ = [
    "WarpingProfile",
    "TransversalSpectrum",
    "BoundaryGeometry",
    "q_from_profile",
    "transversal_spectrum",
    "circle_spectrum",
    "sphere_spectrum",
    "custom_spectrum",
    "taylor_mismatch_order",
    "boundary_geometry",
    "constant_profile",
    "affine_profile",
    "exponential_profile",
    "polynomial_profile",
    "gaussian_bump_profile",
    "side_bump_profile",
    "profile_from_expr",
    "tabulated_profile",
]

X = sp.Symbol("x", real=True)

_SYMBOLIC_MAX_ORDER = 8


class WarpingProfile:
    """Warping function with analytic derivatives.

    ``kind`` is "builtin-symbolic" or "tabulated-spline".  Symbolic profiles
    expose derivatives up to order 8; splines stop at order 2 and raise
    beyond that.  ``bump_interval`` marks profiles built as a symmetric base
    plus a one-sided interior bump supported on [a, a+width].
    """

    def __init__(self, n: int, omega: float, expr=None, spline: Optional[CubicSpline] = None,
                 kind: str = "builtin-symbolic", name: str = "",
                 bump_interval: Optional[tuple] = None, bump_sign: float = 0.0):
        if n < 2:
            raise ValueError(f"dimension n must be >= 2, got {n}")
        self.n = int(n)
        self.omega = float(omega)
        self.kind = kind
        self.name = name or kind
        self.expr = expr
        self.bump_interval = bump_interval
        self.bump_sign = bump_sign
        self._spline = spline
        self._derivs: dict = {}
        self._potential: Optional[Potential] = None

        if kind == "builtin-symbolic":
            if expr is None:
                raise ValueError("symbolic profile needs an expression")
            self.max_order = _SYMBOLIC_MAX_ORDER
            self._f = sp.lambdify(X, expr, modules=["math"])
        elif kind == "tabulated-spline":
            if spline is None:
                raise ValueError("tabulated profile needs a spline")
            self.max_order = 2
            self._f = lambda t: float(spline(t))
        else:
            raise ValueError(f"unknown profile kind {kind!r}")

        xs = np.linspace(0.0, 1.0, 1025)
        fv = self.f_grid(xs)
        if not np.all(np.isfinite(fv)) or np.min(fv) <= 0.0:
            raise InvalidPotentialError(f"warping function {self.name!r} must be positive on [0,1]")
        scale = float(np.max(np.abs(fv)))
        self.is_symmetric = bool(np.max(np.abs(fv - fv[::-1])) <= 1e-13 * scale)

    # -- evaluation ----------------------------------------------------

    def f(self, x: float) -> float:
        return float(self._f(x))

    def f_grid(self, xs) -> np.ndarray:
        return np.array([float(self._f(float(t))) for t in np.asarray(xs, dtype=float)])

    def deriv(self, order: int, x: float) -> float:
        """j-th derivative of f at x (order 0 is f itself)."""
        if order == 0:
            return self.f(x)
        if order > self.max_order:
            raise InsufficientSmoothnessError(
                f"{self.kind} profile exposes derivatives up to order {self.max_order}, "
                f"requested {order}"
            )
        fn = self._derivs.get(order)
        if fn is None:
            if self.kind == "builtin-symbolic":
                fn = sp.lambdify(X, sp.diff(self.expr, X, order), modules=["math"])
            else:
                fn = self._spline.derivative(order)
            self._derivs[order] = fn
        return float(fn(x))

    def potential(self) -> Potential:
        if self._potential is None:
            self._potential = q_from_profile(self)
        return self._potential

    def __repr__(self):
        return f"WarpingProfile({self.name}, n={self.n}, omega={self.omega})"


# ----------------------------------------------------------------------
# profile factories


def profile_from_expr(expr, n: int, omega: float, name: str = "",
                      bump_interval=None, bump_sign: float = 0.0) -> WarpingProfile:
    expr = sp.sympify(expr)
    # bind any free symbol spelled "x" to the module symbol (assumptions differ
    # after sympify of a plain string, which would zero out derivatives)
    subs = {s: X for s in expr.free_symbols if s.name == "x" and s is not X}
    if subs:
        expr = expr.subs(subs)
    stray = [s for s in expr.free_symbols if s is not X]
    if stray:
        raise ValueError(f"profile expression has unknown symbols {stray}")
    return WarpingProfile(n, omega, expr=expr, name=name or str(expr),
                          bump_interval=bump_interval, bump_sign=bump_sign)


def constant_profile(value: float, n: int, omega: float) -> WarpingProfile:
    return profile_from_expr(sp.Float(value), n, omega, name=f"const({value})")


def affine_profile(intercept: float, slope: float, n: int, omega: float) -> WarpingProfile:
    return profile_from_expr(intercept + slope * X, n, omega,
                             name=f"affine({intercept},{slope})")


def exponential_profile(amplitude: float, rate: float, n: int, omega: float) -> WarpingProfile:
    return profile_from_expr(amplitude * sp.exp(rate * X), n, omega,
                             name=f"exp({amplitude},{rate})")


def polynomial_profile(coeffs: Sequence[float], n: int, omega: float) -> WarpingProfile:
    expr = sum(c * X**j for j, c in enumerate(coeffs))
    return profile_from_expr(expr, n, omega, name=f"poly{tuple(coeffs)}")


def gaussian_bump_profile(base: float, height: float, center: float, width: float,
                          n: int, omega: float) -> WarpingProfile:
    expr = base + height * sp.exp(-((X - center) / width) ** 2)
    return profile_from_expr(expr, n, omega,
                             name=f"gauss({base},{height},{center},{width})")


def bump_expr(start: float, width: float, sharpness: float = 1.0):
    """C-infinity bump supported exactly on [start, start+width].

    exp(-sharpness/(1 - t^2)) with t the affine map of the support onto
    [-1,1]; all derivatives vanish at both edges.
    """
    t = 2 * (X - sp.Float(start)) / sp.Float(width) - 1
    return sp.Piecewise(
        (sp.exp(-sp.Float(sharpness) / (1 - t**2)), sp.Abs(t) < 1),
        (0, True),
    )


def side_bump_profile(base_level: float, curvature: float, start: float, width: float,
                      height: float, n: int, omega: float,
                      sharpness: float = 1.0) -> WarpingProfile:
    """Symmetric base plus a one-sided interior bump on [start, start+width].

    Requires 0 < start and start + width < 1/2 so the profile agrees with
    its reflection on [0, start].
    """
    if not (0.0 < start and start + width < 0.5):
        raise ValueError("bump support must sit inside ]0, 1/2[")
    base = sp.Float(base_level) + sp.Float(curvature) * X * (1 - X)
    expr = base + sp.Float(height) * bump_expr(start, width, sharpness)
    return profile_from_expr(
        expr, n, omega,
        name=f"sidebump(a={start},w={width},h={height})",
        bump_interval=(start, start + width),
        bump_sign=math.copysign(1.0, height),
    )


def tabulated_profile(xs: Sequence[float], values: Sequence[float], n: int,
                      omega: float) -> WarpingProfile:
    spline = CubicSpline(np.asarray(xs, dtype=float), np.asarray(values, dtype=float))
    return WarpingProfile(n, omega, spline=spline, kind="tabulated-spline", name="tabulated")


# ----------------------------------------------------------------------
# effective potential


def q_from_profile(p: WarpingProfile) -> Potential:
    """Effective 1D potential of the warped product.

    q(x) = rho f''/f + rho(rho-1) (f'/f)^2 - omega f with rho = (n-2)/4;
    for n = 2 this is exactly -omega f.
    """
    if p.n == 2:
        fn = p._f
        om = p.omega
        expr = -sp.Float(om) * p.expr if p.expr is not None else None
        return Potential(lambda t: -om * float(fn(t)),
                         name=f"q[{p.name}]", expr=expr, expr_symbol=X)
    if p.max_order < 2:
        raise InsufficientSmoothnessError(
            "effective potential for n >= 3 needs second derivatives"
        )
    rho = (p.n - 2) / 4.0
    om = p.omega
    if p.kind == "builtin-symbolic":
        rho_s = sp.Rational(p.n - 2, 4)
        q_expr = (rho_s * sp.diff(p.expr, X, 2) / p.expr
                  + rho_s * (rho_s - 1) * (sp.diff(p.expr, X) / p.expr) ** 2
                  - sp.Float(om) * p.expr)
        fn = sp.lambdify(X, q_expr, modules=["math"])
        return Potential(lambda t: float(fn(t)), name=f"q[{p.name}]",
                         expr=q_expr, expr_symbol=X)

    f0, f1, f2 = p._f, p._spline.derivative(1), p._spline.derivative(2)

    def q_fn(t):
        fv = float(f0(t))
        return rho * float(f2(t)) / fv + rho * (rho - 1.0) * (float(f1(t)) / fv) ** 2 - om * fv

    return Potential(q_fn, name=f"q[{p.name}]")


# ----------------------------------------------------------------------
# transversal spectra


@dataclass
class TransversalSpectrum:
    """Nondecreasing (eigenvalue, multiplicity) pairs of the cross manifold."""

    entries: list
    source: str = "custom-list"

    def __post_init__(self):
        if not self.entries:
            raise ValueError("spectrum must be non-empty")
        mus = [mu for mu, _ in self.entries]
        if abs(mus[0]) > 1e-12 or self.entries[0][1] != 1:
            raise ValueError("spectrum must start with eigenvalue 0 of multiplicity 1")
        if any(b <= a for a, b in zip(mus, mus[1:])):
            raise ValueError("distinct spectrum entries must strictly increase")
        if any(m < 1 for _, m in self.entries):
            raise ValueError("multiplicities must be positive")

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def mus(self) -> list:
        return [mu for mu, _ in self.entries]


def circle_spectrum(radius: float, count: int) -> TransversalSpectrum:
    entries = [(0.0, 1)] + [((j / radius) ** 2, 2) for j in range(1, count)]
    return TransversalSpectrum(entries[:count], source=f"circle({radius})")


def sphere_spectrum(dim: int, count: int) -> TransversalSpectrum:
    def mult(ell):
        if ell == 0:
            return 1
        return math.comb(ell + dim, dim) - math.comb(ell + dim - 2, dim)

    entries = [(float(ell * (ell + dim - 1)), mult(ell)) for ell in range(count)]
    return TransversalSpectrum(entries, source=f"sphere({dim})")


def custom_spectrum(values) -> TransversalSpectrum:
    entries = []
    for v in values:
        if isinstance(v, (tuple, list)):
            entries.append((float(v[0]), int(v[1])))
        else:
            entries.append((float(v), 1))
    return TransversalSpectrum(entries, source="custom-list")


def transversal_spectrum(source: str, count: int, radius: float = 1.0, dim: int = 2,
                         values=None) -> TransversalSpectrum:
    if count < 1:
        raise ValueError("count must be >= 1")
    if source == "circle":
        return circle_spectrum(radius, count)
    if source == "sphere":
        return sphere_spectrum(dim, count)
    if source == "custom":
        if values is None:
            raise ValueError("custom spectrum needs values")
        return custom_spectrum(values)
    raise ValueError(f"unknown spectrum source {source!r}")


# ----------------------------------------------------------------------
# symmetry diagnostics and boundary geometry


def taylor_mismatch_order(p: WarpingProfile, tol: float = 1e-9,
                          probe_order: int = 6) -> Optional[int]:
    """Smallest k with f^(k)(0) != (-1)^k f^(k)(1), or None if no mismatch
    shows up through ``probe_order``."""
    if p.kind != "builtin-symbolic":
        probe_order = min(probe_order, p.max_order)
    for k in range(probe_order + 1):
        d0 = p.deriv(k, 0.0)
        d1 = p.deriv(k, 1.0)
        if abs(d0 - (-1.0) ** k * d1) > tol * (1.0 + abs(d0)):
            return k
    return None


@dataclass
class BoundaryGeometry:
    """Riemannian distances to the two boundary pieces and their curvatures."""

    d0: Callable[[float], float]
    d1: Callable[[float], float]
    kappa0: float
    kappa1: float
    width: float


def boundary_geometry(p: WarpingProfile, panels: int = 4096) -> BoundaryGeometry:
    xs = np.linspace(0.0, 1.0, panels + 1)
    g = np.sqrt(p.f_grid(xs))
    cum = cumulative_simpson(g, x=xs, initial=0.0)
    width = float(cum[-1])

    def d0(x, _xs=xs, _c=cum):
        return float(np.interp(x, _xs, _c))

    def d1(x, _xs=xs, _c=cum, _w=width):
        return _w - float(np.interp(x, _xs, _c))

    kappa0 = -p.deriv(1, 0.0) / (4.0 * p.f(0.0) ** 1.5)
    kappa1 = p.deriv(1, 1.0) / (4.0 * p.f(1.0) ** 1.5)
    return BoundaryGeometry(d0=d0, d1=d1, kappa0=kappa0, kappa1=kappa1, width=width)
