"""Shared fixtures: test profiles, potentials, and expensive session-scoped
sweeps reused across modules."""

import math

import numpy as np
import pytest
import sympy as sp

from warpsteklov import geometry as geo
from warpsteklov import localization as loc
from warpsteklov import steklov as stk
from warpsteklov.geometry import X
from warpsteklov.sturm import Potential


@pytest.fixture(scope="session")
def zero_potential():
    return Potential(lambda x: 0.0, name="zero", expr=sp.Integer(0), expr_symbol=X)


@pytest.fixture(scope="session")
def const5_potential():
    return Potential(lambda x: 5.0, name="five", expr=sp.Integer(5), expr_symbol=X)


@pytest.fixture(scope="session")
def asymmetric_potentials():
    """Smooth potentials with a boundary-value asymmetry (difference is O(1/kappa))."""
    return [
        Potential(lambda x: x, name="x", expr=X, expr_symbol=X),
        Potential(lambda x: x * x, name="x^2", expr=X**2, expr_symbol=X),
        Potential(lambda x: math.exp(x), name="e^x", expr=sp.exp(X), expr_symbol=X),
    ]


@pytest.fixture(scope="session")
def flat_profile():
    """f = 1, n = 2, omega = 0: everything has elementary closed forms."""
    return geo.constant_profile(1.0, 2, 0.0)


@pytest.fixture(scope="session")
def two_dim_step_profile():
    """f(0) = 1, f(1) = 4, n = 2, omega = 0."""
    return geo.affine_profile(1.0, 3.0, 2, 0.0)


@pytest.fixture(scope="session")
def symmetric_profile():
    """f = 1 + x(1-x), n = 3, omega = 0: the reference symmetric case."""
    return geo.polynomial_profile([1.0, 1.0, -1.0], 3, 0.0)


@pytest.fixture(scope="session")
def iia_k0_profile():
    """Boundary-value mismatch (k = 0) in dimension 3: b_0 = 1/2."""
    return geo.affine_profile(1.0, 3.0, 3, 0.0)


@pytest.fixture(scope="session")
def iia_k1_profile():
    """First-derivative parity mismatch (k = 1) in dimension 3: b_1 = -1/4."""
    return geo.profile_from_expr("1 + x*(1-x) + 1.0*(x - x**3)", 3, 0.0)


@pytest.fixture(scope="session")
def iib_profile():
    """Symmetric base plus one-sided interior bump on [1/4, 0.3], n=2, omega=6."""
    return geo.side_bump_profile(1.0, 0.0, 0.25, 0.05, 6.0, n=2, omega=6.0,
                                 sharpness=0.1)


@pytest.fixture(scope="session")
def iic_profile():
    """Flat Taylor match at both ends, generically asymmetric interior."""
    expr = (1 + X * (1 - X)
            + sp.Rational(1, 5) * geo.bump_expr(0.2, 0.2, 1.0)
            - sp.Rational(1, 10) * geo.bump_expr(0.55, 0.25, 1.0))
    return geo.profile_from_expr(expr, 3, 0.0, name="iic")


FLEA_KAPPAS = (5.0, 10.0, 15.0, 20.0, 25.0, 30.0, 40.0)
FLEA_DELTAS = (0.0, 1e-4, 1e-3, 1e-2)


@pytest.fixture(scope="session")
def flea_spectrum():
    return geo.custom_spectrum([0.0] + [k * k for k in FLEA_KAPPAS])


@pytest.fixture(scope="session")
def flea_report(symmetric_profile, flea_spectrum):
    """Boundary-value flea sweep shared by localization tests and acceptance."""
    return loc.flea_sweep(symmetric_profile, loc.FleaBump("boundary-value"),
                          list(FLEA_DELTAS), flea_spectrum)


GAP_FIT_KAPPAS = (10.0, 14.0, 18.0, 22.0, 26.0, 30.0, 35.0, 40.0)


@pytest.fixture(scope="session")
def iib_gaps(iib_profile):
    gaps = []
    for kap in GAP_FIT_KAPPAS:
        pair = stk.steklov_pair(stk.dn_block(iib_profile, kap * kap))
        gaps.append((kap * kap, pair.gap_ext))
    return gaps


@pytest.fixture(scope="session")
def symmetric_gaps(symmetric_profile):
    gaps = []
    for kap in GAP_FIT_KAPPAS:
        pair = stk.steklov_pair(stk.dn_block(symmetric_profile, kap * kap))
        gaps.append((kap * kap, pair.gap_ext))
    return gaps
