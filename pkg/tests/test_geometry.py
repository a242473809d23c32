import math

import numpy as np
import pytest
import sympy as sp

from warpsteklov import geometry as geo
from warpsteklov.errors import InsufficientSmoothnessError, InvalidPotentialError
from warpsteklov.geometry import X


# ----------------------------------------------------------------------
# effective potential


def test_q_two_dimensional_is_minus_omega_f():
    p = geo.affine_profile(1.0, 3.0, 2, 2.0)
    q = geo.q_from_profile(p)
    for x in np.linspace(0, 1, 33):
        assert q(float(x)) == -2.0 * p.f(float(x))


def test_q_two_dimensional_zero_frequency_vanishes():
    q = geo.q_from_profile(geo.gaussian_bump_profile(1.0, 0.5, 0.3, 0.1, 2, 0.0))
    assert q.sup_norm == 0.0


def test_q_exponential_dimension_four():
    q = geo.q_from_profile(geo.exponential_profile(1.0, 1.0, 4, 1.0))
    for x in (0.0, 0.3, 1.0):
        assert q(x) == pytest.approx(0.25 - math.exp(x), rel=1e-14)


@pytest.mark.parametrize("n", [3, 4, 5, 6, 7])
def test_q_factored_and_expanded_forms_agree(n):
    p = geo.exponential_profile(2.0, 0.7, n, 0.5)
    q = geo.q_from_profile(p)
    for x in (0.0, 0.37, 0.81, 1.0):
        f, f1, f2 = p.f(x), p.deriv(1, x), p.deriv(2, x)
        expanded = ((n - 2) / 4.0 * f2 / f
                    + (n - 2) * (n - 6) / 16.0 * (f1 / f) ** 2 - 0.5 * f)
        assert q(x) == pytest.approx(expanded, rel=1e-12)


def test_symmetry_transfer_to_potential(symmetric_profile):
    q = symmetric_profile.potential()
    xs = np.linspace(0.0, 1.0, 1024)
    vals = np.array([q(float(t)) for t in xs])
    assert np.max(np.abs(vals - vals[::-1])) <= 1e-12


def test_nonpositive_profile_rejected():
    with pytest.raises(InvalidPotentialError):
        geo.affine_profile(0.5, -1.0, 2, 0.0)  # hits zero inside [0,1]


def test_tabulated_profile_smoothness_limit():
    xs = np.linspace(0.0, 1.0, 101)
    p = geo.tabulated_profile(xs, 1.0 + xs * (1 - xs), 3, 0.0)
    assert p.deriv(2, 0.5) == pytest.approx(-2.0, abs=1e-4)
    with pytest.raises(InsufficientSmoothnessError):
        p.deriv(3, 0.5)


# ----------------------------------------------------------------------
# transversal spectra


def test_circle_spectrum():
    assert geo.circle_spectrum(1.0, 4).entries == [(0.0, 1), (1.0, 2), (4.0, 2), (9.0, 2)]


def test_circle_radius_scaling():
    assert geo.circle_spectrum(2.0, 3).entries == [(0.0, 1), (0.25, 2), (1.0, 2)]


def test_sphere_spectrum():
    assert geo.sphere_spectrum(2, 3).entries == [(0.0, 1), (2.0, 3), (6.0, 5)]
    assert geo.sphere_spectrum(3, 3).entries == [(0.0, 1), (3.0, 4), (8.0, 9)]


def test_custom_spectrum_verbatim():
    assert geo.custom_spectrum([0, 2.5, 7.1]).entries == [(0.0, 1), (2.5, 1), (7.1, 1)]


def test_custom_spectrum_rejects_decreasing():
    with pytest.raises(ValueError):
        geo.custom_spectrum([0.0, 3.0, 2.0])
    with pytest.raises(ValueError):
        geo.custom_spectrum([1.0, 2.0])  # must start at 0


# ----------------------------------------------------------------------
# symmetry diagnostics


def test_mismatch_none_for_symmetric(symmetric_profile):
    assert geo.taylor_mismatch_order(symmetric_profile) is None


def test_mismatch_value():
    assert geo.taylor_mismatch_order(geo.affine_profile(1.0, 1.0, 3, 0.0)) == 0


def test_mismatch_engineered_third_order():
    # base symmetric; perturbation x^3 (1-x)^3 (1+x) vanishes to order 3 at
    # both ends and first breaks the parity condition at k = 3
    expr = 1 + X * (1 - X) + sp.Rational(1, 10) * X**3 * (1 - X) ** 3 * (1 + X)
    p = geo.profile_from_expr(expr, 3, 0.0)
    assert geo.taylor_mismatch_order(p) == 3
    # cross-check against symbolic derivatives
    for k in range(3):
        d0 = float(sp.diff(expr, X, k).subs(X, 0))
        d1 = float(sp.diff(expr, X, k).subs(X, 1))
        assert d0 == pytest.approx((-1.0) ** k * d1, abs=1e-12)
    d0 = float(sp.diff(expr, X, 3).subs(X, 0))
    d1 = float(sp.diff(expr, X, 3).subs(X, 1))
    assert abs(d0 - (-1.0) ** 3 * d1) > 1e-6


def test_mismatch_k1(iia_k1_profile):
    assert geo.taylor_mismatch_order(iia_k1_profile) == 1


def test_flat_taylor_match_interior_asymmetry(iic_profile):
    assert geo.taylor_mismatch_order(iic_profile) is None
    assert not iic_profile.is_symmetric


# ----------------------------------------------------------------------
# boundary geometry


def test_boundary_geometry_flat(flat_profile):
    bg = geo.boundary_geometry(flat_profile)
    for x in (0.0, 0.25, 1.0):
        assert bg.d0(x) == pytest.approx(x, abs=1e-12)
    assert bg.kappa0 == 0.0 and bg.kappa1 == 0.0
    assert bg.d1(0.0) == pytest.approx(bg.width, abs=1e-12)


def test_boundary_geometry_scaled():
    bg = geo.boundary_geometry(geo.constant_profile(4.0, 2, 0.0))
    assert bg.d0(0.5) == pytest.approx(1.0, abs=1e-12)
    assert bg.width == pytest.approx(2.0, abs=1e-12)


def test_boundary_geometry_exponential():
    bg = geo.boundary_geometry(geo.exponential_profile(1.0, 1.0, 3, 0.0))
    assert bg.kappa0 == pytest.approx(-0.25, abs=1e-14)
    assert bg.kappa1 == pytest.approx(math.e / (4.0 * math.e**1.5), rel=1e-12)
    assert bg.d0(1.0) == pytest.approx(2.0 * (math.sqrt(math.e) - 1.0), rel=1e-9)
    assert bg.d0(0.0) == 0.0 and bg.d1(1.0) == 0.0
