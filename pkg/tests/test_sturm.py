import math

import numpy as np
import pytest

from warpsteklov import sturm
from warpsteklov.errors import (
    GridError,
    InvalidPotentialError,
    NearDirichletError,
)
from warpsteklov.sturm import Potential

PI2 = math.pi**2


# ----------------------------------------------------------------------
# propagate


def test_propagate_free_closed_form(zero_potential):
    fd = sturm.propagate(zero_potential, -1.0)
    assert fd.s0_1.to_float() == pytest.approx(math.sinh(1.0), rel=1e-10)
    assert fd.c0_1.to_float() == pytest.approx(math.cosh(1.0), rel=1e-10)


def test_propagate_zero_energy(zero_potential):
    fd = sturm.propagate(zero_potential, 0.0)
    assert fd.s0_1.to_float() == pytest.approx(1.0, rel=1e-10)  # solution x
    assert fd.c0_1.to_float() == pytest.approx(1.0, rel=1e-10)  # solution 1


def test_propagate_constant_shift(const5_potential):
    # q = 5, z = -4: effective sqrt(mu+c) = 3
    fd = sturm.propagate(const5_potential, -4.0)
    assert fd.s0_1.to_float() == pytest.approx(math.sinh(3.0) / 3.0, rel=1e-10)


def test_propagate_from_right(zero_potential):
    fd = sturm.propagate(zero_potential, -4.0, from_left=False)
    # s1(0) = -sinh(2)/2, c1(0) = cosh(2)
    assert fd.s1_0.to_float() == pytest.approx(-math.sinh(2.0) / 2.0, rel=1e-10)
    assert fd.c1_0.to_float() == pytest.approx(math.cosh(2.0), rel=1e-10)


def test_propagate_huge_kappa_no_overflow(zero_potential):
    fd = sturm.propagate(zero_potential, -500.0**2)
    expected_ln = 500.0 - math.log(1000.0)  # ln(sinh(500)/500)
    assert fd.s0_1.ln_mag == pytest.approx(expected_ln, abs=1e-8)
    assert fd.wronskian_defect <= 1e-10


@pytest.mark.parametrize("kappa", [1.0, 20.0, 100.0, 200.0, 500.0])
def test_wronskian_conservation(kappa):
    q = Potential(lambda x: 3.0 * math.cos(2 * math.pi * x), name="cos")
    for side in (True, False):
        fd = sturm.propagate(q, -kappa * kappa, from_left=side)
        assert fd.wronskian_defect <= 1e-10


def test_propagate_grid_size_guard(zero_potential):
    with pytest.raises(GridError):
        sturm.propagate(zero_potential, -1.0, grid_size=8)


def test_invalid_potential_rejected():
    with pytest.raises(InvalidPotentialError):
        Potential(lambda x: 1.0 / (x - 0.5), name="pole")
    with pytest.raises(InvalidPotentialError):
        Potential(lambda x: math.inf if x > 0.9 else 0.0, name="inf-tail")


# ----------------------------------------------------------------------
# weyl_data


def test_weyl_free(zero_potential):
    wd = sturm.weyl_data(zero_potential, -1.0)
    assert wd.m_fun == pytest.approx(-1.0 / math.tanh(1.0), rel=1e-10)
    assert wd.n_fun == pytest.approx(-1.0 / math.tanh(1.0), rel=1e-10)
    assert wd.delta.to_float() == pytest.approx(math.sinh(1.0), rel=1e-10)


def test_weyl_zero_energy_limit(zero_potential):
    assert sturm.weyl_data(zero_potential, 0.0).m_fun == pytest.approx(-1.0, rel=1e-10)


def test_weyl_constant_shift(const5_potential):
    wd = sturm.weyl_data(const5_potential, -4.0)
    assert wd.m_fun == pytest.approx(-3.0 / math.tanh(3.0), rel=1e-10)


@pytest.mark.parametrize("c", [-3.0, 0.0, 5.0])
def test_weyl_constant_family_closed_forms(c):
    q = Potential(lambda x: c, name=f"const{c}")
    for s in (0.5, 2.0, 20.0, 200.0):
        wd = sturm.weyl_data(q, -(s * s - c))
        assert wd.delta.to_float() == pytest.approx(math.sinh(s) / s, rel=1e-8)
        assert wd.m_fun == pytest.approx(-s / math.tanh(s), rel=1e-8)
        assert wd.e_fun.to_float() == pytest.approx(math.cosh(s), rel=1e-8)


def test_weyl_near_dirichlet_raises():
    # q = -pi^2 puts the first Dirichlet eigenvalue exactly at z = 0
    q = Potential(lambda x: -PI2, name="-pi^2")
    with pytest.raises(NearDirichletError):
        sturm.weyl_data(q, 0.0)


def test_symmetry_law(asymmetric_potentials):
    for q in asymmetric_potentials:
        qr = q.reflected()
        for kappa in (3.0, 10.0, 30.0):
            z = -kappa * kappa
            a = sturm.weyl_data(q, z)
            b = sturm.weyl_data(qr, z)
            assert b.m_fun == pytest.approx(a.n_fun, rel=1e-9)
            assert b.n_fun == pytest.approx(a.m_fun, rel=1e-9)
            assert (b.delta / a.delta).to_float() == pytest.approx(1.0, abs=1e-9)


def test_characteristic_function_asymptotic_scale():
    q = Potential(lambda x: 2.0 * math.sin(math.pi * x), name="2sin")
    for kappa in (20.0, 50.0, 100.0):
        wd = sturm.weyl_data(q, -kappa * kappa)
        ratio = (wd.delta / sturm.ExtScalar.from_float(math.sinh(kappa) / kappa)).to_float()
        assert abs(ratio - 1.0) <= 5.0 * q.sup_norm / kappa


# ----------------------------------------------------------------------
# weyl_traces


def test_traces_free_closed_form(zero_potential):
    grid = np.linspace(0.0, 1.0, 1025)
    psi, phi = sturm.weyl_traces(zero_potential, -4.0, grid)
    assert psi.values[0].to_float() == 1.0
    assert psi.values[-1].to_float() == 0.0
    assert phi.values[0].to_float() == 0.0
    assert phi.values[-1].to_float() == 1.0
    assert psi.values[512].to_float() == pytest.approx(
        math.sinh(1.0) / math.sinh(2.0), rel=1e-9)
    assert phi.values[256].to_float() == pytest.approx(
        math.sinh(0.5) / math.sinh(2.0), rel=1e-9)


def test_traces_decay_far_below_native_noise(zero_potential):
    grid = np.linspace(0.0, 1.0, 1025)
    psi, _ = sturm.weyl_traces(zero_potential, -80.0**2, grid)
    # at x=0.75, Psi ~ e^{-60}: still relative-accurate
    assert psi.values[768].to_float() == pytest.approx(
        math.sinh(80.0 * 0.25) / math.sinh(80.0), rel=1e-8)


def test_trace_grid_validation(zero_potential):
    with pytest.raises(GridError):
        sturm.weyl_traces(zero_potential, -1.0, np.linspace(0.1, 1.0, 65))


# ----------------------------------------------------------------------
# dirichlet_values


def test_dirichlet_free(zero_potential):
    roots = sturm.dirichlet_values(zero_potential, 3)
    assert roots == pytest.approx([PI2, 4 * PI2, 9 * PI2], abs=1e-9)


def test_dirichlet_constant_shift(const5_potential):
    roots = sturm.dirichlet_values(const5_potential, 1)
    assert roots[0] == pytest.approx(PI2 + 5.0, abs=1e-9)


def test_dirichlet_against_finite_difference_oracle():
    fn = lambda x: 10.0 * math.cos(2.0 * math.pi * x)
    q = Potential(fn, name="10cos")
    roots = sturm.dirichlet_values(q, 2)

    n = 4000
    xs = np.linspace(0.0, 1.0, n + 1)
    h = xs[1] - xs[0]
    interior = xs[1:-1]
    diag = 2.0 / h**2 + np.array([fn(t) for t in interior])
    off = -np.ones(n - 2) / h**2
    from scipy.linalg import eigh_tridiagonal

    evs = eigh_tridiagonal(diag, off, select="i", select_range=(0, 1))[0]
    assert roots == pytest.approx(list(evs), abs=1e-3)
    # second-order FD has O(h^2 k^4) bias; Richardson with half resolution
    n2 = 2000
    xs2 = np.linspace(0.0, 1.0, n2 + 1)
    h2 = xs2[1] - xs2[0]
    diag2 = 2.0 / h2**2 + np.array([fn(t) for t in xs2[1:-1]])
    off2 = -np.ones(n2 - 2) / h2**2
    evs2 = eigh_tridiagonal(diag2, off2, select="i", select_range=(0, 1))[0]
    extrap = (4.0 * evs - evs2) / 3.0
    assert roots == pytest.approx(list(extrap), abs=1e-6)


def test_dirichlet_count_guard(zero_potential):
    with pytest.raises(ValueError):
        sturm.dirichlet_values(zero_potential, 65)


# ----------------------------------------------------------------------
# hadamard_check


def test_hadamard_free(zero_potential):
    # tail truncation leaves exp(1/(K pi^2)) - 1 ~ 1.01e-4 at K=1000
    r1000 = sturm.hadamard_check(zero_potential, -1.0, 1000)
    assert abs(r1000 - 1.0) <= 1.2e-4
    r300 = sturm.hadamard_check(zero_potential, -1.0, 300)
    assert abs(r1000 - 1.0) < abs(r300 - 1.0)


def test_hadamard_zero_point(zero_potential):
    assert sturm.hadamard_check(zero_potential, 0.0, 50) == 1.0


def test_hadamard_constant():
    q = Potential(lambda x: 3.0, name="three")
    r = sturm.hadamard_check(q, -2.0, 2000)
    assert abs(r - 1.0) <= 5e-4


# ----------------------------------------------------------------------
# bvp_oracle


def test_bvp_matches_psi(zero_potential):
    grid = np.linspace(0.0, 1.0, 4001)
    tr = sturm.bvp_oracle(zero_potential, -4.0, 1.0, 0.0, grid)
    psi, _ = sturm.weyl_traces(zero_potential, -4.0, grid)
    v, pv = tr.native(), psi.native()
    rel = np.max(np.abs(v[1:-1] - pv[1:-1]) / np.abs(pv[1:-1]))
    assert rel <= 1e-5


def test_bvp_zero_data_gives_zero(zero_potential):
    grid = np.linspace(0.0, 1.0, 513)
    tr = sturm.bvp_oracle(zero_potential, -9.0, 0.0, 0.0, grid)
    assert np.max(np.abs(tr.native())) == 0.0


def test_bvp_constant_harmonic(zero_potential):
    grid = np.linspace(0.0, 1.0, 513)
    tr = sturm.bvp_oracle(zero_potential, 0.0, 1.0, 1.0, grid)
    assert tr.native() == pytest.approx(np.ones(513), abs=1e-12)


def test_bvp_oracle_vs_weyl_combination(const5_potential):
    # any combination alpha*Psi + beta*Phi solves the same equation
    grid = np.linspace(0.0, 1.0, 4001)
    alpha, beta = 0.7, -0.4
    psi, phi = sturm.weyl_traces(const5_potential, -30.0, grid)
    combo = alpha * psi.native() + beta * phi.native()
    tr = sturm.bvp_oracle(const5_potential, -30.0, alpha, beta, grid)
    scale = np.max(np.abs(combo))
    assert np.max(np.abs(tr.native() - combo)) <= 1e-5 * scale


def test_bvp_requires_uniform_grid(zero_potential):
    grid = np.array([0.0, 0.1, 0.5, 1.0])
    with pytest.raises(GridError):
        sturm.bvp_oracle(zero_potential, -1.0, 1.0, 0.0, grid)
