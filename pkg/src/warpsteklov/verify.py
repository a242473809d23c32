"""Self-contained verification battery behind the `verify` CLI command.

Each check compares an independently computable quantity (closed form,
quadrature identity, inequality) against the main pipeline.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import asymptotics as asy
from . import geometry as geom
from . import steklov as stk
from . import sturm


@dataclass
class CheckResult:
    name: str
    ok: bool
    detail: str


def _cosine_potential():
    return sturm.Potential(lambda x: 10.0 * math.cos(2.0 * math.pi * x), name="10cos")


def check_wronskian() -> CheckResult:
    q = _cosine_potential()
    worst = 0.0
    for kappa in (1.0, 20.0, 100.0):
        for side in (True, False):
            fd = sturm.propagate(q, -kappa * kappa, from_left=side)
            worst = max(worst, fd.wronskian_defect)
    return CheckResult("wronskian-conservation", worst <= 1e-10, f"max defect {worst:.2e}")


def check_constant_closed_forms() -> CheckResult:
    worst = 0.0
    for c in (-3.0, 0.0, 5.0):
        q = sturm.Potential(lambda x, _c=c: _c, name=f"const{c}")
        for s in (0.5, 5.0, 50.0):
            z = -(s * s - c)
            wd = sturm.weyl_data(q, z)
            delta_exact = math.sinh(s) / s
            m_exact = -s / math.tanh(s)
            worst = max(worst,
                        abs(wd.delta.to_float() - delta_exact) / abs(delta_exact),
                        abs(wd.m_fun - m_exact) / abs(m_exact),
                        abs(wd.n_fun - m_exact) / abs(m_exact))
    return CheckResult("constant-potential-closed-forms", worst <= 1e-8, f"max rel {worst:.2e}")


def check_symmetry_law() -> CheckResult:
    q = sturm.Potential(lambda x: x * x, name="x^2")
    qr = q.reflected()
    worst = 0.0
    for kappa in (5.0, 15.0):
        z = -kappa * kappa
        a, b = sturm.weyl_data(q, z), sturm.weyl_data(qr, z)
        worst = max(worst,
                    abs(b.m_fun - a.n_fun) / abs(a.n_fun),
                    abs((b.delta / a.delta).to_float() - 1.0))
    return CheckResult("reflection-symmetry-law", worst <= 1e-9, f"max rel {worst:.2e}")


def check_bridge_identity() -> CheckResult:
    q = sturm.Potential(lambda x: x, name="x")
    worst = 0.0
    for kappa in (5.0, 15.0):
        z = -kappa * kappa
        wd = sturm.weyl_data(q, z)
        direct = wd.m_fun - wd.n_fun
        integral = asy.bridge_integral(q, z)
        worst = max(worst, abs(direct - integral) / max(abs(direct), 1e-12))
    return CheckResult("weyl-difference-identity", worst <= 1e-6, f"max rel {worst:.2e}")


def check_gap_inequalities() -> CheckResult:
    profiles = [
        geom.polynomial_profile([1.0, 1.0, -1.0], 3, 0.0),
        geom.affine_profile(1.0, 3.0, 3, 0.0),
    ]
    ok = True
    margin = math.inf
    for p in profiles:
        for kappa in (2.0, 5.0, 10.0, 20.0):
            mu = kappa * kappa
            pair = stk.steklov_pair(stk.dn_block(p, mu))
            bound = stk.splitting_lower_bound(p, mu)
            ok &= pair.gap >= bound
            if bound > 0:
                margin = min(margin, pair.gap / bound)
    return CheckResult("splitting-lower-bound", ok, f"min gap/bound {margin:.3f}")


def check_pair_identities() -> CheckResult:
    p = geom.affine_profile(1.0, 3.0, 3, 0.0)
    worst = 0.0
    for mu in (0.0, 4.0, 100.0, 400.0):
        block = stk.dn_block(p, mu)
        pair = stk.steklov_pair(block)
        tr = block.a_entry + block.c_entry
        det = block.a_entry * block.c_entry - block.b_entry**2
        det_scale = abs(block.a_entry * block.c_entry) + block.b_entry**2
        worst = max(worst,
                    abs(pair.lambda_plus + pair.lambda_minus - tr) / max(abs(tr), 1e-12),
                    abs(pair.lambda_plus * pair.lambda_minus - det) / max(det_scale, 1e-12))
    return CheckResult("trace-determinant-identity", worst <= 1e-9, f"max rel {worst:.2e}")


def check_boundary_normalization() -> CheckResult:
    worst = 0.0
    for p in (geom.constant_profile(1.0, 2, 0.0), geom.affine_profile(1.0, 3.0, 3, 0.0)):
        f0q, f1q = p.f(0.0) ** 0.25, p.f(1.0) ** 0.25
        for mu in (4.0, 100.0):
            for branch in ("plus", "minus"):
                tr = stk.eigenfunction_trace(p, mu, branch)
                w = tr.native()
                total = (f0q * w[0]) ** 2 + (f1q * w[-1]) ** 2
                worst = max(worst, abs(total - 1.0))
    return CheckResult("boundary-trace-normalization", worst <= 1e-9, f"max dev {worst:.2e}")


def check_explicit_two_dimensional() -> CheckResult:
    p = geom.affine_profile(1.0, 3.0, 2, 0.0)
    model = asy.case_constants(p)
    worst = 0.0
    for kappa in (1.0, 5.0, 20.0):
        mu = kappa * kappa
        pair = stk.steklov_pair(stk.dn_block(p, mu))
        pred = asy.predict(model, mu)
        worst = max(worst,
                    abs(pair.lambda_plus - pred.lambda_plus) / pred.lambda_plus,
                    abs(pair.lambda_minus - pred.lambda_minus) / pred.lambda_minus)
    return CheckResult("explicit-eigenvalue-formulas", worst <= 1e-8, f"max rel {worst:.2e}")


def check_bound_shapes() -> CheckResult:
    p = geom.affine_profile(1.0, 3.0, 2, 0.0)
    model = asy.case_constants(p)
    worst = -math.inf
    for branch in ("plus", "minus"):
        tr = stk.eigenfunction_trace(p, 400.0, branch)
        tpl = loc_template(model, branch, 400.0)
        worst = max(worst, loc_check(tr, tpl))
    return CheckResult("pointwise-envelope-shapes", worst <= 0.1, f"max residual {worst:.3f}")


def loc_template(model, branch, mu):
    from .localization import bound_template

    return bound_template(model, branch, mu)


def loc_check(tr, tpl):
    from .localization import bound_check

    return bound_check(tr, tpl)


def run_verification() -> list:
    checks = [
        check_wronskian,
        check_constant_closed_forms,
        check_symmetry_law,
        check_bridge_identity,
        check_gap_inequalities,
        check_pair_identities,
        check_boundary_normalization,
        check_explicit_two_dimensional,
        check_bound_shapes,
    ]
    return [c() for c in checks]
