import math

import numpy as np
import pytest

import oracles
from burkqc.beltrami import solve_principal, random_smooth_mu
from burkqc.convexity import (alpha_profile, broken_power_profile, exp_profile, power_profile,
                              tilted_power_profile)
from burkqc.functionals import p_of_K
from burkqc.inequalities import (AREA_COLUMNS, FAIL, NOT_APPLICABLE, PASS, InequalityReport,
                                 burkholder_area_check, calibrated_tolerance, equality_detected,
                                 exterior_deviation, f_area_check, llogl_check, null_quadrature_boundary,
                                 null_quadrature_integral, null_quadrature_report, null_quadrature_residual,
                                 w_area_check, weighted_burkholder_check)

U = {3: 1.0, 4: 0.5j, 6: -0.2}


def test_report_status_and_row():
    r = InequalityReport("x", 1.0, 1.5, 0.1)
    assert r.status == FAIL and r.gap == -0.5
    assert InequalityReport("x", 1.0, 1.05, 0.1).passed
    assert len(r.row()) == len(AREA_COLUMNS)


def test_p2_is_an_identity(sol_smooth):
    # B_2 = -det is a null Lagrangian: both sides equal pi-normalized sum j|b_j|^2
    rep = burkholder_area_check(sol_smooth, 2.0)
    assert abs(rep.gap) <= 1e-3
    assert rep.passed


@pytest.mark.parametrize("which", ["mid", "pK"])
def test_burkholder_area_smooth(sol_smooth, which):
    pK = p_of_K(sol_smooth.problem.K)
    p = pK if which == "pK" else 0.5 * (2 + pK)
    rep = burkholder_area_check(sol_smooth, p)
    assert rep.passed and rep.gap >= -rep.tol
    with pytest.raises(ValueError):
        burkholder_area_check(sol_smooth, pK * 1.1)


def test_equality_case_constant_mu(sol_const03):
    for p in (2.0, 3.0, p_of_K(sol_const03.problem.K)):
        rep = burkholder_area_check(sol_const03, p)
        assert abs(rep.gap) <= 1e-2
        assert equality_detected(sol_const03, rep, 1e-2)
    assert exterior_deviation(sol_const03) <= 1e-3


def test_w_area_solved(sol_smooth, sol_const03):
    rep = w_area_check(sol_smooth)
    assert rep.passed
    eq = w_area_check(sol_const03)
    assert abs(eq.gap) <= 5e-3


def test_w_area_radial_exp_profile():
    rep = w_area_check(exp_profile())
    assert rep.lhs == pytest.approx(3.0, abs=1e-8)
    assert rep.rhs == pytest.approx(1.0, abs=1e-14)
    assert rep.passed


def test_f_area(sol_smooth, sol_const03):
    assert f_area_check(sol_smooth).passed
    assert abs(f_area_check(sol_const03).gap) <= 1e-2


def test_calibrated_tolerance_floor(sol_smooth):
    assert calibrated_tolerance("w_area", sol_smooth) >= 1e-4


def test_weighted_closed_form_p2(sol_const03):
    rep = weighted_burkholder_check(sol_const03, 2.0)
    assert rep.rhs == pytest.approx(oracles.weighted_constant(0.3, 2.0), abs=1e-2)
    assert oracles.weighted_constant(0.3, 2.0) == pytest.approx(1 - 0.09)
    assert rep.passed


def test_weighted_at_max_exponent(sol_smooth):
    k = sol_smooth.problem.k
    rep = weighted_burkholder_check(sol_smooth, 1 + 1 / k)
    assert rep.passed
    with pytest.raises(ValueError):
        weighted_burkholder_check(sol_smooth, 1 + 1.5 / k)


@pytest.mark.parametrize("prof", [power_profile(0.5), power_profile(1.0, 2.0), alpha_profile(0.5),
                                  tilted_power_profile(0.6, 0.3), broken_power_profile(0.3, 0.9, 0.4),
                                  exp_profile()], ids=lambda p: p.label)
def test_llogl(prof):
    rep = llogl_check(prof)
    assert rep.status in (PASS, NOT_APPLICABLE)
    if rep.status == PASS:
        assert rep.gap >= -1e-8


def test_llogl_exp_profile_values():
    rep = llogl_check(exp_profile())
    assert rep.rhs == 0.0
    assert rep.passed and rep.lhs > 0


def test_llogl_rejects_decreasing():
    with pytest.raises(ValueError):
        llogl_check(power_profile(-0.5))


@pytest.mark.parametrize("b1", [0.0, 0.3, 0.5 + 0.2j])
def test_null_quadrature(b1):
    assert null_quadrature_residual(b1, U) <= 1e-6
    rep = null_quadrature_report(b1, U)
    assert rep.passed


def test_null_quadrature_boundary_oracle():
    # the boundary form recovers the integral over the complement exactly
    for b1 in (0.2, 0.4j):
        assert abs(null_quadrature_boundary(b1, U)) <= 1e-10
    assert abs(null_quadrature_integral(0.3, {2: 1.0})) > 1e-3
    assert null_quadrature_report(0.3, {2: 1.0}).status == NOT_APPLICABLE
    with pytest.raises(ValueError):
        null_quadrature_integral(1.0, U)


@pytest.mark.parametrize("seed", range(3))
def test_random_smooth_inequalities(seed):
    sol = solve_principal(random_smooth_mu(np.random.default_rng(100 + seed), 0.3, 128))
    pK = p_of_K(sol.problem.K)
    for p in (2.0, 2.5, pK):
        assert burkholder_area_check(sol, p).passed
    assert w_area_check(sol).passed
    assert f_area_check(sol).passed
