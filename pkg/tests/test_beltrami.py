import math

import numpy as np
import pytest

import oracles
from conftest import A_PHASE
from burkqc.beltrami import (BeltramiProblem, GridField, NonConvergedError, area_residual,
                             beurling_transform, cauchy_transform, constant_mu, derivative_norm,
                             disk_fraction, disk_mean, function_mu, grid_points, grid_problem,
                             iteration_bound, jacobian, laurent_coeffs, moment_coeffs, radial_alpha_mu,
                             read_grid, solution_summary, solve_principal, write_grid)
from burkqc.functionals import W_SPEC, FunctionalSpec


@pytest.mark.parametrize("N", [64, 256, 512])
def test_mask_area_exact(N):
    f = disk_fraction(N, 2.0)
    assert abs(np.sum(f) * (4.0 / N) ** 2 - math.pi) <= 1e-12
    Z = grid_points(N, 2.0)
    assert np.all(f[np.abs(Z) > 1 + 4.0 / N] == 0)
    assert np.all(f[np.abs(Z) < 1 - 4.0 / N] == 1)
    assert not f.flags.writeable


def test_mask_inner_radius():
    N, L = 256, 2.0
    ring = disk_fraction(N, L) - disk_fraction(N, L, 0.5)
    assert np.sum(ring) * (2 * L / N) ** 2 == pytest.approx(0.75 * math.pi, abs=1e-12)


def _disk_field(N):
    return GridField(disk_fraction(N, 2.0), 2.0)


def test_cauchy_transform_of_disk():
    chi = _disk_field(256)
    Z = chi.points()
    r = np.abs(Z)
    away = (np.abs(r - 1) > 0.1) & (r < 1.9)
    err = np.abs(cauchy_transform(chi).samples - oracles.cauchy_disk(Z))[away]
    assert np.max(err) <= 1e-4


def test_beurling_transform_of_disk_converges():
    errs = []
    for N in (128, 256):
        chi = _disk_field(N)
        Z = chi.points()
        r = np.abs(Z)
        away = (np.abs(r - 1) > 0.1) & (r < 1.9)
        errs.append(np.max(np.abs(beurling_transform(chi).samples - oracles.beurling_disk(Z))[away]))
    assert errs[1] <= 2e-3
    assert errs[1] < errs[0] / 2


def test_multiplier_variant_inside():
    chi = _disk_field(256)
    Z = chi.points()
    inner = np.abs(Z) < 0.9
    S = beurling_transform(chi, "multiplier").samples
    assert np.max(np.abs(S[inner])) <= 5e-2
    with pytest.raises(ValueError):
        beurling_transform(chi, "spline")


def test_beurling_is_linear_and_isometric_on_grid():
    rng = np.random.default_rng(3)
    N = 64
    a = rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))
    S = beurling_transform(GridField(a, 2.0), "multiplier", pad=False).samples
    # the periodic multiplier is unimodular off the zero mode
    assert np.linalg.norm(S) == pytest.approx(np.linalg.norm(a - a.mean()), rel=1e-10)


def test_cauchy_rejects_unsupported_field():
    with pytest.raises(ValueError):
        cauchy_transform(GridField(np.ones((64, 64)), 2.0))


def test_constant_mu_oracle(sol_const03):
    sol = sol_const03
    a = 0.3
    Z = sol.f.points()
    inner = np.abs(Z) <= 0.8
    assert np.max(np.abs(sol.f_z.samples[inner] - 1)) <= 2e-3
    assert np.max(np.abs(sol.f_zbar.samples[inner] - a)) <= 2e-3
    assert abs(sol.b1 - a) <= 1e-3
    assert np.max(np.abs(sol.laurent.b[1:8])) <= 1e-3
    assert sol.converged and sol.status == "CONVERGED"
    assert sol.iterations <= iteration_bound(a, sol.tol)


def test_constant_mu_complex_phase(sol_const05):
    sol = sol_const05
    assert abs(sol.b1 - A_PHASE) <= 2e-3
    assert sol.iterations <= iteration_bound(0.5, sol.tol)


def test_laurent_matches_moments(sol_smooth):
    b = sol_smooth.laurent.b[:8]
    m = moment_coeffs(sol_smooth, 8)
    assert np.max(np.abs(b - m)) <= 1e-4


def test_laurent_conformality(sol_smooth):
    lc = laurent_coeffs(sol_smooth)
    assert lc.conformality <= 1e-2
    with pytest.raises(ValueError):
        laurent_coeffs(sol_smooth, R=3.0)
    with pytest.raises(ValueError):
        laurent_coeffs(sol_smooth, M=16, J=32)


def test_denoised_area_sum(sol_const03):
    lc = sol_const03.laurent
    assert lc.area_sum(1) == pytest.approx(abs(lc.b[0]) ** 2, abs=1e-5)
    assert np.count_nonzero(lc.denoised()) <= len(lc.b)
    assert lc.tail_estimate() >= 0


def test_area_residual_small(sol_const03, sol_smooth):
    assert abs(area_residual(sol_const03)) <= 1e-2
    assert abs(area_residual(sol_smooth)) <= 1e-2


def test_jacobian_positive(sol_smooth):
    J = jacobian(sol_smooth)
    m = sol_smooth.mask > 0
    assert np.all(J[m] > 0)


def test_disk_mean_of_constant_map(sol_const03):
    # Df = Id + 0.3 conj in the disk: W there is K - log K + log det
    k = 0.3
    K = (1 + k) / (1 - k)
    ref = K - math.log(K) + math.log(1 - k * k)
    assert disk_mean(W_SPEC, sol_const03).value == pytest.approx(ref, abs=5e-3)
    assert disk_mean(FunctionalSpec.const(2.0), sol_const03).value == pytest.approx(2.0)


def test_zero_mu_is_identity():
    sol = solve_principal(BeltramiProblem(GridField(np.zeros((64, 64)), 2.0)))
    assert sol.converged and sol.iterations == 1
    assert np.allclose(sol.f_z.samples, 1) and np.allclose(sol.f_zbar.samples, 0)
    assert derivative_norm(sol, 2.0) == 0.0


def test_radial_alpha_mu_sup():
    prob = radial_alpha_mu(0.5, 128)
    assert prob.k == pytest.approx(1 / 3, abs=1e-12)
    assert prob.K == pytest.approx(2.0, abs=1e-10)


def test_problem_validation():
    with pytest.raises(ValueError):
        constant_mu(1.0, 64)
    with pytest.raises(ValueError):
        constant_mu(0.3, 100)
    with pytest.raises(ValueError):
        constant_mu(0.3, 64, L=0.9)
    with pytest.raises(ValueError):
        function_mu(lambda Z: 0.3 + 0 * Z, 64, smoothing="box")


def test_nonconvergence_raises():
    with pytest.raises(NonConvergedError):
        solve_principal(constant_mu(0.9, 64), max_iter=3, raise_on_fail=True)
    sol = solve_principal(constant_mu(0.9, 64), max_iter=3)
    assert sol.status == "NONCONVERGED"


def test_iteration_bound():
    assert iteration_bound(0.3, 1e-10) == math.ceil(math.log(1e-10) / math.log(0.3)) + 5
    assert iteration_bound(0.0, 1e-10) == 6


def test_grid_round_trip(tmp_path):
    prob = constant_mu(0.2 + 0.1j, 32)
    path = tmp_path / "mu.grid"
    write_grid(str(path), prob.mu)
    samples, L = read_grid(str(path))
    assert L == 2.0
    assert np.array_equal(samples, prob.mu.samples)
    again = grid_problem(samples, L)
    assert again.k == pytest.approx(prob.k)


def test_grid_file_errors(tmp_path):
    bad = tmp_path / "bad.grid"
    bad.write_text("4\n0 0\n")
    with pytest.raises(ValueError):
        read_grid(str(bad))
    bad.write_text("2 2.0\n0 0\n1 1\n")
    with pytest.raises(ValueError):
        read_grid(str(bad))
    with pytest.raises(ValueError):
        grid_problem(np.full((16, 16), 0.1), 2.0)


def test_solution_summary(sol_const03):
    s = solution_summary(sol_const03)
    assert s["N"] == 256 and s["status"] == "CONVERGED"
    assert len(s["b"]) == 32
