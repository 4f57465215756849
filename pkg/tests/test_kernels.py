import os
import subprocess
import sys

import numpy as np
import pytest

from burkqc import kernels
from burkqc.algebra import IDENTITY, Mat2, diag
from burkqc.functionals import evaluate, parse_functional
from burkqc.minimizer import EnergyConfig, affine_map, assemble_energy, polar_disk_mesh, smooth_perturbation

FUNCTIONALS = ["local:K=2,p=3", "burkholder:p=2.5", "W", "Wtilde", "F", "ec:c=0.1", "W+normpow:q=2",
               "dirichlet", "det", "0.5*W+F+const:c=1"]
MESH = polar_disk_mesh(8, 16)


def perturbed(A=IDENTITY, seed=0, amp=0.05, mesh=MESH):
    return affine_map(mesh, A, smooth_perturbation(mesh, np.random.default_rng(seed), amp)).values


def test_backend_selection():
    assert kernels.BACKEND in ("cython", "python")
    assert callable(kernels.get_backend("python"))
    with pytest.raises(ValueError):
        kernels.get_backend("fortran")


@pytest.mark.skipif(not kernels.compiled_available(), reason="compiled kernel not built")
@pytest.mark.parametrize("text", FUNCTIONALS)
def test_backends_agree(text):
    w = perturbed(Mat2(1.0, 0.2), seed=1)
    out = []
    for b in ("python", "cython"):
        en = assemble_energy(MESH, EnergyConfig(text, backend=b), Mat2(1.0, 0.2))
        en.penalty_weight = 1e3
        out.append(en(w))
    (e0, g0), (e1, g1) = out
    assert e1 == pytest.approx(e0, rel=1e-12, abs=1e-12)
    assert np.allclose(g0, g1, rtol=1e-10, atol=1e-12)


@pytest.mark.parametrize("text", FUNCTIONALS + ["split:G=log,H=t-log"])
def test_gradient_finite_differences(text):
    w = perturbed(seed=2)
    en = assemble_energy(MESH, EnergyConfig(text, eps=1e-4), IDENTITY)
    en.penalty_weight = 10.0
    E, g = en(w)
    rng = np.random.default_rng(0)
    d = np.zeros_like(w)
    d[MESH.interior] = rng.standard_normal(len(MESH.interior)) + 1j * rng.standard_normal(len(MESH.interior))
    h = 1e-6
    fd = (en(w + h * d, False)[0] - en(w - h * d, False)[0]) / (2 * h)
    an = float(np.sum(g.real * d.real + g.imag * d.imag))
    assert fd == pytest.approx(an, rel=1e-5, abs=1e-7)


@pytest.mark.parametrize("text", ["burkholder:p=3", "W", "F", "ec:c=0.1"])
def test_affine_energy(text):
    A = Mat2(1.1 + 0.2j, 0.15 - 0.05j)
    en = assemble_energy(MESH, EnergyConfig(text), A)
    w = affine_map(MESH, A).values
    assert en.value(w) == pytest.approx(MESH.area * evaluate(parse_functional(text), A).value, rel=1e-12)


def test_null_lagrangian_exact():
    # the integral of det depends only on the boundary trace
    rng = np.random.default_rng(5)
    en = assemble_energy(MESH, EnergyConfig("-det"), IDENTITY)
    ref = en.value(affine_map(MESH, IDENTITY).values)
    for k in range(100):
        w = perturbed(seed=k, amp=rng.uniform(0.01, 0.3))
        w[MESH.interior] += 0.05 * (rng.standard_normal(len(MESH.interior))
                                    + 1j * rng.standard_normal(len(MESH.interior)))
        assert abs(en.value(w) - ref) <= 1e-12


def test_inverted_triangle_is_infinite():
    en = assemble_energy(MESH, EnergyConfig("W"), IDENTITY)
    w = affine_map(MESH, IDENTITY).values
    w[0] = 0.9  # centre vertex pushed past the first ring
    assert np.isinf(en.value(w))


def test_cone_penalty():
    en = assemble_energy(MESH, EnergyConfig("local:K=2,p=3"), IDENTITY)
    inside = affine_map(MESH, IDENTITY).values
    assert en.cone_violation(inside) == 0.0
    en2 = assemble_energy(MESH, EnergyConfig("burkholder:p=3", K=2.0), diag(1, 3))
    w = affine_map(MESH, diag(1, 3)).values
    # |A|^2 - 2 det = 9 - 6 = 3 on every triangle
    assert en2.cone_violation(w) == pytest.approx(9 * MESH.area, rel=1e-12)
    a = en2.value(w, penalty_weight=0.0)
    b = en2.value(w, penalty_weight=1.0)
    assert b - a == pytest.approx(9 * MESH.area, rel=1e-10)


def test_pure_python_fallback_at_import():
    env = dict(os.environ, BURKQC_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "from burkqc import kernels; print(kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
