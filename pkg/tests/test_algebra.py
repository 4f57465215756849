import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from burkqc.algebra import (IDENTITY, PLUS_INFINITY, ExtReal, Mat2, conformal_arrays, diag, distortion,
                            from_array, from_real, invariants, rank_one)

entry = st.floats(-10, 10, allow_nan=False, allow_infinity=False)
matrix = st.tuples(entry, entry, entry, entry).map(lambda t: np.array(t).reshape(2, 2))


@given(matrix)
@settings(max_examples=200, deadline=None)
def test_round_trip_and_invariants(m):
    A = from_array(m)
    assert np.allclose(A.to_real(), m, atol=1e-12)
    s = np.linalg.svd(m, compute_uv=False)
    with np.errstate(divide="ignore", invalid="ignore"):
        d = np.linalg.det(m)
    assert math.isclose(A.det, d, rel_tol=1e-9, abs_tol=1e-9)
    assert math.isclose(A.opnorm, s[0], rel_tol=1e-9, abs_tol=1e-12)
    inv = invariants(A)
    assert math.isclose(inv.sv[1], s[1], rel_tol=1e-9, abs_tol=1e-9)


@given(matrix, matrix)
@settings(max_examples=100, deadline=None)
def test_composition_is_matrix_product(m1, m2):
    A, B = from_array(m1), from_array(m2)
    assert np.allclose((A @ B).to_real(), m1 @ m2, atol=1e-9)
    assert np.allclose((A + B).to_real(), m1 + m2, atol=1e-12)
    assert np.allclose((A - B).to_real(), m1 - m2, atol=1e-12)
    assert np.allclose((2.5 * A).to_real(), 2.5 * m1, atol=1e-12)


def test_action_on_points():
    m = np.array([[1.0, 2.0], [-0.5, 3.0]])
    A = from_array(m)
    z = 0.3 - 1.2j
    v = m @ np.array([z.real, z.imag])
    assert abs(A(z) - complex(*v)) < 1e-14


def test_inverse():
    A = from_real(2, 1, 0.5, 3)
    assert np.allclose((A @ A.inverse()).to_real(), np.eye(2), atol=1e-14)
    with pytest.raises(ZeroDivisionError):
        Mat2(1, 1).inverse()


def test_distortion_and_rank_one():
    assert distortion(IDENTITY) == 1.0
    assert float(distortion(diag(1, 3))) == pytest.approx(3.0)
    assert distortion(diag(1, -1)).is_inf
    X = rank_one([1, 2], [3, -1])
    assert abs(X.det) < 1e-14
    assert np.allclose(X.to_real(), np.outer([1, 2], [3, -1]))


def test_rotation_invariance_of_invariants():
    A = Mat2(1.2 + 0.3j, 0.4 - 0.1j)
    B = A.rotate(0.7, -1.9)
    assert math.isclose(A.det, B.det) and math.isclose(A.opnorm, B.opnorm)


def test_conformal_arrays_match_scalar():
    m = np.random.default_rng(0).standard_normal((20, 2, 2))
    ap, am = conformal_arrays(m)
    for i in range(20):
        A = from_array(m[i])
        assert abs(A.a_plus - ap[i]) < 1e-15 and abs(A.a_minus - am[i]) < 1e-15


def test_extreal_arithmetic():
    x = ExtReal(2.0)
    assert (x + 1).value == 3.0
    assert (x + PLUS_INFINITY).is_inf
    assert (PLUS_INFINITY * 3).is_inf
    assert PLUS_INFINITY > 1e308
    assert x < PLUS_INFINITY
    assert ExtReal.of(math.inf) is PLUS_INFINITY
    assert str(PLUS_INFINITY) == "inf"
    with pytest.raises(ValueError):
        ExtReal(float("nan"))
    with pytest.raises(ValueError):
        ExtReal(-math.inf)
    with pytest.raises(ValueError):
        x - PLUS_INFINITY
    with pytest.raises(ValueError):
        PLUS_INFINITY * -1
