"""Independent closed forms and frozen reference values.

Densities here are written from singular values of the real 2x2 matrix
(numpy SVD), not from the conformal-coordinate code paths they check.
"""
import math

import numpy as np

# weighted W-value of the three-matrix minors certificate, by hand:
# (100/121) W(0.3 Id) + (21/121) W(diag(2/3, 8)), W(diag(2/3, 8)) = 12 + log(4/9)
MINORS_LHS = 100 / 121 * (1 + 2 * math.log(0.3)) + 21 / 121 * (12 + math.log(4 / 9))
MINORS_LHS_FROZEN = 0.7783132611096686
W_DIAG_2_3_8 = 12 + math.log(4 / 9)


def sv(m):
    m = np.asarray(m, dtype=float)
    s = np.linalg.svd(m, compute_uv=False)
    return s[0], s[1], float(np.linalg.det(m))


def burkholder(m, p):
    s1, _, d = sv(m)
    return ((p / 2 - 1) * s1 * s1 - (p / 2) * d) * s1 ** (p - 2)


def w(m):
    s1, _, d = sv(m)
    if d <= 0:
        return math.inf
    K = s1 * s1 / d
    return K - math.log(K) + math.log(d)


def w_tilde(m):
    s1, _, d = sv(m)
    if d <= 0:
        return math.inf
    K = s1 * s1 / d
    return K - math.log(K) + abs(math.log(d))


def f(m):
    s1, _, d = sv(m)
    if s1 == 0:
        return 0.0
    return s1 * s1 - d * (1 + math.log(s1 * s1))


def ec(m, c):
    s1, _, d = sv(m)
    if d <= 0:
        return math.inf
    return w(m) + c * (1 / d + s1 * s1) ** 2


def local_burkholder(m, K, p):
    s1, _, d = sv(m)
    if d <= 0 or s1 * s1 > K * d * (1 + 1e-12):
        return math.inf
    return burkholder(m, p)


def shield(fn, m):
    m = np.asarray(m, dtype=float)
    d = np.linalg.det(m)
    if d <= 0:
        return math.inf
    return fn(np.linalg.inv(m)) * d


def w_of_t_identity(t):
    return 1 + 2 * math.log(t)


def f_of_t_identity(t):
    return -2 * t * t * math.log(t)


def ec_identity(c):
    return 1 + 4 * c


def ec_bound(c):
    return 1.5 + math.log(math.sqrt(2 * c))


def cauchy_disk(z):
    """C(chi_D)(z): conj(z) inside, 1/z outside."""
    z = np.asarray(z, dtype=complex)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(np.abs(z) < 1, np.conj(z), 1 / z)


def beurling_disk(z):
    """S(chi_D)(z): 0 inside, -1/z^2 outside."""
    z = np.asarray(z, dtype=complex)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(np.abs(z) < 1, 0.0, -1 / z**2)


def weighted_constant(a_abs, p):
    """mean of (1 - p k/(1+k)) (1 + k)^p for f = z + a conj(z) on D, k = |a|."""
    k = a_abs
    return (1 - p * k / (1 + k)) * (1 + k) ** p
