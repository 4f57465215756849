"""Real 2x2 matrices in conformal coordinates, A(z) = a_plus*z + a_minus*conj(z).

Also provides ExtReal, a tagged extended real used by the scalar APIs so that
an infinite energy is never mistaken for an ordinary float.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np


class ExtReal:
    """Real number or the distinguished value PLUS_INFINITY."""

    __slots__ = ("_v", "_inf")

    def __init__(self, value: float = 0.0, infinite: bool = False):
        if infinite:
            self._v = math.inf
            self._inf = True
            return
        value = float(value)
        if math.isnan(value):
            raise ValueError("ExtReal cannot hold NaN")
        if value == -math.inf:
            raise ValueError("-inf is not representable")
        self._v = value
        self._inf = value == math.inf

    @classmethod
    def of(cls, x) -> "ExtReal":
        if isinstance(x, ExtReal):
            return x
        x = float(x)
        if x == math.inf:
            return PLUS_INFINITY
        return cls(x)

    @property
    def is_inf(self) -> bool:
        return self._inf

    @property
    def is_finite(self) -> bool:
        return not self._inf

    @property
    def value(self) -> float:
        return self._v

    def __float__(self):
        return self._v

    def __add__(self, other):
        o = ExtReal.of(other)
        if self._inf or o._inf:
            return PLUS_INFINITY
        return ExtReal(self._v + o._v)

    __radd__ = __add__

    def __sub__(self, other):
        o = ExtReal.of(other)
        if o._inf:
            raise ValueError("subtracting PLUS_INFINITY is undefined")
        if self._inf:
            return PLUS_INFINITY
        return ExtReal(self._v - o._v)

    def __rsub__(self, other):
        return ExtReal.of(other) - self

    def __mul__(self, other):
        s = float(other)
        if self._inf:
            if s > 0:
                return PLUS_INFINITY
            raise ValueError("PLUS_INFINITY may only be scaled by positive numbers")
        return ExtReal(self._v * s)

    __rmul__ = __mul__

    def _key(self, other):
        o = ExtReal.of(other)
        return self._v, o._v

    def __lt__(self, other):
        a, b = self._key(other)
        return a < b

    def __le__(self, other):
        a, b = self._key(other)
        return a <= b

    def __gt__(self, other):
        a, b = self._key(other)
        return a > b

    def __ge__(self, other):
        a, b = self._key(other)
        return a >= b

    def __eq__(self, other):
        try:
            a, b = self._key(other)
        except (TypeError, ValueError):
            return NotImplemented
        return a == b

    def __hash__(self):
        return hash(self._v)

    def __repr__(self):
        return "PLUS_INFINITY" if self._inf else f"ExtReal({self._v!r})"

    def __str__(self):
        return "inf" if self._inf else repr(self._v)


PLUS_INFINITY = ExtReal(infinite=True)


def to_ext(x) -> ExtReal:
    """Convert a float (np.inf allowed) into ExtReal."""
    return ExtReal.of(x)


@dataclass(frozen=True)
class Mat2:
    a_plus: complex
    a_minus: complex

    def __post_init__(self):
        object.__setattr__(self, "a_plus", complex(self.a_plus))
        object.__setattr__(self, "a_minus", complex(self.a_minus))

    @property
    def det(self) -> float:
        p, m = abs(self.a_plus), abs(self.a_minus)
        return (p - m) * (p + m)

    @property
    def opnorm(self) -> float:
        return abs(self.a_plus) + abs(self.a_minus)

    def __call__(self, z):
        return self.a_plus * z + self.a_minus * np.conj(z)

    def to_real(self) -> np.ndarray:
        c1 = self(1.0)
        c2 = self(1j)
        return np.array([[c1.real, c2.real], [c1.imag, c2.imag]])

    def inverse(self) -> "Mat2":
        d = self.det
        if d == 0:
            raise ZeroDivisionError("singular matrix")
        return Mat2(self.a_plus.conjugate() / d, -self.a_minus / d)

    def __add__(self, other: "Mat2") -> "Mat2":
        return Mat2(self.a_plus + other.a_plus, self.a_minus + other.a_minus)

    def __sub__(self, other: "Mat2") -> "Mat2":
        return Mat2(self.a_plus - other.a_plus, self.a_minus - other.a_minus)

    def __mul__(self, t: float) -> "Mat2":
        t = float(t)
        return Mat2(self.a_plus * t, self.a_minus * t)

    __rmul__ = __mul__

    def __neg__(self):
        return Mat2(-self.a_plus, -self.a_minus)

    def __matmul__(self, other: "Mat2") -> "Mat2":
        # composition self(other(z))
        ap = self.a_plus * other.a_plus + self.a_minus * other.a_minus.conjugate()
        am = self.a_plus * other.a_minus + self.a_minus * other.a_plus.conjugate()
        return Mat2(ap, am)

    def rotate(self, theta: float, phi: float) -> "Mat2":
        return Mat2(self.a_plus * np.exp(1j * theta), self.a_minus * np.exp(1j * phi))


IDENTITY = Mat2(1.0, 0.0)


def from_real(m11: float, m12: float, m21: float, m22: float) -> Mat2:
    ap = complex(m11 + m22, m21 - m12) / 2
    am = complex(m11 - m22, m21 + m12) / 2
    return Mat2(ap, am)


def from_array(m) -> Mat2:
    m = np.asarray(m, dtype=float)
    return from_real(m[0, 0], m[0, 1], m[1, 0], m[1, 1])


def diag(x: float, y: float) -> Mat2:
    return from_real(x, 0.0, 0.0, y)


class Invariants(NamedTuple):
    det: float
    opnorm: float
    sv: tuple
    K: ExtReal


def invariants(A: Mat2) -> Invariants:
    p, m = abs(A.a_plus), abs(A.a_minus)
    d = A.det
    lam1 = p + m
    K = PLUS_INFINITY if d <= 0 else ExtReal(lam1 * lam1 / d)
    return Invariants(d, lam1, (lam1, abs(p - m)), K)


def distortion(A: Mat2) -> ExtReal:
    return invariants(A).K


def rank_one(u, v) -> Mat2:
    """Dyad u (x) v, i.e. the matrix u v^T."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return from_array(np.outer(u, v))


def conformal_arrays(m: np.ndarray):
    """Vectorized from_real for arrays of shape (..., 2, 2)."""
    m = np.asarray(m, dtype=float)
    ap = ((m[..., 0, 0] + m[..., 1, 1]) + 1j * (m[..., 1, 0] - m[..., 0, 1])) / 2
    am = ((m[..., 0, 0] - m[..., 1, 1]) + 1j * (m[..., 1, 0] + m[..., 0, 1])) / 2
    return ap, am


def random_mats(rng: np.random.Generator, n: int, scale: float = 1.0) -> np.ndarray:
    """n random real matrices with Gaussian entries, shape (n, 2, 2)."""
    return scale * rng.standard_normal((n, 2, 2))
