"""Energy densities on 2x2 matrices, evaluated in conformal coordinates.

Every density here is isotropic: it depends on A only through
|a_plus|, |a_minus| and det A. The array evaluator works on those three
invariants, plus an optional log-scale factor so that E(t*A) can be formed
without under/overflow when t is astronomically small (radial profiles).
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .algebra import PLUS_INFINITY, ExtReal, Mat2, to_ext


# ---------------------------------------------------------------- exponents

def p_of_K(K: float) -> float:
    """Critical exponent 2K/(K-1) of the K-quasiconformal cone."""
    if K <= 1:
        return math.inf
    return 2.0 * K / (K - 1.0)


def K_of_p(p: float) -> float:
    if p <= 2:
        return math.inf
    return p / (p - 2.0)


@dataclass(frozen=True)
class PExponent:
    p: float

    def __post_init__(self):
        if not self.p >= 2:
            raise ValueError("exponent must satisfy p >= 2")

    @property
    def K(self) -> float:
        return K_of_p(self.p)


# ----------------------------------------------------------- scalar functions

@dataclass(frozen=True)
class ScalarFn:
    """Scalar function with first and second derivative oracles.

    ``log_form`` optionally evaluates f(exp(s)) directly from s, which keeps
    G(det) finite when det underflows.
    """
    name: str
    f: Callable = field(compare=False)
    d1: Callable = field(compare=False)
    d2: Callable = field(compare=False)
    log_form: Optional[Callable] = field(default=None, compare=False)

    def __call__(self, t):
        return self.f(t)

    def __str__(self):
        return self.name


def _zero(t):
    return np.zeros_like(np.asarray(t, dtype=float))


def _const_one(t):
    return np.ones_like(np.asarray(t, dtype=float))


def _power_fn(q: float, name: str) -> ScalarFn:
    return ScalarFn(
        name,
        lambda t: np.asarray(t, dtype=float) ** q,
        lambda t: q * np.asarray(t, dtype=float) ** (q - 1),
        lambda t: q * (q - 1) * np.asarray(t, dtype=float) ** (q - 2),
        lambda s: np.exp(q * np.asarray(s, dtype=float)),
    )


SCALAR_FUNCTIONS = {
    "0": ScalarFn("0", _zero, _zero, _zero, _zero),
    "log": ScalarFn("log", np.log, lambda t: 1.0 / t, lambda t: -1.0 / t**2,
                    lambda s: np.asarray(s, dtype=float)),
    "-log": ScalarFn("-log", lambda t: -np.log(t), lambda t: -1.0 / t,
                     lambda t: 1.0 / t**2, lambda s: -np.asarray(s, dtype=float)),
    "t": ScalarFn("t", lambda t: np.asarray(t, dtype=float), _const_one, _zero, np.exp),
    "-t": ScalarFn("-t", lambda t: -np.asarray(t, dtype=float), lambda t: -_const_one(t), _zero,
                   lambda s: -np.exp(s)),
    "t-log": ScalarFn("t-log", lambda t: t - np.log(t), lambda t: 1.0 - 1.0 / t,
                      lambda t: 1.0 / t**2, lambda s: np.exp(s) - s),
    "1/t": ScalarFn("1/t", lambda t: 1.0 / t, lambda t: -1.0 / t**2, lambda t: 2.0 / t**3,
                    lambda s: np.exp(-np.asarray(s, dtype=float))),
    "log^2": ScalarFn("log^2", lambda t: np.log(t) ** 2, lambda t: 2 * np.log(t) / t,
                      lambda t: (2 - 2 * np.log(t)) / t**2,
                      lambda s: np.asarray(s, dtype=float) ** 2),
    "-t^2": ScalarFn("-t^2", lambda t: -np.asarray(t, dtype=float) ** 2, lambda t: -2.0 * t,
                     lambda t: -2.0 * _const_one(t), lambda s: -np.exp(2 * np.asarray(s))),
}


def scalar_fn(name: str) -> ScalarFn:
    name = name.strip().replace(" ", "")
    if name in SCALAR_FUNCTIONS:
        return SCALAR_FUNCTIONS[name]
    m = re.fullmatch(r"t\^([0-9.eE+-]+)", name)
    if m:
        return _power_fn(float(m.group(1)), name)
    raise ValueError(f"unknown scalar function {name!r}; known: {sorted(SCALAR_FUNCTIONS)} or t^q")


# ------------------------------------------------------------------- specs

KINDS = ("burkholder", "local", "F", "W", "Wtilde", "ec", "split", "shield",
         "det", "normpow", "dirichlet", "const", "sum")


@dataclass(frozen=True)
class FunctionalSpec:
    kind: str
    p: Optional[float] = None
    K: Optional[float] = None
    c: Optional[float] = None
    q: Optional[float] = None
    G: Optional[ScalarFn] = None
    H: Optional[ScalarFn] = None
    inner: Optional["FunctionalSpec"] = None
    terms: tuple = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown functional kind {self.kind!r}")
        if self.kind == "burkholder" and not (self.p is not None and self.p >= 2):
            raise ValueError("Burkholder functional requires p >= 2")
        if self.kind == "local":
            if self.K is None or self.K < 1:
                raise ValueError("local Burkholder functional requires K >= 1")
            if self.p is None or self.p < 2:
                raise ValueError("local Burkholder functional requires p >= 2")
        if self.kind == "ec" and not (self.c is not None and self.c >= 0):
            raise ValueError("E_c requires c >= 0")
        if self.kind == "split" and (self.G is None or self.H is None):
            raise ValueError("split functional requires G and H")
        if self.kind == "shield":
            if self.inner is None:
                raise ValueError("shield requires an inner functional")
            if self.shield_depth > 2:
                raise ValueError("shield nesting depth is limited to 2")
        if self.kind == "normpow" and self.q is None:
            raise ValueError("normpow requires q")

    @property
    def shield_depth(self) -> int:
        if self.kind == "shield":
            return 1 + self.inner.shield_depth
        if self.kind == "sum":
            return max(s.shield_depth for _, s in self.terms)
        return 0

    # constructors
    @classmethod
    def burkholder(cls, p):
        return cls("burkholder", p=float(p))

    @classmethod
    def local(cls, K, p=None):
        return cls("local", K=float(K), p=float(p if p is not None else p_of_K(K)))

    @classmethod
    def split(cls, G, H):
        G = scalar_fn(G) if isinstance(G, str) else G
        H = scalar_fn(H) if isinstance(H, str) else H
        return cls("split", G=G, H=H)

    @classmethod
    def ec(cls, c):
        return cls("ec", c=float(c))

    @classmethod
    def shielded(cls, inner):
        return cls("shield", inner=inner)

    @classmethod
    def normpow(cls, q):
        return cls("normpow", q=float(q))

    @classmethod
    def const(cls, c):
        return cls("const", c=float(c))

    @classmethod
    def combo(cls, *weighted):
        return cls("sum", terms=tuple((float(w), s) for w, s in weighted))

    def __str__(self):
        return format_functional(self)


F_SPEC = FunctionalSpec("F")
W_SPEC = FunctionalSpec("W")
WTILDE_SPEC = FunctionalSpec("Wtilde")
NEG_DET = FunctionalSpec.combo((-1.0, FunctionalSpec("det")))


def _num(x: float) -> str:
    return repr(float(x)) if float(x) != int(x) else str(int(x))


def format_functional(s: FunctionalSpec) -> str:
    k = s.kind
    if k == "burkholder":
        return f"burkholder:p={_num(s.p)}"
    if k == "local":
        return f"local:K={_num(s.K)},p={_num(s.p)}"
    if k in ("F", "W", "Wtilde", "det", "dirichlet"):
        return k
    if k == "ec":
        return f"ec:c={_num(s.c)}"
    if k == "split":
        return f"split:G={s.G},H={s.H}"
    if k == "shield":
        return f"shield({format_functional(s.inner)})"
    if k == "normpow":
        return f"normpow:q={_num(s.q)}"
    if k == "const":
        return f"const:c={_num(s.c)}"
    parts = []
    for w, t in s.terms:
        txt = format_functional(t)
        if w == 1:
            parts.append(txt)
        elif w == -1:
            parts.append("-" + txt)
        else:
            parts.append(f"{_num(w)}*{txt}")
    return "+".join(parts)


def _split_top(text: str, sep: str):
    out, depth, cur = [], 0, ""
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == sep and depth == 0 and not (i > 0 and text[i - 1] in "eE" and i > 1 and text[i - 2].isdigit()):
            out.append(cur)
            cur = ""
        else:
            cur += ch
    out.append(cur)
    return out


def _params(body: str) -> dict:
    out = {}
    if not body:
        return out
    for item in body.split(","):
        if "=" not in item:
            raise ValueError(f"malformed parameter {item!r}")
        k, v = item.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def parse_functional(text: str) -> FunctionalSpec:
    """Parse the canonical text form, e.g. ``burkholder:p=3`` or ``shield(F)``."""
    text = text.strip().replace(" ", "")
    if not text:
        raise ValueError("empty functional")
    terms = _split_top(text, "+")
    if len(terms) > 1 or text.startswith("-") or re.match(r"^[0-9.eE+-]+\*", text):
        weighted = []
        for t in terms:
            m = re.match(r"^([0-9.eE+-]+)\*(.*)$", t)
            if m:
                weighted.append((float(m.group(1)), parse_functional(m.group(2))))
            elif t.startswith("-"):
                weighted.append((-1.0, parse_functional(t[1:])))
            else:
                weighted.append((1.0, parse_functional(t)))
        return FunctionalSpec.combo(*weighted)
    m = re.fullmatch(r"shield\((.*)\)", text)
    if m:
        return FunctionalSpec.shielded(parse_functional(m.group(1)))
    name, _, body = text.partition(":")
    prm = _params(body)

    def take(*allowed):
        extra = set(prm) - set(allowed)
        if extra:
            raise ValueError(f"unknown parameters {sorted(extra)} for {name}")
        return prm

    if name in ("F", "W", "Wtilde", "det", "dirichlet"):
        take()
        return FunctionalSpec(name)
    if name == "burkholder":
        take("p")
        return FunctionalSpec.burkholder(float(prm["p"]))
    if name == "local":
        take("K", "p")
        return FunctionalSpec.local(float(prm["K"]), float(prm["p"]) if "p" in prm else None)
    if name == "ec":
        take("c")
        return FunctionalSpec.ec(float(prm["c"]))
    if name == "split":
        take("G", "H")
        return FunctionalSpec.split(prm.get("G", "0"), prm.get("H", "0"))
    if name == "normpow":
        take("q")
        return FunctionalSpec.normpow(float(prm["q"]))
    if name == "const":
        take("c")
        return FunctionalSpec.const(float(prm["c"]))
    raise ValueError(f"unknown functional {text!r}")


# --------------------------------------------------------- array evaluation

def invariants_arrays(ap, am):
    sp = np.abs(np.asarray(ap))
    sm = np.abs(np.asarray(am))
    return sp, sm, (sp - sm) * (sp + sm)


def evaluate_invariants(spec: FunctionalSpec, sp, sm, det, logt=None) -> np.ndarray:
    """E(t*A) for isotropic E from (|a_plus|, |a_minus|, det) of A and log t.

    Returns a float array; np.inf marks points outside the effective domain.
    """
    sp = np.asarray(sp, dtype=float)
    sm = np.asarray(sm, dtype=float)
    det = np.asarray(det, dtype=float)
    lt = np.zeros_like(sp) if logt is None else np.broadcast_to(np.asarray(logt, dtype=float), sp.shape)
    n = sp + sm
    k = spec.kind
    with np.errstate(divide="ignore", invalid="ignore", over="ignore", under="ignore"):
        if k == "burkholder":
            p = spec.p
            return n ** (p - 1) * ((p - 1) * sm - sp) * np.exp(p * lt)
        if k == "local":
            p = spec.p
            val = n ** (p - 1) * ((p - 1) * sm - sp) * np.exp(p * lt)
            inside = n * n <= spec.K * det + 1e-12 * n * n
            inside &= (det > 0) | (n == 0)
            return np.where(inside, val, np.inf)
        if k == "F":
            n2 = n * n
            val = np.exp(2 * lt) * (n2 - (1 + np.log(n2) + 2 * lt) * det)
            return np.where(n2 > 0, val, 0.0)
        if k in ("W", "Wtilde"):
            pos = det > 0
            Kd = np.where(pos, n * n / np.where(pos, det, 1.0), 1.0)
            ld = np.log(np.where(pos, det, 1.0)) + 2 * lt
            if k == "Wtilde":
                ld = np.abs(ld)
            return np.where(pos, Kd - np.log(Kd) + ld, np.inf)
        if k == "ec":
            pos = det > 0
            w = evaluate_invariants(W_SPEC, sp, sm, det, lt)
            dd = np.where(pos, det, 1.0)
            t2 = np.exp(2 * lt)
            extra = spec.c * (1.0 / (t2 * dd) + t2 * n * n) ** 2
            return np.where(pos, w + extra, np.inf)
        if k == "split":
            pos = det > 0
            dd = np.where(pos, det, 1.0)
            Kd = n * n / dd
            if spec.G.log_form is not None:
                g = spec.G.log_form(np.log(dd) + 2 * lt)
            else:
                g = spec.G(dd * np.exp(2 * lt))
            return np.where(pos, g + spec.H(Kd), np.inf)
        if k == "shield":
            pos = det > 0
            dd = np.where(pos, det, 1.0)
            inner = evaluate_invariants(spec.inner, sp / dd, sm / dd, 1.0 / dd, -lt)
            return np.where(pos, inner * dd * np.exp(2 * lt), np.inf)
        if k == "det":
            return det * np.exp(2 * lt)
        if k == "normpow":
            return n ** spec.q * np.exp(spec.q * lt)
        if k == "dirichlet":
            return 2 * (sp * sp + sm * sm) * np.exp(2 * lt)
        if k == "const":
            return np.full(sp.shape, spec.c)
        if k == "sum":
            out = np.zeros(sp.shape)
            for w, s in spec.terms:
                v = evaluate_invariants(s, sp, sm, det, lt)
                out = out + np.where(np.isinf(v), np.inf, w * np.where(np.isinf(v), 0.0, v))
            return out
    raise ValueError(k)


def evaluate_array(spec: FunctionalSpec, ap, am, logt=None) -> np.ndarray:
    sp, sm, det = invariants_arrays(ap, am)
    return evaluate_invariants(spec, sp, sm, det, logt)


def evaluate(spec: FunctionalSpec, A: Mat2) -> ExtReal:
    v = evaluate_array(spec, np.array([A.a_plus]), np.array([A.a_minus]))[0]
    if np.isnan(v):
        raise FloatingPointError(f"{spec} produced NaN at {A}")
    return to_ext(v)


# ------------------------------------------------------- named evaluators

def burkholder(A: Mat2, p: float) -> float:
    PExponent(p)
    sp, sm = abs(A.a_plus), abs(A.a_minus)
    n = sp + sm
    return n ** (p - 1) * ((p - 1) * sm - sp)


def burkholder_polynomial_form(A: Mat2, p: float) -> float:
    """Cross-check form ((p/2-1)|A|^2 - (p/2) det A)|A|^(p-2)."""
    n = A.opnorm
    if n == 0:
        return 0.0
    return ((p / 2 - 1) * n * n - (p / 2) * A.det) * n ** (p - 2)


def local_burkholder(A: Mat2, K: float, p: Optional[float] = None) -> ExtReal:
    return evaluate(FunctionalSpec.local(K, p), A)


def f_functional(A: Mat2) -> ExtReal:
    return evaluate(F_SPEC, A)


def w_functional(A: Mat2) -> ExtReal:
    return evaluate(W_SPEC, A)


def w_tilde(A: Mat2) -> ExtReal:
    return evaluate(WTILDE_SPEC, A)


def shield(E: FunctionalSpec, A: Mat2) -> ExtReal:
    return evaluate(FunctionalSpec.shielded(E), A)


def split_eval(G, H, A: Mat2) -> ExtReal:
    return evaluate(FunctionalSpec.split(G, H), A)


def ec_example(A: Mat2, c: float) -> ExtReal:
    return evaluate(FunctionalSpec.ec(c), A)


def ec_lower_bound(c: float) -> float:
    return 1.5 + math.log(math.sqrt(2 * c))


def gamma_p(A: Mat2, p: float) -> float:
    d = A.det
    if d <= 0:
        raise ValueError("gamma_p requires det A > 0")
    return (p / 2) * burkholder(A, p) / (-d)


__all__ = [
    "PLUS_INFINITY", "ExtReal", "FunctionalSpec", "PExponent", "ScalarFn", "scalar_fn",
    "parse_functional", "format_functional", "evaluate", "evaluate_array", "evaluate_invariants",
    "burkholder", "burkholder_polynomial_form", "local_burkholder", "f_functional", "w_functional",
    "w_tilde", "shield", "split_eval", "ec_example", "ec_lower_bound", "gamma_p", "p_of_K", "K_of_p",
    "F_SPEC", "W_SPEC", "WTILDE_SPEC", "NEG_DET",
]
