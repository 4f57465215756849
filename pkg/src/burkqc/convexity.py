"""Semi-convexity diagnostics for isotropic energy densities.

Rank-one second differences and random scans, radial-map quadrature,
volumetric/isochoric split analysis, Baker-Ericksen sampling and
minors-relation certificates against polyconvexity.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.optimize import nnls

from .algebra import IDENTITY, PLUS_INFINITY, ExtReal, Mat2, diag, from_array
from .functionals import (FunctionalSpec, ScalarFn, W_SPEC, evaluate, evaluate_array,
                          evaluate_invariants, scalar_fn)


# ------------------------------------------------------------ rank-one tests

def rank_one_second_difference(E: FunctionalSpec, A: Mat2, X: Mat2, t: float, h: float) -> ExtReal:
    if h <= 0:
        raise ValueError("h must be positive")
    vals = [evaluate(E, A + (t + s) * X) for s in (h, 0.0, -h)]
    if any(v.is_inf for v in vals):
        return PLUS_INFINITY
    return ExtReal(vals[0].value - 2 * vals[1].value + vals[2].value)


def _unit(rng, n):
    th = rng.uniform(0, 2 * np.pi, n)
    return np.stack([np.cos(th), np.sin(th)], axis=-1)


def sample_matrices(sampler: str, n: int, rng: np.random.Generator):
    """Draw n matrices in conformal coordinates according to a sampler spec.

    ``gaussian``: Gaussian real entries. ``positive``: det > 0.
    ``cone:K=k``: strictly inside |A|^2 <= K det. ``near-cone:K=k``: ratio
    |a_-|/|a_+| concentrated near the cone boundary (K-1)/(K+1).
    """
    name, _, body = sampler.partition(":")
    prm = dict(kv.split("=") for kv in body.split(",")) if body else {}
    if name == "gaussian":
        m = rng.standard_normal((n, 2, 2))
        ap = ((m[:, 0, 0] + m[:, 1, 1]) + 1j * (m[:, 1, 0] - m[:, 0, 1])) / 2
        am = ((m[:, 0, 0] - m[:, 1, 1]) + 1j * (m[:, 1, 0] + m[:, 0, 1])) / 2
        return ap, am
    mag = np.exp(rng.normal(0.0, 0.5, n))
    ph1 = np.exp(1j * rng.uniform(0, 2 * np.pi, n))
    ph2 = np.exp(1j * rng.uniform(0, 2 * np.pi, n))
    if name == "positive":
        ratio = rng.uniform(0, 0.95, n)
    elif name == "cone":
        K = float(prm.get("K", 3))
        ratio = rng.uniform(0, 0.98 * (K - 1) / (K + 1), n)
    elif name == "near-cone":
        K = float(prm.get("K", 3))
        kap = (K - 1) / (K + 1)
        ratio = np.clip(2 * kap * rng.beta(40, 40, n), 0, 0.999)
    else:
        raise ValueError(f"unknown sampler {sampler!r}")
    return mag * ph1, mag * ratio * ph2


@dataclass
class ScanReport:
    functional: str
    sampler: str
    n: int
    min_value: float
    witness: dict
    n_skipped: int
    seed: int

    @property
    def violated(self) -> bool:
        return self.min_value < -1e-8

    def row(self):
        w = self.witness
        wit = ";".join(f"{k}={v}" for k, v in w.items()) if w else ""
        return [self.functional, f"rank1:{self.sampler}", self.n, repr(self.min_value), wit, self.seed]


def rank_one_scan(E: FunctionalSpec, sampler: str = "cone:K=3", n: int = 10_000,
                  h: Optional[float] = None, seed: int = 0, rotation=None) -> ScanReport:
    """Random rank-one second differences, normalized by the stencil scale."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    ap, am = sample_matrices(sampler, n, rng)
    u = _unit(rng, n)
    v = _unit(rng, n)
    xp = ((u[:, 0] * v[:, 0] + u[:, 1] * v[:, 1]) + 1j * (u[:, 1] * v[:, 0] - u[:, 0] * v[:, 1])) / 2
    xm = ((u[:, 0] * v[:, 0] - u[:, 1] * v[:, 1]) + 1j * (u[:, 1] * v[:, 0] + u[:, 0] * v[:, 1])) / 2
    nA = np.abs(ap) + np.abs(am)
    t = rng.uniform(-0.25, 0.25, n) * nA
    if rotation is not None:
        r1, r2 = np.exp(1j * rotation[0]), np.exp(1j * rotation[1])
        ap, am, xp, xm = ap * r1, am * r2, xp * r1, xm * r2
    hh = 1e-3 * (1 + nA + np.abs(t)) if h is None else np.full(n, float(h))
    vals = [evaluate_array(E, ap + (t + s) * xp, am + (t + s) * xm) for s in (hh, 0.0, -hh)]
    V = np.stack(vals)
    finite = np.all(np.isfinite(V), axis=0)
    d2 = V[0] - 2 * V[1] + V[2]
    scale = np.maximum(np.max(np.abs(V), axis=0), 1e-300)
    norm = np.where(finite, d2 / np.where(finite, scale, 1.0), np.inf)
    if not np.any(finite):
        return ScanReport(str(E), sampler, n, math.inf, {}, n, seed)
    i = int(np.argmin(norm))
    witness = {"a_plus": complex(ap[i]), "a_minus": complex(am[i]), "x_plus": complex(xp[i]),
               "x_minus": complex(xm[i]), "t": float(t[i]), "h": float(hh[i])}
    return ScanReport(str(E), sampler, n, float(norm[i]), witness, int(n - finite.sum()), seed)


# --------------------------------------------------------------- radial maps

@dataclass(frozen=True)
class RadialProfile:
    """rho(r) on [0,1] inducing phi(z) = rho(r) z / r.

    ``log_rho`` and ``log_slope`` (r rho'/rho) are optional exact forms used
    where rho underflows. ``breaks`` lists kinks of rho in (0, 1).
    """
    rho: Callable
    rho_dot: Callable
    label: str = "profile"
    log_rho: Optional[Callable] = field(default=None, compare=False)
    log_slope: Optional[Callable] = field(default=None, compare=False)
    breaks: tuple = ()
    origin_slope: Optional[float] = None  # limit of r rho'/rho at 0

    def validate(self, n: int = 2001):
        with np.errstate(all="ignore"):
            r0 = float(np.asarray(self.rho(np.array([0.0])))[0])
        if abs(r0) > 1e-14:
            raise ValueError(f"{self.label}: rho(0) = {r0} != 0")
        r = np.linspace(0, 1, n)
        with np.errstate(all="ignore"):
            q = np.diff(self.rho(r)) / np.diff(r)
        if not np.all(np.isfinite(q)):
            raise ValueError(f"{self.label}: non-finite difference quotients")
        return float(np.max(np.abs(q)))

    def scaled_invariants(self, r):
        """(|a+|, |a-|, det, log t) with Dphi(r) = t * A, A = ((s+1)/2, (s-1)/2)."""
        r = np.asarray(r, dtype=float)
        with np.errstate(all="ignore"):
            if self.log_rho is not None:
                logt = self.log_rho(r) - np.log(r)
            else:
                logt = np.log(self.rho(r) / r)
            if self.log_slope is not None:
                s = self.log_slope(r)
            else:
                s = r * self.rho_dot(r) / self.rho(r)
        s = np.asarray(s, dtype=float)
        return np.abs(s + 1) / 2, np.abs(s - 1) / 2, s, logt

    def derivative(self, r):
        """Conformal coordinates (a_plus, a_minus) of Dphi on the positive axis."""
        r = np.asarray(r, dtype=float)
        rd, rr = self.rho_dot(r), self.rho(r) / r
        return (rd + rr) / 2, (rd - rr) / 2

    def distortion(self, r):
        sp, sm, det, _ = self.scaled_invariants(r)
        with np.errstate(divide="ignore"):
            return np.where(det > 0, (sp + sm) ** 2 / np.where(det > 0, det, 1), np.inf)

    @property
    def boundary_value(self) -> float:
        return float(np.asarray(self.rho(np.array([1.0])))[0])

    @property
    def integrability_threshold(self) -> float:
        """Largest p for which r^(2-p) rho^p -> 0 at the origin, when rho ~ r^a."""
        a = self.origin_slope
        if a is None:
            return math.inf
        if a >= 1:
            return math.inf
        return 2.0 / (1.0 - a)


def power_profile(alpha: float, lam: float = 1.0) -> RadialProfile:
    a = float(alpha)
    return RadialProfile(lambda r: lam * np.asarray(r, dtype=float) ** a,
                         lambda r: lam * a * np.asarray(r, dtype=float) ** (a - 1),
                         f"r^{a:g}" if lam == 1 else f"{lam:g}*r^{a:g}",
                         log_rho=lambda r: math.log(lam) + a * np.log(r),
                         log_slope=lambda r: np.full(np.shape(r), a),
                         origin_slope=a)


def alpha_profile(alpha: float) -> RadialProfile:
    """Linear inside r <= 1/2, r^alpha outside; 1/|alpha|-quasiconformal."""
    a = float(alpha)
    if a == 0 or abs(a) > 1:
        raise ValueError("alpha must lie in [-1, 1] minus {0}")
    c = 2.0 ** (1 - a)

    def rho(r):
        r = np.asarray(r, dtype=float)
        return np.where(r <= 0.5, c * r, np.abs(r) ** a)

    def rho_dot(r):
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore"):
            return np.where(r <= 0.5, c, a * np.abs(r) ** (a - 1))

    def log_rho(r):
        r = np.asarray(r, dtype=float)
        return np.where(r <= 0.5, math.log(c) + np.log(r), a * np.log(r))

    def log_slope(r):
        return np.where(np.asarray(r) <= 0.5, 1.0, a)

    return RadialProfile(rho, rho_dot, f"alpha={a:g}", log_rho, log_slope, (0.5,), 1.0)


def exp_profile() -> RadialProfile:
    """rho = exp(1 - 1/r^2): boundary identity, K = 2/r^2, W = 2(1 - log r)."""
    def rho(r):
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore", over="ignore"):
            return np.where(r > 0, np.exp(1 - 1 / np.where(r > 0, r, 1) ** 2), 0.0)

    def rho_dot(r):
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore", over="ignore"):
            rs = np.where(r > 0, r, 1)
            return np.where(r > 0, 2 / rs**3 * np.exp(1 - 1 / rs**2), 0.0)

    return RadialProfile(rho, rho_dot, "exp(1-1/r^2)",
                         log_rho=lambda r: 1 - 1 / np.asarray(r, dtype=float) ** 2,
                         log_slope=lambda r: 2 / np.asarray(r, dtype=float) ** 2,
                         origin_slope=math.inf)


def tilted_power_profile(alpha: float, beta: float) -> RadialProfile:
    """rho = r^alpha exp(beta (r - 1)); log slope alpha + beta r."""
    a, b = float(alpha), float(beta)
    return RadialProfile(
        lambda r: np.asarray(r, dtype=float) ** a * np.exp(b * (np.asarray(r, dtype=float) - 1)),
        lambda r: (a / np.asarray(r, dtype=float) + b) * np.asarray(r, dtype=float) ** a
        * np.exp(b * (np.asarray(r, dtype=float) - 1)),
        f"r^{a:g}*exp({b:g}(r-1))",
        log_rho=lambda r: a * np.log(r) + b * (np.asarray(r, dtype=float) - 1),
        log_slope=lambda r: a + b * np.asarray(r, dtype=float),
        origin_slope=a)


def broken_power_profile(a_in: float, a_out: float, r0: float) -> RadialProfile:
    """Continuous profile: r^a_out for r >= r0, r0^(a_out - a_in) r^a_in inside."""
    a1, a2, r0 = float(a_in), float(a_out), float(r0)
    lc = (a2 - a1) * math.log(r0)

    def log_rho(r):
        r = np.asarray(r, dtype=float)
        return np.where(r < r0, lc + a1 * np.log(r), a2 * np.log(r))

    def rho(r):
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore"):
            return np.where(r > 0, np.exp(log_rho(np.where(r > 0, r, 1.0))), 0.0)

    def log_slope(r):
        return np.where(np.asarray(r) < r0, a1, a2)

    def rho_dot(r):
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            return log_slope(r) * rho(r) / r

    return RadialProfile(rho, rho_dot, f"broken({a1:g},{a2:g},{r0:g})", log_rho, log_slope,
                         (r0,), a1)


def random_nonexpanding_profile(rng: np.random.Generator) -> RadialProfile:
    """A profile with 0 <= rho' <= rho/r and rho(1) = 1."""
    kind = rng.integers(0, 4)
    if kind == 0:
        return power_profile(rng.uniform(0.2, 1.0))
    if kind == 1:
        return alpha_profile(rng.uniform(0.2, 1.0))
    if kind == 2:
        a = rng.uniform(0.2, 0.9)
        b = rng.uniform(-a, 1 - a)
        return tilted_power_profile(a, b)
    return broken_power_profile(rng.uniform(0.2, 1.0), rng.uniform(0.2, 1.0), rng.uniform(0.2, 0.8))


def radial_quadrature(profile: Optional[RadialProfile] = None, order: int = 16, panels: int = 64,
                      grading: float = 0.5):
    """Gauss-Legendre nodes on geometrically graded panels of (0, 1].

    Returns nodes, weights and the innermost breakpoint r_min; [0, r_min] is
    left for the power-law tail estimate.
    """
    edges = grading ** np.arange(panels)
    if profile is not None:
        edges = np.concatenate([edges, [b for b in profile.breaks if 0 < b < 1]])
    edges = np.unique(np.concatenate([edges, [1.0]]))
    x, w = np.polynomial.legendre.leggauss(order)
    a, b = edges[:-1], edges[1:]
    r = ((b - a)[:, None] * (x[None, :] + 1) / 2 + a[:, None]).ravel()
    ww = ((b - a)[:, None] * w[None, :] / 2).ravel()
    return r, ww, float(edges[0])


def _radial_integrand(E, profile, r):
    sp, sm, det, logt = profile.scaled_invariants(r)
    return 2 * evaluate_invariants(E, sp, sm, det, logt) * r


def radial_mean(E: FunctionalSpec, profile: RadialProfile, order: int = 16, panels: int = 64) -> ExtReal:
    """Mean of E(Dphi) over the unit disk, i.e. 2 * int_0^1 E(Dphi(r)) r dr."""
    r, w, rmin = radial_quadrature(profile, order, panels)
    g = _radial_integrand(E, profile, r)
    if np.any(np.isnan(g)):
        raise FloatingPointError(f"NaN integrand for {E} on {profile.label}")
    if np.any(np.isinf(g)):
        return PLUS_INFINITY
    body = float(np.dot(w, g))
    # power-law tail on [0, rmin]: g ~ C r^beta
    gt = _radial_integrand(E, profile, np.array([rmin, rmin / 2, rmin / 4]))
    if np.any(np.isinf(gt)):
        return PLUS_INFINITY
    tail = 0.0
    if gt[1] != 0 and gt[2] != 0 and np.sign(gt[1]) == np.sign(gt[2]):
        beta = math.log(gt[1] / gt[2]) / math.log(2.0)
        if beta <= -1 + 1e-9:
            if gt[0] > 0:
                return PLUS_INFINITY
            raise ValueError("integral diverges to -inf")
        tail = gt[0] * rmin / (beta + 1)
    return ExtReal(body + tail)


def radial_jensen_gap(E: FunctionalSpec, profile: RadialProfile) -> Optional[ExtReal]:
    """radial_mean(E) - E(lambda Id) with lambda = rho(1).

    Returns None for energies whose domain is exactly the cone (local
    Burkholder), where the interior-domain hypothesis does not hold.
    """
    if E.kind == "local":
        return None
    m = radial_mean(E, profile)
    ref = evaluate(E, profile.boundary_value * IDENTITY)
    if m.is_inf:
        return PLUS_INFINITY
    return m - ref


# ---------------------------------------------------------- split analysis

RANK_ONE_CONVEX = "RANK_ONE_CONVEX"
NOT_RANK_ONE_CONVEX = "NOT_RANK_ONE_CONVEX"
INCONCLUSIVE = "INCONCLUSIVE"


@dataclass
class SplitReport:
    G0: float
    H0: float
    c: float
    verdict: str
    BE_ok: bool
    min_H1: float
    remainder_max: float
    G_tilde_convex: bool
    H_tilde_convex: bool
    H_tilde_nondecreasing: bool
    endpoint_flags: tuple
    t_range: tuple
    s_range: tuple


def _inf_on(fn, grid):
    with np.errstate(all="ignore"):
        v = np.asarray(fn(grid), dtype=float)
    i = int(np.nanargmin(v))
    strict_end = (i == 0 and v[0] < v[1] - 1e-12 * (1 + abs(v[1]))) or \
                 (i == len(v) - 1 and v[-1] < v[-2] - 1e-12 * (1 + abs(v[-2])))
    return float(v[i]), strict_end


def _split_stats(G: ScalarFn, H: ScalarFn, t_range, s_range, grid, tol):
    t = np.geomspace(t_range[0], t_range[1], grid)
    s = np.geomspace(s_range[0], s_range[1], grid)
    G0, gend = _inf_on(lambda x: x * x * G.d2(x), t)
    H0, hend = _inf_on(lambda x: x * x * H.d2(x), s)
    H1, h1end = _inf_on(H.d1, s)
    ok = (G0 + H0 >= -tol) and (H1 >= -tol)
    return t, s, G0, H0, H1, ok, (gend, hend, h1end)


def split_decompose(G, H, t_range=(1e-4, 1e4), s_range=(1.0, 1e4), grid: int = 4096,
                    tol: float = 1e-6) -> SplitReport:
    """Analyse E = G(det) + H(K) and split off c*W from it."""
    G = scalar_fn(G) if isinstance(G, str) else G
    H = scalar_fn(H) if isinstance(H, str) else H
    t, s, G0, H0, H1, ok, ends = _split_stats(G, H, t_range, s_range, grid, tol)
    verdict = RANK_ONE_CONVEX if ok else NOT_RANK_ONE_CONVEX
    if ok and any(ends):
        # infimum still falling at a window edge: probe a wider window
        wt = (t_range[0] * 1e-4, t_range[1] * 1e4)
        ws = (s_range[0], s_range[1] * 1e4)
        _, _, G0w, H0w, H1w, okw, _ = _split_stats(G, H, wt, ws, grid, tol)
        if not okw:
            verdict = INCONCLUSIVE
    c = max(0.0, -G0)
    with np.errstate(all="ignore"):
        Gt2 = t * t * G.d2(t) + c
        Ht2 = s * s * H.d2(s) - c
        Ht1 = H.d1(s) - c * (1 - 1 / s)
        Gt = G(t) - c * np.log(t)
        Ht = H(s) - c * (s - np.log(s))
    rem = float(max(np.max(np.abs(Gt - Gt[np.argmin(np.abs(np.log(t)))])), np.max(np.abs(Ht - Ht[0]))))
    return SplitReport(G0, H0, c, verdict, bool(H1 >= -tol), H1, rem,
                       bool(np.min(Gt2) >= -tol), bool(np.min(Ht2) >= -tol), bool(np.min(Ht1) >= -tol),
                       ends, tuple(t_range), tuple(s_range))


@dataclass
class BakerEricksenReport:
    functional: str
    n: int
    min_value: float
    witness: tuple
    seed: int

    def row(self):
        return [self.functional, "baker-ericksen", self.n, repr(self.min_value),
                f"x={self.witness[0]!r};y={self.witness[1]!r}", self.seed]


def baker_ericksen_check(E: FunctionalSpec, n: int = 1000, seed: int = 0) -> BakerEricksenReport:
    """min over random x > y > 0 of (x dPhi/dx - y dPhi/dy)/(x - y), Phi(x,y) = E(diag(x,y))."""
    rng = np.random.default_rng(seed)
    y = np.exp(rng.uniform(np.log(0.1), np.log(10), n))
    x = y * np.exp(rng.uniform(np.log(1.05), np.log(10), n))
    d = 1e-5

    def phi(xx, yy):
        return evaluate_invariants(E, (xx + yy) / 2, np.abs(xx - yy) / 2, xx * yy)

    dx = (phi(x * (1 + d), y) - phi(x * (1 - d), y)) / (2 * d)  # x dPhi/dx
    dy = (phi(x, y * (1 + d)) - phi(x, y * (1 - d))) / (2 * d)  # y dPhi/dy
    q = (dx - dy) / (x - y)
    q = np.where(np.isfinite(q), q, np.inf)
    i = int(np.argmin(q))
    return BakerEricksenReport(str(E), n, float(q[i]), (float(x[i]), float(y[i])), seed)


def baker_ericksen_split(H: ScalarFn, x, y):
    """Closed form (2x/y) H'(x/y) / (x - y) for split energies."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return (2 * x / y) * H.d1(x / y) / (x - y)


# ------------------------------------------------------ minors certificates

@dataclass(frozen=True)
class MinorsCertificate:
    weights: tuple
    matrices: tuple
    target: Mat2

    def relation_errors(self):
        w = np.asarray(self.weights, dtype=float)
        ap = sum(wi * A.a_plus for wi, A in zip(w, self.matrices))
        am = sum(wi * A.a_minus for wi, A in zip(w, self.matrices))
        lin = max(abs(ap - self.target.a_plus), abs(am - self.target.a_minus))
        det = abs(sum(wi * A.det for wi, A in zip(w, self.matrices)) - self.target.det)
        return float(lin), float(det), float(abs(w.sum() - 1))

    def validate(self, tol: float = 1e-10):
        if any(w <= 0 for w in self.weights):
            raise ValueError("certificate weights must be positive")
        if len(self.weights) != len(self.matrices):
            raise ValueError("weights and matrices differ in length")
        errs = self.relation_errors()
        if max(errs) > tol:
            raise ValueError(f"minors relations violated: {errs}")

    def scaled(self, t: float) -> "MinorsCertificate":
        return MinorsCertificate(self.weights, tuple(t * A for A in self.matrices), t * self.target)


def example_certificate() -> MinorsCertificate:
    """Three diagonal matrices averaging to Id with matching determinants."""
    return MinorsCertificate((100 / 121, 21 / 242, 21 / 242),
                             (diag(0.3, 0.3), diag(2 / 3, 8.0), diag(8.0, 2 / 3)), IDENTITY)


def random_certificate(rng: np.random.Generator, m: int = 10, spread: float = 0.6,
                       positive: bool = True, max_tries: int = 200) -> MinorsCertificate:
    """Random matrices and weights matching the target and its determinant.

    Weights come from non-negative least squares on the linear system
    (entries, determinant, total mass); only exact solutions are kept.
    """
    for _ in range(max_tries):
        T = rng.standard_normal((2, 2))
        if positive and np.linalg.det(T) <= 0.2:
            continue
        mats = T[None] + spread * rng.standard_normal((m, 2, 2))
        dets = np.linalg.det(mats)
        if positive and np.any(dets <= 0):
            continue
        M = np.vstack([mats.reshape(m, 4).T, dets[None], np.ones((1, m))])
        b = np.concatenate([T.ravel(), [np.linalg.det(T)], [1.0]])
        w, res = nnls(M, b)
        keep = w > 1e-9
        if res > 1e-12 or keep.sum() < 2:
            continue
        w2, res2 = nnls(M[:, keep], b)
        if res2 > 1e-13 or np.any(w2 <= 0):
            continue
        cert = MinorsCertificate(tuple(float(x) for x in w2),
                                 tuple(from_array(A) for A in mats[keep]), from_array(T))
        try:
            cert.validate(1e-10)
        except ValueError:
            continue
        return cert
    raise RuntimeError("could not build a random certificate")


@dataclass
class MinorsResult:
    lhs: ExtReal
    rhs: ExtReal
    polyconvexity_refuted: bool
    relation_errors: tuple


def minors_certificate_check(E: FunctionalSpec, cert: MinorsCertificate, tol: float = 1e-9) -> MinorsResult:
    cert.validate(1e-10)
    lhs = ExtReal(0.0)
    for w, A in zip(cert.weights, cert.matrices):
        lhs = lhs + evaluate(E, A) * w
    rhs = evaluate(E, cert.target)
    refuted = lhs.is_finite and rhs.is_finite and lhs.value < rhs.value - tol
    if lhs.is_finite and rhs.is_inf:
        refuted = True
    return MinorsResult(lhs, rhs, bool(refuted), cert.relation_errors())
