"""Discrete energies of piecewise-affine maps on a disk mesh."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from ..algebra import Mat2
from ..functionals import FunctionalSpec, evaluate_invariants, parse_functional
from .. import kernels
from ..kernels import BURKHOLDER, CONST, DET, DIRICHLET, ECEXTRA, F, NORMPOW, W, WTILDE
from .mesh import BoundarySpec, DiscreteMap, DiskMesh, boundary_values


def density_terms(spec: FunctionalSpec, weight: float = 1.0):
    """Flatten a functional into kernel terms (code, param, weight) plus split callbacks.

    Returns (terms, splits, cone_K) where cone_K is set by local Burkholder.
    """
    k = spec.kind
    if k == "burkholder":
        return [(BURKHOLDER, spec.p, weight)], [], None
    if k == "local":
        return [(BURKHOLDER, spec.p, weight)], [], spec.K
    if k == "det":
        return [(DET, 0.0, weight)], [], None
    if k == "normpow":
        return [(NORMPOW, spec.q, weight)], [], None
    if k == "dirichlet":
        return [(DIRICHLET, 0.0, weight)], [], None
    if k == "W":
        return [(W, 0.0, weight)], [], None
    if k == "Wtilde":
        return [(WTILDE, 0.0, weight)], [], None
    if k == "F":
        return [(F, 0.0, weight)], [], None
    if k == "ec":
        return [(W, 0.0, weight), (ECEXTRA, spec.c, weight)], [], None
    if k == "const":
        return [(CONST, spec.c, weight)], [], None
    if k == "split":
        return [], [(weight, spec)], None
    if k == "sum":
        terms, splits, cone = [], [], None
        for w, s in spec.terms:
            t, sp, c = density_terms(s, weight * w)
            terms += t
            splits += sp
            cone = c if c is not None else cone
        return terms, splits, cone
    raise NotImplementedError(f"no discrete energy for functional kind {k!r}")


def _split_callback(splits):
    if not splits:
        return None

    def extra(sp, sm):
        n = sp + sm
        d = (sp - sm) * (sp + sm)
        pos = d > 0
        ds = np.where(pos, d, 1.0)
        K = n * n / ds
        v = np.zeros_like(sp)
        gp = np.zeros_like(sp)
        gm = np.zeros_like(sp)
        with np.errstate(all="ignore"):
            for w, s in splits:
                g1, h1 = s.G.d1(ds), s.H.d1(K)
                v = v + w * (s.G(ds) + s.H(K))
                gp = gp + w * (g1 * 2 * sp + h1 * (2 * n / ds - n * n * 2 * sp / ds**2))
                gm = gm + w * (g1 * (-2 * sm) + h1 * (2 * n / ds + n * n * 2 * sm / ds**2))
        return np.where(pos, v, np.inf), np.where(pos, gp, 0.0), np.where(pos, gm, 0.0)

    return extra


@dataclass
class EnergyConfig:
    functional: FunctionalSpec
    p: Optional[float] = None
    K: Optional[float] = None
    penalty_weights: Sequence[float] = (1e1, 1e2, 1e3, 1e4, 1e5)
    eps: float = 1e-6
    eps_schedule: Sequence[float] = (1e-2, 1e-4)
    max_iter: int = 300
    gtol: float = 1e-10
    ftol: float = 1e-7
    memory: int = 10
    backend: Optional[str] = None

    def __post_init__(self):
        if isinstance(self.functional, str):
            self.functional = parse_functional(self.functional)
        w = list(self.penalty_weights)
        if any(b <= a for a, b in zip(w, w[1:])):
            raise ValueError("penalty weights must increase")
        if self.eps < 0:
            raise ValueError("eps must be >= 0")
        # continuation only from coarser smoothing down to eps
        self.eps_schedule = tuple(e for e in self.eps_schedule if e > self.eps)


class Energy:
    """E(f) = sum_T area_T E(Df_T) + w sum_T area_T max(0, |Df_T|^2 - K det Df_T)^2."""

    def __init__(self, mesh: DiskMesh, cfg: EnergyConfig, boundary: BoundarySpec):
        self.mesh = mesh
        self.cfg = cfg
        terms, splits, coneK = density_terms(cfg.functional)
        self.terms = np.ascontiguousarray(np.array(terms, dtype=float).reshape(-1, 3))
        self.extra = _split_callback(splits)
        self.cone_K = cfg.K if cfg.K is not None else coneK
        self.trace = boundary_values(mesh, boundary)
        self.boundary = boundary
        backend = cfg.backend
        if self.extra is not None:
            backend = "python"
        self.backend = backend or kernels.BACKEND
        self._kernel = kernels.get_backend(self.backend)
        self.penalty_weight = 0.0
        self.eps = cfg.eps
        self.n_evals = 0

    def __call__(self, w, want_grad=True, eps=None, penalty_weight=None):
        self.n_evals += 1
        K = self.cone_K if self.cone_K is not None else 1.0
        pw = self.penalty_weight if penalty_weight is None else penalty_weight
        if self.cone_K is None:
            pw = 0.0
        m = self.mesh
        return self._kernel(np.ascontiguousarray(w, dtype=complex), m.triangles, m.alpha, m.beta, m.areas,
                            self.terms, self.eps if eps is None else eps, float(K), float(pw),
                            want_grad, self.extra)

    def value(self, w, eps=0.0, penalty_weight=None) -> float:
        """Reported energy: exact operator norm (eps = 0) by default."""
        return self(w, want_grad=False, eps=eps, penalty_weight=penalty_weight)[0]

    def unpenalized(self, w, eps=0.0) -> float:
        return self(w, want_grad=False, eps=eps, penalty_weight=0.0)[0]

    def cone_violation(self, w) -> float:
        """Penalty integral sum area * max(0, |Df|^2 - K det)^2."""
        if self.cone_K is None:
            return 0.0
        ap, am = self.mesh.gradients(w)
        n = np.abs(ap) + np.abs(am)
        d = np.abs(ap) ** 2 - np.abs(am) ** 2
        v = np.maximum(0.0, n * n - self.cone_K * d)
        return float(np.sum(self.mesh.areas * v * v))

    def triangle_densities(self, w) -> np.ndarray:
        ap, am = self.mesh.gradients(w)
        sp, sm = np.abs(ap), np.abs(am)
        return evaluate_invariants(self.cfg.functional, sp, sm, (sp - sm) * (sp + sm))

    def full(self, interior_values):
        w = np.empty(self.mesh.n_vertices, complex)
        w[self.mesh.boundary] = self.trace
        w[self.mesh.interior] = interior_values
        return w


def assemble_energy(mesh: DiskMesh, cfg: EnergyConfig, boundary: BoundarySpec) -> Energy:
    for b in np.atleast_1d(boundary_values(mesh, boundary)):
        if not np.isfinite(b):
            raise ValueError("boundary trace must be finite at every boundary vertex")
    return Energy(mesh, cfg, boundary)


def triangle_distortion(mesh: DiskMesh, w) -> np.ndarray:
    ap, am = mesh.gradients(w)
    n = np.abs(ap) + np.abs(am)
    d = np.abs(ap) ** 2 - np.abs(am) ** 2
    with np.errstate(divide="ignore"):
        return np.where(d > 0, n * n / np.where(d > 0, d, 1.0), np.inf)


def snap_to_cone(ap, am, K: float):
    """Shrink a- so that |a-| <= (K-1)/(K+1) |a+| (per-triangle feasibility snap)."""
    kap = (K - 1) / (K + 1)
    sp, sm = np.abs(ap), np.abs(am)
    lim = kap * sp
    scale = np.where(sm > lim, lim / np.where(sm > 0, sm, 1.0), 1.0)
    return ap, am * scale
