"""Desk-scale minimization experiments with known lower bounds."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..algebra import IDENTITY, Mat2
from ..functionals import (FunctionalSpec, burkholder, ec_lower_bound, evaluate, format_functional,
                           p_of_K, parse_functional)
from .energy import EnergyConfig, assemble_energy, snap_to_cone, triangle_distortion
from .mesh import DiskMesh, affine_map, polar_disk_mesh, smooth_perturbation
from .optimize import MinimizeResult, minimize

MIN_COLUMNS = ["experiment", "functional", "rings", "sectors", "start", "seed", "value", "floor",
               "excess", "status", "iterations", "cone_violation"]


@dataclass
class StartResult:
    start: int
    seed: int
    result: MinimizeResult
    floor: float
    area: float

    @property
    def value(self) -> float:
        return self.result.value

    @property
    def excess(self) -> float:
        """(value - floor) / mesh area."""
        return (self.value - self.floor) / self.area

    @property
    def converged(self) -> bool:
        return self.result.converged


@dataclass
class LevelReport:
    rings: int
    sectors: int
    area: float
    floor: float
    starts: List[StartResult] = field(default_factory=list)

    @property
    def best(self) -> float:
        return min(s.value for s in self.starts)

    @property
    def best_excess(self) -> float:
        return (self.best - self.floor) / self.area


@dataclass
class MinExperimentReport:
    name: str
    functional: str
    levels: List[LevelReport]
    lower_tol: float
    upper_tol: float
    extra: dict = field(default_factory=dict)

    @property
    def floor_respected(self) -> bool:
        """Every converged value >= floor - lower_tol * area."""
        return all(s.excess >= -self.lower_tol for lv in self.levels for s in lv.starts if s.converged)

    @property
    def floor_attained(self) -> bool:
        """Best value within upper_tol * area of the floor on every level."""
        return all(abs(lv.best_excess) <= self.upper_tol for lv in self.levels)

    @property
    def passed(self) -> bool:
        return self.floor_respected and self.floor_attained

    def rows(self):
        out = []
        for lv in self.levels:
            for s in lv.starts:
                r = s.result
                out.append([self.name, self.functional, lv.rings, lv.sectors, s.start, s.seed, s.value,
                            s.floor, s.excess, r.status, r.iterations, r.cone_violation])
        return out


def _run_starts(mesh: DiskMesh, cfg: EnergyConfig, A: Mat2, floor: float, starts: int, seed: int,
                amp: float) -> List[StartResult]:
    energy = assemble_energy(mesh, cfg, A)
    out = []
    for k in range(starts):
        rng = np.random.default_rng([seed, k])
        pert = smooth_perturbation(mesh, rng, amp) if amp > 0 else None
        res = minimize(energy, affine_map(mesh, A, pert))
        out.append(StartResult(k, seed, res, floor, mesh.area))
    return out


def burkholder_min_experiment(A: Mat2 = IDENTITY, K: float = 2.0, p: float = 3.0,
                              refinements: Sequence[Tuple[int, int]] = ((48, 96),), starts: int = 5,
                              seed: int = 0, amp: float = 0.05, lower_tol: float = 1e-3,
                              upper_tol: float = 1e-2, **cfg_kw) -> MinExperimentReport:
    """Minimize the local Burkholder energy with affine trace A from random starts.

    The floor is area * B_p(A): affine maps are optimal among K-quasiregular
    competitors, so every converged value should sit at or above it.
    """
    if not (2 <= p < p_of_K(K)):
        raise ValueError(f"need 2 <= p < p_K = {p_of_K(K)}")
    if not (A.det > 0 and A.opnorm ** 2 < K * A.det * (1 - 1e-12)):
        raise ValueError("A must lie strictly inside the K-cone")
    spec = FunctionalSpec.local(K, p)
    cfg = EnergyConfig(spec, p=p, K=K, **cfg_kw)
    levels = []
    for rings, sectors in refinements:
        mesh = polar_disk_mesh(rings, sectors)
        floor = mesh.area * burkholder(A, p)
        lv = LevelReport(rings, sectors, mesh.area, floor)
        lv.starts = _run_starts(mesh, cfg, A, floor, starts, seed, amp)
        levels.append(lv)
    return MinExperimentReport("burkholder_min", format_functional(spec), levels, lower_tol, upper_tol,
                               {"A": A, "K": K, "p": p})


def refinement_study(levels: Sequence[Tuple[int, int]] = ((12, 24), (24, 48), (48, 96)),
                     starts: int = 3, seed: int = 0, **kw):
    """|min + pi| for the identity-trace Burkholder experiment across mesh levels.

    The floor over the true disk is B_p(Id) * pi = -pi; the distance mixes
    the polygon area deficit with the optimizer excess. Returns the
    distances and whether they decrease.
    """
    rep = burkholder_min_experiment(IDENTITY, refinements=levels, starts=starts, seed=seed, **kw)
    dist = [abs(lv.best + math.pi) for lv in rep.levels]
    monotone = all(b < a for a, b in zip(dist, dist[1:]))
    return dist, monotone, rep


def ec_min_experiment(c: float = 0.1, rings: int = 48, sectors: int = 96, starts: int = 1, seed: int = 0,
                      amp: float = 0.05, **cfg_kw) -> MinExperimentReport:
    """Minimize E_c with identity trace and record the lower-bound margin of every iterate."""
    spec = FunctionalSpec.ec(c)
    cfg = EnergyConfig(spec, **cfg_kw)
    mesh = polar_disk_mesh(rings, sectors)
    bound = ec_lower_bound(c) * mesh.area
    lv = LevelReport(rings, sectors, mesh.area, bound)
    lv.starts = _run_starts(mesh, cfg, IDENTITY, bound, starts, seed, amp)
    lowest = min(min(s.result.history) for s in lv.starts)
    rep = MinExperimentReport("ec_min", format_functional(spec), [lv], 0.0, math.inf,
                              {"c": c, "bound": bound, "lowest_iterate": lowest,
                               "affine_value": mesh.area * evaluate(spec, IDENTITY).value})
    return rep


def all_iterates_above(rep: MinExperimentReport) -> bool:
    return rep.extra["lowest_iterate"] >= rep.extra["bound"]


@dataclass
class ElasticReport:
    functional: str
    value: float
    affine_value: float
    max_K: float
    log_J_integral: float
    K_integral: float
    q: float
    monotone: bool
    result: MinimizeResult

    def rows(self):
        r = self.result
        return [["elastic_min", self.functional, r.map.mesh.rings, r.map.mesh.sectors, 0, "", self.value,
                 self.affine_value, self.value - self.affine_value, r.status, r.iterations, r.cone_violation]]


def elastic_min_experiment(functional="W+normpow:q=2", boundary: Mat2 = IDENTITY, rings: int = 48,
                           sectors: int = 96, q: float = 1.0, seed: int = 0, amp: float = 0.05,
                           snap_K: Optional[float] = None, **cfg_kw) -> ElasticReport:
    """Minimize a split + power energy and report coercivity diagnostics.

    The diagnostic pair is int log^q(e + 1/J) and int K^q over the final
    map; no bound between them is asserted.
    """
    spec = parse_functional(functional) if isinstance(functional, str) else functional
    cfg = EnergyConfig(spec, **cfg_kw)
    mesh = polar_disk_mesh(rings, sectors)
    energy = assemble_energy(mesh, cfg, boundary)
    rng = np.random.default_rng(seed)
    init = affine_map(mesh, boundary, smooth_perturbation(mesh, rng, amp) if amp > 0 else None)
    res = minimize(energy, init)
    ap, am = mesh.gradients(res.map.values)
    if snap_K is not None:
        ap, am = snap_to_cone(ap, am, snap_K)
    J = np.abs(ap) ** 2 - np.abs(am) ** 2
    Kt = triangle_distortion(mesh, res.map.values)
    with np.errstate(all="ignore"):
        logJ = np.where(J > 0, np.log(math.e + 1 / np.where(J > 0, J, 1.0)) ** q, np.inf)
    return ElasticReport(format_functional(spec), res.value, mesh.area * evaluate(spec, boundary).value,
                         float(np.max(Kt)), float(np.sum(mesh.areas * logJ)), float(np.sum(mesh.areas * Kt ** q)),
                         q, res.monotone(), res)
