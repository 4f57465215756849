"""Polar-structured triangulations of the unit disk and piecewise-affine maps."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np

from ..algebra import Mat2


@dataclass
class DiskMesh:
    vertices: np.ndarray     # complex, shape (V,)
    triangles: np.ndarray    # int64, shape (T, 3), counter-clockwise
    boundary: np.ndarray     # indices of vertices on |z| = 1
    rings: int = 0
    sectors: int = 0
    alpha: np.ndarray = field(init=False, repr=False)
    beta: np.ndarray = field(init=False, repr=False)
    areas: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.vertices = np.asarray(self.vertices, dtype=complex)
        self.triangles = np.ascontiguousarray(self.triangles, dtype=np.int64)
        z = self.vertices[self.triangles]
        e1 = z[:, 1] - z[:, 0]
        e2 = z[:, 2] - z[:, 0]
        cross = (np.conj(e1) * e2).imag
        if np.any(cross <= 0):
            raise ValueError("mesh has inverted or degenerate reference triangles")
        self.areas = cross / 2
        # a+ = sum alpha_k w_k, a- = sum beta_k w_k for the affine interpolant
        D = e1 * np.conj(e2) - np.conj(e1) * e2
        a1, a2 = np.conj(e2) / D, -np.conj(e1) / D
        b1, b2 = -e2 / D, e1 / D
        self.alpha = np.ascontiguousarray(np.stack([-(a1 + a2), a1, a2], axis=1))
        self.beta = np.ascontiguousarray(np.stack([-(b1 + b2), b1, b2], axis=1))
        mask = np.ones(len(self.vertices), bool)
        mask[self.boundary] = False
        self.interior = np.nonzero(mask)[0]

    @property
    def area(self) -> float:
        return float(np.sum(self.areas))

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_triangles(self) -> int:
        return len(self.triangles)

    def gradients(self, w: np.ndarray):
        """Per-triangle conformal coordinates (a+, a-) of the interpolant of w."""
        wt = w[self.triangles]
        return np.einsum("tk,tk->t", self.alpha, wt), np.einsum("tk,tk->t", self.beta, wt)


def polar_disk_mesh(rings: int = 48, sectors: int = 96) -> DiskMesh:
    """Centre vertex plus `rings` circles of `sectors` equally spaced vertices."""
    if rings < 1 or sectors < 3:
        raise ValueError("need rings >= 1 and sectors >= 3")
    th = 2 * np.pi * np.arange(sectors) / sectors
    unit = np.exp(1j * th)
    verts = [np.array([0j])]
    for k in range(1, rings + 1):
        verts.append((k / rings) * unit)
    verts[-1] = unit  # exact unit circle
    V = np.concatenate(verts)

    def idx(k, j):
        return 1 + (k - 1) * sectors + (j % sectors)

    tris = []
    for j in range(sectors):
        tris.append((0, idx(1, j), idx(1, j + 1)))
    for k in range(1, rings):
        for j in range(sectors):
            a, b = idx(k, j), idx(k, j + 1)
            c, d = idx(k + 1, j), idx(k + 1, j + 1)
            tris.append((a, c, d))
            tris.append((a, d, b))
    boundary = np.array([idx(rings, j) for j in range(sectors)])
    return DiskMesh(V, np.array(tris), boundary, rings, sectors)


def polygon_area(sectors: int) -> float:
    return sectors / 2 * np.sin(2 * np.pi / sectors)


BoundarySpec = Union[Mat2, Callable]


def boundary_values(mesh: DiskMesh, boundary: BoundarySpec) -> np.ndarray:
    z = mesh.vertices[mesh.boundary]
    if isinstance(boundary, Mat2):
        return boundary(z)
    return np.asarray(boundary(z), dtype=complex)


@dataclass
class DiscreteMap:
    values: np.ndarray
    mesh: DiskMesh
    frozen: bool = True
    trace: Optional[np.ndarray] = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex).copy()
        if self.trace is None:
            self.trace = self.values[self.mesh.boundary].copy()
        if self.frozen:
            self.values[self.mesh.boundary] = self.trace

    def gradients(self):
        return self.mesh.gradients(self.values)

    def respects_trace(self) -> bool:
        return bool(np.array_equal(self.values[self.mesh.boundary], self.trace))


def affine_map(mesh: DiskMesh, A: Mat2, perturbation: Optional[np.ndarray] = None) -> DiscreteMap:
    vals = A(mesh.vertices)
    if perturbation is not None:
        vals = vals + perturbation
    return DiscreteMap(vals, mesh, True, A(mesh.vertices[mesh.boundary]))


def smooth_perturbation(mesh: DiskMesh, rng: np.random.Generator, amp: float = 0.05, modes: int = 3) -> np.ndarray:
    """amp * (1 - |z|^2) * random polynomial in z, conj(z), normalized to max modulus amp."""
    z = mesh.vertices
    c = rng.standard_normal((modes + 1, modes + 1)) + 1j * rng.standard_normal((modes + 1, modes + 1))
    p = np.zeros_like(z)
    for j in range(modes + 1):
        for k in range(modes + 1):
            p = p + c[j, k] * z**j * np.conj(z) ** k
    p = p * (1 - np.abs(z) ** 2)
    p[mesh.boundary] = 0
    return amp * p / np.max(np.abs(p))


def write_mesh(path: str, mesh: DiskMesh, values: Optional[np.ndarray] = None):
    """Plain-text node/element format: counts, then nodes `x y [u v]`, then triangles."""
    with open(path, "w") as fh:
        fh.write(f"{mesh.n_vertices} {mesh.n_triangles} {len(mesh.boundary)}\n")
        for i, z in enumerate(mesh.vertices):
            line = f"{float(z.real)!r} {float(z.imag)!r}"
            if values is not None:
                line += f" {float(values[i].real)!r} {float(values[i].imag)!r}"
            fh.write(line + "\n")
        for t in mesh.triangles:
            fh.write(f"{t[0]} {t[1]} {t[2]}\n")
        fh.write(" ".join(str(b) for b in mesh.boundary) + "\n")


def read_mesh(path: str):
    with open(path) as fh:
        nv, nt, nb = (int(x) for x in fh.readline().split())
        nodes = np.array([[float(x) for x in fh.readline().split()] for _ in range(nv)])
        tris = np.array([[int(x) for x in fh.readline().split()] for _ in range(nt)])
        bnd = np.array([int(x) for x in fh.readline().split()])
    mesh = DiskMesh(nodes[:, 0] + 1j * nodes[:, 1], tris, bnd)
    vals = nodes[:, 2] + 1j * nodes[:, 3] if nodes.shape[1] >= 4 else None
    return mesh, vals
