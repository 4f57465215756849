"""Principal solutions of f_zbar = mu f_z for mu supported in the unit disk.

The plane is truncated to the square [-L, L]^2 sampled at N x N cell centres.
Cauchy and Beurling transforms are aperiodic convolutions computed by
zero-padded FFT. The default kernels are exact cell integrals of 1/(pi z)
and -1/(pi z^2); the pure Fourier multiplier conj(xi)/xi is also available.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np
import scipy.fft as sfft
from scipy.ndimage import gaussian_filter, map_coordinates

from .algebra import PLUS_INFINITY, ExtReal, Mat2
from .functionals import FunctionalSpec, evaluate_array


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get("BURKQC_THREADS", "1")))
    except ValueError:
        return 1


class NonConvergedError(RuntimeError):
    pass


# ----------------------------------------------------------------- grids

@dataclass
class GridField:
    samples: np.ndarray
    L: float

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=complex)
        N = self.samples.shape[0]
        if self.samples.shape != (N, N):
            raise ValueError("grid field must be square")

    @property
    def N(self) -> int:
        return self.samples.shape[0]

    @property
    def h(self) -> float:
        return 2 * self.L / self.N

    def points(self) -> np.ndarray:
        return grid_points(self.N, self.L)


def grid_points(N: int, L: float) -> np.ndarray:
    h = 2 * L / N
    x = -L + h * (np.arange(N) + 0.5)
    X, Y = np.meshgrid(x, x, indexing="xy")
    return X + 1j * Y


def _check_grid(N: int, L: float):
    if N < 8 or N & (N - 1):
        raise ValueError("N must be a power of two >= 8")
    if not L > 1:
        raise ValueError("L must exceed 1")


def _quadrant_area(x, y):
    """Signed area of the unit disk inside the rectangle spanned by (0, 0) and (x, y)."""
    ax, ay = np.minimum(np.abs(x), 1.0), np.minimum(np.abs(y), 1.0)
    t0 = np.sqrt(np.clip(1 - ay * ay, 0, None))  # where the arc crosses height ay
    lo = np.minimum(t0, ax)

    def arc(t):
        return 0.5 * (t * np.sqrt(np.clip(1 - t * t, 0, None)) + np.arcsin(t))

    return np.sign(x) * np.sign(y) * (ay * lo + arc(ax) - arc(lo))


@lru_cache(maxsize=8)
def disk_fraction(N: int, L: float, radius: float = 1.0) -> np.ndarray:
    """Exact fraction of each grid cell covered by the disk |z| < radius."""
    h = 2 * L / N
    e = (-L + h * np.arange(N + 1)) / radius  # cell edges in units of the radius
    G = _quadrant_area(e[None, :], e[:, None])
    out = (G[1:, 1:] - G[1:, :-1] - G[:-1, 1:] + G[:-1, :-1]) * (radius / h) ** 2
    # differencing leaves ~1e-12 cancellation noise; pin cells that miss or lie inside the disk
    lo = np.where(e[:-1] * e[1:] <= 0, 0.0, np.minimum(np.abs(e[:-1]), np.abs(e[1:])))
    hi = np.maximum(np.abs(e[:-1]), np.abs(e[1:]))
    near = lo[None, :] ** 2 + lo[:, None] ** 2
    far = hi[None, :] ** 2 + hi[:, None] ** 2
    out = np.where(near >= 1, 0.0, np.where(far <= 1, 1.0, np.clip(out, 0.0, 1.0)))
    out.setflags(write=False)
    return out


def _cell_kernel(N: int, L: float, kind: str) -> np.ndarray:
    """Exact integrals over each cell of the kernel, offsets -N..N-1 cells."""
    h = 2 * L / N
    k = np.arange(-N, N) * h
    X, Y = np.meshgrid(k, k, indexing="xy")
    c = X + 1j * Y
    ac = np.abs(c)
    u = np.where(ac > 0, c / np.where(ac > 0, ac, 1), 1)
    z11, z01 = c + h / 2 + 1j * h / 2, c - h / 2 + 1j * h / 2
    z10, z00 = c + h / 2 - 1j * h / 2, c - h / 2 - 1j * h / 2

    def lg(z):
        # branch cut points away from the cell, so the cell never straddles it
        return np.log(z / u)

    with np.errstate(all="ignore"):
        if kind == "beurling":
            # antiderivative of 1/z^2 over a rectangle: i log z at the corners
            val = -(1j * ((lg(z11) - lg(z01)) - (lg(z10) - lg(z00)))) / np.pi
        elif kind == "cauchy":
            def g(z):
                return np.where(z == 0, 0, z * lg(z))
            val = -1j * (g(z11) - g(z01) - g(z10) + g(z00)) / np.pi
        else:
            raise ValueError(kind)
    val[N, N] = 0  # principal value of the centre cell (odd kernel)
    return val


@lru_cache(maxsize=8)
def _kernel_hat(N: int, L: float, kind: str) -> np.ndarray:
    K = _cell_kernel(N, L, kind)
    out = sfft.fft2(np.fft.ifftshift(K), workers=default_workers())
    out.setflags(write=False)
    return out


def _padded_convolve(phi: np.ndarray, khat: np.ndarray) -> np.ndarray:
    N = phi.shape[0]
    P = np.zeros((2 * N, 2 * N), complex)
    P[:N, :N] = phi
    w = default_workers()
    return sfft.ifft2(sfft.fft2(P, workers=w) * khat, workers=w)[:N, :N]


def _symbol(n: int) -> np.ndarray:
    k = np.fft.fftfreq(n)
    KX, KY = np.meshgrid(k, k, indexing="xy")
    xi = KX + 1j * KY
    with np.errstate(all="ignore"):
        s = np.where(xi != 0, np.conj(xi) / xi, 0.0)
    return s


def _check_support(phi: GridField, tol: float = 1e-12):
    Z = phi.points()
    out = np.abs(Z) > 1 + phi.h / math.sqrt(2)
    scale = max(np.max(np.abs(phi.samples)), 1e-300)
    if np.any(np.abs(phi.samples[out]) > tol * scale):
        raise ValueError("field is not supported in the unit disk")


def cauchy_transform(phi: GridField, check_support: bool = True) -> GridField:
    """C phi(z) = (1/pi) int phi(w)/(z - w) dm(w)."""
    if check_support:
        _check_support(phi)
    N, L = phi.N, phi.L
    khat = _kernel_hat(N, float(L), "cauchy")
    return GridField(_padded_convolve(phi.samples, khat), L)


def beurling_transform(phi: GridField, method: str = "cell", pad: bool = True) -> GridField:
    """S phi = principal value of -(1/pi) int phi(w)/(z - w)^2 dm(w).

    ``method="cell"`` uses cell-integrated kernels; ``method="multiplier"``
    applies the symbol conj(xi)/xi (zero at xi = 0) on the padded grid, or on
    the periodic N x N grid when ``pad`` is False.
    """
    N, L = phi.N, phi.L
    if method == "cell":
        return GridField(_padded_convolve(phi.samples, _kernel_hat(N, float(L), "beurling")), L)
    if method != "multiplier":
        raise ValueError(f"unknown method {method!r}")
    w = default_workers()
    if not pad:
        return GridField(sfft.ifft2(sfft.fft2(phi.samples, workers=w) * _symbol(N), workers=w), L)
    P = np.zeros((2 * N, 2 * N), complex)
    P[N // 2:N // 2 + N, N // 2:N // 2 + N] = phi.samples
    out = sfft.ifft2(sfft.fft2(P, workers=w) * _symbol(2 * N), workers=w)
    return GridField(out[N // 2:N // 2 + N, N // 2:N // 2 + N], L)


# -------------------------------------------------------------- problems

@dataclass
class BeltramiProblem:
    mu: GridField
    label: str = "mu"

    def __post_init__(self):
        if self.k >= 1:
            raise ValueError("Beltrami coefficient must satisfy max|mu| < 1")

    @property
    def k(self) -> float:
        return float(np.max(np.abs(self.mu.samples)))

    @property
    def K(self) -> float:
        k = self.k
        return (1 + k) / (1 - k)


def _apply_smoothing(values: np.ndarray, N: int, L: float, smoothing: str, inner: float = 0.0):
    Z = grid_points(N, L)
    if smoothing == "fraction":
        frac = disk_fraction(N, L)
        if inner > 0:
            frac = frac - disk_fraction(N, L, inner)
        return values * frac
    r = np.abs(Z)
    chi = ((r < 1) & (r >= inner)).astype(float)
    if smoothing == "none":
        return values * chi
    if smoothing == "gaussian":
        sm = gaussian_filter(chi, sigma=2.0)
        # keep support inside the disk
        sm = np.where(r < 1, sm, 0.0)
        return values * sm
    raise ValueError(f"unknown smoothing {smoothing!r}")


def constant_mu(a: complex, N: int = 512, L: float = 2.0, smoothing: str = "fraction") -> BeltramiProblem:
    _check_grid(N, L)
    vals = np.full((N, N), complex(a))
    return BeltramiProblem(GridField(_apply_smoothing(vals, N, L, smoothing), L), f"const:a={a}")


def radial_alpha_mu(alpha: float, N: int = 512, L: float = 2.0, smoothing: str = "fraction") -> BeltramiProblem:
    """mu of the stretching rho = r^alpha on 1/2 < r < 1 (linear inside, identity outside)."""
    _check_grid(N, L)
    Z = grid_points(N, L)
    with np.errstate(all="ignore"):
        ph = np.where(Z != 0, Z / np.conj(Z), 1.0)
    vals = (alpha - 1) / (alpha + 1) * ph
    return BeltramiProblem(GridField(_apply_smoothing(vals, N, L, smoothing, inner=0.5), L),
                           f"radial:alpha={alpha}")


def smooth_mu_function(rng: np.random.Generator, sup: float = 0.5, degree: int = 3, taper: bool = True):
    """Random polynomial in (x, y) times (1 - |z|^2), scaled to sup norm `sup` on the disk."""
    c = rng.standard_normal((degree + 1, degree + 1)) + 1j * rng.standard_normal((degree + 1, degree + 1))

    def raw(Z):
        X, Y = Z.real, Z.imag
        out = np.zeros(Z.shape, complex)
        for m in range(degree + 1):
            for n in range(degree + 1):
                out += c[m, n] * X**m * Y**n
        if taper:
            out = out * np.clip(1 - np.abs(Z) ** 2, 0, None)
        return out

    xs = np.linspace(-1, 1, 801)
    XX, YY = np.meshgrid(xs, xs)
    ZZ = XX + 1j * YY
    mx = np.max(np.abs(raw(ZZ))[np.abs(ZZ) <= 1])
    return lambda Z: sup * raw(Z) / mx


def function_mu(fn, N: int = 512, L: float = 2.0, smoothing: str = "fraction", label="function") -> BeltramiProblem:
    _check_grid(N, L)
    Z = grid_points(N, L)
    return BeltramiProblem(GridField(_apply_smoothing(fn(Z), N, L, smoothing), L), label)


def random_smooth_mu(rng: np.random.Generator, sup: float = 0.5, N: int = 512, L: float = 2.0,
                     phase: float = 0.0) -> BeltramiProblem:
    fn = smooth_mu_function(rng, sup)
    return function_mu(lambda Z: np.exp(1j * phase) * fn(Z), N, L, label=f"smooth:sup={sup}")


def grid_problem(samples: np.ndarray, L: float) -> BeltramiProblem:
    f = GridField(samples, L)
    _check_grid(f.N, L)
    _check_support(f, 1e-12)
    return BeltramiProblem(f, "file")


# ---------------------------------------------------------------- solver

@dataclass
class LaurentData:
    b: np.ndarray          # b[0] = b_1, ..., b[J-1] = b_J
    positive: np.ndarray   # coefficients of e^{+ij theta}, j = 1..J (should vanish)
    constant: complex
    R: float
    M: int

    @property
    def conformality(self) -> float:
        return float(max(np.max(np.abs(self.positive)), abs(self.constant)))

    @property
    def noise(self) -> float:
        """Noise floor of the raw circle coefficients (largest e^{+ij theta} entry)."""
        return float(np.max(np.abs(self.positive)))

    def denoised(self, factor: float = 3.0) -> np.ndarray:
        """b_j with entries below factor * noise * R^j set to zero (hard threshold).

        Circle coefficients are scaled by R^j, so interpolation noise would
        otherwise dominate the high modes of sum j |b_j|^2.
        """
        j = np.arange(1, len(self.b) + 1)
        keep = np.abs(self.b) > factor * self.noise * self.R ** j
        return np.where(keep, self.b, 0.0)

    def area_sum(self, start: int = 1) -> float:
        """sum_{j >= start} j |b_j|^2 over the denoised coefficients."""
        b = self.denoised()
        j = np.arange(1, len(b) + 1)
        sel = j >= start
        return float(np.sum(j[sel] * np.abs(b[sel]) ** 2))

    def tail_estimate(self, start: int = 2) -> float:
        """Geometric-fit estimate of sum j|b_j|^2 beyond the last resolved mode."""
        a = np.abs(self.denoised())
        idx = np.nonzero(a[start - 1:])[0] + start - 1
        if len(idx) < 3:
            return 0.0
        jj = idx + 1
        q = float(np.exp(np.polyfit(jj, np.log(a[idx]), 1)[0]))
        if q >= 1:
            return math.inf
        last, J = a[idx[-1]], jj[-1]
        j = np.arange(J + 1, J + 400)
        return float(np.sum(j * (last * q ** (j - J)) ** 2))


@dataclass
class PrincipalSolution:
    problem: BeltramiProblem
    f_zbar: GridField
    f_z: GridField
    f: GridField
    iterations: int
    residual: float
    converged: bool
    tol: float
    method: str = "cell"
    laurent: Optional[LaurentData] = None

    @property
    def status(self) -> str:
        return "CONVERGED" if self.converged else "NONCONVERGED"

    @property
    def N(self) -> int:
        return self.f.N

    @property
    def L(self) -> float:
        return self.f.L

    @property
    def mask(self) -> np.ndarray:
        return disk_fraction(self.N, float(self.L))

    @property
    def b1(self) -> complex:
        return complex(self.laurent.b[0])

    @property
    def A_f(self) -> Mat2:
        return Mat2(1.0, self.b1)

    def mean_fzbar(self) -> complex:
        h = self.f.h
        return complex(np.sum(self.f_zbar.samples) * h * h / np.pi)


def solve_principal(problem: BeltramiProblem, tol: float = 1e-10, max_iter: int = 200,
                    method: str = "cell", laurent: bool = True, raise_on_fail: bool = False) -> PrincipalSolution:
    """Neumann iteration w <- mu S w + mu from w = mu."""
    mu = problem.mu
    L = mu.L
    nrm = np.linalg.norm(mu.samples)
    w = mu.samples.copy()
    it = 0
    diff = 0.0
    if nrm == 0:
        it = 1
    else:
        for it in range(1, max_iter + 1):
            Sw = beurling_transform(GridField(w, L), method).samples
            wn = mu.samples * Sw + mu.samples
            diff = float(np.linalg.norm(wn - w) / nrm)
            w = wn
            if diff < tol:
                break
    Sw = beurling_transform(GridField(w, L), method).samples
    fz = 1 + Sw
    residual = 0.0 if nrm == 0 else float(np.linalg.norm(w - mu.samples * fz) / nrm)
    converged = nrm == 0 or diff < tol
    Cw = cauchy_transform(GridField(w, L), check_support=False).samples
    Z = mu.points()
    sol = PrincipalSolution(problem, GridField(w, L), GridField(fz, L), GridField(Z + Cw, L),
                            it, residual, converged, tol, method)
    if not converged and raise_on_fail:
        raise NonConvergedError(f"no convergence after {it} iterations, residual {residual:.3e}")
    if laurent:
        sol.laurent = laurent_coeffs(sol, check=False)
    return sol


def iteration_bound(k: float, tol: float) -> int:
    """ceil(log tol / log k) + 5."""
    if k <= 0:
        return 6
    return int(math.ceil(math.log(tol) / math.log(k))) + 5


def laurent_coeffs(sol: PrincipalSolution, R: float = 1.5, M: int = 1024, J: int = 32,
                   check: bool = True, conformality_tol: float = 1e-2) -> LaurentData:
    """Laurent coefficients of f from samples on |z| = R.

    ``check`` raises when the e^{+ij theta} content exceeds
    max(10 * residual, conformality_tol); bilinear interpolation, not the
    solver residual, sets the floor of that diagnostic.
    """
    L, h = sol.L, sol.f.h
    if not (1 < R <= L - 0.25):
        raise ValueError("need 1 < R <= L - 0.25")
    if M < 4 * J:
        raise ValueError("need M >= 4J")
    th = 2 * np.pi * np.arange(M) / M
    zc = R * np.exp(1j * th)
    ci = (zc.real + L) / h - 0.5
    cj = (zc.imag + L) / h - 0.5
    f = sol.f.samples
    fv = map_coordinates(f.real, [cj, ci], order=1) + 1j * map_coordinates(f.imag, [cj, ci], order=1)
    co = np.fft.fft(fv - zc) / M
    j = np.arange(1, J + 1)
    b = co[-j] * R ** j
    pos = co[j]
    data = LaurentData(b, pos, complex(co[0]), R, M)
    if check and data.conformality > max(10 * sol.residual, conformality_tol):
        raise ValueError(f"conformality diagnostic {data.conformality:.3e} too large")
    return data


def moment_coeffs(sol: PrincipalSolution, J: int = 8) -> np.ndarray:
    """b_j = (1/pi) int f_zbar(w) w^(j-1) dm(w), an independent Laurent oracle."""
    Z = sol.f.points()
    w = sol.f_zbar.samples
    h = sol.f.h
    return np.array([np.sum(w * Z ** (j - 1)) * h * h / np.pi for j in range(1, J + 1)])


def jacobian(sol: PrincipalSolution) -> np.ndarray:
    return np.abs(sol.f_z.samples) ** 2 - np.abs(sol.f_zbar.samples) ** 2


def disk_integral(sol: PrincipalSolution, values: np.ndarray) -> float:
    h = sol.f.h
    return float(np.sum(values * sol.mask) * h * h)


def area_residual(sol: PrincipalSolution) -> float:
    """int_D J_f - pi (1 - sum j |b_j|^2)."""
    return disk_integral(sol, jacobian(sol)) - np.pi * (1 - sol.laurent.area_sum(1))


def disk_mean(E: FunctionalSpec, sol: PrincipalSolution) -> ExtReal:
    """Average of E(Df) over the disk mask; +inf when any covered cell is +inf."""
    vals = evaluate_array(E, sol.f_z.samples, sol.f_zbar.samples)
    m = sol.mask
    if np.any(np.isinf(vals[m > 0])):
        return PLUS_INFINITY
    v = np.where(m > 0, vals, 0.0)
    return ExtReal(float(np.sum(v * m) / np.sum(m)))


def derivative_norm(sol: PrincipalSolution, s: float) -> float:
    """||f_z - 1||_s over the grid (empirical, no bound asserted)."""
    h = sol.f.h
    return float((np.sum(np.abs(sol.f_z.samples - 1) ** s) * h * h) ** (1 / s))


# -------------------------------------------------------------- grid I/O

def read_grid(path: str) -> tuple:
    """Read `N L` header then N*N lines `re im` in row-major order."""
    with open(path) as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise ValueError("grid header must be 'N L'")
        N, L = int(header[0]), float(header[1])
        data = np.loadtxt(fh, ndmin=2)
    if data.shape != (N * N, 2):
        raise ValueError(f"expected {N * N} lines of 're im', got shape {data.shape}")
    return (data[:, 0] + 1j * data[:, 1]).reshape(N, N), L


def write_grid(path: str, field: GridField):
    s = field.samples.ravel()
    with open(path, "w") as fh:
        fh.write(f"{field.N} {float(field.L)!r}\n")
        np.savetxt(fh, np.column_stack([s.real, s.imag]), fmt="%.17g")


def solution_summary(sol: PrincipalSolution) -> dict:
    b = sol.laurent.b
    return {
        "N": sol.N, "L": sol.L, "iterations": sol.iterations, "residual": sol.residual,
        "status": sol.status, "k": sol.problem.k, "method": sol.method,
        "b": [[float(x.real), float(x.imag)] for x in b],
        "conformality": sol.laurent.conformality,
    }
