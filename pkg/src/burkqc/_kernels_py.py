"""Pure numpy triangle energy/gradient assembly (fallback for the C kernel).

Each term is a row (code, param, weight). Densities are functions of the
smoothed moduli s+ = sqrt(|a+|^2 + eps^2), s- = sqrt(|a-|^2 + eps^2), with
n = s+ + s- standing in for the operator norm and d = s+^2 - s-^2 = det.
"""
import numpy as np

BURKHOLDER, DET, NORMPOW, DIRICHLET, W, WTILDE, F, ECEXTRA, CONST = range(9)

CODE_NAMES = {BURKHOLDER: "burkholder", DET: "det", NORMPOW: "normpow", DIRICHLET: "dirichlet",
              W: "W", WTILDE: "Wtilde", F: "F", ECEXTRA: "ec-extra", CONST: "const"}


def density(code, prm, sp, sm):
    """Value and partial derivatives (d/ds+, d/ds-) of one density term."""
    n = sp + sm
    d = (sp - sm) * (sp + sm)
    dd_p, dd_m = 2 * sp, -2 * sm
    with np.errstate(all="ignore"):
        if code == BURKHOLDER:
            p = prm
            core = (p - 1) * sm - sp
            v = n ** (p - 1) * core
            g = (p - 1) * n ** (p - 2) * core
            return v, g - n ** (p - 1), g + (p - 1) * n ** (p - 1)
        if code == DET:
            return d, dd_p, dd_m
        if code == NORMPOW:
            q = prm
            g = q * n ** (q - 1)
            return n ** q, g, g
        if code == DIRICHLET:
            return 2 * (sp * sp + sm * sm), 4 * sp, 4 * sm
        if code in (W, WTILDE):
            pos = d > 0
            ds = np.where(pos, d, 1.0)
            ld = np.log(ds)
            if code == W:
                v = n * n / ds - 2 * np.log(n) + 2 * ld
                dpsi = 2 / ds
            else:
                v = n * n / ds - 2 * np.log(n) + ld + np.abs(ld)
                dpsi = (1 + np.sign(ld)) / ds
            base = 2 * n / ds - 2 / n
            gp = base - n * n * dd_p / ds**2 + dpsi * dd_p
            gm = base - n * n * dd_m / ds**2 + dpsi * dd_m
            return np.where(pos, v, np.inf), np.where(pos, gp, 0.0), np.where(pos, gm, 0.0)
        if code == F:
            nz = n > 0
            ns = np.where(nz, n, 1.0)
            L = 1 + 2 * np.log(ns)
            v = ns * ns - L * d
            base = 2 * ns - 2 * d / ns
            return (np.where(nz, v, 0.0), np.where(nz, base - L * dd_p, 0.0),
                    np.where(nz, base - L * dd_m, 0.0))
        if code == ECEXTRA:
            c = prm
            pos = d > 0
            ds = np.where(pos, d, 1.0)
            u = 1 / ds + n * n
            v = c * u * u
            gp = 2 * c * u * (-dd_p / ds**2 + 2 * n)
            gm = 2 * c * u * (-dd_m / ds**2 + 2 * n)
            return np.where(pos, v, np.inf), np.where(pos, gp, 0.0), np.where(pos, gm, 0.0)
        if code == CONST:
            z = np.zeros_like(sp)
            return z + prm, z, z
    raise ValueError(f"unknown density code {code}")


def triangle_gradients(w, tri, alpha, beta):
    ap = np.einsum("tk,tk->t", alpha, w[tri])
    am = np.einsum("tk,tk->t", beta, w[tri])
    return ap, am


def energy_grad(w, tri, alpha, beta, area, terms, eps, cone_K, cone_w, want_grad=True, extra=None):
    """Total energy and gradient 2 dE/d conj(w) per node.

    ``extra`` is an optional callable (sp, sm) -> (v, gp, gm) for densities
    without a code (user split energies).
    """
    ap, am = triangle_gradients(w, tri, alpha, beta)
    sp = np.sqrt(np.abs(ap) ** 2 + eps * eps)
    sm = np.sqrt(np.abs(am) ** 2 + eps * eps)
    v = np.zeros_like(sp)
    gp = np.zeros_like(sp)
    gm = np.zeros_like(sp)
    for code, prm, wt in terms:
        a, b, c = density(int(code), prm, sp, sm)
        v = v + wt * a
        gp = gp + wt * b
        gm = gm + wt * c
    if extra is not None:
        a, b, c = extra(sp, sm)
        v, gp, gm = v + a, gp + b, gm + c
    if cone_w > 0:
        n = sp + sm
        d = (sp - sm) * (sp + sm)
        viol = np.maximum(0.0, n * n - cone_K * d)
        v = v + cone_w * viol * viol
        gp = gp + 2 * cone_w * viol * (2 * n - cone_K * 2 * sp)
        gm = gm + 2 * cone_w * viol * (2 * n + cone_K * 2 * sm)
    if np.any(np.isinf(v)):
        return np.inf, None
    E = float(np.sum(area * v))
    if not want_grad:
        return E, None
    cp = area * gp * np.where(sp > 0, ap / np.where(sp > 0, sp, 1.0), 0.0)
    cm = area * gm * np.where(sm > 0, am / np.where(sm > 0, sm, 1.0), 0.0)
    contrib = cp[:, None] * np.conj(alpha) + cm[:, None] * np.conj(beta)
    nv = w.shape[0]
    idx = tri.ravel()
    flat = contrib.ravel()
    g = np.bincount(idx, flat.real, nv) + 1j * np.bincount(idx, flat.imag, nv)
    return E, g
