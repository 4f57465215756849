# cython: boundscheck=False, wraparound=False, cdivision=True
"""C kernel for triangle energy/gradient assembly; mirrors _kernels_py."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, log, pow, fabs, INFINITY

cnp.import_array()

cdef enum:
    BURKHOLDER = 0
    DET = 1
    NORMPOW = 2
    DIRICHLET = 3
    W = 4
    WTILDE = 5
    F = 6
    ECEXTRA = 7
    CONST = 8


cdef inline int density(int code, double prm, double sp, double sm,
                        double* v, double* gp, double* gm) noexcept nogil:
    """Returns 1 when the density is +inf."""
    cdef double n = sp + sm
    cdef double d = (sp - sm) * (sp + sm)
    cdef double ddp = 2 * sp
    cdef double ddm = -2 * sm
    cdef double core, g, q, ld, dpsi, base, L, u
    if code == BURKHOLDER:
        core = (prm - 1) * sm - sp
        q = pow(n, prm - 2)
        g = (prm - 1) * q * core
        q = q * n
        v[0] = q * core
        gp[0] = g - q
        gm[0] = g + (prm - 1) * q
        return 0
    if code == DET:
        v[0] = d
        gp[0] = ddp
        gm[0] = ddm
        return 0
    if code == NORMPOW:
        v[0] = pow(n, prm)
        g = prm * pow(n, prm - 1)
        gp[0] = g
        gm[0] = g
        return 0
    if code == DIRICHLET:
        v[0] = 2 * (sp * sp + sm * sm)
        gp[0] = 4 * sp
        gm[0] = 4 * sm
        return 0
    if code == W or code == WTILDE:
        if d <= 0:
            return 1
        ld = log(d)
        if code == W:
            v[0] = n * n / d - 2 * log(n) + 2 * ld
            dpsi = 2 / d
        else:
            v[0] = n * n / d - 2 * log(n) + ld + fabs(ld)
            if ld > 0:
                dpsi = 2 / d
            elif ld < 0:
                dpsi = 0
            else:
                dpsi = 1 / d
        base = 2 * n / d - 2 / n
        gp[0] = base - n * n * ddp / (d * d) + dpsi * ddp
        gm[0] = base - n * n * ddm / (d * d) + dpsi * ddm
        return 0
    if code == F:
        if n <= 0:
            v[0] = 0
            gp[0] = 0
            gm[0] = 0
            return 0
        L = 1 + 2 * log(n)
        v[0] = n * n - L * d
        base = 2 * n - 2 * d / n
        gp[0] = base - L * ddp
        gm[0] = base - L * ddm
        return 0
    if code == ECEXTRA:
        if d <= 0:
            return 1
        u = 1 / d + n * n
        v[0] = prm * u * u
        gp[0] = 2 * prm * u * (-ddp / (d * d) + 2 * n)
        gm[0] = 2 * prm * u * (-ddm / (d * d) + 2 * n)
        return 0
    v[0] = prm
    gp[0] = 0
    gm[0] = 0
    return 0


def energy_grad(const double complex[::1] w, const long[:, ::1] tri,
                const double complex[:, ::1] alpha, const double complex[:, ::1] beta,
                const double[::1] area, const double[:, ::1] terms,
                double eps, double cone_K, double cone_w, bint want_grad=True, extra=None):
    if extra is not None:
        raise ValueError("the C kernel has no callback densities")
    cdef Py_ssize_t nt = tri.shape[0]
    cdef Py_ssize_t nterm = terms.shape[0]
    cdef Py_ssize_t t, k, j
    cdef double complex ap, am, rp, rm, cp, cm
    cdef double sp, sm, v, gp, gm, tv, tgp, tgm, n, d, viol, wt
    cdef double E = 0.0
    cdef int bad = 0
    g_arr = np.zeros(w.shape[0], dtype=np.complex128)
    cdef double complex[::1] g = g_arr
    with nogil:
        for t in range(nt):
            ap = 0
            am = 0
            for k in range(3):
                ap = ap + alpha[t, k] * w[tri[t, k]]
                am = am + beta[t, k] * w[tri[t, k]]
            sp = sqrt(ap.real * ap.real + ap.imag * ap.imag + eps * eps)
            sm = sqrt(am.real * am.real + am.imag * am.imag + eps * eps)
            v = 0
            gp = 0
            gm = 0
            for j in range(nterm):
                if density(<int>terms[j, 0], terms[j, 1], sp, sm, &tv, &tgp, &tgm):
                    bad = 1
                    break
                wt = terms[j, 2]
                v += wt * tv
                gp += wt * tgp
                gm += wt * tgm
            if bad:
                break
            if cone_w > 0:
                n = sp + sm
                d = (sp - sm) * (sp + sm)
                viol = n * n - cone_K * d
                if viol > 0:
                    v += cone_w * viol * viol
                    gp += 2 * cone_w * viol * (2 * n - cone_K * 2 * sp)
                    gm += 2 * cone_w * viol * (2 * n + cone_K * 2 * sm)
            E += area[t] * v
            if want_grad:
                rp = ap / sp if sp > 0 else 0
                rm = am / sm if sm > 0 else 0
                cp = area[t] * gp * rp
                cm = area[t] * gm * rm
                for k in range(3):
                    g[tri[t, k]] = g[tri[t, k]] + cp * alpha[t, k].conjugate() + cm * beta[t, k].conjugate()
    if bad:
        return INFINITY, None
    if not want_grad:
        return E, None
    return E, g_arr
