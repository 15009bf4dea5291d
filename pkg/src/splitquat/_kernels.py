"""Compiled inner loops for the quadrature hot path."""

import numba
import numpy as np


@numba.njit(cache=True)
def qmul_rows(a, b):
    n = a.shape[0]
    out = np.empty((n, 4), np.complex128)
    for i in range(n):
        a0, a1, a2, a3 = a[i, 0], a[i, 1], a[i, 2], a[i, 3]
        b0, b1, b2, b3 = b[i, 0], b[i, 1], b[i, 2], b[i, 3]
        out[i, 0] = a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3
        out[i, 1] = a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2
        out[i, 2] = a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1
        out[i, 3] = a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0
    return out


@numba.njit(cache=True)
def dz_rows(t):
    """Dz on frames ``(n, 3, 4)``: component i is the signed minor without column i."""
    n = t.shape[0]
    out = np.empty((n, 4), np.complex128)
    for i in range(n):
        a = t[i, 0]
        b = t[i, 1]
        c = t[i, 2]
        # 2x2 minors of rows b, c
        m01 = b[0] * c[1] - b[1] * c[0]
        m02 = b[0] * c[2] - b[2] * c[0]
        m03 = b[0] * c[3] - b[3] * c[0]
        m12 = b[1] * c[2] - b[2] * c[1]
        m13 = b[1] * c[3] - b[3] * c[1]
        m23 = b[2] * c[3] - b[3] * c[2]
        out[i, 0] = a[1] * m23 - a[2] * m13 + a[3] * m12
        out[i, 1] = -(a[0] * m23 - a[2] * m03 + a[3] * m02)
        out[i, 2] = a[0] * m13 - a[1] * m03 + a[3] * m01
        out[i, 3] = -(a[0] * m12 - a[1] * m02 + a[2] * m01)
    return out


@numba.njit(cache=True)
def hopf_frame(u, r, c):
    """Points and tangents of the HR sphere chart at parameters ``u`` (n, 3)."""
    n = u.shape[0]
    z = np.empty((n, 4), np.complex128)
    t = np.zeros((n, 3, 4), np.complex128)
    # nested rules repeat the outer parameters along rows; reuse their trig
    last0, last1 = np.nan, np.nan
    ct = st = cp = sp = 0.0
    for i in range(n):
        if u[i, 0] != last0:
            last0 = u[i, 0]
            ct, st = np.cos(last0), np.sin(last0)
        if u[i, 1] != last1:
            last1 = u[i, 1]
            cp, sp = np.cos(last1), np.sin(last1)
        cs, ss = np.cos(u[i, 2]), np.sin(u[i, 2])
        z0 = r * ct * cp
        z1 = 1j * (r * st * ss)
        z2 = -1j * (r * st * cs)
        z3 = r * ct * sp
        z[i, 0] = z0 + c[0]
        z[i, 1] = z1 + c[1]
        z[i, 2] = z2 + c[2]
        z[i, 3] = z3 + c[3]
        t[i, 0, 0] = -r * st * cp
        t[i, 0, 1] = 1j * (r * ct * ss)
        t[i, 0, 2] = -1j * (r * ct * cs)
        t[i, 0, 3] = -r * st * sp
        t[i, 1, 0] = -z3
        t[i, 1, 3] = z0
        t[i, 2, 1] = -z2
        t[i, 2, 2] = z1
    return z, t


@numba.njit(cache=True)
def deform_frame(z, t, eps, z0):
    """Apply Z -> Z + i eps (Z - z0)^- to points and tangents in place."""
    ie = 1j * eps
    n = z.shape[0]
    for i in range(n):
        for k in range(4):
            s = 1.0 if (k == 0 or k == 3) else -1.0
            z[i, k] = z[i, k] + ie * s * (z[i, k] - z0[k])
            for j in range(3):
                t[i, j, k] = t[i, j, k] * (1.0 + ie * s)
    return z, t
