# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twins of the numpy stencil kernels.

Semantics and index bookkeeping are documented once in ``numpy_backend.py``;
the two implementations must stay interchangeable (the test suite diffs them
on random inputs).
"""

import numpy as np


def laplacian(double[:, ::1] u, double inv_hx2, double inv_hy2, int nx, int ny):
    out_np = np.empty((nx, ny))
    cdef double[:, ::1] out = out_np
    cdef int i, j
    for i in range(1, nx + 1):
        for j in range(1, ny + 1):
            out[i - 1, j - 1] = (
                (u[i + 1, j] - 2.0 * u[i, j] + u[i - 1, j]) * inv_hx2
                + (u[i, j + 1] - 2.0 * u[i, j] + u[i, j - 1]) * inv_hy2
            )
    return out_np


def div_faces(double[:, ::1] fxa, double[:, ::1] fya, double inv_hx, double inv_hy,
              int nx, int ny):
    out_np = np.empty((nx, ny))
    cdef double[:, ::1] out = out_np
    cdef int i, j
    for i in range(1, nx + 1):
        for j in range(1, ny + 1):
            out[i - 1, j - 1] = (
                (fxa[i + 1, j] - fxa[i, j]) * inv_hx
                + (fya[i, j + 1] - fya[i, j]) * inv_hy
            )
    return out_np


def grad_x_faces(double[:, ::1] u, double inv_hx, int nx, int ny):
    out_np = np.empty((nx + 1, ny))
    cdef double[:, ::1] out = out_np
    cdef int f, j
    for f in range(1, nx + 2):
        for j in range(1, ny + 1):
            out[f - 1, j - 1] = (u[f, j] - u[f - 1, j]) * inv_hx
    return out_np


def grad_y_faces(double[:, ::1] u, double inv_hy, int nx, int ny):
    out_np = np.empty((nx, ny + 1))
    cdef double[:, ::1] out = out_np
    cdef int i, f
    for i in range(1, nx + 1):
        for f in range(1, ny + 2):
            out[i - 1, f - 1] = (u[i, f] - u[i, f - 1]) * inv_hy
    return out_np


def avg_x_faces(double[:, ::1] u, int nx, int ny):
    out_np = np.empty((nx + 1, ny))
    cdef double[:, ::1] out = out_np
    cdef int f, j
    for f in range(1, nx + 2):
        for j in range(1, ny + 1):
            out[f - 1, j - 1] = 0.5 * (u[f, j] + u[f - 1, j])
    return out_np


def avg_y_faces(double[:, ::1] u, int nx, int ny):
    out_np = np.empty((nx, ny + 1))
    cdef double[:, ::1] out = out_np
    cdef int i, f
    for i in range(1, nx + 1):
        for f in range(1, ny + 2):
            out[i - 1, f - 1] = 0.5 * (u[i, f] + u[i, f - 1])
    return out_np


def varcoef_poisson_apply(double[:, ::1] p, double[:, ::1] bx, double[:, ::1] by,
                          double inv_hx2, double inv_hy2, int nx, int ny):
    out_np = np.empty((nx, ny))
    cdef double[:, ::1] out = out_np
    cdef int i, j
    cdef double fe, fw, fn, fs
    for i in range(1, nx + 1):
        for j in range(1, ny + 1):
            fe = bx[i + 1, j] * (p[i + 1, j] - p[i, j])
            fw = bx[i, j] * (p[i, j] - p[i - 1, j])
            fn = by[i, j + 1] * (p[i, j + 1] - p[i, j])
            fs = by[i, j] * (p[i, j] - p[i, j - 1])
            out[i - 1, j - 1] = (fe - fw) * inv_hx2 + (fn - fs) * inv_hy2
    return out_np


def visc_apply(double[:, ::1] vx, double[:, ::1] vy, double[:, ::1] gam_c,
               double[:, ::1] gam_n, double inv_hx, double inv_hy,
               int nx, int ny, int fx, int fy):
    ax_np = np.empty((fx, ny))
    ay_np = np.empty((nx, fy))
    txx_np = np.empty((fx + 1, ny))
    tyy_np = np.empty((nx, fy + 1))
    txy_np = np.empty((nx + 1, ny + 1))
    cdef double[:, ::1] ax = ax_np
    cdef double[:, ::1] ay = ay_np
    cdef double[:, ::1] txx = txx_np
    cdef double[:, ::1] tyy = tyy_np
    cdef double[:, ::1] txy = txy_np
    cdef int i, j, f, g, m, n
    for m in range(0, fx + 1):
        for j in range(1, ny + 1):
            txx[m, j - 1] = 2.0 * gam_c[m, j] * (vx[m + 1, j] - vx[m, j]) * inv_hx
    for i in range(1, nx + 1):
        for n in range(0, fy + 1):
            tyy[i - 1, n] = 2.0 * gam_c[i, n] * (vy[i, n + 1] - vy[i, n]) * inv_hy
    for f in range(1, nx + 2):
        for g in range(1, ny + 2):
            txy[f - 1, g - 1] = gam_n[f, g] * (
                (vx[f, g] - vx[f, g - 1]) * inv_hy
                + (vy[f, g] - vy[f - 1, g]) * inv_hx
            )
    for f in range(1, fx + 1):
        for j in range(1, ny + 1):
            ax[f - 1, j - 1] = (
                -(txx[f, j - 1] - txx[f - 1, j - 1]) * inv_hx
                - (txy[f - 1, j] - txy[f - 1, j - 1]) * inv_hy
            )
    for i in range(1, nx + 1):
        for g in range(1, fy + 1):
            ay[i - 1, g - 1] = (
                -(tyy[i - 1, g] - tyy[i - 1, g - 1]) * inv_hy
                - (txy[i, g - 1] - txy[i - 1, g - 1]) * inv_hx
            )
    return ax_np, ay_np
