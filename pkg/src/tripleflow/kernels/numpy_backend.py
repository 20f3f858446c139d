"""Stencil kernels, numpy slicing edition.

Every function here takes ghosted arrays (see tripleflow.grid for the layout)
and returns freshly allocated interior-sized results.  Ghost values must be
current before calling; none of these functions fill ghosts.

Index bookkeeping, shared by all kernels: a cell-centered array stores cell
``i`` at row ``i`` (interior ``1..nx``); an x-face array stores face ``f`` at
row ``f`` (interior ``1..fx``) where face ``f`` sits between cells ``f - 1``
and ``f``.  Cell ``i`` is therefore bounded by faces ``i`` and ``i + 1``.
The expressions below are valid for both the wall (fx = nx + 1) and periodic
(fx = nx) face counts; the periodic wrap lives in the ghost slots.
"""

from __future__ import annotations

import numpy as np


def laplacian(u, inv_hx2, inv_hy2, nx, ny):
    """Five-point Laplacian on the interior cells."""
    c = u[1 : nx + 1, 1 : ny + 1]
    return (u[2 : nx + 2, 1 : ny + 1] - 2.0 * c + u[0:nx, 1 : ny + 1]) * inv_hx2 + (
        u[1 : nx + 1, 2 : ny + 2] - 2.0 * c + u[1 : nx + 1, 0:ny]
    ) * inv_hy2


def div_faces(fxa, fya, inv_hx, inv_hy, nx, ny):
    """Divergence of a MAC face field, cell by cell."""
    return (fxa[2 : nx + 2, 1 : ny + 1] - fxa[1 : nx + 1, 1 : ny + 1]) * inv_hx + (
        fya[1 : nx + 1, 2 : ny + 2] - fya[1 : nx + 1, 1 : ny + 1]
    ) * inv_hy


def grad_x_faces(u, inv_hx, nx, ny):
    """d/dx of a centered field at face slots ``1..nx+1``; shape (nx+1, ny)."""
    return (u[1 : nx + 2, 1 : ny + 1] - u[0 : nx + 1, 1 : ny + 1]) * inv_hx


def grad_y_faces(u, inv_hy, nx, ny):
    return (u[1 : nx + 1, 1 : ny + 2] - u[1 : nx + 1, 0 : ny + 1]) * inv_hy


def avg_x_faces(u, nx, ny):
    """Arithmetic mean of a centered field at face slots ``1..nx+1``."""
    return 0.5 * (u[1 : nx + 2, 1 : ny + 1] + u[0 : nx + 1, 1 : ny + 1])


def avg_y_faces(u, nx, ny):
    return 0.5 * (u[1 : nx + 1, 1 : ny + 2] + u[1 : nx + 1, 0 : ny + 1])


def varcoef_poisson_apply(p, bx, by, inv_hx2, inv_hy2, nx, ny):
    """div(b grad p) with face coefficients ``bx``, ``by`` (ghosted shapes)."""
    flux_x = bx[1 : nx + 2, 1 : ny + 1] * (
        p[1 : nx + 2, 1 : ny + 1] - p[0 : nx + 1, 1 : ny + 1]
    )
    flux_y = by[1 : nx + 1, 1 : ny + 2] * (
        p[1 : nx + 1, 1 : ny + 2] - p[1 : nx + 1, 0 : ny + 1]
    )
    return (flux_x[1 : nx + 1, :] - flux_x[0:nx, :]) * inv_hx2 + (
        flux_y[:, 1 : ny + 1] - flux_y[:, 0:ny]
    ) * inv_hy2


def visc_apply(vx, vy, gam_c, gam_n, inv_hx, inv_hy, nx, ny, fx, fy):
    """Negative divergence of the symmetric viscous stress, both components.

    ``gam_c`` is the viscosity at cell centers (ghosted), ``gam_n`` the
    four-cell average at nodes, stored at ``gam_n[f, jn]`` for node
    ``(f, jn)`` with ``f in 1..nx+1``, ``jn in 1..ny+1``.  Returns
    ``(ax, ay)`` with shapes ``(fx, ny)`` and ``(nx, fy)`` covering the
    interior face slots; pinned faces get a value too and the caller masks.
    """
    # normal stresses at cell centers (one ghost center each side along the
    # differencing axis)
    txx = (
        2.0
        * gam_c[0 : fx + 1, 1 : ny + 1]
        * (vx[1 : fx + 2, 1 : ny + 1] - vx[0 : fx + 1, 1 : ny + 1])
        * inv_hx
    )
    tyy = (
        2.0
        * gam_c[1 : nx + 1, 0 : fy + 1]
        * (vy[1 : nx + 1, 1 : fy + 2] - vy[1 : nx + 1, 0 : fy + 1])
        * inv_hy
    )
    # shear stress at all nodes (f = 1..nx+1, jn = 1..ny+1)
    txy = gam_n[1 : nx + 2, 1 : ny + 2] * (
        (vx[1 : nx + 2, 1 : ny + 2] - vx[1 : nx + 2, 0 : ny + 1]) * inv_hy
        + (vy[1 : nx + 2, 1 : ny + 2] - vy[0 : nx + 1, 1 : ny + 2]) * inv_hx
    )
    ax = -(txx[1 : fx + 1, :] - txx[0:fx, :]) * inv_hx - (
        txy[0:fx, 1 : ny + 1] - txy[0:fx, 0:ny]
    ) * inv_hy
    ay = -(tyy[:, 1 : fy + 1] - tyy[:, 0:fy]) * inv_hy - (
        txy[1 : nx + 1, 0:fy] - txy[0:nx, 0:fy]
    ) * inv_hx
    return ax, ay
