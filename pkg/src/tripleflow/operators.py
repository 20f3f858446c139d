"""Discrete operators on MAC fields, plus ghost-cell filling.

The hot solver loops call the raw kernels directly; the field-level wrappers
here are the public face used by diagnostics and tests.  All wrappers fill
ghosts themselves, so inputs only need valid interiors.

Ghost conventions for cell-centered fields:

* ``neumann``: mirror, ``ghost = interior`` (zero normal gradient at the face),
* ``dirichlet``: ``ghost = 2 value - interior`` (value held at the face),
* ``periodic``: wrap-around copy.
"""

from __future__ import annotations

from typing import Mapping

import numpy as np

from . import kernels
from .errors import UnsupportedBC
from .fields import ScalarField, VectorField
from .grid import Grid2D

SIDES = ("left", "right", "bottom", "top")


def scalar_bc_kinds(grid: Grid2D, kind: str = "neumann") -> dict[str, str]:
    """Per-side ghost rules: ``kind`` on solid sides, wrap on periodic ones."""
    out = {}
    for side, tag in grid.bc.as_dict().items():
        out[side] = "periodic" if tag == "periodic" else kind
    return out


def fill_scalar_ghosts(
    a: np.ndarray,
    grid: Grid2D,
    kinds: Mapping[str, str],
    values: Mapping[str, float | np.ndarray] | None = None,
) -> np.ndarray:
    """Fill the ghost ring of ``a`` in place and return it.

    ``values`` supplies the boundary value per Dirichlet side (scalar or a
    1D array over that side's interior cells).  The x sides are done first
    and the y pass sweeps whole columns, so corner ghosts end up with the
    composition of both rules.
    """
    nx, ny = grid.nx, grid.ny
    values = values or {}

    def _value(side):
        v = values.get(side, 0.0)
        return v if np.isscalar(v) else np.asarray(v)

    if grid.periodic_x:
        a[0, :] = a[nx, :]
        a[nx + 1, :] = a[1, :]
    else:
        for side, g, i in (("left", 0, 1), ("right", nx + 1, nx)):
            k = kinds[side]
            if k == "neumann":
                a[g, :] = a[i, :]
            elif k == "dirichlet":
                a[g, 1:-1] = 2.0 * _value(side) - a[i, 1:-1]
            else:
                raise UnsupportedBC(f"scalar ghost kind {k!r} on x side")
    if grid.periodic_y:
        a[:, 0] = a[:, ny]
        a[:, ny + 1] = a[:, 1]
    else:
        for side, g, j in (("bottom", 0, 1), ("top", ny + 1, ny)):
            k = kinds[side]
            if k == "neumann":
                a[:, g] = a[:, j]
            elif k == "dirichlet":
                a[1:-1, g] = 2.0 * _value(side) - a[1:-1, j]
            else:
                raise UnsupportedBC(f"scalar ghost kind {k!r} on y side")
    return a


def apply_bc(
    field: ScalarField,
    kind: str = "neumann",
    values: Mapping[str, float | np.ndarray] | None = None,
) -> ScalarField:
    """Refresh the ghost ring of a scalar field (in place; returns the field)."""
    kinds = scalar_bc_kinds(field.grid, kind)
    if values:
        for side in values:
            if kinds[side] != "periodic":
                kinds[side] = "dirichlet"
    fill_scalar_ghosts(field.data, field.grid, kinds, values)
    return field


def fill_face_ghosts_wrap(grid: Grid2D, fxa: np.ndarray, fya: np.ndarray) -> None:
    """Periodic wrap for face arrays; non-periodic ghost slots get zeros.

    Suitable for flux fields whose boundary-face values are already correct
    (e.g. zero at walls): the divergence never reads the non-periodic ghosts.
    """
    if grid.periodic_x:
        fxa[0, :] = fxa[grid.nx, :]
        fxa[grid.nx + 1, :] = fxa[1, :]
        fya[0, :] = fya[grid.nx, :]
        fya[grid.nx + 1, :] = fya[1, :]
    if grid.periodic_y:
        fxa[:, 0] = fxa[:, grid.ny]
        fxa[:, grid.ny + 1] = fxa[:, 1]
        fya[:, 0] = fya[:, grid.ny]
        fya[:, grid.ny + 1] = fya[:, 1]


# ---- field-level wrappers -----------------------------------------------


def laplacian(f: ScalarField, kind: str = "neumann", values=None) -> ScalarField:
    g = f.grid
    apply_bc(f, kind, values)
    out = ScalarField.zeros(g)
    out.interior[...] = kernels.laplacian(
        f.data, 1.0 / g.hx**2, 1.0 / g.hy**2, g.nx, g.ny
    )
    return out


def grad(f: ScalarField, kind: str = "neumann", values=None) -> VectorField:
    """Face-centered gradient of a cell-centered field."""
    g = f.grid
    apply_bc(f, kind, values)
    out = VectorField.zeros(g)
    gx = kernels.grad_x_faces(f.data, 1.0 / g.hx, g.nx, g.ny)
    gy = kernels.grad_y_faces(f.data, 1.0 / g.hy, g.nx, g.ny)
    out.x[1 : g.fx + 1, 1:-1] = gx[0 : g.fx, :]
    out.y[1:-1, 1 : g.fy + 1] = gy[:, 0 : g.fy]
    fill_face_ghosts_wrap(g, out.x, out.y)
    return out


def div(v: VectorField) -> ScalarField:
    """Cell-centered divergence of a face field (ghosts of ``v`` must be set)."""
    g = v.grid
    out = ScalarField.zeros(g)
    out.interior[...] = kernels.div_faces(v.x, v.y, 1.0 / g.hx, 1.0 / g.hy, g.nx, g.ny)
    return out


def interp_center_to_face(f: ScalarField, kind: str = "neumann", values=None) -> VectorField:
    """Arithmetic two-point average of a centered field onto both face sets."""
    g = f.grid
    apply_bc(f, kind, values)
    out = VectorField.zeros(g)
    ax = kernels.avg_x_faces(f.data, g.nx, g.ny)
    ay = kernels.avg_y_faces(f.data, g.nx, g.ny)
    out.x[1 : g.fx + 1, 1:-1] = ax[0 : g.fx, :]
    out.y[1:-1, 1 : g.fy + 1] = ay[:, 0 : g.fy]
    fill_face_ghosts_wrap(g, out.x, out.y)
    return out


def interp_face_to_center(v: VectorField) -> tuple[ScalarField, ScalarField]:
    """Average each velocity component back to cell centers."""
    g = v.grid
    cx = ScalarField.zeros(g)
    cy = ScalarField.zeros(g)
    cx.interior[...] = 0.5 * (
        v.x[1 : g.nx + 1, 1:-1] + v.x[2 : g.nx + 2, 1:-1]
    )
    cy.interior[...] = 0.5 * (
        v.y[1:-1, 1 : g.ny + 1] + v.y[1:-1, 2 : g.ny + 2]
    )
    return cx, cy
