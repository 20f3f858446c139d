"""Snapshot files: a header line plus seven field blocks in fixed order.

The header is always ASCII (`nx ny hx hy time`); the blocks are either
`%.17g` text rows, which round-trips float64 exactly, or raw little-endian
float64.  Only interior values are stored.  Ghosts, potentials, and face
ghost layers are recomputed on restore, which is possible because every
stored state is a pure function of (phi, c, p, v).
"""

from __future__ import annotations

import numpy as np

from . import phasefield
from .fields import ScalarField, VectorField
from .grid import Grid2D
from .params import ModelParams
from .state import State

FIELD_ORDER = ("phi1", "phi2", "phi3", "c", "p", "vx", "vy")


def _interior_blocks(state: State) -> list[np.ndarray]:
    g = state.grid
    return [
        state.phi[0].interior,
        state.phi[1].interior,
        state.phi[2].interior,
        state.c.interior,
        state.p.interior,
        state.v.x[1 : g.fx + 1, 1:-1],
        state.v.y[1:-1, 1 : g.fy + 1],
    ]


def _block_shapes(grid: Grid2D) -> list[tuple[int, int]]:
    s = (grid.nx, grid.ny)
    return [s, s, s, s, s, (grid.fx, grid.ny), (grid.nx, grid.fy)]


def write_snapshot(path, state: State, binary: bool = False) -> None:
    g = state.grid
    header = f"{g.nx} {g.ny} {g.hx:.17g} {g.hy:.17g} {state.time:.17g}\n"
    if binary:
        with open(path, "wb") as fh:
            fh.write(header.encode("ascii"))
            for block in _interior_blocks(state):
                fh.write(np.ascontiguousarray(block, dtype="<f8").tobytes())
    else:
        with open(path, "w") as fh:
            fh.write(header)
            for block in _interior_blocks(state):
                for row in block:
                    fh.write(" ".join(f"{v:.17g}" for v in row) + "\n")


def read_snapshot(path, grid: Grid2D, params: ModelParams) -> State:
    """Restore a state; header sizes must match the supplied grid."""
    with open(path, "rb") as fh:
        header = fh.readline().decode("ascii").split()
        payload = fh.read()
    nx, ny = int(header[0]), int(header[1])
    hx, hy, time = float(header[2]), float(header[3]), float(header[4])
    if nx != grid.nx or ny != grid.ny:
        raise ValueError(
            f"snapshot is {nx}x{ny} but the grid is {grid.nx}x{grid.ny}"
        )
    if abs(hx - grid.hx) > 1e-12 * grid.hx or abs(hy - grid.hy) > 1e-12 * grid.hy:
        raise ValueError("snapshot cell size disagrees with the grid")

    shapes = _block_shapes(grid)
    count = sum(a * b for a, b in shapes)
    if len(payload) == 8 * count:
        flat = np.frombuffer(payload, dtype="<f8").astype(np.float64)
    else:
        flat = np.array(payload.decode("ascii").split(), dtype=np.float64)
        if flat.size != count:
            raise ValueError(
                f"snapshot holds {flat.size} values, expected {count}"
            )
    blocks = []
    at = 0
    for a, b in shapes:
        blocks.append(flat[at : at + a * b].reshape(a, b))
        at += a * b

    state = State.zeros(grid)
    for k in range(3):
        state.phi[k].interior[...] = blocks[k]
    state.c.interior[...] = blocks[3]
    state.p.interior[...] = blocks[4]
    state.v.x[1 : grid.fx + 1, 1:-1] = blocks[5]
    state.v.y[1:-1, 1 : grid.fy + 1] = blocks[6]

    mu = phasefield.chemical_potentials(state.phi, params)
    return State(
        grid=grid,
        phi=state.phi,
        mu=mu,
        c=state.c,
        p=state.p,
        v=state.v,
        time=time,
    )
