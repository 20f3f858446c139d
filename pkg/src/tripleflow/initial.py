"""Initial-condition builders.

All interface profiles use the equilibrium shape 0.5 (1 + tanh(3 d / eps))
where ``d`` is a signed distance (positive inside the region).  Composite
states are assembled so the partition of unity holds exactly: the solid
indicator claims its share first and fluid 2 takes its share of the rest.
"""

from __future__ import annotations

import numpy as np

from .errors import BadInitialSpec
from .fields import ScalarField
from .grid import Grid2D


def tanh_profile(signed_distance: np.ndarray, eps: float) -> np.ndarray:
    """Equilibrium interface profile, 1 inside (d > 0), 0 outside."""
    return 0.5 * (1.0 + np.tanh(3.0 * np.asarray(signed_distance) / eps))


def centers(grid: Grid2D) -> tuple[np.ndarray, np.ndarray]:
    """Interior cell-center coordinate meshgrids, shape (nx, ny)."""
    return np.meshgrid(grid.xc()[1:-1], grid.yc()[1:-1], indexing="ij")


def distance_halfplane(coord: np.ndarray, position: float, side: str = "above") -> np.ndarray:
    """Signed distance to a half plane bounded by ``coord = position``."""
    d = np.asarray(coord) - position
    if side == "above":
        return d
    if side == "below":
        return -d
    raise BadInitialSpec(f"halfplane side must be 'above' or 'below', got {side!r}")


def distance_disk(
    x: np.ndarray, y: np.ndarray, center: tuple[float, float], radius: float
) -> np.ndarray:
    """Signed distance to a disk, positive inside."""
    if radius <= 0.0:
        raise BadInitialSpec(f"disk radius must be positive, got {radius}")
    return radius - np.hypot(x - center[0], y - center[1])


def distance_slab(coord: np.ndarray, lo: float, hi: float) -> np.ndarray:
    """Signed distance to the band lo < coord < hi, positive inside."""
    if hi <= lo:
        raise BadInitialSpec(f"slab needs lo < hi, got [{lo}, {hi}]")
    c = np.asarray(coord)
    return np.minimum(c - lo, hi - c)


def compose_phases(
    grid: Grid2D,
    solid: np.ndarray | float = 0.0,
    fluid2: np.ndarray | float = 0.0,
) -> tuple[ScalarField, ScalarField, ScalarField]:
    """Build (phi1, phi2, phi3) from indicator fields over cell centers.

    ``solid`` becomes phi3 directly; ``fluid2`` is the fraction of the
    remaining volume taken by fluid 2, so overlapping indicators cannot
    break the partition.  Inputs must live in [0, 1] on the interior grid.
    """
    shape = (grid.nx, grid.ny)
    s = np.broadcast_to(np.asarray(solid, dtype=float), shape).copy()
    f2 = np.broadcast_to(np.asarray(fluid2, dtype=float), shape).copy()
    for name, a in (("solid", s), ("fluid2", f2)):
        if not np.all(np.isfinite(a)):
            raise BadInitialSpec(f"{name} indicator has non-finite entries")
        if a.min() < -1e-12 or a.max() > 1.0 + 1e-12:
            raise BadInitialSpec(
                f"{name} indicator leaves [0, 1]: range [{a.min():.3e}, {a.max():.3e}]"
            )
    np.clip(s, 0.0, 1.0, out=s)
    np.clip(f2, 0.0, 1.0, out=f2)

    p3 = ScalarField.zeros(grid)
    p2 = ScalarField.zeros(grid)
    p1 = ScalarField.zeros(grid)
    p3.interior[...] = s
    p2.interior[...] = (1.0 - s) * f2
    p1.interior[...] = 1.0 - p2.interior - p3.interior
    return p1, p2, p3


def uniform_concentration(grid: Grid2D, value: float) -> ScalarField:
    if value < 0.0:
        raise BadInitialSpec(f"concentration must be nonnegative, got {value}")
    c = ScalarField.full(grid, value)
    return c
