"""Uniform staggered (MAC) grid.

Array layout, used everywhere in the package:

* index order is ``[i, j]`` with ``i`` along x and ``j`` along y,
* cell-centered arrays have shape ``(nx + 2, ny + 2)``: one ghost ring,
  interior cells at ``[1:nx+1, 1:ny+1]``, cell ``(i, j)`` centered at
  ``origin + ((i - 0.5) hx, (j - 0.5) hy)``,
* x-normal velocities live on vertical faces, y-normal on horizontal faces.
  A non-periodic axis of ``n`` cells has ``n + 1`` faces (the two boundary
  faces included); a periodic axis has ``n`` distinct faces.  Face arrays
  also carry one ghost layer on each side, so e.g. ``vx`` has shape
  ``(fx + 2, ny + 2)`` with interior faces at ``1..fx`` and face ``f``
  sitting at ``x = origin_x + (f - 1) hx``.

Boundary tags are per side: ``wall``, ``inflow``, ``outflow`` or
``periodic`` (the latter must be used on both sides of the axis).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import UnsupportedBC

BC_KINDS = ("wall", "inflow", "outflow", "periodic")


@dataclass(frozen=True)
class BoxBC:
    """Boundary tag for each of the four sides."""

    left: str = "wall"
    right: str = "wall"
    bottom: str = "wall"
    top: str = "wall"

    def __post_init__(self):
        for side, tag in self.as_dict().items():
            if tag not in BC_KINDS:
                raise UnsupportedBC(f"unknown bc tag {tag!r} on side {side!r}")
        if (self.left == "periodic") != (self.right == "periodic"):
            raise UnsupportedBC("periodic bc must be set on both x sides")
        if (self.bottom == "periodic") != (self.top == "periodic"):
            raise UnsupportedBC("periodic bc must be set on both y sides")

    def as_dict(self) -> dict[str, str]:
        return {
            "left": self.left,
            "right": self.right,
            "bottom": self.bottom,
            "top": self.top,
        }


@dataclass(frozen=True)
class Grid2D:
    nx: int
    ny: int
    hx: float
    hy: float
    origin: tuple[float, float] = (0.0, 0.0)
    bc: BoxBC = field(default_factory=BoxBC)

    def __post_init__(self):
        if self.nx < 4 or self.ny < 4:
            raise UnsupportedBC(f"grid must be at least 4x4, got {self.nx}x{self.ny}")
        if self.hx <= 0.0 or self.hy <= 0.0:
            raise UnsupportedBC(f"cell sizes must be positive, got {self.hx}, {self.hy}")

    # ---- sizes ----------------------------------------------------------

    @property
    def periodic_x(self) -> bool:
        return self.bc.left == "periodic"

    @property
    def periodic_y(self) -> bool:
        return self.bc.bottom == "periodic"

    @property
    def fx(self) -> int:
        """Number of distinct x-normal faces."""
        return self.nx if self.periodic_x else self.nx + 1

    @property
    def fy(self) -> int:
        return self.ny if self.periodic_y else self.ny + 1

    @property
    def scalar_shape(self) -> tuple[int, int]:
        return (self.nx + 2, self.ny + 2)

    @property
    def vx_shape(self) -> tuple[int, int]:
        return (self.fx + 2, self.ny + 2)

    @property
    def vy_shape(self) -> tuple[int, int]:
        return (self.nx + 2, self.fy + 2)

    @property
    def Lx(self) -> float:
        return self.nx * self.hx

    @property
    def Ly(self) -> float:
        return self.ny * self.hy

    @property
    def cell_volume(self) -> float:
        return self.hx * self.hy

    # ---- coordinates (ghosts included) ----------------------------------

    def xc(self) -> np.ndarray:
        return self.origin[0] + (np.arange(self.nx + 2) - 0.5) * self.hx

    def yc(self) -> np.ndarray:
        return self.origin[1] + (np.arange(self.ny + 2) - 0.5) * self.hy

    def xf(self) -> np.ndarray:
        """x of every x-face slot in a ghosted vx array."""
        return self.origin[0] + (np.arange(self.fx + 2) - 1.0) * self.hx

    def yf(self) -> np.ndarray:
        return self.origin[1] + (np.arange(self.fy + 2) - 1.0) * self.hy

    def meshgrid_centers(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.xc(), self.yc(), indexing="ij")
