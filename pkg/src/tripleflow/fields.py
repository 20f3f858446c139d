"""Thin field containers tying an array to its grid."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import Grid2D


@dataclass
class ScalarField:
    """Cell-centered scalar with one ghost ring."""

    grid: Grid2D
    data: np.ndarray

    @classmethod
    def zeros(cls, grid: Grid2D) -> "ScalarField":
        return cls(grid, np.zeros(grid.scalar_shape))

    @classmethod
    def full(cls, grid: Grid2D, value: float) -> "ScalarField":
        return cls(grid, np.full(grid.scalar_shape, float(value)))

    @property
    def interior(self) -> np.ndarray:
        return self.data[1:-1, 1:-1]

    def copy(self) -> "ScalarField":
        return ScalarField(self.grid, self.data.copy())


@dataclass
class VectorField:
    """MAC velocity: x-component on vertical faces, y-component on horizontal."""

    grid: Grid2D
    x: np.ndarray
    y: np.ndarray

    @classmethod
    def zeros(cls, grid: Grid2D) -> "VectorField":
        return cls(grid, np.zeros(grid.vx_shape), np.zeros(grid.vy_shape))

    @property
    def x_interior(self) -> np.ndarray:
        return self.x[1:-1, 1:-1]

    @property
    def y_interior(self) -> np.ndarray:
        return self.y[1:-1, 1:-1]

    def copy(self) -> "VectorField":
        return VectorField(self.grid, self.x.copy(), self.y.copy())

    def max_speed(self) -> float:
        mx = float(np.max(np.abs(self.x[1:-1, 1:-1]))) if self.x.size else 0.0
        my = float(np.max(np.abs(self.y[1:-1, 1:-1]))) if self.y.size else 0.0
        return max(mx, my)
