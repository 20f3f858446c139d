"""Full simulation state: fractions, potentials, ions, pressure, velocity."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import NegativeConcentration, StepRejected
from .fields import ScalarField, VectorField
from .grid import Grid2D
from .params import ModelParams


@dataclass
class State:
    grid: Grid2D
    phi: tuple[ScalarField, ScalarField, ScalarField]
    mu: tuple[ScalarField, ScalarField, ScalarField]
    c: ScalarField
    p: ScalarField
    v: VectorField
    time: float = 0.0

    @classmethod
    def zeros(cls, grid: Grid2D) -> "State":
        sf = lambda: ScalarField.zeros(grid)  # noqa: E731
        return cls(
            grid=grid,
            phi=(sf(), sf(), sf()),
            mu=(sf(), sf(), sf()),
            c=sf(),
            p=sf(),
            v=VectorField.zeros(grid),
        )

    def copy(self) -> "State":
        return State(
            grid=self.grid,
            phi=tuple(f.copy() for f in self.phi),
            mu=tuple(f.copy() for f in self.mu),
            c=self.c.copy(),
            p=self.p.copy(),
            v=self.v.copy(),
            time=self.time,
        )

    def with_time(self, time: float) -> "State":
        return replace(self, time=time)

    @property
    def phi_interiors(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return tuple(f.interior for f in self.phi)

    @property
    def mu_interiors(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return tuple(f.interior for f in self.mu)


def assert_admissible(state: State, params: ModelParams, where: str = "") -> None:
    """Reject states the model cannot represent.

    Fractions must stay strictly inside the barrier range and sum to one;
    the concentration may undershoot zero only at round-off level.  Raises
    :class:`StepRejected` or :class:`NegativeConcentration`.
    """
    d = params.delta_eff
    tag = f" ({where})" if where else ""
    psum = None
    for i, f in enumerate(state.phi):
        arr = f.interior
        if not np.all(np.isfinite(arr)):
            raise StepRejected(f"phi{i + 1} is not finite{tag}")
        lo, hi = float(arr.min()), float(arr.max())
        if lo <= -d or hi >= 1.0 + d:
            raise StepRejected(
                f"phi{i + 1} range [{lo:.3e}, {hi:.3e}] left (-delta, 1+delta){tag}"
            )
        psum = arr if psum is None else psum + arr
    err = float(np.max(np.abs(psum - 1.0)))
    if err > 1e-10:
        raise StepRejected(f"fractions sum to 1 only within {err:.3e}{tag}")
    carr = state.c.interior
    if not np.all(np.isfinite(carr)):
        raise StepRejected(f"concentration is not finite{tag}")
    if float(carr.min()) < -1e-6 * max(1.0, params.c_star):
        raise NegativeConcentration(
            f"concentration reached {float(carr.min()):.3e}{tag}"
        )
    if not np.all(np.isfinite(state.v.x)) or not np.all(np.isfinite(state.v.y)):
        raise StepRejected(f"velocity is not finite{tag}")
