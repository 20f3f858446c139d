"""Run orchestration: initial states, the time loop, and run artifacts.

A plan bundles the validated parameters, the grid, the step controls, and
the run settings.  The loop owns adaptive step memory: a rejected step
leaves the base step reduced, and streaks of clean steps let it creep back
toward the configured value.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import diagnostics, flow, initial, measure, phasefield, snapshot_io, stepper
from .config import RunConfig, RunSettings
from .errors import BadInitialSpec, SolverAbort
from .fields import ScalarField, VectorField
from .grid import Grid2D
from .params import ModelParams
from .spectral import ModalLaplacian
from .state import State, assert_admissible
from .stepper import StepControls


@dataclass
class RunPlan:
    params: ModelParams
    grid: Grid2D
    controls: StepControls
    settings: RunSettings

    @classmethod
    def from_config(cls, cfg: RunConfig) -> "RunPlan":
        grid = cfg.make_grid()
        s = cfg.settings
        lid = {}
        if s.lid_top != 0.0:
            lid["top"] = s.lid_top
        if s.lid_bottom != 0.0:
            lid["bottom"] = s.lid_bottom
        profile = None
        if grid.bc.left == "inflow":
            y = grid.yc()[1:-1] - grid.origin[1]
            profile = 4.0 * s.inflow_umax * y * (grid.Ly - y) / grid.Ly**2
        fbc = flow.FlowBC(lid=lid, inflow_profile=profile, inflow_c=s.inflow_c)
        controls = StepControls(
            flow_enabled=s.flow_enabled,
            reactions_enabled=s.reactions_enabled,
            fbc=fbc,
        )
        return cls(params=cfg.params, grid=grid, controls=controls, settings=s)


def build_initial_state(plan: RunPlan) -> State:
    """Compose the configured initial condition on the plan's grid."""
    params, grid, s = plan.params, plan.grid, plan.settings

    if s.init == "restore":
        state = snapshot_io.read_snapshot(s.restore_from, grid, params)
        assert_admissible(state, params, where="restored snapshot")
        return state

    xg, yg = initial.centers(grid)
    eps = params.eps
    if s.init == "uniform":
        solid, fluid2 = 0.0, 0.0
    elif s.init == "planar":
        coord = xg if s.init_normal == "x" else yg
        prof = initial.tanh_profile(coord - s.init_x0, eps)
        lo, hi = sorted(s.init_pair)
        if (lo, hi) == ("1", "2"):
            solid, fluid2 = 0.0, prof
        elif (lo, hi) == ("1", "3"):
            solid, fluid2 = prof, 0.0
        else:
            solid, fluid2 = prof, 1.0
    elif s.init == "disk":
        d = initial.tanh_profile(
            initial.distance_disk(xg, yg, (s.init_center_x, s.init_center_y), s.init_radius),
            eps,
        )
        if s.init_phase == 3:
            solid, fluid2 = d, 0.0
        elif s.init_phase == 2:
            solid, fluid2 = 0.0, d
        else:
            solid, fluid2 = 0.0, 1.0 - d
    elif s.init == "channel_nucleus":
        Lx, Ly = grid.Lx, grid.Ly
        x0 = grid.origin[0]
        nucleus = initial.tanh_profile(
            initial.distance_disk(xg, yg, (x0 + Lx / 3.0, grid.origin[1]), 0.25 * Ly),
            eps,
        )
        blob = initial.tanh_profile(
            initial.distance_disk(
                xg, yg, (x0 + Lx / 3.0, grid.origin[1] + 0.4 * Ly), 0.16 * Ly
            ),
            eps,
        )
        solid, fluid2 = nucleus, blob
    else:
        raise BadInitialSpec(f"unknown initial condition {s.init!r}")

    margin = 0.5 * max(params.c_star, 1.0)
    if not 0.0 <= s.init_c <= params.c_star + margin:
        raise BadInitialSpec(
            f"initial concentration {s.init_c} outside [0, c*+{margin:.3g}]"
        )

    phi = initial.compose_phases(grid, solid=solid, fluid2=fluid2)
    mu = phasefield.chemical_potentials(phi, params)
    state = State(
        grid=grid,
        phi=phi,
        mu=mu,
        c=initial.uniform_concentration(grid, s.init_c),
        p=ScalarField.zeros(grid),
        v=VectorField.zeros(grid),
    )
    assert_admissible(state, params, where="initial state")
    return state


@dataclass
class RunArtifacts:
    final_state: State
    records: list[diagnostics.DiagnosticsRecord]
    n_steps: int
    rejections: int
    stop_reason: str
    out_dir: Path | None = None
    snapshots: list[Path] = field(default_factory=list)
    abort: SolverAbort | None = None


def time_loop(
    state: State,
    plan: RunPlan,
    write_outputs: bool = True,
    t_end: float | None = None,
    max_steps: int | None = None,
) -> RunArtifacts:
    """March to ``t_end``, recording diagnostics and emitting snapshots."""
    params, s = plan.params, plan.settings
    if t_end is None:
        t_end = params.t_end
    if max_steps is None:
        max_steps = s.max_steps
    modal = ModalLaplacian(plan.grid)

    out_dir: Path | None = None
    snapshots: list[Path] = []
    if write_outputs:
        out_dir = Path(s.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)

    def emit(tag: str) -> None:
        if out_dir is None or s.snapshot_every < 0:
            return
        path = out_dir / f"snapshot_{tag}.dat"
        snapshot_io.write_snapshot(path, state, binary=s.binary_output)
        snapshots.append(path)

    rec, energy = diagnostics.record_and_energy(state, params, None)
    records = [rec]
    emit("000000")

    base_dt = params.dt
    n_steps = 0
    rejections = 0
    stop_reason = "t_end"
    abort: SolverAbort | None = None
    tiny = 1e-12 * max(t_end, params.dt)

    while state.time < t_end - tiny:
        if n_steps >= max_steps:
            stop_reason = "max_steps"
            break
        dt = min(base_dt, stepper.suggest_dt(state, params, plan.controls))
        dt = min(dt, t_end - state.time)
        try:
            result = stepper.advance(state, dt, params, modal, plan.controls)
        except SolverAbort as exc:
            abort = exc
            stop_reason = "aborted"
            break
        prev = state
        state = result.state
        n_steps += 1
        rejections += result.rejections
        if result.rejections:
            base_dt = result.dt_used
        else:
            base_dt = min(params.dt, 1.25 * base_dt)

        if n_steps % s.diag_every == 0 or state.time >= t_end - tiny:
            rec, energy = diagnostics.record_and_energy(state, params, energy)
            records.append(rec)
        if s.snapshot_every > 0 and n_steps % s.snapshot_every == 0:
            emit(f"{n_steps:06d}")

        if s.steady_tol > 0.0:
            rate = measure.state_change_rate(state, prev, result.dt_used)
            if rate < s.steady_tol:
                stop_reason = "steady"
                break

    emit("final")
    if out_dir is not None:
        diagnostics.write_diagnostics(out_dir / "diagnostics.csv", records)

    return RunArtifacts(
        final_state=state,
        records=records,
        n_steps=n_steps,
        rejections=rejections,
        stop_reason=stop_reason,
        out_dir=out_dir,
        snapshots=snapshots,
        abort=abort,
    )
