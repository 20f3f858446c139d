"""One coupled time step and the retrying outer advance.

Update order within a step: reactions are evaluated once at the old state
and shared by the fraction and ion updates (their exchange terms then cancel
in the ion total exactly); the fractions advance through the modal solve;
potentials and diffusive fluxes refresh from the new fractions; the ion
concentration advances with implicit diffusion; finally the velocity takes a
predictor step and is projected against the new fraction field, so the next
step's advection is discretely divergence-free in ``phi_f_tilde``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import energetics as en
from . import flow, phasefield
from .errors import NegativeConcentration, StepRejected
from .params import ModelParams
from .spectral import ModalLaplacian
from .state import State, assert_admissible


@dataclass(frozen=True)
class StepControls:
    """Which couplings are active and how the box is driven."""

    flow_enabled: bool = True
    reactions_enabled: bool = True
    fbc: flow.FlowBC = field(default_factory=flow.FlowBC)


def step_once(
    state: State,
    dt: float,
    params: ModelParams,
    modal: ModalLaplacian,
    controls: StepControls,
) -> tuple[State, dict]:
    """Advance every coupled field by one step of size ``dt``."""
    grid = state.grid
    if controls.flow_enabled:
        # make the step a function of interior values only; matters after
        # a snapshot restore, where ghost layers start out empty
        flow.fill_velocity_ghosts(state.v.x, state.v.y, grid, controls.fbc)

    rx = None
    if controls.reactions_enabled:
        rx = en.reaction_R1(
            tuple(f.data for f in state.phi),
            state.c.data,
            state.mu[0].data,
            state.mu[2].data,
            params,
        )

    new_phi, new_mu = phasefield.step_phase_fields(
        state, dt, params, modal, rx, advect=controls.flow_enabled
    )
    fluxes = phasefield.ch_fluxes(new_mu, params)

    inflow_c = controls.fbc.inflow_c if grid.bc.left == "inflow" else None
    new_c = phasefield.step_concentration(
        new_phi,
        state.phi,
        state.c,
        state.v,
        fluxes,
        dt,
        params,
        Rc=rx.Rc if rx is not None else None,
        inflow_c=inflow_c,
    )

    info: dict = {}
    if controls.flow_enabled:
        new_v, new_p, info = flow.step_flow(
            state, new_phi, new_mu, fluxes, rx, dt, params, controls.fbc, modal
        )
    else:
        new_v, new_p = state.v.copy(), state.p.copy()

    new_state = State(
        grid=grid,
        phi=new_phi,
        mu=new_mu,
        c=new_c,
        p=new_p,
        v=new_v,
        time=state.time + dt,
    )
    assert_admissible(new_state, params, where=f"t={new_state.time:.6g}")
    return new_state, info


def suggest_dt(state: State, params: ModelParams, controls: StepControls) -> float:
    """Cap the configured step by an advective CFL bound when flow is on."""
    dt = params.dt
    if not controls.flow_enabled:
        return dt
    speeds = [state.v.max_speed()]
    speeds.extend(abs(s) for s in controls.fbc.lid.values())
    if controls.fbc.inflow_profile is not None:
        speeds.append(float(np.max(np.abs(controls.fbc.inflow_profile))))
    vmax = max(speeds)
    if vmax <= 0.0:
        return dt
    h = min(state.grid.hx, state.grid.hy)
    return min(dt, 0.2 * h / vmax)


@dataclass
class StepResult:
    state: State
    dt_used: float
    rejections: int
    info: dict


def advance(
    state: State,
    dt: float,
    params: ModelParams,
    modal: ModalLaplacian,
    controls: StepControls,
    max_retries: int = 8,
) -> StepResult:
    """Take one step, halving ``dt`` on rejection up to ``max_retries`` times."""
    trial = dt
    last: Exception | None = None
    for attempt in range(max_retries + 1):
        try:
            new_state, info = step_once(state, trial, params, modal, controls)
            return StepResult(new_state, trial, attempt, info)
        except (StepRejected, NegativeConcentration) as exc:
            last = exc
            trial *= 0.5
    raise StepRejected(
        f"step rejected {max_retries + 1} times down to dt={trial * 2.0:.3e}: {last}"
    )
