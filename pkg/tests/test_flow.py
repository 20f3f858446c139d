"""Tests for the momentum predictor and pressure projection."""

from __future__ import annotations

import numpy as np
import pytest

from tripleflow import energetics as en
from tripleflow import flow, initial, operators, phasefield
from tripleflow.fields import ScalarField, VectorField
from tripleflow.grid import BoxBC, Grid2D
from tripleflow.params import GSpec, ModelParams
from tripleflow.state import State

from test_phasefield import default_params, torus_grid, wall_grid


def channel_grid(nx, ny, hx, hy):
    bc = BoxBC(left="inflow", right="outflow", bottom="wall", top="wall")
    return Grid2D(nx=nx, ny=ny, hx=hx, hy=hy, origin=(0.0, 0.0), bc=bc)


def strip_grid(nx, ny, h):
    bc = BoxBC(left="periodic", right="periodic", bottom="wall", top="wall")
    return Grid2D(nx=nx, ny=ny, hx=h, hy=h, origin=(0.0, 0.0), bc=bc)


def zero_fluxes(grid):
    return {
        "Jfx": np.zeros(grid.vx_shape),
        "Jfy": np.zeros(grid.vy_shape),
        "Jcx": np.zeros(grid.vx_shape),
        "Jcy": np.zeros(grid.vy_shape),
    }


def make_state(grid, params, solid=0.0, fluid2=0.0, c=0.0):
    phi = initial.compose_phases(grid, solid=solid, fluid2=fluid2)
    mu = phasefield.chemical_potentials(phi, params)
    return State(
        grid=grid,
        phi=phi,
        mu=mu,
        c=initial.uniform_concentration(grid, c),
        p=ScalarField.zeros(grid),
        v=VectorField.zeros(grid),
        time=0.0,
    )


def fbc_for(grid, lid=None, umax=None):
    prof = None
    if umax is not None:
        y = grid.yc()[1:-1]
        prof = 4.0 * umax * y * (grid.Ly - y) / grid.Ly**2
    return flow.FlowBC(lid=lid or {}, inflow_profile=prof, inflow_c=0.5)


GRIDS = {
    "walls": lambda: wall_grid(10, 12, 0.1),
    "strip": lambda: strip_grid(10, 12, 0.1),
    "channel": lambda: channel_grid(10, 12, 0.1, 0.1),
}


@pytest.mark.parametrize("name", sorted(GRIDS))
def test_masked_operator_is_symmetric(name):
    grid = GRIDS[name]()
    params = default_params()
    rng = np.random.default_rng(7)
    gam_c = 1.0 + rng.random(grid.scalar_shape)
    # ghost viscosity must be consistent with the box topology, as it is
    # whenever gamma comes from ghost-filled phase fields
    operators.fill_scalar_ghosts(gam_c, grid, operators.scalar_bc_kinds(grid))
    gam_n = flow.node_viscosity(gam_c, grid)
    rtx = 0.5 + rng.random((grid.fx, grid.ny))
    rty = 0.5 + rng.random((grid.nx, grid.fy))
    drag_x = rng.random((grid.fx, grid.ny))
    drag_y = rng.random((grid.nx, grid.fy))
    fbc = fbc_for(grid, umax=1.0) if name == "channel" else flow.FlowBC()
    masks = flow.face_masks(grid, fbc)
    op, diag, n_x = flow.masked_momentum_operator(
        grid, 0.05, gam_c, gam_n, rtx, rty, drag_x, drag_y, masks
    )
    n = n_x + grid.nx * grid.fy
    for _ in range(4):
        u = rng.standard_normal(n)
        w = rng.standard_normal(n)
        left = float(np.dot(op(u), w))
        right = float(np.dot(u, op(w)))
        scale = max(abs(left), abs(right), 1.0)
        assert abs(left - right) < 1e-11 * scale


def test_couette_profile_from_single_large_step():
    grid = strip_grid(8, 16, 1.0 / 16)
    params = default_params()
    st = make_state(grid, params)
    fbc = flow.FlowBC(lid={"top": 1.0})
    v, p, info = flow.step_flow(
        st, st.phi, st.mu, zero_fluxes(grid), None, 1e8, params, fbc
    )
    y = grid.yc()[1:-1]
    expect = y / grid.Ly
    prof = v.x[1 : grid.fx + 1, 1:-1]
    assert np.max(np.abs(prof - expect[None, :])) < 1e-8
    assert np.max(np.abs(v.y[1:-1, 1 : grid.fy + 1])) < 1e-8
    assert np.max(np.abs(p.interior - np.mean(p.interior))) < 1e-6


def test_uniform_drag_decay_matches_closed_form():
    grid = torus_grid(12, 12, 1.0 / 12)
    params = default_params(d0=25.0)
    st = make_state(grid, params, solid=1.0)
    st.v.x[...] = 0.1
    st.v.y[...] = -0.04
    dt = 0.02
    v, p, info = flow.step_flow(
        st, st.phi, st.mu, zero_fluxes(grid), None, dt, params, flow.FlowBC()
    )
    d = params.delta_eff
    rho_t = (params.rho1 + params.rho2) * d
    drag = params.rho3 * params.d0 * (1.0 - 2.0 * d)
    factor = rho_t / (rho_t + dt * drag)
    assert np.max(np.abs(v.x[1:-1, 1:-1] - 0.1 * factor)) < 1e-12
    assert np.max(np.abs(v.y[1:-1, 1:-1] + 0.04 * factor)) < 1e-12
    assert np.max(np.abs(p.interior)) < 1e-9


@pytest.mark.parametrize("name", sorted(GRIDS))
def test_projection_zeroes_weighted_divergence_and_dissipates(name):
    grid = GRIDS[name]()
    params = default_params(eps=0.15)
    xg, yg = initial.centers(grid)
    s = initial.tanh_profile(
        initial.distance_disk(xg, yg, (0.5, 0.6), 0.25), params.eps
    )
    phi = initial.compose_phases(grid, solid=s, fluid2=0.0)
    phasefield.chemical_potentials(phi, params)  # refresh ghosts
    rng = np.random.default_rng(3)
    v = VectorField.zeros(grid)
    v.x[1 : grid.fx + 1, 1:-1] = 0.2 * rng.standard_normal((grid.fx, grid.ny))
    v.y[1:-1, 1 : grid.fy + 1] = 0.2 * rng.standard_normal((grid.nx, grid.fy))
    fbc = fbc_for(grid, umax=0.3) if name == "channel" else flow.FlowBC()
    masks = flow.face_masks(grid, fbc)
    flow.apply_pinned(v, grid, masks)
    flow.fill_velocity_ghosts(v.x, v.y, grid, fbc)

    mix = en.delta_modified(tuple(f.data for f in phi), params)
    rx, ry = flow.faces_of_centers(mix.rho_f_tilde, grid)

    def kinetic(v):
        ex = rx * v.x[1 : grid.fx + 1, 1:-1] ** 2
        ey = ry * v.y[1:-1, 1 : grid.fy + 1] ** 2
        return 0.5 * grid.cell_volume * (float(np.sum(ex)) + float(np.sum(ey)))

    ke0 = kinetic(v)
    dt = 0.01
    v2, p, info = flow.pressure_project(v, phi, dt, params, fbc)
    assert info["div_weighted_inf"] < 1e-9
    if name != "channel":
        # with open boundaries the pressure does work through the outlet,
        # so the exact decrease identity only holds for closed boxes
        assert kinetic(v2) <= ke0 + 1e-12
    # pinned faces untouched by the correction
    mask_x, val_x, mask_y, val_y = masks
    assert np.array_equal(
        v2.x[1 : grid.fx + 1, 1:-1][mask_x], v.x[1 : grid.fx + 1, 1:-1][mask_x]
    )
    assert np.array_equal(
        v2.y[1:-1, 1 : grid.fy + 1][mask_y], v.y[1:-1, 1 : grid.fy + 1][mask_y]
    )


def test_rest_state_stays_at_rest():
    grid = wall_grid(12, 10, 0.1)
    params = default_params()
    st = make_state(grid, params, solid=0.0, fluid2=0.0)
    v, p, info = flow.step_flow(
        st, st.phi, st.mu, zero_fluxes(grid), None, 1e-2, params, flow.FlowBC()
    )
    assert np.max(np.abs(v.x)) < 1e-10
    assert np.max(np.abs(v.y)) < 1e-10


def test_step_flow_is_deterministic():
    grid = channel_grid(12, 8, 1.0 / 12, 1.0 / 8)
    params = default_params()
    xg, yg = initial.centers(grid)
    s = initial.tanh_profile(initial.distance_disk(xg, yg, (0.6, 0.0), 0.3), params.eps)
    fbc = fbc_for(grid, umax=1.0)
    outs = []
    for _ in range(2):
        st = make_state(grid, params, solid=s)
        v, p, info = flow.step_flow(
            st, st.phi, st.mu, zero_fluxes(grid), None, 5e-3, params, fbc
        )
        outs.append((v.x.copy(), v.y.copy(), p.data.copy()))
    assert np.array_equal(outs[0][0], outs[1][0])
    assert np.array_equal(outs[0][1], outs[1][1])
    assert np.array_equal(outs[0][2], outs[1][2])
