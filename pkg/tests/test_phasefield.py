"""Tests for the fraction and concentration updates.

The conservation checks here are the sharp ones: means and partitions are
supposed to telescope to round-off, not merely to truncation order.
"""

from __future__ import annotations

import numpy as np
import pytest

from tripleflow import energetics as en
from tripleflow import initial, phasefield
from tripleflow.errors import StepRejected
from tripleflow.fields import ScalarField, VectorField
from tripleflow.grid import BoxBC, Grid2D
from tripleflow.params import GSpec, ModelParams
from tripleflow.spectral import ModalLaplacian
from tripleflow.state import State


def default_params(**kw):
    base = dict(
        rho1=1.0,
        rho2=0.8,
        rho3=1.0,
        gamma1=1.0,
        gamma2=1.5,
        gamma3=1.0,
        sigma12=0.06,
        sigma13=0.05,
        sigma23=0.07,
        eps=1.0 / 16.0,
        D=1.0,
        alpha=0.0,
        d0=10.0,
        c_star=1.0,
        g=GSpec(),
        dt=1e-4,
        t_end=1.0,
    )
    base.update(kw)
    return ModelParams(**base)


def wall_grid(nx, ny, h):
    return Grid2D(nx=nx, ny=ny, hx=h, hy=h, origin=(0.0, 0.0), bc=BoxBC())


def torus_grid(nx, ny, h):
    bc = BoxBC(left="periodic", right="periodic", bottom="periodic", top="periodic")
    return Grid2D(nx=nx, ny=ny, hx=h, hy=h, origin=(0.0, 0.0), bc=bc)


def planar_state(grid, params, x0):
    xg, _ = initial.centers(grid)
    t = initial.tanh_profile(xg - x0, params.eps)
    p1 = ScalarField.zeros(grid)
    p2 = ScalarField.zeros(grid)
    p3 = ScalarField.zeros(grid)
    p1.interior[...] = 1.0 - t
    p2.interior[...] = t
    return (p1, p2, p3)


# ---- chemical potentials -------------------------------------------------


def test_potentials_uniform_state_match_well_gradient():
    grid = wall_grid(8, 6, 0.1)
    params = default_params()
    vals = (0.3, 0.3, 0.4)
    phi = tuple(ScalarField.full(grid, v) for v in vals)
    mu = phasefield.chemical_potentials(phi, params)
    ones = np.ones(grid.scalar_shape)
    dW = en.dW_dphi(
        tuple(v * ones for v in vals), params.delta_eff, params.Sigmas, params.SigmaT
    )
    for i in range(3):
        expect = dW[i][2, 2] / params.eps
        assert np.allclose(mu[i].interior, expect, rtol=0.0, atol=1e-12)
    null = sum(mu[i].interior / params.Sigmas[i] for i in range(3))
    assert np.max(np.abs(null)) < 1e-11


def test_potentials_vanish_on_tanh_profile_at_second_order():
    params = default_params()
    sup = {}
    for ratio in (4, 8):
        h = params.eps / ratio
        nx = int(round(1.0 / h))
        grid = wall_grid(nx, 4, h)
        phi = planar_state(grid, params, 0.5)
        mu = phasefield.chemical_potentials(phi, params)
        sup[ratio] = max(
            float(np.max(np.abs(mu[0].interior))), float(np.max(np.abs(mu[1].interior)))
        )
        # phase 3 is absent and both well gradient and curvature vanish there
        assert np.max(np.abs(mu[2].interior)) < 1e-10
    assert sup[8] < sup[4] / 3.0


# ---- fraction stepping ---------------------------------------------------


def test_partition_and_means_survive_steps_without_flow():
    grid = wall_grid(32, 32, 1.0 / 32)
    params = default_params(eps=0.1)
    xg, yg = initial.centers(grid)
    s = initial.tanh_profile(initial.distance_disk(xg, yg, (0.35, 0.5), 0.2), params.eps)
    f2 = initial.tanh_profile(initial.distance_halfplane(xg, 0.7), params.eps)
    phi = initial.compose_phases(grid, solid=s, fluid2=f2)
    modal = ModalLaplacian(grid)
    v = VectorField.zeros(grid)

    st = State(grid=grid, phi=phi, mu=phasefield.chemical_potentials(phi, params), c=ScalarField.zeros(grid), p=ScalarField.zeros(grid), v=v, time=0.0)
    means0 = [float(np.mean(f.interior)) for f in st.phi]
    dt = 2e-4
    for _ in range(10):
        new_phi, new_mu = phasefield.step_phase_fields(
            st, dt, params, modal, reactions=None, advect=False
        )
        st = State(grid=grid, phi=new_phi, mu=new_mu, c=st.c, p=st.p, v=st.v, time=st.time + dt)
        total = sum(f.interior for f in st.phi)
        assert np.max(np.abs(total - 1.0)) < 1e-12
        null = sum(st.mu[i].interior / params.Sigmas[i] for i in range(3))
        scale = max(np.max(np.abs(m.interior)) for m in st.mu) + 1.0
        assert np.max(np.abs(null)) < 1e-10 * scale
    means = [float(np.mean(f.interior)) for f in st.phi]
    for a, b in zip(means0, means):
        assert abs(a - b) < 1e-13


def test_partition_survives_advection_when_weighted_flux_is_divergence_free():
    # Mimics the coupling contract with the projection: the velocity the
    # fraction step sees satisfies div(avg(phi_f_tilde) v) = 0 discretely.
    grid = torus_grid(24, 24, 1.0 / 24)
    params = default_params(eps=0.1)
    xg, yg = initial.centers(grid)
    s = initial.tanh_profile(
        initial.distance_disk(xg, yg, (0.5, 0.5), 0.22), params.eps
    )
    phi = initial.compose_phases(grid, solid=s, fluid2=0.0)
    d = params.delta_eff
    from tripleflow.operators import interp_center_to_face

    def projected_velocity(phi):
        # constant mass flux through faces, divided by the face-averaged
        # carrier fraction: div(avg(phi_f_tilde) v) = 0 holds to round-off,
        # the same contract the pressure projection provides each step
        pft = ScalarField.zeros(grid)
        pft.interior[...] = (
            phi[0].interior + phi[1].interior + 2.0 * d * phi[2].interior
        )
        a = interp_center_to_face(pft)
        v = VectorField.zeros(grid)
        v.x[...] = 0.3 / a.x
        return v

    modal = ModalLaplacian(grid)
    st = State(grid=grid, phi=phi, mu=phasefield.chemical_potentials(phi, params), c=ScalarField.zeros(grid), p=ScalarField.zeros(grid), v=projected_velocity(phi), time=0.0)
    means0 = [float(np.mean(f.interior)) for f in st.phi]
    dt = 1e-4
    for _ in range(5):
        new_phi, new_mu = phasefield.step_phase_fields(
            st, dt, params, modal, reactions=None, advect=True
        )
        st = State(grid=grid, phi=new_phi, mu=new_mu, c=st.c, p=st.p, v=projected_velocity(new_phi), time=st.time + dt)
        total = sum(f.interior for f in st.phi)
        assert np.max(np.abs(total - 1.0)) < 1e-12
    means = [float(np.mean(f.interior)) for f in st.phi]
    for a0, b in zip(means0, means):
        assert abs(a0 - b) < 1e-13


def test_planar_profile_stays_planar():
    params = default_params()
    h = params.eps / 8
    grid = wall_grid(int(round(1.0 / h)), 4, h)
    phi = planar_state(grid, params, 0.5)
    modal = ModalLaplacian(grid)

    st = State(grid=grid, phi=phi, mu=phasefield.chemical_potentials(phi, params), c=ScalarField.zeros(grid), p=ScalarField.zeros(grid), v=VectorField.zeros(grid), time=0.0)
    for _ in range(10):
        new_phi, new_mu = phasefield.step_phase_fields(
            st, 1e-5, params, modal, reactions=None, advect=False
        )
        st = State(grid=grid, phi=new_phi, mu=new_mu, c=st.c, p=st.p, v=st.v, time=0.0)
    for f in st.phi:
        spread = np.max(f.interior, axis=1) - np.min(f.interior, axis=1)
        assert np.max(spread) < 1e-12


def test_runaway_reaction_triggers_rejection():
    grid = wall_grid(16, 16, 1.0 / 16)
    params = default_params()
    phi = initial.compose_phases(grid, solid=0.5, fluid2=0.0)
    modal = ModalLaplacian(grid)
    big = np.full(grid.scalar_shape, 1e6)
    reactions = en.Reactions(R1=big, R2=np.zeros_like(big), R3=-big, Rc=big, Rf=big)

    st = State(grid=grid, phi=phi, mu=phasefield.chemical_potentials(phi, params), c=ScalarField.zeros(grid), p=ScalarField.zeros(grid), v=VectorField.zeros(grid), time=0.0)
    with pytest.raises(StepRejected):
        phasefield.step_phase_fields(st, 1e-2, params, modal, reactions, advect=False)


# ---- reactions and the ion budget ----------------------------------------


def test_ion_budget_closes_across_coupled_step():
    grid = wall_grid(32, 32, 1.0 / 32)
    params = default_params(eps=0.1, alpha=0.1, D=0.5, c_star=0.8)
    xg, yg = initial.centers(grid)
    s = initial.tanh_profile(initial.distance_disk(xg, yg, (0.5, 0.5), 0.25), params.eps)
    phi = initial.compose_phases(grid, solid=s, fluid2=0.0)
    c = initial.uniform_concentration(grid, 0.4)
    modal = ModalLaplacian(grid)
    v = VectorField.zeros(grid)
    d = params.delta_eff
    vol = grid.cell_volume

    def budget(phi, c):
        pct = d + phi[0].interior
        return vol * float(
            np.sum(pct * c.interior) + params.c_star * np.sum(phi[2].interior)
        )

    mu = phasefield.chemical_potentials(phi, params)
    total0 = budget(phi, c)
    solid0 = float(np.sum(phi[2].interior))
    dt = 5e-5
    for _ in range(5):
        reactions = en.reaction_R1(
            tuple(f.data for f in phi), c.data, mu[0].data, mu[2].data, params
        )


        st = State(grid=grid, phi=phi, mu=mu, c=c, p=ScalarField.zeros(grid), v=v, time=0.0)
        new_phi, new_mu = phasefield.step_phase_fields(
            st, dt, params, modal, reactions, advect=False
        )
        fluxes = phasefield.ch_fluxes(new_mu, params)
        c = phasefield.step_concentration(
            new_phi, phi, c, v, fluxes, dt, params, Rc=reactions.Rc, advect=True
        )
        phi, mu = new_phi, new_mu
    total = budget(phi, c)
    assert abs(total - total0) < 1e-12 * max(1.0, abs(total0))
    # r(0.4) > 0 at c* = 0.8, so ions precipitate and the solid grows
    assert float(np.sum(phi[2].interior)) > solid0 + 1e-8


# ---- concentration solve -------------------------------------------------


def test_concentration_backward_euler_mode_decay_exact():
    grid = wall_grid(32, 8, 1.0 / 32)
    params = default_params(D=0.7)
    phi = initial.compose_phases(grid, solid=0.0, fluid2=0.0)  # pure fluid 1
    xg, _ = initial.centers(grid)
    k = 3
    # cell-centered samples of cos(pi k x / L) diagonalize the discrete operator
    mode = np.cos(np.pi * k * xg / grid.Lx)
    c0 = ScalarField.zeros(grid)
    c0.interior[...] = 0.5 + 0.2 * mode
    dt = 0.01
    fluxes = {
        "Jcx": np.zeros(grid.vx_shape),
        "Jcy": np.zeros(grid.vy_shape),
    }
    out = phasefield.step_concentration(
        phi, phi, c0, VectorField.zeros(grid), fluxes, dt, params, Rc=None, advect=False
    )
    lam = 2.0 * (1.0 - np.cos(np.pi * k / grid.nx)) / grid.hx**2
    expect = 0.5 + 0.2 * mode / (1.0 + dt * params.D * lam)
    assert np.max(np.abs(out.interior - expect)) < 1e-9


def test_concentration_inflow_dirichlet_relaxes_to_boundary_value():
    bc = BoxBC(left="inflow", right="outflow", bottom="wall", top="wall")
    grid = Grid2D(nx=24, ny=8, hx=1.0 / 24, hy=1.0 / 8, origin=(0.0, 0.0), bc=bc)
    params = default_params()
    phi = initial.compose_phases(grid, solid=0.0, fluid2=0.0)
    c0 = initial.uniform_concentration(grid, 0.2)
    fluxes = {"Jcx": np.zeros(grid.vx_shape), "Jcy": np.zeros(grid.vy_shape)}
    out = phasefield.step_concentration(
        phi,
        phi,
        c0,
        VectorField.zeros(grid),
        fluxes,
        1e6,
        params,
        Rc=None,
        inflow_c=0.8,
        advect=False,
    )
    # with a huge step the solve lands on the harmonic steady state c = 0.8
    assert np.max(np.abs(out.interior - 0.8)) < 1e-6
    face = 0.5 * (out.data[0, 1:-1] + out.data[1, 1:-1])
    assert np.max(np.abs(face - 0.8)) < 1e-9
