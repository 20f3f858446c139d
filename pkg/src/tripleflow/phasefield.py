"""Phase-field and ion-transport updates.

One time step advances the three fractions together through a semi-implicit
convex-split update.  Writing the potential of phase ``i`` as

    mu_i = dW_i(Phi)/eps - eps Sigma_i Lap(phi_i) + (s Sigma_i / eps)(phi' - phi)

with the well gradient frozen at the old state and the stabilization shift
``s``, the update of every phase reduces to the same constant-coefficient
problem

    (I - dt s Lap + dt eps^2 Lap^2) phi' = rhs_i,

which the modal factorization solves exactly.  Because the well gradient
satisfies ``sum_i dW_i / Sigma_i = 0`` pointwise and the advecting field is
discretely divergence-free in ``phi_f_tilde``, summing the three right-hand
sides reproduces the constant 1, so the partition of unity survives the
solve to round-off without reprojection.

The stored potentials are always recomputed from the updated fractions
(``chemical_potentials``); the stabilized in-solve potential never leaves
this module.  That keeps every state a pure function of ``(phi, c, p, v)``,
which restart-from-snapshot relies on.
"""

from __future__ import annotations

import numpy as np

from . import energetics as en
from . import kernels
from .errors import StepRejected
from .fields import ScalarField, VectorField
from .grid import Grid2D
from .linsolve import conjugate_gradient
from .operators import fill_face_ghosts_wrap, fill_scalar_ghosts, scalar_bc_kinds
from .params import ModelParams
from .spectral import ModalLaplacian
from .state import State


def stabilization_s(params: ModelParams) -> float:
    if params.stab_s is not None:
        return params.stab_s
    return en.stabilization_bound(params.delta_eff)


def _fill_neumann(arr: np.ndarray, grid: Grid2D) -> np.ndarray:
    return fill_scalar_ghosts(arr, grid, scalar_bc_kinds(grid))


def chemical_potentials(
    phi: tuple[ScalarField, ScalarField, ScalarField], params: ModelParams
) -> tuple[ScalarField, ScalarField, ScalarField]:
    """PDE-consistent potentials ``mu_i = dW_i/eps - eps Sigma_i Lap phi_i``.

    Fraction ghosts are refreshed here (homogeneous Neumann or wrap), so the
    result only depends on interior fraction values.
    """
    grid = phi[0].grid
    inv_hx2, inv_hy2 = 1.0 / grid.hx**2, 1.0 / grid.hy**2
    for f in phi:
        _fill_neumann(f.data, grid)
    dW = en.dW_dphi(
        tuple(f.data for f in phi), params.delta_eff, params.Sigmas, params.SigmaT
    )
    out = []
    for i in range(3):
        lap = kernels.laplacian(phi[i].data, inv_hx2, inv_hy2, grid.nx, grid.ny)
        m = ScalarField.zeros(grid)
        m.interior[...] = (
            dW[i][1:-1, 1:-1] / params.eps - params.eps * params.Sigmas[i] * lap
        )
        _fill_neumann(m.data, grid)
        out.append(m)
    return tuple(out)


def ch_fluxes(
    mu: tuple[ScalarField, ScalarField, ScalarField], params: ModelParams
) -> dict[str, np.ndarray]:
    """Diffusive fluxes ``J_i = -(eps/Sigma_i) grad mu_i`` on faces.

    Returns ghosted face arrays keyed ``J1x .. J3y`` plus the mass flux
    ``Jfx/Jfy = rho1 J1 + rho2 J2`` and the ion carrier ``Jcx/Jcy = J1``.
    """
    grid = mu[0].grid
    out: dict[str, np.ndarray] = {}
    for i in range(3):
        _fill_neumann(mu[i].data, grid)
        coef = -params.eps / params.Sigmas[i]
        jx = np.zeros(grid.vx_shape)
        jy = np.zeros(grid.vy_shape)
        gx = kernels.grad_x_faces(mu[i].data, 1.0 / grid.hx, grid.nx, grid.ny)
        gy = kernels.grad_y_faces(mu[i].data, 1.0 / grid.hy, grid.nx, grid.ny)
        jx[1 : grid.fx + 1, 1:-1] = coef * gx[0 : grid.fx, :]
        jy[1:-1, 1 : grid.fy + 1] = coef * gy[:, 0 : grid.fy]
        fill_face_ghosts_wrap(grid, jx, jy)
        out[f"J{i + 1}x"] = jx
        out[f"J{i + 1}y"] = jy
    out["Jfx"] = params.rho1 * out["J1x"] + params.rho2 * out["J2x"]
    out["Jfy"] = params.rho1 * out["J1y"] + params.rho2 * out["J2y"]
    out["Jcx"] = out["J1x"]
    out["Jcy"] = out["J1y"]
    return out


def _advective_divergence(
    phi_face_weight: np.ndarray, v: VectorField, grid: Grid2D
) -> np.ndarray:
    """div(w v) for a centered weight ``w`` averaged onto faces."""
    ax = kernels.avg_x_faces(phi_face_weight, grid.nx, grid.ny)
    ay = kernels.avg_y_faces(phi_face_weight, grid.nx, grid.ny)
    fxa = np.zeros(grid.vx_shape)
    fya = np.zeros(grid.vy_shape)
    fxa[1 : grid.fx + 1, 1:-1] = ax[0 : grid.fx, :] * v.x[1 : grid.fx + 1, 1:-1]
    fya[1:-1, 1 : grid.fy + 1] = ay[:, 0 : grid.fy] * v.y[1:-1, 1 : grid.fy + 1]
    fill_face_ghosts_wrap(grid, fxa, fya)
    return kernels.div_faces(fxa, fya, 1.0 / grid.hx, 1.0 / grid.hy, grid.nx, grid.ny)


def step_phase_fields(
    state: State,
    dt: float,
    params: ModelParams,
    modal: ModalLaplacian,
    reactions: en.Reactions | None,
    advect: bool = True,
) -> tuple[tuple[ScalarField, ...], tuple[ScalarField, ...]]:
    """Advance the fractions by one step; returns ``(phi', mu')``.

    ``reactions`` holds the precomputed sources at the old state (``None``
    disables them); ``advect=False`` drops the transport terms (no-flow
    runs).  Raises :class:`StepRejected` if any updated fraction leaves
    ``(-delta, 1+delta)``.
    """
    grid = state.grid
    s = stabilization_s(params)
    inv_hx2, inv_hy2 = 1.0 / grid.hx**2, 1.0 / grid.hy**2
    d = params.delta_eff

    for f in state.phi:
        _fill_neumann(f.data, grid)
    dW = en.dW_dphi(
        tuple(f.data for f in state.phi), d, params.Sigmas, params.SigmaT
    )

    new_phi = []
    for i in range(3):
        phin = state.phi[i].data
        rhs = phin[1:-1, 1:-1].copy()
        if advect:
            weight = phin if i < 2 else 2.0 * d * phin
            rhs -= dt * _advective_divergence(weight, state.v, grid)
        if reactions is not None:
            ri = (reactions.R1, reactions.R2, reactions.R3)[i]
            rhs += dt * ri[1:-1, 1:-1]
        # Lap(dW_i) needs ghosts for dW: it inherits Neumann/wrap from phi
        dwi = _fill_neumann(np.ascontiguousarray(dW[i]), grid)
        rhs += (dt / params.Sigmas[i]) * kernels.laplacian(
            dwi, inv_hx2, inv_hy2, grid.nx, grid.ny
        )
        rhs -= dt * s * kernels.laplacian(phin, inv_hx2, inv_hy2, grid.nx, grid.ny)
        sol = modal.solve_polynomial(rhs, (1.0, dt * s, dt * params.eps**2))
        f = ScalarField.zeros(grid)
        f.interior[...] = sol
        lo, hi = float(sol.min()), float(sol.max())
        if not np.isfinite(lo) or not np.isfinite(hi) or lo <= -d or hi >= 1.0 + d:
            raise StepRejected(
                f"phi{i + 1} left (-delta, 1+delta): range [{lo:.4e}, {hi:.4e}]"
            )
        new_phi.append(f)

    new_phi = tuple(new_phi)
    new_mu = chemical_potentials(new_phi, params)
    return new_phi, new_mu


def step_concentration(
    phi_new: tuple[ScalarField, ...],
    phi_old: tuple[ScalarField, ...],
    c_old: ScalarField,
    v: VectorField,
    fluxes_new: dict[str, np.ndarray],
    dt: float,
    params: ModelParams,
    Rc: np.ndarray | None,
    inflow_c: float | None = None,
    advect: bool = True,
) -> ScalarField:
    """Implicit-diffusion update of the ion concentration.

    Time term couples the new carrier fraction ``phi_c_tilde(n+1)`` to the
    new concentration, transport (cell velocity plus ``J_c``) is explicit,
    diffusion ``D div(phi_c_tilde grad c)`` implicit.  The linear solve runs
    on the increment ``c' - c`` so the converged residual, not the solution
    magnitude, limits how well ion totals telescope.
    """
    grid = c_old.grid
    d = params.delta_eff
    inv_hx2, inv_hy2 = 1.0 / grid.hx**2, 1.0 / grid.hy**2

    pct_new = d + phi_new[0].data  # phi_c_tilde at the new level, with ghosts
    pct_old = d + phi_old[0].data

    kinds = scalar_bc_kinds(grid)
    values = {}
    if inflow_c is not None and grid.bc.left == "inflow":
        kinds["left"] = "dirichlet"
        values["left"] = inflow_c
    fill_scalar_ghosts(c_old.data, grid, kinds, values)

    # face diffusivity from the new carrier fraction
    bx = np.zeros(grid.vx_shape)
    by = np.zeros(grid.vy_shape)
    axf = kernels.avg_x_faces(pct_new, grid.nx, grid.ny)
    ayf = kernels.avg_y_faces(pct_new, grid.nx, grid.ny)
    bx[1 : grid.fx + 1, 1:-1] = axf[0 : grid.fx, :]
    by[1:-1, 1 : grid.fy + 1] = ayf[:, 0 : grid.fy]
    fill_face_ghosts_wrap(grid, bx, by)
    if not grid.periodic_x:
        if grid.bc.left != "inflow":
            bx[1, :] = 0.0  # no diffusive flux through walls
        if grid.bc.right != "outflow":
            bx[grid.fx, :] = 0.0
    if not grid.periodic_y:
        by[:, 1] = 0.0
        by[:, grid.fy] = 0.0

    diag = pct_new[1:-1, 1:-1] / dt

    def fill_c_ghosts(arr, homogeneous):
        k = dict(kinds)
        vals = {} if homogeneous else values
        fill_scalar_ghosts(arr, grid, k, vals)
        return arr

    scratch = np.zeros(grid.scalar_shape)

    def apply_op(x):
        scratch[1:-1, 1:-1] = x
        fill_c_ghosts(scratch, homogeneous=True)
        lap = kernels.varcoef_poisson_apply(
            scratch, bx, by, inv_hx2, inv_hy2, grid.nx, grid.ny
        )
        return diag * x - params.D * lap

    # explicit pieces, all in rate form (amount per unit time)
    rhs = pct_old[1:-1, 1:-1] * c_old.interior / dt
    if advect:
        # carrier velocity flux phi_c v (unmodified fraction) plus J_c
        pc = phi_old[0].data
        fxa = np.zeros(grid.vx_shape)
        fya = np.zeros(grid.vy_shape)
        axc = kernels.avg_x_faces(pc, grid.nx, grid.ny)
        ayc = kernels.avg_y_faces(pc, grid.nx, grid.ny)
        fxa[1 : grid.fx + 1, 1:-1] = axc[0 : grid.fx, :] * v.x[1 : grid.fx + 1, 1:-1]
        fya[1:-1, 1 : grid.fy + 1] = ayc[:, 0 : grid.fy] * v.y[1:-1, 1 : grid.fy + 1]
        fxa += fluxes_new["Jcx"]
        fya += fluxes_new["Jcy"]
        cx = kernels.avg_x_faces(c_old.data, grid.nx, grid.ny)
        cy = kernels.avg_y_faces(c_old.data, grid.nx, grid.ny)
        fxa[1 : grid.fx + 1, 1:-1] *= cx[0 : grid.fx, :]
        fya[1:-1, 1 : grid.fy + 1] *= cy[:, 0 : grid.fy]
        fill_face_ghosts_wrap(grid, fxa, fya)
        rhs -= kernels.div_faces(
            fxa, fya, 1.0 / grid.hx, 1.0 / grid.hy, grid.nx, grid.ny
        )
    if Rc is not None:
        rhs += Rc[1:-1, 1:-1]

    # Dirichlet lift for an inflow side: apply the operator to the boundary
    # extension (zero interior, inhomogeneous ghosts) and move it across
    if values:
        scratch[...] = 0.0
        fill_c_ghosts(scratch, homogeneous=False)
        lap = kernels.varcoef_poisson_apply(
            scratch, bx, by, inv_hx2, inv_hy2, grid.nx, grid.ny
        )
        rhs += params.D * lap

    # increment form: solve A dc = rhs - A c_old
    resid = rhs - apply_op(c_old.interior)
    rscale = float(np.max(np.abs(diag))) * max(1.0, float(np.max(np.abs(c_old.interior))))
    jac = 1.0 / (
        diag
        + params.D
        * (
            (bx[1 : grid.nx + 1, 1:-1] + bx[2 : grid.nx + 2, 1:-1]) * inv_hx2
            + (by[1:-1, 1 : grid.ny + 1] + by[1:-1, 2 : grid.ny + 2]) * inv_hy2
        )
    )
    res = conjugate_gradient(
        apply_op,
        resid,
        rtol=1e-12,
        atol=1e-14 * rscale,
        maxiter=params.cg_maxiter,
        precond=lambda r: jac * r,
        label="ion diffusion",
    )
    out = ScalarField.zeros(grid)
    out.interior[...] = c_old.interior + res.x
    fill_c_ghosts(out.data, homogeneous=False)
    return out
