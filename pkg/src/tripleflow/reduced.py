"""Independent two-phase reference models for consistency checks.

Dropping one phase from the ternary system by hand leaves two classical
models: a pair of immiscible fluids with no solid (phases 1 and 2), and a
single fluid against a reacting solid (phases 1 and 3).  Both are coded
here from the reduced equations.  The well gradient of an active phase
collapses to ``Sigma_i w'(phi_i)`` because the projector's cross terms
cancel pairwise on the binary constraint, the absent phase's potential
vanishes identically, and the delta-shifted mixture coefficients keep
their offsets.  Only coefficient-agnostic numerics are shared with the
production stepper (stencil kernels, the modal factorization, CG, the
masked momentum operator and projection core); every model formula is
spelled out reduced, so agreement between the two routes checks the
ternary-to-binary algebra rather than one code against itself.

Scope: closed wall boxes without driven boundaries, which is all the
consistency smoke tests need.
"""

from __future__ import annotations

import numpy as np

from . import energetics as en
from . import flow, kernels
from .errors import UnsupportedBC
from .fields import ScalarField, VectorField
from .grid import Grid2D
from .linsolve import conjugate_gradient
from .operators import fill_scalar_ghosts, scalar_bc_kinds
from .params import ModelParams
from .phasefield import stabilization_s
from .spectral import ModalLaplacian
from .state import State


def _neumann(arr: np.ndarray, grid: Grid2D) -> np.ndarray:
    fill_scalar_ghosts(arr, grid, scalar_bc_kinds(grid))
    return arr


class ReducedPairStepper:
    """Reference stepper for one binary reduction of the ternary model.

    ``kind`` selects the pair: ``"2f0s"`` evolves fluids 1 and 2 with the
    solid absent, ``"1f1s"`` evolves fluid 1 against the solid with the
    second fluid absent (and the precipitation reaction active).
    """

    def __init__(self, grid: Grid2D, params: ModelParams, kind: str):
        if kind not in ("2f0s", "1f1s"):
            raise ValueError(f"unknown reduction {kind!r}")
        sides = (grid.bc.left, grid.bc.right, grid.bc.bottom, grid.bc.top)
        if any(s != "wall" for s in sides):
            raise UnsupportedBC("reduced reference steppers run in closed wall boxes")
        self.grid = grid
        self.params = params
        self.kind = kind
        self.active = (0, 1) if kind == "2f0s" else (0, 2)
        self.absent = 2 if kind == "2f0s" else 1
        self.modal = ModalLaplacian(grid)

    # -- reduced model algebra -------------------------------------------

    def potentials(self, phi: tuple[ScalarField, ...]) -> tuple[ScalarField, ...]:
        """Binary potentials; the cross-phase projector terms are zero."""
        grid, p = self.grid, self.params
        inv_hx2, inv_hy2 = 1.0 / grid.hx**2, 1.0 / grid.hy**2
        out = [ScalarField.zeros(grid) for _ in range(3)]
        for i in self.active:
            _neumann(phi[i].data, grid)
            dw = p.Sigmas[i] * en.w_dw_prime(phi[i].data, p.delta_eff)
            lap = kernels.laplacian(phi[i].data, inv_hx2, inv_hy2, grid.nx, grid.ny)
            out[i].interior[...] = dw[1:-1, 1:-1] / p.eps - p.eps * p.Sigmas[i] * lap
            _neumann(out[i].data, grid)
        return tuple(out)

    def reaction(self, state: State) -> np.ndarray | None:
        """Precipitation source R1 at the old state; None for the fluid pair."""
        if self.kind == "2f0s":
            return None
        p = self.params
        phi1 = state.phi[0].data
        phi3 = state.phi[2].data
        c = state.c.data
        a, c0 = p.g.a, p.g.c0
        r = a * (c - c0) ** 2 + 2.0 * a * (c - c0) * (p.c_star - c)
        at = p.alpha if p.alpha > 0.0 else p.eps
        q = 6.0 * phi1 * phi3
        return -(q / p.eps) * (r + at * state.mu[0].data - at * state.mu[2].data)

    def mixture(self, phi: tuple[ScalarField, ...]):
        """Reduced delta-shifted coefficients (pf, rho_f, rho_f~, gamma~, drag)."""
        p = self.params
        d = p.delta_eff
        gsum = 1.0 / p.gamma1 + 1.0 / p.gamma2 + 1.0 / p.gamma3
        if self.kind == "2f0s":
            p1, p2 = phi[0].data, phi[1].data
            pf = p1 + p2
            rho_f = p.rho1 * p1 + p.rho2 * p2
            inv_gam = p1 / p.gamma1 + p2 / p.gamma2 + d * gsum
            drag = np.zeros_like(pf)
        else:
            p1, p3 = phi[0].data, phi[2].data
            pf = p1 + 2.0 * d * p3
            rho_f = p.rho1 * p1
            inv_gam = p1 / p.gamma1 + p3 / p.gamma3 + d * gsum
            drag = p.rho3 * p.d0 * (1.0 - np.clip(pf, 0.0, 1.0))
        rho_ft = rho_f + (p.rho1 + p.rho2) * d
        return pf, rho_f, rho_ft, 1.0 / inv_gam, drag

    def capillary(self, phi, mu):
        """Reduced surface-tension force on faces."""
        grid, p = self.grid, self.params
        d = p.delta_eff
        inv_hx, inv_hy = 1.0 / grid.hx, 1.0 / grid.hy
        nx, ny = grid.nx, grid.ny

        def fgrad(arr):
            return (
                kernels.grad_x_faces(arr, inv_hx, nx, ny)[0 : grid.fx, :],
                kernels.grad_y_faces(arr, inv_hy, nx, ny)[:, 0 : grid.fy],
            )

        if self.kind == "2f0s":
            p1, p2 = phi[0].data, phi[1].data
            pf = p1 + p2
            g1x, g1y = fgrad(p1 / pf)
            g2x, g2y = fgrad(p2 / pf)
            m2x, m2y = flow.faces_of_centers(mu[1].data * pf, grid)
            m1x, m1y = flow.faces_of_centers(mu[0].data * pf, grid)
            sx = -m2x * g1x - m1x * g2x
            sy = -m2y * g1y - m1y * g2y
        else:
            p1, p3 = phi[0].data, phi[2].data
            pf = p1 + 2.0 * d * p3
            # phi2/pf is identically zero, so only the ratio of phase 1 and
            # the potential-difference term survive
            g1x, g1y = fgrad(p1 / pf)
            gwx, gwy = fgrad(mu[2].data - mu[0].data)
            m2x = m2y = 0.0
            p3x, p3y = flow.faces_of_centers(2.0 * d * p3, grid)
            sx = -p3x * gwx
            sy = -p3y * gwy
        return sx, sy

    # -- one reduced step -------------------------------------------------

    def step(self, state: State, dt: float) -> State:
        grid, p = self.grid, self.params
        d = p.delta_eff
        nx, ny, fx, fy = grid.nx, grid.ny, grid.fx, grid.fy
        inv_hx, inv_hy = 1.0 / grid.hx, 1.0 / grid.hy
        inv_hx2, inv_hy2 = inv_hx**2, inv_hy**2

        flow.fill_velocity_ghosts(state.v.x, state.v.y, grid, flow.HOMOGENEOUS)
        R1 = self.reaction(state)

        # fraction update, same semi-implicit split as production
        s = stabilization_s(p)
        new_phi = [ScalarField.zeros(grid) for _ in range(3)]
        for i in self.active:
            f = state.phi[i]
            _neumann(f.data, grid)
            rhs = f.interior.copy()
            weight = f.data if i < 2 else 2.0 * d * f.data
            ax = kernels.avg_x_faces(weight, nx, ny)
            ay = kernels.avg_y_faces(weight, nx, ny)
            fxa = np.zeros(grid.vx_shape)
            fya = np.zeros(grid.vy_shape)
            fxa[1 : fx + 1, 1:-1] = ax[0:fx, :] * state.v.x[1 : fx + 1, 1:-1]
            fya[1:-1, 1 : fy + 1] = ay[:, 0:fy] * state.v.y[1:-1, 1 : fy + 1]
            rhs -= dt * kernels.div_faces(fxa, fya, inv_hx, inv_hy, nx, ny)
            if R1 is not None:
                sgn = 1.0 if i == 0 else -1.0
                rhs += dt * sgn * R1[1:-1, 1:-1]
            dw = _neumann(p.Sigmas[i] * en.w_dw_prime(f.data, d), grid)
            rhs += (dt / p.Sigmas[i]) * kernels.laplacian(dw, inv_hx2, inv_hy2, nx, ny)
            rhs -= dt * s * kernels.laplacian(f.data, inv_hx2, inv_hy2, nx, ny)
            new_phi[i].interior[...] = self.modal.solve_polynomial(
                rhs, (1.0, dt * s, dt * p.eps**2)
            )
        new_phi = tuple(new_phi)
        new_mu = self.potentials(new_phi)

        # diffusive fluxes of the active pair
        J: dict[int, tuple[np.ndarray, np.ndarray]] = {}
        for i in self.active:
            coef = -p.eps / p.Sigmas[i]
            jx = np.zeros(grid.vx_shape)
            jy = np.zeros(grid.vy_shape)
            gx = kernels.grad_x_faces(new_mu[i].data, inv_hx, nx, ny)
            gy = kernels.grad_y_faces(new_mu[i].data, inv_hy, nx, ny)
            jx[1 : fx + 1, 1:-1] = coef * gx[0:fx, :]
            jy[1:-1, 1 : fy + 1] = coef * gy[:, 0:fy]
            J[i] = (jx, jy)
        if self.kind == "2f0s":
            Jfx = p.rho1 * J[0][0] + p.rho2 * J[1][0]
            Jfy = p.rho1 * J[0][1] + p.rho2 * J[1][1]
        else:
            Jfx = p.rho1 * J[0][0]
            Jfy = p.rho1 * J[0][1]
        Jcx, Jcy = J[0]

        new_c = self._concentration(state, new_phi, (Jcx, Jcy), R1, dt)
        new_v, new_p = self._flow(state, new_phi, new_mu, (Jfx, Jfy), R1, dt)

        return State(
            grid=grid,
            phi=new_phi,
            mu=new_mu,
            c=new_c,
            p=new_p,
            v=new_v,
            time=state.time + dt,
        )

    def _concentration(self, state, new_phi, Jc, R1, dt):
        grid, p = self.grid, self.params
        nx, ny, fx, fy = grid.nx, grid.ny, grid.fx, grid.fy
        inv_hx, inv_hy = 1.0 / grid.hx, 1.0 / grid.hy
        inv_hx2, inv_hy2 = inv_hx**2, inv_hy**2
        d = p.delta_eff

        pct_new = d + new_phi[0].data
        pct_old = d + state.phi[0].data
        _neumann(state.c.data, grid)

        bx = np.zeros(grid.vx_shape)
        by = np.zeros(grid.vy_shape)
        axf = kernels.avg_x_faces(pct_new, nx, ny)
        ayf = kernels.avg_y_faces(pct_new, nx, ny)
        bx[1 : fx + 1, 1:-1] = axf[0:fx, :]
        by[1:-1, 1 : fy + 1] = ayf[:, 0:fy]
        bx[1, :] = 0.0
        bx[fx, :] = 0.0
        by[:, 1] = 0.0
        by[:, fy] = 0.0

        diag = pct_new[1:-1, 1:-1] / dt
        scratch = np.zeros(grid.scalar_shape)

        def apply_op(x):
            scratch[1:-1, 1:-1] = x
            _neumann(scratch, grid)
            lap = kernels.varcoef_poisson_apply(scratch, bx, by, inv_hx2, inv_hy2, nx, ny)
            return diag * x - p.D * lap

        rhs = pct_old[1:-1, 1:-1] * state.c.interior / dt
        pc = state.phi[0].data
        fxa = np.zeros(grid.vx_shape)
        fya = np.zeros(grid.vy_shape)
        axc = kernels.avg_x_faces(pc, nx, ny)
        ayc = kernels.avg_y_faces(pc, nx, ny)
        fxa[1 : fx + 1, 1:-1] = axc[0:fx, :] * state.v.x[1 : fx + 1, 1:-1]
        fya[1:-1, 1 : fy + 1] = ayc[:, 0:fy] * state.v.y[1:-1, 1 : fy + 1]
        fxa += Jc[0]
        fya += Jc[1]
        cx = kernels.avg_x_faces(state.c.data, nx, ny)
        cy = kernels.avg_y_faces(state.c.data, nx, ny)
        fxa[1 : fx + 1, 1:-1] *= cx[0:fx, :]
        fya[1:-1, 1 : fy + 1] *= cy[:, 0:fy]
        rhs -= kernels.div_faces(fxa, fya, inv_hx, inv_hy, nx, ny)
        if R1 is not None:
            rhs += p.c_star * R1[1:-1, 1:-1]

        resid = rhs - apply_op(state.c.interior)
        rscale = float(np.max(np.abs(diag))) * max(
            1.0, float(np.max(np.abs(state.c.interior)))
        )
        jac = 1.0 / (
            diag
            + p.D
            * (
                (bx[1 : nx + 1, 1:-1] + bx[2 : nx + 2, 1:-1]) * inv_hx2
                + (by[1:-1, 1 : ny + 1] + by[1:-1, 2 : ny + 2]) * inv_hy2
            )
        )
        res = conjugate_gradient(
            apply_op,
            resid,
            rtol=1e-12,
            atol=1e-14 * rscale,
            maxiter=p.cg_maxiter,
            precond=lambda r: jac * r,
            label="reduced ion diffusion",
        )
        out = ScalarField.zeros(grid)
        out.interior[...] = state.c.interior + res.x
        return out

    def _flow(self, state, new_phi, new_mu, Jf, R1, dt):
        grid, p = self.grid, self.params
        nx, ny, fx, fy = grid.nx, grid.ny, grid.fx, grid.fy
        inv_hx, inv_hy = 1.0 / grid.hx, 1.0 / grid.hy
        masks = flow.face_masks(grid, flow.HOMOGENEOUS)
        mask_x, val_x, mask_y, val_y = masks

        vn = state.v.copy()
        flow.apply_pinned(vn, grid, masks)
        flow.fill_velocity_ghosts(vn.x, vn.y, grid, flow.HOMOGENEOUS)

        pf_old, rho_f_old, rho_ft_old, _, _ = self.mixture(state.phi)
        pf_new, _, rho_ft_new, gam_c, drag_c = self.mixture(new_phi)
        rtx_old, rty_old = flow.faces_of_centers(rho_ft_old, grid)
        rtx_new, rty_new = flow.faces_of_centers(rho_ft_new, grid)
        gam_n = flow.node_viscosity(gam_c, grid)
        drag_x, drag_y = flow.faces_of_centers(drag_c, grid)

        rfx, rfy = flow.faces_of_centers(rho_f_old, grid)
        Mx = np.zeros(grid.vx_shape)
        My = np.zeros(grid.vy_shape)
        Mx[1 : fx + 1, 1 : ny + 1] = rfx * vn.x[1 : fx + 1, 1 : ny + 1]
        My[1 : nx + 1, 1 : fy + 1] = rfy * vn.y[1 : nx + 1, 1 : fy + 1]
        Mx += Jf[0]
        My += Jf[1]
        Mx[0, :] = Mx[2, :]
        Mx[fx + 1, :] = Mx[fx - 1, :]
        My[0, :] = My[1, :]
        My[nx + 1, :] = My[nx, :]
        Mx[:, 0] = Mx[:, 1]
        Mx[:, ny + 1] = Mx[:, ny]
        My[:, 0] = My[:, 2]
        My[:, fy + 1] = My[:, fy - 1]

        adv_x, adv_y = flow.momentum_advection(Mx, My, vn.x, vn.y, grid)
        sx, sy = self.capillary(new_phi, new_mu)

        rhs_x = rtx_old * vn.x[1 : fx + 1, 1 : ny + 1] / dt - adv_x + sx
        rhs_y = rty_old * vn.y[1 : nx + 1, 1 : fy + 1] / dt - adv_y + sy
        if R1 is not None:
            rf_x, rf_y = flow.faces_of_centers(R1, grid)
            rhs_x = rhs_x + 0.5 * p.rho1 * vn.x[1 : fx + 1, 1 : ny + 1] * rf_x
            rhs_y = rhs_y + 0.5 * p.rho1 * vn.y[1 : nx + 1, 1 : fy + 1] * rf_y
        rhs_x[mask_x] = 0.0
        rhs_y[mask_y] = 0.0

        apply_op, diag, n_x = flow.masked_momentum_operator(
            grid, dt, gam_c, gam_n, rtx_new, rty_new, drag_x, drag_y, masks
        )
        x0_x = vn.x[1 : fx + 1, 1 : ny + 1].copy()
        x0_y = vn.y[1 : nx + 1, 1 : fy + 1].copy()
        x0_x[mask_x] = 0.0
        x0_y[mask_y] = 0.0
        res = conjugate_gradient(
            apply_op,
            np.concatenate([rhs_x.ravel(), rhs_y.ravel()]),
            x0=np.concatenate([x0_x.ravel(), x0_y.ravel()]),
            rtol=p.cg_rtol,
            maxiter=p.cg_maxiter,
            precond=lambda r: r / diag,
            label="reduced momentum",
        )
        v_star = VectorField.zeros(grid)
        v_star.x[1 : fx + 1, 1 : ny + 1] = res.x[:n_x].reshape(fx, ny)
        v_star.y[1 : nx + 1, 1 : fy + 1] = res.x[n_x:].reshape(nx, fy)
        flow.apply_pinned(v_star, grid, masks)
        flow.fill_velocity_ghosts(v_star.x, v_star.y, grid, flow.HOMOGENEOUS)

        ax_i, ay_i = flow.faces_of_centers(pf_new, grid)
        rx_i, ry_i = flow.faces_of_centers(rho_ft_new, grid)
        v, pres, _ = flow.project_faces(
            v_star, ax_i, ay_i, rx_i, ry_i, dt, p, self.modal
        )
        flow.fill_velocity_ghosts(v.x, v.y, grid, flow.HOMOGENEOUS)
        return v, pres
