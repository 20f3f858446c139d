"""Momentum predictor and variable-coefficient pressure projection.

The velocity update splits into two stages.  The predictor solves

    rho_tilde(n+1) v*/dt + visc(v*) + rho3 d(phi_f_tilde) v* =
        rho_tilde(n) v(n)/dt - div(M (x) v(n)) + S_tilde + 0.5 rho1 v(n) R_f

with the viscous operator implicit (coupled in both components through the
shear stress) and everything else explicit; M = rho_f v(n) + J_f(n+1) is the
advected mass flux.  Boundary faces with prescribed velocity are handled by
masking: the operator acts as identity on pinned faces, and their coupling
into free faces enters the right-hand side through a lift of the boundary
extension.  That keeps the masked operator symmetric, so plain CG applies.

The projection then restores the weighted constraint div(a v) = 0 with
a = face-average of phi_f_tilde(n+1).  The pressure solves

    -div(b grad p) = -div(a v*)/dt,     b = a^2 / rho_tilde_face,

with b zeroed on faces whose velocity is prescribed (no correction there)
and a homogeneous Dirichlet condition on an outflow side.  The corrected
velocity is v = v* - dt (b/a) grad p, which decreases the face-weighted
kinetic energy by exactly 0.5 dt^2 (p, -div(b grad p)).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import energetics as en
from . import kernels
from .errors import UnsupportedBC
from .fields import ScalarField, VectorField
from .grid import Grid2D
from .linsolve import conjugate_gradient, remove_mean
from .operators import fill_scalar_ghosts, scalar_bc_kinds
from .params import ModelParams
from .spectral import ModalLaplacian
from .state import State


@dataclass(frozen=True)
class FlowBC:
    """Velocity boundary data beyond the geometric tags on the grid.

    ``lid`` holds tangential wall speeds by side name (a moving lid);
    ``inflow_profile`` is the normal velocity at the left inflow face, one
    value per interior row.  Sides without entries default to rest.
    """

    lid: dict[str, float] = field(default_factory=dict)
    inflow_profile: np.ndarray | None = None
    inflow_c: float | None = None

    def lid_speed(self, side: str) -> float:
        return float(self.lid.get(side, 0.0))


HOMOGENEOUS = FlowBC()


def fill_velocity_ghosts(
    vx: np.ndarray,
    vy: np.ndarray,
    grid: Grid2D,
    fbc: FlowBC = HOMOGENEOUS,
    homogeneous: bool = False,
) -> None:
    """Fill both ghost rings in place.

    Tangential ghosts reflect oddly about walls (2 U_wall - interior),
    outflow copies the last interior value, periodic wraps.  Normal ghosts
    behind pinned faces only feed discarded operator rows and mirror across
    the pinned face.  ``homogeneous=True`` zeroes all boundary data but
    keeps the same linear rules, which is what the masked operator needs.
    """
    nx, ny, fx, fy = grid.nx, grid.ny, grid.fx, grid.fy
    bc = grid.bc

    def speed(side):
        return 0.0 if homogeneous else fbc.lid_speed(side)

    # vx, normal direction first
    if grid.periodic_x:
        vx[0, :] = vx[fx, :]
        vx[fx + 1, :] = vx[1, :]
    else:
        vx[0, :] = vx[2, :]
        if bc.right == "outflow":
            vx[fx + 1, :] = vx[fx, :]
        else:
            vx[fx + 1, :] = vx[fx - 1, :]
    # vx, tangential ghosts
    if grid.periodic_y:
        vx[:, 0] = vx[:, ny]
        vx[:, ny + 1] = vx[:, 1]
    else:
        vx[:, 0] = 2.0 * speed("bottom") - vx[:, 1]
        vx[:, ny + 1] = 2.0 * speed("top") - vx[:, ny]

    # vy, normal direction
    if grid.periodic_y:
        vy[:, 0] = vy[:, fy]
        vy[:, fy + 1] = vy[:, 1]
    else:
        vy[:, 0] = vy[:, 2]
        vy[:, fy + 1] = vy[:, fy - 1]
    # vy, tangential ghosts
    if grid.periodic_x:
        vy[0, :] = vy[nx, :]
        vy[nx + 1, :] = vy[1, :]
    else:
        vy[0, :] = 2.0 * speed("left") - vy[1, :]
        if bc.right == "outflow":
            vy[nx + 1, :] = vy[nx, :]
        else:
            vy[nx + 1, :] = 2.0 * speed("right") - vy[nx, :]


def face_masks(
    grid: Grid2D, fbc: FlowBC
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Pinned-face masks and values on the interior face layouts.

    Returns ``(mask_x, value_x, mask_y, value_y)`` with shapes (fx, ny) and
    (nx, fy), matching the interior slices of the ghosted velocity arrays.
    """
    bc = grid.bc
    mask_x = np.zeros((grid.fx, grid.ny), dtype=bool)
    val_x = np.zeros((grid.fx, grid.ny))
    mask_y = np.zeros((grid.nx, grid.fy), dtype=bool)
    val_y = np.zeros((grid.nx, grid.fy))
    if not grid.periodic_x:
        if bc.left in ("wall", "inflow"):
            mask_x[0, :] = True
            if bc.left == "inflow":
                if fbc.inflow_profile is None:
                    raise UnsupportedBC("inflow side needs an inflow_profile")
                prof = np.asarray(fbc.inflow_profile, dtype=float)
                if prof.shape != (grid.ny,):
                    raise UnsupportedBC(
                        f"inflow_profile must have shape ({grid.ny},), got {prof.shape}"
                    )
                val_x[0, :] = prof
        else:
            raise UnsupportedBC(f"unsupported left velocity bc {bc.left!r}")
        if bc.right == "wall":
            mask_x[-1, :] = True
        elif bc.right != "outflow":
            raise UnsupportedBC(f"unsupported right velocity bc {bc.right!r}")
    if not grid.periodic_y:
        for side, row in (("bottom", 0), ("top", -1)):
            tag = getattr(bc, side)
            if tag != "wall":
                raise UnsupportedBC(f"unsupported {side} velocity bc {tag!r}")
            mask_y[:, row] = True
    return mask_x, val_x, mask_y, val_y


def apply_pinned(v: VectorField, grid: Grid2D, masks) -> None:
    """Write the prescribed values onto pinned faces of ``v`` in place."""
    mask_x, val_x, mask_y, val_y = masks
    xi = v.x[1 : grid.fx + 1, 1 : grid.ny + 1]
    yi = v.y[1 : grid.nx + 1, 1 : grid.fy + 1]
    xi[mask_x] = val_x[mask_x]
    yi[mask_y] = val_y[mask_y]


def faces_of_centers(a: np.ndarray, grid: Grid2D) -> tuple[np.ndarray, np.ndarray]:
    """Two-point averages of a ghosted centered field on interior face slots."""
    ax = kernels.avg_x_faces(a, grid.nx, grid.ny)[0 : grid.fx, :]
    ay = kernels.avg_y_faces(a, grid.nx, grid.ny)[:, 0 : grid.fy]
    return ax, ay


def centers_to_nodes(a: np.ndarray, grid: Grid2D) -> np.ndarray:
    """Four-cell average at nodes, stored at slots [1..nx+1, 1..ny+1]."""
    nx, ny = grid.nx, grid.ny
    out = np.zeros(grid.scalar_shape)
    out[1 : nx + 2, 1 : ny + 2] = 0.25 * (
        a[0 : nx + 1, 0 : ny + 1]
        + a[1 : nx + 2, 0 : ny + 1]
        + a[0 : nx + 1, 1 : ny + 2]
        + a[1 : nx + 2, 1 : ny + 2]
    )
    return out


def node_viscosity(gam_c: np.ndarray, grid: Grid2D) -> np.ndarray:
    """Node-averaged viscosity with the outflow plane stress-free.

    Dropping the shear stress on the outflow node line keeps the masked
    operator symmetric: the one-sided ghost copy would otherwise couple vy
    rows to outflow vx faces without the transpose coupling.
    """
    gam_n = centers_to_nodes(gam_c, grid)
    if grid.bc.right == "outflow":
        gam_n[grid.fx, :] = 0.0
    return gam_n


def momentum_advection(
    Mx: np.ndarray, My: np.ndarray, vx: np.ndarray, vy: np.ndarray, grid: Grid2D
) -> tuple[np.ndarray, np.ndarray]:
    """div(M (x) v) at the velocity faces, centered differencing.

    Like-direction products live at cell centers, cross products at nodes.
    All four inputs must carry current ghosts.  Returns interior-face-shaped
    arrays (fx, ny) and (nx, fy).
    """
    nx, ny, fx, fy = grid.nx, grid.ny, grid.fx, grid.fy
    inv_hx, inv_hy = 1.0 / grid.hx, 1.0 / grid.hy

    # x component: d/dx (Mx vx) via center products on centers 0..fx
    cm = 0.5 * (Mx[0 : fx + 1, 1 : ny + 1] + Mx[1 : fx + 2, 1 : ny + 1])
    cv = 0.5 * (vx[0 : fx + 1, 1 : ny + 1] + vx[1 : fx + 2, 1 : ny + 1])
    cc = cm * cv
    adv_x = (cc[1 : fx + 1, :] - cc[0:fx, :]) * inv_hx
    # plus d/dy (My vx) via node products at (f, jn), f = 1..fx, jn = 1..ny+1
    nm = 0.5 * (My[0:fx, 1 : ny + 2] + My[1 : fx + 1, 1 : ny + 2])
    nv = 0.5 * (vx[1 : fx + 1, 0 : ny + 1] + vx[1 : fx + 1, 1 : ny + 2])
    nn = nm * nv
    adv_x = adv_x + (nn[:, 1 : ny + 1] - nn[:, 0:ny]) * inv_hy

    # y component: d/dy (My vy) via center products on centers 0..fy
    cm = 0.5 * (My[1 : nx + 1, 0 : fy + 1] + My[1 : nx + 1, 1 : fy + 2])
    cv = 0.5 * (vy[1 : nx + 1, 0 : fy + 1] + vy[1 : nx + 1, 1 : fy + 2])
    cc = cm * cv
    adv_y = (cc[:, 1 : fy + 1] - cc[:, 0:fy]) * inv_hy
    # plus d/dx (Mx vy) via node products at (f, jn), f = 1..nx+1, jn = 1..fy
    nm = 0.5 * (Mx[1 : nx + 2, 0:fy] + Mx[1 : nx + 2, 1 : fy + 1])
    nv = 0.5 * (vy[0 : nx + 1, 1 : fy + 1] + vy[1 : nx + 2, 1 : fy + 1])
    nn = nm * nv
    adv_y = adv_y + (nn[1 : nx + 1, :] - nn[0:nx, :]) * inv_hx
    return adv_x, adv_y


def surface_tension(
    phi: tuple[ScalarField, ...],
    mu: tuple[ScalarField, ...],
    params: ModelParams,
) -> tuple[np.ndarray, np.ndarray]:
    """Capillary force at faces from the fraction ratios and potentials.

    S = -mu2 pf grad(phi1/pf) - mu1 pf grad(phi2/pf)
        - 2 delta phi3 grad(mu3 - mu1 - mu2),   pf = phi_f_tilde.

    Returns interior-face-shaped arrays (fx, ny), (nx, fy).
    """
    grid = phi[0].grid
    d = params.delta_eff
    p1, p2, p3 = (f.data for f in phi)
    m1, m2, m3 = (m.data for m in mu)
    pf = p1 + p2 + 2.0 * d * p3
    r1 = p1 / pf
    r2 = p2 / pf
    w = m3 - m1 - m2
    inv_hx, inv_hy = 1.0 / grid.hx, 1.0 / grid.hy
    nx, ny = grid.nx, grid.ny

    def fgrad(a):
        return (
            kernels.grad_x_faces(a, inv_hx, nx, ny)[0 : grid.fx, :],
            kernels.grad_y_faces(a, inv_hy, nx, ny)[:, 0 : grid.fy],
        )

    def favg(a):
        return faces_of_centers(a, grid)

    g1x, g1y = fgrad(r1)
    g2x, g2y = fgrad(r2)
    gwx, gwy = fgrad(w)
    m2fx, m2fy = favg(m2 * pf)
    m1fx, m1fy = favg(m1 * pf)
    p3x, p3y = favg(2.0 * d * p3)
    sx = -m2fx * g1x - m1fx * g2x - p3x * gwx
    sy = -m2fy * g1y - m1fy * g2y - p3y * gwy
    return sx, sy


def masked_momentum_operator(
    grid: Grid2D,
    dt: float,
    gam_c: np.ndarray,
    gam_n: np.ndarray,
    rtx: np.ndarray,
    rty: np.ndarray,
    drag_x: np.ndarray,
    drag_y: np.ndarray,
    masks,
):
    """Packed symmetric operator of the implicit predictor.

    Acting on the concatenation of both interior velocity components:
    mass/dt + drag on the diagonal plus the viscous stencil, with pinned
    faces replaced by identity rows and their couplings projected out on
    both sides.  Returns ``(apply, jacobi_diag, n_x)`` where ``n_x`` is the
    offset of the vy block.
    """
    nx, ny, fx, fy = grid.nx, grid.ny, grid.fx, grid.fy
    inv_hx, inv_hy = 1.0 / grid.hx, 1.0 / grid.hy
    mask_x, _, mask_y, _ = masks
    n_x = fx * ny
    scr_x = np.zeros(grid.vx_shape)
    scr_y = np.zeros(grid.vy_shape)

    def apply_op(u):
        ux = u[:n_x].reshape(fx, ny).copy()
        uy = u[n_x:].reshape(nx, fy).copy()
        keep_x = ux[mask_x]
        keep_y = uy[mask_y]
        ux[mask_x] = 0.0
        uy[mask_y] = 0.0
        scr_x[...] = 0.0
        scr_y[...] = 0.0
        scr_x[1 : fx + 1, 1 : ny + 1] = ux
        scr_y[1 : nx + 1, 1 : fy + 1] = uy
        fill_velocity_ghosts(scr_x, scr_y, grid, homogeneous=True)
        ax, ay = kernels.visc_apply(
            scr_x, scr_y, gam_c, gam_n, inv_hx, inv_hy, nx, ny, fx, fy
        )
        out_x = rtx * ux / dt + drag_x * ux + ax
        out_y = rty * uy / dt + drag_y * uy + ay
        out_x[mask_x] = keep_x
        out_y[mask_y] = keep_y
        return np.concatenate([out_x.ravel(), out_y.ravel()])

    diag_x = (
        rtx / dt
        + drag_x
        + 2.0 * (gam_c[0:fx, 1 : ny + 1] + gam_c[1 : fx + 1, 1 : ny + 1]) * inv_hx**2
        + (gam_n[1 : fx + 1, 1 : ny + 1] + gam_n[1 : fx + 1, 2 : ny + 2]) * inv_hy**2
    )
    diag_y = (
        rty / dt
        + drag_y
        + 2.0 * (gam_c[1 : nx + 1, 0:fy] + gam_c[1 : nx + 1, 1 : fy + 1]) * inv_hy**2
        + (gam_n[1 : nx + 1, 1 : fy + 1] + gam_n[2 : nx + 2, 1 : fy + 1]) * inv_hx**2
    )
    diag_x[mask_x] = 1.0
    diag_y[mask_y] = 1.0
    diag = np.concatenate([diag_x.ravel(), diag_y.ravel()])
    return apply_op, diag, n_x


def momentum_predict(
    state: State,
    new_phi: tuple[ScalarField, ...],
    new_mu: tuple[ScalarField, ...],
    fluxes: dict[str, np.ndarray],
    reactions: en.Reactions | None,
    dt: float,
    params: ModelParams,
    fbc: FlowBC,
) -> tuple[VectorField, int]:
    """Solve the implicit-viscosity predictor; returns (v*, cg_iterations)."""
    grid = state.grid
    nx, ny, fx, fy = grid.nx, grid.ny, grid.fx, grid.fy
    inv_hx, inv_hy = 1.0 / grid.hx, 1.0 / grid.hy
    masks = face_masks(grid, fbc)
    mask_x, val_x, mask_y, val_y = masks

    vn = state.v.copy()
    apply_pinned(vn, grid, masks)
    fill_velocity_ghosts(vn.x, vn.y, grid, fbc)

    mix_old = en.delta_modified(tuple(f.data for f in state.phi), params)
    mix_new = en.delta_modified(tuple(f.data for f in new_phi), params)
    rtx_old, rty_old = faces_of_centers(mix_old.rho_f_tilde, grid)
    rtx_new, rty_new = faces_of_centers(mix_new.rho_f_tilde, grid)
    gam_c = mix_new.gamma_tilde
    gam_n = node_viscosity(gam_c, grid)
    drag_c = params.rho3 * en.drag(mix_new.phi_f_tilde, params.d0)
    drag_x, drag_y = faces_of_centers(drag_c, grid)

    # advected mass flux M = rho_f v + J_f on faces, with wrap ghosts
    rfx, rfy = faces_of_centers(mix_old.rho_f, grid)
    Mx = np.zeros(grid.vx_shape)
    My = np.zeros(grid.vy_shape)
    Mx[1 : fx + 1, 1 : ny + 1] = rfx * vn.x[1 : fx + 1, 1 : ny + 1]
    My[1 : nx + 1, 1 : fy + 1] = rfy * vn.y[1 : nx + 1, 1 : fy + 1]
    Mx += fluxes["Jfx"]
    My += fluxes["Jfy"]
    if grid.periodic_x:
        Mx[0, :] = Mx[fx, :]
        Mx[fx + 1, :] = Mx[1, :]
        My[0, :] = My[nx, :]
        My[nx + 1, :] = My[1, :]
    else:
        Mx[0, :] = Mx[2, :]
        Mx[fx + 1, :] = Mx[fx - 1, :] if grid.bc.right != "outflow" else Mx[fx, :]
        My[0, :] = My[1, :]
        My[nx + 1, :] = My[nx, :]
    if grid.periodic_y:
        Mx[:, 0] = Mx[:, ny]
        Mx[:, ny + 1] = Mx[:, 1]
        My[:, 0] = My[:, fy]
        My[:, fy + 1] = My[:, 1]
    else:
        Mx[:, 0] = Mx[:, 1]
        Mx[:, ny + 1] = Mx[:, ny]
        My[:, 0] = My[:, 2]
        My[:, fy + 1] = My[:, fy - 1]

    adv_x, adv_y = momentum_advection(Mx, My, vn.x, vn.y, grid)
    sx, sy = surface_tension(new_phi, new_mu, params)

    rhs_x = rtx_old * vn.x[1 : fx + 1, 1 : ny + 1] / dt - adv_x + sx
    rhs_y = rty_old * vn.y[1 : nx + 1, 1 : fy + 1] / dt - adv_y + sy
    if reactions is not None:
        rf_x, rf_y = faces_of_centers(np.asarray(reactions.Rf), grid)
        rhs_x = rhs_x + 0.5 * params.rho1 * vn.x[1 : fx + 1, 1 : ny + 1] * rf_x
        rhs_y = rhs_y + 0.5 * params.rho1 * vn.y[1 : nx + 1, 1 : fy + 1] * rf_y

    # lift the boundary extension: pinned values plus inhomogeneous ghosts
    ex = np.zeros(grid.vx_shape)
    ey = np.zeros(grid.vy_shape)
    ex[1 : fx + 1, 1 : ny + 1][mask_x] = val_x[mask_x]
    ey[1 : nx + 1, 1 : fy + 1][mask_y] = val_y[mask_y]
    fill_velocity_ghosts(ex, ey, grid, fbc)
    lift_x, lift_y = kernels.visc_apply(
        ex, ey, gam_c, gam_n, inv_hx, inv_hy, nx, ny, fx, fy
    )
    rhs_x = rhs_x - lift_x
    rhs_y = rhs_y - lift_y
    rhs_x[mask_x] = val_x[mask_x]
    rhs_y[mask_y] = val_y[mask_y]

    apply_op, diag, n_x = masked_momentum_operator(
        grid, dt, gam_c, gam_n, rtx_new, rty_new, drag_x, drag_y, masks
    )

    def pack(ax, ay):
        return np.concatenate([ax.ravel(), ay.ravel()])

    x0_x = vn.x[1 : fx + 1, 1 : ny + 1].copy()
    x0_y = vn.y[1 : nx + 1, 1 : fy + 1].copy()
    x0_x[mask_x] = val_x[mask_x]
    x0_y[mask_y] = val_y[mask_y]

    res = conjugate_gradient(
        apply_op,
        pack(rhs_x, rhs_y),
        x0=pack(x0_x, x0_y),
        rtol=params.cg_rtol,
        maxiter=params.cg_maxiter,
        precond=lambda r: r / diag,
        label="momentum",
    )
    v_star = VectorField.zeros(grid)
    v_star.x[1 : fx + 1, 1 : ny + 1] = res.x[:n_x].reshape(fx, ny)
    v_star.y[1 : nx + 1, 1 : fy + 1] = res.x[n_x:].reshape(nx, fy)
    apply_pinned(v_star, grid, masks)
    fill_velocity_ghosts(v_star.x, v_star.y, grid, fbc)
    return v_star, res.iterations


def pressure_project(
    v_star: VectorField,
    new_phi: tuple[ScalarField, ...],
    dt: float,
    params: ModelParams,
    fbc: FlowBC,
    modal: ModalLaplacian | None = None,
) -> tuple[VectorField, ScalarField, dict]:
    """Make div(a v) vanish; returns (v, p, info).

    ``a`` is the face average of phi_f_tilde; the pressure equation uses
    b = a^2 / rho_tilde_face, zeroed on pinned faces.  With an outflow side
    the pressure is held at zero there; otherwise the all-Neumann problem is
    solved in the mean-free subspace with a constant-coefficient modal
    preconditioner.
    """
    mix = en.delta_modified(tuple(f.data for f in new_phi), params)
    grid = v_star.grid
    ax_i, ay_i = faces_of_centers(mix.phi_f_tilde, grid)
    rx_i, ry_i = faces_of_centers(mix.rho_f_tilde, grid)
    return project_faces(v_star, ax_i, ay_i, rx_i, ry_i, dt, params, modal)


def project_faces(
    v_star: VectorField,
    ax_i: np.ndarray,
    ay_i: np.ndarray,
    rx_i: np.ndarray,
    ry_i: np.ndarray,
    dt: float,
    params: ModelParams,
    modal: ModalLaplacian | None = None,
) -> tuple[VectorField, ScalarField, dict]:
    """Projection core for given face weights ``a`` and densities ``rho``."""
    grid = v_star.grid
    nx, ny, fx, fy = grid.nx, grid.ny, grid.fx, grid.fy
    inv_hx, inv_hy = 1.0 / grid.hx, 1.0 / grid.hy
    bc = grid.bc
    has_outflow = bc.right == "outflow"

    bx_i = ax_i**2 / rx_i
    by_i = ay_i**2 / ry_i
    if not grid.periodic_x:
        bx_i[0, :] = 0.0  # wall or inflow: velocity prescribed, no correction
        if bc.right == "wall":
            bx_i[-1, :] = 0.0
    if not grid.periodic_y:
        by_i[:, 0] = 0.0
        by_i[:, -1] = 0.0

    bxa = np.zeros(grid.vx_shape)
    bya = np.zeros(grid.vy_shape)
    bxa[1 : fx + 1, 1 : ny + 1] = bx_i
    bya[1 : nx + 1, 1 : fy + 1] = by_i
    if grid.periodic_x:
        bxa[0, :] = bxa[fx, :]
        bxa[fx + 1, :] = bxa[1, :]
    if grid.periodic_y:
        bya[:, 0] = bya[:, fy]
        bya[:, fy + 1] = bya[:, 1]

    # weighted divergence of the predictor
    Fx = np.zeros(grid.vx_shape)
    Fy = np.zeros(grid.vy_shape)
    Fx[1 : fx + 1, 1 : ny + 1] = ax_i * v_star.x[1 : fx + 1, 1 : ny + 1]
    Fy[1 : nx + 1, 1 : fy + 1] = ay_i * v_star.y[1 : nx + 1, 1 : fy + 1]
    if grid.periodic_x:
        Fx[0, :] = Fx[fx, :]
        Fx[fx + 1, :] = Fx[1, :]
    if grid.periodic_y:
        Fy[:, 0] = Fy[:, fy]
        Fy[:, fy + 1] = Fy[:, 1]
    rhs = -kernels.div_faces(Fx, Fy, inv_hx, inv_hy, nx, ny) / dt

    kinds = scalar_bc_kinds(grid)
    if has_outflow:
        kinds["right"] = "dirichlet"
    scratch = np.zeros(grid.scalar_shape)

    def apply_op(x):
        scratch[1:-1, 1:-1] = x
        fill_scalar_ghosts(scratch, grid, kinds)
        return -kernels.varcoef_poisson_apply(
            scratch, bxa, bya, inv_hx**2, inv_hy**2, nx, ny
        )

    if has_outflow:
        project = None
        diag = (bxa[1 : nx + 1, 1:-1] + bxa[2 : nx + 2, 1:-1]) * inv_hx**2 + (
            bya[1:-1, 1 : ny + 1] + bya[1:-1, 2 : ny + 2]
        ) * inv_hy**2
        # the Dirichlet fold doubles the outflow-face weight
        diag[-1, :] += bxa[fx, 1:-1] * inv_hx**2

        def precond(r):
            return r / diag
    else:
        rhs = remove_mean(rhs)
        project = remove_mean
        if modal is None:
            modal = ModalLaplacian(grid)
        bbar = 0.5 * (float(np.mean(bx_i)) + float(np.mean(by_i)))
        precond = modal.make_poisson_preconditioner(max(bbar, 1e-30))

    res = conjugate_gradient(
        apply_op,
        rhs,
        rtol=params.cg_rtol,
        maxiter=params.cg_maxiter,
        precond=precond,
        project=project,
        label="pressure",
    )

    p = ScalarField.zeros(grid)
    p.interior[...] = res.x
    fill_scalar_ghosts(p.data, grid, kinds)

    gpx = kernels.grad_x_faces(p.data, inv_hx, nx, ny)[0:fx, :]
    gpy = kernels.grad_y_faces(p.data, inv_hy, nx, ny)[:, 0:fy]
    cfx = np.where(ax_i > 0.0, bx_i / np.where(ax_i > 0.0, ax_i, 1.0), 0.0)
    cfy = np.where(ay_i > 0.0, by_i / np.where(ay_i > 0.0, ay_i, 1.0), 0.0)
    v = v_star.copy()
    v.x[1 : fx + 1, 1 : ny + 1] -= dt * cfx * gpx
    v.y[1 : nx + 1, 1 : fy + 1] -= dt * cfy * gpy

    Fx[1 : fx + 1, 1 : ny + 1] = ax_i * v.x[1 : fx + 1, 1 : ny + 1]
    Fy[1 : nx + 1, 1 : fy + 1] = ay_i * v.y[1 : nx + 1, 1 : fy + 1]
    if grid.periodic_x:
        Fx[0, :] = Fx[fx, :]
        Fx[fx + 1, :] = Fx[1, :]
    if grid.periodic_y:
        Fy[:, 0] = Fy[:, fy]
        Fy[:, fy + 1] = Fy[:, 1]
    div_after = kernels.div_faces(Fx, Fy, inv_hx, inv_hy, nx, ny)
    info = {
        "pressure_iterations": res.iterations,
        "div_weighted_inf": float(np.max(np.abs(div_after))),
    }
    return v, p, info


def step_flow(
    state: State,
    new_phi: tuple[ScalarField, ...],
    new_mu: tuple[ScalarField, ...],
    fluxes: dict[str, np.ndarray],
    reactions: en.Reactions | None,
    dt: float,
    params: ModelParams,
    fbc: FlowBC,
    modal: ModalLaplacian | None = None,
) -> tuple[VectorField, ScalarField, dict]:
    """Predictor plus projection; returns (v(n+1), p(n+1), info)."""
    v_star, mom_iters = momentum_predict(
        state, new_phi, new_mu, fluxes, reactions, dt, params, fbc
    )
    v, p, info = pressure_project(v_star, new_phi, dt, params, fbc, modal)
    fill_velocity_ghosts(v.x, v.y, grid=state.grid, fbc=fbc)
    info["momentum_iterations"] = mom_iters
    return v, p, info
