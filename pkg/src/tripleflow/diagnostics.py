"""Conservation totals, energy bookkeeping, and the dissipation audit.

The free energy splits into three monitored parts: face-weighted kinetic
energy (same metric the pressure projection contracts), the Ginzburg-Landau
part (multi-well plus gradient terms), and the ion-mixture part
``g(c) phi_c_tilde / alpha_tilde``.  Totals use plain midpoint quadrature,
cell volume times the interior sum, which is what the discrete schemes
conserve exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from . import energetics as en
from . import flow, kernels
from .operators import fill_scalar_ghosts, scalar_bc_kinds
from .params import ModelParams
from .state import State

DIAG_TAG = "tripleflow-diag-v1"

DIAG_COLUMNS = (
    "time",
    "total_mass",
    "total_ions",
    "F_total",
    "F_kinetic",
    "F_GL",
    "F_mixture",
    "dF_step",
    "res_partition",
    "res_chempot",
    "res_divergence",
    "max_speed",
)


class EnergyBreakdown(NamedTuple):
    total: float
    kinetic: float
    gl: float
    mixture: float


@dataclass(frozen=True)
class DiagnosticsRecord:
    time: float
    total_mass: float
    total_ions: float
    F_total: float
    F_kinetic: float
    F_GL: float
    F_mixture: float
    dF_step: float
    res_partition: float
    res_chempot: float
    res_divergence: float
    max_speed: float

    def as_row(self) -> tuple[float, ...]:
        return tuple(getattr(self, name) for name in DIAG_COLUMNS)


def free_energy(state: State, params: ModelParams) -> EnergyBreakdown:
    """Evaluate the monitored energy and its three parts."""
    grid = state.grid
    vol = grid.cell_volume
    kinds = scalar_bc_kinds(grid)
    for f in state.phi:
        fill_scalar_ghosts(f.data, grid, kinds)
    Phi = tuple(f.data for f in state.phi)
    mix = en.delta_modified(Phi, params)

    rx, ry = flow.faces_of_centers(mix.rho_f_tilde, grid)
    ex = rx * state.v.x[1 : grid.fx + 1, 1:-1] ** 2
    ey = ry * state.v.y[1:-1, 1 : grid.fy + 1] ** 2
    kinetic = 0.5 * vol * (float(np.sum(ex)) + float(np.sum(ey)))

    d = params.delta_eff
    well = en.W(tuple(p[1:-1, 1:-1] for p in Phi), d, params.Sigmas, params.SigmaT)
    gl = float(np.sum(well)) * vol / params.eps
    for sig, p in zip(params.Sigmas, Phi):
        gx = kernels.grad_x_faces(p, 1.0 / grid.hx, grid.nx, grid.ny)
        gy = kernels.grad_y_faces(p, 1.0 / grid.hy, grid.nx, grid.ny)
        gsq = float(np.sum(gx[: grid.fx, :] ** 2)) + float(
            np.sum(gy[:, : grid.fy] ** 2)
        )
        gl += 0.5 * params.eps * sig * gsq * vol

    gmix = en.g_eval(state.c.interior, params) * mix.phi_c_tilde[1:-1, 1:-1]
    mixture = float(np.sum(gmix)) * vol / params.alpha_t

    return EnergyBreakdown(kinetic + gl + mixture, kinetic, gl, mixture)


def conserved_totals(state: State, params: ModelParams) -> tuple[float, float]:
    """Total mixture mass and total ion content (fluid plus bound)."""
    grid = state.grid
    Phi = tuple(f.data for f in state.phi)
    mix = en.delta_modified(Phi, params)
    mass = float(np.sum(mix.rho[1:-1, 1:-1])) * grid.cell_volume
    ions = float(
        np.sum(
            mix.phi_c_tilde[1:-1, 1:-1] * state.c.interior
            + params.c_star * Phi[2][1:-1, 1:-1]
        )
    ) * grid.cell_volume
    return mass, ions


def constraint_residuals(state: State, params: ModelParams) -> tuple[float, float, float]:
    """Sup norms of the partition, potential-sum, and weighted-divergence defects."""
    grid = state.grid
    psum = sum(f.interior for f in state.phi)
    res_partition = float(np.max(np.abs(psum - 1.0)))

    msum = sum(m.interior / sig for m, sig in zip(state.mu, params.Sigmas))
    res_chempot = float(np.max(np.abs(msum)))

    Phi = tuple(f.data for f in state.phi)
    mix = en.delta_modified(Phi, params)
    ax, ay = flow.faces_of_centers(mix.phi_f_tilde, grid)
    fx = np.zeros(grid.vx_shape)
    fy = np.zeros(grid.vy_shape)
    fx[1 : grid.fx + 1, 1:-1] = ax * state.v.x[1 : grid.fx + 1, 1:-1]
    fy[1:-1, 1 : grid.fy + 1] = ay * state.v.y[1:-1, 1 : grid.fy + 1]
    div = kernels.div_faces(fx, fy, 1.0 / grid.hx, 1.0 / grid.hy, grid.nx, grid.ny)
    res_div = float(np.max(np.abs(div)))
    return res_partition, res_chempot, res_div


def record_diagnostics(
    state: State,
    prev_state: State | None,
    params: ModelParams,
    prev_energy: EnergyBreakdown | None = None,
) -> DiagnosticsRecord:
    """Build one monitoring record; ``prev_energy`` skips a recomputation."""
    if prev_energy is None and prev_state is not None:
        prev_energy = free_energy(prev_state, params)
    rec, _ = record_and_energy(state, params, prev_energy)
    return rec


def record_and_energy(
    state: State,
    params: ModelParams,
    prev_energy: EnergyBreakdown | None,
) -> tuple[DiagnosticsRecord, EnergyBreakdown]:
    """Record a step and hand back the breakdown for the next call."""
    energy = free_energy(state, params)
    dF = energy.total - prev_energy.total if prev_energy is not None else 0.0
    mass, ions = conserved_totals(state, params)
    rp, rm, rd = constraint_residuals(state, params)
    rec = DiagnosticsRecord(
        time=state.time,
        total_mass=mass,
        total_ions=ions,
        F_total=energy.total,
        F_kinetic=energy.kinetic,
        F_GL=energy.gl,
        F_mixture=energy.mixture,
        dF_step=dF,
        res_partition=rp,
        res_chempot=rm,
        res_divergence=rd,
        max_speed=state.v.max_speed(),
    )
    return rec, energy


def write_diagnostics(path, records: Sequence[DiagnosticsRecord]) -> None:
    with open(path, "w") as fh:
        fh.write(f"# {DIAG_TAG}\n")
        fh.write(",".join(DIAG_COLUMNS) + "\n")
        for rec in records:
            fh.write(",".join(f"{x:.17g}" for x in rec.as_row()) + "\n")


def read_diagnostics(path) -> dict[str, np.ndarray]:
    """Load a diagnostics CSV back into column arrays, checking the tag."""
    with open(path) as fh:
        tag = fh.readline().strip()
        if tag != f"# {DIAG_TAG}":
            raise ValueError(f"not a {DIAG_TAG} file: {tag!r}")
        names = fh.readline().strip().split(",")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    if data.size == 0:
        return {n: np.empty(0) for n in names}
    return {n: data[:, k] for k, n in enumerate(names)}


class AuditResult(NamedTuple):
    passed: bool
    fraction: float
    worst_step: int
    worst_dF: float
    threshold: float


def dissipation_audit(
    records: Sequence[DiagnosticsRecord], tol: float = 1e-6
) -> AuditResult:
    """Count steps whose energy increment exceeds ``tol * max(F(0), 1)``.

    Passes only when no step exceeds the threshold.  The first record is the
    initial state and carries no increment.
    """
    if not records:
        return AuditResult(True, 0.0, -1, 0.0, tol)
    threshold = tol * max(records[0].F_total, 1.0)
    steps = records[1:]
    if not steps:
        return AuditResult(True, 0.0, -1, 0.0, threshold)
    worst_k, worst = max(
        enumerate(r.dF_step for r in steps), key=lambda kv: kv[1]
    )
    bad = sum(1 for r in steps if r.dF_step > threshold)
    return AuditResult(
        bad == 0, bad / len(steps), worst_k + 1, worst, threshold
    )
