"""Named verification scenarios with quantitative sharp-interface targets.

Each scenario builds its own geometry on top of the configured model
parameters, relaxes or marches the coupled system, measures an observable,
and compares against the analytic prediction evaluated at runtime.  A
report carries measured values, targets, relative errors, per-check
verdicts, and free-form notes; nothing in here hard-codes an expected
number.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import diagnostics, energetics as en
from . import flow, initial, measure, phasefield, runner, targets
from .config import RunSettings
from .errors import FrontLost, NonStationary
from .fields import ScalarField, VectorField
from .grid import BoxBC, Grid2D
from .params import ModelParams
from .runner import RunArtifacts, RunPlan
from .state import State
from .stepper import StepControls


@dataclass
class ScenarioReport:
    name: str
    measured: dict[str, float] = field(default_factory=dict)
    targets: dict[str, float] = field(default_factory=dict)
    relative_errors: dict[str, float] = field(default_factory=dict)
    fit_info: dict[str, float] = field(default_factory=dict)
    tolerances: dict[str, float] = field(default_factory=dict)
    checks: dict[str, bool] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)
    artifacts: dict[str, RunArtifacts] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def check_rel(self, key: str, measured: float, target: float, tol: float) -> None:
        """Record measured/target/relative error and a pass verdict."""
        self.measured[key] = float(measured)
        self.targets[key] = float(target)
        scale = abs(target) if target != 0.0 else 1.0
        rel = abs(measured - target) / scale
        self.relative_errors[key] = rel
        self.tolerances[key] = tol
        self.checks[key] = rel <= tol


def write_report(report: ScenarioReport, path) -> None:
    lines = [f"scenario = {report.name}", f"passed = {str(report.passed).lower()}"]
    for k, v in report.measured.items():
        lines.append(f"measured.{k} = {v:.12g}")
    for k, v in report.targets.items():
        lines.append(f"target.{k} = {v:.12g}")
    for k, v in report.relative_errors.items():
        lines.append(f"rel_err.{k} = {v:.6g}")
    for k, v in report.tolerances.items():
        lines.append(f"tol.{k} = {v:.6g}")
    for k, v in report.fit_info.items():
        lines.append(f"fit.{k} = {v:.12g}")
    for k, ok in report.checks.items():
        lines.append(f"check.{k} = {'pass' if ok else 'fail'}")
    for i, note in enumerate(report.notes, start=1):
        lines.append(f"note.{i} = {note}")
    Path(path).write_text("\n".join(lines) + "\n")


DEFAULT_TOLERANCES = {
    "planar_l2": 0.02,
    "planar_energy": 0.03,
    "planar_equipartition": 0.05,
    "slip_decay": 0.10,
    "slip_length": 0.10,
    "slip_shrink_factor": 5.0,
    "laplace_jump": 0.10,
    "front_speed": 0.10,
    "front_flux": 0.15,
    "angle_deg": 3.0,
    "channel_const": 1e-9,
}


def _tols(overrides: dict | None) -> dict:
    out = dict(DEFAULT_TOLERANCES)
    if overrides:
        out.update(overrides)
    return out


def _walls(nx, ny, hx, hy, origin=(0.0, 0.0)) -> Grid2D:
    bc = BoxBC(left="wall", right="wall", bottom="wall", top="wall")
    return Grid2D(nx=nx, ny=ny, hx=hx, hy=hy, origin=origin, bc=bc)


def _plan(params, grid, settings, flow_enabled, reactions_enabled, fbc=None) -> RunPlan:
    controls = StepControls(
        flow_enabled=flow_enabled,
        reactions_enabled=reactions_enabled,
        fbc=fbc if fbc is not None else flow.FlowBC(),
    )
    return RunPlan(params=params, grid=grid, controls=controls, settings=settings)


def _settings(**kw) -> RunSettings:
    s = RunSettings()
    for k, v in kw.items():
        setattr(s, k, v)
    return s


def _require_steady(art: RunArtifacts, label: str) -> None:
    if art.stop_reason != "steady":
        raise NonStationary(
            f"{label} did not settle (stopped by {art.stop_reason} after "
            f"{art.n_steps} steps)"
        )


def _hand_built_state(grid, p, solid, fluid2, c0=0.0) -> State:
    phi = initial.compose_phases(grid, solid=solid, fluid2=fluid2)
    return State(
        grid=grid,
        phi=phi,
        mu=phasefield.chemical_potentials(phi, p),
        c=initial.uniform_concentration(grid, c0),
        p=ScalarField.zeros(grid),
        v=VectorField.zeros(grid),
    )


# -- planar interface profile ---------------------------------------------


def _relax_planar(params: ModelParams, eps_over_h: int, out_dir=None) -> RunArtifacts:
    h = params.eps / eps_over_h
    nx = max(int(round(1.0 / h)), 8)
    grid = _walls(nx, 4, h, h)
    settings = _settings(
        init="planar",
        init_x0=0.5,
        init_pair="12",
        steady_tol=1e-7,
        max_steps=40000,
        out_dir=str(out_dir) if out_dir else "out",
    )
    p = params.with_overrides(t_end=50.0)
    plan = _plan(p, grid, settings, flow_enabled=False, reactions_enabled=False)
    state = runner.build_initial_state(plan)
    return runner.time_loop(state, plan, write_outputs=out_dir is not None)


def scenario_planar_profile(
    params: ModelParams, out_dir=None, tol_overrides: dict | None = None
) -> ScenarioReport:
    """Relax a flat 1-2 interface and compare with the tanh solution."""
    tols = _tols(tol_overrides)
    rep = ScenarioReport("planar_profile")

    l2_by_res = {}
    audits = []
    for res in (6, 8, 12):
        art = _relax_planar(params, res, out_dir=out_dir if res == 8 else None)
        _require_steady(art, f"planar relaxation at eps/h={res}")
        audits.append(diagnostics.dissipation_audit(art.records))
        st = art.final_state
        x = st.grid.xc()[1:-1]
        prof = st.phi[1].interior.mean(axis=1)
        x0 = measure.level_crossings_1d(x, prof, 0.5)[0]
        ref = targets.equilibrium_profile(x, x0, params.eps)
        l2 = float(np.sqrt(np.sum((prof - ref) ** 2) / np.sum(ref**2)))
        l2_by_res[res] = l2
        if res == 8:
            rep.artifacts["relaxation"] = art
            _planar_energy_checks(rep, st, params, tols)
    rep.check_rel("profile_l2", l2_by_res[8], 0.0, tols["planar_l2"])
    for res, l2 in l2_by_res.items():
        rep.fit_info[f"l2_eps_over_h_{res}"] = l2
    rep.checks["l2_monotone_in_resolution"] = (
        l2_by_res[6] >= l2_by_res[8] >= l2_by_res[12]
    )
    rep.checks["dissipation_audit"] = all(a.passed for a in audits)
    rep.fit_info["audit_worst_dF"] = max(a.worst_dF for a in audits)
    return rep


def _planar_energy_checks(rep, st, params, tols) -> None:
    grid = st.grid
    energy = diagnostics.free_energy(st, params)
    sigma = targets.interface_tension(params, 1, 2)
    per_len = energy.gl / grid.Ly
    rep.check_rel("interface_energy", per_len, sigma, tols["planar_energy"])

    # equipartition along the averaged profile, central differences
    Phi = tuple(f.interior.mean(axis=1) for f in st.phi)
    well = en.W(Phi, params.delta_eff, params.Sigmas, params.SigmaT) / params.eps
    grad_part = np.zeros_like(well)
    for sig, p in zip(params.Sigmas, Phi):
        dpdx = np.gradient(p, grid.hx)
        grad_part += 0.5 * params.eps * sig * dpdx**2
    defect = float(np.max(np.abs(well - grad_part))) / float(np.max(well))
    rep.measured["equipartition_defect"] = defect
    rep.tolerances["equipartition_defect"] = tols["planar_equipartition"]
    rep.checks["equipartition_defect"] = defect <= tols["planar_equipartition"]


# -- slip length ------------------------------------------------------------

_SLIP_Y0 = 2.5  # solid occupies y > _SLIP_Y0, the lid drives the bottom wall


def _relax_slip(params: ModelParams, d0: float, out_dir=None):
    h = 1.0 / 32.0
    nx, ny = 8, 256
    bc = BoxBC(left="periodic", right="periodic", bottom="wall", top="wall")
    grid = Grid2D(nx=nx, ny=ny, hx=h, hy=h, origin=(0.0, 0.0), bc=bc)
    settings = _settings(
        init="planar",
        init_normal="y",
        init_x0=_SLIP_Y0,
        init_pair="13",
        steady_tol=1e-7,
        max_steps=30000,
        lid_bottom=1.0,
        out_dir=str(out_dir) if out_dir else "out",
    )
    p = params.with_overrides(
        d0=d0, eps=0.25, delta=0.02, dt=5e-3, t_end=200.0,
        stab_s=_barrier_stab(0.02),
    )
    fbc = flow.FlowBC(lid={"bottom": 1.0})
    plan = _plan(p, grid, settings, flow_enabled=True, reactions_enabled=False, fbc=fbc)
    state = runner.build_initial_state(plan)
    return runner.time_loop(state, plan, write_outputs=out_dir is not None), p


def _slip_measurements(art: RunArtifacts, with_decay=True):
    st = art.final_state
    grid = st.grid
    y = grid.yc()[1:-1]
    u = st.v.x[1 : grid.fx + 1, 1:-1].mean(axis=0)
    phi3 = st.phi[2].interior.mean(axis=0)
    interface_y = measure.level_crossings_1d(y, phi3, 0.5)[0]

    decay_fit = None
    if with_decay:
        deep = (y > 3.3) & (y < 5.3) & (phi3 > 0.95)
        decay_fit = measure.fit_log_slope(y[deep], u[deep])

    lin = (y > 0.4) & (y < 1.6)
    line = measure.fit_linear(y[lin], u[lin])
    u_at_interface = line.slope * interface_y + line.intercept
    slip_len = -u_at_interface / line.slope
    return interface_y, decay_fit, line, slip_len


def scenario_slip_length(
    params: ModelParams, out_dir=None, tol_overrides: dict | None = None
) -> ScenarioReport:
    """Shear over a flat solid layer: decay rate inside, slip length outside.

    The documented formulas carry a factor of two under the root that the
    momentum balance does not support; both variants are reported, and the
    primary pass checks use the documented ones.
    """
    tols = _tols(tol_overrides)
    rep = ScenarioReport("slip_length")

    art, p_used = _relax_slip(params, params.d0, out_dir=out_dir)
    _require_steady(art, "sheared solid layer")
    rep.artifacts["relaxation"] = art
    interface_y, decay_fit, line, slip_len = _slip_measurements(art)
    decay_rate = abs(decay_fit.slope)
    tg = targets.slip_targets(p_used)

    rep.fit_info["interface_y"] = interface_y
    rep.fit_info["decay_rms"] = decay_fit.rms_residual
    rep.fit_info["fluid_fit_rms"] = line.rms_residual
    rep.check_rel("decay_rate", decay_rate, tg.decay_rate_documented, tols["slip_decay"])
    rep.check_rel("slip_length", slip_len, tg.slip_length_documented, tols["slip_length"])
    rep.check_rel(
        "decay_rate_balance", decay_rate, tg.decay_rate_balance, tols["slip_decay"]
    )
    rep.check_rel(
        "slip_length_balance", slip_len, tg.slip_length_balance, tols["slip_length"]
    )
    rep.notes.append(
        "decay_rate and slip_length compare against the documented formulas "
        "sqrt(rho3*d0/(2*gamma3)) and gamma1*sqrt(2/(rho3*d0*gamma3)); the "
        "*_balance variants drop the factor of two, which is what steady "
        "shear with drag rho3*d0*v and viscosity gamma3 actually supports"
    )

    art_hd, _ = _relax_slip(params, 100.0 * params.d0, out_dir=None)
    _require_steady(art_hd, "sheared solid layer, stiff drag")
    _, _, _, slip_hd = _slip_measurements(art_hd, with_decay=False)
    rep.measured["slip_length_stiff_drag"] = slip_hd
    ratio = slip_len / slip_hd if slip_hd != 0.0 else float("inf")
    rep.measured["slip_shrink_ratio"] = ratio
    rep.tolerances["slip_shrink_ratio"] = tols["slip_shrink_factor"]
    rep.checks["slip_shrinks_with_drag"] = ratio >= tols["slip_shrink_factor"]
    return rep


# -- Laplace pressure jump --------------------------------------------------


def _barrier_stab(delta: float) -> float:
    """Stabilization covering the one-sided barrier curvature near the wall.

    The default coefficient bounds the polynomial well only; barrier
    curvature grows like 1/delta once a field dips below zero, and the
    semi-implicit step turns non-contractive at grid scale when that
    exceeds twice the stabilization.  Covering excursions to about half
    the admissible overshoot keeps the map contractive.
    """
    return 36.0 + 8.0 / delta


def _relax_droplet(
    params: ModelParams, eps: float, n: int, out_dir=None
) -> RunArtifacts:
    """Two stages: conservative relaxation without flow, then flow.

    The flow stage resolves capillary waves at grid scale (explicit
    interfacial force), so its step is held under the capillary time
    sqrt(rho h^3 / (2 pi sigma)); the pure relaxation stage has no such
    limit and takes large steps.
    """
    grid = _walls(n, n, 1.0 / n, 1.0 / n)
    settings = _settings(
        init="disk",
        init_phase=1,
        init_center_x=0.5,
        init_center_y=0.5,
        init_radius=0.25,
        steady_tol=1e-6,
        max_steps=4000,
        out_dir=str(out_dir) if out_dir else "out",
    )
    p = params.with_overrides(
        eps=eps, delta=eps, dt=2e-3, t_end=8.0, stab_s=_barrier_stab(eps)
    )
    plan = _plan(p, grid, settings, flow_enabled=False, reactions_enabled=False)
    state = runner.build_initial_state(plan)
    art = runner.time_loop(state, plan, write_outputs=False)

    rho = 0.5 * (params.rho1 + params.rho2)
    dt_flow = 0.9 * np.sqrt(rho * grid.hx**3 / (2.0 * np.pi * params.sigma12))
    settings2 = _settings(
        steady_tol=0.0, max_steps=10**6, out_dir=str(out_dir) if out_dir else "out"
    )
    plan2 = _plan(
        p.with_overrides(dt=dt_flow), grid, settings2,
        flow_enabled=True, reactions_enabled=False,
    )
    art2 = runner.time_loop(
        art.final_state, plan2, write_outputs=out_dir is not None,
        t_end=art.final_state.time + 0.5,
    )
    return dataclasses.replace(art2, records=art.records + art2.records[1:])


def scenario_laplace_droplet(
    params: ModelParams, out_dir=None, tol_overrides: dict | None = None
) -> ScenarioReport:
    """Static droplet: pressure jump vs sigma12/R, plus an eps-halving study."""
    tols = _tols(tol_overrides)
    rep = ScenarioReport("laplace_droplet")
    radius = 0.25
    target = targets.laplace_jump(params, radius)

    art = _relax_droplet(params, params.eps, 128, out_dir=out_dir)
    rep.artifacts["relaxation"] = art
    jump, spurious = measure.droplet_pressure_jump(
        art.final_state, (0.5, 0.5), radius, params.eps
    )
    rep.check_rel("pressure_jump", jump, target, tols["laplace_jump"])
    rep.measured["spurious_speed"] = spurious
    audit = diagnostics.dissipation_audit(art.records)
    rep.checks["dissipation_audit"] = audit.passed
    rep.fit_info["audit_worst_dF"] = audit.worst_dF

    art_f = _relax_droplet(params, 0.5 * params.eps, 256, out_dir=None)
    jump_f, _ = measure.droplet_pressure_jump(
        art_f.final_state, (0.5, 0.5), radius, 0.5 * params.eps
    )
    rep.measured["pressure_jump_half_eps"] = jump_f
    err_c = abs(jump - target) / target
    err_f = abs(jump_f - target) / target
    rep.fit_info["rel_err_coarse_eps"] = err_c
    rep.fit_info["rel_err_half_eps"] = err_f
    rep.checks["error_decreases_with_eps"] = err_f < err_c
    return rep


# -- dissolving / precipitating front --------------------------------------


def _front_edge_fit(x, prof_c, pos, eps):
    """Quadratic fit of c over the fluid strip just outside the reaction
    smear, evaluated at the half level: returns (c, dc/dx) there."""
    zone = (x > pos - 4.0 * eps) & (x < pos - 1.5 * eps)
    coef = np.polyfit(x[zone] - pos, prof_c[zone], 2)
    return float(coef[2]), float(coef[1])


def scenario_dissolution_front(
    params: ModelParams, out_dir=None, tol_overrides: dict | None = None
) -> ScenarioReport:
    """Quasi-1D precipitating front: speed vs r(c at the front), flux balance.

    The run deliberately uses weak, equal tensions: the leading finite-width
    correction to the front speed is the q-weighted mean of eps*(mu1 - mu3),
    which scales with the Sigma coefficients, so soft interfaces push it far
    below the speed tolerance.  The long box gives the ion depletion layer
    room to grow much wider than the interface smear before the measurement
    window opens; both front speed and near-front slope are paired with the
    concentration extrapolated from the fluid side at matching times.
    """
    tols = _tols(tol_overrides)
    rep = ScenarioReport("dissolution_front")

    h = 1.0 / 128.0
    grid = _walls(512, 4, h, h, origin=(0.0, 0.0))
    p = params.with_overrides(
        alpha=0.0, dt=1e-4, t_end=0.8,
        sigma12=0.2, sigma13=0.2, sigma23=0.2,
    )
    settings = _settings(
        init="planar",
        init_x0=2.4,
        init_pair="13",
        init_c=0.5,
        steady_tol=0.0,
        max_steps=10**7,
        out_dir=str(out_dir) if out_dir else "out",
    )
    plan = _plan(p, grid, settings, flow_enabled=False, reactions_enabled=True)
    state = runner.build_initial_state(plan)

    x = grid.xc()[1:-1]
    times, fronts, c_edge, slope_edge = [], [], [], []
    records = None
    n_seg = 20
    seg = p.t_end / n_seg
    for k in range(n_seg):
        art = runner.time_loop(
            state,
            plan,
            write_outputs=(out_dir is not None and k == n_seg - 1),
            t_end=(k + 1) * seg,
        )
        state = art.final_state
        records = art.records if records is None else records + art.records[1:]
        try:
            pos = measure.interface_position_x(state.phi[2], 0.5)
        except ValueError as exc:
            raise FrontLost(
                f"phase-3 half level left the domain near t={state.time:.4g}"
            ) from exc
        prof_c = state.c.interior.mean(axis=1)
        c_int, dcdx = _front_edge_fit(x, prof_c, pos, p.eps)
        times.append(state.time)
        fronts.append(pos)
        c_edge.append(c_int)
        slope_edge.append(dcdx)
    rep.artifacts["march"] = dataclasses.replace(art, records=records)

    times = np.asarray(times)
    fronts = np.asarray(fronts)
    c_edge = np.asarray(c_edge)
    slope_edge = np.asarray(slope_edge)
    window = times >= 0.5 * p.t_end

    fit = measure.fit_linear(times[window], fronts[window])
    speed = abs(fit.slope)
    target_speed = float(
        np.mean([abs(targets.front_speed(p, c)) for c in c_edge[window]])
    )
    rep.fit_info["front_fit_rms"] = fit.rms_residual
    rep.fit_info["c_at_interface"] = float(np.mean(c_edge[window]))
    rep.fit_info["front_displacement"] = float(fronts[-1] - fronts[0])
    rep.check_rel("front_speed", speed, target_speed, tols["front_speed"])

    # flux balance D dc/dn = v_n (c* - c), paired segment by segment
    v_inst = np.abs(np.gradient(fronts, times))
    flux = float(p.D * np.mean(np.abs(slope_edge[window])))
    target_flux = float(
        np.mean(v_inst[window] * (p.c_star - c_edge[window]))
    )
    rep.check_rel("flux_balance", flux, target_flux, tols["front_flux"])

    ion0 = records[0].total_ions
    drift = max(abs(r.total_ions - ion0) for r in records) / abs(ion0)
    rep.measured["ion_drift"] = drift
    rep.tolerances["ion_drift"] = 1e-9
    rep.checks["ion_conservation"] = drift <= 1e-9

    # equilibrium concentration: r(c) = 0 holds at c = c0 for the convex g,
    # and the front must not move there (beyond the initial settling jitter)
    c_eq = min(max(p.g.c0, 0.0), p.c_star)
    settings_eq = _settings(
        init="planar", init_x0=2.4, init_pair="13", init_c=c_eq,
        steady_tol=0.0, max_steps=10**7, out_dir="out",
    )
    plan_eq = _plan(p, grid, settings_eq, flow_enabled=False, reactions_enabled=True)
    st_eq = runner.build_initial_state(plan_eq)
    pos0 = measure.interface_position_x(st_eq.phi[2], 0.5)
    art_eq = runner.time_loop(st_eq, plan_eq, write_outputs=False, t_end=0.05)
    pos1 = measure.interface_position_x(art_eq.final_state.phi[2], 0.5)
    rep.measured["equilibrium_drift"] = abs(pos1 - pos0)
    rep.tolerances["equilibrium_drift"] = 2e-3
    rep.checks["front_static_at_equilibrium"] = abs(pos1 - pos0) <= 2e-3
    return rep


# -- contact angles ---------------------------------------------------------


def _relax_sessile(params: ModelParams, out_dir=None):
    h = 1.0 / 96.0
    grid = _walls(192, 96, h, h)
    eps = 8.0 * h
    p = params.with_overrides(eps=eps, delta=eps, dt=2e-4, t_end=40.0)
    settings = _settings(
        steady_tol=2e-7,
        max_steps=60000,
        out_dir=str(out_dir) if out_dir else "out",
    )
    plan = _plan(p, grid, settings, flow_enabled=False, reactions_enabled=False)

    xg, yg = initial.centers(grid)
    slab = initial.tanh_profile(initial.distance_halfplane(yg, 0.35, "below"), eps)
    drop = initial.tanh_profile(initial.distance_disk(xg, yg, (1.0, 0.35), 0.28), eps)
    state = _hand_built_state(grid, p, solid=slab, fluid2=drop)
    return runner.time_loop(state, plan, write_outputs=out_dir is not None), p


def scenario_contact_angle(
    params: ModelParams, out_dir=None, tol_overrides: dict | None = None
) -> ScenarioReport:
    """Sessile drop on a solid layer, symmetric and asymmetric tensions."""
    tols = _tols(tol_overrides)
    rep = ScenarioReport("contact_angle")
    base = params.sigma12

    cases = {
        "sym": params.with_overrides(sigma12=base, sigma13=base, sigma23=base),
        "asym": params.with_overrides(sigma12=base, sigma13=base, sigma23=1.2 * base),
    }
    for label, pset in cases.items():
        art, p_used = _relax_sessile(pset, out_dir=out_dir if label == "sym" else None)
        _require_steady(art, f"sessile drop ({label})")
        rep.artifacts[label] = art
        st = art.final_state
        report = measure.contact_angles(st.phi, st.grid, p_used.eps)
        beta_t = targets.contact_angles_root_find(p_used)
        beta_c = targets.contact_angles_closed_form(p_used)
        for i in range(3):
            deg = float(np.degrees(report.angles[i]))
            tdeg = float(np.degrees(beta_t[i]))
            key = f"{label}_beta{i + 1}_deg"
            rep.measured[key] = deg
            rep.targets[key] = tdeg
            rep.relative_errors[key] = abs(deg - tdeg)
            rep.tolerances[key] = tols["angle_deg"]
            rep.checks[key] = abs(deg - tdeg) <= tols["angle_deg"]
        rep.fit_info[f"{label}_angle_sum_deg"] = float(np.degrees(sum(report.angles)))
        rep.fit_info[f"{label}_oracle_gap_deg"] = float(
            np.degrees(max(abs(a - b) for a, b in zip(beta_t, beta_c)))
        )
    return rep


# -- channel with a growing nucleus ----------------------------------------


def _channel_plan(params: ModelParams, reactions: bool, out_dir=None):
    h = 1.0 / 64.0
    bc = BoxBC(left="inflow", right="outflow", bottom="wall", top="wall")
    grid = Grid2D(nx=192, ny=64, hx=h, hy=h, origin=(0.0, 0.0), bc=bc)
    eps = 6.0 * h
    p = params.with_overrides(eps=eps, delta=eps, dt=1e-3, t_end=1.0)
    settings = _settings(
        init="channel_nucleus",
        init_c=0.6,
        inflow_umax=1.0,
        inflow_c=0.6,
        steady_tol=0.0,
        max_steps=200000,
        bc_left="inflow",
        bc_right="outflow",
        out_dir=str(out_dir) if out_dir else "out",
    )
    y = grid.yc()[1:-1]
    profile = 4.0 * settings.inflow_umax * y * (grid.Ly - y) / grid.Ly**2
    fbc = flow.FlowBC(inflow_profile=profile, inflow_c=settings.inflow_c)
    plan = _plan(
        p, grid, settings, flow_enabled=True, reactions_enabled=reactions, fbc=fbc
    )
    return plan, p


def scenario_channel_nucleus(
    params: ModelParams, out_dir=None, tol_overrides: dict | None = None
) -> ScenarioReport:
    """Oversaturated inflow grows the nucleus; the fluid-2 blob washes downstream."""
    tols = _tols(tol_overrides)
    rep = ScenarioReport("channel_nucleus")

    plan, p = _channel_plan(params, reactions=True, out_dir=out_dir)
    state = runner.build_initial_state(plan)
    x2_start = measure.centroid(state.phi[1])[0]
    solid_series = [measure.total(state.phi[2])]
    times = [state.time]
    n_seg = 20
    seg = p.t_end / n_seg
    records = None
    for k in range(n_seg):
        art = runner.time_loop(
            state,
            plan,
            write_outputs=(out_dir is not None and k == n_seg - 1),
            t_end=(k + 1) * seg,
        )
        state = art.final_state
        records = art.records if records is None else records + art.records[1:]
        solid_series.append(measure.total(state.phi[2]))
        times.append(state.time)
    rep.artifacts["march"] = dataclasses.replace(art, records=records)

    solid_series = np.asarray(solid_series)
    tail = solid_series[len(solid_series) // 3 :]
    rep.measured["solid_volume_start"] = float(solid_series[0])
    rep.measured["solid_volume_end"] = float(solid_series[-1])
    rep.checks["solid_grows"] = bool(np.all(np.diff(tail) > 0.0))
    for t, s in zip(times, solid_series):
        rep.fit_info[f"solid_volume_t{t:.3f}"] = float(s)

    x2_end = measure.centroid(state.phi[1])[0]
    rep.measured["blob_centroid_shift"] = float(x2_end - x2_start)
    rep.checks["blob_moves_downstream"] = (x2_end - x2_start) > 0.0

    # zero-reaction control: the solid volume must not drift
    plan0, _ = _channel_plan(params, reactions=False, out_dir=None)
    state0 = runner.build_initial_state(plan0)
    s0 = measure.total(state0.phi[2])
    art0 = runner.time_loop(state0, plan0, write_outputs=False, t_end=0.05)
    s1 = measure.total(art0.final_state.phi[2])
    drift = abs(s1 - s0) / abs(s0)
    rep.measured["solid_drift_no_reaction"] = drift
    rep.tolerances["solid_drift_no_reaction"] = tols["channel_const"]
    rep.checks["solid_constant_without_reaction"] = drift <= tols["channel_const"]
    return rep


# -- conservation suite (free run used by the acceptance checks) -----------


def conservation_run(params: ModelParams, n_steps: int = 500) -> RunArtifacts:
    """Closed-box coupled run exercising every conservation channel."""
    grid = _walls(64, 64, 1.0 / 64.0, 1.0 / 64.0)
    p = params.with_overrides(dt=2e-4, t_end=1e9)
    plan = _plan(
        p,
        grid,
        _settings(steady_tol=0.0, max_steps=n_steps),
        flow_enabled=True,
        reactions_enabled=True,
    )
    xg, yg = initial.centers(grid)
    slab = initial.tanh_profile(initial.distance_halfplane(xg, 0.72, "above"), p.eps)
    disk = initial.tanh_profile(initial.distance_disk(xg, yg, (0.35, 0.6), 0.16), p.eps)
    state = _hand_built_state(grid, p, solid=slab, fluid2=disk, c0=0.55)
    return runner.time_loop(state, plan, write_outputs=False, max_steps=n_steps)


SCENARIOS = {
    "planar_profile": scenario_planar_profile,
    "slip_length": scenario_slip_length,
    "laplace_droplet": scenario_laplace_droplet,
    "dissolution_front": scenario_dissolution_front,
    "contact_angle": scenario_contact_angle,
    "channel_nucleus": scenario_channel_nucleus,
}


def run_scenario(
    name: str, params: ModelParams, out_dir=None, tol_overrides: dict | None = None
) -> ScenarioReport:
    if name not in SCENARIOS:
        raise KeyError(f"unknown scenario {name!r}; have {sorted(SCENARIOS)}")
    report = SCENARIOS[name](params, out_dir=out_dir, tol_overrides=tol_overrides)
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        write_report(report, out / f"report_{name}.txt")
        for key, art in report.artifacts.items():
            diagnostics.write_diagnostics(
                out / f"series_{name}_{key}.csv", art.records
            )
    return report
