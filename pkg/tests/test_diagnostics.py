import numpy as np
import pytest

from tripleflow import diagnostics
from tripleflow.diagnostics import DIAG_COLUMNS, DiagnosticsRecord
from tripleflow.grid import Grid2D
from tripleflow.params import GSpec, ModelParams, validate
from tripleflow.state import State


def _uniform_state(grid, phis, c=0.0, u=0.0):
    state = State.zeros(grid)
    for k in range(3):
        state.phi[k].interior[...] = phis[k]
    state.c.interior[...] = c
    state.v.x[...] = u
    return state


def test_conserved_totals_frozen_arithmetic():
    grid = Grid2D(8, 8, 0.125, 0.125)
    p = validate(
        ModelParams(rho1=1.2, rho2=0.8, rho3=1.2, delta=0.04, c_star=1.0)
    )
    state = _uniform_state(grid, (0.25, 0.35, 0.4), c=0.5)
    mass, ions = diagnostics.conserved_totals(state, p)
    # rho = 1.2*0.25 + 0.8*0.35 + 1.2*0.4 over a unit box
    assert mass == pytest.approx(1.06, abs=1e-13)
    # fluid ions (0.25 + delta)*0.5 plus bound ions c_star*0.4
    assert ions == pytest.approx((0.25 + 0.04) * 0.5 + 0.4, abs=1e-13)


def test_free_energy_vanishes_at_pure_rest_state():
    grid = Grid2D(8, 8, 0.125, 0.125)
    p = validate(ModelParams(g=GSpec(a=1.0, c0=0.1)))
    state = _uniform_state(grid, (0.0, 1.0, 0.0), c=0.1)
    en = diagnostics.free_energy(state, p)
    assert en.total == pytest.approx(0.0, abs=1e-14)
    assert en.kinetic == 0.0
    assert en.gl == pytest.approx(0.0, abs=1e-14)
    assert en.mixture == pytest.approx(0.0, abs=1e-14)


def test_free_energy_mixture_part_frozen_value():
    grid = Grid2D(8, 8, 0.125, 0.125)
    p = validate(
        ModelParams(eps=0.0625, delta=0.04, alpha=0.0, g=GSpec(a=1.0, c0=0.1))
    )
    state = _uniform_state(grid, (0.0, 1.0, 0.0), c=0.6)
    en = diagnostics.free_energy(state, p)
    # g = (0.6-0.1)^2 = 0.25 everywhere, phi_c_tilde = delta, alpha_t = eps
    assert en.mixture == pytest.approx(0.25 * 0.04 / 0.0625, rel=1e-12)
    assert en.gl == pytest.approx(0.0, abs=1e-13)


def test_free_energy_kinetic_counts_all_faces():
    grid = Grid2D(8, 8, 0.125, 0.125)
    p = validate(ModelParams())
    state = _uniform_state(grid, (1.0, 0.0, 0.0), u=0.3)
    en = diagnostics.free_energy(state, p)
    want = 0.5 * 1.0 * 0.3**2 * grid.cell_volume * grid.fx * grid.ny
    assert en.kinetic == pytest.approx(want, rel=1e-12)


def test_constraint_residuals_flag_partition_defect():
    grid = Grid2D(8, 8, 0.125, 0.125)
    p = validate(ModelParams())
    state = _uniform_state(grid, (0.3, 0.3, 0.4))
    r0 = diagnostics.constraint_residuals(state, p)
    assert r0 == pytest.approx((0.0, 0.0, 0.0), abs=1e-14)
    state.phi[0].interior[2, 3] += 1e-3
    r1 = diagnostics.constraint_residuals(state, p)
    assert r1[0] == pytest.approx(1e-3, abs=1e-15)


def _rec(time, F, dF):
    return DiagnosticsRecord(
        time=time,
        total_mass=1.0,
        total_ions=0.5,
        F_total=F,
        F_kinetic=0.0,
        F_GL=F,
        F_mixture=0.0,
        dF_step=dF,
        res_partition=0.0,
        res_chempot=0.0,
        res_divergence=0.0,
        max_speed=0.0,
    )


def test_dissipation_audit_accepts_monotone_decay():
    recs = [_rec(0.0, 10.0, 0.0)]
    for k in range(1, 20):
        recs.append(_rec(0.01 * k, 10.0 - 0.1 * k, -0.1))
    audit = diagnostics.dissipation_audit(recs)
    assert audit.passed
    assert audit.fraction == 0.0
    assert audit.threshold == pytest.approx(1e-5)


def test_dissipation_audit_flags_and_locates_increases():
    recs = [_rec(0.0, 2.0, 0.0), _rec(0.1, 1.9, -0.1), _rec(0.2, 1.95, 0.05)]
    audit = diagnostics.dissipation_audit(recs)
    assert not audit.passed
    assert audit.worst_step == 2
    assert audit.worst_dF == pytest.approx(0.05)
    assert audit.fraction == pytest.approx(0.5)


def test_dissipation_audit_ignores_subthreshold_noise():
    recs = [_rec(0.0, 1.0, 0.0), _rec(0.1, 1.0, 5e-7), _rec(0.2, 1.0, -5e-7)]
    audit = diagnostics.dissipation_audit(recs)
    assert audit.passed


def test_diagnostics_csv_round_trip(tmp_path):
    recs = [
        _rec(0.0, 1.0 / 3.0, 0.0),
        _rec(0.1, 0.1 + 0.2, -1e-17),
        _rec(np.pi, 1e-300, 0.0),
    ]
    path = tmp_path / "diag.csv"
    diagnostics.write_diagnostics(path, recs)
    series = diagnostics.read_diagnostics(path)
    assert set(series) == set(DIAG_COLUMNS)
    for name in DIAG_COLUMNS:
        got = series[name]
        want = np.array([getattr(r, name) for r in recs])
        np.testing.assert_array_equal(got, want)


def test_read_diagnostics_rejects_foreign_files(tmp_path):
    path = tmp_path / "junk.csv"
    path.write_text("time,mass\n0,1\n")
    with pytest.raises(ValueError):
        diagnostics.read_diagnostics(path)
