import numpy as np
import pytest

from tripleflow import measure
from tripleflow.errors import TriplePointNotFound
from tripleflow.fields import ScalarField, VectorField
from tripleflow.grid import Grid2D
from tripleflow.state import State


def _scalar(grid, values):
    f = ScalarField.zeros(grid)
    f.interior[...] = values
    return f


# ---- level crossings and line fits ---------------------------------------


def test_level_crossing_linear_interpolation_is_exact():
    x = np.array([0.0, 1.0, 2.0, 3.0])
    f = np.array([0.0, 0.2, 0.8, 1.0])
    pos = measure.level_crossings_1d(x, f, 0.5)
    assert pos.shape == (1,)
    assert pos[0] == pytest.approx(1.5, abs=1e-15)


def test_level_crossing_catches_exact_hits_and_multiples():
    x = np.linspace(0.0, 1.0, 11)
    f = np.array([0, 0.5, 1, 1, 1, 0.9, 0.1, 0, 0, 0.7, 1.0])
    pos = measure.level_crossings_1d(x, f, 0.5)
    # one exact sample hit, one descending crossing, one ascending crossing
    assert pos.size == 3
    assert pos[0] == pytest.approx(0.1)
    assert 0.5 < pos[1] < 0.6
    assert 0.8 < pos[2] < 0.9


def test_interface_position_matches_tanh_center():
    grid = Grid2D(64, 4, 1.0 / 64, 1.0 / 64)
    x = grid.xc()[1:-1]
    prof = 0.5 * (1.0 + np.tanh(3.0 * (x - 0.37) / 0.08))
    f = _scalar(grid, np.repeat(prof[:, None], 4, axis=1))
    pos = measure.interface_position_x(f, 0.5)
    assert abs(pos - 0.37) < 5e-4


def test_interface_position_raises_when_level_absent():
    grid = Grid2D(8, 4, 0.125, 0.25)
    f = ScalarField.full(grid, 0.9)
    with pytest.raises(ValueError):
        measure.interface_position_x(f, 0.5)


def test_fit_linear_recovers_exact_line():
    t = np.linspace(0.0, 2.0, 17)
    fit = measure.fit_linear(t, 0.75 * t - 1.25)
    assert fit.slope == pytest.approx(0.75, abs=1e-12)
    assert fit.intercept == pytest.approx(-1.25, abs=1e-12)
    assert fit.rms_residual < 1e-12


def test_fit_log_slope_recovers_decay_rate():
    y = np.linspace(0.0, 1.0, 30)
    fit = measure.fit_log_slope(y, 3.0 * np.exp(-1.7 * y))
    assert fit.slope == pytest.approx(-1.7, abs=1e-10)
    with pytest.raises(ValueError):
        measure.fit_log_slope(y, y - 0.5)


def test_total_and_centroid_of_offset_blob():
    grid = Grid2D(32, 24, 1.0 / 32, 1.0 / 24)
    x = grid.xc()[1:-1]
    y = grid.yc()[1:-1]
    w = np.exp(
        -((x[:, None] - 0.6) ** 2 + (y[None, :] - 0.4) ** 2) / (2 * 0.07**2)
    )
    f = _scalar(grid, w)
    assert measure.total(f) == pytest.approx(np.sum(w) / (32 * 24))
    cx, cy = measure.centroid(f)
    assert cx == pytest.approx(0.6, abs=2e-3)
    assert cy == pytest.approx(0.4, abs=2e-3)


def test_sample_bilinear_exact_on_linear_field():
    grid = Grid2D(16, 16, 0.125, 0.0625, origin=(1.0, -0.5))
    x = grid.xc()[1:-1]
    y = grid.yc()[1:-1]
    f = _scalar(grid, 2.0 * x[:, None] + 3.0 * y[None, :])
    for px, py in [(1.3, -0.1), (2.2, 0.12), (1.77, 0.31)]:
        got = measure._sample_bilinear(f, px, py)
        assert got == pytest.approx(2.0 * px + 3.0 * py, abs=1e-12)


# ---- pressure jump --------------------------------------------------------


def _disk_state(grid, p_in, radius, eps):
    x = grid.xc()[1:-1]
    y = grid.yc()[1:-1]
    d = radius - np.sqrt((x[:, None] - 0.5) ** 2 + (y[None, :] - 0.5) ** 2)
    disk = 0.5 * (1.0 + np.tanh(3.0 * d / eps))
    state = State.zeros(grid)
    state.p.interior[...] = p_in * disk
    state.phi[0].interior[...] = disk
    state.phi[1].interior[...] = 1.0 - disk
    return state


def test_droplet_jump_reads_plateau_difference():
    grid = Grid2D(96, 96, 1.0 / 96, 1.0 / 96)
    state = _disk_state(grid, p_in=0.31, radius=0.25, eps=1.0 / 24)
    jump, spurious = measure.droplet_pressure_jump(
        state, (0.5, 0.5), 0.25, 1.0 / 24
    )
    assert jump == pytest.approx(0.31, rel=2e-3)
    assert spurious == 0.0


def test_droplet_jump_rejects_empty_mask():
    grid = Grid2D(16, 16, 1.0 / 16, 1.0 / 16)
    state = _disk_state(grid, p_in=1.0, radius=0.25, eps=0.1)
    with pytest.raises(ValueError):
        measure.droplet_pressure_jump(state, (0.5, 0.5), 0.25, eps=0.5)


# ---- triple point and angles ---------------------------------------------


def _wedge_phases(grid, betas, eps, apex=(0.5, 0.5), theta0=0.0):
    """Diffuse three-phase wedge: phase k fills the angular sector of width
    betas[k], interfaces smoothed as tanh of the arc distance."""
    x = grid.xc()[1:-1]
    y = grid.yc()[1:-1]
    dx = x[:, None] - apex[0]
    dy = y[None, :] - apex[1]
    r = np.hypot(dx, dy)
    ang = np.arctan2(dy, dx) - theta0
    bounds = np.cumsum([0.0] + list(betas))
    phis = []
    for k in range(3):
        lo, hi = bounds[k], bounds[k + 1]
        mid = 0.5 * (lo + hi)
        half = 0.5 * (hi - lo)
        # wrapped angular distance to the sector midline
        d_ang = np.angle(np.exp(1j * (ang - mid)))
        arc = r * (half - np.abs(d_ang))
        phis.append(0.5 * (1.0 + np.tanh(3.0 * arc / eps)))
    total = phis[0] + phis[1] + phis[2]
    fields = []
    for k in range(3):
        f = ScalarField.zeros(grid)
        f.interior[...] = phis[k] / total
        fields.append(f)
    return tuple(fields)


def test_triple_point_found_at_wedge_apex():
    grid = Grid2D(128, 128, 1.0 / 128, 1.0 / 128)
    phi = _wedge_phases(grid, [2 * np.pi / 3] * 3, eps=1.0 / 16, apex=(0.47, 0.52))
    tx, ty = measure.triple_point(phi, grid)
    assert abs(tx - 0.47) < 1.0 / 128
    assert abs(ty - 0.52) < 1.0 / 128


def test_triple_point_absent_in_two_phase_state():
    grid = Grid2D(32, 32, 1.0 / 32, 1.0 / 32)
    a = ScalarField.full(grid, 1.0)
    b = ScalarField.zeros(grid)
    with pytest.raises(TriplePointNotFound):
        measure.triple_point((a, b, b), grid)


def test_symmetric_wedge_angles_read_120_degrees():
    grid = Grid2D(192, 192, 1.0 / 192, 1.0 / 192)
    phi = _wedge_phases(grid, [2 * np.pi / 3] * 3, eps=1.0 / 24, theta0=0.3)
    rep = measure.contact_angles(phi, grid, eps=1.0 / 24)
    for beta in rep.angles:
        assert np.degrees(beta) == pytest.approx(120.0, abs=1.0)
    assert sum(rep.angles) == pytest.approx(2.0 * np.pi, abs=0.05)


def test_asymmetric_wedge_angles_recovered():
    grid = Grid2D(192, 192, 1.0 / 192, 1.0 / 192)
    betas = np.radians([106.0, 127.0, 127.0])
    phi = _wedge_phases(grid, betas, eps=1.0 / 24, theta0=-0.9)
    rep = measure.contact_angles(phi, grid, eps=1.0 / 24)
    for beta, want in zip(rep.angles, betas):
        assert np.degrees(beta) == pytest.approx(np.degrees(want), abs=1.0)


def test_circle_fit_exact_on_ideal_points():
    t = np.linspace(0.1, 2.0, 25)
    pts = np.column_stack([0.3 + 0.8 * np.cos(t), -0.2 + 0.8 * np.sin(t)])
    fit = measure.fit_circle(pts)
    assert fit.cx == pytest.approx(0.3, abs=1e-12)
    assert fit.cy == pytest.approx(-0.2, abs=1e-12)
    assert fit.radius == pytest.approx(0.8, abs=1e-12)


# ---- state change rate ----------------------------------------------------


def test_state_change_rate_scales_with_difference():
    grid = Grid2D(8, 8, 0.125, 0.125)
    a = State.zeros(grid)
    b = a.copy()
    b.phi[1].interior[3, 4] += 0.02
    b.v.x[2, 2] += 0.01
    assert measure.state_change_rate(b, a, dt=0.5) == pytest.approx(0.04)
    assert measure.state_change_rate(a, a, dt=0.5) == 0.0
