import numpy as np
import pytest

from tripleflow import phasefield, snapshot_io
from tripleflow.grid import Grid2D
from tripleflow.params import ModelParams, validate
from tripleflow.state import State


@pytest.fixture
def messy_state():
    rng = np.random.default_rng(7)
    grid = Grid2D(12, 8, 1.0 / 12, 1.0 / 8)
    state = State.zeros(grid)
    a = rng.uniform(0.0, 1.0, (12, 8))
    b = rng.uniform(0.0, 1.0 - a)
    state.phi[0].interior[...] = a
    state.phi[1].interior[...] = b
    state.phi[2].interior[...] = 1.0 - a - b
    state.c.interior[...] = rng.uniform(0.0, 0.9, (12, 8))
    state.p.interior[...] = rng.normal(size=(12, 8))
    state.v.x[1 : grid.fx + 1, 1:-1] = rng.normal(size=(grid.fx, 8))
    state.v.y[1:-1, 1 : grid.fy + 1] = rng.normal(size=(12, grid.fy))
    return state.with_time(0.625), grid


@pytest.mark.parametrize("binary", [False, True])
def test_round_trip_is_exact(tmp_path, messy_state, binary):
    state, grid = messy_state
    params = validate(ModelParams())
    path = tmp_path / ("snap.bin" if binary else "snap.txt")
    snapshot_io.write_snapshot(path, state, binary=binary)
    back = snapshot_io.read_snapshot(path, grid, params)
    assert back.time == state.time
    for k in range(3):
        np.testing.assert_array_equal(
            back.phi[k].interior, state.phi[k].interior
        )
    np.testing.assert_array_equal(back.c.interior, state.c.interior)
    np.testing.assert_array_equal(back.p.interior, state.p.interior)
    np.testing.assert_array_equal(
        back.v.x[1 : grid.fx + 1, 1:-1], state.v.x[1 : grid.fx + 1, 1:-1]
    )
    np.testing.assert_array_equal(
        back.v.y[1:-1, 1 : grid.fy + 1], state.v.y[1:-1, 1 : grid.fy + 1]
    )


def test_restored_potentials_match_recomputation(tmp_path, messy_state):
    state, grid = messy_state
    params = validate(ModelParams())
    path = tmp_path / "snap.txt"
    snapshot_io.write_snapshot(path, state)
    back = snapshot_io.read_snapshot(path, grid, params)
    mu = phasefield.chemical_potentials(back.phi, params)
    for k in range(3):
        np.testing.assert_array_equal(back.mu[k].interior, mu[k].interior)


def test_wrong_grid_size_is_rejected(tmp_path, messy_state):
    state, _ = messy_state
    params = validate(ModelParams())
    path = tmp_path / "snap.txt"
    snapshot_io.write_snapshot(path, state)
    other = Grid2D(8, 12, 1.0 / 8, 1.0 / 12)
    with pytest.raises(ValueError, match="snapshot is 12x8"):
        snapshot_io.read_snapshot(path, other, params)


def test_wrong_cell_size_is_rejected(tmp_path, messy_state):
    state, _ = messy_state
    params = validate(ModelParams())
    path = tmp_path / "snap.txt"
    snapshot_io.write_snapshot(path, state)
    stretched = Grid2D(12, 8, 1.0 / 12, 1.0 / 7)
    with pytest.raises(ValueError, match="cell size disagrees"):
        snapshot_io.read_snapshot(path, stretched, params)


def test_truncated_text_payload_is_rejected(tmp_path, messy_state):
    state, grid = messy_state
    params = validate(ModelParams())
    path = tmp_path / "snap.txt"
    snapshot_io.write_snapshot(path, state)
    lines = path.read_text().splitlines()
    path.write_text("\n".join(lines[:-2]) + "\n")
    with pytest.raises(ValueError, match="expected"):
        snapshot_io.read_snapshot(path, grid, params)
