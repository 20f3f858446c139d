import pytest

from tripleflow import config
from tripleflow.errors import ConfigError


GOOD = """
# model
eps = 0.0625
delta = 0.05
sigma12 = 0.8
g_a = 2.0
g_c0 = 0.3
dt = 5e-4

# run
nx = 32
ny = 48
Ly = 1.5
bc_left = periodic
bc_right = periodic
init = disk
init_phase = 2
init_radius = 0.15
binary_output = yes
snapshot_every = 10
"""


def test_good_config_round_trip():
    cfg = config.config_from_text(GOOD)
    assert cfg.params.eps == 0.0625
    assert cfg.params.delta == 0.05
    assert cfg.params.sigma12 == 0.8
    assert cfg.params.g.a == 2.0
    assert cfg.params.g.c0 == 0.3
    assert cfg.params.dt == 5e-4
    s = cfg.settings
    assert (s.nx, s.ny) == (32, 48)
    assert s.binary_output is True
    assert s.snapshot_every == 10
    grid = cfg.make_grid()
    assert grid.hx == pytest.approx(1.0 / 32)
    assert grid.hy == pytest.approx(1.5 / 48)
    assert grid.periodic_x and not grid.periodic_y


def test_defaults_alone_are_valid():
    cfg = config.config_from_text("")
    assert cfg.settings.init == "uniform"
    assert cfg.params.eps > 0.0


def test_parse_pairs_reports_line_numbers():
    with pytest.raises(ConfigError, match="line 3"):
        config.parse_pairs("a = 1\n\nnonsense line\n")


def test_parse_pairs_rejects_duplicates_and_empties():
    with pytest.raises(ConfigError, match="duplicate key"):
        config.parse_pairs("dt = 1\ndt = 2\n")
    with pytest.raises(ConfigError, match="empty key or value"):
        config.parse_pairs("dt =\n")


def test_unknown_key_is_a_hard_error():
    with pytest.raises(ConfigError, match="unknown config key"):
        config.config_from_text("epz = 0.1\n")


def test_bad_numeric_value_names_the_key():
    with pytest.raises(ConfigError, match="bad value for eps"):
        config.config_from_text("eps = tiny\n")


def test_nonpositive_eps_rejected_with_message():
    with pytest.raises(ConfigError, match="eps must be positive"):
        config.config_from_text("eps = 0\n")


@pytest.mark.parametrize(
    "text, match",
    [
        ("nx = 2\n", "grid must be at least 4x4"),
        ("Lx = -1\n", "box lengths must be positive"),
        ("diag_every = 0\n", "cadence settings must be positive"),
        ("init = blob\n", "unknown initial condition"),
        ("init = restore\n", "needs restore_from"),
        ("init_normal = z\n", "init_normal must be x or y"),
        ("init_pair = 11\n", "two distinct phases"),
        ("init_phase = 4\n", "init_phase must be 1..3"),
    ],
)
def test_settings_validation_messages(text, match):
    with pytest.raises(ConfigError, match=match):
        config.config_from_text(text)


def test_bool_parsing_accepts_common_spellings():
    for raw, want in [("true", True), ("Off", False), ("1", True), ("no", False)]:
        assert config._to_bool(raw) is want
    with pytest.raises(ConfigError):
        config._to_bool("maybe")


def test_tol_overrides_file(tmp_path):
    path = tmp_path / "tols.cfg"
    path.write_text("front_speed = 0.2  # loosened\nangle_deg = 5\n")
    got = config.load_tol_overrides(path, {"front_speed", "angle_deg", "other"})
    assert got == {"front_speed": 0.2, "angle_deg": 5.0}


def test_tol_overrides_reject_unknown_and_bad_values(tmp_path):
    path = tmp_path / "tols.cfg"
    path.write_text("no_such_check = 0.2\n")
    with pytest.raises(ConfigError, match="unknown tolerance name"):
        config.load_tol_overrides(path, {"front_speed"})
    path.write_text("front_speed = wide\n")
    with pytest.raises(ConfigError, match="bad tolerance value"):
        config.load_tol_overrides(path, {"front_speed"})


def test_load_config_from_file(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("nx = 8\nny = 8\ninit = planar\ninit_pair = 13\n")
    cfg = config.load_config(path)
    assert cfg.settings.init_pair == "13"
