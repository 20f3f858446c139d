"""Flat key=value run configuration.

One `key = value` pair per line, `#` starts a comment, blank lines are
skipped.  Every key must be known; a typo is a hard error rather than a
silently ignored setting.  Keys fall into three groups: model parameters,
box geometry, and run controls (driving, initial condition, output).
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields as dc_fields

from .errors import ConfigError
from .grid import BoxBC, Grid2D
from .params import GSpec, ModelParams, validate


def _to_bool(raw: str) -> bool:
    low = raw.strip().lower()
    if low in ("true", "yes", "on", "1"):
        return True
    if low in ("false", "no", "off", "0"):
        return False
    raise ConfigError(f"expected a boolean, got {raw!r}")


_PARAM_KEYS = {
    "rho1": float,
    "rho2": float,
    "rho3": float,
    "gamma1": float,
    "gamma2": float,
    "gamma3": float,
    "sigma12": float,
    "sigma13": float,
    "sigma23": float,
    "eps": float,
    "delta": float,
    "D": float,
    "alpha": float,
    "d0": float,
    "c_star": float,
    "g_form": str,
    "g_a": float,
    "g_c0": float,
    "dt": float,
    "t_end": float,
    "stab_s": float,
    "cg_rtol": float,
    "cg_maxiter": int,
}


@dataclass
class RunSettings:
    """Everything in a config that is not a model parameter."""

    nx: int = 64
    ny: int = 64
    Lx: float = 1.0
    Ly: float = 1.0
    origin_x: float = 0.0
    origin_y: float = 0.0
    bc_left: str = "wall"
    bc_right: str = "wall"
    bc_bottom: str = "wall"
    bc_top: str = "wall"

    scenario: str = "free"
    out_dir: str = "out"
    snapshot_every: int = 0
    diag_every: int = 1
    binary_output: bool = False
    max_steps: int = 100000

    flow_enabled: bool = True
    reactions_enabled: bool = True
    lid_top: float = 0.0
    lid_bottom: float = 0.0
    inflow_umax: float = 0.0
    inflow_c: float = 0.0
    steady_tol: float = 1e-7

    init: str = "uniform"
    init_x0: float = 0.5
    init_normal: str = "x"
    init_pair: str = "12"
    init_center_x: float = 0.5
    init_center_y: float = 0.5
    init_radius: float = 0.2
    init_phase: int = 3
    init_c: float = 0.0
    restore_from: str = ""


_TYPE_BY_NAME = {"int": int, "float": float, "str": str, "bool": _to_bool}
_SETTINGS_TYPES = {f.name: _TYPE_BY_NAME[f.type] for f in dc_fields(RunSettings)}


@dataclass
class RunConfig:
    params: ModelParams
    settings: RunSettings

    def make_grid(self) -> Grid2D:
        s = self.settings
        bc = BoxBC(
            left=s.bc_left, right=s.bc_right, bottom=s.bc_bottom, top=s.bc_top
        )
        return Grid2D(
            nx=s.nx,
            ny=s.ny,
            hx=s.Lx / s.nx,
            hy=s.Ly / s.ny,
            origin=(s.origin_x, s.origin_y),
            bc=bc,
        )


def parse_pairs(text: str, label: str = "config") -> dict[str, str]:
    """Split flat text into key/value strings, complaining about bad lines."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{label} line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key or not value:
            raise ConfigError(f"{label} line {lineno}: empty key or value")
        if key in out:
            raise ConfigError(f"{label} line {lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def config_from_text(text: str) -> RunConfig:
    pairs = parse_pairs(text)
    param_kwargs: dict = {}
    g_kwargs: dict = {}
    settings = RunSettings()
    for key, raw in pairs.items():
        if key in _PARAM_KEYS:
            try:
                value = _PARAM_KEYS[key](raw)
            except ValueError as exc:
                raise ConfigError(f"bad value for {key}: {raw!r}") from exc
            if key == "g_form":
                g_kwargs["form"] = value
            elif key == "g_a":
                g_kwargs["a"] = value
            elif key == "g_c0":
                g_kwargs["c0"] = value
            else:
                param_kwargs[key] = value
        elif key in _SETTINGS_TYPES:
            try:
                setattr(settings, key, _SETTINGS_TYPES[key](raw))
            except ValueError as exc:
                raise ConfigError(f"bad value for {key}: {raw!r}") from exc
        else:
            raise ConfigError(f"unknown config key {key!r}")
    params = ModelParams(g=GSpec(**g_kwargs), **param_kwargs)
    validate(params)
    _check_settings(settings)
    return RunConfig(params=params, settings=settings)


def load_config(path) -> RunConfig:
    with open(path) as fh:
        return config_from_text(fh.read())


def _check_settings(s: RunSettings) -> None:
    if s.nx < 4 or s.ny < 4:
        raise ConfigError(f"grid must be at least 4x4, got {s.nx}x{s.ny}")
    if s.Lx <= 0.0 or s.Ly <= 0.0:
        raise ConfigError("box lengths must be positive")
    if s.snapshot_every < 0 or s.diag_every < 1 or s.max_steps < 1:
        raise ConfigError("cadence settings must be positive")
    if s.init not in ("uniform", "planar", "disk", "channel_nucleus", "restore"):
        raise ConfigError(f"unknown initial condition {s.init!r}")
    if s.init == "restore" and not s.restore_from:
        raise ConfigError("init = restore needs restore_from = <snapshot path>")
    if s.init_normal not in ("x", "y"):
        raise ConfigError(f"init_normal must be x or y, got {s.init_normal!r}")
    if sorted(s.init_pair) not in (["1", "2"], ["1", "3"], ["2", "3"]):
        raise ConfigError(f"init_pair must name two distinct phases, got {s.init_pair!r}")
    if not 1 <= s.init_phase <= 3:
        raise ConfigError(f"init_phase must be 1..3, got {s.init_phase}")


def load_tol_overrides(path, known: set[str]) -> dict[str, float]:
    """Read a tolerance-override file, restricted to recognized names."""
    with open(path) as fh:
        pairs = parse_pairs(fh.read(), label="tol-overrides")
    out = {}
    for key, raw in pairs.items():
        if key not in known:
            raise ConfigError(f"unknown tolerance name {key!r}")
        try:
            out[key] = float(raw)
        except ValueError as exc:
            raise ConfigError(f"bad tolerance value for {key}: {raw!r}") from exc
    return out
