"""Scenario files: flat ``key = value`` text with ``#`` comments.

Lists are comma separated; gauge positions additionally accept an
inclusive range ``start:stop:step``. Unknown or repeated keys are errors,
reported with the offending line number.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import ConfigError, InvalidParameterError
from .params import GRAVITY, DimensionlessFrame, PhysicalParams
from .solver import SolverConfig

MODES = ("analytic", "numeric", "full-pipeline")
FLOW_SELECTORS = ("both", "flow", "no_flow")
TANK_LENGTH = 5.0

_REQUIRED = ("k0", "a0", "t0", "epsilon", "gauge_positions")
_DEFAULTS = {
    "name": None,
    "description": "",
    "g": GRAVITY,
    "omega_detuning": (0.0,),
    "force_F": 0.0,
    "with_flow": "both",
    "phase_gauge_step": 0.025,
    "max_position": TANK_LENGTH,
    "mode": "full-pipeline",
    "output_dir": None,
    "d_xi": None,
    "boundary_margin": 0.05,
    "norm_drift_tol": 1e-10,
    "grid_half_width_tau0": 8.0,
    "grid_points_per_tau0": 32.0,
    "sample_rate_factor": 40.0,
    "record_half_width_t0": 6.0,
    "write_snapshots": True,
}
_FLOATS = {"k0", "a0", "t0", "epsilon", "g", "force_F", "phase_gauge_step", "max_position", "d_xi",
           "boundary_margin", "norm_drift_tol", "grid_half_width_tau0", "grid_points_per_tau0",
           "sample_rate_factor", "record_half_width_t0"}
_KNOWN = set(_REQUIRED) | set(_DEFAULTS)
_PARAM_KEYS = {"k0": "k0", "a0": "a0", "t0": "t0", "epsilon": "epsilon", "g": "g",
               "Omega0": "omega_detuning", "F": "force_F"}


@dataclass(frozen=True)
class Run:
    """One packet launch: a detuning and a force value."""

    params: PhysicalParams

    @property
    def tag(self) -> str:
        return f"omega{self.params.Omega0:+g}_F{self.params.F:+g}"


@dataclass(frozen=True)
class Scenario:
    name: str
    params: PhysicalParams
    omega_detunings: tuple[float, ...]
    force_F: float
    with_flow: str
    gauge_positions: tuple[float, ...]
    mode: str = "full-pipeline"
    output_dir: str | None = None
    description: str = ""
    phase_gauge_step: float = 0.025
    max_position: float = TANK_LENGTH
    solver: SolverConfig = field(default_factory=SolverConfig)
    grid_half_width_tau0: float = 8.0
    grid_points_per_tau0: float = 32.0
    sample_rate_factor: float = 40.0
    record_half_width_t0: float = 6.0
    write_snapshots: bool = True

    @property
    def frame(self) -> DimensionlessFrame:
        return DimensionlessFrame(self.params)

    @property
    def force_values(self) -> tuple[float, ...]:
        return {"both": (0.0, self.force_F), "flow": (self.force_F,), "no_flow": (0.0,)}[self.with_flow]

    def runs(self) -> list[Run]:
        return [Run(self.params.replace(Omega0=om, F=F))
                for om in self.omega_detunings for F in self.force_values]

    def phase_positions(self) -> np.ndarray:
        """Dense gauge row from x = 0 used for the across-gauge phase unwrapping."""
        stop = max(self.gauge_positions)
        n = int(math.floor(stop / self.phase_gauge_step + 1e-9))
        x = np.round(self.phase_gauge_step * np.arange(n + 1), 12)
        if stop - x[-1] > 1e-9:
            x = np.append(x, stop)
        return x


def _parse_floats(text: str) -> tuple[float, ...]:
    if ":" in text:
        parts = [float(p) for p in text.split(":")]
        if len(parts) != 3 or parts[2] <= 0:
            raise ValueError("range must be start:stop:step with a positive step")
        start, stop, step = parts
        n = int(math.floor((stop - start) / step + 1e-9))
        return tuple(float(round(start + i * step, 12)) for i in range(n + 1))
    items = [p.strip() for p in text.split(",") if p.strip()]
    return tuple(float(p) for p in items)


def _parse_bool(text: str) -> bool:
    low = text.lower()
    if low in ("true", "yes", "1", "on"):
        return True
    if low in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def parse_text(text: str, source="<string>") -> tuple[dict, dict]:
    """Raw ``(values, line_numbers)`` of a scenario file."""
    values, lines = {}, {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", source, lineno)
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in _KNOWN:
            raise ConfigError(f"unknown key {key!r}", source, lineno)
        if key in values:
            raise ConfigError(f"duplicate key {key!r} (first set on line {lines[key]})", source, lineno)
        try:
            if key in ("omega_detuning", "gauge_positions"):
                parsed = _parse_floats(value)
            elif key == "write_snapshots":
                parsed = _parse_bool(value)
            elif key in _FLOATS:
                parsed = float(value)
            else:
                parsed = value
        except ValueError as exc:
            raise ConfigError(f"bad value for {key!r}: {exc}", source, lineno) from None
        values[key] = parsed
        lines[key] = lineno
    return values, lines


def build_scenario(values: dict, lines: dict, source="<string>") -> Scenario:
    for key in _REQUIRED:
        if key not in values:
            raise ConfigError(f"missing required key {key!r}", source)
    cfg = {**_DEFAULTS, **values}

    def fail(key, msg):
        raise ConfigError(msg, source, lines.get(key))

    if cfg["mode"] not in MODES:
        fail("mode", f"mode must be one of {', '.join(MODES)}")
    if cfg["with_flow"] not in FLOW_SELECTORS:
        fail("with_flow", f"with_flow must be one of {', '.join(FLOW_SELECTORS)}")
    gauges = tuple(cfg["gauge_positions"])
    if not gauges:
        fail("gauge_positions", "gauge_positions is empty")
    if any(x < 0 for x in gauges):
        fail("gauge_positions", "gauge positions must be non-negative")
    if any(b <= a for a, b in zip(gauges, gauges[1:])):
        fail("gauge_positions", "gauge positions must be strictly increasing")
    if gauges[-1] > cfg["max_position"]:
        fail("gauge_positions", f"gauge at {gauges[-1]} m lies beyond max_position={cfg['max_position']} m")
    if not cfg["omega_detuning"]:
        fail("omega_detuning", "omega_detuning is empty")
    if not cfg["phase_gauge_step"] > 0:
        fail("phase_gauge_step", "phase_gauge_step must be positive")
    for key in ("grid_half_width_tau0", "grid_points_per_tau0", "record_half_width_t0"):
        if not cfg[key] > 0:
            fail(key, f"{key} must be positive")
    if cfg["sample_rate_factor"] <= 4:
        fail("sample_rate_factor", "sample_rate_factor must exceed 4")

    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            params = PhysicalParams(k0=cfg["k0"], a0=cfg["a0"], t0=cfg["t0"], epsilon=cfg["epsilon"],
                                    F=cfg["force_F"], g=cfg["g"])
            for om in cfg["omega_detuning"]:
                params.replace(Omega0=om)
        solver = SolverConfig(d_xi=cfg["d_xi"], boundary_margin=cfg["boundary_margin"],
                              norm_drift_tol=cfg["norm_drift_tol"])
    except InvalidParameterError as exc:
        key = _PARAM_KEYS.get(exc.field, exc.field)
        raise ConfigError(str(exc), source, lines.get(key)) from None

    name = cfg["name"] or (Path(str(source)).stem if source != "<string>" else "scenario")
    return Scenario(
        name=name,
        params=params,
        omega_detunings=tuple(cfg["omega_detuning"]),
        force_F=cfg["force_F"],
        with_flow=cfg["with_flow"],
        gauge_positions=gauges,
        mode=cfg["mode"],
        output_dir=cfg["output_dir"],
        description=cfg["description"],
        phase_gauge_step=cfg["phase_gauge_step"],
        max_position=cfg["max_position"],
        solver=solver,
        grid_half_width_tau0=cfg["grid_half_width_tau0"],
        grid_points_per_tau0=cfg["grid_points_per_tau0"],
        sample_rate_factor=cfg["sample_rate_factor"],
        record_half_width_t0=cfg["record_half_width_t0"],
        write_snapshots=cfg["write_snapshots"],
    )


def loads(text: str, source="<string>") -> Scenario:
    values, lines = parse_text(text, source)
    return build_scenario(values, lines, source)


def bundled_scenarios() -> list[str]:
    root = resources.files("wavepackets") / "scenarios"
    return sorted(p.name[:-4] for p in root.iterdir() if p.name.endswith(".cfg"))


def resolve(name_or_path: str) -> Path:
    """A file path, or the name of a bundled scenario."""
    path = Path(name_or_path)
    if path.is_file():
        return path
    candidate = resources.files("wavepackets") / "scenarios" / f"{name_or_path}.cfg"
    if candidate.is_file():
        return Path(str(candidate))
    raise ConfigError(f"no such scenario file or bundled scenario: {name_or_path!r}")


def load(name_or_path: str) -> Scenario:
    path = resolve(name_or_path)
    try:
        text = path.read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise ConfigError(f"not valid UTF-8: {exc}", path) from None
    return loads(text, path)
