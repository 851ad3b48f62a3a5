"""Run configuration: one YAML file with nested sections mirroring the
module layout. Every value ships with a documented default; unknown keys and
type mismatches fail with the dotted field path.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

import yaml

from .design_space import Bounds, Design, nominal as nominal_design


class ConfigError(Exception):
    """Raised when a config file cannot be parsed into a RunConfig."""


@dataclass
class BoundsConfig:
    period_s: tuple[float, float] = (0.3, 3.0)
    slow_fraction: tuple[float, float] = (0.2, 0.9)
    slow_start_rad: tuple[float, float] = (-1.5, 0.0)
    slow_end_rad: tuple[float, float] = (0.0, 1.5)
    front_len_m: tuple[float, float] = (0.015, 0.05)
    back_len_m: tuple[float, float] = (0.015, 0.05)
    thickness_m: tuple[float, float] = (0.001, 0.005)

    def to_bounds(self) -> Bounds:
        return Bounds.from_mapping(dataclasses.asdict(self))


@dataclass
class NominalConfig:
    """Baseline platform parameters; the paper-style 'as-is' comparison point."""

    period_s: float = 1.0
    slow_fraction: float = 0.6
    slow_start_rad: float = -0.7
    slow_end_rad: float = 0.7
    front_len_m: float = 0.025
    back_len_m: float = 0.025
    thickness_m: float = 0.0025

    def to_design(self) -> Design:
        return nominal_design(dataclasses.asdict(self))


@dataclass
class ComplianceConfig:
    youngs_modulus_pa: float = 2.0e9
    width_m: float = 0.01
    n_segments: int = 16
    chain_damping_ratio: float = 0.7


@dataclass
class SimConfig:
    dt_s: float = 5.0e-4
    sample_rate_hz: float = 200.0
    trial_duration_s: float = 10.0
    gravity_m_s2: float = 9.81
    body_mass_kg: float = 0.45
    body_inertia_kgm2: float = 1.0e-3
    hub_offsets_m: tuple[float, float, float] = (0.055, 0.0, -0.055)
    # effective inertia about the servo axis, gearbox-reflected
    wheg_inertia_kgm2: float = 2.0e-4
    servo_kp_nm_rad: float = 3.0
    servo_kd_nms_rad: float = 0.05
    servo_torque_limit_nm: float = 0.39
    servo_max_speed_rad_s: float = 11.9
    contact_damping_ratio: float = 0.7
    contact_arc_samples: int = 48
    friction_reg_speed_m_s: float = 1.0e-3
    start_x_m: float = -0.15
    settle_drop_m: float = 0.005
    # must sit above the regularized-friction creep floor (~2e-7 J on slopes)
    settle_ke_threshold_j: float = 1.0e-6
    settle_min_time_s: float = 0.2
    settle_timeout_s: float = 3.0
    fall_pitch_rad: float = 1.2


@dataclass
class FlatTerrainConfig:
    mu: float = 0.9


@dataclass
class RoughTerrainConfig:
    seed: int = 12345
    amplitude_m: float = 0.01
    correlation_m: float = 0.05
    mu: float = 0.9


@dataclass
class StairsTerrainConfig:
    step_height_m: float = 0.03
    step_depth_m: float = 0.15
    mu: float = 0.9


@dataclass
class RampTerrainConfig:
    slope_rad: float = math.radians(15.0)
    mu_low: float = 0.3


@dataclass
class TerrainConfig:
    extent_m: tuple[float, float] = (-2.0, 12.0)
    mu_default: float = 0.9
    flat: FlatTerrainConfig = field(default_factory=FlatTerrainConfig)
    rough: RoughTerrainConfig = field(default_factory=RoughTerrainConfig)
    stairs: StairsTerrainConfig = field(default_factory=StairsTerrainConfig)
    ramp: RampTerrainConfig = field(default_factory=RampTerrainConfig)


@dataclass
class OptimizerConfig:
    budget: int = 100
    init_points: int = 16
    seed: int = 1
    objective: str = "efficiency"  # efficiency | speed
    noise_floor: float = 1.0e-6
    candidates: int = 1024
    refine_starts: int = 8
    hyper_budget: int = 200


@dataclass
class MetricsConfig:
    clamp_negative_power: bool = True
    worst_case_efficiency: float = 0.0
    worst_case_speed: float = 0.0


@dataclass
class CrossEvalConfig:
    repetitions: int = 8


@dataclass
class OutputConfig:
    directory: str = "runs"


@dataclass
class RunConfig:
    bounds: BoundsConfig = field(default_factory=BoundsConfig)
    nominal: NominalConfig = field(default_factory=NominalConfig)
    compliance: ComplianceConfig = field(default_factory=ComplianceConfig)
    sim: SimConfig = field(default_factory=SimConfig)
    terrain: TerrainConfig = field(default_factory=TerrainConfig)
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    metrics: MetricsConfig = field(default_factory=MetricsConfig)
    cross_eval: CrossEvalConfig = field(default_factory=CrossEvalConfig)
    output: OutputConfig = field(default_factory=OutputConfig)


_SCALARS = (int, float, bool, str)


def _coerce(value: Any, target: Any, path: str) -> Any:
    if target is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{path}: expected a number, got {value!r}")
        return float(value)
    if target is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{path}: expected an integer, got {value!r}")
        return value
    if target is bool:
        if not isinstance(value, bool):
            raise ConfigError(f"{path}: expected a boolean, got {value!r}")
        return value
    if target is str:
        if not isinstance(value, str):
            raise ConfigError(f"{path}: expected a string, got {value!r}")
        return value
    raise ConfigError(f"{path}: unsupported config field type {target!r}")


def _merge(instance: Any, data: Mapping[str, Any], path: str = "") -> None:
    if not isinstance(data, Mapping):
        raise ConfigError(f"{path or 'config'}: expected a mapping, got {type(data).__name__}")
    fields = {f.name: f for f in dataclasses.fields(instance)}
    for key, value in data.items():
        here = f"{path}.{key}" if path else str(key)
        if key not in fields:
            raise ConfigError(f"unknown config key: {here}")
        current = getattr(instance, key)
        if dataclasses.is_dataclass(current):
            _merge(current, value, here)
        elif isinstance(current, tuple):
            if not isinstance(value, (list, tuple)) or len(value) != len(current):
                raise ConfigError(f"{here}: expected a list of {len(current)} numbers")
            setattr(
                instance,
                key,
                tuple(_coerce(v, type(c), f"{here}[{i}]") for i, (v, c) in enumerate(zip(value, current))),
            )
        else:
            setattr(instance, key, _coerce(value, type(current), here))


def load_config(path: str | Path | None = None) -> RunConfig:
    """Defaults overlaid with the YAML file at `path` (if given)."""
    cfg = RunConfig()
    if path is None:
        return cfg
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"config file not found: {p}")
    try:
        data = yaml.safe_load(p.read_text())
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse {p}: {exc}") from exc
    if data is None:
        return cfg
    _merge(cfg, data)
    _validate(cfg)
    return cfg


def _validate(cfg: RunConfig) -> None:
    if not 0.0 < cfg.sim.dt_s <= 2.0e-3:
        raise ConfigError("sim.dt_s: must be in (0, 2e-3] seconds")
    if cfg.sim.body_mass_kg <= 0.0 or cfg.sim.body_inertia_kgm2 <= 0.0:
        raise ConfigError("sim: body mass and inertia must be > 0")
    if cfg.optimizer.objective not in ("efficiency", "speed"):
        raise ConfigError("optimizer.objective: must be 'efficiency' or 'speed'")
    if cfg.optimizer.budget < cfg.optimizer.init_points:
        raise ConfigError("optimizer.budget: must be >= optimizer.init_points")
    if cfg.cross_eval.repetitions < 1:
        raise ConfigError("cross_eval.repetitions: must be >= 1")
    try:
        cfg.bounds.to_bounds()
        cfg.nominal.to_design()
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def default_yaml() -> str:
    """The full default configuration as a YAML document."""
    return yaml.safe_dump(_as_plain(RunConfig()), sort_keys=False)


def _as_plain(obj: Any) -> Any:
    if dataclasses.is_dataclass(obj):
        return {f.name: _as_plain(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, tuple):
        return [_as_plain(v) for v in obj]
    return obj
