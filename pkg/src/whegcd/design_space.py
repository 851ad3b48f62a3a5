"""The 7-parameter co-design vector: four gait clock parameters plus three
wheg morphology parameters, with bounds, validation, and unit-cube mapping.

Serialization order is fixed: [period_s, slow_fraction, slow_start_rad,
slow_end_rad, front_len_m, back_len_m, thickness_m].
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

PARAM_NAMES: tuple[str, ...] = (
    "period_s",
    "slow_fraction",
    "slow_start_rad",
    "slow_end_rad",
    "front_len_m",
    "back_len_m",
    "thickness_m",
)

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class GaitParams:
    """Two-phase clock parameters: a slow sweep over a fixed arc, then a fast
    recirculation covering the rest of the circle.

    Angles are measured with 0 rad pointing straight down from the hub,
    positive in the rolling (forward-travel) direction.
    """

    period_s: float
    slow_fraction: float
    slow_start_rad: float
    slow_end_rad: float

    def violations(self) -> list[str]:
        out = []
        if not self.period_s > 0.0:
            out.append("period_s must be > 0")
        if not 0.0 < self.slow_fraction < 1.0:
            out.append("slow_fraction out of (0,1)")
        if not self.slow_start_rad < self.slow_end_rad:
            out.append("slow phase interval reversed")
        elif not self.slow_end_rad - self.slow_start_rad < TWO_PI:
            out.append("slow arc must be < 2*pi")
        return out


@dataclass(frozen=True)
class MorphParams:
    """Wheg geometry: front/back radii and cross-section thickness.

    Bilateral symmetry is built in; left and right whegs are identical.
    """

    front_len_m: float
    back_len_m: float
    thickness_m: float

    def violations(self) -> list[str]:
        out = []
        for name in ("front_len_m", "back_len_m", "thickness_m"):
            if not getattr(self, name) > 0.0:
                out.append(f"{name} must be > 0")
        return out


@dataclass(frozen=True)
class Design:
    gait: GaitParams
    morph: MorphParams

    def to_vector(self) -> np.ndarray:
        g, m = self.gait, self.morph
        return np.array(
            [
                g.period_s,
                g.slow_fraction,
                g.slow_start_rad,
                g.slow_end_rad,
                m.front_len_m,
                m.back_len_m,
                m.thickness_m,
            ]
        )

    @classmethod
    def from_vector(cls, v: Sequence[float]) -> "Design":
        v = np.asarray(v, dtype=float)
        if v.shape != (7,):
            raise ValueError(f"design vector must have 7 entries, got shape {v.shape}")
        return cls(
            gait=GaitParams(float(v[0]), float(v[1]), float(v[2]), float(v[3])),
            morph=MorphParams(float(v[4]), float(v[5]), float(v[6])),
        )

    @classmethod
    def from_mapping(cls, values: Mapping[str, float]) -> "Design":
        missing = [n for n in PARAM_NAMES if n not in values]
        if missing:
            raise ValueError(f"missing design fields: {', '.join(missing)}")
        return cls.from_vector([float(values[n]) for n in PARAM_NAMES])

    def to_mapping(self) -> dict[str, float]:
        return dict(zip(PARAM_NAMES, self.to_vector().tolist()))

    def to_record(self) -> str:
        """Flat text record, one `name = value` line per parameter, fixed order."""
        vec = self.to_vector()
        return "".join(f"{n} = {v!r}\n" for n, v in zip(PARAM_NAMES, vec.tolist()))

    @classmethod
    def from_record(cls, text: str) -> "Design":
        values: dict[str, float] = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"design record line {lineno}: expected 'name = value'")
            name, _, val = line.partition("=")
            name = name.strip()
            if name not in PARAM_NAMES:
                raise ValueError(f"design record line {lineno}: unknown field {name!r}")
            values[name] = float(val.strip())
        return cls.from_mapping(values)

    def violations(self) -> list[str]:
        return self.gait.violations() + self.morph.violations()


@dataclass(frozen=True)
class Bounds:
    """Box bounds over the 7 design parameters, in serialization order."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self) -> None:
        lo = np.asarray(self.lower, dtype=float)
        hi = np.asarray(self.upper, dtype=float)
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)
        if lo.shape != (7,) or hi.shape != (7,):
            raise ValueError("bounds must be 7-vectors")
        bad = np.nonzero(~(lo < hi))[0]
        if bad.size:
            names = ", ".join(PARAM_NAMES[i] for i in bad)
            raise ValueError(f"lower must be < upper for: {names}")

    @classmethod
    def from_mapping(cls, intervals: Mapping[str, Iterable[float]]) -> "Bounds":
        missing = [n for n in PARAM_NAMES if n not in intervals]
        if missing:
            raise ValueError(f"missing bound intervals: {', '.join(missing)}")
        lo, hi = [], []
        for n in PARAM_NAMES:
            pair = list(intervals[n])
            if len(pair) != 2:
                raise ValueError(f"bound for {n} must be a (lower, upper) pair")
            lo.append(float(pair[0]))
            hi.append(float(pair[1]))
        return cls(np.array(lo), np.array(hi))


def validate(design: Design, bounds: Bounds) -> list[str]:
    """All violated invariants of `design`, empty iff valid.

    Violations are returned as data; nothing raises.
    """
    out = design.violations()
    vec = design.to_vector()
    for i, name in enumerate(PARAM_NAMES):
        if not bounds.lower[i] <= vec[i] <= bounds.upper[i]:
            out.append(
                f"{name}={vec[i]:g} outside bounds "
                f"[{bounds.lower[i]:g}, {bounds.upper[i]:g}]"
            )
    return out


def to_unit(design: Design, bounds: Bounds) -> np.ndarray:
    """Affine map of a design onto the unit hypercube defined by `bounds`."""
    vec = design.to_vector()
    for i, name in enumerate(PARAM_NAMES):
        if not bounds.lower[i] <= vec[i] <= bounds.upper[i]:
            raise ValueError(
                f"design parameter {name}={vec[i]:g} outside bounds "
                f"[{bounds.lower[i]:g}, {bounds.upper[i]:g}]"
            )
    return (vec - bounds.lower) / (bounds.upper - bounds.lower)


def from_unit(u: Sequence[float], bounds: Bounds) -> Design:
    """Inverse of :func:`to_unit`."""
    u = np.asarray(u, dtype=float)
    if u.shape != (7,):
        raise ValueError(f"unit point must have 7 entries, got shape {u.shape}")
    for i, name in enumerate(PARAM_NAMES):
        if not 0.0 <= u[i] <= 1.0:
            raise ValueError(f"unit coordinate {name}={u[i]:g} outside [0, 1]")
    return Design.from_vector(bounds.lower + u * (bounds.upper - bounds.lower))


def nominal(values: Mapping[str, float]) -> Design:
    """The configured baseline design used for all 'vs. nominal' comparisons.

    Raises if any of the seven fields is missing or violates a type invariant.
    """
    design = Design.from_mapping(values)
    bad = design.violations()
    if bad:
        raise ValueError("invalid nominal design: " + "; ".join(bad))
    return design
