"""Open-loop two-speed wheg clock and the alternating tripod split.

Each wheg tracks the same periodic trajectory: a slow constant-rate sweep
through the ground-contact arc [slow_start, slow_end] during the first
slow_fraction of the period, then a fast constant-rate recirculation through
the remaining 2*pi - arc. Tripod B runs the identical clock shifted by half a
period. Angles are unwrapped and strictly increasing.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .design_space import TWO_PI, GaitParams

# Leg indexing: 0 front-left, 1 front-right, 2 mid-left, 3 mid-right,
# 4 back-left, 5 back-right.
TRIPOD_A_LEGS = (0, 3, 4)
TRIPOD_B_LEGS = (1, 2, 5)


@dataclass(frozen=True)
class TripodAssignment:
    group_of_leg: tuple[str, ...]

    def __post_init__(self) -> None:
        if len(self.group_of_leg) != 6:
            raise ValueError("tripod assignment must cover legs 0..5")
        a = tuple(i for i, g in enumerate(self.group_of_leg) if g == "A")
        b = tuple(i for i, g in enumerate(self.group_of_leg) if g == "B")
        if len(a) != 3 or len(b) != 3:
            raise ValueError("each tripod must contain exactly 3 legs")


def default_tripods() -> TripodAssignment:
    groups = ["B"] * 6
    for leg in TRIPOD_A_LEGS:
        groups[leg] = "A"
    return TripodAssignment(tuple(groups))


@dataclass(frozen=True)
class ClockSample:
    angle_rad: float
    rate_rad_s: float


def _require_valid(gait: GaitParams) -> None:
    bad = gait.violations()
    if bad:
        raise ValueError("invalid gait: " + "; ".join(bad))


def slow_rate(gait: GaitParams) -> float:
    arc = gait.slow_end_rad - gait.slow_start_rad
    return arc / (gait.slow_fraction * gait.period_s)


def fast_rate(gait: GaitParams) -> float:
    arc = gait.slow_end_rad - gait.slow_start_rad
    return (TWO_PI - arc) / ((1.0 - gait.slow_fraction) * gait.period_s)


def wheg_angle(t: float, gait: GaitParams, half_cycle_offset: bool = False) -> float:
    """Unwrapped commanded wheg angle at time t (tripod B shifts by T/2)."""
    _require_valid(gait)
    period = gait.period_s
    te = t + 0.5 * period if half_cycle_offset else t
    cycle = math.floor(te / period)
    u = te - cycle * period
    t_slow = gait.slow_fraction * period
    arc = gait.slow_end_rad - gait.slow_start_rad
    if u < t_slow:
        local = gait.slow_start_rad + (u / t_slow) * arc
    else:
        local = gait.slow_end_rad + ((u - t_slow) / (period - t_slow)) * (TWO_PI - arc)
    return local + TWO_PI * cycle


def wheg_rate(t: float, gait: GaitParams, half_cycle_offset: bool = False) -> float:
    """Commanded angular rate at time t; piecewise constant, always positive."""
    _require_valid(gait)
    period = gait.period_s
    te = t + 0.5 * period if half_cycle_offset else t
    u = te - math.floor(te / period) * period
    if u < gait.slow_fraction * period:
        return slow_rate(gait)
    return fast_rate(gait)


def clock_sample(t: float, gait: GaitParams, half_cycle_offset: bool = False) -> ClockSample:
    return ClockSample(
        angle_rad=wheg_angle(t, gait, half_cycle_offset),
        rate_rad_s=wheg_rate(t, gait, half_cycle_offset),
    )
