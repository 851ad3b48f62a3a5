"""Trial objectives: body-frame forward displacement, mechanical power,
efficiency (meters per joule) and speed.

Efficiency divides average forward velocity by average mechanical power,
which is algebraically identical to net displacement per joule. Per-motor
mechanical power is clamped at zero by default: hobby servos do not
regenerate, so negative torque-rate products dissipate rather than recover
energy. The unclamped sum stays available behind a switch for sensitivity
studies.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .sim import TrialResult


class DegenerateTrialError(RuntimeError):
    """Average power was exactly zero; efficiency is undefined."""


@dataclass(frozen=True)
class ObjectiveValue:
    efficiency_m_per_j: float
    speed_m_per_s: float
    displacement_m: float
    avg_power_w: float
    valid: bool


def forward_displacement(pose_initial: Sequence[float], pose_final: Sequence[float]) -> float:
    """First component of the relative pose expressed in the initial body frame.

    Planar analogue of mapping the final pose back through the inverse of the
    initial pose and reading the forward axis; invariant under any rigid
    transform applied to both poses.
    """
    xi, zi, thi = (float(v) for v in pose_initial)
    xf, zf, _ = (float(v) for v in pose_final)
    if not all(map(math.isfinite, (xi, zi, thi, xf, zf))):
        raise ValueError("poses must be finite")
    return (xf - xi) * math.cos(thi) + (zf - zi) * math.sin(thi)


def mech_power(
    torques_nm: Sequence[float],
    rates_rad_s: Sequence[float],
    clamp_negative: bool = True,
) -> float:
    """Total mechanical power of the six servos at one instant, in watts."""
    tau = np.asarray(torques_nm, dtype=float)
    omega = np.asarray(rates_rad_s, dtype=float)
    if tau.shape != (6,) or omega.shape != (6,):
        raise ValueError("expected 6 torques and 6 rates")
    p = tau * omega
    if clamp_negative:
        p = np.maximum(p, 0.0)
    return float(np.sum(p))


def power_series(trial: TrialResult, clamp_negative: bool = True) -> np.ndarray:
    p = trial.torques_nm * trial.rates_rad_s
    if clamp_negative:
        p = np.maximum(p, 0.0)
    return np.sum(p, axis=1)


def efficiency(
    trial: TrialResult,
    *,
    clamp_negative_power: bool = True,
    worst_case_efficiency: float = 0.0,
    worst_case_speed: float = 0.0,
) -> ObjectiveValue:
    """Objective values for one trial.

    A trial that fell or diverged gets the configured worst-case scores with
    valid=False so the optimizer stays bounded.
    """
    if trial.outcome != "completed":
        return ObjectiveValue(
            efficiency_m_per_j=worst_case_efficiency,
            speed_m_per_s=worst_case_speed,
            displacement_m=0.0,
            avg_power_w=0.0,
            valid=False,
        )
    disp = forward_displacement(trial.poses[0], trial.poses[-1])
    duration = trial.duration_s
    avg_power = float(np.mean(power_series(trial, clamp_negative_power)))
    if avg_power == 0.0:
        raise DegenerateTrialError("average mechanical power is zero")
    total_energy = avg_power * duration
    return ObjectiveValue(
        efficiency_m_per_j=disp / total_energy,
        speed_m_per_s=disp / duration,
        displacement_m=disp,
        avg_power_w=avg_power,
        valid=True,
    )
