"""Deterministic planar (sagittal-plane) simulator of the wheg hexapod.

The body is a rigid planar link with three wheg hubs; each hub carries one
wheg per tripod group, so six whegs are tracked. Servos track the open-loop
clock with PD torque under a stall-torque and no-load-speed limit. Ground
contact is a one-sided penalty spring at the deepest point of each rigid
wheg arc, with the spring constant taken from the compliance model, plus
regularized Coulomb friction. Trials integrate a fixed-step semi-implicit
Euler scheme and are bit-reproducible for identical inputs.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _simkernel as _k
from .compliance import BeamSection, tip_stiffness
from .config import RunConfig
from .design_space import Design
from .terrain import Terrain

OUTCOMES = {0: "completed", 1: "fell", 2: "diverged"}


class DivergedError(RuntimeError):
    """A step produced a non-finite state; carries the last good state."""

    def __init__(self, message: str, last_state: "SimState"):
        super().__init__(message)
        self.last_state = last_state


class SettleTimeoutError(RuntimeError):
    pass


@dataclass(frozen=True)
class RobotModel:
    body_mass_kg: float
    body_inertia_kgm2: float
    gravity_m_s2: float
    hub_offsets_m: np.ndarray  # (3,) hub x positions in the body frame
    wheg_radius_m: np.ndarray  # (6,) per-wheg, hub order front,front,mid,mid,back,back
    contact_stiffness_n_m: np.ndarray  # (6,)
    contact_damping_ns_m: np.ndarray  # (6,)
    wheg_inertia_kgm2: float
    servo_kp_nm_rad: float
    servo_kd_nms_rad: float
    servo_torque_limit_nm: float
    servo_max_speed_rad_s: float
    contact_arc_samples: int
    friction_reg_speed_m_s: float
    design: Design


@dataclass(frozen=True)
class SimState:
    pose: np.ndarray  # (3,) x, z, pitch
    velocity: np.ndarray  # (3,)
    wheg_angles_rad: np.ndarray  # (6,) unwrapped, body-relative
    wheg_rates_rad_s: np.ndarray  # (6,)
    time_s: float

    def as_vector(self) -> np.ndarray:
        return np.concatenate(
            [self.pose, self.velocity, self.wheg_angles_rad, self.wheg_rates_rad_s]
        )

    @classmethod
    def from_vector(cls, vec: np.ndarray, time_s: float) -> "SimState":
        vec = np.asarray(vec, dtype=float)
        return cls(
            pose=vec[0:3].copy(),
            velocity=vec[3:6].copy(),
            wheg_angles_rad=vec[6:12].copy(),
            wheg_rates_rad_s=vec[12:18].copy(),
            time_s=time_s,
        )


@dataclass(frozen=True)
class TrialResult:
    """Sampled trajectory of one trial plus everything metrics needs."""

    design: Design
    terrain_kind: str
    outcome: str  # completed | fell | diverged
    dt_s: float
    duration_s: float
    times_s: np.ndarray  # (S,)
    poses: np.ndarray  # (S, 3)
    velocities: np.ndarray  # (S, 3)
    torques_nm: np.ndarray  # (S, 6)
    rates_rad_s: np.ndarray  # (S, 6)
    normal_forces_n: np.ndarray  # (S, 6)

    def to_log_text(self) -> str:
        """Structured trial log: '#' metadata lines, then one CSV row per sample."""
        lines = [f"# terrain = {self.terrain_kind}", f"# outcome = {self.outcome}"]
        lines += ["# " + ln for ln in self.design.to_record().splitlines()]
        cols = (
            ["t", "x", "z", "pitch"]
            + [f"tau{i}" for i in range(6)]
            + [f"omega{i}" for i in range(6)]
        )
        lines.append(",".join(cols))
        for i in range(len(self.times_s)):
            row = [self.times_s[i], *self.poses[i], *self.torques_nm[i], *self.rates_rad_s[i]]
            lines.append(",".join(repr(float(v)) for v in row))
        return "\n".join(lines) + "\n"


def _gait_tuple(design: Design) -> tuple[float, float, float, float]:
    g = design.gait
    return g.period_s, g.slow_fraction, g.slow_start_rad, g.slow_end_rad


_OFFSET_B = np.array([0, 1, 0, 1, 0, 1], dtype=np.uint8)  # odd whegs are tripod B


def build_robot(design: Design, config: RunConfig) -> RobotModel:
    """Instantiate the planar model for one design point.

    Per-hub contact stiffness comes from the compliance tip spring law with
    the hub's radius and the design's thickness; the mid hub radius is the
    mean of front and back.
    """
    bad = design.violations()
    if bad:
        raise ValueError("invalid design: " + "; ".join(bad))
    sim = config.sim
    comp = config.compliance
    section = BeamSection(comp.youngs_modulus_pa, comp.width_m, design.morph.thickness_m)
    r_front = design.morph.front_len_m
    r_back = design.morph.back_len_m
    hub_radii = np.array([r_front, 0.5 * (r_front + r_back), r_back])
    radius = np.repeat(hub_radii, 2)
    stiffness = np.array([tip_stiffness(section, r) for r in radius])
    share = sim.body_mass_kg / 6.0
    damping = 2.0 * sim.contact_damping_ratio * np.sqrt(stiffness * share)
    return RobotModel(
        body_mass_kg=sim.body_mass_kg,
        body_inertia_kgm2=sim.body_inertia_kgm2,
        gravity_m_s2=sim.gravity_m_s2,
        hub_offsets_m=np.asarray(sim.hub_offsets_m, dtype=float),
        wheg_radius_m=radius,
        contact_stiffness_n_m=stiffness,
        contact_damping_ns_m=damping,
        wheg_inertia_kgm2=sim.wheg_inertia_kgm2,
        servo_kp_nm_rad=sim.servo_kp_nm_rad,
        servo_kd_nms_rad=sim.servo_kd_nms_rad,
        servo_torque_limit_nm=sim.servo_torque_limit_nm,
        servo_max_speed_rad_s=sim.servo_max_speed_rad_s,
        contact_arc_samples=sim.contact_arc_samples,
        friction_reg_speed_m_s=sim.friction_reg_speed_m_s,
        design=design,
    )


def _advance_args(model: RobotModel):
    return (
        model.body_mass_kg,
        model.body_inertia_kgm2,
        model.gravity_m_s2,
        model.hub_offsets_m,
        model.wheg_radius_m,
        model.contact_stiffness_n_m,
        model.contact_damping_ns_m,
        model.wheg_inertia_kgm2,
        model.servo_kp_nm_rad,
        model.servo_kd_nms_rad,
        model.servo_torque_limit_nm,
        model.servo_max_speed_rad_s,
        model.contact_arc_samples,
        model.friction_reg_speed_m_s,
        *_gait_tuple(model.design),
        _OFFSET_B,
    )


def _terrain_args(terrain: Terrain):
    return (
        terrain.kind_id,
        terrain.params,
        terrain.knots,
        terrain.knots_x0,
        terrain.knots_dx,
        terrain.extent_m[0],
        terrain.extent_m[1],
    )


_NO_REC = (
    0,
    np.zeros(1),
    np.zeros((1, 3)),
    np.zeros((1, 3)),
    np.zeros((1, 6)),
    np.zeros((1, 6)),
    np.zeros((1, 6)),
)


def step(
    state: SimState,
    model: RobotModel,
    terrain: Terrain,
    dt: float,
    *,
    hold_time: float | None = None,
    fall_pitch_rad: float = float("inf"),
) -> SimState:
    """One semi-implicit Euler step.

    With `hold_time` set, servo targets freeze at the clock pose for that
    time (rate target zero), which is how settling holds station.
    """
    if not 0.0 < dt <= 2.0e-3:
        raise ValueError("dt must be in (0, 2e-3] seconds")
    vec = state.as_vector()
    if not np.all(np.isfinite(vec)):
        raise ValueError("state must be finite")
    hold = hold_time is not None
    outcome, _, _, t_end = _k.advance(
        vec,
        state.time_s,
        1,
        dt,
        *_advance_args(model),
        hold,
        hold_time if hold else 0.0,
        *_terrain_args(terrain),
        fall_pitch_rad,
        *_NO_REC,
    )
    if outcome == _k.OUTCOME_DIVERGED:
        raise DivergedError("simulation step diverged", state)
    return SimState.from_vector(vec, t_end)


def initial_state(model: RobotModel, terrain: Terrain, config: RunConfig) -> SimState:
    """Drop pose: body above the terrain with whegs at their clock(0) angles."""
    from .gait import wheg_angle

    sim = config.sim
    hub_x = sim.start_x_m + model.hub_offsets_m
    clearance = [
        float(terrain.height(hub_x[w // 2])) + model.wheg_radius_m[w] for w in range(6)
    ]
    z0 = max(clearance) + sim.settle_drop_m
    angles = np.array(
        [wheg_angle(0.0, model.design.gait, bool(_OFFSET_B[w])) for w in range(6)]
    )
    return SimState(
        pose=np.array([sim.start_x_m, z0, 0.0]),
        velocity=np.zeros(3),
        wheg_angles_rad=angles,
        wheg_rates_rad_s=np.zeros(6),
        time_s=0.0,
    )


def settle(model: RobotModel, terrain: Terrain, config: RunConfig) -> SimState:
    """Drop the robot with servos holding the clock(0) pose and integrate
    until kinetic energy falls below the configured threshold.

    Returns the resting state with its clock reset to t = 0. Raises
    SettleTimeoutError if the threshold is not reached in time.
    """
    sim = config.sim
    dt = sim.dt_s
    state = initial_state(model, terrain, config)
    vec = state.as_vector()
    chunk = max(1, int(round(0.02 / dt)))
    n_min = int(round(sim.settle_min_time_s / dt))
    n_max = int(round(sim.settle_timeout_s / dt))
    done = 0
    args = _advance_args(model)
    targs = _terrain_args(terrain)
    while done < n_max:
        outcome, steps, _, _ = _k.advance(
            vec,
            done * dt,
            chunk,
            dt,
            *args,
            True,
            0.0,
            *targs,
            float("inf"),
            *_NO_REC,
        )
        done += steps
        if outcome == _k.OUTCOME_DIVERGED:
            raise DivergedError("settling diverged", SimState.from_vector(vec, done * dt))
        ke = _k.kinetic_energy(
            vec, model.body_mass_kg, model.body_inertia_kgm2, model.wheg_inertia_kgm2
        )
        if done >= n_min and ke < sim.settle_ke_threshold_j:
            return SimState.from_vector(vec, 0.0)
    raise SettleTimeoutError(
        f"robot did not settle within {sim.settle_timeout_s} s (KE {ke:.3e} J)"
    )


def run_trial(design: Design, terrain: Terrain, config: RunConfig) -> TrialResult:
    """Settle, then integrate the gait for the configured trial duration.

    Deterministic: identical (design, terrain, config) give bit-identical
    results. Divergence or a fall ends the trial early and flags the result;
    the recorded series is truncated at the failure.
    """
    sim = config.sim
    dt = sim.dt_s
    model = build_robot(design, config)
    state = settle(model, terrain, config)
    n_steps = int(round(sim.trial_duration_s / dt))
    rec_every = max(1, int(round(1.0 / (dt * sim.sample_rate_hz))))
    n_slots = n_steps // rec_every + 2
    rec_t = np.zeros(n_slots)
    rec_pose = np.zeros((n_slots, 3))
    rec_vel = np.zeros((n_slots, 3))
    rec_tau = np.zeros((n_slots, 6))
    rec_omega = np.zeros((n_slots, 6))
    rec_normal = np.zeros((n_slots, 6))
    vec = state.as_vector()
    outcome, steps_done, n_rec, t_end = _k.advance(
        vec,
        0.0,
        n_steps,
        dt,
        *_advance_args(model),
        False,
        0.0,
        *_terrain_args(terrain),
        sim.fall_pitch_rad,
        rec_every,
        rec_t,
        rec_pose,
        rec_vel,
        rec_tau,
        rec_omega,
        rec_normal,
    )
    return TrialResult(
        design=design,
        terrain_kind=terrain.kind,
        outcome=OUTCOMES[outcome],
        dt_s=dt,
        duration_s=steps_done * dt,
        times_s=rec_t[:n_rec].copy(),
        poses=rec_pose[:n_rec].copy(),
        velocities=rec_vel[:n_rec].copy(),
        torques_nm=rec_tau[:n_rec].copy(),
        rates_rad_s=rec_omega[:n_rec].copy(),
        normal_forces_n=rec_normal[:n_rec].copy(),
    )
