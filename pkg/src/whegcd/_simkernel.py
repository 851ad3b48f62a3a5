"""Compiled inner loop of the planar hexapod simulator.

Everything here operates on plain float64 scalars and arrays so numba can
compile it; the public API lives in `sim`. The clock functions mirror
`gait.wheg_angle`/`wheg_rate` operation-for-operation and the terrain query
mirrors `terrain.Terrain.height`/`friction`, so the two layers agree exactly.

State vector layout (length 18):
  [0:3]   x, z, pitch          (world pose, pitch CCW positive = nose up)
  [3:6]   vx, vz, pitch rate
  [6:12]  wheg angles, body-relative, unwrapped
  [12:18] wheg rates

Wheg w sits on hub w//2 (0 front, 1 mid, 2 back); odd w are tripod B and run
the clock half a period late. A wheg is a rigid half-circle arc of radius R
centered on the hub, spanning body-frame clock angles [theta-pi/2,
theta+pi/2] where 0 points straight down and positive angles roll forward.
"""
from __future__ import annotations

import math

import numpy as np
from numba import njit

TWO_PI = 2.0 * math.pi
HALF_PI = 0.5 * math.pi

OUTCOME_COMPLETED = 0
OUTCOME_FELL = 1
OUTCOME_DIVERGED = 2


@njit(cache=True)
def clock_angle(t, period, slow_frac, s0, s1, half_offset):
    te = t + 0.5 * period if half_offset else t
    cycle = math.floor(te / period)
    u = te - cycle * period
    t_slow = slow_frac * period
    arc = s1 - s0
    if u < t_slow:
        local = s0 + (u / t_slow) * arc
    else:
        local = s1 + ((u - t_slow) / (period - t_slow)) * (TWO_PI - arc)
    return local + TWO_PI * cycle


@njit(cache=True)
def clock_rate(t, period, slow_frac, s0, s1, half_offset):
    te = t + 0.5 * period if half_offset else t
    u = te - math.floor(te / period) * period
    arc = s1 - s0
    if u < slow_frac * period:
        return arc / (slow_frac * period)
    return (TWO_PI - arc) / ((1.0 - slow_frac) * period)


@njit(cache=True)
def terrain_query(kind, params, knots, kx0, kdx, ext_lo, ext_hi, px, pz):
    """Penetration query at world point (px, pz).

    Returns (depth, nx, nz, mu): depth > 0 means the point is inside the
    ground, with outward surface normal (nx, nz). Smooth terrains measure
    depth perpendicular to the local surface; stairs use the nearer of the
    tread above and the downhill riser face.
    """
    x = px
    if x < ext_lo:
        x = ext_lo
    elif x > ext_hi:
        x = ext_hi
    if kind == 0:  # flat
        return -pz, 0.0, 1.0, params[0]
    elif kind == 1:  # rough
        u = (x - kx0) / kdx
        i = int(math.floor(u))
        if i < 1:
            i = 1
        imax = knots.shape[0] - 3
        if i > imax:
            i = imax
        s = u - i
        p0 = knots[i - 1]
        p1 = knots[i]
        p2 = knots[i + 1]
        p3 = knots[i + 2]
        h = 0.5 * (
            2.0 * p1
            + (-p0 + p2) * s
            + (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * s * s
            + (-p0 + 3.0 * p1 - 3.0 * p2 + p3) * s * s * s
        )
        g = (
            0.5
            * (
                (-p0 + p2)
                + 2.0 * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * s
                + 3.0 * (-p0 + 3.0 * p1 - 3.0 * p2 + p3) * s * s
            )
            / kdx
        )
        inv = 1.0 / math.sqrt(1.0 + g * g)
        return (h - pz) * inv, -g * inv, inv, params[0]
    elif kind == 2:  # stairs, descending for x > 0
        step_h = params[0]
        step_d = params[1]
        mu = params[2]
        if x <= 0.0:
            return -pz, 0.0, 1.0, mu
        k = math.floor(x / step_d)
        h = -step_h * k
        d_up = h - pz
        if d_up <= 0.0:
            return d_up, 0.0, 1.0, mu
        # Inside the solid below the local tread. If the point is above the
        # next tread down, the downhill riser face may be the nearer surface.
        d_right = (k + 1.0) * step_d - x
        if pz > h - step_h and d_right < d_up:
            return d_right, 1.0, 0.0, mu
        return d_up, 0.0, 1.0, mu
    else:  # ramp, ascending for x > 0
        a = params[0]
        if x >= 0.0:
            inv = 1.0 / math.sqrt(1.0 + a * a)
            return (a * x - pz) * inv, -a * inv, inv, params[1]
        return -pz, 0.0, 1.0, params[2]


@njit(cache=True)
def advance(
    state,
    t0,
    n_steps,
    dt,
    mass,
    inertia,
    g,
    hub_x,
    radius,
    k_contact,
    c_contact,
    wheg_inertia,
    kp,
    kd,
    tau_max,
    omega_max,
    arc_samples,
    v_reg,
    period,
    slow_frac,
    s0,
    s1,
    offset_b,
    hold,
    hold_t,
    kind,
    params,
    knots,
    kx0,
    kdx,
    ext_lo,
    ext_hi,
    fall_pitch,
    rec_every,
    rec_t,
    rec_pose,
    rec_vel,
    rec_tau,
    rec_omega,
    rec_normal,
):
    """Integrate `n_steps` semi-implicit Euler steps in place.

    Returns (outcome, steps_done, n_recorded, t_end). Samples are recorded
    every `rec_every` steps (pre-step state with that step's torques and
    contact normals) plus one final post-run sample; rec_every = 0 disables
    recording.
    """
    tau_buf = np.zeros(6)
    mc_buf = np.zeros(6)
    n_buf = np.zeros(6)
    om_buf = np.zeros(6)
    n_rec = 0
    outcome = OUTCOME_COMPLETED
    steps_done = 0
    t = t0
    for i in range(n_steps):
        t = t0 + i * dt
        px = state[0]
        pz = state[1]
        pitch = state[2]
        vx = state[3]
        vz = state[4]
        vp = state[5]
        sinp = math.sin(pitch)
        cosp = math.cos(pitch)
        fx = 0.0
        fz = 0.0
        mom = 0.0
        for w in range(6):
            hub = hub_x[w >> 1]
            hx = px + hub * cosp
            hz = pz + hub * sinp
            vhx = vx - vp * hub * sinp
            vhz = vz + vp * hub * cosp
            th = state[6 + w]
            om = state[12 + w]
            half = offset_b[w] != 0
            if hold:
                tc = clock_angle(hold_t, period, slow_frac, s0, s1, half)
                rc = 0.0
            else:
                tc = clock_angle(t, period, slow_frac, s0, s1, half)
                rc = clock_rate(t, period, slow_frac, s0, s1, half)
            tau = kp * (tc - th) + kd * (rc - om)
            if tau > tau_max:
                tau = tau_max
            elif tau < -tau_max:
                tau = -tau_max
            # no-load speed limit: no accelerating torque past max speed
            if om > omega_max and tau > 0.0:
                tau = 0.0
            elif om < -omega_max and tau < 0.0:
                tau = 0.0
            r_w = radius[w]
            best_depth = 0.0
            bx = 0.0
            bz = 0.0
            bnx = 0.0
            bnz = 1.0
            bmu = 1.0
            for si in range(arc_samples):
                psi = th - HALF_PI + math.pi * si / (arc_samples - 1.0)
                ang = psi - pitch
                ax = hx - r_w * math.sin(ang)
                az = hz - r_w * math.cos(ang)
                depth, nx, nz, mu = terrain_query(
                    kind, params, knots, kx0, kdx, ext_lo, ext_hi, ax, az
                )
                if depth > best_depth:
                    best_depth = depth
                    bx = ax
                    bz = az
                    bnx = nx
                    bnz = nz
                    bmu = mu
            mc = 0.0
            f_n = 0.0
            if best_depth > 0.0:
                wom = vp - om  # wheg angular velocity, CCW in world
                rx = bx - hx
                rz = bz - hz
                vpx = vhx - wom * rz
                vpz = vhz + wom * rx
                vn = vpx * bnx + vpz * bnz
                f_n = k_contact[w] * best_depth - c_contact[w] * vn
                if f_n < 0.0:
                    f_n = 0.0
                tx = bnz
                tz = -bnx
                vt = vpx * tx + vpz * tz
                # regularized Coulomb, capped at the force that would zero the
                # slip in one step (keeps the explicit step from ringing when
                # the tanh slope outruns the contact's effective inertia); the
                # body terms carry a factor 6 because up to six contacts share
                # the body's response within one step
                cb = (hx - px) * tz - (hz - pz) * tx
                cw = rx * tz - rz * tx
                inv_meff = 6.0 / mass + 6.0 * cb * cb / inertia + cw * cw / wheg_inertia
                f_stop = abs(vt) / (dt * inv_meff)
                f_t_mag = bmu * f_n * abs(math.tanh(vt / v_reg))
                if f_t_mag > f_stop:
                    f_t_mag = f_stop
                f_t = -f_t_mag if vt > 0.0 else f_t_mag
                fxw = f_n * bnx + f_t * tx
                fzw = f_n * bnz + f_t * tz
                fx += fxw
                fz += fzw
                mom += (hx - px) * fzw - (hz - pz) * fxw
                mc = rx * fzw - rz * fxw
            mom += tau
            tau_buf[w] = tau
            mc_buf[w] = mc
            n_buf[w] = f_n
            om_buf[w] = om
        acc_x = fx / mass
        acc_z = fz / mass - g
        acc_p = mom / inertia
        if rec_every > 0 and i % rec_every == 0:
            rec_t[n_rec] = t
            rec_pose[n_rec, 0] = px
            rec_pose[n_rec, 1] = pz
            rec_pose[n_rec, 2] = pitch
            rec_vel[n_rec, 0] = vx
            rec_vel[n_rec, 1] = vz
            rec_vel[n_rec, 2] = vp
            for w in range(6):
                rec_tau[n_rec, w] = tau_buf[w]
                rec_omega[n_rec, w] = om_buf[w]
                rec_normal[n_rec, w] = n_buf[w]
            n_rec += 1
        vx += acc_x * dt
        vz += acc_z * dt
        vp += acc_p * dt
        state[0] = px + vx * dt
        state[1] = pz + vz * dt
        state[2] = pitch + vp * dt
        state[3] = vx
        state[4] = vz
        state[5] = vp
        for w in range(6):
            dom = acc_p + (tau_buf[w] - mc_buf[w]) / wheg_inertia
            om_new = state[12 + w] + dom * dt
            state[12 + w] = om_new
            state[6 + w] += om_new * dt
        steps_done = i + 1
        ok = True
        for j in range(18):
            if not math.isfinite(state[j]):
                ok = False
                break
        if ok and (abs(state[1]) > 100.0 or abs(state[3]) > 1.0e3 or abs(state[4]) > 1.0e3):
            ok = False
        if not ok:
            outcome = OUTCOME_DIVERGED
            break
        if abs(state[2]) > fall_pitch:
            outcome = OUTCOME_FELL
            break
    t_end = t0 + steps_done * dt
    if rec_every > 0 and outcome == OUTCOME_COMPLETED:
        rec_t[n_rec] = t_end
        rec_pose[n_rec, 0] = state[0]
        rec_pose[n_rec, 1] = state[1]
        rec_pose[n_rec, 2] = state[2]
        rec_vel[n_rec, 0] = state[3]
        rec_vel[n_rec, 1] = state[4]
        rec_vel[n_rec, 2] = state[5]
        for w in range(6):
            rec_tau[n_rec, w] = tau_buf[w]
            rec_omega[n_rec, w] = state[12 + w]
            rec_normal[n_rec, w] = n_buf[w]
        n_rec += 1
    return outcome, steps_done, n_rec, t_end


@njit(cache=True)
def kinetic_energy(state, mass, inertia, wheg_inertia):
    ke = 0.5 * mass * (state[3] ** 2 + state[4] ** 2) + 0.5 * inertia * state[5] ** 2
    for w in range(6):
        ke += 0.5 * wheg_inertia * state[12 + w] ** 2
    return ke
