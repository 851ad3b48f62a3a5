"""Compliance model of a semicircular wheg.

A wheg is a half-circle cantilever beam clamped at the hub. The closed-form
route via strain energy gives an effective linear spring constant
K = 2EI/(pi R^3) relating vertical tip force to tip deflection. The chain
route approximates the same beam as rigid links joined by torsional springs,
so the compliance survives in a rigid-body simulator; the static solver here
is the independent check that the two routes agree.

Canonical chain frame: hub at the origin, tip hanging 2R below on the y axis,
arc bulging toward +x. The tip load acts along +y, so the vertical row of the
chain Jacobian is row index 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class BeamSection:
    """Rectangular wheg cross-section; the area moment is derived as w t^3/12."""

    youngs_modulus_pa: float
    width_m: float
    thickness_m: float
    area_moment_m4: float = field(init=False)

    def __post_init__(self) -> None:
        if self.youngs_modulus_pa <= 0.0:
            raise ValueError("youngs_modulus_pa must be > 0")
        if self.width_m <= 0.0:
            raise ValueError("width_m must be > 0")
        if self.thickness_m <= 0.0:
            raise ValueError("thickness_m must be > 0")
        moment = self.width_m * self.thickness_m**3 / 12.0
        object.__setattr__(self, "area_moment_m4", moment)


@dataclass
class WhegChain:
    """Rigid-link discretization of the semicircular wheg.

    `joint_angles_rad` is the rest configuration as relative joint angles:
    entry 0 orients the first link in the hub frame, entries 1..n-1 are the
    bends between consecutive links. `joint_stiffnesses` stays None until
    assigned by :func:`joint_stiffnesses`.
    """

    radius_m: float
    n_segments: int
    joint_angles_rad: np.ndarray
    segment_length_m: float
    joint_stiffnesses: np.ndarray | None = None

    def __post_init__(self) -> None:
        self.joint_angles_rad = np.asarray(self.joint_angles_rad, dtype=float)
        if self.n_segments < 1:
            raise ValueError("n_segments must be >= 1")
        if self.joint_angles_rad.shape != (self.n_segments,):
            raise ValueError("joint_angles_rad must have one entry per segment")
        if self.segment_length_m <= 0.0:
            raise ValueError("segment_length_m must be > 0")
        if self.joint_stiffnesses is not None:
            self.joint_stiffnesses = np.asarray(self.joint_stiffnesses, dtype=float)
            if np.any(self.joint_stiffnesses <= 0.0):
                raise ValueError("joint stiffnesses must be > 0")


@dataclass(frozen=True)
class TipLoad:
    """A recorded (force, deflection) pair at the wheg tip."""

    force_n: float
    deflection_m: float


def _check_radius(radius_m: float) -> None:
    if radius_m <= 0.0:
        raise ValueError("wheg radius must be > 0")


def strain_energy(force_n: float, section: BeamSection, radius_m: float) -> float:
    """Bending strain energy stored by a vertical tip load on the half-circle.

    The bending moment at arc angle theta is F R sin(theta); integrating
    M^2/(2EI) along the arc gives (pi/2) F^2 R^3 / (2EI).
    """
    _check_radius(radius_m)
    ei = section.youngs_modulus_pa * section.area_moment_m4
    return 0.5 * math.pi * force_n**2 * radius_m**3 / (2.0 * ei)


def tip_deflection(force_n: float, section: BeamSection, radius_m: float) -> float:
    """Vertical tip deflection dU/dF = pi F R^3 / (2EI) (Castigliano)."""
    _check_radius(radius_m)
    ei = section.youngs_modulus_pa * section.area_moment_m4
    return math.pi * force_n * radius_m**3 / (2.0 * ei)


def tip_stiffness(section: BeamSection, radius_m: float) -> float:
    """Effective linear spring constant K = 2EI/(pi R^3) at the wheg tip."""
    _check_radius(radius_m)
    ei = section.youngs_modulus_pa * section.area_moment_m4
    return 2.0 * ei / (math.pi * radius_m**3)


def discretize_wheg(radius_m: float, n_segments: int) -> WhegChain:
    """Inscribe `n_segments` equal chords in a semicircle of radius R.

    Vertices sit exactly on the circle, so the chain endpoints are separated
    by exactly 2R. The tangent turns by pi in total: half a bend at the hub
    clamp, a full bend of pi/n at each interior joint.
    """
    _check_radius(radius_m)
    if n_segments < 2:
        raise ValueError("n_segments must be >= 2 for a wheg discretization")
    n = n_segments
    chord = 2.0 * radius_m * math.sin(math.pi / (2.0 * n))
    rest = np.full(n, -math.pi / n)
    rest[0] = -math.pi / (2.0 * n)
    return WhegChain(
        radius_m=radius_m,
        n_segments=n,
        joint_angles_rad=rest,
        segment_length_m=chord,
    )


def chain_vertices(chain: WhegChain, config: Sequence[float]) -> np.ndarray:
    """Vertex positions (n+1, 2) for relative joint angles `config`.

    Vertex 0 is the hub; vertex n is the tip.
    """
    q = np.asarray(config, dtype=float)
    if q.shape != (chain.n_segments,):
        raise ValueError(
            f"config must have {chain.n_segments} joint angles, got shape {q.shape}"
        )
    phi = np.cumsum(q)
    steps = chain.segment_length_m * np.stack([np.cos(phi), np.sin(phi)], axis=1)
    verts = np.zeros((chain.n_segments + 1, 2))
    verts[1:] = np.cumsum(steps, axis=0)
    return verts


def chain_jacobian(chain: WhegChain, config: Sequence[float]) -> np.ndarray:
    """2 x n Jacobian mapping joint rates to planar tip velocity.

    Column j is the perpendicular of (tip - joint_j): rotating joint j sweeps
    the whole distal subchain about its vertex.
    """
    verts = chain_vertices(chain, config)
    tip = verts[-1]
    lever = tip[None, :] - verts[:-1]
    return np.stack([-lever[:, 1], lever[:, 0]], axis=0)


def joint_stiffnesses(chain: WhegChain, tip_stiffness_n_m: float) -> np.ndarray:
    """Torsional stiffness per joint reproducing the tip spring constant K.

    Projecting the tip spring law through the vertical Jacobian row J2 at the
    rest configuration identifies a single torsional constant K * (J2 J2^T)
    shared by every joint; the series compliance of the chain then equals 1/K
    along the load mode. Returned as one entry per joint.
    """
    if tip_stiffness_n_m <= 0.0:
        raise ValueError("tip stiffness must be > 0")
    jac = chain_jacobian(chain, chain.joint_angles_rad)
    j2 = jac[1]
    if np.allclose(j2, 0.0):
        raise ValueError("degenerate chain: vertical Jacobian row is all zeros")
    kt = tip_stiffness_n_m * float(j2 @ j2)
    return np.full(chain.n_segments, kt)


def joint_damping(stiffnesses: Sequence[float], segment_inertia_kgm2: float,
                  damping_ratio: float = 0.7) -> np.ndarray:
    """Per-joint damping c = 2 zeta sqrt(K_T I_seg) to tame chain ringing."""
    kt = np.asarray(stiffnesses, dtype=float)
    if np.any(kt <= 0.0) or segment_inertia_kgm2 <= 0.0 or damping_ratio <= 0.0:
        raise ValueError("stiffnesses, segment inertia and damping ratio must be > 0")
    return 2.0 * damping_ratio * np.sqrt(kt * segment_inertia_kgm2)


def static_deflection_oracle(
    chain: WhegChain,
    force_n: float,
    *,
    tol_nm: float = 1e-10,
    max_iter: int = 200,
) -> float:
    """Vertical tip deflection from the full nonlinear chain equilibrium.

    Solves K_T (q - q_rest) = J(q)^T F by damped Newton iteration with a
    finite-difference residual Jacobian. Independent of the closed-form
    stiffness route; used to validate it.
    """
    if chain.joint_stiffnesses is None:
        raise ValueError("chain has no joint stiffnesses assigned")
    kt = chain.joint_stiffnesses
    q_rest = chain.joint_angles_rad
    f_vec = np.array([0.0, force_n])

    def residual(q: np.ndarray) -> np.ndarray:
        jac = chain_jacobian(chain, q)
        return kt * (q - q_rest) - jac.T @ f_vec

    q = q_rest.copy()
    r = residual(q)
    norm = float(np.max(np.abs(r)))
    if force_n == 0.0:
        return 0.0
    eps = 1e-7
    for _ in range(max_iter):
        if norm < tol_nm:
            break
        n = chain.n_segments
        drdq = np.empty((n, n))
        for j in range(n):
            qp = q.copy()
            qp[j] += eps
            drdq[:, j] = (residual(qp) - r) / eps
        step = np.linalg.solve(drdq, -r)
        scale = 1.0
        while scale > 1e-6:
            q_new = q + scale * step
            r_new = residual(q_new)
            norm_new = float(np.max(np.abs(r_new)))
            if norm_new < norm:
                break
            scale *= 0.5
        q, r, norm = q_new, r_new, norm_new
    else:
        raise RuntimeError(
            f"chain equilibrium did not converge: residual {norm:.3e} N*m "
            f"after {max_iter} iterations"
        )
    tip_rest = chain_vertices(chain, q_rest)[-1]
    tip = chain_vertices(chain, q)[-1]
    return float(tip[1] - tip_rest[1])
