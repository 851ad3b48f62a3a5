"""The four benchmark terrains as 1D heightfields with per-position friction.

Every terrain is a deterministic pure function of its constructor arguments.
Height and friction queries clamp x to the terrain extent. The `kind_id`,
`params` and knot arrays mirror the exact same functions for the simulator's
compiled kernel; `height`/`friction`/`slope` here are the reference
definitions.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

KIND_FLAT = 0
KIND_ROUGH = 1
KIND_STAIRS = 2
KIND_RAMP = 3

_KIND_NAMES = {KIND_FLAT: "flat", KIND_ROUGH: "rough", KIND_STAIRS: "stairs", KIND_RAMP: "ramp"}

DEFAULT_EXTENT = (-2.0, 12.0)


@dataclass(frozen=True)
class Terrain:
    kind: str
    kind_id: int
    extent_m: tuple[float, float]
    params: np.ndarray
    # Catmull-Rom knot table; empty for closed-form terrains.
    knots: np.ndarray = field(default_factory=lambda: np.zeros(0))
    knots_x0: float = 0.0
    knots_dx: float = 1.0
    seed: int | None = None

    def _clamp(self, x):
        return np.clip(x, self.extent_m[0], self.extent_m[1])

    def height(self, x):
        """Terrain surface height h(x) in meters; scalar or array."""
        x = self._clamp(np.asarray(x, dtype=float))
        if self.kind_id == KIND_FLAT:
            h = np.zeros_like(x)
        elif self.kind_id == KIND_ROUGH:
            h = _catmull_rom(x, self.knots, self.knots_x0, self.knots_dx)
        elif self.kind_id == KIND_STAIRS:
            step_h, step_d = self.params[0], self.params[1]
            h = -step_h * np.floor(np.maximum(x, 0.0) / step_d)
        else:
            h = np.where(x > 0.0, self.params[0] * x, 0.0)
        return h if h.ndim else float(h)

    def friction(self, x):
        """Friction coefficient mu(x); scalar or array."""
        x = self._clamp(np.asarray(x, dtype=float))
        if self.kind_id == KIND_RAMP:
            mu = np.where(x >= 0.0, self.params[1], self.params[2])
        elif self.kind_id == KIND_STAIRS:
            mu = np.full_like(x, self.params[2])
        else:  # flat, rough
            mu = np.full_like(x, self.params[0])
        return mu if mu.ndim else float(mu)

    def slope(self, x):
        """dh/dx; analytic for every kind (zero on treads and flats)."""
        x = self._clamp(np.asarray(x, dtype=float))
        if self.kind_id == KIND_FLAT or self.kind_id == KIND_STAIRS:
            s = np.zeros_like(x)
        elif self.kind_id == KIND_ROUGH:
            s = _catmull_rom_slope(x, self.knots, self.knots_x0, self.knots_dx)
        else:
            s = np.where(x > 0.0, self.params[0], 0.0)
        return s if s.ndim else float(s)


def _catmull_rom(x, knots, x0, dx):
    """Uniform Catmull-Rom spline through the knot values (C1, local)."""
    u = (np.asarray(x, dtype=float) - x0) / dx
    i = np.clip(np.floor(u).astype(int), 1, len(knots) - 3)
    s = u - i
    p0, p1, p2, p3 = knots[i - 1], knots[i], knots[i + 1], knots[i + 2]
    return 0.5 * (
        2.0 * p1
        + (-p0 + p2) * s
        + (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * s**2
        + (-p0 + 3.0 * p1 - 3.0 * p2 + p3) * s**3
    )


def _catmull_rom_slope(x, knots, x0, dx):
    u = (np.asarray(x, dtype=float) - x0) / dx
    i = np.clip(np.floor(u).astype(int), 1, len(knots) - 3)
    s = u - i
    p0, p1, p2, p3 = knots[i - 1], knots[i], knots[i + 1], knots[i + 2]
    return 0.5 * (
        (-p0 + p2)
        + 2.0 * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * s
        + 3.0 * (-p0 + 3.0 * p1 - 3.0 * p2 + p3) * s**2
    ) / dx


def make_flat(mu: float, extent_m: tuple[float, float] = DEFAULT_EXTENT) -> Terrain:
    """Level ground with uniform friction."""
    if mu <= 0.0:
        raise ValueError("mu must be > 0")
    return Terrain("flat", KIND_FLAT, extent_m, np.array([mu]))


def make_rough(
    seed: int,
    amplitude_m: float,
    correlation_m: float,
    mu: float,
    extent_m: tuple[float, float] = DEFAULT_EXTENT,
) -> Terrain:
    """Seeded value-noise bumps with the given RMS height and bump length.

    Knot values are drawn on a lattice with spacing `correlation_m`, smoothed
    by Catmull-Rom interpolation, then rescaled so the dense-sampled RMS over
    the extent equals `amplitude_m` exactly. Identical seeds give identical
    terrain.
    """
    if amplitude_m <= 0.0 or correlation_m <= 0.0:
        raise ValueError("amplitude_m and correlation_m must be > 0")
    if mu <= 0.0:
        raise ValueError("mu must be > 0")
    lo, hi = extent_m
    n = int(math.ceil((hi - lo) / correlation_m)) + 4
    x0 = lo - 2.0 * correlation_m
    rng = np.random.default_rng(seed)
    knots = rng.standard_normal(n + 1)
    dense = _catmull_rom(np.linspace(lo, hi, 4096), knots, x0, correlation_m)
    rms = float(np.sqrt(np.mean(dense**2)))
    knots = knots * (amplitude_m / rms)
    return Terrain(
        "rough",
        KIND_ROUGH,
        extent_m,
        np.array([mu]),
        knots=knots,
        knots_x0=x0,
        knots_dx=correlation_m,
        seed=seed,
    )


def make_stairs(
    step_height_m: float,
    step_depth_m: float,
    mu: float,
    extent_m: tuple[float, float] = DEFAULT_EXTENT,
) -> Terrain:
    """Flat approach for x < 0, then steps descending in the travel direction."""
    if step_height_m <= 0.0 or step_depth_m <= 0.0:
        raise ValueError("step dimensions must be > 0")
    if mu <= 0.0:
        raise ValueError("mu must be > 0")
    return Terrain("stairs", KIND_STAIRS, extent_m, np.array([step_height_m, step_depth_m, mu]))


def make_ramp(
    slope_rad: float,
    mu_low: float,
    mu_approach: float = 0.9,
    extent_m: tuple[float, float] = DEFAULT_EXTENT,
) -> Terrain:
    """Flat approach for x < 0, then an ascending incline with reduced friction."""
    if not 0.0 < slope_rad < 0.5 * math.pi:
        raise ValueError("slope_rad must be in (0, pi/2)")
    if mu_low <= 0.0 or mu_approach <= 0.0:
        raise ValueError("friction coefficients must be > 0")
    return Terrain(
        "ramp",
        KIND_RAMP,
        extent_m,
        np.array([math.tan(slope_rad), mu_low, mu_approach]),
    )


TERRAIN_NAMES = ("flat", "rough", "stairs", "ramp")
