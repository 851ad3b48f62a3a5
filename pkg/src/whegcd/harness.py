"""Orchestration: terrain construction from config, per-terrain co-design
runs, the cross-evaluation matrix, wheg outline export, and report text.

Every artifact written here is reproducible byte-for-byte from
(config, seed): floats are serialized with repr and all collections have a
fixed order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import metrics, optimizer, reference, terrain as terrain_mod
from .config import RunConfig
from .design_space import PARAM_NAMES, Design
from .optimizer import OptHistory
from .sim import TrialResult, run_trial

TRIAL_LOG_HEADER = (
    "iter,period_s,slow_fraction,slow_start_rad,slow_end_rad,"
    "front_len_m,back_len_m,thickness_m,displacement_m,avg_power_w,"
    "efficiency,speed,valid,incumbent"
)


def build_terrain(config: RunConfig, name: str, rough_seed: int | None = None):
    """The named benchmark terrain with parameters from the config."""
    t = config.terrain
    extent = tuple(t.extent_m)
    if name == "flat":
        return terrain_mod.make_flat(t.flat.mu, extent)
    if name == "rough":
        seed = t.rough.seed if rough_seed is None else rough_seed
        return terrain_mod.make_rough(
            seed, t.rough.amplitude_m, t.rough.correlation_m, t.rough.mu, extent
        )
    if name == "stairs":
        return terrain_mod.make_stairs(
            t.stairs.step_height_m, t.stairs.step_depth_m, t.stairs.mu, extent
        )
    if name == "ramp":
        return terrain_mod.make_ramp(
            t.ramp.slope_rad, t.ramp.mu_low, t.mu_default, extent
        )
    raise ValueError(f"unknown terrain {name!r}; expected one of {terrain_mod.TERRAIN_NAMES}")


def evaluate_design(
    design: Design, terrain, config: RunConfig
) -> tuple[TrialResult, metrics.ObjectiveValue]:
    trial = run_trial(design, terrain, config)
    m = config.metrics
    try:
        obj = metrics.efficiency(
            trial,
            clamp_negative_power=m.clamp_negative_power,
            worst_case_efficiency=m.worst_case_efficiency,
            worst_case_speed=m.worst_case_speed,
        )
    except metrics.DegenerateTrialError:
        obj = metrics.ObjectiveValue(
            m.worst_case_efficiency, m.worst_case_speed, 0.0, 0.0, valid=False
        )
    return trial, obj


def trial_log_rows(history: OptHistory) -> list[str]:
    rows = []
    for entry, incumbent in zip(history.entries, history.incumbent_values):
        vec = entry.design.to_vector()
        obj = entry.objective
        cells = (
            [str(entry.iteration)]
            + [repr(float(v)) for v in vec]
            + [
                repr(float(obj.displacement_m)),
                repr(float(obj.avg_power_w)),
                repr(float(obj.efficiency_m_per_j)),
                repr(float(obj.speed_m_per_s)),
                "1" if obj.valid else "0",
                repr(float(incumbent)),
            ]
        )
        rows.append(",".join(cells))
    return rows


def run_codesign(
    config: RunConfig,
    terrain_name: str,
    *,
    seed: int | None = None,
    out_dir: str | Path | None = None,
) -> Path:
    """One full co-design run on one terrain.

    Writes trial_log.csv, best_design.txt and summary.txt into the artifact
    directory and returns its path. Failed trials are logged with worst-case
    scores; they never abort the run.
    """
    opt = config.optimizer
    seed = opt.seed if seed is None else seed
    out_root = Path(out_dir) if out_dir is not None else Path(config.output.directory)
    run_dir = out_root / f"codesign_{terrain_name}_seed{seed}"
    run_dir.mkdir(parents=True, exist_ok=True)

    terr = build_terrain(config, terrain_name)
    bounds = config.bounds.to_bounds()

    def objective(design: Design) -> metrics.ObjectiveValue:
        return evaluate_design(design, terr, config)[1]

    history = optimizer.optimize(
        objective,
        bounds,
        budget=opt.budget,
        init_points=opt.init_points,
        seed=seed,
        objective_key=opt.objective,
        noise_floor=opt.noise_floor,
        hyper_budget=opt.hyper_budget,
        n_candidates=opt.candidates,
        refine_starts=opt.refine_starts,
    )

    log_text = TRIAL_LOG_HEADER + "\n" + "\n".join(trial_log_rows(history)) + "\n"
    (run_dir / "trial_log.csv").write_text(log_text)

    best = history.best_entry
    (run_dir / "best_design.txt").write_text(best.design.to_record())

    _, nominal_obj = evaluate_design(config.nominal.to_design(), terr, config)
    summary = _codesign_summary(terrain_name, seed, history, nominal_obj, config)
    (run_dir / "summary.txt").write_text(summary)
    return run_dir


def _ratio_text(value: float, baseline: float) -> str:
    if baseline == 0.0:
        return "n/a (nominal = 0)"
    return f"{value / baseline:.2f}x"


def _codesign_summary(
    terrain_name: str,
    seed: int,
    history: OptHistory,
    nominal_obj: metrics.ObjectiveValue,
    config: RunConfig,
) -> str:
    best = history.best_entry
    obj = best.objective
    ref = reference.REFERENCE_TABLE[terrain_name]
    lines = [
        f"co-design summary: terrain={terrain_name} objective={history.objective_key} seed={seed}",
        f"trials: {len(history.entries)}",
        f"best iteration: {best.iteration}",
        f"best efficiency (m/J): {obj.efficiency_m_per_j!r}",
        f"best speed (m/s): {obj.speed_m_per_s!r}",
        f"best displacement (m): {obj.displacement_m!r}",
        f"nominal efficiency (m/J): {nominal_obj.efficiency_m_per_j!r}",
        f"nominal speed (m/s): {nominal_obj.speed_m_per_s!r}",
        "improvement vs nominal (efficiency): "
        + _ratio_text(obj.efficiency_m_per_j, nominal_obj.efficiency_m_per_j),
        "improvement vs nominal (speed): "
        + _ratio_text(obj.speed_m_per_s, nominal_obj.speed_m_per_s),
        f"{reference.REFERENCE_LABEL}:",
        f"  EOP efficiency {ref.eop_efficiency_m_per_j} m/J, speed {ref.eop_speed_m_per_s} m/s",
        f"  SOP efficiency {ref.sop_efficiency_m_per_j} m/J, speed {ref.sop_speed_m_per_s} m/s",
        f"  nominal flat-ground efficiency {reference.NOMINAL_EFFICIENCY_M_PER_J} m/J, "
        f"speed {reference.NOMINAL_SPEED_M_PER_S} m/s",
    ]
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class CrossEvalCell:
    design_label: str
    terrain_name: str
    objectives: list  # one ObjectiveValue per repetition
    seeds: list  # rough-terrain seed per repetition, None elsewhere
    degenerate_repeats: bool

    @property
    def mean_efficiency(self) -> float:
        return float(np.mean([o.efficiency_m_per_j for o in self.objectives]))

    @property
    def mean_speed(self) -> float:
        return float(np.mean([o.speed_m_per_s for o in self.objectives]))

    @property
    def mean_displacement(self) -> float:
        return float(np.mean([o.displacement_m for o in self.objectives]))


@dataclass(frozen=True)
class CrossEvalMatrix:
    labels: list[str]
    terrain_names: list[str]
    cells: dict  # (label, terrain) -> CrossEvalCell

    def cell(self, label: str, terrain_name: str) -> CrossEvalCell:
        return self.cells[(label, terrain_name)]


def cross_evaluate(
    design_files: list[str | Path],
    config: RunConfig,
    *,
    terrain_names: list[str] | None = None,
    include_nominal: bool = True,
    out_dir: str | Path | None = None,
) -> tuple[CrossEvalMatrix, Path]:
    """Evaluate every design on every terrain, r repetitions per cell.

    Only the rough terrain has anything to vary between repetitions (its
    seed); deterministic terrains are evaluated once and the value recorded
    as degenerate repeats, which cell provenance marks explicitly.
    """
    if not design_files and not include_nominal:
        raise ValueError("need at least one design file")
    designs: list[tuple[str, Design]] = []
    for f in design_files:
        p = Path(f)
        try:
            text = p.read_text()
        except OSError as exc:
            raise ValueError(f"cannot read design file {p}: {exc}") from exc
        designs.append((p.stem, Design.from_record(text)))
    if include_nominal:
        designs.append(("nominal", config.nominal.to_design()))
    terrain_names = list(terrain_names or terrain_mod.TERRAIN_NAMES)
    reps = config.cross_eval.repetitions
    base_seed = config.terrain.rough.seed

    cells = {}
    for label, design in designs:
        for tname in terrain_names:
            if tname == "rough":
                seeds = [base_seed + r for r in range(reps)]
                objs = []
                for s in seeds:
                    terr = build_terrain(config, tname, rough_seed=s)
                    objs.append(evaluate_design(design, terr, config)[1])
                degenerate = False
            else:
                terr = build_terrain(config, tname)
                obj = evaluate_design(design, terr, config)[1]
                seeds = [None] * reps
                objs = [obj] * reps
                degenerate = True
            cells[(label, tname)] = CrossEvalCell(label, tname, objs, seeds, degenerate)

    matrix = CrossEvalMatrix([d[0] for d in designs], terrain_names, cells)
    out_root = Path(out_dir) if out_dir is not None else Path(config.output.directory)
    mat_dir = out_root / "cross_eval"
    mat_dir.mkdir(parents=True, exist_ok=True)
    _write_matrix(matrix, mat_dir)
    return matrix, mat_dir


def _write_matrix(matrix: CrossEvalMatrix, mat_dir: Path) -> None:
    rows = ["design,terrain,mean_efficiency,mean_speed,mean_displacement_m"]
    for label in matrix.labels:
        for tname in matrix.terrain_names:
            c = matrix.cell(label, tname)
            rows.append(
                f"{label},{tname},{c.mean_efficiency!r},{c.mean_speed!r},"
                f"{c.mean_displacement!r}"
            )
    (mat_dir / "matrix.csv").write_text("\n".join(rows) + "\n")

    cell_rows = [
        "design,terrain,rep,rough_seed,efficiency,speed,displacement_m,avg_power_w,"
        "valid,degenerate_repeat"
    ]
    for label in matrix.labels:
        for tname in matrix.terrain_names:
            c = matrix.cell(label, tname)
            for r, (obj, seed) in enumerate(zip(c.objectives, c.seeds)):
                cell_rows.append(
                    ",".join(
                        [
                            label,
                            tname,
                            str(r),
                            "-" if seed is None else str(seed),
                            repr(float(obj.efficiency_m_per_j)),
                            repr(float(obj.speed_m_per_s)),
                            repr(float(obj.displacement_m)),
                            repr(float(obj.avg_power_w)),
                            "1" if obj.valid else "0",
                            "1" if c.degenerate_repeats else "0",
                        ]
                    )
                )
    (mat_dir / "cells.csv").write_text("\n".join(cell_rows) + "\n")


def wheg_outline(radius_m: float, thickness_m: float, arc_points: int = 64) -> np.ndarray:
    """Closed planar polyline of a semicircular wheg cross-section profile.

    Outer arc of radius R, inner arc offset inward by the thickness, straight
    end caps, first vertex repeated at the end. Units are meters.
    """
    if radius_m <= 0.0 or thickness_m <= 0.0:
        raise ValueError("radius and thickness must be > 0")
    if thickness_m >= radius_m:
        raise ValueError("thickness must be smaller than the radius")
    if arc_points < 8:
        raise ValueError("arc_points must be >= 8")
    angles = np.linspace(0.0, math.pi, arc_points)
    outer = np.stack([radius_m * np.cos(angles), radius_m * np.sin(angles)], axis=1)
    inner_r = radius_m - thickness_m
    inner = np.stack(
        [inner_r * np.cos(angles[::-1]), inner_r * np.sin(angles[::-1])], axis=1
    )
    return np.vstack([outer, inner, outer[:1]])


def export_geometry(
    design: Design, out_dir: str | Path, arc_points: int = 64
) -> dict[str, Path]:
    """Write the front and back wheg outlines as plain-text polylines."""
    bad = design.violations()
    if bad:
        raise ValueError("invalid design: " + "; ".join(bad))
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {}
    for label, radius in (
        ("front", design.morph.front_len_m),
        ("back", design.morph.back_len_m),
    ):
        poly = wheg_outline(radius, design.morph.thickness_m, arc_points)
        text = "".join(f"{x!r} {y!r}\n" for x, y in poly)
        path = out / f"wheg_{label}.txt"
        path.write_text(text)
        paths[label] = path
    return paths


def _reference_block() -> list[str]:
    lines = [f"{reference.REFERENCE_LABEL}:"]
    lines.append(
        f"  nominal flat-ground: efficiency {reference.NOMINAL_EFFICIENCY_M_PER_J} m/J, "
        f"speed {reference.NOMINAL_SPEED_M_PER_S} m/s"
    )
    for tname, row in reference.REFERENCE_TABLE.items():
        lines.append(
            f"  {tname}: EOP {row.eop_efficiency_m_per_j} m/J @ {row.eop_speed_m_per_s} m/s, "
            f"SOP {row.sop_efficiency_m_per_j} m/J @ {row.sop_speed_m_per_s} m/s"
        )
    return lines


def report(artifact_dir: str | Path, config: RunConfig) -> str:
    """Human-readable summary of a codesign run directory or a cross-eval
    directory, annotated with the published reference values.
    """
    d = Path(artifact_dir)
    if (d / "summary.txt").exists():
        body = (d / "summary.txt").read_text().rstrip("\n").splitlines()
    elif (d / "matrix.csv").exists():
        body = _matrix_report(d)
    else:
        raise FileNotFoundError(
            f"{d} contains neither summary.txt (codesign run) nor matrix.csv (cross-eval)"
        )
    return "\n".join(body + _reference_block()) + "\n"


def _matrix_report(mat_dir: Path) -> list[str]:
    rows = (mat_dir / "matrix.csv").read_text().strip().splitlines()[1:]
    parsed = [r.split(",") for r in rows]
    by_terrain: dict[str, dict[str, float]] = {}
    speeds: dict[str, dict[str, float]] = {}
    for label, tname, eff, spd, _disp in parsed:
        by_terrain.setdefault(tname, {})[label] = float(eff)
        speeds.setdefault(tname, {})[label] = float(spd)
    lines = ["cross-evaluation report (mean efficiency, m/J)"]
    for tname, cells in by_terrain.items():
        nominal = cells.get("nominal")
        for label, eff in cells.items():
            note = ""
            if nominal is not None and label != "nominal":
                if nominal != 0.0:
                    note = f"  ({eff / nominal:.2f}x vs nominal)"
                else:
                    note = "  (nominal = 0)"
            lines.append(
                f"  {tname:<7} {label:<24} eff {eff!r} m/J, "
                f"speed {speeds[tname][label]!r} m/s{note}"
            )
    return lines
