"""FastAPI service wrapping the co-design toolkit.

Endpoints execute synchronously in-process; optimization runs block until
finished, which matches the desk-scale workloads this service fronts. All
file paths in requests are resolved on the server's filesystem.
"""
from __future__ import annotations

import dataclasses
from pathlib import Path

from fastapi import FastAPI, HTTPException

from .. import design_space, harness, metrics, reference
from ..config import ConfigError, RunConfig, default_yaml, load_config
from ..design_space import Design
from . import models


def _load(config_path: str | None) -> RunConfig:
    try:
        return load_config(config_path)
    except ConfigError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc


def _resolve_design(
    design: models.DesignModel | None, design_path: str | None
) -> Design:
    if (design is None) == (design_path is None):
        raise HTTPException(
            status_code=400, detail="provide exactly one of design, design_path"
        )
    try:
        if design is not None:
            return design.to_design()
        return Design.from_record(Path(design_path).read_text())
    except (OSError, ValueError) as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc


def _objective_model(obj: metrics.ObjectiveValue) -> models.ObjectiveModel:
    return models.ObjectiveModel(**dataclasses.asdict(obj))


def create_app() -> FastAPI:
    app = FastAPI(title="whegcd", version="0.1.0")

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok"}

    @app.get("/reference")
    def reference_table() -> dict:
        return {
            "label": reference.REFERENCE_LABEL,
            "nominal": {
                "efficiency_m_per_j": reference.NOMINAL_EFFICIENCY_M_PER_J,
                "speed_m_per_s": reference.NOMINAL_SPEED_M_PER_S,
            },
            "table": {
                name: dataclasses.asdict(row)
                for name, row in reference.REFERENCE_TABLE.items()
            },
        }

    @app.get("/config/default")
    def config_default() -> dict:
        return {"yaml": default_yaml()}

    @app.post("/validate", response_model=models.ValidateResponse)
    def validate(req: models.ValidateRequest) -> models.ValidateResponse:
        cfg = _load(req.config_path)
        violations = design_space.validate(
            req.design.to_design(), cfg.bounds.to_bounds()
        )
        return models.ValidateResponse(violations=violations)

    @app.post("/simulate", response_model=models.SimulateResponse)
    def simulate(req: models.SimulateRequest) -> models.SimulateResponse:
        cfg = _load(req.config_path)
        design = _resolve_design(req.design, req.design_path)
        try:
            terr = harness.build_terrain(cfg, req.terrain, rough_seed=req.seed)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        trial, obj = harness.evaluate_design(design, terr, cfg)
        log_path = None
        if req.out_dir is not None:
            out = Path(req.out_dir)
            out.mkdir(parents=True, exist_ok=True)
            log_path = out / f"trial_{req.terrain}.csv"
            log_path.write_text(trial.to_log_text())
        return models.SimulateResponse(
            terrain=req.terrain,
            outcome=trial.outcome,
            objective=_objective_model(obj),
            log_path=None if log_path is None else str(log_path),
        )

    @app.post("/optimize", response_model=models.OptimizeResponse)
    def optimize(req: models.OptimizeRequest) -> models.OptimizeResponse:
        cfg = _load(req.config_path)
        if req.budget is not None:
            if req.budget < cfg.optimizer.init_points:
                raise HTTPException(
                    status_code=400, detail="budget must be >= optimizer.init_points"
                )
            cfg.optimizer.budget = req.budget
        if req.terrain not in harness.terrain_mod.TERRAIN_NAMES:
            raise HTTPException(status_code=400, detail=f"unknown terrain {req.terrain!r}")
        run_dir = harness.run_codesign(
            cfg, req.terrain, seed=req.seed, out_dir=req.out_dir
        )
        best = Design.from_record((run_dir / "best_design.txt").read_text())
        terr = harness.build_terrain(cfg, req.terrain)
        _, obj = harness.evaluate_design(best, terr, cfg)
        return models.OptimizeResponse(
            terrain=req.terrain,
            seed=cfg.optimizer.seed if req.seed is None else req.seed,
            best_design=models.DesignModel.from_design(best),
            best_objective=_objective_model(obj),
            artifact_dir=str(run_dir),
            trial_log=str(run_dir / "trial_log.csv"),
            report=harness.report(run_dir, cfg),
        )

    @app.post("/cross-eval", response_model=models.CrossEvalResponse)
    def cross_eval(req: models.CrossEvalRequest) -> models.CrossEvalResponse:
        cfg = _load(req.config_path)
        try:
            matrix, mat_dir = harness.cross_evaluate(
                req.design_paths,
                cfg,
                terrain_names=req.terrains,
                include_nominal=req.include_nominal,
                out_dir=req.out_dir,
            )
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        eff = {
            label: {t: matrix.cell(label, t).mean_efficiency for t in matrix.terrain_names}
            for label in matrix.labels
        }
        spd = {
            label: {t: matrix.cell(label, t).mean_speed for t in matrix.terrain_names}
            for label in matrix.labels
        }
        return models.CrossEvalResponse(
            labels=matrix.labels,
            terrains=matrix.terrain_names,
            mean_efficiency=eff,
            mean_speed=spd,
            artifact_dir=str(mat_dir),
            report=harness.report(mat_dir, cfg),
        )

    @app.post("/export", response_model=models.ExportResponse)
    def export(req: models.ExportRequest) -> models.ExportResponse:
        design = _resolve_design(req.design, req.design_path)
        try:
            paths = harness.export_geometry(design, req.out_dir, req.arc_points)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return models.ExportResponse(files={k: str(v) for k, v in paths.items()})

    @app.post("/report", response_model=models.ReportResponse)
    def report(req: models.ReportRequest) -> models.ReportResponse:
        cfg = _load(req.config_path)
        try:
            text = harness.report(req.artifact_dir, cfg)
        except FileNotFoundError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return models.ReportResponse(text=text)

    return app


app = create_app()
