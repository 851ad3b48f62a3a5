"""Request/response schemas for the co-design service."""
from __future__ import annotations

from pydantic import BaseModel, Field

from ..design_space import Design


class DesignModel(BaseModel):
    period_s: float
    slow_fraction: float
    slow_start_rad: float
    slow_end_rad: float
    front_len_m: float
    back_len_m: float
    thickness_m: float

    def to_design(self) -> Design:
        return Design.from_mapping(self.model_dump())

    @classmethod
    def from_design(cls, design: Design) -> "DesignModel":
        return cls(**design.to_mapping())


class ObjectiveModel(BaseModel):
    efficiency_m_per_j: float
    speed_m_per_s: float
    displacement_m: float
    avg_power_w: float
    valid: bool


class ValidateRequest(BaseModel):
    design: DesignModel
    config_path: str | None = None


class ValidateResponse(BaseModel):
    violations: list[str]


class SimulateRequest(BaseModel):
    terrain: str
    design: DesignModel | None = None
    design_path: str | None = None
    config_path: str | None = None
    seed: int | None = Field(default=None, description="rough-terrain seed override")
    out_dir: str | None = Field(default=None, description="write the trial log here")


class SimulateResponse(BaseModel):
    terrain: str
    outcome: str
    objective: ObjectiveModel
    log_path: str | None = None


class OptimizeRequest(BaseModel):
    terrain: str
    config_path: str | None = None
    seed: int | None = None
    out_dir: str | None = None
    budget: int | None = None


class OptimizeResponse(BaseModel):
    terrain: str
    seed: int
    best_design: DesignModel
    best_objective: ObjectiveModel
    artifact_dir: str
    trial_log: str
    report: str


class CrossEvalRequest(BaseModel):
    design_paths: list[str] = Field(default_factory=list)
    include_nominal: bool = True
    terrains: list[str] | None = None
    config_path: str | None = None
    out_dir: str | None = None


class CrossEvalResponse(BaseModel):
    labels: list[str]
    terrains: list[str]
    mean_efficiency: dict[str, dict[str, float]]  # label -> terrain -> value
    mean_speed: dict[str, dict[str, float]]
    artifact_dir: str
    report: str


class ExportRequest(BaseModel):
    design: DesignModel | None = None
    design_path: str | None = None
    out_dir: str
    arc_points: int = 64


class ExportResponse(BaseModel):
    files: dict[str, str]


class ReportRequest(BaseModel):
    artifact_dir: str
    config_path: str | None = None


class ReportResponse(BaseModel):
    text: str
