"""Published benchmark values kept as labeled constants for report
annotation only. They came from a different (3D, 10x-scale) simulator and
hardware platform, so reports print them side by side with our results but
nothing asserts against them.
"""
from __future__ import annotations

from dataclasses import dataclass

REFERENCE_LABEL = "paper reference (different simulator - not a target)"

# Baseline platform on flat ground.
NOMINAL_EFFICIENCY_M_PER_J = 0.016
NOMINAL_SPEED_M_PER_S = 0.52


@dataclass(frozen=True)
class ReferenceRow:
    eop_efficiency_m_per_j: float
    eop_speed_m_per_s: float
    sop_efficiency_m_per_j: float
    sop_speed_m_per_s: float


# Efficiency-optimized (EOP) and speed-optimized (SOP) platforms per terrain.
REFERENCE_TABLE: dict[str, ReferenceRow] = {
    "flat": ReferenceRow(0.0248, 0.685, 0.00829, 2.963),
    "rough": ReferenceRow(0.0202, 1.078, 0.00522, 2.521),
    "stairs": ReferenceRow(0.0208, 1.138, 0.01527, 2.183),
    "ramp": ReferenceRow(0.0089, 0.069, 0.00182, 1.276),
}
