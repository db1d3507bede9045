"""Two-qubit Maxwell's-demon heat engine: simulation, closed forms, gates and device layer."""
from .engine import (
    CycleConfig,
    CycleLedger,
    efficiency_closed_form,
    positive_work_condition,
    qin_closed_form,
    run_cycle,
    work_closed_form,
)
from .states import QubitParams, joint_thermal_state

__all__ = [
    "CycleConfig",
    "CycleLedger",
    "QubitParams",
    "efficiency_closed_form",
    "joint_thermal_state",
    "positive_work_condition",
    "qin_closed_form",
    "run_cycle",
    "work_closed_form",
]
