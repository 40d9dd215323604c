"""Cyclic job shop scheduling toolkit.

Minimises the cycle time of 1-periodic job shop schedules by gradient
descent on a penalised energy, with dispatch-rule initialisation,
right-shift repair, and a benchmark harness for the classic FT/LA/ABZ/ORB
instance families.
"""
from ._core import available_backends, get_backend
from .bench import BenchmarkRow, deviation, load_bounds, run_suite, write_report
from .dispatch import DispatchRule, competitive_dispatch, list_schedule
from .energy import (
    DualState,
    EnergyBreakdown,
    dual_update,
    energy,
    gradient,
    lagrangian_energy,
    residuals,
    zero_duals,
)
from .gantt import render_gantt
from .model import (
    ConstraintSet,
    FeasibilityReport,
    Instance,
    Job,
    ParseError,
    Schedule,
    build_constraints,
    cycle_time,
    job_times,
    load_instance,
    parse_instance,
    serialize_instance,
    validate,
)
from .repair import (
    RepairError,
    adhere_conjunctive,
    adhere_disjunctive,
    compact,
    integerize,
    make_feasible,
)
from .solver import (
    LRRNN,
    RNN,
    SolveResult,
    SolverConfig,
    descent_step,
    detect_stall,
    perturb,
    solve,
)

__version__ = "0.1.0"

__all__ = [
    "BenchmarkRow",
    "ConstraintSet",
    "DispatchRule",
    "DualState",
    "EnergyBreakdown",
    "FeasibilityReport",
    "Instance",
    "Job",
    "LRRNN",
    "ParseError",
    "RNN",
    "RepairError",
    "Schedule",
    "SolveResult",
    "SolverConfig",
    "adhere_conjunctive",
    "adhere_disjunctive",
    "available_backends",
    "build_constraints",
    "compact",
    "competitive_dispatch",
    "cycle_time",
    "descent_step",
    "detect_stall",
    "deviation",
    "dual_update",
    "energy",
    "get_backend",
    "gradient",
    "integerize",
    "job_times",
    "lagrangian_energy",
    "list_schedule",
    "load_bounds",
    "load_instance",
    "make_feasible",
    "parse_instance",
    "perturb",
    "render_gantt",
    "residuals",
    "run_suite",
    "serialize_instance",
    "solve",
    "validate",
    "write_report",
    "zero_duals",
]
