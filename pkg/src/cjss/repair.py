"""Post-processing: turn near-feasible start times into feasible compact schedules.

The two adhere passes only ever shift operations to the right, so they never
reorder a machine's sequence; alternating them reaches a joint fixed point
because one pass can re-break what the other fixed.  Compacting then pulls
every operation to its earliest start under the orientation the schedule
already encodes, which also lands every start back on the integer grid.
"""
from __future__ import annotations

import numpy as np

from ._core import numpy_backend as _nb
from ._core import problem_arrays
from .model import ConstraintSet, Instance, Schedule, build_constraints, validate


class RepairError(RuntimeError):
    """The adhere alternation failed to settle (a logic bug, not bad input)."""


def _arrays(inst: Instance, cs: ConstraintSet | None):
    return problem_arrays(inst, cs if cs is not None else build_constraints(inst))


def adhere_disjunctive(inst: Instance, s: Schedule) -> Schedule:
    """One right-shift pass per machine, in current start order."""
    pa = _arrays(inst, None)
    w = s.starts.copy()
    _nb.disjunctive_pass(w, pa.dur, pa.machine_ptr, pa.machine_ops)
    return Schedule(inst, w)


def adhere_conjunctive(inst: Instance, s: Schedule) -> Schedule:
    """One right-shift pass per job, in route order."""
    pa = _arrays(inst, None)
    w = s.starts.copy()
    _nb.conjunctive_pass(w, pa.dur, pa.job_ptr)
    return Schedule(inst, w)


def make_feasible(inst: Instance, cs: ConstraintSet, s: Schedule) -> Schedule:
    """Alternate the two adhere passes to a fixed point."""
    pa = _arrays(inst, cs)
    w = s.starts.copy()
    for _ in range(10 * inst.total_ops):
        changed = _nb.disjunctive_pass(w, pa.dur, pa.machine_ptr, pa.machine_ops)
        changed |= _nb.conjunctive_pass(w, pa.dur, pa.job_ptr)
        if not changed:
            return Schedule(inst, w)
    raise RepairError(
        f"adhere passes did not settle within {10 * inst.total_ops} rounds"
    )


def compact(inst: Instance, cs: ConstraintSet, s: Schedule) -> Schedule:
    """Earliest-start schedule with s's machine orders and job routes.

    Requires a feasible input; the result is feasible, anchored at time 0,
    and never has a larger cycle time.
    """
    report = validate(inst, cs, s)
    if not report.feasible:
        raise ValueError(f"compact requires a feasible schedule:\n{report.describe()}")
    pa = _arrays(inst, cs)
    out = np.empty(inst.total_ops, dtype=np.float64)
    _nb.compact_into(
        s.starts.copy(), pa.dur, pa.op_job, pa.op_machine,
        pa.job_ptr, pa.machine_ptr, pa.machine_ops, out,
    )
    return Schedule(inst, out)


def integerize(inst: Instance, cs: ConstraintSet, s: Schedule) -> Schedule:
    """Compact and land on integer starts (durations are integers)."""
    result = compact(inst, cs, s)
    starts = result.starts
    rounded = np.rint(starts)
    if not np.array_equal(rounded, starts):
        raise AssertionError("compacted starts were not integral")
    return Schedule(inst, rounded)
