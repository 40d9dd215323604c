"""Dispatch-rule construction of feasible starting schedules.

List scheduling keeps one completion clock per job and per machine; the rule
only decides which job's next route operation is appended.  Shortest and
longest weighted processing time are deterministic; the random rule draws the
job uniformly.  The competitive phase runs all three once and keeps the
schedule with the smallest cycle time.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .model import Instance, Schedule, cycle_time

WSPT = "wspt"
WLPT = "wlpt"
RANDOM = "random"
RULES = (WSPT, WLPT, RANDOM)


@dataclass(frozen=True)
class DispatchRule:
    kind: str
    weights: tuple[float, ...] = field(default=())

    def __post_init__(self) -> None:
        if self.kind not in RULES:
            raise ValueError(f"unknown rule {self.kind!r}")
        if any(w <= 0 for w in self.weights):
            raise ValueError("job weights must be strictly positive")

    def job_weights(self, inst: Instance) -> tuple[float, ...]:
        if not self.weights:
            return (1.0,) * len(inst.jobs)
        if len(self.weights) != len(inst.jobs):
            raise ValueError("one weight per job required")
        return self.weights


def list_schedule(inst: Instance, rule: DispatchRule, seed: int = 0) -> Schedule:
    """Greedy list scheduling under the given priority rule.

    Always feasible: an operation becomes eligible only after its route
    predecessor is placed, and it starts at the later of its job's and its
    machine's completion clock (semi-active, integer starts).
    """
    weights = rule.job_weights(inst)
    rng = np.random.default_rng(seed) if rule.kind == RANDOM else None
    job_clock = [0] * len(inst.jobs)
    machine_clock = [0] * inst.machine_count
    next_op = [0] * len(inst.jobs)
    starts = np.zeros(inst.total_ops, dtype=np.float64)
    index = inst.op_index

    remaining = inst.total_ops
    while remaining:
        candidates = [
            i for i, job in enumerate(inst.jobs) if next_op[i] < len(job)
        ]
        if rule.kind == WSPT:
            i = min(
                candidates,
                key=lambda i: (inst.jobs[i].ops[next_op[i]][1] / weights[i], i),
            )
        elif rule.kind == WLPT:
            i = max(
                candidates,
                key=lambda i: (inst.jobs[i].ops[next_op[i]][1] * weights[i], -i),
            )
        else:
            i = candidates[int(rng.integers(len(candidates)))]
        j = next_op[i]
        machine, duration = inst.jobs[i].ops[j]
        start = max(job_clock[i], machine_clock[machine])
        starts[index[(i, j)]] = start
        job_clock[i] = start + duration
        machine_clock[machine] = start + duration
        next_op[i] = j + 1
        remaining -= 1
    return Schedule(inst, starts)


def competitive_dispatch(inst: Instance, seed: int = 0) -> Schedule:
    """Run wspt, wlpt and random once; keep the lowest cycle time.

    Ties keep the earlier rule in (wspt, wlpt, random) order.  The random
    candidate's seed is derived deterministically from the given seed.
    """
    child = np.random.SeedSequence(seed).generate_state(1)[0]
    candidates = [
        list_schedule(inst, DispatchRule(WSPT)),
        list_schedule(inst, DispatchRule(WLPT)),
        list_schedule(inst, DispatchRule(RANDOM), seed=int(child)),
    ]
    return min(candidates, key=lambda s: cycle_time(inst, s))
