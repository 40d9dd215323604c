"""Problem instances, schedules, constraint enumeration and feasibility checking.

An instance is a classic job shop run cyclically: every job repeats forever
with a fixed route through the machines.  Only the start times of occurrence 0
are stored; occurrence k of an operation starts ``start + k * cycle_time``, so
the cycle time of a schedule is simply ``C_max - S_min`` of occurrence 0.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from pathlib import Path
from typing import Iterable, Iterator, Mapping

import numpy as np


class ParseError(ValueError):
    """Malformed instance or schedule text."""


@dataclass(frozen=True)
class Job:
    """Ordered route of (machine, processing_time) pairs."""

    ops: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        if not self.ops:
            raise ValueError("job must have at least one operation")
        for machine, duration in self.ops:
            if duration <= 0:
                raise ValueError(f"non-positive duration {duration}")
            if machine < 0:
                raise ValueError(f"negative machine id {machine}")

    def __len__(self) -> int:
        return len(self.ops)


@dataclass(frozen=True)
class Instance:
    """A cyclic job shop instance: machines, jobs and their fixed routes."""

    name: str
    machine_count: int
    jobs: tuple[Job, ...]

    def __post_init__(self) -> None:
        if self.machine_count < 1:
            raise ValueError("machine_count must be >= 1")
        if not self.jobs:
            raise ValueError("instance must have at least one job")
        for job in self.jobs:
            for machine, _ in job.ops:
                if machine >= self.machine_count:
                    raise ValueError(
                        f"machine id {machine} out of range [0, {self.machine_count})"
                    )

    @cached_property
    def total_ops(self) -> int:
        return sum(len(job) for job in self.jobs)

    @cached_property
    def op_index(self) -> dict[tuple[int, int], int]:
        """Flat id for every (job, op) pair, ordered by (job, op)."""
        index: dict[tuple[int, int], int] = {}
        for i, job in enumerate(self.jobs):
            for j in range(len(job)):
                index[(i, j)] = len(index)
        return index

    def operations(self) -> Iterator[tuple[int, int, int, int]]:
        """Yield (job, op, machine, duration) in (job, op) order."""
        for i, job in enumerate(self.jobs):
            for j, (machine, duration) in enumerate(job.ops):
                yield i, j, machine, duration

    @cached_property
    def durations(self) -> np.ndarray:
        return np.array([d for _, _, _, d in self.operations()], dtype=np.float64)

    @cached_property
    def machines_of_ops(self) -> np.ndarray:
        return np.array([m for _, _, m, _ in self.operations()], dtype=np.int32)

    @cached_property
    def max_duration(self) -> int:
        return max(d for _, _, _, d in self.operations())

    @cached_property
    def mean_duration(self) -> float:
        return float(self.durations.mean())


class Schedule:
    """Start times for one occurrence of every operation.

    Behaves as a read-only mapping from (job, op) to start time; internally a
    flat float array in (job, op) order so the numeric kernels can use it
    without conversion.
    """

    __slots__ = ("inst", "_starts")

    def __init__(self, inst: Instance, starts) -> None:
        self.inst = inst
        if isinstance(starts, Mapping):
            arr = np.empty(inst.total_ops, dtype=np.float64)
            index = inst.op_index
            if set(starts.keys()) != set(index.keys()):
                raise ValueError("schedule keys do not match instance operations")
            for key, value in starts.items():
                arr[index[key]] = value
        else:
            arr = np.asarray(starts, dtype=np.float64).copy()
            if arr.shape != (inst.total_ops,):
                raise ValueError(
                    f"expected {inst.total_ops} start times, got {arr.shape}"
                )
        if not np.all(np.isfinite(arr)):
            raise ValueError("start times must be finite")
        if np.any(arr < 0):
            raise ValueError("start times must be non-negative")
        arr.setflags(write=False)
        self._starts = arr

    @property
    def starts(self) -> np.ndarray:
        """Read-only flat view in (job, op) order."""
        return self._starts

    def __getitem__(self, key: tuple[int, int]) -> float:
        return float(self._starts[self.inst.op_index[key]])

    def __len__(self) -> int:
        return self.inst.total_ops

    def items(self) -> Iterator[tuple[tuple[int, int], float]]:
        for key, idx in self.inst.op_index.items():
            yield key, float(self._starts[idx])

    def replace(self, starts) -> "Schedule":
        return Schedule(self.inst, starts)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Schedule):
            return NotImplemented
        return self.inst is other.inst and np.array_equal(self._starts, other._starts)

    def __repr__(self) -> str:
        return f"Schedule({self.inst.name!r}, {list(self._starts)!r})"


OpPair = tuple[tuple[int, int], tuple[int, int]]


@dataclass(frozen=True)
class ConstraintSet:
    """Enumerated precedence (conjunctive) and machine-sharing (disjunctive) pairs."""

    conjunctive: tuple[OpPair, ...]
    disjunctive: tuple[OpPair, ...]
    gamma: int
    omega: int
    xi: int

    # flat op-id arrays used by the numeric backends
    conj_a: np.ndarray = field(repr=False, compare=False, default=None)
    conj_b: np.ndarray = field(repr=False, compare=False, default=None)
    disj_a: np.ndarray = field(repr=False, compare=False, default=None)
    disj_b: np.ndarray = field(repr=False, compare=False, default=None)


@lru_cache(maxsize=256)
def build_constraints(inst: Instance) -> ConstraintSet:
    """Enumerate the constraint pairs of an instance.

    One conjunctive pair per consecutive (job, op) -> (job, op+1); one
    disjunctive pair per unordered pair of operations sharing a machine,
    listed machine by machine.  Instances are immutable, so results are
    cached.
    """
    index = inst.op_index
    conjunctive: list[OpPair] = []
    for i, job in enumerate(inst.jobs):
        for j in range(len(job) - 1):
            conjunctive.append(((i, j), (i, j + 1)))

    by_machine: list[list[tuple[int, int]]] = [[] for _ in range(inst.machine_count)]
    for i, j, machine, _ in inst.operations():
        by_machine[machine].append((i, j))

    disjunctive: list[OpPair] = []
    for ops in by_machine:
        for a in range(len(ops)):
            for b in range(a + 1, len(ops)):
                disjunctive.append((ops[a], ops[b]))

    gamma = len(conjunctive)
    omega = len(disjunctive)
    return ConstraintSet(
        conjunctive=tuple(conjunctive),
        disjunctive=tuple(disjunctive),
        gamma=gamma,
        omega=omega,
        xi=gamma + omega,
        conj_a=np.array([index[a] for a, _ in conjunctive], dtype=np.int32),
        conj_b=np.array([index[b] for _, b in conjunctive], dtype=np.int32),
        disj_a=np.array([index[a] for a, _ in disjunctive], dtype=np.int32),
        disj_b=np.array([index[b] for _, b in disjunctive], dtype=np.int32),
    )


def job_times(inst: Instance, s: Schedule, i: int) -> tuple[float, float]:
    """Start and completion time of job i: (min start, max start+duration)."""
    if not 0 <= i < len(inst.jobs):
        raise IndexError(f"job index {i} out of range")
    job = inst.jobs[i]
    starts = [s[(i, j)] for j in range(len(job))]
    ends = [starts[j] + job.ops[j][1] for j in range(len(job))]
    return min(starts), max(ends)


def cycle_time(inst: Instance, s: Schedule) -> float:
    """Cycle time of a 1-periodic schedule: max completion minus earliest start."""
    arr = s.starts
    return float(np.max(arr + inst.durations) - np.min(arr))


@dataclass
class FeasibilityReport:
    feasible: bool
    conjunctive_violations: list[tuple[OpPair, float]]
    disjunctive_violations: list[tuple[OpPair, float]]
    cross_cycle_ok: bool

    def describe(self) -> str:
        if self.feasible:
            return "feasible"
        lines = []
        for (a, b), amount in self.conjunctive_violations:
            lines.append(f"precedence {a} -> {b} violated by {amount:g}")
        for (a, b), amount in self.disjunctive_violations:
            lines.append(f"machine overlap {a} / {b} by {amount:g}")
        if not self.cross_cycle_ok:
            lines.append("cycle time smaller than the longest operation")
        return "\n".join(lines)


def validate(inst: Instance, cs: ConstraintSet, s: Schedule) -> FeasibilityReport:
    """Check conjunctive order, machine non-overlap and the cross-cycle guard.

    Successive occurrences of the whole pattern are separated by the cycle
    time, so with every occurrence-0 interval inside [S_min, C_max] the
    within-cycle checks plus ``tau >= max duration`` cover the k != h cases.
    """
    conj: list[tuple[OpPair, float]] = []
    for a, b in cs.conjunctive:
        p_a = inst.jobs[a[0]].ops[a[1]][1]
        excess = s[a] + p_a - s[b]
        if excess > 0:
            conj.append(((a, b), excess))

    disj: list[tuple[OpPair, float]] = []
    for a, b in cs.disjunctive:
        p_a = inst.jobs[a[0]].ops[a[1]][1]
        p_b = inst.jobs[b[0]].ops[b[1]][1]
        overlap = min(s[a] + p_a, s[b] + p_b) - max(s[a], s[b])
        if overlap > 0:
            disj.append(((a, b), overlap))

    tau = cycle_time(inst, s)
    cross_ok = tau >= inst.max_duration
    return FeasibilityReport(
        feasible=not conj and not disj and cross_ok,
        conjunctive_violations=conj,
        disjunctive_violations=disj,
        cross_cycle_ok=cross_ok,
    )


def _tokenize(text: str) -> Iterator[tuple[str, int, int]]:
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        col = 0
        for token in line.split():
            col = line.index(token, col) + 1
            yield token, lineno, col
            col += len(token) - 1


def _int_token(token: str, lineno: int, col: int, what: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise ParseError(
            f"line {lineno}, column {col}: expected {what}, got {token!r}"
        ) from None


def parse_instance(text: str, name: str = "") -> Instance:
    """Parse the plain-text instance format.

    Header line ``N M``; then one line per job holding (machine, duration)
    pairs with 0-based machine ids.  ``#`` comments and blank lines are
    ignored.  Tokens are consumed line by line, so each job's pairs must sit
    on a single line.
    """
    lines: dict[int, list[tuple[str, int, int]]] = {}
    for tok in _tokenize(text):
        lines.setdefault(tok[1], []).append(tok)
    ordered = [lines[k] for k in sorted(lines)]
    if not ordered:
        raise ParseError("empty instance: no header line")

    header = ordered[0]
    if len(header) != 2:
        raise ParseError(
            f"line {header[0][1]}: header must be exactly 'N M', got {len(header)} tokens"
        )
    n_jobs = _int_token(*header[0], "job count")
    n_machines = _int_token(*header[1], "machine count")
    if n_jobs < 1 or n_machines < 1:
        raise ParseError(f"line {header[0][1]}: N and M must be positive")
    if len(ordered) - 1 != n_jobs:
        raise ParseError(
            f"expected {n_jobs} job lines, found {len(ordered) - 1}"
        )

    jobs: list[Job] = []
    for row in ordered[1:]:
        if len(row) % 2 != 0:
            tok, lineno, col = row[-1]
            raise ParseError(
                f"line {lineno}, column {col}: dangling token {tok!r}, "
                "expected (machine, duration) pairs"
            )
        ops: list[tuple[int, int]] = []
        for k in range(0, len(row), 2):
            machine = _int_token(*row[k], "machine id")
            duration = _int_token(*row[k + 1], "duration")
            _, lineno, col = row[k]
            if not 0 <= machine < n_machines:
                raise ParseError(
                    f"line {lineno}, column {col}: machine id {machine} "
                    f"out of range [0, {n_machines})"
                )
            _, lineno, col = row[k + 1]
            if duration <= 0:
                raise ParseError(
                    f"line {lineno}, column {col}: non-positive duration {duration}"
                )
            ops.append((machine, duration))
        if not ops:
            _, lineno, _ = row[0] if row else (None, 0, 0)
            raise ParseError(f"line {lineno}: job line with no operations")
        jobs.append(Job(tuple(ops)))

    return Instance(name=name, machine_count=n_machines, jobs=tuple(jobs))


def serialize_instance(inst: Instance) -> str:
    """Inverse of parse_instance: single spaces, LF endings, no comments."""
    out = [f"{len(inst.jobs)} {inst.machine_count}"]
    for job in inst.jobs:
        out.append(" ".join(f"{m} {d}" for m, d in job.ops))
    return "\n".join(out) + "\n"


def load_instance(path: str | Path) -> Instance:
    """Read an instance file; the file stem becomes the instance name."""
    p = Path(path)
    return parse_instance(p.read_text(encoding="utf-8"), name=p.stem)
