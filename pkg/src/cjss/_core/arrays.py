"""Flat array form of an instance + constraint set, shared by both backends."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..model import ConstraintSet, Instance


@dataclass(frozen=True)
class ProblemArrays:
    """Everything the numeric kernels need, as contiguous arrays.

    Operation ids follow (job, op) order, so jobs are contiguous id ranges
    ``[job_ptr[i], job_ptr[i+1])``.  Machine membership is CSR style:
    machine m owns ``machine_ops[machine_ptr[m]:machine_ptr[m+1]]``, listed
    in (job, op) order.
    """

    n_ops: int
    dur: np.ndarray          # float64[n_ops]
    op_job: np.ndarray       # int32[n_ops]
    op_machine: np.ndarray   # int32[n_ops]
    job_ptr: np.ndarray      # int32[n_jobs + 1]
    machine_ptr: np.ndarray  # int32[n_machines + 1]
    machine_ops: np.ndarray  # int32[n_ops]
    conj_a: np.ndarray       # int32[gamma]
    conj_b: np.ndarray       # int32[gamma]
    disj_a: np.ndarray       # int32[omega]
    disj_b: np.ndarray       # int32[omega]


@lru_cache(maxsize=256)
def problem_arrays(inst: Instance, cs: ConstraintSet) -> ProblemArrays:
    job_ptr = np.zeros(len(inst.jobs) + 1, dtype=np.int32)
    for i, job in enumerate(inst.jobs):
        job_ptr[i + 1] = job_ptr[i] + len(job)
    op_job = np.repeat(
        np.arange(len(inst.jobs), dtype=np.int32),
        [len(job) for job in inst.jobs],
    ).astype(np.int32)

    op_machine = inst.machines_of_ops
    counts = np.bincount(op_machine, minlength=inst.machine_count)
    machine_ptr = np.zeros(inst.machine_count + 1, dtype=np.int32)
    machine_ptr[1:] = np.cumsum(counts)
    machine_ops = np.argsort(op_machine, kind="stable").astype(np.int32)

    return ProblemArrays(
        n_ops=inst.total_ops,
        dur=np.ascontiguousarray(inst.durations, dtype=np.float64),
        op_job=op_job,
        op_machine=np.ascontiguousarray(op_machine, dtype=np.int32),
        job_ptr=job_ptr,
        machine_ptr=machine_ptr,
        machine_ops=np.ascontiguousarray(machine_ops, dtype=np.int32),
        conj_a=np.ascontiguousarray(cs.conj_a, dtype=np.int32),
        conj_b=np.ascontiguousarray(cs.conj_b, dtype=np.int32),
        disj_a=np.ascontiguousarray(cs.disj_a, dtype=np.int32),
        disj_b=np.ascontiguousarray(cs.disj_b, dtype=np.int32),
    )
