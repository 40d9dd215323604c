"""Pure numpy/Python fallback kernels.

Mirrors the compiled extension function for function; the repair passes are
sequential by nature, so they run as plain Python loops here.  Used when the
extension is not built or when CJSS_BACKEND=python.
"""
from __future__ import annotations

import numpy as np

NAME = "python"


def residuals_into(starts, dur, ca, cb, da, db, out) -> None:
    gamma = ca.shape[0]
    out[:gamma] = starts[ca] - starts[cb] + dur[ca]
    sa = starts[da]
    sb = starts[db]
    fwd = sa <= sb
    out[gamma:] = np.where(fwd, sa + dur[da] - sb, sb + dur[db] - sa)


def energy_terms(starts, dur, ca, cb, da, db) -> tuple[float, float]:
    """Cycle-time objective and (un-scaled) quadratic penalty sum."""
    r = np.empty(ca.shape[0] + da.shape[0], dtype=np.float64)
    residuals_into(starts, dur, ca, cb, da, db, r)
    pos = np.maximum(r, 0.0)
    objective = float(np.max(starts + dur) - np.min(starts))
    return objective, float(0.5 * np.dot(pos, pos))


def gradient_into(starts, dur, ca, cb, da, db, penalty_factor, lam, out) -> None:
    """d(total energy)/d(start times); multiplier terms included when lam is given."""
    n = starts.shape[0]
    gamma = ca.shape[0]
    ends = starts + dur
    cmax = ends.max()
    smin = starts.min()
    amax = np.flatnonzero(ends == cmax)
    amin = np.flatnonzero(starts == smin)
    out[:] = 0.0
    out[amax] += 1.0 / amax.size
    out[amin] -= 1.0 / amin.size

    rc = starts[ca] - starts[cb] + dur[ca]
    sa = starts[da]
    sb = starts[db]
    fwd = sa <= sb
    rd = np.where(fwd, sa + dur[da] - sb, sb + dur[db] - sa)
    ea = np.where(fwd, da, db)  # earlier op carries the +1 coefficient
    eb = np.where(fwd, db, da)

    wc = penalty_factor * np.maximum(rc, 0.0)
    wd = penalty_factor * np.maximum(rd, 0.0)
    if lam is not None:
        wc = wc + lam[:gamma]
        wd = wd + lam[gamma:]
    out += np.bincount(ca, weights=wc, minlength=n)
    out -= np.bincount(cb, weights=wc, minlength=n)
    out += np.bincount(ea, weights=wd, minlength=n)
    out -= np.bincount(eb, weights=wd, minlength=n)


def step_into(starts, dur, ca, cb, da, db, penalty_factor, mu, lam, out) -> float:
    """One descent update into ``out``; returns the energy of the new state."""
    grad = np.empty_like(starts)
    gradient_into(starts, dur, ca, cb, da, db, penalty_factor, lam, grad)
    np.maximum(starts - mu * grad, 0.0, out=out)
    objective, penalty = energy_terms(out, dur, ca, cb, da, db)
    energy = objective + penalty_factor * penalty
    if lam is not None:
        r = np.empty(ca.shape[0] + da.shape[0], dtype=np.float64)
        residuals_into(out, dur, ca, cb, da, db, r)
        energy += float(np.dot(lam, r))
    return energy


def _machine_order(w, ids):
    return ids[np.argsort(w[ids], kind="stable")]


def disjunctive_pass(w, dur, machine_ptr, machine_ops) -> bool:
    """Right-shift overlapping machine ops in start order.  Mutates w."""
    changed = False
    for m in range(machine_ptr.shape[0] - 1):
        ids = machine_ops[machine_ptr[m]:machine_ptr[m + 1]]
        if ids.shape[0] < 2:
            continue
        order = _machine_order(w, ids)
        acc = 0.0
        end = w[order[0]] + dur[order[0]]
        for k in order[1:]:
            t = w[k] + acc
            if t < end:
                acc += end - t
                t = end
                changed = True
            w[k] = t
            end = t + dur[k]
    return changed


def conjunctive_pass(w, dur, job_ptr) -> bool:
    """Right-shift job ops that start before their route predecessor ends."""
    changed = False
    for i in range(job_ptr.shape[0] - 1):
        lo, hi = job_ptr[i], job_ptr[i + 1]
        acc = 0.0
        end = w[lo] + dur[lo]
        for k in range(lo + 1, hi):
            t = w[k] + acc
            if t < end:
                acc += end - t
                t = end
                changed = True
            w[k] = t
            end = t + dur[k]
    return changed


def compact_into(w, dur, op_job, op_machine, job_ptr, machine_ptr, machine_ops,
                 out) -> float:
    """Earliest-start recomputation keeping w's machine orders and job routes.

    Assumes w is feasible, so sorting by start time is a topological order of
    the oriented graph.  Returns the new cycle time.
    """
    order = np.argsort(w, kind="stable")
    machine_last = np.full(machine_ptr.shape[0] - 1, -1, dtype=np.int64)
    tau = 0.0
    for k in order:
        t = 0.0
        if k > job_ptr[op_job[k]]:
            t = out[k - 1] + dur[k - 1]
        m = op_machine[k]
        prev = machine_last[m]
        if prev >= 0:
            t2 = out[prev] + dur[prev]
            if t2 > t:
                t = t2
        out[k] = t
        machine_last[m] = k
        end = t + dur[k]
        if end > tau:
            tau = end
    return tau


def repair_compact_into(
    starts, dur, op_job, op_machine, job_ptr, machine_ptr, machine_ops,
    max_rounds, out
) -> float:
    """Alternate the two right-shift passes to a fixed point, then compact.

    Returns the compacted cycle time, or -1.0 if the alternation did not
    settle within max_rounds (a bug signal, not an expected outcome).
    """
    w = starts.copy()
    for _ in range(max_rounds):
        changed = disjunctive_pass(w, dur, machine_ptr, machine_ops)
        changed |= conjunctive_pass(w, dur, job_ptr)
        if not changed:
            break
    else:
        return -1.0
    return compact_into(w, dur, op_job, op_machine, job_ptr, machine_ptr,
                        machine_ops, out)


def iterate(starts, dur, ca, cb, da, db, op_job, op_machine, job_ptr,
            machine_ptr, machine_ops, penalty_factor, mu, lam, max_rounds,
            repaired_out) -> tuple[float, float]:
    """Fused solver iteration: descent step in place, then repair+compact.

    Returns (energy of the new state, cycle time of its repaired copy).
    """
    energy = step_into(starts, dur, ca, cb, da, db, penalty_factor, mu, lam,
                       starts)
    tau = repair_compact_into(starts, dur, op_job, op_machine, job_ptr,
                              machine_ptr, machine_ops, max_rounds,
                              repaired_out)
    return energy, tau
