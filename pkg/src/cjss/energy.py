"""Energy of a schedule: cycle-time objective plus penalised constraint residuals.

Every constraint is written as an affine residual r(S) that must be <= 0.
Violations are charged through the one-sided quadratic 0.5*max(0, r)^2, so the
total energy E = F + K*P is zero-penalty exactly on feasible schedules.  The
relaxed variant adds per-constraint multipliers with a projected ascent update.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .model import ConstraintSet, Instance, Schedule


@dataclass(frozen=True)
class EnergyBreakdown:
    """Objective, residual vector and penalty terms of one evaluation."""

    objective: float
    residuals: np.ndarray
    penalty: float
    penalty_factor: float
    multiplier_term: float
    total: float


@dataclass(frozen=True)
class DualState:
    """Non-negative multipliers (one per constraint) and their ascent step."""

    multipliers: np.ndarray
    step: float

    def __post_init__(self) -> None:
        if self.step <= 0:
            raise ValueError("dual step must be positive")
        if np.any(self.multipliers < 0):
            raise ValueError("multipliers must be non-negative")


def zero_duals(cs: ConstraintSet, step: float = 0.1) -> DualState:
    return DualState(np.zeros(cs.xi, dtype=np.float64), step)


def residuals(inst: Instance, cs: ConstraintSet, s: Schedule) -> np.ndarray:
    """Residual vector, conjunctive entries first then disjunctive.

    Conjunctive pair (a, b): r = S_a - S_b + p_a.  Disjunctive pairs are
    oriented by the current start order (earlier op first; start ties fall
    back to (job, op) order): r = S_first + p_first - S_second.
    """
    starts = s.starts
    dur = inst.durations
    out = np.empty(cs.xi, dtype=np.float64)
    out[:cs.gamma] = starts[cs.conj_a] - starts[cs.conj_b] + dur[cs.conj_a]
    sa = starts[cs.disj_a]
    sb = starts[cs.disj_b]
    fwd = sa <= sb
    out[cs.gamma:] = np.where(
        fwd, sa + dur[cs.disj_a] - sb, sb + dur[cs.disj_b] - sa
    )
    return out


def energy(
    inst: Instance, cs: ConstraintSet, s: Schedule, penalty_factor: float
) -> EnergyBreakdown:
    """E = cycle_time + K * sum of 0.5*max(0, r)^2."""
    if penalty_factor <= 0:
        raise ValueError("penalty factor must be positive")
    r = residuals(inst, cs, s)
    pos = np.maximum(r, 0.0)
    penalty = float(0.5 * np.dot(pos, pos))
    objective = float(np.max(s.starts + inst.durations) - np.min(s.starts))
    return EnergyBreakdown(
        objective=objective,
        residuals=r,
        penalty=penalty,
        penalty_factor=penalty_factor,
        multiplier_term=0.0,
        total=objective + penalty_factor * penalty,
    )


def lagrangian_energy(
    inst: Instance,
    cs: ConstraintSet,
    s: Schedule,
    duals: DualState,
    penalty_factor: float,
) -> EnergyBreakdown:
    """Augmented form: E + sum(lambda_i * r_i), quadratic penalty retained."""
    if duals.multipliers.shape != (cs.xi,):
        raise ValueError(
            f"expected {cs.xi} multipliers, got {duals.multipliers.shape}"
        )
    base = energy(inst, cs, s, penalty_factor)
    mult = float(np.dot(duals.multipliers, base.residuals))
    return replace(base, multiplier_term=mult, total=base.total + mult)


def dual_update(duals: DualState, r: np.ndarray) -> DualState:
    """Projected ascent: lambda <- max(0, lambda + step * r)."""
    if r.shape != duals.multipliers.shape:
        raise ValueError("residual vector length does not match multipliers")
    lam = np.maximum(duals.multipliers + duals.step * np.asarray(r, float), 0.0)
    return DualState(lam, duals.step)


def gradient(
    inst: Instance,
    cs: ConstraintSet,
    s: Schedule,
    penalty_factor: float,
    duals: DualState | None = None,
) -> np.ndarray:
    """d(total)/d(starts), one entry per operation in (job, op) order.

    The cycle-time part is a subgradient: +1 split over the operations
    attaining the latest completion, -1 split over those attaining the
    earliest start.  Disjunctive orientations are held fixed at their
    current direction while differentiating.
    """
    if penalty_factor <= 0:
        raise ValueError("penalty factor must be positive")
    starts = s.starts
    dur = inst.durations
    n = starts.shape[0]
    out = np.zeros(n, dtype=np.float64)

    ends = starts + dur
    amax = np.flatnonzero(ends == ends.max())
    amin = np.flatnonzero(starts == starts.min())
    out[amax] += 1.0 / amax.size
    out[amin] -= 1.0 / amin.size

    rc = starts[cs.conj_a] - starts[cs.conj_b] + dur[cs.conj_a]
    sa = starts[cs.disj_a]
    sb = starts[cs.disj_b]
    fwd = sa <= sb
    rd = np.where(fwd, sa + dur[cs.disj_a] - sb, sb + dur[cs.disj_b] - sa)
    first = np.where(fwd, cs.disj_a, cs.disj_b)
    second = np.where(fwd, cs.disj_b, cs.disj_a)

    wc = penalty_factor * np.maximum(rc, 0.0)
    wd = penalty_factor * np.maximum(rd, 0.0)
    if duals is not None:
        if duals.multipliers.shape != (cs.xi,):
            raise ValueError(
                f"expected {cs.xi} multipliers, got {duals.multipliers.shape}"
            )
        wc = wc + duals.multipliers[:cs.gamma]
        wd = wd + duals.multipliers[cs.gamma:]
    out += np.bincount(cs.conj_a, weights=wc, minlength=n)
    out -= np.bincount(cs.conj_b, weights=wc, minlength=n)
    out += np.bincount(first, weights=wd, minlength=n)
    out -= np.bincount(second, weights=wd, minlength=n)
    return out
