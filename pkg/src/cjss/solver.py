"""Gradient-descent solver over the penalised energy, with perturbation escape.

The state is the raw start-time vector, updated by fixed-step descent and
clamped at zero.  The descent state itself is allowed to stay infeasible; a
repaired and compacted copy of every iterate is what competes for the
incumbent, so the returned schedule is always feasible.  When the energy
plateaus the state is jittered, and the penalty factor doubles so later
stretches weigh violations more heavily.  The relaxed variant additionally
raises per-constraint multipliers on every stall.
"""
from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from ._core import get_backend, problem_arrays
from .dispatch import competitive_dispatch
from .energy import DualState, gradient
from .model import (
    ConstraintSet,
    Instance,
    Schedule,
    build_constraints,
    cycle_time,
    validate,
)
from .repair import RepairError

RNN = "rnn"
LRRNN = "lrrnn"

# Instance-scaled defaults; any SolverConfig field set to None resolves here.
DEFAULT_PENALTY_MULT = 10.0    # K = mult * max duration
DEFAULT_MU_FRACTION = 1e-3     # mu = fraction * mean duration
DEFAULT_STALL_FRACTION = 1e-4  # threshold = fraction * initial energy
PENALTY_CAP = 1e6              # K stops doubling here


@dataclass(frozen=True)
class SolverConfig:
    """Knobs of one solver run; None picks the instance-scaled default."""

    mu: float | None = None
    penalty_factor: float | None = None
    stall_threshold: float | None = None
    perturb_fraction: float = 0.1
    dual_step: float = 0.1
    max_iters: int = 200_000
    time_limit_s: float | None = None
    seed: int = 0
    variant: str = RNN

    def __post_init__(self) -> None:
        if self.mu is not None and self.mu <= 0:
            raise ValueError("mu must be positive")
        if self.penalty_factor is not None and self.penalty_factor <= 0:
            raise ValueError("penalty factor must be positive")
        if self.stall_threshold is not None and self.stall_threshold <= 0:
            raise ValueError("stall threshold must be positive")
        if not 0.0 <= self.perturb_fraction <= 1.0:
            raise ValueError("perturb fraction must lie in [0, 1]")
        if self.dual_step <= 0:
            raise ValueError("dual step must be positive")
        if self.max_iters < 0:
            raise ValueError("max_iters must be >= 0")
        if self.time_limit_s is not None and self.time_limit_s <= 0:
            raise ValueError("time limit must be positive")
        if self.variant not in (RNN, LRRNN):
            raise ValueError(f"variant must be {RNN!r} or {LRRNN!r}")


@dataclass
class SolveResult:
    best_schedule: Schedule
    best_tau: float
    iterations: int
    best_iteration: int
    elapsed_s: float
    energy_trace: list[tuple[int, float]] | None
    perturbations: int
    seed: int
    variant: str


def resolve_penalty_factor(inst: Instance, cfg: SolverConfig) -> float:
    if cfg.penalty_factor is not None:
        return cfg.penalty_factor
    return DEFAULT_PENALTY_MULT * inst.max_duration


def resolve_mu(inst: Instance, cfg: SolverConfig) -> float:
    if cfg.mu is not None:
        return cfg.mu
    return DEFAULT_MU_FRACTION * inst.mean_duration


def detect_stall(energies, threshold: float) -> bool:
    """True when the last two energy deltas are both below threshold.

    Deltas are compared in absolute value: a steadily descending run is
    evolving, and so is a diverging one; only a flat stretch counts.
    """
    if len(energies) < 3:
        return False
    e0, e1, e2 = energies[-3], energies[-2], energies[-1]
    return abs(e1 - e0) < threshold and abs(e2 - e1) < threshold


def _perturb_starts(
    starts: np.ndarray,
    dur: np.ndarray,
    fraction: float,
    rng: np.random.Generator,
) -> np.ndarray:
    """Jitter each start by a duration-scaled, uniformly damped offset."""
    jitter = rng.uniform(-fraction * dur, fraction * dur)
    damp = rng.uniform(0.0, 1.0, starts.shape[0])
    return np.maximum(starts + jitter * damp, 0.0)


def perturb(
    inst: Instance, s: Schedule, fraction: float, rng: np.random.Generator
) -> Schedule:
    if not 0.0 <= fraction <= 1.0:
        raise ValueError("perturb fraction must lie in [0, 1]")
    return Schedule(inst, _perturb_starts(s.starts, inst.durations, fraction, rng))


def descent_step(
    inst: Instance,
    cs: ConstraintSet,
    s: Schedule,
    cfg: SolverConfig,
    duals: DualState | None = None,
) -> Schedule:
    """One clamped update S <- max(0, S - mu * dE/dS)."""
    K = resolve_penalty_factor(inst, cfg)
    mu = resolve_mu(inst, cfg)
    g = gradient(inst, cs, s, K, duals if cfg.variant == LRRNN else None)
    return Schedule(inst, np.maximum(s.starts - mu * g, 0.0))


def solve(
    inst: Instance,
    cfg: SolverConfig,
    initial: Schedule | None = None,
    collect_trace: bool = False,
    backend: str | None = None,
) -> SolveResult:
    """Run the descent loop from a dispatch-rule schedule.

    The incumbent starts as the initial schedule and is replaced whenever the
    repaired+compacted copy of an iterate has a smaller cycle time, so the
    result is feasible even at max_iters=0.
    """
    t_start = time.perf_counter()
    cs = build_constraints(inst)
    pa = problem_arrays(inst, cs)
    be = get_backend(backend)

    rng = np.random.default_rng(cfg.seed)
    init_seed = int(rng.integers(1 << 31))
    if initial is None:
        initial = competitive_dispatch(inst, init_seed)
    else:
        report = validate(inst, cs, initial)
        if not report.feasible:
            raise ValueError(
                f"initial schedule must be feasible:\n{report.describe()}"
            )

    penalty_factor = resolve_penalty_factor(inst, cfg)
    mu = resolve_mu(inst, cfg)
    lam = np.zeros(cs.xi, dtype=np.float64) if cfg.variant == LRRNN else None

    state = initial.starts.copy()
    obj0, pen0 = be.energy_terms(
        state, pa.dur, pa.conj_a, pa.conj_b, pa.disj_a, pa.disj_b
    )
    initial_energy = obj0 + penalty_factor * pen0
    threshold = cfg.stall_threshold
    if threshold is None:
        threshold = DEFAULT_STALL_FRACTION * max(initial_energy, 1.0)

    best = state.copy()
    best_tau = cycle_time(inst, initial)
    best_iteration = 0
    iterations = 0
    perturbations = 0

    trace: list[tuple[int, float]] | None = None
    stride = 1
    if collect_trace:
        trace = [(0, initial_energy)]
        stride = max(1, cfg.max_iters // 1024)

    repaired = np.empty(inst.total_ops, dtype=np.float64)
    r_buf = np.empty(cs.xi, dtype=np.float64)
    max_rounds = 10 * inst.total_ops
    deadline = None
    if cfg.time_limit_s is not None:
        deadline = t_start + cfg.time_limit_s

    e_prev2: float | None = None
    e_prev: float | None = None
    k_now = penalty_factor

    for it in range(1, cfg.max_iters + 1):
        e_now, tau = be.iterate(
            state, pa.dur, pa.conj_a, pa.conj_b, pa.disj_a, pa.disj_b,
            pa.op_job, pa.op_machine, pa.job_ptr, pa.machine_ptr,
            pa.machine_ops, k_now, mu, lam, max_rounds, repaired,
        )
        iterations = it
        if tau < 0:
            raise RepairError(f"repair failed to settle at iteration {it}")
        if tau < best_tau:
            best_tau = tau
            best[:] = repaired
            best_iteration = it
        if trace is not None and it % stride == 0:
            trace.append((it, e_now))
        if (
            e_prev2 is not None
            and abs(e_prev - e_prev2) < threshold
            and abs(e_now - e_prev) < threshold
        ):
            if lam is not None:
                be.residuals_into(
                    state, pa.dur, pa.conj_a, pa.conj_b, pa.disj_a, pa.disj_b,
                    r_buf,
                )
                np.maximum(lam + cfg.dual_step * r_buf, 0.0, out=lam)
            state = _perturb_starts(state, pa.dur, cfg.perturb_fraction, rng)
            perturbations += 1
            k_now = min(k_now * 2.0, PENALTY_CAP)
            e_prev2 = e_prev = None
        else:
            e_prev2, e_prev = e_prev, e_now
        if deadline is not None and time.perf_counter() >= deadline:
            break

    best_schedule = Schedule(inst, best)
    report = validate(inst, cs, best_schedule)
    if not report.feasible:
        raise RepairError(
            f"incumbent schedule is infeasible, repair is broken:\n{report.describe()}"
        )
    return SolveResult(
        best_schedule=best_schedule,
        best_tau=best_tau,
        iterations=iterations,
        best_iteration=best_iteration,
        elapsed_s=time.perf_counter() - t_start,
        energy_trace=trace,
        perturbations=perturbations,
        seed=cfg.seed,
        variant=cfg.variant,
    )
