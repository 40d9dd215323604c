"""Command line frontend: solve, validate, bench and gantt subcommands.

Exit codes: 0 success, 1 domain failure (infeasible schedule, repair
non-convergence), 2 usage or parse errors.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import bench as bench_mod
from .dispatch import RULES, DispatchRule, list_schedule
from .gantt import render_gantt
from .model import (
    Instance,
    ParseError,
    Schedule,
    build_constraints,
    cycle_time,
    load_instance,
    validate,
)
from .repair import RepairError
from .solver import LRRNN, RNN, SolverConfig, solve

SCHEDULE_HEADER = "job,op,machine,start,duration"


def schedule_to_csv(inst: Instance, s: Schedule) -> str:
    lines = [SCHEDULE_HEADER]
    for i, j, machine, duration in inst.operations():
        start = s[(i, j)]
        start_txt = str(int(start)) if float(start).is_integer() else repr(start)
        lines.append(f"{i},{j},{machine},{start_txt},{duration}")
    return "\n".join(lines) + "\n"


def schedule_from_csv(inst: Instance, text: str) -> Schedule:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0].strip() != SCHEDULE_HEADER:
        raise ParseError(f"schedule CSV must start with header {SCHEDULE_HEADER!r}")
    starts: dict[tuple[int, int], float] = {}
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != 5:
            raise ParseError(f"line {lineno}: expected 5 columns, got {len(parts)}")
        try:
            i, j, machine = int(parts[0]), int(parts[1]), int(parts[2])
            start, duration = float(parts[3]), int(parts[4])
        except ValueError as exc:
            raise ParseError(f"line {lineno}: {exc}") from None
        key = (i, j)
        if key not in inst.op_index:
            raise ParseError(f"line {lineno}: unknown operation {key}")
        expected = inst.jobs[i].ops[j]
        if (machine, duration) != expected:
            raise ParseError(
                f"line {lineno}: operation {key} is {expected} in the instance, "
                f"not ({machine}, {duration})"
            )
        starts[key] = start
    if len(starts) != inst.total_ops:
        raise ParseError(
            f"schedule has {len(starts)} operations, instance has {inst.total_ops}"
        )
    return Schedule(inst, starts)


def _add_solver_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--variant", choices=[RNN, LRRNN], default=RNN)
    p.add_argument("--mu", type=float, default=None, help="learning rate")
    p.add_argument("--K", type=float, default=None, dest="penalty_factor",
                   help="penalty factor")
    p.add_argument("--threshold", type=float, default=None,
                   help="stall threshold on energy deltas")
    p.add_argument("--pi", type=float, default=0.1, dest="perturb_fraction",
                   help="perturbation fraction in [0, 1]")
    p.add_argument("--eta", type=float, default=0.1, dest="dual_step",
                   help="multiplier ascent step (lrrnn)")
    p.add_argument("--max-iters", type=int, default=200_000)
    p.add_argument("--time-limit-s", type=float, default=None)
    p.add_argument("--seed", type=int, default=0)


def _config(args: argparse.Namespace, seed: int | None = None) -> SolverConfig:
    return SolverConfig(
        mu=args.mu,
        penalty_factor=args.penalty_factor,
        stall_threshold=args.threshold,
        perturb_fraction=args.perturb_fraction,
        dual_step=args.dual_step,
        max_iters=args.max_iters,
        time_limit_s=args.time_limit_s,
        seed=args.seed if seed is None else seed,
        variant=args.variant,
    )


def cmd_solve(args: argparse.Namespace) -> int:
    inst = load_instance(args.instance)
    cfg = _config(args)
    initial = None
    if args.init != "cdrp":
        initial = list_schedule(inst, DispatchRule(args.init), seed=args.seed)
    result = solve(inst, cfg, initial=initial, collect_trace=args.trace is not None)
    print(f"ct_best {result.best_tau:g}")
    print(f"iterations {result.iterations}")
    print(f"elapsed_s {result.elapsed_s:.2f}")
    if args.out:
        Path(args.out).write_text(
            schedule_to_csv(inst, result.best_schedule), encoding="utf-8"
        )
    if args.trace:
        lines = ["iteration,energy"]
        lines += [f"{i},{e!r}" for i, e in result.energy_trace]
        Path(args.trace).write_text("\n".join(lines) + "\n", encoding="utf-8")
    return 0


def cmd_validate(args: argparse.Namespace) -> int:
    inst = load_instance(args.instance)
    s = schedule_from_csv(inst, Path(args.schedule).read_text(encoding="utf-8"))
    report = validate(inst, build_constraints(inst), s)
    if report.feasible:
        print(f"feasible, tau={cycle_time(inst, s):g}")
        return 0
    print(report.describe())
    return 1


def cmd_bench(args: argparse.Namespace) -> int:
    bounds = bench_mod.load_bounds(args.lb)
    lower = {k.lower(): v for k, v in bounds.items()}
    instances = []
    for path in sorted(Path(args.dir).iterdir()):
        if not path.is_file():
            continue
        try:
            inst = load_instance(path)
        except (ParseError, UnicodeDecodeError) as exc:
            print(f"warning: skipping {path.name}: {exc}", file=sys.stderr)
            continue
        lb = lower.get(inst.name.lower())
        if lb is None:
            print(
                f"warning: no lower bound for {inst.name}; deviation left empty",
                file=sys.stderr,
            )
        instances.append((inst.name, inst, lb))
    seeds = [int(x) for x in args.seeds.split(",") if x.strip()]
    rows = bench_mod.run_suite(instances, _config(args), seeds, jobs=args.jobs)
    if args.out:
        bench_mod.write_report(rows, args.out)
    for row in sorted(bench_mod.best_rows(rows), key=lambda r: r.instance):
        mre = "" if row.mre_pct is None else f" mre={row.mre_pct:.1f}%"
        print(f"{row.instance} best={row.ct_best:g} seed={row.seed}{mre}")
    return 0


def cmd_gantt(args: argparse.Namespace) -> int:
    inst = load_instance(args.instance)
    s = schedule_from_csv(inst, Path(args.schedule).read_text(encoding="utf-8"))
    try:
        rendering = render_gantt(inst, s, fmt=args.format)
    except ValueError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    if args.out:
        Path(args.out).write_text(rendering, encoding="utf-8")
    else:
        sys.stdout.write(rendering)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cjss", description="Cyclic job shop scheduling toolkit"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="minimise the cycle time of one instance")
    p.add_argument("--instance", required=True)
    _add_solver_flags(p)
    p.add_argument("--init", choices=[*RULES, "cdrp"], default="cdrp")
    p.add_argument("--trace", default=None, help="write energy trace CSV here")
    p.add_argument("--out", default=None, help="write best schedule CSV here")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("validate", help="check a schedule CSV against an instance")
    p.add_argument("--instance", required=True)
    p.add_argument("--schedule", required=True)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("bench", help="run a directory of instances")
    p.add_argument("--dir", required=True)
    p.add_argument("--lb", default=None, help="bound manifest (default: bundled)")
    p.add_argument("--seeds", default="1")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", default=None, help="write report CSV here")
    _add_solver_flags(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("gantt", help="render a schedule CSV")
    p.add_argument("--instance", required=True)
    p.add_argument("--schedule", required=True)
    p.add_argument("--format", choices=["svg", "text"], default="svg")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_gantt)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except RepairError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
