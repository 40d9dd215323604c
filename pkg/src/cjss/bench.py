"""Benchmark harness: run solver configurations over instance suites.

Emits one CSV row per (instance, seed) with the best cycle time found, the
iteration it appeared at and the percentage deviation from the known bound.
A bound manifest for the FT/LA/ABZ/ORB families ships with the package.
"""
from __future__ import annotations

import csv
import io
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path

from .model import Instance
from .solver import SolveResult, SolverConfig, solve

log = logging.getLogger(__name__)

CSV_HEADER = "instance,variant,seed,ct_lb,ct_best,it_best,elapsed_s,mre_pct"


@dataclass(frozen=True)
class BenchmarkRow:
    instance: str
    variant: str
    seed: int
    ct_lb: float | None
    ct_best: float
    it_best: int
    elapsed_s: float
    mre_pct: float | None


def deviation(best: float, optimal: float) -> float:
    """Percentage deviation of a solution value from the known optimum."""
    if optimal <= 0:
        raise ValueError("optimal value must be positive")
    return 100.0 * (best - optimal) / optimal


def load_bounds(path: str | Path | None = None) -> dict[str, float]:
    """Read a ``name value`` manifest; None loads the bundled one."""
    if path is None:
        text = (
            resources.files("cjss.data").joinpath("ct_lb.txt").read_text("utf-8")
        )
    else:
        text = Path(path).read_text(encoding="utf-8")
    bounds: dict[str, float] = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        name, value = line.split()
        bounds[name] = float(value)
    return bounds


def _row(name: str, lb: float | None, res: SolveResult) -> BenchmarkRow:
    return BenchmarkRow(
        instance=name,
        variant=res.variant.upper(),
        seed=res.seed,
        ct_lb=lb,
        ct_best=res.best_tau,
        it_best=res.best_iteration,
        elapsed_s=res.elapsed_s,
        mre_pct=None if lb is None else deviation(res.best_tau, lb),
    )


def _solve_one(args) -> BenchmarkRow:
    name, inst, lb, cfg, seed = args
    res = solve(inst, replace(cfg, seed=seed))
    return _row(name, lb, res)


def run_suite(
    instances: list[tuple[str, Instance, float | None]],
    cfg: SolverConfig,
    seeds: list[int],
    jobs: int = 1,
) -> list[BenchmarkRow]:
    """One row per (instance, seed), in input order.

    A failing instance is logged and skipped; the rest of the suite still
    runs.  With jobs > 1, (instance, seed) pairs run in worker processes;
    ordering and results are identical either way.
    """
    tasks = [
        (name, inst, lb, cfg, seed)
        for name, inst, lb in instances
        for seed in seeds
    ]
    rows: list[BenchmarkRow] = []
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(_solve_one, task) for task in tasks]
            for task, future in zip(tasks, futures):
                try:
                    rows.append(future.result())
                except Exception:
                    log.warning(
                        "instance %s (seed %s) failed",
                        task[0], task[4], exc_info=True,
                    )
        return rows
    for task in tasks:
        try:
            rows.append(_solve_one(task))
        except Exception:
            log.warning(
                "instance %s (seed %s) failed", task[0], task[4], exc_info=True
            )
    return rows


def best_rows(rows: list[BenchmarkRow]) -> list[BenchmarkRow]:
    """Best-of-seeds summary, one row per (instance, variant)."""
    best: dict[tuple[str, str], BenchmarkRow] = {}
    for row in rows:
        key = (row.instance, row.variant)
        if key not in best or row.ct_best < best[key].ct_best:
            best[key] = row
    return list(best.values())


def _format_row(row: BenchmarkRow) -> str:
    def num(x: float | None) -> str:
        if x is None:
            return ""
        return str(int(x)) if float(x).is_integer() else repr(float(x))

    mre = "" if row.mre_pct is None else f"{row.mre_pct:.1f}"
    return (
        f"{row.instance},{row.variant},{row.seed},{num(row.ct_lb)},"
        f"{num(row.ct_best)},{row.it_best},{row.elapsed_s:.2f},{mre}"
    )


def write_report(rows: list[BenchmarkRow], destination: str | Path) -> None:
    """CSV with a fixed header, LF endings, %.1f deviations, %.2f seconds."""
    text = "\n".join([CSV_HEADER, *(_format_row(r) for r in rows)]) + "\n"
    try:
        Path(destination).write_text(text, encoding="utf-8", newline="\n")
    except OSError as exc:
        raise OSError(f"cannot write report to {destination}: {exc}") from exc


def read_report(source: str | Path) -> list[BenchmarkRow]:
    """Inverse of write_report."""
    text = Path(source).read_text(encoding="utf-8")
    reader = csv.DictReader(io.StringIO(text))
    rows = []
    for rec in reader:
        rows.append(
            BenchmarkRow(
                instance=rec["instance"],
                variant=rec["variant"],
                seed=int(rec["seed"]),
                ct_lb=float(rec["ct_lb"]) if rec["ct_lb"] else None,
                ct_best=float(rec["ct_best"]),
                it_best=int(rec["it_best"]),
                elapsed_s=float(rec["elapsed_s"]),
                mre_pct=float(rec["mre_pct"]) if rec["mre_pct"] else None,
            )
        )
    return rows
