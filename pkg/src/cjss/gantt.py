"""Machine-timeline rendering of feasible schedules, as SVG or plain text.

Output is fully deterministic (fixed palette, fixed float formatting), so
identical inputs produce byte-identical renderings.
"""
from __future__ import annotations

from .model import Instance, Schedule, build_constraints, cycle_time, validate

_PALETTE = (
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f",
    "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac",
)

_LANE_H = 28
_MARGIN_LEFT = 46
_MARGIN_TOP = 34
_CHART_W = 860


def _fmt(x: float) -> str:
    return f"{x:.2f}".rstrip("0").rstrip(".")


def render_gantt(inst: Instance, s: Schedule, fmt: str = "svg") -> str:
    """Render one lane per machine with a labelled box per operation."""
    report = validate(inst, build_constraints(inst), s)
    if not report.feasible:
        raise ValueError(f"cannot render an infeasible schedule:\n{report.describe()}")
    if fmt == "svg":
        return _render_svg(inst, s)
    if fmt == "text":
        return _render_text(inst, s)
    raise ValueError(f"unknown format {fmt!r}; choose 'svg' or 'text'")


def _lanes(inst: Instance, s: Schedule):
    lanes: list[list[tuple[float, float, int, int]]] = [
        [] for _ in range(inst.machine_count)
    ]
    for i, j, machine, duration in inst.operations():
        start = s[(i, j)]
        lanes[machine].append((start, start + duration, i, j))
    for lane in lanes:
        lane.sort()
    return lanes


def _render_svg(inst: Instance, s: Schedule) -> str:
    smin = min(start for _, start in s.items())
    tau = cycle_time(inst, s)
    scale = _CHART_W / max(tau, 1.0)
    height = _MARGIN_TOP + _LANE_H * inst.machine_count + 12
    width = _MARGIN_LEFT + _CHART_W + 12
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{width}" height="{height}" '
        f'font-family="monospace" font-size="11">',
        f'<text x="{_MARGIN_LEFT}" y="16">{inst.name} '
        f"cycle time {_fmt(tau)}</text>",
    ]
    for m, lane in enumerate(_lanes(inst, s)):
        y = _MARGIN_TOP + m * _LANE_H
        out.append(f'<text x="4" y="{y + 18}">M{m}</text>')
        out.append(
            f'<line x1="{_MARGIN_LEFT}" y1="{y + _LANE_H - 2}" '
            f'x2="{_MARGIN_LEFT + _CHART_W}" y2="{y + _LANE_H - 2}" '
            f'stroke="#ccc" stroke-width="1"/>'
        )
        for start, end, i, j in lane:
            x = _MARGIN_LEFT + (start - smin) * scale
            w = (end - start) * scale
            colour = _PALETTE[i % len(_PALETTE)]
            out.append(
                f'<rect x="{_fmt(x)}" y="{y + 3}" width="{_fmt(w)}" '
                f'height="{_LANE_H - 8}" fill="{colour}" stroke="#333" '
                f'stroke-width="0.5"/>'
            )
            out.append(
                f'<text x="{_fmt(x + 2)}" y="{y + 17}" fill="#000">'
                f"{i}.{j}</text>"
            )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _render_text(inst: Instance, s: Schedule, width: int = 100) -> str:
    """One row per machine; blocks carry the job index, dots are idle time."""
    smin = min(start for _, start in s.items())
    tau = max(cycle_time(inst, s), 1.0)
    unit = tau / width
    out = [f"{inst.name}  cycle time {_fmt(tau)}"]
    for m, lane in enumerate(_lanes(inst, s)):
        row = ["."] * width
        for start, end, i, j in lane:
            lo = int(round((start - smin) / unit))
            hi = max(int(round((end - smin) / unit)), lo + 1)
            for k in range(lo, min(hi, width)):
                row[k] = str(i % 10)
        out.append(f"M{m} |" + "".join(row) + "|")
    return "\n".join(out) + "\n"
