"""CSV tables and static SVG overlays for benchmark runs."""

from __future__ import annotations

import csv
import math
from pathlib import Path
from typing import Dict, Iterable, List, Sequence, Tuple

import numpy as np

from .bench import RunTrace
from .metrics import MetricsReport, RunResult
from .scenario import CircleSpec, Scenario

RESULT_FIELDS = (
    "scenario",
    "mode",
    "seed",
    "solved",
    "cost",
    "trans_rmse",
    "rot_rmse",
    "max_lateral_deviation",
    "n_batches",
    "n_waypoints",
)


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return "nan" if math.isnan(value) else f"{value:.6f}"
    return str(value)


def _writer(path: Path):
    fh = open(path, "w", encoding="utf-8", newline="")
    return fh, csv.writer(fh, delimiter=",", lineterminator="\n")


def write_results_csv(results: Iterable[RunResult], path) -> Path:
    """One row per seed per mode; wall-clock fields are kept out for reproducibility."""
    path = Path(path)
    fh, w = _writer(path)
    with fh:
        w.writerow(RESULT_FIELDS)
        for r in results:
            w.writerow([_fmt(getattr(r, f)) for f in RESULT_FIELDS])
    return path


def write_cost_history_csv(results: Iterable[RunResult], path) -> Path:
    path = Path(path)
    fh, w = _writer(path)
    with fh:
        w.writerow(("scenario", "mode", "seed", "time_s", "cost"))
        for r in results:
            for t, c in r.cost_history:
                w.writerow((r.scenario, r.mode, r.seed, f"{t:.6f}", f"{c:.6f}"))
    return path


def write_timing_csv(results: Iterable[RunResult], path) -> Path:
    path = Path(path)
    fh, w = _writer(path)
    with fh:
        w.writerow(("scenario", "mode", "seed", "first_solution_ms"))
        for r in results:
            w.writerow((r.scenario, r.mode, r.seed, _fmt(r.first_solution_ms)))
    return path


def summary_rows(reports: Dict[str, Dict[str, MetricsReport]]) -> List[Tuple]:
    """Rows mirroring the translation/rotation RMSE table, plus a mean row."""
    rows = []
    for k, (name, by_mode) in enumerate(reports.items(), start=1):
        lat, euc = by_mode.get("lateral"), by_mode.get("euclidean")
        rows.append(
            (
                str(k),
                name,
                lat.trans_rmse if lat else math.nan,
                euc.trans_rmse if euc else math.nan,
                lat.rot_rmse if lat else math.nan,
                euc.rot_rmse if euc else math.nan,
            )
        )
    if rows:
        cols = np.array([r[2:] for r in rows], dtype=float)
        with np.errstate(all="ignore"):
            mean = np.nanmean(cols, axis=0) if np.isfinite(cols).any() else cols[0]
        rows.append(("Mean", "", *[float(v) for v in mean]))
    return rows


SUMMARY_HEADER = (
    "exp",
    "scenario",
    "trans_rmse_lateral",
    "trans_rmse_euclidean",
    "rot_rmse_lateral",
    "rot_rmse_euclidean",
)


def write_summary_csv(reports, path) -> Path:
    path = Path(path)
    fh, w = _writer(path)
    with fh:
        w.writerow(SUMMARY_HEADER)
        for row in summary_rows(reports):
            w.writerow([_fmt(v) for v in row])
    return path


def format_summary(reports) -> str:
    lines = ["| Exp. | Scenario | Trans. RMSE lateral [m] | Trans. RMSE Euclid [m] | Rot. RMSE lateral [rad] | Rot. RMSE Euclid [rad] |"]
    lines.append("|---|---|---|---|---|---|")
    for row in summary_rows(reports):
        lines.append("| " + " | ".join([row[0], row[1]] + [f"{v:.3f}" for v in row[2:]]) + " |")
    return "\n".join(lines)


# ---------------------------------------------------------------- SVG
class _Frame:
    """Maps world coordinates into an SVG panel (y up)."""

    def __init__(self, x_range, y_range, width: float, top: float, pad: float = 20.0):
        self.x0, x1 = x_range
        self.y0, y1 = y_range
        span_x = max(x1 - self.x0, 1e-9)
        span_y = max(y1 - self.y0, 1e-9)
        self.scale = (width - 2 * pad) / span_x
        self.height = span_y * self.scale + 2 * pad
        self.pad = pad
        self.top = top
        self.y1 = y1

    def __call__(self, x: float, y: float) -> Tuple[float, float]:
        return (self.pad + (x - self.x0) * self.scale, self.top + self.pad + (self.y1 - y) * self.scale)

    def points(self, xy: Sequence[Tuple[float, float]]) -> str:
        return " ".join("%.2f,%.2f" % self(x, y) for x, y in xy)


def render_svg(trace: RunTrace, scenario: Scenario, width: float = 900.0, max_tree_edges: int = 4000) -> str:
    """Curvilinear panel on top, Euclidean panel below."""
    planner = trace.planner
    path = planner.path
    sol = trace.solution
    parts: List[str] = []

    pq = _Frame((0.0, path.p_len), (path.q_min, path.q_max), width, 0.0)
    parts.append(f'<g id="curvilinear"><rect x="0" y="0" width="{width:.0f}" height="{pq.height:.2f}" fill="white"/>')
    x0, y0 = pq(0.0, path.q_max)
    x1, y1 = pq(path.p_len, path.q_min)
    parts.append(f'<rect class="corridor" x="{x0:.2f}" y="{y0:.2f}" width="{x1 - x0:.2f}" height="{y1 - y0:.2f}" fill="none" stroke="#bbb"/>')
    parts.append(_occupancy_in_pq(planner, pq))
    edges = planner.tree_edges()[:max_tree_edges]
    parts.append('<g class="tree" stroke="#9ab" stroke-width="0.6">')
    for a, b in edges:
        (ax, ay), (bx, by) = pq(a.p, a.q), pq(b.p, b.q)
        parts.append(f'<line x1="{ax:.2f}" y1="{ay:.2f}" x2="{bx:.2f}" y2="{by:.2f}"/>')
    parts.append("</g>")
    parts.append(f'<polyline class="reference" points="{pq.points([(0.0, 0.0), (path.p_len, 0.0)])}" fill="none" stroke="magenta" stroke-width="1.5"/>')
    if sol is not None:
        pts = pq.points([(w.p, w.q) for w in sol.waypoints])
        parts.append(f'<polyline class="solution-curvilinear" points="{pts}" fill="none" stroke="red" stroke-width="2"/>')
    parts.append("</g>")

    xs = [pose.x for pose in path.poses]
    ys = [pose.y for pose in path.poses]
    m = path.q_max + 0.5
    eu = _Frame((min(xs) - m, max(xs) + m), (min(ys) - m, max(ys) + m), width, pq.height + 10.0)
    parts.append(f'<g id="euclidean"><rect x="0" y="{eu.top:.2f}" width="{width:.0f}" height="{eu.height:.2f}" fill="white"/>')
    for ob in scenario.obstacles:
        if isinstance(ob, CircleSpec):
            cx, cy = eu(*ob.center)
            parts.append(f'<circle class="obstacle" cx="{cx:.2f}" cy="{cy:.2f}" r="{ob.radius * eu.scale:.2f}" fill="#444"/>')
            parts.append(f'<circle class="inflation" cx="{cx:.2f}" cy="{cy:.2f}" r="{(ob.radius + scenario.grid.inflation_radius) * eu.scale:.2f}" fill="none" stroke="#888" stroke-dasharray="3,2"/>')
        else:
            ax, ay = eu(ob.lo[0], ob.hi[1])
            bx, by = eu(ob.hi[0], ob.lo[1])
            parts.append(f'<rect class="obstacle" x="{ax:.2f}" y="{ay:.2f}" width="{bx - ax:.2f}" height="{by - ay:.2f}" fill="#444"/>')
    parts.append('<g class="tree" stroke="#9ab" stroke-width="0.6">')
    for a, b in edges:
        (ax, ay), (bx, by) = eu(*path.pq_to_xy(a)), eu(*path.pq_to_xy(b))
        parts.append(f'<line x1="{ax:.2f}" y1="{ay:.2f}" x2="{bx:.2f}" y2="{by:.2f}"/>')
    parts.append("</g>")
    parts.append(f'<polyline class="reference" points="{eu.points(list(zip(xs, ys)))}" fill="none" stroke="magenta" stroke-width="1.5"/>')
    if sol is not None:
        parts.append(f'<polyline class="solution" points="{eu.points(sol.euclidean_waypoints)}" fill="none" stroke="red" stroke-width="2"/>')
    parts.append("</g>")

    total_h = eu.top + eu.height
    title = f"{scenario.name} {trace.result.mode} seed {trace.result.seed}"
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0f}" height="{total_h:.0f}" '
        f'viewBox="0 0 {width:.0f} {total_h:.2f}">\n<title>{title}</title>\n' + "\n".join(parts) + "\n</svg>\n"
    )


def _occupancy_in_pq(planner, frame: _Frame) -> str:
    if planner.grid is None:
        return ""
    path = planner.path
    step = planner.grid.resolution
    ps = np.arange(0.0, path.p_len, step) + step / 2
    qs = np.arange(path.q_min, path.q_max, step) + step / 2
    P, Q = np.meshgrid(ps, qs, indexing="ij")
    X, Y = path.pq_to_xy_array(P.ravel(), Q.ravel())
    hit = planner.grid.occupied_at(X, Y)
    size = step * frame.scale
    out = ['<g class="obstacle" fill="#444">']
    for p, q in zip(P.ravel()[hit], Q.ravel()[hit]):
        x, y = frame(p - step / 2, q + step / 2)
        out.append(f'<rect x="{x:.2f}" y="{y:.2f}" width="{size:.2f}" height="{size:.2f}"/>')
    out.append("</g>")
    return "\n".join(out)


def write_svg(trace: RunTrace, scenario: Scenario, path) -> Path:
    path = Path(path)
    path.write_text(render_svg(trace, scenario), encoding="utf-8")
    return path


def emit_outputs(out_dir, scenario: Scenario, traces: Sequence[RunTrace], svg: bool = True) -> Dict[str, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    results = [t.result for t in traces]
    files = {
        "results": write_results_csv(results, out / f"{scenario.name}_results.csv"),
        "cost_history": write_cost_history_csv(results, out / f"{scenario.name}_cost_vs_time.csv"),
        "timing": write_timing_csv(results, out / f"{scenario.name}_timing.csv"),
    }
    if svg:
        for t in traces:
            key = f"svg_{t.result.mode}_{t.result.seed}"
            files[key] = write_svg(t, scenario, out / f"{scenario.name}_{t.result.mode}_seed{t.result.seed}.svg")
    return files
