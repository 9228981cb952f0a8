import csv
import json
import math
import re

import numpy as np
import pytest

from lateral_bitstar.harness import cli
from lateral_bitstar.harness.bench import load_suite, run_benchmark, run_single
from lateral_bitstar.harness.metrics import CoverageError, compute_rmse, deviation_profile
from lateral_bitstar.harness.outputs import emit_outputs, render_svg, summary_rows
from lateral_bitstar.harness.scenario import ScenarioError, load_scenario, parse_scenario
from lateral_bitstar.harness.suites import write_shipped
from lateral_bitstar.reference_path import build_reference_path

MINIMAL = {
    "name": "mini",
    "poses": [[0, 0, 0], [6, 0, 0]],
    "grid": {"origin": [-1, -3], "width": 80, "height": 60},
}


def _mini(**extra):
    doc = dict(MINIMAL)
    doc.update(extra)
    return json.dumps(doc)


# ------------------------------------------------------------------ scenario
def test_minimal_scenario_defaults():
    sc = parse_scenario(_mini())
    assert sc.yaw_weight == 0.1 and sc.planner.alpha == 0.5 and sc.metric_segment_length == 15.0
    assert sc.grid.inflation_radius == 0.3 and sc.obstacles == []


def test_negative_alpha_names_field():
    with pytest.raises(ScenarioError, match="alpha"):
        parse_scenario(_mini(planner={"alpha": -0.5}))


def test_unknown_field_rejected():
    with pytest.raises(ScenarioError, match="colour"):
        parse_scenario(_mini(colour="red"))


def test_parse_error_has_line_info(tmp_path):
    f = tmp_path / "bad.json"
    f.write_text('{\n  "name": "x",\n  "poses": [,]\n}\n')
    with pytest.raises(ScenarioError, match=r"bad\.json:3:\d+: parse error"):
        load_scenario(f)


def test_obstacle_outside_grid_warns():
    sc = parse_scenario(_mini(obstacles=[{"type": "circle", "center": [50, 50], "radius": 1}]))
    assert len(sc.warnings) == 1


def test_round_trip(shipped):
    sc = load_scenario(shipped / "lemniscate.json")
    assert parse_scenario(sc.to_json()) == sc


def test_shipped_files_match_generators(shipped, tmp_path):
    for path in write_shipped(tmp_path):
        rel = path.relative_to(tmp_path)
        assert path.read_text() == (shipped / rel).read_text(), rel


def test_suite_layout(shipped):
    suite = load_suite(shipped / "suite")
    assert len(suite) == 10
    for sc in suite:
        path = sc.reference_path()
        assert path.p_len == pytest.approx(15.0)
        assert 1 <= len(sc.obstacles) <= 3
        for ob in sc.obstacles:
            assert 0.4 <= 2 * ob.radius <= 1.8
            assert abs(ob.center[1]) < ob.radius  # every disc intersects the path


# ------------------------------------------------------------------ metrics
def test_rmse_identity():
    path = build_reference_path([(0, 0, 0), (15, 0, 0)])
    assert compute_rmse([(0, 0), (15, 0)], path) == (0.0, 0.0)


def test_rmse_constant_offset():
    path = build_reference_path([(0, 0, 0), (15, 0, 0)])
    t, r = compute_rmse([(0, 0.1), (15, 0.1)], path)
    assert t == pytest.approx(0.1, abs=1e-12) and r == pytest.approx(0.0, abs=1e-12)


def _arc_bypass(R=2.0, depth=0.4, xc=7.5, n=400):
    half = math.sqrt(R * R - (R - depth) ** 2)
    xs = np.linspace(xc - half, xc + half, n)
    ys = np.sqrt(R * R - (xs - xc) ** 2) - (R - depth)
    return [(0.0, 0.0)] + list(zip(xs, ys)) + [(15.0, 0.0)], half


def test_rmse_arc_bypass_matches_dense_integration():
    path = build_reference_path([(x, 0.0, 0.0) for x in np.arange(0, 15.01, 0.5)])
    poly, half = _arc_bypass()
    t, r = compute_rmse(poly, path)
    # oracle: arc-length integration of the exact circle profile at 1e6 points
    R, depth, xc = 2.0, 0.4, 7.5
    th = np.linspace(-math.asin(half / R), math.asin(half / R), 1_000_001)
    q = R * np.cos(th) - (R - depth)
    arc = R * (th[-1] - th[0])
    total = (15.0 - 2 * half) + arc
    trans = math.sqrt(np.trapezoid(q * q, dx=R * (th[1] - th[0])) / total)
    rot = math.sqrt(np.trapezoid(th * th, dx=R * (th[1] - th[0])) / total)
    assert t == pytest.approx(trans, rel=5e-3)
    assert r == pytest.approx(rot, rel=2e-2)


def test_rmse_on_reference_itself_is_zero():
    poses = [(5 * math.cos(t), 5 * math.sin(t), t + math.pi / 2) for t in np.linspace(0, 2, 80)]
    path = build_reference_path(poses)
    xy = [(p[0], p[1]) for p in poses]
    t, _ = compute_rmse(xy, path, (1.0, 8.0))
    assert t <= 1e-9


def test_coverage_error():
    path = build_reference_path([(0, 0, 0), (15, 0, 0)])
    with pytest.raises(CoverageError):
        compute_rmse([(0, 0), (5, 0)], path, (0.0, 15.0))


def test_max_lateral_deviation():
    path = build_reference_path([(x, 0.0, 0.0) for x in np.arange(0, 15.01, 0.5)])
    poly, _ = _arc_bypass()
    assert deviation_profile(poly, path).max_lateral_deviation == pytest.approx(0.4, abs=1e-3)


# ------------------------------------------------------------------ bench / outputs
@pytest.fixture(scope="module")
def small_run(shipped):
    sc = load_scenario(shipped / "suite" / "straight_01.json")
    traces = []
    reports = {m: run_benchmark(sc, m, n_seeds=2, max_batches=3, traces=traces) for m in ("lateral", "euclidean")}
    return sc, traces, reports


def test_emit_outputs(small_run, tmp_path):
    sc, traces, _ = small_run
    files = emit_outputs(tmp_path, sc, traces)
    with open(files["results"], encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0][:3] == ["scenario", "mode", "seed"]
    assert len(rows) - 1 == 2 * 2
    for key, path in files.items():
        if key.startswith("svg"):
            text = path.read_text()
            assert len(re.findall(r'<polyline class="solution"', text)) == 1


def test_results_csv_deterministic(shipped, tmp_path):
    sc = load_scenario(shipped / "suite" / "straight_02.json")
    out = []
    for k in range(2):
        traces = []
        run_benchmark(sc, "lateral", n_seeds=1, max_batches=3, traces=traces)
        out.append(emit_outputs(tmp_path / str(k), sc, traces, svg=False)["results"].read_bytes())
    assert out[0] == out[1]


def test_euclidean_mode_alpha_zero(small_run):
    _, traces, _ = small_run
    euc = [t for t in traces if t.result.mode == "euclidean"]
    assert euc and all(t.planner.cfg.alpha == 0.0 for t in euc)


def test_summary_has_mean_row(small_run):
    sc, _, reports = small_run
    rows = summary_rows({sc.name: reports})
    assert rows[-1][0] == "Mean" and len(rows) == 2


def test_max_deviation_within_corridor(small_run):
    _, traces, _ = small_run
    for t in traces:
        assert t.result.max_lateral_deviation <= t.planner.path.q_max


def test_unsolved_seed_reported(tmp_path):
    doc = _mini(obstacles=[{"type": "box", "lo": [2.8, -3], "hi": [3.2, 3]}], planner={"max_batches": 2, "seeds": [0]})
    f = tmp_path / "blocked.json"
    f.write_text(doc)
    trace = run_single(load_scenario(f), "lateral", 0)
    assert not trace.result.solved and math.isnan(trace.result.trans_rmse)
    assert cli.main(["plan", str(f), "--mode", "lateral", "--out", str(tmp_path / "o")]) == cli.EXIT_UNSOLVED
    svg = render_svg(trace, load_scenario(f))
    assert 'class="solution"' not in svg


# ------------------------------------------------------------------ cli
def test_cli_plan_and_env_override(shipped, tmp_path, monkeypatch):
    monkeypatch.setenv(cli.OUT_ENV, str(tmp_path / "env"))
    rc = cli.main(["plan", str(shipped / "straight_free.json"), "--seeds", "1", "--max-batches", "2", "--out", str(tmp_path / "arg")])
    assert rc == cli.EXIT_OK
    assert (tmp_path / "env" / "straight_free_results.csv").exists()
    assert not (tmp_path / "arg").exists()


def test_cli_bench(shipped, tmp_path, capsys):
    suite = tmp_path / "suite"
    suite.mkdir()
    for name in ("straight_01.json", "straight_02.json"):
        (suite / name).write_text((shipped / "suite" / name).read_text())
    rc = cli.main(["bench", str(suite), "--seeds", "1", "--max-batches", "2", "--out", str(tmp_path / "o")])
    assert rc == cli.EXIT_OK
    text = capsys.readouterr().out
    assert "Mean" in text and "Trans. RMSE" in text
    with open(tmp_path / "o" / "bench_summary.csv", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    assert rows[0][2:] == ["trans_rmse_lateral", "trans_rmse_euclidean", "rot_rmse_lateral", "rot_rmse_euclidean"]
    assert len(rows) == 1 + 2 + 1


def test_cli_errors(tmp_path, capsys):
    assert cli.main(["plan", str(tmp_path / "missing.json")]) == cli.EXIT_ERROR
    bad = tmp_path / "bad.json"
    bad.write_text(_mini(planner={"alpha": -1}))
    assert cli.main(["plan", str(bad)]) == cli.EXIT_ERROR
    assert "alpha" in capsys.readouterr().err
