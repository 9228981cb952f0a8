"""Command-line entry point: ``lateral-bitstar plan|bench|generate-suite``."""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path
from typing import List, Optional

from .bench import MODES, load_suite, run_benchmark
from .outputs import emit_outputs, format_summary, write_results_csv, write_summary_csv
from .scenario import ScenarioError, load_scenario

OUT_ENV = "LATERAL_BITSTAR_OUT"

EXIT_OK, EXIT_ERROR, EXIT_UNSOLVED = 0, 1, 2

log = logging.getLogger("lateral_bitstar")


def _out_dir(arg: Optional[str]) -> Path:
    # environment wins so batch jobs can redirect output without editing commands
    return Path(os.environ.get(OUT_ENV) or arg or "out")


def _modes(mode: str) -> List[str]:
    return list(MODES) if mode == "both" else [mode]


def _cmd_plan(args) -> int:
    scenario = load_scenario(args.scenario)
    for w in scenario.warnings:
        log.warning("%s: %s", args.scenario, w)
    out = _out_dir(args.out)
    traces = []
    for mode in _modes(args.mode):
        report = run_benchmark(scenario, mode, args.seeds, args.max_batches, args.budget_ms, traces=traces)
        print(
            f"{scenario.name} [{mode}] solved {sum(r.solved for r in report.runs)}/{len(report.runs)}"
            f"  cost {report.mean('cost'):.3f}  trans_rmse {report.trans_rmse:.4f} m"
            f"  rot_rmse {report.rot_rmse:.4f} rad  max_dev {report.max_lateral_deviation:.3f} m"
        )
    files = emit_outputs(out, scenario, traces, svg=not args.no_svg)
    if args.pgm:
        scenario.occupancy_grid().to_pgm(out / f"{scenario.name}_occupancy.pgm")
    print(f"wrote {len(files)} file(s) to {out}")
    return EXIT_OK if all(t.result.solved for t in traces) else EXIT_UNSOLVED


def _cmd_bench(args) -> int:
    scenarios = load_suite(args.suite)
    out = _out_dir(args.out)
    out.mkdir(parents=True, exist_ok=True)
    reports, results = {}, []
    for sc in scenarios:
        reports[sc.name] = {}
        for mode in _modes(args.mode):
            rep = run_benchmark(sc, mode, args.seeds, args.max_batches, args.budget_ms)
            reports[sc.name][mode] = rep
            results.extend(rep.runs)
    write_results_csv(results, out / "bench_results.csv")
    write_summary_csv(reports, out / "bench_summary.csv")
    print(format_summary(reports))
    return EXIT_OK if all(r.solved for r in results) else EXIT_UNSOLVED


def _cmd_generate(args) -> int:
    from .suites import write_shipped

    for path in write_shipped(args.dest):
        print(path)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lateral-bitstar", description="Curvilinear BIT* benchmark runner")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def budget_opts(p):
        p.add_argument("--mode", choices=[*MODES, "both"], default="both")
        p.add_argument("--seeds", type=int, default=None, help="number of seeds (default: from scenario)")
        p.add_argument("--budget-ms", type=float, default=None, help="wall-clock budget per seed")
        p.add_argument("--max-batches", type=int, default=None)
        p.add_argument("--out", default=None, help=f"output directory (env {OUT_ENV} overrides)")

    plan = sub.add_parser("plan", help="run one scenario file")
    plan.add_argument("scenario")
    budget_opts(plan)
    plan.add_argument("--no-svg", action="store_true")
    plan.add_argument("--pgm", action="store_true", help="also dump the inflated occupancy grid")
    plan.set_defaults(func=_cmd_plan)

    bench = sub.add_parser("bench", help="run every scenario in a directory")
    bench.add_argument("suite")
    budget_opts(bench)
    bench.set_defaults(func=_cmd_bench)

    gen = sub.add_parser("generate-suite", help="rewrite the seeded scenario files")
    gen.add_argument("dest")
    gen.set_defaults(func=_cmd_generate)
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (ScenarioError, FileNotFoundError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
