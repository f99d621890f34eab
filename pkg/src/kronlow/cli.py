"""Command-line interface: generate / eval / optimize / tune / bench.

Structured results are JSON, bulk numeric data is CSV, and every run
that writes files also writes a ``<out>.manifest.json`` sidecar recording
the subcommand, argument vector, seed, tool version, wall-clock time and
output paths.  All subcommands accept ``--out -`` to stream the primary
output to stdout.  Stochastic subcommands require ``--seed``; rerunning
any seeded command reproduces its primary outputs byte for byte (the
manifest's wall-clock field is the one intentional exception).

Exit codes: 0 success, 2 usage error, 1 runtime error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import kronlow
from kronlow import bench, plots
from kronlow.discrepancy import evaluate_with_timing
from kronlow.optimize import OptimizerConfig, optimize_kronecker
from kronlow.pointset import (
    fibonacci_set,
    kronecker_with_unit_first,
    load_csv,
    save_csv,
    sobol_set,
)
from kronlow.tune import TuningScenario, race_tune

THREADS_ENV = "KRONLOW_THREADS"


@dataclass
class RunManifest:
    """Provenance sidecar written next to every file-producing run."""

    subcommand: str
    argv: list[str]
    seed: int | None
    version: str
    wall_ms: float
    outputs: list[str] = field(default_factory=list)

    def write(self, primary_out: str) -> str:
        path = Path(str(primary_out) + ".manifest.json")
        path.write_text(json.dumps(asdict(self), indent=2) + "\n")
        return str(path)


def _resolve_threads(value: int | None) -> None:
    """Cap numba's thread pool; evaluator results do not depend on it."""
    if value is None:
        env = os.environ.get(THREADS_ENV)
        value = int(env) if env else None
    if value is not None and value >= 1:
        import numba

        numba.set_num_threads(min(value, numba.config.NUMBA_NUM_THREADS))


def _write_text(text: str, out: str) -> bool:
    """Write to a file, or stdout when out is '-'. Returns True if a file was written."""
    if out == "-":
        sys.stdout.write(text)
        return False
    Path(out).write_text(text)
    return True


def _csv_text(rows: list[list]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerows(rows)
    return buf.getvalue()


def _json_text(payload: dict) -> str:
    return json.dumps(payload, indent=2) + "\n"


def _parse_floats(text: str) -> list[float]:
    return [float(t) for t in text.split(",") if t.strip() != ""]


def _parse_ints(text: str) -> list[int]:
    return [int(t) for t in text.split(",") if t.strip() != ""]


def _cmd_generate(args) -> int:
    family = args.family
    if family == "kronecker":
        if args.params is not None:
            tail = _parse_floats(args.params)
            if args.d is not None and args.d != len(tail) + 1:
                raise ValueError(
                    f"--d {args.d} inconsistent with {len(tail)} tail parameters (p1=1/n is implied)"
                )
            ps = kronecker_with_unit_first(args.n, *tail, shifted=args.shifted)
        elif args.d == 1:
            ps = kronecker_with_unit_first(args.n, shifted=args.shifted)
        else:
            raise ValueError("kronecker needs --params p2,p3,... (p1=1/n is implied)")
    elif family == "fibonacci":
        ps = fibonacci_set(args.n)
    elif family == "sobol":
        if args.d is None:
            raise ValueError("sobol needs --d")
        ps = sobol_set(args.n, args.d)
    else:  # pragma: no cover - argparse restricts choices
        raise ValueError(f"unknown family {family!r}")

    buf = io.StringIO()
    save_csv(ps, buf)
    wrote_file = _write_text(buf.getvalue(), args.out)
    if wrote_file:
        manifest = RunManifest(
            subcommand="generate",
            argv=args._argv,
            seed=None,
            version=kronlow.__version__,
            wall_ms=(time.perf_counter() - args._t0) * 1000.0,
            outputs=[args.out],
        )
        manifest.write(args.out)
    return 0


def _cmd_eval(args) -> int:
    ps = load_csv(args.infile)
    result, millis = evaluate_with_timing(ps, oracle=args.oracle)
    payload = {
        "value": result.value,
        "witness": [float(w) for w in result.witness],
        "side": result.side,
        "n": ps.n,
        "d": ps.d,
        "millis": millis,
    }
    if args.out != "-":
        payload["manifest"] = str(args.out) + ".manifest.json"
    wrote = _write_text(_json_text(payload), args.out)
    if wrote:
        RunManifest(
            subcommand="eval",
            argv=args._argv,
            seed=None,
            version=kronlow.__version__,
            wall_ms=(time.perf_counter() - args._t0) * 1000.0,
            outputs=[args.out],
        ).write(args.out)
    return 0


def _cmd_optimize(args) -> int:
    config = OptimizerConfig(
        budget_evals=args.budget,
        runs=args.runs,
        seed=args.seed,
        population=args.population if args.population else "default",
        sigma0=args.sigma0,
    )
    result = optimize_kronecker(args.n, args.d, config, method=args.method)
    payload = result.to_dict()
    payload.update({"n": args.n, "d": args.d, "method": args.method})
    if args.out != "-":
        payload["manifest"] = str(args.out) + ".manifest.json"
    wrote = _write_text(_json_text(payload), args.out)
    if wrote:
        RunManifest(
            subcommand="optimize",
            argv=args._argv,
            seed=args.seed,
            version=kronlow.__version__,
            wall_ms=(time.perf_counter() - args._t0) * 1000.0,
            outputs=[args.out],
        ).write(args.out)
    return 0


def _cmd_tune(args) -> int:
    if args.scenario:
        fields = json.loads(Path(args.scenario).read_text())
        if args.seed is not None:
            fields["seed"] = args.seed
        scenario = TuningScenario(**fields)
    else:
        missing = [f for f, v in (("--n-lo", args.n_lo), ("--n-hi", args.n_hi), ("--budget", args.budget)) if v is None]
        if missing:
            print(f"tune: missing {', '.join(missing)} (or provide --scenario)", file=sys.stderr)
            return 2
        if args.seed is None:
            print("tune: --seed is required", file=sys.stderr)
            return 2
        scenario = TuningScenario(
            n_lo=args.n_lo,
            n_hi=args.n_hi,
            budget_pairs=args.budget,
            seed=args.seed,
            d=args.d,
        )
    tuned = race_tune(scenario)
    payload = tuned.to_dict()
    if args.out != "-":
        payload["manifest"] = str(args.out) + ".manifest.json"
    wrote = _write_text(_json_text(payload), args.out)
    if wrote:
        RunManifest(
            subcommand="tune",
            argv=args._argv,
            seed=scenario.seed,
            version=kronlow.__version__,
            wall_ms=(time.perf_counter() - args._t0) * 1000.0,
            outputs=[args.out],
        ).write(args.out)
    return 0


def _bench_outputs(args, csv_rows: list[list], payload: dict, plot_fn=None, plot_arg=None) -> int:
    """Write <out>.csv and <out>.json (plus <out>.png with --plot), or CSV to stdout."""
    if args.out == "-":
        sys.stdout.write(_csv_text(csv_rows))
        return 0
    stem = Path(args.out)
    csv_path = stem.with_suffix(".csv")
    json_path = stem.with_suffix(".json")
    outputs = [str(csv_path), str(json_path)]
    payload = dict(payload)
    payload["manifest"] = str(stem) + ".manifest.json"
    csv_path.write_text(_csv_text(csv_rows))
    json_path.write_text(_json_text(payload))
    if getattr(args, "plot", False) and plot_fn is not None:
        png_path = stem.with_suffix(".png")
        plot_fn(plot_arg, png_path)
        outputs.append(str(png_path))
    RunManifest(
        subcommand=f"bench {args.bench_cmd}",
        argv=args._argv,
        seed=getattr(args, "seed", None),
        version=kronlow.__version__,
        wall_ms=(time.perf_counter() - args._t0) * 1000.0,
        outputs=outputs,
    ).write(str(stem))
    return 0


def _cmd_bench(args) -> int:
    if args.bench_cmd == "table1":
        columns = args.columns.split(",") if args.columns else None
        ns = _parse_ints(args.ns) if args.ns else None
        cmaes_config = None
        if columns and "cmaes" in columns:
            cmaes_config = OptimizerConfig(
                budget_evals=args.cmaes_budget, runs=args.cmaes_runs, seed=args.cmaes_seed
            )
        report = bench.reproduce_table1(columns=columns, ns=ns, cmaes_config=cmaes_config)
        return _bench_outputs(
            args, bench.table_report_csv_rows(report), report, plots.plot_table_report, report
        )
    if args.bench_cmd == "heatmap":
        thresholds = _parse_floats(args.thresholds)
        report = bench.heatmap_scan(args.n, resolution=args.res, thresholds=thresholds)
        payload = {k: v for k, v in report.items() if k != "rows"}
        payload["threshold_counts"] = {repr(k): v for k, v in report["threshold_counts"].items()}
        return _bench_outputs(
            args, bench.heatmap_csv_rows(report), payload, plots.plot_heatmap, report
        )
    if args.bench_cmd == "inverse":
        targets = _parse_floats(args.targets)
        records = bench.reference_table(args.table)
        result = bench.inverse_discrepancy(records, targets)
        payload = {
            "table": args.table,
            "targets": targets,
            "result": {m: {repr(t): n for t, n in tv.items()} for m, tv in result.items()},
        }
        return _bench_outputs(
            args, bench.inverse_csv_rows(result), payload, plots.plot_inverse, result
        )
    raise ValueError(f"unknown bench subcommand {args.bench_cmd!r}")  # pragma: no cover


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kronlow",
        description="Low-discrepancy point sets: generators, exact star discrepancy, parameter search.",
    )
    parser.add_argument("--threads", type=int, default=None,
                        help=f"cap internal parallelism (fallback: ${THREADS_ENV})")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="construct a point set and write it as CSV")
    g.add_argument("--family", choices=["kronecker", "fibonacci", "sobol"], required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--d", type=int, default=None)
    g.add_argument("--params", default=None,
                   help="comma-separated p2,p3,... for kronecker (p1=1/n is implied)")
    g.add_argument("--shifted", action="store_true", help="index points from 1 instead of 0")
    g.add_argument("--out", required=True, help="output CSV path, or - for stdout")
    g.set_defaults(func=_cmd_generate)

    e = sub.add_parser("eval", help="exact star discrepancy of a point-set CSV")
    e.add_argument("--in", dest="infile", required=True)
    e.add_argument("--oracle", action="store_true", help="use the brute-force grid oracle")
    e.add_argument("--out", default="-")
    e.set_defaults(func=_cmd_eval)

    o = sub.add_parser("optimize", help="CMA-ES search of Kronecker parameters for one n")
    o.add_argument("--n", type=int, required=True)
    o.add_argument("--d", type=int, required=True)
    o.add_argument("--budget", type=int, required=True, help="objective evaluations per run")
    o.add_argument("--runs", type=int, default=1)
    o.add_argument("--seed", type=int, required=True)
    o.add_argument("--method", choices=["cmaes", "random"], default="cmaes")
    o.add_argument("--population", type=int, default=None)
    o.add_argument("--sigma0", type=float, default=0.3)
    o.add_argument("--out", default="-")
    o.set_defaults(func=_cmd_optimize)

    t = sub.add_parser("tune", help="interval racing tuner for Kronecker parameters")
    t.add_argument("--n-lo", type=int, default=None)
    t.add_argument("--n-hi", type=int, default=None)
    t.add_argument("--budget", type=int, default=None, help="(config, instance) evaluation pairs")
    t.add_argument("--seed", type=int, default=None, required=False)
    t.add_argument("--d", type=int, default=3)
    t.add_argument("--scenario", default=None, help="JSON file with TuningScenario fields")
    t.add_argument("--out", default="-")
    t.set_defaults(func=_cmd_tune)

    b = sub.add_parser("bench", help="reference tables, reproduction reports, scans")
    bsub = b.add_subparsers(dest="bench_cmd", required=True)

    bt = bsub.add_parser("table1", help="recompute d=3 table cells vs reference")
    bt.add_argument("--columns", default=None, help="subset of sobol,i_200,i_1500,i_2500,cmaes")
    bt.add_argument("--ns", default="20,25,32,40,50,60,80,100,150,200,250,300,500,750,1000",
                    help="comma-separated n values (rows above 1000 cost minutes each)")
    bt.add_argument("--cmaes-budget", type=int, default=2000)
    bt.add_argument("--cmaes-runs", type=int, default=3)
    bt.add_argument("--cmaes-seed", type=int, default=0)
    bt.add_argument("--plot", action="store_true")
    bt.add_argument("--out", required=True, help="output stem, or - for CSV on stdout")
    bt.set_defaults(func=_cmd_bench)

    bh = bsub.add_parser("heatmap", help="scan the (p2, p3) landscape at one n")
    bh.add_argument("--n", type=int, required=True)
    bh.add_argument("--res", type=int, default=200)
    bh.add_argument("--thresholds", default="0.055,0.045")
    bh.add_argument("--plot", action="store_true")
    bh.add_argument("--out", required=True)
    bh.set_defaults(func=_cmd_bench)

    bi = bsub.add_parser("inverse", help="smallest n reaching each discrepancy target")
    bi.add_argument("--targets", default="0.1,0.05,0.01,0.005")
    bi.add_argument("--table", default="table1", choices=["table1", "table3"])
    bi.add_argument("--plot", action="store_true")
    bi.add_argument("--out", required=True)
    bi.set_defaults(func=_cmd_bench)

    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    args._argv = argv
    args._t0 = time.perf_counter()
    try:
        _resolve_threads(args.threads)
        return args.func(args)
    except BrokenPipeError:
        return 1
    except Exception as exc:
        print(f"kronlow: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
