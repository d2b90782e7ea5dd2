"""Command-line entry point: ``liftput {gen,exact,sweep,baseline,report}``.

Exit codes: 0 success, 2 validation error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .alpha import SweepConfig
from .errors import NumericalFailure, ValidationError
from .experiment import (
    ExperimentSpec,
    aggregate,
    eps_range,
    read_rows,
    run_experiment,
    run_instance,
    spec_joint,
    write_curves,
    write_rows,
    write_series,
)
from .io import read_joint, write_joint_csv, write_joint_json
from .lift import format_alpha, parse_alpha

DEFAULTS = {
    "seed": 0,
    "instances": 10,
    "scard": 6,
    "xcard": 10,
    "alphas": "inf,100,10,3,1.5",
    "eps_start": "0.005",
    "eps_stop": "0.95",
    "eps_step": "0.005",
    "delta": 0.01,
    "eps_tail": 1.0,
    "interp": 3,
    "min_marginal": 1e-4,
    "out_dir": "liftput-out",
    "threads": 1,
    "resume": False,
    "joint": None,
    "format": "json",
}


def _add_common(p: argparse.ArgumentParser, sweep: bool = True) -> None:
    p.add_argument("--config", help="JSON file whose keys mirror the long flags")
    p.add_argument("--seed", type=int)
    p.add_argument("--instances", type=int)
    p.add_argument("--scard", type=int)
    p.add_argument("--xcard", type=int)
    p.add_argument("--min-marginal", type=float, dest="min_marginal")
    p.add_argument("--out-dir", dest="out_dir")
    if sweep:
        p.add_argument("--joint", help="CSV/JSON joint; replaces random instances")
        p.add_argument("--alphas", help="comma list, strictly decreasing, 'inf' allowed")
        p.add_argument("--eps-start", dest="eps_start")
        p.add_argument("--eps-stop", dest="eps_stop")
        p.add_argument("--eps-step", dest="eps_step")
        p.add_argument("--delta", type=float)
        p.add_argument("--eps-tail", type=float, dest="eps_tail")
        p.add_argument("--interp", type=int, help="interpolation count n_j used for every eps")
        p.add_argument("--threads", type=int)
        p.add_argument("--resume", action="store_true", default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="liftput", description="Privacy-utility experiments under alpha-lift budgets.")
    sub = parser.add_subparsers(dest="command", required=True)
    g = sub.add_parser("gen", help="write random joint distributions")
    _add_common(g, sweep=False)
    g.add_argument("--format", choices=("json", "csv"))
    for name, text in (
        ("exact", "exact max-lift optimum per eps"),
        ("sweep", "exact + alpha sweep + watchdog baseline"),
        ("baseline", "watchdog merging baseline only"),
    ):
        _add_common(sub.add_parser(name, help=text))
    r = sub.add_parser("report", help="aggregate result CSVs into mean curves")
    r.add_argument("inputs", nargs="+")
    r.add_argument("--out-dir", dest="out_dir")
    return parser


def resolve(args: argparse.Namespace) -> dict:
    """Defaults, then config file, then explicit flags."""
    opts = dict(DEFAULTS)
    cfg_path = getattr(args, "config", None)
    if cfg_path:
        with open(cfg_path, encoding="utf-8") as fh:
            data = json.load(fh)
        unknown = set(data) - set(DEFAULTS)
        if unknown:
            raise ValidationError(f"unknown config keys: {sorted(unknown)}")
        opts.update(data)
    for k, v in vars(args).items():
        if v is not None and k in DEFAULTS:
            opts[k] = v
    return opts


def sweep_config(opts: dict) -> SweepConfig:
    alphas = opts["alphas"]
    if isinstance(alphas, str):
        alphas = alphas.split(",")
    alphas = [parse_alpha(a) for a in alphas]
    eps = eps_range(str(opts["eps_start"]), str(opts["eps_stop"]), str(opts["eps_step"]))
    return SweepConfig.uniform(alphas, eps, int(opts["interp"]), float(opts["delta"]), float(opts["eps_tail"]))


def experiment_spec(opts: dict, sweep: SweepConfig) -> ExperimentSpec:
    return ExperimentSpec(
        n_instances=int(opts["instances"]),
        s_card=int(opts["scard"]),
        x_card=int(opts["xcard"]),
        seed=int(opts["seed"]),
        sweep=sweep,
        min_marginal=float(opts["min_marginal"]),
    )


def _cmd_gen(opts: dict) -> None:
    cfg = SweepConfig.uniform(["inf"], [0.1], 1)
    spec = experiment_spec(opts, cfg)
    out = Path(opts["out_dir"])
    out.mkdir(parents=True, exist_ok=True)
    for i in range(spec.n_instances):
        joint = spec_joint(spec, i)
        if opts["format"] == "csv":
            write_joint_csv(joint, out / f"joint_{i:05d}.csv")
        else:
            write_joint_json(joint, out / f"joint_{i:05d}.json")
    print(f"wrote {spec.n_instances} joints to {out}", file=sys.stderr)


def _cmd_run(opts: dict, methods) -> None:
    sweep = sweep_config(opts)
    out = Path(opts["out_dir"])
    if opts["joint"]:
        joint = read_joint(opts["joint"])
        rows, artifact = run_instance(joint, sweep, 0, methods)
        out.mkdir(parents=True, exist_ok=True)
        write_rows(out / "results.csv", rows)
        with open(out / "results.json", "w", encoding="utf-8") as fh:
            json.dump(artifact, fh)
        rep = aggregate(rows)
        write_series(rep, out)
    else:
        spec = experiment_spec(opts, sweep)
        rep = run_experiment(spec, out, threads=int(opts["threads"]), resume=bool(opts["resume"]), methods=methods)
    _summarise(rep)


def _summarise(rep) -> None:
    for a, v in rep.eps_max_mean.items():
        print(f"eps_max alpha={format_alpha(a)} mean={v:.6f}")
    print(f"instances={rep.n_instances} cells={len(rep.cells)}")


def _cmd_report(args) -> None:
    rows = []
    for path in args.inputs:
        rows.extend(read_rows(path))
    rep = aggregate(rows)
    out = Path(args.out_dir or DEFAULTS["out_dir"])
    write_curves(rep, out)
    write_series(rep, out)
    print(f"{'method':<9} {'alpha':>6} {'eps':>8} {'norm_util':>10} {'stderr':>10} {'n':>4}")
    for (m, a, e), st in rep.cells.items():
        s = st["normalized_utility"]
        print(f"{m:<9} {format_alpha(a):>6} {e:>8.4f} {s['mean']:>10.6f} {s['stderr']:>10.6f} {s['n']:>4}")
    _summarise(rep)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "report":
            _cmd_report(args)
            return 0
        opts = resolve(args)
        if args.command == "gen":
            _cmd_gen(opts)
        elif args.command == "exact":
            _cmd_run(opts, ("exact",))
        elif args.command == "baseline":
            _cmd_run(opts, ("watchdog",))
        else:
            _cmd_run(opts, ("exact", "alg1", "watchdog"))
    except ValidationError as exc:
        print(f"liftput: error: {exc}", file=sys.stderr)
        return 2
    except (NumericalFailure, ArithmeticError) as exc:
        print(f"liftput: numerical failure: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"liftput: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
