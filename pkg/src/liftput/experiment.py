"""Experiment harness: random priors, sweeps, per-instance artifacts, aggregation.

Every instance writes its own CSV (and JSON with full mechanisms) under
``<out_dir>/instances/``; the pooled ``results.csv`` and the plot-ready
series are assembled afterwards in instance order, so the bytes on disk
do not depend on worker scheduling.
"""

from __future__ import annotations

import csv
import json
import math
import os
import sys
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from decimal import Decimal
from pathlib import Path

import numpy as np

from .alpha import SweepConfig, run_algorithm1
from .errors import ResampleLimit, SchemaMismatch, ValidationError
from .exact import PutSolution, solve_maxlift_put
from .io import fmt
from .lift import INF, eps_max, format_alpha, parse_alpha
from .polytope import VertexFamily
from .prob import JointDistribution, validate_joint
from .watchdog import watchdog_merge

SCHEMA = "liftput-results v1"
COLUMNS = (
    "instance_id",
    "method",
    "alpha",
    "eps",
    "utility",
    "normalized_utility",
    "alpha_leakage",
    "maxlift_leakage",
    "support_size",
    "eps_max",
)
METHODS = ("exact", "alg1", "watchdog")


@dataclass(frozen=True)
class ExperimentSpec:
    n_instances: int
    s_card: int
    x_card: int
    seed: int
    sweep: SweepConfig
    min_marginal: float = 1e-4

    def __post_init__(self):
        if self.n_instances < 1:
            raise ValidationError("need at least one instance")
        if self.s_card < 2 or self.x_card < 2:
            raise ValidationError("alphabet sizes must be at least 2")
        if not 0 < self.min_marginal < 1 / max(self.s_card, self.x_card):
            raise ValidationError("min_marginal must lie in (0, 1/max(|S|,|X|))")


def eps_range(start, stop, step) -> list[float]:
    """Inclusive decimal range ``start, start+step, ..., <= stop``."""
    a, b, h = (Decimal(repr(float(v))) if not isinstance(v, str) else Decimal(v) for v in (start, stop, step))
    if h <= 0:
        raise ValidationError("eps step must be positive")
    out, k = [], 0
    while a + k * h <= b:
        out.append(float(a + k * h))
        k += 1
    return out


def instance_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def gen_random_joint(
    s_card: int, x_card: int, rng: np.random.Generator, min_marginal: float = 1e-4, max_tries: int = 1000
) -> JointDistribution:
    """Draw P_SX uniformly from the simplex, rejecting tiny marginals."""
    for _ in range(max_tries):
        t = rng.dirichlet(np.ones(s_card * x_card)).reshape(s_card, x_card)
        if t.sum(axis=1).min() >= min_marginal and t.sum(axis=0).min() >= min_marginal:
            return validate_joint(t, renormalize=True)
    raise ResampleLimit(f"no joint with marginals >= {min_marginal} after {max_tries} draws")


def spec_joint(spec: ExperimentSpec, index: int) -> JointDistribution:
    return gen_random_joint(spec.s_card, spec.x_card, instance_rng(spec.seed, index), spec.min_marginal)


def _row(inst: int, method: str, sol: PutSolution, emax: float) -> dict:
    return {
        "instance_id": inst,
        "method": method,
        "alpha": sol.alpha,
        "eps": sol.eps,
        "utility": sol.utility,
        "normalized_utility": sol.normalized_utility,
        "alpha_leakage": sol.alpha_leakage,
        "maxlift_leakage": sol.maxlift_leakage,
        "support_size": sol.support_size,
        "eps_max": emax,
    }


def run_instance(joint: JointDistribution, sweep: SweepConfig, inst: int = 0, methods=METHODS):
    """All requested methods on one prior.  Returns (rows, json-able artifact)."""
    family = VertexFamily.from_joint(joint)
    emax = {a: eps_max(joint, a) for a in set(sweep.alphas) | {INF}}
    rows, mechs = [], []
    exact = []
    if "exact" in methods or "alg1" in methods:
        exact = [solve_maxlift_put(joint, e, family) for e in sweep.epsilons]
    if "exact" in methods:
        for sol in exact:
            rows.append(_row(inst, "exact", sol, emax[INF]))
            mechs.append({"method": "exact", **sol.to_dict()})
    if "alg1" in methods:
        grid = run_algorithm1(joint, sweep, family=family, seeds=exact)
        for a, _, sol in grid.cells():
            rows.append(_row(inst, "alg1", sol, emax[a]))
            mechs.append({"method": "alg1", **sol.to_dict()})
    if "watchdog" in methods:
        for a in sweep.alphas:
            for e in sweep.epsilons:
                sol = watchdog_merge(joint, e, a)
                rows.append(_row(inst, "watchdog", sol, emax[a]))
                mechs.append({"method": "watchdog", **sol.to_dict()})
    artifact = {
        "instance_id": inst,
        "joint": joint.table.tolist(),
        "eps_max": {format_alpha(a): v for a, v in sorted(emax.items(), reverse=True)},
        "results": mechs,
    }
    return rows, artifact


def format_row(row: dict) -> list[str]:
    out = []
    for c in COLUMNS:
        v = row[c]
        if c == "alpha":
            out.append(format_alpha(v))
        elif c in ("instance_id", "support_size"):
            out.append(str(int(v)))
        elif c == "method":
            out.append(v)
        else:
            out.append(fmt(v))
    return out


def write_rows(path, rows) -> None:
    tmp = Path(str(path) + ".tmp")
    with open(tmp, "w", encoding="utf-8", newline="") as fh:
        fh.write(f"# {SCHEMA}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(COLUMNS)
        for r in rows:
            w.writerow(format_row(r))
    os.replace(tmp, path)


def read_rows(path) -> list[dict]:
    with open(path, encoding="utf-8", newline="") as fh:
        first = fh.readline().strip()
        if first != f"# {SCHEMA}":
            raise SchemaMismatch(f"{path}: expected schema line '# {SCHEMA}', got {first!r}")
        reader = csv.reader(fh)
        header = next(reader, None)
        if tuple(header or ()) != COLUMNS:
            raise SchemaMismatch(f"{path}: unexpected columns {header!r}")
        rows = []
        for rec in reader:
            if len(rec) != len(COLUMNS):
                raise SchemaMismatch(f"{path}: malformed row {rec!r}")
            r = dict(zip(COLUMNS, rec))
            r["instance_id"] = int(r["instance_id"])
            r["support_size"] = int(r["support_size"])
            r["alpha"] = parse_alpha(r["alpha"])
            for c in ("eps", "utility", "normalized_utility", "alpha_leakage", "maxlift_leakage", "eps_max"):
                r[c] = float(r[c])
            rows.append(r)
    return rows


def _instance_job(args):
    spec, index, inst_dir, methods = args
    path = Path(inst_dir) / f"inst_{index:05d}.csv"
    joint = spec_joint(spec, index)
    rows, artifact = run_instance(joint, spec.sweep, index, methods)
    with open(path.with_suffix(".json.tmp"), "w", encoding="utf-8") as fh:
        json.dump(artifact, fh)
    os.replace(path.with_suffix(".json.tmp"), path.with_suffix(".json"))
    write_rows(path, rows)
    return index


@dataclass
class AggregateReport:
    """Means and standard errors per (method, alpha, eps), plus mean eps_max per alpha."""

    cells: dict = field(default_factory=dict)  # (method, alpha, eps) -> stats dict
    eps_max_mean: dict = field(default_factory=dict)  # alpha -> mean eps_max
    n_instances: int = 0

    def curve(self, method: str, alpha: float, metric: str = "normalized_utility"):
        keys = sorted(k for k in self.cells if k[0] == method and k[1] == alpha)
        return [k[2] for k in keys], [self.cells[k][metric]["mean"] for k in keys]


def _stats(values) -> dict:
    v = np.asarray(values, dtype=float)
    se = float(v.std(ddof=1) / math.sqrt(v.size)) if v.size > 1 else 0.0
    return {"mean": float(v.mean()), "stderr": se, "min": float(v.min()), "max": float(v.max()), "n": int(v.size)}


METRICS = ("normalized_utility", "alpha_leakage", "maxlift_leakage")


def aggregate(rows) -> AggregateReport:
    groups = defaultdict(list)
    emax = defaultdict(dict)
    for r in rows:
        groups[(r["method"], r["alpha"], r["eps"])].append(r)
        emax[r["alpha"]][r["instance_id"]] = r["eps_max"]
    rep = AggregateReport(n_instances=len({r["instance_id"] for r in rows}))
    for key in sorted(groups, key=lambda k: (k[0], -k[1], k[2])):
        g = groups[key]
        rep.cells[key] = {m: _stats([r[m] for r in g]) for m in METRICS}
    rep.eps_max_mean = {a: float(np.mean(list(d.values()))) for a, d in sorted(emax.items(), reverse=True)}
    return rep


def _alpha_tag(a: float) -> str:
    return "inf" if math.isinf(a) else format(a, "g")


def write_series(rep: AggregateReport, out_dir) -> list[Path]:
    """Plot-ready CSVs mirroring the four utility/leakage panels."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    panels = [
        ("series_utility.csv", ("alg1",), "normalized_utility"),
        ("series_alpha_leakage.csv", ("alg1",), "alpha_leakage"),
        ("series_maxlift_leakage.csv", ("alg1",), "maxlift_leakage"),
        ("series_baseline.csv", ("alg1", "watchdog"), "normalized_utility"),
    ]
    written = []
    for name, methods, metric in panels:
        path = out / name
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(f"# {SCHEMA} series metric={metric}\n")
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(("method", "alpha", "eps", "mean", "stderr", "n"))
            for (method, a, e), st in rep.cells.items():
                if method in methods:
                    s = st[metric]
                    w.writerow((method, format_alpha(a), fmt(e), fmt(s["mean"]), fmt(s["stderr"]), s["n"]))
        written.append(path)
    path = out / "eps_max.csv"
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("alpha", "mean_eps_max"))
        for a, v in rep.eps_max_mean.items():
            w.writerow((format_alpha(a), fmt(v)))
    written.append(path)
    return written


def write_curves(rep: AggregateReport, out_dir) -> list[Path]:
    """One mean-curve CSV per (method, alpha)."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for method, a in sorted({k[:2] for k in rep.cells}, key=lambda k: (k[0], -k[1])):
        path = out / f"curve_{method}_alpha_{_alpha_tag(a)}.csv"
        with open(path, "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(("eps",) + tuple(f"{m}_{s}" for m in METRICS for s in ("mean", "stderr")))
            for (m, aa, e), st in rep.cells.items():
                if m == method and aa == a:
                    w.writerow([fmt(e)] + [fmt(st[k][s]) for k in METRICS for s in ("mean", "stderr")])
        written.append(path)
    return written


def run_experiment(
    spec: ExperimentSpec,
    out_dir,
    threads: int = 1,
    resume: bool = False,
    methods=METHODS,
    progress=sys.stderr,
) -> AggregateReport:
    out = Path(out_dir)
    inst_dir = out / "instances"
    inst_dir.mkdir(parents=True, exist_ok=True)
    todo = []
    for i in range(spec.n_instances):
        path = inst_dir / f"inst_{i:05d}.csv"
        if resume and path.exists():
            try:
                read_rows(path)
                continue
            except SchemaMismatch:
                pass
        todo.append((spec, i, str(inst_dir), tuple(methods)))
    done = spec.n_instances - len(todo)
    if threads > 1 and len(todo) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            for idx in pool.map(_instance_job, todo):
                done += 1
                _progress(progress, done, spec.n_instances, idx)
    else:
        for job in todo:
            idx = _instance_job(job)
            done += 1
            _progress(progress, done, spec.n_instances, idx)
    rows = []
    for i in range(spec.n_instances):
        rows.extend(read_rows(inst_dir / f"inst_{i:05d}.csv"))
    write_rows(out / "results.csv", rows)
    rep = aggregate(rows)
    write_series(rep, out)
    return rep


def _progress(stream, done, total, idx):
    if stream is not None:
        print(f"[liftput] instance {idx} finished ({done}/{total})", file=stream, flush=True)
