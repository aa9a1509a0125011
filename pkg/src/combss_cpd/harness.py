"""Monte-Carlo driver for the simulation studies.

Every (scale value, replication) pair is an independent work unit.  The
noise for replication ``r`` comes from ``derive_seed(base_seed, r)`` and is
shared by all scale values, so curves along the scale axis compare like with
like.  Records are returned sorted by (scale, replication, rule) regardless of
execution order.
"""
from __future__ import annotations

import csv
import math
import os
import time
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .changepoint import apply_merge
from .lambda_select import (
    BisectionFailure,
    bisection_for_k,
    chi2_quantile,
    scan_lambdas,
    select_confidence,
    select_discrepancy,
)
from .metrics import evaluate
from .simgen import ExperimentConfig, derive_seed, experiment_config, simulate

__all__ = [
    "ExperimentConfig",
    "ExperimentRecord",
    "experiment_config",
    "run_replication",
    "run_experiment",
    "aggregate",
    "cp_histogram",
    "write_records_csv",
    "write_summary_csv",
    "write_histogram_csv",
    "RECORD_FIELDS",
    "SUMMARY_FIELDS",
]

RECORD_FIELDS = (
    "scale",
    "replication",
    "rule",
    "lambda",
    "k_hat",
    "tau_hat",
    "f1",
    "hausdorff",
    "hausdorff_std",
    "skipped",
    "wall_time_ms",
)
SUMMARY_FIELDS = (
    "scale",
    "rule",
    "mean_f1",
    "mean_hausdorff",
    "mean_hausdorff_std",
    "mean_k_hat",
    "n_skipped",
    "n_inf_hausdorff",
)
_RULE_ORDER = {"known_k": 0, "dp": 1, "cb": 2}


@dataclass
class ExperimentRecord:
    scale_value: float
    replication: int
    rule: str
    lam: float
    k_hat: int
    tau_hat: list[int]
    f1: float
    hausdorff: float
    hausdorff_std: float
    skipped: bool = False
    wall_time_ms: float = field(default=0.0, compare=False)
    # lambda trace of a failed bisection, for diagnostics only
    trace: list = field(default_factory=list, repr=False, compare=False)

    def sort_key(self):
        return (self.scale_value, self.replication, _RULE_ORDER.get(self.rule, 9), self.rule)


def _score(cfg: ExperimentConfig, spec, scale, rep, rule, y, result, elapsed):
    if cfg.merge_gap is not None:
        result = apply_merge(y, result, cfg.merge_gap)
    report = evaluate(spec.tau, result.tau_hat, spec.min_gap)
    return ExperimentRecord(
        scale_value=scale,
        replication=rep,
        rule=rule,
        lam=float(result.lambda_used),
        k_hat=result.k_hat,
        tau_hat=list(result.tau_hat),
        f1=report.f1,
        hausdorff=report.hausdorff,
        hausdorff_std=report.hausdorff_standardized,
        wall_time_ms=elapsed,
    )


def run_replication(cfg: ExperimentConfig, scale: float, rep: int) -> list[ExperimentRecord]:
    """Simulate one sequence and apply every penalty rule of ``cfg.mode``."""
    spec = cfg.spec_for(scale)
    y = simulate(spec, derive_seed(cfg.base_seed, rep), noise_scale=cfg.noise_scale)
    start = time.perf_counter()

    if cfg.mode == "known_k":
        try:
            _, result = bisection_for_k(y, spec.k, opts=cfg.combss)
        except BisectionFailure as exc:
            elapsed = 1e3 * (time.perf_counter() - start)
            return [
                ExperimentRecord(
                    scale_value=scale,
                    replication=rep,
                    rule="known_k",
                    lam=math.nan,
                    k_hat=-1,
                    tau_hat=[],
                    f1=0.0,
                    hausdorff=math.nan,
                    hausdorff_std=math.nan,
                    skipped=True,
                    wall_time_ms=elapsed,
                    trace=exc.trace,
                )
            ]
        elapsed = 1e3 * (time.perf_counter() - start)
        return [_score(cfg, spec, scale, rep, "known_k", y, result, elapsed)]

    n = spec.n
    sigma = spec.sigma
    rules = ("dp", "cb") if cfg.mode == "dp_and_cb" else (cfg.mode,)
    q = chi2_quantile(1.0 - cfg.alpha, n)
    crossed = {"dp": lambda r: r >= n, "cb": lambda r: r > q}
    # stop only once every requested rule has seen its crossing
    seen = set()

    def stop(std_rss):
        seen.update(rule for rule in rules if crossed[rule](std_rss))
        return len(seen) == len(rules)

    scan = scan_lambdas(y, sigma, cfg.delta_lambda, opts=cfg.combss, stop=stop)
    elapsed = 1e3 * (time.perf_counter() - start)
    std_rss = scan.standardized_rss()
    out = []
    for rule in rules:
        idx = select_discrepancy(std_rss, n) if rule == "dp" else select_confidence(std_rss, q)
        out.append(_score(cfg, spec, scale, rep, rule, y, scan.results[idx], elapsed))
    return out


def run_experiment(cfg: ExperimentConfig, threads: int | None = None) -> list[ExperimentRecord]:
    units = [(scale, rep) for scale in cfg.scale_values for rep in range(cfg.replications)]
    threads = threads or os.cpu_count() or 1
    if threads == 1:
        chunks = [run_replication(cfg, s, r) for s, r in units]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(lambda u: run_replication(cfg, *u), units))
    records = [rec for chunk in chunks for rec in chunk]
    records.sort(key=ExperimentRecord.sort_key)
    return records


def _mean(values) -> float:
    return float(np.mean(values)) if len(values) else math.nan


def aggregate(records) -> list[dict]:
    """Per (scale, rule) means; Hausdorff ignores skipped and infinite entries."""
    groups: dict[tuple, list[ExperimentRecord]] = {}
    for rec in sorted(records, key=ExperimentRecord.sort_key):
        groups.setdefault((rec.scale_value, rec.rule), []).append(rec)
    rows = []
    for (scale, rule), recs in sorted(
        groups.items(), key=lambda kv: (kv[0][0], _RULE_ORDER.get(kv[0][1], 9), kv[0][1])
    ):
        kept = [r for r in recs if not r.skipped]
        finite = [r for r in kept if math.isfinite(r.hausdorff)]
        rows.append(
            {
                "scale": scale,
                "rule": rule,
                "mean_f1": _mean([r.f1 for r in recs]),
                "mean_hausdorff": _mean([r.hausdorff for r in finite]),
                "mean_hausdorff_std": _mean([r.hausdorff_std for r in finite]),
                "mean_k_hat": _mean([r.k_hat for r in kept]),
                "n_skipped": len(recs) - len(kept),
                "n_inf_hausdorff": len(kept) - len(finite),
            }
        )
    return rows


def cp_histogram(records) -> list[tuple[int, int]]:
    """Counts of each estimated change-point index over records of one scale."""
    records = list(records)
    if len({r.scale_value for r in records}) > 1:
        raise ValueError("records must share a single scale value")
    counts = Counter(idx for r in records for idx in r.tau_hat)
    return sorted(counts.items())


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return repr(float(x))
    return str(x)


def write_records_csv(records, fh, timing: bool = False) -> None:
    """Write the records table; wall times are zeroed unless ``timing``."""
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(RECORD_FIELDS)
    for r in records:
        writer.writerow(
            [
                _fmt(r.scale_value),
                r.replication,
                r.rule,
                _fmt(r.lam),
                r.k_hat,
                ";".join(str(i) for i in r.tau_hat),
                _fmt(r.f1),
                _fmt(r.hausdorff),
                _fmt(r.hausdorff_std),
                _fmt(r.skipped),
                _fmt(float(r.wall_time_ms) if timing else 0.0),
            ]
        )


def write_summary_csv(rows, fh) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(SUMMARY_FIELDS)
    for row in rows:
        writer.writerow([_fmt(row[k]) for k in SUMMARY_FIELDS])


def write_histogram_csv(counts, fh) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(("index", "count"))
    writer.writerows(counts)
