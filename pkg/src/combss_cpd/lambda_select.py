"""Choosing the penalty ``lam``.

With a known number of change points the penalty is found by interval
halving.  Without it, a grid ``0, dl, 2 dl, ...`` is scanned and the
standardised residual ``rss / sigma^2`` is compared either with its
expectation ``n`` (discrepancy principle) or with the ``1 - alpha`` quantile
of the chi-square(n) law (confidence bound).  One scan can serve both rules.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq
from scipy.special import gammainc

from .changepoint import DetectionResult, restricted_ols
from .combss import CombssOptions, run_combss

__all__ = [
    "BisectionFailure",
    "ScanEntry",
    "ScanTrace",
    "LambdaScan",
    "chi2_cdf",
    "chi2_quantile",
    "default_lambda_max",
    "detect_at_lambda",
    "bisection_for_k",
    "scan_lambdas",
    "select_discrepancy",
    "select_confidence",
    "discrepancy_principle",
    "confidence_bound",
]


class BisectionFailure(RuntimeError):
    """Interval halving did not reach the requested count.

    ``trace`` holds the visited ``(lam, k_hat)`` pairs in order.
    """

    def __init__(self, k_target: int, steps: int, trace: list[tuple[float, int]]):
        self.k_target = k_target
        self.steps = steps
        self.trace = trace
        super().__init__(
            f"no penalty giving {k_target} change points after {steps} halving steps"
        )


def chi2_cdf(x: float, df: int) -> float:
    if x <= 0:
        return 0.0
    return float(gammainc(0.5 * df, 0.5 * x))


def chi2_quantile(p: float, df: int) -> float:
    """Inverse chi-square CDF via the regularised lower incomplete gamma."""
    if not 0.0 < p < 1.0:
        raise ValueError("p must lie in (0, 1)")
    if df < 1:
        raise ValueError("df must be a positive integer")
    hi = max(1.0, float(df))
    while chi2_cdf(hi, df) < p:
        hi *= 2.0
    return float(brentq(lambda x: chi2_cdf(x, df) - p, 0.0, hi, xtol=1e-12, rtol=1e-15))


def default_lambda_max(y) -> float:
    """``||y||^2 / n``: at this penalty the empty model beats any selection."""
    y = np.asarray(y, dtype=np.float64)
    return float(y @ y / y.shape[0])


def detect_at_lambda(y, lam: float, opts: CombssOptions | None = None) -> DetectionResult:
    run = run_combss(y, lam, opts)
    return restricted_ols(y, run.s, lambda_used=lam)


def bisection_for_k(
    y,
    k_target: int,
    lambda_lo: float = 0.0,
    lambda_hi: float | None = None,
    max_steps: int = 50,
    opts: CombssOptions | None = None,
) -> tuple[float, DetectionResult]:
    """Halve ``[lambda_lo, lambda_hi]`` until the fit has ``k_target`` change points.

    Assumes the count weakly decreases in ``lam``.  Raises
    :class:`BisectionFailure` after ``max_steps`` unsuccessful midpoints.
    """
    y = np.asarray(y, dtype=np.float64)
    if k_target < 1:
        raise ValueError("k_target must be positive")
    if lambda_hi is None:
        lambda_hi = default_lambda_max(y)
    if not lambda_lo < lambda_hi:
        raise BisectionFailure(k_target, 0, [])
    lo, hi = float(lambda_lo), float(lambda_hi)
    trace: list[tuple[float, int]] = []
    for _ in range(max_steps):
        mid = 0.5 * (lo + hi)
        res = detect_at_lambda(y, mid, opts)
        trace.append((mid, res.k_hat))
        if res.k_hat == k_target:
            return mid, res
        if res.k_hat > k_target:
            lo = mid
        else:
            hi = mid
    raise BisectionFailure(k_target, max_steps, trace)


@dataclass(frozen=True)
class ScanEntry:
    lam: float
    k_hat: int
    standardized_rss: float


@dataclass
class ScanTrace:
    entries: list[ScanEntry]
    chosen_index: int
    rule: str

    @property
    def chosen(self) -> ScanEntry:
        return self.entries[self.chosen_index]

    def write_csv(self, fh) -> None:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["lambda", "k_hat", "standardized_rss"])
        for e in self.entries:
            writer.writerow([repr(e.lam), e.k_hat, repr(e.standardized_rss)])

    def to_csv(self) -> str:
        buf = io.StringIO()
        self.write_csv(buf)
        return buf.getvalue()


@dataclass
class LambdaScan:
    """Per-penalty fits from one pass over the grid, in increasing ``lam``."""

    sigma: float
    delta_lambda: float
    results: list[DetectionResult] = field(default_factory=list)

    @property
    def entries(self) -> list[ScanEntry]:
        s2 = self.sigma**2
        return [ScanEntry(r.lambda_used, r.k_hat, r.rss / s2) for r in self.results]

    def standardized_rss(self) -> np.ndarray:
        return np.array([r.rss for r in self.results]) / self.sigma**2

    def trace(self, rule: str, chosen_index: int) -> ScanTrace:
        return ScanTrace(self.entries, chosen_index, rule)


def scan_lambdas(
    y,
    sigma: float,
    delta_lambda: float = 0.005,
    lambda_max: float | None = None,
    opts: CombssOptions | None = None,
    stop: Callable[[float], bool] | None = None,
) -> LambdaScan:
    """Fit on ``k * delta_lambda`` for k = 0, 1, ... up to ``lambda_max``.

    The scan ends early once ``stop(standardized_rss)`` is true.
    """
    y = np.asarray(y, dtype=np.float64)
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    if delta_lambda <= 0:
        raise ValueError("delta_lambda must be positive")
    if lambda_max is None:
        lambda_max = max(default_lambda_max(y), delta_lambda)
    steps = int(math.floor(lambda_max / delta_lambda + 1e-9))
    scan = LambdaScan(float(sigma), float(delta_lambda))
    for k in range(steps + 1):
        res = detect_at_lambda(y, k * delta_lambda, opts)
        scan.results.append(res)
        if stop is not None and stop(res.rss / sigma**2):
            break
    return scan


def select_discrepancy(std_rss: Sequence[float], target: float) -> int:
    """Index whose residual is nearest ``target`` around its first crossing.

    Ties go to the smaller penalty; without a crossing the last index wins.
    """
    std_rss = np.asarray(std_rss)
    above = np.flatnonzero(std_rss >= target)
    if above.size == 0:
        return len(std_rss) - 1
    j = int(above[0])
    if j == 0:
        return 0
    return j - 1 if abs(std_rss[j - 1] - target) <= abs(std_rss[j] - target) else j


def select_confidence(std_rss: Sequence[float], threshold: float) -> int:
    """Last index before the residual first exceeds ``threshold``."""
    std_rss = np.asarray(std_rss)
    above = np.flatnonzero(std_rss > threshold)
    if above.size == 0:
        return len(std_rss) - 1
    return max(int(above[0]) - 1, 0)


def discrepancy_principle(
    y,
    sigma: float,
    delta_lambda: float = 0.005,
    lambda_max: float | None = None,
    opts: CombssOptions | None = None,
) -> tuple[float, DetectionResult, ScanTrace]:
    n = len(y)
    scan = scan_lambdas(y, sigma, delta_lambda, lambda_max, opts, stop=lambda r: r >= n)
    idx = select_discrepancy(scan.standardized_rss(), n)
    res = scan.results[idx]
    return res.lambda_used, res, scan.trace("discrepancy", idx)


def confidence_bound(
    y,
    sigma: float,
    alpha: float = 0.05,
    delta_lambda: float = 0.005,
    lambda_max: float | None = None,
    opts: CombssOptions | None = None,
) -> tuple[float, DetectionResult, ScanTrace]:
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    q = chi2_quantile(1.0 - alpha, len(y))
    scan = scan_lambdas(y, sigma, delta_lambda, lambda_max, opts, stop=lambda r: r > q)
    idx = select_confidence(scan.standardized_rss(), q)
    res = scan.results[idx]
    return res.lambda_used, res, scan.trace("confidence_bound", idx)
