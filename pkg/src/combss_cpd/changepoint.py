"""Selections, segment fits and post-treatment for mean change points.

Indices are 1-based throughout to match the usual change-point convention:
selecting index ``j`` means the mean may jump between ``y[j-1]`` and
``y[j]`` (1-based), and index 1 is the artificial change point at the start
of the sequence.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass

import numpy as np

__all__ = [
    "Segment",
    "Segmentation",
    "DetectionResult",
    "segments_from_s",
    "restricted_ols",
    "s_from_tau",
    "merge_close",
    "apply_merge",
]


@dataclass(frozen=True)
class Segment:
    start: int  # 1-based, inclusive
    stop: int  # 1-based, inclusive
    zero_mean: bool


@dataclass(frozen=True)
class Segmentation:
    change_indices: tuple[int, ...]
    segments: tuple[Segment, ...]


@dataclass
class DetectionResult:
    tau_hat: list[int]
    includes_tau0: bool
    beta_hat: list[float]
    mu_hat: list[float]
    rss: float
    lambda_used: float | None
    k_hat: int

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, data: dict) -> "DetectionResult":
        return cls(**data)


def _as_s(s, n: int | None = None) -> np.ndarray:
    s = np.asarray(s).astype(bool)
    if s.ndim != 1 or s.shape[0] < 1:
        raise ValueError("s must be a non-empty 1-d sequence")
    if n is not None and s.shape[0] != n:
        raise ValueError(f"s has length {s.shape[0]}, expected {n}")
    return s


def segments_from_s(s) -> Segmentation:
    s = _as_s(s)
    n = s.shape[0]
    starts = [int(i) + 1 for i in np.flatnonzero(s)]
    bounds = ([] if s[0] else [1]) + starts
    segments = []
    for k, start in enumerate(bounds):
        stop = bounds[k + 1] - 1 if k + 1 < len(bounds) else n
        segments.append(Segment(start, stop, zero_mean=(k == 0 and not s[0])))
    return Segmentation(tuple(starts), tuple(segments))


def s_from_tau(tau, n: int, include_tau0: bool = False) -> np.ndarray:
    s = np.zeros(n, dtype=np.int8)
    idx = np.asarray(list(tau), dtype=int)
    if idx.size and (idx.min() < 1 or idx.max() > n):
        raise ValueError("change indices must lie in 1..n")
    s[idx - 1] = 1
    if include_tau0:
        s[0] = 1
    return s


def restricted_ols(y, s, lambda_used: float | None = None) -> DetectionResult:
    """Least-squares fit using only the step columns selected by ``s``.

    Projection onto step functions is segment-wise averaging, so this is
    O(n) with no factorisation.  A leading segment that starts before the
    first selected column is held at zero.
    """
    y = np.asarray(y, dtype=np.float64)
    s = _as_s(s, y.shape[0])
    csum = np.concatenate(([0.0], np.cumsum(y)))
    mu = np.zeros_like(y)
    for seg in segments_from_s(s).segments:
        if not seg.zero_mean:
            lo, hi = seg.start - 1, seg.stop
            mu[lo:hi] = (csum[hi] - csum[lo]) / (hi - lo)
    sel = np.flatnonzero(s)
    prev = np.concatenate(([0.0], mu[:-1]))
    beta = mu[sel] - prev[sel]
    resid = y - mu
    tau_hat = [int(i) + 1 for i in sel if i > 0]
    return DetectionResult(
        tau_hat=tau_hat,
        includes_tau0=bool(s[0]),
        beta_hat=[float(b) for b in beta],
        mu_hat=[float(m) for m in mu],
        rss=float(resid @ resid),
        lambda_used=None if lambda_used is None else float(lambda_used),
        k_hat=len(tau_hat),
    )


def merge_close(tau_hat, min_gap: int) -> list[int]:
    """Collapse runs of estimates closer than ``min_gap`` to their lower median."""
    if min_gap < 1:
        raise ValueError("min_gap must be a positive integer")
    points = sorted(int(x) for x in tau_hat)
    merged: list[int] = []
    cluster: list[int] = []
    for p in points:
        if cluster and p - cluster[-1] >= min_gap:
            merged.append(_lower_median(cluster))
            cluster = []
        cluster.append(p)
    if cluster:
        merged.append(_lower_median(cluster))
    return merged


def _lower_median(values: list[int]) -> int:
    m = len(values)
    return (values[(m - 1) // 2] + values[m // 2]) // 2


def apply_merge(y, result: DetectionResult, min_gap: int) -> DetectionResult:
    """Refit after merging nearby change points of ``result``."""
    y = np.asarray(y, dtype=np.float64)
    tau = merge_close(result.tau_hat, min_gap)
    s = s_from_tau(tau, y.shape[0], include_tau0=result.includes_tau0)
    return restricted_ols(y, s, lambda_used=result.lambda_used)
