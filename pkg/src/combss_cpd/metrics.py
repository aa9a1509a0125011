"""Scoring estimated change points against the truth."""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

__all__ = ["EvalReport", "f1_score", "hausdorff", "evaluate"]


@dataclass(frozen=True)
class EvalReport:
    precision: float
    recall: float
    f1: float
    hausdorff: float
    hausdorff_standardized: float

    def to_json(self) -> str:
        # math.inf is not valid JSON; emit null instead
        d = {k: (None if math.isinf(v) else v) for k, v in asdict(self).items()}
        return json.dumps(d)


def f1_score(truth, estimate, tol: float) -> tuple[float, float, float]:
    """Precision, recall and F1 under one-to-one matching within ``tol``.

    Candidate pairs are taken closest first (ties by truth index, then
    estimate index) and each point is used at most once.
    """
    truth = sorted(truth)
    estimate = sorted(estimate)
    if not truth and not estimate:
        return 1.0, 1.0, 1.0
    pairs = sorted(
        (abs(t - e), i, j)
        for i, t in enumerate(truth)
        for j, e in enumerate(estimate)
        if abs(t - e) <= tol
    )
    used_t, used_e = set(), set()
    tp = 0
    for _, i, j in pairs:
        if i not in used_t and j not in used_e:
            used_t.add(i)
            used_e.add(j)
            tp += 1
    precision = tp / len(estimate) if estimate else 0.0
    recall = tp / len(truth) if truth else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return precision, recall, f1


def _directed(a, b) -> float:
    return max(min(abs(x - y) for y in b) for x in a)


def hausdorff(truth, estimate, directed: bool = False) -> float:
    """Symmetric Hausdorff distance between two index sets.

    ``directed=True`` gives only the truth-to-estimate part.  Both empty is
    0; exactly one empty is ``math.inf``.
    """
    truth, estimate = list(truth), list(estimate)
    if not truth and not estimate:
        return 0.0
    if not truth or not estimate:
        return math.inf
    d = _directed(truth, estimate)
    if not directed:
        d = max(d, _directed(estimate, truth))
    return float(d)


def evaluate(truth, estimate, min_gap: int, directed: bool = False) -> EvalReport:
    """Score with the ``L / 20`` tolerance and ``L``-standardised Hausdorff."""
    p, r, f1 = f1_score(truth, estimate, min_gap / 20.0)
    h = hausdorff(truth, estimate, directed=directed)
    return EvalReport(p, r, f1, h, h / min_gap)
