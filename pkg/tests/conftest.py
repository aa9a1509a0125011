import itertools

import numpy as np
import pytest


def design(n):
    return np.tril(np.ones((n, n)))


def dense_restricted_rss(y, s):
    """RSS of least squares on the selected columns of the dense design."""
    y = np.asarray(y, dtype=float)
    cols = np.flatnonzero(s)
    if cols.size == 0:
        return float(y @ y)
    xs = design(len(y))[:, cols]
    coef, *_ = np.linalg.lstsq(xs, y, rcond=None)
    r = y - xs @ coef
    return float(r @ r)


def best_subset(y, lam, max_size):
    """Exhaustive minimiser of rss(s)/n + lam*|s| over |s| <= max_size."""
    n = len(y)
    best = (dense_restricted_rss(y, np.zeros(n)) / n, ())
    for k in range(1, max_size + 1):
        for cols in itertools.combinations(range(n), k):
            s = np.zeros(n)
            s[list(cols)] = 1
            val = dense_restricted_rss(y, s) / n + lam * k
            if val < best[0] - 1e-12:
                best = (val, tuple(c + 1 for c in cols))
    return best


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
