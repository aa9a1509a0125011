"""Linear algebra for the all-ones lower-triangular design matrix.

The design ``X`` (``X[i, j] = 1`` for ``j <= i``) is never formed.  Products
with ``X`` and ``X.T`` are prefix and suffix sums, ``(X.T X)^{-1}`` is the
fixed tridiagonal matrix returned by :func:`xtx_inverse_tridiag`, and systems
in ``M_t = T X.T X T + n (I - T^2)`` are solved in O(n) via the Woodbury
identity and one Thomas sweep.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels

__all__ = [
    "SingularSystem",
    "Tridiagonal",
    "DiagonalScaling",
    "prefix_sum",
    "suffix_sum",
    "gram_apply",
    "xtx_inverse_tridiag",
    "thomas_solve",
    "mt_solve",
    "mt_dense",
]


class SingularSystem(ArithmeticError):
    """A Thomas elimination hit a pivot smaller than the tolerance."""


def _as_vector(v) -> np.ndarray:
    arr = np.ascontiguousarray(v, dtype=np.float64)
    if arr.ndim != 1 or arr.shape[0] < 1:
        raise ValueError("expected a non-empty 1-d sequence")
    return arr


@dataclass(frozen=True)
class Tridiagonal:
    """Three-band square matrix; bands have lengths n-1, n, n-1."""

    lower: np.ndarray
    diag: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = np.ascontiguousarray(self.lower, dtype=np.float64)
        diag = np.ascontiguousarray(self.diag, dtype=np.float64)
        upper = np.ascontiguousarray(self.upper, dtype=np.float64)
        n = diag.shape[0]
        if diag.ndim != 1 or n < 1:
            raise ValueError("diag must be a non-empty 1-d array")
        if lower.shape != (n - 1,) or upper.shape != (n - 1,):
            raise ValueError(
                f"off-diagonal bands must have length {n - 1}, got "
                f"{lower.shape} and {upper.shape}"
            )
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "diag", diag)
        object.__setattr__(self, "upper", upper)

    @property
    def n(self) -> int:
        return self.diag.shape[0]

    def to_dense(self) -> np.ndarray:
        out = np.diag(self.diag)
        if self.n > 1:
            out += np.diag(self.lower, -1) + np.diag(self.upper, 1)
        return out

    def matvec(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=np.float64)
        out = self.diag * v
        out[1:] += self.lower * v[:-1]
        out[:-1] += self.upper * v[1:]
        return out


@dataclass(frozen=True)
class DiagonalScaling:
    """Relaxation vector ``t`` (clamped away from 0 and 1) and ``n (1 - t^2)``."""

    t: np.ndarray
    d_t: np.ndarray

    @classmethod
    def from_t(cls, t) -> "DiagonalScaling":
        t = _kernels.clamp_t(_as_vector(t))
        return cls(t=t, d_t=t.shape[0] * (1.0 - t * t))


def prefix_sum(v) -> np.ndarray:
    """``X @ v``: running sums from the left."""
    return _kernels.prefix_sum(_as_vector(v))


def suffix_sum(v) -> np.ndarray:
    """``X.T @ v``: running sums from the right."""
    return _kernels.suffix_sum(_as_vector(v))


def gram_apply(v) -> np.ndarray:
    """``X.T @ X @ v`` in O(n)."""
    return _kernels.gram_apply(_as_vector(v))


def xtx_inverse_tridiag(n: int) -> Tridiagonal:
    """Closed-form ``(X.T X)^{-1}``: diagonal (1, 2, ..., 2), off-diagonals -1."""
    if n < 1:
        raise ValueError("n must be positive")
    diag = np.full(n, 2.0)
    diag[0] = 1.0
    off = -np.ones(n - 1)
    return Tridiagonal(lower=off, diag=diag, upper=off.copy())


def thomas_solve(m: Tridiagonal, b) -> np.ndarray:
    """Solve ``m @ u = b`` by the Thomas algorithm (no pivoting).

    Raises
    ------
    SingularSystem
        If a pivot falls below 1e-14 in magnitude.
    """
    b = _as_vector(b)
    if b.shape[0] != m.n:
        raise ValueError(f"rhs has length {b.shape[0]}, matrix has order {m.n}")
    out = np.empty(m.n)
    if not _kernels.thomas(m.lower, m.diag, m.upper, b, out):
        raise SingularSystem("near-zero pivot in tridiagonal elimination")
    return out


def mt_solve(t, y_proj) -> np.ndarray:
    """Solve ``(T X.T X T + n (I - T^2)) u = y_proj`` in O(n).

    ``t`` may be a :class:`DiagonalScaling` or a raw sequence; raw values are
    clamped to ``[1e-8, 1 - 1e-8]`` first.
    """
    if not isinstance(t, DiagonalScaling):
        t = DiagonalScaling.from_t(t)
    b = _as_vector(y_proj)
    if b.shape != t.t.shape:
        raise ValueError("t and y_proj must have the same length")
    out = np.empty(b.shape[0])
    if not _kernels.mt_solve(t.t, b, out):
        raise SingularSystem("near-zero pivot in the reduced tridiagonal system")
    return out


def mt_dense(t) -> np.ndarray:
    """Dense ``M_t`` for clamped ``t``; O(n^2) memory, for checks only."""
    t = _kernels.clamp_t(_as_vector(t))
    n = t.shape[0]
    x = np.tril(np.ones((n, n)))
    xt = x * t
    return xt.T @ xt + n * np.diag(1.0 - t * t)
