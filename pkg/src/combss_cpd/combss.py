"""Continuous best-subset optimizer specialised to the step design.

Binary selections ``s`` are relaxed to ``t`` in the unit box and the penalised
objective

    f(t) = (1/n) ||y - X T beta_t||^2 + lam * sum(t),
    beta_t = M_t^{-1} T X.T y,   M_t = T X.T X T + n (I - T^2),

is minimised with Adam over ``w`` where ``t = 1 - exp(-w^2)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .linalg import DiagonalScaling, SingularSystem, mt_solve, prefix_sum, suffix_sum

__all__ = [
    "CombssOptions",
    "CombssRun",
    "map_w_to_t",
    "map_t_to_w",
    "beta_tilde",
    "objective",
    "gradient",
    "threshold_t",
    "run_combss",
]


@dataclass(frozen=True)
class CombssOptions:
    learning_rate: float = 0.02
    max_iterations: int = 1000
    convergence_tol: float = 1e-4
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_epsilon: float = 1e-8
    threshold: float = 0.5
    t_init: float = 0.5

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be positive")
        if self.convergence_tol <= 0:
            raise ValueError("convergence_tol must be positive")
        if not 0.0 < self.threshold < 1.0:
            raise ValueError("threshold must lie in (0, 1)")
        # t_init = 0 would start at the stationary point w = 0
        if not 0.0 < self.t_init < 1.0:
            raise ValueError("t_init must lie in (0, 1)")


@dataclass(frozen=True)
class CombssRun:
    lam: float
    t_final: np.ndarray = field(repr=False)
    s: np.ndarray = field(repr=False)
    selected_count: int
    objective_value: float
    iterations_used: int
    converged: bool


def _as_y(y) -> np.ndarray:
    y = np.ascontiguousarray(y, dtype=np.float64)
    if y.ndim != 1 or y.shape[0] < 1:
        raise ValueError("y must be a non-empty 1-d sequence")
    return y


def map_w_to_t(w) -> np.ndarray:
    return _kernels.w_to_t(np.asarray(w, dtype=np.float64))


def map_t_to_w(t) -> np.ndarray:
    """Non-negative preimage of :func:`map_w_to_t`."""
    t = np.asarray(t, dtype=np.float64)
    return np.sqrt(-np.log1p(-t))


def beta_tilde(t, y) -> np.ndarray:
    y = _as_y(y)
    scale = DiagonalScaling.from_t(t)
    return mt_solve(scale, scale.t * suffix_sum(y))


def objective(t, y, lam: float) -> float:
    y = _as_y(y)
    scale = DiagonalScaling.from_t(t)
    beta = mt_solve(scale, scale.t * suffix_sum(y))
    resid = y - prefix_sum(scale.t * beta)
    return float(resid @ resid / y.shape[0] + lam * scale.t.sum())


def gradient(w, y, lam: float) -> np.ndarray:
    """Gradient of ``objective(map_w_to_t(w), y, lam)`` with respect to ``w``."""
    y = _as_y(y)
    w = np.ascontiguousarray(w, dtype=np.float64)
    if w.shape != y.shape:
        raise ValueError("w and y must have the same length")
    grad = np.empty_like(w)
    _, ok = _kernels.value_and_grad_w(w, y, suffix_sum(y), float(lam), grad)
    if not ok:
        raise SingularSystem("near-zero pivot while evaluating the gradient")
    return grad


def threshold_t(t, threshold: float = 0.5) -> np.ndarray:
    """Binary selection: 1 where ``t`` is strictly above ``threshold``."""
    if not 0.0 < threshold < 1.0:
        raise ValueError("threshold must lie in (0, 1)")
    return (np.asarray(t) > threshold).astype(np.int8)


def run_combss(y, lam: float, opts: CombssOptions | None = None) -> CombssRun:
    """Minimise the relaxed objective for one penalty value.

    Non-convergence within ``max_iterations`` is reported through
    ``CombssRun.converged``; only a singular inner system raises.
    """
    opts = opts or CombssOptions()
    y = _as_y(y)
    if y.shape[0] < 2:
        raise ValueError("need at least two observations")
    if lam < 0:
        raise ValueError("lambda must be non-negative")
    w = np.full(y.shape[0], math.sqrt(-math.log1p(-opts.t_init)))
    iters, converged, ok = _kernels.adam_run(
        y,
        float(lam),
        w,
        float(opts.learning_rate),
        int(opts.max_iterations),
        float(opts.convergence_tol),
        float(opts.adam_beta1),
        float(opts.adam_beta2),
        float(opts.adam_epsilon),
    )
    if not ok:
        raise SingularSystem("near-zero pivot during optimisation")
    t = map_w_to_t(w)
    s = threshold_t(t, opts.threshold)
    return CombssRun(
        lam=float(lam),
        t_final=t,
        s=s,
        selected_count=int(s.sum()),
        objective_value=objective(t, y, lam),
        iterations_used=int(iters),
        converged=bool(converged),
    )
