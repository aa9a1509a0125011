"""Multiple mean change-point detection via continuous best-subset selection."""
from ._accel import NUMBA_ENABLED
from .changepoint import DetectionResult, merge_close, restricted_ols
from .combss import CombssOptions, CombssRun, run_combss
from .lambda_select import (
    BisectionFailure,
    bisection_for_k,
    chi2_quantile,
    confidence_bound,
    discrepancy_principle,
)
from .linalg import SingularSystem
from .metrics import f1_score, hausdorff
from .simgen import SignalSpec, experiment_config, simulate

__version__ = "0.1.0"

__all__ = [
    "NUMBA_ENABLED",
    "DetectionResult",
    "merge_close",
    "restricted_ols",
    "CombssOptions",
    "CombssRun",
    "run_combss",
    "BisectionFailure",
    "bisection_for_k",
    "chi2_quantile",
    "confidence_bound",
    "discrepancy_principle",
    "SingularSystem",
    "f1_score",
    "hausdorff",
    "SignalSpec",
    "experiment_config",
    "simulate",
]
