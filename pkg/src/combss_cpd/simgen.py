"""Staircase mean sequences, seeded Gaussian noise and experiment presets."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .combss import CombssOptions

__all__ = [
    "SignalSpec",
    "ExperimentConfig",
    "UnknownExperiment",
    "EXPERIMENTS",
    "staircase_mu",
    "normal_noise",
    "simulate",
    "derive_seed",
    "experiment_config",
]

EXPERIMENTS = ("A1", "A2", "B1", "B2")
MODES = ("known_k", "dp", "cb", "dp_and_cb")


class UnknownExperiment(ValueError):
    pass


@dataclass(frozen=True)
class SignalSpec:
    """Piecewise-constant mean with equal upward jumps of ``delta * sigma``.

    ``tau`` holds 1-based change locations; the artificial change point at
    index 1 is implicit and counts towards the minimal spacing ``L``.
    """

    n: int
    tau: tuple[int, ...]
    delta: float
    sigma: float = 1.0
    mu0: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "tau", tuple(int(x) for x in self.tau))
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")
        if self.delta < 0:
            raise ValueError("delta must be non-negative")
        if any(x < 2 or x > self.n for x in self.tau):
            raise ValueError("change points must lie in 2..n")
        if any(b <= a for a, b in zip(self.tau, self.tau[1:])):
            raise ValueError("change points must be strictly increasing")
        if self.tau and self.min_gap < 2:
            raise ValueError("minimal spacing L must be at least 2")

    @property
    def k(self) -> int:
        return len(self.tau)

    @property
    def min_gap(self) -> int:
        """L: smallest spacing between consecutive change points, from index 1."""
        if not self.tau:
            return self.n
        pts = (1,) + self.tau
        return min(b - a for a, b in zip(pts, pts[1:]))

    @property
    def signal_strength(self) -> float:
        return self.delta**2 * self.min_gap

    def to_dict(self) -> dict:
        d = asdict(self)
        d["tau"] = list(self.tau)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "SignalSpec":
        unknown = set(data) - {"n", "tau", "delta", "sigma", "mu0"}
        if unknown:
            raise ValueError(f"unknown SignalSpec fields: {sorted(unknown)}")
        return cls(
            n=int(data["n"]),
            tau=tuple(data["tau"]),
            delta=float(data["delta"]),
            sigma=float(data.get("sigma", 1.0)),
            mu0=float(data.get("mu0", 0.0)),
        )


def staircase_mu(spec: SignalSpec) -> np.ndarray:
    steps = np.zeros(spec.n)
    for tau in spec.tau:
        steps[tau - 1 :] += 1.0
    return spec.mu0 + spec.delta * spec.sigma * steps


def derive_seed(base_seed: int, replication: int) -> int:
    """Independent per-replication seed.

    The pair is hashed with numpy's ``SeedSequence`` (``entropy=base_seed``,
    ``spawn_key=(replication,)``) and the first 64-bit word of its state is
    used, so any replication can be regenerated on its own.
    """
    ss = np.random.SeedSequence(entropy=int(base_seed), spawn_key=(int(replication),))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def normal_noise(n: int, seed: int) -> np.ndarray:
    """Standard normal draws via Box-Muller over a Philox counter stream."""
    gen = np.random.Generator(np.random.Philox(key=int(seed)))
    m = (n + 1) // 2
    u1 = 1.0 - gen.random(m)  # (0, 1]
    u2 = gen.random(m)
    r = np.sqrt(-2.0 * np.log(u1))
    z = np.empty(2 * m)
    z[0::2] = r * np.cos(2.0 * np.pi * u2)
    z[1::2] = r * np.sin(2.0 * np.pi * u2)
    return z[:n]


def simulate(spec: SignalSpec, seed: int, noise_scale: float = 1.0) -> np.ndarray:
    """``staircase_mu(spec)`` plus iid N(0, sigma^2) noise.

    ``noise_scale`` multiplies the noise; 0 returns the mean exactly.
    """
    mu = staircase_mu(spec)
    if noise_scale == 0:
        return mu
    return mu + noise_scale * spec.sigma * normal_noise(spec.n, seed)


@dataclass(frozen=True)
class ExperimentConfig:
    name: str
    scale_axis: str
    scale_values: tuple[float, ...]
    base_spec: SignalSpec
    replications: int = 100
    mode: str = "known_k"
    base_seed: int = 0
    tolerance_rule: str = "L/20"
    merge_gap: int | None = None
    alpha: float = 0.05
    delta_lambda: float = 0.005
    noise_scale: float = 1.0
    combss: CombssOptions = field(default_factory=CombssOptions)

    def __post_init__(self):
        object.__setattr__(self, "scale_values", tuple(float(v) for v in self.scale_values))
        if self.scale_axis not in ("delta", "L"):
            raise ValueError("scale_axis must be 'delta' or 'L'")
        if not self.scale_values:
            raise ValueError("scale_values must be non-empty")
        if any(b <= a for a, b in zip(self.scale_values, self.scale_values[1:])):
            raise ValueError("scale_values must be strictly increasing")
        if self.replications < 1:
            raise ValueError("replications must be positive")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.tolerance_rule != "L/20":
            raise ValueError("only the 'L/20' tolerance rule is supported")
        if self.merge_gap is not None and self.merge_gap < 1:
            raise ValueError("merge_gap must be a positive integer")

    @property
    def merge_post_treatment(self) -> bool:
        return self.merge_gap is not None

    def spec_for(self, scale: float) -> SignalSpec:
        if self.scale_axis == "delta":
            return replace(self.base_spec, delta=float(scale))
        gap = int(round(scale))
        k = self.base_spec.k
        return replace(
            self.base_spec,
            n=(k + 1) * gap,
            tau=tuple(j * gap + 1 for j in range(1, k + 1)),
        )

    def tolerance(self, spec: SignalSpec) -> float:
        return spec.min_gap / 20.0


def _grid(start: float, stop: float, step: float) -> tuple[float, ...]:
    count = int(round((stop - start) / step)) + 1
    return tuple(round(start + i * step, 10) for i in range(count))


def experiment_config(name: str, **overrides) -> ExperimentConfig:
    """Preset grids for the four simulation studies.

    A1/A2 know the number of change points, B1/B2 select the penalty by
    both scan rules.  Keyword arguments replace ``ExperimentConfig`` fields;
    ``delta`` replaces the fixed jump size of the L-scaling presets.
    """
    name = name.upper()
    delta = overrides.pop("delta", 2.0)
    if name == "A1":
        cfg = ExperimentConfig(
            name="A1",
            scale_axis="delta",
            scale_values=_grid(0.25, 4.0, 0.25),
            base_spec=SignalSpec(n=150, tau=(31, 61, 91, 121), delta=1.0),
            mode="known_k",
        )
    elif name == "A2":
        cfg = ExperimentConfig(
            name="A2",
            scale_axis="L",
            scale_values=_grid(15, 65, 5),
            base_spec=SignalSpec(n=150, tau=(31, 61, 91, 121), delta=delta),
            mode="known_k",
        )
    elif name == "B1":
        cfg = ExperimentConfig(
            name="B1",
            scale_axis="delta",
            scale_values=_grid(1.0, 4.0, 0.5),
            base_spec=SignalSpec(n=100, tau=(26, 51, 76), delta=1.0),
            mode="dp_and_cb",
        )
    elif name == "B2":
        cfg = ExperimentConfig(
            name="B2",
            scale_axis="L",
            scale_values=_grid(10, 50, 5),
            base_spec=SignalSpec(n=100, tau=(26, 51, 76), delta=delta),
            mode="dp_and_cb",
        )
    else:
        raise UnknownExperiment(f"unknown experiment {name!r}; expected one of {EXPERIMENTS}")
    return replace(cfg, **overrides) if overrides else cfg
