"""Simulation of the four benchmark processes used in the experiments.

All models are strictly stationary with mean zero:

* Model I   -- linear MA(1) driven by centered exponential noise,
* Model II  -- MA(1) with rescaled ARCH(1) innovations,
* Model III -- bilinear model built from products of consecutive shocks,
* Model IV  -- nonlinear sine autoregression.

The recursions are exposed as pure filters acting on an innovation array so
they can be exercised with deterministic stubs; `simulate_model` wires them
to seeded streams and burn-in handling.  Batched simulation vectorizes the
time recursion across replications while keeping one keyed stream per
replication, so Monte-Carlo replications are order-independent.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .rng import substream

__all__ = [
    "InnovationSpec",
    "ModelSpec",
    "SeriesSample",
    "generate_innovations",
    "simulate_model",
    "simulate_batch",
]

INNOVATION_KINDS = ("standard-normal", "centered-exponential")
MODEL_IDS = ("I", "II", "III", "IV")

# Exact pre-samples consumed by the finite filters.
_MODEL_LEAD = {"I": 1, "II": 1, "III": 2, "IV": 0}


@dataclass(frozen=True)
class InnovationSpec:
    """Distribution of the i.i.d. driving noise (mean 0, variance 1)."""

    kind: str = "standard-normal"

    def __post_init__(self):
        if self.kind not in INNOVATION_KINDS:
            raise ValueError(f"unknown innovation kind {self.kind!r}")


def _default_innovation(model_id: str) -> InnovationSpec:
    if model_id == "I":
        return InnovationSpec("centered-exponential")
    return InnovationSpec("standard-normal")


@dataclass(frozen=True)
class ModelSpec:
    """Benchmark model with its parameters and burn-in policy."""

    model_id: str
    theta: float = -0.7
    phi: float = -0.7
    a0: float = 0.3
    a1: float = 0.5
    innovation: InnovationSpec | None = None
    burn_in: int = 500

    def __post_init__(self):
        if self.model_id not in MODEL_IDS:
            raise ValueError(f"unknown model {self.model_id!r}")
        if self.a0 <= 0:
            raise ValueError("a0 must be positive")
        if not 0 <= self.a1 < 1:
            raise ValueError("a1 must lie in [0, 1) for a stationary ARCH part")
        if self.burn_in < 100:
            raise ValueError("burn_in must be at least 100")
        if self.innovation is None:
            object.__setattr__(self, "innovation", _default_innovation(self.model_id))


@dataclass
class SeriesSample:
    """An observed or simulated series, with centering bookkeeping."""

    values: np.ndarray
    centered: bool = False

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 1 or self.values.size < 4:
            raise ValueError("series must be one-dimensional with length >= 4")

    def __len__(self) -> int:
        return self.values.size

    def center(self) -> "SeriesSample":
        if self.centered:
            return self
        return SeriesSample(self.values - self.values.mean(), centered=True)


def generate_innovations(spec: InnovationSpec, count: int, rng: np.random.Generator) -> np.ndarray:
    """Draw `count` i.i.d. innovations from the given distribution."""
    if count < 1:
        raise ValueError("count must be positive")
    if spec.kind == "standard-normal":
        return rng.standard_normal(count)
    return rng.standard_exponential(count) - 1.0


# ---------------------------------------------------------------------------
# Pure filters.  Each maps an innovation array (rows are replications) to the
# model output, dropping the leading pre-samples the recursion consumes.
# ---------------------------------------------------------------------------

def ma1_filter(eps: np.ndarray, theta: float) -> np.ndarray:
    eps = np.atleast_2d(eps)
    return eps[:, 1:] + theta * eps[:, :-1]


def bilinear_filter(eps: np.ndarray, theta: float) -> np.ndarray:
    eps = np.atleast_2d(eps)
    z = eps[:, 1:] * eps[:, :-1]
    return z[:, 1:] + theta * z[:, :-1]


def arch_ma_filter(eps: np.ndarray, theta: float, a0: float, a1: float) -> np.ndarray:
    """MA(1) of v_t = w_t / sqrt(0.6) where w is ARCH(1) with parameters (a0, a1)."""
    eps = np.atleast_2d(eps)
    reps, steps = eps.shape
    w = np.empty_like(eps)
    prev = np.zeros(reps)
    for t in range(steps):
        prev = eps[:, t] * np.sqrt(a0 + a1 * prev * prev)
        w[:, t] = prev
    v = w / np.sqrt(0.6)
    return v[:, 1:] + theta * v[:, :-1]


def sine_ar_filter(eps: np.ndarray, phi: float) -> np.ndarray:
    eps = np.atleast_2d(eps)
    reps, steps = eps.shape
    x = np.empty_like(eps)
    prev = np.zeros(reps)
    for t in range(steps):
        prev = phi * np.sin(prev) + eps[:, t]
        x[:, t] = prev
    return x


def _run_model(spec: ModelSpec, n: int, eps: np.ndarray) -> np.ndarray:
    if spec.model_id == "I":
        out = ma1_filter(eps, spec.theta)
    elif spec.model_id == "II":
        out = arch_ma_filter(eps, spec.theta, spec.a0, spec.a1)
    elif spec.model_id == "III":
        out = bilinear_filter(eps, spec.theta)
    else:
        out = sine_ar_filter(eps, spec.phi)
    return out[:, -n:]


def _innovation_count(spec: ModelSpec, n: int) -> int:
    lead = _MODEL_LEAD[spec.model_id]
    if spec.model_id in ("I", "III"):
        # Exact finite filters: nothing beyond the lead pre-samples matters.
        return n + lead
    return spec.burn_in + n + lead


def simulate_model(spec: ModelSpec, n: int, rng: np.random.Generator) -> SeriesSample:
    """Simulate `n` values from the model, discarding burn-in."""
    if n < 4:
        raise ValueError("n must be at least 4")
    eps = generate_innovations(spec.innovation, _innovation_count(spec, n), rng)
    values = _run_model(spec, n, eps[None, :])[0]
    return SeriesSample(values.copy(), centered=False)


def simulate_batch(spec: ModelSpec, n: int, reps: int, seed: int, key=("data",)) -> np.ndarray:
    """Simulate `reps` independent series as rows of a (reps, n) array.

    Row r is drawn from the stream keyed by ``(seed, *key, r)`` and is
    bit-identical to ``simulate_model(spec, n, substream(seed, *key, r))``.
    """
    if reps < 1:
        raise ValueError("reps must be positive")
    count = _innovation_count(spec, n)
    eps = np.empty((reps, count))
    for r in range(reps):
        eps[r] = generate_innovations(spec.innovation, count, substream(seed, *key, r))
    return _run_model(spec, n, eps)
