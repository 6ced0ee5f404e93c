"""Monte-Carlo experiment engine comparing the bootstrap procedures.

Two experiment families are provided: distribution-distance curves, which
score each method's bootstrap distribution against a large simulated
reference sample of the target statistic with the Wasserstein-1 distance
across a grid of block lengths, and standard-deviation tables for the
first-order autocorrelation, which report the closed-form block-bootstrap
studentizer against the reference standard deviation.

Outer replications carry keyed streams (seed, rep, method, b), so results
are identical for any worker count and adding a method or block length
never perturbs the others.
"""

from __future__ import annotations

import csv
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np

from .bootstrap import (
    BootstrapOptions,
    cbp_closed_form_variance,
    cbp_draws,
    hybrid_draws,
    mpb_draws,
)
from .dgp import ModelSpec, simulate_batch
from .rng import substream
from .spectral import kernel_smoothed_estimate, parzen_lag_window, subsample_periodograms
from .stats import CosLag, PhiFunction, sample_statistic

__all__ = [
    "ExperimentConfig",
    "DistributionExperimentResult",
    "StdExperimentResult",
    "d1_distance",
    "model_targets",
    "reference_distribution",
    "run_distribution_experiment",
    "run_std_experiment",
    "write_csv",
    "preset_configs",
]

METHODS = ("mpb", "cbp", "hpb")

DIST_CSV_HEADER = ("model", "method", "n", "b", "mean_d1", "se_d1")
STD_CSV_HEADER = ("model", "n", "est_exact", "b", "mean", "std")


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything one experiment run depends on, seed included."""

    model: ModelSpec
    n: int
    phi: PhiFunction = CosLag(1)
    kind: str = "mean"
    methods: tuple = METHODS
    b_values: tuple = (10, 20, 30)
    M: int = 1000
    R: int = 200
    ref_reps: int = 10_000
    density_method: str = "parzen"
    density_param: float = 25
    seed: int = 0
    plugin_samples: int = 10_000_000

    def __post_init__(self):
        if self.kind not in ("mean", "ratio"):
            raise ValueError("kind must be 'mean' or 'ratio'")
        unknown = set(self.methods) - set(METHODS)
        if unknown:
            raise ValueError(f"unknown methods: {sorted(unknown)}")
        if min(self.M, self.R, self.ref_reps) < 1:
            raise ValueError("all replication counts must be positive")


def _thread_count(threads: int | None) -> int:
    if threads is not None:
        return max(1, int(threads))
    return max(1, int(os.environ.get("FDBOOT_THREADS", "1")))


def _density_estimate(values, config: ExperimentConfig):
    if config.density_method == "parzen":
        return parzen_lag_window(values, int(config.density_param), center=False)
    if config.density_method == "kernel":
        return kernel_smoothed_estimate(values, float(config.density_param), center=False)
    raise ValueError(f"unknown density method {config.density_method!r}")


# ---------------------------------------------------------------------------
# Wasserstein-1 distance between empirical distributions
# ---------------------------------------------------------------------------

def d1_distance(a, b) -> float:
    """Exact integral of |F^{-1} - G^{-1}| for two empirical samples.

    The unit interval is partitioned at every jump of either empirical
    quantile function; both quantile functions are constant on each cell.
    """
    a = np.sort(np.asarray(a, dtype=float).ravel())
    b = np.sort(np.asarray(b, dtype=float).ravel())
    if a.size == 0 or b.size == 0:
        raise ValueError("empty sample")
    cuts = np.union1d(np.arange(1, a.size + 1) / a.size,
                      np.arange(1, b.size + 1) / b.size)
    lower = np.concatenate([[0.0], cuts[:-1]])
    mid = 0.5 * (lower + cuts)
    ia = np.minimum(np.ceil(mid * a.size).astype(int) - 1, a.size - 1)
    ib = np.minimum(np.ceil(mid * b.size).astype(int) - 1, b.size - 1)
    return float((cuts - lower) @ np.abs(a[ia] - b[ib]))


# ---------------------------------------------------------------------------
# Targets and reference distributions
# ---------------------------------------------------------------------------

@lru_cache(maxsize=32)
def _plugin_moments(spec: ModelSpec, samples: int, seed: int) -> tuple:
    """Long-run plug-in estimates of (gamma(0), gamma(1)) for nonlinear models."""
    span = 20_000
    reps = max(1, int(np.ceil(samples / span)))
    rows = simulate_batch(spec, span, reps, seed, key=("plugin-truth",))
    rows = rows - rows.mean(axis=1, keepdims=True)
    g0 = float(np.mean(np.sum(rows * rows, axis=1) / span))
    g1 = float(np.mean(np.sum(rows[:, :-1] * rows[:, 1:], axis=1) / span))
    return g0, g1


def model_targets(spec: ModelSpec, plugin_samples: int = 10_000_000, seed: int = 0) -> dict:
    """True gamma(0), gamma(1), rho(1); closed form for the linear model,
    long-run plug-in simulation otherwise."""
    if spec.model_id == "I":
        g0 = 1.0 + spec.theta ** 2
        g1 = spec.theta
    else:
        g0, g1 = _plugin_moments(spec, plugin_samples, seed)
    return {"gamma0": g0, "gamma1": g1, "rho1": g1 / g0}


def _statistic_rows(rows: np.ndarray, phi: PhiFunction, kind: str) -> np.ndarray:
    """Per-row sample statistic for batched simulations (cosine fast path)."""
    if isinstance(phi, CosLag) and phi.h == 1:
        centered = rows - rows.mean(axis=1, keepdims=True)
        n = rows.shape[1]
        g1 = np.sum(centered[:, :-1] * centered[:, 1:], axis=1) / n
        if kind == "mean":
            return g1
        g0 = np.sum(centered * centered, axis=1) / n
        return g1 / g0
    return np.array([sample_statistic(row, phi, kind) for row in rows])


def _reference_raw(config: ExperimentConfig) -> np.ndarray:
    """sqrt(n) * statistic over ref_reps independent simulations (uncentered).

    Rows keep their keyed per-replication streams but the model recursions
    run vectorized across each chunk of replications.
    """
    out = np.empty(config.ref_reps)
    span = 5000
    done = 0
    while done < config.ref_reps:
        take = min(span, config.ref_reps - done)
        rows = simulate_batch(config.model, config.n, take, config.seed,
                              key=("reference", done))
        out[done:done + take] = _statistic_rows(rows, config.phi, config.kind)
        done += take
    return np.sqrt(config.n) * out


def reference_distribution(config: ExperimentConfig) -> np.ndarray:
    """Sorted sample of sqrt(n) * (statistic - target), the 'exact' law."""
    raw = _reference_raw(config)
    targets = model_targets(config.model, config.plugin_samples, config.seed)
    if isinstance(config.phi, CosLag) and config.phi.h == 1:
        target = targets["gamma1"] if config.kind == "mean" else targets["rho1"]
    else:
        raise ValueError("reference centering is only defined for the lag-one statistic")
    return np.sort(raw - np.sqrt(config.n) * target)


# ---------------------------------------------------------------------------
# Distribution-distance experiment
# ---------------------------------------------------------------------------

@dataclass
class DistributionExperimentResult:
    config: ExperimentConfig
    rows: list
    per_rep: dict  # (method, b or None) -> array of d1 values, length R

    def batched_se(self, key, batches: int = 20) -> float:
        """Standard error from batch means of the per-replication distances."""
        values = self.per_rep[key]
        parts = np.array_split(values, min(batches, values.size))
        means = np.array([p.mean() for p in parts])
        return float(means.std(ddof=1) / np.sqrt(means.size))


def _method_pairs(config: ExperimentConfig) -> list:
    pairs = []
    for method in config.methods:
        if method == "mpb":
            pairs.append((method, None))
        else:
            pairs.extend((method, int(b)) for b in config.b_values)
    return pairs


def _distribution_rep(config: ExperimentConfig, rep: int, row: np.ndarray,
                      reference: np.ndarray) -> dict:
    values = row - row.mean()
    f_hat = _density_estimate(values, config)
    matrices = {int(b): subsample_periodograms(values, int(b), center=False)
                for b in config.b_values if set(config.methods) & {"cbp", "hpb"}}
    out = {}
    for method, b in _method_pairs(config):
        opt_b = b if b is not None else int(config.b_values[0])
        options = BootstrapOptions(config.n, opt_b, config.M, seed=config.seed)
        rng = substream(config.seed, "rep", rep, method, 0 if b is None else b)
        if method == "mpb":
            draws = mpb_draws(values, f_hat, config.phi, options, rng=rng).draws
        elif method == "cbp":
            draws = cbp_draws(values, f_hat, config.phi, options, kind=config.kind,
                              rng=rng, matrix=matrices[b]).draws
        else:
            draws = hybrid_draws(values, f_hat, config.phi, options, kind=config.kind,
                                 rng=rng, matrix=matrices[b]).draws
        out[(method, b)] = d1_distance(draws, reference)
    return out


def run_distribution_experiment(config: ExperimentConfig,
                                threads: int | None = None) -> DistributionExperimentResult:
    """Average distance between bootstrap and reference distributions per method and b."""
    reference = reference_distribution(config)
    rows_data = simulate_batch(config.model, config.n, config.R, config.seed, key=("rep-data",))
    workers = _thread_count(threads)
    results = [None] * config.R
    if workers == 1:
        for rep in range(config.R):
            results[rep] = _distribution_rep(config, rep, rows_data[rep], reference)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for rep, res in enumerate(pool.map(
                    lambda r: _distribution_rep(config, r, rows_data[r], reference),
                    range(config.R))):
                results[rep] = res

    per_rep = {key: np.array([results[r][key] for r in range(config.R)])
               for key in _method_pairs(config)}
    rows = []
    result = DistributionExperimentResult(config, rows, per_rep)
    for (method, b) in _method_pairs(config):
        values = per_rep[(method, b)]
        rows.append({
            "model": config.model.model_id,
            "method": method,
            "n": config.n,
            "b": "" if b is None else b,
            "mean_d1": float(values.mean()),
            "se_d1": result.batched_se((method, b)),
        })
    return result


# ---------------------------------------------------------------------------
# Standard-deviation table experiment
# ---------------------------------------------------------------------------

@dataclass
class StdExperimentResult:
    config: ExperimentConfig
    est_exact: float
    rows: list
    per_rep: dict  # b -> array of studentizer estimates, length R


def _std_rep(config: ExperimentConfig, rep: int, row: np.ndarray, estimator: str) -> dict:
    values = row - row.mean()
    f_hat = _density_estimate(values, config)
    out = {}
    for b in config.b_values:
        b = int(b)
        matrix = subsample_periodograms(values, b, center=False)
        options = BootstrapOptions(config.n, b, config.M, seed=config.seed)
        if estimator == "closed-form":
            report = cbp_closed_form_variance(values, f_hat, config.phi, options,
                                              kind=config.kind, matrix=matrix)
            out[b] = float(np.sqrt(report.var_star))
        else:
            rng = substream(config.seed, "rep", rep, "cbp", b)
            draws = cbp_draws(values, f_hat, config.phi, options, kind=config.kind,
                              rng=rng, matrix=matrix).draws
            out[b] = float(draws.std(ddof=1))
    return out


def run_std_experiment(config: ExperimentConfig, threads: int | None = None,
                       estimator: str = "closed-form") -> StdExperimentResult:
    """Mean and spread of the bootstrap standard-deviation estimate across replications.

    The reference column is the standard deviation of the scaled statistic
    over ref_reps fresh simulations; the per-replication estimate is either
    the closed-form studentizer (default) or the Monte-Carlo standard
    deviation of M bootstrap draws.
    """
    if estimator not in ("closed-form", "monte-carlo"):
        raise ValueError("estimator must be 'closed-form' or 'monte-carlo'")
    est_exact = float(_reference_raw(config).std(ddof=1))
    rows_data = simulate_batch(config.model, config.n, config.R, config.seed, key=("rep-data",))
    workers = _thread_count(threads)
    results = [None] * config.R
    if workers == 1:
        for rep in range(config.R):
            results[rep] = _std_rep(config, rep, rows_data[rep], estimator)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for rep, res in enumerate(pool.map(
                    lambda r: _std_rep(config, r, rows_data[r], estimator), range(config.R))):
                results[rep] = res

    per_rep = {int(b): np.array([results[r][int(b)] for r in range(config.R)])
               for b in config.b_values}
    rows = []
    for b in config.b_values:
        values = per_rep[int(b)]
        rows.append({
            "model": config.model.model_id,
            "n": config.n,
            "est_exact": est_exact,
            "b": int(b),
            "mean": float(values.mean()),
            "std": float(values.std(ddof=1)),
        })
    return StdExperimentResult(config, est_exact, rows, per_rep)


# ---------------------------------------------------------------------------
# Output and presets
# ---------------------------------------------------------------------------

def write_csv(path, header, rows) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(header))
        writer.writeheader()
        for row in rows:
            writer.writerow(row)


_PARZEN_LAG = {150: 15, 300: 20, 500: 25, 2000: 25}

_TABLE_B = {150: (18, 20, 22), 300: (20, 22, 24), 500: (20, 25, 30)}


def _figure_b_grid(n: int) -> tuple:
    if n <= 300:
        return (5, 10, 15, 20, 25, 30)
    return (10, 20, 30, 50, 70, 100)


def preset_configs(name: str, scale: str = "desk", seed: int = 0) -> list:
    """Experiment configurations mirroring the published simulation designs.

    'figure1'/'figure2' sweep distribution distances over block lengths for
    the lag-one autocovariance (models I-II and III-IV); 'table1' tabulates
    bootstrap standard deviations of the lag-one autocorrelation.  The desk
    scale trims the replication counts to a few minutes of runtime.
    """
    if scale not in ("desk", "paper"):
        raise ValueError("scale must be 'desk' or 'paper'")
    desk = scale == "desk"
    configs = []
    if name in ("figure1", "figure2"):
        models = ("I", "II") if name == "figure1" else ("III", "IV")
        for model_id in models:
            for n in (150, 2000):
                configs.append(ExperimentConfig(
                    model=ModelSpec(model_id),
                    n=n,
                    phi=CosLag(1),
                    kind="mean",
                    methods=METHODS,
                    b_values=_figure_b_grid(n),
                    M=400 if desk else 1000,
                    R=50 if desk else 200,
                    ref_reps=4000 if desk else 10_000,
                    density_method="parzen",
                    density_param=_PARZEN_LAG[n],
                    seed=seed,
                    plugin_samples=2_000_000 if desk else 10_000_000,
                ))
    elif name == "table1":
        for model_id in ("I", "II", "III", "IV"):
            for n in (150, 300, 500):
                configs.append(ExperimentConfig(
                    model=ModelSpec(model_id),
                    n=n,
                    phi=CosLag(1),
                    kind="ratio",
                    methods=("cbp",),
                    b_values=_TABLE_B[n],
                    M=500,
                    R=200 if desk else 500,
                    ref_reps=20_000 if desk else 50_000,
                    density_method="parzen",
                    density_param=_PARZEN_LAG[n],
                    seed=seed,
                ))
    else:
        raise ValueError(f"unknown preset {name!r}")
    return configs
