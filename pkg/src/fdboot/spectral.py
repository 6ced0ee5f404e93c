"""Fourier grids, periodograms, and spectral density estimation.

The canonical evaluation grid for a series of length m excludes frequency
zero and is symmetric in +-j, so every Riemann sum over it runs over
2*floor(m/2) points.  For even m this counts the +-pi ordinate twice (the
two indices +-m/2 map to the same periodogram value); all sums in this
package follow that literal convention.

Periodograms and the derived estimators are even functions of frequency,
so only the positive-index half is stored; helpers fold two-sided sums
onto the positive half where needed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .dgp import SeriesSample

__all__ = [
    "DegenerateEstimateError",
    "FourierGrid",
    "Periodogram",
    "SubsamplePeriodogramMatrix",
    "SpectralEstimate",
    "ResidualMatrix",
    "fourier_grid",
    "periodogram",
    "subsample_periodograms",
    "parzen_lag_window",
    "kernel_smoothed_estimate",
    "averaged_subsample_estimate",
    "residuals",
    "series_values",
    "autocovariance",
    "floor_positive",
    "wrap_frequency",
]


class DegenerateEstimateError(ValueError):
    """A spectral estimate is identically zero where positivity is required."""


# ---------------------------------------------------------------------------
# Grids
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FourierGrid:
    """Index set {j : 1 <= |j| <= floor(m/2)} with frequencies 2*pi*j/m."""

    m: int

    @property
    def half(self) -> int:
        return self.m // 2

    @property
    def size(self) -> int:
        return 2 * self.half

    @property
    def positive_indices(self) -> np.ndarray:
        return np.arange(1, self.half + 1)

    @property
    def indices(self) -> np.ndarray:
        pos = self.positive_indices
        return np.concatenate([-pos[::-1], pos])

    @property
    def positive_frequencies(self) -> np.ndarray:
        return 2.0 * np.pi * self.positive_indices / self.m

    @property
    def frequencies(self) -> np.ndarray:
        return 2.0 * np.pi * self.indices / self.m

    @property
    def spacing(self) -> float:
        return 2.0 * np.pi / self.m


def fourier_grid(m: int) -> FourierGrid:
    if m < 2:
        raise ValueError("grid order must be at least 2")
    return FourierGrid(int(m))


def wrap_frequency(delta: np.ndarray) -> np.ndarray:
    """Wrap frequency differences into (-pi, pi]."""
    return np.pi - np.mod(np.pi - np.asarray(delta, dtype=float), 2.0 * np.pi)


def mirror(values_pos: np.ndarray) -> np.ndarray:
    """Extend positive-half values to the full signed grid ordering."""
    values_pos = np.asarray(values_pos)
    return np.concatenate([values_pos[::-1], values_pos], axis=-1)


def series_values(x, center: bool = True) -> np.ndarray:
    """Coerce a series (array or SeriesSample) to a float array, centering by default."""
    if isinstance(x, SeriesSample):
        values = x.values
        already = x.centered
    else:
        values = np.asarray(x, dtype=float)
        already = False
    if values.ndim != 1 or values.size == 0:
        raise ValueError("series must be a nonempty one-dimensional array")
    if center and not already:
        values = values - values.mean()
    return values


def floor_positive(values: np.ndarray, rel: float = 1e-10) -> np.ndarray:
    """Floor an estimate at rel * max before it is used as a divisor."""
    values = np.asarray(values, dtype=float)
    top = values.max(initial=0.0)
    if not np.isfinite(top) or top <= 0.0:
        raise DegenerateEstimateError("spectral estimate vanishes; cannot rescale by it")
    return np.maximum(values, rel * top)


# ---------------------------------------------------------------------------
# Periodograms
# ---------------------------------------------------------------------------

@dataclass
class Periodogram:
    grid: FourierGrid
    values_pos: np.ndarray

    @property
    def values(self) -> np.ndarray:
        """Values over the signed grid, ordered like grid.indices."""
        return mirror(self.values_pos)


def periodogram(x, grid: FourierGrid | None = None, center: bool = True) -> Periodogram:
    """Periodogram |sum_t x_t e^{-i lam t}|^2 / (2 pi n) on a Fourier grid.

    The grid order must equal len(x) or divide it (the latter picks out the
    coarser grid's frequencies from the full-resolution transform).
    """
    values = series_values(x, center=center)
    n = values.size
    if grid is None:
        grid = fourier_grid(n)
    if n % grid.m != 0:
        raise ValueError("grid order must equal the series length or divide it")
    spec = np.fft.rfft(values)
    stride = n // grid.m
    idx = grid.positive_indices * stride
    vals = np.abs(spec[idx]) ** 2 / (2.0 * np.pi * n)
    return Periodogram(grid, vals)


@dataclass
class SubsamplePeriodogramMatrix:
    """Periodograms of all length-b windows, with their frequency-wise average.

    Row t-1 holds the periodogram of (x_t, ..., x_{t+b-1}) over the positive
    half of the order-b grid; the average over rows is the Bartlett-Welch
    estimator used to rescale the rows into residuals.
    """

    b: int
    n: int
    grid: FourierGrid
    values_pos: np.ndarray  # shape (N, b//2)
    f_tilde_pos: np.ndarray  # exact column means

    @property
    def subsample_count(self) -> int:
        return self.n - self.b + 1


def subsample_periodograms(x, b: int, center: bool = True) -> SubsamplePeriodogramMatrix:
    """All overlapping length-b subsample periodograms of a (globally centered) series."""
    values = series_values(x, center=center)
    n = values.size
    if b < 2:
        raise ValueError("block length must be at least 2")
    if b > n:
        raise ValueError("block length cannot exceed the series length")
    windows = np.lib.stride_tricks.sliding_window_view(values, b)
    spec = np.fft.rfft(windows, axis=1)
    grid = fourier_grid(b)
    vals = np.abs(spec[:, 1:grid.half + 1]) ** 2 / (2.0 * np.pi * b)
    return SubsamplePeriodogramMatrix(b, n, grid, vals, vals.mean(axis=0))


def autocovariance(x, max_lag: int, center: bool = True) -> np.ndarray:
    """Sample autocovariances with divisor n at lags 0..max_lag."""
    values = series_values(x, center=center)
    n = values.size
    if not 0 <= max_lag < n:
        raise ValueError("max_lag must lie in [0, n)")
    nfft = 1 << int(np.ceil(np.log2(2 * n)))
    spec = np.fft.rfft(values, nfft)
    acf = np.fft.irfft(spec * np.conj(spec), nfft)[: max_lag + 1]
    return acf / n


# ---------------------------------------------------------------------------
# Spectral density estimators
# ---------------------------------------------------------------------------

@dataclass
class SpectralEstimate:
    """A spectral density estimate evaluable at any frequency.

    Evaluation clips tiny negative rounding artifacts at zero; both shipped
    estimators are nonnegative by construction.
    """

    method: str
    tuning: dict
    evaluate: Callable[[np.ndarray], np.ndarray]

    def __call__(self, freqs) -> np.ndarray:
        out = self.evaluate(np.asarray(freqs, dtype=float))
        return np.maximum(out, 0.0)

    def on_grid(self, grid: FourierGrid) -> np.ndarray:
        """Values on the positive half of a grid."""
        return self(grid.positive_frequencies)


def parzen_window(u: np.ndarray) -> np.ndarray:
    u = np.abs(np.asarray(u, dtype=float))
    out = np.zeros_like(u)
    inner = u <= 0.5
    outer = (u > 0.5) & (u <= 1.0)
    out[inner] = 1.0 - 6.0 * u[inner] ** 2 + 6.0 * u[inner] ** 3
    out[outer] = 2.0 * (1.0 - u[outer]) ** 3
    return out


def parzen_lag_window(x, truncation_lag: int, center: bool = True) -> SpectralEstimate:
    """Lag-window estimator with the Parzen taper (real, even, nonnegative)."""
    values = series_values(x, center=center)
    n = values.size
    if not 1 <= truncation_lag < n:
        raise ValueError("truncation lag must lie in [1, n)")
    acf = autocovariance(values, truncation_lag, center=False)
    lags = np.arange(1, truncation_lag + 1)
    weights = parzen_window(lags / truncation_lag) * acf[1:]

    def evaluate(freqs: np.ndarray) -> np.ndarray:
        lam = np.atleast_1d(freqs)
        out = (acf[0] + 2.0 * np.cos(np.outer(lam, lags)) @ weights) / (2.0 * np.pi)
        return out if np.ndim(freqs) else out[0]

    return SpectralEstimate("parzen-lag-window", {"truncation_lag": truncation_lag}, evaluate)


def epanechnikov(u: np.ndarray) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    return np.maximum(0.75 * (1.0 - u * u), 0.0)


def kernel_smoothed_estimate(x, bandwidth: float, center: bool = True,
                             kernel: Callable[[np.ndarray], np.ndarray] = epanechnikov) -> SpectralEstimate:
    """Periodogram smoother with circularly wrapped kernel weights.

    The weights are renormalized to sum to one at every evaluation point, so
    a flat periodogram is reproduced exactly and no density constant enters.
    """
    if not 0 < bandwidth < np.pi:
        raise ValueError("bandwidth must lie in (0, pi)")
    values = series_values(x, center=center)
    pg = periodogram(values, center=False)
    freqs = pg.grid.frequencies
    table = pg.values

    def evaluate(eval_freqs: np.ndarray) -> np.ndarray:
        lam = np.atleast_1d(eval_freqs)
        delta = wrap_frequency(lam[:, None] - freqs[None, :])
        weights = kernel(delta / bandwidth)
        total = weights.sum(axis=1)
        if np.any(total <= 0):
            raise DegenerateEstimateError("bandwidth below the grid resolution")
        out = (weights @ table) / total
        return out if np.ndim(eval_freqs) else out[0]

    return SpectralEstimate("kernel-smoothed", {"bandwidth": bandwidth}, evaluate)


def averaged_subsample_estimate(matrix: SubsamplePeriodogramMatrix) -> SpectralEstimate:
    """The averaged-subsample estimator as an evaluable estimate.

    Exact on its own grid; linear interpolation in between (evenness supplies
    the values across zero).
    """
    freqs = matrix.grid.frequencies
    table = mirror(matrix.f_tilde_pos)

    def evaluate(eval_freqs: np.ndarray) -> np.ndarray:
        lam = wrap_frequency(np.atleast_1d(eval_freqs))
        out = np.interp(lam, freqs, table)
        return out if np.ndim(eval_freqs) else out[0]

    return SpectralEstimate("averaged-subsample", {"b": matrix.b}, evaluate)


# ---------------------------------------------------------------------------
# Frequency-domain residuals
# ---------------------------------------------------------------------------

@dataclass
class ResidualMatrix:
    """Rescaled frequency-domain residuals.

    scheme 'subsample': values has shape (N, b//2); every column averages to
    one exactly.  scheme 'mpb-empirical': values is the length-floor(n/2)
    vector of rescaled full-sample residuals with exact mean one.
    """

    scheme: str
    grid: FourierGrid
    values: np.ndarray


def residuals(scheme: str, *, matrix: SubsamplePeriodogramMatrix | None = None,
              x=None, estimate: SpectralEstimate | None = None,
              center: bool = True) -> ResidualMatrix:
    """Construct the residuals feeding either bootstrap scheme."""
    if scheme == "subsample":
        if matrix is None:
            raise ValueError("subsample residuals need a SubsamplePeriodogramMatrix")
        denom = floor_positive(matrix.f_tilde_pos)
        return ResidualMatrix(scheme, matrix.grid, matrix.values_pos / denom[None, :])
    if scheme == "mpb-empirical":
        if x is None or estimate is None:
            raise ValueError("empirical residuals need the series and a spectral estimate")
        pg = periodogram(x, center=center)
        denom = floor_positive(estimate.on_grid(pg.grid))
        raw = pg.values_pos / denom
        mean = raw.mean()
        if mean <= 0:
            raise DegenerateEstimateError("all rescaled residuals vanish")
        return ResidualMatrix(scheme, pg.grid, raw / mean)
    if scheme == "mpb-exponential":
        raise ValueError("the exponential scheme draws pseudo innovations; it has no residual matrix")
    raise ValueError(f"unknown residual scheme {scheme!r}")
