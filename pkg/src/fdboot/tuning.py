"""Data-driven choice of the smoothing bandwidth and the block length.

The bandwidth minimizes a leave-one-out Whittle-type cross-validation score
over a user grid.  The block length targets the dependence part of the
limiting variance: an autoregressive working model supplies both a
closed-form target for that quantity and pseudo-series on which its
block-bootstrap estimator can be evaluated, and the block length minimizing
the empirical mean squared error over pseudo-series replicates is chosen.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .bootstrap import tau2_block_estimate
from .rng import substream
from .spectral import (
    DegenerateEstimateError,
    autocovariance,
    epanechnikov,
    fourier_grid,
    periodogram,
    series_values,
    subsample_periodograms,
    wrap_frequency,
)
from .stats import PhiFunction

__all__ = [
    "ARFit",
    "BandwidthSelection",
    "BlockSelectionReport",
    "fit_ar",
    "cv_bandwidth",
    "ar_pseudo_series",
    "select_block_length",
]


# ---------------------------------------------------------------------------
# Autoregressive working model
# ---------------------------------------------------------------------------

@dataclass
class ARFit:
    """Yule-Walker AR fit with AIC-selected order and centered residuals."""

    order: int
    coefficients: np.ndarray
    residuals: np.ndarray
    sigma2: float
    eta: float
    n: int

    def spectral_density(self, freqs):
        lam = np.atleast_1d(np.asarray(freqs, dtype=float))
        if self.order:
            j = np.arange(1, self.order + 1)
            transfer = 1.0 - np.exp(-1j * np.multiply.outer(lam, j)) @ self.coefficients
            out = self.sigma2 / (2.0 * np.pi) / np.abs(transfer) ** 2
        else:
            out = np.full(lam.shape, self.sigma2 / (2.0 * np.pi))
        return out if np.ndim(freqs) else out[0]

    def dependence_target(self, phi: PhiFunction) -> float:
        """(eta - 3) times the squared weighted mass of the fitted spectrum."""
        bps = sorted({-np.pi, np.pi, *getattr(phi, "breakpoints", tuple)()})
        mass = 0.0
        for a, c in zip(bps[:-1], bps[1:]):
            part, _ = integrate.quad(
                lambda lam: float(phi(lam)) * float(self.spectral_density(lam)),
                a, c, limit=200)
            mass += part
        return (self.eta - 3.0) * mass ** 2


def _levinson(acf: np.ndarray, p_max: int):
    """Innovation variances and coefficient vectors for orders 0..p_max."""
    sig = np.empty(p_max + 1)
    sig[0] = acf[0]
    coeffs = [np.empty(0)]
    prev = np.empty(0)
    for m in range(1, p_max + 1):
        num = acf[m] - (prev @ acf[m - 1:0:-1] if m > 1 else 0.0)
        if sig[m - 1] <= 0:
            raise ValueError("singular autocovariance system")
        reflect = num / sig[m - 1]
        cur = np.empty(m)
        cur[m - 1] = reflect
        if m > 1:
            cur[: m - 1] = prev - reflect * prev[::-1]
        sig[m] = sig[m - 1] * (1.0 - reflect * reflect)
        coeffs.append(cur)
        prev = cur
    return coeffs, sig


def fit_ar(x, p_max: int | None = None, center: bool = True) -> ARFit:
    """Fit an AR(p) model by Yule-Walker, selecting p with AIC over 0..p_max."""
    values = series_values(x, center=center)
    n = values.size
    if p_max is None:
        p_max = int(10 * np.log10(n))
    if not 0 <= p_max < n / 2:
        raise ValueError("p_max must lie in [0, n/2)")
    acf = autocovariance(values, p_max, center=False)
    if acf[0] <= 0:
        raise ValueError("singular autocovariance system (constant series?)")
    coeffs, sig = _levinson(acf, p_max)
    with np.errstate(divide="ignore"):
        aic = n * np.log(np.maximum(sig, 1e-300)) + 2 * np.arange(p_max + 1)
    order = int(np.argmin(aic))
    a = coeffs[order]

    if order:
        design = np.column_stack([values[order - j - 1: n - j - 1] for j in range(order)])
        raw = values[order:] - design @ a
    else:
        raw = values.copy()
    resid = raw - raw.mean()
    sigma2 = float(resid @ resid) / resid.size
    if sigma2 <= 0:
        raise ValueError("degenerate residual variance")
    eta = float(np.mean(resid ** 4)) / sigma2 ** 2
    return ARFit(order, a, resid, sigma2, eta, n)


def ar_pseudo_series(fit: ARFit, n: int, rng: np.random.Generator,
                     burn_in: int = 200) -> np.ndarray:
    """Simulate the fitted recursion, resampling the centered residuals."""
    p = fit.order
    total = burn_in + n
    shocks = rng.choice(fit.residuals, size=total, replace=True)
    if p == 0:
        return shocks[-n:]
    out = np.zeros(total + p)
    for t in range(p, total + p):
        out[t] = fit.coefficients @ out[t - p:t][::-1] + shocks[t - p]
    return out[-n:]


def _ar_pseudo_batch(fit: ARFit, n: int, seeds) -> np.ndarray:
    """Stack pseudo-series rows, one keyed stream per replicate."""
    rows = [ar_pseudo_series(fit, n, rng) for rng in seeds]
    return np.asarray(rows)


# ---------------------------------------------------------------------------
# Bandwidth selection
# ---------------------------------------------------------------------------

@dataclass
class BandwidthSelection:
    bandwidth: float
    grid: np.ndarray
    scores: np.ndarray


def cv_bandwidth(x, h_grid, center: bool = True) -> BandwidthSelection:
    """Leave-one-out cross-validation for the periodogram smoother.

    The score at each candidate averages log f + I/f over the positive
    frequencies, with the +-j ordinates left out of the smoother at
    frequency j.  Ties and equal scores resolve to the smaller bandwidth.
    """
    h_grid = np.sort(np.asarray(h_grid, dtype=float))
    if h_grid.size == 0:
        raise ValueError("empty bandwidth grid")
    if np.any((h_grid <= 0) | (h_grid >= np.pi)):
        raise ValueError("bandwidths must lie in (0, pi)")
    values = series_values(x, center=center)
    pg = periodogram(values, center=False)
    grid = pg.grid
    table = pg.values
    if table.max() <= 0:
        raise DegenerateEstimateError("flat series has a zero periodogram")

    pos = grid.positive_frequencies
    delta = wrap_frequency(pos[:, None] - grid.frequencies[None, :])
    exclude = np.abs(grid.indices)[None, :] == grid.positive_indices[:, None]

    scores = np.full(h_grid.size, np.inf)
    for i, h in enumerate(h_grid):
        weights = epanechnikov(delta / h)
        weights[exclude] = 0.0
        total = weights.sum(axis=1)
        if np.any(total <= 0):
            continue
        loo = (weights @ table) / total
        if np.any(loo <= 0):
            continue
        scores[i] = float(np.mean(np.log(loo) + pg.values_pos / loo))
    if not np.any(np.isfinite(scores)):
        raise DegenerateEstimateError("cross-validation score is nonfinite on the whole grid")
    return BandwidthSelection(float(h_grid[int(np.argmin(scores))]), h_grid, scores)


# ---------------------------------------------------------------------------
# Block-length selection
# ---------------------------------------------------------------------------

@dataclass
class BlockSelectionReport:
    b_grid: np.ndarray
    mse: np.ndarray
    b_star: int
    target: float
    replicates: int
    ar_order: int


def select_block_length(x, phi: PhiFunction, b_grid, L: int = 200, seed: int = 0,
                        p_max: int | None = None, center: bool = True) -> BlockSelectionReport:
    """Pick the block length whose dependence-variance estimator tracks the AR target best.

    For each of L pseudo-series from the fitted AR model, the off-diagonal
    block-variance sum is evaluated at every candidate block length (with the
    pseudo-series' own averaged-subsample estimator supplying the density
    values), and the block length minimizing the empirical mean squared
    deviation from the AR target is returned; ties go to the smaller value.
    """
    b_grid = np.sort(np.asarray(b_grid, dtype=int))
    if b_grid.size == 0:
        raise ValueError("empty block-length grid")
    values = series_values(x, center=center)
    n = values.size
    if np.any((b_grid < 2) | (b_grid > n // 2)):
        raise ValueError("candidate block lengths must lie in [2, n/2]")
    if L < 1:
        raise ValueError("at least one pseudo-series replicate is required")

    fit = fit_ar(values, p_max=p_max, center=False)
    target = fit.dependence_target(phi)

    deviations = np.zeros((L, b_grid.size))
    for rep in range(L):
        pseudo = ar_pseudo_series(fit, n, substream(seed, "block-select", rep))
        pseudo = pseudo - pseudo.mean()
        for col, b in enumerate(b_grid):
            matrix = subsample_periodograms(pseudo, int(b), center=False)
            estimate = tau2_block_estimate(matrix, matrix.f_tilde_pos, phi)
            deviations[rep, col] = estimate - target
    mse = np.mean(deviations ** 2, axis=0)
    return BlockSelectionReport(b_grid, mse, int(b_grid[int(np.argmin(mse))]),
                                target, L, fit.order)
