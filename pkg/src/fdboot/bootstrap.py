"""Frequency-domain bootstrap procedures for spectral means and ratio statistics.

Three schemes are implemented:

* ``mpb`` multiplies a spectral density estimate with independent pseudo
  innovations frequency by frequency.  It reproduces only the part of the
  limiting variance that ignores dependence between periodogram ordinates.
* ``cbp`` resamples whole subsample residual vectors and convolves
  k = floor(n/b) of them, preserving the within-block dependence of the
  periodogram and hence the full limiting variance.
* ``hybrid`` rescales the multiplicative draws by a variance ratio whose
  numerator borrows the dependence part from the convolved scheme, after
  removing that scheme's own independent-ordinate contribution through an
  explicit correction term.

Closed-form bootstrap variances evaluate the conditional variance of the
convolved draws exactly (including the n/(k*b) factor that appears when b
does not divide n), so they match Monte-Carlo variances within sampling
error for every admissible (n, b).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .rng import substream
from .spectral import (
    DegenerateEstimateError,
    FourierGrid,
    SubsamplePeriodogramMatrix,
    floor_positive,
    fourier_grid,
    residuals,
    series_values,
    subsample_periodograms,
)
from .stats import PhiFunction, RatioWeight, folded, ratio_weights, sample_statistic

__all__ = [
    "BootstrapOptions",
    "DrawSet",
    "VarianceReport",
    "ConfidenceInterval",
    "DegeneratePhiError",
    "mpb_draws",
    "mpb_variance",
    "cbp_draws",
    "cbp_closed_form_variance",
    "variance_correction",
    "hybrid_draws",
    "confidence_interval",
    "tau2_block_estimate",
]

MPB_SCHEMES = ("exponential", "empirical")

# Target element count per chunk of bootstrap draws; fixed so that results
# never depend on how the draw loop is sliced.
_CHUNK_ELEMENTS = 1 << 21


class DegeneratePhiError(ValueError):
    """The weight function makes the requested bootstrap quantity degenerate."""


@dataclass(frozen=True)
class BootstrapOptions:
    """Resampling configuration shared by all three schemes."""

    n: int
    b: int
    M: int = 1000
    seed: int = 0
    mpb_scheme: str = "exponential"

    def __post_init__(self):
        if self.n < 4:
            raise ValueError("series length must be at least 4")
        if not 2 <= self.b <= self.n:
            raise ValueError("block length must satisfy 2 <= b <= n")
        if self.M < 2:
            raise ValueError("at least two bootstrap replicates are required")
        if self.mpb_scheme not in MPB_SCHEMES:
            raise ValueError(f"unknown multiplicative scheme {self.mpb_scheme!r}")

    @property
    def k(self) -> int:
        """Number of convolved blocks."""
        return self.n // self.b

    def diagnostics(self) -> dict:
        """Rate diagnostics; both should be small for the asymptotics to bite."""
        subsamples = self.n - self.b + 1
        return {
            "b_cubed_over_n": self.b ** 3 / self.n,
            "log_subsamples_over_b": math.log(subsamples) / self.b,
            "blocks": self.k,
        }


@dataclass
class DrawSet:
    """Bootstrap replicates of one statistic plus the settings that produced them."""

    kind: str
    draws: np.ndarray
    center: float
    options: BootstrapOptions
    extras: dict = field(default_factory=dict)


@dataclass
class VarianceReport:
    var_star: float
    components: dict
    method: str
    diagnostics: dict = field(default_factory=dict)


@dataclass
class ConfidenceInterval:
    lower: float
    upper: float
    level: float
    estimate: float
    studentizer: float
    kind: str


# ---------------------------------------------------------------------------
# Shared preparation
# ---------------------------------------------------------------------------

def _estimate_on(f_hat, grid: FourierGrid) -> np.ndarray:
    return floor_positive(np.asarray(f_hat(grid.positive_frequencies), dtype=float))


def _checked_values(x, options: BootstrapOptions) -> np.ndarray:
    values = series_values(x, center=True)
    if values.size != options.n:
        raise ValueError("options.n does not match the series length")
    return values


def _block_pieces(values: np.ndarray, f_hat, options: BootstrapOptions,
                  matrix: SubsamplePeriodogramMatrix | None):
    if matrix is None:
        matrix = subsample_periodograms(values, options.b, center=False)
    elif matrix.b != options.b or matrix.n != options.n:
        raise ValueError("precomputed subsample matrix does not match the options")
    U = matrix.values_pos / floor_positive(matrix.f_tilde_pos)[None, :]
    f_pos = _estimate_on(f_hat, matrix.grid)
    return matrix, U, f_pos


def _chunks(total: int, row_cost: int):
    step = max(1, _CHUNK_ELEMENTS // max(1, row_cost))
    start = 0
    while start < total:
        stop = min(total, start + step)
        yield start, stop
        start = stop


# ---------------------------------------------------------------------------
# Multiplicative periodogram bootstrap
# ---------------------------------------------------------------------------

def _mpb_innovations(rng, rows: int, pool: np.ndarray | None, width: int) -> np.ndarray:
    if pool is None:
        return rng.standard_exponential((rows, width))
    idx = rng.integers(0, pool.size, size=(rows, width))
    return pool[idx]


def mpb_draws(x, f_hat, phi: PhiFunction, options: BootstrapOptions,
              rng: np.random.Generator | None = None) -> DrawSet:
    """Draws of the multiplicative bootstrap statistic for a spectral mean.

    Pseudo innovations are i.i.d. standard exponential by default, or
    resampled from the rescaled full-sample residuals under the
    'empirical' scheme; either way they are tied across +-j.
    """
    values = _checked_values(x, options)
    grid = fourier_grid(options.n)
    f_pos = _estimate_on(f_hat, grid)
    weight = folded(phi, grid) * f_pos
    scale = math.sqrt(options.n) * grid.spacing
    center = grid.spacing * float(folded(phi, grid) @ f_pos)

    pool = None
    if options.mpb_scheme == "empirical":
        pool = residuals("mpb-empirical", x=values, estimate=f_hat, center=False).values
    if rng is None:
        rng = substream(options.seed, "mpb")

    draws = np.empty(options.M)
    for lo, hi in _chunks(options.M, grid.half):
        innov = _mpb_innovations(rng, hi - lo, pool, grid.half)
        draws[lo:hi] = scale * ((innov - 1.0) @ weight)
    return DrawSet("mpb", draws, center, options, {"scheme": options.mpb_scheme})


def mpb_variance(x, f_hat, phi: PhiFunction, options: BootstrapOptions) -> VarianceReport:
    """Exact conditional variance of the multiplicative draws."""
    values = _checked_values(x, options)
    grid = fourier_grid(options.n)
    f_pos = _estimate_on(f_hat, grid)
    psi = folded(phi, grid)
    if options.mpb_scheme == "empirical":
        pool = residuals("mpb-empirical", x=values, estimate=f_hat, center=False).values
        innovation_var = float(pool.var())
    else:
        innovation_var = 1.0
    var_star = innovation_var * (4.0 * np.pi ** 2 / options.n) * float(psi ** 2 @ f_pos ** 2)
    return VarianceReport(var_star, {"innovation_variance": innovation_var},
                          "closed-form", options.diagnostics())


# ---------------------------------------------------------------------------
# Convolved bootstrapped periodograms of subsamples
# ---------------------------------------------------------------------------

def cbp_draws(x, f_hat, phi: PhiFunction, options: BootstrapOptions, kind: str = "mean",
              rng: np.random.Generator | None = None,
              matrix: SubsamplePeriodogramMatrix | None = None,
              blocks: int | None = None) -> DrawSet:
    """Draws of the convolved-subsample bootstrap statistic.

    Each replicate picks `blocks` subsample residual vectors uniformly with
    replacement, averages them, and evaluates the centered Riemann sum (or
    the centered ratio) against the density estimate on the block grid.
    """
    if kind not in ("mean", "ratio"):
        raise ValueError("kind must be 'mean' or 'ratio'")
    values = _checked_values(x, options)
    matrix, U, f_pos = _block_pieces(values, f_hat, options, matrix)
    k = options.k if blocks is None else int(blocks)
    if k < 1:
        raise ValueError("at least one block is required")
    psi = folded(phi, matrix.grid)
    subsamples = matrix.subsample_count
    if rng is None:
        rng = substream(options.seed, "cbp")

    root_n = math.sqrt(options.n)
    draws = np.empty(options.M)
    if kind == "mean":
        weight = psi * f_pos
        scale = root_n * matrix.grid.spacing
        center = matrix.grid.spacing * float(psi @ f_pos)
        for lo, hi in _chunks(options.M, k * matrix.grid.half):
            idx = rng.integers(0, subsamples, size=(hi - lo, k))
            u_bar = U[idx].mean(axis=1)
            draws[lo:hi] = scale * ((u_bar - 1.0) @ weight)
        return DrawSet("cbp-mean", draws, center, options, {"blocks": k})

    w_num = psi * f_pos
    w_den = 2.0 * f_pos
    center = float(psi @ f_pos) / (2.0 * float(f_pos.sum()))
    for lo, hi in _chunks(options.M, k * matrix.grid.half):
        idx = rng.integers(0, subsamples, size=(hi - lo, k))
        u_bar = U[idx].mean(axis=1)
        draws[lo:hi] = root_n * ((u_bar @ w_num) / (u_bar @ w_den) - center)
    return DrawSet("cbp-ratio", draws, center, options, {"blocks": k})


def _residual_covariance(U: np.ndarray) -> np.ndarray:
    centered = U - 1.0
    return centered.T @ centered / U.shape[0]


def cbp_closed_form_variance(x, f_hat, phi: PhiFunction, options: BootstrapOptions,
                             kind: str = "mean",
                             matrix: SubsamplePeriodogramMatrix | None = None) -> VarianceReport:
    """Conditional variance of the convolved draws, evaluated exactly.

    The double sum over grid frequencies factors through the residual
    second-moment matrix; the ratio version weighs it with the centering
    weight built on the full grid and divides by the fourth power of the
    block-grid spectral mass.
    """
    if kind not in ("mean", "ratio"):
        raise ValueError("kind must be 'mean' or 'ratio'")
    values = _checked_values(x, options)
    matrix, U, f_pos = _block_pieces(values, f_hat, options, matrix)
    b = options.b
    cov = _residual_covariance(U)
    factor = options.n / (options.k * b)

    if kind == "mean":
        a = folded(phi, matrix.grid) * f_pos
        denom4 = 1.0
    else:
        weight = ratio_weights(phi, f_hat, options.n)
        a = folded(weight, matrix.grid) * f_pos
        denom4 = (matrix.grid.spacing * 2.0 * float(f_pos.sum())) ** 4

    total = factor * (4.0 * np.pi ** 2 / b) * float(a @ cov @ a) / denom4
    diagonal = factor * (4.0 * np.pi ** 2 / b) * float(a ** 2 @ np.diag(cov)) / denom4
    return VarianceReport(
        total,
        {"diagonal_part": diagonal, "off_diagonal_part": total - diagonal},
        "closed-form",
        options.diagnostics(),
    )


def variance_correction(x, f_hat, phi: PhiFunction, options: BootstrapOptions,
                        kind: str = "mean",
                        matrix: SubsamplePeriodogramMatrix | None = None) -> float:
    """The convolved scheme's own independent-ordinate variance contribution.

    Subtracting this from the variance of the summed hybrid draws leaves the
    multiplicative part to be contributed once.  It equals the |j1| = |j2|
    restriction of the closed-form double sum exactly.
    """
    if kind not in ("mean", "ratio"):
        raise ValueError("kind must be 'mean' or 'ratio'")
    values = _checked_values(x, options)
    matrix, U, f_pos = _block_pieces(values, f_hat, options, matrix)
    if kind == "ratio":
        psi = folded(ratio_weights(phi, f_hat, options.b), matrix.grid)
    else:
        psi = folded(phi, matrix.grid)
    second_moment = np.mean(U * U, axis=0)
    factor = options.n / (options.k * options.b)
    return factor * (4.0 * np.pi ** 2 / options.b) * float(
        psi ** 2 @ (f_pos ** 2 * (second_moment - 1.0)))


def tau2_block_estimate(matrix: SubsamplePeriodogramMatrix, f_pos: np.ndarray,
                        phi: PhiFunction) -> float:
    """Off-diagonal part of the block-bootstrap variance sum.

    This estimates the dependence contribution to the limiting variance; the
    |j1| = |j2| pairs are excluded.  `f_pos` holds the density estimate on
    the positive half of the block grid.
    """
    U = matrix.values_pos / floor_positive(matrix.f_tilde_pos)[None, :]
    f_pos = floor_positive(np.asarray(f_pos, dtype=float))
    a = folded(phi, matrix.grid) * f_pos
    cov = _residual_covariance(U)
    full = float(a @ cov @ a)
    diag = float(a ** 2 @ np.diag(cov))
    return (4.0 * np.pi ** 2 / matrix.b) * (full - diag)


# ---------------------------------------------------------------------------
# Hybrid procedure
# ---------------------------------------------------------------------------

def hybrid_draws(x, f_hat, phi: PhiFunction, options: BootstrapOptions, kind: str = "mean",
                 rng: np.random.Generator | None = None,
                 matrix: SubsamplePeriodogramMatrix | None = None) -> DrawSet:
    """Multiplicative draws rescaled with the block-bootstrap variance correction.

    The multiplicative stream and the block-resampling stream are
    independent.  Variances are estimated from the joint Monte-Carlo
    replicates; the corrected variance is floored at zero before the square
    root is taken.
    """
    if kind not in ("mean", "ratio"):
        raise ValueError("kind must be 'mean' or 'ratio'")
    values = _checked_values(x, options)
    if rng is None:
        rng_mult = substream(options.seed, "hybrid-mpb")
        rng_block = substream(options.seed, "hybrid-cbp")
    else:
        rng_mult, rng_block = rng.spawn(2)

    if kind == "mean":
        mult = mpb_draws(values, f_hat, phi, options, rng=rng_mult)
        block = cbp_draws(values, f_hat, phi, options, kind="mean", rng=rng_block, matrix=matrix)
        correction = variance_correction(values, f_hat, phi, options, kind="mean", matrix=matrix)
        base_var = float(mult.draws.var(ddof=1))
        if base_var <= 0:
            raise DegeneratePhiError("multiplicative draws are degenerate for this weight function")
        corrected = max(float((mult.draws + block.draws).var(ddof=1)) - correction, 0.0)
        ratio = math.sqrt(corrected / base_var)
        report = VarianceReport(corrected, {"tau1_sq": base_var, "correction": correction,
                                            "tau_sq": corrected}, "monte-carlo",
                                options.diagnostics())
        return DrawSet("hybrid-mean", ratio * mult.draws, mult.center, options,
                       {"scale": ratio, "variance": report,
                        "mpb_draws": mult.draws, "cbp_draws": block.draws})

    return _hybrid_ratio(values, f_hat, phi, options, rng_mult, rng_block, matrix)


def _hybrid_ratio(values, f_hat, phi, options, rng_mult, rng_block, matrix):
    grid_n = fourier_grid(options.n)
    f_pos_n = _estimate_on(f_hat, grid_n)
    matrix, U, f_pos_b = _block_pieces(values, f_hat, options, matrix)

    weight_full = ratio_weights(phi, f_hat, options.n)
    weight_block = ratio_weights(phi, f_hat, options.b)
    w_full = folded(weight_full, grid_n) * f_pos_n
    w_block = folded(weight_block, matrix.grid) * f_pos_b

    pool = None
    if options.mpb_scheme == "empirical":
        pool = residuals("mpb-empirical", x=values, estimate=f_hat, center=False).values

    n, b, k, M = options.n, options.b, options.k, options.M
    mass_full = grid_n.spacing * 2.0 * float(f_pos_n.sum())
    subsamples = matrix.subsample_count

    mult_part = np.empty(M)       # weighted multiplicative sum
    denom_part = np.empty(M)      # random total-mass factor of the denominator
    block_part = np.empty(M)      # weighted convolved-block sum
    for lo, hi in _chunks(M, grid_n.half):
        innov = _mpb_innovations(rng_mult, hi - lo, pool, grid_n.half)
        mult_part[lo:hi] = (2.0 * np.pi / math.sqrt(n)) * (innov @ w_full)
        denom_part[lo:hi] = (4.0 * np.pi / n) * (innov @ f_pos_n)
    for lo, hi in _chunks(M, k * matrix.grid.half):
        idx = rng_block.integers(0, subsamples, size=(hi - lo, k))
        u_bar = U[idx].mean(axis=1)
        block_part[lo:hi] = math.sqrt(n) * matrix.grid.spacing * (u_bar @ w_block)

    summed = mult_part + block_part
    raw_ratio = mult_part / (denom_part * mass_full)

    base_var = float(mult_part.var(ddof=1))
    if base_var <= 0:
        raise DegeneratePhiError("ratio weight function is degenerate (constant weight?)")
    correction = variance_correction(values, f_hat, phi, options, kind="ratio", matrix=matrix)
    corrected = max(float(summed.var(ddof=1)) - correction, 0.0)
    ratio = math.sqrt(corrected / base_var)
    center = float(folded(phi, grid_n) @ f_pos_n) / (2.0 * float(f_pos_n.sum()))
    report = VarianceReport(corrected, {"sigma1_sq": base_var, "correction": correction,
                                        "sigma_sq": corrected}, "monte-carlo",
                            options.diagnostics())
    return DrawSet("hybrid-ratio", ratio * raw_ratio, center, options,
                   {"scale": ratio, "variance": report, "weighted_full": mult_part,
                    "weighted_blocks": block_part, "weighted_sum": summed,
                    "ratio_raw": raw_ratio})


# ---------------------------------------------------------------------------
# Confidence intervals
# ---------------------------------------------------------------------------

def confidence_interval(x, f_hat, phi: PhiFunction, options: BootstrapOptions,
                        kind: str = "mean", alpha: float = 0.05,
                        rng: np.random.Generator | None = None,
                        matrix: SubsamplePeriodogramMatrix | None = None) -> ConfidenceInterval:
    """Equal-tailed studentized interval from the convolved bootstrap.

    Quantiles are left-continuous order statistics of the draws divided by
    the closed-form studentizer.
    """
    if not 0 < alpha <= 0.5:
        raise ValueError("alpha must lie in (0, 0.5]")
    if math.ceil(alpha * options.M) < 1:
        raise ValueError("too few bootstrap replicates for the requested level")
    values = _checked_values(x, options)
    if matrix is None:
        matrix = subsample_periodograms(values, options.b, center=False)
    draw_set = cbp_draws(values, f_hat, phi, options, kind=kind, rng=rng, matrix=matrix)
    report = cbp_closed_form_variance(values, f_hat, phi, options, kind=kind, matrix=matrix)
    studentizer = math.sqrt(report.var_star)
    if studentizer <= 0:
        raise DegenerateEstimateError("closed-form bootstrap variance vanishes")
    ordered = np.sort(draw_set.draws / studentizer)
    lo_idx = math.ceil(alpha * options.M) - 1
    hi_idx = math.ceil((1.0 - alpha) * options.M) - 1
    point = sample_statistic(values, phi, kind, center=False)
    width = studentizer / math.sqrt(options.n)
    return ConfidenceInterval(
        lower=point - ordered[hi_idx] * width,
        upper=point - ordered[lo_idx] * width,
        level=1.0 - 2.0 * alpha,
        estimate=point,
        studentizer=studentizer,
        kind=kind,
    )
