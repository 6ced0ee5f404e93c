"""Frequency-domain bootstrap methods for stationary time series.

The package implements three resampling schemes for spectral-mean and
ratio statistics (multiplicative, convolved-subsample, and hybrid), the
spectral estimation and tuning machinery they need, and a Monte-Carlo
harness that reproduces the accompanying simulation study at desk scale.
"""

from .bootstrap import (
    BootstrapOptions,
    ConfidenceInterval,
    DegeneratePhiError,
    DrawSet,
    VarianceReport,
    cbp_closed_form_variance,
    cbp_draws,
    confidence_interval,
    hybrid_draws,
    mpb_draws,
    mpb_variance,
    variance_correction,
)
from .dgp import InnovationSpec, ModelSpec, SeriesSample, generate_innovations, simulate_model
from .harness import ExperimentConfig, d1_distance, reference_distribution
from .rng import substream
from .spectral import (
    DegenerateEstimateError,
    FourierGrid,
    Periodogram,
    SpectralEstimate,
    SubsamplePeriodogramMatrix,
    averaged_subsample_estimate,
    fourier_grid,
    kernel_smoothed_estimate,
    parzen_lag_window,
    periodogram,
    residuals,
    subsample_periodograms,
)
from .stats import (
    ConstantOne,
    CosLag,
    Indicator,
    LinearModelOracle,
    PhiFunction,
    linear_asymptotic_variance,
    ratio_statistic,
    ratio_weights,
    spectral_mean,
)
from .tuning import cv_bandwidth, fit_ar, select_block_length

__version__ = "0.1.0"
