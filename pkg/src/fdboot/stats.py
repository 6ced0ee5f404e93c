"""Spectral means, ratio statistics, and asymptotic-variance oracles.

The weight-function library covers the statistics of practical interest:
cosine weights give autocovariances, step indicators give the spectral
distribution function, and their ratio forms give autocorrelations.
Closed-form limiting variances are available for finite-order linear
processes and serve as independent oracles for the bootstrap procedures.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import integrate

from .spectral import (
    FourierGrid,
    Periodogram,
    SpectralEstimate,
    autocovariance,
    fourier_grid,
    periodogram,
    series_values,
)

__all__ = [
    "PhiFunction",
    "CosLag",
    "Indicator",
    "ConstantOne",
    "Tabulated",
    "RatioWeight",
    "parse_phi",
    "SpectralMeanResult",
    "spectral_mean",
    "ratio_statistic",
    "ratio_weights",
    "folded",
    "sample_statistic",
    "LinearModelOracle",
    "LinearVariance",
    "linear_asymptotic_variance",
]


# ---------------------------------------------------------------------------
# Weight functions
# ---------------------------------------------------------------------------

class PhiFunction:
    """A square-integrable weight function of bounded variation on [-pi, pi]."""

    kind = "generic"

    def __call__(self, freqs):  # pragma: no cover - abstract
        raise NotImplementedError

    def breakpoints(self) -> tuple:
        """Interior discontinuities, used to split quadrature intervals."""
        return ()


@dataclass(frozen=True)
class CosLag(PhiFunction):
    """cos(h * lam); pairs a spectral mean with the lag-h autocovariance."""

    h: int
    kind = "cos-lag"

    def __post_init__(self):
        if self.h < 0:
            raise ValueError("lag must be nonnegative")

    def __call__(self, freqs):
        return np.cos(self.h * np.asarray(freqs, dtype=float))


@dataclass(frozen=True)
class Indicator(PhiFunction):
    """Right-closed indicator of (0, upper]; gives the spectral distribution function."""

    upper: float
    kind = "indicator"

    def __post_init__(self):
        if not 0 < self.upper <= np.pi:
            raise ValueError("indicator endpoint must lie in (0, pi]")

    def __call__(self, freqs):
        lam = np.asarray(freqs, dtype=float)
        return ((lam > 0) & (lam <= self.upper)).astype(float)

    def breakpoints(self) -> tuple:
        return (0.0, self.upper)


class ConstantOne(PhiFunction):
    kind = "constant-one"

    def __call__(self, freqs):
        return np.ones_like(np.asarray(freqs, dtype=float))


@dataclass(frozen=True)
class Tabulated(PhiFunction):
    """Values attached to fixed grid frequencies; no off-grid evaluation."""

    frequencies: tuple
    values: tuple
    kind = "tabulated"

    @classmethod
    def on_grid(cls, grid: FourierGrid, values: np.ndarray) -> "Tabulated":
        return cls(tuple(grid.frequencies), tuple(np.asarray(values, dtype=float)))

    def __call__(self, freqs):
        lam = np.atleast_1d(np.asarray(freqs, dtype=float))
        table = np.asarray(self.frequencies)
        out = np.empty(lam.shape)
        for i, value in enumerate(lam):
            j = int(np.argmin(np.abs(table - value)))
            if abs(table[j] - value) > 1e-9:
                raise ValueError(f"frequency {value!r} is not on the tabulated grid")
            out[i] = self.values[j]
        return out if np.ndim(freqs) else out[0]


@dataclass(frozen=True)
class RatioWeight(PhiFunction):
    """phi(lam) * total_mass - weighted_mass, the centering weight of ratio statistics.

    The two constants are discrete spectral masses of a density estimate, so
    the weighted grid sum of this function against that estimate is zero by
    construction.
    """

    phi: PhiFunction
    total_mass: float
    weighted_mass: float
    kind = "ratio-weight"

    def __call__(self, freqs):
        return self.phi(freqs) * self.total_mass - self.weighted_mass

    def breakpoints(self) -> tuple:
        return self.phi.breakpoints()


def parse_phi(text: str) -> PhiFunction:
    """Parse CLI weight specs: 'cos:h', 'indicator:x', or 'one'."""
    name, _, arg = text.partition(":")
    if name == "cos":
        return CosLag(int(arg or 1))
    if name == "indicator":
        return Indicator(float(arg))
    if name == "one":
        return ConstantOne()
    raise ValueError(f"unknown weight function {text!r}")


def folded(phi: PhiFunction | Callable, grid: FourierGrid) -> np.ndarray:
    """phi(lam_j) + phi(-lam_j) over the positive half of a grid.

    Summing an even sequence against these folded weights equals the full
    signed-grid sum against phi.
    """
    pos = grid.positive_frequencies
    return np.asarray(phi(pos), dtype=float) + np.asarray(phi(-pos), dtype=float)


# ---------------------------------------------------------------------------
# Spectral means and ratio statistics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SpectralMeanResult:
    value: float
    kind: str
    grid_order: int


def _coerce_values(p) -> tuple[FourierGrid, np.ndarray]:
    if isinstance(p, Periodogram):
        return p.grid, p.values_pos
    grid, values_pos = p
    values_pos = np.asarray(values_pos, dtype=float)
    if values_pos.shape != (grid.half,):
        raise ValueError("values must cover the positive half of the grid")
    return grid, values_pos


def spectral_mean(phi: PhiFunction | Callable, p) -> SpectralMeanResult:
    """Riemann sum (2 pi / m) * sum_j phi(lam_j) I(lam_j) over the signed grid."""
    grid, values_pos = _coerce_values(p)
    value = grid.spacing * float(folded(phi, grid) @ values_pos)
    return SpectralMeanResult(value, "mean", grid.m)


def ratio_statistic(phi: PhiFunction | Callable, p) -> SpectralMeanResult:
    """Scale-free form: weighted spectral sum over the unweighted one."""
    grid, values_pos = _coerce_values(p)
    denom = 2.0 * values_pos.sum()
    if denom <= 0:
        raise ValueError("ratio statistic needs positive total spectral mass")
    value = float(folded(phi, grid) @ values_pos) / denom
    return SpectralMeanResult(value, "ratio", grid.m)


def ratio_weights(phi: PhiFunction | Callable, f_hat: SpectralEstimate | Callable,
                  m: int) -> RatioWeight:
    """Centering weight built from the discrete masses of f_hat on the order-m grid."""
    grid = fourier_grid(m)
    f_pos = np.asarray(f_hat(grid.positive_frequencies), dtype=float)
    total = grid.spacing * 2.0 * float(f_pos.sum())
    weighted = grid.spacing * float(folded(phi, grid) @ f_pos)
    base = phi if isinstance(phi, PhiFunction) else _CallablePhi(phi)
    return RatioWeight(base, total, weighted)


class _CallablePhi(PhiFunction):
    def __init__(self, fun):
        self._fun = fun

    def __call__(self, freqs):
        return self._fun(freqs)


def sample_statistic(x, phi: PhiFunction, kind: str, center: bool = True) -> float:
    """The sample statistic whose law the bootstrap procedures approximate.

    Cosine weights use the exact time-domain form (the integral against the
    periodogram collapses to the lag-h autocovariance); any other weight
    falls back to the Riemann sum on the full grid.
    """
    if kind not in ("mean", "ratio"):
        raise ValueError("kind must be 'mean' or 'ratio'")
    if isinstance(phi, CosLag):
        acf = autocovariance(x, max(phi.h, 1), center=center)
        if kind == "mean":
            return float(acf[phi.h])
        if acf[0] <= 0:
            raise ValueError("ratio statistic needs positive sample variance")
        return float(acf[phi.h] / acf[0])
    pg = periodogram(series_values(x, center=center), center=False)
    if kind == "mean":
        return spectral_mean(phi, pg).value
    return ratio_statistic(phi, pg).value


# ---------------------------------------------------------------------------
# Closed-form limits for finite-order linear processes
# ---------------------------------------------------------------------------

def _integrate(fun: Callable[[float], float], breakpoints: Sequence[float] = ()) -> float:
    points = sorted({-np.pi, np.pi, *(float(bp) for bp in breakpoints if -np.pi < bp < np.pi)})
    total = 0.0
    for a, b in zip(points[:-1], points[1:]):
        part, _ = integrate.quad(fun, a, b, limit=200, epsabs=1e-10, epsrel=1e-10)
        total += part
    return total


@dataclass(frozen=True)
class LinearModelOracle:
    """Finite moving-average process: X_t = sum_j a_j eps_{t-j}.

    sigma2 is the innovation variance and eta the innovation kurtosis ratio
    E eps^4 / sigma^4 (3 for Gaussian noise, 9 for centered exponential).
    """

    ma_coefficients: tuple
    sigma2: float = 1.0
    eta: float = 3.0

    def __post_init__(self):
        if self.sigma2 <= 0:
            raise ValueError("innovation variance must be positive")
        if self.eta < 1.0:
            raise ValueError("kurtosis ratio below one is impossible")

    def spectral_density(self, freqs):
        lam = np.asarray(freqs, dtype=float)
        coeffs = np.asarray(self.ma_coefficients, dtype=float)
        j = np.arange(coeffs.size)
        transfer = np.exp(-1j * np.multiply.outer(lam, j)) @ coeffs
        return self.sigma2 / (2.0 * np.pi) * np.abs(transfer) ** 2

    def autocovariance(self, h: int) -> float:
        coeffs = np.asarray(self.ma_coefficients, dtype=float)
        h = abs(int(h))
        if h >= coeffs.size:
            return 0.0
        return self.sigma2 * float(coeffs[: coeffs.size - h] @ coeffs[h:])

    def spectral_mass(self, phi: PhiFunction | Callable) -> float:
        f = self.spectral_density
        return _integrate(lambda lam: float(phi(lam)) * float(f(lam)),
                          getattr(phi, "breakpoints", tuple)())


@dataclass(frozen=True)
class LinearVariance:
    """Limiting variance components for spectral means and their ratio form."""

    tau1_sq: float
    tau2: float
    tau_sq: float
    ratio_tau1_sq: float
    ratio_tau_sq: float


def linear_asymptotic_variance(oracle: LinearModelOracle, phi: PhiFunction) -> LinearVariance:
    """Quadrature evaluation of the limiting variances under a linear model.

    The fourth-order contribution reduces to (eta - 3) times the squared
    weighted spectral mass, and it drops out entirely of the ratio form.
    """
    f = oracle.spectral_density
    bps = getattr(phi, "breakpoints", tuple)()

    def sym_integrand(weight):
        def integrand(lam):
            return float(weight(lam)) * (float(weight(lam)) + float(weight(-lam))) * float(f(lam)) ** 2
        return integrand

    tau1_sq = 2.0 * np.pi * _integrate(sym_integrand(phi), bps)
    weighted_mass = oracle.spectral_mass(phi)
    total_mass = oracle.spectral_mass(ConstantOne())
    tau2 = (oracle.eta - 3.0) * weighted_mass ** 2

    def w(lam):
        return float(phi(lam)) * total_mass - weighted_mass

    ratio_tau1_sq = 2.0 * np.pi * _integrate(sym_integrand(w), bps) / total_mass ** 4
    return LinearVariance(
        tau1_sq=tau1_sq,
        tau2=tau2,
        tau_sq=tau1_sq + tau2,
        ratio_tau1_sq=ratio_tau1_sq,
        ratio_tau_sq=ratio_tau1_sq,
    )
