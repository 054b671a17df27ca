"""Distribution summaries and the hypothesis tests used by the studies.

The one-sample Kolmogorov-Smirnov test deliberately fits the reference
normal's mean and std from the sample itself and uses the asymptotic
Kolmogorov distribution with sqrt(count) scaling; no small-sample or
fitted-parameter correction is applied.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from ._validation import as_samples, check_positive_int
from .errors import (
    ConstraintViolationError,
    DegenerateDistributionError,
    InsufficientSamplesError,
)


@dataclass(frozen=True)
class DistributionSummary:
    """Boxplot-style summary of one sample."""

    count: int
    mean: float
    std: float
    median: float
    q1: float
    q3: float
    whisker_low: float
    whisker_high: float
    outliers: tuple[float, ...]
    min: float
    max: float


@dataclass(frozen=True)
class Histogram:
    """Equal-width histogram with a density normalized to integrate to 1."""

    bin_edges: np.ndarray
    counts: np.ndarray
    normalized_density: np.ndarray

    @property
    def total(self) -> int:
        return int(self.counts.sum())


@dataclass(frozen=True)
class TestResult:
    statistic: float
    p_value: float
    reject_at: float
    rejected: bool


def summarize(samples) -> DistributionSummary:
    """Boxplot statistics: interpolated quartiles, 1.5*IQR whiskers, outliers."""
    # sort first so every field, including the accumulated mean, is exactly
    # permutation-invariant
    x = np.sort(as_samples(samples))
    q1, med, q3 = np.percentile(x, [25.0, 50.0, 75.0])
    iqr = q3 - q1
    lo_fence = q1 - 1.5 * iqr
    hi_fence = q3 + 1.5 * iqr
    inside = x[(x >= lo_fence) & (x <= hi_fence)]
    # fences always contain the quartiles, so `inside` is never empty
    whisker_low = float(inside.min())
    whisker_high = float(inside.max())
    outliers = np.sort(x[(x < lo_fence) | (x > hi_fence)])
    std = float(x.std(ddof=1)) if x.size > 1 else 0.0
    return DistributionSummary(
        count=int(x.size),
        mean=float(x.mean()),
        std=std,
        median=float(med),
        q1=float(q1),
        q3=float(q3),
        whisker_low=whisker_low,
        whisker_high=whisker_high,
        outliers=tuple(float(v) for v in outliers),
        min=float(x.min()),
        max=float(x.max()),
    )


def histogram(samples, bin_count: int, bounds: tuple[float, float] | None = None) -> Histogram:
    """Equal-width histogram; the last bin is closed on the right.

    With explicit ``bounds`` the bin grid is fixed up front and samples are
    clipped into the edge bins, which keeps streamed partial histograms
    mergeable by plain addition.
    """
    check_positive_int(bin_count, "bin_count", minimum=1)
    x = as_samples(samples)
    if bounds is None:
        lo, hi = float(x.min()), float(x.max())
        if lo == hi:
            # degenerate range: widen by machine epsilon at the value's scale,
            # scaled up until every bin has a representable positive width
            pad = max(abs(lo), 1.0) * np.finfo(np.float64).eps * bin_count
            while np.any(np.diff(np.linspace(lo - pad, hi + pad, bin_count + 1)) <= 0):
                pad *= 2.0
            lo, hi = lo - pad, hi + pad
    else:
        lo, hi = float(bounds[0]), float(bounds[1])
        if not hi > lo:
            raise ConstraintViolationError(f"histogram bounds must satisfy lo < hi, got [{lo}, {hi}]")
        x = np.clip(x, lo, hi)
    edges = np.linspace(lo, hi, bin_count + 1)
    counts, _ = np.histogram(x, bins=edges)
    widths = np.diff(edges)
    density = counts / (x.size * widths)
    return Histogram(bin_edges=edges, counts=counts, normalized_density=density)


def _kolmogorov_sf(lam: float) -> float:
    """Asymptotic Kolmogorov survival function 2*sum (-1)^(k-1) exp(-2 k^2 lam^2)."""
    if lam <= 1e-8:
        return 1.0
    total = 0.0
    sign = 1.0
    k = 1
    while True:
        term = math.exp(-2.0 * k * k * lam * lam)
        total += sign * term
        if term < 1e-10:
            break
        sign = -sign
        k += 1
        if k > 10_000:
            break
    return min(1.0, max(0.0, 2.0 * total))


def ks_normal_test(samples, alpha: float = 0.05) -> TestResult:
    """One-sample KS test against a normal fitted to the sample's own moments."""
    x = as_samples(samples)
    if x.size < 8:
        raise InsufficientSamplesError(f"KS test needs at least 8 samples, got {x.size}")
    if not (0.0 < alpha < 1.0):
        raise ConstraintViolationError(f"alpha must be in (0, 1), got {alpha}")
    mean = float(x.mean())
    std = float(x.std(ddof=1))
    if std == 0.0:
        raise DegenerateDistributionError("KS test is undefined for a zero-spread sample")
    xs = np.sort(x)
    cdf = ndtr((xs - mean) / std)
    i = np.arange(1, xs.size + 1, dtype=np.float64)
    d_plus = float((i / xs.size - cdf).max())
    d_minus = float((cdf - (i - 1.0) / xs.size).max())
    stat = max(d_plus, d_minus)
    p = _kolmogorov_sf(math.sqrt(xs.size) * stat)
    return TestResult(statistic=stat, p_value=p, reject_at=alpha, rejected=p < alpha)


def z_from_moments(mean: float, count: int, mu0: float, sigma0: float,
                   alpha: float = 0.05) -> TestResult:
    """Two-sided z-test given a sample mean and count."""
    if sigma0 <= 0.0:
        raise ConstraintViolationError(f"sigma0 must be positive, got {sigma0}")
    if count < 30:
        raise InsufficientSamplesError(f"z-test needs at least 30 samples, got {count}")
    if not (0.0 < alpha < 1.0):
        raise ConstraintViolationError(f"alpha must be in (0, 1), got {alpha}")
    stat = (mean - mu0) / (sigma0 / math.sqrt(count))
    p = 2.0 * (1.0 - float(ndtr(abs(stat))))
    p = min(1.0, max(0.0, p))
    return TestResult(statistic=stat, p_value=p, reject_at=alpha, rejected=p < alpha)


def z_test(samples, mu0: float, sigma0: float, alpha: float = 0.05) -> TestResult:
    """Two-sided z-test of the sample mean against N(mu0, sigma0**2)."""
    x = as_samples(samples)
    return z_from_moments(float(x.mean()), int(x.size), float(mu0), float(sigma0), alpha)
