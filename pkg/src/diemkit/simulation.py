"""Monte Carlo dimension sweeps and the derived convergence studies.

The core loop: for each dimension, draw `trials_per_dim` independent vector
pairs, evaluate one metric on every pair, and summarize the resulting
distribution.  Everything is keyed off a single master seed; per-dimension
work items are independent, so they may run on a thread pool without
changing any value.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import vecgen
from ._rng import stream_key
from ._validation import check_positive_int
from .calibration import (
    DEFAULT_CALIBRATION_TRIALS,
    DiemCalibration,
    calibrate,
    diem_from_distance,
)
from .domain import DomainSpec, SamplingDistribution, SeedSpec, Uniform
from .errors import ConstraintViolationError, DiemKitError, InsufficientDataError
from .metrics import (
    CosineConvention,
    MetricKind,
    cosine_rows,
    euclidean_rows,
    manhattan_rows,
    normalized_euclidean_rows,
)
from .stats import DistributionSummary, TestResult, ks_normal_test, summarize

DEFAULT_DIMS = (2, 12, 22, 32, 42, 52, 62, 72, 82, 92, 102)
DEFAULT_TRIALS_PER_DIM = 10_000

_TAG_SWEEP_CAL = 0xC4


@dataclass(frozen=True)
class SweepConfig:
    metric: MetricKind
    domain: DomainSpec
    sampling: SamplingDistribution = field(default_factory=Uniform)
    dims: tuple[int, ...] = DEFAULT_DIMS
    trials_per_dim: int = DEFAULT_TRIALS_PER_DIM
    seed: SeedSpec = SeedSpec(0)

    def __post_init__(self):
        object.__setattr__(self, "metric", MetricKind(self.metric))
        dims = tuple(int(d) for d in self.dims)
        if len(dims) == 0:
            raise ConstraintViolationError("dims must be nonempty")
        if any(d < 2 for d in dims):
            raise ConstraintViolationError(f"all dims must be >= 2, got {dims}")
        if any(b <= a for a, b in zip(dims, dims[1:])):
            raise ConstraintViolationError(f"dims must be strictly increasing, got {dims}")
        object.__setattr__(self, "dims", dims)
        check_positive_int(self.trials_per_dim, "trials_per_dim", minimum=100)


@dataclass(frozen=True)
class SweepResult:
    config: SweepConfig
    per_dim: dict[int, DistributionSummary]
    per_dim_skipped: dict[int, int]
    per_dim_samples: dict[int, np.ndarray] | None = None
    calibrations: dict[int, DiemCalibration] | None = None


def _pair_blocks(n: int, sampling, domain: DomainSpec, seed: SeedSpec, trials: int):
    """Yield (a_block, b_block) chunks; pair t is vecgen trials (2t, 2t+1)."""
    step = max(256, min(20_000, 500_000 // n))
    for start in range(0, trials, step):
        count = min(step, trials - start)
        block = vecgen.sample_block(n, sampling, domain, seed, 2 * start, 2 * count)
        yield block[0::2], block[1::2]


def _metric_values(metric: MetricKind, n: int, sampling, domain: DomainSpec,
                   seed: SeedSpec, trials: int,
                   cal: DiemCalibration | None) -> tuple[np.ndarray, int]:
    """Metric values for `trials` pairs plus the count of skipped pairs."""
    chunks = []
    skipped = 0
    for a, b in _pair_blocks(n, sampling, domain, seed, trials):
        if metric is MetricKind.COSINE_UNSIGNED:
            v = cosine_rows(a, b, CosineConvention.UNSIGNED)
        elif metric is MetricKind.COSINE_SIGNED:
            v = cosine_rows(a, b, CosineConvention.SIGNED)
        elif metric is MetricKind.EUCLIDEAN:
            v = euclidean_rows(a, b)
        elif metric is MetricKind.NORMALIZED_EUCLIDEAN:
            v = normalized_euclidean_rows(a, b)
        elif metric is MetricKind.MANHATTAN:
            v = manhattan_rows(a, b)
        elif metric is MetricKind.DIEM:
            v = diem_from_distance(euclidean_rows(a, b), cal)
        else:
            raise ConstraintViolationError(f"unknown metric: {metric!r}")
        bad = ~np.isfinite(v)
        if np.any(bad):
            skipped += int(bad.sum())
            v = v[~bad]
        chunks.append(v)
    return np.concatenate(chunks), skipped


def _sweep_calibration(config: SweepConfig, dim: int, calibration_trials: int) -> DiemCalibration:
    derived = SeedSpec(stream_key(_TAG_SWEEP_CAL, config.seed.master_seed, dim))
    return calibrate(dim, config.domain, trials=calibration_trials, seed=derived)


def run_sweep(config: SweepConfig, retain_samples: bool = False,
              calibration_trials: int = DEFAULT_CALIBRATION_TRIALS,
              max_workers: int | None = None) -> SweepResult:
    """Run the dimension sweep described by `config`.

    For the DIEM metric each dimension is calibrated internally with a seed
    derived from the config seed.  Pairs that a metric cannot score (zero
    norm under cosine) are skipped and counted, never silently dropped.
    """
    def one_dim(dim: int):
        cal = None
        if config.metric is MetricKind.DIEM:
            cal = _sweep_calibration(config, dim, calibration_trials)
        values, skipped = _metric_values(config.metric, dim, config.sampling,
                                         config.domain, config.seed,
                                         config.trials_per_dim, cal)
        return dim, summarize(values), skipped, values, cal

    results = {}
    if max_workers is not None and max_workers == 1:
        rows = [one_dim(d) for d in config.dims]
    else:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            rows = list(pool.map(one_dim, config.dims))
    per_dim = {}
    per_dim_skipped = {}
    samples = {} if retain_samples else None
    cals = {}
    for dim, summary, skipped, values, cal in rows:
        per_dim[dim] = summary
        per_dim_skipped[dim] = skipped
        if retain_samples:
            samples[dim] = values
        if cal is not None:
            cals[dim] = cal
    return SweepResult(config=config, per_dim=per_dim, per_dim_skipped=per_dim_skipped,
                       per_dim_samples=samples, calibrations=cals or None)


@dataclass(frozen=True)
class ConvergenceRow:
    dim: int
    mean: float
    std: float


@dataclass(frozen=True)
class ConvergenceResult:
    rows: tuple[ConvergenceRow, ...]
    slope: float
    intercept: float


def convergence_check(metric: MetricKind, domain: DomainSpec, sampling: SamplingDistribution,
                      dims, trials: int = DEFAULT_TRIALS_PER_DIM,
                      seed: SeedSpec = SeedSpec(0),
                      calibration_trials: int = DEFAULT_CALIBRATION_TRIALS) -> ConvergenceResult:
    """Per-dimension mean/std table with the fitted log(std) vs log(n) slope."""
    dims = tuple(int(d) for d in dims)
    if len(dims) < 3:
        raise InsufficientDataError(f"convergence fit needs >= 3 dims, got {len(dims)}")
    if max(dims) < 10 * min(dims):
        raise InsufficientDataError(
            f"dims should span at least a decade, got {min(dims)}..{max(dims)}"
        )
    config = SweepConfig(metric=metric, domain=domain, sampling=sampling,
                         dims=tuple(sorted(dims)), trials_per_dim=trials, seed=seed)
    rows = []
    for dim in config.dims:
        cal = None
        if metric is MetricKind.DIEM:
            cal = _sweep_calibration(config, dim, calibration_trials)
        values, _ = _metric_values(config.metric, dim, config.sampling, config.domain,
                                   config.seed, config.trials_per_dim, cal)
        rows.append(ConvergenceRow(dim=dim, mean=float(values.mean()),
                                   std=float(values.std(ddof=1))))
    log_n = np.log([r.dim for r in rows])
    log_s = np.log([r.std for r in rows])
    slope, intercept = np.polyfit(log_n, log_s, 1)
    return ConvergenceResult(rows=tuple(rows), slope=float(slope), intercept=float(intercept))


def normality_transition(domain: DomainSpec, sampling: SamplingDistribution | None = None,
                         dims=tuple(range(2, 13)), trials: int = DEFAULT_TRIALS_PER_DIM,
                         alpha: float = 0.05,
                         seed: SeedSpec = SeedSpec(0)) -> dict[int, TestResult]:
    """KS normality test on Euclidean-distance samples, one per dimension."""
    sampling = sampling if sampling is not None else Uniform()
    dims = tuple(int(d) for d in dims)
    if not dims or any(d < 2 or d > 12 for d in dims):
        raise ConstraintViolationError(f"dims must lie within [2, 12], got {dims}")
    check_positive_int(trials, "trials", minimum=1000)
    out = {}
    for dim in dims:
        values, _ = _metric_values(MetricKind.EUCLIDEAN, dim, sampling, domain,
                                   seed, trials, None)
        out[dim] = ks_normal_test(values, alpha)
    return out


@dataclass(frozen=True)
class ManhattanRow:
    dim: int
    mean: float
    std: float
    max_bound: float


def manhattan_growth_check(domain: DomainSpec, dims=DEFAULT_DIMS,
                           trials: int = DEFAULT_TRIALS_PER_DIM,
                           seed: SeedSpec = SeedSpec(0)) -> tuple[ManhattanRow, ...]:
    """Manhattan distance growth table; checks samples against n*(v_max - v_min)."""
    config = SweepConfig(metric=MetricKind.MANHATTAN, domain=domain,
                         sampling=Uniform(), dims=tuple(sorted(int(d) for d in dims)),
                         trials_per_dim=trials, seed=seed)
    rows = []
    for dim in config.dims:
        values, _ = _metric_values(MetricKind.MANHATTAN, dim, config.sampling,
                                   config.domain, config.seed, config.trials_per_dim, None)
        bound = dim * domain.width
        observed_max = float(values.max())
        if observed_max > bound:
            raise DiemKitError(
                f"Manhattan sample {observed_max} exceeds bound {bound} at dim {dim}"
            )
        rows.append(ManhattanRow(dim=dim, mean=float(values.mean()),
                                 std=float(values.std(ddof=1)), max_bound=bound))
    return tuple(rows)
