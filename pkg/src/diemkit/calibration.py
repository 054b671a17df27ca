"""DIEM: the dimension-insensitive Euclidean metric and its calibration.

The raw Euclidean distance between random bounded vectors has a mean that
grows with dimension but a spread that does not.  DIEM removes the growth by
subtracting the expected distance E[d(n)] for the calibrated dimension and
range, then rescales by range/variance:

    DIEM(a, b) = (v_max - v_min) / var_ed * (||a - b|| - E[d(n)])

E[d(n)] and var_ed come from a seeded Monte Carlo run over uniform pairs in
the calibration domain (the analytic bound sqrt(n/6)*(v_max - v_min) is an
upper bound on E[d(n)], not a substitute: the gap is what detrending must
remove).  A calibration is immutable, serializable, and reproducible from
its recorded seed and trial count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import vecgen
from ._rng import stream_key, uniform_block
from ._validation import as_vector, check_positive_int, check_same_length
from .domain import DomainSpec, SeedSpec, SignDomain
from .errors import (
    CalibrationMismatchError,
    ConstraintViolationError,
    InsufficientSamplesError,
    ParseError,
)

_TAG_ORTH_MASK = 0x4D
_TAG_ORTH_A = 0x41
_TAG_ORTH_B = 0x42

DEFAULT_CALIBRATION_TRIALS = 100_000
DEFAULT_ORTHOGONAL_TRIALS = 20_000


def _pairs_per_block(n: int) -> int:
    # keep chunks around a million draws so temporaries stay cache-friendly
    return max(256, min(20_000, 500_000 // n))


class OrthogonalStrategy(Enum):
    """How to construct exactly-orthogonal vector pairs.

    SUPPORT_PARTITION splits the coordinate indices at random and gives each
    vector the uniform draw on its own side and zeros on the other, which
    keeps every coordinate inside a sign-restricted domain.  GRAM_SCHMIDT
    projects an independent second draw onto the orthogonal complement of
    the first and rescales it back to its original norm; the projected
    coordinates may leave the domain box, so this is the natural choice for
    all-real domains.
    """

    SUPPORT_PARTITION = "support-partition"
    GRAM_SCHMIDT = "gram-schmidt"


@dataclass(frozen=True)
class DiemCalibration:
    """Per-(n, domain) constants needed to evaluate DIEM."""

    n: int
    domain: DomainSpec
    expected_d: float
    expected_d_analytic: float
    var_ed: float
    diem_min: float
    diem_max: float
    diem_orth: float
    sigma_diem: float
    trials: int
    seed: SeedSpec

    @property
    def scale(self) -> float:
        """(v_max - v_min) / var_ed, the factor applied to detrended distances."""
        return self.domain.width / self.var_ed


def expected_distance_analytic(n: int, domain: DomainSpec) -> float:
    """Upper bound sqrt(n/6) * (v_max - v_min) on the expected distance."""
    check_positive_int(n, "n", minimum=1)
    if not isinstance(domain, DomainSpec):
        raise ConstraintViolationError("domain must be a DomainSpec")
    return math.sqrt(n / 6.0) * domain.width


def _distance_sample(n: int, domain: DomainSpec, trials: int, seed: SeedSpec) -> np.ndarray:
    """Euclidean distances over `trials` independent uniform pairs.

    Pair t uses vecgen trials 2t and 2t+1, so any pair is reproducible in
    isolation.
    """
    out = np.empty(trials)
    step = _pairs_per_block(n)
    for start in range(0, trials, step):
        count = min(step, trials - start)
        block = vecgen.sample_uniform_block(n, domain, seed, 2 * start, 2 * count)
        a = block[0::2]
        b = block[1::2]
        out[start:start + count] = np.linalg.norm(a - b, axis=1)
    return out


def diem_value(a, b, cal: DiemCalibration) -> float:
    """DIEM between two vectors under a calibration."""
    a = as_vector(a, "a")
    b = as_vector(b, "b")
    check_same_length(a, b)
    if a.shape[0] != cal.n:
        raise CalibrationMismatchError(
            f"calibration is for n={cal.n}, got vectors of dimension {a.shape[0]}"
        )
    d = float(np.linalg.norm(a - b))
    return cal.scale * (d - cal.expected_d)


def diem_rows(A: np.ndarray, B: np.ndarray, cal: DiemCalibration) -> np.ndarray:
    """Row-wise DIEM for matching (m, n) arrays."""
    if A.shape[1] != cal.n:
        raise CalibrationMismatchError(
            f"calibration is for n={cal.n}, got vectors of dimension {A.shape[1]}"
        )
    return cal.scale * (np.linalg.norm(A - B, axis=1) - cal.expected_d)


def diem_from_distance(d: float | np.ndarray, cal: DiemCalibration):
    """DIEM given a precomputed Euclidean distance."""
    return cal.scale * (d - cal.expected_d)


def default_strategy(domain: DomainSpec) -> OrthogonalStrategy:
    if domain.sign_domain is SignDomain.ALL:
        return OrthogonalStrategy.GRAM_SCHMIDT
    return OrthogonalStrategy.SUPPORT_PARTITION


def _orthogonal_pairs(n: int, domain: DomainSpec, strategy: OrthogonalStrategy,
                      trial_start: int, trial_count: int,
                      seed: SeedSpec) -> tuple[np.ndarray, np.ndarray]:
    """(A, B) chunk of orthogonal pairs; every row pair has |cos| < 1e-10."""
    if strategy is OrthogonalStrategy.SUPPORT_PARTITION:
        if not (domain.v_min == 0.0 or domain.v_max == 0.0):
            raise ConstraintViolationError(
                "support partition needs a domain touching zero (v_min = 0 or v_max = 0)"
            )
        if n < 2:
            raise ConstraintViolationError("support partition needs n >= 2")
        mask_key = stream_key(_TAG_ORTH_MASK, seed.master_seed, n)
        u = uniform_block(mask_key, trial_start, trial_count, n)
        mask = u < 0.5
        # both supports must be nonempty; flip the most borderline coordinate
        all_a = mask.all(axis=1)
        if np.any(all_a):
            rows = np.nonzero(all_a)[0]
            mask[rows, np.argmax(u[rows], axis=1)] = False
        none_a = ~mask.any(axis=1)
        if np.any(none_a):
            rows = np.nonzero(none_a)[0]
            mask[rows, np.argmin(u[rows], axis=1)] = True
        a = vecgen.sample_uniform_block(n, domain, _derive_seed(seed, _TAG_ORTH_A, n),
                                        trial_start, trial_count)
        b = vecgen.sample_uniform_block(n, domain, _derive_seed(seed, _TAG_ORTH_B, n),
                                        trial_start, trial_count)
        a = np.where(mask, a, 0.0)
        b = np.where(mask, 0.0, b)
        return a, b

    if strategy is OrthogonalStrategy.GRAM_SCHMIDT:
        if n < 2:
            raise ConstraintViolationError("orthogonalization needs n >= 2")
        a = vecgen.sample_uniform_block(n, domain, _derive_seed(seed, _TAG_ORTH_A, n),
                                        trial_start, trial_count)
        b = vecgen.sample_uniform_block(n, domain, _derive_seed(seed, _TAG_ORTH_B, n),
                                        trial_start, trial_count)
        aa = np.einsum("ij,ij->i", a, a)
        ab = np.einsum("ij,ij->i", a, b)
        b_perp = b - (ab / aa)[:, None] * a
        norm_b = np.linalg.norm(b, axis=1)
        norm_perp = np.linalg.norm(b_perp, axis=1)
        keep = norm_perp > 0.0
        b_out = np.zeros_like(b)
        b_out[keep] = b_perp[keep] * (norm_b[keep] / norm_perp[keep])[:, None]
        return a[keep], b_out[keep]

    raise ConstraintViolationError(f"unknown orthogonal strategy: {strategy!r}")


def _derive_seed(seed: SeedSpec, tag: int, n: int) -> SeedSpec:
    return SeedSpec(stream_key(tag, seed.master_seed, n))


def _orthogonal_reference(n: int, domain: DomainSpec, expected_d: float, var_ed: float,
                          strategy: OrthogonalStrategy, trials: int,
                          seed: SeedSpec) -> float:
    check_positive_int(trials, "trials", minimum=1)
    if trials < 1000:
        raise InsufficientSamplesError(f"orthogonal reference needs >= 1000 trials, got {trials}")
    total = 0.0
    accepted = 0
    step = _pairs_per_block(n)
    for start in range(0, trials, step):
        count = min(step, trials - start)
        a, b = _orthogonal_pairs(n, domain, strategy, start, count, seed)
        if a.shape[0] == 0:
            continue
        na = np.linalg.norm(a, axis=1)
        nb = np.linalg.norm(b, axis=1)
        valid = (na > 0.0) & (nb > 0.0)
        cos = np.abs(np.einsum("ij,ij->i", a[valid], b[valid])) / (na[valid] * nb[valid])
        keep = cos < 1e-10
        d = np.linalg.norm(a[valid][keep] - b[valid][keep], axis=1)
        total += float(d.sum())
        accepted += int(d.size)
    if accepted == 0:
        raise InsufficientSamplesError("no orthogonal pairs passed the |cos| < 1e-10 check")
    scale = domain.width / var_ed
    return scale * (total / accepted - expected_d)


def orthogonal_reference(cal: DiemCalibration, strategy: OrthogonalStrategy | None = None,
                         trials: int | None = None, seed: SeedSpec | None = None) -> float:
    """Mean DIEM over constructed orthogonal pairs under a calibration."""
    strategy = strategy or default_strategy(cal.domain)
    trials = cal.trials if trials is None else trials
    seed = cal.seed if seed is None else seed
    return _orthogonal_reference(cal.n, cal.domain, cal.expected_d, cal.var_ed,
                                 strategy, trials, seed)


def calibrate(n: int, domain: DomainSpec, trials: int = DEFAULT_CALIBRATION_TRIALS,
              seed: SeedSpec = SeedSpec(0),
              orthogonal_strategy: OrthogonalStrategy | None = None,
              orthogonal_trials: int | None = None) -> DiemCalibration:
    """Estimate the DIEM constants for one (n, domain) pair.

    expected_d and var_ed are the mean and unbiased variance of the
    Euclidean distance over `trials` uniform pairs; the bounds follow from
    substituting d = 0 and d = sqrt(n) * (v_max - v_min); sigma_diem is the
    sample std of DIEM over the same trials.  n = 1 is allowed but has no
    orthogonal pairs, so diem_orth is NaN there.
    """
    check_positive_int(n, "n", minimum=1)
    if not isinstance(domain, DomainSpec):
        raise ConstraintViolationError("domain must be a DomainSpec")
    check_positive_int(trials, "trials", minimum=1)
    if trials < 1000:
        raise InsufficientSamplesError(f"calibration needs >= 1000 trials, got {trials}")
    if not isinstance(seed, SeedSpec):
        raise ConstraintViolationError("seed must be a SeedSpec")

    d = _distance_sample(n, domain, trials, seed)
    expected_d = float(d.mean())
    var_ed = float(d.var(ddof=1))
    if var_ed == 0.0:
        raise ConstraintViolationError("distance sample has zero variance; cannot calibrate")
    scale = domain.width / var_ed
    diem_samples = scale * (d - expected_d)
    sigma_diem = float(diem_samples.std(ddof=1))
    diem_min = -scale * expected_d
    diem_max = scale * (math.sqrt(n) * domain.width - expected_d)

    if n >= 2:
        strategy = orthogonal_strategy or default_strategy(domain)
        orth_trials = (min(trials, DEFAULT_ORTHOGONAL_TRIALS)
                       if orthogonal_trials is None else orthogonal_trials)
        diem_orth = _orthogonal_reference(n, domain, expected_d, var_ed,
                                          strategy, orth_trials, seed)
    else:
        diem_orth = float("nan")

    return DiemCalibration(
        n=n,
        domain=domain,
        expected_d=expected_d,
        expected_d_analytic=expected_distance_analytic(n, domain),
        var_ed=var_ed,
        diem_min=diem_min,
        diem_max=diem_max,
        diem_orth=diem_orth,
        sigma_diem=sigma_diem,
        trials=trials,
        seed=seed,
    )


# --- calibration file round-trip ------------------------------------------

_FILE_KEYS = (
    "n", "v_min", "v_max", "sign_domain", "trials", "master_seed",
    "expected_d", "expected_d_analytic", "var_ed", "diem_min", "diem_max",
    "diem_orth", "sigma_diem",
)


def format_calibration(cal: DiemCalibration) -> str:
    """Flat key-value text form; reals carry 17 significant digits."""
    values = {
        "n": str(cal.n),
        "v_min": f"{cal.domain.v_min:.17g}",
        "v_max": f"{cal.domain.v_max:.17g}",
        "sign_domain": cal.domain.sign_domain.value,
        "trials": str(cal.trials),
        "master_seed": str(cal.seed.master_seed),
        "expected_d": f"{cal.expected_d:.17g}",
        "expected_d_analytic": f"{cal.expected_d_analytic:.17g}",
        "var_ed": f"{cal.var_ed:.17g}",
        "diem_min": f"{cal.diem_min:.17g}",
        "diem_max": f"{cal.diem_max:.17g}",
        "diem_orth": f"{cal.diem_orth:.17g}",
        "sigma_diem": f"{cal.sigma_diem:.17g}",
    }
    return "".join(f"{k} = {values[k]}\n" for k in _FILE_KEYS)


def save_calibration(cal: DiemCalibration, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_calibration(cal))


def parse_calibration(text: str, path=None) -> DiemCalibration:
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"expected 'key = value', got {line!r}", path=path, line=lineno)
        key, _, val = line.partition("=")
        key = key.strip()
        if key not in _FILE_KEYS:
            raise ParseError(f"unknown calibration key {key!r}", path=path, line=lineno)
        if key in values:
            raise ParseError(f"duplicate calibration key {key!r}", path=path, line=lineno)
        values[key] = val.strip()
    missing = [k for k in _FILE_KEYS if k not in values]
    if missing:
        raise ParseError(f"missing calibration keys: {', '.join(missing)}", path=path)
    try:
        domain = DomainSpec(float(values["v_min"]), float(values["v_max"]),
                            SignDomain(values["sign_domain"]))
        return DiemCalibration(
            n=int(values["n"]),
            domain=domain,
            expected_d=float(values["expected_d"]),
            expected_d_analytic=float(values["expected_d_analytic"]),
            var_ed=float(values["var_ed"]),
            diem_min=float(values["diem_min"]),
            diem_max=float(values["diem_max"]),
            diem_orth=float(values["diem_orth"]),
            sigma_diem=float(values["sigma_diem"]),
            trials=int(values["trials"]),
            seed=SeedSpec(int(values["master_seed"])),
        )
    except (ValueError, ConstraintViolationError) as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(f"invalid calibration value: {exc}", path=path) from exc


def load_calibration(path) -> DiemCalibration:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_calibration(fh.read(), path=path)
