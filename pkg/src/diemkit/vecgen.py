"""Deterministic generation of random test vectors.

Single-vector functions are thin wrappers over the batch ones; row ``i`` of a
batch starting at trial ``t0`` is bitwise identical to the single draw at
trial ``t0 + i``.
"""

from __future__ import annotations

import numpy as np

from . import _rng
from ._validation import check_positive_int
from .domain import DomainSpec, Gaussian, SeedSpec, SignDomain
from .errors import ConstraintViolationError, DiemKitError

# stream tags keep the three samplers (and Box-Muller's two inputs) apart
_TAG_UNIFORM = 0x75
_TAG_GAUSS_U1 = 0x67
_TAG_GAUSS_U2 = 0x68
_TAG_SPHERE_U1 = 0x73
_TAG_SPHERE_U2 = 0x74


def _check_args(n: int, seed: SeedSpec, trial: int, min_n: int = 1) -> None:
    check_positive_int(n, "n", minimum=min_n)
    if n > _rng.MAX_LANES:
        raise ConstraintViolationError(f"n={n} exceeds supported maximum {_rng.MAX_LANES}")
    if not isinstance(seed, SeedSpec):
        raise ConstraintViolationError(f"seed must be a SeedSpec, got {type(seed).__name__}")
    check_positive_int(trial, "trial", minimum=0)
    if trial >= _rng.MAX_TRIALS:
        raise ConstraintViolationError(f"trial={trial} exceeds supported maximum {_rng.MAX_TRIALS}")


def sample_uniform_block(n: int, domain: DomainSpec, seed: SeedSpec,
                         trial_start: int, trial_count: int) -> np.ndarray:
    """(trial_count, n) array of uniform draws over the domain box."""
    _check_args(n, seed, trial_start)
    check_positive_int(trial_count, "trial_count", minimum=1)
    key = _rng.stream_key(_TAG_UNIFORM, seed.master_seed, n)
    u = _rng.uniform_block(key, trial_start, trial_count, n)
    out = domain.v_min + domain.width * u
    # containment in [v_min, v_max] is a hard guarantee, not a rounding accident
    np.clip(out, domain.v_min, domain.v_max, out=out)
    return out


def sample_uniform(n: int, domain: DomainSpec, seed: SeedSpec, trial: int = 0) -> np.ndarray:
    """One uniform vector for the (seed, n, trial) triple."""
    return sample_uniform_block(n, domain, seed, trial, 1)[0]


def sample_gaussian_block(n: int, params: Gaussian, domain: DomainSpec, seed: SeedSpec,
                          trial_start: int, trial_count: int) -> np.ndarray:
    """(trial_count, n) array of normal draws.

    Coordinates are not clipped to the domain box; the domain only labels
    which study the vectors belong to.
    """
    _check_args(n, seed, trial_start)
    check_positive_int(trial_count, "trial_count", minimum=1)
    if not isinstance(params, Gaussian):
        raise ConstraintViolationError("params must be a Gaussian distribution spec")
    k1 = _rng.stream_key(_TAG_GAUSS_U1, seed.master_seed, n)
    k2 = _rng.stream_key(_TAG_GAUSS_U2, seed.master_seed, n)
    z = _rng.normal_block(k1, k2, trial_start, trial_count, n)
    return params.mean + params.std * z


def sample_gaussian(n: int, params: Gaussian, domain: DomainSpec, seed: SeedSpec,
                    trial: int = 0) -> np.ndarray:
    return sample_gaussian_block(n, params, domain, seed, trial, 1)[0]


def sample_unit_sphere_block(n: int, domain: DomainSpec, seed: SeedSpec,
                             trial_start: int, trial_count: int) -> np.ndarray:
    """(trial_count, n) array of unit-norm vectors.

    All-real domains use the Gaussian direction construction, which is
    uniform on the sphere.  Sign-restricted domains draw uniformly in the
    domain box and normalize, preserving the sign pattern.
    """
    _check_args(n, seed, trial_start, min_n=2)
    check_positive_int(trial_count, "trial_count", minimum=1)
    if domain.sign_domain is SignDomain.ALL:
        k1 = _rng.stream_key(_TAG_SPHERE_U1, seed.master_seed, n)
        k2 = _rng.stream_key(_TAG_SPHERE_U2, seed.master_seed, n)
        raw = _rng.normal_block(k1, k2, trial_start, trial_count, n)
    else:
        raw = sample_uniform_block(n, domain, seed, trial_start, trial_count)
    norms = np.linalg.norm(raw, axis=1)
    if np.any(norms == 0.0):
        raise DiemKitError("degenerate zero-norm draw during sphere sampling")
    return raw / norms[:, None]


def sample_unit_sphere(n: int, domain: DomainSpec, seed: SeedSpec, trial: int = 0) -> np.ndarray:
    return sample_unit_sphere_block(n, domain, seed, trial, 1)[0]


def sample_block(n: int, sampling, domain: DomainSpec, seed: SeedSpec,
                 trial_start: int, trial_count: int) -> np.ndarray:
    """Dispatch on a SamplingDistribution value."""
    from .domain import Uniform, UnitSphere

    if isinstance(sampling, Uniform):
        return sample_uniform_block(n, domain, seed, trial_start, trial_count)
    if isinstance(sampling, Gaussian):
        return sample_gaussian_block(n, sampling, domain, seed, trial_start, trial_count)
    if isinstance(sampling, UnitSphere):
        return sample_unit_sphere_block(n, domain, seed, trial_start, trial_count)
    raise ConstraintViolationError(f"unknown sampling distribution: {sampling!r}")
