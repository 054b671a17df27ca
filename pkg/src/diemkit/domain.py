"""Sampling domains, coordinate distributions, and seed handling."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .errors import ConstraintViolationError


class SignDomain(str, Enum):
    """Sign restriction of the coordinate range."""

    POSITIVE = "positive"
    NEGATIVE = "negative"
    ALL = "all"


@dataclass(frozen=True)
class DomainSpec:
    """Coordinate bounds plus their sign restriction.

    Every coordinate of a sampled vector lives in [v_min, v_max]; the sign
    tag must agree with the bounds (positive implies v_min >= 0, negative
    implies v_max <= 0, all-real implies v_min < 0 < v_max).
    """

    v_min: float
    v_max: float
    sign_domain: SignDomain

    def __post_init__(self):
        v_min = float(self.v_min)
        v_max = float(self.v_max)
        object.__setattr__(self, "v_min", v_min)
        object.__setattr__(self, "v_max", v_max)
        if not (v_max > v_min):
            raise ConstraintViolationError(f"v_max must exceed v_min, got [{v_min}, {v_max}]")
        sign = SignDomain(self.sign_domain)
        object.__setattr__(self, "sign_domain", sign)
        if sign is SignDomain.POSITIVE and v_min < 0:
            raise ConstraintViolationError(f"positive domain requires v_min >= 0, got {v_min}")
        if sign is SignDomain.NEGATIVE and v_max > 0:
            raise ConstraintViolationError(f"negative domain requires v_max <= 0, got {v_max}")
        if sign is SignDomain.ALL and not (v_min < 0 < v_max):
            raise ConstraintViolationError(
                f"all-real domain requires v_min < 0 < v_max, got [{v_min}, {v_max}]"
            )

    @property
    def width(self) -> float:
        return self.v_max - self.v_min

    @classmethod
    def positive(cls, v_min: float = 0.0, v_max: float = 1.0) -> "DomainSpec":
        return cls(v_min, v_max, SignDomain.POSITIVE)

    @classmethod
    def negative(cls, v_min: float = -1.0, v_max: float = 0.0) -> "DomainSpec":
        return cls(v_min, v_max, SignDomain.NEGATIVE)

    @classmethod
    def all_real(cls, v_min: float = -1.0, v_max: float = 1.0) -> "DomainSpec":
        return cls(v_min, v_max, SignDomain.ALL)


DEFAULT_DOMAINS = {
    SignDomain.POSITIVE: DomainSpec.positive(),
    SignDomain.NEGATIVE: DomainSpec.negative(),
    SignDomain.ALL: DomainSpec.all_real(),
}


@dataclass(frozen=True)
class Uniform:
    """Coordinates drawn i.i.d. uniform over the domain box."""


@dataclass(frozen=True)
class Gaussian:
    """Coordinates drawn i.i.d. normal with the given mean and std."""

    mean: float
    std: float

    def __post_init__(self):
        object.__setattr__(self, "mean", float(self.mean))
        object.__setattr__(self, "std", float(self.std))
        if not self.std > 0:
            raise ConstraintViolationError(f"Gaussian std must be positive, got {self.std}")


@dataclass(frozen=True)
class UnitSphere:
    """Vectors of unit Euclidean norm (direction from the domain's sampler)."""


SamplingDistribution = Uniform | Gaussian | UnitSphere

# Per-sign-domain Gaussian defaults used by the dimension studies.
GAUSSIAN_DEFAULTS = {
    SignDomain.POSITIVE: Gaussian(0.5, 0.3),
    SignDomain.NEGATIVE: Gaussian(-0.5, 0.3),
    SignDomain.ALL: Gaussian(0.0, 0.6),
}


def default_gaussian(domain: DomainSpec) -> Gaussian:
    """Gaussian parameters conventionally paired with a sign domain."""
    return GAUSSIAN_DEFAULTS[domain.sign_domain]


@dataclass(frozen=True)
class SeedSpec:
    """Master seed for all deterministic sampling.

    Streams are derived per (purpose, dimension, trial), so results do not
    depend on evaluation order or parallel scheduling.
    """

    master_seed: int = 0

    def __post_init__(self):
        seed = int(self.master_seed)
        if not (0 <= seed < 2**64):
            raise ConstraintViolationError(
                f"master_seed must be a 64-bit unsigned integer, got {seed}"
            )
        object.__setattr__(self, "master_seed", seed)
