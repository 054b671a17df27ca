"""Input validation helpers shared by the public API."""

from __future__ import annotations

import numpy as np

from .errors import (
    ConstraintViolationError,
    DimensionMismatchError,
    EmptySampleError,
)


def as_vector(x, name: str = "vector") -> np.ndarray:
    """Coerce to a 1-D float64 array of finite values, length >= 1."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 1:
        raise ConstraintViolationError(f"{name} must be 1-dimensional, got shape {arr.shape}")
    if arr.size < 1:
        raise ConstraintViolationError(f"{name} must have at least one coordinate")
    if not np.all(np.isfinite(arr)):
        raise ConstraintViolationError(f"{name} contains non-finite coordinates")
    return arr


def as_matrix(x, name: str = "array") -> np.ndarray:
    """Coerce to a 2-D float64 array of finite values."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 2:
        raise ConstraintViolationError(f"{name} must be 2-dimensional, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ConstraintViolationError(f"{name} must be non-empty, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ConstraintViolationError(f"{name} contains non-finite values")
    return arr


def check_same_length(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape[-1] != b.shape[-1]:
        raise DimensionMismatchError(
            f"vectors have different dimensions: {a.shape[-1]} vs {b.shape[-1]}"
        )


def as_samples(samples, name: str = "samples") -> np.ndarray:
    """Coerce to a non-empty 1-D float64 sample array."""
    arr = np.asarray(samples, dtype=np.float64)
    if arr.ndim != 1:
        arr = arr.ravel()
    if arr.size == 0:
        raise EmptySampleError(f"{name} is empty")
    if not np.all(np.isfinite(arr)):
        raise ConstraintViolationError(f"{name} contains non-finite values")
    return arr


def check_positive_int(value, name: str, minimum: int = 1) -> int:
    if not isinstance(value, (int, np.integer)) or isinstance(value, bool):
        raise ConstraintViolationError(f"{name} must be an integer, got {value!r}")
    if value < minimum:
        raise ConstraintViolationError(f"{name} must be >= {minimum}, got {value}")
    return int(value)
