"""Scalar comparison metrics between equal-length vectors."""

from __future__ import annotations

from enum import Enum

import numpy as np

from ._validation import as_vector, check_same_length
from .errors import ConstraintViolationError, UndefinedSimilarityError

# past this size, accumulate in extended precision to bound error growth
_LONG_ACC_THRESHOLD = 10_000


class CosineConvention(Enum):
    UNSIGNED = "unsigned"
    SIGNED = "signed"


class MetricKind(str, Enum):
    COSINE_UNSIGNED = "cosine-unsigned"
    COSINE_SIGNED = "cosine-signed"
    EUCLIDEAN = "euclidean"
    NORMALIZED_EUCLIDEAN = "normalized-euclidean"
    MANHATTAN = "manhattan"
    DIEM = "diem"


def _dot(a: np.ndarray, b: np.ndarray) -> float:
    if a.shape[-1] > _LONG_ACC_THRESHOLD:
        return float(np.sum(a.astype(np.longdouble) * b.astype(np.longdouble)))
    return float(np.dot(a, b))


def _norm(a: np.ndarray) -> float:
    if a.shape[-1] > _LONG_ACC_THRESHOLD:
        return float(np.sqrt(np.sum(np.square(a.astype(np.longdouble)))))
    return float(np.linalg.norm(a))


def _clamp(x: float, lo: float, hi: float) -> float:
    return lo if x < lo else hi if x > hi else x


def cosine_similarity(a, b, convention: CosineConvention = CosineConvention.UNSIGNED) -> float:
    """Cosine of the angle between a and b.

    Unsigned takes the absolute value of the inner product and lives in
    [0, 1]; signed keeps the sign and lives in [-1, 1].  Results are clamped
    to the range after floating-point evaluation.
    """
    a = as_vector(a, "a")
    b = as_vector(b, "b")
    check_same_length(a, b)
    na, nb = _norm(a), _norm(b)
    if na == 0.0 or nb == 0.0:
        raise UndefinedSimilarityError("cosine similarity is undefined for zero-norm vectors")
    c = _dot(a, b) / (na * nb)
    if convention is CosineConvention.UNSIGNED:
        return _clamp(abs(c), 0.0, 1.0)
    return _clamp(c, -1.0, 1.0)


def euclidean_distance(a, b) -> float:
    """2-norm of a - b."""
    a = as_vector(a, "a")
    b = as_vector(b, "b")
    check_same_length(a, b)
    diff = a - b
    if diff.shape[-1] > _LONG_ACC_THRESHOLD:
        return float(np.sqrt(np.sum(np.square(diff.astype(np.longdouble)))))
    return float(np.linalg.norm(diff))


def normalized_euclidean_distance(a, b) -> float:
    """Euclidean distance between a/|a| and b/|b|; ranges over [0, 2]."""
    a = as_vector(a, "a")
    b = as_vector(b, "b")
    check_same_length(a, b)
    na, nb = _norm(a), _norm(b)
    if na == 0.0 or nb == 0.0:
        raise UndefinedSimilarityError(
            "normalized Euclidean distance is undefined for zero-norm vectors"
        )
    d = float(np.linalg.norm(a / na - b / nb))
    return _clamp(d, 0.0, 2.0)


def manhattan_distance(a, b) -> float:
    """1-norm of a - b."""
    a = as_vector(a, "a")
    b = as_vector(b, "b")
    check_same_length(a, b)
    diff = np.abs(a - b)
    if diff.shape[-1] > _LONG_ACC_THRESHOLD:
        return float(np.sum(diff.astype(np.longdouble)))
    return float(np.sum(diff))


def cosine_from_distance(d: float, norm_a: float, norm_b: float,
                         convention: CosineConvention = CosineConvention.UNSIGNED) -> float:
    """Recover the cosine from a Euclidean distance and the two norms.

    For unit norms this reduces to |1 - d**2 / 2| (unsigned) or
    1 - d**2 / 2 (signed).
    """
    d = float(d)
    norm_a = float(norm_a)
    norm_b = float(norm_b)
    if norm_a <= 0.0 or norm_b <= 0.0:
        raise UndefinedSimilarityError("norms must be positive to recover a cosine")
    if d < 0.0:
        raise ConstraintViolationError(f"distance must be non-negative, got {d}")
    c = (norm_a * norm_a + norm_b * norm_b - d * d) / (2.0 * norm_a * norm_b)
    if convention is CosineConvention.UNSIGNED:
        return _clamp(abs(c), 0.0, 1.0)
    return _clamp(c, -1.0, 1.0)


# --- row-wise batch variants (used by the simulation and embedding layers) ---

def euclidean_rows(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    return np.linalg.norm(A - B, axis=1)


def manhattan_rows(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    return np.sum(np.abs(A - B), axis=1)


def cosine_rows(A: np.ndarray, B: np.ndarray,
                convention: CosineConvention = CosineConvention.UNSIGNED) -> np.ndarray:
    """Row-wise cosine; rows with a zero-norm side come back as NaN."""
    na = np.linalg.norm(A, axis=1)
    nb = np.linalg.norm(B, axis=1)
    denom = na * nb
    dots = np.einsum("ij,ij->i", A, B)
    with np.errstate(invalid="ignore", divide="ignore"):
        c = np.where(denom > 0.0, dots / denom, np.nan)
    if convention is CosineConvention.UNSIGNED:
        return np.clip(np.abs(c), 0.0, 1.0)
    return np.clip(c, -1.0, 1.0)


def normalized_euclidean_rows(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Row-wise normalized Euclidean distance; zero-norm rows come back as NaN."""
    na = np.linalg.norm(A, axis=1)
    nb = np.linalg.norm(B, axis=1)
    ok = (na > 0.0) & (nb > 0.0)
    out = np.full(A.shape[0], np.nan)
    if np.any(ok):
        d = np.linalg.norm(A[ok] / na[ok, None] - B[ok] / nb[ok, None], axis=1)
        out[ok] = np.clip(d, 0.0, 2.0)
    return out
