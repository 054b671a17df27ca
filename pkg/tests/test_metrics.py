"""Scalar metrics: worked examples, identities, and properties."""

import numpy as np
import pytest

from diemkit import (
    ConstraintViolationError,
    CosineConvention,
    DimensionMismatchError,
    UndefinedSimilarityError,
    cosine_from_distance,
    cosine_similarity,
    euclidean_distance,
    manhattan_distance,
    normalized_euclidean_distance,
)
from diemkit.metrics import (
    cosine_rows,
    euclidean_rows,
    manhattan_rows,
    normalized_euclidean_rows,
)

UNSIGNED = CosineConvention.UNSIGNED
SIGNED = CosineConvention.SIGNED


class TestCosine:
    def test_orthogonal(self):
        assert cosine_similarity([1, 0], [0, 1], UNSIGNED) == 0.0

    def test_collinear(self):
        assert cosine_similarity([1, 2, 3], [2, 4, 6], UNSIGNED) == pytest.approx(1.0, abs=1e-12)

    def test_antiparallel(self):
        assert cosine_similarity([1, 0], [-1, 0], SIGNED) == pytest.approx(-1.0, abs=1e-12)
        assert cosine_similarity([1, 0], [-1, 0], UNSIGNED) == pytest.approx(1.0, abs=1e-12)

    def test_zero_norm_is_undefined(self):
        with pytest.raises(UndefinedSimilarityError):
            cosine_similarity([0, 0], [1, 1])

    def test_length_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            cosine_similarity([1, 2], [1, 2, 3])

    def test_non_finite_rejected(self):
        with pytest.raises(ConstraintViolationError):
            cosine_similarity([1, np.nan], [1, 2])

    def test_clamped_into_range(self):
        rng = np.random.default_rng(5)
        for _ in range(200):
            a = rng.normal(size=4)
            c = rng.uniform(0.1, 100)
            assert cosine_similarity(a, c * a, UNSIGNED) <= 1.0

    def test_unsigned_is_abs_of_signed(self):
        rng = np.random.default_rng(6)
        for _ in range(100):
            a = rng.normal(size=6)
            b = rng.normal(size=6)
            assert cosine_similarity(a, b, UNSIGNED) == abs(cosine_similarity(a, b, SIGNED))

    def test_scale_invariance(self):
        rng = np.random.default_rng(7)
        for _ in range(100):
            a = rng.normal(size=5)
            b = rng.normal(size=5)
            c, k = rng.uniform(0.01, 50, size=2)
            assert cosine_similarity(c * a, k * b) == pytest.approx(
                cosine_similarity(a, b), abs=1e-12
            )


class TestEuclidean:
    def test_identical_vectors(self):
        assert euclidean_distance([1.5, -2, 3], [1.5, -2, 3]) == 0.0

    def test_corner_to_corner(self):
        assert euclidean_distance([1, 1, 1, 1], [0, 0, 0, 0]) == pytest.approx(2.0, abs=1e-12)

    def test_three_four_five(self):
        assert euclidean_distance([0, 0], [3, 4]) == 5.0

    def test_symmetry(self):
        rng = np.random.default_rng(8)
        a, b = rng.normal(size=9), rng.normal(size=9)
        assert euclidean_distance(a, b) == euclidean_distance(b, a)

    def test_triangle_inequality(self):
        rng = np.random.default_rng(9)
        A = rng.normal(size=(10_000, 6))
        B = rng.normal(size=(10_000, 6))
        C = rng.normal(size=(10_000, 6))
        ab = euclidean_rows(A, B)
        bc = euclidean_rows(B, C)
        ac = euclidean_rows(A, C)
        assert np.all(ac <= ab + bc + 1e-12)


class TestNormalizedEuclidean:
    def test_orthogonal_unit_projections(self):
        assert normalized_euclidean_distance([5, 0], [0, 3]) == pytest.approx(
            np.sqrt(2), abs=1e-12
        )

    def test_same_direction(self):
        assert normalized_euclidean_distance([2, 2], [7, 7]) == pytest.approx(0.0, abs=1e-12)

    def test_antipodal(self):
        assert normalized_euclidean_distance([1, 0], [-1, 0]) == 2.0

    def test_zero_norm_is_undefined(self):
        with pytest.raises(UndefinedSimilarityError):
            normalized_euclidean_distance([0, 0], [1, 1])


class TestManhattan:
    def test_identical(self):
        assert manhattan_distance([1, 2], [1, 2]) == 0.0

    def test_all_ones_vs_zeros(self):
        assert manhattan_distance([1] * 5, [0] * 5) == 5.0

    def test_coordinate_sum(self):
        assert manhattan_distance([1, -1], [-1, 1]) == 4.0

    def test_triangle_inequality(self):
        rng = np.random.default_rng(10)
        A = rng.normal(size=(10_000, 6))
        B = rng.normal(size=(10_000, 6))
        C = rng.normal(size=(10_000, 6))
        ab = manhattan_rows(A, B)
        bc = manhattan_rows(B, C)
        ac = manhattan_rows(A, C)
        assert np.all(ac <= ab + bc + 1e-12)


class TestCosineFromDistance:
    def test_orthogonal_unit(self):
        assert cosine_from_distance(np.sqrt(2), 1, 1, SIGNED) == pytest.approx(0.0, abs=1e-12)

    def test_antipodal_unit(self):
        assert cosine_from_distance(2.0, 1, 1, SIGNED) == -1.0

    def test_bad_inputs(self):
        with pytest.raises(UndefinedSimilarityError):
            cosine_from_distance(1.0, 0.0, 1.0)
        with pytest.raises(ConstraintViolationError):
            cosine_from_distance(-0.5, 1.0, 1.0)

    @pytest.mark.parametrize("n", [2, 10, 100])
    def test_reconstruction_identity(self, n):
        # round-trip: distance plus norms must recover the direct cosine
        rng = np.random.default_rng(100 + n)
        for _ in range(3_400):
            a = rng.uniform(-1, 1, size=n)
            b = rng.uniform(-1, 1, size=n)
            if np.linalg.norm(a) == 0 or np.linalg.norm(b) == 0:
                continue
            d = euclidean_distance(a, b)
            na, nb = np.linalg.norm(a), np.linalg.norm(b)
            for conv in (SIGNED, UNSIGNED):
                direct = cosine_similarity(a, b, conv)
                recon = cosine_from_distance(d, na, nb, conv)
                assert recon == pytest.approx(direct, abs=1e-10)

    def test_unit_pair_identity(self):
        rng = np.random.default_rng(11)
        for _ in range(500):
            a = rng.normal(size=8)
            b = rng.normal(size=8)
            a /= np.linalg.norm(a)
            b /= np.linalg.norm(b)
            d = euclidean_distance(a, b)
            assert cosine_from_distance(d, 1.0, 1.0, UNSIGNED) == pytest.approx(
                cosine_similarity(a, b, UNSIGNED), abs=1e-10
            )


class TestRowwiseParity:
    def test_rowwise_match_scalar(self):
        rng = np.random.default_rng(12)
        A = rng.uniform(-1, 1, size=(50, 7))
        B = rng.uniform(-1, 1, size=(50, 7))
        for i in range(50):
            assert euclidean_rows(A, B)[i] == pytest.approx(
                euclidean_distance(A[i], B[i]), abs=1e-14)
            assert manhattan_rows(A, B)[i] == pytest.approx(
                manhattan_distance(A[i], B[i]), abs=1e-14)
            assert cosine_rows(A, B)[i] == pytest.approx(
                cosine_similarity(A[i], B[i]), abs=1e-14)
            assert normalized_euclidean_rows(A, B)[i] == pytest.approx(
                normalized_euclidean_distance(A[i], B[i]), abs=1e-14)

    def test_zero_norm_rows_are_nan(self):
        A = np.array([[0.0, 0.0], [1.0, 0.0]])
        B = np.array([[1.0, 1.0], [0.0, 1.0]])
        c = cosine_rows(A, B)
        assert np.isnan(c[0]) and c[1] == 0.0
        d = normalized_euclidean_rows(A, B)
        assert np.isnan(d[0])

    def test_large_vector_accumulation(self):
        # the extended-precision path for very long vectors stays consistent
        rng = np.random.default_rng(13)
        a = rng.uniform(0, 1, size=20_001)
        b = rng.uniform(0, 1, size=20_001)
        d = euclidean_distance(a, b)
        assert d == pytest.approx(float(np.linalg.norm(a - b)), rel=1e-12)
        assert cosine_similarity(a, b) == pytest.approx(
            float(np.dot(a, b) / (np.linalg.norm(a) * np.linalg.norm(b))), rel=1e-12
        )
