"""Vector generation: determinism, stream layout, and distribution checks."""

import numpy as np
import pytest
from scipy import stats as scipy_stats

from diemkit import (
    ConstraintViolationError,
    DomainSpec,
    Gaussian,
    SeedSpec,
    default_gaussian,
    sample_gaussian,
    sample_uniform,
    sample_unit_sphere,
)
from diemkit.domain import SignDomain
from diemkit.vecgen import (
    sample_gaussian_block,
    sample_uniform_block,
    sample_unit_sphere_block,
)

POSITIVE = DomainSpec.positive()
NEGATIVE = DomainSpec.negative()
ALL_REAL = DomainSpec.all_real()
SEED = SeedSpec(42)


class TestDeterminism:
    def test_repeat_invocation_is_bitwise_identical(self):
        for fn in (sample_uniform, sample_unit_sphere):
            v1 = fn(7, POSITIVE, SEED, trial=3)
            v2 = fn(7, POSITIVE, SEED, trial=3)
            assert np.array_equal(v1, v2)
        g1 = sample_gaussian(7, Gaussian(0.5, 0.3), POSITIVE, SEED, trial=3)
        g2 = sample_gaussian(7, Gaussian(0.5, 0.3), POSITIVE, SEED, trial=3)
        assert np.array_equal(g1, g2)

    def test_batch_rows_match_single_draws(self):
        block = sample_uniform_block(5, ALL_REAL, SEED, 10, 20)
        for i in (0, 7, 19):
            assert np.array_equal(block[i], sample_uniform(5, ALL_REAL, SEED, trial=10 + i))
        block = sample_gaussian_block(5, Gaussian(0.0, 0.6), ALL_REAL, SEED, 10, 20)
        for i in (0, 19):
            assert np.array_equal(
                block[i], sample_gaussian(5, Gaussian(0.0, 0.6), ALL_REAL, SEED, trial=10 + i)
            )
        block = sample_unit_sphere_block(5, ALL_REAL, SEED, 10, 20)
        for i in (0, 19):
            assert np.array_equal(block[i], sample_unit_sphere(5, ALL_REAL, SEED, trial=10 + i))

    def test_trial_access_order_is_irrelevant(self):
        forward = [sample_uniform(4, POSITIVE, SEED, trial=t) for t in range(6)]
        backward = [sample_uniform(4, POSITIVE, SEED, trial=t) for t in reversed(range(6))]
        for t in range(6):
            assert np.array_equal(forward[t], backward[5 - t])

    def test_different_seeds_differ(self):
        a = sample_uniform(8, POSITIVE, SeedSpec(1), trial=0)
        b = sample_uniform(8, POSITIVE, SeedSpec(2), trial=0)
        assert not np.array_equal(a, b)

    def test_different_trials_differ(self):
        a = sample_uniform(8, POSITIVE, SEED, trial=0)
        b = sample_uniform(8, POSITIVE, SEED, trial=1)
        assert not np.array_equal(a, b)


class TestUniform:
    def test_range_containment_is_exact(self):
        for domain in (POSITIVE, NEGATIVE, ALL_REAL, DomainSpec(2.5, 7.5, SignDomain.POSITIVE)):
            block = sample_uniform_block(11, domain, SEED, 0, 5000)
            assert block.min() >= domain.v_min
            assert block.max() <= domain.v_max

    def test_degenerate_narrow_range(self):
        domain = DomainSpec(0.0, 1e-4, SignDomain.POSITIVE)
        v = sample_uniform(1, domain, SEED, trial=0)
        assert 0.0 <= v[0] <= 1e-4

    def test_moments_match_uniform_law(self):
        # mean 1/2 and variance 1/12 for U(0, 1)
        draws = sample_uniform_block(1, POSITIVE, SEED, 0, 100_000).ravel()
        assert draws.mean() == pytest.approx(0.5, abs=0.01)
        assert draws.var(ddof=1) == pytest.approx(1.0 / 12.0, abs=0.01)

    def test_lag1_autocorrelation_is_tiny(self):
        # serial correlation across concatenated trials, one million values
        x = sample_uniform_block(100, POSITIVE, SEED, 0, 10_000).ravel()
        x = x - x.mean()
        r1 = float(np.dot(x[:-1], x[1:]) / np.dot(x, x))
        assert abs(r1) < 0.01


class TestGaussian:
    def test_default_parameters_per_domain(self):
        assert default_gaussian(POSITIVE) == Gaussian(0.5, 0.3)
        assert default_gaussian(NEGATIVE) == Gaussian(-0.5, 0.3)
        assert default_gaussian(ALL_REAL) == Gaussian(0.0, 0.6)

    def test_moments(self):
        draws = sample_gaussian_block(1, Gaussian(0.0, 0.6), ALL_REAL, SEED, 0, 100_000).ravel()
        assert draws.mean() == pytest.approx(0.0, abs=0.01)
        assert draws.std(ddof=1) == pytest.approx(0.6, abs=0.01)

    def test_not_clipped_to_domain(self):
        # a wide-std Gaussian must be allowed outside the box
        draws = sample_gaussian_block(1, Gaussian(0.5, 0.3), POSITIVE, SEED, 0, 50_000).ravel()
        assert draws.min() < 0.0

    def test_bad_std_rejected(self):
        with pytest.raises(ConstraintViolationError):
            Gaussian(0.0, 0.0)
        with pytest.raises(ConstraintViolationError):
            Gaussian(0.0, -1.0)


class TestUnitSphere:
    def test_unit_norm_all_domains(self):
        for domain in (POSITIVE, NEGATIVE, ALL_REAL):
            block = sample_unit_sphere_block(9, domain, SEED, 0, 2000)
            norms = np.linalg.norm(block, axis=1)
            assert np.max(np.abs(norms - 1.0)) < 1e-12

    def test_requires_two_dimensions(self):
        with pytest.raises(ConstraintViolationError):
            sample_unit_sphere(1, ALL_REAL, SEED, trial=0)

    def test_sign_pattern_preserved_for_restricted_domains(self):
        pos = sample_unit_sphere_block(6, POSITIVE, SEED, 0, 1000)
        assert pos.min() >= 0.0
        neg = sample_unit_sphere_block(6, NEGATIVE, SEED, 0, 1000)
        assert neg.max() <= 0.0

    def test_circle_angles_are_uniform(self):
        # chi-square over 36 angular bins should be unremarkable at alpha 0.01
        block = sample_unit_sphere_block(2, ALL_REAL, SEED, 0, 100_000)
        angles = np.arctan2(block[:, 1], block[:, 0])
        counts, _ = np.histogram(angles, bins=36, range=(-np.pi, np.pi))
        expected = block.shape[0] / 36.0
        chi2 = float(((counts - expected) ** 2 / expected).sum())
        critical = scipy_stats.chi2.ppf(0.99, 35)
        assert chi2 < critical

    def test_cosine_variance_follows_one_over_n(self):
        n = 100
        block = sample_unit_sphere_block(n, ALL_REAL, SEED, 0, 200_000)
        a, b = block[0::2], block[1::2]
        cos = np.einsum("ij,ij->i", a, b)
        var = float(cos.var(ddof=1))
        assert abs(var - 1.0 / n) / (1.0 / n) < 0.15


class TestValidation:
    def test_invalid_domains(self):
        with pytest.raises(ConstraintViolationError):
            DomainSpec(1.0, 0.0, SignDomain.POSITIVE)
        with pytest.raises(ConstraintViolationError):
            DomainSpec(-0.5, 1.0, SignDomain.POSITIVE)
        with pytest.raises(ConstraintViolationError):
            DomainSpec(-1.0, 0.5, SignDomain.NEGATIVE)
        with pytest.raises(ConstraintViolationError):
            DomainSpec(0.1, 1.0, SignDomain.ALL)

    def test_bad_trial_and_n(self):
        with pytest.raises(ConstraintViolationError):
            sample_uniform(0, POSITIVE, SEED, trial=0)
        with pytest.raises(ConstraintViolationError):
            sample_uniform(3, POSITIVE, SEED, trial=-1)

    def test_bad_seed_values(self):
        with pytest.raises(ConstraintViolationError):
            SeedSpec(-1)
        with pytest.raises(ConstraintViolationError):
            SeedSpec(2**64)
