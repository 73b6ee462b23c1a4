import math

import numpy as np
import pytest

from cdt.bhattacharyya import DiscreteDist, histogram_density
from cdt.errors import DomainError
from cdt.expectations import qa_expected_value, qa_mean
from cdt.generators import IDENTITY, LOG, RECIPROCAL, power_generator


class TestQaMean:
    def test_geometric_triple(self):
        assert qa_mean(LOG, (1, 4, 16)) == pytest.approx(4.0, rel=1e-12)

    def test_reflexivity(self):
        assert qa_mean(LOG, (3.3, 3.3, 3.3)) == pytest.approx(3.3, rel=1e-12)

    def test_permutation_invariance(self, rng):
        xs = list(rng.uniform(0.2, 9.0, 7))
        perm = list(rng.permutation(xs))
        for gen in (IDENTITY, LOG, RECIPROCAL, power_generator(3)):
            assert qa_mean(gen, xs) == pytest.approx(qa_mean(gen, perm), rel=1e-12)

    def test_monotone_in_each_argument(self, rng):
        for gen in (IDENTITY, LOG, RECIPROCAL):
            xs = list(rng.uniform(0.5, 5.0, 5))
            base = qa_mean(gen, xs)
            for i in range(len(xs)):
                bumped = list(xs)
                bumped[i] += 0.25
                assert qa_mean(gen, bumped) > base

    def test_associativity_on_partition(self, rng):
        # replacing a prefix by its own mean (repeated) leaves the mean fixed
        for gen in (IDENTITY, LOG, power_generator(2)):
            xs = list(rng.uniform(0.3, 7.0, 6))
            for i in (2, 4):
                m_prefix = qa_mean(gen, xs[:i])
                replaced = [m_prefix] * i + xs[i:]
                assert qa_mean(gen, replaced) == pytest.approx(qa_mean(gen, xs), rel=1e-10)

    def test_empty(self):
        with pytest.raises(DomainError):
            qa_mean(LOG, ())


class TestQaExpectedValue:
    def test_identity_is_plain_expectation(self):
        d = DiscreteDist((0.25, 0.75), values=(2.0, 6.0))
        assert qa_expected_value(IDENTITY, d) == pytest.approx(5.0, rel=1e-12)

    def test_geometric_two_point(self):
        d = DiscreteDist((0.5, 0.5), values=(1.0, 4.0))
        assert qa_expected_value(LOG, d) == pytest.approx(2.0, rel=1e-12)

    def test_harmonic_two_point(self):
        d = DiscreteDist((0.5, 0.5), values=(2.0, 6.0))
        assert qa_expected_value(RECIPROCAL, d) == pytest.approx(3.0, rel=1e-12)

    def test_uniform_grid_coincides_with_sample_mean(self, rng):
        xs = tuple(sorted(rng.uniform(0.5, 9.0, 6)))
        d = DiscreteDist((1.0 / 6,) * 6, values=xs)
        for gen in (IDENTITY, LOG, RECIPROCAL, power_generator(2)):
            assert qa_expected_value(gen, d) == pytest.approx(qa_mean(gen, xs), rel=1e-12)

    def test_innerness(self, rng):
        for _ in range(50):
            xs = tuple(rng.uniform(0.5, 9.0, 5))
            w = rng.dirichlet(np.ones(5))
            d = DiscreteDist(tuple(w), values=xs)
            v = qa_expected_value(IDENTITY, d)
            assert min(xs) <= v <= max(xs)

    def test_geometric_below_arithmetic(self, rng):
        for _ in range(50):
            xs = tuple(rng.uniform(0.2, 9.0, 5))
            w = rng.dirichlet(np.ones(5))
            d = DiscreteDist(tuple(w), values=xs)
            assert qa_expected_value(LOG, d) <= qa_expected_value(IDENTITY, d) + 1e-12

    def test_requires_value_grid(self):
        with pytest.raises(DomainError):
            qa_expected_value(LOG, DiscreteDist((0.5, 0.5)))

    def test_density_variant(self):
        # uniform density on (1, 3): E[X] = 2, geometric mean = exp(E log X)
        dens = histogram_density((1.0, 3.0), (1.0,))
        assert qa_expected_value(IDENTITY, dens) == pytest.approx(2.0, abs=1e-8)
        want_geo = math.exp((3 * math.log(3) - 1 * math.log(1) - 2) / 2.0)
        assert qa_expected_value(LOG, dens) == pytest.approx(want_geo, abs=1e-8)

    def test_unnormalized_with_normalize_flag(self):
        d = DiscreteDist((0.5, 0.5, 0.5, 0.5), values=(1.0, 2.0, 3.0, 4.0), normalized=False)
        assert qa_expected_value(IDENTITY, d, normalize=True) == pytest.approx(2.5, rel=1e-12)
