import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rankfreq.core import FrequencyTable, RankedDistribution, pool, rank
from rankfreq.errors import DomainError
from rankfreq.fit import pearson
from rankfreq.infometrics import (
    empirical_entropy,
    normalize_for_comparison,
    perplexity,
    pointwise_compare,
    trajectory,
)
from rankfreq.models import (
    GeometricModel,
    ZipfModel,
    derive_seed,
    expected_distribution,
    sample,
    solve_geometric_for_entropy,
)

count_lists = st.lists(st.integers(1, 10_000), min_size=1, max_size=80)


def plug_in_oracle(counts):
    n = math.fsum(counts)
    return -math.fsum(c / n * math.log2(c / n) for c in counts)


class TestEntropy:
    def test_uniform_32(self):
        d = RankedDistribution.from_counts([3] * 32)
        assert empirical_entropy(d) == pytest.approx(5.0, abs=1e-12)
        assert perplexity(d) == pytest.approx(32.0, rel=1e-12)

    def test_single_type(self):
        d = RankedDistribution.from_counts([17])
        assert empirical_entropy(d) == 0.0
        assert perplexity(d) == 1.0

    def test_zipf_expected_counts(self):
        d = expected_distribution(ZipfModel(1.0, 100), 10**6)
        assert empirical_entropy(d) == pytest.approx(plug_in_oracle(d.counts.tolist()), abs=1e-12)
        assert empirical_entropy(d) == pytest.approx(5.3102, abs=1e-4)

    def test_perplexity_of_idealized_geometric(self):
        d = expected_distribution(solve_geometric_for_entropy(4.6), 10**6)
        # truncated to the model's effective support; tail mass is below 1e-12
        assert perplexity(d) == pytest.approx(2**4.6, rel=1e-6)
        assert 2**4.6 == pytest.approx(24.25, abs=0.01)

    @given(count_lists)
    def test_matches_oracle(self, counts):
        assert empirical_entropy(RankedDistribution.from_counts(counts)) == pytest.approx(
            plug_in_oracle(counts), abs=1e-9)

    @given(count_lists)
    def test_perplexity_is_power(self, counts):
        d = RankedDistribution.from_counts(counts)
        assert perplexity(d) == pytest.approx(2.0 ** empirical_entropy(d), rel=1e-12)

    @given(count_lists, st.integers(1, 100), st.randoms())
    def test_permutation_and_scale(self, counts, c, rnd):
        shuffled = counts[:]
        rnd.shuffle(shuffled)
        a = RankedDistribution.from_counts(counts)
        b = RankedDistribution.from_counts([c * x for x in shuffled])
        assert empirical_entropy(a) == pytest.approx(empirical_entropy(b), abs=1e-9)

    @given(count_lists)
    def test_bounds(self, counts):
        d = RankedDistribution.from_counts(counts)
        h = empirical_entropy(d)
        assert -1e-12 <= h <= math.log2(d.N) + 1e-9
        if len(set(counts)) > 1:
            assert h < math.log2(d.N) - 1e-12

    @given(st.lists(count_lists, min_size=1, max_size=6))
    def test_mixing_disjoint(self, components):
        tables = [FrequencyTable({f"c{i}:{j}": c for j, c in enumerate(cs)}) for i, cs in enumerate(components)]
        total = sum(t.total_tokens for t in tables)
        weighted = sum(t.total_tokens / total * empirical_entropy(rank(t)) for t in tables)
        assert empirical_entropy(rank(pool(tables))) >= weighted - 1e-9


class TestNormalize:
    def test_identical(self):
        d = RankedDistribution.from_counts([5, 3, 1])
        a, b = normalize_for_comparison(d, d)
        assert np.array_equal(a, b)

    def test_scale(self):
        a, b = normalize_for_comparison(
            RankedDistribution.from_counts([5, 3, 1]), RankedDistribution.from_counts([50, 30, 10]))
        assert np.allclose(a, b, rtol=0, atol=1e-15)

    def test_truncated_geometric(self):
        a, b = normalize_for_comparison(
            expected_distribution(GeometricModel(0.85, 150), 1.0),
            expected_distribution(GeometricModel(0.85, 100), 1.0),
        )
        assert len(a) == len(b) == 100
        oracle = 0.15 * 0.85 ** np.arange(100) / (1 - 0.85**100)
        assert np.allclose(a, b, rtol=0, atol=1e-9)
        assert np.allclose(a, oracle, rtol=0, atol=1e-12)

    @given(count_lists, count_lists)
    def test_sums_to_one(self, x, y):
        a, b = normalize_for_comparison(RankedDistribution.from_counts(x), RankedDistribution.from_counts(y))
        assert len(a) == len(b) == min(len(x), len(y))
        assert abs(a.sum() - 1) < 1e-9 and abs(b.sum() - 1) < 1e-9


class TestPointwise:
    def test_self(self):
        m = ZipfModel(1.0, 100)
        pc = pointwise_compare(expected_distribution(m, 1000.0), m)
        assert np.allclose(pc.differences, 0.0, atol=1e-15)

    def test_geometric_vs_zipf(self):
        obs = expected_distribution(GeometricModel(0.9, 100), 10**5)
        pc = pointwise_compare(obs, ZipfModel(1.0, 100))
        diffs = np.abs(pc.differences)
        oracle = abs(0.1 / (1 - 0.9**100) - 1 / sum(1 / r for r in range(1, 101)))
        assert diffs[0] == pytest.approx(oracle, abs=1e-12)
        assert diffs[0] > 0.05
        assert abs(pc.observed.sum() - 1) < 1e-9 and abs(pc.model.sum() - 1) < 1e-9

    def test_idealization_triple(self):
        obs = rank(sample(GeometricModel(0.97, 100), 50_000, seed=3))
        assert obs.N == 100
        geo = pointwise_compare(obs, solve_geometric_for_entropy(4.6))
        zipf = pointwise_compare(obs, ZipfModel(1.0, 100))
        assert geo.observed_bits == zipf.observed_bits == empirical_entropy(obs)
        assert geo.model_bits == pytest.approx(4.6, abs=1e-6)
        assert zipf.model_bits == pytest.approx(5.3102, abs=1e-4)
        assert list(geo.rows())[0][0] == 1

    def test_support_mismatch(self):
        with pytest.raises(DomainError):
            pointwise_compare(RankedDistribution.from_counts([4, 3, 2]), GeometricModel(0.5, 2))


class TestTrajectory:
    def test_single(self):
        t = FrequencyTable({"a": 5, "b": 3, "c": 1})
        (pt,) = trajectory([t])
        assert pt.perplexity == perplexity(rank(t)) and pt.population == 9

    def test_identical_tables_constant(self):
        t = sample(GeometricModel(0.8), 3000, seed=1)
        pts = trajectory([t] * 10)
        assert np.allclose([p.perplexity for p in pts], pts[0].perplexity, rtol=1e-12)
        assert np.allclose([p.entropy_bits for p in pts], pts[0].entropy_bits, rtol=1e-12)
        assert [p.population for p in pts] == [3000.0 * (i + 1) for i in range(10)]

    def test_drifting(self):
        qs = np.linspace(0.80, 0.95, 10)
        tables = [sample(GeometricModel(q), 10_000, derive_seed(2024, i)) for i, q in enumerate(qs)]
        pts = trajectory(tables)
        px = [p.perplexity for p in pts]
        assert all(b > a for a, b in zip(px, px[1:]))
        assert pearson([p.population for p in pts], px) > 0.95

    def test_sizes_and_small_steps(self):
        pts = trajectory([FrequencyTable({"a": 1}), FrequencyTable({"b": 1, "c": 2})], sizes=[10, 20])
        assert pts[0].report is None and pts[1].report is not None
        assert [p.population for p in pts] == [10.0, 20.0]
        with pytest.raises(ValueError):
            trajectory([FrequencyTable({"a": 1})], sizes=[1, 2])
        with pytest.raises(ValueError):
            trajectory([])
