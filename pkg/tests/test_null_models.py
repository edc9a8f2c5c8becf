from collections import Counter
from fractions import Fraction
from math import factorial

import numpy as np
import pytest
from scipy import stats

from deplen.exceptions import DomainError, SizeError
from deplen.null_models import (
    McConfig,
    all_labeled_trees,
    enumerate_arrangements,
    exact_null,
    mc_null_curve,
    prufer_decode,
    random_arrangement,
    random_tree,
    substream,
)
from deplen.tree_core import DepTree, metrics, min_mean_d_bound
from oracles import brute_arrangements, pair_distance_histogram


def path(n):
    return DepTree(n, tuple((i, i + 1) for i in range(1, n)))


def star(n):
    return DepTree(n, tuple((1, v) for v in range(2, n + 1)))


class TestExactNull:
    def test_n4(self):
        s = exact_null(4)
        assert s.p_d == {1: Fraction(1, 2), 2: Fraction(1, 3), 3: Fraction(1, 6)}
        assert s.expected_d == Fraction(5, 3)

    def test_n2(self):
        s = exact_null(2)
        assert s.p_d == {1: 1} and s.expected_d == 1

    def test_n5(self):
        s = exact_null(5)
        assert s.expected_d == 2 and s.expected_D == 8

    @pytest.mark.parametrize("n", [2, 3, 7, 20, 64])
    def test_matches_pair_histogram(self, n):
        s = exact_null(n)
        assert s.p_d == pair_distance_histogram(n)
        assert sum(s.p_d.values()) == 1
        assert sum(d * p for d, p in s.p_d.items()) == s.expected_d
        probs = list(s.p_d.values())
        assert all(a > b for a, b in zip(probs, probs[1:]))

    def test_domain(self):
        with pytest.raises(DomainError):
            exact_null(1)


class TestRandomArrangement:
    def test_single_edge(self):
        rng = substream(1)
        for _ in range(5):
            assert metrics(random_arrangement(DepTree(2, ((1, 2),)), rng)).D == 1

    def test_star3_all_orders(self):
        Ds = [D for D, _ in brute_arrangements(3, star(3).edges)]
        assert sorted(Ds) == [2, 2, 3, 3, 3, 3]
        assert Fraction(sum(Ds), len(Ds)) == Fraction(8, 3)

    def test_topology_preserved(self):
        rng = substream(3)
        t = prufer_decode([3, 3, 5, 1], 6)
        for _ in range(10):
            r = random_arrangement(t, rng)
            assert metrics(r).k2 == metrics(t).k2
            assert sorted(r.degrees()) == sorted(t.degrees())


class TestEnumeration:
    def test_star3(self):
        dist = enumerate_arrangements(star(3))
        assert dist.total == 6
        assert dist.min_mean_d() == 1
        assert dist.max_mean_d() == Fraction(3, 2)

    def test_path3_equals_star3(self):
        assert enumerate_arrangements(path(3)).counts == enumerate_arrangements(star(3)).counts

    def test_path4_mean(self):
        assert enumerate_arrangements(path(4)).mean_mean_d() == Fraction(5, 3) == exact_null(4).expected_d

    @pytest.mark.parametrize("t", [path(5), star(5), prufer_decode([2, 2, 4], 5), prufer_decode([1, 6, 6, 2], 6)])
    def test_matches_brute_force(self, t):
        brute = Counter(brute_arrangements(t.n, t.edges))
        assert enumerate_arrangements(t).counts == dict(brute)

    def test_bounds_hold_for_all_trees_n5(self):
        for t in all_labeled_trees(5):
            dist = enumerate_arrangements(t)
            assert dist.total == factorial(5)
            assert dist.mean_mean_d() == 2
            assert dist.min_mean_d() >= min_mean_d_bound(5, metrics(t).k2)
            assert dist.max_mean_d_noncrossing() <= Fraction(5, 2)

    def test_size_guard(self):
        with pytest.raises(SizeError):
            enumerate_arrangements(path(9))


class TestRandomTree:
    def test_n2(self):
        assert random_tree(2, substream(0)).edges == ((1, 2),)

    def test_domain(self):
        with pytest.raises(DomainError):
            random_tree(1, substream(0))

    @pytest.mark.parametrize("n, draws", [(3, 30_000), (4, 32_000)])
    def test_uniform_over_labeled_trees(self, n, draws):
        labeled = {t.edges for t in all_labeled_trees(n)}
        assert len(labeled) == n ** (n - 2)
        rng = substream(2024, n)
        counts = Counter(random_tree(n, rng).edges for _ in range(draws))
        assert set(counts) == labeled
        observed = [counts[e] for e in sorted(labeled)]
        assert stats.chisquare(observed).pvalue > 0.001


class TestMcNullCurve:
    def test_path10(self):
        curve = mc_null_curve([path(10)], McConfig(seed=11, samples=10_000))
        pt = curve[10]
        assert abs(pt.mean_d - 11 / 3) <= 3 * pt.se

    def test_n2_exact(self):
        pt = mc_null_curve([DepTree(2, ((1, 2),))], McConfig(seed=1, samples=50))[2]
        assert pt.mean_d == 1 and pt.se == 0

    def test_topology_free(self):
        cfg = McConfig(seed=5, samples=20_000)
        a = mc_null_curve([path(6)], cfg)[6]
        b = mc_null_curve([star(6)], cfg)[6]
        assert abs(a.mean_d - b.mean_d) <= 3 * np.hypot(a.se, b.se)
        assert abs(a.mean_d - 7 / 3) <= 3 * a.se

    def test_deterministic_across_workers(self):
        rng = substream(9)
        trees = [random_tree(int(n), rng) for n in rng.integers(2, 15, size=40)]
        runs = [mc_null_curve(trees, McConfig(seed=77, samples=300, n_workers=w)) for w in (1, 1, 4)]
        assert runs[0] == runs[1] == runs[2]

    def test_config_validation(self):
        with pytest.raises(ValueError):
            McConfig(samples=0)
