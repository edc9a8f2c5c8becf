"""Baselines under random placement of a tree's vertices in the sentence.

Randomness comes from numpy's PCG64 bit generator.  Every independent unit
of work (one sentence, one Monte Carlo tree) gets its own substream seeded
with ``SeedSequence([seed, index])``, so results do not depend on how the
work is scheduled across threads.
"""
from __future__ import annotations

import heapq
import itertools
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial, sqrt
from typing import Iterator, Sequence

import numpy as np

from .exceptions import DomainError, SizeError
from .tree_core import DepTree

MAX_ENUMERATION_N = 8


def substream(seed: int, *index: int) -> np.random.Generator:
    """Independent generator for work unit ``index`` under master ``seed``."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, *index])))


@dataclass(frozen=True)
class NullSummary:
    n: int
    p_d: dict[int, Fraction]
    expected_d: Fraction
    expected_D: Fraction


@dataclass(frozen=True)
class McConfig:
    seed: int = 0
    samples: int = 1000
    n_workers: int = 1

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        if self.n_workers < 1:
            raise ValueError("n_workers must be >= 1")


def exact_null(n: int) -> NullSummary:
    """Distance distribution of a uniformly random vertex pair among ``n`` positions."""
    if n < 2:
        raise DomainError(f"exact_null needs n >= 2, got {n}")
    denom = n * (n - 1)
    p_d = {d: Fraction(2 * (n - d), denom) for d in range(1, n)}
    return NullSummary(
        n=n,
        p_d=p_d,
        expected_d=Fraction(n + 1, 3),
        expected_D=Fraction((n - 1) * (n + 1), 3),
    )


def random_arrangement(t: DepTree, rng: np.random.Generator) -> DepTree:
    positions = rng.permutation(t.n) + 1
    return t.relabel([int(p) for p in positions])


def prufer_decode(seq: Sequence[int], n: int) -> DepTree:
    """Labeled tree on ``1..n`` encoded by a Prüfer sequence of length ``n - 2``."""
    if n < 2:
        raise DomainError(f"n must be >= 2, got {n}")
    if len(seq) != n - 2:
        raise DomainError(f"Prüfer sequence for n={n} must have length {n - 2}")
    degree = [1] * (n + 1)
    for v in seq:
        if not 1 <= v <= n:
            raise DomainError(f"Prüfer label {v} outside 1..{n}")
        degree[v] += 1
    leaves = [v for v in range(1, n + 1) if degree[v] == 1]
    heapq.heapify(leaves)
    edges = []
    for v in seq:
        leaf = heapq.heappop(leaves)
        edges.append((leaf, v))
        degree[v] -= 1
        if degree[v] == 1:
            heapq.heappush(leaves, v)
    u, v = heapq.heappop(leaves), heapq.heappop(leaves)
    edges.append((u, v))
    return DepTree(n, tuple(edges))


def all_labeled_trees(n: int) -> Iterator[DepTree]:
    """All ``n ** (n - 2)`` labeled trees on ``1..n``, one per Prüfer sequence."""
    for seq in itertools.product(range(1, n + 1), repeat=n - 2):
        yield prufer_decode(seq, n)


def random_tree(n: int, rng: np.random.Generator) -> DepTree:
    """Uniformly random labeled tree, positions taken as the vertex labels."""
    if n < 2:
        raise DomainError(f"random_tree needs n >= 2, got {n}")
    seq = rng.integers(1, n + 1, size=n - 2)
    return prufer_decode([int(v) for v in seq], n)


# -- exhaustive enumeration -------------------------------------------------


@lru_cache(maxsize=None)
def _half_permutations(n: int) -> np.ndarray:
    """Position arrays (0-based) for the n!/2 orders placing vertex 1 before vertex 2.

    Reversing an order maps this half onto the other one and leaves every
    distance unchanged, so each row stands for two arrangements.
    """
    perms = np.array(list(itertools.permutations(range(n))), dtype=np.int64)
    if n >= 2:
        perms = perms[perms[:, 0] < perms[:, 1]]
    perms.setflags(write=False)
    return perms


def _arrangement_arrays(t: DepTree, positions: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-row (D, crossings) for position arrays of shape (rows, n)."""
    u = np.array([e[0] - 1 for e in t.edges])
    v = np.array([e[1] - 1 for e in t.edges])
    pu, pv = positions[:, u], positions[:, v]
    lo, hi = np.minimum(pu, pv), np.maximum(pu, pv)
    D = (hi - lo).sum(axis=1)
    crossings = np.zeros(positions.shape[0], dtype=np.int64)
    for i, j in itertools.combinations(range(len(t.edges)), 2):
        a, b, c, d = lo[:, i], hi[:, i], lo[:, j], hi[:, j]
        crossings += ((a < c) & (c < b) & (b < d)) | ((c < a) & (a < d) & (d < b))
    return D, crossings


@dataclass(frozen=True)
class ArrangementDistribution:
    """Exact distribution of (D, crossings) over all ``n!`` orders of one tree.

    ``counts`` maps ``(D, crossings)`` to the number of orders producing it;
    ``<d>`` is ``D / (n - 1)``.
    """

    n: int
    counts: dict[tuple[int, int], int]

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def mean_mean_d(self) -> Fraction:
        weighted = sum(D * c for (D, _), c in self.counts.items())
        return Fraction(weighted, self.total * (self.n - 1))

    def min_mean_d(self) -> Fraction:
        return Fraction(min(D for D, _ in self.counts), self.n - 1)

    def max_mean_d(self) -> Fraction:
        return Fraction(max(D for D, _ in self.counts), self.n - 1)

    def max_mean_d_noncrossing(self) -> Fraction:
        return Fraction(max(D for D, x in self.counts if x == 0), self.n - 1)

    def mean_d_distribution(self) -> dict[Fraction, int]:
        out: Counter = Counter()
        for (D, _), c in self.counts.items():
            out[Fraction(D, self.n - 1)] += c
        return dict(out)


def enumerate_arrangements(t: DepTree) -> ArrangementDistribution:
    if t.n > MAX_ENUMERATION_N:
        raise SizeError(f"enumeration limited to n <= {MAX_ENUMERATION_N}, got {t.n}; sample instead")
    D, crossings = _arrangement_arrays(t, _half_permutations(t.n))
    keys = np.stack([D, crossings], axis=1)
    uniq, freq = np.unique(keys, axis=0, return_counts=True)
    counts = {(int(k[0]), int(k[1])): 2 * int(c) for k, c in zip(uniq, freq)}
    assert sum(counts.values()) == factorial(t.n)
    return ArrangementDistribution(t.n, counts)


# -- Monte Carlo ------------------------------------------------------------


def _sample_D(t: DepTree, samples: int, rng: np.random.Generator) -> np.ndarray:
    base = np.broadcast_to(np.arange(t.n, dtype=np.int64), (samples, t.n))
    positions = rng.permuted(base, axis=1)
    u = np.array([e[0] - 1 for e in t.edges])
    v = np.array([e[1] - 1 for e in t.edges])
    return np.abs(positions[:, u] - positions[:, v]).sum(axis=1)


@dataclass(frozen=True)
class NullCurvePoint:
    mean_d: float
    se: float
    sentences: int
    samples: int


def mc_null_curve(topologies: Sequence[DepTree], cfg: McConfig) -> dict[int, NullCurvePoint]:
    """Monte Carlo mean of ``<d>`` per sentence length over random arrangements.

    Tree ``i`` draws ``cfg.samples`` arrangements from ``substream(cfg.seed, i)``.
    Sums are accumulated as exact integers, so the output is bit-identical
    for any ``n_workers``.
    """

    def work(item):
        i, t = item
        D = _sample_D(t, cfg.samples, substream(cfg.seed, i))
        return t.n, int(D.sum()), int((D * D).sum())

    items = list(enumerate(topologies))
    if cfg.n_workers > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=cfg.n_workers) as pool:
            results = list(pool.map(work, items))
    else:
        results = [work(item) for item in items]

    acc: dict[int, list[int]] = {}
    for n, s1, s2 in results:
        row = acc.setdefault(n, [0, 0, 0])
        row[0] += 1
        row[1] += s1
        row[2] += s2
    curve = {}
    for n in sorted(acc):
        sentences, s1, s2 = acc[n]
        count = sentences * cfg.samples
        mean = Fraction(s1, count * (n - 1))
        if count > 1:
            var_D = Fraction(count * s2 - s1 * s1, count * (count - 1))
            se = sqrt(var_D / (count * (n - 1) ** 2))
        else:
            se = 0.0
        curve[n] = NullCurvePoint(float(mean), se, sentences, count)
    return curve
