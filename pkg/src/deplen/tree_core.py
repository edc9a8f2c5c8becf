"""Structural metrics of a single linearized dependency tree.

Positions are 1-based word indices.  Edges are stored undirected as
``(u, v)`` with ``u < v``; head/dependent direction plays no role in any of
the quantities computed here.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from .exceptions import DomainError


@dataclass(frozen=True)
class DepTree:
    """Word-word dependencies of an ``n``-word sentence.

    ``edges`` is normalised to a sorted tuple of ``(u, v)`` pairs with
    ``1 <= u < v <= n``.  Construction fails unless the edges form a
    spanning tree on ``1..n``.
    """

    n: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        n = self.n
        if n < 2:
            raise DomainError(f"a dependency tree needs n >= 2 words, got {n}")
        norm = tuple(sorted((min(u, v), max(u, v)) for u, v in self.edges))
        object.__setattr__(self, "edges", norm)
        if len(norm) != n - 1:
            raise DomainError(f"{len(norm)} edges for n={n}, expected {n - 1}")
        parent = list(range(n + 1))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for u, v in norm:
            if u < 1 or v > n or u == v:
                raise DomainError(f"edge {(u, v)} outside 1..{n}")
            ru, rv = find(u), find(v)
            if ru == rv:
                raise DomainError(f"edge {(u, v)} closes a cycle")
            parent[ru] = rv

    @classmethod
    def from_heads(cls, heads: Sequence[int]) -> "DepTree":
        """Build from a head vector; ``heads[i]`` is the head of word ``i + 1``, 0 for root."""
        return cls(len(heads), tuple((i + 1, h) for i, h in enumerate(heads) if h != 0))

    def degrees(self) -> list[int]:
        """Undirected degree of positions ``1..n`` (index 0 unused)."""
        deg = [0] * (self.n + 1)
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    def relabel(self, positions: Sequence[int]) -> "DepTree":
        """Move the word at position ``i`` to ``positions[i - 1]``.

        ``positions`` must be a permutation of ``1..n``.
        """
        if sorted(positions) != list(range(1, self.n + 1)):
            raise DomainError("positions must be a permutation of 1..n")
        return DepTree(self.n, tuple((positions[u - 1], positions[v - 1]) for u, v in self.edges))


@dataclass(frozen=True)
class TreeMetrics:
    dep_lengths: tuple[int, ...]
    D: int
    mean_d: Fraction
    k2: Fraction
    crossings: int


def count_crossings(edges: Sequence[tuple[int, int]]) -> int:
    """Number of unordered edge pairs whose endpoints interleave."""
    total = 0
    for (a, b), (c, d) in combinations(edges, 2):
        if a < c < b < d or c < a < d < b:
            total += 1
    return total


def degree_second_moment(t: DepTree) -> Fraction:
    """<k^2>, the mean of squared vertex degrees."""
    deg = t.degrees()
    return Fraction(sum(k * k for k in deg), t.n)


def metrics(t: DepTree) -> TreeMetrics:
    lengths = tuple(v - u for u, v in t.edges)
    D = sum(lengths)
    return TreeMetrics(
        dep_lengths=lengths,
        D=D,
        mean_d=Fraction(D, t.n - 1),
        k2=degree_second_moment(t),
        crossings=count_crossings(t.edges),
    )


def k2_bounds(n: int) -> tuple[Fraction, Fraction]:
    """Range of <k^2> over trees of ``n`` vertices: linear tree below, star above."""
    if n < 2:
        raise DomainError(f"k2_bounds needs n >= 2, got {n}")
    return Fraction(4) - Fraction(6, n), Fraction(n - 1)


def min_mean_d_bound(n: int, k2) -> Fraction | float:
    """Lower bound on the minimum <d> achievable by a tree with moment ``k2``.

    Exact when ``k2`` is an int or Fraction; a float ``k2`` gives a float.
    """
    lo, hi = k2_bounds(n)
    exact = not isinstance(k2, float)
    k2q = Fraction(k2)
    if not lo <= k2q <= hi:
        raise DomainError(f"k2={k2} outside [{lo}, {hi}] for n={n}")
    bound = n * k2q / (8 * (n - 1)) + Fraction(1, 2)
    return bound if exact else float(bound)


def max_mean_d_noncrossing(n: int) -> Fraction:
    """Largest <d> reachable by a tree drawn without crossings."""
    if n < 2:
        raise DomainError(f"n must be >= 2, got {n}")
    return Fraction(n, 2)
