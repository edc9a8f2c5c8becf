"""Corpus-level aggregation of dependency lengths by sentence length.

The central object is :class:`LengthConditionedTable`, the counts
``f(n, d)`` of dependencies of length ``d`` in sentences of ``n`` words.
Everything global (MDD, the pooled distribution of ``d``) is derived from it
so the per-length structure is never thrown away.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .exceptions import NoDataError
from .tree_core import DepTree, metrics


@dataclass
class LengthConditionedTable:
    f: Counter = field(default_factory=Counter)  # (n, d) -> count
    sentence_counts: Counter = field(default_factory=Counter)  # n -> sentences
    n_min: int = 3
    skipped: int = 0

    @property
    def total_deps(self) -> int:
        return sum(self.f.values())

    @property
    def lengths(self) -> list[int]:
        return sorted(self.sentence_counts)

    def add_tree(self, t: DepTree) -> None:
        if t.n < self.n_min:
            self.skipped += 1
            return
        self.sentence_counts[t.n] += 1
        for u, v in t.edges:
            self.f[t.n, v - u] += 1

    def deps_at(self, n: int) -> int:
        return sum(c for (m, _), c in self.f.items() if m == n)

    def counts_at(self, n: int) -> np.ndarray:
        """Counts of ``d = 1..n-1`` in sentences of length ``n``."""
        out = np.zeros(n - 1, dtype=np.int64)
        for (m, d), c in self.f.items():
            if m == n:
                out[d - 1] += c
        return out

    def pooled_counts(self) -> np.ndarray:
        """Counts of ``d = 1..max_n-1`` over all lengths."""
        if not self.sentence_counts:
            return np.zeros(0, dtype=np.int64)
        d_max = max(self.sentence_counts) - 1
        out = np.zeros(d_max, dtype=np.int64)
        for (_, d), c in self.f.items():
            out[d - 1] += c
        return out

    def merge(self, other: "LengthConditionedTable") -> "LengthConditionedTable":
        if self.n_min != other.n_min:
            raise ValueError("cannot merge tables built with different n_min")
        return LengthConditionedTable(
            f=self.f + other.f,
            sentence_counts=self.sentence_counts + other.sentence_counts,
            n_min=self.n_min,
            skipped=self.skipped + other.skipped,
        )

    __add__ = merge

    @classmethod
    def from_counts(cls, f: dict[tuple[int, int], int], sentence_counts: dict[int, int], n_min: int = 2):
        """Build directly from counts, checking the per-length totals."""
        table = cls(Counter({k: v for k, v in f.items() if v}), Counter(sentence_counts), n_min)
        for (n, d) in table.f:
            if not 1 <= d < n:
                raise ValueError(f"f({n},{d}) must be zero: d outside 1..n-1")
        for n, s in table.sentence_counts.items():
            if table.deps_at(n) != (n - 1) * s:
                raise ValueError(f"length {n}: {table.deps_at(n)} dependencies for {s} sentences")
        return table


@dataclass(frozen=True)
class SentenceRecord:
    n: int
    D: int
    mean_d: float
    k2: float


@dataclass(frozen=True)
class PerLengthRow:
    sentences: int
    mean_mean_d: float
    mean_D: float
    mean_k2: float


@dataclass(frozen=True)
class CorpusSummary:
    mdd: float
    adl: float
    per_n: dict[int, PerLengthRow]
    sentences: int
    dependencies: int
    skipped: int


def accumulate(trees: Iterable[DepTree], n_min: int = 3) -> LengthConditionedTable:
    if n_min < 2:
        raise ValueError(f"n_min must be >= 2, got {n_min}")
    table = LengthConditionedTable(n_min=n_min)
    for t in trees:
        table.add_tree(t)
    return table


def sentence_records(trees: Iterable[DepTree], n_min: int = 3) -> list[SentenceRecord]:
    out = []
    for t in trees:
        if t.n < n_min:
            continue
        m = metrics(t)
        out.append(SentenceRecord(t.n, m.D, float(m.mean_d), float(m.k2)))
    return out


def mdd(table: LengthConditionedTable) -> float:
    """Mean dependency distance: the per-dependency mean of ``d``."""
    total = table.total_deps
    if total == 0:
        raise NoDataError("no dependencies in table")
    return sum(c * d for (_, d), c in table.f.items()) / total


def adl(summaries: Sequence) -> float:
    """Average over sentences of ``D``.  Items are ``(n, D)`` pairs or records."""
    if len(summaries) == 0:
        raise NoDataError("no sentences")
    return sum(_D_of(s) for s in summaries) / len(summaries)


def _D_of(s) -> int:
    return s.D if isinstance(s, SentenceRecord) else s[1]


def _n_of(s) -> int:
    return s.n if isinstance(s, SentenceRecord) else s[0]


def conditional_distribution(table: LengthConditionedTable, n: int) -> dict[int, float]:
    """Empirical ``p(d | n)`` for ``d = 1..n-1``."""
    if table.sentence_counts.get(n, 0) < 1:
        raise NoDataError(f"no sentences of length {n}")
    counts = table.counts_at(n)
    total = counts.sum()
    return {d: float(counts[d - 1] / total) for d in range(1, n)}


def mixed_distribution(table: LengthConditionedTable) -> dict[int, float]:
    """Pooled ``p(d)`` over all lengths, weighted by dependency counts."""
    total = table.total_deps
    if total == 0:
        raise NoDataError("no dependencies in table")
    counts = table.pooled_counts()
    return {d: float(counts[d - 1] / total) for d in range(1, len(counts) + 1)}


def per_length_curve(summaries: Sequence) -> dict[int, float]:
    """Mean of ``<d>`` over the sentences of each length."""
    sums: dict[int, list] = {}
    for s in summaries:
        n = _n_of(s)
        acc = sums.setdefault(n, [0.0, 0])
        acc[0] += _D_of(s) / (n - 1)
        acc[1] += 1
    return {n: sums[n][0] / sums[n][1] for n in sorted(sums)}


def per_length_rows(records: Sequence[SentenceRecord]) -> dict[int, PerLengthRow]:
    by_n: dict[int, list[SentenceRecord]] = {}
    for r in records:
        by_n.setdefault(r.n, []).append(r)
    rows = {}
    for n in sorted(by_n):
        rs = by_n[n]
        k = len(rs)
        rows[n] = PerLengthRow(
            sentences=k,
            mean_mean_d=sum(r.mean_d for r in rs) / k,
            mean_D=sum(r.D for r in rs) / k,
            mean_k2=sum(r.k2 for r in rs) / k,
        )
    return rows


def summarize(trees: Sequence[DepTree], n_min: int = 3) -> CorpusSummary:
    table = accumulate(trees, n_min)
    records = sentence_records(trees, n_min)
    return CorpusSummary(
        mdd=mdd(table),
        adl=adl(records),
        per_n=per_length_rows(records),
        sentences=len(records),
        dependencies=table.total_deps,
        skipped=table.skipped,
    )


def sentence_length_weights(table: LengthConditionedTable) -> dict[int, float]:
    """Sentence-frequency ``p_s(n)``."""
    s = sum(table.sentence_counts.values())
    return {n: table.sentence_counts[n] / s for n in table.lengths}


def dependency_length_weights(table: LengthConditionedTable) -> dict[int, float]:
    """Dependency-frequency weights ``(n - 1) p_s(n) / E[n - 1]``."""
    total = table.total_deps
    return {n: (n - 1) * table.sentence_counts[n] / total for n in table.lengths}


class DependencyLengthProfile(TransformerMixin, BaseEstimator):
    """Fit per-length dependency statistics on a collection of trees.

    Parameters
    ----------
    n_min : int, default=3
        Sentences with fewer words are excluded from every statistic.
    min_sentences : int, default=3
        Lengths with fewer sentences are left out of ``curve_`` (they remain
        in ``summary_.per_n``).

    Attributes
    ----------
    table_ : LengthConditionedTable
    summary_ : CorpusSummary
    curve_ : dict
        Mean ``<d>`` per reported sentence length.
    mdd_, adl_ : float
    """

    def __init__(self, n_min=3, min_sentences=3):
        self.n_min = n_min
        self.min_sentences = min_sentences

    def fit(self, X, y=None):
        trees = list(X)
        self.table_ = accumulate(trees, self.n_min)
        self.summary_ = summarize(trees, self.n_min)
        self.mdd_ = self.summary_.mdd
        self.adl_ = self.summary_.adl
        self.curve_ = {
            n: row.mean_mean_d
            for n, row in self.summary_.per_n.items()
            if row.sentences >= self.min_sentences
        }
        return self

    def transform(self, X):
        """Per-sentence features ``[n, D, <d>, <k^2>]``, one row per tree."""
        check_is_fitted(self, "table_")
        rows = []
        for t in X:
            m = metrics(t)
            rows.append((t.n, m.D, float(m.mean_d), float(m.k2)))
        return np.asarray(rows, dtype=float).reshape(-1, 4)
