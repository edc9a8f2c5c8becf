"""Mixtures of per-length dependency-length distributions.

A :class:`LengthDistribution` gives ``p(n)`` on ``[n_min, n_max]``; a
:class:`MixtureSpec` adds the conditional family ``p(d | n)``.  :func:`mix`
evaluates ``p(d) = sum_n p(d | n) p(n)`` exactly on the finite support.

Moments of ``n`` are exact rationals.  Under random vertex placement with
``n_min = 2`` the pooled expectations have closed forms in those moments:
``E[d] = (E[n] + 1) / 3`` and ``E[D] = (E[n^2] - 1) / 3``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

import numpy as np
from scipy.optimize import brentq

from .distfit import truncated_geometric_logpmf
from .exceptions import AssumptionError, SpecValidationError
from .null_models import exact_null, random_arrangement, random_tree
from .stats_engine import LengthConditionedTable

LENGTH_KINDS = ("uniform", "truncated_zeta", "empirical")
CONDITIONAL_FAMILIES = ("null", "truncated_geometric", "empirical")
LINKAGES = ("mean_match", "constant", "log_spread")


@dataclass(frozen=True)
class LengthDistribution:
    """Sentence-length distribution, zero outside ``[n_min, n_max]``.

    For ``kind="empirical"`` the ``weights`` pairs ``(n, w)`` are normalised
    on construction; zero weights are allowed anywhere in the range.
    """

    kind: str
    n_max: int
    n_min: int = 2
    weights: tuple[tuple[int, Fraction], ...] = ()

    def __post_init__(self):
        problems = {}
        if self.kind not in LENGTH_KINDS:
            problems["kind"] = f"must be one of {LENGTH_KINDS}"
        if not isinstance(self.n_min, int) or self.n_min < 2:
            problems["n_min"] = "must be an integer >= 2"
        if not isinstance(self.n_max, int) or self.n_max < self.n_min:
            problems["n_max"] = "must be an integer >= n_min"
        if self.kind == "empirical":
            total = Fraction(0)
            for n, w in self.weights:
                if not self.n_min <= n <= self.n_max:
                    problems["weights"] = f"length {n} outside [{self.n_min}, {self.n_max}]"
                if w < 0:
                    problems["weights"] = "weights must be non-negative"
                total += Fraction(w)
            if total <= 0:
                problems["weights"] = "weights must have positive total"
            if not problems:
                norm = tuple(sorted((n, Fraction(w) / total) for n, w in self.weights if w))
                object.__setattr__(self, "weights", norm)
        elif self.weights:
            problems["weights"] = f"only used with kind='empirical', not {self.kind!r}"
        if problems:
            raise SpecValidationError(problems)

    @classmethod
    def uniform(cls, n_max: int, n_min: int = 2) -> "LengthDistribution":
        return cls("uniform", n_max, n_min)

    @classmethod
    def truncated_zeta(cls, n_max: int, n_min: int = 2) -> "LengthDistribution":
        return cls("truncated_zeta", n_max, n_min)

    @classmethod
    def empirical(cls, weights: Mapping[int, object], n_min: int | None = None, n_max: int | None = None):
        """From counts or probabilities keyed by length."""
        lengths = [n for n, w in weights.items() if w]
        n_min = min(lengths) if n_min is None and lengths else (n_min or 2)
        n_max = max(lengths) if n_max is None and lengths else (n_max or n_min)
        pairs = tuple((int(n), Fraction(w)) for n, w in sorted(weights.items()))
        return cls("empirical", n_max, n_min, pairs)

    @classmethod
    def point(cls, n: int) -> "LengthDistribution":
        """All mass on ``n``, declared on ``[2, n]`` so the closed forms apply."""
        return cls.empirical({n: 1}, n_min=2, n_max=n)

    def pmf(self) -> dict[int, Fraction]:
        if self.kind == "uniform":
            p = Fraction(1, self.n_max - self.n_min + 1)
            return {n: p for n in range(self.n_min, self.n_max + 1)}
        if self.kind == "truncated_zeta":
            h = sum(Fraction(1, m) for m in range(self.n_min, self.n_max + 1))
            return {n: Fraction(1, n) / h for n in range(self.n_min, self.n_max + 1)}
        return dict(self.weights)

    def support(self) -> list[int]:
        return [n for n, p in self.pmf().items() if p > 0]

    def sample(self, size: int, rng: np.random.Generator) -> np.ndarray:
        pmf = self.pmf()
        ns = np.array(list(pmf), dtype=np.int64)
        p = np.array([float(v) for v in pmf.values()])
        return rng.choice(ns, size=size, p=p / p.sum())


def moment(ld: LengthDistribution, k: int) -> Fraction:
    """``E[n^k]`` by direct summation."""
    return sum((p * n**k for n, p in ld.pmf().items()), Fraction(0))


def expectation_n(ld: LengthDistribution) -> Fraction:
    if ld.n_min == 2 and ld.kind == "uniform":
        m = ld.n_max
        return Fraction(1, m - 1) * (Fraction(m * (m + 1), 2) - 1)
    if ld.n_min == 2 and ld.kind == "truncated_zeta":
        m = ld.n_max
        return Fraction(m - 1) / sum(Fraction(1, n) for n in range(2, m + 1))
    return moment(ld, 1)


def expectation_n2(ld: LengthDistribution) -> Fraction:
    # uniform on [a, b]: (sum of squares up to b minus up to a-1) / (b - a + 1)
    if ld.kind == "uniform":
        a, b = ld.n_min, ld.n_max

        def sq(m):
            return m * (m + 1) * (2 * m + 1) // 6

        return Fraction(sq(b) - sq(a - 1), b - a + 1)
    if ld.kind == "truncated_zeta":
        a, b = ld.n_min, ld.n_max
        h = sum(Fraction(1, n) for n in range(a, b + 1))
        return Fraction((b - a + 1) * (a + b), 2) / h
    return moment(ld, 2)


def _require_n_min_2(ld: LengthDistribution):
    if ld.n_min != 2:
        raise AssumptionError(f"closed form derived for n_min = 2, distribution has n_min = {ld.n_min}")


def null_expected_d(ld: LengthDistribution) -> Fraction:
    """Sentence-weighted expectation of ``<d>`` under random placement."""
    _require_n_min_2(ld)
    return (expectation_n(ld) + 1) / 3


def null_expected_D(ld: LengthDistribution) -> Fraction:
    _require_n_min_2(ld)
    return (expectation_n2(ld) - 1) / 3


def null_expected_d_dependency_weighted(ld: LengthDistribution) -> Fraction:
    """Expectation of ``d`` when sentences are weighted by their ``n - 1`` dependencies.

    This is what a pooled per-dependency mean (MDD) estimates; it equals
    ``E[D] / E[n - 1]``.
    """
    _require_n_min_2(ld)
    return null_expected_D(ld) / (expectation_n(ld) - 1)


# -- conditional families ---------------------------------------------------


def _geometric_mean(q: float, m: int) -> float:
    return float(np.exp(truncated_geometric_logpmf(q, m)) @ np.arange(1, m + 1))


def mean_matched_q(n: int) -> float:
    """Decay ``q`` whose truncated-geometric mean on ``1..n-1`` is ``(n + 1) / 3``."""
    if n <= 3:
        # n=2 has a single support point (any q); n=3 solves q / (1 + q) = 1/3
        return 0.5
    target = (n + 1) / 3
    return brentq(lambda q: _geometric_mean(q, n - 1) - target, 1e-9, 1 - 1e-12, xtol=1e-15)


@dataclass(frozen=True)
class MixtureSpec:
    """Sentence-length distribution plus conditional family ``p(d | n)``.

    Truncated-geometric linkages give the decay ``q(n)`` per length:

    ``mean_match``
        conditional mean equal to ``(n + 1) / 3``;
    ``constant``
        ``q(n) = q``;
    ``log_spread``
        decay scale ``1 / -log q(n)`` interpolated log-linearly from
        ``scale_min`` at ``n_min`` to ``scale_max`` at ``n_max``.
    """

    length_dist: LengthDistribution
    conditional: str = "null"
    linkage: str = "mean_match"
    q: float | None = None
    scale_min: float = 1.0
    scale_max: float | None = None
    table: LengthConditionedTable | None = None

    def __post_init__(self):
        problems = {}
        if self.conditional not in CONDITIONAL_FAMILIES:
            problems["conditional_family"] = f"must be one of {CONDITIONAL_FAMILIES}"
        if self.conditional == "truncated_geometric":
            if self.linkage not in LINKAGES:
                problems["linkage"] = f"must be one of {LINKAGES}"
            if self.linkage == "constant" and (self.q is None or not 0 < self.q < 1):
                problems["q"] = "constant linkage needs 0 < q < 1"
            if self.linkage == "log_spread":
                if not self.scale_min > 0:
                    problems["scale_min"] = "must be > 0"
                if self.scale_max is not None and not self.scale_max > 0:
                    problems["scale_max"] = "must be > 0"
        if self.conditional == "empirical":
            if self.table is None:
                problems["table"] = "empirical conditionals need a length-conditioned table"
            else:
                missing = [n for n in self.length_dist.support() if self.table.sentence_counts.get(n, 0) < 1]
                if missing:
                    problems["table"] = f"no sentences for lengths {missing}"
        if problems:
            raise SpecValidationError(problems)

    def q_of(self, n: int) -> float:
        if self.linkage == "constant":
            return float(self.q)
        if self.linkage == "mean_match":
            return mean_matched_q(n)
        ld = self.length_dist
        lo, hi = self.scale_min, self.scale_max if self.scale_max is not None else float(ld.n_max)
        span = ld.n_max - ld.n_min
        frac = 0.0 if span == 0 else (n - ld.n_min) / span
        scale = lo * (hi / lo) ** frac
        return math.exp(-1.0 / scale)

    def conditional_pmf(self, n: int) -> np.ndarray:
        """``p(d | n)`` for ``d = 1..n-1``."""
        if self.conditional == "null":
            return np.array([float(p) for p in exact_null(n).p_d.values()])
        if self.conditional == "truncated_geometric":
            return np.exp(truncated_geometric_logpmf(self.q_of(n), n - 1))
        counts = self.table.counts_at(n).astype(float)
        return counts / counts.sum()

    def conditional_mean(self, n: int) -> float:
        return float(self.conditional_pmf(n) @ np.arange(1, n))


def _length_weights(spec: MixtureSpec, weighting: str) -> dict[int, float]:
    pmf = {n: float(p) for n, p in spec.length_dist.pmf().items() if p > 0}
    if weighting == "sentence":
        return pmf
    if weighting == "dependency":
        z = sum((n - 1) * p for n, p in pmf.items())
        return {n: (n - 1) * p / z for n, p in pmf.items()}
    raise ValueError(f"weighting must be 'sentence' or 'dependency', got {weighting!r}")


def mix(spec: MixtureSpec, weighting: str = "sentence") -> dict[int, float]:
    """Pooled ``p(d)`` over ``d = 1..n_max-1``.

    ``weighting="sentence"`` uses ``p(n)`` as given; ``"dependency"`` uses
    ``(n - 1) p(n)`` renormalised, the weighting implicit in pooling every
    dependency of a corpus.
    """
    n_max = spec.length_dist.n_max
    out = np.zeros(max(n_max - 1, 1))
    for n, w in _length_weights(spec, weighting).items():
        cond = spec.conditional_pmf(n)
        if abs(cond.sum() - 1.0) > 1e-9:
            raise SpecValidationError({"conditional_family": f"p(d | {n}) sums to {cond.sum()!r}"})
        out[: n - 1] += w * cond
    return {d: float(out[d - 1]) for d in range(1, n_max)}


def mixture_mean(spec: MixtureSpec, weighting: str = "sentence") -> float:
    """``sum_n w(n) E[d | n]``, the mean of :func:`mix` computed per length."""
    return sum(w * spec.conditional_mean(n) for n, w in _length_weights(spec, weighting).items())


@dataclass(frozen=True)
class Fig2Row:
    n_max: int
    uniform: Fraction
    zeta: Fraction


def fig2_table(n_max_values: Iterable[int]) -> list[Fig2Row]:
    """``E[n]`` for uniform and truncated-zeta lengths on ``[2, n_max]``."""
    values = sorted(set(n_max_values))
    if values and values[0] < 2:
        raise ValueError("n_max must be >= 2")
    rows = []
    h = Fraction(0)
    m = 1
    for n_max in values:
        while m < n_max:
            m += 1
            h += Fraction(1, m)
        uniform = Fraction(1, n_max - 1) * (Fraction(n_max * (n_max + 1), 2) - 1)
        rows.append(Fig2Row(n_max, uniform, Fraction(n_max - 1) / h))
    return rows


# -- sampling ---------------------------------------------------------------


def sample_corpus(spec: MixtureSpec, n_sentences: int, rng: np.random.Generator) -> LengthConditionedTable:
    """Draw sentence lengths from ``p(n)`` and ``n - 1`` dependency lengths per sentence."""
    lengths = spec.length_dist.sample(n_sentences, rng)
    ns, counts = np.unique(lengths, return_counts=True)
    f: dict[tuple[int, int], int] = {}
    for n, k in zip(ns.tolist(), counts.tolist()):
        draws = rng.choice(n - 1, size=k * (n - 1), p=spec.conditional_pmf(n)) + 1
        for d, c in enumerate(np.bincount(draws - 1, minlength=n - 1).tolist(), start=1):
            if c:
                f[n, d] = c
    return LengthConditionedTable.from_counts(f, dict(zip(ns.tolist(), counts.tolist())), n_min=spec.length_dist.n_min)


@dataclass(frozen=True)
class NullSimulation:
    n: np.ndarray
    D: np.ndarray

    @property
    def mean_d(self) -> np.ndarray:
        return self.D / (self.n - 1)


def simulate_null_sentences(ld: LengthDistribution, n_sentences: int, rng: np.random.Generator) -> NullSimulation:
    """Sentences with lengths from ``ld``, uniform random trees, random arrangements."""
    lengths = ld.sample(n_sentences, rng)
    D = np.empty(n_sentences, dtype=np.int64)
    for i, n in enumerate(lengths.tolist()):
        t = random_arrangement(random_tree(n, rng), rng)
        D[i] = sum(v - u for u, v in t.edges)
    return NullSimulation(lengths, D)
