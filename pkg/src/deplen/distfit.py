"""Maximum-likelihood fits of discrete dependency-length distributions.

Three right-truncated families on ``d = 1..d_max``:

* geometric, ``p(d) ∝ q**d`` (the discrete counterpart of an exponential);
* zeta, ``p(d) ∝ d**-gamma``;
* two-regime geometric, with its own decay on ``1..b`` and on ``b+1..d_max``.

The estimators follow the scikit-learn conventions (``fit`` returns
``self``, fitted attributes end in ``_``, ``get_params`` works), and accept
``sample_weight`` so that a histogram can be fitted without expanding it.
The module-level ``fit_*`` helpers return plain :class:`FitResult` records.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.special import logsumexp
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted, column_or_1d

from .exceptions import ComparisonError, NoDataError

GEOMETRIC_BOUNDS = (1e-6, 1.0 - 1e-6)
ZETA_BOUNDS = (1e-6, 20.0)
TOLERANCE = 1e-10
BOUNDARY_EPS = 1e-7

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


class BoundaryWarning(UserWarning):
    """The likelihood maximum sits on the edge of the search interval."""


def golden_section_max(func, lo: float, hi: float, tol: float = TOLERANCE) -> float:
    """Maximiser of a unimodal ``func`` on ``[lo, hi]`` to within ``tol``."""
    a, b = lo, hi
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = func(c), func(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = func(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = func(d)
    return (a + b) / 2.0


def _boundary(x: float, bounds: tuple[float, float]) -> str | None:
    if x - bounds[0] < BOUNDARY_EPS:
        return "lower"
    if bounds[1] - x < BOUNDARY_EPS:
        return "upper"
    return None


# -- pmfs and samplers ------------------------------------------------------


def truncated_geometric_logpmf(q: float, d_max: int) -> np.ndarray:
    d = np.arange(1, d_max + 1, dtype=float)
    logits = d * math.log(q)
    return logits - logsumexp(logits)


def truncated_zeta_logpmf(gamma: float, d_max: int) -> np.ndarray:
    logits = -gamma * np.log(np.arange(1, d_max + 1, dtype=float))
    return logits - logsumexp(logits)


def two_regime_pmf(q1: float, q2: float, b: int, weight: float, d_max: int) -> np.ndarray:
    """Mass ``weight`` on a geometric over ``1..b``, the rest on ``b+1..d_max``."""
    head = weight * np.exp(truncated_geometric_logpmf(q1, b))
    tail = (1.0 - weight) * np.exp(truncated_geometric_logpmf(q2, d_max - b))
    return np.concatenate([head, tail])


def sample_from_pmf(pmf: np.ndarray, size: int, rng: np.random.Generator) -> np.ndarray:
    """Draw values ``1..len(pmf)``."""
    pmf = np.asarray(pmf, dtype=float)
    return rng.choice(len(pmf), size=size, p=pmf / pmf.sum()) + 1


def sample_truncated_geometric(q, d_max, size, rng):
    return sample_from_pmf(np.exp(truncated_geometric_logpmf(q, d_max)), size, rng)


def sample_truncated_zeta(gamma, d_max, size, rng):
    return sample_from_pmf(np.exp(truncated_zeta_logpmf(gamma, d_max)), size, rng)


# -- log-likelihoods on a histogram ------------------------------------------


def _geometric_ll(counts: np.ndarray, q: float) -> float:
    d = np.arange(1, len(counts) + 1, dtype=float)
    logq = math.log(q)
    return float(logq * (counts * d).sum() - counts.sum() * logsumexp(d * logq))


def _zeta_ll(counts: np.ndarray, gamma: float) -> float:
    logd = np.log(np.arange(1, len(counts) + 1, dtype=float))
    return float(-gamma * (counts * logd).sum() - counts.sum() * logsumexp(-gamma * logd))


def _fit_geometric_counts(counts: np.ndarray) -> tuple[float, float]:
    q = golden_section_max(lambda x: _geometric_ll(counts, x), *GEOMETRIC_BOUNDS)
    return q, _geometric_ll(counts, q)


def to_histogram(X, d_max=None, sample_weight=None) -> tuple[np.ndarray, int]:
    """Weighted counts of ``d = 1..d_max`` from observations ``X``."""
    X = column_or_1d(np.asarray(X))
    if X.size == 0:
        raise NoDataError("empty sample")
    if not np.all(np.equal(np.mod(X, 1), 0)):
        raise ValueError("dependency lengths must be integers")
    X = X.astype(np.int64)
    if d_max is None:
        d_max = int(X.max())
    if X.min() < 1 or X.max() > d_max:
        raise ValueError(f"observations must lie in 1..{d_max}")
    w = np.ones(X.size) if sample_weight is None else column_or_1d(np.asarray(sample_weight, dtype=float))
    if w.shape != X.shape:
        raise ValueError("sample_weight must match X")
    if np.any(w < 0):
        raise ValueError("sample_weight must be non-negative")
    counts = np.bincount(X - 1, weights=w, minlength=d_max).astype(float)
    if counts.sum() <= 0:
        raise NoDataError("sample has zero total weight")
    return counts, d_max


# -- results ----------------------------------------------------------------


@dataclass(frozen=True)
class FitResult:
    family: str
    params: dict
    truncation: tuple[int, int]
    log_likelihood: float
    aic: float
    sample_size: float
    boundary: str | None = None
    metadata: dict = field(default_factory=dict)

    @property
    def k(self) -> int:
        return N_PARAMS[self.family]

    def as_dict(self) -> dict:
        return {
            "family": self.family,
            "params": dict(self.params),
            "free_parameters": self.k,
            "truncation": list(self.truncation),
            "log_likelihood": self.log_likelihood,
            "aic": self.aic,
            "sample_size": self.sample_size,
            "boundary": self.boundary,
            "metadata": dict(self.metadata),
        }


N_PARAMS = {"geometric": 1, "zeta": 1, "two_regime_geometric": 3}


def _aic(k: int, ll: float) -> float:
    return 2.0 * k - 2.0 * ll


# -- estimators -------------------------------------------------------------


class _TruncatedFit(BaseEstimator):
    family = ""

    def _check_counts(self, X, sample_weight):
        return to_histogram(X, self.d_max, sample_weight)

    def log_likelihood(self, X, sample_weight=None) -> float:
        check_is_fitted(self, "d_max_")
        counts, _ = to_histogram(X, self.d_max_, sample_weight)
        logp = self.logpmf()
        mask = counts > 0
        if np.any(np.isneginf(logp[mask])):
            return -math.inf
        return float((counts[mask] * logp[mask]).sum())

    def score(self, X, y=None, sample_weight=None) -> float:
        """Mean log-likelihood per observation."""
        counts, _ = to_histogram(X, self.d_max_, sample_weight)
        return self.log_likelihood(X, sample_weight) / counts.sum()

    def pmf(self) -> np.ndarray:
        return np.exp(self.logpmf())

    def aic(self) -> float:
        check_is_fitted(self, "log_likelihood_")
        return _aic(N_PARAMS[self.family], self.log_likelihood_)

    def result(self) -> FitResult:
        check_is_fitted(self, "log_likelihood_")
        return FitResult(
            family=self.family,
            params=self._params(),
            truncation=(1, self.d_max_),
            log_likelihood=self.log_likelihood_,
            aic=self.aic(),
            sample_size=self.n_samples_,
            boundary=getattr(self, "boundary_", None),
            metadata=self._metadata(),
        )

    def _metadata(self) -> dict:
        return {}

    def _warn_boundary(self, name, value):
        if self.boundary_ is not None:
            warnings.warn(
                f"{self.family} fit: {name}={value:.6g} on the {self.boundary_} search boundary",
                BoundaryWarning,
                stacklevel=3,
            )


class TruncatedGeometric(_TruncatedFit):
    """Right-truncated geometric ``p(d) ∝ q**d`` on ``1..d_max``.

    Parameters
    ----------
    d_max : int or None
        Truncation point; the sample maximum when None.
    """

    family = "geometric"

    def __init__(self, d_max=None):
        self.d_max = d_max

    def fit(self, X, y=None, sample_weight=None):
        counts, self.d_max_ = self._check_counts(X, sample_weight)
        self.q_, self.log_likelihood_ = _fit_geometric_counts(counts)
        self.n_samples_ = float(counts.sum())
        self.boundary_ = _boundary(self.q_, GEOMETRIC_BOUNDS)
        self._warn_boundary("q", self.q_)
        return self

    def logpmf(self):
        check_is_fitted(self, "q_")
        return truncated_geometric_logpmf(self.q_, self.d_max_)

    def _params(self):
        return {"q": self.q_}


class TruncatedZeta(_TruncatedFit):
    """Right-truncated zeta ``p(d) ∝ d**-gamma`` on ``1..d_max``."""

    family = "zeta"

    def __init__(self, d_max=None):
        self.d_max = d_max

    def fit(self, X, y=None, sample_weight=None):
        counts, self.d_max_ = self._check_counts(X, sample_weight)
        self.gamma_ = golden_section_max(lambda g: _zeta_ll(counts, g), *ZETA_BOUNDS)
        self.log_likelihood_ = _zeta_ll(counts, self.gamma_)
        self.n_samples_ = float(counts.sum())
        self.boundary_ = _boundary(self.gamma_, ZETA_BOUNDS)
        self._warn_boundary("gamma", self.gamma_)
        return self

    def logpmf(self):
        check_is_fitted(self, "gamma_")
        return truncated_zeta_logpmf(self.gamma_, self.d_max_)

    def _params(self):
        return {"gamma": self.gamma_}


class TwoRegimeGeometric(_TruncatedFit):
    """Geometric decay ``q1`` on ``1..b`` and ``q2`` on ``b+1..d_max``.

    The mass on ``1..b`` is set to its empirical share, so for a given
    breakpoint the two decays are fitted independently.  The breakpoint is
    chosen by grid search over ``b_range`` (default ``2..d_max-1``); ties go
    to the smaller ``b``.  Free parameters are counted as 3 (``q1``, ``q2``,
    ``b``); the split weight follows from ``b`` and is not counted.
    """

    family = "two_regime_geometric"

    def __init__(self, d_max=None, b_range=None):
        self.d_max = d_max
        self.b_range = b_range

    def fit(self, X, y=None, sample_weight=None):
        counts, d_max = self._check_counts(X, sample_weight)
        b_range = range(2, d_max) if self.b_range is None else self.b_range
        total = counts.sum()
        best = None
        for b in sorted(b_range):
            if not 1 <= b < d_max:
                raise ValueError(f"breakpoint {b} outside 1..{d_max - 1}")
            head, tail = counts[:b], counts[b:]
            n1, n2 = head.sum(), tail.sum()
            if n1 == 0 or n2 == 0:
                continue
            q1, ll1 = _fit_geometric_counts(head)
            q2, ll2 = _fit_geometric_counts(tail)
            ll = n1 * math.log(n1 / total) + n2 * math.log(n2 / total) + ll1 + ll2
            if best is None or ll > best[0]:
                best = (ll, b, q1, q2, n1 / total)
        if best is None:
            raise NoDataError("every candidate breakpoint leaves a regime empty")
        self.log_likelihood_, self.b_, self.q1_, self.q2_, self.weight_ = best
        self.d_max_ = d_max
        self.n_samples_ = float(total)
        edges = [_boundary(self.q1_, GEOMETRIC_BOUNDS), _boundary(self.q2_, GEOMETRIC_BOUNDS)]
        self.boundary_ = next((e for e in edges if e), None)
        return self

    def logpmf(self):
        check_is_fitted(self, "b_")
        with np.errstate(divide="ignore"):
            return np.log(two_regime_pmf(self.q1_, self.q2_, self.b_, self.weight_, self.d_max_))

    def _params(self):
        return {"q1": self.q1_, "q2": self.q2_, "b": int(self.b_), "weight": self.weight_}

    def _metadata(self):
        return {
            "parameter_count": "q1, q2, b; weight fixed by the empirical split at b",
            "model_status": "exploratory breakpoint formalisation",
        }


# -- functional interface ---------------------------------------------------


def fit_geometric(sample, d_max: int, sample_weight=None) -> FitResult:
    return TruncatedGeometric(d_max).fit(sample, sample_weight=sample_weight).result()


def fit_zeta(sample, d_max: int, sample_weight=None) -> FitResult:
    return TruncatedZeta(d_max).fit(sample, sample_weight=sample_weight).result()


def fit_two_regime(sample, d_max: int, b_range=None, sample_weight=None) -> FitResult:
    return TwoRegimeGeometric(d_max, b_range).fit(sample, sample_weight=sample_weight).result()


def fit_counts(counts: Sequence[float], family: str, **kwargs) -> FitResult:
    """Fit a family to a histogram of ``d = 1..len(counts)``."""
    counts = np.asarray(counts, dtype=float)
    d = np.arange(1, len(counts) + 1)
    mask = counts > 0
    fitter = {"geometric": fit_geometric, "zeta": fit_zeta, "two_regime_geometric": fit_two_regime}[family]
    return fitter(d[mask], len(counts), sample_weight=counts[mask], **kwargs)


@dataclass(frozen=True)
class RankedFit:
    result: FitResult
    delta_aic: float


def compare(results: Sequence[FitResult]) -> list[RankedFit]:
    """Rank fits of the same sample by ascending AIC."""
    if len(results) < 2:
        raise ComparisonError("need at least two fits to compare")
    ref = results[0]
    for r in results[1:]:
        if r.sample_size != ref.sample_size or r.truncation != ref.truncation:
            raise ComparisonError("fits were made on different samples")
    ranked = sorted(results, key=lambda r: r.aic)
    best = ranked[0].aic
    return [RankedFit(r, r.aic - best) for r in ranked]
