"""Dependency-length statistics conditioned on sentence length.

Ingest CoNLL-U treebanks, compare per-length dependency lengths against
random-arrangement baselines, and inspect what pooling across sentence
lengths does to distributions and global averages.
"""

__version__ = "0.1.0"

from pathlib import Path  # noqa: E402

SAMPLE_TREEBANK = Path(__file__).parent / "data" / "sample.conllu"

from .distfit import (  # noqa: E402
    FitResult,
    TruncatedGeometric,
    TruncatedZeta,
    TwoRegimeGeometric,
    compare,
    fit_geometric,
    fit_two_regime,
    fit_zeta,
)
from .mixture_lab import (  # noqa: E402
    LengthDistribution,
    MixtureSpec,
    expectation_n,
    expectation_n2,
    fig2_table,
    mix,
    null_expected_D,
    null_expected_d,
)
from .null_models import (  # noqa: E402
    McConfig,
    NullSummary,
    enumerate_arrangements,
    exact_null,
    mc_null_curve,
    random_arrangement,
    random_tree,
)
from .stats_engine import (  # noqa: E402
    DependencyLengthProfile,
    LengthConditionedTable,
    accumulate,
    adl,
    conditional_distribution,
    mdd,
    mixed_distribution,
    per_length_curve,
)
from .tree_core import DepTree, TreeMetrics, k2_bounds, max_mean_d_noncrossing, metrics, min_mean_d_bound  # noqa: E402
from .treebank_io import IngestReport, RawSentence, ingest, read_conllu, read_treebank, to_dep_tree  # noqa: E402
