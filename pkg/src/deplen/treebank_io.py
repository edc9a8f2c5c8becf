"""CoNLL-U ingestion and tree validation.

Only simple word lines (integer ID) are kept.  Multiword token ranges
(``3-4``) and empty nodes (``5.1``) are skipped, so ``n`` is the number of
syntactic words of the sentence.
"""
from __future__ import annotations

import io
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator, TextIO

from .exceptions import ConlluParseError, StructuralError, TreeRejection
from .tree_core import DepTree

PUNCT_MODES = ("keep", "drop")


@dataclass(frozen=True)
class RawSentence:
    sentence_id: str
    tokens: tuple[tuple[int, int], ...]  # (position, head)
    upos: tuple[str, ...] = ()

    @property
    def n(self) -> int:
        return len(self.tokens)


@dataclass
class IngestReport:
    sentences_read: int = 0
    sentences_kept: int = 0
    rejected_non_tree: int = 0
    rejected_below_n_min: int = 0
    rejection_reasons: Counter = field(default_factory=Counter)

    def as_dict(self) -> dict:
        return {
            "sentences_read": self.sentences_read,
            "sentences_kept": self.sentences_kept,
            "rejected_non_tree": self.rejected_non_tree,
            "rejected_below_n_min": self.rejected_below_n_min,
            "rejection_reasons": dict(sorted(self.rejection_reasons.items())),
        }


@dataclass
class Treebank:
    """Result of :func:`ingest`.

    ``trees`` holds every sentence that is a tree with at least two words,
    including those shorter than ``n_min``; the length threshold is applied
    by the aggregation step, the report only tallies it.
    """

    trees: list[DepTree]
    sentence_ids: list[str]
    report: IngestReport
    n_min: int
    punct_mode: str


def _parse_int(value: str, lineno: int, column: str) -> int:
    try:
        return int(value)
    except ValueError:
        raise ConlluParseError(lineno, f"non-integer {column} {value!r}") from None


def read_conllu(stream: TextIO | Iterable[str]) -> Iterator[RawSentence]:
    """Yield one :class:`RawSentence` per blank-line-separated block."""
    tokens: list[tuple[int, int]] = []
    upos: list[str] = []
    sent_id = None
    in_block = False
    ordinal = 0

    def flush():
        nonlocal tokens, upos, sent_id, in_block, ordinal
        sentence = None
        if tokens:
            ordinal += 1
            sentence = RawSentence(sent_id or f"s{ordinal}", tuple(tokens), tuple(upos))
        tokens, upos, sent_id, in_block = [], [], None, False
        return sentence

    for lineno, line in enumerate(stream, start=1):
        line = line.rstrip("\r\n")
        if not line.strip():
            if in_block:
                sentence = flush()
                if sentence is not None:
                    yield sentence
            continue
        in_block = True
        if line.startswith("#"):
            key, sep, value = line[1:].partition("=")
            if sep and key.strip() == "sent_id":
                sent_id = value.strip()
            continue
        cols = line.split("\t")
        if len(cols) != 10:
            raise ConlluParseError(lineno, f"expected 10 tab-separated columns, found {len(cols)}")
        ident = cols[0]
        if "-" in ident or "." in ident:
            continue
        position = _parse_int(ident, lineno, "ID")
        head = _parse_int(cols[6], lineno, "HEAD")
        if position != len(tokens) + 1:
            raise ConlluParseError(lineno, f"word ID {position} out of sequence")
        tokens.append((position, head))
        upos.append(cols[3])
    sentence = flush()
    if sentence is not None:
        yield sentence


def check_tree(s: RawSentence) -> None:
    """Raise unless the heads of ``s`` form a single-rooted tree."""
    n = s.n
    heads = [h for _, h in s.tokens]
    for pos, h in s.tokens:
        if not 0 <= h <= n:
            raise StructuralError(f"{s.sentence_id}: token {pos} has head {h} outside [0, {n}]")
        if h == pos:
            raise TreeRejection("cycle", s.sentence_id)
    roots = heads.count(0)
    if roots == 0:
        raise TreeRejection("no root", s.sentence_id)
    if roots > 1:
        raise TreeRejection("multiple roots", s.sentence_id)
    # every word must reach the root; with one head per word, failure means a cycle
    reaches_root = [False] * (n + 1)
    reaches_root[0] = True
    for start in range(1, n + 1):
        path = []
        v = start
        while not reaches_root[v]:
            if v in path:
                raise TreeRejection("cycle", s.sentence_id)
            path.append(v)
            v = heads[v - 1]
        for u in path:
            reaches_root[u] = True


def to_dep_tree(s: RawSentence) -> DepTree:
    """Validate ``s`` as a rooted tree and return its word-word edges.

    Raises :class:`TreeRejection` when the heads do not form a tree (or the
    sentence has a single word) and :class:`StructuralError` when a head
    points outside ``0..n``.
    """
    check_tree(s)
    if s.n < 2:
        raise TreeRejection("single word", s.sentence_id)
    return DepTree.from_heads([h for _, h in s.tokens])


def drop_punctuation(s: RawSentence) -> RawSentence:
    """Remove PUNCT words and re-index positions to ``1..n'``.

    Dependents of a removed word are reattached to its nearest kept ancestor.
    ``s`` is expected to be a valid tree already.
    """
    keep = [u != "PUNCT" for u in s.upos]
    if all(keep):
        return s
    heads = [0] + [h for _, h in s.tokens]
    new_index = {0: 0}
    for pos in range(1, s.n + 1):
        if keep[pos - 1]:
            new_index[pos] = len(new_index)
    tokens = []
    for pos in range(1, s.n + 1):
        if not keep[pos - 1]:
            continue
        h = heads[pos]
        while h != 0 and not keep[h - 1]:
            h = heads[h]
        tokens.append((new_index[pos], new_index[h]))
    upos = tuple(u for u in s.upos if u != "PUNCT")
    return RawSentence(s.sentence_id, tuple(tokens), upos)


def ingest(stream: TextIO | Iterable[str] | str, n_min: int = 3, punct: str = "keep") -> Treebank:
    """Read a CoNLL-U stream into validated trees plus an :class:`IngestReport`."""
    if punct not in PUNCT_MODES:
        raise ValueError(f"punct must be one of {PUNCT_MODES}, got {punct!r}")
    if n_min < 2:
        raise ValueError(f"n_min must be >= 2, got {n_min}")
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    report = IngestReport()
    trees, ids = [], []
    for raw in read_conllu(stream):
        report.sentences_read += 1
        try:
            check_tree(raw)
            if punct == "drop":
                raw = drop_punctuation(raw)
            if raw.n < 2:
                report.rejected_below_n_min += 1
                continue
            tree = to_dep_tree(raw)
        except (TreeRejection, StructuralError) as exc:
            reason = exc.reason if isinstance(exc, TreeRejection) else "head out of range"
            report.rejected_non_tree += 1
            report.rejection_reasons[reason] += 1
            continue
        trees.append(tree)
        ids.append(raw.sentence_id)
        if tree.n < n_min:
            report.rejected_below_n_min += 1
        else:
            report.sentences_kept += 1
    return Treebank(trees, ids, report, n_min, punct)


def read_treebank(path, n_min: int = 3, punct: str = "keep") -> Treebank:
    with open(path, encoding="utf-8", newline="") as fh:
        return ingest(fh, n_min=n_min, punct=punct)


def write_conllu(sentences: Iterable[RawSentence]) -> str:
    """Serialise position/head pairs as minimal CoNLL-U (other columns ``_``)."""
    out = []
    for s in sentences:
        out.append(f"# sent_id = {s.sentence_id}")
        upos = s.upos or ("_",) * s.n
        for (pos, head), tag in zip(s.tokens, upos):
            out.append("\t".join([str(pos), f"w{pos}", "_", tag, "_", "_", str(head), "dep", "_", "_"]))
        out.append("")
    return "\n".join(out) + ("\n" if out else "")
