"""Command-line front end.

    deplen stats  --input corpus.conllu --out results/
    deplen null   --input corpus.conllu --seed 7 --samples 2000 --out results/
    deplen mix    --spec mixture.yaml --out results/
    deplen fit    --input corpus.conllu --scope per-n=12 --out results/
    deplen report --input corpus.conllu --out results/

Every command writes ``config.json`` with the effective settings next to
its data files.  Exit codes: 0 success, 2 usage or validation error,
3 data error, 4 I/O error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
import warnings
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np
import yaml

from . import __version__
from .distfit import BoundaryWarning, compare, fit_counts
from .exceptions import (
    AssumptionError,
    ConlluParseError,
    NoDataError,
    SpecValidationError,
    StructuralError,
)
from .mixture_lab import (
    LengthDistribution,
    MixtureSpec,
    expectation_n,
    expectation_n2,
    fig2_table,
    mix,
    mixture_mean,
    null_expected_D,
    null_expected_d,
    null_expected_d_dependency_weighted,
)
from .null_models import McConfig, mc_null_curve
from .stats_engine import accumulate, per_length_rows, sentence_records, summarize
from .tree_core import max_mean_d_noncrossing
from .treebank_io import PUNCT_MODES, read_treebank

log = logging.getLogger("deplen")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_IO = 0, 2, 3, 4

MIX_KEYS = {
    "kind", "n_min", "n_max", "n", "weights", "conditional_family", "linkage",
    "q", "scale_min", "scale_max", "treebank", "fig2_max",
}


@dataclass(frozen=True)
class RunConfig:
    input_path: str
    n_min: int = 3
    punct_mode: str = "keep"
    seed: int = 0
    samples: int = 1000
    output_dir: str = "."
    format: str = "csv"
    min_sentences: int = 3
    min_deps: int = 30
    workers: int = 1

    def __post_init__(self):
        if self.n_min < 2:
            raise SpecValidationError({"n_min": "must be >= 2"})
        if self.samples < 1:
            raise SpecValidationError({"samples": "must be >= 1"})
        if self.punct_mode not in PUNCT_MODES:
            raise SpecValidationError({"punct": f"must be one of {PUNCT_MODES}"})
        if self.format not in ("csv", "json"):
            raise SpecValidationError({"format": "must be csv or json"})
        if not 0 <= self.seed < 2**64:
            raise SpecValidationError({"seed": "must be a 64-bit unsigned integer"})

    def echo(self) -> dict:
        """Settings that determine the outputs (worker count does not)."""
        return {
            "input": self.input_path,
            "n_min": self.n_min,
            "punct_mode": self.punct_mode,
            "seed": self.seed,
            "samples": self.samples,
            "format": self.format,
            "min_sentences": self.min_sentences,
            "min_deps": self.min_deps,
            "version": __version__,
        }


# -- serialisation ----------------------------------------------------------


def fmt_number(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, Fraction):
        x = float(x)
    return format(float(x), ".17g")


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, Fraction):
        return float(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        return float(x)
    return x


def write_json(path: Path, obj) -> None:
    text = json.dumps(_jsonable(obj), indent=2, ensure_ascii=False, allow_nan=False)
    path.write_text(text + "\n", encoding="utf-8")


def write_table(out_dir: Path, stem: str, columns: list[str], rows: list[list], fmt: str) -> Path:
    if fmt == "json":
        path = out_dir / f"{stem}.json"
        write_json(path, {"columns": columns, "rows": [dict(zip(columns, r)) for r in rows]})
        return path
    path = out_dir / f"{stem}.csv"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for r in rows:
        writer.writerow([fmt_number(v) for v in r])
    path.write_text(buf.getvalue(), encoding="utf-8")
    return path


def _prepare_out(cfg_out) -> Path:
    out = Path(cfg_out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _load(cfg: RunConfig):
    treebank = read_treebank(cfg.input_path, n_min=cfg.n_min, punct=cfg.punct_mode)
    log.debug("ingest report: %s", treebank.report.as_dict())
    kept = [t for t in treebank.trees if t.n >= cfg.n_min]
    if not kept:
        raise NoDataError(f"{cfg.input_path}: no sentences with n >= {cfg.n_min} survived ingestion")
    return treebank, kept


# -- commands ---------------------------------------------------------------


def cmd_stats(cfg: RunConfig):
    treebank, kept = _load(cfg)
    out = _prepare_out(cfg.output_dir)
    summary = summarize(kept, cfg.n_min)
    columns = ["n", "sentences", "mean_mean_d", "mean_D", "mean_k2", "null_expected_d", "noncrossing_max", "reported"]
    rows = []
    for n, row in summary.per_n.items():
        rows.append([
            n, row.sentences, row.mean_mean_d, row.mean_D, row.mean_k2,
            Fraction(n + 1, 3), max_mean_d_noncrossing(n), row.sentences >= cfg.min_sentences,
        ])
    table_path = write_table(out, "per_length", columns, rows, cfg.format)
    write_json(out / "summary.json", {
        "config": cfg.echo(),
        "ingest": treebank.report.as_dict(),
        "mdd": summary.mdd,
        "mdd_weighting": "per dependency, pooled over sentence lengths",
        "adl": summary.adl,
        "adl_weighting": "per sentence, pooled over sentence lengths",
        "sentences": summary.sentences,
        "dependencies": summary.dependencies,
        "skipped_below_n_min": summary.skipped,
        "per_length_file": table_path.name,
        "reported_lengths": [n for n, r in summary.per_n.items() if r.sentences >= cfg.min_sentences],
    })
    write_json(out / "config.json", cfg.echo())
    print(f"MDD={summary.mdd:.6g} ADL={summary.adl:.6g} over {summary.sentences} sentences; "
          f"per-length values in {table_path}")
    return summary


def cmd_null(cfg: RunConfig):
    _, kept = _load(cfg)
    out = _prepare_out(cfg.output_dir)
    empirical = per_length_rows(sentence_records(kept, cfg.n_min))
    curve = mc_null_curve(kept, McConfig(cfg.seed, cfg.samples, cfg.workers))
    columns = ["n", "sentences", "empirical_mean_d", "mc_mean_d", "mc_se", "mc_samples", "null_expected_d"]
    rows = [
        [n, empirical[n].sentences, empirical[n].mean_mean_d, pt.mean_d, pt.se, pt.samples, Fraction(n + 1, 3)]
        for n, pt in curve.items()
    ]
    path = write_table(out, "null_curve", columns, rows, cfg.format)
    write_json(out / "config.json", cfg.echo())
    print(f"null curve for {len(rows)} sentence lengths in {path}")
    return curve


def _build_spec(doc: dict, base_dir: Path) -> MixtureSpec:
    if not isinstance(doc, dict):
        raise SpecValidationError({"<document>": "expected a flat key-value mapping"})
    unknown = sorted(set(doc) - MIX_KEYS)
    if unknown:
        raise SpecValidationError({k: "unknown key" for k in unknown})
    kind = doc.get("kind", "uniform")
    n_min = doc.get("n_min", 2)
    try:
        if kind == "point":
            if "n" not in doc:
                raise SpecValidationError({"n": "required for kind=point"})
            ld = LengthDistribution.point(int(doc["n"]))
        elif kind == "empirical":
            weights = doc.get("weights")
            if not isinstance(weights, dict) or not weights:
                raise SpecValidationError({"weights": "mapping of length -> weight required"})
            ld = LengthDistribution.empirical(
                {int(k): Fraction(str(v)) for k, v in weights.items()}, n_min=n_min, n_max=doc.get("n_max")
            )
        else:
            if "n_max" not in doc:
                raise SpecValidationError({"n_max": "required"})
            ld = LengthDistribution(kind, doc["n_max"], n_min)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, SpecValidationError):
            raise
        raise SpecValidationError({"weights": str(exc)}) from None
    table = None
    family = doc.get("conditional_family", "null")
    if family == "empirical":
        if "treebank" not in doc:
            raise SpecValidationError({"treebank": "required for conditional_family=empirical"})
        tb = read_treebank(base_dir / doc["treebank"], n_min=2)
        table = accumulate(tb.trees, n_min=2)
    return MixtureSpec(
        ld,
        conditional=family,
        linkage=doc.get("linkage", "mean_match"),
        q=doc.get("q"),
        scale_min=doc.get("scale_min", 1.0),
        scale_max=doc.get("scale_max"),
        table=table,
    )


def _moments(spec: MixtureSpec) -> dict:
    ld = spec.length_dist
    pmf = ld.pmf()
    direct_sentence = sum((p * Fraction(n + 1, 3) for n, p in pmf.items()), Fraction(0))
    moments = {
        "E_n": expectation_n(ld),
        "E_n2": expectation_n2(ld),
        "length_distribution": {"kind": ld.kind, "n_min": ld.n_min, "n_max": ld.n_max},
        "conditional_family": spec.conditional,
        "mixture_mean_d_sentence_weighted": mixture_mean(spec, "sentence"),
        "mixture_mean_d_dependency_weighted": mixture_mean(spec, "dependency"),
        "null_E_d_direct_sentence_weighted": direct_sentence,
    }
    try:
        moments.update({
            "null_E_d_sentence_weighted": null_expected_d(ld),
            "null_E_d_dependency_weighted": null_expected_d_dependency_weighted(ld),
            "null_E_D": null_expected_D(ld),
        })
    except AssumptionError as exc:
        moments["closed_forms"] = str(exc)
    if spec.conditional == "truncated_geometric":
        moments["linkage"] = spec.linkage
    return moments


def _write_mixture(out: Path, spec: MixtureSpec, fmt: str):
    sentence = mix(spec, "sentence")
    dependency = mix(spec, "dependency")
    rows = [[d, sentence[d], dependency[d]] for d in sentence]
    write_table(out, "mixed_pd", ["d", "p", "p_dependency_weighted"], rows, fmt)
    write_json(out / "moments.json", _moments(spec))


def cmd_mix(spec_path, output_dir, fmt: str = "csv", fig2_max: int | None = None):
    spec_path = Path(spec_path)
    doc = yaml.safe_load(spec_path.read_text(encoding="utf-8")) or {}
    spec = _build_spec(doc, spec_path.parent)
    out = _prepare_out(output_dir)
    _write_mixture(out, spec, fmt)
    top = int(fig2_max or doc.get("fig2_max", 100))
    rows = [[r.n_max, r.uniform, r.zeta] for r in fig2_table(range(2, top + 1))]
    write_table(out, "fig2", ["n_max", "E_uniform_n", "E_zeta_n"], rows, fmt)
    write_json(out / "config.json", {"spec_file": str(spec_path), "spec": doc, "fig2_max": top, "format": fmt})
    print(f"mixture written to {out}")
    return spec


def parse_scope(text: str):
    if text == "mixed":
        return None
    if text.startswith("per-n="):
        try:
            n = int(text.split("=", 1)[1])
        except ValueError:
            raise SpecValidationError({"scope": f"bad length in {text!r}"}) from None
        if n < 2:
            raise SpecValidationError({"scope": "length must be >= 2"})
        return n
    raise SpecValidationError({"scope": "expected 'mixed' or 'per-n=N'"})


def fit_table(table, scope_n, min_deps: int) -> dict:
    if scope_n is None:
        counts = table.pooled_counts().astype(float)
        scope = {"scope": "mixed", "n": None,
                 "weighting": "dependency counts pooled over all sentence lengths"}
    else:
        if table.sentence_counts.get(scope_n, 0) == 0:
            raise NoDataError(f"scope per_n({scope_n}): no sentences of that length")
        counts = table.counts_at(scope_n).astype(float)
        scope = {"scope": "per_n", "n": scope_n, "weighting": f"dependencies of sentences with n = {scope_n} only"}
    total = int(counts.sum())
    if total < min_deps:
        label = "mixed" if scope_n is None else f"per_n({scope_n})"
        raise NoDataError(f"scope {label}: {total} dependencies, need at least {min_deps}")
    d_max = len(counts)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", BoundaryWarning)
        results = [fit_counts(counts, "geometric"), fit_counts(counts, "zeta")]
        if d_max >= 3 and np.count_nonzero(counts) >= 2:
            try:
                results.append(fit_counts(counts, "two_regime_geometric"))
            except NoDataError:
                pass
    ranking = compare(results)
    return {
        **scope,
        "d_max": d_max,
        "sample_size": total,
        "fits": [r.as_dict() for r in results],
        "ranking": [{"family": r.result.family, "aic": r.result.aic, "delta_aic": r.delta_aic} for r in ranking],
    }


def cmd_fit(cfg: RunConfig, scope: str = "mixed"):
    scope_n = parse_scope(scope)
    _, kept = _load(cfg)
    out = _prepare_out(cfg.output_dir)
    table = accumulate(kept, cfg.n_min)
    doc = fit_table(table, scope_n, cfg.min_deps)
    doc["config"] = cfg.echo()
    write_json(out / "fits.json", doc)
    write_json(out / "config.json", cfg.echo())
    best = doc["ranking"][0]["family"]
    print(f"{doc['scope']} fit over {doc['sample_size']} dependencies: best by AIC is {best}")
    return doc


def cmd_report(cfg: RunConfig, scope: str = "mixed"):
    cmd_stats(cfg)
    cmd_null(cfg)
    _, kept = _load(cfg)
    table = accumulate(kept, cfg.n_min)
    ld = LengthDistribution.empirical(dict(table.sentence_counts), n_min=2)
    spec = MixtureSpec(ld, conditional="empirical", table=table)
    out = _prepare_out(cfg.output_dir)
    _write_mixture(out, spec, cfg.format)
    cmd_fit(cfg, scope)
    return out


# -- argument parsing -------------------------------------------------------


def _add_common(p, needs_seed=False):
    p.add_argument("--input", required=True, help="CoNLL-U treebank")
    p.add_argument("--n-min", type=int, default=3, help="minimum sentence length (default 3)")
    p.add_argument("--punct", choices=PUNCT_MODES, default="keep", help="keep or drop PUNCT tokens")
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--min-sentences", type=int, default=3, help="sentences needed to report a length")
    if needs_seed:
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--samples", type=int, default=1000, help="random arrangements per sentence")
        p.add_argument("--workers", type=int, default=1, help="threads for Monte Carlo sampling")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="deplen", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("stats", help="per-length statistics, MDD and ADL")
    _add_common(p)

    p = sub.add_parser("null", help="empirical curve against random-arrangement baselines")
    _add_common(p, needs_seed=True)

    p = sub.add_parser("mix", help="evaluate a length mixture from a config file")
    p.add_argument("--spec", required=True, help="flat YAML/JSON key-value document")
    p.add_argument("--out", default=".")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--fig2-max", type=int, default=None)

    for name, helptext in (("fit", "fit geometric / zeta / two-regime models"),
                           ("report", "stats + null + empirical mixture + fit")):
        p = sub.add_parser(name, help=helptext)
        _add_common(p, needs_seed=True)
        p.add_argument("--scope", default="mixed", help="'mixed' or 'per-n=N'")
        p.add_argument("--min-deps", type=int, default=30)
    return parser


def _config(args) -> RunConfig:
    return RunConfig(
        input_path=args.input,
        n_min=args.n_min,
        punct_mode=args.punct,
        seed=getattr(args, "seed", 0),
        samples=getattr(args, "samples", 1000),
        output_dir=args.out,
        format=args.format,
        min_sentences=args.min_sentences,
        min_deps=getattr(args, "min_deps", 30),
        workers=getattr(args, "workers", 1),
    )


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "mix":
            cmd_mix(args.spec, args.out, args.format, args.fig2_max)
        else:
            cfg = _config(args)
            if args.command == "stats":
                cmd_stats(cfg)
            elif args.command == "null":
                cmd_null(cfg)
            elif args.command == "fit":
                cmd_fit(cfg, args.scope)
            else:
                cmd_report(cfg, args.scope)
    except (SpecValidationError, yaml.YAMLError) as exc:
        print(f"deplen: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NoDataError, ConlluParseError, StructuralError) as exc:
        print(f"deplen: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"deplen: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
