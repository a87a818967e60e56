"""Command line entry point.

Exit codes: 0 success, 1 domain error (unparseable input, failed records),
2 usage error (bad flags, missing paths).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import re
import sys
from pathlib import Path
from typing import Sequence

from .backbone import DEFAULT_THRESHOLD, EmptyMatrix, build_cooccurrence, mine_backbone
from .dot import DotOptions, backbone_dot, export_dot
from .elements import parse_composition
from .evaluate import (EmptyGold, VariantTable, aggregate_runs, build_report, evaluate_paper)
from .extract import (NoBody, PipelineConfig, XmlError, load_example, read_paper, run_many)
from .extract.pipeline import Status
from .model import ProvError, filename_for_doi, iter_json_files, read_document
from .validate import EmptyCorpus, classify, corpus_stats

log = logging.getLogger("matprov")


class UsageError(Exception):
    pass


class DomainError(Exception):
    pass


def _dump_json(data) -> str:
    return json.dumps(data, indent=2, ensure_ascii=False) + "\n"


def _csv(rows: Sequence[Sequence], header: Sequence[str]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _existing(path: str) -> Path:
    p = Path(path)
    if not p.exists():
        raise UsageError(f"no such file or directory: {path}")
    return p


def _load_corpus(path: str):
    """Yield ``(file, index, procedure)`` for every procedure under ``path``."""
    for file in iter_json_files(_existing(path)):
        try:
            doc = read_document(file)
        except ProvError as exc:
            raise DomainError(f"{file}: {exc}") from None
        for i, proc in enumerate(doc.procedures):
            yield file, i, proc


# -- subcommands ---------------------------------------------------------------


def cmd_validate(args) -> int:
    rows, errors = [], []
    counts: dict[str, int] = {}
    files = iter_json_files(_existing(args.path))
    for file in files:
        try:
            doc = read_document(file)
        except ProvError as exc:
            errors.append({"file": str(file), "path": exc.path, "error": str(exc)})
            print(f"{file}: {exc}", file=sys.stderr)
            continue
        for i, proc in enumerate(doc.procedures):
            cls = classify(proc)
            counts[cls.primary.value] = counts.get(cls.primary.value, 0) + 1
            rows.append({"file": str(file), "index": i, "label": proc.label,
                         **cls.to_dict(), "nodes": len(proc.nodes), "edges": len(proc.edges)})
    if args.format == "csv":
        header = ["file", "index", "label", "primary", "is_dag", "has_cycle",
                  "has_isolated_nodes", "is_connected", "nodes", "edges"]
        _emit(_csv([[r[h] for h in header] for r in rows], header), args.out)
    else:
        _emit(_dump_json({"files": len(files), "procedures": rows, "class_counts": counts,
                          "errors": errors}), args.out)
    failed = errors or (args.strict and any(r["primary"] != "DAG" for r in rows))
    return 1 if failed else 0


def cmd_stats(args) -> int:
    if args.bin_width < 1:
        raise UsageError("--bin-width must be >= 1")
    try:
        stats = corpus_stats((p for _, _, p in _load_corpus(args.path)), args.bin_width)
    except EmptyCorpus as exc:
        raise DomainError(str(exc)) from None
    if args.format != "csv":
        _emit(_dump_json(stats.to_dict()), args.out)
        return 0
    tables = {
        "class_counts": _csv(sorted(stats.class_counts.items()), ["key", "count"]),
        "node_histogram": _csv(stats.histogram_rows(), ["key", "count"]),
        "element_frequency": _csv(list(stats.element_frequency.items()), ["key", "count"]),
    }
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        for name, text in tables.items():
            (out / f"{name}.csv").write_text(text, encoding="utf-8")
    else:
        sys.stdout.write("\n".join(f"# {name}\n{text}" for name, text in tables.items()))
    return 0


def _paired_files(gold: Path, pred: Path) -> list[tuple[Path, Path | None]]:
    if gold.is_file():
        return [(gold, pred if pred.is_file() else pred / gold.name)]
    pairs = []
    for g in iter_json_files(gold):
        p = (pred / g.relative_to(gold)) if pred.is_dir() else pred
        pairs.append((g, p if p.is_file() else None))
    return pairs


def _evaluate_dirs(gold: Path, pred: Path, variants: VariantTable, min_similarity: float):
    papers = []
    for g, p in _paired_files(gold, pred):
        try:
            gold_procs = read_document(g).procedures
            pred_procs = read_document(p).procedures if p is not None else ()
        except ProvError as exc:
            raise DomainError(f"{exc}") from None
        if p is None:
            log.warning("no prediction for %s", g.name)
        papers.append(evaluate_paper(gold_procs, pred_procs, variants, g.name, min_similarity))
    try:
        return build_report(papers)
    except EmptyGold as exc:
        raise DomainError(str(exc)) from None


def cmd_eval(args) -> int:
    gold = _existing(args.gold)
    preds = [_existing(p) for p in args.pred]
    variants = VariantTable()
    if args.variants:
        try:
            variants = VariantTable.load(_existing(args.variants))
        except (ValueError, OSError) as exc:
            raise DomainError(str(exc)) from None
    reports = [_evaluate_dirs(gold, p, variants, args.min_similarity) for p in preds]
    fmt = args.report or args.format
    if len(reports) == 1:
        report = reports[0]
        if fmt == "csv":
            _emit(_csv(list(report.metrics().items()), ["metric", "value"]), args.out)
        else:
            _emit(_dump_json(report.to_dict()), args.out)
        return 0

    agg = aggregate_runs(reports)
    if fmt == "csv":
        rows = [(k, m, s) for k, (m, s) in agg.stats.items()]
        _emit(_csv(rows, ["metric", "mean", "stddev"]), args.out)
    else:
        data: dict = {"collection_rate": agg.mean("collection_rate")}
        for level in ("node", "edge", "structural", "parametric"):
            data[level] = {m: agg.mean(f"{level}.{m}") for m in ("precision", "recall", "f1")}
        data["aggregate"] = agg.to_dict()
        data["runs"] = [r.to_dict() for r in reports]
        _emit(_dump_json(data), args.out)
    return 0


def cmd_backbone(args) -> int:
    if args.threshold < 1:
        raise UsageError("--threshold must be >= 1")
    pattern = re.compile(args.label_regex) if args.label_regex else None
    procs = []
    for _, _, proc in _load_corpus(args.path):
        if pattern and not pattern.search(proc.label):
            continue
        if args.element and not set(args.element) <= parse_composition(proc.composition):
            continue
        procs.append(proc)
    matrix = build_cooccurrence(procs)
    try:
        graph = mine_backbone(matrix, args.threshold)
    except EmptyMatrix as exc:
        raise DomainError(str(exc)) from None
    data = {"procedures": matrix.n_procedures, "skipped_cyclic": matrix.skipped,
            **graph.to_dict()}
    if args.out_dot:
        Path(args.out_dot).write_text(backbone_dot(graph), encoding="utf-8")
    _emit(_dump_json(data), args.out_json or args.out)
    return 0


def cmd_export_dot(args) -> int:
    procs = [p for _, _, p in _load_corpus(args.path)]
    if args.index is not None:
        if not 0 <= args.index < len(procs):
            raise UsageError(f"--index {args.index} out of range (0..{len(procs) - 1})")
        procs = [procs[args.index]]
    opts = DotOptions(temporal_arrows=not args.provenance_arrows, color_by_kind=args.color,
                      show_params=not args.no_params)
    _emit("".join(export_dot(p, opts) for p in procs), args.out)
    return 0


def cmd_extract(args) -> int:
    source = _existing(args.input)
    config_path = _existing(args.config)
    try:
        config = PipelineConfig.load(config_path)
    except (ValueError, TypeError) as exc:
        raise DomainError(f"{config_path}: {exc}") from None
    example = None
    if args.example:
        if not config.examples_dir:
            raise UsageError("--example needs 'examples_dir' in the config file")
        try:
            example = load_example(config.examples_dir, args.example)
        except OSError as exc:
            raise UsageError(f"example {args.example}: {exc}") from None
        except ProvError as exc:
            raise DomainError(f"example {args.example}: {exc}") from None

    inputs = sorted(p for p in source.rglob("*") if p.suffix.lower() in (".xml", ".txt")) \
        if source.is_dir() else [source]
    papers, skipped = [], []
    for path in inputs:
        try:
            papers.append(read_paper(path))
        except (NoBody, XmlError) as exc:
            skipped.append({"input": str(path), "reason": str(exc)})
            print(f"{path}: {exc}", file=sys.stderr)

    records = run_many(config.make_backend(), papers, config, example)
    entries = []
    out_dir = Path(args.out) if args.out else None
    if out_dir:
        out_dir.mkdir(parents=True, exist_ok=True)
    for rec in records:
        entry = rec.summary()
        if rec.output is not None:
            if out_dir:
                target = out_dir / filename_for_doi(rec.doi)
                target.write_text(rec.output, encoding="utf-8")
                entry["file"] = target.name
            else:
                entry["document"] = json.loads(rec.output)
        entries.append(entry)
        if rec.status not in (Status.OK, Status.NO_SYNTHESIS):
            print(f"{rec.doi}: {rec.status.value}: {rec.error}", file=sys.stderr)
    sys.stdout.write(_dump_json({"papers": entries, "skipped": skipped}))
    failed = skipped or any(r.status not in (Status.OK, Status.NO_SYNTHESIS) for r in records)
    return 1 if failed else 0


# -- argument parsing ----------------------------------------------------------


def _global_flags(parser: argparse.ArgumentParser, suppress: bool) -> None:
    default = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    parser.add_argument("--out", default=default(None),
                        help="write output to this file (or directory for stats --format csv, "
                             "extract)")
    parser.add_argument("--format", choices=("json", "csv"), default=default("json"))
    parser.add_argument("--quiet", action="store_true", default=default(False),
                        help="only report errors on stderr")
    parser.add_argument("--seed", type=int, default=default(None),
                        help="reserved; no command uses randomness")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="matprov", description="Work with PROV-JSONLD material synthesis procedures.")
    _global_flags(parser, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="parse and classify procedure files")
    p.add_argument("path")
    p.add_argument("--strict", action="store_true", help="exit 1 unless every graph is a DAG")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("stats", parents=[common], help="class counts, node histogram, elements")
    p.add_argument("path")
    p.add_argument("--bin-width", type=int, default=1)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("eval", parents=[common], help="score predictions against gold")
    p.add_argument("--gold", required=True)
    p.add_argument("--pred", required=True, action="append",
                   help="repeat for several runs to get mean and stddev")
    p.add_argument("--variants", help="JSON file mapping gold strings to accepted variants")
    p.add_argument("--report", choices=("json", "csv"))
    p.add_argument("--min-similarity", type=float, default=0.0)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("backbone", parents=[common], help="mine a synthesis backbone")
    p.add_argument("path")
    p.add_argument("--threshold", type=int, default=DEFAULT_THRESHOLD)
    p.add_argument("--out-dot")
    p.add_argument("--out-json")
    p.add_argument("--label-regex", help="only procedures whose label matches")
    p.add_argument("--element", action="append", default=[],
                   help="only procedures whose composition contains this element")
    p.set_defaults(func=cmd_backbone)

    p = sub.add_parser("extract", parents=[common], help="run the two-stage LLM extraction")
    p.add_argument("--input", required=True, help="TEI .xml or .txt file, or a directory")
    p.add_argument("--config", required=True)
    p.add_argument("--example", help="DOI of the one-shot example")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("export-dot", parents=[common], help="render procedures as DOT")
    p.add_argument("path")
    p.add_argument("--index", type=int)
    p.add_argument("--provenance-arrows", action="store_true",
                   help="point edges back to their source as in PROV")
    p.add_argument("--color", action="store_true", help="fill nodes by kind")
    p.add_argument("--no-params", action="store_true")
    p.set_defaults(func=cmd_export_dot)
    return parser


def run_command(argv: Sequence[str]) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv))
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2
    logging.basicConfig(level=logging.ERROR if args.quiet else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"matprov: error: {exc}", file=sys.stderr)
        return 2
    except DomainError as exc:
        print(f"matprov: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # malformed input must not crash the CLI
        print(f"matprov: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
