"""Command-line front end: build prototypes, classify, evaluate, sweep.

Corpus files are UTF-8 JSON lines, one record per line:

    {"id": "cmv-17", "text": "...", "trees": ["(S ...)", "(S ...)"],
     "gold": "reasoning", "source": "changemyview"}

``trees`` carries one bracketed constituency parse per sentence, produced
by any external parser.  ``gold`` is optional: one of the 14 canonical
tactic names (lowercase snake_case, e.g. ``deontic_moral_appeal``) or
``non-argument``.  Prototype files are JSON with the prototype parse
strings in canonical text form, so externally supplied strings can be
dropped in verbatim.

Exit codes: 0 success, 2 configuration error, 3 input-format error,
4 data error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from typing import Mapping, Optional

from .classifier import (
    DEFAULT_REJECTION_THRESHOLD,
    InvalidThresholdError,
    classify_batch,
)
from .evaluation import (
    EmptyEvaluationError,
    InvalidSampleSizeError,
    LabeledArgument,
    default_sensitivity_sizes,
    evaluate,
    format_report,
    parameter_sweep,
    report_to_dict,
    sensitivity_run,
    threshold_sweep,
    DEFAULT_SWEEP_FRACTIONS,
    DEFAULT_SWEEP_SEGMENTS,
    DEFAULT_SWEEP_THRESHOLDS,
    DEFAULT_TRIALS,
)
from .prototype import (
    DEFAULT_SEGMENT_COUNT,
    DEFAULT_SET_FRACTION,
    DEFAULT_TACTIC_ALIASES,
    EmptyCategoryError,
    InvalidSegmentCountError,
    MEDIAN,
    MissingTacticError,
    NON_ARGUMENT_NAME,
    PrototypeSet,
    SYNTHETIC,
    TacticId,
    UnknownTacticError,
    build_prototypes,
    parse_gold_label,
    tactic_from_name,
)
from .treebank import (
    EmptyInputError,
    MalformedTreeError,
    UnbalancedError,
    argument_parse_string,
    text_to_tokens,
    tokens_to_text,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INPUT = 3
EXIT_DATA = 4


class ConfigError(ValueError):
    pass


class CorpusFormatError(ValueError):
    pass


class DataError(ValueError):
    pass


@dataclass
class CorpusRecord:
    id: str
    trees: list[str]
    text: Optional[str] = None
    gold: Optional[str] = None
    source: Optional[str] = None
    line: int = 0


@dataclass
class RunConfig:
    method: str = MEDIAN
    set_fraction: float = DEFAULT_SET_FRACTION
    segments: int = DEFAULT_SEGMENT_COUNT
    threshold: Optional[float] = None
    seed: int = 0
    aliases: Mapping[str, TacticId] = field(
        default_factory=lambda: dict(DEFAULT_TACTIC_ALIASES)
    )

    def validate(self):
        if self.method not in (MEDIAN, SYNTHETIC):
            raise ConfigError(f"unknown method: {self.method!r}")
        if not 0 < self.set_fraction <= 1:
            raise ConfigError(f"--fraction must be in (0, 1], got {self.set_fraction}")
        if self.segments < 1:
            raise ConfigError(f"--segments must be >= 1, got {self.segments}")
        if self.threshold is not None and not 0 <= self.threshold <= 1:
            raise ConfigError(f"--threshold must be in [0, 1], got {self.threshold}")
        if self.seed < 0:
            raise ConfigError(f"--seed must be non-negative, got {self.seed}")

    @classmethod
    def from_args(cls, ns):
        config = cls(
            method=getattr(ns, "method", MEDIAN),
            set_fraction=getattr(ns, "fraction", DEFAULT_SET_FRACTION),
            segments=getattr(ns, "segments", DEFAULT_SEGMENT_COUNT),
            threshold=getattr(ns, "threshold", None),
            seed=getattr(ns, "seed", 0),
        )
        config.validate()
        return config


def read_corpus(path: str) -> list[CorpusRecord]:
    records = []
    seen = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(f"{path}:{lineno}: invalid JSON: {exc}")
            if not isinstance(obj, dict):
                raise CorpusFormatError(f"{path}:{lineno}: record must be an object")
            rec_id = obj.get("id")
            if not isinstance(rec_id, str) or not rec_id:
                raise CorpusFormatError(f"{path}:{lineno}: missing record id")
            if rec_id in seen:
                raise CorpusFormatError(f"{path}:{lineno}: duplicate id {rec_id!r}")
            seen.add(rec_id)
            trees = obj.get("trees")
            if (
                not isinstance(trees, list)
                or not trees
                or not all(isinstance(t, str) for t in trees)
            ):
                raise CorpusFormatError(
                    f"{path}:{lineno}: 'trees' must be a non-empty list of strings"
                )
            gold = obj.get("gold")
            if gold is not None and not isinstance(gold, str):
                raise CorpusFormatError(f"{path}:{lineno}: 'gold' must be a string")
            records.append(
                CorpusRecord(
                    id=rec_id,
                    trees=list(trees),
                    text=obj.get("text"),
                    gold=gold,
                    source=obj.get("source"),
                    line=lineno,
                )
            )
    return records


def _record_gold(record: CorpusRecord, aliases) -> Optional[TacticId]:
    try:
        return parse_gold_label(record.gold, aliases)
    except UnknownTacticError as exc:
        raise CorpusFormatError(f"record {record.id!r} (line {record.line}): {exc}")


def _record_parse(record: CorpusRecord):
    try:
        return argument_parse_string(record.trees)
    except (MalformedTreeError, EmptyInputError) as exc:
        raise CorpusFormatError(f"record {record.id!r} (line {record.line}): {exc}")


def write_prototype_file(path: str, protos: PrototypeSet):
    payload = {
        "method": protos.method,
        "set_fraction": protos.set_fraction,
        "segments": protos.segment_count,
        "seed": protos.seed,
        "prototypes": {
            t.canonical_name: tokens_to_text(protos.prototypes[t]) for t in TacticId
        },
        "source_counts": {
            t.canonical_name: protos.source_counts.get(t, 0) for t in TacticId
        },
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def read_prototype_file(path: str) -> PrototypeSet:
    with open(path, encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise CorpusFormatError(f"{path}: invalid JSON: {exc}")
    table = obj.get("prototypes")
    if not isinstance(table, dict):
        raise CorpusFormatError(f"{path}: missing 'prototypes' object")
    prototypes = {}
    for name, text in table.items():
        try:
            tactic = tactic_from_name(name)
            prototypes[tactic] = text_to_tokens(text)
        except (UnknownTacticError, MalformedTreeError) as exc:
            raise CorpusFormatError(f"{path}: prototype {name!r}: {exc}")
    counts = {}
    for name, count in (obj.get("source_counts") or {}).items():
        try:
            counts[tactic_from_name(name)] = int(count)
        except (UnknownTacticError, TypeError, ValueError) as exc:
            raise CorpusFormatError(f"{path}: source count {name!r}: {exc}")
    try:
        return PrototypeSet(
            prototypes=prototypes,
            method=obj.get("method", MEDIAN),
            set_fraction=obj.get("set_fraction", 1.0),
            segment_count=obj.get("segments"),
            seed=obj.get("seed", 0),
            source_counts=counts,
        )
    except ValueError as exc:
        raise CorpusFormatError(f"{path}: {exc}")


def _round6(value):
    return None if value is None else round(float(value), 6)


def _labeled_corpus(records, aliases) -> list[LabeledArgument]:
    labeled = []
    for record in records:
        if record.gold is None:
            raise DataError(f"record {record.id!r} has no gold label")
        labeled.append(
            LabeledArgument(
                id=record.id,
                parse=_record_parse(record),
                gold=_record_gold(record, aliases),
                source=record.source or "",
            )
        )
    return labeled


def cmd_build(ns) -> int:
    config = RunConfig.from_args(ns)
    records = read_corpus(ns.corpus)
    groups = {}
    for record in records:
        if record.gold is None:
            continue
        gold = _record_gold(record, config.aliases)
        if gold is None:  # non-arguments contribute no prototype
            continue
        groups.setdefault(gold, []).append(_record_parse(record))
    protos = build_prototypes(
        groups,
        method=config.method,
        fraction=config.set_fraction,
        segments=config.segments,
        seed=config.seed,
    )
    write_prototype_file(ns.out, protos)
    print(f"wrote {len(protos.prototypes)} prototypes to {ns.out}")
    return EXIT_OK


def cmd_classify(ns) -> int:
    config = RunConfig.from_args(ns)
    protos = read_prototype_file(ns.prototypes)
    records = read_corpus(ns.input)
    parses = []
    errors = {}
    for index, record in enumerate(records):
        try:
            parses.append(argument_parse_string(record.trees))
        except (MalformedTreeError, EmptyInputError) as exc:
            errors[index] = str(exc)
            parses.append(None)
    good = [p for p in parses if p is not None]
    classified = iter(classify_batch(good, protos, config.threshold))
    with open(ns.out, "w", encoding="utf-8") as fh:
        for index, record in enumerate(records):
            if index in errors:
                row = {"id": record.id, "error": errors[index]}
            else:
                result = next(classified)
                row = {
                    "id": record.id,
                    "decision": (
                        NON_ARGUMENT_NAME
                        if result.decision is None
                        else result.decision.canonical_name
                    ),
                    "best_similarity": _round6(result.best_similarity),
                    "distances": {
                        t.canonical_name: _round6(result.distances[t])
                        for t in TacticId
                    },
                }
            fh.write(json.dumps(row) + "\n")
    if errors:
        for index in sorted(errors):
            print(
                f"error: record {records[index].id!r}: {errors[index]}",
                file=sys.stderr,
            )
        return EXIT_INPUT
    return EXIT_OK


def cmd_evaluate(ns) -> int:
    config = RunConfig.from_args(ns)
    protos = read_prototype_file(ns.prototypes)
    records = read_corpus(ns.corpus)
    if not records:
        raise DataError(f"{ns.corpus}: corpus is empty")
    labeled = _labeled_corpus(records, config.aliases)
    report = evaluate(labeled, protos, threshold=config.threshold)
    print(format_report(report))
    if ns.out:
        with open(ns.out, "w", encoding="utf-8") as fh:
            json.dump(report_to_dict(report), fh, indent=2)
            fh.write("\n")
    return EXIT_OK


def _fmt_cell(value):
    return "-" if value is None else f"{value:.6f}"


def _trial_f1s(per_trial):
    return ",".join(_fmt_cell(triple[2]) for triple in per_trial)


def cmd_sweep(ns) -> int:
    config = RunConfig.from_args(ns)
    records = read_corpus(ns.corpus)
    if not records:
        raise DataError(f"{ns.corpus}: corpus is empty")
    labeled = _labeled_corpus(records, config.aliases)

    lines = []
    if ns.kind == "params":
        fractions = ns.fractions or list(DEFAULT_SWEEP_FRACTIONS)
        segment_counts = ns.segment_counts or list(DEFAULT_SWEEP_SEGMENTS)
        cells = parameter_sweep(
            labeled,
            method=config.method,
            fractions=fractions,
            segment_counts=segment_counts,
            trials=ns.trials,
            seed=config.seed,
        )
        lines.append(
            "fraction\tsegments\ttrials\tmean_precision\tmean_recall\tmean_f1\ttrial_f1s"
        )
        for cell in cells:
            segments = "-" if cell.segments is None else str(cell.segments)
            lines.append(
                f"{cell.fraction:.6f}\t{segments}\t{ns.trials}\t"
                f"{_fmt_cell(cell.mean_precision)}\t{_fmt_cell(cell.mean_recall)}\t"
                f"{_fmt_cell(cell.mean_f1)}\t{_trial_f1s(cell.per_trial)}"
            )
    else:
        if ns.prototypes:
            protos = read_prototype_file(ns.prototypes)
        else:
            groups = {}
            for arg in labeled:
                if arg.gold is not None:
                    groups.setdefault(arg.gold, []).append(arg.parse)
            protos = build_prototypes(
                groups,
                method=config.method,
                fraction=config.set_fraction,
                segments=config.segments,
                seed=config.seed,
            )
        if ns.kind == "sensitivity":
            sizes = ns.sizes or default_sensitivity_sizes(len(labeled))
            rows = sensitivity_run(
                labeled,
                protos,
                sizes=sizes,
                trials=ns.trials,
                seed=config.seed,
                threshold=config.threshold,
            )
            lines.append(
                "size\ttrials\tmean_precision\tmean_recall\tmean_f1\ttrial_f1s"
            )
            for row in rows:
                lines.append(
                    f"{row.size}\t{ns.trials}\t{_fmt_cell(row.mean_precision)}\t"
                    f"{_fmt_cell(row.mean_recall)}\t{_fmt_cell(row.mean_f1)}\t"
                    f"{_trial_f1s(row.per_trial)}"
                )
        else:  # threshold
            thresholds = (
                ns.thresholds if ns.thresholds else list(DEFAULT_SWEEP_THRESHOLDS)
            )
            rows = threshold_sweep(labeled, protos, thresholds)
            lines.append("threshold\tprecision\trecall\tf1")
            for row in rows:
                lines.append(
                    f"{row.threshold:.6f}\t{_fmt_cell(row.precision)}\t"
                    f"{_fmt_cell(row.recall)}\t{_fmt_cell(row.f1)}"
                )
    with open(ns.out, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
    print(f"wrote {len(lines) - 1} rows to {ns.out}")
    return EXIT_OK


def _int_list(text):
    return [int(part) for part in text.split(",") if part.strip()]


def _float_list(text):
    return [float(part) for part in text.split(",") if part.strip()]


def _add_config_flags(parser, threshold=True):
    parser.add_argument(
        "--method",
        choices=(MEDIAN, SYNTHETIC),
        default=MEDIAN,
        help="prototype construction method",
    )
    parser.add_argument(
        "--fraction",
        type=float,
        default=DEFAULT_SET_FRACTION,
        help="fraction of each category sampled for prototype building",
    )
    parser.add_argument(
        "--segments",
        type=int,
        default=DEFAULT_SEGMENT_COUNT,
        help="segment count for the synthetic method",
    )
    parser.add_argument("--seed", type=int, default=0, help="sampling seed")
    if threshold:
        parser.add_argument(
            "--threshold",
            type=float,
            nargs="?",
            const=DEFAULT_REJECTION_THRESHOLD,
            default=None,
            help=(
                "enable non-argument rejection; bare flag uses "
                f"{DEFAULT_REJECTION_THRESHOLD}"
            ),
        )


def build_arg_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="persuasion-tactics",
        description=(
            "Classify arguments into persuasion tactics from the structure "
            "of their constituency parses."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    build = sub.add_parser("build", help="build prototype strings from a labeled corpus")
    build.add_argument("corpus", help="JSONL corpus with gold tactic labels")
    build.add_argument("--out", required=True, help="prototype file to write")
    _add_config_flags(build, threshold=False)
    build.set_defaults(func=cmd_build)

    classify = sub.add_parser("classify", help="classify arguments against prototypes")
    classify.add_argument("input", help="JSONL corpus to classify")
    classify.add_argument("prototypes", help="prototype file")
    classify.add_argument("--out", required=True, help="JSONL results file to write")
    _add_config_flags(classify)
    classify.set_defaults(func=cmd_classify)

    evaluate_p = sub.add_parser("evaluate", help="score classifications against gold labels")
    evaluate_p.add_argument("corpus", help="JSONL corpus with gold labels")
    evaluate_p.add_argument("prototypes", help="prototype file")
    evaluate_p.add_argument("--out", default=None, help="JSON report file to write")
    _add_config_flags(evaluate_p)
    evaluate_p.set_defaults(func=cmd_evaluate)

    sweep = sub.add_parser("sweep", help="parameter, sensitivity, or threshold sweeps")
    sweep.add_argument("corpus", help="JSONL corpus with gold labels")
    sweep.add_argument(
        "--kind", choices=("params", "sensitivity", "threshold"), required=True
    )
    sweep.add_argument("--out", required=True, help="TSV data file to write")
    sweep.add_argument(
        "--prototypes",
        default=None,
        help="prototype file (sensitivity/threshold; built from the corpus if absent)",
    )
    sweep.add_argument("--sizes", type=_int_list, default=None, help="e.g. 10,100,1000")
    sweep.add_argument("--trials", type=int, default=DEFAULT_TRIALS)
    sweep.add_argument(
        "--thresholds", type=_float_list, default=None, help="e.g. 0,0.05,0.1"
    )
    sweep.add_argument(
        "--fractions", type=_float_list, default=None, help="params grid fractions"
    )
    sweep.add_argument(
        "--segment-counts",
        dest="segment_counts",
        type=_int_list,
        default=None,
        help="params grid segment counts",
    )
    _add_config_flags(sweep)
    sweep.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_arg_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on usage errors
        return int(exc.code or 0)
    try:
        return ns.func(ns)
    except (ConfigError, InvalidThresholdError, InvalidSegmentCountError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (
        CorpusFormatError,
        MalformedTreeError,
        EmptyInputError,
        UnbalancedError,
        UnknownTacticError,
        OSError,
    ) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (
        DataError,
        MissingTacticError,
        EmptyCategoryError,
        EmptyEvaluationError,
        InvalidSampleSizeError,
    ) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
