"""Evaluation harness for the nearest-prototype classifier.

Precision, recall, and F1 are computed per class, one-vs-rest, and the
report carries their unweighted means over classes.  A zero denominator
makes a metric undefined (``None``); undefined values are excluded from
the means rather than coerced to zero.  When rejection is active, or the
corpus itself contains gold non-arguments, the non-argument bucket is
tallied as an additional class alongside the 14 tactics.

The harness also covers the supporting experiments: per-category
accuracy, tactic distributions, subsample sensitivity runs, prototype
parameter sweeps, and rejection-threshold sweeps.  Every run is a pure
function of its inputs and seed.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

from .classifier import Classification, classify_batch
from .prototype import (
    DEFAULT_SEGMENT_COUNT,
    NON_ARGUMENT_NAME,
    PrototypeSet,
    SYNTHETIC,
    TacticId,
    build_prototypes,
    derive_seed,
)
from .treebank import ParseString

# Class label for the merged positive class in binary evaluation.
PERSUASIVE = "persuasive"

DEFAULT_SWEEP_FRACTIONS = (0.02, 0.05, 0.10, 0.20, 0.30, 1.0)
DEFAULT_SWEEP_SEGMENTS = (2, 3, 5, 7, 9)
DEFAULT_SWEEP_THRESHOLDS = tuple(round(0.05 * i, 2) for i in range(11))
DEFAULT_TRIALS = 5


class EmptyEvaluationError(ValueError):
    """Nothing to evaluate."""


class InvalidSampleSizeError(ValueError):
    """A requested subsample size exceeds the corpus (or is < 1)."""


@dataclass(frozen=True)
class LabeledArgument:
    """A parse string with its gold label; gold ``None`` marks a
    non-argument."""

    id: str
    parse: ParseString
    gold: Optional[TacticId]
    source: str = ""


@dataclass(frozen=True)
class ClassMetrics:
    precision: Optional[float]
    recall: Optional[float]
    f1: Optional[float]


@dataclass(frozen=True)
class ConfusionTally:
    """Per-class retrieved/relevant/hit counts plus the full confusion
    table keyed by (gold, predicted)."""

    retrieved: Mapping
    relevant: Mapping
    hits: Mapping
    confusion: Mapping
    total: int


@dataclass(frozen=True)
class MetricsReport:
    per_class: Mapping
    macro_precision: Optional[float]
    macro_recall: Optional[float]
    macro_f1: Optional[float]
    per_category_accuracy: Mapping
    distribution: Mapping
    tally: ConfusionTally
    total: int
    rejected: int
    threshold: Optional[float] = None


def build_tally(golds: Sequence, predictions: Sequence) -> ConfusionTally:
    if len(golds) != len(predictions):
        raise ValueError("golds and predictions differ in length")
    retrieved = {}
    relevant = {}
    hits = {}
    confusion = {}
    for gold, pred in zip(golds, predictions):
        relevant[gold] = relevant.get(gold, 0) + 1
        retrieved[pred] = retrieved.get(pred, 0) + 1
        if gold == pred:
            hits[gold] = hits.get(gold, 0) + 1
        confusion[(gold, pred)] = confusion.get((gold, pred), 0) + 1
    return ConfusionTally(retrieved, relevant, hits, confusion, len(golds))


def tactic_metrics(tally: ConfusionTally, label) -> ClassMetrics:
    """One-vs-rest precision/recall/F1 for one class.  Zero denominators
    yield ``None`` instead of a value."""
    retrieved = tally.retrieved.get(label, 0)
    relevant = tally.relevant.get(label, 0)
    hit = tally.hits.get(label, 0)
    precision = hit / retrieved if retrieved else None
    recall = hit / relevant if relevant else None
    if precision is None or recall is None or precision + recall == 0:
        f1 = None
    else:
        f1 = 2 * precision * recall / (precision + recall)
    return ClassMetrics(precision, recall, f1)


def per_category_accuracy(golds: Sequence, predictions: Sequence) -> dict:
    """Fraction of gold-t arguments classified as t, per tactic.  Tactics
    without gold arguments are omitted."""
    totals = {}
    correct = {}
    for gold, pred in zip(golds, predictions):
        if gold is None:
            continue
        totals[gold] = totals.get(gold, 0) + 1
        if gold == pred:
            correct[gold] = correct.get(gold, 0) + 1
    return {
        t: correct.get(t, 0) / totals[t] for t in TacticId if totals.get(t, 0) > 0
    }


def tactic_distribution(results: Iterable[Classification]) -> dict:
    """Percentage of classified (non-rejected) arguments per predicted
    tactic; only tactics that actually occur appear in the map."""
    counts = {}
    classified = 0
    for result in results:
        if result.decision is None:
            continue
        classified += 1
        counts[result.decision] = counts.get(result.decision, 0) + 1
    if not classified:
        raise EmptyEvaluationError("no classified arguments to tally")
    return {
        t: 100.0 * counts[t] / classified for t in TacticId if counts.get(t, 0) > 0
    }


def _mean(values):
    defined = [v for v in values if v is not None]
    if not defined:
        return None
    return sum(defined) / len(defined)


def evaluate(
    corpus: Sequence[LabeledArgument],
    protos: PrototypeSet,
    threshold: Optional[float] = None,
    include_non_argument: Optional[bool] = None,
    binary: bool = False,
) -> MetricsReport:
    """Classify a labeled corpus and report per-class and macro metrics.

    ``include_non_argument`` controls whether the non-argument bucket
    joins the per-class metrics and the macro means; by default it does
    exactly when rejection is enabled or the corpus carries gold
    non-arguments.  ``binary`` collapses all 14 tactics into one
    "persuasive" class, turning the run into persuasion-vs-not.
    """
    corpus = list(corpus)
    if not corpus:
        raise EmptyEvaluationError("cannot evaluate an empty corpus")
    classifications = classify_batch([a.parse for a in corpus], protos, threshold)
    golds = [a.gold for a in corpus]
    predictions = [c.decision for c in classifications]
    rejected = sum(1 for p in predictions if p is None)
    try:
        distribution = tactic_distribution(classifications)
    except EmptyEvaluationError:
        distribution = {}

    if include_non_argument is None:
        include_non_argument = threshold is not None or any(
            g is None for g in golds
        )
    if binary:
        golds = [None if g is None else PERSUASIVE for g in golds]
        predictions = [None if p is None else PERSUASIVE for p in predictions]
        labels = [PERSUASIVE]
    else:
        labels = list(TacticId)
    if include_non_argument:
        labels = labels + [None]

    tally = build_tally(golds, predictions)
    per_class = {label: tactic_metrics(tally, label) for label in labels}
    accuracy = {
        label: tally.hits.get(label, 0) / tally.relevant[label]
        for label in labels
        if label is not None and tally.relevant.get(label, 0) > 0
    }
    return MetricsReport(
        per_class=per_class,
        macro_precision=_mean([m.precision for m in per_class.values()]),
        macro_recall=_mean([m.recall for m in per_class.values()]),
        macro_f1=_mean([m.f1 for m in per_class.values()]),
        per_category_accuracy=accuracy,
        distribution=distribution,
        tally=tally,
        total=len(corpus),
        rejected=rejected,
        threshold=threshold,
    )


# --- sensitivity, parameter, and threshold experiments ---------------------


@dataclass(frozen=True)
class SensitivityRow:
    size: int
    per_trial: tuple
    mean_precision: Optional[float]
    mean_recall: Optional[float]
    mean_f1: Optional[float]


@dataclass(frozen=True)
class SweepCell:
    fraction: float
    segments: Optional[int]
    per_trial: tuple
    mean_precision: Optional[float]
    mean_recall: Optional[float]
    mean_f1: Optional[float]


@dataclass(frozen=True)
class ThresholdRow:
    threshold: float
    precision: Optional[float]
    recall: Optional[float]
    f1: Optional[float]


def default_sensitivity_sizes(corpus_size: int) -> list[int]:
    return [s for s in (10, 100, 1000) if s < corpus_size] + [corpus_size]


def _triple(report):
    return (report.macro_precision, report.macro_recall, report.macro_f1)


def _row_means(per_trial):
    return (
        _mean([t[0] for t in per_trial]),
        _mean([t[1] for t in per_trial]),
        _mean([t[2] for t in per_trial]),
    )


def sensitivity_run(
    corpus: Sequence[LabeledArgument],
    protos: PrototypeSet,
    sizes: Optional[Sequence[int]] = None,
    trials: int = DEFAULT_TRIALS,
    seed: int = 0,
    threshold: Optional[float] = None,
) -> list[SensitivityRow]:
    """Evaluate random subsamples of each requested size and average the
    macro metrics over ``trials`` draws per size."""
    corpus = list(corpus)
    if not corpus:
        raise EmptyEvaluationError("cannot run sensitivity on an empty corpus")
    if sizes is None:
        sizes = default_sensitivity_sizes(len(corpus))
    rows = []
    for size in sizes:
        if not 1 <= size <= len(corpus):
            raise InvalidSampleSizeError(
                f"sample size {size} not in 1..{len(corpus)}"
            )
        per_trial = []
        for trial in range(trials):
            rng = random.Random(derive_seed(seed, size, trial))
            subsample = rng.sample(corpus, size)
            per_trial.append(_triple(evaluate(subsample, protos, threshold)))
        mean_p, mean_r, mean_f = _row_means(per_trial)
        rows.append(SensitivityRow(size, tuple(per_trial), mean_p, mean_r, mean_f))
    return rows


def parameter_sweep(
    corpus: Sequence[LabeledArgument],
    method: str = SYNTHETIC,
    fractions: Sequence[float] = DEFAULT_SWEEP_FRACTIONS,
    segment_counts: Sequence[int] = DEFAULT_SWEEP_SEGMENTS,
    trials: int = DEFAULT_TRIALS,
    seed: int = 0,
) -> list[SweepCell]:
    """Rebuild prototypes per (fraction, segment count) cell and trial,
    evaluate on the corpus, and average.  Segment counts are irrelevant
    to the median method, which sweeps fractions only."""
    corpus = list(corpus)
    if not corpus:
        raise EmptyEvaluationError("cannot sweep an empty corpus")
    groups = {
        t: [a.parse for a in corpus if a.gold == t] for t in TacticId
    }
    segment_grid = list(segment_counts) if method == SYNTHETIC else [None]
    cells = []
    for fraction in fractions:
        fraction_key = int(round(fraction * 1_000_000))
        for segments in segment_grid:
            per_trial = []
            for trial in range(trials):
                child = derive_seed(seed, fraction_key, segments or 0, trial)
                protos = build_prototypes(
                    groups,
                    method=method,
                    fraction=fraction,
                    segments=segments if segments else DEFAULT_SEGMENT_COUNT,
                    seed=child,
                )
                per_trial.append(_triple(evaluate(corpus, protos)))
            mean_p, mean_r, mean_f = _row_means(per_trial)
            cells.append(
                SweepCell(fraction, segments, tuple(per_trial), mean_p, mean_r, mean_f)
            )
    return cells


def threshold_sweep(
    corpus: Sequence[LabeledArgument],
    protos: PrototypeSet,
    thresholds: Sequence[float] = DEFAULT_SWEEP_THRESHOLDS,
) -> list[ThresholdRow]:
    """Evaluate with rejection at each threshold, in the given order."""
    corpus = list(corpus)
    if not corpus:
        raise EmptyEvaluationError("cannot sweep an empty corpus")
    rows = []
    for threshold in thresholds:
        report = evaluate(corpus, protos, threshold=threshold)
        rows.append(
            ThresholdRow(
                threshold,
                report.macro_precision,
                report.macro_recall,
                report.macro_f1,
            )
        )
    return rows


# --- report formatting ------------------------------------------------------


def label_name(label) -> str:
    if label is None:
        return NON_ARGUMENT_NAME
    if isinstance(label, TacticId):
        return label.canonical_name
    return str(label)


def _label_order(label):
    if isinstance(label, TacticId):
        return (0, int(label))
    if label is None:
        return (2, 0)
    return (1, str(label))


def _fmt(value, width=11):
    if value is None:
        return "-".rjust(width)
    return f"{value:.6f}".rjust(width)


def format_report(report: MetricsReport) -> str:
    """Human-readable text table for a metrics report."""
    name_width = 22
    lines = []
    header = (
        "class".rjust(name_width)
        + "precision".rjust(11)
        + "recall".rjust(11)
        + "f1".rjust(11)
        + "accuracy".rjust(11)
    )
    lines.append(header)
    for label in sorted(report.per_class, key=_label_order):
        metrics = report.per_class[label]
        accuracy = report.per_category_accuracy.get(label)
        lines.append(
            label_name(label).rjust(name_width)
            + _fmt(metrics.precision)
            + _fmt(metrics.recall)
            + _fmt(metrics.f1)
            + _fmt(accuracy)
        )
    lines.append(
        "macro".rjust(name_width)
        + _fmt(report.macro_precision)
        + _fmt(report.macro_recall)
        + _fmt(report.macro_f1)
    )
    lines.append("")
    lines.append("distribution (% of classified arguments):")
    if report.distribution:
        ranked = sorted(
            report.distribution.items(), key=lambda kv: (-kv[1], _label_order(kv[0]))
        )
        for label, pct in ranked:
            lines.append(label_name(label).rjust(name_width) + _fmt(pct))
    else:
        lines.append("  (none classified)")
    lines.append("")
    lines.append(
        f"arguments: {report.total}    rejected: {report.rejected}"
        + (
            f"    threshold: {report.threshold:.6f}"
            if report.threshold is not None
            else ""
        )
    )
    return "\n".join(lines)


def _round6(value):
    return None if value is None else round(value, 6)


def report_to_dict(report: MetricsReport) -> dict:
    """JSON-ready view of a report; all ratios rounded to 6 decimals."""
    labels = sorted(report.per_class, key=_label_order)
    count_labels = sorted(
        set(labels)
        | set(report.tally.retrieved)
        | set(report.tally.relevant)
        | set(report.tally.hits),
        key=_label_order,
    )
    return {
        "total": report.total,
        "rejected": report.rejected,
        "threshold": _round6(report.threshold),
        "macro": {
            "precision": _round6(report.macro_precision),
            "recall": _round6(report.macro_recall),
            "f1": _round6(report.macro_f1),
        },
        "per_class": {
            label_name(label): {
                "precision": _round6(report.per_class[label].precision),
                "recall": _round6(report.per_class[label].recall),
                "f1": _round6(report.per_class[label].f1),
            }
            for label in labels
        },
        "per_category_accuracy": {
            label_name(label): _round6(value)
            for label, value in sorted(
                report.per_category_accuracy.items(), key=lambda kv: _label_order(kv[0])
            )
        },
        "distribution": {
            label_name(label): _round6(value)
            for label, value in sorted(
                report.distribution.items(), key=lambda kv: _label_order(kv[0])
            )
        },
        "counts": {
            "retrieved": {
                label_name(l): report.tally.retrieved.get(l, 0) for l in count_labels
            },
            "relevant": {
                label_name(l): report.tally.relevant.get(l, 0) for l in count_labels
            },
            "hits": {
                label_name(l): report.tally.hits.get(l, 0) for l in count_labels
            },
        },
    }
