import random

import pytest

from persuasion_tactics import (
    EmptyEvaluationError,
    InvalidSampleSizeError,
    LabeledArgument,
    MEDIAN,
    SYNTHETIC,
    TacticId,
    build_tally,
    classify_batch,
    evaluate,
    normalized_distance,
    parameter_sweep,
    per_category_accuracy,
    sensitivity_run,
    tactic_distribution,
    tactic_metrics,
    threshold_sweep,
)
from persuasion_tactics.evaluation import PERSUASIVE, format_report, report_to_dict

from helpers import make_base_prototypes, make_prototype_set, perturb

ALIEN = ("(Q999",) * 64  # disjoint alphabet: similarity 0 to every prototype


@pytest.fixture(scope="module")
def bases():
    return make_base_prototypes(seed=202, min_tokens=30, max_tokens=70)


@pytest.fixture(scope="module")
def protos(bases):
    return make_prototype_set(bases)


def perturbed_corpus(bases, copies=5, rate=0.05, seed=0, source="synthetic"):
    rng = random.Random(seed)
    corpus = []
    for tactic, base in zip(TacticId, bases):
        for copy in range(copies):
            corpus.append(
                LabeledArgument(
                    id=f"{tactic.canonical_name}-{copy}",
                    parse=perturb(base, rng, rate),
                    gold=tactic,
                    source=source,
                )
            )
    return corpus


class TestTacticMetrics:
    def test_worked_example(self):
        tally = build_tally(
            ["t"] * 8 + ["other"] * 4,
            ["t"] * 6 + ["other"] * 2 + ["t"] * 4,
        )
        metrics = tactic_metrics(tally, "t")
        assert metrics.precision == pytest.approx(0.6, abs=1e-12)
        assert metrics.recall == pytest.approx(0.75, abs=1e-12)
        assert metrics.f1 == pytest.approx(2 * 0.6 * 0.75 / 1.35, abs=1e-12)

    def test_perfect_class(self):
        tally = build_tally(["t", "t"], ["t", "t"])
        metrics = tactic_metrics(tally, "t")
        assert (metrics.precision, metrics.recall, metrics.f1) == (1.0, 1.0, 1.0)

    def test_zero_denominators_undefined(self):
        tally = build_tally(["t"], ["other"])
        metrics = tactic_metrics(tally, "t")
        assert metrics.precision is None  # nothing retrieved
        assert metrics.recall == 0.0
        assert metrics.f1 is None
        other = tactic_metrics(tally, "missing")
        assert other.precision is None and other.recall is None and other.f1 is None

    def test_zero_precision_and_recall_leave_f1_undefined(self):
        tally = build_tally(["t", "x"], ["x", "t"])
        metrics = tactic_metrics(tally, "t")
        assert metrics.precision == 0.0 and metrics.recall == 0.0
        assert metrics.f1 is None

    def test_randomized_fixtures_match_formulas(self):
        rng = random.Random(50)
        for _ in range(50):
            relevant = rng.randint(0, 30)
            retrieved = rng.randint(0, 30)
            hits = rng.randint(0, min(relevant, retrieved))
            golds = ["t"] * relevant + ["x"] * max(retrieved - hits, 0)
            preds = (
                ["t"] * hits
                + ["x"] * (relevant - hits)
                + ["t"] * max(retrieved - hits, 0)
            )
            tally = build_tally(golds, preds)
            assert tally.retrieved.get("t", 0) == retrieved
            assert tally.relevant.get("t", 0) == relevant
            assert tally.hits.get("t", 0) == hits
            metrics = tactic_metrics(tally, "t")
            expected_p = hits / retrieved if retrieved else None
            expected_r = hits / relevant if relevant else None
            assert metrics.precision == expected_p
            assert metrics.recall == expected_r
            if expected_p is None or expected_r is None or expected_p + expected_r == 0:
                assert metrics.f1 is None
            else:
                expected_f = 2 * expected_p * expected_r / (expected_p + expected_r)
                assert metrics.f1 == pytest.approx(expected_f, abs=1e-12)
                assert min(expected_p, expected_r) - 1e-12 <= metrics.f1
                assert metrics.f1 <= max(expected_p, expected_r) + 1e-12


class TestTallyInvariants:
    def test_conservation(self, bases, protos):
        corpus = perturbed_corpus(bases, copies=3)
        corpus += [
            LabeledArgument(f"non-{i}", ALIEN, None, "plain") for i in range(4)
        ]
        report = evaluate(corpus, protos, threshold=0.1)
        tally = report.tally
        assert sum(tally.relevant.values()) == len(corpus)
        assert sum(tally.retrieved.values()) == len(corpus)
        tactic_relevant = sum(tally.relevant.get(t, 0) for t in TacticId)
        assert tactic_relevant + tally.relevant.get(None, 0) == len(corpus)
        assert sum(tally.confusion.values()) == len(corpus)
        for label, hit in tally.hits.items():
            assert hit <= min(tally.retrieved.get(label, 0), tally.relevant.get(label, 0))


class TestPerCategoryAccuracy:
    def test_all_correct(self):
        golds = [TacticId.REASONING, TacticId.SCARCITY]
        assert per_category_accuracy(golds, golds) == {
            TacticId.REASONING: 1.0,
            TacticId.SCARCITY: 1.0,
        }

    def test_single_miss_is_zero(self):
        got = per_category_accuracy([TacticId.SCARCITY], [TacticId.REASONING])
        assert got == {TacticId.SCARCITY: 0.0}

    def test_absent_tactics_omitted(self):
        got = per_category_accuracy([TacticId.VIP, TacticId.VIP], [TacticId.VIP] * 2)
        assert set(got) == {TacticId.VIP}

    def test_non_argument_gold_skipped(self):
        got = per_category_accuracy([None, TacticId.VIP], [None, TacticId.VIP])
        assert set(got) == {TacticId.VIP}


class TestTacticDistribution:
    def test_single_class(self, protos):
        results = classify_batch([protos.prototypes[TacticId.REASONING]] * 3, protos)
        assert tactic_distribution(results) == {TacticId.REASONING: 100.0}

    def test_even_split(self, protos):
        results = classify_batch(
            [protos.prototypes[TacticId.OUTCOME], protos.prototypes[TacticId.EMPATHY]],
            protos,
        )
        assert tactic_distribution(results) == {
            TacticId.OUTCOME: 50.0,
            TacticId.EMPATHY: 50.0,
        }

    def test_percentages_sum_to_hundred(self, bases, protos):
        corpus = perturbed_corpus(bases, copies=4, seed=3)
        results = classify_batch([a.parse for a in corpus], protos)
        assert sum(tactic_distribution(results).values()) == pytest.approx(100.0, abs=0.01)

    def test_rejected_items_excluded(self, protos):
        results = classify_batch(
            [ALIEN, protos.prototypes[TacticId.VIP]], protos, threshold=0.5
        )
        assert tactic_distribution(results) == {TacticId.VIP: 100.0}

    def test_empty_rejected(self, protos):
        with pytest.raises(EmptyEvaluationError):
            tactic_distribution([])
        with pytest.raises(EmptyEvaluationError):
            tactic_distribution(classify_batch([ALIEN], protos, threshold=0.99))


def oracle_evaluate(corpus, protos, threshold=None):
    """Independent reclassification and tallying: scalar distances, explicit
    argmin with the canonical tie order, and direct formula evaluation."""
    order = list(TacticId)
    predictions = []
    for arg in corpus:
        distances = [normalized_distance(arg.parse, protos.prototypes[t]) for t in order]
        best = min(range(len(order)), key=lambda i: (distances[i], i))
        if threshold is not None and (1.0 - distances[best]) < threshold:
            predictions.append(None)
        else:
            predictions.append(order[best])
    labels = list(order)
    if threshold is not None or any(a.gold is None for a in corpus):
        labels.append(None)
    per_class = {}
    for label in labels:
        retrieved = sum(1 for p in predictions if p == label)
        relevant = sum(1 for a in corpus if a.gold == label)
        hits = sum(1 for a, p in zip(corpus, predictions) if a.gold == p == label)
        precision = hits / retrieved if retrieved else None
        recall = hits / relevant if relevant else None
        if precision is None or recall is None or precision + recall == 0:
            f1 = None
        else:
            f1 = 2 * precision * recall / (precision + recall)
        per_class[label] = (precision, recall, f1)

    def mean(index):
        defined = [m[index] for m in per_class.values() if m[index] is not None]
        return sum(defined) / len(defined) if defined else None

    return predictions, per_class, (mean(0), mean(1), mean(2))


class TestEvaluate:
    def test_prototypes_as_corpus_scores_perfectly(self, protos):
        corpus = [
            LabeledArgument(t.canonical_name, protos.prototypes[t], t)
            for t in TacticId
        ]
        report = evaluate(corpus, protos)
        assert report.macro_precision == 1.0
        assert report.macro_recall == 1.0
        assert report.macro_f1 == 1.0
        assert report.per_category_accuracy == {t: 1.0 for t in TacticId}
        assert report.rejected == 0
        assert set(report.per_class) == set(TacticId)

    def test_matches_reclassification_oracle(self, bases, protos):
        corpus = perturbed_corpus(bases, copies=4, rate=0.3, seed=8)
        corpus += [LabeledArgument(f"n{i}", ALIEN, None) for i in range(3)]
        for threshold in (None, 0.1, 0.6):
            report = evaluate(corpus, protos, threshold=threshold)
            predictions, per_class, macros = oracle_evaluate(corpus, protos, threshold)
            got_predictions = [
                c.decision
                for c in classify_batch([a.parse for a in corpus], protos, threshold)
            ]
            assert got_predictions == predictions
            assert set(report.per_class) == set(per_class)
            for label, (p, r, f) in per_class.items():
                metrics = report.per_class[label]
                for got, want in ((metrics.precision, p), (metrics.recall, r), (metrics.f1, f)):
                    if want is None:
                        assert got is None
                    else:
                        assert got == pytest.approx(want, abs=1e-12)
            for got, want in zip(
                (report.macro_precision, report.macro_recall, report.macro_f1), macros
            ):
                assert got == pytest.approx(want, abs=1e-12)

    def test_corpus_order_invariance(self, bases, protos):
        corpus = perturbed_corpus(bases, copies=3, seed=4)
        shuffled = corpus[:]
        random.Random(0).shuffle(shuffled)
        first = evaluate(corpus, protos)
        second = evaluate(shuffled, protos)
        assert first.macro_f1 == second.macro_f1
        assert first.per_class == second.per_class
        assert first.distribution == second.distribution

    def test_threshold_zero_equals_no_rejection(self, bases, protos):
        corpus = perturbed_corpus(bases, copies=2, seed=5)
        corpus += [LabeledArgument("n0", ALIEN, None)]
        with_zero = evaluate(corpus, protos, threshold=0.0)
        without = evaluate(corpus, protos)
        assert with_zero.per_class == without.per_class
        assert with_zero.macro_f1 == without.macro_f1
        assert with_zero.rejected == without.rejected == 0

    def test_non_argument_bucket_only_when_relevant(self, bases, protos):
        tactic_only = perturbed_corpus(bases, copies=2, seed=6)
        assert None not in evaluate(tactic_only, protos).per_class
        assert None in evaluate(tactic_only, protos, threshold=0.1).per_class
        with_non_args = tactic_only + [LabeledArgument("n0", ALIEN, None)]
        assert None in evaluate(with_non_args, protos).per_class
        excluded = evaluate(with_non_args, protos, include_non_argument=False)
        assert None not in excluded.per_class

    def test_rejection_counts_rejected(self, bases, protos):
        corpus = perturbed_corpus(bases, copies=2, seed=7)
        corpus += [LabeledArgument(f"n{i}", ALIEN, None) for i in range(5)]
        report = evaluate(corpus, protos, threshold=0.1)
        assert report.rejected == 5
        non_arg = report.per_class[None]
        assert non_arg.precision == 1.0 and non_arg.recall == 1.0

    def test_binary_configuration(self, bases, protos):
        corpus = perturbed_corpus(bases, copies=2, seed=9)
        corpus += [LabeledArgument(f"n{i}", ALIEN, None) for i in range(4)]
        report = evaluate(corpus, protos, threshold=0.1, binary=True)
        assert set(report.per_class) == {PERSUASIVE, None}
        persuasive = report.per_class[PERSUASIVE]
        assert persuasive.precision == 1.0 and persuasive.recall == 1.0
        assert report.macro_f1 == 1.0

    def test_empty_corpus_rejected(self, protos):
        with pytest.raises(EmptyEvaluationError):
            evaluate([], protos)


class TestSensitivityRun:
    def test_full_size_trials_identical(self, bases, protos):
        corpus = perturbed_corpus(bases, copies=3, seed=11)
        rows = sensitivity_run(corpus, protos, sizes=[len(corpus)], trials=3, seed=1)
        (row,) = rows
        baseline = evaluate(corpus, protos)
        for triple in row.per_trial:
            assert triple == (
                baseline.macro_precision,
                baseline.macro_recall,
                baseline.macro_f1,
            )
        assert row.mean_f1 == pytest.approx(baseline.macro_f1, abs=1e-12)

    def test_deterministic(self, bases, protos):
        corpus = perturbed_corpus(bases, copies=3, seed=12)
        first = sensitivity_run(corpus, protos, sizes=[5, 20], trials=4, seed=7)
        second = sensitivity_run(corpus, protos, sizes=[5, 20], trials=4, seed=7)
        assert first == second

    def test_trial_prefix_stable_when_trials_grow(self, bases, protos):
        corpus = perturbed_corpus(bases, copies=3, seed=13)
        short = sensitivity_run(corpus, protos, sizes=[10], trials=2, seed=3)
        long = sensitivity_run(corpus, protos, sizes=[10], trials=5, seed=3)
        assert long[0].per_trial[:2] == short[0].per_trial

    def test_oversized_sample_rejected(self, bases, protos):
        corpus = perturbed_corpus(bases, copies=2, seed=14)
        with pytest.raises(InvalidSampleSizeError):
            sensitivity_run(corpus, protos, sizes=[len(corpus) + 1])
        with pytest.raises(InvalidSampleSizeError):
            sensitivity_run(corpus, protos, sizes=[0])


class TestParameterSweep:
    def test_median_full_fraction_trials_identical(self, bases):
        corpus = perturbed_corpus(bases, copies=4, seed=15)
        cells = parameter_sweep(
            corpus, method=MEDIAN, fractions=[1.0], segment_counts=[2], trials=5, seed=0
        )
        (cell,) = cells
        assert cell.segments is None
        assert len(set(cell.per_trial)) == 1

    def test_default_grid_shape(self, bases):
        corpus = perturbed_corpus(bases, copies=3, seed=16)
        cells = parameter_sweep(corpus, method=SYNTHETIC, trials=1, seed=0)
        assert len(cells) == 30
        assert [(c.fraction, c.segments) for c in cells[:5]] == [
            (0.02, 2),
            (0.02, 3),
            (0.02, 5),
            (0.02, 7),
            (0.02, 9),
        ]

    def test_median_sweeps_fractions_only(self, bases):
        corpus = perturbed_corpus(bases, copies=3, seed=17)
        cells = parameter_sweep(
            corpus, method=MEDIAN, fractions=[0.5, 1.0], trials=2, seed=0
        )
        assert [(c.fraction, c.segments) for c in cells] == [(0.5, None), (1.0, None)]

    def test_deterministic(self, bases):
        corpus = perturbed_corpus(bases, copies=3, seed=18)
        kwargs = dict(
            method=SYNTHETIC, fractions=[0.5], segment_counts=[3], trials=3, seed=9
        )
        assert parameter_sweep(corpus, **kwargs) == parameter_sweep(corpus, **kwargs)

    def test_full_fraction_is_best_on_noisy_corpus(self):
        # with enough label noise, small samples give worse prototypes, so
        # the mean F1 should peak at the full set within trial variance
        noisy_bases = make_base_prototypes(
            seed=90, min_tokens=40, max_tokens=90, min_sep=0.5
        )
        rng = random.Random(91)
        corpus = [
            LabeledArgument(f"{t.canonical_name}-{i}", perturb(b, rng, 0.45), t)
            for t, b in zip(TacticId, noisy_bases)
            for i in range(12)
        ]
        cells = parameter_sweep(
            corpus, method=MEDIAN, fractions=[0.05, 0.1, 0.3, 1.0], trials=3, seed=5
        )
        by_fraction = {c.fraction: c for c in cells}
        spread = max(
            max(t[2] for t in c.per_trial) - min(t[2] for t in c.per_trial)
            for c in cells
        )
        best = max(c.mean_f1 for c in cells)
        assert by_fraction[1.0].mean_f1 >= best - spread
        assert by_fraction[1.0].mean_f1 > by_fraction[0.05].mean_f1


class TestThresholdSweep:
    def test_rows_follow_input_order(self, bases, protos):
        corpus = perturbed_corpus(bases, copies=2, seed=19)
        corpus += [LabeledArgument("n0", ALIEN, None)]
        thresholds = [0.0, 0.1, 0.3]
        rows = threshold_sweep(corpus, protos, thresholds)
        assert [row.threshold for row in rows] == thresholds

    def test_zero_threshold_row_matches_plain_evaluation(self, bases, protos):
        corpus = perturbed_corpus(bases, copies=2, seed=20)
        corpus += [LabeledArgument("n0", ALIEN, None)]
        row = threshold_sweep(corpus, protos, [0.0])[0]
        baseline = evaluate(corpus, protos)
        assert row.f1 == baseline.macro_f1
        assert row.precision == baseline.macro_precision
        assert row.recall == baseline.macro_recall


class TestReportRendering:
    def test_format_and_dict_round_trip(self, bases, protos):
        corpus = perturbed_corpus(bases, copies=2, seed=21)
        corpus += [LabeledArgument("n0", ALIEN, None)]
        report = evaluate(corpus, protos, threshold=0.1)
        text = format_report(report)
        assert "macro" in text and "non-argument" in text
        payload = report_to_dict(report)
        assert payload["total"] == len(corpus)
        assert payload["rejected"] == report.rejected
        assert set(payload["per_class"]) == {
            t.canonical_name for t in TacticId
        } | {"non-argument"}
        assert abs(sum(payload["distribution"].values()) - 100.0) < 0.01
