"""Nearest-prototype classification of parse strings.

An argument is assigned the tactic whose prototype has the smallest
length-normalized edit distance to the argument's parse string.  Ties go
to the tactic earliest in the canonical order.  With a rejection
threshold, an argument whose similarity to every prototype falls strictly
below the threshold is classified as a non-argument (decision ``None``).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

import numpy as np

from .editdist import normalized_matrix
from .prototype import PrototypeSet, TacticId
from .treebank import ParseString

DEFAULT_REJECTION_THRESHOLD = 0.1


class InvalidThresholdError(ValueError):
    """Rejection threshold must lie in [0, 1]."""


@dataclass(frozen=True)
class Classification:
    decision: Optional[TacticId]  # None means non-argument
    distances: Mapping[TacticId, float]
    best_similarity: float

    @property
    def is_non_argument(self) -> bool:
        return self.decision is None


def _check_threshold(threshold):
    if threshold is not None and not 0 <= threshold <= 1:
        raise InvalidThresholdError(
            f"threshold must be in [0, 1], got {threshold!r}"
        )


def classify_batch(
    args: Sequence[ParseString],
    protos: PrototypeSet,
    threshold: Optional[float] = None,
) -> list[Classification]:
    """Classify many arguments at once.

    Results are order-preserving and independent of how a batch is split;
    classifying item by item gives the same answers.
    """
    _check_threshold(threshold)
    order = list(TacticId)
    sequences = []
    for index, arg in enumerate(args):
        try:
            sequences.append(tuple(arg))
        except TypeError as exc:
            raise ValueError(f"argument {index} is not a token sequence") from exc
    if not sequences:
        return []
    proto_rows = [tuple(protos.prototypes[t]) for t in order]
    matrix = normalized_matrix(sequences, proto_rows)
    results = []
    for row in matrix:
        best = int(np.argmin(row))  # first minimum = earliest tactic
        best_similarity = 1.0 - float(row[best])
        decision = order[best]
        if threshold is not None and best_similarity < threshold:
            decision = None
        distances = {t: float(row[k]) for k, t in enumerate(order)}
        results.append(Classification(decision, distances, best_similarity))
    return results


def classify(arg: ParseString, protos: PrototypeSet) -> Classification:
    """Nearest-prototype decision for a single argument."""
    return classify_batch([arg], protos)[0]


def classify_with_rejection(
    arg: ParseString,
    protos: PrototypeSet,
    threshold: float = DEFAULT_REJECTION_THRESHOLD,
) -> Classification:
    """Like `classify`, but decides non-argument when every prototype
    similarity is strictly below ``threshold``."""
    return classify_batch([arg], protos, threshold=threshold)[0]
