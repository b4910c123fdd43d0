"""Per-tactic prototype parse strings.

Each of the 14 persuasion tactics gets one representative parse string,
either the set median of a sampled category (``median`` method) or a
segment-wise synthesis (``synthetic`` method): strings are chopped into
``k`` uniform segments and the median of each segment position is taken,
so the synthesized prototype can mix segments from different arguments.
Synthesized prototypes need not be balanced token sequences; distances
are defined on arbitrary sequences, so that is harmless.
"""

from __future__ import annotations

import math
import random
import warnings
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Mapping, Optional, Sequence

from .editdist import distance_matrix
from .treebank import ParseString, tokens_to_text


class TacticId(IntEnum):
    """The 14 fine-grained persuasion tactics, in canonical order.

    The integer values fix the deterministic tie-breaking order used by
    the classifier.
    """

    OUTCOME = 0
    SOCIAL_ESTEEM = 1
    THREAT_PROMISE = 2
    SELF_FEELING = 3
    GOOD_BAD_TRAITS = 4
    DEONTIC_MORAL_APPEAL = 5
    VIP = 6
    POPULARITY = 7
    FAVORS_DEBTS = 8
    CONSISTENCY = 9
    EMPATHY = 10
    SCARCITY = 11
    RECHARACTERIZATION = 12
    REASONING = 13

    @property
    def canonical_name(self) -> str:
        return self.name.lower()


DISPLAY_NAMES = {
    TacticId.OUTCOME: "Outcome",
    TacticId.SOCIAL_ESTEEM: "Social Esteem",
    TacticId.THREAT_PROMISE: "Threat/Promise",
    TacticId.SELF_FEELING: "Self-Feeling",
    TacticId.GOOD_BAD_TRAITS: "Good/Bad Traits",
    TacticId.DEONTIC_MORAL_APPEAL: "Deontic/Moral Appeal",
    TacticId.VIP: "VIP",
    TacticId.POPULARITY: "Popularity",
    TacticId.FAVORS_DEBTS: "Favors/Debts",
    TacticId.CONSISTENCY: "Consistency",
    TacticId.EMPATHY: "Empathy",
    TacticId.SCARCITY: "Scarcity",
    TacticId.RECHARACTERIZATION: "Recharacterization",
    TacticId.REASONING: "Reasoning",
}

# Written to corpus and result files for inputs that carry no tactic.
NON_ARGUMENT_NAME = "non-argument"

MEDIAN = "median"
SYNTHETIC = "synthetic"

DEFAULT_SET_FRACTION = 0.30
DEFAULT_SEGMENT_COUNT = 9


class UnknownTacticError(ValueError):
    """A label does not name any of the 14 tactics."""


class EmptyCategoryError(ValueError):
    """A prototype was requested for a category with no parse strings."""


class InvalidSegmentCountError(ValueError):
    """Segment count must be a positive integer."""


class MissingTacticError(ValueError):
    """A corpus lacks arguments for one of the 14 tactics."""

    def __init__(self, tactic: TacticId):
        self.tactic = tactic
        super().__init__(f"no arguments for tactic {tactic.canonical_name!r}")


def normalize_tactic_name(name: str) -> str:
    out = []
    for ch in name.strip().lower():
        out.append("_" if ch in " /-" else ch)
    collapsed = "".join(out)
    while "__" in collapsed:
        collapsed = collapsed.replace("__", "_")
    return collapsed.strip("_")


# Accepted spellings beyond the canonical snake_case names.
DEFAULT_TACTIC_ALIASES = {
    "outcomes": TacticId.OUTCOME,
    "social": TacticId.SOCIAL_ESTEEM,
    "deontic_appeal": TacticId.DEONTIC_MORAL_APPEAL,
    "moral_appeal": TacticId.DEONTIC_MORAL_APPEAL,
    "principles": TacticId.DEONTIC_MORAL_APPEAL,
    "reason": TacticId.REASONING,
}


def tactic_from_name(
    name: str, aliases: Optional[Mapping[str, TacticId]] = None
) -> TacticId:
    key = normalize_tactic_name(name)
    for tactic in TacticId:
        if key == tactic.canonical_name:
            return tactic
    table = DEFAULT_TACTIC_ALIASES if aliases is None else aliases
    if key in table:
        return table[key]
    raise UnknownTacticError(f"unknown tactic name: {name!r}")


def parse_gold_label(
    name: str, aliases: Optional[Mapping[str, TacticId]] = None
) -> Optional[TacticId]:
    """A gold label is a tactic name or the non-argument marker (None)."""
    if normalize_tactic_name(name) == normalize_tactic_name(NON_ARGUMENT_NAME):
        return None
    return tactic_from_name(name, aliases)


@dataclass(frozen=True)
class PrototypeSet:
    """One prototype parse string per tactic, plus build provenance."""

    prototypes: Mapping[TacticId, ParseString]
    method: str
    set_fraction: float
    segment_count: Optional[int]
    seed: int
    source_counts: Mapping[TacticId, int] = field(default_factory=dict)

    def __post_init__(self):
        missing = [t for t in TacticId if t not in self.prototypes]
        if missing:
            names = ", ".join(t.canonical_name for t in missing)
            raise ValueError(f"prototype set is missing tactics: {names}")


def _median_key(strings, index, sums):
    return (sums[index], len(strings[index]), tokens_to_text(strings[index]))


def set_median(strings: Sequence[ParseString]) -> ParseString:
    """The element with the smallest total unit-cost distance to all the
    others.  Ties go to the shorter string, then to the lexicographically
    smaller canonical text, so the result never depends on input order."""
    strings = list(strings)
    if not strings:
        raise EmptyCategoryError("cannot take the median of an empty set")
    if len(strings) == 1:
        return tuple(strings[0])
    sums = distance_matrix(strings, strings).sum(axis=1)
    best = min(range(len(strings)), key=lambda i: _median_key(strings, i, sums))
    return tuple(strings[best])


def segment(ps: ParseString, k: int) -> list[ParseString]:
    """Chop a parse string into ``k`` contiguous segments of near-equal
    size, longer segments first; short strings yield trailing empties."""
    if not isinstance(k, int) or k < 1:
        raise InvalidSegmentCountError(f"segment count must be >= 1, got {k!r}")
    ps = tuple(ps)
    base, extra = divmod(len(ps), k)
    segments = []
    start = 0
    for i in range(k):
        size = base + (1 if i < extra else 0)
        segments.append(ps[start : start + size])
        start += size
    return segments


def synthesize_prototype(strings: Sequence[ParseString], k: int) -> ParseString:
    """Concatenate the per-position segment medians of a category."""
    strings = list(strings)
    if not strings:
        raise EmptyCategoryError("cannot synthesize a prototype from an empty set")
    segmented = [segment(s, k) for s in strings]
    tokens = []
    for i in range(k):
        tokens.extend(set_median([parts[i] for parts in segmented]))
    return tuple(tokens)


def sample_category(args: Sequence[ParseString], fraction: float, seed: int) -> list[ParseString]:
    """Uniform sample without replacement of round(fraction * n) strings,
    never fewer than one.  ``fraction`` 1.0 keeps the input order."""
    args = list(args)
    if not args:
        raise EmptyCategoryError("cannot sample from an empty category")
    if not 0 < fraction <= 1:
        raise ValueError(f"sample fraction must be in (0, 1], got {fraction!r}")
    if fraction == 1:
        return args
    size = int(math.floor(fraction * len(args) + 0.5))  # round half up
    size = max(1, min(size, len(args)))
    return random.Random(seed).sample(args, size)


_MASK64 = (1 << 64) - 1


def _mix64(value: int) -> int:
    value = (value + 0x9E3779B97F4A7C15) & _MASK64
    value ^= value >> 30
    value = (value * 0xBF58476D1CE4E5B9) & _MASK64
    value ^= value >> 27
    value = (value * 0x94D049BB133111EB) & _MASK64
    return value ^ (value >> 31)


def derive_seed(seed: int, *parts: int) -> int:
    """Stable 64-bit child seed for (seed, parts).

    Adding more derivation points never perturbs earlier ones, so trial
    counts and grid sizes can grow without changing existing samples.
    """
    state = _mix64(seed & _MASK64)
    for part in parts:
        state = _mix64(state ^ _mix64(part & _MASK64))
    return state


def build_prototypes(
    corpus: Mapping[TacticId, Sequence[ParseString]],
    method: str = MEDIAN,
    fraction: float = DEFAULT_SET_FRACTION,
    segments: int = DEFAULT_SEGMENT_COUNT,
    seed: int = 0,
) -> PrototypeSet:
    """Build the full 14-prototype set from a labeled corpus.

    Every tactic is sampled with its own seed derived from ``seed``, so
    the result is a pure function of (corpus, method, fraction, segments,
    seed).  Duplicate prototypes are legal but reported as a warning
    because they make some classification ties unavoidable.
    """
    if method not in (MEDIAN, SYNTHETIC):
        raise ValueError(f"unknown prototype method: {method!r}")
    prototypes = {}
    counts = {}
    for tactic in TacticId:
        args = list(corpus.get(tactic, ()))
        if not args:
            raise MissingTacticError(tactic)
        sample = sample_category(args, fraction, derive_seed(seed, int(tactic)))
        counts[tactic] = len(sample)
        if method == MEDIAN:
            prototypes[tactic] = set_median(sample)
        else:
            prototypes[tactic] = synthesize_prototype(sample, segments)

    by_tokens = {}
    for tactic, proto in prototypes.items():
        by_tokens.setdefault(proto, []).append(tactic)
    duplicates = [group for group in by_tokens.values() if len(group) > 1]
    if duplicates:
        described = "; ".join(
            ", ".join(t.canonical_name for t in group) for group in duplicates
        )
        warnings.warn(f"identical prototypes for tactics: {described}", stacklevel=2)

    return PrototypeSet(
        prototypes=prototypes,
        method=method,
        set_fraction=fraction,
        segment_count=segments if method == SYNTHETIC else None,
        seed=seed,
        source_counts=counts,
    )
