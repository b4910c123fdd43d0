"""Shared test utilities: independent oracles and synthetic data.

The oracles here deliberately avoid the library's dynamic programs: the
recursive distance oracles recompute distances from the definition, and
the suffix-lattice oracle materializes the same recursion over every
sequence up to a length bound at once, so exhaustive comparisons stay
fast.
"""

import random
from functools import lru_cache

import numpy as np

from persuasion_tactics import (
    CLOSE,
    ParseString,
    PrototypeSet,
    RawTree,
    TacticId,
    linearize,
    normalized_matrix,
)

PHRASE_LABELS = ("S", "NP", "VP", "PP", "SBAR", "ADJP", "ADVP", "WHNP", "PRN", "QP")
POS_LABELS = ("NN", "NNS", "DT", "JJ", "VB", "VBZ", "VBD", "PRP", "RB", "IN", "CC", "TO")
TOKEN_ALPHABET = tuple("(" + label for label in PHRASE_LABELS + POS_LABELS) + (CLOSE,)


def brute_distance(a, b):
    """Plain recursive edit distance, no memo.  Tiny inputs only."""
    if not a:
        return len(b)
    if not b:
        return len(a)
    return min(
        brute_distance(a[1:], b) + 1,
        brute_distance(a, b[1:]) + 1,
        brute_distance(a[1:], b[1:]) + (a[0] != b[0]),
    )


def memo_distance(a, b, insert=1, delete=1, substitute=1):
    """Memoized recursive edit distance with arbitrary costs."""

    @lru_cache(maxsize=None)
    def go(i, j):
        if i == len(a):
            return (len(b) - j) * insert
        if j == len(b):
            return (len(a) - i) * delete
        return min(
            go(i + 1, j) + delete,
            go(i, j + 1) + insert,
            go(i + 1, j + 1) + (0 if a[i] == b[j] else substitute),
        )

    return go(0, 0)


def lattice_distances(max_len=6, alphabet_size=4):
    """Edit distances between every pair of sequences of length <= max_len
    over a fixed alphabet, computed by evaluating the defining recursion
    over the complete suffix lattice.

    Returns (matrix, offsets): sequence ids are grouped by length, and
    within one length ordered by their base-``alphabet_size`` encoding.
    The suffix of id ``i`` (first symbol dropped) is again an id, which is
    what makes the recursion evaluable with plain array gathers.
    """
    offsets = [0]
    for length in range(max_len + 1):
        offsets.append(offsets[-1] + alphabet_size**length)
    total = offsets[-1]
    lengths = np.zeros(total, np.int16)
    head = np.zeros(total, np.int64)
    tail = np.zeros(total, np.int64)
    for length in range(1, max_len + 1):
        ids = np.arange(offsets[length], offsets[length + 1])
        value = ids - offsets[length]
        power = alphabet_size ** (length - 1)
        lengths[ids] = length
        head[ids] = value // power
        tail[ids] = offsets[length - 1] + (value % power)

    dist = np.zeros((total, total), np.int16)
    dist[0, :] = lengths
    dist[:, 0] = lengths
    for len_a in range(1, max_len + 1):
        ids_a = np.arange(offsets[len_a], offsets[len_a + 1])
        head_a = head[ids_a]
        tail_a = tail[ids_a]
        for len_b in range(1, max_len + 1):
            ids_b = np.arange(offsets[len_b], offsets[len_b + 1])
            head_b = head[ids_b]
            tail_b = tail[ids_b]
            drop_a = dist[np.ix_(tail_a, ids_b)] + 1
            drop_b = dist[np.ix_(ids_a, tail_b)] + 1
            both = dist[np.ix_(tail_a, tail_b)] + (
                head_a[:, None] != head_b[None, :]
            )
            dist[np.ix_(ids_a, ids_b)] = np.minimum(drop_a, np.minimum(drop_b, both))
    return dist, offsets


def lattice_sequence(seq_id, offsets, alphabet):
    """Decode a lattice id back into its token tuple."""
    length = 0
    while offsets[length + 1] <= seq_id:
        length += 1
    value = seq_id - offsets[length]
    size = len(alphabet)
    symbols = []
    for position in range(length - 1, -1, -1):
        symbols.append(alphabet[(value // size**position) % size])
    return tuple(symbols)


def random_token_sequence(rng, max_len=20, alphabet=TOKEN_ALPHABET, min_len=0):
    length = rng.randint(min_len, max_len)
    return tuple(rng.choice(alphabet) for _ in range(length))


def random_stripped_tree(rng, depth=0, max_depth=5):
    if depth >= max_depth or (depth > 0 and rng.random() < 0.2 + 0.12 * depth):
        return RawTree(rng.choice(POS_LABELS))
    children = tuple(
        random_stripped_tree(rng, depth + 1, max_depth)
        for _ in range(rng.randint(1, 4))
    )
    return RawTree(rng.choice(PHRASE_LABELS), children)


def random_worded_tree(rng, depth=0, max_depth=4):
    if depth >= max_depth or (depth > 0 and rng.random() < 0.2 + 0.15 * depth):
        return RawTree(rng.choice(POS_LABELS), word=f"w{rng.randint(0, 999)}")
    children = tuple(
        random_worded_tree(rng, depth + 1, max_depth)
        for _ in range(rng.randint(1, 4))
    )
    return RawTree(rng.choice(PHRASE_LABELS), children)


def random_parse_string(rng, min_tokens=10, max_tokens=200, max_depth=6):
    while True:
        tokens = linearize(random_stripped_tree(rng, max_depth=max_depth))
        if min_tokens <= len(tokens) <= max_tokens:
            return tokens


def perturb(ps: ParseString, rng, rate=0.05, alphabet=TOKEN_ALPHABET):
    """Substitute floor(rate * len) randomly chosen positions."""
    tokens = list(ps)
    count = int(rate * len(tokens))
    for position in rng.sample(range(len(tokens)), count):
        replacement = rng.choice(alphabet)
        while replacement == tokens[position]:
            replacement = rng.choice(alphabet)
        tokens[position] = replacement
    return tuple(tokens)


def make_base_prototypes(seed=0, count=14, min_tokens=60, max_tokens=120, min_sep=0.3):
    """Structurally distinct parse strings, one per tactic; every pair is
    at least ``min_sep`` apart in normalized distance."""
    rng = random.Random(seed)
    bases = []
    while len(bases) < count:
        candidate = random_parse_string(rng, min_tokens, max_tokens)
        if bases:
            gaps = normalized_matrix([candidate], bases)
            if float(gaps.min()) < min_sep:
                continue
        bases.append(candidate)
    return bases


def make_prototype_set(prototypes, method="median", fraction=1.0, seed=0, segments=None):
    if not isinstance(prototypes, dict):
        prototypes = dict(zip(TacticId, prototypes))
    return PrototypeSet(
        prototypes=prototypes,
        method=method,
        set_fraction=fraction,
        segment_count=segments,
        seed=seed,
        source_counts={t: 1 for t in TacticId},
    )
