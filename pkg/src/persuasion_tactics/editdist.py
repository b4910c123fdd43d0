"""Token-level edit distance between parse strings.

Distances count whole structural tokens: substituting ``(NP`` for ``(NN``
costs one operation regardless of label length, and ``)`` only ever
matches ``)``.  Unit costs are the default everywhere; `EditCosts` exists
for experimentation.

Single-pair calls run a plain two-row dynamic program.  The batch helpers
(`distance_matrix`, `pair_distances`) encode tokens as integers and run a
compiled kernel when numba is importable, falling back to the Python
program otherwise.  Both paths compute the exact same integers.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

try:
    from numba import njit, prange

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    _HAVE_NUMBA = False


@dataclass(frozen=True)
class EditCosts:
    insert: float = 1
    delete: float = 1
    substitute: float = 1

    def __post_init__(self):
        if min(self.insert, self.delete, self.substitute) < 0:
            raise ValueError("edit operation costs must be non-negative")


UNIT_COSTS = EditCosts()


def edit_distance(a: Sequence[str], b: Sequence[str], costs: EditCosts | None = None):
    """Minimum total cost of insertions, deletions, and substitutions
    transforming ``a`` into ``b``.  Unit costs by default."""
    if costs is None:
        costs = UNIT_COSTS
    ins, dele, sub = costs.insert, costs.delete, costs.substitute
    if ins == dele and len(b) > len(a):
        a, b = b, a  # keep working storage on the shorter side
    if not b:
        return len(a) * dele
    prev = [j * ins for j in range(len(b) + 1)]
    for i, sym_a in enumerate(a, start=1):
        curr = [i * dele]
        for j, sym_b in enumerate(b, start=1):
            best = prev[j - 1] if sym_a == sym_b else prev[j - 1] + sub
            dele_opt = prev[j] + dele
            if dele_opt < best:
                best = dele_opt
            ins_opt = curr[j - 1] + ins
            if ins_opt < best:
                best = ins_opt
            curr.append(best)
        prev = curr
    return prev[-1]


def normalized_distance(a: Sequence[str], b: Sequence[str]) -> float:
    """Unit-cost distance divided by the longer length, in [0, 1].
    Two empty sequences are identical, hence 0."""
    longer = max(len(a), len(b))
    if longer == 0:
        return 0.0
    return edit_distance(a, b) / longer


def similarity(a: Sequence[str], b: Sequence[str]) -> float:
    return 1.0 - normalized_distance(a, b)


# --- batch kernels ---------------------------------------------------------

if _HAVE_NUMBA:

    @njit(cache=True)
    def _unit_dp(a, b):  # pragma: no cover - compiled
        n = a.shape[0]
        m = b.shape[0]
        if m > n:
            a, b = b, a
            n, m = m, n
        if m == 0:
            return n
        row = np.empty(m + 1, np.int32)
        for j in range(m + 1):
            row[j] = j
        for i in range(n):
            diag = row[0]
            row[0] = i + 1
            sym = a[i]
            for j in range(m):
                up = row[j + 1]
                best = diag if sym == b[j] else diag + 1
                if up + 1 < best:
                    best = up + 1
                if row[j] + 1 < best:
                    best = row[j] + 1
                row[j + 1] = best
                diag = up
        return row[m]

    @njit(cache=True, parallel=True)
    def _unit_matrix(aflat, aoff, bflat, boff, out):  # pragma: no cover
        nb = boff.shape[0] - 1
        for k in prange(out.shape[0] * nb):
            i = k // nb
            j = k % nb
            out[i, j] = _unit_dp(
                aflat[aoff[i] : aoff[i + 1]], bflat[boff[j] : boff[j + 1]]
            )

    @njit(cache=True, parallel=True)
    def _unit_pairs(aflat, aoff, bflat, boff, out):  # pragma: no cover
        for k in prange(out.shape[0]):
            out[k] = _unit_dp(
                aflat[aoff[k] : aoff[k + 1]], bflat[boff[k] : boff[k + 1]]
            )


def _encode(sequences, table):
    """Intern tokens into int32 codes shared through ``table``."""
    offsets = np.zeros(len(sequences) + 1, np.int64)
    chunks = []
    for k, seq in enumerate(sequences):
        arr = np.empty(len(seq), np.int32)
        for t, token in enumerate(seq):
            code = table.get(token)
            if code is None:
                code = len(table)
                table[token] = code
            arr[t] = code
        chunks.append(arr)
        offsets[k + 1] = offsets[k] + len(seq)
    flat = np.concatenate(chunks) if chunks else np.empty(0, np.int32)
    return flat, offsets


def distance_matrix(rows: Sequence[Sequence[str]], cols: Sequence[Sequence[str]]) -> np.ndarray:
    """Unit-cost distances between every row/column pair, as int32."""
    rows = list(rows)
    cols = list(cols)
    out = np.zeros((len(rows), len(cols)), np.int32)
    if not rows or not cols:
        return out
    if _HAVE_NUMBA:
        table = {}
        aflat, aoff = _encode(rows, table)
        bflat, boff = _encode(cols, table)
        _unit_matrix(aflat, aoff, bflat, boff, out)
    else:
        for i, a in enumerate(rows):
            for j, b in enumerate(cols):
                out[i, j] = edit_distance(a, b)
    return out


def pair_distances(lefts: Sequence[Sequence[str]], rights: Sequence[Sequence[str]]) -> np.ndarray:
    """Unit-cost distances for aligned pairs ``(lefts[k], rights[k])``."""
    lefts = list(lefts)
    rights = list(rights)
    if len(lefts) != len(rights):
        raise ValueError("pair_distances needs equally long sequences of inputs")
    out = np.zeros(len(lefts), np.int32)
    if not lefts:
        return out
    if _HAVE_NUMBA:
        table = {}
        aflat, aoff = _encode(lefts, table)
        bflat, boff = _encode(rights, table)
        _unit_pairs(aflat, aoff, bflat, boff, out)
    else:
        for k in range(len(lefts)):
            out[k] = edit_distance(lefts[k], rights[k])
    return out


def normalized_matrix(rows: Sequence[Sequence[str]], cols: Sequence[Sequence[str]]) -> np.ndarray:
    """Length-normalized distance for every row/column pair, as float64."""
    rows = list(rows)
    cols = list(cols)
    dist = distance_matrix(rows, cols).astype(np.float64)
    len_rows = np.array([len(r) for r in rows], np.float64).reshape(-1, 1)
    len_cols = np.array([len(c) for c in cols], np.float64).reshape(1, -1)
    denom = np.maximum(np.maximum(len_rows, len_cols), 1.0)
    return dist / denom
