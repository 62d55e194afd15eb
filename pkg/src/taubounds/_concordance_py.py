"""Pure-Python (numpy) pair-counting kernels.

Fallback used when the compiled extension is unavailable. Both backends
return exact integer counts, so results are bit-identical between them.
"""

from __future__ import annotations

import numpy as np

# Rows per chunk in the quadratic kernel are limited so the broadcasted
# comparison matrix stays around ~4e6 cells.
_QUAD_CELLS = 4_000_000

# Below this size inversions are counted directly by broadcasting.
_LEAF = 256


def net_concordance_quadratic(x: np.ndarray, y: np.ndarray) -> int:
    """Net concordant-minus-discordant count over all unordered pairs."""
    n = x.size
    if n < 2:
        return 0
    rows = max(1, _QUAD_CELLS // n)
    net = 0
    for lo in range(0, n, rows):
        hi = min(lo + rows, n)
        sx = np.sign(x[lo:hi, None] - x[None, :])
        sy = np.sign(y[lo:hi, None] - y[None, :])
        net += int(np.sum(sx * sy, dtype=np.int64))
    # every pair counted twice (i, j) and (j, i); diagonal contributes zero
    return net // 2


def _inversions(a: np.ndarray) -> tuple[int, np.ndarray]:
    """Count inversions of ``a`` and return its sorted copy."""
    n = a.size
    if n <= _LEAF:
        inv = int(np.triu(a[:, None] > a[None, :], k=1).sum(dtype=np.int64))
        return inv, np.sort(a)
    mid = n // 2
    inv_left, left = _inversions(a[:mid])
    inv_right, right = _inversions(a[mid:])
    # insertion points double as the cross-pair count: an element r of the
    # right half is inverted with every left element strictly above it
    pos = np.searchsorted(left, right, side="left")
    cross = left.size * right.size - int(pos.sum(dtype=np.int64))
    merged = np.empty(n, dtype=a.dtype)
    rpos = pos + np.arange(right.size)
    merged[rpos] = right
    mask = np.ones(n, dtype=bool)
    mask[rpos] = False
    merged[mask] = left
    return inv_left + inv_right + cross, merged


def discordant_by_merge(y_in_x_order: np.ndarray) -> int:
    """Number of discordant pairs, given y values sorted by their x partner."""
    count, _ = _inversions(np.ascontiguousarray(y_in_x_order, dtype=np.float64))
    return count
