"""Sample Kendall's tau for tie-free continuous data.

The estimate is (concordant - discordant) / C(n, 2). Two algorithms are
provided: the defining O(n^2) pairwise count, used up to ``QUADRATIC_LIMIT``
points, and an O(n log n) merge-sort inversion count above that. Both
produce exact integer pair counts, so their results are identical.

Kernels come from the compiled extension when it is installed; otherwise a
numpy fallback is used. Set the environment variable ``TAUBOUNDS_NO_EXT=1``
before import to force the fallback.
"""

from __future__ import annotations

import os

import numpy as np

from .errors import TieError

if os.environ.get("TAUBOUNDS_NO_EXT", "").strip() not in ("", "0"):
    from . import _concordance_py as _kernel

    HAVE_COMPILED_KERNEL = False
else:
    try:
        from . import _concordance as _kernel  # type: ignore[attr-defined]

        HAVE_COMPILED_KERNEL = True
    except ImportError:
        from . import _concordance_py as _kernel

        HAVE_COMPILED_KERNEL = False

__all__ = ["kendall_tau", "HAVE_COMPILED_KERNEL", "QUADRATIC_LIMIT"]

QUADRATIC_LIMIT = 10_000


def _as_xy(points, y) -> tuple[np.ndarray, np.ndarray]:
    if y is None:
        arr = np.asarray(points, dtype=float)
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise ValueError("points must be a sequence of (x, y) pairs")
        return np.ascontiguousarray(arr[:, 0]), np.ascontiguousarray(arr[:, 1])
    x = np.ascontiguousarray(points, dtype=float)
    yy = np.ascontiguousarray(y, dtype=float)
    if x.shape != yy.shape or x.ndim != 1:
        raise ValueError("x and y must be one-dimensional arrays of equal length")
    return x, yy


def _reject_ties(name: str, a: np.ndarray) -> None:
    s = np.sort(a)
    dup = s[1:] == s[:-1]
    if dup.any():
        raise TieError(name, float(s[1:][dup][0]))


def kendall_tau(points, y=None, method: str = "auto") -> float:
    """Kendall rank-correlation estimate in [-1, 1].

    Accepts either an (n, 2) array of pairs or two equal-length 1-d arrays.
    Ties in either coordinate are rejected (the estimate targets continuous
    data), as are samples with fewer than two points.

    ``method`` is one of ``"auto"``, ``"quadratic"``, ``"mergesort"``; auto
    selects the quadratic count for n <= QUADRATIC_LIMIT.
    """
    x, yy = _as_xy(points, y)
    n = x.size
    if n < 2:
        raise ValueError(f"need at least 2 points, got {n}")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(yy))):
        raise ValueError("coordinates must be finite")
    _reject_ties("x", x)
    _reject_ties("y", yy)

    if method == "auto":
        method = "quadratic" if n <= QUADRATIC_LIMIT else "mergesort"
    total = n * (n - 1) // 2
    if method == "quadratic":
        net = int(_kernel.net_concordance_quadratic(x, yy))
    elif method == "mergesort":
        order = np.argsort(x, kind="stable")
        discordant = int(_kernel.discordant_by_merge(yy[order]))
        net = total - 2 * discordant
    else:
        raise ValueError(f"unknown method {method!r}")
    return net / total
