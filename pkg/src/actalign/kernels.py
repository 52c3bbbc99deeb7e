"""Hot inner loops for the DTW recurrence and path backtracking.

Two interchangeable implementations exist: numba-jitted kernels (default when
numba imports) and pure-numpy twins. Selection is controlled by the
ACTALIGN_BACKEND environment variable, read at import time:

    auto   use numba if available, else numpy (default)
    numba  require numba, fail loudly if missing
    numpy  force the pure fallback

Both paths produce identical tables and paths; benchmarks/bench_dtw.py times
them against each other.

Recurrence (1-indexed in the docs, 0-indexed here):

    D[0][0] = A[0][0]
    D[k][t] = A[k][t] + max(D[k][t-1], D[k-1][t], D[k-1][t-1])

with out-of-range predecessors treated as -inf, so the first row and column
reduce to prefix sums. Backtracking walks the largest predecessor, breaking
exact ties by a caller-supplied preference order over the three moves
(codes: 0 = diagonal, 1 = up, 2 = left).
"""

from __future__ import annotations

import os

import numpy as np

BACKEND_ENV = "ACTALIGN_BACKEND"


def table_numpy(aff: np.ndarray) -> np.ndarray:
    """Cumulative-score table, vectorized per row with a scalar scan over t."""
    K, T = aff.shape
    D = np.empty((K, T), dtype=np.float64)
    np.cumsum(aff[0], out=D[0])
    upmax = np.empty(T, dtype=np.float64)
    for k in range(1, K):
        prev = D[k - 1]
        # upmax[t] = max(D[k-1][t], D[k-1][t-1]), the two predecessors above
        upmax[0] = prev[0]
        np.maximum(prev[1:], prev[:-1], out=upmax[1:])
        row = D[k]
        arow = aff[k]
        run = arow[0] + prev[0]
        row[0] = run
        for t in range(1, T):
            best = upmax[t]
            if run > best:
                best = run
            run = arow[t] + best
            row[t] = run
    return D


def backtrack_numpy(D: np.ndarray, end_k: int, end_t: int, order: np.ndarray) -> np.ndarray:
    """Walk predecessors from (end_k, end_t) back to (0, 0); returns (L, 2)."""
    rev = np.empty((end_k + end_t + 1, 2), dtype=np.int64)
    k, t = end_k, end_t
    rev[0, 0] = k
    rev[0, 1] = t
    n = 1
    while k > 0 or t > 0:
        if k == 0:
            t -= 1
        elif t == 0:
            k -= 1
        else:
            diag = D[k - 1, t - 1]
            up = D[k - 1, t]
            left = D[k, t - 1]
            best = diag
            if up > best:
                best = up
            if left > best:
                best = left
            move = 2
            for i in range(3):
                o = order[i]
                if o == 0 and diag == best:
                    move = 0
                    break
                if o == 1 and up == best:
                    move = 1
                    break
                if o == 2 and left == best:
                    move = 2
                    break
            if move == 0:
                k -= 1
                t -= 1
            elif move == 1:
                k -= 1
            else:
                t -= 1
        rev[n, 0] = k
        rev[n, 1] = t
        n += 1
    return rev[:n][::-1].copy()


def _build_numba_kernels():
    from numba import njit

    @njit(cache=True, nogil=True)
    def table_nb(aff):
        K, T = aff.shape
        D = np.empty((K, T), dtype=np.float64)
        D[0, 0] = aff[0, 0]
        for t in range(1, T):
            D[0, t] = aff[0, t] + D[0, t - 1]
        for k in range(1, K):
            D[k, 0] = aff[k, 0] + D[k - 1, 0]
            for t in range(1, T):
                best = D[k - 1, t - 1]
                if D[k - 1, t] > best:
                    best = D[k - 1, t]
                if D[k, t - 1] > best:
                    best = D[k, t - 1]
                D[k, t] = aff[k, t] + best
        return D

    @njit(cache=True, nogil=True)
    def backtrack_nb(D, end_k, end_t, order):
        rev = np.empty((end_k + end_t + 1, 2), dtype=np.int64)
        k, t = end_k, end_t
        rev[0, 0] = k
        rev[0, 1] = t
        n = 1
        while k > 0 or t > 0:
            if k == 0:
                t -= 1
            elif t == 0:
                k -= 1
            else:
                diag = D[k - 1, t - 1]
                up = D[k - 1, t]
                left = D[k, t - 1]
                best = diag
                if up > best:
                    best = up
                if left > best:
                    best = left
                move = 2
                for i in range(3):
                    o = order[i]
                    if o == 0 and diag == best:
                        move = 0
                        break
                    if o == 1 and up == best:
                        move = 1
                        break
                    if o == 2 and left == best:
                        move = 2
                        break
                if move == 0:
                    k -= 1
                    t -= 1
                elif move == 1:
                    k -= 1
                else:
                    t -= 1
            rev[n, 0] = k
            rev[n, 1] = t
            n += 1
        out = np.empty((n, 2), dtype=np.int64)
        for i in range(n):
            out[i, 0] = rev[n - 1 - i, 0]
            out[i, 1] = rev[n - 1 - i, 1]
        return out

    return table_nb, backtrack_nb


def _select() -> tuple[str, object, object]:
    requested = os.environ.get(BACKEND_ENV, "auto").strip().lower()
    if requested not in ("auto", "numba", "numpy"):
        raise RuntimeError(
            f"{BACKEND_ENV}={requested!r} not understood; use auto, numba, or numpy"
        )
    if requested == "numpy":
        return "numpy", table_numpy, backtrack_numpy
    try:
        table_nb, backtrack_nb = _build_numba_kernels()
    except ImportError:
        if requested == "numba":
            raise RuntimeError(f"{BACKEND_ENV}=numba but numba is not importable")
        return "numpy", table_numpy, backtrack_numpy
    return "numba", table_nb, backtrack_nb


ACTIVE_BACKEND, dtw_table_kernel, dtw_backtrack_kernel = _select()


def active_backend() -> str:
    return ACTIVE_BACKEND


def warmup() -> None:
    """Trigger JIT compilation outside any timed region."""
    aff = np.full((2, 2), 0.5)
    D = dtw_table_kernel(aff)
    dtw_backtrack_kernel(D, 1, 1, np.array([0, 1, 2], dtype=np.int64))
