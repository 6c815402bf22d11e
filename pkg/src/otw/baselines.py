"""Comparison distances: DTW with a Sakoe-Chiba band, l1 and l2.

The DTW kernels are compiled with numba and release the GIL, so pairwise
matrices can fan out over threads.
"""

from dataclasses import dataclass

import numba as nb
import numpy as np

from .errors import LengthMismatchError, OracleCapError, OtwError
from .series import as_batch, as_series

SQUARED = "squared"
ABSOLUTE = "absolute"

_jit = dict(nogil=True, cache=True)


@dataclass(frozen=True)
class DtwParams:
    """DTW configuration.

    ``window`` is a Sakoe-Chiba band radius in samples (``None`` for no
    band); ``local_cost`` is ``"squared"`` or ``"absolute"`` difference.
    """

    window: int = None
    local_cost: str = SQUARED

    def __post_init__(self):
        if self.window is not None and int(self.window) < 0:
            raise OtwError(f"DTW window must be >= 0, got {self.window}")
        if self.local_cost not in (SQUARED, ABSOLUTE):
            raise OtwError(f"unknown local cost {self.local_cost!r}")

    def radius(self, n):
        return n - 1 if self.window is None else min(int(self.window), n - 1)

    @property
    def tag(self):
        w = "inf" if self.window is None else int(self.window)
        return f"dtw(window={w},cost={self.local_cost})"


@nb.njit(**_jit)
def _local(x, y, squared):
    d = x - y
    return d * d if squared else abs(d)


@nb.njit(**_jit)
def _dtw_kernel(a, b, r, squared):
    n = a.shape[0]
    m = b.shape[0]
    inf = np.inf
    prev = np.full(m + 1, inf)
    cur = np.full(m + 1, inf)
    prev[0] = 0.0
    for i in range(1, n + 1):
        cur[:] = inf
        lo = max(1, i - r)
        hi = min(m, i + r)
        for j in range(lo, hi + 1):
            best = prev[j - 1]
            if prev[j] < best:
                best = prev[j]
            if cur[j - 1] < best:
                best = cur[j - 1]
            cur[j] = best + _local(a[i - 1], b[j - 1], squared)
        prev, cur = cur, prev
    return prev[m]


@nb.njit(**_jit)
def _dtw_rows(a, B, r, squared):
    out = np.empty(B.shape[0])
    for k in range(B.shape[0]):
        out[k] = _dtw_kernel(a, B[k], r, squared)
    return out


@nb.njit(**_jit)
def _dtw_pairs(A, B, r, squared):
    out = np.empty(A.shape[0])
    for k in range(A.shape[0]):
        out[k] = _dtw_kernel(A[k], B[k], r, squared)
    return out


@nb.njit(**_jit)
def _dtw_table(a, b, r, squared):
    n = a.shape[0]
    m = b.shape[0]
    C = np.full((n + 1, m + 1), np.inf)
    C[0, 0] = 0.0
    for i in range(1, n + 1):
        for j in range(max(1, i - r), min(m, i + r) + 1):
            best = C[i - 1, j - 1]
            if C[i - 1, j] < best:
                best = C[i - 1, j]
            if C[i, j - 1] < best:
                best = C[i, j - 1]
            C[i, j] = best + _local(a[i - 1], b[j - 1], squared)
    return C


@nb.njit(**_jit)
def _backtrack(C):
    # ties prefer the diagonal, then the vertical step
    i = C.shape[0] - 1
    j = C.shape[1] - 1
    path = np.empty((i + j, 2), dtype=np.int64)
    k = 0
    while i > 0 and j > 0:
        path[k, 0] = i - 1
        path[k, 1] = j - 1
        k += 1
        d = C[i - 1, j - 1]
        u = C[i - 1, j]
        l = C[i, j - 1]
        if d <= u and d <= l:
            i -= 1
            j -= 1
        elif u <= l:
            i -= 1
        else:
            j -= 1
    return path[:k][::-1]


def _pair(a, b):
    a = as_series(a, "a")
    b = as_series(b, "b")
    if a.shape[0] != b.shape[0]:
        raise LengthMismatchError(f"series lengths differ: {a.shape[0]} != {b.shape[0]}")
    return a, b


def dtw(a, b, params=None):
    """DTW alignment cost with steps (1,0), (0,1), (1,1) inside the band.

    Runs in O(n * window) time and O(n) memory.
    """
    p = DtwParams() if params is None else params
    a, b = _pair(a, b)
    value = _dtw_kernel(a, b, p.radius(a.shape[0]), p.local_cost == SQUARED)
    if not np.isfinite(value):
        raise OtwError("no admissible warping path inside the band")
    return float(value)


def dtw_many(a, B, params=None):
    """DTW between one series ``a`` and every row of ``B``."""
    p = DtwParams() if params is None else params
    a = as_series(a, "a")
    B = as_batch(B, "B")
    if B.shape[-1] != a.shape[0]:
        raise LengthMismatchError(f"series length {a.shape[0]} != reference length {B.shape[-1]}")
    B = np.ascontiguousarray(B.reshape(-1, a.shape[0]))
    return _dtw_rows(a, B, p.radius(a.shape[0]), p.local_cost == SQUARED)


def dtw_pairs(A, B, params=None):
    """Row-wise DTW between two equally shaped ``(k, n)`` stacks."""
    p = DtwParams() if params is None else params
    A = np.ascontiguousarray(as_batch(A, "A"))
    B = np.ascontiguousarray(as_batch(B, "B"))
    if A.shape != B.shape or A.ndim != 2:
        raise LengthMismatchError(f"stack shapes differ: {A.shape} vs {B.shape}")
    return _dtw_pairs(A, B, p.radius(A.shape[1]), p.local_cost == SQUARED)


def dtw_path(a, b, params=None):
    """Return ``(cost, path)`` where ``path`` is an ``(L, 2)`` array of index pairs."""
    p = DtwParams() if params is None else params
    a, b = _pair(a, b)
    C = _dtw_table(a, b, p.radius(a.shape[0]), p.local_cost == SQUARED)
    return float(C[-1, -1]), _backtrack(C)


def dtw_brute_force(a, b, params=None, cap=8):
    """DTW by enumerating every monotone warping path (test oracle, ``n <= cap``).

    The depth-first walk drops partial paths already costlier than the best
    complete one; with nonnegative local costs that never discards an optimum.
    """
    p = DtwParams() if params is None else params
    a, b = _pair(a, b)
    n = a.shape[0]
    if n > cap:
        raise OracleCapError(f"brute-force DTW limited to n <= {cap}, got {n}")
    r = p.radius(n)
    if p.local_cost == SQUARED:
        cost = [[(x - y) ** 2 for y in b] for x in a]
    else:
        cost = [[abs(x - y) for y in b] for x in a]
    best = [np.inf]

    def walk(i, j, acc):
        acc += cost[i][j]
        if acc >= best[0]:
            # costs are nonnegative, so a partial path this expensive cannot win
            return
        if i == n - 1 and j == n - 1:
            best[0] = acc
            return
        for di, dj in ((1, 1), (1, 0), (0, 1)):
            ni, nj = i + di, j + dj
            if ni < n and nj < n and abs(ni - nj) <= r:
                walk(ni, nj, acc)

    walk(0, 0, 0.0)
    return float(best[0])


def minkowski(a, b, order=2):
    """l1 (``order=1``) or l2 (``order=2``) distance along the last axis."""
    if order not in (1, 2):
        raise OtwError(f"order must be 1 or 2, got {order}")
    a = as_batch(a, "a")
    b = as_batch(b, "b")
    if a.shape[-1] != b.shape[-1]:
        raise LengthMismatchError(f"series lengths differ: {a.shape[-1]} != {b.shape[-1]}")
    d = a - b
    if order == 1:
        out = np.abs(d).sum(axis=-1)
    else:
        out = np.sqrt((d * d).sum(axis=-1))
    return out[()] if np.ndim(out) == 0 else out
