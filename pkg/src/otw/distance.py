"""The Optimal Transport Warping (OTW) distance family.

For series ``a`` and ``b`` of length ``n`` with windowed cumulative sums
``A_s`` and ``B_s`` (see :func:`otw.series.windowed_prefix_sums`)::

    OTW(a, b) = m * L(A_s(n) - B_s(n)) + sum_{i < n} L(A_s(i) - B_s(i))

where ``L`` is the absolute value (``beta == 0``) or the smooth l1 (Huber)
loss with knot ``beta``. The ``split`` sign strategy applies the same formula
to positive and negative parts separately and adds the two results.

Every evaluation is O(n) time. All functions broadcast over leading axes, so
a ``(k, n)`` stack of references can be compared against one ``(n,)`` input in
a single call.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import LengthMismatchError, OtwError, WindowError
from .series import as_batch, as_series, windowed_prefix_sums

DIRECT = "direct"
SPLIT = "split"


@dataclass(frozen=True)
class OtwParams:
    """Configuration of an OTW evaluation.

    Attributes
    ----------
    m : float
        Waste cost weighting the total-mass mismatch term.
    s : int or None
        Window length. ``None`` means the full series; values above ``n`` are
        clamped to ``n`` at evaluation time.
    beta : float
        Smoothing knot of the Huber loss; 0 gives the exact absolute value.
    sign : {"direct", "split"}
        How sequences with negative entries are handled.
    """

    m: float = 1.0
    s: int = None
    beta: float = 0.0
    sign: str = DIRECT

    def __post_init__(self):
        if not np.isfinite(self.m) or self.m < 0:
            raise OtwError(f"waste cost m must be finite and >= 0, got {self.m}")
        if not np.isfinite(self.beta) or self.beta < 0:
            raise OtwError(f"beta must be finite and >= 0, got {self.beta}")
        if self.s is not None and int(self.s) < 1:
            raise WindowError(f"window s must be >= 1, got {self.s}")
        if self.sign not in (DIRECT, SPLIT):
            raise OtwError(f"sign must be {DIRECT!r} or {SPLIT!r}, got {self.sign!r}")

    def window(self, n):
        """Effective window for series of length ``n``."""
        return n if self.s is None else min(int(self.s), n)

    @property
    def tag(self):
        s = "n" if self.s is None else int(self.s)
        return f"otw(m={self.m:g},s={s},beta={self.beta:g},sign={self.sign})"


def smooth_l1(x, beta):
    """Huber-style smooth absolute value.

    ``x**2 / (2 beta)`` for ``|x| < beta`` and ``|x| - beta/2`` otherwise;
    ``beta == 0`` gives ``|x|``.
    """
    x = np.asarray(x, dtype=np.float64)
    ax = np.abs(x)
    if beta == 0:
        return ax
    return np.where(ax < beta, x * x / (2.0 * beta), ax - 0.5 * beta)


def smooth_l1_deriv(x, beta):
    """Derivative of :func:`smooth_l1`; ``sign(x)`` (with ``sign(0) = 0``) when ``beta == 0``."""
    x = np.asarray(x, dtype=np.float64)
    if beta == 0:
        return np.sign(x)
    return np.where(np.abs(x) < beta, x / beta, np.sign(x))


def _check_pair(a, b):
    a = as_batch(a, "a")
    b = as_batch(b, "b")
    if a.shape[-1] != b.shape[-1]:
        raise LengthMismatchError(f"series lengths differ: {a.shape[-1]} != {b.shape[-1]}")
    return a, b


def _resolve(params, kwargs):
    if params is None:
        return OtwParams(**kwargs)
    if kwargs:
        raise TypeError("pass either an OtwParams or keyword parameters, not both")
    return params


def _direct_diff(a, b, s):
    return windowed_prefix_sums(a, s) - windowed_prefix_sums(b, s)


def _direct_value(a, b, p, s):
    terms = smooth_l1(_direct_diff(a, b, s), p.beta)
    return terms[..., :-1].sum(axis=-1) + p.m * terms[..., -1]


def otw(a, b, params=None, **kwargs):
    """OTW distance between ``a`` and ``b``.

    Parameters
    ----------
    a, b : array_like, shape (..., n)
        Series to compare; leading axes broadcast against each other.
    params : OtwParams, optional
        Distance configuration. Alternatively pass ``m``, ``s``, ``beta`` and
        ``sign`` as keywords.

    Returns
    -------
    float or ndarray
        A scalar for 1-D inputs, otherwise one value per broadcast pair.

    Examples
    --------
    >>> float(otw([2.0, 0.0], [0.0, 1.0], m=3))
    5.0
    """
    p = _resolve(params, kwargs)
    a, b = _check_pair(a, b)
    s = p.window(a.shape[-1])
    if p.sign == SPLIT:
        ap, an = np.maximum(a, 0.0), np.maximum(-a, 0.0)
        bp, bn = np.maximum(b, 0.0), np.maximum(-b, 0.0)
        out = _direct_value(ap, bp, p, s) + _direct_value(an, bn, p, s)
    else:
        out = _direct_value(a, b, p, s)
    return out[()] if np.ndim(out) == 0 else out


def _direct_grad(a, b, p, s):
    # dOTW/da_j = sum over windows i containing j, i.e. i in [j, j+s-1],
    # of w_i * L'(delta_i); a reversed cumsum gives all of them in O(n).
    g = smooth_l1_deriv(_direct_diff(a, b, s), p.beta)
    g[..., -1] *= p.m
    suffix = np.cumsum(g[..., ::-1], axis=-1)[..., ::-1]
    grad = suffix.copy()
    grad[..., : grad.shape[-1] - s] -= suffix[..., s:]
    return grad


def otw_grad(a, b, params=None, **kwargs):
    """Gradient of :func:`otw` with respect to both arguments.

    With ``beta == 0`` the subgradient using ``sign(0) = 0`` is returned. In
    ``split`` mode the gradient of each part flows back through
    ``max(x, 0)``/``max(-x, 0)``, which are taken to be flat at zero.

    Returns
    -------
    grad_a, grad_b : ndarray, shape like the broadcast inputs
    """
    p = _resolve(params, kwargs)
    a, b = _check_pair(a, b)
    a, b = np.broadcast_arrays(a, b)
    s = p.window(a.shape[-1])
    if p.sign == SPLIT:
        ga_pos = _direct_grad(np.maximum(a, 0.0), np.maximum(b, 0.0), p, s)
        ga_neg = _direct_grad(np.maximum(-a, 0.0), np.maximum(-b, 0.0), p, s)
        grad_a = ga_pos * (a > 0) - ga_neg * (a < 0)
        grad_b = -ga_pos * (b > 0) + ga_neg * (b < 0)
        return grad_a, grad_b
    grad_a = _direct_grad(a, b, p, s)
    return grad_a, -grad_a


@dataclass(frozen=True)
class Metric:
    """A distance choice for pairwise computations.

    ``kind`` is one of ``"otw"``, ``"dtw"``, ``"l1"`` or ``"l2"``; ``otw`` and
    ``dtw`` carry their parameter objects.
    """

    kind: str = "otw"
    otw: OtwParams = field(default_factory=OtwParams)
    dtw: object = None

    def __post_init__(self):
        if self.kind not in ("otw", "dtw", "l1", "l2"):
            raise OtwError(f"unknown metric {self.kind!r}")
        if self.kind == "dtw" and self.dtw is None:
            from .baselines import DtwParams

            object.__setattr__(self, "dtw", DtwParams())

    @property
    def tag(self):
        if self.kind == "otw":
            return self.otw.tag
        if self.kind == "dtw":
            return self.dtw.tag
        return self.kind

    def __call__(self, a, b):
        """Distance between ``a`` and each row of ``b``."""
        from . import baselines

        if self.kind == "otw":
            return otw(a, b, self.otw)
        if self.kind == "dtw":
            b = np.asarray(b, dtype=np.float64)
            if b.ndim == 1:
                return baselines.dtw(a, b, self.dtw)
            return baselines.dtw_many(a, b, self.dtw)
        return baselines.minkowski(a, b, 1 if self.kind == "l1" else 2)

    def to_dict(self):
        out = {"kind": self.kind}
        if self.kind == "otw":
            out.update(m=self.otw.m, s=self.otw.s, beta=self.otw.beta, sign=self.otw.sign)
        elif self.kind == "dtw":
            out.update(window=self.dtw.window, local_cost=self.dtw.local_cost)
        return out


@dataclass(frozen=True)
class DistanceMatrix:
    """Symmetric pairwise distances with the metric that produced them."""

    entries: np.ndarray
    metric_tag: str

    @property
    def dim(self):
        return self.entries.shape[0]


def _stack(series):
    if len(series) == 0:
        raise OtwError("pairwise_matrix needs at least one series")
    rows = [as_series(x, f"series[{i}]") for i, x in enumerate(series)]
    n = rows[0].shape[0]
    for i, r in enumerate(rows):
        if r.shape[0] != n:
            raise LengthMismatchError(f"series[{i}] has length {r.shape[0]}, expected {n}")
    return np.vstack(rows)


def cross_distances(queries, references, metric, threads=1):
    """Distances between every query (rows) and every reference (columns)."""
    Q = _stack(queries)
    R = _stack(references)
    if Q.shape[1] != R.shape[1]:
        raise LengthMismatchError(f"query length {Q.shape[1]} != reference length {R.shape[1]}")
    out = np.empty((Q.shape[0], R.shape[0]))

    def row(i):
        out[i] = metric(Q[i], R)

    _fan_out(row, range(Q.shape[0]), threads)
    return out


def pairwise_matrix(series, metric=None, threads=1):
    """Pairwise distance matrix over a list of equal-length series.

    Only the upper triangle is evaluated and then mirrored. Rows are
    independent jobs, so ``threads > 1`` changes wall time but not a single
    bit of the result.

    Parameters
    ----------
    series : sequence of array_like or ndarray, shape (N, n)
    metric : Metric, optional
        Defaults to OTW with ``m=1``, full window and ``beta=0``.
    threads : int

    Returns
    -------
    DistanceMatrix
    """
    metric = Metric() if metric is None else metric
    X = _stack(series)
    N = X.shape[0]
    D = np.zeros((N, N))

    def row(i):
        if i + 1 < N:
            D[i, i + 1 :] = metric(X[i], X[i + 1 :])

    _fan_out(row, range(N), threads)
    iu = np.triu_indices(N, 1)
    D[(iu[1], iu[0])] = D[iu]
    return DistanceMatrix(D, metric.tag)


def _fan_out(fn, items, threads):
    if threads is None or threads <= 1:
        for i in items:
            fn(i)
        return
    with ThreadPoolExecutor(max_workers=threads) as pool:
        list(pool.map(fn, items))
