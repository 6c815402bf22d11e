"""Experiment drivers: 1-NN classification with validated hyperparameters,
agglomerative clustering on a precomputed distance matrix, and the Rand index.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .baselines import DtwParams
from .distance import DIRECT, SPLIT, DistanceMatrix, Metric, OtwParams, cross_distances
from .errors import LengthMismatchError, OtwError
from .series import z_normalize


@dataclass
class LabeledDataset:
    """Equal-length series stacked as rows of ``series`` with integer ``labels``."""

    series: np.ndarray
    labels: np.ndarray
    name: str = ""

    def __post_init__(self):
        self.series = np.atleast_2d(np.asarray(self.series, dtype=np.float64))
        self.labels = np.asarray(self.labels).astype(np.int64).ravel()
        if self.series.ndim != 2:
            raise OtwError("series must stack into a 2-D array")
        if self.series.shape[0] != self.labels.shape[0]:
            raise OtwError(
                f"{self.series.shape[0]} series but {self.labels.shape[0]} labels"
            )
        if self.labels.size == 0 or self.series.shape[1] == 0:
            raise OtwError("dataset is empty")
        if not np.all(np.isfinite(self.series)):
            raise OtwError("dataset contains non-finite values")

    def __len__(self):
        return self.labels.shape[0]

    @property
    def length(self):
        return self.series.shape[1]

    @property
    def classes(self):
        return np.unique(self.labels)

    def subset(self, idx, name=None):
        idx = np.asarray(idx)
        return LabeledDataset(self.series[idx], self.labels[idx], self.name if name is None else name)

    def normalized(self):
        return LabeledDataset(z_normalize(self.series), self.labels, self.name)


@dataclass
class HyperGrid:
    """Candidate metrics for validation, tried in list order."""

    cells: list = field(default_factory=list)

    def __post_init__(self):
        if not self.cells:
            raise OtwError("hyperparameter grid is empty")

    def __len__(self):
        return len(self.cells)

    def __iter__(self):
        return iter(self.cells)

    @classmethod
    def otw(cls, n, ms=(0.1, 1.0, 10.0), windows=None, betas=(0.0,), signs=(DIRECT, SPLIT)):
        """Default OTW grid; windows default to ``1, n/8, n/4, n/2, n`` (rounded up)."""
        if windows is None:
            windows = _unique([1, math.ceil(n / 8), math.ceil(n / 4), math.ceil(n / 2), n])
        cells = [
            Metric("otw", OtwParams(m=m, s=s, beta=beta, sign=sign))
            for m in ms
            for s in windows
            for beta in betas
            for sign in signs
        ]
        return cls(cells)

    @classmethod
    def dtw(cls, n, windows=None, local_cost="squared"):
        """Default DTW band grid: radius ``0, 5%, 10%, 20%`` of ``n`` and unconstrained."""
        if windows is None:
            windows = _unique([0, math.ceil(0.05 * n), math.ceil(0.1 * n), math.ceil(0.2 * n), n - 1])
        return cls([Metric("dtw", dtw=DtwParams(window=w, local_cost=local_cost)) for w in windows])

    @classmethod
    def single(cls, metric):
        return cls([metric])


def _unique(xs):
    out = []
    for x in xs:
        if x not in out:
            out.append(x)
    return out


def one_nn_classify(train, test, metric, threads=1):
    """Label each test series with its nearest training series' label.

    Ties go to the lowest training index.

    Returns
    -------
    predictions : ndarray of int
    error_rate : float
    """
    if len(train) == 0:
        raise OtwError("training set is empty")
    if train.length != test.length:
        raise LengthMismatchError(f"train length {train.length} != test length {test.length}")
    D = cross_distances(test.series, train.series, metric, threads=threads)
    pred = train.labels[np.argmin(D, axis=1)]
    return pred, float(np.mean(pred != test.labels))


def validation_split(n_items, seed, frac=0.8):
    """Seeded random split of ``range(n_items)`` into fit and validation indices."""
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n_items)
    n_val = max(1, int(round((1 - frac) * n_items)))
    return np.sort(perm[n_val:]), np.sort(perm[:n_val])


def select_params(train, grid, seed=0, threads=1, return_scores=False):
    """Pick the grid cell with the best 1-NN accuracy on an 80/20 split of ``train``.

    Ties are resolved in favour of the earlier grid cell.
    """
    if len(train) < 5:
        raise OtwError(f"parameter selection needs at least 5 items, got {len(train)}")
    fit_idx, val_idx = validation_split(len(train), seed)
    fit, val = train.subset(fit_idx), train.subset(val_idx)
    scores = []
    for metric in grid:
        _, err = one_nn_classify(fit, val, metric, threads=threads)
        scores.append(1.0 - err)
    best = grid.cells[int(np.argmax(scores))]
    if return_scores:
        return best, scores
    return best


LINKAGES = ("average", "single", "complete")


def agglomerative_cluster(D, k, linkage="average"):
    """Bottom-up clustering of a precomputed distance matrix down to ``k`` clusters.

    Parameters
    ----------
    D : DistanceMatrix or array_like, shape (N, N)
    k : int
        Number of clusters to stop at, ``1 <= k <= N``.
    linkage : {"average", "single", "complete"}

    Returns
    -------
    labels : ndarray of int, shape (N,)
        Cluster ids numbered by first appearance.

    Notes
    -----
    Cluster distances follow the Lance-Williams recurrences. At each step the
    closest pair of active clusters merges, ties going to the smallest
    ``(i, j)`` slot pair; the merged cluster keeps slot ``i``.
    """
    E = D.entries if isinstance(D, DistanceMatrix) else np.asarray(D, dtype=np.float64)
    N = E.shape[0]
    if E.shape != (N, N):
        raise OtwError("distance matrix must be square")
    if not 1 <= k <= N:
        raise OtwError(f"k must be in [1, {N}], got {k}")
    if linkage not in LINKAGES:
        raise OtwError(f"unknown linkage {linkage!r}")

    W = E.astype(np.float64, copy=True)
    W[np.tril_indices(N)] = np.inf
    size = np.ones(N)
    owner = np.arange(N)
    active = np.ones(N, dtype=bool)
    for _ in range(N - k):
        flat = int(np.argmin(W))
        i, j = divmod(flat, N)
        # full rows of distances from the two clusters to every other slot
        di = np.minimum(W[i, :], W[:, i])
        dj = np.minimum(W[j, :], W[:, j])
        if linkage == "average":
            new = (size[i] * di + size[j] * dj) / (size[i] + size[j])
        elif linkage == "single":
            new = np.minimum(di, dj)
        else:
            new = np.maximum(di, dj)
        size[i] += size[j]
        active[j] = False
        owner[owner == j] = i
        W[j, :] = np.inf
        W[:, j] = np.inf
        lower = np.arange(N) < i
        upper = np.arange(N) > i
        W[lower & active, i] = new[lower & active]
        W[i, upper & active] = new[upper & active]
    _, labels = np.unique(owner, return_inverse=True)
    # renumber by first appearance
    order = {}
    return np.array([order.setdefault(x, len(order)) for x in labels], dtype=np.int64)


def rand_index(truth, predicted):
    """Fraction of item pairs on which two partitions agree."""
    t = np.asarray(truth).ravel()
    p = np.asarray(predicted).ravel()
    if t.shape != p.shape:
        raise LengthMismatchError(f"label vectors differ in length: {t.size} != {p.size}")
    if t.size < 2:
        raise OtwError("rand index needs at least two items")
    iu = np.triu_indices(t.size, 1)
    same_t = (t[:, None] == t[None, :])[iu]
    same_p = (p[:, None] == p[None, :])[iu]
    return float(np.mean(same_t == same_p))
