"""Distance feature layers, a small MLP head and its training loop.

A feature layer holds ``k`` trainable reference series ``B`` (shape
``(k, n)``) and maps an input series to the ``k`` distances between it and each
reference. ``OtwLayer`` costs O(kn) per input, ``DtwLayer`` O(kn^2), and
``LinearLayer`` is the plain affine map of a fully connected network.

Everything is plain numpy with hand-written backward passes; the only
compiled code is the DTW kernel.
"""

import time
from dataclasses import dataclass

import numba as nb
import numpy as np

from .baselines import SQUARED, DtwParams, _backtrack, _dtw_rows, _dtw_table
from .distance import OtwParams, otw, otw_grad
from .errors import LengthMismatchError, OtwError


class TrainingError(RuntimeError):
    """Raised when the loss becomes non-finite."""


def _as_inputs(X, n):
    X = np.asarray(X, dtype=np.float64)
    single = X.ndim == 1
    X = np.atleast_2d(X)
    if X.shape[-1] != n:
        raise LengthMismatchError(f"input length {X.shape[-1]} != layer length {n}")
    return X, single


class OtwLayer:
    """Distances from the input to each row of ``B`` under smooth OTW."""

    kind = "otw"

    def __init__(self, B, params=None):
        self.B = np.array(B, dtype=np.float64, ndmin=2)
        self.params = OtwParams(beta=0.1) if params is None else params
        if self.params.beta <= 0:
            raise OtwError("OTW feature layers need beta > 0 to be differentiable")

    @property
    def k(self):
        return self.B.shape[0]

    @property
    def n(self):
        return self.B.shape[1]

    def parameters(self):
        return [self.B]

    def forward(self, X):
        X, single = _as_inputs(X, self.n)
        Z = otw(X[:, None, :], self.B[None, :, :], self.params)
        return Z[0] if single else Z

    def backward(self, X, G):
        """Return ``([grad_B], grad_X)`` for upstream gradient ``G`` over the outputs."""
        X, single = _as_inputs(X, self.n)
        G = np.asarray(G, dtype=np.float64).reshape(X.shape[0], self.k)
        ga, gb = otw_grad(X[:, None, :], self.B[None, :, :], self.params)
        grad_B = np.einsum("sr,srj->rj", G, gb)
        grad_X = np.einsum("sr,srj->sj", G, ga)
        return [grad_B], (grad_X[0] if single else grad_X)


@nb.njit(nogil=True, cache=True)
def _dtw_layer_grad(X, B, G, r, squared):
    gX = np.zeros_like(X)
    gB = np.zeros_like(B)
    for s in range(X.shape[0]):
        for q in range(B.shape[0]):
            g = G[s, q]
            if g == 0.0:
                continue
            path = _backtrack(_dtw_table(X[s], B[q], r, squared))
            for t in range(path.shape[0]):
                i = path[t, 0]
                j = path[t, 1]
                d = X[s, i] - B[q, j]
                if squared:
                    local = 2.0 * d
                else:
                    local = (d > 0) - (d < 0)
                gX[s, i] += g * local
                gB[q, j] -= g * local
    return gB, gX


class DtwLayer:
    """Distances from the input to each row of ``B`` under DTW.

    The backward pass routes the local-cost derivative along one optimal
    warping path, so it is the true gradient only where that path is unique.
    """

    kind = "dtw"

    def __init__(self, B, params=None):
        self.B = np.array(B, dtype=np.float64, ndmin=2)
        self.params = DtwParams() if params is None else params

    @property
    def k(self):
        return self.B.shape[0]

    @property
    def n(self):
        return self.B.shape[1]

    def parameters(self):
        return [self.B]

    def _args(self):
        return self.params.radius(self.n), self.params.local_cost == SQUARED

    def forward(self, X):
        X, single = _as_inputs(X, self.n)
        r, sq = self._args()
        Z = np.stack([_dtw_rows(x, self.B, r, sq) for x in X])
        return Z[0] if single else Z

    def backward(self, X, G):
        X, single = _as_inputs(X, self.n)
        G = np.ascontiguousarray(np.asarray(G, dtype=np.float64).reshape(X.shape[0], self.k))
        r, sq = self._args()
        gB, gX = _dtw_layer_grad(np.ascontiguousarray(X), self.B, G, r, sq)
        return [gB], (gX[0] if single else gX)


class LinearLayer:
    """Affine map ``z = B a + bias``."""

    kind = "linear"

    def __init__(self, B, bias=None):
        self.B = np.array(B, dtype=np.float64, ndmin=2)
        self.bias = np.zeros(self.B.shape[0]) if bias is None else np.array(bias, dtype=np.float64)
        if self.bias.shape != (self.B.shape[0],):
            raise OtwError(f"bias shape {self.bias.shape} != ({self.B.shape[0]},)")

    @property
    def k(self):
        return self.B.shape[0]

    @property
    def n(self):
        return self.B.shape[1]

    def parameters(self):
        return [self.B, self.bias]

    def forward(self, X):
        X, single = _as_inputs(X, self.n)
        Z = X @ self.B.T + self.bias
        return Z[0] if single else Z

    def backward(self, X, G):
        X, single = _as_inputs(X, self.n)
        G = np.asarray(G, dtype=np.float64).reshape(X.shape[0], self.k)
        grad_X = G @ self.B
        return [G.T @ X, G.sum(axis=0)], (grad_X[0] if single else grad_X)


def _require(layer, cls):
    if not isinstance(layer, cls):
        raise OtwError(f"expected a {cls.__name__}, got {type(layer).__name__}")
    return layer


def otw_layer_forward(a, layer):
    return _require(layer, OtwLayer).forward(a)


def otw_layer_backward(a, layer, g):
    """``(grad_B, grad_a)`` of ``sum_i g_i z_i`` for an OTW feature layer."""
    (gB,), ga = _require(layer, OtwLayer).backward(a, g)
    return gB, ga


def dtw_layer_forward(a, layer):
    return _require(layer, DtwLayer).forward(a)


def dtw_layer_backward(a, layer, g):
    (gB,), ga = _require(layer, DtwLayer).backward(a, g)
    return gB, ga


def fc_forward(a, layer):
    return _require(layer, LinearLayer).forward(a)


def fc_backward(a, layer, g):
    """``(grad_B, grad_bias, grad_a)`` for a linear feature layer."""
    (gB, gbias), ga = _require(layer, LinearLayer).backward(a, g)
    return gB, gbias, ga


def make_feature_layer(kind, k, n, rng, params=None, init=None):
    """Build a feature layer with ``k`` references of length ``n``.

    Distance layers start from ``init`` rows (e.g. training samples) when given,
    otherwise from N(0, 0.1^2) noise; the linear layer uses Glorot-uniform weights.
    """
    if kind == "linear":
        lim = np.sqrt(6.0 / (n + k))
        return LinearLayer(rng.uniform(-lim, lim, size=(k, n)))
    B = np.array(init, dtype=np.float64) if init is not None else rng.normal(0.0, 0.1, size=(k, n))
    if kind == "otw":
        return OtwLayer(B, params)
    if kind == "dtw":
        return DtwLayer(B, params)
    raise OtwError(f"unknown feature layer kind {kind!r}")


class MlpModel:
    """Feature layer followed by ReLU dense layers and a softmax output.

    Parameters
    ----------
    feature : OtwLayer, DtwLayer or LinearLayer
    hidden : sequence of int
        Sizes of the dense hidden layers after the feature layer.
    n_classes : int
    rng : numpy.random.Generator
        Used for Glorot-uniform weight initialisation.
    feature_scale : float
        Features are multiplied by this constant before the first dense layer.
    """

    def __init__(self, feature, hidden, n_classes, rng, feature_scale=1.0):
        if n_classes < 2:
            raise OtwError("need at least two classes")
        self.feature = feature
        self.hidden = [int(h) for h in hidden]
        if any(h < 1 for h in self.hidden):
            raise OtwError("hidden sizes must be positive")
        self.n_classes = int(n_classes)
        self.feature_scale = float(feature_scale)
        sizes = [feature.k] + self.hidden + [self.n_classes]
        self.weights = []
        self.biases = []
        for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
            lim = np.sqrt(6.0 / (fan_in + fan_out))
            self.weights.append(rng.uniform(-lim, lim, size=(fan_in, fan_out)))
            self.biases.append(np.zeros(fan_out))

    def parameters(self):
        return self.feature.parameters() + self.weights + self.biases

    def forward(self, X):
        """Logits for a ``(N, n)`` batch; caches activations for :meth:`backward`."""
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        h = self.feature.forward(X) * self.feature_scale
        acts = [h]
        for idx, (W, b) in enumerate(zip(self.weights, self.biases)):
            h = h @ W + b
            if idx < len(self.weights) - 1:
                h = np.maximum(h, 0.0)
            acts.append(h)
        self._cache = (X, acts)
        return h

    def backward(self, dlogits):
        """Gradients for :meth:`parameters`, in the same order."""
        X, acts = self._cache
        gW = [None] * len(self.weights)
        gb = [None] * len(self.biases)
        g = dlogits
        for idx in range(len(self.weights) - 1, -1, -1):
            if idx < len(self.weights) - 1:
                g = g * (acts[idx + 1] > 0)
            gW[idx] = acts[idx].T @ g
            gb[idx] = g.sum(axis=0)
            g = g @ self.weights[idx].T
        g_feat, _ = self.feature.backward(X, g * self.feature_scale)
        return g_feat + gW + gb

    def predict(self, X):
        return np.argmax(self.forward(X), axis=1)


def softmax_cross_entropy(logits, labels):
    """Mean cross-entropy and its gradient with respect to the logits."""
    z = logits - logits.max(axis=1, keepdims=True)
    logp = z - np.log(np.exp(z).sum(axis=1, keepdims=True))
    N = logits.shape[0]
    loss = -logp[np.arange(N), labels].mean()
    grad = np.exp(logp)
    grad[np.arange(N), labels] -= 1.0
    return float(loss), grad / N


class Adam:
    """Adam update rule applied in place to a list of arrays."""

    def __init__(self, params, lr=1e-3, beta1=0.9, beta2=0.999, eps=1e-8):
        self.params = params
        self.lr, self.beta1, self.beta2, self.eps = lr, beta1, beta2, eps
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros_like(p) for p in params]
        self.t = 0

    def step(self, grads):
        self.t += 1
        c1 = 1.0 - self.beta1**self.t
        c2 = 1.0 - self.beta2**self.t
        for p, g, m, v in zip(self.params, grads, self.m, self.v):
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            p -= self.lr * (m / c1) / (np.sqrt(v / c2) + self.eps)


@dataclass
class EpochRecord:
    epoch: int
    wall_seconds: float
    train_loss: float
    test_error: float
    min_test_error: float


HISTORY_FIELDS = ("epoch", "wall_seconds", "train_loss", "test_error", "min_test_error")


def train(model, train_set, test_set, epochs=500, lr=1e-3, batch_size=32, seed=0, target_error=None):
    """Mini-batch Adam on softmax cross-entropy.

    ``wall_seconds`` accumulates the time spent in training steps only; test
    evaluation after each epoch is not counted. Training stops early once the
    test error reaches ``target_error`` (if given).

    Returns
    -------
    list of EpochRecord
    """
    if train_set.length != model.feature.n or test_set.length != model.feature.n:
        raise LengthMismatchError("dataset length does not match the feature layer")
    if train_set.labels.max() >= model.n_classes or train_set.labels.min() < 0:
        raise OtwError("labels must lie in [0, n_classes)")
    rng = np.random.default_rng(seed)
    opt = Adam(model.parameters(), lr=lr)
    X, y = train_set.series, train_set.labels
    history = []
    wall = 0.0
    best = np.inf
    for epoch in range(1, epochs + 1):
        t0 = time.perf_counter()
        order = rng.permutation(len(y))
        total = 0.0
        for start in range(0, len(y), batch_size):
            idx = order[start : start + batch_size]
            loss, dlogits = softmax_cross_entropy(model.forward(X[idx]), y[idx])
            if not np.isfinite(loss):
                raise TrainingError(
                    f"non-finite loss {loss} at epoch {epoch}, batch starting {start}; "
                    f"max |feature| = {np.abs(model.feature.forward(X[idx])).max():.3g}"
                )
            total += loss * len(idx)
            opt.step(model.backward(dlogits))
        wall += time.perf_counter() - t0
        err = float(np.mean(model.predict(test_set.series) != test_set.labels))
        best = min(best, err)
        history.append(EpochRecord(epoch, wall, total / len(y), err, best))
        if target_error is not None and best <= target_error:
            break
    return history


def time_to_error(history, target=0.0):
    """Cumulative training seconds until ``min_test_error <= target`` (inf if never)."""
    for rec in history:
        if rec.min_test_error <= target:
            return rec.wall_seconds
    return float("inf")
