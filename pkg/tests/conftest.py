import numpy as np
import pytest


def naive_otw(a, b, m=1.0, s=None, beta=0.0, sign="direct"):
    """OTW straight from its definition: explicit window loops, no prefix tricks."""
    a = [float(x) for x in a]
    b = [float(x) for x in b]
    n = len(a)
    s = n if s is None else min(s, n)
    if sign == "split":
        pos = naive_otw([max(x, 0) for x in a], [max(x, 0) for x in b], m, s, beta)
        neg = naive_otw([max(-x, 0) for x in a], [max(-x, 0) for x in b], m, s, beta)
        return pos + neg

    def loss(x):
        if beta == 0:
            return abs(x)
        return x * x / (2 * beta) if abs(x) < beta else abs(x) - beta / 2

    total = 0.0
    for i in range(n):
        lo = max(0, i - s + 1)
        d = sum(a[lo : i + 1]) - sum(b[lo : i + 1])
        total += (m if i == n - 1 else 1.0) * loss(d)
    return total


def central_diff(f, x, h=1e-6):
    x = np.array(x, dtype=float)
    g = np.zeros_like(x)
    flat = x.reshape(-1)
    gf = g.reshape(-1)
    for i in range(flat.size):
        old = flat[i]
        flat[i] = old + h
        fp = f(x)
        flat[i] = old - h
        fm = f(x)
        flat[i] = old
        gf[i] = (fp - fm) / (2 * h)
    return g


def rel_err(got, want):
    got, want = np.asarray(got, float), np.asarray(want, float)
    return float(np.linalg.norm(got - want) / max(np.linalg.norm(want), 1e-12))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
