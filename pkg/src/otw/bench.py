"""Wall-clock scaling of OTW versus DTW.

Each measurement is the median of ``reps`` timed repetitions after one
discarded warm-up, using :func:`time.perf_counter`. Small series are timed in
batches of pairs so per-call overhead does not mask the per-pair cost; the
reported time is per pair (or per layer pass).
"""

import time
from dataclasses import asdict, dataclass

import numpy as np

from .baselines import DtwParams, dtw, dtw_pairs
from .distance import OtwParams, otw
from .net import DtwLayer, OtwLayer

RECORD_FIELDS = ("metric", "n", "batch", "repetitions", "median_seconds", "throughput")


@dataclass
class BenchRecord:
    """Median seconds per pair (or per layer pass) at series length ``n``.

    ``throughput`` is series elements processed per second (``n / median``).
    """

    metric: str
    n: int
    batch: int
    repetitions: int
    median_seconds: float
    throughput: float

    def to_dict(self):
        return asdict(self)


def time_median(fn, reps=5, warmup=1):
    """Median wall time of ``fn()`` over ``reps`` runs after ``warmup`` discarded runs."""
    if reps < 3:
        raise ValueError("need at least 3 repetitions for a median")
    for _ in range(warmup):
        fn()
    times = []
    for _ in range(reps):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return float(np.median(times))


def doubling_ladder(lo=64, hi=8192):
    out = []
    n = lo
    while n <= hi:
        out.append(n)
        n *= 2
    return out


def fit_slope(ns, seconds):
    """Least-squares slope of ``log2(seconds)`` against ``log2(n)``."""
    return float(np.polyfit(np.log2(ns), np.log2(seconds), 1)[0])


def _record(metric, n, batch, reps, seconds):
    per = seconds / batch
    return BenchRecord(metric, n, batch, reps, per, n / per)


def bench_pairs(ns, reps=5, seed=0, otw_elements=1 << 17, dtw_cells=1 << 18, params=None):
    """Per-pair time of OTW and unconstrained DTW over the lengths ``ns``.

    OTW runs ``otw_elements / n`` pairs per timed call, DTW ``dtw_cells / n^2``
    (at least one).
    """
    params = OtwParams(m=1.0) if params is None else params
    dparams = DtwParams()
    rng = np.random.default_rng(seed)
    records = []
    for n in ns:
        p = max(1, otw_elements // n)
        A, B = rng.random((p, n)), rng.random((p, n))
        records.append(_record("otw", n, p, reps, time_median(lambda: otw(A, B, params), reps)))
        q = max(1, dtw_cells // (n * n))
        A, B = rng.random((q, n)), rng.random((q, n))
        records.append(_record("dtw", n, q, reps, time_median(lambda: dtw_pairs(A, B, dparams), reps)))
    return records


def bench_layers(ns, k=8, reps=5, seed=0):
    """One forward plus backward pass of a k-row OTW and DTW feature layer.

    DTW backward keeps the full n x n table, so keep ``ns`` moderate.
    """
    rng = np.random.default_rng(seed)
    records = []
    for n in ns:
        a = rng.random(n)
        g = np.ones(k)
        for name, layer in (
            ("otw_layer", OtwLayer(rng.random((k, n)), OtwParams(beta=0.1))),
            ("dtw_layer", DtwLayer(rng.random((k, n)))),
        ):
            def step(layer=layer):
                layer.forward(a)
                layer.backward(a, g)

            records.append(_record(name, n, 1, reps, time_median(step, reps)))
    return records


def single_pair_speedup(n=1024, reps=5, seed=0):
    """Ratio of single-pair unconstrained DTW time to single-pair OTW time."""
    rng = np.random.default_rng(seed)
    a, b = rng.random(n), rng.random(n)
    params = OtwParams(m=1.0)
    t_otw = time_median(lambda: otw(a, b, params), reps)
    t_dtw = time_median(lambda: dtw(a, b), reps)
    return t_dtw / t_otw, t_otw, t_dtw


def run_bench(lo=64, hi=8192, layer_hi=1024, reps=5, seed=0, layers=True):
    """Full scaling study: per-pair records, optional layer records, slopes, speedup."""
    t0 = time.perf_counter()
    ns = doubling_ladder(lo, hi)
    records = bench_pairs(ns, reps, seed)
    if layers:
        records += bench_layers(doubling_ladder(lo, min(hi, layer_hi)), reps=reps, seed=seed)
    slopes = {}
    for metric in dict.fromkeys(r.metric for r in records):
        rs = [r for r in records if r.metric == metric]
        if len(rs) >= 2:
            slopes[metric] = fit_slope([r.n for r in rs], [r.median_seconds for r in rs])
    speedup, t_otw, t_dtw = single_pair_speedup(min(1024, hi), reps, seed)
    return {
        "records": records,
        "slopes": slopes,
        "speedup_n": min(1024, hi),
        "speedup": speedup,
        "single_pair_otw_seconds": t_otw,
        "single_pair_dtw_seconds": t_dtw,
        "total_seconds": time.perf_counter() - t0,
    }
