"""
Linear versus quadratic: timing OTW against DTW
===============================================

A short version of ``otw bench``. Per-pair times are medians of repeated
runs; the log-log slope estimates the exponent of n.
"""

from otw.bench import run_bench

res = run_bench(lo=64, hi=2048, layer_hi=256, reps=5)
print(f"{'metric':<10}{'n':>6}{'seconds per pair':>20}")
for r in res["records"]:
    print(f"{r.metric:<10}{r.n:>6}{r.median_seconds:>20.3e}")
print()
for metric, slope in res["slopes"].items():
    print(f"slope {metric:<10} {slope:.2f}")
print(f"single pair at n={res['speedup_n']}: OTW is {res['speedup']:.0f}x faster than DTW")
