"""Randomised checks of the OTW bounds and identities against exact references.

Instances are drawn from small halves (``{0, 0.5, ..., 2}``) so that every
sum involved is exact in double precision and equalities can be tested with
``==``.
"""

from dataclasses import dataclass, field

import numpy as np

from .baselines import minkowski
from .distance import OtwParams, otw
from .oracle import (
    TOL,
    check_shift_sensitivity,
    check_theorem1,
    solve_transport_lp,
    unbalanced_ot,
    wasserstein_1d_closed_form,
)


@dataclass
class SweepReport:
    name: str
    total: int = 0
    passed: int = 0
    max_violation: float = 0.0
    details: dict = field(default_factory=dict)

    @property
    def ok(self):
        return self.passed == self.total

    def record(self, holds, violation):
        self.total += 1
        self.passed += bool(holds)
        self.max_violation = max(self.max_violation, float(violation))

    def to_dict(self):
        return {
            "name": self.name,
            "total": self.total,
            "passed": self.passed,
            "ok": self.ok,
            "max_violation": self.max_violation,
            "details": self.details,
        }


def _halves(rng, n, high=4):
    return rng.integers(0, high + 1, size=n) / 2.0


def theorem1_sweep(count=1000, seed=0, n_range=(2, 12), ms=(0.3, 1.0, 3.0)):
    """Exact unbalanced cost never exceeds the global OTW value."""
    rng = np.random.default_rng(seed)
    rep = SweepReport("theorem1")
    gaps = []
    for k in range(count):
        n = int(rng.integers(n_range[0], n_range[1] + 1))
        m = ms[k % len(ms)]
        a, b = _halves(rng, n), _halves(rng, n)
        lhs, rhs, holds = check_theorem1(a, b, m)
        rep.record(holds, max(0.0, lhs - rhs))
        gaps.append(rhs - lhs)
    gaps = np.array(gaps)
    rep.details = {
        "gap_min": float(gaps.min()),
        "gap_median": float(np.median(gaps)),
        "gap_max": float(gaps.max()),
        "tight_fraction": float(np.mean(gaps <= TOL)),
    }
    return rep


def shift_sweep(count=500, seed=0, n_max=10, t_max=3, ms=(0.3, 1.0, 3.0)):
    """Delaying a zero-padded ``b`` by ``t`` moves the exact cost by at most ``t * sum(a)``."""
    rng = np.random.default_rng(seed)
    rep = SweepReport("shift_sensitivity")
    for k in range(count):
        n = int(rng.integers(2, n_max + 1))
        t = int(rng.integers(0, min(t_max, n - 1) + 1))
        a = _halves(rng, n)
        b = _halves(rng, n)
        if t:
            b[n - t :] = 0.0
        delta, bound, holds = check_shift_sensitivity(a, b, t, ms[k % len(ms)])
        rep.record(holds, max(0.0, delta - bound))
    return rep


def global_otw_reference(a, b, m):
    """Global OTW written out term by term from full cumulative sums."""
    A, B = np.cumsum(a), np.cumsum(b)
    total = 0.0
    for i in range(len(a) - 1):
        total += abs(A[i] - B[i])
    return m * abs(A[-1] - B[-1]) + total


def interpolation_sweep(count=1000, seed=0, n_range=(1, 64)):
    """Window 1 gives the l1 distance (m = 1); window n gives global OTW."""
    rng = np.random.default_rng(seed)
    rep = SweepReport("interpolation")
    worst_l1 = worst_glob = 0.0
    for _ in range(count):
        n = int(rng.integers(n_range[0], n_range[1] + 1))
        a, b = _halves(rng, n, 8), _halves(rng, n, 8)
        m = float(rng.integers(0, 9)) / 2.0
        local = float(otw(a, b, OtwParams(m=1.0, s=1)))
        glob = float(otw(a, b, OtwParams(m=m, s=n)))
        e1 = abs(local - float(minkowski(a, b, 1)))
        e2 = abs(glob - global_otw_reference(a, b, m))
        worst_l1, worst_glob = max(worst_l1, e1), max(worst_glob, e2)
        rep.record(e1 == 0.0 and e2 == 0.0, max(e1, e2))
    rep.details = {"max_err_s1_vs_l1": worst_l1, "max_err_sn_vs_global": worst_glob}
    return rep


def balanced_sweep(count=500, seed=0, n_range=(1, 12), ms=(0.3, 1.0, 3.0)):
    """Equal masses: OTW (full window, beta 0) = closed form = balanced transport LP.

    The sink-extended problem can also route mass ``a -> sink -> b`` for ``2m``
    per unit, so it equals the balanced cost only when ``2m >= n - 1``; in
    general it equals the balanced LP with ground cost ``min(|i - j|, 2m)``.
    Both facts are checked on every instance.
    """
    rng = np.random.default_rng(seed)
    rep = SweepReport("balanced_equivalence")
    worst = {"otw_vs_closed_form": 0.0, "lp_vs_closed_form": 0.0, "sink_vs_truncated_lp": 0.0,
             "sink_vs_closed_form_large_m": 0.0}
    below = 0
    for k in range(count):
        n = int(rng.integers(n_range[0], n_range[1] + 1))
        a, b = _halves(rng, n), _halves(rng, n)
        diff = a.sum() - b.sum()
        if diff > 0:
            b[-1] += diff
        else:
            a[-1] -= diff
        m = ms[k % len(ms)]
        idx = np.arange(n)
        ground = np.abs(idx[:, None] - idx[None, :]).astype(float)
        value = float(otw(a, b, OtwParams(m=m)))
        closed = wasserstein_1d_closed_form(a, b)
        lp = solve_transport_lp(a, b, ground).objective
        sink = unbalanced_ot(a, b, m)
        truncated = solve_transport_lp(a, b, np.minimum(ground, 2 * m)).objective
        sink_large = unbalanced_ot(a, b, max(m, (n - 1) / 2))
        errs = {
            "otw_vs_closed_form": abs(value - closed),
            "lp_vs_closed_form": max(abs(lp - closed), abs(lp - value)),
            "sink_vs_truncated_lp": abs(sink - truncated),
            "sink_vs_closed_form_large_m": abs(sink_large - closed),
        }
        for key, e in errs.items():
            worst[key] = max(worst[key], e)
        below += sink < closed - TOL
        holds = errs["otw_vs_closed_form"] <= 1e-12 and all(
            errs[key] <= TOL for key in errs if key != "otw_vs_closed_form"
        )
        rep.record(holds, max(errs.values()))
    rep.details = {**{f"max_err_{k}": v for k, v in worst.items()}, "sink_below_balanced_count": int(below)}
    return rep


def run_all(seed=0, theorem=1000, shift=500, interp=1000, balanced=500):
    return [
        theorem1_sweep(theorem, seed),
        shift_sweep(shift, seed),
        interpolation_sweep(interp, seed),
        balanced_sweep(balanced, seed),
    ]
