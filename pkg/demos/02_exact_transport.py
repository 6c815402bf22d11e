"""
Checking OTW against exact unbalanced transport
===============================================

The oracle solves the unbalanced problem exactly as a transportation LP with
a sink node, using a small transportation simplex. OTW is a closed-form upper
bound on that LP; when both series carry equal mass and the window is full,
it is the 1-D Wasserstein distance.
"""

import numpy as np

from otw import otw
from otw.oracle import (
    check_shift_sensitivity,
    check_theorem1,
    solve_transport_lp,
    unbalanced_ot,
    wasserstein_1d_closed_form,
)

a = np.array([1.0, 0.0, 2.0, 0.0, 0.5])
b = np.array([0.0, 1.5, 0.0, 0.0, 2.0])

# Upper bound: exact cost <= OTW.
for m in (0.3, 1.0, 3.0):
    lhs, rhs, holds = check_theorem1(a, b, m)
    print(f"m = {m}: exact {lhs:.3f} <= otw {rhs:.3f}: {holds}")

# Equal masses, full window: OTW, the closed form and the balanced LP agree.
b_bal = b * a.sum() / b.sum()
idx = np.arange(a.size)
cost = np.abs(idx[:, None] - idx[None, :]).astype(float)
print("otw         ", float(otw(a, b_bal)))
print("closed form ", wasserstein_1d_closed_form(a, b_bal))
print("balanced LP ", solve_transport_lp(a, b_bal, cost).objective)

# With a cheap sink the unbalanced problem may detour mass through it
# (a -> sink -> b costs 2m), so it can undercut the balanced distance.
# It always equals the balanced LP under the truncated cost min(|i-j|, 2m).
for m in (0.5, 1.0, 2.0):
    trunc = solve_transport_lp(a, b_bal, np.minimum(cost, 2 * m)).objective
    print(f"m = {m}: sink problem {unbalanced_ot(a, b_bal, m):.3f}, truncated-cost LP {trunc:.3f}")

# Delaying a zero-padded b by t moves the exact cost by at most t * sum(a).
b_pad = np.array([0.0, 1.5, 0.5, 0.0, 0.0])
for t in (1, 2):
    delta, bound, holds = check_shift_sensitivity(a, b_pad, t, m=1.0)
    print(f"shift {t}: |change| {delta:.3f} <= {bound:.3f}: {holds}")
