"""Exact small-scale optimal transport, used as ground truth for OTW.

:func:`solve_transport_lp` is a transportation simplex (north-west corner
start, dual potentials, Bland's rule for entering and leaving cells). It is
meant for problems of a few dozen cells, not for speed.

The sink construction turns an unbalanced pair ``a, b`` into a balanced one
by appending the other series' total mass to each and charging ``m`` per unit
sent to or from the extra slot.
"""

from collections import namedtuple
from dataclasses import dataclass

import numpy as np

from .errors import NegativeMassError, OracleCapError, OtwError, UnbalancedError
from .distance import OtwParams, otw
from .series import as_series

TOL = 1e-9
DEFAULT_CAP = 16

Theorem1Check = namedtuple("Theorem1Check", "lhs rhs holds")
ShiftCheck = namedtuple("ShiftCheck", "delta bound holds")


@dataclass
class TransportPlan:
    """Optimal coupling of a balanced transportation problem.

    ``row_potential`` and ``col_potential`` are the simplex duals at
    termination; ``costs - u[:, None] - v[None, :] >= 0`` certifies optimality.
    """

    plan: np.ndarray
    objective: float
    supplies: np.ndarray
    demands: np.ndarray
    row_potential: np.ndarray
    col_potential: np.ndarray
    iterations: int

    def reduced_costs(self, costs):
        return np.asarray(costs) - self.row_potential[:, None] - self.col_potential[None, :]


def _nonnegative(x, name):
    x = as_series(x, name)
    if np.any(x < 0):
        raise NegativeMassError(f"{name} must be nonnegative")
    return x


def _northwest(supplies, demands):
    m, n = len(supplies), len(demands)
    X = np.zeros((m, n))
    r = supplies.copy()
    c = demands.copy()
    basis = []
    i = j = 0
    while True:
        x = min(r[i], c[j])
        X[i, j] = x
        basis.append((i, j))
        r[i] -= x
        c[j] -= x
        if i == m - 1 and j == n - 1:
            break
        if i == m - 1:
            j += 1
        elif j == n - 1 or r[i] <= c[j]:
            i += 1
        else:
            j += 1
    return X, basis


def _potentials(basis, costs, m, n):
    u = np.full(m, np.nan)
    v = np.full(n, np.nan)
    u[0] = 0.0
    rows = [[] for _ in range(m)]
    cols = [[] for _ in range(n)]
    for i, j in basis:
        rows[i].append(j)
        cols[j].append(i)
    stack = [("r", 0)]
    while stack:
        kind, k = stack.pop()
        if kind == "r":
            for j in rows[k]:
                if np.isnan(v[j]):
                    v[j] = costs[k, j] - u[k]
                    stack.append(("c", j))
        else:
            for i in cols[k]:
                if np.isnan(u[i]):
                    u[i] = costs[i, k] - v[k]
                    stack.append(("r", i))
    return u, v


def _tree_path(basis, m, start_row, end_col):
    """Basic cells on the tree path from row ``start_row`` to column ``end_col``."""
    adj = {}
    for i, j in basis:
        adj.setdefault(("r", i), []).append((("c", j), (i, j)))
        adj.setdefault(("c", j), []).append((("r", i), (i, j)))
    target = ("c", end_col)
    prev = {("r", start_row): None}
    stack = [("r", start_row)]
    while stack:
        node = stack.pop()
        if node == target:
            break
        for nxt, cell in adj.get(node, ()):
            if nxt not in prev:
                prev[nxt] = (node, cell)
                stack.append(nxt)
    cells = []
    node = target
    while prev[node] is not None:
        node, cell = prev[node]
        cells.append(cell)
    # ordered from the column end back to the starting row
    return cells


def solve_transport_lp(supplies, demands, costs, max_iter=10_000):
    """Solve ``min <T, C>`` s.t. ``T >= 0``, row sums ``supplies``, column sums ``demands``.

    Parameters
    ----------
    supplies : array_like, shape (m,)
    demands : array_like, shape (n,)
    costs : array_like, shape (m, n)
        Finite, nonnegative ground costs.

    Returns
    -------
    TransportPlan

    Raises
    ------
    UnbalancedError
        If the totals differ by more than ``1e-9`` (relative to their size).
    NegativeMassError
        If a supply or demand is negative.
    """
    s = _nonnegative(supplies, "supplies")
    d = _nonnegative(demands, "demands")
    C = np.asarray(costs, dtype=np.float64)
    if C.shape != (s.size, d.size):
        raise OtwError(f"cost matrix shape {C.shape} != ({s.size}, {d.size})")
    if not np.all(np.isfinite(C)) or np.any(C < 0):
        raise OtwError("costs must be finite and nonnegative")
    if abs(s.sum() - d.sum()) > TOL * max(1.0, s.sum()):
        raise UnbalancedError(f"supply total {s.sum()} != demand total {d.sum()}")

    m, n = C.shape
    X, basis = _northwest(s, d)
    scale = max(1.0, float(C.max()))
    it = 0
    while True:
        u, v = _potentials(basis, C, m, n)
        R = C - u[:, None] - v[None, :]
        in_basis = set(basis)
        entering = None
        for i in range(m):
            for j in range(n):
                if (i, j) not in in_basis and R[i, j] < -1e-12 * scale:
                    entering = (i, j)
                    break
            if entering is not None:
                break
        if entering is None:
            break
        it += 1
        if it > max_iter:
            raise RuntimeError("transportation simplex did not converge")
        path = _tree_path(basis, m, entering[0], entering[1])
        minus = path[0::2]
        theta = min(X[c] for c in minus)
        leaving = min(c for c in minus if X[c] == theta)
        X[entering] += theta
        for k, c in enumerate(path):
            X[c] += -theta if k % 2 == 0 else theta
        X[leaving] = 0.0
        basis.remove(leaving)
        basis.append(entering)

    X = np.maximum(X, 0.0)
    return TransportPlan(X, float(np.sum(X * C)), s, d, u, v, it)


def wasserstein_1d_closed_form(a, b):
    """Balanced 1-D transport cost under ``|i - j|``: ``sum_i |A(i) - B(i)|``."""
    a = _nonnegative(a, "a")
    b = _nonnegative(b, "b")
    if a.size != b.size:
        raise OtwError(f"series lengths differ: {a.size} != {b.size}")
    if abs(a.sum() - b.sum()) > TOL * max(1.0, a.sum()):
        raise UnbalancedError(f"masses differ: {a.sum()} != {b.sum()}")
    return float(np.abs(np.cumsum(a) - np.cumsum(b)).sum())


def extend_with_sink(a, b):
    """Append ``sum(b)`` to ``a`` and ``sum(a)`` to ``b`` so both totals agree."""
    a = _nonnegative(a, "a")
    b = _nonnegative(b, "b")
    return np.append(a, b.sum()), np.append(b, a.sum())


def build_sink_cost_matrix(n, m):
    """``(n+1) x (n+1)`` costs: ``|i-j|`` inside, ``m`` to/from the sink, 0 sink-to-sink."""
    if n < 1:
        raise OtwError(f"n must be >= 1, got {n}")
    if m < 0:
        raise OtwError(f"waste cost must be >= 0, got {m}")
    idx = np.arange(n + 1)
    D = np.abs(idx[:, None] - idx[None, :]).astype(np.float64)
    D[n, :] = m
    D[:, n] = m
    D[n, n] = 0.0
    return D


def unbalanced_ot(a, b, m, cap=DEFAULT_CAP):
    """Exact unbalanced transport cost between nonnegative ``a`` and ``b``."""
    a = _nonnegative(a, "a")
    b = _nonnegative(b, "b")
    if a.size != b.size:
        raise OtwError(f"series lengths differ: {a.size} != {b.size}")
    if a.size > cap:
        raise OracleCapError(f"oracle capped at n <= {cap}, got {a.size}")
    a_hat, b_hat = extend_with_sink(a, b)
    return solve_transport_lp(a_hat, b_hat, build_sink_cost_matrix(a.size, m)).objective


def check_theorem1(a, b, m, cap=DEFAULT_CAP):
    """Compare the exact unbalanced cost with its global-window OTW upper bound."""
    lhs = unbalanced_ot(a, b, m, cap)
    rhs = float(otw(a, b, OtwParams(m=m)))
    return Theorem1Check(lhs, rhs, lhs <= rhs + TOL)


def shift(b, t):
    """Shift ``b`` right by ``t`` places, filling with zeros."""
    b = np.asarray(b, dtype=np.float64)
    out = np.zeros_like(b)
    out[t:] = b[: b.size - t]
    return out


def check_shift_sensitivity(a, b, t, m, cap=DEFAULT_CAP):
    """Change of the exact unbalanced cost when ``b`` is delayed by ``t`` places.

    ``b`` must end in ``t`` zeros so the shift preserves its mass. The bound is
    ``t * sum(a)``.
    """
    a = _nonnegative(a, "a")
    b = _nonnegative(b, "b")
    n = b.size
    if not 0 <= t < n:
        raise OtwError(f"shift t={t} must satisfy 0 <= t < n={n}")
    if t and np.any(b[n - t :] != 0):
        raise OtwError(f"b must be zero in its last {t} entries")
    delta = abs(unbalanced_ot(a, shift(b, t), m, cap) - unbalanced_ot(a, b, m, cap))
    bound = t * float(a.sum())
    return ShiftCheck(delta, bound, delta <= bound + TOL)
