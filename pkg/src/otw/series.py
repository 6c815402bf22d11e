"""Sequence validation and the cumulative-sum machinery behind every distance.

A time series is represented as a 1-D ``float64`` numpy array. Functions in
this module also accept stacked series of shape ``(..., n)`` and operate along
the last axis, which is how the batched distance code uses them.
"""

import numpy as np

from .errors import InvalidSeriesError, WindowError

TimeSeries = np.ndarray


def as_series(a, name="a"):
    """Validate ``a`` as a univariate time series and return it as float64.

    Parameters
    ----------
    a : array_like, shape (n,)
    name : str
        Used in error messages.

    Raises
    ------
    InvalidSeriesError
        If ``a`` is not 1-D, is empty, or has NaN/inf entries.
    """
    arr = np.asarray(a, dtype=np.float64)
    if arr.ndim != 1:
        raise InvalidSeriesError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.size == 0:
        raise InvalidSeriesError(f"{name} must have at least one entry")
    if not np.all(np.isfinite(arr)):
        raise InvalidSeriesError(f"{name} contains NaN or infinite values")
    return arr


def as_batch(a, name="a"):
    """Like :func:`as_series` but allows leading batch dimensions."""
    arr = np.asarray(a, dtype=np.float64)
    if arr.ndim == 0 or arr.shape[-1] == 0:
        raise InvalidSeriesError(f"{name} must have at least one entry")
    if not np.all(np.isfinite(arr)):
        raise InvalidSeriesError(f"{name} contains NaN or infinite values")
    return arr


def prefix_sums(a):
    """Cumulative sums ``A(i) = a_1 + ... + a_i`` along the last axis."""
    return np.cumsum(as_batch(a), axis=-1)


def windowed_prefix_sums(a, s):
    """Trailing window sums ``A_s(i) = A(i) - A(i - s)``.

    The first ``s`` entries are plain prefix sums. ``s == 1`` returns a copy of
    ``a`` and ``s == n`` the full prefix sums, both bit-exact.

    Raises
    ------
    WindowError
        If ``s < 1`` or ``s > n``.
    """
    a = as_batch(a)
    n = a.shape[-1]
    s = int(s)
    if s < 1 or s > n:
        raise WindowError(f"window s={s} outside [1, {n}]")
    if s == 1:
        return a.copy()
    full = np.cumsum(a, axis=-1)
    if s == n:
        return full
    out = full.copy()
    out[..., s:] -= full[..., :-s]
    return out


def split_signs(a):
    """Return ``(max(a, 0), max(-a, 0))``; their difference reconstructs ``a``."""
    a = as_batch(a)
    return np.maximum(a, 0.0), np.maximum(-a, 0.0)


def z_normalize(a):
    """Shift and scale to zero mean and unit (population) standard deviation.

    Constant series map to all zeros instead of raising.
    """
    a = as_batch(a)
    mu = a.mean(axis=-1, keepdims=True)
    centred = a - mu
    sd = np.sqrt(np.mean(centred * centred, axis=-1, keepdims=True))
    # rounding leaves sd ~ 1e-17 on constant rows; treat those as constant
    flat = sd <= 1e-14 * np.maximum(1.0, np.abs(mu))
    return np.where(flat, 0.0, centred / np.where(flat, 1.0, sd))
