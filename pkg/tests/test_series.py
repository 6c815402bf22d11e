import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from otw.errors import InvalidSeriesError, WindowError
from otw.series import as_series, prefix_sums, split_signs, windowed_prefix_sums, z_normalize

finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)
series = arrays(np.float64, st.integers(1, 40), elements=finite)


@pytest.mark.parametrize(
    "a, expected",
    [((1, 2, 3), (1, 3, 6)), ((0, 0, 0), (0, 0, 0)), ((5,), (5,))],
)
def test_prefix_sums_examples(a, expected):
    np.testing.assert_array_equal(prefix_sums(a), expected)


@pytest.mark.parametrize(
    "s, expected",
    [(2, (1, 3, 5)), (3, (1, 3, 6)), (1, (1, 2, 3))],
)
def test_windowed_prefix_sums_examples(s, expected):
    np.testing.assert_array_equal(windowed_prefix_sums([1, 2, 3], s), expected)


@pytest.mark.parametrize("s", [0, 4, -1])
def test_window_out_of_range(s):
    with pytest.raises(WindowError):
        windowed_prefix_sums([1, 2, 3], s)


def test_windowed_matches_definition(rng):
    a = rng.normal(size=50)
    for s in (1, 2, 7, 49, 50):
        want = [a[max(0, i - s + 1) : i + 1].sum() for i in range(50)]
        np.testing.assert_allclose(windowed_prefix_sums(a, s), want, rtol=1e-12, atol=1e-12)


def test_windowed_batched(rng):
    A = rng.normal(size=(3, 10))
    out = windowed_prefix_sums(A, 4)
    for row, a in zip(out, A):
        np.testing.assert_array_equal(row, windowed_prefix_sums(a, 4))


@given(series)
def test_window_extremes_exact(a):
    np.testing.assert_array_equal(windowed_prefix_sums(a, a.size), prefix_sums(a))
    np.testing.assert_array_equal(windowed_prefix_sums(a, 1), a)


@pytest.mark.parametrize(
    "a, pos, neg",
    [((1, -2, 0), (1, 0, 0), (0, 2, 0)), ((3, 4), (3, 4), (0, 0)), ((-3,), (0,), (3,))],
)
def test_split_signs_examples(a, pos, neg):
    p, n = split_signs(a)
    np.testing.assert_array_equal(p, pos)
    np.testing.assert_array_equal(n, neg)


@given(series)
def test_split_signs_reconstruct(a):
    p, n = split_signs(a)
    np.testing.assert_array_equal(p - n, a)
    assert np.all(p * n == 0)


@settings(max_examples=50)
@given(series, series, finite, finite)
def test_prefix_sums_linear(a, b, alpha, beta):
    n = min(a.size, b.size)
    a, b = a[:n], b[:n]
    lhs = prefix_sums(alpha * a + beta * b)
    rhs = alpha * prefix_sums(a) + beta * prefix_sums(b)
    scale = np.abs(alpha) * np.abs(a).sum() + np.abs(beta) * np.abs(b).sum() + 1.0
    assert np.max(np.abs(lhs - rhs)) <= 1e-12 * scale


def test_z_normalize_examples():
    np.testing.assert_array_equal(z_normalize([0, 0, 0]), [0, 0, 0])
    np.testing.assert_allclose(z_normalize([1, 3]), [-1, 1], atol=1e-15)
    np.testing.assert_array_equal(z_normalize([0.1, 0.1, 0.1]), [0, 0, 0])


def test_z_normalize_idempotent(rng):
    z = z_normalize(rng.normal(3, 2, size=100))
    assert abs(z.mean()) < 1e-12 and abs(z.std() - 1) < 1e-12
    np.testing.assert_allclose(z_normalize(z), z, atol=1e-12)


@pytest.mark.parametrize("bad", [[], [[1, 2]], [1, np.nan], [np.inf]])
def test_as_series_rejects(bad):
    with pytest.raises(InvalidSeriesError):
        as_series(bad)
