import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from subcenter import Dataset, center, full_means, shift, take_rows, weighted_means
from subcenter.errors import (
    DimensionMismatch,
    IndexOutOfRange,
    NonPositiveWeight,
    WeightNormalization,
)

finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)


def datasets(max_n=30, max_p=4):
    return st.integers(1, max_p).flatmap(
        lambda p: st.integers(p + 2, max_n).flatmap(
            lambda n: st.tuples(arrays(np.float64, (n, p), elements=finite),
                                arrays(np.float64, (n,), elements=finite))
        )
    ).map(lambda xy: Dataset(*xy))


def test_means_small_examples():
    s = full_means(Dataset([[1.0], [2.0], [3.0]], [1.0, 2.0, 3.0]))
    assert s.x_bar.tolist() == [2.0] and s.y_bar == 2.0


def test_means_toy(toy4):
    s = full_means(toy4)
    assert s.x_bar.tolist() == [0.5] and s.y_bar == 1.0


def test_means_match_fsum_oracle(rng):
    X = rng.normal(5.0, 3.0, size=(100, 3)) * [1.0, 1e4, 1e-3]
    y = rng.normal(size=100) + 1e6
    s = full_means(Dataset(X, y))
    oracle = [math.fsum(X[:, j]) / 100 for j in range(3)]
    np.testing.assert_allclose(s.x_bar, oracle, rtol=1e-12)
    assert s.y_bar == pytest.approx(math.fsum(y) / 100, rel=1e-12)


def test_means_large_n_keeps_digits(rng):
    # large offset + many rows: naive accumulation drifts, corrected mean does not
    X = 1e8 + rng.normal(size=(100_000, 2))
    s = full_means(Dataset(X, X[:, 0]))
    oracle = np.array([math.fsum(X[:, j]) / X.shape[0] for j in range(2)])
    np.testing.assert_allclose(s.x_bar, oracle, rtol=1e-15, atol=0)


def test_weighted_uniform_matches_plain(rng):
    d = Dataset(rng.normal(size=(50, 3)), rng.normal(size=50))
    ws = weighted_means(d, np.full(50, 1 / 50))
    s = full_means(d)
    np.testing.assert_allclose(ws.x_bar_w, s.x_bar, atol=1e-12)
    assert ws.y_bar_w == pytest.approx(s.y_bar, abs=1e-12)
    assert ws.C == pytest.approx(50 ** 2)


def test_weighted_point_mass():
    d = Dataset([[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]], [7.0, 8.0, 9.0])
    # a true basis vector has zero entries, so approach it with tiny positive mass
    w = np.array([1e-300, 1.0, 1e-300])
    ws = weighted_means(d, w)
    np.testing.assert_allclose(ws.x_bar_w, [3.0, 4.0])
    assert ws.y_bar_w == pytest.approx(8.0)


def test_weighted_hand_example():
    ws = weighted_means(Dataset([[0.0], [4.0]], [1.0, 5.0]), [0.25, 0.75])
    assert ws.x_bar_w.tolist() == [3.0]
    assert ws.y_bar_w == 4.0
    assert ws.C == pytest.approx(4 + 4 / 3, rel=1e-15)


def test_weighted_errors():
    d = Dataset([[0.0], [4.0]], [1.0, 5.0])
    with pytest.raises(NonPositiveWeight):
        weighted_means(d, [0.0, 1.0])
    with pytest.raises(WeightNormalization):
        weighted_means(d, [0.5, 0.6])
    with pytest.raises(DimensionMismatch):
        weighted_means(d, [1.0])


def test_take_rows_examples(toy4):
    d = Dataset([[5.0], [1.0], [3.0]], [0.0, 0.0, 0.0])
    assert take_rows(d, [2, 2]).X.ravel().tolist() == [3.0, 3.0]
    sub = take_rows(toy4, [1, 3])
    assert sub.X.ravel().tolist() == [0.0, 1.0] and sub.y.tolist() == [1.0, 2.0]
    same = take_rows(toy4, range(4))
    assert np.array_equal(same.X, toy4.X) and np.array_equal(same.y, toy4.y)
    with pytest.raises(IndexOutOfRange):
        take_rows(toy4, [4])
    with pytest.raises(IndexOutOfRange):
        take_rows(toy4, [-1])


def test_shift_examples(toy4):
    assert shift(toy4, [0.5], 0.0).X.ravel().tolist() == [-0.5, -0.5, 0.5, 0.5]
    z = shift(toy4, [0.0], 0.0)
    assert np.array_equal(z.X, toy4.X) and np.array_equal(z.y, toy4.y)
    with pytest.raises(DimensionMismatch):
        shift(toy4, [0.0, 1.0], 0.0)


def test_dataset_validation():
    with pytest.raises(ValueError):
        Dataset([[np.nan]], [1.0])
    with pytest.raises(DimensionMismatch):
        Dataset(np.zeros((3, 2)), np.zeros(2))
    d = Dataset(np.zeros((3, 1)), np.zeros(3))
    with pytest.raises(ValueError):
        d.X[0, 0] = 1.0


def test_csv_roundtrip(tmp_path, rng):
    d = Dataset(rng.normal(size=(7, 3)), rng.normal(size=7))
    path = tmp_path / "d.csv"
    d.to_csv(path)
    back = Dataset.from_csv(path)
    assert np.array_equal(back.X, d.X) and np.array_equal(back.y, d.y)
    first = path.read_text(encoding="utf-8").splitlines()[0]
    assert first.count(",") == 3 and not first[0].isalpha()


@settings(max_examples=60, deadline=None)
@given(datasets())
def test_centering_is_idempotent(d):
    c = center(d)
    s = full_means(c)
    scale = 1.0 + np.abs(d.X).max() + np.abs(d.y).max()
    assert np.all(np.abs(s.x_bar) <= 1e-12 * scale)
    assert abs(s.y_bar) <= 1e-12 * scale
    cc = shift(c, s.x_bar, s.y_bar)
    np.testing.assert_allclose(cc.X, c.X, atol=1e-12 * scale, rtol=0)
    np.testing.assert_allclose(cc.y, c.y, atol=1e-12 * scale, rtol=0)


@settings(max_examples=60, deadline=None)
@given(datasets(), st.data())
def test_subsample_means_are_gathered_means(d, data):
    idx = data.draw(st.lists(st.integers(0, d.n - 1), min_size=1, max_size=20))
    s = full_means(take_rows(d, idx))
    np.testing.assert_allclose(s.x_bar, d.X[idx].mean(axis=0), rtol=1e-12, atol=1e-9)
