from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from subcenter import (
    Dataset,
    InterceptMode,
    Variant,
    center,
    full_means,
    ols_slope_no_intercept,
    ols_with_intercept,
    recover_intercept,
    shift,
    take_rows,
    weighted_means,
    wls_slope_no_intercept,
    wls_with_intercept,
)
from subcenter.data import CenteringStats
from subcenter.errors import DimensionMismatch, NonPositiveWeight, RankDeficient
from subcenter.verification import unbiasedness_z


def random_dataset(rng, n=60, p=3):
    X = rng.normal(size=(n, p)) * rng.uniform(0.5, 4, size=p) + rng.normal(0, 5, size=p)
    return Dataset(X, 2.0 + X @ rng.normal(size=p) + rng.normal(size=n))


def test_ols_perfect_fit():
    fit = ols_with_intercept(Dataset([[1.0], [2.0], [3.0]], [1.0, 2.0, 3.0]))
    assert fit.alpha == pytest.approx(0.0, abs=1e-14)
    np.testing.assert_allclose(fit.beta, [1.0])


def test_ols_toy_hand_solved(toy4):
    # Sxx = 1, Sxy = 1 -> slope 1, intercept 1 - 0.5
    fit = ols_with_intercept(toy4)
    assert fit.alpha == pytest.approx(0.5, abs=1e-14)
    np.testing.assert_allclose(fit.beta, [1.0], atol=1e-14)


def test_ols_rank_deficient(rng):
    x = rng.normal(size=10)
    with pytest.raises(RankDeficient) as exc:
        ols_with_intercept(Dataset(np.column_stack([x, x]), rng.normal(size=10)))
    assert exc.value.effective_rank == 2
    with pytest.raises(RankDeficient):
        ols_with_intercept(Dataset(np.ones((5, 1)), np.arange(5.0)))


def test_ols_normal_equations_residual(rng):
    d = random_dataset(rng)
    fit = ols_with_intercept(d)
    res = d.y - fit.alpha - d.X @ fit.beta
    assert np.linalg.norm(d.design().T @ res) <= 1e-8 * np.linalg.norm(d.y)


def test_no_intercept_examples(toy4):
    fit = ols_slope_no_intercept(Dataset([[-1.0], [0.0], [1.0]], [-1.0, 0.0, 1.0]))
    np.testing.assert_allclose(fit.beta, [1.0])
    assert fit.alpha is None and fit.variant is Variant.SUB_OLS_WOI
    # rows {0,1,2} of the centered toy data: 0.5 / 0.75
    sub = take_rows(center(toy4), [0, 1, 2])
    assert sub.X.ravel().tolist() == [-0.5, -0.5, 0.5] and sub.y.tolist() == [-1.0, 0.0, 0.0]
    assert ols_slope_no_intercept(sub).beta[0] == pytest.approx(float(Fraction(2, 3)), abs=1e-15)


def test_recover_intercept_examples(toy4):
    assert recover_intercept(CenteringStats(np.array([2.0]), 2.0), [1.0]) == 0.0
    s = full_means(toy4)
    assert recover_intercept(s, [1.0]) == pytest.approx(ols_with_intercept(toy4).alpha, abs=1e-14)
    assert recover_intercept(s, [0.0]) == s.y_bar
    with pytest.raises(DimensionMismatch):
        recover_intercept(s, [1.0, 2.0])
    with pytest.raises(TypeError):
        recover_intercept(s, [1.0], InterceptMode.WEIGHTED)


def test_recover_intercept_weighted():
    ws = weighted_means(Dataset([[0.0], [4.0]], [1.0, 5.0]), [0.25, 0.75])
    assert recover_intercept(ws, [1.0]) == pytest.approx(1.0)
    assert recover_intercept(ws, [1.0], InterceptMode.WEIGHTED) == pytest.approx(1.0)


@pytest.mark.parametrize("seed", range(50))
def test_classical_centering_equivalence(seed):
    d = random_dataset(np.random.default_rng(seed), n=80, p=1 + seed % 6)
    full = ols_with_intercept(d, Variant.FULL_OLS)
    slope = ols_slope_no_intercept(center(d)).beta
    np.testing.assert_allclose(slope, full.beta, rtol=1e-10, atol=1e-10 * np.abs(full.beta).max())
    assert recover_intercept(full_means(d), slope) == pytest.approx(full.alpha, rel=1e-10, abs=1e-10)


def test_wls_uniform_equals_ols(rng):
    d = random_dataset(rng)
    ols = ols_with_intercept(d)
    wls = wls_with_intercept(d, np.full(d.n, 0.37))
    np.testing.assert_allclose(wls.theta, ols.theta, rtol=1e-10)
    assert wls.variant is Variant.SUB_WLS_WI


def test_wls_perfect_fit_any_weights(rng):
    x = rng.normal(size=(12, 1))
    fit = wls_with_intercept(Dataset(x, x[:, 0]), rng.uniform(0.01, 10, size=12))
    assert fit.alpha == pytest.approx(0.0, abs=1e-12)
    np.testing.assert_allclose(fit.beta, [1.0], atol=1e-12)


def test_wls_hand_solved():
    # weighted normal equations with w = (1, 1, 2) / 4:
    # [1, 5/4; 5/4, 9/4] (a, b) = (9/4, 17/4)  ->  a = -4/11, b = 23/11
    w = [Fraction(1, 4), Fraction(1, 4), Fraction(1, 2)]
    x, y = [0, 1, 2], [0, 1, 4]
    s0 = sum(w)
    s1 = sum(wi * xi for wi, xi in zip(w, x))
    s2 = sum(wi * xi * xi for wi, xi in zip(w, x))
    t0 = sum(wi * yi for wi, yi in zip(w, y))
    t1 = sum(wi * xi * yi for wi, xi, yi in zip(w, x, y))
    det = s0 * s2 - s1 * s1
    a, b = (s2 * t0 - s1 * t1) / det, (s0 * t1 - s1 * t0) / det
    assert (a, b) == (Fraction(-4, 11), Fraction(23, 11))
    fit = wls_with_intercept(Dataset([[0.0], [1.0], [2.0]], [0.0, 1.0, 4.0]), [0.25, 0.25, 0.5])
    assert fit.alpha == pytest.approx(float(a), abs=1e-14)
    assert fit.beta[0] == pytest.approx(float(b), abs=1e-14)


def test_wls_weighted_residual_orthogonality(rng):
    d = random_dataset(rng)
    w = rng.uniform(0.1, 3.0, size=d.n)
    fit = wls_with_intercept(d, w)
    res = d.y - fit.alpha - d.X @ fit.beta
    assert np.linalg.norm(d.design().T @ (w * res)) <= 1e-8 * np.linalg.norm(d.y)


def test_wls_errors(rng):
    d = random_dataset(rng, n=10, p=2)
    with pytest.raises(NonPositiveWeight):
        wls_with_intercept(d, np.r_[0.0, np.ones(9)])
    with pytest.raises(DimensionMismatch):
        wls_with_intercept(d, np.ones(9))
    with pytest.raises(NonPositiveWeight):
        wls_slope_no_intercept(d, -np.ones(10))
    x = rng.normal(size=10)
    with pytest.raises(RankDeficient):
        wls_with_intercept(Dataset(np.column_stack([x, 2 * x]), x), np.ones(10))


def test_wls_no_intercept_examples(rng):
    fit = wls_slope_no_intercept(Dataset([[-1.0], [1.0]], [-2.0, 2.0]), [0.5, 0.5])
    assert fit.beta[0] == pytest.approx(2.0)
    d = random_dataset(rng)
    uni = wls_slope_no_intercept(center(d), np.full(d.n, 1 / d.n), Variant.SUB_WLS_WOI_PLAIN)
    np.testing.assert_allclose(uni.beta, ols_with_intercept(d).beta, rtol=1e-10)
    assert uni.variant is Variant.SUB_WLS_WOI_PLAIN
    # one dominant weight pulls the slope to that row's ratio
    rows = Dataset([[-1.0], [2.0], [0.5]], [3.0, 1.0, -2.0])
    dom = wls_slope_no_intercept(rows, [1.0, 1e6, 1.0])
    assert dom.beta[0] == pytest.approx(1.0 / 2.0, abs=1e-3)
    with pytest.raises(ValueError):
        wls_slope_no_intercept(rows, [1.0, 1.0, 1.0], Variant.SUB_OLS_WOI)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(-1e3, 1e3, allow_nan=False))
def test_response_shift_moves_only_intercepts(seed, c):
    rng = np.random.default_rng(seed)
    d = random_dataset(rng, n=40, p=3)
    dc = Dataset(d.X, d.y + c)
    w = rng.uniform(0.2, 2.0, size=d.n)
    for fit in (lambda z: ols_with_intercept(z), lambda z: wls_with_intercept(z, w)):
        a, b = fit(d), fit(dc)
        assert b.alpha - a.alpha == pytest.approx(c, abs=1e-9 * (1 + abs(c)))
        np.testing.assert_allclose(b.beta, a.beta, atol=1e-10 * (1 + abs(c)), rtol=0)
    s, sc = full_means(d), full_means(dc)
    ba = ols_slope_no_intercept(shift(d, s.x_bar, s.y_bar)).beta
    bb = ols_slope_no_intercept(shift(dc, sc.x_bar, sc.y_bar)).beta
    np.testing.assert_allclose(bb, ba, atol=1e-10 * (1 + abs(c)), rtol=0)
    assert recover_intercept(sc, bb) - recover_intercept(s, ba) == pytest.approx(c, abs=1e-9 * (1 + abs(c)))


def test_shifted_slope_unbiased():
    z = unbiasedness_z(seed=3, reps=2000)
    assert np.all(np.abs(z) <= 4.0), z
