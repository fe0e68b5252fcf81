"""Dataset container, plain and weighted centering statistics, row transforms.

A selection of rows is always an integer index array; the r x n 0/1 selection
matrix is never formed.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import (
    DimensionMismatch,
    IndexOutOfRange,
    NonPositiveWeight,
    WeightNormalization,
)

WEIGHT_SUM_TOL = 1e-10


def _frozen(a: NDArray) -> NDArray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Dataset:
    """Covariates ``X`` (n x p) and responses ``y`` (n,).

    Arrays are copied to float64 and made read-only. The intercept column is
    never stored; see :meth:`design`.
    """

    X: NDArray[np.float64]
    y: NDArray[np.float64]

    def __post_init__(self):
        X = np.array(self.X, dtype=np.float64)
        y = np.array(self.y, dtype=np.float64)
        if X.ndim == 1:
            X = X[:, None]
        if X.ndim != 2 or y.ndim != 1:
            raise DimensionMismatch("X must be 2-D and y 1-D")
        if X.shape[0] != y.shape[0]:
            raise DimensionMismatch(f"X has {X.shape[0]} rows but y has {y.shape[0]}")
        if not (np.isfinite(X).all() and np.isfinite(y).all()):
            raise ValueError("dataset contains NaN or Inf")
        object.__setattr__(self, "X", _frozen(X))
        object.__setattr__(self, "y", _frozen(y))

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]

    def design(self) -> NDArray[np.float64]:
        """Return Z = (1_n, X)."""
        return np.column_stack([np.ones(self.n), self.X])

    @classmethod
    def from_csv(cls, path: str | Path) -> "Dataset":
        """Load a headerless CSV: covariate columns followed by the response."""
        data = np.loadtxt(path, delimiter=",", dtype=np.float64, ndmin=2, encoding="utf-8")
        if data.shape[1] < 2:
            raise DimensionMismatch("CSV needs at least one covariate and one response column")
        return cls(data[:, :-1], data[:, -1])

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            for xi, yi in zip(self.X, self.y):
                writer.writerow([repr(float(v)) for v in xi] + [repr(float(yi))])


@dataclass(frozen=True)
class CenteringStats:
    x_bar: NDArray[np.float64]
    y_bar: float


@dataclass(frozen=True)
class WeightedStats:
    """Weighted means under a positive weight vector summing to one."""

    w: NDArray[np.float64]
    x_bar_w: NDArray[np.float64]
    y_bar_w: float
    C: float


@dataclass(frozen=True)
class ModelSpec:
    alpha: float
    beta: NDArray[np.float64]
    sigma2: float

    def __post_init__(self):
        beta = _frozen(np.array(self.beta, dtype=np.float64).reshape(-1))
        object.__setattr__(self, "beta", beta)
        if not self.sigma2 > 0:
            raise ValueError("sigma2 must be positive")

    @property
    def theta(self) -> NDArray[np.float64]:
        return np.concatenate([[self.alpha], self.beta])


def column_means(A: ArrayLike) -> NDArray[np.float64]:
    """Column means with one residual-correction pass.

    The second pass recovers the digits a naive row-order accumulation loses
    at large n (the corrected mean is accurate to O(eps) relative to the
    column spread rather than O(n eps)).
    """
    A = np.asarray(A, dtype=np.float64)
    m = A.mean(axis=0)
    return m + (A - m).mean(axis=0)


def full_means(d: Dataset) -> CenteringStats:
    xy = column_means(np.column_stack([d.X, d.y]))
    return CenteringStats(x_bar=_frozen(xy[:-1]), y_bar=float(xy[-1]))


def check_weights(w: ArrayLike, n: int | None = None) -> NDArray[np.float64]:
    w = np.asarray(w, dtype=np.float64).reshape(-1)
    if n is not None and w.shape[0] != n:
        raise DimensionMismatch(f"weight vector has length {w.shape[0]}, expected {n}")
    if not np.all(w > 0):
        raise NonPositiveWeight("all weights must be strictly positive")
    if abs(w.sum() - 1.0) > WEIGHT_SUM_TOL:
        raise WeightNormalization(f"weights sum to {w.sum():.15g}, expected 1")
    return w


def weighted_means(d: Dataset, w: ArrayLike) -> WeightedStats:
    """Weighted covariate/response means ``X^T w``, ``w^T y`` and ``C = sum 1/w``."""
    w = check_weights(w, d.n)
    xy = np.column_stack([d.X, d.y])
    m = xy.T @ w
    # sum(w) == 1, so this is the weighted mean of the residuals
    m = m + (xy - m).T @ w
    return WeightedStats(
        w=_frozen(w.copy()),
        x_bar_w=_frozen(m[:-1]),
        y_bar_w=float(m[-1]),
        C=float(np.sum(1.0 / w)),
    )


def take_rows(d: Dataset, idx: ArrayLike) -> Dataset:
    """Gather rows ``idx`` (duplicates allowed)."""
    idx = np.asarray(idx, dtype=np.intp).reshape(-1)
    if idx.size and (idx.min() < 0 or idx.max() >= d.n):
        raise IndexOutOfRange(f"row index outside [0, {d.n})")
    return Dataset(d.X[idx], d.y[idx])


def shift(d: Dataset, x0: ArrayLike, y0: float) -> Dataset:
    """Subtract ``x0`` from every covariate row and ``y0`` from every response."""
    x0 = np.asarray(x0, dtype=np.float64).reshape(-1)
    if x0.shape[0] != d.p:
        raise DimensionMismatch(f"shift point has length {x0.shape[0]}, expected {d.p}")
    return Dataset(d.X - x0, d.y - float(y0))


def center(d: Dataset) -> Dataset:
    s = full_means(d)
    return shift(d, s.x_bar, s.y_bar)
