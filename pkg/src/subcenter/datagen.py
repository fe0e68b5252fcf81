"""Synthetic regression data with AR(1)-correlated covariates."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .data import ModelSpec
from .errors import DimensionMismatch, InvalidRho

T_DF = 5


class CaseKind(enum.Enum):
    NORMAL = "normal"
    LOGNORMAL = "lognormal"
    T5 = "t5"


@dataclass(frozen=True)
class SimCase:
    kind: CaseKind
    p: int
    rho: float = 0.5

    def __post_init__(self):
        if not -1.0 < self.rho < 1.0:
            raise InvalidRho(f"rho must lie in (-1, 1), got {self.rho}")
        if self.p < 1:
            raise ValueError("p must be positive")


def ar1_sigma(p: int, rho: float = 0.5) -> NDArray[np.float64]:
    """Sigma[i, j] = rho ** |i - j|."""
    if not -1.0 < rho < 1.0:
        raise InvalidRho(f"rho must lie in (-1, 1), got {rho}")
    lag = np.abs(np.subtract.outer(np.arange(p), np.arange(p)))
    return np.power(float(rho), lag)


@lru_cache(maxsize=32)
def _chol(p: int, rho: float) -> NDArray[np.float64]:
    L = np.linalg.cholesky(ar1_sigma(p, rho))
    L.setflags(write=False)
    return L


def gen_covariates(case: SimCase, n: int, rng: np.random.Generator) -> NDArray[np.float64]:
    """Draw ``n`` i.i.d. rows.

    NORMAL is N(0, Sigma); LOGNORMAL is exp of a NORMAL row; T5 divides a
    NORMAL row by sqrt(V / 5), V ~ chi2(5), one V per row (Sigma is the scale
    matrix, so the covariance is 5/3 Sigma).
    """
    L = _chol(case.p, float(case.rho))
    X = rng.standard_normal((n, case.p)) @ L.T
    if case.kind is CaseKind.LOGNORMAL:
        np.exp(X, out=X)
    elif case.kind is CaseKind.T5:
        X /= np.sqrt(rng.chisquare(T_DF, size=n) / T_DF)[:, None]
    return X


def gen_response(X: ArrayLike, spec: ModelSpec, rng: np.random.Generator) -> NDArray[np.float64]:
    """y = alpha + X beta + eps, eps ~ N(0, sigma2)."""
    X = np.asarray(X, dtype=np.float64)
    if X.shape[1] != spec.beta.shape[0]:
        raise DimensionMismatch(f"X has {X.shape[1]} columns, beta has {spec.beta.shape[0]}")
    return spec.alpha + X @ spec.beta + np.sqrt(spec.sigma2) * rng.standard_normal(X.shape[0])


def default_model(p: int = 19, sigma2: float = 9.0) -> ModelSpec:
    """alpha = 1 and beta = 1_p."""
    return ModelSpec(alpha=1.0, beta=np.ones(p), sigma2=sigma2)
