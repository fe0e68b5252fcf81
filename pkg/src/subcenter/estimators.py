"""Point estimators: OLS/WLS with an intercept, no-intercept fits on shifted
data, and intercept recovery from full-data (weighted) means.

All fits go through a column-pivoted QR factorization of the (optionally
sqrt(w)-scaled) design; normal equations are never inverted.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
from numpy.typing import ArrayLike, NDArray

from .data import CenteringStats, Dataset, WeightedStats
from .errors import DimensionMismatch, NonPositiveWeight, RankDeficient


class Variant(enum.Enum):
    FULL_OLS = "full_ols"
    SUB_OLS_WI = "sub_ols_wi"
    SUB_OLS_WOI = "sub_ols_woi"
    SUB_WLS_WI = "sub_wls_wi"
    SUB_WLS_WOI_PLAIN = "sub_wls_woi_plain"
    SUB_WLS_WOI_WEIGHTED = "sub_wls_woi_weighted"


class InterceptMode(enum.Enum):
    PLAIN = "plain"
    WEIGHTED = "weighted"


@dataclass(frozen=True)
class EstimatorOutput:
    beta: NDArray[np.float64]
    variant: Variant
    alpha: float | None = None

    @property
    def theta(self) -> NDArray[np.float64]:
        if self.alpha is None:
            raise ValueError(f"{self.variant.name} carries no intercept")
        return np.concatenate([[self.alpha], self.beta])

    def with_intercept(self, alpha: float) -> "EstimatorOutput":
        return EstimatorOutput(beta=self.beta, variant=self.variant, alpha=float(alpha))


def _pivoted_qr(A: NDArray[np.float64]):
    """Economic pivoted QR with the relative pivot-tolerance rank check."""
    m, k = A.shape
    if m < k:
        raise RankDeficient(m, k)
    Q, R, piv = sla.qr(A, mode="economic", pivoting=True, check_finite=False)
    diag = np.abs(np.diag(R))
    tol = max(m, k) * np.finfo(np.float64).eps * (diag[0] if k else 0.0)
    rank = int(np.count_nonzero(diag > tol))
    if rank < k:
        raise RankDeficient(rank, k)
    return Q, R, piv


def lstsq_operator(A: ArrayLike) -> NDArray[np.float64]:
    """Return K = (A^T A)^{-1} A^T (k x m), so that the LS coefficients are K b."""
    A = np.asarray(A, dtype=np.float64)
    Q, R, piv = _pivoted_qr(A)
    K = np.empty((A.shape[1], A.shape[0]))
    K[piv] = sla.solve_triangular(R, Q.T, check_finite=False)
    return K


def _lstsq(A: NDArray[np.float64], b: NDArray[np.float64]) -> NDArray[np.float64]:
    Q, R, piv = _pivoted_qr(A)
    coef = np.empty(A.shape[1])
    coef[piv] = sla.solve_triangular(R, Q.T @ b, check_finite=False)
    return coef


def _sqrt_weights(w_star: ArrayLike, r: int) -> NDArray[np.float64]:
    w = np.asarray(w_star, dtype=np.float64).reshape(-1)
    if w.shape[0] != r:
        raise DimensionMismatch(f"{w.shape[0]} weights for {r} rows")
    if not np.all(w > 0):
        raise NonPositiveWeight("subsample weights must be strictly positive")
    return np.sqrt(w)


def ols_with_intercept(d: Dataset, variant: Variant = Variant.SUB_OLS_WI) -> EstimatorOutput:
    """OLS of y on (1, X); pass ``Variant.FULL_OLS`` when ``d`` is the full data."""
    theta = _lstsq(d.design(), d.y)
    return EstimatorOutput(beta=theta[1:], variant=variant, alpha=float(theta[0]))


def ols_slope_no_intercept(d_shifted: Dataset, variant: Variant = Variant.SUB_OLS_WOI) -> EstimatorOutput:
    """Slope from a no-intercept fit. The caller shifts the rows beforehand."""
    return EstimatorOutput(beta=_lstsq(d_shifted.X, d_shifted.y), variant=variant)


def recover_intercept(
    stats: CenteringStats | WeightedStats,
    beta: ArrayLike,
    mode: InterceptMode | None = None,
) -> float:
    """Intercept ``y0 - x0^T beta`` at the plain or weighted full-data means.

    ``mode`` defaults to the kind of ``stats``; passing a mode that the stats
    object cannot provide raises ``TypeError``.
    """
    if mode is None:
        mode = InterceptMode.WEIGHTED if isinstance(stats, WeightedStats) else InterceptMode.PLAIN
    if mode is InterceptMode.WEIGHTED:
        if not isinstance(stats, WeightedStats):
            raise TypeError("WEIGHTED mode needs WeightedStats")
        x0, y0 = stats.x_bar_w, stats.y_bar_w
    else:
        if not isinstance(stats, CenteringStats):
            raise TypeError("PLAIN mode needs CenteringStats")
        x0, y0 = stats.x_bar, stats.y_bar
    beta = np.asarray(beta, dtype=np.float64).reshape(-1)
    if beta.shape[0] != x0.shape[0]:
        raise DimensionMismatch(f"beta has length {beta.shape[0]}, means have {x0.shape[0]}")
    return float(y0 - x0 @ beta)


def wls_with_intercept(d: Dataset, w_star: ArrayLike) -> EstimatorOutput:
    """Inverse-probability weighted LS on (1, X*)."""
    sw = _sqrt_weights(w_star, d.n)
    theta = _lstsq(d.design() * sw[:, None], d.y * sw)
    return EstimatorOutput(beta=theta[1:], variant=Variant.SUB_WLS_WI, alpha=float(theta[0]))


def wls_slope_no_intercept(
    d_shifted: Dataset,
    w_star: ArrayLike,
    variant: Variant = Variant.SUB_WLS_WOI_WEIGHTED,
) -> EstimatorOutput:
    """Weighted no-intercept slope.

    Serves both relocations: tag ``SUB_WLS_WOI_PLAIN`` when the rows were
    shifted by plain full-data means and ``SUB_WLS_WOI_WEIGHTED`` for the
    weighted means.
    """
    if variant not in (Variant.SUB_WLS_WOI_PLAIN, Variant.SUB_WLS_WOI_WEIGHTED):
        raise ValueError(f"{variant.name} is not a weighted no-intercept variant")
    sw = _sqrt_weights(w_star, d_shifted.n)
    beta = _lstsq(d_shifted.X * sw[:, None], d_shifted.y * sw)
    return EstimatorOutput(beta=beta, variant=variant)
