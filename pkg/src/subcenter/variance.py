"""Exact and asymptotic variances, the closed-form variance gap between the
intercept and no-intercept subsample slopes, Loewner comparison, and the
matrix identities behind both orderings as checkable residuals.

Exact finite-sample variances are always obtained as ``sigma2 * L L^T`` for a
linear map ``L`` taking the full response vector to the estimate; the closed
forms are then verified against that single mechanism.
"""

from __future__ import annotations

import csv
import enum
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .data import Dataset, WeightedStats, check_weights, column_means
from .errors import (
    DegenerateGap,
    DimensionMismatch,
    InvalidSelection,
    UnsupportedVariant,
)
from .estimators import Variant, _pivoted_qr, lstsq_operator

SYM_TOL = 1e-12
PSD_TOL = 1e-10
DEGENERATE_D_TOL = 1e-12
IDENTITY_TOL = 1e-10


def _sym(M: NDArray[np.float64]) -> NDArray[np.float64]:
    return 0.5 * (M + M.T)


@dataclass(frozen=True)
class CovMatrix:
    """Symmetric positive-semidefinite matrix (validated on construction)."""

    M: NDArray[np.float64]

    def __post_init__(self):
        M = np.atleast_2d(np.array(self.M, dtype=np.float64))
        if M.shape[0] != M.shape[1]:
            raise DimensionMismatch(f"covariance must be square, got {M.shape}")
        norm = np.linalg.norm(M)
        if np.linalg.norm(M - M.T) > SYM_TOL * max(norm, 1.0):
            raise ValueError("covariance matrix is not symmetric")
        M = _sym(M)
        if M.size and np.linalg.eigvalsh(M)[0] < -PSD_TOL * max(norm, 1.0):
            raise ValueError("covariance matrix is not positive semidefinite")
        M.setflags(write=False)
        object.__setattr__(self, "M", M)

    @property
    def dim(self) -> int:
        return self.M.shape[0]

    def eigvals(self) -> NDArray[np.float64]:
        return np.linalg.eigvalsh(self.M)

    def __sub__(self, other: "CovMatrix") -> NDArray[np.float64]:
        return self.M - other.M

    def leq(self, other: "CovMatrix", tol: float = PSD_TOL) -> bool:
        return loewner_leq(self, other, tol)[0]


@dataclass(frozen=True)
class LinearEstimatorMap:
    """Matrix ``L`` (k x n) with ``estimate = L @ y`` for fixed X and selection."""

    L: NDArray[np.float64]
    variant: Variant
    part: str

    def apply(self, y: ArrayLike) -> NDArray[np.float64]:
        return self.L @ np.asarray(y, dtype=np.float64)


@dataclass(frozen=True)
class Prop1Gap:
    """Closed-form Var(slope with intercept) - Var(shifted no-intercept slope)."""

    d: float
    gap: CovMatrix
    x_bar_diff: NDArray[np.float64]


class AvarMode(enum.Enum):
    THETA = "theta"                  # (alpha, beta) from the intercept WLS fit
    BETA_PLAIN = "beta_plain"        # slope, plain-mean relocation
    BETA_WEIGHTED = "beta_weighted"  # slope, weighted-mean relocation


@dataclass(frozen=True)
class IdentityResidual:
    name: str
    residual: float
    threshold: float

    @property
    def passed(self) -> bool:
        return bool(self.residual <= self.threshold)


def _as_idx(idx: ArrayLike, n: int) -> NDArray[np.intp]:
    idx = np.asarray(idx, dtype=np.intp).reshape(-1)
    if idx.size == 0 or idx.min() < 0 or idx.max() >= n:
        raise InvalidSelection(f"selection must be non-empty with indices in [0, {n})")
    return idx


def _gram_inv(A: NDArray[np.float64]) -> NDArray[np.float64]:
    """(A^T A)^{-1} as K K^T from the QR least-squares operator."""
    K = lstsq_operator(A)
    return _sym(K @ K.T)


def build_map(
    variant: Variant,
    X: ArrayLike,
    idx: ArrayLike | None = None,
    part: str = "theta",
) -> LinearEstimatorMap:
    """Linear map from the full response vector to an OLS estimate.

    ``part`` is ``"theta"`` (intercept first, then slopes), ``"beta"`` or
    ``"alpha"``. For ``SUB_OLS_WOI`` the intercept row is the one recovered
    from the full-data means. ``FULL_OLS`` ignores ``idx``.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    n, p = X.shape
    if variant is Variant.FULL_OLS:
        idx = np.arange(n)
    elif variant in (Variant.SUB_OLS_WI, Variant.SUB_OLS_WOI):
        if idx is None:
            raise InvalidSelection(f"{variant.name} needs a selection")
        idx = _as_idx(idx, n)
    else:
        raise UnsupportedVariant(
            f"no exact finite-sample map for {variant.name}; only deterministic OLS variants"
        )

    L = np.zeros((p + 1, n))
    if variant is Variant.SUB_OLS_WOI:
        x_bar = column_means(X)
        K = lstsq_operator(X[idx] - x_bar)
        # slope = K S (I - J_n) y
        np.add.at(L[1:].T, idx, K.T)
        L[1:] -= K.sum(axis=1)[:, None] / n
        # intercept = y_bar - x_bar^T slope
        L[0] = 1.0 / n - x_bar @ L[1:]
    else:
        K = lstsq_operator(np.column_stack([np.ones(idx.size), X[idx]]))
        np.add.at(L.T, idx, K.T)

    if part == "beta":
        L = L[1:]
    elif part == "alpha":
        L = L[:1]
    elif part != "theta":
        raise ValueError(f"part must be 'theta', 'beta' or 'alpha', got {part!r}")
    return LinearEstimatorMap(L=L, variant=variant, part=part)


def exact_variance(L: LinearEstimatorMap | ArrayLike, sigma2: float) -> CovMatrix:
    """Var(L y | X) = sigma2 L L^T for errors with covariance sigma2 I_n."""
    M = L.L if isinstance(L, LinearEstimatorMap) else np.atleast_2d(np.asarray(L, dtype=np.float64))
    return CovMatrix(_sym(sigma2 * (M @ M.T)))


def prop1_gap(X: ArrayLike, idx: ArrayLike, sigma2: float) -> Prop1Gap:
    """Closed-form variance reduction from dropping the intercept.

    With ``G = Xc*^T Xc*`` (subsample rows shifted by the full-data means) and
    ``delta = xbar* - xbar``::

        d   = r delta^T G^{-1} delta
        gap = sigma2 (r / (1 - d) + r^2 / n) G^{-1} delta delta^T G^{-1}

    Requires distinct indices: the subsample errors must be uncorrelated.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    n, p = X.shape
    idx = _as_idx(idx, n)
    if np.unique(idx).size != idx.size:
        raise InvalidSelection("deterministic selection must not repeat rows")
    r = idx.size
    Xs = X[idx]
    _pivoted_qr(np.column_stack([np.ones(r), Xs]))  # rank check on Z*

    x_bar = column_means(X)
    delta = column_means(Xs) - x_bar
    G_inv = _gram_inv(Xs - x_bar)
    u = G_inv @ delta
    d = float(r * delta @ u)
    if 1.0 - d < DEGENERATE_D_TOL:
        raise DegenerateGap(f"1 - d = {1.0 - d:.3e} is at the singular boundary")
    factor = sigma2 * (r / (1.0 - d) + r * r / n)
    return Prop1Gap(d=d, gap=CovMatrix(factor * np.outer(u, u)), x_bar_diff=delta)


def prop1_oracle_gap(X: ArrayLike, idx: ArrayLike, sigma2: float) -> NDArray[np.float64]:
    """Var(slope, intercept model) - Var(slope, shifted model) via exact maps."""
    v_wi = exact_variance(build_map(Variant.SUB_OLS_WI, X, idx, part="beta"), sigma2)
    v_woi = exact_variance(build_map(Variant.SUB_OLS_WOI, X, idx, part="beta"), sigma2)
    return v_wi.M - v_woi.M


def residual_sigma2(d: Dataset) -> float:
    """Full-data residual variance e^T e / (n - p - 1)."""
    Z = d.design()
    e = d.y - Z @ (lstsq_operator(Z) @ d.y)
    return float(e @ e / (d.n - d.p - 1))


def avar_wls(
    d: Dataset,
    ws: WeightedStats,
    r: int,
    mode: AvarMode,
    sigma2: float | None = None,
) -> CovMatrix:
    """Asymptotic variance ``(C sigma2 / r) A^{-1} B A^{-1}`` of a WLS subsample fit.

    ``(A, B)`` is ``(M^T M, M^T W M)`` where ``M`` is ``Z`` (THETA), ``X``
    shifted by the plain means (BETA_PLAIN) or by the weighted means
    (BETA_WEIGHTED). When ``sigma2`` is None it is estimated from full-data
    residuals.
    """
    if ws.w.shape[0] != d.n:
        raise DimensionMismatch("weights do not match the dataset")
    if sigma2 is None:
        sigma2 = residual_sigma2(d)
    if mode is AvarMode.THETA:
        M = d.design()
    elif mode is AvarMode.BETA_PLAIN:
        M = d.X - column_means(d.X)
    elif mode is AvarMode.BETA_WEIGHTED:
        M = d.X - ws.x_bar_w
    else:
        raise ValueError(f"unknown mode {mode!r}")
    # A^{-1} M^T = K, so A^{-1} B A^{-1} = K W K^T
    K = lstsq_operator(M)
    V = (ws.C * sigma2 / r) * ((K * ws.w) @ K.T)
    return CovMatrix(_sym(V))


def loewner_leq(A: CovMatrix | ArrayLike, B: CovMatrix | ArrayLike, tol: float = PSD_TOL):
    """Return ``(A <= B, lambda_min(B - A))`` with tolerance ``tol (1 + ||B||_F)``."""
    A = A.M if isinstance(A, CovMatrix) else np.atleast_2d(np.asarray(A, dtype=np.float64))
    B = B.M if isinstance(B, CovMatrix) else np.atleast_2d(np.asarray(B, dtype=np.float64))
    if A.shape != B.shape:
        raise DimensionMismatch(f"cannot compare {A.shape} with {B.shape}")
    min_eig = float(np.linalg.eigvalsh(_sym(B - A))[0])
    return min_eig >= -tol * (1.0 + np.linalg.norm(B)), min_eig


def _rel(lhs, rhs, *scale_terms) -> float:
    scale = sum(np.linalg.norm(t) for t in scale_terms) + np.finfo(np.float64).tiny
    return float(np.linalg.norm(lhs - rhs) / scale)


def appendix_identities(
    X: ArrayLike,
    idx: ArrayLike,
    w: ArrayLike,
    threshold: float = IDENTITY_TOL,
    _perturb: float = 0.0,
) -> list[IdentityResidual]:
    """Relative Frobenius residuals of the four matrix identities behind the
    two variance orderings.

    1. ``gram_shift``: Xcr*^T Xcr* = Xc*^T Xc* - r delta delta^T
    2. ``gram_inverse_update``: the Sherman-Morrison form of its inverse
    3. ``weighted_gram_gap``: Xc^T W Xc - Xwc^T W Xwc = (xbar_w - xbar)^{x2}
    4. ``plain_gram_gap``: Xwc^T Xwc - Xc^T Xc = n (xbar_w - xbar)^{x2}

    Each side is computed directly. ``_perturb`` is added to one entry of the
    left-hand Gram matrix of identity 1 (fault-injection hook for tests).
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    n, p = X.shape
    idx = _as_idx(idx, n)
    w = check_weights(w, n)
    r = idx.size
    Xs = X[idx]
    _pivoted_qr(np.column_stack([np.ones(r), Xs]))

    x_bar = column_means(X)
    xs_bar = column_means(Xs)
    delta = xs_bar - x_bar
    Xc_s = Xs - x_bar
    Xcr_s = Xs - xs_bar

    G_cr = Xcr_s.T @ Xcr_s
    G_cr[0, 0] += _perturb
    G_c = Xc_s.T @ Xc_s
    outer = r * np.outer(delta, delta)
    out = [IdentityResidual("gram_shift", _rel(G_cr, G_c - outer, G_c, outer), threshold)]

    G_c_inv = _gram_inv(Xc_s)
    G_cr_inv = _gram_inv(Xcr_s)
    u = G_c_inv @ delta
    dq = r * delta @ u
    update = r * np.outer(u, u) / (1.0 - dq)
    out.append(IdentityResidual(
        "gram_inverse_update",
        _rel(G_cr_inv, G_c_inv + update, G_c_inv, update),
        threshold,
    ))

    x_bar_w = X.T @ w
    Xc = X - x_bar
    Xwc = X - x_bar_w
    dw = x_bar_w - x_bar
    outer_w = np.outer(dw, dw)
    B_c = Xc.T @ (Xc * w[:, None])
    B_wc = Xwc.T @ (Xwc * w[:, None])
    out.append(IdentityResidual("weighted_gram_gap", _rel(B_c - B_wc, outer_w, B_c, B_wc), threshold))

    A_c = Xc.T @ Xc
    A_wc = Xwc.T @ Xwc
    out.append(IdentityResidual("plain_gram_gap", _rel(A_wc - A_c, n * outer_w, A_c, A_wc), threshold))
    return out


def write_residual_csv(rows: Iterable[IdentityResidual], dest: str | Path | IO[str]) -> None:
    """CSV columns: identity_name, residual, threshold, pass (1/0)."""
    if isinstance(dest, (str, Path)):
        with open(dest, "w", newline="", encoding="utf-8") as fh:
            write_residual_csv(rows, fh)
        return
    writer = csv.writer(dest, lineterminator="\n")
    writer.writerow(["identity_name", "residual", "threshold", "pass"])
    for row in rows:
        writer.writerow([row.name, f"{row.residual:.6e}", f"{row.threshold:.1e}", int(row.passed)])
