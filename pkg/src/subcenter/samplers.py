"""Subsample selectors: uniform random, IBOSS extreme-value selection, and
leverage-score sampling with inverse-probability weights."""

from __future__ import annotations

import csv
import enum
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .data import Dataset
from .errors import SizeExceedsPopulation, SubsampleTooSmall
from .estimators import _pivoted_qr


class DrawMode(enum.Enum):
    DETERMINISTIC = "deterministic"  # distinct rows
    WITH_REPLACEMENT = "with_replacement"


@dataclass(frozen=True)
class Subsample:
    """Selected rows plus, for random draws, per-draw probabilities ``pi``
    and the matching entries ``w_star`` of the normalized full-data weights."""

    idx: NDArray[np.intp]
    mode: DrawMode
    pi: NDArray[np.float64] | None = None
    w_star: NDArray[np.float64] | None = None

    def __post_init__(self):
        idx = np.asarray(self.idx, dtype=np.intp).reshape(-1)
        idx.setflags(write=False)
        object.__setattr__(self, "idx", idx)
        if (self.pi is not None) != (self.mode is DrawMode.WITH_REPLACEMENT):
            raise ValueError("pi is recorded exactly for with-replacement draws")
        if self.mode is DrawMode.DETERMINISTIC and np.unique(idx).size != idx.size:
            raise ValueError("deterministic selection must have unique indices")
        for name in ("pi", "w_star"):
            v = getattr(self, name)
            if v is not None:
                v = np.asarray(v, dtype=np.float64).reshape(-1)
                if v.shape != idx.shape:
                    raise ValueError(f"{name} must have one entry per draw")
                v.setflags(write=False)
                object.__setattr__(self, name, v)

    @property
    def r(self) -> int:
        return self.idx.size

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["draw_index", "row_index", "pi", "w_star"])
            for k, i in enumerate(self.idx):
                pi = "" if self.pi is None else repr(float(self.pi[k]))
                ws = "" if self.w_star is None else repr(float(self.w_star[k]))
                writer.writerow([k, int(i), pi, ws])


def uniform_sample(n: int, r: int, mode: DrawMode, rng: np.random.Generator) -> Subsample:
    if r < 1:
        raise ValueError("r must be at least 1")
    if mode is DrawMode.WITH_REPLACEMENT:
        idx = rng.integers(0, n, size=r)
        const = np.full(r, 1.0 / n)
        return Subsample(idx, mode, pi=const, w_star=const)
    if r > n:
        raise SizeExceedsPopulation(f"cannot draw {r} distinct rows from {n}")
    # partial Fisher-Yates on a virtual arange(n); only touched slots are stored
    swaps = rng.integers(np.arange(r), n)
    slots: dict[int, int] = {}
    idx = np.empty(r, dtype=np.intp)
    for k, j in enumerate(swaps.tolist()):
        idx[k] = slots.get(j, j)
        slots[j] = slots.get(k, k)
    return Subsample(idx, mode)


def leverage_scores(d: Dataset) -> NDArray[np.float64]:
    """Diagonal of the hat matrix of Z = (1, X), from the thin QR factor."""
    Q, _, _ = _pivoted_qr(d.design())
    return np.einsum("ij,ij->i", Q, Q)


def inverse_probability_weights(pi: ArrayLike) -> NDArray[np.float64]:
    """Weights proportional to 1/pi, normalized to sum to one."""
    inv = 1.0 / np.asarray(pi, dtype=np.float64)
    return inv / inv.sum()


def leverage_sample(
    d: Dataset,
    r: int,
    rng: np.random.Generator,
    scores: ArrayLike | None = None,
) -> Subsample:
    """``r`` with-replacement draws with probabilities proportional to leverage.

    ``scores`` may carry precomputed :func:`leverage_scores` of ``d``.
    """
    if r < 1:
        raise ValueError("r must be at least 1")
    h = leverage_scores(d) if scores is None else np.asarray(scores, dtype=np.float64)
    pi = h / h.sum()
    w = inverse_probability_weights(pi)
    idx = rng.choice(d.n, size=r, replace=True, p=pi)
    return Subsample(idx, DrawMode.WITH_REPLACEMENT, pi=pi[idx], w_star=w[idx])


def _k_extreme(values: NDArray[np.float64], k: int, largest: bool) -> NDArray[np.intp]:
    """Indices of the k smallest (or largest) finite entries; ties go to the
    lowest index. Excluded rows must be set to +inf (-inf when largest)."""
    v = -values if largest else values
    kth = np.partition(v, k - 1)[k - 1]
    below = np.flatnonzero(v < kth)
    ties = np.flatnonzero(v == kth)[: k - below.size]
    return np.concatenate([below, ties])


def iboss_select(X: ArrayLike, r: int) -> Subsample:
    """Deterministic IBOSS selection from the covariates alone.

    Columns are visited in order; each contributes the ``r // (2p)`` smallest
    and then the ``r // (2p)`` largest rows not yet chosen. Leftover slots come
    from column 0, alternating smallest/largest.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    n, p = X.shape
    if r > n:
        raise SizeExceedsPopulation(f"cannot select {r} rows from {n}")
    if r < 2 * p:
        raise SubsampleTooSmall(f"IBOSS needs r >= 2p = {2 * p}, got {r}")
    k = r // (2 * p)
    taken = np.zeros(n, dtype=bool)
    chosen: list[NDArray[np.intp]] = []

    def pick(j: int, m: int, largest: bool):
        col = np.where(taken, -np.inf if largest else np.inf, X[:, j])
        sel = _k_extreme(col, m, largest)
        taken[sel] = True
        chosen.append(sel)

    for j in range(p):
        pick(j, k, largest=False)
        pick(j, k, largest=True)
    for m in range(r - 2 * p * k):
        pick(0, 1, largest=bool(m % 2))
    return Subsample(np.concatenate(chosen), DrawMode.DETERMINISTIC)
