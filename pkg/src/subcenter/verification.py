"""Seeded randomized suites that check the closed-form variance results
against the exact linear-map mechanism and direct matrix arithmetic.

Each suite returns :class:`~subcenter.variance.IdentityResidual` rows holding
the worst residual over its instances next to the threshold it must meet.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .data import Dataset, ModelSpec, full_means, shift, take_rows, weighted_means
from .datagen import CaseKind, SimCase, gen_covariates
from .estimators import Variant, ols_slope_no_intercept
from .rng import stream
from .samplers import iboss_select
from .variance import (
    AvarMode,
    IdentityResidual,
    appendix_identities,
    avar_wls,
    build_map,
    exact_variance,
    loewner_leq,
    prop1_gap,
)

GAP_TOL = 1e-8
EIG_TOL = 1e-10
IDENTITY_TOL = 1e-10
LOEWNER_TOL = 1e-10
EQUALITY_TOL = 1e-10
Z_BOUND = 4.0
# floor for the relative gap error, in units of ||Var(beta_WI)||_F
GAP_FLOOR = 1e-14


@dataclass(frozen=True)
class Instance:
    X: NDArray[np.float64]
    idx: NDArray[np.intp]
    w: NDArray[np.float64]


def random_instance(rng: np.random.Generator, n_range=(50, 500), p_range=(1, 10)) -> Instance:
    """An uncentered, unevenly scaled design with a distinct-row selection
    (random subset or IBOSS) of size r in [p + 2, n / 2] and random positive
    weights summing to one."""
    n = int(rng.integers(n_range[0], n_range[1] + 1))
    p = int(rng.integers(p_range[0], p_range[1] + 1))
    r = int(rng.integers(p + 2, n // 2 + 1))
    kind = [CaseKind.NORMAL, CaseKind.LOGNORMAL, CaseKind.T5][int(rng.integers(3))]
    X = gen_covariates(SimCase(kind, p, float(rng.uniform(-0.8, 0.8))), n, rng)
    X = X * rng.uniform(0.2, 5.0, size=p) + rng.normal(0.0, 3.0, size=p)
    if r >= 2 * p and rng.random() < 0.5:
        idx = iboss_select(X, r).idx
    else:
        idx = rng.choice(n, size=r, replace=False)
    w = rng.exponential(size=n) + 1e-3
    return Instance(X=X, idx=np.asarray(idx), w=w / w.sum())


def _instances(seed: int, count: int, tag: str):
    for k in range(count):
        yield random_instance(stream(seed, k, purpose=f"verify:{tag}"))


def _worst(name: str, values, threshold: float) -> IdentityResidual:
    return IdentityResidual(name, float(max(values)), threshold)


def identities_suite(seed: int, count: int = 100, _perturb: float = 0.0) -> list[IdentityResidual]:
    worst: dict[str, list[float]] = {}
    for inst in _instances(seed, count, "identities"):
        for row in appendix_identities(inst.X, inst.idx, inst.w, IDENTITY_TOL, _perturb=_perturb):
            worst.setdefault(row.name, []).append(row.residual)
    return [_worst(k, v, IDENTITY_TOL) for k, v in worst.items()]


def gap_check(X, idx, sigma2: float = 1.0) -> dict:
    """Closed-form gap vs the exact-map difference for one instance."""
    gap = prop1_gap(X, idx, sigma2)
    v_wi = exact_variance(build_map(Variant.SUB_OLS_WI, X, idx, part="beta"), sigma2).M
    v_woi = exact_variance(build_map(Variant.SUB_OLS_WOI, X, idx, part="beta"), sigma2).M
    oracle = v_wi - v_woi
    floor = GAP_FLOOR * np.linalg.norm(v_wi)
    g = gap.gap.M
    g_norm = np.linalg.norm(g)
    eig_oracle = np.linalg.eigvalsh(0.5 * (oracle + oracle.T))
    eig_gap = np.linalg.eigvalsh(g)
    scale = max(g_norm, floor)
    second = max(eig_oracle[-2], eig_gap[-2]) if g.shape[0] > 1 else 0.0
    return {
        "rel_err": float(np.linalg.norm(g - oracle) / (floor + np.linalg.norm(oracle))),
        "neg_eig": float(max(-eig_oracle[0], -eig_gap[0], 0.0) / scale),
        "second_eig": float(max(second, 0.0) / scale),
        "d": gap.d,
    }


def prop1_suite(seed: int, count: int = 200) -> list[IdentityResidual]:
    rel, neg, second, d_viol = [], [], [], []
    for inst in _instances(seed, count, "prop1"):
        c = gap_check(inst.X, inst.idx)
        rel.append(c["rel_err"])
        neg.append(c["neg_eig"])
        second.append(c["second_eig"])
        d_viol.append(0.0 if 0.0 <= c["d"] < 1.0 else 1.0)
    return [
        _worst("gap_vs_exact_map", rel, GAP_TOL),
        _worst("gap_min_eigenvalue", neg, EIG_TOL),
        _worst("gap_second_eigenvalue", second, EIG_TOL),
        _worst("d_in_unit_interval", d_viol, 0.0),
    ]


def _dataset(inst: Instance, rng: np.random.Generator) -> Dataset:
    X = inst.X
    y = 1.0 + X @ np.ones(X.shape[1]) + rng.standard_normal(X.shape[0])
    return Dataset(X, y)


def prop2_suite(seed: int, count: int = 100) -> list[IdentityResidual]:
    """Weighted-mean relocation vs plain relocation of the asymptotic slope
    variance: Loewner order on every instance, the same order with the design
    cut down to its first covariate, and equality under uniform weights."""
    order, order_1d, equal = [], [], []
    for k, inst in enumerate(_instances(seed, count, "prop2")):
        d = _dataset(inst, stream(seed, k, purpose="verify:prop2:y"))
        r = inst.idx.size
        ws = weighted_means(d, inst.w)
        plain = avar_wls(d, ws, r, AvarMode.BETA_PLAIN, sigma2=1.0)
        relocated = avar_wls(d, ws, r, AvarMode.BETA_WEIGHTED, sigma2=1.0)
        ok, min_eig = loewner_leq(relocated, plain, LOEWNER_TOL)
        order.append(0.0 if ok else -min_eig)
        X1 = inst.X[:, :1]
        d1 = Dataset(X1, d.y)
        ws1 = weighted_means(d1, inst.w)
        ok1, min1 = loewner_leq(
            avar_wls(d1, ws1, r, AvarMode.BETA_WEIGHTED, sigma2=1.0),
            avar_wls(d1, ws1, r, AvarMode.BETA_PLAIN, sigma2=1.0),
            LOEWNER_TOL,
        )
        order_1d.append(0.0 if ok1 else -min1)
        wu = weighted_means(d, np.full(d.n, 1.0 / d.n))
        diff = (avar_wls(d, wu, r, AvarMode.BETA_PLAIN, sigma2=1.0).M
                - avar_wls(d, wu, r, AvarMode.BETA_WEIGHTED, sigma2=1.0).M)
        equal.append(float(np.linalg.norm(diff)))
    return [
        _worst("weighted_relocation_loewner", order, 0.0),
        _worst("weighted_relocation_loewner_single_slope", order_1d, 0.0),
        _worst("uniform_weight_equality", equal, EQUALITY_TOL),
    ]


def unbiasedness_z(seed: int, reps: int = 2000, n: int = 1000, p: int = 5, r: int = 100) -> NDArray[np.float64]:
    """z-scores of the mean shifted no-intercept slope against the true slope,
    over error redraws with X and the IBOSS selection held fixed."""
    X = gen_covariates(SimCase(CaseKind.NORMAL, p), n, stream(seed, purpose="unbiased:X"))
    model = ModelSpec(alpha=1.0, beta=np.arange(1.0, p + 1.0), sigma2=9.0)
    idx = iboss_select(X, r).idx
    mean_part = model.alpha + X @ model.beta
    rng = stream(seed, purpose="unbiased:eps")
    draws = np.empty((reps, p))
    for k in range(reps):
        d = Dataset(X, mean_part + np.sqrt(model.sigma2) * rng.standard_normal(n))
        s = full_means(d)
        draws[k] = ols_slope_no_intercept(shift(take_rows(d, idx), s.x_bar, s.y_bar)).beta
    se = draws.std(axis=0, ddof=1) / np.sqrt(reps)
    return (draws.mean(axis=0) - model.beta) / se


def unbiasedness_suite(seed: int, reps: int = 2000) -> list[IdentityResidual]:
    z = unbiasedness_z(seed, reps)
    return [IdentityResidual("shifted_slope_unbiased_max_z", float(np.max(np.abs(z))), Z_BOUND)]


def verify(seed: int = 1, instances: int = 100, unbiased_reps: int = 2000, _perturb: float = 0.0):
    """Run every suite; returns the combined residual report."""
    return (
        identities_suite(seed, instances, _perturb=_perturb)
        + prop1_suite(seed, instances)
        + prop2_suite(seed, instances)
        + unbiasedness_suite(seed, unbiased_reps)
    )
