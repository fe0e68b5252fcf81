"""Monte Carlo MSE benchmark over covariate case x subsampler.

For every replication the full data are generated once per case and shared by
all samplers (common random numbers). Each (case, replication) and each
(case, sampler, replication) owns its own random stream, so results do not
depend on thread scheduling or on which cells are requested together.
"""

from __future__ import annotations

import enum
import io
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from numpy.typing import NDArray

from .data import Dataset, full_means, shift, take_rows, weighted_means
from .datagen import CaseKind, SimCase, default_model, gen_covariates, gen_response
from .errors import RankDeficient, TooManyFailures
from .estimators import (
    ols_slope_no_intercept,
    ols_with_intercept,
    recover_intercept,
    wls_slope_no_intercept,
    wls_with_intercept,
)
from .rng import stream
from .samplers import (
    DrawMode,
    iboss_select,
    inverse_probability_weights,
    leverage_sample,
    leverage_scores,
    uniform_sample,
)

MAX_FAILURE_RATE = 0.01


class SamplerKind(enum.Enum):
    UNIFORM = "uniform"
    IBOSS = "iboss"
    LEVERAGE = "leverage"


@dataclass(frozen=True)
class SimConfig:
    n: int = 100_000
    p: int = 19
    r: int = 1000
    sigma2: float = 9.0
    rho: float = 0.5
    cases: tuple[CaseKind, ...] = tuple(CaseKind)
    samplers: tuple[SamplerKind, ...] = tuple(SamplerKind)
    reps: int = 1000
    base_seed: int = 1
    out_path: str | None = None
    format: str = "csv"
    threads: int = 1

    def __post_init__(self):
        if self.reps < 1:
            raise ValueError("reps must be at least 1")
        if self.p < 1 or self.r < 1:
            raise ValueError("p and r must be positive")
        if self.r > self.n:
            raise ValueError(f"r = {self.r} exceeds n = {self.n}")
        if SamplerKind.IBOSS in self.samplers and self.r < 2 * self.p:
            raise ValueError(f"IBOSS needs r >= 2p = {2 * self.p}")
        if not self.sigma2 > 0:
            raise ValueError("sigma2 must be positive")
        if not -1.0 < self.rho < 1.0:
            raise ValueError("rho must lie in (-1, 1)")
        if self.format not in ("csv", "table"):
            raise ValueError("format must be 'csv' or 'table'")
        if self.threads < 1:
            raise ValueError("threads must be at least 1")


@dataclass(frozen=True)
class CellResult:
    """Empirical MSEs for one (case, sampler) cell.

    Slope MSEs sum the squared error over all slope coordinates; the
    per-coordinate terms are kept in ``mse_beta_coord_*``.
    """

    case: CaseKind
    sampler: SamplerKind
    mse_alpha_wi: float
    mse_alpha_woi: float
    mse_beta_wi: float
    mse_beta_woi: float
    se_alpha_wi: float
    se_alpha_woi: float
    se_beta_wi: float
    se_beta_woi: float
    reps: int
    failures: int
    mse_beta_coord_wi: NDArray[np.float64] = field(repr=False, compare=False, default=None)
    mse_beta_coord_woi: NDArray[np.float64] = field(repr=False, compare=False, default=None)

    def rows(self):
        """(param, variant, mse, mc_se) tuples in output order."""
        return [
            ("alpha", "WI", self.mse_alpha_wi, self.se_alpha_wi),
            ("alpha", "WOI", self.mse_alpha_woi, self.se_alpha_woi),
            ("beta", "WI", self.mse_beta_wi, self.se_beta_wi),
            ("beta", "WOI", self.mse_beta_woi, self.se_beta_woi),
        ]


def _fit_pair(d: Dataset, sampler: SamplerKind, r: int, rng: np.random.Generator, cache: dict):
    """WI and WOI estimates ``(alpha_wi, beta_wi, alpha_woi, beta_woi)``."""
    if sampler is SamplerKind.LEVERAGE:
        if "lev" not in cache:
            h = leverage_scores(d)
            ws = weighted_means(d, inverse_probability_weights(h / h.sum()))
            cache["lev"] = (h, ws)
        h, ws = cache["lev"]
        sub = leverage_sample(d, r, rng, scores=h)
        ds = take_rows(d, sub.idx)
        wi = wls_with_intercept(ds, sub.w_star)
        beta = wls_slope_no_intercept(shift(ds, ws.x_bar_w, ws.y_bar_w), sub.w_star).beta
        return wi.alpha, wi.beta, recover_intercept(ws, beta), beta

    if sampler is SamplerKind.IBOSS:
        sub = iboss_select(d.X, r)
    else:
        sub = uniform_sample(d.n, r, DrawMode.DETERMINISTIC, rng)
    if "means" not in cache:
        cache["means"] = full_means(d)
    stats = cache["means"]
    ds = take_rows(d, sub.idx)
    wi = ols_with_intercept(ds)
    beta = ols_slope_no_intercept(shift(ds, stats.x_bar, stats.y_bar)).beta
    return wi.alpha, wi.beta, recover_intercept(stats, beta), beta


def replicate(cfg: SimConfig, case: CaseKind, rep: int, samplers) -> dict:
    """Squared errors of one replication for each sampler.

    Returns ``{sampler: array of length 2 + 2p}`` laid out as
    ``[a_wi, a_woi, b_wi (p), b_woi (p)]``, or ``None`` for a sampler whose
    fit was rank deficient.
    """
    model = default_model(cfg.p, cfg.sigma2)
    rng = stream(cfg.base_seed, rep, purpose=f"data:{case.value}")
    X = gen_covariates(SimCase(case, cfg.p, cfg.rho), cfg.n, rng)
    d = Dataset(X, gen_response(X, model, rng))
    cache: dict = {}
    out = {}
    for s in samplers:
        srng = stream(cfg.base_seed, rep, purpose=f"sample:{case.value}:{s.value}")
        try:
            a_wi, b_wi, a_woi, b_woi = _fit_pair(d, s, cfg.r, srng, cache)
        except RankDeficient:
            out[s] = None
            continue
        out[s] = np.concatenate([
            [(a_wi - model.alpha) ** 2, (a_woi - model.alpha) ** 2],
            (b_wi - model.beta) ** 2,
            (b_woi - model.beta) ** 2,
        ])
    return out


def _reduce(case, sampler, per_rep: list, p: int, reps: int) -> CellResult:
    ok = [v for v in per_rep if v is not None]
    failures = reps - len(ok)
    if failures > MAX_FAILURE_RATE * reps:
        raise TooManyFailures(
            f"{case.value}/{sampler.value}: {failures} of {reps} replications were rank deficient"
        )
    E = np.array(ok)  # rows in replication order
    m = E.shape[0]
    cols = {
        "alpha_wi": E[:, 0],
        "alpha_woi": E[:, 1],
        "beta_wi": E[:, 2:2 + p].sum(axis=1),
        "beta_woi": E[:, 2 + p:].sum(axis=1),
    }
    mse = {k: float(v.mean()) for k, v in cols.items()}
    se = {k: float(v.std(ddof=1) / np.sqrt(m)) if m > 1 else 0.0 for k, v in cols.items()}
    return CellResult(
        case=case,
        sampler=sampler,
        mse_alpha_wi=mse["alpha_wi"],
        mse_alpha_woi=mse["alpha_woi"],
        mse_beta_wi=mse["beta_wi"],
        mse_beta_woi=mse["beta_woi"],
        se_alpha_wi=se["alpha_wi"],
        se_alpha_woi=se["alpha_woi"],
        se_beta_wi=se["beta_wi"],
        se_beta_woi=se["beta_woi"],
        reps=m,
        failures=failures,
        mse_beta_coord_wi=E[:, 2:2 + p].mean(axis=0),
        mse_beta_coord_woi=E[:, 2 + p:].mean(axis=0),
    )


def run_case(cfg: SimConfig, case: CaseKind, samplers=None, progress: bool = False) -> list[CellResult]:
    samplers = tuple(cfg.samplers if samplers is None else samplers)
    reps = range(cfg.reps)
    if cfg.threads > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            results = list(pool.map(lambda k: replicate(cfg, case, k, samplers), reps))
    else:
        results = [replicate(cfg, case, k, samplers) for k in reps]
    cells = []
    for s in samplers:
        cell = _reduce(case, s, [res[s] for res in results], cfg.p, cfg.reps)
        if progress:
            print(
                f"[{case.value}/{s.value}] reps={cell.reps} failures={cell.failures} "
                f"alpha WI={cell.mse_alpha_wi:.4g} WOI={cell.mse_alpha_woi:.4g} "
                f"beta WI={cell.mse_beta_wi:.4g} WOI={cell.mse_beta_woi:.4g}",
                file=sys.stderr,
            )
        cells.append(cell)
    return cells


def run_cell(cfg: SimConfig, case: CaseKind, sampler: SamplerKind) -> CellResult:
    return run_case(cfg, case, (sampler,))[0]


def run_table(cfg: SimConfig, progress: bool = False) -> list[CellResult]:
    """Every (case, sampler) cell of ``cfg``, cases outer, samplers inner."""
    cells = []
    for case in cfg.cases:
        cells.extend(run_case(cfg, case, progress=progress))
    return cells


def _header(cfg: SimConfig) -> str:
    return (
        f"# n={cfg.n} p={cfg.p} r={cfg.r} reps={cfg.reps} seed={cfg.base_seed} "
        f"sigma2={cfg.sigma2!r} rho={cfg.rho!r} beta_mse=sum_over_coordinates"
    )


def format_csv(cells: list[CellResult], cfg: SimConfig) -> str:
    buf = io.StringIO()
    buf.write(_header(cfg) + "\n")
    buf.write("case,sampler,param,variant,n,p,r,reps,mse,mc_se,failures\n")
    for c in cells:
        for param, variant, mse, se in c.rows():
            buf.write(
                f"{c.case.value},{c.sampler.value},{param},{variant},"
                f"{cfg.n},{cfg.p},{cfg.r},{c.reps},{mse!r},{se!r},{c.failures}\n"
            )
    return buf.getvalue()


def format_table(cells: list[CellResult], cfg: SimConfig) -> str:
    """Aligned text: one row per (case, parameter), WI/WOI pairs per sampler."""
    samplers = list(dict.fromkeys(c.sampler for c in cells))
    cases = list(dict.fromkeys(c.case for c in cells))
    lookup = {(c.case, c.sampler): c for c in cells}
    width = 11
    lines = [_header(cfg)]
    top = " " * 18 + "".join(f"{s.value:^{2 * width}}" for s in samplers)
    sub = f"{'case':<10}{'param':<8}" + "".join(f"{'WI':>{width}}{'WOI':>{width}}" for _ in samplers)
    lines += [top, sub, "-" * len(sub)]
    for case in cases:
        for param in ("alpha", "beta"):
            row = f"{case.value if param == 'alpha' else '':<10}{param:<8}"
            for s in samplers:
                c = lookup[(case, s)]
                wi = c.mse_alpha_wi if param == "alpha" else c.mse_beta_wi
                woi = c.mse_alpha_woi if param == "alpha" else c.mse_beta_woi
                row += f"{wi:>{width}.5g}{woi:>{width}.5g}"
            lines.append(row)
    return "\n".join(lines) + "\n"


def write_output(cells: list[CellResult], cfg: SimConfig, path: str | Path | None = None) -> str:
    text = format_csv(cells, cfg) if cfg.format == "csv" else format_table(cells, cfg)
    path = path if path is not None else cfg.out_path
    if path is not None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return text
