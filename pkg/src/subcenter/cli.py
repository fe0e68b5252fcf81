"""Command-line entry point: ``simulate``, ``verify`` and ``variance``.

Exit codes: 0 success, 1 verification or run failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .bench import SamplerKind, SimConfig, run_table, write_output
from .data import Dataset, full_means, weighted_means
from .datagen import CaseKind, SimCase, default_model, gen_covariates, gen_response
from .errors import SubcenterError, TooManyFailures
from .estimators import Variant
from .rng import stream
from .samplers import iboss_select, inverse_probability_weights, leverage_scores
from .variance import AvarMode, avar_wls, build_map, exact_variance, prop1_gap, write_residual_csv
from .verification import verify

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2
FAULT_SIZE = 1e-6


def _choices(enum_cls, value: str):
    if value == "all":
        return tuple(enum_cls)
    return (enum_cls(value),)


def _add_common(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--n", type=int, default=100_000)
    sp.add_argument("--p", type=int, default=19)
    sp.add_argument("--r", type=int, default=1000)
    sp.add_argument("--reps", type=int, default=1000)
    sp.add_argument("--sigma2", type=float, default=9.0)
    sp.add_argument("--rho", type=float, default=0.5)
    sp.add_argument("--case", choices=["normal", "lognormal", "t5", "all"], default="all")
    sp.add_argument("--sampler", choices=["uniform", "iboss", "leverage", "all"], default="all")
    sp.add_argument("--seed", type=int, default=1)
    sp.add_argument("--threads", type=int, default=1)
    sp.add_argument("--out", default=None, help="output file (default: standard output)")
    sp.add_argument("--format", choices=["csv", "table"], default="csv")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="subcenter", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sim = sub.add_parser("simulate", help="Monte Carlo MSE table (case x sampler)")
    _add_common(sim)
    ver = sub.add_parser("verify", help="randomized identity and ordering suites")
    _add_common(ver)
    ver.add_argument("--instances", type=int, default=100)
    ver.add_argument("--unbiased-reps", type=int, default=2000)
    ver.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    var = sub.add_parser("variance", help="exact and asymptotic variances for one seeded instance")
    _add_common(var)
    return parser


def _config(args) -> SimConfig:
    return SimConfig(
        n=args.n, p=args.p, r=args.r, sigma2=args.sigma2, rho=args.rho,
        cases=_choices(CaseKind, args.case), samplers=_choices(SamplerKind, args.sampler),
        reps=args.reps, base_seed=args.seed, out_path=args.out, format=args.format,
        threads=args.threads,
    )


def _emit(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def cmd_simulate(cfg: SimConfig) -> int:
    cells = run_table(cfg, progress=True)
    text = write_output(cells, cfg)
    if cfg.out_path is None:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_verify(args) -> int:
    rows = verify(args.seed, args.instances, args.unbiased_reps,
                  _perturb=FAULT_SIZE if args.inject_fault else 0.0)
    write_residual_csv(rows, sys.stdout if args.out is None else args.out)
    failed = [r for r in rows if not r.passed]
    for r in failed:
        print(f"FAILED {r.name}: residual {r.residual:.3e} > {r.threshold:.1e}", file=sys.stderr)
    return EXIT_FAIL if failed else EXIT_OK


def _fmt(name: str, M) -> str:
    body = np.array2string(np.atleast_2d(M), precision=6, max_line_width=160, suppress_small=False)
    return f"{name}\n{body}\n\n"


def cmd_variance(cfg: SimConfig) -> int:
    """Exact variances under the IBOSS selection and asymptotic variances
    under leverage weights, for the first requested case."""
    case = cfg.cases[0]
    rng = stream(cfg.base_seed, purpose=f"variance:{case.value}")
    X = gen_covariates(SimCase(case, cfg.p, cfg.rho), cfg.n, rng)
    d = Dataset(X, gen_response(X, default_model(cfg.p, cfg.sigma2), rng))
    idx = iboss_select(X, cfg.r).idx
    gap = prop1_gap(X, idx, cfg.sigma2)
    v_wi = exact_variance(build_map(Variant.SUB_OLS_WI, X, idx, part="beta"), cfg.sigma2)
    v_woi = exact_variance(build_map(Variant.SUB_OLS_WOI, X, idx, part="beta"), cfg.sigma2)
    h = leverage_scores(d)
    ws = weighted_means(d, inverse_probability_weights(h / h.sum()))
    out = [
        f"# case={case.value} n={cfg.n} p={cfg.p} r={cfg.r} seed={cfg.base_seed} sigma2={cfg.sigma2!r}\n\n",
        _fmt("exact Var(slope | X), intercept model, IBOSS selection", v_wi.M),
        _fmt("exact Var(slope | X), no-intercept model on full-mean-shifted rows", v_woi.M),
        f"closed-form gap: d = {gap.d!r}\n",
        _fmt("closed-form gap matrix", gap.gap.M),
        _fmt("full-data means", full_means(d).x_bar),
        _fmt("leverage-weighted means", ws.x_bar_w),
    ]
    for mode, label in [
        (AvarMode.THETA, "asymptotic Var(intercept, slope), WLS with intercept"),
        (AvarMode.BETA_PLAIN, "asymptotic Var(slope), plain-mean relocation"),
        (AvarMode.BETA_WEIGHTED, "asymptotic Var(slope), weighted-mean relocation"),
    ]:
        out.append(_fmt(label, avar_wls(d, ws, cfg.r, mode, sigma2=cfg.sigma2).M))
    _emit("".join(out), cfg.out_path)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "verify":
            return cmd_verify(args)
        cfg = _config(args)
    except (ValueError, SubcenterError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        if args.command == "simulate":
            return cmd_simulate(cfg)
        return cmd_variance(cfg)
    except TooManyFailures as exc:
        print(f"run failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (ValueError, SubcenterError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
