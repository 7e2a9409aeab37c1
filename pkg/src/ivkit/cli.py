"""Command-line interface.

Subcommands: ``simulate`` (Monte Carlo experiment), ``estimate`` (treatment
effect estimates from a CSV), ``search`` (instrument screening), ``corr``
(correlation reports).  Exit codes: 0 success, 1 computation failure,
2 I/O failure, 64 usage error.  All outputs are deterministic functions of
the flags, inputs, and seed; the ``IV_THREADS`` environment variable caps
internal parallelism (0 = use all CPUs) without affecting results.
"""

from __future__ import annotations

import argparse
import itertools
import json
import os
import sys
import warnings
from pathlib import Path

from .dataset import load_table
from .estimators import (
    COLLINEARITY_THRESHOLD,
    confidence_interval,
    iv_just_identified,
    ols,
    ols_adj,
    tsls,
)
from .exceptions import (
    CsvParseError,
    DegenerateColumnWarning,
    IvkitError,
    NonFiniteValueError,
    SchemaError,
    UnknownVariableError,
    UsageError,
)
from .ivsearch import SearchCriteria, search, sweep
from .simulate import METHODS, DgpConfig, boxplot_stats, monte_carlo
from .stats import partial_report, pearson_report
from .svgplot import boxplot_svg

EX_OK = 0
EX_COMPUTE = 1
EX_IO = 2
EX_USAGE = 64

DEFAULT_METHODS = "ols,ols_adj,iv,iv_adj"


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that reports usage errors with exit code 64."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EX_USAGE, f"{self.prog}: error: {message}\n")


def _name_list(text: str | None) -> list[str]:
    if text is None:
        return []
    return [part.strip() for part in text.split(",") if part.strip()]


def _float_list(text: str) -> list[float]:
    try:
        return [float(part) for part in _name_list(text)]
    except ValueError:
        raise UsageError(f"cannot parse number list {text!r}") from None


def _threads_from_env() -> int:
    raw = os.environ.get("IV_THREADS")
    if raw is None:
        return 1
    try:
        threads = int(raw)
    except ValueError:
        raise UsageError(f"IV_THREADS must be an integer, got {raw!r}") from None
    if threads < 0:
        raise UsageError("IV_THREADS must be >= 0")
    return threads


def _check_level(level: float) -> float:
    if not 0.0 < level < 1.0:
        raise UsageError(f"--level must be in (0, 1), got {level}")
    return level


def build_parser() -> _Parser:
    parser = _Parser(prog="ivkit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p_sim = sub.add_parser("simulate", help="run the Monte Carlo estimator comparison")
    p_sim.add_argument("--reps", type=int, required=True, help="number of replicates")
    p_sim.add_argument("--n", type=int, required=True, help="sample size per replicate")
    p_sim.add_argument("--seed", type=int, required=True, help="base RNG seed")
    p_sim.add_argument("--out", required=True, metavar="DIR", help="output directory")
    p_sim.add_argument("--svg", action="store_true", help="also write boxplot.svg")
    p_sim.set_defaults(handler=_cmd_simulate)

    p_est = sub.add_parser("estimate", help="estimate treatment effects from a CSV")
    p_est.add_argument("--input", required=True, metavar="CSV")
    p_est.add_argument("--treatment", required=True, metavar="NAME")
    p_est.add_argument("--outcome", required=True, metavar="NAME")
    p_est.add_argument("--instruments", metavar="NAMES", help="comma-separated")
    p_est.add_argument("--confounders", metavar="NAMES", help="comma-separated")
    p_est.add_argument(
        "--methods",
        default=DEFAULT_METHODS,
        metavar="NAMES",
        help=f"comma-separated subset of ols,ols_adj,iv,tsls,iv_adj (default {DEFAULT_METHODS})",
    )
    p_est.add_argument("--level", type=float, default=0.95, help="CI level (default 0.95)")
    p_est.add_argument(
        "--standardized",
        action="store_true",
        help="treat inputs as pre-standardized (drop the intercept)",
    )
    p_est.add_argument("--out", metavar="FILE", help="write JSON here instead of stdout")
    p_est.set_defaults(handler=_cmd_estimate)

    p_sea = sub.add_parser("search", help="screen instrument-confounder pairs")
    p_sea.add_argument("--input", required=True, metavar="CSV")
    p_sea.add_argument("--treatment", required=True, metavar="NAME")
    p_sea.add_argument("--outcome", required=True, metavar="NAME")
    p_sea.add_argument("--confounders", required=True, metavar="NAMES")
    p_sea.add_argument(
        "--instruments",
        metavar="NAMES",
        help="instrument pool (default: every other variable)",
    )
    p_sea.add_argument("--tau-relevance", type=float, metavar="T")
    p_sea.add_argument("--tau-independence", type=float, metavar="T")
    p_sea.add_argument("--tau-exclusion", type=float, metavar="T")
    p_sea.add_argument("--sweep-relevance", metavar="LIST", help="comma-separated values")
    p_sea.add_argument("--sweep-independence", metavar="LIST")
    p_sea.add_argument("--sweep-exclusion", metavar="LIST")
    p_sea.add_argument("--level", type=float, default=0.95)
    p_sea.add_argument("--out", required=True, metavar="DIR")
    p_sea.set_defaults(handler=_cmd_search)

    p_cor = sub.add_parser("corr", help="report a (partial) correlation with its CI")
    p_cor.add_argument("--input", required=True, metavar="CSV")
    p_cor.add_argument("x", metavar="VAR1")
    p_cor.add_argument("y", metavar="VAR2")
    p_cor.add_argument("--given", metavar="VAR", help="condition on this variable")
    p_cor.add_argument("--level", type=float, default=0.95)
    p_cor.set_defaults(handler=_cmd_corr)

    return parser


def _cmd_simulate(args) -> int:
    if args.reps < 1:
        raise UsageError("--reps must be >= 1")
    if args.n < 10:
        raise UsageError("--n must be >= 10")
    if not 0 <= args.seed < 1 << 64:
        raise UsageError("--seed must be an unsigned 64-bit integer")
    threads = _threads_from_env()
    cfg = DgpConfig(seed=args.seed)
    table = monte_carlo(cfg, args.n, args.reps, threads=threads)

    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    table.write_csv(outdir / "replicates.csv")
    stats = {m: boxplot_stats(table.column(m)) for m in METHODS}
    payload = {m: s.to_dict() for m, s in stats.items()}
    (outdir / "boxstats.json").write_text(json.dumps(payload, indent=2) + "\n")
    if args.svg:
        svg = boxplot_svg(
            [(m, stats[m]) for m in METHODS],
            reference=cfg.beta_ya,
            title="ATE estimates by method",
        )
        (outdir / "boxplot.svg").write_text(svg)
    return EX_OK


def _cmd_estimate(args) -> int:
    level = _check_level(args.level)
    methods = _name_list(args.methods)
    if not methods:
        raise UsageError("--methods must name at least one method")
    data = load_table(args.input)
    a = data.column(args.treatment)
    y = data.column(args.outcome)
    z_names = _name_list(args.instruments)
    u_names = _name_list(args.confounders)
    z = data.select(z_names)
    u = data.select(u_names)
    intercept = not args.standardized

    records = []
    for method in methods:
        if method == "ols":
            est = ols(a, y, intercept)
        elif method == "ols_adj":
            if not u:
                raise UsageError("method ols_adj requires --confounders")
            est = ols_adj(a, u, y, intercept)
        elif method == "iv":
            if len(z) != 1:
                raise UsageError("method iv requires exactly one --instruments entry")
            est = iv_just_identified(z[0], a, y, intercept)
        elif method == "tsls":
            if not z:
                raise UsageError("method tsls requires --instruments")
            est = tsls(z, a, [], y, intercept)
        elif method == "iv_adj":
            if not z:
                raise UsageError("method iv_adj requires --instruments")
            if not u:
                raise UsageError("method iv_adj requires --confounders")
            est = tsls(z, a, u, y, intercept)
        else:
            raise UsageError(f"unknown method {method!r}")
        record = est.to_dict()
        lo, hi = confidence_interval(est, level)
        record["ci"] = [lo, hi]
        record["level"] = level
        records.append(record)
        worst = est.diagnostics.get("max_covariate_corr")
        if worst is not None and worst > COLLINEARITY_THRESHOLD:
            print(
                f"warning: {method}: adjustment covariates are nearly collinear "
                f"(max pairwise correlation {worst:.3f})",
                file=sys.stderr,
            )

    text = json.dumps(records, indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EX_OK


def _cmd_search(args) -> int:
    level = _check_level(args.level)
    data = load_table(args.input)
    confounders = _name_list(args.confounders)
    if not confounders:
        raise UsageError("--confounders must name at least one variable")
    if args.instruments is None:
        reserved = {args.treatment, args.outcome, *confounders}
        instruments = [name for name in data.names if name not in reserved]
    else:
        instruments = _name_list(args.instruments)
    if not instruments:
        raise UsageError("instrument pool is empty")

    sweep_flags = (args.sweep_relevance, args.sweep_independence, args.sweep_exclusion)
    sweeping = any(flag is not None for flag in sweep_flags)
    if sweeping:
        if not all(flag is not None for flag in sweep_flags):
            raise UsageError("sweep mode needs all three --sweep-* lists")
        rel, ind, exc = (_float_list(flag) for flag in sweep_flags)
        grid = list(itertools.product(rel, ind, exc))
        taus = grid[0]
    else:
        taus = (args.tau_relevance, args.tau_independence, args.tau_exclusion)
        if any(tau is None for tau in taus):
            raise UsageError(
                "search needs --tau-relevance, --tau-independence, and --tau-exclusion"
            )

    try:
        criteria = SearchCriteria(
            treatment=args.treatment,
            outcome=args.outcome,
            confounder_pool=tuple(confounders),
            instrument_pool=tuple(instruments),
            tau_relevance=taus[0],
            tau_independence=taus[1],
            tau_exclusion=taus[2],
            ci_level=level,
        )
    except ValueError as err:
        raise UsageError(str(err)) from None
    # Validate pool names up front so typos exit as usage errors.
    data.select(list(criteria.instrument_pool) + list(criteria.confounder_pool))
    data.select([criteria.treatment, criteria.outcome])

    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", DegenerateColumnWarning)
        if sweeping:
            cells = sweep(data, criteria, grid)
            payload = [
                {
                    "tau_relevance": key[0],
                    "tau_independence": key[1],
                    "tau_exclusion": key[2],
                    "count": len(cands),
                    "candidates": [c.to_dict() for c in cands],
                }
                for key, cands in cells.items()
            ]
            (outdir / "sweep.json").write_text(json.dumps(payload, indent=2) + "\n")
        else:
            candidates = search(data, criteria)
            _write_candidates(outdir, candidates)
    for warning in caught:
        if issubclass(warning.category, DegenerateColumnWarning):
            print(f"warning: {warning.message}", file=sys.stderr)
    return EX_OK


def _write_candidates(outdir: Path, candidates) -> None:
    with open(outdir / "candidates.jsonl", "w", encoding="utf-8") as fh:
        for cand in candidates:
            fh.write(cand.to_json() + "\n")
    with open(outdir / "candidates.csv", "w", encoding="utf-8", newline="") as fh:
        fh.write("instrument,confounder,rho_za,rho_zu,rho_zy_a,passed\n")
        for cand in candidates:
            fh.write(
                f"{cand.instrument},{cand.confounder},"
                f"{cand.rho_za.value:.6f},{cand.rho_zu.value:.6f},"
                f"{cand.rho_zy_given_a.value:.6f},{str(cand.passed).lower()}\n"
            )


def _cmd_corr(args) -> int:
    level = _check_level(args.level)
    data = load_table(args.input)
    x = data.column(args.x)
    y = data.column(args.y)
    if args.given is None:
        report = pearson_report(x, y, level)
    else:
        report = partial_report(x, y, data.column(args.given), level)
    print(report.to_json())
    return EX_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EX_USAGE
    try:
        return args.handler(args)
    except UsageError as err:
        print(f"error: {err}", file=sys.stderr)
        return EX_USAGE
    except UnknownVariableError as err:
        message = err.args[0] if err.args else str(err)
        print(f"error: {message}", file=sys.stderr)
        return EX_USAGE
    except (CsvParseError, SchemaError, NonFiniteValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EX_IO
    except (IvkitError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EX_COMPUTE


if __name__ == "__main__":
    sys.exit(main())
