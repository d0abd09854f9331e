# src/cli.py
"""Command-line surface: dictionaries, coherence reports, bounds, recovery and experiments.

Exit codes: 0 ok, 1 usage error, 2 runtime error (with an `error: <Kind>: <message>`
line on stderr). Results go to stdout, diagnostics to stderr.
"""
import argparse
import hashlib
import json
import os
import sys
from typing import Optional

import numpy as np
import pandas as pd
from loguru import logger

from src.analysis.coherence import coherence_report
from src.analysis.dictionary_builder import build_npd
from src.analysis.experiments import PIPELINES, write_outputs
from src.analysis.guarantees import (
    bounded_noise_threshold_npi,
    bounded_noise_threshold_restricted,
    evaluate_condition,
    gaussian_threshold_npi,
    gaussian_threshold_restricted,
)
from src.analysis.helpers import format_complex, frame_to_csv, print_rich_dataframe
from src.analysis.recovery import basis_pursuit, estimate_periods, omp, support_from_coefficients
from src.analysis.signals import add_bounded_noise, add_gaussian_noise, gen_mixture, make_rng
from src.analysis.support import period_set
from src.config import (
    BP_TOLERANCE,
    DEFAULT_FAMILY,
    DEFAULT_LENGTH,
    DEFAULT_OUTPUT_DIR,
    DEFAULT_P_MAX,
    DEFAULT_SEED,
    SUPPORT_REL_THRESHOLD,
)
from src.db.npd_file import export_dictionary, import_dictionary, import_signal
from src.exceptions import KTooLarge, NpdError
from src.models.dictionary import DictionaryFamily, NpdDictionary
from src.models.experiment import ExperimentConfig, parse_float_range, parse_int_range
from src.models.recovery import StopRule
from src.utils.logging import configure_logging, log_run_header, log_verdict

CONDITIONS = ["classic-mu", "classic-mu1", "thm1", "thm2", "cor1", "refined"]
MEASURES = ["all", "mu", "mu1", "npi", "npa", "zeta_p", "nu_p", "cnpi", "cnpa", "erc"]

# Flags that never change a command's results
_NON_RESULT_ARGS = ("handler", "log_level", "pretty", "command")


class UsageError(Exception):
    """Raised by the parser instead of exiting, so dispatch() owns the exit code."""


class CliParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def int_range(text: str) -> list[int]:
    try:
        values = parse_int_range(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"not an integer range: {text!r}") from e
    if not values:
        raise argparse.ArgumentTypeError(f"empty range: {text!r}")
    return values


def float_range(text: str) -> list[float]:
    try:
        values = parse_float_range(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"not a number range: {text!r}") from e
    if not values:
        raise argparse.ArgumentTypeError(f"empty range: {text!r}")
    return values


def _common_parent() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--log-level", default="INFO", help="loguru level for stderr (default: INFO)")
    parent.add_argument("--seed", type=int, default=None, help=f"Random seed (default: {DEFAULT_SEED})")
    return parent


def _dictionary_parent() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--dict", dest="dict_path", help="Dictionary file written by the dict command")
    parent.add_argument("--family", choices=[f.value for f in DictionaryFamily], help="Dictionary family")
    parent.add_argument("--pmax", type=int, help=f"Largest period (default: {DEFAULT_P_MAX})")
    parent.add_argument("--len", dest="length", type=int, help=f"Signal length L (default: {DEFAULT_LENGTH})")
    return parent


def _add_experiment_flags(sub: argparse.ArgumentParser, name: str) -> None:
    sub.add_argument("--config", help="JSON experiment config; flags override its fields")
    sub.add_argument("--m", type=int, help="Number of hidden periods m")
    sub.add_argument("--k", type=int_range, help="Sparsity levels, e.g. 1:20")
    sub.add_argument("--trials", type=int, help="Trials per point")
    sub.add_argument("--periods", type=int_range, help="Hidden periods T, e.g. 4 or 3,5")
    sub.add_argument("--bp-tol", type=float, help=f"Basis pursuit tolerance (default: {BP_TOLERANCE:g})")
    sub.add_argument("--jobs", type=int, help="Worker processes (default: all cores)")
    sub.add_argument("--out", help="Basename for the CSV and SVG outputs")
    sub.add_argument("--db", help="SQLite results database to store rows in")
    sub.add_argument("--pretty", action="store_true", help="Render the table with rich instead of CSV")
    if name == "phase":
        sub.add_argument("--s", type=int_range, help="Sparsity levels s (default: 1..k)")
        sub.add_argument(
            "--empirical", action="store_const", const=True, default=None,
            help="Also measure BP/OMP success at every (k, s)",
        )
    if name in ("phase", "sweep-recovery", "sweep-bounded"):
        sub.add_argument("--gamma", type=float_range, help="Coefficient floor(s) gamma, e.g. 0:2:0.25")
    if name == "sweep-bounded":
        sub.add_argument("--eps", type=float, help="Noise energy bound epsilon")
    if name == "sweep-gaussian":
        sub.add_argument("--sigma", type=float, help="Noise standard deviation sigma")
        sub.add_argument("--alpha", type=float_range, help="Threshold scales alpha, e.g. 0:1:0.1")


def build_parser() -> CliParser:
    parser = CliParser(prog="npd", description=__doc__.splitlines()[0])
    subparsers = parser.add_subparsers(dest="command", required=True, parser_class=CliParser)
    common, dictionary = _common_parent(), _dictionary_parent()

    sub = subparsers.add_parser("dict", parents=[common], help="Build a dictionary and write it to a file")
    sub.add_argument("--family", choices=[f.value for f in DictionaryFamily], default=DEFAULT_FAMILY)
    sub.add_argument("--pmax", type=int, default=DEFAULT_P_MAX)
    sub.add_argument("--len", dest="length", type=int, default=DEFAULT_LENGTH)
    sub.add_argument("--no-normalize", dest="normalize", action="store_false", help="Keep raw integer/unit-modulus atoms")
    sub.add_argument("--out", required=True, help="Output .npd path")
    sub.set_defaults(handler=handle_dict)

    sub = subparsers.add_parser("coherence", parents=[common, dictionary], help="Coherence measures as CSV")
    sub.add_argument("--measure", choices=MEASURES, default="all")
    sub.add_argument("--k", type=int_range, default=[], help="Sparsity levels k")
    sub.add_argument("--m", type=int_range, default=[], help="Numbers of hidden periods m")
    sub.add_argument("--s", type=int_range, default=[], help="Sparsity levels s for cnpi/cnpa")
    sub.add_argument("--p", type=int_range, default=[], help="Periods p for zeta_p/nu_p")
    sub.add_argument("--pretty", action="store_true")
    sub.set_defaults(handler=handle_coherence)

    sub = subparsers.add_parser("bounds", parents=[common, dictionary], help="Evaluate a recovery condition")
    sub.add_argument("--condition", choices=CONDITIONS, required=True)
    sub.add_argument("--k", type=int)
    sub.add_argument("--m", type=int)
    sub.add_argument("--s", type=int)
    sub.add_argument("--periods", type=int_range, help="Hidden periods T for thm2")
    sub.add_argument("--mu", type=float, help="Mutual coherence for classic-mu without a dictionary")
    noise = sub.add_mutually_exclusive_group()
    noise.add_argument("--eps", type=float, help="Also report the bounded-noise coefficient threshold")
    noise.add_argument("--sigma", type=float, help="Also report the Gaussian-noise coefficient threshold")
    sub.add_argument("--pretty", action="store_true")
    sub.set_defaults(handler=handle_bounds)

    sub = subparsers.add_parser("recover", parents=[common, dictionary], help="Recover a support and its periods")
    source = sub.add_mutually_exclusive_group(required=True)
    source.add_argument("--signal", help="File of L samples (comma or newline separated)")
    source.add_argument("--periods", type=int_range, help="Synthesize a mixture with these hidden periods")
    sub.add_argument("--gamma", type=float, default=0.0, help="Coefficient floor for synthesized mixtures")
    noise = sub.add_mutually_exclusive_group()
    noise.add_argument("--noise-eps", type=float, help="Add bounded noise of this norm")
    noise.add_argument("--noise-sigma", type=float, help="Add Gaussian noise of this deviation")
    sub.add_argument("--method", choices=["omp", "bp"], default="omp")
    sub.add_argument("--sparsity", "--stop-k", dest="sparsity", type=int, help="OMP: stop after this many atoms")
    sub.add_argument("--eps", "--stop-eps", dest="eps", type=float, help="OMP: stop once the residual norm is at most eps")
    sub.add_argument("--max-iter", type=int, help="OMP: iteration cap")
    sub.add_argument("--bp-tol", type=float, default=BP_TOLERANCE)
    sub.add_argument("--pretty", action="store_true")
    sub.set_defaults(handler=handle_recover)

    for name in PIPELINES:
        sub = subparsers.add_parser(name, parents=[common, dictionary], help=f"Run the {name} experiment")
        _add_experiment_flags(sub, name)
        sub.set_defaults(handler=handle_experiment)

    return parser


def invocation_digest(args: argparse.Namespace) -> str:
    values = {key: value for key, value in vars(args).items() if key not in _NON_RESULT_ARGS}
    canonical = json.dumps(values, sort_keys=True, default=str, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:12]


def load_dictionary(args: argparse.Namespace) -> NpdDictionary:
    """--dict wins; otherwise the dictionary is built from --family/--pmax/--len."""
    if args.dict_path:
        return import_dictionary(args.dict_path)
    return build_npd(
        DictionaryFamily.parse(args.family or DEFAULT_FAMILY),
        args.pmax or DEFAULT_P_MAX,
        args.length or DEFAULT_LENGTH,
        normalize=True,
    )


def emit(df: pd.DataFrame, args: argparse.Namespace, title: str, header_lines=()) -> None:
    if getattr(args, "pretty", False):
        print_rich_dataframe(df, title=title)
    else:
        sys.stdout.write(frame_to_csv(df, header_lines))


def _header(args: argparse.Namespace, digest: str) -> list[str]:
    return [f"# command={args.command}", f"# seed={args.seed}", f"# config_digest={digest}"]


def handle_dict(args: argparse.Namespace) -> int:
    d = build_npd(DictionaryFamily.parse(args.family), args.pmax, args.length, normalize=args.normalize)
    export_dictionary(d, args.out)
    logger.info(f"Wrote {d!r} to {args.out}")
    return 0


def _require(values, flag: str, measure: str) -> None:
    if not values:
        raise ValueError(f"--measure {measure} requires --{flag}")


def handle_coherence(args: argparse.Namespace) -> int:
    K = load_dictionary(args)
    measure = args.measure
    if measure in ("mu1", "npi", "npa", "cnpi", "cnpa", "erc"):
        _require(args.k, "k", measure)
    if measure in ("npi", "npa", "cnpi", "cnpa", "erc"):
        _require(args.m, "m", measure)
    if measure in ("cnpi", "cnpa"):
        _require(args.s, "s", measure)
    if measure in ("zeta_p", "nu_p"):
        _require(args.p, "p", measure)
    if measure == "mu1" and max(args.k) > K.N - 1:
        raise KTooLarge(f"mu1 needs k <= N-1 = {K.N - 1}, got k={max(args.k)}")

    report = coherence_report(K, args.k, args.m, args.s, args.p, include_erc=measure == "erc")
    df = report.to_frame()
    if measure != "all":
        df = df[df["measure"] == measure].reset_index(drop=True)
    emit(df, args, f"coherence ({K.family.value}, L={K.L}, p_max={K.p_max})", _header(args, args.digest))
    return 0


def _noise_threshold(K: NpdDictionary, args: argparse.Namespace) -> tuple[Optional[float], bool]:
    """(threshold, extrapolated) for thm1/thm2 when --eps or --sigma is given."""
    if args.eps is None and args.sigma is None:
        return None, False
    if args.condition == "thm1":
        if args.eps is not None:
            return bounded_noise_threshold_npi(K, args.k, args.m, args.eps), False
        return gaussian_threshold_npi(K, args.k, args.m, args.sigma), True
    if args.condition == "thm2":
        if args.eps is not None:
            return bounded_noise_threshold_restricted(K, args.periods, args.eps), False
        return gaussian_threshold_restricted(K, args.periods, args.sigma), False
    raise ValueError(f"Noise thresholds are available for thm1 and thm2, not {args.condition}")


def handle_bounds(args: argparse.Namespace) -> int:
    needs_dictionary = not (args.condition == "classic-mu" and args.mu is not None)
    K = load_dictionary(args) if needs_dictionary else None

    verdict = evaluate_condition(
        K, args.condition, k=args.k, m=args.m, s=args.s, periods=args.periods, mu=args.mu
    )
    log_verdict(verdict)

    row = {
        "condition": verdict.name,
        "lhs": verdict.lhs,
        "holds": verdict.holds,
        "valid": verdict.valid,
        "detail": verdict.describe_detail(),
    }
    if args.eps is not None or args.sigma is not None:
        threshold, extrapolated = _noise_threshold(K, args)
        row["threshold"] = threshold
        row["extrapolated"] = extrapolated
        logger.info(f"Coefficient threshold {threshold:.6g}{' (extrapolated)' if extrapolated else ''}")

    emit(pd.DataFrame([row]), args, f"bounds: {verdict.name}", _header(args, args.digest))
    return 0


def _recovery_signal(K: NpdDictionary, args: argparse.Namespace) -> tuple[np.ndarray, list[str]]:
    if args.signal:
        return import_signal(args.signal), [f"# signal={args.signal}"]

    rng = make_rng(args.seed)
    T = period_set(args.periods)
    x, y = gen_mixture(K, T, args.gamma, rng)
    if args.noise_eps is not None:
        y = add_bounded_noise(y, args.noise_eps, rng)
    elif args.noise_sigma is not None:
        y = add_gaussian_noise(y, args.noise_sigma, rng)
    true_support = ",".join(str(int(i) + 1) for i in np.flatnonzero(x))
    return y, [f"# true_periods={T.label()}", f"# true_support={true_support}"]


def handle_recover(args: argparse.Namespace) -> int:
    K = load_dictionary(args)
    y, signal_lines = _recovery_signal(K, args)

    if args.method == "omp":
        if args.sparsity is None and args.eps is None and args.max_iter is None:
            stop = StopRule(
                residual_norm=SUPPORT_REL_THRESHOLD * float(np.linalg.norm(y)),
                max_iterations=min(K.N, K.L),
            )
        else:
            stop = StopRule(sparsity=args.sparsity, residual_norm=args.eps, max_iterations=args.max_iter)
        result = omp(K, y, stop)
        support, coefficients, residual = result.support, result.coefficients, result.residual_norm
    else:
        x = basis_pursuit(K, y, tol=args.bp_tol)
        support = support_from_coefficients(x, SUPPORT_REL_THRESHOLD)
        coefficients = x[np.asarray(support, dtype=np.int64) - 1]
        residual = float(np.linalg.norm(K.entries @ x - y))

    hidden, period = estimate_periods(K, support)
    logger.info(f"{args.method}: {len(support)} atoms, hidden periods {hidden}, period {period}")

    df = pd.DataFrame(
        {
            "index": list(support),
            "atom_period": [int(K.atom_period[i - 1]) for i in support],
            "coefficient": [format_complex(c) for c in coefficients],
        }
    )
    header = _header(args, args.digest) + signal_lines + [
        f"# method={args.method}",
        f"# residual_norm={residual:.12g}",
        f"# hidden_periods={','.join(str(p) for p in hidden)}",
        f"# estimated_period={period}",
    ]
    emit(df, args, f"recover ({args.method})", header)
    return 0


def experiment_config(args: argparse.Namespace) -> ExperimentConfig:
    """Defaults, then the --config file, then flags."""
    cfg = ExperimentConfig.from_json(args.config) if args.config else ExperimentConfig()

    overrides = {
        "family": args.family,
        "p_max": args.pmax,
        "length": args.length,
        "m": args.m,
        "k_range": args.k,
        "s_range": getattr(args, "s", None),
        "trials": args.trials,
        "gamma_range": getattr(args, "gamma", None),
        "alpha_range": getattr(args, "alpha", None),
        "periods": args.periods,
        "seed": args.seed,
        "empirical": getattr(args, "empirical", None),
        "bp_tol": args.bp_tol,
        "out": args.out,
        "jobs": args.jobs,
        "db": args.db,
    }
    if getattr(args, "eps", None) is not None:
        overrides["noise"] = {"kind": "bounded", "level": args.eps}
    if getattr(args, "sigma", None) is not None:
        overrides["noise"] = {"kind": "gaussian", "level": args.sigma}

    cfg = cfg.merged(overrides)
    if cfg.out is None:
        cfg = cfg.with_runtime(out=os.path.join(DEFAULT_OUTPUT_DIR, args.command))
    return cfg


def handle_experiment(args: argparse.Namespace) -> int:
    if args.dict_path:
        raise ValueError("Experiments build their dictionary from --family/--pmax/--len")
    cfg = experiment_config(args)
    log_run_header(args.command, cfg.seed, cfg.digest())

    table = PIPELINES[args.command](cfg)
    write_outputs(table, cfg)
    if args.pretty:
        print_rich_dataframe(table.rows, title=repr(table))
    else:
        sys.stdout.write(table.to_csv_text())
    return 0


def dispatch(argv: Optional[list[str]] = None) -> int:
    """Parses argv, runs one subcommand and returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        sys.stderr.write(f"error: usage: {e}\n")
        return 1
    except SystemExit as e:
        # --help and friends
        return int(e.code or 0)

    try:
        configure_logging(args.log_level)
        if args.command not in PIPELINES:
            if args.seed is None:
                args.seed = DEFAULT_SEED
            args.digest = invocation_digest(args)
            log_run_header(args.command, args.seed, args.digest)
        return args.handler(args)
    except (NpdError, ValueError, OSError) as e:
        logger.error(f"{args.command} failed: {e}")
        sys.stderr.write(f"error: {type(e).__name__}: {e}\n")
        return 2
