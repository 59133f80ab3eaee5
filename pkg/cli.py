"""
Command-line interface

Subcommands:
- solve:   sparse solution of a system file with one method
- certify: a priori recovery / stability conditions for a system file
- bench:   Monte Carlo experiments and sweeps (presets or explicit flags)
- phase:   recovery phase diagrams over delta = N/n and k
- lift:    monomial lifting of a point

Machine-readable output (JSON or CSV) goes to stdout or --output; logs go to stderr with the
level taken from POLYSPARSE_LOG.

Exit codes: 0 success / verified, 2 unverified solution or infeasibility certificate,
1 error, 130 interrupted (partial CSV written first).
"""

import argparse
import json
import logging
import sys
from typing import Any, Dict, List, Optional

from pydantic import ValidationError

from analysis.certificates import certify, certify_posteriori, ega_uniqueness, format_certificate
from bench.instances import ExperimentSpec
from bench.reporting import write_phase_csv, write_summary_csv
from bench.runner import run_experiment
from bench.sweeps import (
    epsilon_tuning_sweep,
    error_noise_correlation,
    noise_sweep,
    parameter_sweep,
    phase_diagram,
    phase_diagram_rows,
)
from common.dispatch import METHODS, MethodOptions, run_method
from common.errors import PolysparseError
from common.logging_setup import setup_logging
from common.presets import get_preset, preset_names
from config import settings
from conic.solver import SolverOptions, write_trace
from data.system_io import load_system
from poly.basis import enumerate_basis, lift
from services import services

logger = logging.getLogger("polysparse.cli")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_UNVERIFIED = 2
EXIT_INTERRUPTED = 130


def _float_list(text: str) -> List[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got '{text}'")


def _int_list(text: str) -> List[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got '{text}'")


def _emit(text: str, output: Optional[str]) -> None:
    if output in (None, "-"):
        sys.stdout.write(text + "\n")
        sys.stdout.flush()
        return
    with open(output, "w", encoding="utf-8") as f:
        f.write(text + "\n")
    logger.info("✅ Wrote %s", output)


def _progress(done: int, total: int) -> None:
    step = max(1, total // 10)
    if done == total or done % step == 0:
        logger.info("📊 %d/%d trials", done, total)


# ---------------------------------------------------------------- solve


def cmd_solve(args: argparse.Namespace) -> int:
    system = load_system(args.input)
    solver_overrides: Dict[str, Any] = {"trace": bool(args.trace)}
    if args.max_iterations is not None:
        solver_overrides["max_iterations"] = args.max_iterations
    overrides: Dict[str, Any] = {}
    if args.tol is not None:
        overrides["verify_tol"] = args.tol
    if args.reweight_iterations is not None:
        overrides["reweight_iterations"] = args.reweight_iterations
    if args.reweight_eps is not None:
        overrides["reweight_eps"] = args.reweight_eps
    options = MethodOptions(
        nonneg=args.nonneg,
        noise_epsilon=args.noise_epsilon,
        greedy_epsilon=args.epsilon,
        max_support=args.max_support,
        enumerate_all=args.enumerate_all,
        solver=SolverOptions(**solver_overrides),
        **overrides,
    )

    outcome = run_method(args.method, system, options)
    payload = outcome.to_dict()
    try:
        check = certify_posteriori(
            system, outcome.phi_hat, verified=outcome.verified, allow_truncation=True
        )
        payload["unique"] = check.x_unique
        payload["group_support_test"] = {
            "support_count": check.support_count,
            "bound": check.check.rhs,
            "holds": check.check.holds,
        }
    except (PolysparseError, ValueError) as e:
        logger.debug("A posteriori uniqueness test skipped: %s", e)
    if args.enumerate_all and outcome.method == "ega":
        payload["unique_sparsest"] = ega_uniqueness(outcome)

    if args.trace and outcome.solver_status is not None:
        write_trace(outcome.solver_status, args.trace)
        logger.info("✅ Solver trace written to %s", args.trace)

    _emit(json.dumps(payload, indent=2), args.output)

    if outcome.infeasible:
        cap = system.n if args.max_support is None else min(args.max_support, system.n)
        logger.warning(
            "⚠️ Infeasibility certificate: no support of size <= %d meets the residual "
            "threshold (best squared residual %.3e)",
            cap,
            outcome.diagnostics.get("residual_sq", float("nan")),
        )
        return EXIT_UNVERIFIED
    if not outcome.verified:
        logger.warning(
            "⚠️ Estimate does not satisfy the polynomial equations (residual %.3e)",
            outcome.residual_norm,
        )
        return EXIT_UNVERIFIED
    logger.info("✅ Verified solution with support %s", [int(j) + 1 for j in outcome.support])
    return EXIT_OK


# ---------------------------------------------------------------- certify


def cmd_certify(args: argparse.Namespace) -> int:
    system = load_system(args.input)
    cert = certify(system, args.k, args.epsilon, allow_truncation=args.allow_truncation)
    if args.format == "pretty":
        _emit(format_certificate(cert), args.output)
    else:
        _emit(json.dumps(cert.to_dict(), indent=2), args.output)
    return EXIT_OK


# ---------------------------------------------------------------- bench / phase


def _spec_from_args(args: argparse.Namespace, preset: Optional[Dict[str, Any]]) -> ExperimentSpec:
    base: Dict[str, Any] = dict(preset["spec"]) if preset else {}
    overrides = {
        "n": args.n,
        "d": args.d,
        "N": getattr(args, "N", None),
        "k": getattr(args, "k", None),
        "trials": args.trials,
        "seed": args.seed,
        "noise_epsilon": args.noise_epsilon,
        "solver_epsilon": args.epsilon,
        "methods": args.method,
        "max_support": args.max_support,
        "time_budget_s": args.time_budget,
        "experiment_id": args.experiment_id,
    }
    base.update({key: value for key, value in overrides.items() if value is not None})
    if args.timing:
        base["record_timing"] = True
    return ExperimentSpec.model_validate(base)


def _phase(args: argparse.Namespace, spec: ExperimentSpec, preset: Optional[Dict[str, Any]]) -> int:
    preset = preset or {}
    deltas = args.deltas or preset.get("deltas") or [1.0, 2.0, 3.0, 5.0]
    kmin = args.kmin if args.kmin is not None else preset.get("kmin", 0)
    kmax = args.kmax if args.kmax is not None else preset.get("kmax", spec.n)
    degrees = args.degrees or preset.get("degrees")
    k_values = range(kmin, kmax + 1)
    if degrees:
        diagram = phase_diagram_rows(spec, degrees, k_values, deltas, args.threads, _progress)
    else:
        diagram = phase_diagram(spec, k_values, deltas, args.threads, _progress)
    write_phase_csv(diagram.cells, args.output)
    return EXIT_INTERRUPTED if diagram.interrupted else EXIT_OK


def cmd_bench(args: argparse.Namespace) -> int:
    preset = get_preset(args.preset) if args.preset else None
    kind = preset["kind"] if preset else "experiment"
    if kind == "phase":
        spec = _spec_from_args(args, preset)
        return _phase(args, spec, preset)

    spec = _spec_from_args(args, preset)
    if kind == "experiment":
        result = run_experiment(spec, threads=args.threads, progress=_progress)
        write_summary_csv(result.summary(), args.output)
        return EXIT_INTERRUPTED if result.interrupted else EXIT_OK

    if kind == "noise_sweep":
        sweep = noise_sweep(spec, args.levels or preset["levels"], args.threads, _progress)
        for method in spec.methods:
            r = error_noise_correlation(sweep.rows, method)
            logger.info("📈 %s: correlation of relative error with noise level r=%.3f", method, r)
    elif kind == "epsilon_sweep":
        sweep = epsilon_tuning_sweep(
            spec, args.levels or preset["configured"], args.threads, _progress
        )
    else:
        sweep = parameter_sweep(spec, preset["field"], preset["values"], args.threads, _progress)
    write_summary_csv(sweep.rows, args.output)
    return EXIT_INTERRUPTED if sweep.interrupted else EXIT_OK


def cmd_phase(args: argparse.Namespace) -> int:
    preset = get_preset(args.preset) if args.preset else None
    if preset is not None and preset["kind"] != "phase":
        raise ValueError(
            f"preset '{args.preset}' is a {preset['kind']} preset, not a phase diagram"
        )
    if preset is None:
        if args.n is None or args.d is None:
            raise ValueError("phase needs --n and --d (or --preset)")
        # N and k are set per cell
        preset = {"spec": {"n": args.n, "d": args.d, "N": args.n, "k": 0}}
    spec = _spec_from_args(args, preset)
    return _phase(args, spec, preset)


# ---------------------------------------------------------------- lift


def cmd_lift(args: argparse.Namespace) -> int:
    basis = enumerate_basis(args.n, args.d)
    payload: Dict[str, Any] = {
        "n": basis.n,
        "d": basis.d,
        "M": basis.M,
        "labels": [basis.label(k) for k in range(basis.M)],
    }
    if args.x is not None:
        payload["phi"] = lift(basis, args.x).tolist()
    _emit(json.dumps(payload, indent=2), args.output)
    return EXIT_OK


# ---------------------------------------------------------------- parser


def _add_bench_flags(p: argparse.ArgumentParser, with_counts: bool) -> None:
    p.add_argument("--preset", choices=preset_names(), help="Named experiment regime")
    p.add_argument("--experiment-id", type=str, help="Label written to the summary CSV")
    p.add_argument("--n", type=int, help="Number of variables")
    p.add_argument("--d", type=int, help="Maximal degree")
    if with_counts:
        p.add_argument("--N", type=int, help="Number of equations")
        p.add_argument("--k", type=int, help="Nonzeros in x0")
    p.add_argument("--trials", type=int, help="Trials per cell")
    p.add_argument("--seed", type=int, help="Unsigned 64-bit seed")
    p.add_argument("--noise-epsilon", type=float, help="True noise norm ||e||_2")
    p.add_argument("--epsilon", type=float, help="Configured solver epsilon (default: noise level)")
    p.add_argument("--method", choices=METHODS, action="append", help="Repeat for several")
    p.add_argument("--max-support", type=int, help="Greedy support cap")
    p.add_argument("--time-budget", type=float, help="Seconds per solve before a cell times out")
    p.add_argument(
        "--threads", type=int, default=settings.BENCH_THREADS, help="Worker threads for trials"
    )
    p.add_argument(
        "--timing", action="store_true", help="Report mean_time_s (otherwise written as 0)"
    )
    p.add_argument("--output", "-o", type=str, help="CSV path (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polysparse", description="Sparse solutions of polynomial systems"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="Solve a system file")
    p.add_argument("input", help="Polynomial system JSON file")
    p.add_argument("--method", choices=METHODS, default="irl1l2")
    p.add_argument(
        "--epsilon",
        type=float,
        help="Greedy threshold on the SQUARED residual (default: noise-epsilon squared)",
    )
    p.add_argument(
        "--noise-epsilon", type=float, default=0.0, help="Residual norm bound for basis pursuit"
    )
    p.add_argument(
        "--nonneg",
        action=argparse.BooleanOptionalAction,
        default=True,
        help="Nonnegativity on all-even monomials (group methods only)",
    )
    p.add_argument("--tol", type=float, help="Relative tolerance of the polynomial verification")
    p.add_argument("--max-support", type=int, help="Greedy support cap")
    p.add_argument("--enumerate-all", action="store_true", help="EGA: every minimal support")
    p.add_argument("--reweight-iterations", type=int, help="Reweighting rounds")
    p.add_argument("--reweight-eps", type=float, help="Reweighting epsilon")
    p.add_argument("--max-iterations", type=int, help="Conic solver iteration cap")
    p.add_argument("--trace", type=str, help="Write the conic solver trace to this CSV")
    p.add_argument("--output", "-o", type=str, help="JSON path (default: stdout)")
    p.set_defaults(handler=cmd_solve)

    p = sub.add_parser("certify", help="Coherence-based recovery certificate")
    p.add_argument("input", help="Polynomial system JSON file")
    p.add_argument("--k", type=int, required=True, help="Sparsity level ||x0||_0")
    p.add_argument("--epsilon", type=float, default=0.0, help="Noise level for stability bounds")
    p.add_argument("--allow-truncation", action="store_true", help="Certify without zero columns")
    p.add_argument("--format", choices=["json", "pretty"], default="json")
    p.add_argument("--output", "-o", type=str, help="Output path (default: stdout)")
    p.set_defaults(handler=cmd_certify)

    p = sub.add_parser("bench", help="Monte Carlo experiment or sweep")
    _add_bench_flags(p, with_counts=True)
    p.add_argument("--levels", type=_float_list, help="Comma-separated sweep levels")
    p.add_argument("--deltas", type=_float_list, help="Phase presets: comma-separated N/n")
    p.add_argument("--kmin", type=int, help="Phase presets: smallest k")
    p.add_argument("--kmax", type=int, help="Phase presets: largest k")
    p.add_argument("--degrees", type=_int_list, help="Phase presets: one diagram row per degree")
    p.set_defaults(handler=cmd_bench)

    p = sub.add_parser("phase", help="Recovery phase diagram")
    _add_bench_flags(p, with_counts=False)
    p.add_argument("--deltas", type=_float_list, help="Comma-separated N/n ratios (>= 1)")
    p.add_argument("--kmin", type=int, help="Smallest k (default 0)")
    p.add_argument("--kmax", type=int, help="Largest k (default n)")
    p.add_argument("--degrees", type=_int_list, help="Comma-separated degrees, one row each")
    p.set_defaults(handler=cmd_phase)

    p = sub.add_parser("lift", help="Monomial basis and lifted point")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--x", type=_float_list, help="Comma-separated point to lift")
    p.add_argument("--output", "-o", type=str, help="JSON path (default: stdout)")
    p.set_defaults(handler=cmd_lift)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging()

    try:
        return args.handler(args)
    except KeyboardInterrupt:
        logger.info("❌ Cancelled by user")
        return EXIT_INTERRUPTED
    except ValidationError as e:
        first = e.errors()[0]
        where = ".".join(str(p) for p in first["loc"]) or "<input>"
        logger.error(f"❌ Invalid {where}: {first['msg']}")
        return EXIT_ERROR
    except (PolysparseError, OSError, ValueError, KeyError) as e:
        logger.error(f"❌ {e}")
        return EXIT_ERROR
    except Exception as e:
        logger.error(f"💥 Unexpected error: {e}", exc_info=True)
        return EXIT_ERROR
    finally:
        services.close_all(cancel=True)


if __name__ == "__main__":
    sys.exit(main())
