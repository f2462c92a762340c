"""
Command-line front end: evaluate the kernel, tabulate and plot the four
routes, and run the verification suite.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

from .config_loader import Settings, load_settings
from .data_structures import REPORT_HEADER, EvalRoute
from .green_kernel import RouteError, SingularityError, c0, evaluate_i
from .params import KernelParams, normalize_dimension
from .tables import build_rows, log_grid, save_csv
from .verification import run_suite

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_IO = 3
MIN_TABLE_RHO = 1e-5
PLOT_STEPS = 120


def parse_dims(text: str) -> Tuple[int, int]:
    """
    Parse ``A..B`` (or a single ``A``) into an inclusive dimension range.
    """
    parts = text.split("..")
    if len(parts) == 1:
        parts = [parts[0], parts[0]]
    if len(parts) != 2:
        raise ValueError(f"Dimension range must look like A..B, got {text!r}.")
    low, high = (normalize_dimension(part.strip()) for part in parts)
    if low > high:
        raise ValueError(f"Empty dimension range {text!r}.")
    return low, high


def _method(text: str) -> EvalRoute:
    try:
        return EvalRoute.from_name(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="Optional settings file (YAML/JSON).")
    common.add_argument("--log-level", default="WARNING", help="Logging level (default WARNING).")

    parser = argparse.ArgumentParser(
        prog="hyperlap",
        description="Fundamental solution of the Laplace-Beltrami operator on the hyperboloid H_R^d.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    eval_parser = sub.add_parser("eval", parents=[common], help="Evaluate I_d(rho) and the kernel at one rho.")
    eval_parser.add_argument("--dim", required=True, help="Dimension d (2..12).")
    eval_parser.add_argument("--radius", type=float, default=1.0, help="Hyperboloid radius R (default 1).")
    eval_parser.add_argument("--rho", required=True, type=float, help="Normalized distance rho = d(x, x')/R.")
    eval_parser.add_argument(
        "--method",
        type=_method,
        default=EvalRoute.AUTO,
        help="auto | quadrature | sum | hyp2f1 | hyp2f1-euler | legendre (default auto).",
    )
    eval_parser.add_argument("--tol", type=float, help="Relative tolerance (default from HYPERLAP_TOL or 1e-10).")
    eval_parser.set_defaults(handler=cmd_eval)

    table_parser = sub.add_parser("table", parents=[common], help="Write a cross-route CSV table.")
    table_parser.add_argument("--dim", required=True, help="Dimension d (2..12).")
    table_parser.add_argument("--radius", type=float, default=1.0, help="Hyperboloid radius R (default 1).")
    table_parser.add_argument("--rho-min", type=float, help="Smallest rho of the log grid (default 0.05).")
    table_parser.add_argument("--rho-max", type=float, help="Largest rho of the log grid (default 10).")
    table_parser.add_argument("--steps", type=int, help="Number of grid points (default 40).")
    table_parser.add_argument("--tol", type=float, help="Relative tolerance a route must meet to be listed.")
    table_parser.add_argument("--out", required=True, type=Path, help="Output CSV path.")
    table_parser.add_argument(
        "--max-workers",
        type=int,
        help="Maximum worker threads for table rows (default from HYPERLAP_MAX_WORKERS or 1).",
    )
    table_parser.set_defaults(handler=cmd_table)

    verify_parser = sub.add_parser("verify", parents=[common], help="Run the verification suite.")
    verify_parser.add_argument("--dims", default="2..9", help="Dimension range A..B (default 2..9).")
    verify_parser.add_argument("--tol", type=float, help="Tolerance for harmonicity and flux (default 1e-6).")
    verify_parser.set_defaults(handler=cmd_verify)

    plot_parser = sub.add_parser("plot", parents=[common], help="Write an SVG chart of log10 I_d per route.")
    plot_parser.add_argument("--dim", required=True, help="Dimension d (2..12).")
    plot_parser.add_argument("--rho-min", type=float, help="Smallest rho (default 0.05).")
    plot_parser.add_argument("--rho-max", type=float, help="Largest rho (default 10).")
    plot_parser.add_argument("--steps", type=int, default=PLOT_STEPS, help=f"Number of points (default {PLOT_STEPS}).")
    plot_parser.add_argument("--out", required=True, type=Path, help="Output SVG path.")
    plot_parser.set_defaults(handler=cmd_plot)
    return parser


def _kernel_params(parser: argparse.ArgumentParser, args: argparse.Namespace, settings: Settings) -> KernelParams:
    tol = args.tol if getattr(args, "tol", None) is not None else settings.kernel.tol_rel
    try:
        return KernelParams(
            d=args.dim,
            R=getattr(args, "radius", 1.0),
            tol_rel=tol,
            rho_min=settings.kernel.rho_min,
        )
    except ValueError as exc:
        parser.error(str(exc))
        raise  # pragma: no cover


def cmd_eval(args: argparse.Namespace, settings: Settings, parser: argparse.ArgumentParser) -> int:
    params = _kernel_params(parser, args, settings)
    try:
        result = evaluate_i(params.d, args.rho, args.method, params.tol_rel, rho_min=params.rho_min)
    except SingularityError as exc:
        parser.error(str(exc))
    except RouteError as exc:
        logger.error("Route %s failed: %s", exc.route.value, exc)
        if exc.best_estimate is not None:
            logger.error("Best estimate: %.17g", exc.best_estimate)
        return EXIT_FAILURE
    kernel = result.scaled(c0(params.d) / params.R ** (params.d - 2))
    print(f"route {result.route.value}")
    print("I_d %.17g" % result.value)
    print("H %.17g" % kernel.value)
    print("est_error %.17g" % result.est_error)
    print("imag_residue %.17g" % result.imag_residue)
    return EXIT_OK


def _grid(
    parser: argparse.ArgumentParser,
    args: argparse.Namespace,
    settings: Settings,
    default_steps: int,
) -> List[float]:
    rho_min = args.rho_min if args.rho_min is not None else settings.table.rho_min
    rho_max = args.rho_max if args.rho_max is not None else settings.table.rho_max
    steps = args.steps if args.steps is not None else default_steps
    if rho_min < MIN_TABLE_RHO:
        parser.error(f"--rho-min must be at least {MIN_TABLE_RHO}, got {rho_min!r}.")
    try:
        return log_grid(rho_min, rho_max, steps)
    except ValueError as exc:
        parser.error(str(exc))
        raise  # pragma: no cover


def cmd_table(args: argparse.Namespace, settings: Settings, parser: argparse.ArgumentParser) -> int:
    params = _kernel_params(parser, args, settings)
    grid = _grid(parser, args, settings, settings.table.steps)
    workers = args.max_workers if args.max_workers is not None else settings.workers
    rows = build_rows(params.d, grid, params.tol_rel, rho_min=params.rho_min, max_workers=workers)
    try:
        save_csv(rows, args.out)
    except OSError as exc:
        logger.error("Failed to write %s: %s", args.out, exc)
        return EXIT_IO
    return EXIT_OK


def cmd_verify(args: argparse.Namespace, settings: Settings, parser: argparse.ArgumentParser) -> int:
    try:
        low, high = parse_dims(args.dims)
    except ValueError as exc:
        parser.error(str(exc))
    tol = args.tol if args.tol is not None else settings.verify.tolerance
    if not tol > 0.0:
        parser.error(f"--tol must be positive, got {tol!r}.")
    reports = run_suite(
        range(low, high + 1),
        radii=settings.verify.radii,
        tol=tol,
        grid=settings.verify.harmonicity_grid(),
        h=settings.verify.fd_step,
        flux_radii=settings.verify.flux_radii,
    )
    print(REPORT_HEADER)
    failed = 0
    for report in reports:
        if report.passed:
            print(report.to_line())
        else:
            failed += 1
            print(f"FAIL {report.to_line()}")
    if failed:
        logger.warning("%d verification checks failed.", failed)
        return EXIT_FAILURE
    return EXIT_OK


def cmd_plot(args: argparse.Namespace, settings: Settings, parser: argparse.ArgumentParser) -> int:
    from .plotting import save_svg

    try:
        d = normalize_dimension(args.dim)
    except ValueError as exc:
        parser.error(str(exc))
    grid = _grid(parser, args, settings, PLOT_STEPS)
    rows = build_rows(d, grid, settings.kernel.tol_rel, rho_min=settings.kernel.rho_min, max_workers=settings.workers)
    try:
        save_svg(d, rows, args.out)
    except OSError as exc:
        logger.error("Failed to write %s: %s", args.out, exc)
        return EXIT_IO
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, str(args.log_level).upper(), logging.WARNING),
        format="[%(levelname)s] %(message)s",
        stream=sys.stderr,
    )
    try:
        settings = load_settings(args.config)
    except (FileNotFoundError, ValueError, RuntimeError) as exc:
        parser.error(str(exc))
    return args.handler(args, settings, parser)
