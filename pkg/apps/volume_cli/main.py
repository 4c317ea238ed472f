"""
Entanglement Volume CLI

Subcommands:
    ratios       volume ratios of entangled states detected by a criterion suite
    sweep        purity-free rescaled criterion over a grid of scaled parameters
    povm-info    parameters and spectra of an (N,M)-POVM
    check-state  criterion reports for one state file

Exit codes: 0 success, 1 configuration or input error, 2 numeric failure.
"""

import argparse
import io
import json
import sys
import uuid
from collections.abc import Sequence
from fractions import Fraction
from pathlib import Path
from typing import Any, NoReturn

import numpy as np
from pydantic import ValidationError

from services.criteria_service.suite import DEFAULT_CRITERIA, CriterionSuite, parse_criteria
from services.linalg_service.states import load_state
from services.povm_service.nm_povm import (
    feasible_x_range,
    gamma,
    informationally_complete_classes,
    is_informationally_complete,
    max_feasible_x,
    rescale_factor,
    scaled_x,
    sts_spectrum,
)
from services.povm_service.serialization import load_povm
from shared.models import CriterionId, DensityMatrix, NMPovmSpec, SamplerConfig
from shared.utils.config import get_settings
from shared.utils.errors import ConfigError, EntvolError, InvalidSpecError
from shared.utils.logging import bind_run_context, clear_context, get_logger, setup_logging
from workers.estimator_worker.ratios import estimate_ratios, write_ratios_csv
from workers.estimator_worker.sweep import sweep_scaled_x, write_sweep_csv

logger = get_logger("volume_cli")

REPORT_COLUMNS = ("criterion-id", "lhs", "rhs", "margin", "detected")


# =============================================================================
# Argument parsing
# =============================================================================

def _count(value: str) -> int:
    """Accept integer counts written as 100000 or 1e5."""
    number = float(value)
    if not number.is_integer():
        raise argparse.ArgumentTypeError(f"expected a whole number, got {value}")
    return int(number)


def _real(value: str) -> float:
    """Accept decimals or fractions such as 1/4."""
    try:
        return float(Fraction(value))
    except (ValueError, ZeroDivisionError) as e:
        raise argparse.ArgumentTypeError(f"invalid number {value!r}") from e


def _reals(value: str) -> list[float]:
    return [_real(v) for v in value.split(",") if v.strip()]


def _names(value: str) -> list[str]:
    return [v for v in value.split(",") if v.strip()]


class _Parser(argparse.ArgumentParser):
    """Argument parser whose usage errors exit with the configuration-error code."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(ConfigError.exit_code, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    settings = get_settings()
    parser = _Parser(
        prog="entvol",
        description="Estimate Euclidean volume ratios of entangled bipartite states.",
    )
    parser.add_argument("--seed", type=int, default=settings.seed, help="master seed")
    parser.add_argument("--samples", type=_count, default=settings.n_samples, help="sample count")
    parser.add_argument("--burn-in", type=_count, default=None, help="burn-in steps")
    parser.add_argument("--thinning", type=_count, default=None, help="steps between samples")
    parser.add_argument("--out", type=Path, default=None, help="output file (default stdout)")
    parser.add_argument("--format", choices=("csv", "json"), default=None, help="output format")
    sub = parser.add_subparsers(dest="command", required=True)

    ratios = sub.add_parser("ratios", help="estimate volume ratios")
    ratios.add_argument("--dims", type=int, nargs=2, default=(2, 2), metavar=("D_A", "D_B"))
    ratios.add_argument(
        "--criteria",
        type=_names,
        default=[c.value for c in DEFAULT_CRITERIA],
        help="comma-separated criterion ids",
    )
    _add_povm_args(ratios)
    ratios.add_argument("--chains", type=int, default=None, help="independent chains")
    ratios.add_argument("--workers", type=int, default=None, help="process pool size")
    ratios.add_argument("--dump", type=Path, default=None, help="write raw samples here")

    sweep = sub.add_parser("sweep", help="sweep scaled parameters")
    sweep.add_argument("--dims", type=int, nargs=2, default=(2, 3), metavar=("D_A", "D_B"))
    sweep.add_argument("--x-tilde-a", type=_reals, default=None, help="comma-separated grid")
    sweep.add_argument("--x-tilde-b", type=_reals, default=None, help="comma-separated grid")
    sweep.add_argument("--points", type=int, default=5, help="default grid size per side")
    sweep.add_argument("--chains", type=int, default=None)
    sweep.add_argument("--workers", type=int, default=None)

    info = sub.add_parser("povm-info", help="inspect (N,M)-POVM parameters")
    info.add_argument("d", type=int)
    info.add_argument("N", type=int)
    info.add_argument("M", type=int)
    info.add_argument("x", type=_real)

    check = sub.add_parser("check-state", help="evaluate criteria on a state file")
    check.add_argument("state_file", type=Path)
    check.add_argument(
        "--criteria",
        type=_names,
        default=[c.value for c in CriterionId],
        help="comma-separated criterion ids",
    )
    _add_povm_args(check)
    check.add_argument("--rescaled", choices=("purity", "purity-free"), default="purity-free")
    return parser


def _add_povm_args(parser: argparse.ArgumentParser) -> None:
    for side in ("a", "b"):
        parser.add_argument(
            f"--povm-{side}",
            default=None,
            metavar="N,M,x",
            help=f"POVM parameters on {side.upper()} (default SIC)",
        )
        parser.add_argument(
            f"--povm-file-{side}", type=Path, default=None, help=f"POVM document for {side.upper()}"
        )


def _povm_for(args: argparse.Namespace, side: str, d: int) -> Any:
    path = getattr(args, f"povm_file_{side}")
    if path is not None:
        return load_povm(path)
    raw = getattr(args, f"povm_{side}")
    if raw is None:
        return None
    parts = raw.split(",")
    if len(parts) != 3:
        raise InvalidSpecError(f"--povm-{side} expects N,M,x; got {raw!r}")
    try:
        n, m, x = int(parts[0]), int(parts[1]), float(Fraction(parts[2]))
    except (ValueError, ZeroDivisionError) as e:
        raise InvalidSpecError(f"--povm-{side} expects N,M,x; got {raw!r}") from e
    return NMPovmSpec(d=d, N=n, M=m, x=x)


def _sampler_config(args: argparse.Namespace, dims: Sequence[int]) -> SamplerConfig:
    return SamplerConfig(
        dims=tuple(dims),
        seed=args.seed,
        burn_in=args.burn_in,
        thinning=args.thinning,
        n_samples=args.samples,
    )


# =============================================================================
# Commands
# =============================================================================

def cmd_ratios(args: argparse.Namespace) -> tuple[str, Any]:
    dims = tuple(args.dims)
    estimates = estimate_ratios(
        dims,
        _sampler_config(args, dims),
        parse_criteria(args.criteria),
        povm_a=_povm_for(args, "a", dims[0]),
        povm_b=_povm_for(args, "b", dims[1]),
        n_chains=args.chains,
        max_workers=args.workers,
        dump_path=args.dump,
    )
    if (args.format or "csv") == "csv":
        buffer = io.StringIO()
        write_ratios_csv(estimates, buffer)
        return "csv", buffer.getvalue()
    return "json", {"dims": list(dims), "estimates": [e.to_dict() for e in estimates]}


def _default_grid(d: int, points: int) -> list[float]:
    lower = 1.0 / d
    return [lower + (1.0 - lower) * (k + 1) / points for k in range(points)]


def cmd_sweep(args: argparse.Namespace) -> tuple[str, Any]:
    dims = tuple(args.dims)
    xs_a = args.x_tilde_a or _default_grid(dims[0], args.points)
    xs_b = args.x_tilde_b or _default_grid(dims[1], args.points)
    result = sweep_scaled_x(
        dims,
        (xs_a, xs_b),
        _sampler_config(args, dims),
        n_chains=args.chains,
        max_workers=args.workers,
    )
    if (args.format or "csv") == "csv":
        buffer = io.StringIO()
        write_sweep_csv(result, buffer)
        return "csv", buffer.getvalue()
    return "json", result.to_dict()


def povm_info(d: int, n: int, m: int, x: float) -> dict[str, Any]:
    """Parameter report; quantities undefined for the given values are null."""
    lower, upper = feasible_x_range(d, n, m)
    spec = NMPovmSpec(d=d, N=n, M=m, x=x)
    complete = is_informationally_complete(d, n, m)
    report: dict[str, Any] = {
        "d": d,
        "N": n,
        "M": m,
        "x": x,
        "feasible_x_range": {"lower": lower, "upper": upper, "lower_open": True},
        "x_feasible": spec.in_feasible_range,
        "informationally_complete": complete,
        "ic_classes": [list(c) for c in informationally_complete_classes(d)],
        "x_tilde": scaled_x(spec),
        "rescale_factor": rescale_factor(spec),
        "gamma": None,
        "sts_spectrum": None,
        "max_feasible_x": None,
    }
    try:
        report["gamma"] = gamma(spec)
        report["sts_spectrum"] = sts_spectrum(spec).tolist()
    except InvalidSpecError:
        pass
    if complete and d >= 2:
        report["max_feasible_x"] = max_feasible_x(d, n, m)
    return report


def cmd_povm_info(args: argparse.Namespace) -> tuple[str, Any]:
    return "json", povm_info(args.d, args.N, args.M, args.x)


def check_state(
    rho: DensityMatrix,
    criteria: Sequence[str | CriterionId],
    povm_a: Any = None,
    povm_b: Any = None,
    rescaled: str = "purity-free",
) -> list[dict[str, Any]]:
    """Full criterion reports for one bipartite state."""
    if not rho.is_bipartite:
        raise InvalidSpecError(f"state with dims {rho.dims} is not bipartite")
    suite = CriterionSuite(rho.dims, criteria, povm_a, povm_b, rescaled=rescaled)
    return [report.to_dict() for report in suite.evaluate(rho)]


def cmd_check_state(args: argparse.Namespace) -> tuple[str, Any]:
    rho = load_state(args.state_file)
    reports = check_state(
        rho,
        parse_criteria(args.criteria),
        _povm_for(args, "a", rho.dims[0]),
        _povm_for(args, "b", rho.dims[-1]),
        args.rescaled,
    )
    if args.format == "csv":
        buffer = io.StringIO()
        buffer.write(",".join(REPORT_COLUMNS) + "\n")
        for r in reports:
            row = [r["criterion-id"], *(format(r[k], ".17g") for k in ("lhs", "rhs", "margin"))]
            buffer.write(",".join([*row, str(r["detected"]).lower()]) + "\n")
        return "csv", buffer.getvalue()
    return "json", reports


COMMANDS = {
    "ratios": cmd_ratios,
    "sweep": cmd_sweep,
    "povm-info": cmd_povm_info,
    "check-state": cmd_check_state,
}


def _emit(kind: str, payload: Any, out: Path | None) -> None:
    text = payload if kind == "csv" else json.dumps(payload, indent=2, default=_json_default) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text, encoding="utf-8", newline="\n")


def _json_default(value: Any) -> Any:
    if isinstance(value, np.generic):
        return value.item()
    raise TypeError(f"cannot serialize {type(value).__name__}")


def main(argv: Sequence[str] | None = None) -> int:
    setup_logging()
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        # --help exits 0, usage errors exit 1
        return e.code if isinstance(e.code, int) else ConfigError.exit_code
    run_id = uuid.uuid4().hex[:12]
    bind_run_context(run_id, args.command, seed=args.seed)

    try:
        kind, payload = COMMANDS[args.command](args)
        _emit(kind, payload, args.out)
    except EntvolError as e:
        logger.error("Command failed", category=e.category, error=str(e))
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code
    except ValidationError as e:
        logger.error("Invalid parameters", error=str(e))
        print(f"error: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        logger.error("I/O failure", error=str(e))
        print(f"error: {e}", file=sys.stderr)
        return 1
    finally:
        clear_context()
    return 0


if __name__ == "__main__":
    sys.exit(main())
