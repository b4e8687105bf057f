"""Command-line front end: analyze, simulate, sweep, and check measurements.

Every command prints one serialized report (JSON by default; the sweep
prints CSV, the basis command matrix text) and exits 0, or prints a
machine-readable error object to stderr and exits nonzero.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import qmath
from .bounds import achieving_operator
from .criterion import DEFAULT_FLAG_TOL, is_optimal, measurement_from_text
from .repeater import (bell_kets, build_optimal_basis, compare_with_bell,
                       computational_kets, direct_success_prob, projection_bounds,
                       run_protocol_analytic, run_protocol_sampled)

SEED_ENV_VAR = "REPEATERLAB_SEED"
BUILTIN_MEASUREMENTS = ("bell", "optimal", "computational")
SWEEP_COLUMNS = ("theta", "eta", "p_ms", "direct_success_prob",
                 "lower_bound", "upper_bound")


class UsageError(ValueError):
    """Bad command line; carries the parser's complaint."""


@dataclass(frozen=True)
class RunConfig:
    """One validated invocation."""

    command: str
    theta: float | None = None
    eta: float | None = None
    n_samples: int | None = None
    seed: int | None = None
    beta1: float = 0.0
    beta2: float = 0.0
    output_format: str = "json"
    output_path: str | None = None
    schmidt_a: tuple[float, ...] = field(default=())
    schmidt_b: tuple[float, ...] = field(default=())
    measurement: str | None = None
    measurement_file: str | None = None
    tolerance: float = DEFAULT_FLAG_TOL
    grid: int = 20


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:
        raise UsageError(message)


def _schmidt_list(text: str) -> tuple[float, ...]:
    try:
        values = tuple(float(tok) for tok in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"malformed coefficient list {text!r}; expected comma-separated numbers")
    total = sum(values)
    if abs(total - 1.0) > 1e-9:
        raise argparse.ArgumentTypeError(f"coefficients must sum to 1, got {total!r}")
    return tuple(sorted((v / total for v in values), reverse=True))


def _build_parser() -> _Parser:
    parser = _Parser(prog="repeaterlab",
                     description="Entanglement swapping with a tuned middle-station basis")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_angles(p: argparse.ArgumentParser) -> None:
        p.add_argument("--theta", type=float, required=True,
                       help="Schmidt angle of the Alice-Clare pair")
        p.add_argument("--eta", type=float, required=True,
                       help="Schmidt angle of the Clare-Bob pair")
        p.add_argument("--degrees", action="store_true",
                       help="interpret angles as degrees instead of radians")

    def add_phases(p: argparse.ArgumentParser) -> None:
        p.add_argument("--beta1", type=float, default=0.0,
                       help="free phase of the first direct-success ket")
        p.add_argument("--beta2", type=float, default=0.0,
                       help="free phase of the second direct-success ket")

    def add_output(p: argparse.ArgumentParser, formats: tuple[str, ...],
                   default: str) -> None:
        p.add_argument("--format", dest="output_format", choices=formats,
                       default=default, help=f"report format (default {default})")
        p.add_argument("--output", dest="output_path", default=None,
                       help="write the report to this path instead of stdout")

    p = sub.add_parser("rate", help="exact success rate and per-outcome breakdown")
    add_angles(p)
    add_phases(p)
    add_output(p, ("json", "csv"), "json")

    p = sub.add_parser("basis", help="emit Clare's tuned four-ket basis")
    add_angles(p)
    add_phases(p)
    add_output(p, ("text", "json"), "text")

    p = sub.add_parser("simulate", help="Monte-Carlo estimate of the success rate")
    add_angles(p)
    add_phases(p)
    p.add_argument("--n", dest="n_samples", type=int, required=True,
                   help="number of protocol runs to sample")
    p.add_argument("--seed", type=int, default=None,
                   help=f"random seed (falls back to ${SEED_ENV_VAR})")
    add_output(p, ("json", "csv"), "json")

    p = sub.add_parser("criterion", help="test a middle-station measurement for optimality")
    add_angles(p)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--measurement", choices=BUILTIN_MEASUREMENTS,
                       help="one of the built-in bases")
    group.add_argument("--measurement-file", dest="measurement_file",
                       help="matrix text file with four dim-4 kets or 4x4 projectors")
    p.add_argument("--tol", dest="tolerance", type=float, default=DEFAULT_FLAG_TOL,
                   help="tolerance for the optimality flag")
    add_output(p, ("json", "csv"), "json")

    p = sub.add_parser("bound", help="general-dimension success ceiling and reaching operator")
    p.add_argument("--a", dest="schmidt_a", type=_schmidt_list, required=True,
                   help="comma-separated Schmidt coefficients of the first pair")
    p.add_argument("--b", dest="schmidt_b", type=_schmidt_list, required=True,
                   help="comma-separated Schmidt coefficients of the second pair")
    add_output(p, ("json", "csv"), "json")

    p = sub.add_parser("sweep", help="rate and bounds over an angle grid")
    p.add_argument("--grid", type=int, default=20,
                   help="grid points per angle over (0, pi/4] (default 20)")
    add_output(p, ("csv", "json"), "csv")

    p = sub.add_parser("compare", help="tuned basis versus Bell basis, rates and LOCC cost")
    add_angles(p)
    add_output(p, ("json", "csv"), "json")

    return parser


def parse_args(argv: list[str]) -> RunConfig:
    """Validate a command line into a RunConfig; raises UsageError on bad input."""
    ns = _build_parser().parse_args(argv)
    kwargs = {"command": ns.command,
              "output_format": ns.output_format,
              "output_path": ns.output_path}
    if hasattr(ns, "theta"):
        scale = np.pi / 180.0 if ns.degrees else 1.0
        kwargs["theta"] = ns.theta * scale
        kwargs["eta"] = ns.eta * scale
    for name in ("beta1", "beta2", "n_samples", "seed", "schmidt_a", "schmidt_b",
                 "measurement", "measurement_file", "tolerance", "grid"):
        if hasattr(ns, name):
            kwargs[name] = getattr(ns, name)
    if ns.command == "simulate":
        if kwargs.get("n_samples", 0) < 1:
            raise UsageError(f"--n must be at least 1, got {kwargs.get('n_samples')}")
        if kwargs.get("seed") is None:
            env = os.environ.get(SEED_ENV_VAR)
            if env is not None:
                try:
                    kwargs["seed"] = int(env)
                except ValueError:
                    raise UsageError(f"${SEED_ENV_VAR} must be an integer, got {env!r}")
    if ns.command == "sweep" and kwargs.get("grid", 0) < 1:
        raise UsageError(f"--grid must be at least 1, got {kwargs.get('grid')}")
    return RunConfig(**kwargs)


def _flat_csv(record: dict) -> str:
    """Scalar fields of a report as a one-row CSV table."""
    flat = {k: v for k, v in record.items()
            if isinstance(v, (int, float, bool, str)) or v is None}
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(flat), lineterminator="\n")
    writer.writeheader()
    writer.writerow({k: _csv_cell(v) for k, v in flat.items()})
    return buf.getvalue()


def _csv_cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if value is None:
        return ""
    return str(value)


def _sweep_rows(grid: int) -> list[dict]:
    step = (np.pi / 4.0) / grid
    rows = []
    for i in range(1, grid + 1):
        for j in range(1, grid + 1):
            theta = i * step
            eta = j * step
            lower, upper = projection_bounds(theta, eta)
            rows.append({
                "theta": theta,
                "eta": eta,
                "p_ms": run_protocol_analytic(theta, eta).p_ms,
                "direct_success_prob": direct_success_prob(theta, eta),
                "lower_bound": lower,
                "upper_bound": upper,
            })
    return rows


def _sweep_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(SWEEP_COLUMNS), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _csv_cell(row[k]) for k in SWEEP_COLUMNS})
    return buf.getvalue()


def _criterion_measurement(config: RunConfig):
    if config.measurement == "bell":
        return bell_kets()
    if config.measurement == "optimal":
        return build_optimal_basis(config.theta, config.eta).kets
    if config.measurement == "computational":
        return computational_kets()
    with open(config.measurement_file, encoding="utf-8") as fh:
        return measurement_from_text(fh.read())


def _basis_text(config: RunConfig) -> str:
    basis = build_optimal_basis(config.theta, config.eta, config.beta1, config.beta2)
    return "\n".join(qmath.format_matrix_text(k) for k in basis.kets) + "\n"


def _basis_json(config: RunConfig) -> dict:
    basis = build_optimal_basis(config.theta, config.eta, config.beta1, config.beta2)
    return {
        "theta": basis.theta,
        "eta": basis.eta,
        "beta1": basis.beta1,
        "beta2": basis.beta2,
        "kets": [qmath.as_real_pairs(k) for k in basis.kets],
    }


def run(config: RunConfig) -> tuple[int, str]:
    """Execute one config; returns (exit status, serialized report)."""
    try:
        if config.command == "rate":
            record = run_protocol_analytic(config.theta, config.eta,
                                           config.beta1, config.beta2).to_dict()
        elif config.command == "basis":
            if config.output_format == "text":
                return 0, _basis_text(config)
            record = _basis_json(config)
        elif config.command == "simulate":
            record = run_protocol_sampled(config.theta, config.eta, config.n_samples,
                                          config.seed, config.beta1, config.beta2).to_dict()
        elif config.command == "criterion":
            meas = _criterion_measurement(config)
            record = is_optimal(meas, config.theta, config.eta, config.tolerance).to_dict()
        elif config.command == "bound":
            record = achieving_operator(config.schmidt_a, config.schmidt_b).to_dict()
        elif config.command == "sweep":
            rows = _sweep_rows(config.grid)
            if config.output_format == "csv":
                return 0, _sweep_csv(rows)
            return 0, json.dumps(rows, indent=2) + "\n"
        elif config.command == "compare":
            record = compare_with_bell(config.theta, config.eta).to_dict()
        else:
            raise UsageError(f"unknown command {config.command!r}")
    except (ValueError, OSError) as exc:
        error = {"error": {"type": type(exc).__name__, "message": str(exc),
                           "command": config.command}}
        return 1, json.dumps(error) + "\n"
    if config.output_format == "csv":
        return 0, _flat_csv(record)
    return 0, json.dumps(record, indent=2) + "\n"


def main(argv: list[str] | None = None) -> int:
    """Console entry point."""
    if argv is None:
        argv = sys.argv[1:]
    try:
        config = parse_args(argv)
    except UsageError as exc:
        sys.stderr.write(json.dumps(
            {"error": {"type": "UsageError", "message": str(exc)}}) + "\n")
        return 2
    status, report = run(config)
    if status != 0:
        sys.stderr.write(report)
        return status
    if config.output_path is not None:
        try:
            with open(config.output_path, "w", encoding="utf-8") as fh:
                fh.write(report)
        except OSError as exc:
            sys.stderr.write(json.dumps(
                {"error": {"type": type(exc).__name__, "message": str(exc)}}) + "\n")
            return 1
    else:
        sys.stdout.write(report)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
