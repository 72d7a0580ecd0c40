"""
Command-line interface for nanochiral.

Every command loads and validates the configuration before computing and
writes its result atomically. Exit codes: 2 configuration, 3 solver,
4 dataset format, 5 fit convergence.
"""

import argparse
import json
import os
import sys
import tempfile
from dataclasses import replace
from pathlib import Path
from typing import Any, Callable

import numpy as np
from loguru import logger

from . import __version__
from .api import ChiralCoupler
from .config import RunConfig, load_config
from .dataset import FluxDataset, write_rows_atomic
from .exceptions import (
    ConfigError,
    DatasetFormatError,
    DomainError,
    FitConvergenceError,
    ModeSolverError,
    NanochiralError,
    SeriesConvergenceError,
    UnknownPolarizationError,
)
from .fiber_modes import ModeLabel
from .incident import IncidentModel
from .polarization import polarization_by_name

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_DATASET = 4
EXIT_FIT = 5

_EXIT_CODES: list[tuple[type[NanochiralError], int]] = [
    (ConfigError, EXIT_CONFIG),
    (UnknownPolarizationError, EXIT_CONFIG),
    (DomainError, EXIT_CONFIG),
    (ModeSolverError, EXIT_SOLVER),
    (SeriesConvergenceError, EXIT_SOLVER),
    (DatasetFormatError, EXIT_DATASET),
    (FitConvergenceError, EXIT_FIT),
]


def exit_code_for(error: NanochiralError) -> int:
    for kind, code in _EXIT_CODES:
        if isinstance(error, kind):
            return code
    return 1


def _output_path(args: argparse.Namespace, config: RunConfig, name: str):
    if args.output:
        return Path(args.output)
    return Path(config.output_dir) / name


def _write_json(path: Path, payload: dict[str, Any]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    descriptor, temporary = tempfile.mkstemp(
        dir=path.parent, prefix=f".{path.name}.", suffix=".tmp"
    )
    try:
        with os.fdopen(descriptor, "w") as handle:
            json.dump(payload, handle, indent=2, sort_keys=True)
            handle.write("\n")
        os.replace(temporary, path)
    except BaseException:
        Path(temporary).unlink(missing_ok=True)
        raise
    return path


def _write_grid(path: Path, column: str, x, y, values) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    xx, yy = np.meshgrid(x, y)
    rows = (
        [format(v, ".17e") for v in row]
        for row in zip(xx.ravel(), yy.ravel(), np.ravel(values))
    )
    write_rows_atomic(path, ("x", "y", column), rows)
    return path


def cmd_modes(coupler: ChiralCoupler, args: argparse.Namespace) -> Path:
    report = coupler.mode_report()
    return _write_json(_output_path(args, coupler.config, "modes.json"), report)


def cmd_overlap_map(coupler: ChiralCoupler, args: argparse.Namespace) -> Path:
    x, y, values = coupler.overlap_map(args.mode, args.pol)
    path = _output_path(args, coupler.config, "overlap_map.csv")
    return _write_grid(path, "overlap", x, y, values)


def cmd_field_map(coupler: ChiralCoupler, args: argparse.Namespace) -> Path:
    x, y, values = coupler.field_map(args.pol, args.model)
    path = _output_path(args, coupler.config, "field_map.csv")
    return _write_grid(path, "intensity", x, y, values)


def cmd_flux_map(coupler: ChiralCoupler, args: argparse.Namespace) -> Path:
    dataset = coupler.flux_map(args.model)
    return dataset.to_csv(_output_path(args, coupler.config, "flux_map.csv"))


def cmd_directionality(
    coupler: ChiralCoupler, args: argparse.Namespace
) -> Path:
    dataset = coupler.directionality_curves(args.phi, args.model)
    path = _output_path(args, coupler.config, "directionality.csv")
    return dataset.to_csv(path)


def cmd_synth(coupler: ChiralCoupler, args: argparse.Namespace) -> Path:
    dataset = coupler.synthesize(args.seed, args.noise)
    return dataset.to_csv(_output_path(args, coupler.config, "synthetic.csv"))


def cmd_fit(coupler: ChiralCoupler, args: argparse.Namespace) -> Path:
    dataset = FluxDataset.read_csv(args.data)
    result = coupler.fit(dataset)
    fitted = ChiralCoupler(
        replace(
            coupler.config,
            kappa_f=result.kappa_f,
            phi0_offset=result.phi0_offset,
        )
    )
    cross_section = fitted.cross_section()
    payload = result.to_dict()
    payload["std_errors_basis"] = "model-based"
    payload["cross_section_um2"] = {
        "two_detector": cross_section.two_detector * 1e12,
        "per_detector": cross_section.per_detector * 1e12,
    }
    return _write_json(_output_path(args, coupler.config, "fit.json"), payload)


def _comma_floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected numbers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nanochiral",
        description="Chiral coupling of a nanoparticle to a nanofiber.",
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="configuration file")
    common.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="override a configuration value (repeatable)",
    )
    common.add_argument("--output", "-o", help="output file")
    common.add_argument(
        "--verbose", "-v", action="store_true", help="debug logging"
    )
    models = [model.value for model in IncidentModel]

    commands = parser.add_subparsers(dest="command", required=True)

    modes = commands.add_parser(
        "modes", parents=[common], help="solve the HE11 mode (JSON report)"
    )
    modes.set_defaults(handler=cmd_modes)

    overlap = commands.add_parser(
        "overlap-map",
        parents=[common],
        help="mode/polarization overlap over the transverse plane (CSV)",
    )
    overlap.add_argument("--mode", help="mode label such as y+ or x-")
    overlap.add_argument("--pol", help="sigma_plus, sigma_minus, pi, qwp:<deg>")
    overlap.set_defaults(handler=cmd_overlap_map)

    field = commands.add_parser(
        "field-map",
        parents=[common],
        help="excitation intensity near the fiber (CSV)",
    )
    field.add_argument("--pol", default="qwp:0", help="input polarization")
    field.add_argument("--model", choices=models)
    field.set_defaults(handler=cmd_field_map)

    flux = commands.add_parser(
        "flux-map", parents=[common], help="predicted detector rates (CSV)"
    )
    flux.add_argument("--model", choices=models)
    flux.set_defaults(handler=cmd_flux_map)

    curves = commands.add_parser(
        "directionality",
        parents=[common],
        help="directionality versus wave-plate angle (CSV)",
    )
    curves.add_argument("--phi", type=_comma_floats, help="azimuths in deg")
    curves.add_argument("--model", choices=models)
    curves.set_defaults(handler=cmd_directionality)

    synth = commands.add_parser(
        "synth", parents=[common], help="synthetic rate dataset (CSV)"
    )
    synth.add_argument("--seed", type=int)
    synth.add_argument("--noise", type=float, help="relative noise")
    synth.set_defaults(handler=cmd_synth)

    fitting = commands.add_parser(
        "fit", parents=[common], help="fit kappa_f and phi0 (JSON)"
    )
    fitting.add_argument("data", help="rate dataset CSV")
    fitting.set_defaults(handler=cmd_fit)
    return parser


def _validate_arguments(args: argparse.Namespace) -> None:
    if getattr(args, "mode", None):
        ModeLabel.parse(args.mode)
    if getattr(args, "pol", None):
        pol = polarization_by_name(args.pol)
        if args.command == "field-map" and abs(pol[0]) > 0:
            raise DomainError(f"{args.pol} is not a transverse beam state")
    if getattr(args, "noise", None) is not None and args.noise < 0:
        raise ConfigError("Relative noise must be non-negative", "noise_rel")


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    logger.remove()
    logger.add(sys.stderr, level="DEBUG" if args.verbose else "INFO")

    handler: Callable[[ChiralCoupler, argparse.Namespace], Path] = args.handler
    try:
        config = load_config(args.config, args.overrides)
        _validate_arguments(args)
        path = handler(ChiralCoupler(config), args)
    except NanochiralError as e:
        logger.error(f"{args.command} failed: {e}")
        return exit_code_for(e)
    logger.info(f"{args.command}: wrote {path}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
