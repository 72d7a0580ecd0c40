"""
Run configuration for nanochiral.

Configuration files are plain text, one ``key = value`` per line, ``#``
starts a comment. Tuples are comma separated. Keys match the field names of
:class:`RunConfig`.
"""

import types
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Any, Union, get_args, get_origin, get_type_hints

import numpy as np
from loguru import logger

from .consts import (
    BACKGROUND_FLUX,
    BEAM_POWER,
    BEAM_WAIST,
    DEFAULT_CONFIG_PATH,
    DETECTION_EFFICIENCY,
    FIBER_RADIUS,
    KAPPA_F,
    OUTPUT_DIR,
    PARTICLE_RADIUS,
    PHI0_OFFSET,
    THETA_STEP,
    WAVELENGTH,
)
from .exceptions import ConfigError, NanochiralError
from .fiber_modes import FiberSpec, ModeLabel
from .incident import IncidentModel
from .polarization import polarization_by_name
from .scattering import BeamParams, EvaluationPoint, ModelParams, ParticleSpec

_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


@dataclass
class RunConfig:
    """Parameters of one nanochiral run. SI units, angles in degrees."""

    # Fiber
    fiber_radius: float = FIBER_RADIUS
    wavelength: float = WAVELENGTH
    n1: float | None = None
    n2: float = 1.0

    # Particle
    particle_radius: float = PARTICLE_RADIUS
    particle_radial: float | None = None
    evaluation_point: str = EvaluationPoint.CENTER.value

    # Excitation
    incident_model: str = IncidentModel.UNPERTURBED.value

    # Grids
    phi_grid: tuple[float, ...] = tuple(float(p) for p in range(0, 360, 30))
    directionality_phi: tuple[float, ...] = (0.0, 90.0, 270.0)
    theta_step: float = THETA_STEP
    theta_span: float = 360.0
    map_resolution: int = 101
    map_half_width: float = 400e-9

    # Flux model
    kappa_f: float = KAPPA_F
    c0: float = BACKGROUND_FLUX
    phi0_offset: float = PHI0_OFFSET

    # Beam
    beam_power: float = BEAM_POWER
    beam_waist: float = BEAM_WAIST
    detection_efficiency: float = DETECTION_EFFICIENCY

    # Maps and fits
    mode_label: str = "y+"
    polarization: str = "sigma_minus"
    noise_rel: float = 0.0
    seed: int = 0
    weighted: bool = False

    output_dir: str = OUTPUT_DIR

    def fiber_spec(self) -> FiberSpec:
        if self.n1 is None:
            return FiberSpec.silica(self.fiber_radius, self.wavelength, self.n2)
        return FiberSpec(self.fiber_radius, self.wavelength, self.n1, self.n2)

    def model_params(self) -> ModelParams:
        return ModelParams(self.kappa_f, self.c0, self.phi0_offset)

    def beam_params(self) -> BeamParams:
        return BeamParams(
            self.beam_power,
            self.beam_waist,
            self.detection_efficiency,
            self.wavelength,
        )

    def particle(self, azimuth_phi: float = 90.0) -> ParticleSpec:
        return ParticleSpec(
            radius_p=self.particle_radius,
            azimuth_phi=azimuth_phi,
            radial_r=self.particle_radial,
        )

    @property
    def point(self) -> EvaluationPoint:
        return EvaluationPoint(self.evaluation_point)

    @property
    def model(self) -> IncidentModel:
        return IncidentModel(self.incident_model)

    def theta_grid(self) -> np.ndarray:
        """Wave-plate angles from 0 up to, excluding, ``theta_span``."""
        return np.arange(0.0, self.theta_span - 1e-9, self.theta_step)

    def validate(self) -> "RunConfig":
        """
        Check every value against the domain of the objects it builds.

        Raises:
            ConfigError: On the first invalid value
        """
        checks = (
            ("fiber_radius", self.fiber_spec),
            ("kappa_f", self.model_params),
            ("beam_power", self.beam_params),
            ("particle_radius", self.particle),
            ("evaluation_point", lambda: self.point),
            (
                "particle_radial",
                lambda: self.particle().evaluation_radius(
                    self.fiber_spec(), self.point
                ),
            ),
            ("incident_model", lambda: self.model),
            ("mode_label", lambda: ModeLabel.parse(self.mode_label)),
            ("polarization", lambda: polarization_by_name(self.polarization)),
        )
        for key, build in checks:
            try:
                build()
            except (NanochiralError, ValueError) as e:
                raise ConfigError(f"Invalid configuration ({key}): {e}", key)
        if not self.theta_step > 0 or not self.theta_span > 0:
            raise ConfigError("Wave-plate grid must be positive", "theta_step")
        if self.map_resolution < 2:
            raise ConfigError(
                "Map resolution must be at least 2", "map_resolution"
            )
        if not self.map_half_width > 0:
            raise ConfigError(
                "Map half width must be positive", "map_half_width"
            )
        if not self.phi_grid:
            raise ConfigError("Azimuth grid is empty", "phi_grid")
        if self.noise_rel < 0:
            raise ConfigError(
                "Relative noise must be non-negative", "noise_rel"
            )
        return self


def _parse_value(key: str, raw: str, hint: Any) -> Any:
    raw = raw.strip()
    origin = get_origin(hint)
    if origin in (Union, types.UnionType):
        inner = [arg for arg in get_args(hint) if arg is not type(None)]
        if raw.lower() in ("", "none", "sellmeier"):
            return None
        return _parse_value(key, raw, inner[0])
    if origin is tuple:
        item = get_args(hint)[0]
        parts = [part for part in raw.split(",") if part.strip()]
        return tuple(_parse_value(key, part, item) for part in parts)
    if hint is bool:
        if raw.lower() in _TRUE:
            return True
        if raw.lower() in _FALSE:
            return False
        raise ConfigError(f"{key}: expected a boolean, got {raw!r}", key)
    try:
        return hint(raw)
    except ValueError:
        raise ConfigError(
            f"{key}: expected {hint.__name__}, got {raw!r}", key
        )


def parse_assignments(
    lines: list[str], source: str = "<overrides>"
) -> dict[str, Any]:
    """
    Parse ``key = value`` lines into typed values.

    Raises:
        ConfigError: On malformed lines, unknown keys or bad values
    """
    hints = get_type_hints(RunConfig)
    known = {f.name for f in fields(RunConfig)}
    values: dict[str, Any] = {}
    for number, line in enumerate(lines, start=1):
        text = line.split("#", 1)[0].strip()
        if not text:
            continue
        if "=" not in text:
            raise ConfigError(f"{source}:{number}: expected key = value")
        key, raw = (part.strip() for part in text.split("=", 1))
        if key not in known:
            raise ConfigError(f"{source}:{number}: unknown key {key!r}", key)
        values[key] = _parse_value(key, raw, hints[key])
    return values


def load_config(
    path: str | Path | None = None, overrides: list[str] | None = None
) -> RunConfig:
    """
    Load a configuration file and apply ``key=value`` overrides.

    Args:
        path: Configuration file; defaults to ``NANOCHIRAL_CONFIG`` or the
            packaged defaults
        overrides: Assignments applied after the file

    Returns:
        RunConfig: Validated configuration

    Raises:
        ConfigError: When the file is unreadable or any value is invalid
    """
    path = Path(path) if path is not None else DEFAULT_CONFIG_PATH
    try:
        lines = path.read_text().splitlines()
    except OSError as e:
        raise ConfigError(f"Cannot read configuration {path}: {e}")

    values = parse_assignments(lines, str(path))
    values.update(parse_assignments(list(overrides or [])))
    logger.debug(f"Configuration {path} with {len(overrides or [])} overrides")
    return replace(RunConfig(), **values).validate()
