"""nanochiral - Directional scattering of nanoparticles into nanofiber modes."""

__version__ = "0.1.0"

from .api import ChiralCoupler
from .config import RunConfig, load_config
from .dataset import FluxDataset
from .exceptions import (
    CircularPointNotFoundError,
    ConfigError,
    DatasetFormatError,
    DegenerateFieldError,
    DomainError,
    FitConvergenceError,
    ModeSolverError,
    NanochiralError,
    SeriesConvergenceError,
    UnknownPolarizationError,
)
from .fiber_modes import (
    Axis,
    Direction,
    FiberSpec,
    ModeLabel,
    ModeSolution,
    find_circular_point,
    longitudinal_ratio,
    mode_field,
    sellmeier_index,
    solve_he11,
    v_number,
)
from .fitting import FitResult, ForwardModel, fit, residual, synthesize_dataset
from .incident import (
    CylinderSeries,
    IncidentConfig,
    IncidentModel,
    cylinder_coefficients,
    modified_field,
    plane_wave_field,
)
from .polarization import overlap_fraction, qwp_state, sigma_basis
from .scattering import (
    BeamParams,
    EvaluationPoint,
    FluxPrediction,
    ModelParams,
    ParticleSpec,
    directionality,
    flux_map,
    flux_pair,
    overlap_map,
    scattering_cross_section,
)

__all__ = [
    "ChiralCoupler",
    "RunConfig",
    "load_config",
    "FluxDataset",
    "Axis",
    "Direction",
    "FiberSpec",
    "ModeLabel",
    "ModeSolution",
    "find_circular_point",
    "longitudinal_ratio",
    "mode_field",
    "sellmeier_index",
    "solve_he11",
    "v_number",
    "FitResult",
    "ForwardModel",
    "fit",
    "residual",
    "synthesize_dataset",
    "CylinderSeries",
    "IncidentConfig",
    "IncidentModel",
    "cylinder_coefficients",
    "modified_field",
    "plane_wave_field",
    "overlap_fraction",
    "qwp_state",
    "sigma_basis",
    "BeamParams",
    "EvaluationPoint",
    "FluxPrediction",
    "ModelParams",
    "ParticleSpec",
    "directionality",
    "flux_map",
    "flux_pair",
    "overlap_map",
    "scattering_cross_section",
    "NanochiralError",
    "DomainError",
    "ConfigError",
    "ModeSolverError",
    "CircularPointNotFoundError",
    "SeriesConvergenceError",
    "DegenerateFieldError",
    "DatasetFormatError",
    "FitConvergenceError",
    "UnknownPolarizationError",
]
