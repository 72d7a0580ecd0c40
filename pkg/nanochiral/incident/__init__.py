"""Excitation field models."""

from ..fiber_modes import FiberSpec
from .base import BaseIncidentField, IncidentConfig, IncidentModel
from .cylinder import (
    CylinderModifiedField,
    CylinderSeries,
    SeriesEfficiencies,
    boundary_residual,
    cylinder_coefficients,
    efficiencies,
    modified_field,
    truncation_order,
)
from .plane_wave import PlaneWaveField, plane_wave_field

_MODELS: dict[IncidentModel, type[BaseIncidentField]] = {
    IncidentModel.UNPERTURBED: PlaneWaveField,
    IncidentModel.CYLINDER_MODIFIED: CylinderModifiedField,
}


def incident_field(
    spec: FiberSpec, model: IncidentModel | str, k0: float | None = None
) -> BaseIncidentField:
    """Build the excitation field for a model, at the fiber's wavelength."""
    return _MODELS[IncidentModel(model)](spec, spec.k0 if k0 is None else k0)


__all__ = [
    "BaseIncidentField",
    "CylinderModifiedField",
    "CylinderSeries",
    "IncidentConfig",
    "IncidentModel",
    "PlaneWaveField",
    "SeriesEfficiencies",
    "boundary_residual",
    "cylinder_coefficients",
    "efficiencies",
    "incident_field",
    "modified_field",
    "plane_wave_field",
    "truncation_order",
]
