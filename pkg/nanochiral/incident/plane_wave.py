"""
Unperturbed plane-wave excitation.
"""

import numpy as np
from numpy.typing import ArrayLike

from ..fiber_modes import ComplexField3
from .base import BaseIncidentField, IncidentConfig, IncidentModel, polar_grid


def plane_wave_field(
    config: IncidentConfig, position: ArrayLike, n_medium: float = 1.0
) -> ComplexField3:
    """
    Unit plane wave travelling along -x.

    Args:
        config: Excitation beam description
        position: Cartesian point(s) (x, y, z) in metres, last axis of 3
        n_medium: Refractive index of the surrounding medium

    Returns:
        ComplexField3: pol * exp(-i k x)
    """
    position = np.asarray(position, dtype=float)
    phase = np.exp(-1j * n_medium * config.k0 * position[..., 0])
    return phase[..., None] * config.pol


class PlaneWaveField(BaseIncidentField):
    """Excitation that ignores the presence of the fiber."""

    model = IncidentModel.UNPERTURBED

    def channel_fields(
        self, r: ArrayLike, phi: ArrayLike
    ) -> tuple[ComplexField3, ComplexField3]:
        r, phi = polar_grid(r, phi)
        phase = np.exp(-1j * self.k * r * np.cos(phi))
        zero = np.zeros_like(phase)
        te = np.stack([zero, phase, zero], axis=-1)
        tm = np.stack([zero, zero, phase], axis=-1)
        return te, tm
