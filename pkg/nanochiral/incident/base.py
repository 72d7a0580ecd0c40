"""
Base class for excitation fields at the nanofiber.
"""

from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ..exceptions import DomainError
from ..fiber_modes import ComplexField3, FiberSpec
from ..polarization import qwp_state

# jx of a paraxial beam travelling along -x
TRANSVERSE_TOLERANCE = 1e-12


class IncidentModel(str, Enum):
    """How the excitation beam is treated near the fiber."""

    UNPERTURBED = "unperturbed"
    CYLINDER_MODIFIED = "cylinder_modified"


@dataclass(frozen=True, eq=False)
class IncidentConfig:
    """
    Excitation beam description.

    The beam propagates along -x with unit amplitude. ``k0`` is the vacuum
    wavenumber in rad/m.
    """

    pol: NDArray[np.complex128]
    model: IncidentModel = IncidentModel.UNPERTURBED
    k0: float = field(default=2.0 * np.pi / 532e-9)

    def __post_init__(self):
        pol = np.asarray(self.pol, dtype=complex)
        if pol.shape != (3,):
            raise DomainError(f"Polarization must be a 3-vector: {pol.shape}")
        if abs(pol[0]) > TRANSVERSE_TOLERANCE:
            raise DomainError(
                "Beam along -x cannot carry an x polarization component"
            )
        if not self.k0 > 0:
            raise DomainError(f"Wavenumber must be positive: {self.k0}")
        object.__setattr__(self, "pol", pol)
        object.__setattr__(self, "model", IncidentModel(self.model))

    @classmethod
    def from_theta(
        cls,
        theta: float,
        model: IncidentModel | str = IncidentModel.UNPERTURBED,
        k0: float = 2.0 * np.pi / 532e-9,
    ) -> "IncidentConfig":
        """Configuration for a quarter-wave-plate angle in degrees."""
        return cls(qwp_state(theta), IncidentModel(model), k0)

    def with_pol(self, pol: ArrayLike) -> "IncidentConfig":
        return replace(self, pol=np.asarray(pol, dtype=complex))


class BaseIncidentField:
    """
    Excitation field in the transverse plane of the fiber.

    Subclasses return the field for the two linear input channels: E along
    y (transverse electric to the fiber axis) and E along z (transverse
    magnetic). Any input with jx = 0 is a linear combination of them.
    """

    model: IncidentModel

    def __init__(self, spec: FiberSpec, k0: float):
        """
        Initialize the field.

        Args:
            spec: Fiber description
            k0: Vacuum wavenumber in rad/m
        """
        self.spec = spec
        self.k0 = k0

    @property
    def k(self) -> float:
        """Wavenumber in the surrounding medium."""
        return self.spec.n2 * self.k0

    def channel_fields(
        self, r: ArrayLike, phi: ArrayLike
    ) -> tuple[ComplexField3, ComplexField3]:
        """
        Fields for unit y- and z-polarized input.

        Args:
            r: Radial coordinate(s) in metres
            phi: Azimuth(s) in radians

        Returns:
            tuple: (field for e_y input, field for e_z input), each of shape
            ``broadcast(r, phi) + (3,)``
        """
        raise NotImplementedError

    def field(
        self, pol: ArrayLike, r: ArrayLike, phi: ArrayLike
    ) -> ComplexField3:
        """
        Field for an arbitrary transverse input polarization.

        Args:
            pol: State(s) (0, jy, jz), last axis of length 3
            r: Radial coordinate(s) in metres
            phi: Azimuth(s) in radians

        Returns:
            ComplexField3: jy * E_y-channel + jz * E_z-channel
        """
        pol = np.asarray(pol, dtype=complex)
        if np.any(np.abs(pol[..., 0]) > TRANSVERSE_TOLERANCE):
            raise DomainError(
                "Beam along -x cannot carry an x polarization component"
            )
        te, tm = self.channel_fields(r, phi)
        return pol[..., 1:2] * te + pol[..., 2:3] * tm

    def intensity(
        self, pol: ArrayLike, r: ArrayLike, phi: ArrayLike
    ) -> NDArray[np.float64]:
        """|E|^2 relative to the unit incident intensity."""
        return np.sum(np.abs(self.field(pol, r, phi)) ** 2, axis=-1)


def polar_grid(r: ArrayLike, phi: ArrayLike) -> tuple[NDArray, NDArray]:
    """Broadcast radial and azimuthal coordinates to a common shape."""
    r, phi = np.broadcast_arrays(
        np.asarray(r, dtype=float), np.asarray(phi, dtype=float)
    )
    if np.any(r < 0):
        raise DomainError("Radial coordinate must be non-negative")
    return r, phi
