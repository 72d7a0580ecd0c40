"""
Directional scattering of a surface nanoparticle into the fiber.

The particle is a point dipole d = alpha * E_exc driven by the excitation
field. The power it couples into a directed guided mode is proportional to
|d . conj(eps)|^2. The detected rates add the two quasi-linear modes of each
direction incoherently and a background:

    c+- = kappa_f * sum over axis in {x, y} of |E_exc . conj(eps+-_axis)|^2 + c0

with mode profiles and excitation taken at the particle, rotated by the
angular offset phi0.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np
from loguru import logger
from numpy.typing import ArrayLike, NDArray

from .consts import (
    BACKGROUND_FLUX,
    BEAM_POWER,
    BEAM_WAIST,
    DETECTION_EFFICIENCY,
    KAPPA_F,
    PARTICLE_RADIUS,
    PHI0_OFFSET,
    PLANCK,
    SPEED_OF_LIGHT,
    WAVELENGTH,
)
from .dataset import FluxDataset
from .exceptions import DegenerateFieldError, DomainError
from .fiber_modes import (
    Axis,
    ComplexField3,
    Direction,
    FiberSpec,
    ModeLabel,
    ModeSolution,
    mode_field,
)
from .incident import (
    BaseIncidentField,
    IncidentConfig,
    IncidentModel,
    incident_field,
)
from .polarization import inner_product, overlap_fraction, qwp_state


class EvaluationPoint(str, Enum):
    """Where the mode and excitation fields are sampled for a particle."""

    CENTER = "center"
    SURFACE = "surface"


@dataclass(frozen=True)
class ParticleSpec:
    """
    Nanoparticle on the fiber surface.

    ``azimuth_phi`` is in degrees. ``radial_r`` overrides the evaluation
    radius when given; ``polarizability_alpha`` is in arbitrary units.
    """

    radius_p: float = PARTICLE_RADIUS
    azimuth_phi: float = 90.0
    radial_r: float | None = None
    polarizability_alpha: complex = 1.0

    def __post_init__(self):
        if not self.radius_p > 0:
            raise DomainError(
                f"Particle radius must be positive: {self.radius_p}"
            )

    def evaluation_radius(
        self, spec: FiberSpec, point: EvaluationPoint = EvaluationPoint.CENTER
    ) -> float:
        """
        Radius at which fields act on the particle.

        Raises:
            DomainError: When an explicit radius lies inside the fiber
        """
        if self.radial_r is not None:
            if self.radial_r < spec.radius_a:
                raise DomainError(
                    f"Particle radius {self.radial_r} lies inside the fiber"
                )
            return float(self.radial_r)
        if EvaluationPoint(point) is EvaluationPoint.SURFACE:
            return spec.radius_a
        return spec.radius_a + self.radius_p


@dataclass(frozen=True)
class ModelParams:
    """Flux amplitude and background in counts/s, offset in degrees."""

    kappa_f: float = KAPPA_F
    c0: float = BACKGROUND_FLUX
    phi0_offset: float = PHI0_OFFSET

    def __post_init__(self):
        if not self.kappa_f >= 0:
            raise DomainError(f"kappa_f must be non-negative: {self.kappa_f}")
        if not self.c0 >= 0:
            raise DomainError(f"Background must be non-negative: {self.c0}")


@dataclass(frozen=True)
class FluxPrediction:
    """Rates of the +z and -z detectors at one node."""

    c_plus: float
    c_minus: float
    directionality: float


@dataclass(frozen=True)
class BeamParams:
    """Excitation beam at the particle. SI units."""

    power: float = BEAM_POWER
    waist: float = BEAM_WAIST
    detection_efficiency: float = DETECTION_EFFICIENCY
    wavelength: float = WAVELENGTH

    def __post_init__(self):
        for name in ("power", "waist", "wavelength"):
            if not getattr(self, name) > 0:
                raise DomainError(f"Beam {name} must be positive")
        if not 0 < self.detection_efficiency <= 1:
            raise DomainError(
                "Detection efficiency must lie in (0, 1]: "
                f"{self.detection_efficiency}"
            )

    @property
    def peak_intensity(self) -> float:
        """2P / (pi w^2) in W/m^2."""
        return 2.0 * self.power / (np.pi * self.waist**2)

    @property
    def photon_energy(self) -> float:
        return PLANCK * SPEED_OF_LIGHT / self.wavelength

    @property
    def photon_flux_density(self) -> float:
        """Incident photons per second per square metre."""
        return self.peak_intensity / self.photon_energy


@dataclass(frozen=True)
class CrossSection:
    """
    Polarization-averaged cross-section for scattering into the fiber.

    ``two_detector`` uses the summed rates of both detectors,
    ``per_detector`` their mean. Both in m^2.
    """

    two_detector: float
    per_detector: float


def dipole_moment(alpha: complex, e_exc: ArrayLike) -> ComplexField3:
    """Induced dipole d = alpha * E_exc."""
    return alpha * np.asarray(e_exc, dtype=complex)


def emission_into_mode(
    d: ArrayLike, mode_eps: ArrayLike
) -> NDArray[np.float64]:
    """Power emitted into a mode, |d . conj(eps)|^2."""
    return np.abs(inner_product(d, mode_eps)) ** 2


def directionality(
    c_plus: ArrayLike, c_minus: ArrayLike
) -> NDArray[np.float64] | float:
    """
    Normalized asymmetry (c+ - c-) / (c+ + c-).

    Raises:
        DegenerateFieldError: When both rates vanish
    """
    c_plus = np.asarray(c_plus, dtype=float)
    c_minus = np.asarray(c_minus, dtype=float)
    total = c_plus + c_minus
    if np.any(total <= 0):
        raise DegenerateFieldError("Directionality needs a non-zero flux")
    result = (c_plus - c_minus) / total
    return float(result) if result.ndim == 0 else result


def directionality_from_ratio(ratio: ArrayLike) -> NDArray[np.float64]:
    """Directionality of a c+ : c- rate ratio."""
    ratio = np.asarray(ratio, dtype=float)
    return (ratio - 1.0) / (ratio + 1.0)


def routed_fraction(d: ArrayLike) -> NDArray[np.float64]:
    """Share of the coupled light leaving through the favoured end."""
    return 0.5 * (1.0 + np.abs(np.asarray(d, dtype=float)))


def absorbance(i_particle: ArrayLike, i_ref: ArrayLike) -> NDArray[np.float64]:
    """
    Absorbance -log10(I_particle / I_ref) of transmission spectra.

    Raises:
        DomainError: When a reference or particle value is not positive
    """
    i_particle = np.asarray(i_particle, dtype=float)
    i_ref = np.asarray(i_ref, dtype=float)
    if np.any(i_ref <= 0):
        raise DomainError("Reference spectrum must be positive")
    if np.any(i_particle <= 0):
        raise DomainError("Transmitted spectrum must be positive")
    return -np.log10(i_particle / i_ref)


_LABELS = {
    direction: [ModeLabel(axis, direction) for axis in Axis]
    for direction in Direction
}


def _coupling_grid(
    spec: FiberSpec,
    sol: ModeSolution,
    excitation: BaseIncidentField,
    r: float,
    phi: NDArray,
    pols: NDArray,
) -> dict[Direction, NDArray]:
    """
    Incoherent mode sums for every (azimuth, polarization) pair.

    Returns:
        dict: Direction -> array of shape ``(len(phi), len(pols))``
    """
    te, tm = excitation.channel_fields(r, phi)
    jy = pols[:, 1][None, :]
    jz = pols[:, 2][None, :]
    sums = {}
    for direction, labels in _LABELS.items():
        total = np.zeros((len(phi), len(pols)))
        for label in labels:
            eps = mode_field(sol, spec, label, r, phi)
            g_te = inner_product(te, eps)[:, None]
            g_tm = inner_product(tm, eps)[:, None]
            total += np.abs(jy * g_te + jz * g_tm) ** 2
        sums[direction] = total
    return sums


def flux_grid(
    params: ModelParams,
    spec: FiberSpec,
    sol: ModeSolution,
    excitation: BaseIncidentField,
    phi_deg: ArrayLike,
    pols: ArrayLike,
    particle: ParticleSpec | None = None,
    point: EvaluationPoint = EvaluationPoint.CENTER,
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """
    Detector rates for azimuths and explicit polarization states.

    Args:
        params: Flux amplitude, background and offset
        spec: Fiber description
        sol: Solved mode
        excitation: Excitation field model
        phi_deg: Particle azimuths in degrees
        pols: States of shape ``(n, 3)``
        particle: Particle description, defaults to the 45 nm particle
        point: Evaluation radius rule

    Returns:
        tuple: (c_plus, c_minus), each of shape ``(len(phi_deg), n)``
    """
    particle = particle or ParticleSpec()
    r = particle.evaluation_radius(spec, point)
    phi = np.deg2rad(
        np.atleast_1d(np.asarray(phi_deg, dtype=float)) - params.phi0_offset
    )
    pols = np.atleast_2d(np.asarray(pols, dtype=complex))
    sums = _coupling_grid(spec, sol, excitation, r, phi, pols)
    scale = params.kappa_f * abs(particle.polarizability_alpha) ** 2
    return (
        scale * sums[Direction.PLUS] + params.c0,
        scale * sums[Direction.MINUS] + params.c0,
    )


def flux_pair(
    params: ModelParams,
    spec: FiberSpec,
    sol: ModeSolution,
    particle: ParticleSpec,
    incident: IncidentConfig,
    theta: float | None = None,
    point: EvaluationPoint = EvaluationPoint.CENTER,
) -> FluxPrediction:
    """
    Predicted rates and directionality at one node.

    Args:
        params: Flux amplitude, background and offset
        spec: Fiber description
        sol: Solved mode
        particle: Particle description and azimuth
        incident: Excitation model; its polarization is used when ``theta``
            is None
        theta: Wave-plate angle in degrees
        point: Evaluation radius rule

    Returns:
        FluxPrediction: Rates and directionality

    Raises:
        DegenerateFieldError: When both rates vanish
    """
    pol = incident.pol if theta is None else qwp_state(theta)
    excitation = incident_field(spec, incident.model, incident.k0)
    c_plus, c_minus = flux_grid(
        params,
        spec,
        sol,
        excitation,
        particle.azimuth_phi,
        pol[None, :],
        particle,
        point,
    )
    c_plus, c_minus = float(c_plus[0, 0]), float(c_minus[0, 0])
    return FluxPrediction(c_plus, c_minus, directionality(c_plus, c_minus))


def flux_map(
    params: ModelParams,
    spec: FiberSpec,
    sol: ModeSolution,
    incident: IncidentConfig | IncidentModel | str,
    phi_grid: ArrayLike,
    theta_grid: ArrayLike,
    particle: ParticleSpec | None = None,
    point: EvaluationPoint = EvaluationPoint.CENTER,
    excitation: BaseIncidentField | None = None,
) -> FluxDataset:
    """
    Predicted rates over azimuth and wave-plate angle.

    Args:
        params: Flux amplitude, background and offset
        spec: Fiber description
        sol: Solved mode
        incident: Excitation configuration or model name
        phi_grid: Particle azimuths in degrees
        theta_grid: Wave-plate angles in degrees
        particle: Particle description; its azimuth is ignored
        point: Evaluation radius rule
        excitation: Prebuilt excitation field, reused across calls

    Returns:
        FluxDataset: One row per (phi, theta) node
    """
    phi_grid = np.atleast_1d(np.asarray(phi_grid, dtype=float))
    theta_grid = np.atleast_1d(np.asarray(theta_grid, dtype=float))
    if phi_grid.size == 0 or theta_grid.size == 0:
        raise DomainError("Flux map grids must be non-empty")
    if isinstance(incident, IncidentConfig):
        model, k0 = incident.model, incident.k0
    else:
        model, k0 = IncidentModel(incident), spec.k0
    if excitation is None:
        excitation = incident_field(spec, model, k0)

    c_plus, c_minus = flux_grid(
        params,
        spec,
        sol,
        excitation,
        phi_grid,
        qwp_state(theta_grid),
        particle,
        point,
    )
    logger.debug(
        f"Flux map: {phi_grid.size} x {theta_grid.size} nodes, "
        f"model {model.value}"
    )
    return FluxDataset.from_grid(
        phi_grid,
        theta_grid,
        c_plus,
        c_minus,
        metadata={
            "kappa_f": params.kappa_f,
            "c0": params.c0,
            "phi0_offset": params.phi0_offset,
            "model": model.value,
        },
    )


def overlap_map(
    sol: ModeSolution,
    spec: FiberSpec,
    label: ModeLabel,
    pol: ArrayLike,
    x: ArrayLike,
    y: ArrayLike,
) -> NDArray[np.float64]:
    """
    Overlap of a mode with a polarization state over the transverse plane.

    Args:
        sol: Solved mode
        spec: Fiber description
        label: Mode axis and direction
        pol: Polarization state
        x: Grid abscissae in metres
        y: Grid ordinates in metres

    Returns:
        Array of shape ``(len(y), len(x))``
    """
    xx, yy = np.meshgrid(np.asarray(x, float), np.asarray(y, float))
    eps = mode_field(sol, spec, label, np.hypot(xx, yy), np.arctan2(yy, xx))
    return overlap_fraction(eps, pol)


def scattering_cross_section(
    params: ModelParams,
    beam: BeamParams,
    theta_grid: ArrayLike,
    spec: FiberSpec,
    sol: ModeSolution,
    particle: ParticleSpec | None = None,
    incident: IncidentModel | str = IncidentModel.UNPERTURBED,
    point: EvaluationPoint = EvaluationPoint.CENTER,
) -> CrossSection:
    """
    Polarization-averaged cross-section for scattering into the fiber.

    sigma_f = <c+ + c- - 2 c0>_theta / (eta * I / (h c / lambda)) with the
    peak intensity I = 2P / (pi w^2). The theta grid should span a full
    wave-plate cycle.

    Returns:
        CrossSection: Two-detector and per-detector values in m^2
    """
    particle = particle or ParticleSpec()
    theta_grid = np.atleast_1d(np.asarray(theta_grid, dtype=float))
    excitation = incident_field(spec, incident)
    c_plus, c_minus = flux_grid(
        params,
        spec,
        sol,
        excitation,
        particle.azimuth_phi,
        qwp_state(theta_grid),
        particle,
        point,
    )
    coupled = float(np.mean(c_plus + c_minus - 2.0 * params.c0))
    detected = beam.detection_efficiency * beam.photon_flux_density
    two_detector = coupled / detected
    return CrossSection(two_detector, 0.5 * two_detector)
