"""
High-level access to the nanofiber chiral-coupling model.
"""

from functools import cached_property
from typing import Any

import numpy as np
from loguru import logger
from numpy.typing import ArrayLike, NDArray

from .config import RunConfig
from .dataset import FluxDataset
from .exceptions import CircularPointNotFoundError
from .fiber_modes import (
    FiberSpec,
    ModeLabel,
    ModeSolution,
    dispersion_residual,
    find_circular_point,
    max_longitudinal_ratio,
    mode_field,
    solve_he11,
)
from .fitting import FitResult, ForwardModel, fit, synthesize_dataset
from .incident import BaseIncidentField, incident_field
from .polarization import overlap_fraction, polarization_by_name
from .scattering import (
    CrossSection,
    flux_map,
    overlap_map,
    scattering_cross_section,
)


class ChiralCoupler:
    """
    A class to evaluate and fit the directional coupling of a nanoparticle
    to a nanofiber.
    """

    def __init__(self, config: RunConfig | None = None):
        """
        Initialize the coupler from a run configuration.

        Args:
            config: Run parameters; defaults to the packaged defaults
        """
        self.config = (config or RunConfig()).validate()
        self.spec: FiberSpec = self.config.fiber_spec()

    @cached_property
    def solution(self) -> ModeSolution:
        """The solved HE11 mode, computed on first use."""
        return solve_he11(self.spec)

    def excitation(self, model: str | None = None) -> BaseIncidentField:
        """Excitation field for a model, defaulting to the configured one."""
        return incident_field(self.spec, model or self.config.model)

    def forward_model(self, model: str | None = None) -> ForwardModel:
        return ForwardModel(
            spec=self.spec,
            sol=self.solution,
            excitation=self.excitation(model),
            particle=self.config.particle(),
            point=self.config.point,
        )

    def mode_report(self) -> dict[str, Any]:
        """
        Summary of the solved mode.

        Returns:
            dict[str, Any]: V number, propagation constants, structure
            parameter, longitudinal ratio maximum and the interior circular
            point (None when absent)
        """
        sol = self.solution
        ratio, ratio_phi = max_longitudinal_ratio(sol, self.spec)
        try:
            circular_r = find_circular_point(sol, self.spec)
        except CircularPointNotFoundError as e:
            logger.warning(f"No interior circular point: {e}")
            circular_r = None
        top = mode_field(
            sol, self.spec, ModeLabel.parse("y+"), self.spec.radius_a, np.pi / 2
        )
        return {
            "radius_a": self.spec.radius_a,
            "wavelength": self.spec.wavelength,
            "n1": self.spec.n1,
            "n2": self.spec.n2,
            "V": sol.v_number,
            "single_mode": sol.single_mode,
            "beta": sol.beta,
            "beta_over_k0": sol.beta / self.spec.k0,
            "h": sol.h,
            "q": sol.q,
            "s": sol.s,
            "dispersion_residual": dispersion_residual(self.spec, sol.beta),
            "circular_point_r": circular_r,
            "max_longitudinal_ratio": ratio,
            "max_longitudinal_ratio_phi_deg": float(np.rad2deg(ratio_phi)),
            "surface_top_sigma_minus_overlap": float(
                overlap_fraction(top, polarization_by_name("sigma_minus"))
            ),
        }

    def transverse_grid(self) -> tuple[NDArray, NDArray]:
        half = self.config.map_half_width
        axis = np.linspace(-half, half, self.config.map_resolution)
        return axis, axis.copy()

    def overlap_map(
        self, label: str | None = None, pol: str | None = None
    ) -> tuple[NDArray, NDArray, NDArray]:
        """
        Mode-polarization overlap on the transverse grid.

        Returns:
            tuple: (x, y, overlap) with overlap of shape (len(y), len(x))
        """
        x, y = self.transverse_grid()
        values = overlap_map(
            self.solution,
            self.spec,
            ModeLabel.parse(label or self.config.mode_label),
            polarization_by_name(pol or self.config.polarization),
            x,
            y,
        )
        return x, y, values

    def field_map(
        self, pol: str = "qwp:0", model: str | None = None
    ) -> tuple[NDArray, NDArray, NDArray]:
        """
        Excitation intensity relative to the incident beam.

        Returns:
            tuple: (x, y, intensity) with intensity of shape (len(y), len(x))
        """
        x, y = self.transverse_grid()
        xx, yy = np.meshgrid(x, y)
        intensity = self.excitation(model).intensity(
            polarization_by_name(pol), np.hypot(xx, yy), np.arctan2(yy, xx)
        )
        return x, y, intensity

    def flux_map(
        self,
        model: str | None = None,
        phi_grid: ArrayLike | None = None,
    ) -> FluxDataset:
        """Predicted rates over the configured azimuth and wave-plate grids."""
        model = model or self.config.model
        return flux_map(
            self.config.model_params(),
            self.spec,
            self.solution,
            model,
            self.config.phi_grid if phi_grid is None else phi_grid,
            self.config.theta_grid(),
            self.config.particle(),
            self.config.point,
            self.excitation(model),
        )

    def directionality_curves(
        self, phi_list: ArrayLike | None = None, model: str | None = None
    ) -> FluxDataset:
        """Rates and directionality versus wave-plate angle per azimuth."""
        phis = self.config.directionality_phi if phi_list is None else phi_list
        return self.flux_map(model, phis)

    def synthesize(
        self, seed: int | None = None, noise_rel: float | None = None
    ) -> FluxDataset:
        """Synthetic rates from the configured parameters."""
        model = self.config.model
        return synthesize_dataset(
            self.config.model_params(),
            self.spec,
            model,
            self.config.phi_grid,
            self.config.theta_grid(),
            self.config.noise_rel if noise_rel is None else noise_rel,
            self.config.seed if seed is None else seed,
            self.solution,
            self.config.particle(),
            self.config.point,
            self.excitation(model),
        )

    def fit(self, dataset: FluxDataset) -> FitResult:
        """Fit kappa_f and phi0 with the configured background."""
        return fit(
            dataset,
            self.forward_model(),
            c0=self.config.c0,
            init=self.config.model_params(),
            weighted=self.config.weighted,
        )

    def cross_section(self) -> CrossSection:
        """Polarization-averaged cross-section at the top of the fiber."""
        return scattering_cross_section(
            self.config.model_params(),
            self.config.beam_params(),
            self.config.theta_grid(),
            self.spec,
            self.solution,
            self.config.particle(),
            self.config.model,
            self.config.point,
        )
