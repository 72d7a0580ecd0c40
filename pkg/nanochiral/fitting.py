"""
Least-squares fit of the flux model to measured rate maps.

The model is linear in kappa_f once the fixed background is subtracted, so
kappa_f is solved in closed form for each trial offset phi0 and only phi0
is searched numerically.
"""

from dataclasses import asdict, dataclass, field

import numpy as np
from loguru import logger
from numpy.typing import ArrayLike, NDArray
from scipy.optimize import minimize_scalar

from .consts import BACKGROUND_FLUX, PHI0_SEARCH_BOUND
from .dataset import FluxDataset
from .exceptions import DomainError, FitConvergenceError
from .fiber_modes import FiberSpec, ModeSolution, solve_he11
from .incident import (
    BaseIncidentField,
    IncidentConfig,
    IncidentModel,
    incident_field,
)
from .polarization import qwp_state
from .scattering import (
    EvaluationPoint,
    ModelParams,
    ParticleSpec,
    flux_grid,
    flux_map,
)

COARSE_STEP = 1.0
REFINE_TOLERANCE = 1e-6
BOUND_MARGIN = 0.05


@dataclass
class ForwardModel:
    """Flux model with fiber, mode and excitation fixed."""

    spec: FiberSpec
    sol: ModeSolution
    excitation: BaseIncidentField
    particle: ParticleSpec = field(default_factory=ParticleSpec)
    point: EvaluationPoint = EvaluationPoint.CENTER

    @classmethod
    def build(
        cls,
        spec: FiberSpec,
        model: IncidentModel | str = IncidentModel.UNPERTURBED,
        sol: ModeSolution | None = None,
        particle: ParticleSpec | None = None,
        point: EvaluationPoint = EvaluationPoint.CENTER,
    ) -> "ForwardModel":
        """Solve the mode if needed and construct the excitation field."""
        return cls(
            spec=spec,
            sol=sol or solve_he11(spec),
            excitation=incident_field(spec, model),
            particle=particle or ParticleSpec(),
            point=EvaluationPoint(point),
        )

    def unit_rates(
        self, dataset: FluxDataset, phi0_offset: float
    ) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
        """Rates per dataset row for kappa_f = 1 and no background."""
        phis, phi_index = np.unique(dataset.phi_deg, return_inverse=True)
        thetas, theta_index = np.unique(dataset.theta_deg, return_inverse=True)
        c_plus, c_minus = flux_grid(
            ModelParams(kappa_f=1.0, c0=0.0, phi0_offset=phi0_offset),
            self.spec,
            self.sol,
            self.excitation,
            phis,
            qwp_state(thetas),
            self.particle,
            self.point,
        )
        return c_plus[phi_index, theta_index], c_minus[phi_index, theta_index]

    def predict(
        self, dataset: FluxDataset, params: ModelParams
    ) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
        """Model rates at every dataset node."""
        s_plus, s_minus = self.unit_rates(dataset, params.phi0_offset)
        return (
            params.kappa_f * s_plus + params.c0,
            params.kappa_f * s_minus + params.c0,
        )


@dataclass
class FitResult:
    """
    Outcome of a flux-model fit.

    ``std_errors`` are model-based: they follow from the local curvature of
    the residual and the residual variance, not from a noise model.
    """

    kappa_f: float
    phi0_offset: float
    residual_sum: float
    std_errors: dict[str, float]
    identifiable: bool
    c0: float
    weighted: bool = False

    def to_dict(self) -> dict:
        return asdict(self)

    @property
    def params(self) -> ModelParams:
        return ModelParams(self.kappa_f, self.c0, self.phi0_offset)


def _weights(dataset: FluxDataset, weighted: bool):
    if not weighted:
        return np.ones(len(dataset)), np.ones(len(dataset))
    return (
        1.0 / np.maximum(dataset.c_plus, 1.0),
        1.0 / np.maximum(dataset.c_minus, 1.0),
    )


def residual(
    params: ModelParams,
    dataset: FluxDataset,
    forward: ForwardModel,
    weighted: bool = False,
) -> float:
    """
    Sum of squared model-data differences over nodes and both detectors.

    Args:
        params: Model parameters
        dataset: Measured or synthetic rates
        forward: Configured forward model
        weighted: Weight each term by 1 / max(data, 1)

    Returns:
        float: Residual in counts^2/s^2 (unweighted)
    """
    w_plus, w_minus = _weights(dataset, weighted)
    c_plus, c_minus = forward.predict(dataset, params)
    return float(
        np.sum(w_plus * (c_plus - dataset.c_plus) ** 2)
        + np.sum(w_minus * (c_minus - dataset.c_minus) ** 2)
    )


def _profile(
    dataset: FluxDataset,
    forward: ForwardModel,
    c0: float,
    phi0_offset: float,
    weights,
) -> tuple[float, float]:
    """Best kappa_f at a fixed offset and the residual it leaves."""
    w_plus, w_minus = weights
    s_plus, s_minus = forward.unit_rates(dataset, phi0_offset)
    y_plus = dataset.c_plus - c0
    y_minus = dataset.c_minus - c0
    norm = np.sum(w_plus * s_plus**2) + np.sum(w_minus * s_minus**2)
    if norm == 0.0:
        kappa = 0.0
    else:
        kappa = (
            np.sum(w_plus * s_plus * y_plus)
            + np.sum(w_minus * s_minus * y_minus)
        ) / norm
        kappa = max(float(kappa), 0.0)
    rss = np.sum(w_plus * (kappa * s_plus - y_plus) ** 2) + np.sum(
        w_minus * (kappa * s_minus - y_minus) ** 2
    )
    return kappa, float(rss)


def _std_errors(
    dataset: FluxDataset,
    forward: ForwardModel,
    c0: float,
    kappa: float,
    phi0: float,
    rss: float,
    weighted: bool,
) -> dict[str, float]:
    dof = 2 * len(dataset) - 2
    if dof <= 0:
        return {"kappa_f": float("nan"), "phi0_offset": float("nan")}

    def objective(k: float, p: float) -> float:
        return residual(ModelParams(k, c0, p), dataset, forward, weighted)

    step = np.array([1e-4 * max(abs(kappa), 1.0), 1e-3])
    center = np.array([kappa, phi0])
    hessian = np.empty((2, 2))
    for i in range(2):
        for j in range(2):
            shifts = []
            for si, sj in ((1, 1), (1, -1), (-1, 1), (-1, -1)):
                point = center.copy()
                point[i] += si * step[i]
                point[j] += sj * step[j]
                point[0] = max(point[0], 0.0)
                shifts.append(si * sj * objective(*point))
            hessian[i, j] = sum(shifts) / (4 * step[i] * step[j])

    variance = rss / dof
    try:
        covariance = 2.0 * variance * np.linalg.inv(hessian)
    except np.linalg.LinAlgError:
        logger.warning("Singular residual curvature; no standard errors")
        return {"kappa_f": float("nan"), "phi0_offset": float("nan")}
    diagonal = np.sqrt(np.clip(np.diag(covariance), 0.0, None))
    return {"kappa_f": float(diagonal[0]), "phi0_offset": float(diagonal[1])}


def fit(
    dataset: FluxDataset,
    forward: ForwardModel,
    c0: float | None = None,
    init: ModelParams | None = None,
    weighted: bool = False,
    bound: float = PHI0_SEARCH_BOUND,
) -> FitResult:
    """
    Fit kappa_f and phi0 with the background held fixed.

    The offset is scanned in 1 deg steps over [-bound, bound] and the best
    cell is refined by a bounded scalar search.

    Args:
        dataset: Measured or synthetic rates
        forward: Configured forward model
        c0: Fixed background; defaults to ``init.c0``
        init: Starting parameters, used for the background only
        weighted: Use 1 / max(data, 1) weights
        bound: Half-width of the offset search in degrees

    Returns:
        FitResult: Fitted parameters and diagnostics

    Raises:
        FitConvergenceError: When the best offset sits on a search bound
    """
    init = init or ModelParams(c0=BACKGROUND_FLUX)
    c0 = init.c0 if c0 is None else float(c0)
    if c0 < 0:
        raise DomainError(f"Background must be non-negative: {c0}")
    weights = _weights(dataset, weighted)

    identifiable = len(dataset.azimuths) >= 2
    if not identifiable:
        logger.warning(
            "Dataset spans a single azimuth; the offset is weakly identified"
        )

    grid = np.arange(-bound, bound + 0.5 * COARSE_STEP, COARSE_STEP)
    coarse = [_profile(dataset, forward, c0, p, weights)[1] for p in grid]
    start = float(grid[int(np.argmin(coarse))])
    logger.debug(f"Coarse offset scan: best {start:.1f} deg")

    search = minimize_scalar(
        lambda p: _profile(dataset, forward, c0, p, weights)[1],
        bounds=(
            max(-bound, start - COARSE_STEP),
            min(bound, start + COARSE_STEP),
        ),
        method="bounded",
        options={"xatol": REFINE_TOLERANCE},
    )
    phi0 = float(search.x)
    if abs(phi0) >= bound - BOUND_MARGIN:
        logger.error(f"Offset search ended on the bound at {phi0:.3f} deg")
        raise FitConvergenceError(
            f"Offset {phi0:.3f} deg reached the search bound +-{bound}",
            phi0_offset=phi0,
        )

    kappa, rss = _profile(dataset, forward, c0, phi0, weights)
    std_errors = _std_errors(
        dataset, forward, c0, kappa, phi0, rss, weighted
    )
    logger.debug(
        f"Fit: kappa_f = {kappa:.6e}, phi0 = {phi0:.4f} deg, rss = {rss:.4e}"
    )
    return FitResult(
        kappa_f=kappa,
        phi0_offset=phi0,
        residual_sum=rss,
        std_errors=std_errors,
        identifiable=identifiable,
        c0=c0,
        weighted=weighted,
    )


def synthesize_dataset(
    params: ModelParams,
    spec: FiberSpec,
    incident: IncidentConfig | IncidentModel | str,
    phi_grid: ArrayLike,
    theta_grid: ArrayLike,
    noise_rel: float = 0.0,
    seed: int = 0,
    sol: ModeSolution | None = None,
    particle: ParticleSpec | None = None,
    point: EvaluationPoint = EvaluationPoint.CENTER,
    excitation: BaseIncidentField | None = None,
) -> FluxDataset:
    """
    Model rates with multiplicative Gaussian noise.

    Each rate is scaled by (1 + noise_rel * N(0, 1)) drawn from a single
    generator seeded with ``seed``, then clipped at zero.

    Raises:
        DomainError: When noise_rel is negative
    """
    if noise_rel < 0:
        raise DomainError(f"Relative noise must be non-negative: {noise_rel}")
    dataset = flux_map(
        params,
        spec,
        sol or solve_he11(spec),
        incident,
        phi_grid,
        theta_grid,
        particle,
        point,
        excitation,
    )
    if noise_rel > 0:
        rng = np.random.default_rng(seed)
        shape = dataset.c_plus.shape
        dataset.c_plus = np.clip(
            dataset.c_plus * (1.0 + noise_rel * rng.standard_normal(shape)),
            0.0,
            None,
        )
        dataset.c_minus = np.clip(
            dataset.c_minus * (1.0 + noise_rel * rng.standard_normal(shape)),
            0.0,
            None,
        )
    dataset.metadata.update({"noise_rel": noise_rel, "seed": seed})
    return dataset
