"""
Excitation field modified by the nanofiber.

The fiber is an infinite dielectric cylinder illuminated at normal incidence
by a unit plane wave travelling along -x. The incident E along z (TM) and E
along y (TE) problems decouple. Each is expanded in cylinder harmonics
exp(i n phi) with weights (-i)^n; the coefficients depend on |n| only, so
the sums run over n >= 0 with cosine and sine pairs.

TM: E_z = incident + sum b_n H_n(kr) outside, sum c_n J_n(mkr) inside.
TE: the same for H_z with coefficients a_n (outside) and d_n (inside).
"""

from dataclasses import dataclass

import numpy as np
from loguru import logger
from numpy.typing import ArrayLike, NDArray

from ..exceptions import DomainError, SeriesConvergenceError
from ..fiber_modes import ComplexField3, FiberSpec
from ..specfun import bessel_j, bessel_j_prime, hankel1, hankel1_prime
from .base import BaseIncidentField, IncidentConfig, IncidentModel, polar_grid

TRUNCATION_FLOOR = 3
MAX_ORDER = 200
CERTIFICATE = 1e-12
BOUNDARY_SAMPLES = 360


@dataclass(frozen=True, eq=False)
class CylinderSeries:
    """
    Expansion coefficients for orders 0..n_max.

    Negative orders equal the positive ones. ``k`` is the wavenumber in the
    surrounding medium, ``relative_index`` is n1 / n2.
    """

    n_max: int
    size_parameter: float
    relative_index: float
    k: float
    radius: float
    tm_scatter: NDArray[np.complex128]
    tm_internal: NDArray[np.complex128]
    te_scatter: NDArray[np.complex128]
    te_internal: NDArray[np.complex128]

    @property
    def orders(self) -> NDArray[np.int_]:
        return np.arange(self.n_max + 1)


@dataclass(frozen=True)
class SeriesEfficiencies:
    """Extinction and scattering efficiencies per unit cylinder diameter."""

    tm_extinction: float
    tm_scattering: float
    te_extinction: float
    te_scattering: float


def truncation_order(size_parameter: float) -> int:
    """
    Starting truncation order for a size parameter x = k a.

    Returns:
        int: max(3, ceil(x + 4 x^(1/3) + 2))

    Raises:
        DomainError: When x <= 0
    """
    x = float(size_parameter)
    if not x > 0:
        raise DomainError(f"Size parameter must be positive: {x}")
    return max(TRUNCATION_FLOOR, int(np.ceil(x + 4.0 * np.cbrt(x) + 2.0)))


def _order_coefficients(n: int, x: float, m: float) -> tuple[complex, ...]:
    j_out = bessel_j(n, x)
    jp_out = bessel_j_prime(n, x)
    j_in = bessel_j(n, m * x)
    jp_in = bessel_j_prime(n, m * x)
    h_out = hankel1(n, x)
    hp_out = hankel1_prime(n, x)
    # W[J_n, H_n](x)
    wronskian = 2j / (np.pi * x)

    tm_den = j_in * hp_out - m * jp_in * h_out
    tm_scatter = (m * jp_in * j_out - j_in * jp_out) / tm_den
    tm_internal = wronskian / tm_den

    te_den = m * j_in * hp_out - jp_in * h_out
    te_scatter = (jp_in * j_out - m * j_in * jp_out) / te_den
    te_internal = m * wronskian / te_den
    return tm_scatter, tm_internal, te_scatter, te_internal


def _edge_amplitude(n: int, x: float, m: float, coefficients) -> float:
    tm_scatter, tm_internal, te_scatter, te_internal = coefficients
    h_out = hankel1(n, x)
    j_in = bessel_j(n, m * x)
    return float(
        max(
            abs(tm_scatter * h_out),
            abs(te_scatter * h_out),
            abs(tm_internal * j_in),
            abs(te_internal * j_in),
        )
    )


def cylinder_coefficients(
    spec: FiberSpec, k0: float, min_order: int | None = None
) -> CylinderSeries:
    """
    Solve the normal-incidence boundary-value problems of the fiber.

    The order grows from :func:`truncation_order` until every order-n_max
    term is below 1e-12 of the incident amplitude at the surface.

    Args:
        spec: Fiber description
        k0: Vacuum wavenumber in rad/m
        min_order: Optional lower bound on n_max

    Returns:
        CylinderSeries: Converged coefficients

    Raises:
        SeriesConvergenceError: When n_max would exceed 200
    """
    if not k0 > 0:
        raise DomainError(f"Wavenumber must be positive: {k0}")
    k = spec.n2 * k0
    x = k * spec.radius_a
    m = spec.n1 / spec.n2
    n_max = max(truncation_order(x), min_order or 0)
    if n_max > MAX_ORDER:
        raise SeriesConvergenceError(
            f"Requested order {n_max} exceeds {MAX_ORDER}", n_max=n_max
        )

    coefficients = [_order_coefficients(n, x, m) for n in range(n_max + 1)]
    while True:
        edge = _edge_amplitude(n_max, x, m, coefficients[-1])
        if not np.isfinite(edge):
            logger.error(f"Cylinder series overflow at order {n_max}")
            raise SeriesConvergenceError(
                f"Non-finite coefficient at order {n_max}", n_max=n_max
            )
        if edge < CERTIFICATE:
            break
        if n_max >= MAX_ORDER:
            logger.error(f"Cylinder series unconverged at x = {x:.4f}")
            raise SeriesConvergenceError(
                f"Series not converged by order {MAX_ORDER}", n_max=n_max
            )
        n_max += 1
        coefficients.append(_order_coefficients(n_max, x, m))

    logger.debug(f"Cylinder series: x = {x:.5f}, m = {m:.5f}, n_max = {n_max}")
    tm_scatter, tm_internal, te_scatter, te_internal = (
        np.array(column, dtype=complex) for column in zip(*coefficients)
    )
    return CylinderSeries(
        n_max=n_max,
        size_parameter=x,
        relative_index=m,
        k=k,
        radius=spec.radius_a,
        tm_scatter=tm_scatter,
        tm_internal=tm_internal,
        te_scatter=te_scatter,
        te_internal=te_internal,
    )


def _harmonics(n: int, phi: NDArray) -> tuple[NDArray, NDArray]:
    """Paired (+n, -n) angular factors for even and n-weighted sums."""
    weight = (-1j) ** n
    if n == 0:
        ones = np.ones_like(phi, dtype=complex)
        return ones, np.zeros_like(ones)
    return 2.0 * weight * np.cos(n * phi), 2j * n * weight * np.sin(n * phi)


def _j_over_arg(n: int, z: NDArray) -> NDArray:
    # J_n(z) / z with its limit at z = 0
    safe = np.where(z > 0, z, 1.0)
    limit = 0.5 if n == 1 else 0.0
    return np.where(z > 0, bessel_j(n, safe) / safe, limit)


def _channel_fields(
    series: CylinderSeries, r: ArrayLike, phi: ArrayLike
) -> tuple[ComplexField3, ComplexField3]:
    r, phi = polar_grid(r, phi)
    m = series.relative_index
    inside = r < series.radius
    kr = series.k * np.where(inside, series.radius, r)
    k1r = m * series.k * np.where(inside, r, 0.0)

    incident = np.exp(-1j * kr * np.cos(phi))
    ez_out = incident.copy()
    er_out = np.sin(phi) * incident
    ephi_out = np.cos(phi) * incident
    ez_in = np.zeros_like(incident)
    er_in = np.zeros_like(incident)
    ephi_in = np.zeros_like(incident)

    for n in series.orders:
        even, odd = _harmonics(int(n), phi)
        h_out = hankel1(n, kr)
        hp_out = hankel1_prime(n, kr)
        j_in = bessel_j(n, k1r)
        jp_in = bessel_j_prime(n, k1r)
        b, c = series.tm_scatter[n], series.tm_internal[n]
        a, d = series.te_scatter[n], series.te_internal[n]

        ez_out += b * h_out * even
        ez_in += c * j_in * even
        ephi_out += 1j * a * hp_out * even
        ephi_in += 1j / m * d * jp_in * even
        if n > 0:
            er_out += a * h_out / kr * odd
            er_in += d * _j_over_arg(int(n), k1r) / m * odd

    ez = np.where(inside, ez_in, ez_out)
    er = np.where(inside, er_in, er_out)
    ephi = np.where(inside, ephi_in, ephi_out)
    c, s = np.cos(phi), np.sin(phi)
    zero = np.zeros_like(ez)
    te = np.stack([er * c - ephi * s, er * s + ephi * c, zero], axis=-1)
    tm = np.stack([zero, zero, ez], axis=-1)
    return te, tm


def modified_field(
    series: CylinderSeries,
    config: IncidentConfig,
    spec: FiberSpec,
    position: ArrayLike,
) -> ComplexField3:
    """
    Total excitation field near the fiber.

    Args:
        series: Converged coefficients for ``spec``
        config: Excitation beam description
        spec: Fiber description
        position: Polar point(s) (r, phi) in metres and radians, last axis
            of length 2

    Returns:
        ComplexField3: Incident plus scattered field outside, internal field
        inside
    """
    if not np.isclose(series.radius, spec.radius_a, rtol=1e-12, atol=0.0):
        raise DomainError("Series was solved for a different fiber radius")
    position = np.asarray(position, dtype=float)
    te, tm = _channel_fields(series, position[..., 0], position[..., 1])
    return config.pol[1] * te + config.pol[2] * tm


def boundary_residual(
    series: CylinderSeries, samples: int = BOUNDARY_SAMPLES
) -> float:
    """
    Largest mismatch of the continuity conditions at r = a.

    Compares E_z, H_phi, H_z, E_phi and the normal displacement on both
    sides. Values are relative to the unit incident amplitude.
    """
    phi = np.linspace(0.0, 2.0 * np.pi, samples, endpoint=False)
    x = series.size_parameter
    m = series.relative_index
    incident = np.exp(-1j * x * np.cos(phi))

    ez = [incident.copy(), np.zeros_like(incident)]
    dez = [-1j * np.cos(phi) * incident, np.zeros_like(incident)]
    hz = [incident.copy(), np.zeros_like(incident)]
    ephi = [np.cos(phi) * incident, np.zeros_like(incident)]
    er = [np.sin(phi) * incident, np.zeros_like(incident)]

    for n in series.orders:
        even, odd = _harmonics(int(n), phi)
        h_out, hp_out = hankel1(n, x), hankel1_prime(n, x)
        j_in, jp_in = bessel_j(n, m * x), bessel_j_prime(n, m * x)
        b, c = series.tm_scatter[n], series.tm_internal[n]
        a, d = series.te_scatter[n], series.te_internal[n]

        ez[0] += b * h_out * even
        ez[1] += c * j_in * even
        dez[0] += b * hp_out * even
        dez[1] += m * c * jp_in * even
        hz[0] += a * h_out * even
        hz[1] += d * j_in * even
        ephi[0] += 1j * a * hp_out * even
        ephi[1] += 1j / m * d * jp_in * even
        er[0] += a * h_out / x * odd
        # n_1^2 E_r inside against n_2^2 E_r outside
        er[1] += d * j_in / x * odd

    return float(
        max(
            np.max(np.abs(outer - inner))
            for outer, inner in (ez, dez, hz, ephi, er)
        )
    )


def efficiencies(series: CylinderSeries) -> SeriesEfficiencies:
    """
    Extinction from the forward amplitude and the scattering sum.

    For a lossless cylinder both agree channel by channel.
    """
    x = series.size_parameter

    def full_sum(values: NDArray) -> complex:
        return values[0] + 2.0 * np.sum(values[1:])

    return SeriesEfficiencies(
        tm_extinction=float(-2.0 / x * full_sum(series.tm_scatter).real),
        tm_scattering=float(
            2.0 / x * full_sum(np.abs(series.tm_scatter) ** 2).real
        ),
        te_extinction=float(-2.0 / x * full_sum(series.te_scatter).real),
        te_scattering=float(
            2.0 / x * full_sum(np.abs(series.te_scatter) ** 2).real
        ),
    )


class CylinderModifiedField(BaseIncidentField):
    """Excitation including refraction and scattering by the fiber."""

    model = IncidentModel.CYLINDER_MODIFIED

    def __init__(self, spec: FiberSpec, k0: float):
        super().__init__(spec, k0)
        self.series = cylinder_coefficients(spec, k0)

    def channel_fields(
        self, r: ArrayLike, phi: ArrayLike
    ) -> tuple[ComplexField3, ComplexField3]:
        return _channel_fields(self.series, r, phi)
