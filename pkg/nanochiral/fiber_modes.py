"""
HE11 guided mode of a step-index nanofiber.

Solves the hybrid-mode eigenvalue equation for the fundamental mode and
evaluates the quasi-linearly polarized profile functions. Profiles are
normalized to unit intensity on the fiber axis. Angles are in radians,
lengths in metres.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np
from loguru import logger
from numpy.typing import ArrayLike, NDArray
from scipy.optimize import bisect

from .consts import (
    SECOND_MODE_CUTOFF,
    SELLMEIER_B,
    SELLMEIER_C,
    SELLMEIER_RANGE,
    SINGLE_MODE_CUTOFF,
)
from .exceptions import (
    CircularPointNotFoundError,
    DomainError,
    ModeSolverError,
)
from .specfun import (
    bessel_j,
    bessel_j_prime,
    mod_bessel_k_scaled,
)

SCAN_POINTS = 10_000
BRACKET_MARGIN = 1e-9
RESIDUAL_TOLERANCE = 1e-10

ComplexField3 = NDArray[np.complex128]


class Axis(str, Enum):
    """Principal polarization axis of a quasi-linear mode."""

    X = "x"
    Y = "y"

    @property
    def angle(self) -> float:
        return 0.0 if self is Axis.X else 0.5 * np.pi


class Direction(str, Enum):
    """Propagation direction along the fiber axis."""

    PLUS = "plus"
    MINUS = "minus"

    @property
    def sign(self) -> int:
        return 1 if self is Direction.PLUS else -1


@dataclass(frozen=True)
class ModeLabel:
    """One of the four quasi-linear HE11 modes."""

    axis: Axis
    direction: Direction

    @classmethod
    def parse(cls, text: str) -> "ModeLabel":
        """
        Parse labels such as ``"y+"``, ``"x-"`` or ``"y,minus"``.

        Raises:
            DomainError: When the text names no mode
        """
        cleaned = text.strip().lower().replace(",", "").replace(" ", "")
        try:
            axis = Axis(cleaned[0])
        except (IndexError, ValueError):
            raise DomainError(f"Unknown mode label: {text!r}")
        rest = cleaned[1:]
        if rest in ("+", "plus"):
            return cls(axis, Direction.PLUS)
        if rest in ("-", "minus"):
            return cls(axis, Direction.MINUS)
        raise DomainError(f"Unknown mode label: {text!r}")


@dataclass(frozen=True)
class FiberSpec:
    """Geometry and optics of a vacuum- or air-clad nanofiber."""

    radius_a: float
    wavelength: float
    n1: float
    n2: float = 1.0

    def __post_init__(self):
        if not self.radius_a > 0:
            raise DomainError(f"Fiber radius must be positive: {self.radius_a}")
        if not self.wavelength > 0:
            raise DomainError(f"Wavelength must be positive: {self.wavelength}")
        if not self.n2 >= 1.0:
            raise DomainError(f"Cladding index must be >= 1: {self.n2}")
        if self.n1 < self.n2:
            raise DomainError(
                f"Fiber index {self.n1} below cladding index {self.n2}"
            )

    @classmethod
    def silica(
        cls, radius_a: float, wavelength: float, n2: float = 1.0
    ) -> "FiberSpec":
        """Fiber with the fused-silica Sellmeier index at ``wavelength``."""
        return cls(radius_a, wavelength, sellmeier_index(wavelength), n2)

    @property
    def k0(self) -> float:
        return 2.0 * np.pi / self.wavelength


@dataclass(frozen=True)
class ModeSolution:
    """Solved HE11 mode. All wavenumbers in rad/m."""

    beta: float
    h: float
    q: float
    s: float
    v_number: float
    norm_A: float

    @property
    def single_mode(self) -> bool:
        return self.v_number < SINGLE_MODE_CUTOFF


def sellmeier_index(wavelength: float) -> float:
    """
    Refractive index of fused silica.

    Args:
        wavelength: Vacuum wavelength in metres, 0.2 um to 2 um

    Returns:
        float: Phase index from the three-term Sellmeier sum

    Raises:
        DomainError: Outside the validity range
    """
    low, high = SELLMEIER_RANGE
    if not low <= wavelength <= high:
        raise DomainError(
            f"Sellmeier fit valid for {low:g} m to {high:g} m, "
            f"got {wavelength:g} m"
        )
    lam2 = (wavelength * 1e6) ** 2
    n_sq = 1.0 + sum(
        b * lam2 / (lam2 - c) for b, c in zip(SELLMEIER_B, SELLMEIER_C)
    )
    return float(np.sqrt(n_sq))


def v_number(spec: FiberSpec) -> float:
    """Normalized frequency V = k0 a sqrt(n1^2 - n2^2)."""
    return float(
        spec.k0 * spec.radius_a * np.sqrt(spec.n1**2 - spec.n2**2)
    )


def is_single_mode(spec: FiberSpec) -> bool:
    """True when only HE11 is guided."""
    return v_number(spec) < SINGLE_MODE_CUTOFF


def _hybrid_terms(spec: FiberSpec, u: NDArray) -> tuple[NDArray, ...]:
    """Bessel ratio terms of the l = 1 hybrid relation at core parameter u."""
    v = v_number(spec)
    w = np.sqrt(np.maximum(v**2 - u**2, 0.0))
    with np.errstate(divide="ignore", invalid="ignore"):
        j_term = bessel_j_prime(1, u) / (u * bessel_j(1, u))
        k_ratio = -0.5 * (
            mod_bessel_k_scaled(0, w) + mod_bessel_k_scaled(2, w)
        ) / mod_bessel_k_scaled(1, w)
        k_term = k_ratio / w
    return w, j_term, k_term


def _relative_mismatch(spec: FiberSpec, u: ArrayLike) -> NDArray:
    u = np.asarray(u, dtype=float)
    k0a = spec.k0 * spec.radius_a
    w, j_term, k_term = _hybrid_terms(spec, u)
    index_ratio = (spec.n2 / spec.n1) ** 2
    b_sq = spec.n1**2 - (u / k0a) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        lhs = (j_term + k_term) * (j_term + index_ratio * k_term)
        rhs = b_sq / spec.n1**2 * (1.0 / u**2 + 1.0 / w**2) ** 2
        return (lhs - rhs) / rhs


def dispersion_residual(spec: FiberSpec, beta: float) -> float:
    """
    Relative residual of the HE11 eigenvalue equation at ``beta``.

    Args:
        spec: Fiber description
        beta: Trial propagation constant in rad/m

    Returns:
        float: (LHS - RHS) / RHS of the hybrid-mode relation
    """
    u = spec.radius_a * np.sqrt(spec.n1**2 * spec.k0**2 - beta**2)
    return float(_relative_mismatch(spec, u))


def solve_he11(spec: FiberSpec) -> ModeSolution:
    """
    Solve for the fundamental HE11 mode.

    The relation is scanned in the core parameter u = h a on a dense grid
    and the smallest-u sign change that is a genuine root (not a pole of
    J1) is refined by bisection. Smallest u means largest beta.

    Args:
        spec: Fiber description

    Returns:
        ModeSolution: Propagation constant and derived parameters

    Raises:
        ModeSolverError: When no root exists in the guidance bracket
    """
    v = v_number(spec)
    if v <= 0.0:
        raise ModeSolverError("Index-matched fiber guides no mode (V = 0)")
    if v >= SECOND_MODE_CUTOFF:
        logger.warning(f"V = {v:.4f}: fiber is multimode, solving HE11 only")
    elif v >= SINGLE_MODE_CUTOFF:
        logger.warning(f"V = {v:.4f} exceeds the single-mode cutoff")

    k0a = spec.k0 * spec.radius_a
    n_low = spec.n2 * (1.0 + BRACKET_MARGIN)
    n_high = spec.n1 * (1.0 - BRACKET_MARGIN)
    if n_low >= n_high:
        raise ModeSolverError("Guidance bracket is empty")
    u_grid = np.linspace(
        k0a * np.sqrt(spec.n1**2 - n_high**2),
        k0a * np.sqrt(spec.n1**2 - n_low**2),
        SCAN_POINTS,
    )
    values = _relative_mismatch(spec, u_grid)
    finite = np.isfinite(values)
    changes = np.nonzero(
        finite[:-1] & finite[1:] & (np.sign(values[:-1]) != np.sign(values[1:]))
    )[0]

    def mismatch(u: float) -> float:
        return float(_relative_mismatch(spec, u))

    for i in changes:
        root = bisect(mismatch, u_grid[i], u_grid[i + 1], xtol=1e-15)
        if abs(mismatch(root)) <= RESIDUAL_TOLERANCE:
            break
        logger.debug(f"Rejected pole near u = {root:.6f}")
    else:
        raise ModeSolverError(
            f"No HE11 root found for V = {v:.4f}; check the fiber parameters"
        )

    w, j_term, k_term = _hybrid_terms(spec, np.asarray(root))
    u = float(root)
    w = float(w)
    h = u / spec.radius_a
    q = w / spec.radius_a
    beta = float(np.sqrt((spec.n1 * spec.k0) ** 2 - h**2))
    s = float((1.0 / u**2 + 1.0 / w**2) / (j_term + k_term))
    norm_A = 2.0 * h / (beta * abs(1.0 - s))
    logger.debug(
        f"HE11: V = {v:.5f}, beta/k0 = {beta / spec.k0:.8f}, s = {s:.6f}"
    )
    return ModeSolution(
        beta=beta, h=h, q=q, s=s, v_number=v, norm_A=norm_A
    )


def _interior(sol: ModeSolution, phi0: float, sign: int, r, phi):
    hr = sol.h * r
    transverse = sol.norm_A * sol.beta / (2.0 * sol.h)
    j0 = bessel_j(0, hr)
    j2 = bessel_j(2, hr)
    ex = transverse * (
        (1 - sol.s) * j0 * np.cos(phi0)
        - (1 + sol.s) * j2 * np.cos(2 * phi - phi0)
    )
    ey = transverse * (
        (1 - sol.s) * j0 * np.sin(phi0)
        - (1 + sol.s) * j2 * np.sin(2 * phi - phi0)
    )
    ez = -sign * 1j * sol.norm_A * bessel_j(1, hr) * np.cos(phi - phi0)
    return ex, ey, ez


def _exterior(sol: ModeSolution, a: float, phi0: float, sign: int, r, phi):
    qa = sol.q * a
    qr = sol.q * r
    # K_n(qr) / K1(qa) without overflow at large q
    decay = np.exp(-(qr - qa)) / mod_bessel_k_scaled(1, qa)
    k0 = mod_bessel_k_scaled(0, qr) * decay
    k1 = mod_bessel_k_scaled(1, qr) * decay
    k2 = mod_bessel_k_scaled(2, qr) * decay
    edge = sol.norm_A * bessel_j(1, sol.h * a)
    transverse = edge * sol.beta / (2.0 * sol.q)
    ex = transverse * (
        (1 - sol.s) * k0 * np.cos(phi0)
        + (1 + sol.s) * k2 * np.cos(2 * phi - phi0)
    )
    ey = transverse * (
        (1 - sol.s) * k0 * np.sin(phi0)
        + (1 + sol.s) * k2 * np.sin(2 * phi - phi0)
    )
    ez = -sign * 1j * edge * k1 * np.cos(phi - phi0)
    return ex, ey, ez


def mode_field(
    sol: ModeSolution,
    spec: FiberSpec,
    label: ModeLabel,
    r: ArrayLike,
    phi: ArrayLike,
    z: ArrayLike = 0.0,
) -> ComplexField3:
    """
    Electric profile function of a quasi-linear HE11 mode.

    Args:
        sol: Solved mode
        spec: Fiber description
        label: Polarization axis and propagation direction
        r: Radial coordinate(s) in metres, r >= 0
        phi: Azimuth(s) in radians
        z: Axial coordinate(s) in metres

    Returns:
        ComplexField3: Array of shape ``broadcast(r, phi, z) + (3,)`` holding
        (eps_x, eps_y, eps_z), normalized so |eps(0)|^2 = 1
    """
    r, phi, z = np.broadcast_arrays(
        np.asarray(r, dtype=float),
        np.asarray(phi, dtype=float),
        np.asarray(z, dtype=float),
    )
    if np.any(r < 0):
        raise DomainError("Radial coordinate must be non-negative")
    a = spec.radius_a
    phi0 = label.axis.angle
    sign = label.direction.sign
    inside = r < a

    inner = _interior(sol, phi0, sign, np.where(inside, r, 0.0), phi)
    outer = _exterior(sol, a, phi0, sign, np.where(inside, a, r), phi)
    phase = np.exp(sign * 1j * sol.beta * z)
    components = [
        np.where(inside, e_in, e_out) * phase
        for e_in, e_out in zip(inner, outer)
    ]
    return np.stack(components, axis=-1)


def longitudinal_ratio(
    sol: ModeSolution,
    spec: FiberSpec,
    phi: ArrayLike,
    r: float | None = None,
) -> NDArray[np.float64] | float:
    """
    Ratio |eps_z| / |eps_y| of the y-polarized mode outside the fiber.

    Uses the closed form
    (2q/beta) |sin phi| K1(qr) / |(1-s) K0(qr) - (1+s) K2(qr) cos 2phi|.

    Args:
        sol: Solved mode
        spec: Fiber description
        phi: Azimuth(s) in radians
        r: Radius in metres, defaults to the fiber surface

    Returns:
        Ratio at each azimuth

    Raises:
        DomainError: When r lies inside the fiber
    """
    r = spec.radius_a if r is None else r
    if r < spec.radius_a * (1.0 - 1e-12):
        raise DomainError("Longitudinal ratio is defined for r >= a")
    phi = np.asarray(phi, dtype=float)
    qr = sol.q * r
    k0 = mod_bessel_k_scaled(0, qr)
    k1 = mod_bessel_k_scaled(1, qr)
    k2 = mod_bessel_k_scaled(2, qr)
    denominator = np.abs(
        (1 - sol.s) * k0 - (1 + sol.s) * k2 * np.cos(2 * phi)
    )
    return 2 * sol.q / sol.beta * np.abs(np.sin(phi)) * k1 / denominator


def max_longitudinal_ratio(
    sol: ModeSolution, spec: FiberSpec, samples: int = 18_001
) -> tuple[float, float]:
    """
    Largest surface ratio over azimuth.

    Returns:
        tuple[float, float]: (ratio, azimuth in radians)
    """
    phi = np.linspace(0.0, np.pi, samples)
    ratios = longitudinal_ratio(sol, spec, phi)
    best = int(np.argmax(ratios))
    return float(ratios[best]), float(phi[best])


def longitudinal_ratio_sweep(
    radii: ArrayLike, wavelength: float, n2: float = 1.0
) -> NDArray[np.float64]:
    """Surface ratio at phi = 90 deg for silica fibers of several radii."""
    ratios = []
    for radius in np.atleast_1d(np.asarray(radii, dtype=float)):
        spec = FiberSpec.silica(float(radius), wavelength, n2)
        sol = solve_he11(spec)
        ratios.append(float(longitudinal_ratio(sol, spec, 0.5 * np.pi)))
    return np.asarray(ratios)


def find_circular_point(sol: ModeSolution, spec: FiberSpec) -> float:
    """
    Radius inside the fiber where the y-mode is circularly polarized.

    Searches the phi = 90 deg meridian for |eps_z| = |eps_y| using the
    interior profile functions.

    Returns:
        float: Radius r* in metres, 0 < r* < a

    Raises:
        CircularPointNotFoundError: When |eps_z| never reaches |eps_y|
    """
    a = spec.radius_a
    half_pi = 0.5 * np.pi

    def imbalance(r: float) -> float:
        _, ey, ez = _interior(sol, half_pi, 1, r, half_pi)
        return float(abs(ez) - abs(ey))

    if imbalance(a) <= 0.0:
        raise CircularPointNotFoundError(
            "Longitudinal component stays below the transverse one inside "
            "the fiber"
        )
    return float(bisect(imbalance, 0.0, a, xtol=1e-12 * a))
