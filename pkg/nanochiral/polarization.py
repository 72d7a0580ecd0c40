"""
Polarization states of the excitation beam and overlap functionals.

States are complex unit 3-vectors (jx, jy, jz) with the quantization axis
along +x, the direction opposite to beam propagation.
"""

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .exceptions import DegenerateFieldError, UnknownPolarizationError

PolState3 = NDArray[np.complex128]

# Sign of the quarter-wave retardance, fixed so that a 45 deg fast axis
# turns z-linear input into sigma-.
QWP_RETARDANCE = -0.5 * np.pi

_SQRT_HALF = np.sqrt(0.5)

SIGMA_PLUS = np.array([0.0, _SQRT_HALF, 1j * _SQRT_HALF], dtype=complex)
SIGMA_MINUS = np.array([0.0, -_SQRT_HALF, 1j * _SQRT_HALF], dtype=complex)
PI = np.array([1.0, 0.0, 0.0], dtype=complex)


def sigma_basis() -> tuple[PolState3, PolState3, PolState3]:
    """
    Circular and linear basis relative to the x axis.

    Returns:
        tuple: (sigma+, sigma-, pi) with sigma+- = (i e_z +- e_y)/sqrt(2)
        and pi = e_x
    """
    return SIGMA_PLUS.copy(), SIGMA_MINUS.copy(), PI.copy()


def inner_product(u: ArrayLike, v: ArrayLike) -> NDArray[np.complex128]:
    """Hermitian product sum(u * conj(v)) over the last axis."""
    return np.sum(np.asarray(u) * np.conj(np.asarray(v)), axis=-1)


def qwp_state(theta: ArrayLike) -> PolState3:
    """
    Beam polarization after the quarter-wave plate.

    The input is linear along z. The plate acts in the (e_y, e_z) plane as
    R(theta) diag(1, exp(i delta)) R(-theta).

    Args:
        theta: Fast-axis angle(s) from the y axis in degrees

    Returns:
        PolState3: Array of shape ``theta.shape + (3,)`` with jx = 0
    """
    angle = np.deg2rad(np.asarray(theta, dtype=float))
    c, s = np.cos(angle), np.sin(angle)
    retarded = np.exp(1j * QWP_RETARDANCE)
    jy = c * s * (1.0 - retarded)
    jz = s * s + c * c * retarded
    return np.stack([np.zeros_like(jy), jy, jz], axis=-1)


def polarization_by_name(name: str) -> PolState3:
    """
    Look up a polarization state.

    Args:
        name: ``sigma_plus``, ``sigma_minus``, ``pi`` or ``qwp:<theta>``

    Returns:
        PolState3: Unit state vector

    Raises:
        UnknownPolarizationError: When the name is not recognised
    """
    key = name.strip().lower()
    if key.startswith("qwp:"):
        try:
            return qwp_state(float(key[4:]))
        except ValueError:
            raise UnknownPolarizationError(f"Unknown polarization: {name!r}")
    key = key.replace("-", "_")
    named = {
        "sigma_plus": SIGMA_PLUS,
        "sigma+": SIGMA_PLUS,
        "sigma_minus": SIGMA_MINUS,
        "sigma_": SIGMA_MINUS,
        "pi": PI,
    }
    if key in named:
        return named[key].copy()
    raise UnknownPolarizationError(f"Unknown polarization: {name!r}")


def overlap_fraction(field: ArrayLike, pol: ArrayLike) -> NDArray[np.float64]:
    """
    Fraction of a field's intensity carried by a polarization state.

    Computes |field . conj(pol)|^2 / |field|^2 over the last axis.

    Args:
        field: Complex field(s), last axis of length 3
        pol: Unit polarization state(s), broadcastable against ``field``

    Returns:
        Overlap in [0, 1]

    Raises:
        DegenerateFieldError: When any field has zero norm
    """
    field = np.asarray(field, dtype=complex)
    norm = np.sum(np.abs(field) ** 2, axis=-1)
    if np.any(norm == 0.0):
        raise DegenerateFieldError("Overlap of a zero field is undefined")
    return np.abs(inner_product(field, pol)) ** 2 / norm


def overlap_from_ratio(rho: ArrayLike) -> NDArray[np.float64]:
    """
    Circular overlap of a field with quadrature components of ratio rho.

    (1 + rho)^2 / (2 (1 + rho^2))
    """
    rho = np.asarray(rho, dtype=float)
    return (1.0 + rho) ** 2 / (2.0 * (1.0 + rho**2))
