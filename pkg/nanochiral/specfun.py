"""
Cylinder special functions used by the mode and scattering formulas.

Thin, domain-checked wrappers around :mod:`scipy.special`. Every function
accepts scalars or numpy arrays for ``x`` and a non-negative integer order.
"""

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import special

from .exceptions import DomainError


def _check_order(n: int) -> int:
    if int(n) != n or n < 0:
        raise DomainError(f"Order must be a non-negative integer, got {n}")
    return int(n)


def _as_real(x: ArrayLike, positive: bool, name: str) -> NDArray[np.float64]:
    values = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(values)):
        raise DomainError(f"{name} requires finite arguments")
    if positive and np.any(values <= 0.0):
        raise DomainError(f"{name} is defined for x > 0 only")
    if not positive and np.any(values < 0.0):
        raise DomainError(f"{name} is defined for x >= 0 only")
    return values


def bessel_j(n: int, x: ArrayLike) -> NDArray[np.float64] | float:
    """
    Bessel function of the first kind J_n(x).

    Args:
        n: Non-negative integer order
        x: Argument(s), x >= 0

    Returns:
        J_n evaluated at ``x``
    """
    n = _check_order(n)
    return special.jv(n, _as_real(x, False, "bessel_j"))


def bessel_j_prime(n: int, x: ArrayLike) -> NDArray[np.float64] | float:
    """Derivative J_n'(x) from the three-term identity."""
    n = _check_order(n)
    x = _as_real(x, False, "bessel_j_prime")
    if n == 0:
        return -special.jv(1, x)
    return 0.5 * (special.jv(n - 1, x) - special.jv(n + 1, x))


def bessel_y(n: int, x: ArrayLike) -> NDArray[np.float64] | float:
    """
    Bessel function of the second kind Y_n(x).

    Raises:
        DomainError: When any x <= 0
    """
    n = _check_order(n)
    return special.yv(n, _as_real(x, True, "bessel_y"))


def mod_bessel_i(n: int, x: ArrayLike) -> NDArray[np.float64] | float:
    """Modified Bessel function of the first kind I_n(x)."""
    n = _check_order(n)
    return special.iv(n, _as_real(x, False, "mod_bessel_i"))


def mod_bessel_i_prime(n: int, x: ArrayLike) -> NDArray[np.float64] | float:
    """Derivative I_n'(x) = (I_{n-1} + I_{n+1}) / 2."""
    n = _check_order(n)
    x = _as_real(x, False, "mod_bessel_i_prime")
    if n == 0:
        return special.iv(1, x)
    return 0.5 * (special.iv(n - 1, x) + special.iv(n + 1, x))


def mod_bessel_k(n: int, x: ArrayLike) -> NDArray[np.float64] | float:
    """
    Modified Bessel function of the second kind K_n(x).

    Raises:
        DomainError: When any x <= 0
    """
    n = _check_order(n)
    return special.kv(n, _as_real(x, True, "mod_bessel_k"))


def mod_bessel_k_prime(n: int, x: ArrayLike) -> NDArray[np.float64] | float:
    """Derivative K_n'(x) = -(K_{n-1} + K_{n+1}) / 2, with K_{-1} = K_1."""
    n = _check_order(n)
    x = _as_real(x, True, "mod_bessel_k_prime")
    return -0.5 * (special.kv(abs(n - 1), x) + special.kv(n + 1, x))


def mod_bessel_k_scaled(n: int, x: ArrayLike) -> NDArray[np.float64] | float:
    """Exponentially scaled K_n(x) * exp(x), for ratios at large x."""
    n = _check_order(n)
    return special.kve(n, _as_real(x, True, "mod_bessel_k_scaled"))


def hankel1(n: int, x: ArrayLike) -> NDArray[np.complex128] | complex:
    """
    Hankel function of the first kind H_n^(1)(x) = J_n(x) + i Y_n(x).

    Raises:
        DomainError: When any x <= 0
    """
    n = _check_order(n)
    x = _as_real(x, True, "hankel1")
    return special.jv(n, x) + 1j * special.yv(n, x)


def hankel1_prime(n: int, x: ArrayLike) -> NDArray[np.complex128] | complex:
    """Derivative of H_n^(1) with respect to its argument."""
    n = _check_order(n)
    x = _as_real(x, True, "hankel1_prime")
    if n == 0:
        return -(special.jv(1, x) + 1j * special.yv(1, x))
    below = special.jv(n - 1, x) + 1j * special.yv(n - 1, x)
    above = special.jv(n + 1, x) + 1j * special.yv(n + 1, x)
    return 0.5 * (below - above)
