import numpy as np
import pytest
from scipy import special
from scipy.optimize import bisect

from nanochiral.exceptions import DomainError, ModeSolverError
from nanochiral.fiber_modes import (
    Axis,
    Direction,
    FiberSpec,
    ModeLabel,
    dispersion_residual,
    find_circular_point,
    is_single_mode,
    longitudinal_ratio,
    longitudinal_ratio_sweep,
    max_longitudinal_ratio,
    mode_field,
    sellmeier_index,
    solve_he11,
    v_number,
)
from nanochiral.polarization import overlap_fraction, sigma_basis

Y_PLUS = ModeLabel(Axis.Y, Direction.PLUS)
Y_MINUS = ModeLabel(Axis.Y, Direction.MINUS)
# |eps_z| / |eps_y| at the top of the 315 nm fiber, exact HE11 fields
SURFACE_RATIO = 0.5793


def _he11_mismatch(spec, beta):
    """HE11 branch of the eigenvalue equation, written out independently."""
    n1, n2, a, k0 = spec.n1, spec.n2, spec.radius_a, spec.k0
    ha = a * np.sqrt(n1**2 * k0**2 - beta**2)
    qa = a * np.sqrt(beta**2 - n2**2 * k0**2)
    kp = special.kvp(1, qa) / (qa * special.kv(1, qa))
    lhs = special.jv(0, ha) / (ha * special.jv(1, ha))
    root = np.sqrt(
        ((n1**2 - n2**2) / (2 * n1**2)) ** 2 * kp**2
        + (beta / (n1 * k0)) ** 2 * (1 / qa**2 + 1 / ha**2) ** 2
    )
    rhs = -(n1**2 + n2**2) / (2 * n1**2) * kp + 1 / ha**2 - root
    return lhs - rhs


def test_sellmeier_silica_at_532():
    assert sellmeier_index(532e-9) == pytest.approx(1.4607, abs=1e-4)


def test_sellmeier_out_of_range():
    with pytest.raises(DomainError):
        sellmeier_index(3e-6)


def test_v_number_single_mode(spec):
    assert v_number(spec) == pytest.approx(1.98, abs=0.01)
    assert is_single_mode(spec)


def test_large_fiber_is_multimode():
    assert not is_single_mode(FiberSpec.silica(1e-6, 532e-9))


@pytest.mark.parametrize(
    "kwargs",
    [
        {"radius_a": 0.0, "wavelength": 532e-9, "n1": 1.46},
        {"radius_a": 1e-7, "wavelength": -1.0, "n1": 1.46},
        {"radius_a": 1e-7, "wavelength": 532e-9, "n1": 1.2, "n2": 1.33},
        {"radius_a": 1e-7, "wavelength": 532e-9, "n1": 1.46, "n2": 0.9},
    ],
)
def test_fiber_spec_validation(kwargs):
    with pytest.raises(DomainError):
        FiberSpec(**kwargs)


def test_mode_label_parse():
    assert ModeLabel.parse("y+") == Y_PLUS
    assert ModeLabel.parse(" X- ") == ModeLabel(Axis.X, Direction.MINUS)
    assert ModeLabel.parse("y,minus") == Y_MINUS
    for bad in ("", "z+", "y", "y*"):
        with pytest.raises(DomainError):
            ModeLabel.parse(bad)


def test_he11_solution(spec, sol):
    assert spec.n2 < sol.beta / spec.k0 < spec.n1
    assert abs(dispersion_residual(spec, sol.beta)) <= 1e-10
    assert sol.h > 0 and sol.q > 0
    assert sol.single_mode
    np.testing.assert_allclose(
        (sol.h**2 + sol.q**2) * spec.radius_a**2, sol.v_number**2, rtol=1e-10
    )


def _scan_and_bisect(spec, points=20001):
    """Largest-beta sign change of the independent relation, refined."""
    grid = np.linspace(spec.n2 * spec.k0, spec.n1 * spec.k0, points)[1:-1]
    values = _he11_mismatch(spec, grid)
    flips = np.nonzero(np.sign(values[:-1]) != np.sign(values[1:]))[0]
    i = flips[-1]
    return bisect(
        lambda beta: _he11_mismatch(spec, beta), grid[i], grid[i + 1], xtol=1e-7
    )


def test_he11_matches_independent_relation(spec, sol):
    assert abs(_he11_mismatch(spec, sol.beta)) < 1e-7
    assert sol.beta == pytest.approx(_scan_and_bisect(spec), rel=1e-9)


def test_index_matched_fiber_has_no_mode():
    with pytest.raises(ModeSolverError):
        solve_he11(FiberSpec(157.5e-9, 532e-9, 1.0, 1.0))


def test_thick_fiber_beta_approaches_core_index():
    spec = FiberSpec.silica(10 * 532e-9, 532e-9)
    sol = solve_he11(spec)
    assert sol.beta / spec.k0 == pytest.approx(spec.n1, abs=1e-3)


def test_profile_normalized_on_axis(spec, sol):
    for label in (Y_PLUS, ModeLabel(Axis.X, Direction.MINUS)):
        eps = mode_field(sol, spec, label, 0.0, 0.3)
        assert np.sum(np.abs(eps) ** 2) == pytest.approx(1.0, rel=1e-12)


def test_profile_shape_broadcasts(spec, sol):
    r = np.linspace(0, 2 * spec.radius_a, 5)[:, None]
    phi = np.linspace(0, np.pi, 7)[None, :]
    assert mode_field(sol, spec, Y_PLUS, r, phi).shape == (5, 7, 3)


def test_profile_rejects_negative_radius(spec, sol):
    with pytest.raises(DomainError):
        mode_field(sol, spec, Y_PLUS, -1e-9, 0.0)


def _polar(eps, phi):
    er = eps[..., 0] * np.cos(phi) + eps[..., 1] * np.sin(phi)
    ephi = -eps[..., 0] * np.sin(phi) + eps[..., 1] * np.cos(phi)
    return er, ephi, eps[..., 2]


def test_boundary_continuity(spec, sol):
    a = spec.radius_a
    phi = np.linspace(0.1, 2 * np.pi, 17)
    for label in (Y_PLUS, ModeLabel(Axis.X, Direction.PLUS)):
        er_in, ephi_in, ez_in = _polar(
            mode_field(sol, spec, label, a * (1 - 1e-13), phi), phi
        )
        er_out, ephi_out, ez_out = _polar(
            mode_field(sol, spec, label, a, phi), phi
        )
        np.testing.assert_allclose(ez_in, ez_out, atol=1e-9)
        np.testing.assert_allclose(ephi_in, ephi_out, atol=1e-6)
        np.testing.assert_allclose(
            spec.n1**2 * er_in, spec.n2**2 * er_out, atol=1e-6
        )


def test_direction_swap_conjugates_profile(spec, sol):
    r = np.array([0.5, 1.0, 1.4]) * spec.radius_a
    phi = np.array([0.2, 1.6, 4.0])
    np.testing.assert_allclose(
        mode_field(sol, spec, Y_MINUS, r, phi),
        np.conj(mode_field(sol, spec, Y_PLUS, r, phi)),
        atol=1e-14,
    )


def test_mirror_symmetric_intensity(spec, sol):
    phi = np.linspace(0, np.pi, 13)
    r = 1.2 * spec.radius_a
    upper = np.abs(mode_field(sol, spec, Y_PLUS, r, phi)) ** 2
    lower = np.abs(mode_field(sol, spec, Y_PLUS, r, -phi)) ** 2
    np.testing.assert_allclose(upper, lower, atol=1e-14)


def test_evanescent_decay(spec, sol):
    radii = np.array([1.0, 1.5, 2.0, 3.0]) * spec.radius_a
    intensity = np.sum(
        np.abs(mode_field(sol, spec, Y_PLUS, radii, np.pi / 2)) ** 2, axis=-1
    )
    assert np.all(np.diff(intensity) < 0)


def test_axial_phase(spec, sol):
    z = 0.25 * 2 * np.pi / sol.beta
    at_zero = mode_field(sol, spec, Y_PLUS, spec.radius_a, 1.0)
    shifted = mode_field(sol, spec, Y_PLUS, spec.radius_a, 1.0, z)
    np.testing.assert_allclose(shifted, 1j * at_zero, atol=1e-14)


def test_longitudinal_ratio_at_top(spec, sol):
    assert longitudinal_ratio(sol, spec, np.pi / 2) == pytest.approx(
        SURFACE_RATIO, abs=1e-3
    )


def test_longitudinal_ratio_matches_profile(spec, sol):
    phi = np.linspace(0.1, 3.0, 9)
    eps = mode_field(sol, spec, Y_PLUS, spec.radius_a, phi)
    np.testing.assert_allclose(
        longitudinal_ratio(sol, spec, phi),
        np.abs(eps[:, 2]) / np.abs(eps[:, 1]),
        rtol=1e-10,
    )


def test_longitudinal_ratio_maximum(spec, sol):
    ratio, phi = max_longitudinal_ratio(sol, spec)
    assert ratio == pytest.approx(SURFACE_RATIO, abs=1e-3)
    assert phi == pytest.approx(np.pi / 2, abs=1e-3)


def test_longitudinal_ratio_inside_fiber(spec, sol):
    with pytest.raises(DomainError):
        longitudinal_ratio(sol, spec, 1.0, r=0.5 * spec.radius_a)


def test_longitudinal_ratio_grows_with_radius():
    ratios = longitudinal_ratio_sweep([150e-9, 200e-9, 300e-9], 532e-9)
    assert np.all(np.diff(ratios) > 0)


@pytest.mark.parametrize("wavelengths", [10, 40])
def test_longitudinal_ratio_thick_fiber_limit(wavelengths):
    (ratio,) = longitudinal_ratio_sweep([wavelengths * 532e-9], 532e-9)
    n1 = sellmeier_index(532e-9)
    assert ratio == pytest.approx(np.sqrt(1 - 1 / n1**2), abs=0.005)


def test_circular_point(spec, sol):
    a = spec.radius_a
    r_star = find_circular_point(sol, spec)
    assert 0 < r_star < a

    radii = np.linspace(0, a, 20001)
    eps = mode_field(sol, spec, Y_PLUS, radii, np.pi / 2)
    gap = np.abs(eps[:, 2]) - np.abs(eps[:, 1])
    i = int(np.nonzero(np.diff(np.sign(gap)))[0][0])
    scan = radii[i] - gap[i] * (radii[i + 1] - radii[i]) / (
        gap[i + 1] - gap[i]
    )
    assert r_star == pytest.approx(scan, abs=1e-6 * a)

    local = mode_field(sol, spec, Y_PLUS, r_star, np.pi / 2)
    overlaps = [overlap_fraction(local, state) for state in sigma_basis()[:2]]
    assert max(overlaps) == pytest.approx(1.0, abs=1e-9)
