import pytest

from nanochiral.api import ChiralCoupler
from nanochiral.config import RunConfig, load_config, parse_assignments
from nanochiral.exceptions import ConfigError
from nanochiral.incident import IncidentModel
from nanochiral.scattering import EvaluationPoint


def test_packaged_defaults_match_dataclass():
    assert load_config() == RunConfig()


def test_defaults_describe_the_experiment():
    config = load_config()
    assert config.fiber_radius == 157.5e-9
    assert config.n1 is None
    assert config.particle_radial is None
    assert config.phi_grid == tuple(float(p) for p in range(0, 360, 30))
    assert config.model is IncidentModel.UNPERTURBED
    assert config.point is EvaluationPoint.CENTER
    assert len(config.theta_grid()) == 72
    assert config.fiber_spec().n1 == pytest.approx(1.4607, abs=1e-4)


def test_overrides_are_typed():
    config = load_config(
        overrides=[
            "kappa_f = 1e7",
            "weighted=yes",
            "phi_grid=0, 90",
            "n1=1.5",
            "map_resolution=11",
            "incident_model=cylinder_modified",
        ]
    )
    assert config.kappa_f == 1e7
    assert config.weighted is True
    assert config.phi_grid == (0.0, 90.0)
    assert config.fiber_spec().n1 == 1.5
    assert config.map_resolution == 11
    assert config.model is IncidentModel.CYLINDER_MODIFIED


def test_config_file_with_comments(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text(
        "# custom run\n"
        "fiber_radius = 200e-9  # thicker fiber\n"
        "\n"
        "particle_radial = 260e-9\n"
        "n1 = sellmeier\n"
    )
    config = load_config(path, ["seed=4"])
    assert config.fiber_radius == 200e-9
    assert config.particle_radial == 260e-9
    assert config.n1 is None
    assert config.seed == 4


@pytest.mark.parametrize(
    "line, key",
    [
        ("bogus = 1", "bogus"),
        ("kappa_f = lots", "kappa_f"),
        ("weighted = maybe", "weighted"),
        ("map_resolution = 1.5", "map_resolution"),
    ],
)
def test_bad_assignments(line, key):
    with pytest.raises(ConfigError) as error:
        parse_assignments([line])
    assert error.value.key == key


def test_line_without_assignment():
    with pytest.raises(ConfigError):
        parse_assignments(["fiber_radius"])


@pytest.mark.parametrize(
    "override, key",
    [
        ("fiber_radius=-1e-9", "fiber_radius"),
        ("n1=0.9", "fiber_radius"),
        ("kappa_f=-5", "kappa_f"),
        ("detection_efficiency=1.5", "beam_power"),
        ("evaluation_point=edge", "evaluation_point"),
        ("particle_radial=100e-9", "particle_radial"),
        ("incident_model=mie", "incident_model"),
        ("mode_label=z+", "mode_label"),
        ("polarization=elliptic", "polarization"),
        ("theta_step=0", "theta_step"),
        ("map_resolution=1", "map_resolution"),
        ("noise_rel=-0.5", "noise_rel"),
    ],
)
def test_invalid_values(override, key):
    with pytest.raises(ConfigError) as error:
        load_config(overrides=[override])
    assert error.value.key == key


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "absent.cfg")


def test_coupler_validates_config():
    with pytest.raises(ConfigError):
        ChiralCoupler(RunConfig(particle_radius=0.0))
