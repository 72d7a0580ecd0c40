import csv
import json
from functools import partial

import numpy as np
import pytest

from nanochiral import api, fitting
from nanochiral.cli import (
    EXIT_CONFIG,
    EXIT_DATASET,
    EXIT_FIT,
    EXIT_OK,
    build_parser,
    main,
)

SMALL_MAP = ["--set", "map_resolution=5"]
COARSE_THETA = ["--set", "theta_step=10"]


def _rows(path):
    with open(path, newline="") as handle:
        return list(csv.DictReader(handle))


def test_modes_report(tmp_path):
    out = tmp_path / "modes.json"
    assert main(["modes", "-o", str(out)]) == EXIT_OK
    report = json.loads(out.read_text())
    assert report["single_mode"] is True
    assert report["V"] == pytest.approx(1.98, abs=0.01)
    assert report["max_longitudinal_ratio"] == pytest.approx(0.5793, abs=1e-3)
    assert report["surface_top_sigma_minus_overlap"] == pytest.approx(
        0.93, abs=0.01
    )
    assert 0 < report["circular_point_r"] < report["radius_a"]


def test_default_output_directory(tmp_path):
    args = ["modes", "--set", f"output_dir={tmp_path}"]
    assert main(args) == EXIT_OK
    assert (tmp_path / "modes.json").exists()


def test_overlap_map(tmp_path):
    out = tmp_path / "overlap.csv"
    args = ["overlap-map", "--mode", "y-", "--pol", "sigma_plus"]
    args += ["-o", str(out)]
    assert main(args + SMALL_MAP) == EXIT_OK
    rows = _rows(out)
    assert len(rows) == 25
    assert set(rows[0]) == {"x", "y", "overlap"}
    assert all(0 <= float(row["overlap"]) <= 1 + 1e-12 for row in rows)


@pytest.mark.parametrize("model", ["unperturbed", "cylinder_modified"])
def test_field_map(tmp_path, model):
    out = tmp_path / "field.csv"
    args = ["field-map", "--model", model, "--pol", "qwp:45", "-o", str(out)]
    assert main(args + SMALL_MAP) == EXIT_OK
    rows = _rows(out)
    assert len(rows) == 25
    intensities = [float(row["intensity"]) for row in rows]
    if model == "unperturbed":
        assert intensities == pytest.approx([1.0] * 25)
    else:
        assert len(set(intensities)) > 1


def test_flux_map(tmp_path):
    out = tmp_path / "flux.csv"
    args = ["flux-map", "--set", "theta_step=90", "-o", str(out)]
    assert main(args) == EXIT_OK
    assert len(_rows(out)) == 12 * 4


def test_directionality_curves(tmp_path):
    out = tmp_path / "curves.csv"
    args = ["directionality", "--phi", "0,90", "-o", str(out)]
    args += ["--set", "c0=0", "--set", "phi0_offset=0"]
    args += ["--set", "theta_step=15"]
    assert main(args) == EXIT_OK
    rows = _rows(out)
    assert len(rows) == 2 * 24
    nodes = {
        (float(r["phi_deg"]), float(r["theta_deg"])): {
            key: float(r[key])
            for key in ("c_plus", "c_minus", "directionality")
        }
        for r in rows
    }
    assert abs(nodes[(90.0, 45.0)]["directionality"]) == pytest.approx(
        0.86, abs=0.02
    )
    for (phi, theta), node in nodes.items():
        if phi == 0.0:
            assert abs(node["directionality"]) < 1e-9
        if theta < 180.0:
            turned = nodes[(phi, theta + 180.0)]
            for key in ("c_plus", "c_minus"):
                assert turned[key] == pytest.approx(node[key], rel=1e-9)
            assert turned["directionality"] == pytest.approx(
                node["directionality"], abs=1e-9
            )


def test_overlap_map_longitudinal_panel_is_mirror_symmetric(tmp_path):
    out = tmp_path / "pi.csv"
    args = ["overlap-map", "--mode", "y+", "--pol", "pi", "-o", str(out)]
    assert main(args + ["--set", "map_resolution=9"]) == EXIT_OK
    grid = np.array([float(row["overlap"]) for row in _rows(out)])
    grid = grid.reshape(9, 9)
    assert grid.max() > 0.01
    np.testing.assert_allclose(grid, grid[::-1, :], atol=1e-9)


def test_synth_then_fit_recovers_parameters(tmp_path):
    data = tmp_path / "synthetic.csv"
    assert main(["synth", "-o", str(data)] + COARSE_THETA) == EXIT_OK
    out = tmp_path / "fit.json"
    assert main(["fit", str(data), "-o", str(out)]) == EXIT_OK
    result = json.loads(out.read_text())
    assert result["kappa_f"] == pytest.approx(21.9e6, rel=1e-6)
    assert result["phi0_offset"] == pytest.approx(6.3, abs=0.01)
    assert result["std_errors_basis"] == "model-based"
    assert result["cross_section_um2"]["per_detector"] == pytest.approx(
        0.5 * result["cross_section_um2"]["two_detector"]
    )


def test_synth_is_reproducible(tmp_path):
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    for out in (first, second):
        args = ["synth", "--seed", "5", "--noise", "0.02", "-o", str(out)]
        assert main(args + COARSE_THETA) == EXIT_OK
    assert first.read_bytes() == second.read_bytes()


@pytest.mark.parametrize(
    "argv",
    [
        ["modes", "--set", "fiber_radius=-1"],
        ["modes", "--set", "bogus=1"],
        ["flux-map", "--set", "particle_radial=100e-9"],
        ["overlap-map", "--pol", "elliptic"],
        ["overlap-map", "--mode", "q+"],
        ["field-map", "--pol", "pi"],
        ["synth", "--noise", "-1"],
    ],
)
def test_configuration_errors(tmp_path, argv):
    assert main(argv + ["-o", str(tmp_path / "out")]) == EXIT_CONFIG


def test_missing_config_file(tmp_path):
    argv = ["modes", "--config", str(tmp_path / "absent.cfg")]
    assert main(argv) == EXIT_CONFIG


def test_malformed_dataset(tmp_path):
    data = tmp_path / "bad.csv"
    data.write_text("phi_deg,theta_deg,c_plus\n0,0,1\n")
    assert main(["fit", str(data), "-o", str(tmp_path / "f.json")]) == (
        EXIT_DATASET
    )
    assert main(["fit", str(tmp_path / "absent.csv")]) == EXIT_DATASET


def test_fit_on_search_bound(tmp_path, monkeypatch):
    data = tmp_path / "synthetic.csv"
    assert main(["synth", "-o", str(data)] + COARSE_THETA) == EXIT_OK
    monkeypatch.setattr(api, "fit", partial(fitting.fit, bound=2.0))
    out = tmp_path / "fit.json"
    assert main(["fit", str(data), "-o", str(out)]) == EXIT_FIT
    assert not out.exists()


def test_parser_requires_a_command():
    with pytest.raises(SystemExit):
        build_parser().parse_args([])


def test_version(capsys):
    with pytest.raises(SystemExit) as error:
        main(["--version"])
    assert error.value.code == 0
    assert "nanochiral" in capsys.readouterr().out
