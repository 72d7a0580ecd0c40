import numpy as np
import pytest

from nanochiral.dataset import FluxDataset
from nanochiral.exceptions import DatasetFormatError, DomainError


@pytest.fixture
def dataset():
    return FluxDataset.from_grid(
        [0.0, 90.0],
        [0.0, 45.0, 90.0],
        [[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]],
        [[1.0, 1.0, 1.0], [0.0, 5.0, 2.0]],
        metadata={"model": "unperturbed"},
    )


def test_from_grid_is_row_major(dataset):
    np.testing.assert_array_equal(dataset.phi_deg, [0, 0, 0, 90, 90, 90])
    np.testing.assert_array_equal(dataset.theta_deg, [0, 45, 90, 0, 45, 90])
    np.testing.assert_array_equal(dataset.c_plus, [1, 2, 3, 4, 5, 6])
    np.testing.assert_array_equal(dataset.azimuths, [0, 90])
    np.testing.assert_array_equal(dataset.wave_plate_angles, [0, 45, 90])


def test_directionality_column(dataset):
    np.testing.assert_allclose(
        dataset.directionality, [0.0, 1 / 3, 0.5, 1.0, 0.0, 0.5]
    )


def test_subset(dataset):
    top = dataset.subset(dataset.phi_deg == 90)
    assert len(top) == 3
    assert top.metadata == {"model": "unperturbed"}


@pytest.mark.parametrize(
    "columns",
    [
        ([0, 1], [0], [1, 1], [1, 1]),
        ([], [], [], []),
        ([0], [0], [-1], [1]),
        ([0, 0], [5, 5], [1, 1], [1, 1]),
    ],
)
def test_invalid_datasets(columns):
    with pytest.raises(DomainError):
        FluxDataset(*columns)


def test_csv_round_trip(dataset, tmp_path):
    path = dataset.to_csv(tmp_path / "out" / "flux.csv")
    header = path.read_text().splitlines()[0]
    assert header == "phi_deg,theta_deg,c_plus,c_minus,directionality"
    loaded = FluxDataset.read_csv(path)
    for column in ("phi_deg", "theta_deg", "c_plus", "c_minus"):
        np.testing.assert_array_equal(
            getattr(loaded, column), getattr(dataset, column)
        )
    assert loaded.metadata["source"] == str(path)
    assert not list(path.parent.glob(".*.tmp"))


def test_csv_without_directionality(tmp_path):
    path = tmp_path / "export.csv"
    path.write_text("phi_deg,theta_deg,c_plus,c_minus\n90,45,10,2\n")
    loaded = FluxDataset.read_csv(path)
    assert loaded.directionality[0] == pytest.approx(2 / 3)


def test_csv_missing_column(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("phi_deg,theta_deg,c_plus\n0,0,1\n")
    with pytest.raises(DatasetFormatError) as error:
        FluxDataset.read_csv(path)
    assert error.value.column == "c_minus"


def test_csv_bad_value_reports_row(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text(
        "phi_deg,theta_deg,c_plus,c_minus\n0,0,1,1\n0,5,oops,1\n"
    )
    with pytest.raises(DatasetFormatError) as error:
        FluxDataset.read_csv(path)
    assert error.value.row == 2
    assert error.value.column == "c_plus"


def test_csv_negative_rate(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("phi_deg,theta_deg,c_plus,c_minus\n0,0,1,-3\n")
    with pytest.raises(DatasetFormatError):
        FluxDataset.read_csv(path)


@pytest.mark.parametrize(
    "content",
    ["phi_deg,theta_deg,c_plus,c_minus\n", "phi_deg,theta_deg,c_plus,c_minus"],
)
def test_csv_without_rows(tmp_path, content):
    path = tmp_path / "empty.csv"
    path.write_text(content)
    with pytest.raises(DatasetFormatError):
        FluxDataset.read_csv(path)


def test_csv_duplicate_nodes(tmp_path):
    path = tmp_path / "dup.csv"
    path.write_text("phi_deg,theta_deg,c_plus,c_minus\n0,0,1,1\n0,0,2,2\n")
    with pytest.raises(DatasetFormatError):
        FluxDataset.read_csv(path)


def test_missing_file(tmp_path):
    with pytest.raises(DatasetFormatError):
        FluxDataset.read_csv(tmp_path / "absent.csv")
