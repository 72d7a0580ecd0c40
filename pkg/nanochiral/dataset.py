"""
Photon-flux datasets and their CSV form.

A dataset holds both detector count rates on a grid of particle azimuths
(phi) and wave-plate angles (theta), row-major in phi then theta.
"""

import csv
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
from loguru import logger
from numpy.typing import ArrayLike, NDArray

from .exceptions import DatasetFormatError, DomainError

COLUMNS = ("phi_deg", "theta_deg", "c_plus", "c_minus", "directionality")
FLOAT_FORMAT = ".17e"


def _directionality(c_plus: NDArray, c_minus: NDArray) -> NDArray:
    total = c_plus + c_minus
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(total > 0, (c_plus - c_minus) / total, np.nan)


@dataclass(eq=False)
class FluxDataset:
    """
    Count rates of the +z (left) and -z (right) detectors.

    Angles in degrees, rates in counts/s. ``metadata`` carries free-form
    context such as the background flux used to generate the data.
    """

    phi_deg: NDArray[np.float64]
    theta_deg: NDArray[np.float64]
    c_plus: NDArray[np.float64]
    c_minus: NDArray[np.float64]
    metadata: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        self.phi_deg = np.asarray(self.phi_deg, dtype=float).ravel()
        self.theta_deg = np.asarray(self.theta_deg, dtype=float).ravel()
        self.c_plus = np.asarray(self.c_plus, dtype=float).ravel()
        self.c_minus = np.asarray(self.c_minus, dtype=float).ravel()
        sizes = {
            len(self.phi_deg),
            len(self.theta_deg),
            len(self.c_plus),
            len(self.c_minus),
        }
        if len(sizes) != 1:
            raise DomainError("Dataset columns differ in length")
        if len(self.phi_deg) == 0:
            raise DomainError("Dataset is empty")
        if np.any(self.c_plus < 0) or np.any(self.c_minus < 0):
            raise DomainError("Count rates must be non-negative")
        nodes = set(zip(self.phi_deg.tolist(), self.theta_deg.tolist()))
        if len(nodes) != len(self.phi_deg):
            raise DomainError("Dataset grid nodes are not unique")

    @classmethod
    def from_grid(
        cls,
        phi_grid: ArrayLike,
        theta_grid: ArrayLike,
        c_plus: ArrayLike,
        c_minus: ArrayLike,
        metadata: dict[str, Any] | None = None,
    ) -> "FluxDataset":
        """
        Build a dataset from rates of shape ``(len(phi), len(theta))``.
        """
        phi_grid = np.asarray(phi_grid, dtype=float)
        theta_grid = np.asarray(theta_grid, dtype=float)
        phi, theta = np.meshgrid(phi_grid, theta_grid, indexing="ij")
        shape = phi.shape
        c_plus = np.broadcast_to(np.asarray(c_plus, dtype=float), shape)
        c_minus = np.broadcast_to(np.asarray(c_minus, dtype=float), shape)
        return cls(phi, theta, c_plus, c_minus, dict(metadata or {}))

    def __len__(self) -> int:
        return len(self.phi_deg)

    @property
    def directionality(self) -> NDArray[np.float64]:
        """Per-node (c+ - c-) / (c+ + c-); NaN where both rates vanish."""
        return _directionality(self.c_plus, self.c_minus)

    @property
    def azimuths(self) -> NDArray[np.float64]:
        return np.unique(self.phi_deg)

    @property
    def wave_plate_angles(self) -> NDArray[np.float64]:
        return np.unique(self.theta_deg)

    def subset(self, mask: ArrayLike) -> "FluxDataset":
        """Rows selected by a boolean mask."""
        mask = np.asarray(mask, dtype=bool)
        return FluxDataset(
            self.phi_deg[mask],
            self.theta_deg[mask],
            self.c_plus[mask],
            self.c_minus[mask],
            dict(self.metadata),
        )

    def to_csv(self, path: str | Path) -> Path:
        """
        Write the dataset atomically.

        The file is first written next to ``path`` and then renamed, so an
        interrupted write never leaves a partial file behind.

        Args:
            path: Destination file

        Returns:
            Path: The written file
        """
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        rows = zip(
            self.phi_deg,
            self.theta_deg,
            self.c_plus,
            self.c_minus,
            self.directionality,
        )
        write_rows_atomic(
            path,
            COLUMNS,
            ([format(v, FLOAT_FORMAT) for v in row] for row in rows),
        )
        logger.debug(f"Wrote {len(self)} flux rows to {path}")
        return path

    @classmethod
    def read_csv(cls, path: str | Path) -> "FluxDataset":
        """
        Read a dataset written by :meth:`to_csv` or by an instrument export.

        The directionality column is optional and ignored on read.

        Raises:
            DatasetFormatError: When a column is missing or a value cannot be
                parsed; ``row`` counts data rows from 1
        """
        path = Path(path)
        try:
            handle = path.open(newline="")
        except OSError as e:
            logger.error(f"Cannot open dataset {path}: {e}")
            raise DatasetFormatError(f"Cannot open dataset {path}: {e}")

        with handle:
            reader = csv.DictReader(handle)
            header = reader.fieldnames or []
            for column in COLUMNS[:4]:
                if column not in header:
                    logger.error(f"Dataset {path} lacks column {column!r}")
                    raise DatasetFormatError(
                        f"Missing column {column!r}", row=0, column=column
                    )
            values: dict[str, list[float]] = {c: [] for c in COLUMNS[:4]}
            for row_number, row in enumerate(reader, start=1):
                for column in COLUMNS[:4]:
                    raw = row.get(column)
                    try:
                        value = float(raw)
                    except (TypeError, ValueError):
                        logger.error(
                            f"Bad value {raw!r} in {path}, row {row_number}"
                        )
                        raise DatasetFormatError(
                            f"Row {row_number}: column {column!r} has "
                            f"unparsable value {raw!r}",
                            row=row_number,
                            column=column,
                        )
                    if not np.isfinite(value) or (
                        column.startswith("c_") and value < 0
                    ):
                        raise DatasetFormatError(
                            f"Row {row_number}: column {column!r} has "
                            f"invalid value {value}",
                            row=row_number,
                            column=column,
                        )
                    values[column].append(value)

        if not values["phi_deg"]:
            raise DatasetFormatError(f"Dataset {path} has no rows", row=0)
        try:
            return cls(
                values["phi_deg"],
                values["theta_deg"],
                values["c_plus"],
                values["c_minus"],
                {"source": str(path)},
            )
        except DomainError as e:
            raise DatasetFormatError(f"Dataset {path}: {e}")


def write_rows_atomic(path: Path, header, rows) -> None:
    """Write CSV rows to a temporary sibling file, then rename it."""
    descriptor, temporary = tempfile.mkstemp(
        dir=path.parent, prefix=f".{path.name}.", suffix=".tmp"
    )
    try:
        with os.fdopen(descriptor, "w", newline="") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(rows)
        os.replace(temporary, path)
    except BaseException:
        Path(temporary).unlink(missing_ok=True)
        raise
