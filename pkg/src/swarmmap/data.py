"""Datasets and dissimilarity matrices.

A dataset is a plain matrix of points with optional integer class labels.
The projection engine never sees the points themselves, only a symmetric
nonnegative dissimilarity matrix together with the first and 99th
percentiles of its off-diagonal entries (those two numbers drive the grid
sizing downstream).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ParseError, ValidationError

# Interchange format: floats carry full round-trip precision.
FLOAT_FMT = "%.17g"

LABEL_COLUMN = "label"

SYMMETRY_TOL = 1e-9


@dataclass
class Dataset:
    """Points (n x d), optional length-n integer labels, and a name."""

    points: np.ndarray
    labels: np.ndarray | None = None
    name: str = "dataset"

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=np.float64)
        if self.points.ndim != 2:
            raise ValidationError(f"points must be 2-D, got shape {self.points.shape}")
        n, d = self.points.shape
        if n < 3:
            raise ValidationError(f"need at least 3 points, got {n}")
        if d < 1:
            raise ValidationError("need at least one feature column")
        bad = ~np.isfinite(self.points)
        if bad.any():
            i, j = np.argwhere(bad)[0]
            raise ValidationError(f"non-finite value at row {i}, column {j}")
        if self.labels is not None:
            self.labels = np.asarray(self.labels, dtype=np.int64)
            if self.labels.shape != (n,):
                raise ValidationError(
                    f"labels length {self.labels.shape} does not match {n} points"
                )

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]


@dataclass
class DissimilarityMatrix:
    """Symmetric nonnegative matrix with zero diagonal, plus its spectrum stats.

    ``p01``/``p99`` are the linear-interpolation percentiles of the upper
    triangle (diagonal excluded); they are the only statistics the grid
    sizing needs.
    """

    values: np.ndarray
    p01: float = field(init=False)
    p99: float = field(init=False)

    def __post_init__(self):
        d = np.asarray(self.values, dtype=np.float64)
        if d.ndim != 2 or d.shape[0] != d.shape[1]:
            raise ValidationError(f"dissimilarity matrix must be square, got {d.shape}")
        if d.shape[0] < 2:
            raise ValidationError("dissimilarity matrix needs at least 2 rows")
        bad = ~np.isfinite(d)
        if bad.any():
            i, j = np.argwhere(bad)[0]
            raise ValidationError(f"non-finite entry at ({i}, {j})")
        asym = np.abs(d - d.T)
        if asym.max() > SYMMETRY_TOL:
            i, j = np.unravel_index(np.argmax(asym), asym.shape)
            raise ValidationError(
                f"matrix not symmetric at ({i}, {j}): {d[i, j]!r} vs {d[j, i]!r}"
            )
        if np.abs(np.diag(d)).max() > 0:
            i = int(np.argmax(np.abs(np.diag(d))))
            raise ValidationError(f"nonzero diagonal entry at ({i}, {i})")
        if d.min() < 0:
            i, j = np.unravel_index(np.argmin(d), d.shape)
            raise ValidationError(f"negative entry at ({i}, {j}): {d[i, j]!r}")
        # Force exact symmetry after the tolerance check so downstream code
        # can rely on d[i, j] == d[j, i] bitwise.
        d = (d + d.T) / 2.0
        np.fill_diagonal(d, 0.0)
        self.values = d
        tri = self.upper_triangle()
        self.p01 = float(np.quantile(tri, 0.01))
        self.p99 = float(np.quantile(tri, 0.99))

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def upper_triangle(self) -> np.ndarray:
        iu = np.triu_indices(self.n, k=1)
        return self.values[iu]

    def sizing_p01(self) -> float:
        """p01 with the zero-distance substitution used by grid sizing.

        Duplicate points push p01 to 0, which no grid can resolve; the
        smallest strictly positive distance stands in.  All-zero matrices
        are rejected.
        """
        if self.p01 > 0:
            return self.p01
        tri = self.upper_triangle()
        positive = tri[tri > 0]
        if positive.size == 0:
            raise ValidationError("all pairwise dissimilarities are zero")
        return float(positive.min())


def euclidean_dissimilarity(ds: Dataset) -> DissimilarityMatrix:
    """Pairwise L2 distances between dataset rows."""
    x = ds.points
    sq = np.sum(x * x, axis=1)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (x @ x.T)
    np.maximum(d2, 0.0, out=d2)
    d = np.sqrt(d2)
    # The Gram-matrix route loses a few ulps of symmetry; make it exact.
    d = (d + d.T) / 2.0
    np.fill_diagonal(d, 0.0)
    return DissimilarityMatrix(d)


def save_dataset(ds: Dataset, path: str | Path) -> None:
    """CSV with a header row; features as f0..f{d-1}, labels under ``label``."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        header = [f"f{i}" for i in range(ds.dim)]
        if ds.labels is not None:
            header.append(LABEL_COLUMN)
        w.writerow(header)
        for i in range(ds.n):
            row = [FLOAT_FMT % v for v in ds.points[i]]
            if ds.labels is not None:
                row.append(str(int(ds.labels[i])))
            w.writerow(row)


def load_dataset(path: str | Path, name: str | None = None) -> Dataset:
    """Read a header CSV; a ``label`` column (any position) becomes labels."""
    path = Path(path)
    if not path.exists():
        raise ParseError(f"no such file: {path}")
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        label_idx = header.index(LABEL_COLUMN) if LABEL_COLUMN in header else None
        feat_idx = [i for i in range(len(header)) if i != label_idx]
        points, labels = [], []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise ParseError(
                    f"{path}:{lineno}: expected {len(header)} cells, got {len(row)}"
                )
            try:
                points.append([float(row[i]) for i in feat_idx])
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: non-numeric cell ({exc})") from None
            if label_idx is not None:
                try:
                    labels.append(int(row[label_idx]))
                except ValueError:
                    raise ParseError(
                        f"{path}:{lineno}: non-integer label {row[label_idx]!r}"
                    ) from None
    if not points:
        raise ParseError(f"{path}: no data rows")
    try:
        return Dataset(
            np.asarray(points, dtype=np.float64),
            np.asarray(labels, dtype=np.int64) if label_idx is not None else None,
            name=name or path.stem,
        )
    except ValidationError as exc:
        raise ParseError(f"{path}: {exc}") from None


def save_dissimilarity(m: DissimilarityMatrix, path: str | Path) -> None:
    """Square numeric CSV, no header."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        for row in m.values:
            w.writerow([FLOAT_FMT % v for v in row])


def load_dissimilarity(path: str | Path) -> DissimilarityMatrix:
    """Read a square matrix CSV; asymmetry beyond 1e-9 is a parse error."""
    path = Path(path)
    if not path.exists():
        raise ParseError(f"no such file: {path}")
    rows = []
    with path.open(newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row:
                continue
            try:
                rows.append([float(c) for c in row])
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: non-numeric cell ({exc})") from None
            if len(rows[-1]) != len(rows[0]):
                raise ParseError(
                    f"{path}:{lineno}: ragged row ({len(rows[-1])} cells, "
                    f"expected {len(rows[0])})"
                )
    if not rows:
        raise ParseError(f"{path}: empty file")
    d = np.asarray(rows, dtype=np.float64)
    if d.shape[0] != d.shape[1]:
        raise ParseError(f"{path}: matrix is {d.shape[0]}x{d.shape[1]}, not square")
    try:
        return DissimilarityMatrix(d)
    except ValidationError as exc:
        raise ParseError(f"{path}: {exc}") from None
