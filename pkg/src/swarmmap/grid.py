"""Toroidal hexagonal grid geometry.

Cells live on an L x C lattice embedded in the plane with odd rows shifted
half a column to the right and a row pitch of sqrt(3)/2 (densest packing).
Both axes wrap, so distances are minima over the 3x3 block of translated
images; because the horizontal and vertical shifts are independent this
reduces to wrapping each axis separately.

Grid sizing follows three conditions: the grid diagonal must cover the
ratio A = p99/p01 of the dissimilarity spectrum, the cell count must be at
least alpha * N, and the aspect ratio L/C must stay in (0.5, 1].  Equating
the first two yields the biquadratic C^4 - A^2 C^2 + alpha^2 N^2 = 0 whose
larger root is used when real; otherwise an aspect-driven grid search
takes over.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import ValidationError

ROW_PITCH = math.sqrt(3.0) / 2.0

RING_BAND = 0.5  # half-width of the discrete ring around a jump length


class GridPos(NamedTuple):
    row: int
    col: int


class PolarVec(NamedTuple):
    r: float
    phi: float  # degrees in [0, 360)


@dataclass(frozen=True)
class GridConfig:
    lines: int
    columns: int
    alpha: int
    beta: float
    rmax: int
    rmin: int
    spectrum_ratio: float

    def __post_init__(self):
        if not (4 <= self.lines <= self.columns):
            raise ValidationError(
                f"need 4 <= lines <= columns, got {self.lines}x{self.columns}"
            )
        if not (0.5 < self.beta <= 1.0):
            raise ValidationError(f"beta must be in (0.5, 1], got {self.beta}")
        if self.rmax != self.lines // 2:
            raise ValidationError("rmax must equal lines // 2")
        if not (1 <= self.rmin < self.rmax):
            raise ValidationError(
                f"need 1 <= rmin < rmax, got rmin={self.rmin}, rmax={self.rmax}"
            )

    @property
    def n_cells(self) -> int:
        return self.lines * self.columns

    @property
    def height(self) -> float:
        """Vertical extent of the embedding (wrap period in y)."""
        return self.lines * ROW_PITCH

    def to_dict(self) -> dict:
        return {
            "lines": self.lines,
            "columns": self.columns,
            "alpha": self.alpha,
            "beta": self.beta,
            "rmax": self.rmax,
            "rmin": self.rmin,
            "spectrum_ratio": self.spectrum_ratio,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GridConfig":
        return cls(
            lines=int(d["lines"]),
            columns=int(d["columns"]),
            alpha=int(d["alpha"]),
            beta=float(d["beta"]),
            rmax=int(d["rmax"]),
            rmin=int(d["rmin"]),
            spectrum_ratio=float(d["spectrum_ratio"]),
        )


def polar_from_cartesian(x: float, y: float) -> PolarVec:
    """Cartesian offset to (length, direction-in-degrees); (0,0) maps to (0,0)."""
    if not (math.isfinite(x) and math.isfinite(y)):
        raise ValidationError(f"non-finite offset ({x}, {y})")
    r = math.hypot(x, y)
    if r == 0.0:
        return PolarVec(0.0, 0.0)
    phi = math.degrees(math.atan2(y, x)) % 360.0
    return PolarVec(r, phi)


def embed(row, col):
    """Hex embedding of lattice coordinates: odd rows shift +0.5 columns."""
    row = np.asarray(row)
    col = np.asarray(col)
    x = col + 0.5 * (row % 2)
    y = row * ROW_PITCH
    return x, y


def _wrap_delta(delta, period):
    d = np.abs(delta)
    return np.minimum(d, period - d)


def grid_distance(a: GridPos, b: GridPos, cfg: GridConfig) -> float:
    """Toroidal Euclidean distance between two cells in the hex embedding."""
    xa, ya = embed(a[0], a[1])
    xb, yb = embed(b[0], b[1])
    dx = _wrap_delta(xa - xb, float(cfg.columns))
    dy = _wrap_delta(ya - yb, cfg.height)
    return float(np.hypot(dx, dy))


def toroidal_distances(x0, y0, xs, ys, columns: int, height: float):
    """Distances from one embedded point to many, with wrap on both axes."""
    dx = _wrap_delta(xs - x0, float(columns))
    dy = _wrap_delta(ys - y0, height)
    return np.hypot(dx, dy)


def cone(r, re):
    """Neighborhood weight: 1 - r^2/(pi * re^2) while positive, else 0.

    Note the pi in the denominator: the support extends to sqrt(pi) * re,
    not re.  Implemented exactly as specified.
    """
    q = np.square(r) / (math.pi * re * re)
    return np.where(q < 1.0, 1.0 - q, 0.0)


def cell_distance_table(cfg: GridConfig, parity: int) -> np.ndarray:
    """(L, C) distances from the cell (parity, 0) to every cell.

    For a center at (r0, c0) with r0 % 2 == parity, the distance to cell
    (r, c) is table[(r - r0 + parity) % L, (c - c0) % C]: row parities are
    preserved by the index shift, which is what the hex offset depends on.
    """
    rows = np.arange(cfg.lines)
    cols = np.arange(cfg.columns)
    x0, y0 = embed(parity, 0)
    xs, ys = embed(rows[:, None], cols[None, :])
    xs = xs.astype(float) - float(x0)
    ys = ys - float(y0)
    dx = _wrap_delta(xs, float(cfg.columns))
    dy = _wrap_delta(ys, cfg.height)
    return np.hypot(dx, dy)


def ring_positions(center: GridPos, length: float, cfg: GridConfig) -> list[GridPos]:
    """All cells whose distance to center is within the half-cell band of
    the requested jump length.  The center itself is never included."""
    if not (1.0 <= length <= cfg.rmax):
        raise ValidationError(f"jump length {length} outside [1, {cfg.rmax}]")
    parity = center[0] % 2
    table = cell_distance_table(cfg, parity=parity)
    sel = np.abs(table - length) <= RING_BAND
    sel[parity, 0] = False
    trows, tcols = np.nonzero(sel)
    rows = (trows - parity + center[0]) % cfg.lines
    cols = (tcols + center[1]) % cfg.columns
    return [GridPos(int(r), int(c)) for r, c in zip(rows, cols)]


def _conditions_met(lines: int, columns: int, a_ratio: float, min_cells: int) -> bool:
    return math.hypot(lines, columns) >= a_ratio and lines * columns >= min_cells


def solve_grid_size(
    p01: float,
    p99: float,
    n_points: int,
    alpha: int = 4,
    beta: float = 0.8,
) -> GridConfig:
    """Size the grid from the dissimilarity spectrum and the point count."""
    if n_points < 3:
        raise ValidationError(f"need at least 3 points, got {n_points}")
    if p01 <= 0:
        raise ValidationError("p01 must be positive (substitute the smallest "
                              "positive distance before sizing)")
    if not (0.5 < beta <= 1.0):
        raise ValidationError(f"beta must be in (0.5, 1], got {beta}")
    if alpha < 1:
        raise ValidationError(f"alpha must be >= 1, got {alpha}")
    a_ratio = p99 / p01
    min_cells = alpha * n_points

    disc = a_ratio**4 - 4.0 * alpha**2 * n_points**2
    if disc >= 0.0:
        # Larger root of the biquadratic; the smaller one would give L > C.
        c2 = (a_ratio**2 + math.sqrt(disc)) / 2.0
        columns = max(4, math.ceil(math.sqrt(c2)))
        lines = max(4, math.ceil(min_cells / columns))
        while not _conditions_met(lines, columns, a_ratio, min_cells):
            lines += 1
        # The closed form ignores the aspect condition; pull L up into range.
        if 2 * lines <= columns:
            lines = columns // 2 + 1
    else:
        lines, columns = _aspect_search(a_ratio, min_cells, beta)

    if lines > columns:  # tiny grids after the >= 4 clamps
        lines, columns = columns, lines
        if 2 * lines <= columns:
            lines = columns // 2 + 1

    rmax = lines // 2
    rmin = rmin_from_grid(lines, columns, rmax)
    return GridConfig(
        lines=lines,
        columns=columns,
        alpha=alpha,
        beta=beta,
        rmax=rmax,
        rmin=rmin,
        spectrum_ratio=a_ratio,
    )


def _aspect_search(a_ratio: float, min_cells: int, beta: float) -> tuple[int, int]:
    """No real root: start from L/C = beta and grid-search nearby."""
    l0 = max(4, math.ceil(math.sqrt(min_cells * beta)))
    c0 = max(4, math.ceil(l0 / beta))
    window = 0.25
    while window <= 4.0:
        lo_l = max(4, math.floor(l0 * (1 - window)))
        hi_l = math.ceil(l0 * (1 + window))
        lo_c = max(4, math.floor(c0 * (1 - window)))
        hi_c = math.ceil(c0 * (1 + window))
        best = None
        for lines in range(lo_l, hi_l + 1):
            for columns in range(max(lines, lo_c), hi_c + 1):
                if 2 * lines <= columns:
                    continue
                if not _conditions_met(lines, columns, a_ratio, min_cells):
                    continue
                key = (abs(lines / columns - beta), lines * columns, columns)
                if best is None or key < best[0]:
                    best = (key, lines, columns)
        if best is not None:
            return best[1], best[2]
        window *= 2.0  # defensive; the initial window covers normal inputs
    raise ValidationError(
        f"no feasible grid for A={a_ratio:.3g}, alpha*N={min_cells}, beta={beta}"
    )


def rmin_from_grid(lines, columns: int | None = None, rmax: int | None = None) -> int:
    """Smallest radius whose cell neighborhood covers at least 5% of the
    grid, capped one below rmax.  Accepts a GridConfig or (lines, columns)."""
    if isinstance(lines, GridConfig):
        lines, columns, rmax = lines.lines, lines.columns, lines.rmax
    if rmax is None:
        rmax = lines // 2
    need = 0.05 * lines * columns
    # Cell counts are parity-independent (reflection symmetry); use row 0.
    x0, y0 = embed(0, 0)
    rows = np.arange(lines)
    cols = np.arange(columns)
    xs, ys = embed(rows[:, None], cols[None, :])
    dx = _wrap_delta(xs.astype(float) - float(x0), float(columns))
    dy = _wrap_delta(ys - float(y0), lines * ROW_PITCH)
    dist = np.hypot(dx, dy)
    for radius in range(1, rmax):
        if np.count_nonzero(dist <= radius) >= need:
            return radius
    return max(1, rmax - 1)
