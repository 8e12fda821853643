"""Neighborhood graph and terrain view of a projection.

The projected points are triangulated on the torus (by triangulating a 3x3
tiling and folding the edges of the central copy back), and every edge is
weighted with the input-space distance of its endpoints.  A point's height
is the mean weight of its incident edges: low means the point sits among
input-space neighbors (a valley, i.e. cluster interior), high means its
grid neighbors are far away in input space (a ridge, i.e. cluster border,
or a volcano for isolated outliers).  The heightmap interpolates those
point heights over the whole grid and buckets them into hypsometric color
classes from sea to snow.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.spatial import Delaunay, QhullError

from .data import DissimilarityMatrix
from .engine import Projection
from .errors import ValidationError
from .grid import embed, toroidal_distances

log = logging.getLogger(__name__)

# Lattice positions put many points exactly cocircular, which makes the
# triangulation tie-dependent; a tiny per-point jitter (identical across the
# nine tiling copies, drawn from a fixed internal seed) breaks the ties the
# same way regardless of translation.
_JITTER_SCALE = 1e-6
_JITTER_SEED = 0x5EED

# IDW interpolation over the k nearest projected points, inverse square law.
IDW_NEIGHBORS = 8

# Normalized-height thresholds for the hypsometric classes.
COLOR_CLASSES = ("sea", "lowland", "hill", "mountain", "snow")
CLASS_THRESHOLDS = (0.2, 0.45, 0.7, 0.9)

# 8-bit palette anchors per class boundary, low to high (blue -> green ->
# brown -> white).
_PALETTE_STOPS = [
    (0.00, (24, 94, 190)),
    (0.20, (64, 164, 223)),
    (0.45, (88, 169, 79)),
    (0.70, (150, 114, 71)),
    (0.90, (200, 200, 200)),
    (1.00, (255, 255, 255)),
]


@dataclass
class NeighborGraph:
    """Undirected graph over projected points, weights from the input space."""

    n: int
    edges: np.ndarray    # (m, 2) int vertex pairs, i < j
    weights: np.ndarray  # (m,) nonnegative
    coords: np.ndarray   # (n, 2) embedded positions (for plotting/repr only)

    def __post_init__(self):
        self.adjacency: list[list[tuple[int, float]]] = [[] for _ in range(self.n)]
        for (i, j), w in zip(self.edges, self.weights):
            self.adjacency[int(i)].append((int(j), float(w)))
            self.adjacency[int(j)].append((int(i), float(w)))

    def degree(self, i: int) -> int:
        return len(self.adjacency[i])

    def components(self) -> list[list[int]]:
        seen = np.zeros(self.n, dtype=bool)
        comps = []
        for start in range(self.n):
            if seen[start]:
                continue
            stack = [start]
            seen[start] = True
            comp = []
            while stack:
                v = stack.pop()
                comp.append(v)
                for u, _ in self.adjacency[v]:
                    if not seen[u]:
                        seen[u] = True
                        stack.append(u)
            comps.append(sorted(comp))
        return comps

    def is_connected(self) -> bool:
        return len(self.components()) == 1


def _fold_edges(simplices: np.ndarray, n: int, central: int) -> set[tuple[int, int]]:
    edges: set[tuple[int, int]] = set()
    for tri in simplices:
        for a in range(3):
            u, v = int(tri[a]), int(tri[(a + 1) % 3])
            if u // n != central and v // n != central:
                continue
            cu, cv = u % n, v % n
            if cu == cv:
                continue
            edges.add((min(cu, cv), max(cu, cv)))
    return edges


def delaunay_torus(proj: Projection, dmatrix: DissimilarityMatrix) -> NeighborGraph:
    """Toroidal triangulation of the projected points.

    The points are tiled 3x3, triangulated once, and the edges incident to
    the central copy are folded back to canonical vertex ids.  Degenerate
    (collinear) layouts fall back to a 6-nearest-neighbor graph.
    """
    n = proj.n
    if n < 3:
        raise ValidationError("need at least 3 projected points")
    if dmatrix.n != n:
        raise ValidationError(
            f"matrix has {dmatrix.n} rows but projection has {n} points"
        )
    coords = proj.coords
    width = float(proj.grid.columns)
    height = proj.grid.height
    jitter = np.random.default_rng(_JITTER_SEED).uniform(-1.0, 1.0, (n, 2))
    base = coords + _JITTER_SCALE * jitter
    tiles = []
    central = -1
    idx = 0
    for dy in (-height, 0.0, height):
        for dx in (-width, 0.0, width):
            if dx == 0.0 and dy == 0.0:
                central = idx
            tiles.append(base + np.array([dx, dy]))
            idx += 1
    tiled = np.vstack(tiles)
    try:
        tri = Delaunay(tiled)
        pairs = _fold_edges(tri.simplices, n, central)
    except QhullError:
        log.warning("degenerate layout, falling back to %d-nearest-neighbor graph",
                    6)
        pairs = _knn_pairs(coords, width, height, k=6)
    edges = np.array(sorted(pairs), dtype=np.int64).reshape(-1, 2)
    weights = dmatrix.values[edges[:, 0], edges[:, 1]]
    return NeighborGraph(n=n, edges=edges, weights=weights, coords=coords)


def _knn_pairs(coords: np.ndarray, width: float, height: float,
               k: int) -> set[tuple[int, int]]:
    n = coords.shape[0]
    pairs: set[tuple[int, int]] = set()
    for i in range(n):
        d = toroidal_distances(coords[i, 0], coords[i, 1],
                               coords[:, 0], coords[:, 1], int(width), height)
        d[i] = np.inf
        for j in np.argsort(d)[:k]:
            pairs.add((min(i, int(j)), max(i, int(j))))
    return pairs


def u_heights(graph: NeighborGraph) -> np.ndarray:
    """Mean incident-edge weight per vertex (the point's terrain height)."""
    totals = np.zeros(graph.n)
    counts = np.zeros(graph.n)
    for (i, j), w in zip(graph.edges, graph.weights):
        totals[i] += w
        counts[i] += 1
        totals[j] += w
        counts[j] += 1
    if (counts == 0).any():
        isolated = int(np.nonzero(counts == 0)[0][0])
        raise ValidationError(f"vertex {isolated} has no neighbors")
    return totals / counts


@dataclass
class TopoMap:
    """Per-point heights plus the interpolated, classified heightmap."""

    point_heights: np.ndarray
    grid_heights: np.ndarray   # (L, C), normalized to [0, 1]
    color_classes: np.ndarray  # (L, C) uint8 indices into COLOR_CLASSES

    def to_json_dict(self) -> dict:
        return {
            "class_names": list(COLOR_CLASSES),
            "class_thresholds": list(CLASS_THRESHOLDS),
            "point_heights": [float(v) for v in self.point_heights],
            "grid_heights": [[float(v) for v in row] for row in self.grid_heights],
            "color_classes": [[int(v) for v in row] for row in self.color_classes],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=1, sort_keys=True)

    def save_json(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json() + "\n")

    def to_rgb(self) -> np.ndarray:
        """(L, C, 3) uint8 hypsometric rendering of the normalized heights."""
        h = self.grid_heights
        rgb = np.zeros((*h.shape, 3), dtype=np.uint8)
        for c in range(3):
            xp = [s[0] for s in _PALETTE_STOPS]
            fp = [s[1][c] for s in _PALETTE_STOPS]
            rgb[..., c] = np.interp(h, xp, fp).astype(np.uint8)
        return rgb

    def save_png(self, path: str | Path, scale: int = 6) -> None:
        from PIL import Image

        img = Image.fromarray(self.to_rgb(), mode="RGB")
        if scale > 1:
            img = img.resize((img.width * scale, img.height * scale),
                             Image.NEAREST)
        img.save(Path(path), format="PNG")


def render_heightmap(proj: Projection, point_heights: np.ndarray) -> TopoMap:
    """Interpolate point heights over every grid cell and classify them.

    Each cell takes the inverse-square-distance weighted mean of its
    IDW_NEIGHBORS toroidally nearest projected points; a cell exactly on a
    point takes that point's height.  The field is then min-max normalized
    (constant fields collapse to all zeros, i.e. all sea).
    """
    point_heights = np.asarray(point_heights, dtype=float)
    if point_heights.shape != (proj.n,):
        raise ValidationError("one height per projected point required")
    cfg = proj.grid
    coords = proj.coords
    rows = np.arange(cfg.lines)
    cols = np.arange(cfg.columns)
    cx, cy = embed(rows[:, None], cols[None, :])
    cx = cx.astype(float).ravel()
    cy = np.broadcast_to(cy, (cfg.lines, cfg.columns)).ravel()
    # (cells, n) wrapped distances; modest sizes (grid cells ~ 4N, N <= 10k).
    dx = np.abs(cx[:, None] - coords[None, :, 0])
    np.minimum(dx, cfg.columns - dx, out=dx)
    dy = np.abs(cy[:, None] - coords[None, :, 1])
    np.minimum(dy, cfg.height - dy, out=dy)
    dist2 = dx * dx + dy * dy
    k = min(IDW_NEIGHBORS, proj.n)
    part = np.argpartition(dist2, k - 1, axis=1)[:, :k]
    rows_idx = np.arange(dist2.shape[0])[:, None]
    near2 = dist2[rows_idx, part]
    near_h = point_heights[part]
    exact = near2 <= 1e-24
    with np.errstate(divide="ignore"):
        w = 1.0 / near2
    field = np.empty(dist2.shape[0])
    hit = exact.any(axis=1)
    if hit.any():
        first = np.argmax(exact[hit], axis=1)
        field[hit] = near_h[hit, first]
    rest = ~hit
    field[rest] = (w[rest] * near_h[rest]).sum(axis=1) / w[rest].sum(axis=1)
    field = field.reshape(cfg.lines, cfg.columns)
    lo, hi = float(field.min()), float(field.max())
    # Constant fields (up to interpolation round-off) must not have their
    # noise amplified to full range by the normalization.
    if hi - lo > 1e-9 * max(1.0, abs(hi)):
        norm = (field - lo) / (hi - lo)
    else:
        norm = np.zeros_like(field)
    classes = np.digitize(norm, CLASS_THRESHOLDS).astype(np.uint8)
    return TopoMap(point_heights=point_heights, grid_heights=norm,
                   color_classes=classes)


def detect_volcanoes(topo: TopoMap, labels: np.ndarray) -> list[int]:
    """Outlier candidates: unusually high points in tiny clusters.

    A point qualifies when its own height exceeds Q3 + 1.5 IQR of all point
    heights and its cluster holds fewer than max(3, 1%) of the points.
    """
    labels = np.asarray(labels)
    h = topo.point_heights
    if labels.shape != h.shape:
        raise ValidationError("labels and point heights must align")
    q1, q3 = np.quantile(h, [0.25, 0.75])
    cut = q3 + 1.5 * (q3 - q1)
    n = h.shape[0]
    tiny = max(3.0, 0.01 * n)
    _, inverse, counts = np.unique(labels, return_inverse=True, return_counts=True)
    cluster_size = counts[inverse]
    flagged = (h > cut) & (cluster_size < tiny)
    return [int(i) for i in np.nonzero(flagged)[0]]
