"""Geodesic distances over the neighbor graph and hierarchical clustering.

Clustering happens on shortest-path distances through the triangulation
(edge weights are input-space distances), not on the raw input metric:
paths must traverse the projected manifold, so cluster borders show up as
expensive detours.  Two structure types are offered: "connected" uses
single linkage (chains along cheap paths), "compact" uses the ward.D2
update (variance-minimizing, favors ball-shaped groups).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .data import Dataset, DissimilarityMatrix, euclidean_dissimilarity
from .engine import Projection, swarm_project
from .errors import ValidationError
from .topomap import (NeighborGraph, TopoMap, delaunay_torus, detect_volcanoes,
                      render_heightmap, u_heights)

MODES = ("connected", "compact")


@dataclass
class GeodesicMatrix:
    """All-pairs shortest-path distances over a connected weighted graph."""

    values: np.ndarray
    graph: NeighborGraph

    @property
    def n(self) -> int:
        return self.values.shape[0]


def geodesic_distances(graph: NeighborGraph) -> GeodesicMatrix:
    """All-pairs shortest paths: single-source Dijkstra from every vertex."""
    from scipy.sparse import csr_matrix
    from scipy.sparse.csgraph import dijkstra

    comps = graph.components()
    if len(comps) > 1:
        sizes = ", ".join(str(len(c)) for c in comps)
        raise ValidationError(
            f"graph is disconnected ({len(comps)} components of sizes {sizes})"
        )
    n = graph.n
    m = csr_matrix(
        (np.concatenate([graph.weights, graph.weights]),
         (np.concatenate([graph.edges[:, 0], graph.edges[:, 1]]),
          np.concatenate([graph.edges[:, 1], graph.edges[:, 0]]))),
        shape=(n, n),
    )
    g = dijkstra(m, directed=False)
    # Forward and reverse path sums can differ in the last ulp; keep the min.
    g = np.minimum(g, g.T)
    np.fill_diagonal(g, 0.0)
    return GeodesicMatrix(values=g, graph=graph)


@dataclass
class Dendrogram:
    """Merge table: one row (left, right, height, size) per merge.

    Node ids follow the usual convention: 0..n-1 are leaves, n+t is the
    cluster created by merge t.  Heights are non-decreasing for both
    linkage rules used here.
    """

    merges: np.ndarray  # (n-1, 4) float
    mode: str

    @property
    def n_leaves(self) -> int:
        return self.merges.shape[0] + 1

    @property
    def heights(self) -> np.ndarray:
        return self.merges[:, 2]

    def cut(self, k: int) -> np.ndarray:
        """Labels in 1..k; cluster 1 is the largest (ties: lowest member id)."""
        n = self.n_leaves
        if not (1 <= k <= n):
            raise ValidationError(f"k must be in [1, {n}], got {k}")
        parent = list(range(2 * n - 1))

        def find(a: int) -> int:
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for t in range(n - k):
            left, right = int(self.merges[t, 0]), int(self.merges[t, 1])
            node = n + t
            parent[find(left)] = node
            parent[find(right)] = node
        roots = np.array([find(i) for i in range(n)])
        return canonical_labels(roots)

    def to_text(self) -> str:
        """One merge per line: left right height."""
        lines = [
            f"{int(l)} {int(r)} {h!r}" for l, r, h in self.merges[:, :3]
        ]
        return "\n".join(lines) + "\n"

    def leaf_order(self) -> list[int]:
        """Left-to-right leaf order of the merge tree."""
        n = self.n_leaves
        order: list[int] = []
        stack = [2 * n - 2]
        while stack:
            node = stack.pop()
            if node < n:
                order.append(node)
            else:
                t = node - n
                stack.append(int(self.merges[t, 1]))
                stack.append(int(self.merges[t, 0]))
        return order

    def to_json_dict(self) -> dict:
        return {
            "mode": self.mode,
            "merges": [
                {
                    "left": int(l),
                    "right": int(r),
                    "height": float(h),
                    "size": int(s),
                }
                for l, r, h, s in self.merges
            ],
            "leaf_order": self.leaf_order(),
        }


def canonical_labels(assignment: np.ndarray) -> np.ndarray:
    """Relabel arbitrary group ids to 1..k by decreasing size (ties: the
    group containing the lowest point id first)."""
    assignment = np.asarray(assignment)
    groups, inverse, counts = np.unique(
        assignment, return_inverse=True, return_counts=True
    )
    first_member = np.full(groups.shape[0], assignment.shape[0])
    for i, g in enumerate(inverse):
        if i < first_member[g]:
            first_member[g] = min(first_member[g], i)
    order = sorted(range(groups.shape[0]), key=lambda g: (-counts[g], first_member[g]))
    rank = np.empty(groups.shape[0], dtype=np.int64)
    for newid, g in enumerate(order, start=1):
        rank[g] = newid
    return rank[inverse]


def linkage_matrix(dist: np.ndarray, mode: str) -> Dendrogram:
    """Agglomerate a full dissimilarity matrix with the Lance-Williams
    update of the requested structure type."""
    if mode not in MODES:
        raise ValidationError(f"mode must be one of {MODES}, got {mode!r}")
    d = np.array(dist, dtype=np.float64)
    n = d.shape[0]
    if d.ndim != 2 or d.shape != (n, n):
        raise ValidationError(f"distance matrix must be square, got {d.shape}")
    if n < 2:
        raise ValidationError("need at least 2 items to agglomerate")
    np.fill_diagonal(d, np.inf)
    sizes = np.ones(n)
    node_id = np.arange(n)
    active = np.ones(n, dtype=bool)
    merges = np.empty((n - 1, 4))
    for t in range(n - 1):
        flat = int(np.argmin(d))
        i, j = divmod(flat, n)
        if i > j:
            i, j = j, i
        h = d[i, j]
        merges[t] = (node_id[i], node_id[j], h, sizes[i] + sizes[j])
        if mode == "connected":
            new_row = np.minimum(d[i], d[j])
        else:  # compact: ward.D2 on squared dissimilarities
            si, sj, sk = sizes[i], sizes[j], sizes
            with np.errstate(invalid="ignore"):
                new_row = np.sqrt(
                    ((si + sk) * d[i] ** 2 + (sj + sk) * d[j] ** 2 - sk * h * h)
                    / (si + sj + sk)
                )
        new_row[~active] = np.inf
        new_row[i] = np.inf
        new_row[j] = np.inf
        d[i, :] = new_row
        d[:, i] = new_row
        d[j, :] = np.inf
        d[:, j] = np.inf
        sizes[i] += sizes[j]
        node_id[i] = n + t
        active[j] = False
    return Dendrogram(merges=merges, mode=mode)


@dataclass
class ClusterResult:
    """A k-cut of the dendrogram with canonical labels and outlier marks."""

    labels: np.ndarray
    k: int
    mode: str
    dendrogram: Dendrogram
    outliers: list[int] = field(default_factory=list)

    def to_json_dict(self) -> dict:
        return {
            "k": self.k,
            "mode": self.mode,
            "labels": [int(v) for v in self.labels],
            "outliers": [int(v) for v in self.outliers],
            "dendrogram": self.dendrogram.to_json_dict(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=1, sort_keys=True)

    def save_json(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json() + "\n")


def hierarchical_cluster(dist, k: int, mode: str) -> ClusterResult:
    """Cluster a (geodesic or raw) dissimilarity matrix into k groups."""
    if isinstance(dist, GeodesicMatrix):
        values = dist.values
    elif isinstance(dist, DissimilarityMatrix):
        values = dist.values
    else:
        values = np.asarray(dist, dtype=float)
    n = values.shape[0]
    if not (1 <= k <= n):
        raise ValidationError(f"k must be in [1, {n}], got {k}")
    dendro = linkage_matrix(values, mode)
    return ClusterResult(labels=dendro.cut(k), k=k, mode=mode, dendrogram=dendro)


def tendency_gap(dendrogram: Dendrogram, m: int = 10) -> float:
    """Largest relative jump among the top m merge heights.

    A pronounced jump means cutting there separates well-spaced groups; a
    flat top end means the hierarchy never meets real structure.
    """
    heights = np.sort(dendrogram.heights)
    if heights.shape[0] < m:
        raise ValidationError(
            f"need more than {m} leaves, got {dendrogram.n_leaves}"
        )
    top = heights[-m:]
    h_max = top[-1]
    if h_max <= 0:
        return 0.0
    return float(np.diff(top).max() / h_max)


@dataclass
class PipelineResult:
    """All artifacts of one end-to-end run."""

    projection: Projection
    graph: NeighborGraph
    geodesic: GeodesicMatrix
    topo: TopoMap
    clusters: ClusterResult


def swarm_cluster(data, k: int, mode: str, seed: int, **project_kwargs) -> PipelineResult:
    """Full pipeline: dissimilarity -> projection -> triangulation ->
    geodesics -> hierarchical cut -> terrain and volcano marks."""
    if isinstance(data, Dataset):
        dmatrix = euclidean_dissimilarity(data)
    elif isinstance(data, DissimilarityMatrix):
        dmatrix = data
    else:
        dmatrix = DissimilarityMatrix(np.asarray(data, dtype=float))
    if k < 1:
        raise ValidationError(f"k must be >= 1, got {k}")
    projection = swarm_project(dmatrix, seed, **project_kwargs)
    graph = delaunay_torus(projection, dmatrix)
    geodesic = geodesic_distances(graph)
    clusters = hierarchical_cluster(geodesic, k, mode)
    heights = u_heights(graph)
    topo = render_heightmap(projection, heights)
    clusters.outliers = detect_volcanoes(topo, clusters.labels)
    return PipelineResult(projection=projection, graph=graph, geodesic=geodesic,
                     topo=topo, clusters=clusters)
