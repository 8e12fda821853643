"""Synthetic benchmark dataset generators.

Each generator rebuilds one of the classic fundamental-clustering-problem
shapes from its structural description: the exact point counts and
coordinates of the published collections are not reproduced, but every
generator preserves the property that makes its dataset hard (interlocked
rings, nested shells, outlier groups, touching compact clusters, density
gradients, ...).  All generators are deterministic for a given seed.
"""

from __future__ import annotations

import math

import numpy as np

from .data import Dataset
from .errors import ValidationError

DEFAULT_SIZES = {
    "Hepta": 212,
    "Lsun3D": 404,
    "Tetra": 400,
    "Chainlink": 1000,
    "Atom": 800,
    "Target": 770,
    "TwoDiamonds": 800,
    "WingNut": 1016,
    "EngyTime": 1000,  # classic collection uses 4096; scaled down for runtime
    "GolfBall": 1000,  # classic collection uses 4002; scaled down for runtime
}

# Number of classes each labeled generator emits (GolfBall is unlabeled).
CLASS_COUNTS = {
    "Hepta": 7,
    "Lsun3D": 3,
    "Tetra": 4,
    "Chainlink": 2,
    "Atom": 2,
    "Target": 6,
    "TwoDiamonds": 2,
    "WingNut": 2,
    "EngyTime": 2,
}


def _split(n: int, weights) -> list[int]:
    """Split n into integer parts proportional to weights (largest remainder)."""
    weights = np.asarray(weights, dtype=float)
    exact = n * weights / weights.sum()
    parts = np.floor(exact).astype(int)
    remainder = exact - parts
    for i in np.argsort(-remainder)[: n - parts.sum()]:
        parts[i] += 1
    return parts.tolist()


def _unit_directions(rng: np.random.Generator, n: int, d: int) -> np.ndarray:
    v = rng.standard_normal((n, d))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def _uniform_ball(rng: np.random.Generator, n: int, d: int, radius: float) -> np.ndarray:
    dirs = _unit_directions(rng, n, d)
    r = radius * rng.random(n) ** (1.0 / d)
    return dirs * r[:, None]


def _hepta(rng, n):
    # Central ball is smaller but similarly populated, so it is denser.
    counts = _split(n, [1.1] + [1.0] * 6)
    centers = [np.zeros(3)]
    for axis in range(3):
        for sign in (1.0, -1.0):
            e = np.zeros(3)
            e[axis] = 5.0 * sign
            centers.append(e)
    radii = [0.5] + [1.0] * 6
    points, labels = [], []
    for ci, (c, rad, m) in enumerate(zip(centers, radii, counts), start=1):
        points.append(c + _uniform_ball(rng, m, 3, rad))
        labels.extend([ci] * m)
    return np.vstack(points), np.asarray(labels)


def _tetra(rng, n):
    # Four compact balls almost touching at the vertices of a tetrahedron.
    verts = np.array(
        [[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]], dtype=float
    )
    verts *= 2.6 / (2.0 * math.sqrt(2.0))  # pairwise center distance 2.6
    counts = _split(n, [1, 1, 1, 1])
    points, labels = [], []
    for ci, (c, m) in enumerate(zip(verts, counts), start=1):
        points.append(c + _uniform_ball(rng, m, 3, 1.0))
        labels.extend([ci] * m)
    return np.vstack(points), np.asarray(labels)


def _chainlink(rng, n):
    # Two interlocked unit circles in orthogonal planes; every point of one
    # ring sits at distance 1 from the other ring, so with tube radius 0.1
    # the gap stays ~0.8 while nearest-neighbour spacing is far smaller.
    n1, n2 = _split(n, [1, 1])
    points, labels = [], []
    for ci, m in enumerate((n1, n2), start=1):
        theta = rng.random(m) * 2.0 * math.pi
        if ci == 1:
            ring = np.stack([np.cos(theta), np.sin(theta), np.zeros(m)], axis=1)
        else:
            ring = np.stack([1.0 + np.cos(theta), np.zeros(m), np.sin(theta)], axis=1)
        points.append(ring + _uniform_ball(rng, m, 3, 0.1))
        labels.extend([ci] * m)
    return np.vstack(points), np.asarray(labels)


def _atom(rng, n):
    # Dense core inside a hollow shell: no hyperplane separates the classes.
    n_core, n_shell = _split(n, [1, 1])
    core = _uniform_ball(rng, n_core, 3, 0.8)
    dirs = _unit_directions(rng, n_shell, 3)
    shell = dirs * (3.0 + rng.uniform(-0.1, 0.1, n_shell))[:, None]
    labels = [1] * n_core + [2] * n_shell
    return np.vstack([core, shell]), np.asarray(labels)


def _target(rng, n):
    # Central disk, surrounding annulus, and four small far-out groups.
    m_out = max(3, round(n / 77))
    c_disk, c_ring = _split(n - 4 * m_out, [33, 40])
    counts = [c_disk, c_ring] + [m_out] * 4
    disk = _uniform_ball(rng, counts[0], 2, 1.0)
    theta = rng.random(counts[1]) * 2.0 * math.pi
    rad = 3.0 + rng.uniform(-0.15, 0.15, counts[1])
    ring = np.stack([rad * np.cos(theta), rad * np.sin(theta)], axis=1)
    points = [disk, ring]
    labels = [1] * counts[0] + [2] * counts[1]
    corners = [(8.0, 8.0), (-8.0, 8.0), (-8.0, -8.0), (8.0, -8.0)]
    for ci, (corner, m) in enumerate(zip(corners, counts[2:]), start=3):
        points.append(np.asarray(corner) + _uniform_ball(rng, m, 2, 0.15))
        labels.extend([ci] * m)
    return np.vstack(points), np.asarray(labels)


def _two_diamonds(rng, n):
    # Two compact diamonds whose tips nearly touch on the x axis.
    n1, n2 = _split(n, [1, 1])
    points, labels = [], []
    for ci, (cx, m) in enumerate(zip((-1.1, 1.1), (n1, n2)), start=1):
        a = rng.uniform(-1.0, 1.0, m)
        b = rng.uniform(-1.0, 1.0, m)
        diamond = np.stack([(a + b) / 2.0, (a - b) / 2.0], axis=1)
        points.append(diamond + np.array([cx, 0.0]))
        labels.extend([ci] * m)
    return np.vstack(points), np.asarray(labels)


def _wingnut(rng, n):
    # Mirrored rectangles whose density rises toward the facing edges.
    n1, n2 = _split(n, [1, 1])
    points, labels = [], []
    for ci, (sign, m) in enumerate(zip((-1.0, 1.0), (n1, n2)), start=1):
        u = rng.random(m)
        t = 3.6 - np.sqrt(12.96 - 12.6 * u)  # linear density, 6:1 gradient
        x = sign * (0.3 + t)
        y = rng.uniform(-1.5, 1.5, m)
        points.append(np.stack([x, y], axis=1))
        labels.extend([ci] * m)
    return np.vstack(points), np.asarray(labels)


def _engytime(rng, n):
    # Two overlapping Gaussians of different spread and density.
    n1, n2 = _split(n, [1, 1])
    g1 = rng.standard_normal((n1, 2))
    g2 = np.array([2.0, 2.0]) + 0.6 * rng.standard_normal((n2, 2))
    labels = [1] * n1 + [2] * n2
    return np.vstack([g1, g2]), np.asarray(labels)


def _lsun3d(rng, n):
    # Two elongated boxes forming an L, plus a separate spherical ball.
    counts = _split(n, [3, 3, 2])
    arm_x = np.stack(
        [
            rng.uniform(1.1, 4.1, counts[0]),
            rng.uniform(0.0, 0.6, counts[0]),
            rng.uniform(0.0, 0.6, counts[0]),
        ],
        axis=1,
    )
    arm_y = np.stack(
        [
            rng.uniform(0.0, 0.6, counts[1]),
            rng.uniform(1.1, 4.1, counts[1]),
            rng.uniform(0.0, 0.6, counts[1]),
        ],
        axis=1,
    )
    ball = np.array([3.6, 3.6, 0.3]) + _uniform_ball(rng, counts[2], 3, 0.5)
    labels = [1] * counts[0] + [2] * counts[1] + [3] * counts[2]
    return np.vstack([arm_x, arm_y, ball]), np.asarray(labels)


def _golfball(rng, n):
    # Evenly spaced points on a sphere (Fibonacci lattice), randomly rotated
    # per seed.  No class structure, hence no labels.
    i = np.arange(n, dtype=float)
    golden = math.pi * (3.0 - math.sqrt(5.0))
    z = 1.0 - 2.0 * (i + 0.5) / n
    r = np.sqrt(1.0 - z * z)
    theta = golden * i
    pts = np.stack([r * np.cos(theta), r * np.sin(theta), z], axis=1)
    q, _ = np.linalg.qr(rng.standard_normal((3, 3)))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return pts @ q.T, None


_GENERATORS = {
    "Hepta": _hepta,
    "Lsun3D": _lsun3d,
    "Tetra": _tetra,
    "Chainlink": _chainlink,
    "Atom": _atom,
    "Target": _target,
    "TwoDiamonds": _two_diamonds,
    "WingNut": _wingnut,
    "EngyTime": _engytime,
    "GolfBall": _golfball,
}

GENERATOR_NAMES = tuple(_GENERATORS)


def generate_benchmark(name: str, seed: int, n_points: int | None = None) -> Dataset:
    """Build the named benchmark dataset deterministically for the seed."""
    if name not in _GENERATORS:
        known = ", ".join(GENERATOR_NAMES)
        raise ValidationError(f"unknown dataset {name!r}; known: {known}")
    n = DEFAULT_SIZES[name] if n_points is None else int(n_points)
    if n < 10:
        raise ValidationError(f"{name}: need at least 10 points, got {n}")
    rng = np.random.default_rng(seed)
    points, labels = _GENERATORS[name](rng, n)
    return Dataset(points, labels, name=name)
