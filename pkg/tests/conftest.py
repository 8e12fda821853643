"""Shared helpers: independent brute-force oracles used across test modules.

The oracles deliberately avoid the library's vectorized code paths: wrap
distances come from an explicit 3x3 tiling search, scents from plain
Python loops over Eq-style formulas, so agreement is a real cross-check.
"""

import math

import numpy as np
import pytest

from swarmmap.grid import ROW_PITCH, GridConfig


def oracle_embed(row, col):
    return col + 0.5 * (row % 2), row * ROW_PITCH


def oracle_grid_distance(a, b, cfg: GridConfig) -> float:
    """Minimum distance over the nine translated images (brute force)."""
    xa, ya = oracle_embed(a[0], a[1])
    xb, yb = oracle_embed(b[0], b[1])
    height = cfg.lines * ROW_PITCH
    best = math.inf
    for dx in (-cfg.columns, 0, cfg.columns):
        for dy in (-height, 0.0, height):
            best = min(best, math.hypot(xa - (xb + dx), ya - (yb + dy)))
    return best


def oracle_cone(r: float, re: float) -> float:
    q = r * r / (math.pi * re * re)
    return 1.0 - q if q < 1.0 else 0.0


def oracle_scent(positions, dmatrix, j, radius, s0, cfg) -> float:
    """Plain-loop payoff recomputation (independent of the engine kernels)."""
    denom = 0.0
    numer = 0.0
    for l, pos in enumerate(positions):
        if l == j:
            continue
        w = oracle_cone(oracle_grid_distance(positions[j], pos, cfg), radius)
        if w > 0.0:
            denom += w
            numer += w * dmatrix[j][l]
    if denom > 0.0:
        return s0 - numer / denom
    return s0


def manual_grid(lines: int, columns: int, rmin: int | None = None,
                alpha: int = 4, beta: float = 0.8) -> GridConfig:
    rmax = lines // 2
    if rmin is None:
        rmin = max(1, rmax - 1) if rmax > 1 else 1
    return GridConfig(lines=lines, columns=columns, alpha=alpha, beta=beta,
                      rmax=rmax, rmin=rmin, spectrum_ratio=1.0)


def random_symmetric_matrix(rng, n, scale=1.0):
    m = rng.random((n, n)) * scale
    m = (m + m.T) / 2.0
    np.fill_diagonal(m, 0.0)
    return m


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
