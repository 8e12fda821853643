"""Grid geometry: polar transform, toroidal distances, cone weights,
grid sizing, and ring enumeration, each against independent oracles."""

import math

import numpy as np
import pytest

from swarmmap.errors import ValidationError
from swarmmap.grid import (GridPos, cone, grid_distance, polar_from_cartesian,
                           ring_positions, rmin_from_grid, solve_grid_size)

from conftest import manual_grid, oracle_grid_distance


def test_polar_basics():
    assert polar_from_cartesian(0.0, 0.0) == (0.0, 0.0)
    r, phi = polar_from_cartesian(1.0, 0.0)
    assert (r, phi) == (1.0, 0.0)
    r, phi = polar_from_cartesian(1.0, 1.0)
    assert r == pytest.approx(math.sqrt(2.0), rel=1e-12)
    assert phi == pytest.approx(45.0, rel=1e-12)


def test_polar_full_circle():
    assert polar_from_cartesian(-1.0, 0.0).phi == pytest.approx(180.0)
    assert polar_from_cartesian(0.0, -1.0).phi == pytest.approx(270.0)
    assert polar_from_cartesian(1.0, -1.0).phi == pytest.approx(315.0)
    with pytest.raises(ValidationError):
        polar_from_cartesian(float("nan"), 0.0)


def test_grid_distance_trivial():
    cfg = manual_grid(6, 8)
    assert grid_distance(GridPos(2, 3), GridPos(2, 3), cfg) == 0.0
    # wraparound beats the long way: one column step, not C-1
    assert grid_distance(GridPos(0, 0), GridPos(0, 7), cfg) == pytest.approx(1.0)


def test_grid_distance_matches_tiling_oracle(rng):
    cfg = manual_grid(6, 8)
    for _ in range(200):
        a = GridPos(int(rng.integers(6)), int(rng.integers(8)))
        b = GridPos(int(rng.integers(6)), int(rng.integers(8)))
        assert grid_distance(a, b, cfg) == pytest.approx(
            oracle_grid_distance(a, b, cfg), rel=1e-12, abs=1e-12
        )


def test_grid_distance_metric_properties(rng):
    cfg = manual_grid(8, 10)
    pts = [GridPos(int(rng.integers(8)), int(rng.integers(10)))
           for _ in range(30)]
    for _ in range(200):
        a, b, c = (pts[int(rng.integers(30))] for _ in range(3))
        dab = grid_distance(a, b, cfg)
        assert dab == pytest.approx(grid_distance(b, a, cfg), abs=1e-12)
        assert (dab == 0.0) == (a == b)
        assert dab <= grid_distance(a, c, cfg) + grid_distance(c, b, cfg) + 1e-12


def test_cone_values():
    assert cone(0.0, 1.0) == 1.0
    assert cone(10.0, 1.0) == 0.0
    assert float(cone(1.0, 2.0)) == pytest.approx(1.0 - 1.0 / (4.0 * math.pi),
                                                  abs=1e-6)


def test_cone_monotonic():
    radii = np.linspace(0.0, 10.0, 101)
    for re in (1.0, 2.0, 5.0):
        vals = cone(radii, re)
        assert np.all(np.diff(vals) <= 1e-15)
        assert cone(0.0, re) == 1.0
    for r in (0.5, 2.0, 4.0):
        vals = [float(cone(r, re)) for re in (1.0, 2.0, 4.0, 8.0)]
        assert all(b >= a - 1e-15 for a, b in zip(vals, vals[1:]))


def test_solve_grid_size_closed_form_example():
    # A = 30, N = 100, alpha = 4 has a real root: C = 26, L = 16.
    cfg = solve_grid_size(p01=1.0, p99=30.0, n_points=100, alpha=4)
    assert (cfg.lines, cfg.columns) == (16, 26)
    assert cfg.lines * cfg.columns >= 400
    assert math.hypot(cfg.lines, cfg.columns) >= 30.0
    assert 0.5 < cfg.lines / cfg.columns <= 1.0
    assert cfg.rmax == 8


def test_solve_grid_size_approximation_branch():
    # A = 2 forces the aspect-driven search.
    cfg = solve_grid_size(p01=1.0, p99=2.0, n_points=1000, alpha=4, beta=0.8)
    assert cfg.lines * cfg.columns >= 4000
    assert math.hypot(cfg.lines, cfg.columns) >= 2.0
    assert 0.5 < cfg.lines / cfg.columns <= 1.0


def test_solve_grid_size_conditions_hold_randomized(rng):
    for _ in range(200):
        a_ratio = float(rng.uniform(1.1, 200.0))
        n = int(rng.integers(3, 3000))
        alpha = int(rng.choice([2, 3, 4, 6]))
        beta = float(rng.uniform(0.51, 1.0))
        cfg = solve_grid_size(p01=1.0, p99=a_ratio, n_points=n,
                              alpha=alpha, beta=beta)
        assert math.hypot(cfg.lines, cfg.columns) >= a_ratio
        assert cfg.lines * cfg.columns >= alpha * n
        assert 0.5 < cfg.lines / cfg.columns <= 1.0
        assert cfg.rmax == cfg.lines // 2
        assert 1 <= cfg.rmin < cfg.rmax


def test_solve_grid_size_errors():
    with pytest.raises(ValidationError):
        solve_grid_size(p01=0.0, p99=1.0, n_points=100)
    with pytest.raises(ValidationError):
        solve_grid_size(p01=1.0, p99=2.0, n_points=2)


def test_rmin_matches_enumeration_oracle():
    lines, columns = 16, 26
    need = 0.05 * lines * columns
    cells = [(r, c) for r in range(lines) for c in range(columns)]
    cfg = manual_grid(lines, columns)

    def count_within(radius):
        return sum(
            1 for cell in cells
            if oracle_grid_distance(GridPos(0, 0), GridPos(*cell), cfg) <= radius
        )

    expect = next(r for r in range(1, lines // 2) if count_within(r) >= need)
    assert rmin_from_grid(lines, columns) == expect
    assert count_within(expect) >= 21  # 5% of 416 cells, rounded up


def test_rmin_cap_and_bound():
    # Tiny grid: even rmax - 1 cannot cover 5%, so the cap applies.
    assert rmin_from_grid(4, 5) == 1
    for lines, columns in [(8, 10), (20, 25), (40, 50), (60, 75)]:
        rmin = rmin_from_grid(lines, columns)
        assert 1 <= rmin < lines // 2


def test_ring_positions_unit_length_is_hex_neighborhood():
    cfg = manual_grid(10, 12)
    for center in (GridPos(4, 5), GridPos(5, 5)):  # even and odd rows
        ring = ring_positions(center, 1.0, cfg)
        assert len(ring) == 6
        assert center not in ring
        for p in ring:
            assert grid_distance(center, p, cfg) == pytest.approx(1.0)


def test_ring_positions_match_enumeration_oracle(rng):
    cfg = manual_grid(8, 10)
    for _ in range(20):
        center = GridPos(int(rng.integers(8)), int(rng.integers(10)))
        length = float(rng.integers(1, cfg.rmax + 1))
        ring = set(ring_positions(center, length, cfg))
        expect = {
            GridPos(r, c)
            for r in range(8) for c in range(10)
            if (r, c) != center
            and abs(oracle_grid_distance(center, GridPos(r, c), cfg) - length) <= 0.5
        }
        assert ring == expect


def test_ring_positions_symmetric_and_nonempty():
    cfg = manual_grid(12, 14)
    for length in range(1, cfg.rmax + 1):
        assert ring_positions(GridPos(0, 0), float(length), cfg)
    a, b = GridPos(2, 3), GridPos(5, 9)
    for length in (2.0, 4.0):
        in_a = b in ring_positions(a, length, cfg)
        in_b = a in ring_positions(b, length, cfg)
        assert in_a == in_b
    with pytest.raises(ValidationError):
        ring_positions(GridPos(0, 0), 0.5, cfg)
