"""Agent-based projection of a dissimilarity matrix onto the toroidal grid.

Every data row is carried by one bot occupying a grid cell (at most one bot
per cell).  A bot's payoff is an offset constant minus the
neighborhood-weighted mean of its input-space distances to the bots it can
currently "smell"; bots greedily relocate to whichever of a handful of
sampled ring positions maximizes that payoff.  The neighborhood radius
anneals from rmax down to rmin, moving on only when the summed payoff of
the whole swarm stops changing (the equilibrium of one round of the game).

Randomness comes from a single seeded generator with a documented draw
order per iteration: (1) one permutation of all bots, whose first m entries
are the sampled movers in processing order; (2) one (m, alpha) batch of
candidate jump lengths, uniform over {1..rmax}; (3) one (m, alpha) batch of
uniforms, where slot (i, a) picks index floor(u * n_free) among the free
ring cells of bot i's a-th candidate (a draw is consumed even if the ring
has no free cell).  Runs are therefore bit-reproducible per seed.

The per-iteration decision loop is compiled with numba; its arithmetic is
plain IEEE double in a fixed order, so results are identical across runs.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from numba import njit

from .data import DissimilarityMatrix
from .errors import ValidationError
from .grid import (RING_BAND, ROW_PITCH, GridConfig, GridPos,
                   cell_distance_table, solve_grid_size)

PROJECTION_FORMAT_VERSION = 1

# Epoch termination: the happiness sum must stay within TOL_REL * s0 for
# PATIENCE consecutive iterations; MAX_ITER_FACTOR * n is a safety bound.
TOL_REL = 1e-4
PATIENCE = 3
MAX_ITER_FACTOR = 50

HARD_CAP = 10000


@njit(cache=True)
def _scent_at(x0, y0, j, xs, ys, drow, columns, height, inv_support, s0):
    """Payoff of bot j placed at (x0, y0), every other bot where it stands."""
    denom = 0.0
    numer = 0.0
    n = xs.shape[0]
    for l in range(n):
        if l == j:
            continue
        dx = abs(xs[l] - x0)
        if columns - dx < dx:
            dx = columns - dx
        dy = abs(ys[l] - y0)
        if height - dy < dy:
            dy = height - dy
        w = 1.0 - (dx * dx + dy * dy) * inv_support
        if w > 0.0:
            denom += w
            numer += w * drow[l]
    if denom > 0.0:
        return s0 - numer / denom
    return s0


@njit(cache=True)
def _happiness_kernel(xs, ys, dmatrix, columns, height, inv_support, s0):
    """Sum of all payoffs; pairs are visited once and accumulated to both ends."""
    n = xs.shape[0]
    denom = np.zeros(n)
    numer = np.zeros(n)
    for j in range(n):
        xj = xs[j]
        yj = ys[j]
        for l in range(j + 1, n):
            dx = abs(xs[l] - xj)
            if columns - dx < dx:
                dx = columns - dx
            dy = abs(ys[l] - yj)
            if height - dy < dy:
                dy = height - dy
            w = 1.0 - (dx * dx + dy * dy) * inv_support
            if w > 0.0:
                d = dmatrix[j, l]
                denom[j] += w
                numer[j] += w * d
                denom[l] += w
                numer[l] += w * d
    total = 0.0
    for j in range(n):
        if denom[j] > 0.0:
            total += s0 - numer[j] / denom[j]
        else:
            total += s0
    return total


@njit(cache=True)
def _abs_wmean_sum(xs, ys, dmatrix, columns, height, inv_support):
    """Sum over bots of |weighted mean distance| (the offset constant)."""
    n = xs.shape[0]
    denom = np.zeros(n)
    numer = np.zeros(n)
    for j in range(n):
        xj = xs[j]
        yj = ys[j]
        for l in range(j + 1, n):
            dx = abs(xs[l] - xj)
            if columns - dx < dx:
                dx = columns - dx
            dy = abs(ys[l] - yj)
            if height - dy < dy:
                dy = height - dy
            w = 1.0 - (dx * dx + dy * dy) * inv_support
            if w > 0.0:
                d = dmatrix[j, l]
                denom[j] += w
                numer[j] += w * d
                denom[l] += w
                numer[l] += w * d
    total = 0.0
    for j in range(n):
        if denom[j] > 0.0:
            total += abs(numer[j] / denom[j])
    return total


@njit(cache=True)
def _iteration_kernel(rows, cols, xs, ys, occupancy, dmatrix,
                      ring_rows, ring_cols, ring_start, ring_len,
                      order, lengths, pick_u,
                      lines, columns, height, inv_support, s0):
    """Process the sampled bots in order, moving each to its best position.

    Occupancy updates immediately, so later bots see earlier moves and no
    two bots ever share a cell.  Ties keep the current position, then the
    lowest candidate index.  Returns the number of bots moved.
    """
    alpha = lengths.shape[1]
    cand_r = np.empty(alpha, np.int64)
    cand_c = np.empty(alpha, np.int64)
    moved = 0
    for bi in range(order.shape[0]):
        j = order[bi]
        r0 = rows[j]
        c0 = cols[j]
        parity = r0 & 1
        ncand = 0
        for a in range(alpha):
            ell = lengths[bi, a]
            start = ring_start[parity, ell]
            count = ring_len[parity, ell]
            # First pass: count free ring cells not already chosen.
            nfree = 0
            for t in range(start, start + count):
                rr = (ring_rows[t] + r0 - parity) % lines
                cc = (ring_cols[t] + c0) % columns
                if occupancy[rr, cc] >= 0:
                    continue
                dup = False
                for q in range(ncand):
                    if cand_r[q] == rr and cand_c[q] == cc:
                        dup = True
                        break
                if not dup:
                    nfree += 1
            if nfree == 0:
                continue
            kpick = int(pick_u[bi, a] * nfree)
            if kpick >= nfree:
                kpick = nfree - 1
            # Second pass: take the kpick-th free cell.
            idx = 0
            for t in range(start, start + count):
                rr = (ring_rows[t] + r0 - parity) % lines
                cc = (ring_cols[t] + c0) % columns
                if occupancy[rr, cc] >= 0:
                    continue
                dup = False
                for q in range(ncand):
                    if cand_r[q] == rr and cand_c[q] == cc:
                        dup = True
                        break
                if dup:
                    continue
                if idx == kpick:
                    cand_r[ncand] = rr
                    cand_c[ncand] = cc
                    ncand += 1
                    break
                idx += 1
        if ncand == 0:
            continue  # every reachable ring cell occupied: the bot stays
        best_scent = _scent_at(xs[j], ys[j], j, xs, ys, dmatrix[j],
                               columns, height, inv_support, s0)
        best = -1
        for q in range(ncand):
            px = cand_c[q] + 0.5 * (cand_r[q] & 1)
            py = cand_r[q] * ROW_PITCH
            sc = _scent_at(px, py, j, xs, ys, dmatrix[j],
                           columns, height, inv_support, s0)
            if sc > best_scent:
                best_scent = sc
                best = q
        if best >= 0:
            occupancy[r0, c0] = -1
            occupancy[cand_r[best], cand_c[best]] = j
            rows[j] = cand_r[best]
            cols[j] = cand_c[best]
            xs[j] = cand_c[best] + 0.5 * (cand_r[best] & 1)
            ys[j] = cand_r[best] * ROW_PITCH
            moved += 1
    return moved


@dataclass
class EpochLog:
    radius: int
    iterations: int
    final_happiness: float
    hit_cap: bool

    def to_dict(self) -> dict:
        return {
            "radius": self.radius,
            "iterations": self.iterations,
            "final_happiness": self.final_happiness,
            "hit_cap": self.hit_cap,
        }


@dataclass
class EngineState:
    """Mutable swarm state: one bot per data row, one cell per bot."""

    cfg: GridConfig
    dmatrix: np.ndarray  # (n, n) input-space distances
    rows: np.ndarray
    cols: np.ndarray
    rng: np.random.Generator
    seed: int
    radius: int = 0
    s0: float = 0.0
    epoch_index: int = 0
    happiness_history: list = field(default_factory=list)
    epoch_log: list = field(default_factory=list)

    def __post_init__(self):
        n = self.dmatrix.shape[0]
        self.rows = np.ascontiguousarray(self.rows, dtype=np.int64)
        self.cols = np.ascontiguousarray(self.cols, dtype=np.int64)
        self.dmatrix = np.ascontiguousarray(self.dmatrix, dtype=np.float64)
        self.xs = self.cols + 0.5 * (self.rows % 2)
        self.ys = self.rows * ROW_PITCH
        self.occupancy = np.full((self.cfg.lines, self.cfg.columns), -1, dtype=np.int64)
        if len(set(zip(self.rows.tolist(), self.cols.tolist()))) != n:
            raise ValidationError("two bots share a grid cell")
        self.occupancy[self.rows, self.cols] = np.arange(n)
        self._build_rings()

    def _build_rings(self):
        """Flattened ring cell tables per row parity and jump length.

        ring cells for (parity p, length ell) sit at
        ring_rows/ring_cols[ring_start[p, ell] : +ring_len[p, ell]], as
        indices into the distance table of cell (p, 0); a center (r0, c0)
        translates entry (tr, tc) to ((tr + r0 - p) % L, (tc + c0) % C).
        """
        rmax = self.cfg.rmax
        flat_r, flat_c = [], []
        self.ring_start = np.zeros((2, rmax + 1), dtype=np.int64)
        self.ring_len = np.zeros((2, rmax + 1), dtype=np.int64)
        pos = 0
        for parity in (0, 1):
            table = cell_distance_table(self.cfg, parity)
            for length in range(1, rmax + 1):
                sel = np.abs(table - length) <= RING_BAND
                sel[parity, 0] = False
                tr, tc = np.nonzero(sel)
                self.ring_start[parity, length] = pos
                self.ring_len[parity, length] = tr.size
                flat_r.append(tr)
                flat_c.append(tc)
                pos += tr.size
        self.ring_rows = np.concatenate(flat_r).astype(np.int64)
        self.ring_cols = np.concatenate(flat_c).astype(np.int64)

    @property
    def n(self) -> int:
        return self.dmatrix.shape[0]

    def positions(self) -> list[GridPos]:
        return [GridPos(int(r), int(c)) for r, c in zip(self.rows, self.cols)]

    def position_digest(self) -> str:
        h = hashlib.sha1()
        h.update(self.rows.tobytes())
        h.update(self.cols.tobytes())
        return h.hexdigest()

    def check_occupancy(self) -> bool:
        """Occupancy grid and bot positions agree, with no shared cells."""
        occ = np.full((self.cfg.lines, self.cfg.columns), -1, dtype=np.int64)
        occ[self.rows, self.cols] = np.arange(self.n)
        if not np.array_equal(occ, self.occupancy):
            return False
        return int(np.count_nonzero(self.occupancy >= 0)) == self.n


def chance(radius: int, cfg: GridConfig) -> float:
    """Fraction of bots sampled per iteration: 0.5 at rmax down to 0.05 at rmin."""
    if not (cfg.rmin <= radius <= cfg.rmax):
        raise ValidationError(f"radius {radius} outside [{cfg.rmin}, {cfg.rmax}]")
    t = (radius - cfg.rmin) / (cfg.rmax - cfg.rmin)
    return 0.05 + 0.45 * t


def scent(state: EngineState, j: int, radius: int | None = None,
          s0: float | None = None, at: GridPos | None = None,
          neighborhood=None) -> float:
    """Payoff of bot j, optionally evaluated at a hypothetical cell.

    ``neighborhood`` may replace the default cone kernel by any function
    mapping (distances, radius) -> weights in [0, 1]; the weighted-mean
    payoff form stays the same.
    """
    cfg = state.cfg
    radius = state.radius if radius is None else radius
    s0 = state.s0 if s0 is None else s0
    if at is None:
        x0, y0 = float(state.xs[j]), float(state.ys[j])
    else:
        x0 = at[1] + 0.5 * (at[0] % 2)
        y0 = at[0] * ROW_PITCH
    if neighborhood is None:
        return float(_scent_at(x0, y0, j, state.xs, state.ys, state.dmatrix[j],
                               float(cfg.columns), cfg.height,
                               1.0 / (math.pi * radius * radius), s0))
    dx = np.abs(state.xs - x0)
    np.minimum(dx, cfg.columns - dx, out=dx)
    dy = np.abs(state.ys - y0)
    np.minimum(dy, cfg.height - dy, out=dy)
    w = np.asarray(neighborhood(np.hypot(dx, dy), radius), dtype=float)
    w[j] = 0.0
    denom = w.sum()
    if denom <= 0.0:
        return float(s0)
    return float(s0 - (w @ state.dmatrix[j]) / denom)


def all_scents(state: EngineState, radius: int | None = None,
               s0: float | None = None) -> np.ndarray:
    """Payoff of every bot at the current configuration."""
    radius = state.radius if radius is None else radius
    s0 = state.s0 if s0 is None else s0
    return np.array([scent(state, j, radius=radius, s0=s0)
                     for j in range(state.n)])


def happiness(state: EngineState, radius: int | None = None) -> float:
    """Summed payoff of the swarm (the quantity whose plateau ends an epoch)."""
    radius = state.radius if radius is None else radius
    return float(_happiness_kernel(state.xs, state.ys, state.dmatrix,
                                   float(state.cfg.columns), state.cfg.height,
                                   1.0 / (math.pi * radius * radius), state.s0))


def compute_s0(state: EngineState) -> float:
    """Offset constant: summed absolute zero-offset payoffs at rmax,
    evaluated once on the initial configuration and frozen for the run."""
    rmax = state.cfg.rmax
    return float(_abs_wmean_sum(state.xs, state.ys, state.dmatrix,
                                float(state.cfg.columns), state.cfg.height,
                                1.0 / (math.pi * rmax * rmax)))


def propose_and_move(state: EngineState, sampled: np.ndarray) -> int:
    """One iteration over the given bots (in order); returns how many moved."""
    sampled = np.ascontiguousarray(sampled, dtype=np.int64)
    m = sampled.shape[0]
    lengths = state.rng.integers(1, state.cfg.rmax, size=(m, state.cfg.alpha),
                                 endpoint=True)
    pick_u = state.rng.random((m, state.cfg.alpha))
    return int(_iteration_kernel(
        state.rows, state.cols, state.xs, state.ys, state.occupancy,
        state.dmatrix, state.ring_rows, state.ring_cols,
        state.ring_start, state.ring_len,
        sampled, lengths, pick_u,
        state.cfg.lines, state.cfg.columns, state.cfg.height,
        1.0 / (math.pi * state.radius * state.radius), state.s0,
    ))


def run_epoch(state: EngineState, tol_rel: float = TOL_REL,
              patience: int = PATIENCE,
              max_iter_factor: int = MAX_ITER_FACTOR,
              trace: list | None = None) -> EpochLog:
    """Iterate at the current radius until the happiness sum plateaus.

    The plateau is the discrete reading of a vanishing derivative: the
    absolute change must stay within tol_rel * s0 for ``patience``
    consecutive iterations.  ``max_iter_factor * n`` iterations is a hard
    safety bound; hitting it is recorded as a non-equilibrium exit.
    """
    n = state.n
    m = max(1, round(chance(state.radius, state.cfg) * n))
    tol_abs = tol_rel * state.s0
    max_iter = max_iter_factor * n
    s_prev = happiness(state)
    state.happiness_history = [s_prev]
    streak = 0
    iterations = 0
    while iterations < max_iter:
        iterations += 1
        order = state.rng.permutation(n)[:m]
        propose_and_move(state, order)
        s = happiness(state)
        state.happiness_history.append(s)
        if trace is not None:
            trace.append(state.position_digest())
        streak = streak + 1 if abs(s - s_prev) <= tol_abs else 0
        s_prev = s
        if streak >= patience:
            break
    log = EpochLog(
        radius=state.radius,
        iterations=iterations,
        final_happiness=s_prev,
        hit_cap=streak < patience,
    )
    state.epoch_log.append(log)
    state.epoch_index += 1
    return log


def initial_state(dmatrix: DissimilarityMatrix, seed: int,
                  cfg: GridConfig | None = None, alpha: int = 4,
                  beta: float = 0.8) -> EngineState:
    """Size the grid, scatter the bots on distinct random cells, freeze s0."""
    d = dmatrix.values
    n = d.shape[0]
    if n < 3:
        raise ValidationError(f"need at least 3 data rows, got {n}")
    if cfg is None:
        cfg = solve_grid_size(dmatrix.sizing_p01(), dmatrix.p99, n, alpha, beta)
    if cfg.n_cells < n:
        raise ValidationError(f"grid {cfg.lines}x{cfg.columns} cannot hold {n} bots")
    rng = np.random.default_rng(seed)
    cells = rng.permutation(cfg.n_cells)[:n]
    rows, cols = np.divmod(cells, cfg.columns)
    state = EngineState(
        cfg=cfg,
        dmatrix=d,
        rows=rows,
        cols=cols,
        rng=rng,
        seed=seed,
        radius=cfg.rmax,
    )
    state.s0 = compute_s0(state)
    return state


@dataclass
class Projection:
    """Final bot coordinates plus everything needed to reproduce the run."""

    grid: GridConfig
    seed: int
    rows: np.ndarray
    cols: np.ndarray
    epoch_log: list
    trace: list | None = None

    @property
    def n(self) -> int:
        return self.rows.shape[0]

    @property
    def coords(self) -> np.ndarray:
        """(n, 2) Cartesian coordinates in the hex embedding."""
        x = self.cols + 0.5 * (self.rows % 2)
        y = self.rows * ROW_PITCH
        return np.stack([x, y], axis=1)

    def to_json_dict(self) -> dict:
        coords = self.coords
        return {
            "format_version": PROJECTION_FORMAT_VERSION,
            "seed": self.seed,
            "grid": self.grid.to_dict(),
            "bots": [
                {
                    "data_index": int(i),
                    "row": int(self.rows[i]),
                    "col": int(self.cols[i]),
                    "x": float(coords[i, 0]),
                    "y": float(coords[i, 1]),
                }
                for i in range(self.n)
            ],
            "epochs": [e.to_dict() for e in self.epoch_log],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=1, sort_keys=True)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json() + "\n")

    @classmethod
    def from_json_dict(cls, doc: dict) -> "Projection":
        if doc.get("format_version") != PROJECTION_FORMAT_VERSION:
            raise ValidationError(
                f"unsupported projection format {doc.get('format_version')!r}"
            )
        bots = sorted(doc["bots"], key=lambda b: b["data_index"])
        rows = np.array([b["row"] for b in bots], dtype=np.int64)
        cols = np.array([b["col"] for b in bots], dtype=np.int64)
        epochs = [
            EpochLog(e["radius"], e["iterations"], e["final_happiness"], e["hit_cap"])
            for e in doc.get("epochs", [])
        ]
        return cls(
            grid=GridConfig.from_dict(doc["grid"]),
            seed=int(doc["seed"]),
            rows=rows,
            cols=cols,
            epoch_log=epochs,
        )

    @classmethod
    def load(cls, path: str | Path) -> "Projection":
        return cls.from_json_dict(json.loads(Path(path).read_text()))


def swarm_project(dmatrix: DissimilarityMatrix, seed: int, *,
                   alpha: int = 4, beta: float = 0.8,
                   cfg: GridConfig | None = None,
                   tol_rel: float = TOL_REL, patience: int = PATIENCE,
                   max_iter_factor: int = MAX_ITER_FACTOR,
                   hard_cap: int = HARD_CAP,
                   record_trace: bool = False,
                   on_epoch=None) -> Projection:
    """Run the full annealing schedule and return the projection.

    Deterministic for a given (dmatrix, seed).  ``on_epoch(state, log)`` is
    called after every epoch, e.g. for instrumentation; ``record_trace``
    keeps a digest of all bot positions after every iteration.
    """
    n = dmatrix.n
    if n > hard_cap:
        raise ValidationError(
            f"{n} rows exceeds the configured cap of {hard_cap}; subsample the "
            "data or raise hard_cap explicitly (runtime grows steeply with n)"
        )
    state = initial_state(dmatrix, seed, cfg=cfg, alpha=alpha, beta=beta)
    trace: list | None = [state.position_digest()] if record_trace else None
    for radius in range(state.cfg.rmax, state.cfg.rmin - 1, -1):
        state.radius = radius
        log = run_epoch(state, tol_rel=tol_rel, patience=patience,
                        max_iter_factor=max_iter_factor, trace=trace)
        if on_epoch is not None:
            on_epoch(state, log)
    return Projection(
        grid=state.cfg,
        seed=seed,
        rows=state.rows.copy(),
        cols=state.cols.copy(),
        epoch_log=list(state.epoch_log),
        trace=trace,
    )
