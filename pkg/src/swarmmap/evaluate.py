"""Scoring and the multi-trial benchmark harness.

Cluster labels are arbitrary, so accuracy is taken over the best bijective
relabeling of predicted clusters (solved as an assignment problem on the
confusion matrix, which attains the same optimum as exhaustive permutation
search).  The error rate is exactly 1 - accuracy; 50% marks the level of
error attributable to chance in two-class summaries and is annotated in
the reports.
"""

from __future__ import annotations

import csv
import json
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.optimize import linear_sum_assignment

from .cluster import swarm_cluster, hierarchical_cluster
from .data import Dataset, euclidean_dissimilarity
from .datasets import generate_benchmark
from .errors import ValidationError

CHANCE_ERROR_LEVEL = 0.5

DEFAULT_TRIALS = 10


def _confusion(pred: np.ndarray, truth: np.ndarray):
    pred_ids, pred_inv = np.unique(pred, return_inverse=True)
    true_ids, true_inv = np.unique(truth, return_inverse=True)
    m = np.zeros((pred_ids.size, true_ids.size), dtype=np.int64)
    np.add.at(m, (pred_inv, true_inv), 1)
    return m, pred_ids, true_ids


def best_label_assignment(pred, truth):
    """Bijective matching of predicted to true cluster ids maximizing the
    number of agreeing points; returns (n_matched, mapping pred_id->true_id)."""
    pred = np.asarray(pred)
    truth = np.asarray(truth)
    if pred.size == 0 or truth.size == 0:
        raise ValidationError("empty label vectors")
    if pred.shape != truth.shape:
        raise ValidationError(
            f"label vectors differ in length: {pred.shape} vs {truth.shape}"
        )
    m, pred_ids, true_ids = _confusion(pred, truth)
    side = max(m.shape)
    padded = np.zeros((side, side), dtype=np.int64)
    padded[: m.shape[0], : m.shape[1]] = m
    rows, cols = linear_sum_assignment(padded, maximize=True)
    matched = int(padded[rows, cols].sum())
    mapping = {}
    for r, c in zip(rows, cols):
        if r < m.shape[0] and c < m.shape[1]:
            mapping[int(pred_ids[r])] = int(true_ids[c])
    return matched, mapping


def best_permutation_accuracy(pred, truth) -> float:
    """Fraction of points matched under the best label bijection."""
    pred = np.asarray(pred)
    matched, _ = best_label_assignment(pred, truth)
    return matched / pred.size


def error_rate(pred, truth) -> float:
    return 1.0 - best_permutation_accuracy(pred, truth)


def align_labels(pred, truth) -> np.ndarray:
    """Rewrite pred ids into truth ids per the best assignment; unmatched
    predicted clusters keep fresh ids beyond the truth range."""
    pred = np.asarray(pred)
    truth = np.asarray(truth)
    _, mapping = best_label_assignment(pred, truth)
    spare = int(truth.max()) + 1 if truth.size else 1
    out = np.empty_like(pred)
    fresh: dict[int, int] = {}
    for i, p in enumerate(pred):
        p = int(p)
        if p in mapping:
            out[i] = mapping[p]
        else:
            if p not in fresh:
                fresh[p] = spare
                spare += 1
            out[i] = fresh[p]
    return out


def f1_score(pred, truth) -> float:
    """Macro-averaged per-class F1 after optimal label alignment.

    Classes absent from both vectors are skipped; a class with no overlap
    at all contributes 0.
    """
    truth = np.asarray(truth)
    aligned = align_labels(pred, truth)
    classes = sorted(set(aligned.tolist()) | set(truth.tolist()))
    scores = []
    for c in classes:
        in_pred = aligned == c
        in_true = truth == c
        if not in_pred.any() and not in_true.any():
            continue
        tp = float(np.count_nonzero(in_pred & in_true))
        p_den = float(np.count_nonzero(in_pred))
        r_den = float(np.count_nonzero(in_true))
        if tp == 0.0:
            scores.append(0.0)
            continue
        precision = tp / p_den
        recall = tp / r_den
        scores.append(2.0 * precision * recall / (precision + recall))
    return float(np.mean(scores)) if scores else 0.0


def baseline_kmeans(ds: Dataset, k: int, seed: int, max_iter: int = 100) -> np.ndarray:
    """Lloyd iterations from k random data points until the assignment stops
    changing (or max_iter).  Empty clusters are re-seeded with the point
    farthest from its centroid."""
    x = ds.points
    n = x.shape[0]
    if k > n:
        raise ValidationError(f"k={k} exceeds {n} points")
    rng = np.random.default_rng(seed)
    centroids = x[rng.choice(n, size=k, replace=False)].copy()
    assign = np.full(n, -1)
    for _ in range(max_iter):
        d2 = ((x[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
        new_assign = d2.argmin(axis=1)
        if np.array_equal(new_assign, assign):
            break
        assign = new_assign
        for c in range(k):
            members = x[assign == c]
            if members.shape[0] == 0:
                worst = int(np.argmax(d2[np.arange(n), assign]))
                centroids[c] = x[worst]
                assign[worst] = c
            else:
                centroids[c] = members.mean(axis=0)
    return assign + 1


def baseline_single_linkage(dmatrix, k: int) -> np.ndarray:
    """Single linkage on the raw dissimilarities (no projection involved)."""
    return hierarchical_cluster(dmatrix, k, "connected").labels


@dataclass
class TrialReport:
    dataset: str
    algorithm: str
    seed: int
    k: int
    error_rate: float
    f1: float
    runtime_s: float

    def __post_init__(self):
        if not (0.0 <= self.error_rate <= 1.0):
            raise ValidationError(f"error_rate out of range: {self.error_rate}")
        if not (0.0 <= self.f1 <= 1.0):
            raise ValidationError(f"f1 out of range: {self.f1}")

    def key(self) -> tuple:
        return (self.dataset, self.algorithm, self.seed)

    def to_dict(self) -> dict:
        return {
            "dataset": self.dataset,
            "algorithm": self.algorithm,
            "seed": self.seed,
            "k": self.k,
            "error_rate": self.error_rate,
            "f1": self.f1,
            "runtime_s": self.runtime_s,
        }


@dataclass
class BenchmarkCell:
    """One dataset/algorithm pairing to run over several seeds."""

    dataset: str
    algorithm: str  # "swarm", "kmeans", or "single_linkage"
    k: int
    mode: str = "compact"  # only used by the swarm pipeline
    n_points: int | None = None

    def to_dict(self) -> dict:
        return {
            "dataset": self.dataset,
            "algorithm": self.algorithm,
            "k": self.k,
            "mode": self.mode,
            "n_points": self.n_points,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "BenchmarkCell":
        return cls(
            dataset=d["dataset"],
            algorithm=d["algorithm"],
            k=int(d["k"]),
            mode=d.get("mode", "compact"),
            n_points=d.get("n_points"),
        )


@dataclass
class BenchmarkSuite:
    cells: list[BenchmarkCell]
    trials: int = DEFAULT_TRIALS
    seeds: list[int] | None = None

    def trial_seeds(self) -> list[int]:
        if self.seeds is not None:
            if len(set(self.seeds)) != len(self.seeds):
                raise ValidationError("trial seeds must be distinct")
            return list(self.seeds)
        return list(range(self.trials))

    @classmethod
    def from_json_file(cls, path: str | Path) -> "BenchmarkSuite":
        doc = json.loads(Path(path).read_text())
        return cls(
            cells=[BenchmarkCell.from_dict(c) for c in doc["cells"]],
            trials=int(doc.get("trials", DEFAULT_TRIALS)),
            seeds=doc.get("seeds"),
        )


def run_trial(cell: BenchmarkCell, seed: int) -> TrialReport:
    ds = generate_benchmark(cell.dataset, seed=seed, n_points=cell.n_points)
    if ds.labels is None:
        raise ValidationError(f"{cell.dataset} has no ground truth to score")
    t0 = time.perf_counter()
    if cell.algorithm == "swarm":
        pred = swarm_cluster(ds, cell.k, cell.mode, seed).clusters.labels
    elif cell.algorithm == "kmeans":
        pred = baseline_kmeans(ds, cell.k, seed)
    elif cell.algorithm == "single_linkage":
        pred = baseline_single_linkage(euclidean_dissimilarity(ds), cell.k)
    else:
        raise ValidationError(f"unknown algorithm {cell.algorithm!r}")
    runtime = time.perf_counter() - t0
    return TrialReport(
        dataset=cell.dataset,
        algorithm=cell.algorithm,
        seed=seed,
        k=cell.k,
        error_rate=error_rate(pred, ds.labels),
        f1=f1_score(pred, ds.labels),
        runtime_s=runtime,
    )


def _load_existing(path: Path) -> dict[tuple, dict]:
    done = {}
    if path.exists():
        for line in path.read_text().splitlines():
            if not line.strip():
                continue
            doc = json.loads(line)
            done[(doc["dataset"], doc["algorithm"], doc["seed"])] = doc
    return done


def run_benchmark(suite: BenchmarkSuite, out_dir: str | Path,
                  progress=None) -> list[dict]:
    """Run every (cell, seed) trial, appending JSON lines as results arrive.

    Completed trials found in an existing results file are skipped, so an
    interrupted benchmark resumes where it stopped.  Per-trial failures are
    recorded with an "error" field instead of aborting the run.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    results_path = out_dir / "results.jsonl"
    done = _load_existing(results_path)
    reports: list[dict] = []
    seeds = suite.trial_seeds()
    with results_path.open("a") as fh:
        for cell in suite.cells:
            for seed in seeds:
                key = (cell.dataset, cell.algorithm, seed)
                if key in done:
                    reports.append(done[key])
                    continue
                try:
                    doc = run_trial(cell, seed).to_dict()
                except ValidationError as exc:
                    doc = {
                        "dataset": cell.dataset,
                        "algorithm": cell.algorithm,
                        "seed": seed,
                        "k": cell.k,
                        "error": str(exc),
                    }
                fh.write(json.dumps(doc, sort_keys=True) + "\n")
                fh.flush()
                reports.append(doc)
                if progress is not None:
                    progress(doc)
    write_summary(reports, out_dir / "summary.csv")
    return reports


def summarize(reports: list[dict]) -> list[dict]:
    """Median and quartiles of error rate per (dataset, algorithm)."""
    groups: dict[tuple, list[dict]] = {}
    for r in reports:
        if "error" in r:
            continue
        groups.setdefault((r["dataset"], r["algorithm"]), []).append(r)
    rows = []
    for (dataset, algorithm), rs in sorted(groups.items()):
        errs = np.array([r["error_rate"] for r in rs])
        f1s = np.array([r["f1"] for r in rs])
        rows.append({
            "dataset": dataset,
            "algorithm": algorithm,
            "trials": len(rs),
            "error_q1": float(np.quantile(errs, 0.25)),
            "error_median": float(np.median(errs)),
            "error_q3": float(np.quantile(errs, 0.75)),
            "f1_median": float(np.median(f1s)),
            "chance_error_level": CHANCE_ERROR_LEVEL,
        })
    return rows


def write_summary(reports: list[dict], path: str | Path) -> None:
    rows = summarize(reports)
    fields = ["dataset", "algorithm", "trials", "error_q1", "error_median",
              "error_q3", "f1_median", "chance_error_level"]
    with Path(path).open("w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=fields)
        w.writeheader()
        w.writerows(rows)
