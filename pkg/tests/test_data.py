"""Dataset and dissimilarity-matrix construction, stats, and CSV round trips."""

import math

import numpy as np
import pytest

from swarmmap.data import (Dataset, DissimilarityMatrix,
                           euclidean_dissimilarity, load_dataset,
                           load_dissimilarity, save_dataset,
                           save_dissimilarity)
from swarmmap.errors import ParseError, ValidationError

from conftest import random_symmetric_matrix


def test_zero_distance_and_345_triangle():
    ds = Dataset(np.array([[0.0, 0.0], [0.0, 0.0], [3.0, 4.0]]))
    m = euclidean_dissimilarity(ds)
    assert m.values[0, 1] == 0.0
    assert m.values[0, 2] == pytest.approx(5.0, abs=1e-12)
    assert m.values[1, 2] == pytest.approx(5.0, abs=1e-12)


def test_euclidean_matches_per_pair_loop(rng):
    points = rng.random((10, 3)) * 4.0
    m = euclidean_dissimilarity(Dataset(points))
    for i in range(10):
        for j in range(10):
            expect = math.sqrt(sum((points[i, a] - points[j, a]) ** 2
                                   for a in range(3)))
            assert m.values[i, j] == pytest.approx(expect, rel=1e-12, abs=1e-12)


def test_dissimilarity_invariants(rng):
    m = euclidean_dissimilarity(Dataset(rng.random((20, 4))))
    assert np.array_equal(m.values, m.values.T)
    assert np.all(np.diag(m.values) == 0.0)
    assert m.values.min() >= 0.0
    assert m.p01 <= m.p99


def test_percentiles_match_sort_oracle(rng):
    for n in (5, 17, 50):
        m = euclidean_dissimilarity(Dataset(rng.random((n, 3))))
        tri = []
        for i in range(n):
            for j in range(i + 1, n):
                tri.append(m.values[i, j])
        tri.sort()

        def quantile(vals, q):
            # linear interpolation between order statistics
            pos = q * (len(vals) - 1)
            lo = int(math.floor(pos))
            hi = min(lo + 1, len(vals) - 1)
            frac = pos - lo
            return vals[lo] + frac * (vals[hi] - vals[lo])

        assert m.p01 == pytest.approx(quantile(tri, 0.01), rel=1e-12)
        assert m.p99 == pytest.approx(quantile(tri, 0.99), rel=1e-12)


def test_dataset_validation():
    with pytest.raises(ValidationError):
        Dataset(np.zeros((2, 2)))  # too few points
    with pytest.raises(ValidationError):
        Dataset(np.zeros((3, 0)))  # no features
    with pytest.raises(ValidationError, match="row 1, column 0"):
        Dataset(np.array([[0.0], [np.nan], [1.0]]))
    with pytest.raises(ValidationError):
        Dataset(np.zeros((4, 2)), labels=np.array([1, 2]))


def test_matrix_validation():
    with pytest.raises(ValidationError, match="not symmetric"):
        DissimilarityMatrix(np.array([[0.0, 1.0], [1.001, 0.0]]))
    with pytest.raises(ValidationError, match="diagonal"):
        DissimilarityMatrix(np.array([[0.5, 1.0], [1.0, 0.0]]))
    with pytest.raises(ValidationError, match="negative"):
        DissimilarityMatrix(np.array([[0.0, -1.0], [-1.0, 0.0]]))
    with pytest.raises(ValidationError, match="non-finite"):
        DissimilarityMatrix(np.array([[0.0, np.inf], [np.inf, 0.0]]))


def test_sizing_p01_substitution():
    # Duplicate points drive p01 to zero; sizing falls back to the smallest
    # positive distance.
    pts = np.zeros((20, 2))
    pts[10:] = [3.0, 0.0]
    pts[19] = [3.0, 0.5]
    m = euclidean_dissimilarity(Dataset(pts))
    assert m.p01 == 0.0
    assert m.sizing_p01() == pytest.approx(0.5)
    all_zero = DissimilarityMatrix(np.zeros((5, 5)))
    with pytest.raises(ValidationError, match="zero"):
        all_zero.sizing_p01()


def test_dataset_round_trip(tmp_path, rng):
    ds = Dataset(rng.random((5, 2)), labels=np.array([1, 1, 2, 2, 3]),
                 name="five")
    path = tmp_path / "five.csv"
    save_dataset(ds, path)
    back = load_dataset(path)
    assert np.array_equal(back.points, ds.points)
    assert np.array_equal(back.labels, ds.labels)


def test_dataset_round_trip_without_labels(tmp_path, rng):
    ds = Dataset(rng.random((6, 3)))
    save_dataset(ds, tmp_path / "p.csv")
    back = load_dataset(tmp_path / "p.csv")
    assert back.labels is None
    assert np.array_equal(back.points, ds.points)


def test_matrix_round_trip(tmp_path, rng):
    m = DissimilarityMatrix(random_symmetric_matrix(rng, 8))
    save_dissimilarity(m, tmp_path / "m.csv")
    back = load_dissimilarity(tmp_path / "m.csv")
    assert np.array_equal(back.values, m.values)


def test_asymmetric_matrix_rejected(tmp_path, rng):
    m = random_symmetric_matrix(rng, 4)
    m[1, 2] += 1e-3
    lines = "\n".join(",".join(repr(float(v)) for v in row) for row in m)
    path = tmp_path / "bad.csv"
    path.write_text(lines + "\n")
    with pytest.raises(ParseError, match="not symmetric"):
        load_dissimilarity(path)


def test_parse_errors_name_location(tmp_path):
    p = tmp_path / "ragged.csv"
    p.write_text("f0,f1\n1,2\n3\n")
    with pytest.raises(ParseError, match="ragged.csv:3"):
        load_dataset(p)
    p2 = tmp_path / "nonnum.csv"
    p2.write_text("f0,f1\n1,2\n3,x\n4,5\n")
    with pytest.raises(ParseError, match="nonnum.csv:3"):
        load_dataset(p2)
    with pytest.raises(ParseError, match="no such file"):
        load_dataset(tmp_path / "missing.csv")
    p3 = tmp_path / "rect.csv"
    p3.write_text("0,1,2\n1,0,3\n")
    with pytest.raises(ParseError, match="not square"):
        load_dissimilarity(p3)


def test_large_matrix_file_round_trip(tmp_path, rng):
    # Matching the scale of a real dissimilarity study input: 236 rows.
    m = DissimilarityMatrix(random_symmetric_matrix(rng, 236))
    save_dissimilarity(m, tmp_path / "big.csv")
    back = load_dissimilarity(tmp_path / "big.csv")
    assert back.n == 236
    assert np.array_equal(back.values, m.values)


def test_label_column_recognized_anywhere(tmp_path):
    p = tmp_path / "mid.csv"
    p.write_text("f0,label,f1\n1,7,2\n3,8,4\n5,9,6\n")
    ds = load_dataset(p)
    assert np.array_equal(ds.labels, [7, 8, 9])
    assert np.array_equal(ds.points, [[1, 2], [3, 4], [5, 6]])
