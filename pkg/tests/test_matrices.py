import numpy as np
import pytest

from umtk.matrices import (
    CoordinateMatrix,
    DissimilarityMatrix,
    FrequencyMatrix,
    UltrametricMatrix,
    euclidean_distances,
)
from umtk import matrixio

from .oracles import brute_pairwise


def test_dissimilarity_accepts_valid():
    d = DissimilarityMatrix(np.array([[0.0, 1.0], [1.0, 2.0 - 2.0]]))
    assert d.n == 2
    assert d.condensed().tolist() == [1.0]


def test_dissimilarity_rejects_asymmetry():
    with pytest.raises(ValueError, match="symmetric"):
        DissimilarityMatrix(np.array([[0.0, 1.0], [1.0 + 1e-15, 0.0]]))


def test_dissimilarity_rejects_nonzero_diagonal():
    with pytest.raises(ValueError, match="diagonal"):
        DissimilarityMatrix(np.array([[0.1, 1.0], [1.0, 0.0]]))


def test_dissimilarity_rejects_negative_and_nonfinite():
    with pytest.raises(ValueError, match="nonnegative"):
        DissimilarityMatrix(np.array([[0.0, -1.0], [-1.0, 0.0]]))
    with pytest.raises(ValueError, match="finite"):
        DissimilarityMatrix(np.array([[0.0, np.nan], [np.nan, 0.0]]))


def test_dissimilarity_rejects_nonsquare():
    with pytest.raises(ValueError, match="square"):
        DissimilarityMatrix(np.zeros((2, 3)))


def test_ultrametric_container_allows_negative_entries():
    # looser container for intermediate level matrices
    u = UltrametricMatrix(np.array([[0.0, -1.0], [-1.0, 0.0]]))
    assert u.n == 2


def test_labels_default_and_explicit():
    d = DissimilarityMatrix(np.zeros((3, 3)), labels=["a", "b", "c"])
    assert d.labels == ["a", "b", "c"]
    d2 = DissimilarityMatrix(np.zeros((3, 3)))
    assert d2.labels == ["x1", "x2", "x3"]
    with pytest.raises(ValueError):
        DissimilarityMatrix(np.zeros((3, 3)), labels=["a", "b"])


def test_condensed_is_row_major_upper_triangle():
    vals = np.array([[0.0, 1.0, 2.0], [1.0, 0.0, 3.0], [2.0, 3.0, 0.0]])
    d = DissimilarityMatrix(vals)
    assert d.condensed().tolist() == [1.0, 2.0, 3.0]


def test_frequency_matrix_validation():
    with pytest.raises(ValueError, match="nonnegative"):
        FrequencyMatrix(np.array([[0.0, -1.0]]))
    with pytest.raises(ValueError, match="grand total"):
        FrequencyMatrix(np.zeros((2, 2)))
    f = FrequencyMatrix(np.array([[1.0, 0.0], [0.0, 2.0]]))
    assert f.row_labels == ["r1", "r2"]
    assert f.col_labels == ["c1", "c2"]


def test_euclidean_distances_matches_bruteforce(rng):
    pts = rng.normal(size=(12, 4))
    got = euclidean_distances(CoordinateMatrix(pts))
    expected = brute_pairwise(pts)
    np.testing.assert_allclose(got.values, expected, rtol=1e-12, atol=0)
    np.testing.assert_array_equal(got.values, got.values.T)


def test_euclidean_distances_keeps_labels(rng):
    pts = CoordinateMatrix(rng.normal(size=(4, 2)), ["w", "x", "y", "z"])
    d = euclidean_distances(pts)
    assert d.labels == ["w", "x", "y", "z"]


def test_dissimilarity_roundtrip(tmp_path):
    d = DissimilarityMatrix(
        np.array([[0.0, 1.5, 2.25], [1.5, 0.0, 0.125], [2.25, 0.125, 0.0]]),
        labels=["a", "b", "c"],
    )
    path = tmp_path / "d.csv"
    matrixio.write_dissimilarity(path, d, header_lines=["note: test"])
    back = matrixio.read_dissimilarity(path)
    np.testing.assert_array_equal(back.values, d.values)
    assert back.labels == d.labels


def test_roundtrip_is_exact_for_awkward_floats(tmp_path, rng):
    # .17g output must survive a write/read cycle bit for bit
    vals = rng.uniform(0.001, 1000.0, size=(6, 6))
    d = np.triu(vals, 1)
    d = d + d.T
    mat = DissimilarityMatrix(d)
    path = tmp_path / "d.csv"
    matrixio.write_dissimilarity(path, mat)
    back = matrixio.read_dissimilarity(path)
    np.testing.assert_array_equal(back.values, mat.values)


def test_coordinates_roundtrip(tmp_path, rng):
    pts = CoordinateMatrix(rng.normal(size=(5, 3)), list("abcde"))
    path = tmp_path / "coords.csv"
    matrixio.write_coordinates(path, pts)
    back = matrixio.read_coordinates(path)
    np.testing.assert_array_equal(back.coords, pts.coords)
    assert back.point_labels == pts.point_labels


def test_frequency_roundtrip(tmp_path):
    f = FrequencyMatrix(
        np.array([[1.0, 2.0, 0.0], [0.0, 3.0, 4.0]]),
        ["d1", "d2"],
        ["x", "y", "z"],
    )
    path = tmp_path / "f.csv"
    matrixio.write_frequency(path, f)
    back = matrixio.read_frequency(path)
    np.testing.assert_array_equal(back.values, f.values)
    assert back.row_labels == f.row_labels
    assert back.col_labels == f.col_labels


def test_read_skips_comment_lines(tmp_path):
    path = tmp_path / "d.csv"
    path.write_text(
        "# tool: something\n# params: none\n,a,b\na,0,1\nb,1,0\n",
        encoding="utf-8",
    )
    d = matrixio.read_dissimilarity(path)
    assert d.labels == ["a", "b"]
    assert d.values[0, 1] == 1.0


def test_read_dissimilarity_rejects_mismatched_labels(tmp_path):
    path = tmp_path / "d.csv"
    path.write_text(",a,b\nb,0,1\na,1,0\n", encoding="utf-8")
    with pytest.raises(ValueError, match="labels"):
        matrixio.read_dissimilarity(path)


def test_written_files_use_lf_and_utf8(tmp_path):
    d = DissimilarityMatrix(np.zeros((2, 2)), labels=["å", "b"])
    path = tmp_path / "d.csv"
    matrixio.write_dissimilarity(path, d)
    raw = path.read_bytes()
    assert b"\r" not in raw
    assert "å".encode("utf-8") in raw


def test_key_value_formatting(tmp_path):
    path = tmp_path / "kv.txt"
    matrixio.write_key_values(
        path, {"alpha": 0.5, "flag": True, "n": 7, "note": None}
    )
    text = path.read_text(encoding="utf-8")
    assert "alpha: 0.5\n" in text
    assert "flag: true\n" in text
    assert "n: 7\n" in text
    assert "note: \n" in text
