import numpy as np
import pytest

from umtk import __version__, matrixio
from umtk.cli import main
from umtk.corpus import random_mirror
from umtk.hierarchy import cophenetic, export_newick, linkage
from umtk.matrices import CoordinateMatrix, DissimilarityMatrix
from umtk.triplets import triplet_count


def write_example_distances(path):
    d = DissimilarityMatrix(
        np.array(
            [
                [0.0, 2.0, 6.0, 7.0],
                [2.0, 0.0, 5.0, 8.0],
                [6.0, 5.0, 0.0, 3.0],
                [7.0, 8.0, 3.0, 0.0],
            ]
        ),
        ["a", "b", "c", "d"],
    )
    matrixio.write_dissimilarity(path, d)
    return d


def write_example_coords(path, n=7, seed=5):
    gen = np.random.default_rng(seed)
    coords = CoordinateMatrix(gen.normal(size=(n, 3)))
    matrixio.write_coordinates(path, coords)
    return coords


def read_lines(path):
    return path.read_text(encoding="utf-8").splitlines()


def test_mirror_runs_and_rerun_is_byte_identical(tmp_path):
    first = tmp_path / "one"
    second = tmp_path / "two"
    assert main(["mirror", "5", "4", "--seed", "11", "--out", str(first)]) == 0
    assert main(["mirror", "5", "4", "--seed", "11", "--out", str(second)]) == 0
    a = (first / "mirror.csv").read_bytes()
    b = (second / "mirror.csv").read_bytes()
    assert a == b
    table = matrixio.read_frequency(first / "mirror.csv")
    np.testing.assert_array_equal(table.values, random_mirror(5, 4, 11).values)


def test_mirror_header_lines(tmp_path):
    assert main(["mirror", "3", "3", "--seed", "2", "--out", str(tmp_path)]) == 0
    lines = read_lines(tmp_path / "mirror.csv")
    assert lines[0] == f"# umtk {__version__}"
    assert lines[1] == "# subcommand: mirror"
    assert "# cols: 3" in lines and "# rows: 3" in lines and "# seed: 2" in lines


def test_mirror_rejects_tiny_shape(tmp_path, capsys):
    assert main(["mirror", "1", "9", "--out", str(tmp_path)]) == 1
    assert "rows >= 2" in capsys.readouterr().err


def test_unknown_subcommand_and_missing_args(tmp_path, capsys):
    assert main(["definitely-not-a-subcommand"]) == 1
    assert main(["hclust"]) == 1  # --input is required
    capsys.readouterr()


def test_pcoa_outputs(tmp_path):
    src = tmp_path / "d.csv"
    write_example_distances(src)
    out = tmp_path / "out"
    assert main(["pcoa", "--input", str(src), "--out", str(out)]) == 0
    for name in ("pcoa_coords.csv", "pcoa_eigenvalues.csv", "pcoa_metricity.txt"):
        assert (out / name).exists()
    report = dict(
        line[2:].split(": ", 1)
        for line in read_lines(out / "pcoa_metricity.txt")
        if line.startswith("# ") and ": " in line
    )
    assert report["subcommand"] == "pcoa"
    assert report["input"] == "d.csv"  # basename only, not the full path
    body = (out / "pcoa_metricity.txt").read_text(encoding="utf-8")
    assert "coefficient: " in body


def test_missing_input_is_io_error(tmp_path, capsys):
    assert main(["pcoa", "--input", str(tmp_path / "absent.csv"),
                 "--out", str(tmp_path)]) == 2
    assert capsys.readouterr().err.startswith("umtk: ")


def test_hclust_outputs_match_library(tmp_path):
    src = tmp_path / "d.csv"
    d = write_example_distances(src)
    out = tmp_path / "out"
    assert main(["hclust", "--input", str(src), "--criterion", "average",
                 "--out", str(out)]) == 0
    h = linkage(d, "average")
    newick_lines = [
        line for line in read_lines(out / "hclust_average.nwk")
        if not line.startswith("#")
    ]
    assert newick_lines == [export_newick(h)]
    round_trip = matrixio.read_dissimilarity(out / "hclust_average_cophenetic.csv")
    np.testing.assert_array_equal(round_trip.values, cophenetic(h).values)
    merge_rows = [
        line.split(",") for line in read_lines(out / "hclust_average_merges.csv")
        if not line.startswith("#")
    ]
    assert merge_rows[0] == ["left", "right", "height", "size"]
    assert len(merge_rows) == 1 + len(h.merges)


def test_coeffs_requires_exactly_one_input(tmp_path, capsys):
    coords_path = tmp_path / "pts.csv"
    dist_path = tmp_path / "d.csv"
    write_example_coords(coords_path)
    write_example_distances(dist_path)
    assert main(["coeffs", "--out", str(tmp_path)]) == 1
    assert main(["coeffs", "--coords", str(coords_path),
                 "--distances", str(dist_path), "--out", str(tmp_path)]) == 1
    assert main(["coeffs", "--distances", str(dist_path), "--per-triplet",
                 "--out", str(tmp_path)]) == 1
    assert "--per-triplet requires --coords" in capsys.readouterr().err


def test_coeffs_with_coordinates(tmp_path):
    coords_path = tmp_path / "pts.csv"
    write_example_coords(coords_path, n=7)
    out = tmp_path / "out"
    assert main(["coeffs", "--coords", str(coords_path), "--per-triplet",
                 "--out", str(out)]) == 0
    body = (out / "coeffs_report.txt").read_text(encoding="utf-8")
    for key in ("alpha: ", "rammal: ", "lerman_h: ",
                "treves_hartmann_points: "):
        assert key in body
    triplet_rows = [
        line for line in read_lines(out / "coeffs_triplets.csv")
        if not line.startswith("#")
    ]
    assert len(triplet_rows) == 1 + triplet_count(7)


def test_coeffs_with_distances_only(tmp_path):
    dist_path = tmp_path / "d.csv"
    write_example_distances(dist_path)
    out = tmp_path / "out"
    assert main(["coeffs", "--distances", str(dist_path), "--out", str(out)]) == 0
    body = (out / "coeffs_report.txt").read_text(encoding="utf-8")
    assert "alpha: unavailable (requires coordinates)" in body
    assert not (out / "coeffs_triplets.csv").exists()


def test_coeffs_sampled_rerun_is_byte_identical(tmp_path):
    coords_path = tmp_path / "pts.csv"
    write_example_coords(coords_path, n=12)
    runs = []
    for sub in ("one", "two"):
        out = tmp_path / sub
        assert main(["coeffs", "--coords", str(coords_path), "--sample", "60",
                     "--seed", "7", "--out", str(out)]) == 0
        runs.append((
            (out / "coeffs_report.txt").read_bytes(),
            (out / "treves_hartmann.csv").read_bytes(),
        ))
    assert runs[0] == runs[1]


def test_consensus_outputs(tmp_path):
    src = tmp_path / "d.csv"
    write_example_distances(src)
    out = tmp_path / "out"
    assert main(["consensus", "--input", str(src),
                 "--criteria", "ward,single,complete", "--out", str(out)]) == 0
    for name in ("consensus_table.csv", "consensus_matched.csv",
                 "consensus_ultrametric.csv", "consensus_merges.csv",
                 "consensus.nwk"):
        assert (out / name).exists()
    table_rows = [
        line.split(",") for line in read_lines(out / "consensus_table.csv")
        if not line.startswith("#")
    ]
    assert table_rows[0] == ["", "ward", "single", "complete"]
    assert [r[0] for r in table_rows[1:]] == ["ward", "single", "complete"]


def test_consensus_rerun_is_byte_identical(tmp_path):
    src = tmp_path / "d.csv"
    write_example_distances(src)
    blobs = []
    for sub in ("one", "two"):
        out = tmp_path / sub
        assert main(["consensus", "--input", str(src), "--out", str(out)]) == 0
        blobs.append([
            (out / name).read_bytes()
            for name in sorted(p.name for p in out.iterdir())
        ])
    assert blobs[0] == blobs[1]


def test_consensus_criteria_validation(tmp_path, capsys):
    src = tmp_path / "d.csv"
    write_example_distances(src)
    assert main(["consensus", "--input", str(src), "--criteria", "ward",
                 "--out", str(tmp_path)]) == 1
    assert "at least two" in capsys.readouterr().err
    assert main(["consensus", "--input", str(src),
                 "--criteria", "ward,centroid", "--out", str(tmp_path)]) == 1
    assert "inversions" in capsys.readouterr().err


def test_uca_outputs(tmp_path):
    coords_path = tmp_path / "pts.csv"
    write_example_coords(coords_path, n=9)
    out = tmp_path / "out"
    assert main(["uca", "--coords", str(coords_path), "--epsilon", "0.2",
                 "--out", str(out)]) == 0
    listing = read_lines(out / "uca_listing.csv")
    data = [line for line in listing if not line.startswith("#")]
    assert data[0] == "base1,base2,apex,angle_diff_radians"
    profile_header = [
        line for line in read_lines(out / "uca_profile.csv")
        if line.startswith("# count_at_threshold: ")
    ]
    assert len(profile_header) == 1


def test_uca_needs_exactly_two_criteria(tmp_path, capsys):
    coords_path = tmp_path / "pts.csv"
    write_example_coords(coords_path)
    assert main(["uca", "--coords", str(coords_path),
                 "--criteria", "ward,single,average", "--out", str(tmp_path)]) == 1
    assert "exactly two" in capsys.readouterr().err


def test_transform_both_writes_two_files(tmp_path):
    src = tmp_path / "d.csv"
    d = DissimilarityMatrix(
        np.array([[0.0, 1.0, 5.0], [1.0, 0.0, 1.0], [5.0, 1.0, 0.0]]),
        ["a", "b", "c"],
    )
    matrixio.write_dissimilarity(src, d)
    out = tmp_path / "out"
    assert main(["transform", "--input", str(src), "--out", str(out)]) == 0
    assert (out / "transform_cailliez.csv").exists()
    assert (out / "transform_power.csv").exists()
    cailliez_header = [
        line for line in read_lines(out / "transform_cailliez.csv")
        if line.startswith("# additive_constant: ")
    ]
    assert cailliez_header == ["# additive_constant: 3"]


def test_transform_both_skips_power_on_zero_distance(tmp_path, capsys):
    src = tmp_path / "d.csv"
    d = DissimilarityMatrix(
        np.array([[0.0, 0.0, 1.0], [0.0, 0.0, 1.0], [1.0, 1.0, 0.0]]),
        ["a", "b", "c"],
    )
    matrixio.write_dissimilarity(src, d)
    out = tmp_path / "out"
    assert main(["transform", "--input", str(src), "--out", str(out)]) == 0
    assert (out / "transform_cailliez.csv").exists()
    assert not (out / "transform_power.csv").exists()
    assert "skipping power repair" in capsys.readouterr().err
    # power alone on the same input is a hard failure
    assert main(["transform", "--input", str(src), "--method", "power",
                 "--out", str(out)]) == 1


def test_mirror_to_ca_pipeline(tmp_path):
    mirror_dir = tmp_path / "mirror"
    assert main(["mirror", "6", "8", "--seed", "4", "--out", str(mirror_dir)]) == 0
    ca_dir = tmp_path / "ca"
    assert main(["ca", "--input", str(mirror_dir / "mirror.csv"),
                 "--out", str(ca_dir)]) == 0
    for name in ("ca_row_coords.csv", "ca_col_coords.csv", "ca_row_masses.csv",
                 "ca_col_masses.csv", "ca_singular_values.csv"):
        assert (ca_dir / name).exists()
    coords = matrixio.read_coordinates(ca_dir / "ca_row_coords.csv")
    assert coords.n == 6
    assert coords.dim <= 5
    sv_rows = [
        line.split(",") for line in read_lines(ca_dir / "ca_singular_values.csv")
        if not line.startswith("#")
    ]
    values = [float(r[1]) for r in sv_rows[1:]]
    assert values == sorted(values, reverse=True)


def test_ingest_corpus_directory(tmp_path):
    corpus_dir = tmp_path / "docs"
    corpus_dir.mkdir()
    (corpus_dir / "alpha.txt").write_text("the cat sat on the mat", encoding="utf-8")
    (corpus_dir / "beta.txt").write_text("the dog sat", encoding="utf-8")
    out = tmp_path / "out"
    assert main(["ingest", "--input", str(corpus_dir), "--top-k", "3",
                 "--out", str(out)]) == 0
    table = matrixio.read_frequency(out / "termdoc.csv")
    assert table.row_labels == ["alpha", "beta"]
    assert table.col_labels == ["the", "sat", "cat"]  # the:3, sat:2, then ties a-z
    header = (out / "termdoc.csv").read_text(encoding="utf-8")
    assert "# top_k: 3" in header


def test_console_script_installed(tmp_path):
    import subprocess

    result = subprocess.run(
        ["umtk", "mirror", "3", "4", "--seed", "1", "--out", str(tmp_path)],
        capture_output=True,
        text=True,
    )
    assert result.returncode == 0
    assert (tmp_path / "mirror.csv").exists()
