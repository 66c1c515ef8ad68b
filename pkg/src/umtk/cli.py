"""Command-line interface.

Every output file starts with '#' comment lines recording the tool
version, the subcommand, and the full parameter set (including the seed
whenever randomness is involved), so reruns are reproducible
byte-for-byte. Input paths are echoed by basename only, to keep outputs
location-independent.

Exit codes: 0 success, 1 validation error, 2 I/O error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__, matrixio
from .component import ultrametric_component
from .consensus import (
    DEFAULT_TIE_TOLERANCE,
    consensus_count,
    consensus_dendrogram,
    consensus_table,
    consensus_ultrametric,
)
from .corpus import build_term_doc, random_mirror, read_corpus_dir, read_corpus_file
from .hierarchy import (
    LINKAGE_CRITERIA,
    Dendrogram,
    cophenetic,
    export_newick,
    linkage,
)
from .matrices import euclidean_distances
from .spectral import correspondence_analysis, pcoa
from .transforms import cailliez_additive, power_shrink
from .ultrametricity import (
    DEFAULT_EPSILON,
    alpha_epsilon,
    lerman_h,
    rammal_index,
    scan_triplet_verdicts,
    treves_hartmann_points,
)


class CliError(Exception):
    """Validation failure; maps to exit code 1."""


@dataclass
class RunConfig:
    subcommand: str
    input_path: str | None = None
    coords_path: str | None = None
    distances_path: str | None = None
    out_dir: str = "."
    epsilon: float = DEFAULT_EPSILON
    criteria: list[str] = field(default_factory=list)
    criterion: str = "ward"
    seed: int = 0
    sample: int | None = None
    top_k: int = 2000
    rows: int = 0
    cols: int = 0
    method: str = "both"
    per_triplet: bool = False


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise CliError(f"{message}\n{self.format_usage()}")


def _build_parser() -> _Parser:
    parser = _Parser(
        prog="umtk",
        description=(
            "Quantify how metric and how ultrametric a data set is, "
            "and extract its ultrametric component."
        ),
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add_out(p: _Parser) -> None:
        p.add_argument("--out", default=".", help="output directory")

    p = sub.add_parser("ingest", help="corpus directory or marker file to term-document CSV")
    p.add_argument("--input", required=True, help="directory of .txt files or '===DOC id===' file")
    p.add_argument("--top-k", type=int, default=2000, dest="top_k",
                   help="vocabulary size (most frequent terms)")
    add_out(p)

    p = sub.add_parser("ca", help="correspondence analysis of a frequency CSV")
    p.add_argument("--input", required=True)
    add_out(p)

    p = sub.add_parser("pcoa", help="classical scaling of a dissimilarity CSV")
    p.add_argument("--input", required=True)
    add_out(p)

    p = sub.add_parser("hclust", help="agglomerative clustering of a dissimilarity CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--criterion", default="ward", choices=LINKAGE_CRITERIA)
    add_out(p)

    p = sub.add_parser("coeffs", help="ultrametricity coefficients")
    p.add_argument("--coords", help="coordinate CSV (enables the angle coefficient)")
    p.add_argument("--distances", help="dissimilarity CSV")
    p.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)
    p.add_argument("--sample", type=int, default=None,
                   help="sampled scan with this many seeded draws instead of exhaustive")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--per-triplet", action="store_true", dest="per_triplet",
                   help="also write per-triplet verdicts (coords input only)")
    add_out(p)

    p = sub.add_parser("consensus", help="triplet consensus between linkage criteria")
    p.add_argument("--input", required=True, help="dissimilarity CSV")
    p.add_argument("--criteria", default="ward,single",
                   help="comma-separated linkage criteria (first two give the consensus tree)")
    add_out(p)

    p = sub.add_parser("uca", help="ultrametric component of a coordinate cloud")
    p.add_argument("--coords", required=True, help="coordinate CSV")
    p.add_argument("--criteria", default="ward,single",
                   help="exactly two comma-separated linkage criteria")
    p.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)
    add_out(p)

    p = sub.add_parser("transform", help="repair a dissimilarity CSV into a metric")
    p.add_argument("--input", required=True)
    p.add_argument("--method", default="both", choices=("cailliez", "power", "both"))
    add_out(p)

    p = sub.add_parser("mirror", help="seeded uniform random table of a given shape")
    p.add_argument("rows", type=int)
    p.add_argument("cols", type=int)
    p.add_argument("--seed", type=int, default=0)
    add_out(p)

    return parser


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(subcommand=args.subcommand)
    cfg.out_dir = getattr(args, "out", ".")
    cfg.input_path = getattr(args, "input", None)
    cfg.coords_path = getattr(args, "coords", None)
    cfg.distances_path = getattr(args, "distances", None)
    cfg.epsilon = getattr(args, "epsilon", DEFAULT_EPSILON)
    cfg.criterion = getattr(args, "criterion", "ward")
    cfg.seed = getattr(args, "seed", 0)
    cfg.sample = getattr(args, "sample", None)
    cfg.top_k = getattr(args, "top_k", 2000)
    cfg.rows = getattr(args, "rows", 0)
    cfg.cols = getattr(args, "cols", 0)
    cfg.method = getattr(args, "method", "both")
    cfg.per_triplet = getattr(args, "per_triplet", False)
    raw_criteria = getattr(args, "criteria", None)
    if raw_criteria is not None:
        cfg.criteria = [c.strip() for c in raw_criteria.split(",") if c.strip()]
    return cfg


def _headers(cfg: RunConfig, params: dict) -> list[str]:
    lines = [f"umtk {__version__}", f"subcommand: {cfg.subcommand}"]
    for key in sorted(params):
        lines.append(f"{key}: {matrixio.format_value(params[key])}")
    return lines


def _out_path(cfg: RunConfig, name: str) -> Path:
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out / name


def _basename(path: str | None) -> str | None:
    return Path(path).name if path else None


def _write_dendrogram(
    cfg: RunConfig, h: Dendrogram, stem: str, headers: list[str]
) -> None:
    label_line = "labels: " + ",".join(h.labels)
    rows: list[list] = [["left", "right", "height", "size"]]
    rows.extend([m.left, m.right, m.height, m.size] for m in h.merges)
    matrixio.write_rows(_out_path(cfg, f"{stem}_merges.csv"), rows,
                        headers + [label_line])
    newick = export_newick(h)
    with open(_out_path(cfg, f"{stem}.nwk"), "w", encoding="utf-8", newline="") as fh:
        for line in headers:
            fh.write(f"# {line}\n")
        fh.write(newick + "\n")


def _cmd_ingest(cfg: RunConfig) -> int:
    path = Path(cfg.input_path)
    corpus = read_corpus_dir(path) if path.is_dir() else read_corpus_file(path)
    td = build_term_doc(corpus, cfg.top_k)
    headers = _headers(cfg, {
        "input": _basename(cfg.input_path),
        "top_k": cfg.top_k,
        "tokenizer": "lowercase; alphabetic runs; word-internal apostrophes",
        "dropped_docs": ",".join(td.dropped_docs),
    })
    matrixio.write_frequency(_out_path(cfg, "termdoc.csv"), td.matrix, headers)
    return 0


def _cmd_ca(cfg: RunConfig) -> int:
    table = matrixio.read_frequency(cfg.input_path)
    result = correspondence_analysis(table)
    headers = _headers(cfg, {"input": _basename(cfg.input_path)})
    matrixio.write_coordinates(_out_path(cfg, "ca_row_coords.csv"),
                               result.row_coords, headers)
    matrixio.write_coordinates(_out_path(cfg, "ca_col_coords.csv"),
                               result.col_coords, headers)
    matrixio.write_labeled_matrix(_out_path(cfg, "ca_row_masses.csv"),
                                  result.row_masses[:, None],
                                  result.row_coords.point_labels, ["mass"], headers)
    matrixio.write_labeled_matrix(_out_path(cfg, "ca_col_masses.csv"),
                                  result.col_masses[:, None],
                                  result.col_coords.point_labels, ["mass"], headers)
    sv_labels = [f"s{i + 1}" for i in range(result.singular_values.size)]
    matrixio.write_labeled_matrix(_out_path(cfg, "ca_singular_values.csv"),
                                  result.singular_values[:, None],
                                  sv_labels, ["value"], headers)
    return 0


def _cmd_pcoa(cfg: RunConfig) -> int:
    d = matrixio.read_dissimilarity(cfg.input_path)
    coords, spectral, metricity = pcoa(d)
    headers = _headers(cfg, {"input": _basename(cfg.input_path)})
    matrixio.write_coordinates(_out_path(cfg, "pcoa_coords.csv"), coords, headers)
    ev_labels = [f"l{i + 1}" for i in range(spectral.eigenvalues.size)]
    matrixio.write_labeled_matrix(_out_path(cfg, "pcoa_eigenvalues.csv"),
                                  spectral.eigenvalues[:, None],
                                  ev_labels, ["value"], headers)
    matrixio.write_key_values(_out_path(cfg, "pcoa_metricity.txt"), {
        "positive_mass": metricity.positive_mass,
        "total_abs_mass": metricity.total_abs_mass,
        "coefficient": metricity.coefficient,
        "axes": coords.dim,
    }, headers)
    return 0


def _cmd_hclust(cfg: RunConfig) -> int:
    d = matrixio.read_dissimilarity(cfg.input_path)
    h = linkage(d, cfg.criterion)
    headers = _headers(cfg, {
        "input": _basename(cfg.input_path),
        "criterion": cfg.criterion,
    })
    stem = f"hclust_{cfg.criterion}"
    _write_dendrogram(cfg, h, stem, headers)
    matrixio.write_dissimilarity(_out_path(cfg, f"{stem}_cophenetic.csv"),
                                 cophenetic(h), headers)
    return 0


def _cmd_coeffs(cfg: RunConfig) -> int:
    if (cfg.coords_path is None) == (cfg.distances_path is None):
        raise CliError("coeffs needs exactly one of --coords or --distances")
    if cfg.per_triplet and cfg.coords_path is None:
        raise CliError("--per-triplet requires --coords")
    params = {
        "epsilon": cfg.epsilon,
        "sample": cfg.sample,
        "seed": cfg.seed if cfg.sample is not None else None,
    }
    report: dict[str, object] = {}
    if cfg.coords_path is not None:
        params["coords"] = _basename(cfg.coords_path)
        coords = matrixio.read_coordinates(cfg.coords_path)
        d = euclidean_distances(coords)
        alpha = alpha_epsilon(coords, cfg.epsilon, sample=cfg.sample,
                              seed=cfg.seed if cfg.sample is not None else None)
        report.update({
            "alpha": alpha.alpha,
            "alpha_counted": alpha.counted,
            "alpha_excluded_degenerate": alpha.excluded_degenerate,
        })
    else:
        params["distances"] = _basename(cfg.distances_path)
        d = matrixio.read_dissimilarity(cfg.distances_path)
        report["alpha"] = "unavailable (requires coordinates)"
    headers = _headers(cfg, params)
    sample_kw = dict(sample=cfg.sample,
                     seed=cfg.seed if cfg.sample is not None else None)
    report.update({
        "epsilon": cfg.epsilon,
        "sampled": cfg.sample is not None,
        "sample": cfg.sample,
        "seed": cfg.seed if cfg.sample is not None else None,
        "rammal": rammal_index(d),
        "lerman_h": lerman_h(d, **sample_kw),
        "lerman_h_definition": "mean((rank(max)-rank(med))/(pairs-1)) over triplets",
    })
    th = treves_hartmann_points(d, **sample_kw)
    report["treves_hartmann_points"] = th.points.shape[0]
    report["treves_hartmann_skipped_zero_max"] = th.skipped_zero_max
    matrixio.write_key_values(_out_path(cfg, "coeffs_report.txt"), report, headers)
    rows: list[list] = [["min_over_max", "med_over_max", "max_minus_med"]]
    rows.extend([float(a), float(b), float(c)] for a, b, c in th.points)
    matrixio.write_rows(_out_path(cfg, "treves_hartmann.csv"), rows, headers)
    if cfg.per_triplet:
        verdicts = scan_triplet_verdicts(coords, cfg.epsilon, **sample_kw)
        vrows: list[list] = [["i", "j", "k", "apex", "base_angle_diff", "ultrametric"]]
        vrows.extend([i, j, k, apex, diff, ultra]
                     for i, j, k, apex, diff, ultra in verdicts)
        matrixio.write_rows(_out_path(cfg, "coeffs_triplets.csv"), vrows, headers)
    return 0


def _cmd_consensus(cfg: RunConfig) -> int:
    if len(cfg.criteria) < 2:
        raise CliError("consensus needs at least two criteria")
    d = matrixio.read_dissimilarity(cfg.input_path)
    table = consensus_table(d, cfg.criteria)
    headers = _headers(cfg, {
        "input": _basename(cfg.input_path),
        "criteria": ",".join(cfg.criteria),
        "tie_tolerance": DEFAULT_TIE_TOLERANCE,
        "consensus_rule": "per-pair minimum then min-max path closure",
    })
    matrixio.write_labeled_matrix(_out_path(cfg, "consensus_table.csv"),
                                  table.counts, table.criteria, table.criteria,
                                  headers)
    crit_a, crit_b = cfg.criteria[0], cfg.criteria[1]
    pair_headers = headers + [f"pair_detail: {crit_a},{crit_b}"]
    u_a = cophenetic(linkage(d, crit_a))
    u_b = cophenetic(linkage(d, crit_b))
    report = consensus_count(u_a, u_b)
    rows: list[list] = [["i", "j", "k", "base_i", "base_j", "apex"]]
    rows.extend(list(r) for r in report.matched_set)
    matrixio.write_rows(_out_path(cfg, "consensus_matched.csv"), rows, pair_headers)
    merged = consensus_ultrametric(u_a, u_b)
    matrixio.write_dissimilarity(_out_path(cfg, "consensus_ultrametric.csv"),
                                 merged, pair_headers)
    tree = consensus_dendrogram(merged)
    _write_dendrogram(cfg, tree, "consensus", pair_headers)
    return 0


def _cmd_uca(cfg: RunConfig) -> int:
    if len(cfg.criteria) != 2:
        raise CliError("uca needs exactly two criteria")
    coords = matrixio.read_coordinates(cfg.coords_path)
    retained, profile = ultrametric_component(
        coords, cfg.criteria[0], cfg.criteria[1], cfg.epsilon
    )
    headers = _headers(cfg, {
        "coords": _basename(cfg.coords_path),
        "criteria": ",".join(cfg.criteria),
        "epsilon": cfg.epsilon,
    })
    rows: list[list] = [["base1", "base2", "apex", "angle_diff_radians"]]
    rows.extend(
        [r.base_labels[0], r.base_labels[1], r.apex_label, r.base_angle_diff]
        for r in retained
    )
    matrixio.write_rows(_out_path(cfg, "uca_listing.csv"), rows, headers)
    prows: list[list] = [["rank", "angle_diff_radians"]]
    prows.extend([idx + 1, float(v)] for idx, v in enumerate(profile.sorted_diffs))
    matrixio.write_rows(
        _out_path(cfg, "uca_profile.csv"), prows,
        headers + [f"count_at_threshold: {profile.count_at_threshold}"],
    )
    return 0


def _cmd_transform(cfg: RunConfig) -> int:
    d = matrixio.read_dissimilarity(cfg.input_path)
    base = {"input": _basename(cfg.input_path), "method": cfg.method}
    if cfg.method in ("cailliez", "both"):
        repaired, constant = cailliez_additive(d)
        headers = _headers(cfg, base | {"additive_constant": constant})
        matrixio.write_dissimilarity(_out_path(cfg, "transform_cailliez.csv"),
                                     repaired, headers)
    if cfg.method in ("power", "both"):
        try:
            shrunk, exponent = power_shrink(d)
        except ValueError as exc:
            if cfg.method == "power":
                raise
            print(f"umtk: skipping power repair: {exc}", file=sys.stderr)
            return 0
        headers = _headers(cfg, base | {"exponent": exponent,
                                        "r_tolerance": 1e-6})
        matrixio.write_dissimilarity(_out_path(cfg, "transform_power.csv"),
                                     shrunk, headers)
    return 0


def _cmd_mirror(cfg: RunConfig) -> int:
    if cfg.rows < 2 or cfg.cols < 2:
        raise CliError("mirror needs rows >= 2 and cols >= 2")
    table = random_mirror(cfg.rows, cfg.cols, cfg.seed)
    headers = _headers(cfg, {"rows": cfg.rows, "cols": cfg.cols, "seed": cfg.seed})
    matrixio.write_frequency(_out_path(cfg, "mirror.csv"), table, headers)
    return 0


_DISPATCH = {
    "ingest": _cmd_ingest,
    "ca": _cmd_ca,
    "pcoa": _cmd_pcoa,
    "hclust": _cmd_hclust,
    "coeffs": _cmd_coeffs,
    "consensus": _cmd_consensus,
    "uca": _cmd_uca,
    "transform": _cmd_transform,
    "mirror": _cmd_mirror,
}


def cli_dispatch(cfg: RunConfig) -> int:
    """Run one subcommand from a parsed configuration."""
    handler = _DISPATCH.get(cfg.subcommand)
    if handler is None:
        raise CliError(f"unknown subcommand: {cfg.subcommand!r}")
    return handler(cfg)


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return cli_dispatch(_config_from_args(args))
    except CliError as exc:
        print(f"umtk: {exc}", file=sys.stderr)
        return 1
    except (ValueError, KeyError) as exc:
        print(f"umtk: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"umtk: {exc}", file=sys.stderr)
        return 2


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
