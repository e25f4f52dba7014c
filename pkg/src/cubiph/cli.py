"""Batch CLI: compute, features, labels, stats, export-graph, verify, bench.

Every non-bench command is byte-reproducible for a fixed config and
dataset. Exit codes: 0 success, 1 verification failure, 2 usage or I/O
error. Flags win over the optional TOML config file; CUBIPH_JOBS is the
fallback for --jobs.
"""

from __future__ import annotations

import csv
import functools
import gzip
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import click
import numpy as np

try:
    import tomllib
except ImportError:  # Python 3.10
    import tomli as tomllib

from . import features as feat
from . import plots
from .boundary import (
    build_boundary_matrix,
    export_cc_graph,
    export_fcc_graph,
    symmetrize,
    write_edge_list,
    write_node_features,
)
from .cubical import build_cubical_complex, build_filtration
from .errors import CubiphError, ParameterError
from .ingest import GreyImage, LabeledDataset, load_cifar10, load_csv_image, load_idx, load_pgm
from .oracle import betti_curve_bruteforce, betti_curve_from_diagrams
from .reduction import (
    DiagramSet,
    append_diagrams,
    compute_ph,
    extract_diagrams,
    reduce_matrix,
    write_diagrams,
)
from .stats import compute_stats, write_stats_csv

MNIST_THETA_GRID = (0.15, 0.2, 0.25, 0.3, 0.4, 0.6, 0.7, 0.8, 0.9, 1.0)
CIFAR10_THETA_GRID = tuple(np.linspace(0.15, 0.55, 10).tolist())


@dataclass
class PipelineConfig:
    """Resolved batch-job settings shared by the subcommands."""

    dataset: str | None = None
    fmt: str = "csv"
    labels_path: str | None = None
    degree: str = "1"
    drop_zero: bool = True
    essentials: str = feat.ESSENTIAL_EXCLUDE
    theta_grid: tuple[float, ...] = MNIST_THETA_GRID
    mode: str = feat.MODE_INTERVAL
    floor: float = 0.1
    pi_params: feat.PIParams = field(default_factory=feat.PIParams)
    blob_epsilon: float = 0.0
    out: str = "."
    jobs: int = 1
    seed: int = 0
    grey_mode: str = "bt601"

    def validate(self) -> None:
        grid = self.theta_grid
        if any(not 0.0 <= t <= 1.0 for t in grid):
            raise ParameterError("theta grid values must lie in [0, 1]")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ParameterError("theta grid must be strictly increasing")
        if self.jobs < 1:
            raise ParameterError("--jobs must be >= 1")
        if self.degree not in ("0", "1", "both"):
            raise ParameterError(f"bad degree {self.degree!r}")


def _read_bytes(path: str) -> bytes:
    opener = gzip.open if path.endswith(".gz") else open
    with opener(path, "rb") as fh:
        return fh.read()


def _files_with_suffix(path: str, suffix: str) -> list[str]:
    if os.path.isdir(path):
        names = sorted(n for n in os.listdir(path) if n.endswith(suffix))
        return [os.path.join(path, n) for n in names]
    return [path]


def load_dataset(cfg: PipelineConfig) -> LabeledDataset:
    path = cfg.dataset
    if path is None:
        raise click.UsageError("--dataset is required for this command")
    if cfg.fmt == "idx":
        if cfg.labels_path is None:
            raise click.UsageError("--labels is required with --format idx")
        return load_idx(_read_bytes(path), _read_bytes(cfg.labels_path))
    if cfg.fmt == "cifar10":
        blobs = [_read_bytes(p) for p in _files_with_suffix(path, ".bin")]
        return load_cifar10(b"".join(blobs), grey_mode=cfg.grey_mode)
    if cfg.fmt == "pgm":
        images = [load_pgm(_read_bytes(p)) for p in _files_with_suffix(path, ".pgm")]
        return LabeledDataset(images, [0] * len(images))
    if cfg.fmt == "csv":
        paths = _files_with_suffix(path, ".csv")
        images = []
        for p in paths:
            with open(p) as fh:
                images.append(load_csv_image(fh.read()))
        return LabeledDataset(images, [0] * len(images))
    raise click.UsageError(f"unknown format {cfg.fmt!r}")


def _pmap(fn, items, jobs: int):
    if jobs <= 1:
        return [fn(x) for x in items]
    chunk = max(1, len(items) // (jobs * 8))
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, items, chunksize=chunk))


def _progress(i: int, n: int) -> None:
    if sys.stderr.isatty() and (i % 100 == 0 or i == n):
        print(f"\r{i}/{n}", end="" if i < n else "\n", file=sys.stderr)


# ---------------------------------------------------------------- options


def common_options(fn):
    decorators = [
        click.option("--dataset", type=str, default=None, help="dataset path (file or directory)"),
        click.option("--format", "fmt", type=click.Choice(["idx", "cifar10", "pgm", "csv"]), default="csv"),
        click.option("--labels", "labels_path", type=str, default=None, help="IDX label stream path"),
        click.option("--degree", type=click.Choice(["0", "1", "both"]), default=None),
        click.option("--drop-zero/--keep-zero", "drop_zero", default=True),
        click.option("--essentials", type=click.Choice(["exclude", "cap"]), default="exclude"),
        click.option("--theta-grid", "theta_grid", type=str, default=None,
                      help="'mnist', 'cifar10', or comma-separated values"),
        click.option("--mode", type=click.Choice(["interval", "atleast"]), default=None),
        click.option("--floor", type=float, default=0.1, help="interval-mode lower bound"),
        click.option("--pi-res", type=int, default=32),
        click.option("--pi-a", type=float, default=0.0025),
        click.option("--pi-b", type=float, default=0.1),
        click.option("--blob-eps", type=float, default=0.0),
        click.option("--out", type=str, default="."),
        click.option("--jobs", type=int, default=None, envvar="CUBIPH_JOBS"),
        click.option("--seed", type=int, default=0),
        click.option("--grey", "grey_mode", type=click.Choice(["bt601", "mean"]), default="bt601"),
        click.option("--config", "config_path", type=str, default=None, help="TOML config file"),
    ]
    for dec in reversed(decorators):
        fn = dec(fn)
    return fn


_CONFIG_KEYS = {
    "dataset", "fmt", "labels_path", "degree", "drop_zero", "essentials",
    "theta_grid", "mode", "floor", "pi_res", "pi_a", "pi_b", "blob_eps",
    "out", "jobs", "seed", "grey_mode",
}


def build_config(ctx: click.Context, params: dict, *, default_degree="1",
                 default_mode=feat.MODE_INTERVAL) -> PipelineConfig:
    """Merge TOML file values under explicit command-line flags."""
    cfg_path = params.pop("config_path", None)
    if cfg_path:
        with open(cfg_path, "rb") as fh:
            file_vals = tomllib.load(fh)
        for key, value in file_vals.items():
            if key not in _CONFIG_KEYS:
                raise click.UsageError(f"unknown config key {key!r} in {cfg_path}")
            src = ctx.get_parameter_source(key)
            if key in params and (src is None or src.name == "DEFAULT"):
                params[key] = value

    theta = params.pop("theta_grid", None)
    mode = params.pop("mode", None)
    if theta in (None, "mnist"):
        grid = MNIST_THETA_GRID
    elif theta == "cifar10":
        grid = CIFAR10_THETA_GRID
        if mode is None:
            mode = feat.MODE_ATLEAST
    elif isinstance(theta, (list, tuple)):
        grid = tuple(float(x) for x in theta)
    else:
        try:
            grid = tuple(float(x) for x in str(theta).split(","))
        except ValueError as exc:
            raise click.UsageError(f"bad --theta-grid: {exc}")
    degree = params.pop("degree", None) or default_degree
    pi_params = feat.PIParams(
        a=params.pop("pi_a"), b=params.pop("pi_b"), resolution=params.pop("pi_res")
    )
    jobs = params.pop("jobs", None)
    cfg = PipelineConfig(
        dataset=params.pop("dataset"),
        fmt=params.pop("fmt"),
        labels_path=params.pop("labels_path"),
        degree=degree,
        drop_zero=params.pop("drop_zero"),
        essentials=params.pop("essentials"),
        theta_grid=grid,
        mode=mode or default_mode,
        floor=params.pop("floor"),
        pi_params=pi_params,
        blob_epsilon=params.pop("blob_eps"),
        out=params.pop("out"),
        jobs=int(jobs) if jobs is not None else 1,
        seed=params.pop("seed"),
        grey_mode=params.pop("grey_mode"),
    )
    cfg.validate()
    return cfg


def cli_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (OSError, CubiphError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(2)

    return wrapper


@click.group()
@click.version_option(package_name="cubiph")
def main():
    """Cubical persistent homology batch pipeline."""


# ---------------------------------------------------------------- compute


def _ph_worker(img: GreyImage, drop_zero: bool):
    return compute_ph(img.values, drop_zero=drop_zero)


def _select_degrees(d, degree: str):
    if degree == "both":
        return d
    keep = int(degree)
    return DiagramSet(d.h0 if keep == 0 else (), d.h1 if keep == 1 else (), d.drop_zero)


@main.command()
@common_options
@click.option("--single-file/--per-image", "single_file", default=False,
              help="one consolidated CSV instead of one file per image")
@click.pass_context
@cli_errors
def compute(ctx, single_file, **params):
    """Compute persistence diagrams for every image and write CSV files."""
    cfg = build_config(ctx, params, default_degree="both")
    ds = load_dataset(cfg)
    os.makedirs(cfg.out, exist_ok=True)
    worker = functools.partial(_ph_worker, drop_zero=cfg.drop_zero)
    diagrams = _pmap(worker, ds.images, cfg.jobs)
    diagrams = [_select_degrees(d, cfg.degree) for d in diagrams]
    if single_file:
        path = os.path.join(cfg.out, "diagrams.csv")
        with open(path, "w", newline="") as fh:
            for i, d in enumerate(diagrams):
                append_diagrams(fh, d, image_id=i, header=(i == 0))
        click.echo(f"wrote {path} ({len(diagrams)} images)")
    else:
        for i, d in enumerate(diagrams):
            write_diagrams(d, os.path.join(cfg.out, f"diagram_{i:06d}.csv"))
            _progress(i + 1, len(diagrams))
        click.echo(f"wrote {len(diagrams)} diagram files to {cfg.out}")


# ---------------------------------------------------------------- features / labels


def _record_worker(item, cfg_tuple):
    (i, img, label) = item
    (degree, drop_zero, essentials, theta_grid, mode, floor, pi_params, blob_eps, want_pi) = cfg_tuple
    d = compute_ph(img.values, drop_zero=drop_zero)
    deg = 1 if degree == "both" else int(degree)
    pi = feat.persistence_image(d, deg, pi_params)
    rec = feat.compute_feature_record(
        i, label, d, theta_grid, mode,
        degree=deg, floor=floor, essentials=essentials,
        pi_params=pi_params, blob_epsilon=blob_eps, pi=pi,
    )
    return rec, (pi.values if want_pi else None)


def _feature_records(cfg: PipelineConfig, ds: LabeledDataset, want_pi: bool):
    cfg_tuple = (
        cfg.degree, cfg.drop_zero, cfg.essentials, cfg.theta_grid, cfg.mode,
        cfg.floor, cfg.pi_params, cfg.blob_epsilon, want_pi,
    )
    items = [(i, img, label) for i, (img, label) in enumerate(zip(ds.images, ds.class_labels))]
    worker = functools.partial(_record_worker, cfg_tuple=cfg_tuple)
    return _pmap(worker, items, cfg.jobs)


@main.command()
@common_options
@click.option("--pi-out", type=str, default=None, help="directory for persistence-image dumps")
@click.option("--pi-format", type=click.Choice(["csv", "f64"]), default="csv")
@click.option("--figures", is_flag=True, help="render persistence-image heat maps")
@click.pass_context
@cli_errors
def features(ctx, pi_out, pi_format, figures, **params):
    """Extract all feature families into a CSV (plus optional PI dumps)."""
    cfg = build_config(ctx, params)
    ds = load_dataset(cfg)
    os.makedirs(cfg.out, exist_ok=True)
    results = _feature_records(cfg, ds, want_pi=pi_out is not None or figures)
    path = os.path.join(cfg.out, "features.csv")
    feat.write_feature_csv([rec for rec, _ in results], cfg.theta_grid, path)
    click.echo(f"wrote {path}")
    if pi_out is not None or figures:
        pi_dir = pi_out or os.path.join(cfg.out, "pi")
        os.makedirs(pi_dir, exist_ok=True)
        for i, (_, values) in enumerate(results):
            pi = feat.PersistenceImage(values, cfg.pi_params, "point")
            if pi_out is not None:
                if pi_format == "csv":
                    feat.write_pi_csv(pi, os.path.join(pi_dir, f"pi_{i:06d}.csv"))
                else:
                    feat.write_pi_f64(pi, os.path.join(pi_dir, f"pi_{i:06d}.f64"))
            if figures and i < 4:
                plots.render_pi_figure(pi, os.path.join(pi_dir, f"pi_{i:06d}.png"))
        click.echo(f"wrote persistence images to {pi_dir}")


@main.command()
@common_options
@click.pass_context
@cli_errors
def labels(ctx, **params):
    """Export the label CSV used to train surrogate models."""
    cfg = build_config(ctx, params)
    ds = load_dataset(cfg)
    os.makedirs(cfg.out, exist_ok=True)
    results = _feature_records(cfg, ds, want_pi=False)
    path = os.path.join(cfg.out, "labels.csv")
    feat.write_feature_csv([rec for rec, _ in results], cfg.theta_grid, path)
    click.echo(f"wrote {path} ({len(results)} rows)")


# ---------------------------------------------------------------- stats


@main.command(name="stats")
@common_options
@click.option("--theta", type=float, default=0.3, help="threshold for the PH class split")
@click.option("--hist-bin-width", type=int, default=1, help="histogram bin width in bar counts")
@click.option("--figures", is_flag=True)
@click.pass_context
@cli_errors
def stats_cmd(ctx, theta, hist_bin_width, figures, **params):
    """Dataset statistics: bar-count histogram, PH classes, crosstabs."""
    cfg = build_config(ctx, params)
    ds = load_dataset(cfg)
    os.makedirs(cfg.out, exist_ok=True)
    worker = functools.partial(_ph_worker, drop_zero=cfg.drop_zero)
    diagrams = _pmap(worker, ds.images, cfg.jobs)
    deg = 1 if cfg.degree == "both" else int(cfg.degree)
    st = compute_stats(
        diagrams, ds.class_labels, theta, cfg.mode,
        degree=deg, floor=cfg.floor, essentials=cfg.essentials,
        bin_width=hist_bin_width,
    )
    paths = write_stats_csv(st, cfg.out)
    if figures:
        paths += plots.render_stats_figures(st, cfg.out)
    for p in paths:
        click.echo(f"wrote {p}")


# ---------------------------------------------------------------- export-graph


@main.command(name="export-graph")
@common_options
@click.option("--encodings", type=str, default="cc,fcc,sym",
              help="comma list out of cc,fcc,sym")
@click.option("--node-features", "node_feats", is_flag=True)
@click.pass_context
@cli_errors
def export_graph(ctx, encodings, node_feats, **params):
    """Write edge-list graph files per image for CC/FCC/symmetrized-B."""
    cfg = build_config(ctx, params)
    encs = [e.strip() for e in encodings.split(",") if e.strip()]
    bad = set(encs) - {"cc", "fcc", "sym"}
    if bad:
        raise click.UsageError(f"unknown encodings: {sorted(bad)}")
    ds = load_dataset(cfg)
    os.makedirs(cfg.out, exist_ok=True)
    for i, img in enumerate(ds.images):
        cc = build_cubical_complex(img)
        f = build_filtration(cc)
        graphs = {}
        if "cc" in encs:
            graphs["cc"] = export_cc_graph(cc, f)
        if "fcc" in encs:
            graphs["fcc"] = export_fcc_graph(cc, f)
        if "sym" in encs:
            graphs["sym"] = symmetrize(build_boundary_matrix(f))
        for enc, g in graphs.items():
            path = os.path.join(cfg.out, f"graph_{enc}_{i:06d}.txt")
            write_edge_list(g, path)
            if node_feats:
                write_node_features(g, os.path.join(cfg.out, f"graph_{enc}_{i:06d}_nodes.csv"))
        _progress(i + 1, len(ds.images))
    click.echo(f"wrote {len(ds.images)} x {len(encs)} graph files to {cfg.out}")


# ---------------------------------------------------------------- verify


@main.command()
@common_options
@click.option("--trials", type=int, default=100)
@click.option("--max-size", type=int, default=6, help="max side length of random test images")
@click.option("--levels", type=int, default=4, help="distinct grey levels in random images")
@click.pass_context
@cli_errors
def verify(ctx, trials, max_size, levels, **params):
    """Check diagram Betti curves against the brute-force oracle."""
    cfg = build_config(ctx, params)
    rng = np.random.default_rng(cfg.seed)
    images = []
    if cfg.dataset is not None:
        ds = load_dataset(cfg)
        idx = rng.choice(len(ds.images), size=min(trials, len(ds.images)), replace=False)
        images = [ds.images[int(i)].values for i in idx]
    else:
        for _ in range(trials):
            h = int(rng.integers(1, max_size + 1))
            w = int(rng.integers(1, max_size + 1))
            images.append(rng.integers(0, levels, size=(h, w)) / max(1, levels - 1))
    ok = 0
    for img in images:
        d = compute_ph(img, drop_zero=cfg.drop_zero)
        bf = betti_curve_bruteforce(img)
        dg = betti_curve_from_diagrams(d, bf.thresholds)
        if np.array_equal(bf.beta0, dg.beta0) and np.array_equal(bf.beta1, dg.beta1):
            ok += 1
    click.echo(f"{ok}/{len(images)} exact Betti matches")
    if ok != len(images):
        sys.exit(1)


# ---------------------------------------------------------------- bench


def _bench_image(values: np.ndarray, pi_params: feat.PIParams, blob_eps: float) -> dict[str, float]:
    t = {}
    t0 = time.perf_counter()
    cc = build_cubical_complex(values)
    f = build_filtration(cc)
    t1 = time.perf_counter()
    b = build_boundary_matrix(f)
    t2 = time.perf_counter()
    red = reduce_matrix(b)
    d = extract_diagrams(red, f)
    t3 = time.perf_counter()
    lengths = feat.bar_lengths(d, 1)
    feat.tropical_coordinates(lengths)
    t4 = time.perf_counter()
    [feat.binary_bar_feature(lengths, feat.MODE_INTERVAL, th) for th in MNIST_THETA_GRID]
    t5 = time.perf_counter()
    pi = feat.persistence_image(d, 1, pi_params)
    t6 = time.perf_counter()
    feat.persistence_image_averaged(d, 1, pi_params)
    t7 = time.perf_counter()
    feat.fourier_coefficients(pi)
    t8 = time.perf_counter()
    feat.count_blobs(pi, blob_eps)
    t9 = time.perf_counter()
    t["complex+filtration"] = t1 - t0
    t["boundary"] = t2 - t1
    t["reduce+diagrams"] = t3 - t2
    t["tropical"] = t4 - t3
    t["binary"] = t5 - t4
    t["pi_point"] = t6 - t5
    t["pi_cell"] = t7 - t6
    t["fourier"] = t8 - t7
    t["blobs"] = t9 - t8
    t["full"] = t9 - t0
    return t


@main.command()
@common_options
@click.option("--figures", is_flag=True)
@click.pass_context
@cli_errors
def bench(ctx, figures, **params):
    """Wall-time report per image and per batch of 100, by pipeline stage."""
    cfg = build_config(ctx, params)
    ds = load_dataset(cfg)
    os.makedirs(cfg.out, exist_ok=True)
    rows = []
    for i, img in enumerate(ds.images):
        rows.append(_bench_image(img.values, cfg.pi_params, cfg.blob_epsilon))
        _progress(i + 1, len(ds.images))
    stages = list(rows[0].keys())
    table = {s: np.array([r[s] for r in rows]) for s in stages}

    full = table["full"]
    n = full.size
    batch_sums = (
        [float(full[k : k + 100].sum()) for k in range(0, n - n % 100, 100)]
        if n >= 100
        else [float(full.sum())]
    )
    batch100 = float(np.mean(batch_sums))

    csv_path = os.path.join(cfg.out, "bench.csv")
    with open(csv_path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["stage", "mean_s", "median_s", "p95_s"])
        for s in stages:
            w.writerow([s, f"{table[s].mean():.6e}", f"{np.median(table[s]):.6e}",
                        f"{np.percentile(table[s], 95):.6e}"])
        w.writerow(["batch_of_100", f"{batch100:.6e}", "", ""])

    click.echo(f"images: {n}")
    click.echo(f"{'stage':<20}{'mean/img (s)':>14}{'median (s)':>14}{'p95 (s)':>14}")
    for s in stages:
        click.echo(
            f"{s:<20}{table[s].mean():>14.6f}{np.median(table[s]):>14.6f}"
            f"{np.percentile(table[s], 95):>14.6f}"
        )
    click.echo(f"batch of 100 (full pipeline): {batch100:.6f} s")
    click.echo(f"wrote {csv_path}")
    if figures:
        p = plots.render_bench_figure(
            {s: float(table[s].mean()) for s in stages if s != "full"},
            os.path.join(cfg.out, "bench.png"),
        )
        click.echo(f"wrote {p}")


if __name__ == "__main__":
    main()
