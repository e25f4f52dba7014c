"""Dataset-level barcode statistics: bar-count histogram, the binary
theta-split into two PH classes, and per-image-class crosstabs.

All aggregation is a deterministic serial fold; the numbers can be
recomputed exactly from an exported feature CSV (the CSV carries the raw
bar count and unscaled mean length for that purpose).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import CorruptFileError, DomainError
from .features import bar_lengths, binary_bar_feature, mean_bar_length

N_CLASSES = 10


@dataclass
class DatasetStats:
    theta: float
    mode: str
    n_images: int
    bar_count_histogram: dict[int, int]
    ph_class_counts: tuple[int, int]
    # (class, ph) cells: image count, mean bar count, mean of per-image mean lengths
    crosstab_counts: np.ndarray
    crosstab_avg_bars: np.ndarray
    crosstab_avg_len: np.ndarray
    class_totals: np.ndarray

    def validate(self) -> None:
        if sum(self.bar_count_histogram.values()) != self.n_images:
            raise CorruptFileError("histogram bins do not sum to the dataset size")
        if sum(self.ph_class_counts) != self.n_images:
            raise CorruptFileError("PH class counts do not sum to the dataset size")
        if int(self.crosstab_counts.sum()) != self.n_images:
            raise CorruptFileError("crosstab cells do not sum to the dataset size")
        if not np.array_equal(self.crosstab_counts.sum(axis=1), self.class_totals):
            raise CorruptFileError("crosstab rows do not sum to per-class totals")


def _aggregate(per_image, theta: float, mode: str, bin_width: int = 1) -> DatasetStats:
    """Fold (label, n_bars, mean_len, ph) tuples into DatasetStats.

    Histogram bins are exact bar counts; ``bin_width`` > 1 groups counts
    into [k*w, (k+1)*w) bins keyed by their lower edge, for wide-range
    datasets."""
    if bin_width < 1:
        raise DomainError("bin width must be >= 1")
    histogram: dict[int, int] = {}
    ph_counts = [0, 0]
    counts = np.zeros((N_CLASSES, 2), dtype=np.int64)
    bars: list[list[list[int]]] = [[[], []] for _ in range(N_CLASSES)]
    lens: list[list[list[float]]] = [[[], []] for _ in range(N_CLASSES)]
    n = 0
    for label, n_bars, mean_len, ph in per_image:
        if not 0 <= label < N_CLASSES:
            raise DomainError(f"class label {label} outside 0..{N_CLASSES - 1}")
        n += 1
        bin_key = (n_bars // bin_width) * bin_width
        histogram[bin_key] = histogram.get(bin_key, 0) + 1
        ph_counts[ph] += 1
        counts[label, ph] += 1
        bars[label][ph].append(n_bars)
        lens[label][ph].append(mean_len)

    avg_bars = np.zeros((N_CLASSES, 2))
    avg_len = np.zeros((N_CLASSES, 2))
    for c in range(N_CLASSES):
        for ph in range(2):
            if counts[c, ph]:
                avg_bars[c, ph] = float(np.mean(np.array(bars[c][ph], dtype=np.float64)))
                avg_len[c, ph] = float(np.mean(np.array(lens[c][ph], dtype=np.float64)))

    stats = DatasetStats(
        theta=theta,
        mode=mode,
        n_images=n,
        bar_count_histogram=dict(sorted(histogram.items())),
        ph_class_counts=(ph_counts[0], ph_counts[1]),
        crosstab_counts=counts,
        crosstab_avg_bars=avg_bars,
        crosstab_avg_len=avg_len,
        class_totals=counts.sum(axis=1),
    )
    stats.validate()
    return stats


def compute_stats(
    diagrams,
    class_labels,
    theta: float,
    mode: str,
    *,
    degree: int = 1,
    floor: float = 0.1,
    essentials: str = "exclude",
    bin_width: int = 1,
) -> DatasetStats:
    """Statistics over per-image diagrams; the PH class of an image is its
    binary bar feature at theta."""
    if len(diagrams) != len(class_labels):
        raise DomainError(f"{len(diagrams)} diagrams but {len(class_labels)} labels")

    def rows():
        for d, label in zip(diagrams, class_labels):
            lengths = bar_lengths(d, degree, essentials)
            ph = binary_bar_feature(lengths, mode, theta, floor)
            yield int(label), len(lengths), mean_bar_length(lengths), ph

    return _aggregate(rows(), theta, mode, bin_width)


def stats_from_feature_csv(path, theta: float, mode: str = "", bin_width: int = 1) -> DatasetStats:
    """Recompute DatasetStats from an exported feature CSV. ``theta`` must
    match one of the CSV's binary columns; the stored binary values, bar
    counts, and mean lengths are reused, so the result is bit-identical to
    the direct computation."""
    col = f"theta={theta:g}"
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or col not in reader.fieldnames:
            raise CorruptFileError(f"feature CSV lacks column {col!r}")

        def rows():
            for rec in reader:
                yield (
                    int(rec["label"]),
                    int(rec["n_bars"]),
                    float(rec["mean_len"]),
                    int(rec[col]),
                )

        return _aggregate(rows(), theta, mode, bin_width)


def write_stats_csv(stats: DatasetStats, outdir) -> list:
    """Emit histogram, PH class counts, and crosstab tables as CSV, plus a
    gnuplot-compatible .dat for the histogram. Returns the written paths."""
    import os

    paths = []

    p = os.path.join(outdir, "stats_histogram.csv")
    with open(p, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["n_bars", "n_images"])
        for k, v in stats.bar_count_histogram.items():
            w.writerow([k, v])
    paths.append(p)

    p = os.path.join(outdir, "stats_histogram.dat")
    with open(p, "w") as fh:
        fh.write("# n_bars n_images\n")
        for k, v in stats.bar_count_histogram.items():
            fh.write(f"{k} {v}\n")
    paths.append(p)

    p = os.path.join(outdir, "stats_classes.csv")
    with open(p, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["theta", "mode", "ph_class_0", "ph_class_1"])
        w.writerow([f"{stats.theta:g}", stats.mode, *stats.ph_class_counts])
    paths.append(p)

    p = os.path.join(outdir, "stats_crosstab.csv")
    with open(p, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["image_class", "ph_class", "n_images", "avg_bars", "avg_len"])
        for c in range(N_CLASSES):
            for ph in range(2):
                w.writerow(
                    [
                        c,
                        ph,
                        int(stats.crosstab_counts[c, ph]),
                        repr(float(stats.crosstab_avg_bars[c, ph])),
                        repr(float(stats.crosstab_avg_len[c, ph])),
                    ]
                )
    paths.append(p)
    return paths
