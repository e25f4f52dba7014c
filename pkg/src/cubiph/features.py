"""Vectorizations of persistence diagrams.

Five families: tropical coordinates over bar lengths, binary bar-presence
features, persistence images (point-sampled and cell-averaged), their
discrete Fourier coefficients, and blob counts of persistence images.

A bar's length is death - birth. Diagrams live in [0, 1]^2 for normalized
images, so the default grids and thresholds are set up for that square.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from .errors import ParameterError
from .reduction import DiagramSet

ESSENTIAL_EXCLUDE = "exclude"
ESSENTIAL_CAP = "cap"

MODE_INTERVAL = "interval"
MODE_ATLEAST = "atleast"


def bar_lengths(
    d: DiagramSet,
    degree: int = 1,
    essentials: str = ESSENTIAL_EXCLUDE,
    cap: float = 1.0,
) -> list[float]:
    """Bar lengths (death - birth) of one degree, sorted descending.

    Essential classes are excluded by default; with ``essentials="cap"``
    their death is clamped to ``cap`` before subtracting.
    """
    out = []
    for p in d.diagram(degree):
        if p.essential:
            if essentials == ESSENTIAL_EXCLUDE:
                continue
            if essentials != ESSENTIAL_CAP:
                raise ParameterError(f"unknown essential policy {essentials!r}")
            out.append(cap - p.birth)
        else:
            out.append(p.death - p.birth)
    out.sort(reverse=True)
    return out


@dataclass(frozen=True)
class TropicalVector:
    """Sums of the k largest bar lengths (k = 1..4) and the mean length."""

    t1: float
    t2: float
    t3: float
    t4: float
    mean_d: float

    def as_tuple(self) -> tuple[float, float, float, float, float]:
        return (self.t1, self.t2, self.t3, self.t4, self.mean_d)


def mean_bar_length(lengths) -> float:
    """Left-to-right mean, 0 for the empty diagram. Kept as the single
    definition so exports and statistics agree bit for bit."""
    if len(lengths) == 0:
        return 0.0
    acc = 0.0
    for x in lengths:
        acc += float(x)
    return acc / len(lengths)


def tropical_coordinates(lengths) -> TropicalVector:
    """Max-plus coordinates of a descending length list.

    The max over k-index subsets of a sum of nonnegative lengths is the sum
    of the k largest; absent bars contribute 0, so the map is total.
    """
    t = []
    for k in (1, 2, 3, 4):
        acc = 0.0
        for x in lengths[:k]:
            acc += float(x)
        t.append(acc)
    return TropicalVector(t[0], t[1], t[2], t[3], mean_bar_length(lengths))


def binary_bar_feature(lengths, mode: str, theta: float, floor: float = 0.1) -> int:
    """1 iff some bar length falls in [floor, theta] (interval mode) or is
    at least theta (atleast mode)."""
    if mode == MODE_INTERVAL:
        if floor > theta:
            raise ParameterError(f"interval floor {floor} exceeds theta {theta}")
        return int(any(floor <= x <= theta for x in lengths))
    if mode == MODE_ATLEAST:
        return int(any(x >= theta for x in lengths))
    raise ParameterError(f"unknown mode {mode!r}")


@dataclass(frozen=True)
class PIParams:
    """Persistence image hyperparameters.

    ``a`` is the isotropic Gaussian covariance scale (covariance a*I, so
    sigma = sqrt(a)); ``b`` the ceiling of the persistence weight ramp;
    ``resolution`` the grid size n. The grid tiles birth_range x pers_range
    with n cells per axis whose lower-left corners are the sample nodes.
    """

    a: float = 0.0025
    b: float = 0.1
    resolution: int = 32
    birth_range: tuple[float, float] = (0.0, 1.0)
    pers_range: tuple[float, float] = (0.0, 1.0)

    def __post_init__(self):
        if self.a <= 0 or self.b <= 0:
            raise ParameterError("a and b must be positive")
        if self.resolution < 1:
            raise ParameterError("resolution must be >= 1")
        if self.birth_range[1] <= self.birth_range[0] or self.pers_range[1] <= self.pers_range[0]:
            raise ParameterError("grid bounds must be nonempty")

    def axes(self):
        n = self.resolution
        x0, x1 = self.birth_range
        y0, y1 = self.pers_range
        px = x0 + np.arange(n) * ((x1 - x0) / n)
        qy = y0 + np.arange(n) * ((y1 - y0) / n)
        return px, qy

    def cell_area(self) -> float:
        n = self.resolution
        return (
            (self.birth_range[1] - self.birth_range[0])
            / n
            * (self.pers_range[1] - self.pers_range[0])
            / n
        )


@dataclass(frozen=True)
class PersistenceImage:
    values: np.ndarray  # (n, n); [i, j] samples (birth axis i, persistence axis j)
    params: PIParams
    mode: str  # "point" or "cell"


def persistence_image(d: DiagramSet, degree: int = 1, params: PIParams | None = None) -> PersistenceImage:
    """Point-sampled persistence image: PI(v) = sum_u f(u) * gaussian_u(v)
    over transformed diagram points u = (birth, death - birth).

    Gaussians are evaluated at the grid nodes without truncation at the
    grid edges.
    """
    p = params or PIParams()
    births, pers, w = _points_and_weights(d, degree, p.b)
    n = p.resolution
    out = np.zeros((n, n))
    if births.size == 0:
        return PersistenceImage(out, p, "point")
    px, qy = p.axes()
    inv2a = 1.0 / (2.0 * p.a)
    gx = np.exp(-((px[:, None] - births[None, :]) ** 2) * inv2a)
    gy = np.exp(-((qy[:, None] - pers[None, :]) ** 2) * inv2a)
    out = (gx * w[None, :]) @ gy.T / (2.0 * math.pi * p.a)
    return PersistenceImage(out, p, "point")


def persistence_image_averaged(
    d: DiagramSet, degree: int = 1, params: PIParams | None = None
) -> PersistenceImage:
    """Cell-averaged persistence image PI'. Each point's Gaussian is
    integrated in closed form over every grid cell (product of 1D normal
    CDF differences) and divided by the cell area."""
    p = params or PIParams()
    births, pers, w = _points_and_weights(d, degree, p.b)
    n = p.resolution
    if births.size == 0:
        return PersistenceImage(np.zeros((n, n)), p, "cell")
    sigma = math.sqrt(p.a)
    x0, x1 = p.birth_range
    y0, y1 = p.pers_range
    ex = x0 + np.arange(n + 1) * ((x1 - x0) / n)
    ey = y0 + np.arange(n + 1) * ((y1 - y0) / n)
    cx = ndtr((ex[:, None] - births[None, :]) / sigma)
    cy = ndtr((ey[:, None] - pers[None, :]) / sigma)
    dx = np.diff(cx, axis=0)
    dy = np.diff(cy, axis=0)
    out = (dx * w[None, :]) @ dy.T / p.cell_area()
    return PersistenceImage(out, p, "cell")


def _points_and_weights(d: DiagramSet, degree: int, b: float):
    pts = d.finite(degree)
    if not pts:
        z = np.empty(0)
        return z, z, z
    births = np.array([p.birth for p in pts])
    pers = np.array([p.death - p.birth for p in pts])
    w = np.where(pers <= 0.0, 0.0, np.minimum(pers / b, 1.0))
    return births, pers, w


def fourier_coefficients(pi: PersistenceImage) -> np.ndarray:
    """Unnormalized forward 2D DFT of the image grid (Matlab convention):
    coefficient (0, 0) is the plain sum of the grid."""
    return np.fft.fft2(pi.values)


@dataclass(frozen=True)
class Blob:
    position: tuple[int, int]
    peak: float
    volume: float


@dataclass(frozen=True)
class BlobSummary:
    count: int
    blobs: tuple[Blob, ...]


_NEIGHBORS = ((-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1))


def count_blobs(pi: PersistenceImage, epsilon: float = 0.0) -> BlobSummary:
    """Blobs are strict local maxima over the 8-neighborhood with value
    above ``epsilon``. Every above-threshold cell hill-climbs to a root
    (steepest ascent, ties to the smallest row-major neighbor); cells whose
    root is a blob contribute their value to that blob's basin volume.
    Plateau endpoints that are not strict maxima absorb no basin.
    """
    if epsilon < 0:
        raise ParameterError("epsilon must be >= 0")
    v = pi.values
    n, m = v.shape
    padded = np.full((n + 2, m + 2), -np.inf)
    padded[1:-1, 1:-1] = v
    strict_max = np.ones((n, m), dtype=bool)
    for di, dj in _NEIGHBORS:
        strict_max &= v > padded[1 + di : 1 + di + n, 1 + dj : 1 + dj + m]
    strict_max &= v > epsilon

    root: dict[tuple[int, int], tuple[int, int]] = {}

    def climb(start):
        path = []
        cur = start
        while cur not in root:
            path.append(cur)
            i, j = cur
            best = v[i, j]
            best_pos = None
            for di, dj in _NEIGHBORS:
                ni, nj = i + di, j + dj
                if 0 <= ni < n and 0 <= nj < m and v[ni, nj] > best:
                    best = v[ni, nj]
                    best_pos = (ni, nj)
            if best_pos is None:
                root[cur] = cur
                break
            cur = best_pos
        r = root[cur]
        for c in path:
            root[c] = r
        return r

    volume = np.zeros((n, m))
    above = np.argwhere(v > epsilon)
    for i, j in above:
        r = climb((int(i), int(j)))
        volume[r] += v[i, j]

    blobs = []
    for i, j in np.argwhere(strict_max):
        blobs.append(Blob((int(i), int(j)), float(v[i, j]), float(volume[i, j])))
    blobs.sort(key=lambda b: b.position)
    return BlobSummary(len(blobs), tuple(blobs))


@dataclass
class FeatureRecord:
    """Per-image feature row as exported to the label CSV."""

    image_id: int
    label: int
    binary: list[int]
    tropical: TropicalVector
    blob_count: int
    n_bars: int
    mean_len: float


def compute_feature_record(
    image_id: int,
    label: int,
    d: DiagramSet,
    theta_grid,
    mode: str,
    *,
    degree: int = 1,
    floor: float = 0.1,
    essentials: str = ESSENTIAL_EXCLUDE,
    pi_params: PIParams | None = None,
    blob_epsilon: float = 0.0,
    pi: PersistenceImage | None = None,
) -> FeatureRecord:
    lengths = bar_lengths(d, degree, essentials)
    binary = [binary_bar_feature(lengths, mode, t, floor) for t in theta_grid]
    trop = tropical_coordinates(lengths)
    if pi is None:
        pi = persistence_image(d, degree, pi_params)
    blobs = count_blobs(pi, blob_epsilon)
    return FeatureRecord(
        image_id=image_id,
        label=label,
        binary=binary,
        tropical=trop,
        blob_count=blobs.count,
        n_bars=len(lengths),
        mean_len=trop.mean_d,
    )


def feature_csv_header(theta_grid) -> list[str]:
    head = ["id", "label"]
    head += [f"theta={t:g}" for t in theta_grid]
    head += ["t1_x10", "t2_x10", "t3_x10", "t4_x10", "mean_d_x10", "blobs"]
    head += ["n_bars", "mean_len"]
    return head


def feature_csv_row(rec: FeatureRecord) -> list:
    t = rec.tropical
    row = [rec.image_id, rec.label]
    row += rec.binary
    row += [repr(t.t1 * 10), repr(t.t2 * 10), repr(t.t3 * 10), repr(t.t4 * 10), repr(t.mean_d * 10)]
    row += [rec.blob_count, rec.n_bars, repr(rec.mean_len)]
    return row


def write_feature_csv(records, theta_grid, path) -> None:
    """Label CSV: id, class label, one binary column per theta (regression
    targets are the tropical sums scaled by 10), blob count, then the raw
    bar count and unscaled mean length used by the stats round trip."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(feature_csv_header(theta_grid))
        for rec in records:
            w.writerow(feature_csv_row(rec))


def write_pi_csv(pi: PersistenceImage, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        for row in pi.values:
            w.writerow([repr(float(x)) for x in row])


def write_pi_f64(pi: PersistenceImage, path) -> None:
    """Raw block export: one text header line (resolution, bounds, mode),
    then n*n row-major little-endian float64 values."""
    p = pi.params
    header = (
        f"n={p.resolution} mode={pi.mode} "
        f"birth={p.birth_range[0]:g}:{p.birth_range[1]:g} "
        f"pers={p.pers_range[0]:g}:{p.pers_range[1]:g}\n"
    )
    with open(path, "wb") as fh:
        fh.write(header.encode("ascii"))
        fh.write(np.ascontiguousarray(pi.values, dtype="<f8").tobytes())


def read_pi_f64(path) -> PersistenceImage:
    with open(path, "rb") as fh:
        header = fh.readline().decode("ascii").strip()
        fields = dict(kv.split("=", 1) for kv in header.split())
        n = int(fields["n"])
        bx = tuple(float(x) for x in fields["birth"].split(":"))
        by = tuple(float(x) for x in fields["pers"].split(":"))
        values = np.frombuffer(fh.read(), dtype="<f8").reshape(n, n).copy()
    return PersistenceImage(values, PIParams(resolution=n, birth_range=bx, pers_range=by), fields["mode"])
