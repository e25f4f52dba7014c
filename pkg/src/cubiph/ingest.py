"""Dataset loaders: MNIST IDX, CIFAR-10 binary batches, PGM, CSV.

Every loader normalizes pixels to grey values in [0, 1]. *Normalization is
linear* (raw / 255, no gamma) so that filtration values are reproducible
across runs and machines.
"""

from __future__ import annotations

import re
import struct
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    CorruptFileError,
    DomainError,
    FormatError,
    ParameterError,
    TruncatedStreamError,
)

IDX_IMAGE_MAGIC = 0x00000803
IDX_LABEL_MAGIC = 0x00000801

CIFAR10_RECORD_BYTES = 3073  # 1 label byte + 3 * 1024 channel-planar bytes

# ITU-R BT.601 luminance weights, as integer ratios so that pure channels
# map to the exact decimal weights (299*255/255000 == 0.299 in float64).
_BT601 = (299, 587, 114)


@dataclass(frozen=True)
class RawImage:
    """Undecoded integer image: grey or RGB bytes in [0, 255], row-major."""

    width: int
    height: int
    channels: int
    pixels: np.ndarray

    def __post_init__(self):
        if self.channels not in (1, 3):
            raise DomainError(f"channels must be 1 or 3, got {self.channels}")
        if self.pixels.size != self.width * self.height * self.channels:
            raise DomainError(
                f"pixel count {self.pixels.size} != "
                f"{self.width}x{self.height}x{self.channels}"
            )


@dataclass(frozen=True)
class GreyImage:
    """Grey values in [0, 1], stored as a (height, width) float64 array."""

    values: np.ndarray

    def __post_init__(self):
        v = self.values
        if v.ndim != 2 or v.size == 0:
            raise DomainError(f"expected a nonempty 2D value grid, got shape {v.shape}")
        if float(v.min()) < 0.0 or float(v.max()) > 1.0:
            raise DomainError("grey values must lie in [0, 1]")

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]


@dataclass
class LabeledDataset:
    images: list[GreyImage]
    class_labels: list[int]
    split_tag: str = "train"
    source: str = field(default="", compare=False)

    def __post_init__(self):
        if len(self.images) != len(self.class_labels):
            raise CorruptFileError(
                f"{len(self.images)} images but {len(self.class_labels)} labels"
            )

    def __len__(self) -> int:
        return len(self.images)


def _read_be32(buf: bytes, offset: int, what: str) -> int:
    if offset + 4 > len(buf):
        raise TruncatedStreamError(f"stream ended inside {what}")
    return struct.unpack_from(">I", buf, offset)[0]


def load_idx(data: bytes, labels_data: bytes, split_tag: str = "train") -> LabeledDataset:
    """Decode an MNIST-style IDX image stream plus its label stream.

    Image stream (big endian):  u32 magic 0x00000803 | u32 count |
    u32 rows | u32 cols | count*rows*cols pixel bytes.
    Label stream: u32 magic 0x00000801 | u32 count | count label bytes.
    """
    magic = _read_be32(data, 0, "image header")
    if magic != IDX_IMAGE_MAGIC:
        raise FormatError(f"bad image magic 0x{magic:08x}, expected 0x{IDX_IMAGE_MAGIC:08x}")
    count = _read_be32(data, 4, "image header")
    rows = _read_be32(data, 8, "image header")
    cols = _read_be32(data, 12, "image header")
    need = 16 + count * rows * cols
    if len(data) < need:
        raise TruncatedStreamError(
            f"image stream has {len(data)} bytes, header implies {need}"
        )

    lmagic = _read_be32(labels_data, 0, "label header")
    if lmagic != IDX_LABEL_MAGIC:
        raise FormatError(f"bad label magic 0x{lmagic:08x}, expected 0x{IDX_LABEL_MAGIC:08x}")
    lcount = _read_be32(labels_data, 4, "label header")
    if lcount != count:
        raise CorruptFileError(f"{count} images but {lcount} labels")
    if len(labels_data) < 8 + lcount:
        raise TruncatedStreamError("label stream shorter than header-declared count")

    raw = np.frombuffer(data, dtype=np.uint8, count=count * rows * cols, offset=16)
    grid = raw.reshape(count, rows, cols).astype(np.float64) / 255.0
    labels = np.frombuffer(labels_data, dtype=np.uint8, count=lcount, offset=8)
    images = [GreyImage(grid[i]) for i in range(count)]
    return LabeledDataset(images, [int(x) for x in labels], split_tag)


def grey_from_raw(raw: RawImage, grey_mode: str = "bt601") -> GreyImage:
    """Normalize a decoded RawImage (interleaved bytes) to grey values."""
    px = np.asarray(raw.pixels, dtype=np.int64).reshape(raw.height, raw.width, raw.channels)
    if raw.channels == 1:
        return GreyImage(px[:, :, 0] / 255.0)
    r, g, b = px[:, :, 0], px[:, :, 1], px[:, :, 2]
    if grey_mode == "bt601":
        wr, wg, wb = _BT601
        return GreyImage((wr * r + wg * g + wb * b) / 255000.0)
    if grey_mode == "mean":
        return GreyImage((r + g + b) / 765.0)
    raise ParameterError(f"unknown grey conversion mode {grey_mode!r}")


def rgb_to_grey(r: int, g: int, b: int, mode: str = "bt601") -> float:
    """Map one RGB byte triple to a grey value in [0, 1].

    ``bt601`` uses the 0.299/0.587/0.114 luminance weights; ``mean`` averages
    the channels. Both are exact for pure channels (no clamping needed).
    """
    if mode == "bt601":
        wr, wg, wb = _BT601
        return (wr * r + wg * g + wb * b) / 255000.0
    if mode == "mean":
        return (r + g + b) / 765.0
    raise ParameterError(f"unknown grey conversion mode {mode!r}")


def load_cifar10(data: bytes, split_tag: str = "train", grey_mode: str = "bt601") -> LabeledDataset:
    """Decode CIFAR-10 binary batch records (1 label byte + 3072 planar RGB).

    Colors are reduced to grey via ``rgb_to_grey`` before normalization.
    """
    if len(data) == 0 or len(data) % CIFAR10_RECORD_BYTES != 0:
        raise FormatError(
            f"stream length {len(data)} is not a positive multiple of {CIFAR10_RECORD_BYTES}"
        )
    n = len(data) // CIFAR10_RECORD_BYTES
    rec = np.frombuffer(data, dtype=np.uint8).reshape(n, CIFAR10_RECORD_BYTES)
    labels = rec[:, 0]
    bad = np.nonzero(labels > 9)[0]
    if bad.size:
        raise FormatError(f"record {int(bad[0])} has label byte {int(labels[bad[0]])} > 9")
    planes = rec[:, 1:].reshape(n, 3, 32, 32).astype(np.int64)
    r, g, b = planes[:, 0], planes[:, 1], planes[:, 2]
    if grey_mode == "bt601":
        wr, wg, wb = _BT601
        grey = (wr * r + wg * g + wb * b) / 255000.0
    elif grey_mode == "mean":
        grey = (r + g + b) / 765.0
    else:
        raise ParameterError(f"unknown grey conversion mode {grey_mode!r}")
    images = [GreyImage(grey[i]) for i in range(n)]
    return LabeledDataset(images, [int(x) for x in labels], split_tag)


_PGM_TOKEN = re.compile(rb"(?:\s|#[^\n]*\n)*([^\s#]+)")


def load_pgm(data: bytes) -> GreyImage:
    """Decode a PGM image (P2 ascii or P5 binary), normalized by its maxval."""
    if not data.startswith((b"P2", b"P5")):
        raise FormatError("not a P2/P5 PGM stream")
    binary = data.startswith(b"P5")

    pos = 2
    header = []
    while len(header) < 3:
        m = _PGM_TOKEN.match(data, pos)
        if not m:
            raise TruncatedStreamError("PGM header ended early")
        header.append(m.group(1))
        pos = m.end()
    try:
        width, height, maxval = (int(t) for t in header)
    except ValueError as exc:
        raise FormatError(f"non-numeric PGM header token: {exc}") from exc
    if width < 1 or height < 1 or maxval < 1 or maxval > 65535:
        raise FormatError(f"bad PGM dimensions {width}x{height} maxval={maxval}")

    count = width * height
    if binary:
        pos += 1  # single whitespace byte after maxval
        dtype = np.dtype(">u2") if maxval > 255 else np.dtype(np.uint8)
        need = count * dtype.itemsize
        if len(data) - pos < need:
            raise TruncatedStreamError("PGM pixel payload truncated")
        raw = np.frombuffer(data, dtype=dtype, count=count, offset=pos).astype(np.float64)
    else:
        tokens = data[pos:].split()
        if len(tokens) < count:
            raise TruncatedStreamError(f"PGM has {len(tokens)} samples, needs {count}")
        try:
            raw = np.array([int(t) for t in tokens[:count]], dtype=np.float64)
        except ValueError as exc:
            raise FormatError(f"non-numeric PGM sample: {exc}") from exc
    if raw.max(initial=0.0) > maxval:
        raise CorruptFileError("PGM sample exceeds declared maxval")
    return GreyImage((raw / maxval).reshape(height, width))


def load_csv_image(text: str) -> GreyImage:
    """Decode one image from CSV text: one row per image row, cells already in [0, 1]."""
    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        try:
            rows.append([float(cell) for cell in line.split(",")])
        except ValueError as exc:
            raise FormatError(f"line {lineno}: non-numeric cell ({exc})") from exc
    if not rows:
        raise FormatError("CSV image has no rows")
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise CorruptFileError(f"ragged CSV rows, widths {sorted(widths)}")
    return GreyImage(np.array(rows, dtype=np.float64))
