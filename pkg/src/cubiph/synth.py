"""Synthetic grey-image dataset generator and IDX writer.

Produces MNIST-shaped images with controlled topology: dark rings on a
light background create degree-1 bars whose length is roughly the contrast
between the ring grey and the fill around it, filled discs and strokes add
components without holes, and mild noise keeps the task non-trivial. The
class label is the ring count (0..9), so class statistics correlate with
the topology the way digit classes do.

Run as a module to write IDX files compatible with the MNIST loaders:

    python -m cubiph.synth --out data/synth --count 6000 --seed 7
"""

from __future__ import annotations

import argparse
import os
import struct

import numpy as np

from .ingest import IDX_IMAGE_MAGIC, IDX_LABEL_MAGIC


def synth_image(rng: np.random.Generator, size: int = 28) -> tuple[np.ndarray, int]:
    """One synthetic image plus its ring-count label.

    Each ring's grey value is background minus a target bar length drawn
    from a short/long mixture, so the degree-1 barcode spans both sides of
    the usual theta thresholds; per-image noise amplitude varies so that
    small-bar statistics remain visually inferable.
    """
    bg = rng.uniform(0.72, 0.95)
    img = np.full((size, size), bg)

    yy, xx = np.mgrid[0:size, 0:size]
    n_rings = int(rng.integers(0, 4))
    for _ in range(n_rings):
        r_out = rng.uniform(3.2, min(9.0, size / 3.0))
        thick = rng.uniform(1.0, 2.4)
        cy = rng.uniform(r_out, size - 1 - r_out)
        cx = rng.uniform(r_out, size - 1 - r_out)
        if rng.random() < 0.5:
            bar = rng.uniform(0.12, 0.30)
        else:
            bar = rng.uniform(0.35, 0.90)
        grey = float(np.clip(bg - bar, 0.02, 0.88))
        rr = np.hypot(yy - cy, xx - cx)
        mask = (rr <= r_out) & (rr >= r_out - thick)
        img[mask] = np.minimum(img[mask], grey)

    for _ in range(int(rng.integers(0, 3))):  # hole-free distractors
        r = rng.uniform(1.0, 2.8)
        cy = rng.uniform(r, size - 1 - r)
        cx = rng.uniform(r, size - 1 - r)
        grey = rng.uniform(0.05, 0.6)
        mask = np.hypot(yy - cy, xx - cx) <= r
        img[mask] = np.minimum(img[mask], grey)

    img += rng.normal(0.0, rng.uniform(0.006, 0.025), size=img.shape)
    img = np.clip(img, 0.0, 1.0)
    return img, n_rings


def synth_dataset(count: int, size: int = 28, seed: int = 0):
    """Arrays of uint8 pixels (count, size, size) and labels (count,)."""
    rng = np.random.default_rng(seed)
    pixels = np.empty((count, size, size), dtype=np.uint8)
    labels = np.empty(count, dtype=np.uint8)
    for i in range(count):
        img, label = synth_image(rng, size)
        pixels[i] = np.round(img * 255).astype(np.uint8)
        labels[i] = label
    return pixels, labels


def write_idx_images(pixels: np.ndarray, path) -> None:
    count, rows, cols = pixels.shape
    with open(path, "wb") as fh:
        fh.write(struct.pack(">IIII", IDX_IMAGE_MAGIC, count, rows, cols))
        fh.write(np.ascontiguousarray(pixels, dtype=np.uint8).tobytes())


def write_idx_labels(labels: np.ndarray, path) -> None:
    with open(path, "wb") as fh:
        fh.write(struct.pack(">II", IDX_LABEL_MAGIC, labels.size))
        fh.write(np.ascontiguousarray(labels, dtype=np.uint8).tobytes())


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description="generate a synthetic IDX image dataset")
    ap.add_argument("--out", required=True, help="output directory")
    ap.add_argument("--count", type=int, default=6000)
    ap.add_argument("--size", type=int, default=28)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--tag", default="train", help="filename prefix (train/t10k/...)")
    args = ap.parse_args(argv)

    os.makedirs(args.out, exist_ok=True)
    pixels, labels = synth_dataset(args.count, args.size, args.seed)
    img_path = os.path.join(args.out, f"{args.tag}-images-idx3-ubyte")
    lab_path = os.path.join(args.out, f"{args.tag}-labels-idx1-ubyte")
    write_idx_images(pixels, img_path)
    write_idx_labels(labels, lab_path)
    print(f"wrote {args.count} images to {img_path}")
    print(f"wrote labels to {lab_path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
