import struct

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cubiph.errors import CorruptFileError, DomainError, FormatError, TruncatedStreamError
from cubiph.ingest import (
    GreyImage,
    load_cifar10,
    load_csv_image,
    load_idx,
    load_pgm,
    rgb_to_grey,
)


def idx_images(pixels: np.ndarray) -> bytes:
    count, rows, cols = pixels.shape
    return struct.pack(">IIII", 0x803, count, rows, cols) + pixels.astype(np.uint8).tobytes()


def idx_labels(labels) -> bytes:
    return struct.pack(">II", 0x801, len(labels)) + bytes(labels)


class TestIdx:
    def test_two_record_28x28(self):
        pixels = np.zeros((2, 28, 28), dtype=np.uint8)
        ds = load_idx(idx_images(pixels), idx_labels([3, 7]))
        assert len(ds) == 2
        assert ds.images[0].width == ds.images[0].height == 28
        assert ds.class_labels == [3, 7]

    def test_all_zero_record(self):
        pixels = np.zeros((1, 4, 4), dtype=np.uint8)
        ds = load_idx(idx_images(pixels), idx_labels([0]))
        assert np.all(ds.images[0].values == 0.0)

    def test_255_normalizes_to_one(self):
        pixels = np.zeros((1, 2, 2), dtype=np.uint8)
        pixels[0, 0, 0] = 255
        ds = load_idx(idx_images(pixels), idx_labels([1]))
        assert ds.images[0].values[0, 0] == 1.0

    def test_bad_image_magic(self):
        data = struct.pack(">IIII", 0x804, 1, 2, 2) + bytes(4)
        with pytest.raises(FormatError):
            load_idx(data, idx_labels([0]))

    def test_bad_label_magic(self):
        pixels = np.zeros((1, 2, 2), dtype=np.uint8)
        with pytest.raises(FormatError):
            load_idx(idx_images(pixels), struct.pack(">II", 0x999, 1) + b"\x00")

    def test_count_mismatch(self):
        pixels = np.zeros((2, 2, 2), dtype=np.uint8)
        with pytest.raises(CorruptFileError):
            load_idx(idx_images(pixels), idx_labels([0]))

    def test_truncated_pixels(self):
        pixels = np.zeros((2, 3, 3), dtype=np.uint8)
        with pytest.raises(TruncatedStreamError):
            load_idx(idx_images(pixels)[:-5], idx_labels([0, 1]))

    def test_truncated_labels(self):
        pixels = np.zeros((2, 2, 2), dtype=np.uint8)
        with pytest.raises(TruncatedStreamError):
            load_idx(idx_images(pixels), idx_labels([0, 1])[:-1])

    @given(st.lists(st.integers(0, 255), min_size=4, max_size=4))
    def test_round_trip_bytes(self, vals):
        pixels = np.array(vals, dtype=np.uint8).reshape(1, 2, 2)
        ds = load_idx(idx_images(pixels), idx_labels([0]))
        assert np.array_equal(np.round(ds.images[0].values * 255), pixels[0])


def cifar_record(label: int, r: int, g: int, b: int) -> bytes:
    return bytes([label]) + bytes([r] * 1024) + bytes([g] * 1024) + bytes([b] * 1024)


class TestCifar10:
    def test_white_maps_to_one(self):
        ds = load_cifar10(cifar_record(0, 255, 255, 255))
        assert len(ds) == 1
        img = ds.images[0]
        assert img.width == img.height == 32
        assert np.all(img.values == 1.0)

    def test_black_maps_to_zero(self):
        ds = load_cifar10(cifar_record(9, 0, 0, 0))
        assert np.all(ds.images[0].values == 0.0)
        assert ds.class_labels == [9]

    def test_pure_red_is_bt601_weight(self):
        ds = load_cifar10(cifar_record(1, 255, 0, 0))
        assert np.all(ds.images[0].values == 0.299)

    def test_bad_length(self):
        with pytest.raises(FormatError):
            load_cifar10(bytes(3072))

    def test_bad_label_byte(self):
        with pytest.raises(FormatError):
            load_cifar10(cifar_record(10, 0, 0, 0))

    def test_record_count_from_length(self):
        data = cifar_record(0, 1, 2, 3) + cifar_record(5, 7, 7, 7)
        ds = load_cifar10(data)
        assert len(ds) == 2
        assert ds.class_labels == [0, 5]

    def test_mean_mode(self):
        ds = load_cifar10(cifar_record(0, 255, 0, 0), grey_mode="mean")
        assert np.allclose(ds.images[0].values, 255 / 765)


class TestRgbToGrey:
    def test_white(self):
        assert rgb_to_grey(255, 255, 255) == 1.0

    def test_black(self):
        assert rgb_to_grey(0, 0, 0) == 0.0

    def test_pure_green(self):
        assert rgb_to_grey(0, 255, 0) == 0.587

    @given(st.integers(0, 255), st.integers(0, 255), st.integers(0, 255))
    def test_in_unit_interval(self, r, g, b):
        v = rgb_to_grey(r, g, b)
        assert 0.0 <= v <= 1.0
        m = rgb_to_grey(r, g, b, mode="mean")
        assert 0.0 <= m <= 1.0


class TestPgm:
    def test_p2_ascii(self):
        img = load_pgm(b"P2\n# comment\n3 2\n10\n0 5 10\n10 5 0\n")
        assert img.values.shape == (2, 3)
        assert img.values[0, 2] == 1.0
        assert img.values[0, 1] == 0.5

    def test_p5_binary(self):
        data = b"P5\n2 2\n255\n" + bytes([0, 128, 255, 64])
        img = load_pgm(data)
        assert img.values.shape == (2, 2)
        assert img.values[1, 0] == 1.0

    def test_p5_16bit(self):
        data = b"P5\n1 1\n65535\n" + struct.pack(">H", 65535)
        assert load_pgm(data).values[0, 0] == 1.0

    def test_bad_magic(self):
        with pytest.raises(FormatError):
            load_pgm(b"P6\n1 1\n255\n\x00\x00\x00")

    def test_truncated(self):
        with pytest.raises(TruncatedStreamError):
            load_pgm(b"P5\n4 4\n255\n\x00\x00")


class TestCsvImage:
    def test_basic(self):
        img = load_csv_image("0.0,0.5\n1.0,0.25\n")
        assert img.values.shape == (2, 2)
        assert img.values[1, 0] == 1.0

    def test_ragged_rows(self):
        with pytest.raises(CorruptFileError):
            load_csv_image("0.0,0.5\n1.0\n")

    def test_out_of_range(self):
        with pytest.raises(DomainError):
            load_csv_image("0.0,1.5\n")

    def test_non_numeric(self):
        with pytest.raises(FormatError):
            load_csv_image("0.0,x\n")


class TestGreyImage:
    def test_rejects_out_of_range(self):
        with pytest.raises(DomainError):
            GreyImage(np.array([[1.2]]))
        with pytest.raises(DomainError):
            GreyImage(np.array([[-0.1]]))

    def test_rejects_empty(self):
        with pytest.raises(DomainError):
            GreyImage(np.zeros((0, 3)))


class TestRawImage:
    def test_invariants(self):
        from cubiph.ingest import RawImage

        with pytest.raises(DomainError):
            RawImage(2, 2, 2, np.zeros(8, dtype=np.uint8))
        with pytest.raises(DomainError):
            RawImage(2, 2, 1, np.zeros(5, dtype=np.uint8))

    def test_grey_conversion_matches_scalar_path(self):
        from cubiph.ingest import RawImage, grey_from_raw

        raw = RawImage(1, 1, 3, np.array([10, 200, 30], dtype=np.uint8))
        img = grey_from_raw(raw)
        assert img.values[0, 0] == rgb_to_grey(10, 200, 30)

    def test_single_channel_normalizes(self):
        from cubiph.ingest import RawImage, grey_from_raw

        raw = RawImage(2, 1, 1, np.array([0, 255], dtype=np.uint8))
        assert grey_from_raw(raw).values.tolist() == [[0.0, 1.0]]
