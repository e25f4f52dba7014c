import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from helpers import random_valid_order
from cubiph.cubical import (
    build_cubical_complex,
    build_filtration,
    validate_filtration,
    write_rank_grid,
    write_value_grid,
)
from cubiph.errors import DomainError, InvalidOrderError

EXAMPLE_IMAGE = [[1, 3], [3, 2]]
EXAMPLE_CC = [[1, 3, 3], [3, 3, 3], [3, 3, 2]]
EXAMPLE_ORDER = [[1, 8, 6], [5, 9, 7], [3, 4, 2]]


def images(max_side=6, levels=5):
    side = st.integers(1, max_side)
    return side.flatmap(
        lambda h: side.flatmap(
            lambda w: hnp.arrays(
                np.float64,
                (h, w),
                elements=st.integers(0, levels - 1).map(lambda k: k / (levels - 1)),
            )
        )
    )


class TestBuildComplex:
    def test_worked_2x2_example(self):
        cc = build_cubical_complex(EXAMPLE_IMAGE)
        assert np.array_equal(cc.cell_values, np.array(EXAMPLE_CC, dtype=float))
        assert np.array_equal(cc.cell_dims, [[0, 1, 0], [1, 2, 1], [0, 1, 0]])

    def test_single_pixel(self):
        cc = build_cubical_complex([[0.4]])
        assert cc.cell_values.shape == (1, 1)
        assert cc.cell_values[0, 0] == 0.4
        assert cc.cell_dims[0, 0] == 0

    def test_constant_image(self):
        cc = build_cubical_complex(np.full((3, 4), 0.7))
        assert np.all(cc.cell_values == 0.7)

    def test_empty_image_rejected(self):
        with pytest.raises(DomainError):
            build_cubical_complex(np.zeros((0, 2)))

    @given(images())
    def test_cell_value_dominates_faces(self, img):
        cc = build_cubical_complex(img)
        for i in range(cc.rows):
            for j in range(cc.cols):
                for fi, fj in cc.faces(i, j):
                    assert cc.cell_values[fi, fj] <= cc.cell_values[i, j]

    @given(images(max_side=5))
    def test_raising_a_pixel_is_monotone(self, img):
        base = build_cubical_complex(img).cell_values
        img2 = img.copy()
        img2[0, 0] = min(1.0, img2[0, 0] + 0.5)
        bumped = build_cubical_complex(img2).cell_values
        assert np.all(bumped >= base)


class TestFiltration:
    def test_canonical_is_valid_for_random_images(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            h, w = rng.integers(1, 7, size=2)
            img = rng.integers(0, 4, size=(h, w)) / 3.0
            f = build_filtration(build_cubical_complex(img))
            validate_filtration(f)  # raises on violation

    def test_canonical_low_value_cells_first(self):
        f = build_filtration(build_cubical_complex(EXAMPLE_IMAGE))
        grid = f.rank_grid_one_based()
        assert grid[0, 0] == 1  # the grey-1 vertex
        assert grid[2, 2] == 2  # the grey-2 vertex
        assert np.array_equal(grid, [[1, 5, 3], [6, 9, 7], [4, 8, 2]])

    def test_paper_explicit_order_accepted(self):
        cc = build_cubical_complex(EXAMPLE_IMAGE)
        f = build_filtration(cc, np.array(EXAMPLE_ORDER))
        assert np.array_equal(f.rank_grid_one_based(), EXAMPLE_ORDER)

    def test_square_before_edge_rejected(self):
        cc = build_cubical_complex(EXAMPLE_IMAGE)
        bad = np.array(EXAMPLE_ORDER)
        # swap the square (rank 9) with one of its edges (rank 8)
        bad[1, 1], bad[0, 1] = 8, 9
        with pytest.raises(InvalidOrderError) as exc:
            build_filtration(cc, bad)
        assert exc.value.pair is not None

    def test_grey_decrease_rejected(self):
        cc = build_cubical_complex(EXAMPLE_IMAGE)
        bad = np.array(EXAMPLE_ORDER)
        # putting a grey-3 vertex before the grey-2 vertex breaks monotonicity
        bad[2, 2], bad[2, 0] = 3, 2
        with pytest.raises(InvalidOrderError):
            build_filtration(cc, bad)

    def test_non_permutation_rejected(self):
        cc = build_cubical_complex(EXAMPLE_IMAGE)
        bad = np.ones((3, 3), dtype=int)
        with pytest.raises(InvalidOrderError):
            build_filtration(cc, bad)

    def test_wrong_shape_rejected(self):
        cc = build_cubical_complex(EXAMPLE_IMAGE)
        with pytest.raises(InvalidOrderError):
            build_filtration(cc, np.array([[1, 2], [3, 4]]))

    def test_random_valid_orders_pass_validation(self):
        rng = np.random.default_rng(5)
        for _ in range(25):
            img = rng.integers(0, 3, size=(rng.integers(1, 6), rng.integers(1, 6))) / 2.0
            cc = build_cubical_complex(img)
            order = random_valid_order(cc, rng)
            f = build_filtration(cc, order)  # validates internally
            assert f.n == cc.n_cells

    def test_canonical_deterministic(self):
        img = np.random.default_rng(0).random((5, 5)).round(1)
        a = build_filtration(build_cubical_complex(img)).order
        b = build_filtration(build_cubical_complex(img)).order
        assert np.array_equal(a, b)


class TestGridExports:
    def test_value_grid_csv(self, tmp_path):
        cc = build_cubical_complex(EXAMPLE_IMAGE)
        path = tmp_path / "cc.csv"
        write_value_grid(cc, path)
        got = [line.split(",") for line in path.read_text().strip().splitlines()]
        assert [[float(x) for x in row] for row in got] == [[1, 3, 3], [3, 3, 3], [3, 3, 2]]

    def test_rank_grid_csv_is_one_based(self, tmp_path):
        cc = build_cubical_complex(EXAMPLE_IMAGE)
        f = build_filtration(cc, np.array(EXAMPLE_ORDER))
        path = tmp_path / "fcc.csv"
        write_rank_grid(f, path)
        got = [[int(x) for x in line.split(",")] for line in path.read_text().strip().splitlines()]
        assert got == EXAMPLE_ORDER
