from functools import reduce as fold

import numpy as np
import pytest

from helpers import random_grey_image
from cubiph.boundary import (
    build_boundary_matrix,
    export_cc_graph,
    export_fcc_graph,
    fcc_weight_matrix,
    symmetrize,
    write_boundary_triplets,
    write_edge_list,
    write_node_features,
)
from cubiph.cubical import build_cubical_complex, build_filtration

EXAMPLE_IMAGE = [[1, 3], [3, 2]]
EXAMPLE_ORDER = np.array([[1, 8, 6], [5, 9, 7], [3, 4, 2]])

# the 9x9 matrix printed for the worked example
EXAMPLE_B = np.array(
    [
        [0, 0, 0, 0, 1, 0, 0, 1, 0],
        [0, 0, 0, 1, 0, 0, 1, 0, 0],
        [0, 0, 0, 1, 1, 0, 0, 0, 0],
        [0, 0, 0, 0, 0, 0, 0, 0, 1],
        [0, 0, 0, 0, 0, 0, 0, 0, 1],
        [0, 0, 0, 0, 0, 0, 1, 1, 0],
        [0, 0, 0, 0, 0, 0, 0, 0, 1],
        [0, 0, 0, 0, 0, 0, 0, 0, 1],
        [0, 0, 0, 0, 0, 0, 0, 0, 0],
    ],
    dtype=np.uint8,
)


def example_filtration():
    cc = build_cubical_complex(EXAMPLE_IMAGE)
    return cc, build_filtration(cc, EXAMPLE_ORDER)


class TestBuildBoundary:
    def test_worked_example_matrix(self):
        _, f = example_filtration()
        b = build_boundary_matrix(f)
        assert np.array_equal(b.dense(), EXAMPLE_B)
        # spot checks straight off the printed matrix (1-based -> 0-based)
        assert b.column(8) == [3, 4, 6, 7]
        assert b.column(4) == [0, 2]

    def test_single_vertex(self):
        cc = build_cubical_complex([[0.5]])
        b = build_boundary_matrix(build_filtration(cc))
        assert b.n == 1
        assert b.column(0) == []

    def test_1x2_image(self):
        cc = build_cubical_complex([[0.1, 0.4]])
        f = build_filtration(cc)
        b = build_boundary_matrix(f)
        assert b.n == 3
        edge = int(f.order[0, 1])
        assert b.column(edge) == sorted([int(f.order[0, 0]), int(f.order[0, 2])])

    def test_strictly_upper_triangular(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            img = random_grey_image(rng)
            b = build_boundary_matrix(build_filtration(build_cubical_complex(img)))
            for j in range(b.n):
                col = b.column(j)
                assert all(i < j for i in col)
                assert col == sorted(col)
                assert len(col) == {0: 0, 1: 2, 2: 4}[int(b.cell_dim[j])]

    def test_nnz_is_2e_plus_4s(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            img = random_grey_image(rng)
            b = build_boundary_matrix(build_filtration(build_cubical_complex(img)))
            e = int((b.cell_dim == 1).sum())
            s = int((b.cell_dim == 2).sum())
            assert b.nnz() == 2 * e + 4 * s

    def test_boundary_of_boundary_is_zero(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            img = random_grey_image(rng)
            b = build_boundary_matrix(build_filtration(build_cubical_complex(img)))
            cols = [fold(lambda a, r: a | (1 << r), c, 0) for c in b.columns()]
            for j in np.flatnonzero(b.cell_dim == 2):
                acc = 0
                for edge in b.column(int(j)):
                    acc ^= cols[edge]
                assert acc == 0


class TestSymmetrize:
    def test_worked_example_square_degree(self):
        _, f = example_filtration()
        g = symmetrize(build_boundary_matrix(f))
        assert g.n == 9
        assert g.degree(8) == 4  # the square touches its four edges

    def test_zero_matrix_gives_edgeless_graph(self):
        cc = build_cubical_complex([[0.5]])
        g = symmetrize(build_boundary_matrix(build_filtration(cc)))
        assert g.src.size == 0

    def test_1x2_is_a_path(self):
        cc = build_cubical_complex([[0.1, 0.4]])
        f = build_filtration(cc)
        g = symmetrize(build_boundary_matrix(f))
        assert g.n == 3
        edge_rank = int(np.flatnonzero(f.dims_by_rank == 1)[0])
        assert g.degree(edge_rank) == 2

    def test_same_graph_from_either_triangle(self):
        # B and B^T symmetrize identically: edge set is unordered incidence
        _, f = example_filtration()
        g = symmetrize(build_boundary_matrix(f))
        undirected = {(int(s), int(d)) for s, d in zip(g.src, g.dst)}
        assert undirected == {(min(a, b), max(a, b)) for a, b in undirected}


class TestGridGraphs:
    def test_cc_graph_worked_example(self):
        cc, f = example_filtration()
        g = export_cc_graph(cc, f)
        assert g.n == 9
        # self-loops carry each cell's own extended value
        loops = {int(s): float(w) for s, d, w in zip(g.src, g.dst, g.weight) if s == d}
        assert loops == {i: float(v) for i, v in enumerate(np.ravel([[1, 3, 3], [3, 3, 3], [3, 3, 2]]))}

    def test_cc_graph_single_cell(self):
        cc = build_cubical_complex([[0.25]])
        g = export_cc_graph(cc)
        assert g.n == 1
        assert g.src.tolist() == [0] and g.dst.tolist() == [0]
        assert g.weight.tolist() == [0.25]

    def test_cc_graph_constant_zero(self):
        cc = build_cubical_complex(np.zeros((2, 2)))
        g = export_cc_graph(cc)
        assert np.all(g.weight == 0.0)

    def test_fcc_weight_matrix_worked_example(self):
        cc, f = example_filtration()
        w = fcc_weight_matrix(cc, f)
        assert w[0, 0] == 1.0  # rank 1 -> first flattened value
        assert w[2, 2] == 3.0  # rank 2 sits at flat position 1, value 3
        expected = cc.cell_values.ravel()[f.order]
        assert np.array_equal(w, expected)

    def test_fcc_identity_order_reproduces_values(self):
        img = np.array([[0.0, 0.5], [0.5, 1.0]])
        cc = build_cubical_complex(img)
        n = cc.n_cells
        identity = np.arange(1, n + 1).reshape(cc.cell_values.shape)
        # identity order is only a valid filtration if values happen to allow
        # it; build the Filtration object directly to test the composition
        from cubiph.cubical import Filtration

        f = Filtration(cc, identity - 1, np.arange(n))
        assert np.array_equal(fcc_weight_matrix(cc, f), cc.cell_values)

    def test_fcc_constant_complex(self):
        cc = build_cubical_complex(np.full((2, 3), 0.5))
        f = build_filtration(cc)
        assert np.all(fcc_weight_matrix(cc, f) == 0.5)
        g = export_fcc_graph(cc, f)
        assert np.all(g.weight == 0.5)


class TestFileExports:
    def test_edge_list_format(self, tmp_path):
        _, f = example_filtration()
        g = symmetrize(build_boundary_matrix(f))
        path = tmp_path / "g.txt"
        write_edge_list(g, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "nodes=9"
        parts = lines[1].split()
        assert len(parts) == 3
        int(parts[0]), int(parts[1]), float(parts[2])

    def test_node_features_csv(self, tmp_path):
        cc, f = example_filtration()
        g = export_cc_graph(cc, f)
        path = tmp_path / "nodes.csv"
        write_node_features(g, path)
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "node,dim,value,rank"
        assert len(lines) == 10
        first = lines[1].split(",")
        assert first[0] == "0" and first[1] == "0" and float(first[2]) == 1.0 and first[3] == "1"

    def test_boundary_triplets(self, tmp_path):
        _, f = example_filtration()
        b = build_boundary_matrix(f)
        path = tmp_path / "b.txt"
        write_boundary_triplets(b, path)
        lines = path.read_text().strip().splitlines()
        assert len(lines) == b.nnz()
        assert lines[-1].split() == ["7", "8", "1"]
