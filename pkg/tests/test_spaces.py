import numpy as np
import pytest

import padlab as pl
from oracles import heisenberg_words


FIXTURES = [
    pl.integer_segment(40),
    pl.grid_2d(7, 5, "l1"),
    pl.grid_2d(6, 6, "l2"),
    pl.grid_2d(5, 8, "linf"),
    pl.euclidean_cloud(60, 2, seed=3),
    pl.euclidean_cloud(40, 3, seed=8),
    pl.balanced_tree(2, 4),
    pl.heisenberg_ball(3),
]


@pytest.mark.parametrize("space", FIXTURES, ids=lambda s: s.label)
def test_metric_axioms_exhaustive(space):
    pl.validate_metric(space)


def test_metric_axioms_sampled_on_large_fixture():
    pl.validate_metric(pl.integer_segment(500), exhaustive_limit=100, samples=2000)


def test_dist_block_matches_dist_row():
    for space in FIXTURES:
        rows = np.array([0, space.n // 2, space.n - 1])
        block = space.dist_block(rows, np.arange(space.n))
        for k, i in enumerate(rows):
            assert np.array_equal(block[k], space.dist_row(int(i)))


def test_open_ball_is_strict():
    seg = pl.integer_segment(10)
    assert seg.ball(5, 2.0).tolist() == [4, 5, 6]
    assert seg.ball(5, 2.0 + 1e-9).tolist() == [3, 4, 5, 6, 7]


def test_segment_basics():
    seg = pl.integer_segment(100)
    assert seg.n == 101
    assert seg.diameter() == 100.0
    assert seg.dist(3, 10) == 7.0


def test_grid_metrics_differ():
    l1 = pl.grid_2d(4, 4, "l1")
    l2 = pl.grid_2d(4, 4, "l2")
    linf = pl.grid_2d(4, 4, "linf")
    i, j = 0, 15  # corners (3,3) apart
    assert l1.dist(i, j) == 6.0
    assert l2.dist(i, j) == pytest.approx(np.sqrt(18.0))
    assert linf.dist(i, j) == 3.0
    assert linf.diameter() == 3.0


def test_cloud_distances_rounded_and_reproducible():
    a = pl.euclidean_cloud(30, 2, seed=5)
    b = pl.euclidean_cloud(30, 2, seed=5)
    assert np.array_equal(a.coords, b.coords)
    d = a.dist_row(0)
    assert np.array_equal(d, np.round(d, 12))
    assert not np.array_equal(a.coords, pl.euclidean_cloud(30, 2, seed=6).coords)


def test_balanced_tree_distances():
    t = pl.balanced_tree(2, 3)   # 15 nodes
    assert t.n == 15
    assert t.dist(0, 1) == 1.0
    assert t.dist(1, 2) == 2.0       # siblings via root
    assert t.dist(7, 8) == 2.0       # leaf siblings via node 3
    assert t.dist(7, 14) == 6.0      # leftmost to rightmost leaf
    assert t.diameter() == 6.0


class TestHeisenberg:
    def test_radius_one_is_identity_plus_generators(self):
        h = pl.heisenberg_ball(1)
        assert h.n == 5

    def test_bfs_matches_word_enumeration(self):
        h = pl.heisenberg_ball(4)
        assert h.ball_sizes == heisenberg_words(4)

    def test_ball_sizes_monotone(self):
        h = pl.heisenberg_ball(8)
        assert all(a < b for a, b in zip(h.ball_sizes, h.ball_sizes[1:]))

    def test_distance_is_word_metric(self):
        h = pl.heisenberg_ball(3)
        # d(g, h) = word length of g^{-1} h; spot check against element norms
        for i in range(h.n):
            assert h.dist(0, i) == h.word_lengths[i]
        pl.validate_metric(h)

    def test_rejects_bad_radius(self):
        with pytest.raises(ValueError):
            pl.heisenberg_ball(0)
        with pytest.raises(ValueError):
            pl.heisenberg_ball(17)

    def test_group_law_convention(self):
        # (a,b,c)*(a',b',c') = (a+a', b+b', c+c'+a*b'): xy = (1,1,1) while
        # yx = (1,1,0), so both length-2 products appear and differ centrally
        h = pl.heisenberg_ball(2)
        elems = {tuple(e) for e in h.elements.tolist()}
        assert (1, 1, 1) in elems and (1, 1, 0) in elems


def test_point_file_round_trip(tmp_path):
    path = tmp_path / "pts.txt"
    space = pl.grid_2d(4, 3, "linf")
    with open(path, "w") as fh:
        for row in space.coords:
            fh.write(f"{row[0]} {row[1]}\n")
    loaded = pl.load_points(path, "linf")
    assert loaded.n == space.n
    assert np.array_equal(loaded.dist_row(0), space.dist_row(0))


def test_edge_list_unweighted_and_weighted(tmp_path):
    path = tmp_path / "g.txt"
    path.write_text("0 1\n1 2\n2 3\n")
    sp = pl.load_edge_list(path)
    assert sp.dist(0, 3) == 3.0
    path.write_text("0 1 2.5\n1 2 0.5\n0 2 4.0\n")
    sp = pl.load_edge_list(path)
    assert sp.dist(0, 2) == 3.0  # through vertex 1


def test_edge_list_rejects_disconnected(tmp_path):
    path = tmp_path / "g.txt"
    path.write_text("0 1\n2 3\n")
    with pytest.raises(ValueError):
        pl.load_edge_list(path)


@pytest.mark.parametrize("spec,n", [
    ("segment:1000", 1001),
    ("grid:10x10:linf", 100),
    ("heis:2", 17),
    ("cloud:50:2:seed=7", 50),
    ("tree:3:2", 13),
])
def test_parse_fixture(spec, n):
    assert pl.parse_fixture(spec).n == n


def test_parse_fixture_rejects_garbage():
    for bad in ("segment", "segment:x", "grid:10", "nope:3", "cloud:10"):
        with pytest.raises(ValueError):
            pl.parse_fixture(bad)


def test_measured_space_requires_positive_mass():
    seg = pl.integer_segment(5)
    with pytest.raises(ValueError):
        pl.MeasuredSpace(seg, np.zeros(6))
    ms = pl.MeasuredSpace.uniform(seg)
    assert ms.ball_mass(3, 1.5) == 3.0


def test_validate_metric_catches_violations():
    bad = pl.MatrixSpace(np.array([[0.0, 1.0], [2.0, 0.0]]))
    with pytest.raises(pl.MetricError):
        pl.validate_metric(bad)
    bad2 = pl.MatrixSpace(np.array([[0, 1, 9], [1, 0, 1], [9, 1, 0]], dtype=float))
    with pytest.raises(pl.MetricError):
        pl.validate_metric(bad2)
