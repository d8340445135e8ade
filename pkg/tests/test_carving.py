import numpy as np
import pytest

import padlab as pl
from oracles import literal_carve, literal_is_cut


def path_graph_netgraph(n):
    space = pl.integer_segment(n - 1)
    net = pl.build_net(space, 1, 1)
    return pl.NetGraph(net, 1.0, 1.0)  # edges exactly at distance 1


class TestGreedyColor:
    def test_path_needs_two_colors(self):
        col = pl.greedy_color(path_graph_netgraph(5))
        assert col.num_colors == 2
        assert col.colors.tolist() == [0, 1, 0, 1, 0]

    def test_clique_needs_all_colors(self):
        space = pl.integer_segment(9)
        net = pl.build_net(space, 3, 3)
        col = pl.greedy_color(pl.net_graph(net, 10.0))
        assert col.num_colors == 4

    def test_order_is_respected(self):
        g = path_graph_netgraph(3)
        col = pl.greedy_color(g, order=np.array([1, 0, 2]))
        assert col.colors[1] == 0 and col.colors[0] == 1 and col.colors[2] == 1

    def test_random_bounded_degree_graphs_proper_within_bound(self):
        """200 random geometric band graphs: proper everywhere, and never
        more than max degree + 1 colors, checked against raw adjacency."""
        rng = np.random.default_rng(5)
        for trial in range(200):
            n = int(rng.integers(10, 40))
            space = pl.euclidean_cloud(n, 2, seed=trial, scale=6.0)
            net = pl.build_net(space, 1.0, 1.0)
            g = pl.net_graph(net, float(rng.uniform(1.5, 4.0)))
            col = pl.greedy_color(g, order=rng.permutation(g.num_vertices()))
            assert col.num_colors <= g.max_degree + 1
            mm = net.member_dist_matrix()
            for a in range(g.num_vertices()):
                for b in range(a + 1, g.num_vertices()):
                    if g.band_low <= mm[a, b] <= g.band_high:
                        assert col.colors[a] != col.colors[b]


class TestCarve:
    def setup_method(self):
        self.space = pl.integer_segment(9)
        self.net = pl.build_net(self.space, 3, 3)
        self.coloring = pl.greedy_color(pl.net_graph(self.net, 10.0))

    def test_hand_simulation(self):
        radii = pl.RadiusAssignment(np.full(4, 4.0), 3.0, 5.0)
        layer = pl.carve(self.space, self.net, self.coloring, radii)
        assert [s.tolist() for s in layer.cluster_sets()] == [[0, 1, 2, 3], [4, 5, 6], [7, 8, 9]]
        assert layer.centers.tolist() == [0, 3, 6]  # empty cluster of 9 dropped

    def test_single_ball_swallows_space(self):
        space = pl.integer_segment(20)
        net = pl.Net(space, np.array([10]), 21.0, 21.0)
        coloring = pl.greedy_color(pl.NetGraph(net, 21.0, 2 * 25.0))
        radii = pl.RadiusAssignment(np.array([25.0]), 21.0, 25.0)
        layer = pl.carve(space, net, coloring, radii)
        assert layer.num_clusters == 1
        assert layer.points_of(0).tolist() == list(range(21))

    def test_isolated_carving_every_point_own_cluster(self):
        space = pl.CoordSpace(np.arange(0, 50, 10.0))  # pairwise distance >= 10
        net = pl.build_net(space, 1, 1)
        radii = pl.RadiusAssignment(np.full(5, 1.0), 1.0, 2.0)
        coloring = pl.greedy_color(pl.net_graph(net, 2 * 2.0))
        layer = pl.carve(space, net, coloring, radii)
        assert layer.num_clusters == 5

    def test_total_partition(self):
        rng = np.random.default_rng(0)
        radii = pl.RadiusAssignment(rng.uniform(3, 5, 4), 3.0, 5.0)
        layer = pl.carve(self.space, self.net, self.coloring, radii)
        sets = layer.cluster_sets()
        combined = np.sort(np.concatenate(sets))
        assert combined.tolist() == list(range(10))

    def test_rejects_low_truncation_below_covering_radius(self):
        radii = pl.RadiusAssignment(np.full(4, 2.5), 2.0, 5.0)
        with pytest.raises(ValueError):
            pl.carve(self.space, self.net, self.coloring, radii)

    def test_rejects_coloring_with_short_band(self):
        radii = pl.RadiusAssignment(np.full(4, 4.0), 3.0, 8.0)  # needs band 16
        with pytest.raises(ValueError):
            pl.carve(self.space, self.net, self.coloring, radii)

    def test_detects_invalid_coloring(self):
        # force two same-color centers whose balls overlap
        bad = pl.Coloring(self.coloring.graph, np.zeros(4, dtype=np.int64), 1)
        radii = pl.RadiusAssignment(np.full(4, 4.0), 3.0, 5.0)
        with pytest.raises(pl.CarveError):
            pl.carve(self.space, self.net, bad, radii)

    def test_cluster_diameter_at_most_twice_cap(self):
        rng = np.random.default_rng(3)
        for trial in range(20):
            space = pl.euclidean_cloud(150, 2, seed=trial, scale=10.0)
            net = pl.build_net(space, 1, 1)
            M = 2.0
            coloring = pl.greedy_color(pl.net_graph(net, 2 * M))
            t = rng.uniform(1.0, M, len(net.members))
            layer = pl.carve(space, net, coloring, pl.RadiusAssignment(t, 1.0, M))
            for s in layer.cluster_sets():
                assert pl.set_diameter(space, s) <= 2 * M

    def test_partition_invariant_to_cluster_labels(self):
        rng = np.random.default_rng(9)
        t = rng.uniform(3, 5, 4)
        layer = pl.carve(self.space, self.net, self.coloring,
                         pl.RadiusAssignment(t, 3.0, 5.0))
        as_sets = {frozenset(s.tolist()) for s in layer.cluster_sets()}
        again = pl.carve(self.space, self.net, self.coloring,
                         pl.RadiusAssignment(t, 3.0, 5.0))
        assert {frozenset(s.tolist()) for s in again.cluster_sets()} == as_sets

    @pytest.mark.parametrize("fixture", [
        pl.integer_segment(99),
        pl.grid_2d(12, 12, "linf"),
        pl.euclidean_cloud(200, 2, seed=1, scale=12.0),
    ], ids=lambda s: s.label)
    def test_priority_rule_equals_inductive_peel_off(self, fixture):
        """50 random radius draws per fixture: the per-point priority rule
        and the literal color-by-color set difference agree everywhere."""
        net = pl.build_net(fixture, 1, 1)
        M = 3.0
        coloring = pl.greedy_color(pl.net_graph(net, 2 * M))
        rng = np.random.default_rng(7)
        for _ in range(50):
            t = rng.uniform(1.0, M, len(net.members))
            radii = pl.RadiusAssignment(t, 1.0, M)
            layer = pl.carve(fixture, net, coloring, radii)
            mine = layer.center_positions[layer.cluster_of]
            oracle = literal_carve(fixture, net.members, coloring.colors, t)
            assert np.array_equal(mine, oracle)

    def test_csv_serialization(self, tmp_path):
        radii = pl.RadiusAssignment(np.full(4, 4.0), 3.0, 5.0)
        layer = pl.carve(self.space, self.net, self.coloring, radii)
        path = tmp_path / "layer.csv"
        layer.write_csv(path)
        lines = path.read_text().splitlines()
        assert lines[0] == "point_id,cluster_id,center_id"
        assert lines[1] == "0,0,0"
        assert lines[5] == "4,1,3"


class TestIsCut:
    def setup_method(self):
        space = pl.integer_segment(9)
        net = pl.build_net(space, 3, 3)
        coloring = pl.greedy_color(pl.net_graph(net, 10.0))
        radii = pl.RadiusAssignment(np.full(4, 4.0), 3.0, 5.0)
        self.layer = pl.carve(space, net, coloring, radii)

    def test_hand_examples(self):
        assert pl.is_cut(self.layer, 6, 2.0) is True    # {5,6,7} spans two clusters
        assert pl.is_cut(self.layer, 1, 2.0) is False   # {0,1,2} inside the first

    def test_tiny_ball_never_cut(self):
        for c in range(10):
            assert pl.is_cut(self.layer, c, 0.5) is False

    def test_monotone_in_radius(self):
        for c in range(10):
            for r in (1.0, 2.0, 3.0, 5.0, 8.0):
                if pl.is_cut(self.layer, c, r):
                    assert pl.is_cut(self.layer, c, r + 1.0)

    def test_rejects_nonpositive_radius(self):
        with pytest.raises(ValueError):
            pl.is_cut(self.layer, 3, 0.0)


class TestCutProbabilityMc:
    def test_single_huge_ball_never_cuts(self):
        space = pl.integer_segment(20)
        net = pl.Net(space, np.array([10]), 21.0, 21.0)
        law = pl.TexpParams(0.5, 21.0, 22.0)
        res = pl.cut_probability_mc(space, net, 22.0, 21.0, law, 3.0,
                                    centers=[10], trials=1, seed=0)
        assert res.aggregate_freq == 0.0

    def test_matches_literal_carve_per_trial(self):
        """The lazy first-touching-ball evaluation equals carving the full
        layer with the inductive oracle, trial by trial, center by center."""
        space = pl.integer_segment(99)
        net = pl.build_net(space, 1, 1)
        law = pl.TgeoParams(0.05, 20)
        centers = np.arange(5, 95, 7)
        trials = 50
        res = pl.cut_probability_mc(space, net, 20.0, 1.0, law, 3.0,
                                    centers, trials, seed=13)
        coloring = pl.greedy_color(pl.net_graph(net, 40.0))
        for k in range(trials):
            t = pl.draw_radii(law, net, 13, k).t
            owner = literal_carve(space, net.members, coloring.colors, t)
            for j, c in enumerate(centers):
                assert res.cut_matrix[k, j] == literal_is_cut(space, owner, c, 3.0)

    def test_matches_carve_for_texp_law(self):
        space = pl.integer_segment(120)
        net = pl.build_net(space, 3, 3)
        law = pl.TexpParams(0.1, 9.0, 30.0)
        centers = net.members[2:-2:4]
        res = pl.cut_probability_mc(space, net, 30.0, 9.0, law, 9.0,
                                    centers, trials=25, seed=3)
        coloring = pl.greedy_color(pl.net_graph(net, 60.0))
        for k in range(25):
            radii = pl.draw_radii(law, net, 3, k)
            layer = pl.carve(space, net, coloring, radii)
            for j, c in enumerate(centers):
                assert res.cut_matrix[k, j] == pl.is_cut(layer, int(c), 9.0)

    def test_threads_do_not_change_results(self):
        space = pl.integer_segment(200)
        net = pl.build_net(space, 1, 1)
        law = pl.TgeoParams(0.1, 15)
        centers = np.arange(10, 190, 17)
        a = pl.cut_probability_mc(space, net, 15.0, 1.0, law, 4.0, centers, 30, 5)
        b = pl.cut_probability_mc(space, net, 15.0, 1.0, law, 4.0, centers, 30, 5,
                                  threads=4)
        assert np.array_equal(a.cut_matrix, b.cut_matrix)

    def test_rejects_mismatched_truncation(self):
        space = pl.integer_segment(20)
        net = pl.build_net(space, 1, 1)
        with pytest.raises(ValueError):
            pl.cut_probability_mc(space, net, 15.0, 1.0, pl.TgeoParams(0.1, 10),
                                  2.0, [5], 3, 0)

    def test_standard_errors_are_binomial(self):
        space = pl.integer_segment(200)
        net = pl.build_net(space, 1, 1)
        law = pl.TgeoParams(0.1, 15)
        res = pl.cut_probability_mc(space, net, 15.0, 1.0, law, 4.0,
                                    np.arange(20, 180, 16), 40, 2)
        f = res.per_center_freq
        assert np.allclose(res.per_center_se, np.sqrt(f * (1 - f) / 40))
