import numpy as np
import pytest

import padlab as pl


class TestDoublingEstimate:
    def test_integer_segment_needs_three_balls(self):
        space = pl.integer_segment(1000)
        assert pl.doubling_constant_estimate(space, [4, 8, 16, 32]) == 3

    def test_single_point(self):
        assert pl.doubling_constant_estimate(pl.integer_segment(0), [1.0]) == 1

    def test_two_points_at_unit_distance(self):
        # B_2(x) = both points, but each open unit ball holds only its center,
        # so two balls are needed; exhaustive search agrees
        space = pl.CoordSpace([0.0, 1.0])
        assert pl.doubling_constant_estimate(space, [1.0]) == 2
        target = space.ball(0, 2.0)
        assert pl.optimal_cover_size(space, target, 1.0) == 2

    def test_greedy_matches_optimal_on_small_segment(self):
        space = pl.integer_segment(300)
        greedy = pl.doubling_constant_estimate(space, [4, 8, 16])
        worst_optimal = 0
        mat = space.distance_matrix()
        for r in (4.0, 8.0, 16.0):
            for c in range(0, space.n, 5):
                target = np.nonzero(mat[c] < 2 * r)[0]
                worst_optimal = max(worst_optimal,
                                    pl.optimal_cover_size(space, target, r))
        assert worst_optimal == 3
        assert greedy >= worst_optimal  # greedy is a lower estimate of N via max

    def test_rejects_empty_or_negative_radii(self):
        with pytest.raises(ValueError):
            pl.doubling_constant_estimate(pl.integer_segment(5), [])
        with pytest.raises(ValueError):
            pl.doubling_constant_estimate(pl.integer_segment(5), [-1.0])


def test_optimal_cover_size_brute_force_cases():
    space = pl.integer_segment(20)
    # covering {0..8} (open B_4.5 around 4) with radius-2 balls: each ball has
    # 3 points, 9 points to cover, so exactly 3
    target = space.ball(4, 4.5)
    assert len(target) == 9
    assert pl.optimal_cover_size(space, target, 2.0) == 3
    assert pl.optimal_cover_size(space, np.array([], dtype=int), 2.0) == 0


class TestVolumeDoubling:
    def test_segment_unit_masses(self):
        ms = pl.MeasuredSpace.uniform(pl.integer_segment(1000))
        # open balls: B_10(500) has 19 points, B_20(500) has 39
        ratio = pl.volume_doubling_estimate(ms, [10.0], centers=[500])
        assert ratio == pytest.approx(39 / 19)

    def test_grid_linf(self):
        space = pl.grid_2d(101, 101, "linf")
        ms = pl.MeasuredSpace.uniform(space)
        middle = 50 * 101 + 50
        # open balls: B_5 is a 9x9 block, B_10 a 19x19 block
        ratio = pl.volume_doubling_estimate(ms, [5.0], centers=[middle])
        assert ratio == pytest.approx(361 / 81)

    def test_single_point(self):
        ms = pl.MeasuredSpace.uniform(pl.integer_segment(0))
        assert pl.volume_doubling_estimate(ms, [1.0]) == 1.0

    def test_exhaustive_constant_on_segment_is_three(self):
        """Scanning all threshold radii gives the true volume doubling
        constant of the unit-mass segment: 3."""
        ms = pl.MeasuredSpace.uniform(pl.integer_segment(200))
        radii = [k / 2 + 0.01 for k in range(1, 80)]
        assert pl.volume_doubling_estimate(ms, radii) == pytest.approx(3.0)


class TestGrowthFunction:
    def test_open_ball_count_on_segment(self):
        assert pl.growth_function(pl.integer_segment(200), 5.0, trials=2, seed=0) == 9

    def test_radius_one_sees_only_the_center(self):
        assert pl.growth_function(pl.integer_segment(50), 1.0, trials=2, seed=0) == 1

    def test_single_point(self):
        assert pl.growth_function(pl.integer_segment(0), 7.0) == 1

    def test_rejects_radius_below_one(self):
        with pytest.raises(ValueError):
            pl.growth_function(pl.integer_segment(10), 0.5)

    def test_segment_slope_is_roughly_linear(self):
        table = pl.growth_table(pl.integer_segment(10000), [8, 16, 32, 64],
                                trials=2, seed=0)
        slope = pl.loglog_slope(sorted(table), [table[r] for r in sorted(table)])
        assert 0.9 <= slope <= 1.1

    def test_growth_table_matches_growth_function(self):
        space = pl.grid_2d(15, 15, "l1")
        table = pl.growth_table(space, [2.0, 4.0], trials=2, seed=3)
        for r in (2.0, 4.0):
            assert table[r] == pl.growth_function(space, r, trials=2, seed=3)


def test_loglog_slope_undefined_cases():
    assert pl.loglog_slope([2.0], [5.0]) is None
    assert pl.loglog_slope([2.0, 4.0], [0.0, 0.0]) is None
    assert pl.loglog_slope([1, 2, 4, 8], [1, 2, 4, 8]) is not None
