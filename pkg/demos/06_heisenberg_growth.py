"""Growth of the discrete Heisenberg group.

BFS balls in the Cayley graph of the integer Heisenberg group grow like
radius**4 even though the group's "obvious" dimension is 3 - the central
direction contributes twice.  The log-log slope of the ball sizes makes the
quartic growth visible at desk scale.
"""

import numpy as np

import padlab as pl

ball = pl.heisenberg_ball(12)
print(f"elements within word length 12: {ball.n}")
print("radius:", list(range(13)))
print("sizes: ", ball.ball_sizes)

radii = np.arange(6, 13)
sizes = [ball.ball_sizes[r] for r in radii]
slope = pl.loglog_slope(radii, sizes)
print(f"\nlog-log slope over radii 6..12: {slope:.3f} (quartic growth -> ~4)")

ratios = [ball.ball_sizes[2 * k] / ball.ball_sizes[k] for k in range(1, 7)]
print("doubling ratios |B_2k|/|B_k|:", [f"{x:.1f}" for x in ratios],
      "(2^4 = 16 in the limit)")

print("\nfor contrast, a genuinely 1-dimensional space:")
table = pl.growth_table(pl.integer_segment(4000), [8, 16, 32, 64], trials=1)
rs = sorted(table)
print("segment growth:", {int(r): table[r] for r in rs},
      f" slope {pl.loglog_slope(rs, [table[r] for r in rs]):.3f}")

print("\nunit-scale growth estimates on the small ball heis:6 "
      "(max net points in an open r-ball):")
small = pl.heisenberg_ball(6)
table = pl.growth_table(small, [2, 3, 4, 6], trials=1)
print({int(r): table[r] for r in sorted(table)})
