"""Doubling and growth estimators.

These are empirical probes, not exact computations:

* :func:`doubling_constant_estimate` greedily covers 2r-balls by r-balls and
  reports the largest cover it needed - a *lower* estimate of the metric
  doubling constant (optimal covering is NP-hard in general).
* :func:`optimal_cover_size` is the exhaustive companion for small targets;
  it is what tests use to pin exact doubling constants on desk-size fixtures.
* :func:`growth_function` approximates the unit-scale growth function by
  sweeping random greedy nets; again a lower estimate, since the true value
  is a supremum over all unit nets.
"""

from __future__ import annotations

from itertools import combinations

import numpy as np

from .nets import build_net
from .spaces import FiniteMetricSpace, MeasuredSpace

__all__ = [
    "doubling_constant_estimate",
    "optimal_cover_size",
    "volume_doubling_estimate",
    "growth_function",
    "growth_table",
    "loglog_slope",
]

_COVER_MATRIX_GUARD = 4000


def _greedy_cover_size(dist_ct, radius) -> int:
    """Greedy max-coverage count: rows = candidate centers, cols = targets."""
    covers = dist_ct < radius
    remaining = np.ones(covers.shape[1], dtype=bool)
    picks = 0
    while remaining.any():
        gain = (covers & remaining[None, :]).sum(axis=1)
        best = int(np.argmax(gain))
        if gain[best] == 0:
            raise ValueError("target point not coverable by any candidate ball")
        remaining &= ~covers[best]
        picks += 1
    return picks


def doubling_constant_estimate(space: FiniteMetricSpace, radii, centers=None) -> int:
    """Largest greedy cover of any sampled B_2r by r-balls around space points.

    Returns a lower estimate of the doubling constant N.  ``centers=None``
    means every point; either way the space must be small enough (n <= 4000)
    for its distance matrix to fit in memory.
    """
    radii = [float(r) for r in radii]
    if not radii or min(radii) <= 0:
        raise ValueError("radii must be a nonempty list of positive reals")
    if centers is None:
        centers = np.arange(space.n)
    centers = np.asarray(centers, dtype=np.intp)
    if space.n > _COVER_MATRIX_GUARD:
        raise ValueError(
            f"n={space.n} exceeds the {_COVER_MATRIX_GUARD}-point matrix guard; "
            "pass an explicit centers sample on a smaller fixture instead")
    mat = space.distance_matrix()
    best = 0
    for r in radii:
        for c in centers:
            target = np.nonzero(mat[c] < 2 * r)[0]
            # only points within 3r of c can center a useful r-ball
            cand = np.nonzero(mat[c] < 3 * r)[0]
            size = _greedy_cover_size(mat[np.ix_(cand, target)], r)
            best = max(best, size)
    return best


def optimal_cover_size(space: FiniteMetricSpace, target, radius: float,
                       candidates=None) -> int:
    """Exact minimum number of ``radius``-balls covering ``target``.

    Exhaustive search after deduplicating candidates by coverage signature
    and dropping dominated ones; intended for n <= a few hundred.
    """
    target = np.asarray(target, dtype=np.intp)
    if len(target) == 0:
        return 0
    if space.n > 400:
        raise ValueError("exhaustive cover search is limited to n <= 400")
    if candidates is None:
        candidates = np.arange(space.n)
    covers = space.dist_block(candidates, target) < radius
    covers = np.unique(covers, axis=0)
    covers = covers[covers.any(axis=1)]
    # drop rows dominated by another row
    keep = []
    for i in range(len(covers)):
        dominated = False
        for j in range(len(covers)):
            if i != j and (covers[j] >= covers[i]).all() and (covers[j] != covers[i]).any():
                dominated = True
                break
        if not dominated:
            keep.append(i)
    covers = covers[keep]
    if not covers.any(axis=0).all():
        raise ValueError("target not coverable at this radius")
    # greedy upper bound on the deduplicated boolean matrix
    remaining = np.ones(covers.shape[1], dtype=bool)
    upper = 0
    while remaining.any():
        gain = (covers & remaining[None, :]).sum(axis=1)
        remaining &= ~covers[int(np.argmax(gain))]
        upper += 1
    for k in range(1, upper):
        for combo in combinations(range(len(covers)), k):
            if covers[list(combo)].any(axis=0).all():
                return k
    return upper


def volume_doubling_estimate(ms: MeasuredSpace, radii, centers=None) -> float:
    """Max sampled ratio mass(B_2r(x)) / mass(B_r(x)); lower estimate of the
    volume doubling constant."""
    radii = [float(r) for r in radii]
    if not radii or min(radii) <= 0:
        raise ValueError("radii must be a nonempty list of positive reals")
    if centers is None:
        centers = np.arange(ms.base.n)
    best = 0.0
    for c in np.asarray(centers, dtype=np.intp):
        row = ms.base.dist_row(int(c))
        for r in radii:
            inner = float(ms.mass[row < r].sum())
            if inner <= 0:
                raise ValueError(f"ball B_{r}({c}) has zero mass")
            outer = float(ms.mass[row < 2 * r].sum())
            best = max(best, outer / inner)
    return best


def growth_function(space: FiniteMetricSpace, r: float, trials: int = 3, seed: int = 0) -> int:
    """Lower estimate of the unit-scale growth function at radius r.

    Builds ``trials`` greedy (1,1)-nets from random sweep orders and returns
    the largest number of net members found in any open r-ball over all
    centers.  The true value is a supremum over *all* unit nets, so this is
    an exhaustive-over-centers but net-sampled lower bound.
    """
    return growth_table(space, [r], trials=trials, seed=seed)[float(r)]


def growth_table(space: FiniteMetricSpace, radii, trials: int = 3, seed: int = 0) -> dict:
    """Growth estimates for several radii, sharing the sampled nets."""
    radii = [float(r) for r in radii]
    if min(radii) < 1:
        raise ValueError("growth is defined for radii >= 1")
    if trials < 1:
        raise ValueError("need at least one trial")
    rng = np.random.default_rng(seed)
    best = {r: 0 for r in radii}
    thresholds = np.asarray(sorted(radii))
    for t in range(trials):
        order = np.arange(space.n) if t == 0 else rng.permutation(space.n)
        net = build_net(space, 1.0, 1.0, order=order)
        for c in range(space.n):
            d = np.sort(space.dist_row(c)[net.members])
            counts = np.searchsorted(d, thresholds, side="left")
            for r, cnt in zip(thresholds, counts):
                r = float(r)
                if cnt > best[r]:
                    best[r] = int(cnt)
    return best


def loglog_slope(radii, values) -> float | None:
    """Least-squares slope of log(values) against log(r + 1).

    Returns None when fewer than two usable points exist.
    """
    radii = np.asarray(radii, dtype=float)
    values = np.asarray(values, dtype=float)
    ok = values > 0
    if ok.sum() < 2:
        return None
    slope, _ = np.polyfit(np.log(radii[ok] + 1.0), np.log(values[ok]), 1)
    return float(slope)
