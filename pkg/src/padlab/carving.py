"""Greedy coloring and randomized ball carving.

The carving stage turns a net, a proper coloring of its band graph and one
radius per member into a partition of the whole space: every point joins the
ball that covers it whose center carries the smallest color.  Properness of
the coloring on the band graph up to twice the radius cap guarantees at most
one candidate per color class, so the per-point priority rule reproduces the
classical inductive peel-off (color class 0 claims its balls, class 1 claims
what is left, and so on) without quadratic set differences.

A probe ball is *cut* by a layer when it meets two distinct clusters; the
Monte Carlo harness estimates cut frequencies over i.i.d. radius draws
without materializing whole partitions, using the equivalent first-touching
ball rule (the lowest-color ball meeting the probe either swallows it, and
the probe is intact, or it does not, and the probe is cut).
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .nets import Net, NetGraph, net_graph
from .sampler import TexpParams, TgeoParams, sample_texp, sample_tgeo
from .spaces import FiniteMetricSpace

__all__ = [
    "Coloring",
    "RadiusAssignment",
    "PartitionLayer",
    "CarveError",
    "greedy_color",
    "carve",
    "is_cut",
    "cut_probability_mc",
    "CutProbeResult",
    "draw_radii",
]

_CARVE_BLOCK_ENTRIES = 4_000_000


class CarveError(RuntimeError):
    """The carving preconditions were violated mid-flight."""


@dataclass(frozen=True)
class Coloring:
    """Proper coloring of a net graph; colors indexed by member position."""

    graph: NetGraph
    colors: np.ndarray
    num_colors: int

    def __post_init__(self):
        if self.num_colors > self.graph.max_degree + 1:
            raise AssertionError("greedy coloring exceeded max degree + 1 colors")


def greedy_color(graph: NetGraph, order=None) -> Coloring:
    """Color vertices in ``order`` with the least color unused on earlier
    neighbors.  Proper by construction and uses at most max_degree + 1 colors.
    """
    T = graph.num_vertices()
    if order is None:
        order = np.arange(T)
    else:
        order = np.asarray(order, dtype=np.intp)
        if len(order) != T or not np.array_equal(np.sort(order), np.arange(T)):
            raise ValueError("order must be a permutation of the member positions")
    members = graph.net.members
    space = graph.net.space
    colors = np.full(T, -1, dtype=np.int64)
    scratch = np.empty(graph.max_degree + 2, dtype=bool)
    # Distances come in blocks (one vectorized call per chunk of vertices);
    # the color choice itself is inherently sequential.
    block = max(1, 4_000_000 // max(1, T))
    for start in range(0, len(order), block):
        chunk = order[start:start + block]
        sub = space.dist_block(members[chunk], members)
        for i, v in enumerate(chunk):
            row = sub[i]
            nb = (row >= graph.band_low) & (row <= graph.band_high)
            used = colors[nb]
            used = used[used >= 0]  # colored means earlier in the order
            scratch[:] = False
            scratch[used] = True
            colors[int(v)] = int(np.argmin(scratch))
    return Coloring(graph, colors, int(colors.max()) + 1 if T else 0)


@dataclass(frozen=True)
class RadiusAssignment:
    """One carving radius per net member, truncated to [l, M]."""

    t: np.ndarray
    l: float
    M: float

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        object.__setattr__(self, "t", t)
        if not (0 < self.l < self.M):
            raise ValueError("need 0 < l < M")
        if len(t) and not ((t >= self.l) & (t <= self.M)).all():
            raise ValueError("all radii must lie in [l, M]")


class PartitionLayer:
    """One carving output: a total assignment of points to clusters.

    Clusters are keyed by their center (a net member); ids are ordinals in
    increasing center order, so identical partitions always carry identical
    ids.  Instances are immutable once built.
    """

    def __init__(self, space: FiniteMetricSpace, net: Net, member_of_point: np.ndarray,
                 radii: RadiusAssignment | None = None, coloring: Coloring | None = None):
        used, inverse = np.unique(np.asarray(member_of_point), return_inverse=True)
        self.space = space
        self.net = net
        self.center_positions = used            # positions into net.members
        self.centers = net.members[used]        # space point ids of cluster centers
        self.cluster_of = inverse.astype(np.int64)
        self.radii = radii
        self.coloring = coloring

    @property
    def num_clusters(self) -> int:
        return len(self.centers)

    def points_of(self, cluster_id: int) -> np.ndarray:
        return np.nonzero(self.cluster_of == cluster_id)[0]

    def cluster_sets(self) -> list:
        order = np.argsort(self.cluster_of, kind="stable")
        bounds = np.searchsorted(self.cluster_of[order], np.arange(self.num_clusters + 1))
        return [order[bounds[k]:bounds[k + 1]] for k in range(self.num_clusters)]

    def center_of_point(self, p: int) -> int:
        return int(self.centers[self.cluster_of[p]])

    def write_csv(self, path) -> None:
        """Rows of ``point_id,cluster_id,center_id``."""
        with open(path, "w") as fh:
            fh.write("point_id,cluster_id,center_id\n")
            for p in range(self.space.n):
                cid = int(self.cluster_of[p])
                fh.write(f"{p},{cid},{int(self.centers[cid])}\n")


def _assign_block(dist_sub, colors, t, num_colors):
    """Priority assignment for a block of points given member distances."""
    covered = dist_sub < t[None, :]
    prio = np.where(covered, colors[None, :], num_colors)
    idx = np.argmin(prio, axis=1)
    rows = np.arange(len(idx))
    best = prio[rows, idx]
    if (best == num_colors).any():
        raise CarveError("a point is covered by no ball; radii violate the "
                         "coverage precondition l >= covering radius")
    if ((prio == best[:, None]).sum(axis=1) > 1).any():
        raise CarveError("two same-color centers cover one point; the coloring "
                         "is not proper for the doubled radius band")
    return idx


def carve(space: FiniteMetricSpace, net: Net, coloring: Coloring,
          radii: RadiusAssignment) -> PartitionLayer:
    """Assign every point to the lowest-color ball covering it.

    Preconditions checked: ``radii.l >= net.eps`` (so every point is covered),
    the coloring belongs to this net, and its band reaches ``2 * radii.M``
    (so same-color centers sit more than two radius caps apart).
    """
    if radii.l < net.eps:
        raise ValueError(f"need radii.l >= net.eps for coverage, got l={radii.l} < eps={net.eps}")
    if coloring.graph.net is not net:
        raise ValueError("coloring was built for a different net")
    if coloring.graph.band_high < 2 * radii.M:
        raise ValueError(f"coloring band reaches {coloring.graph.band_high}, "
                         f"carving needs at least {2 * radii.M}")
    if len(radii.t) != len(net.members):
        raise ValueError("one radius per net member required")
    members = net.members
    block = max(1, _CARVE_BLOCK_ENTRIES // max(1, len(members)))
    assign = np.empty(space.n, dtype=np.int64)
    for start in range(0, space.n, block):
        pts = np.arange(start, min(start + block, space.n))
        sub = space.dist_block(pts, members)
        assign[pts] = _assign_block(sub, coloring.colors, radii.t, coloring.num_colors)
    return PartitionLayer(space, net, assign, radii, coloring)


def is_cut(layer: PartitionLayer, center: int, r: float) -> bool:
    """True iff the open ball B_r(center) meets two distinct clusters."""
    if r <= 0:
        raise ValueError("r must be positive")
    ids = layer.cluster_of[layer.space.ball(int(center), r)]
    return bool(len(np.unique(ids)) >= 2)


def draw_radii(law, net: Net, seed: int, trial: int) -> RadiusAssignment:
    """Radii for one Monte Carlo trial: one vectorized draw from
    ``default_rng([seed, trial])``.  This is the single source of randomness
    for every harness in the package, so runs reproduce exactly."""
    rng = np.random.default_rng([seed, trial])
    if isinstance(law, TexpParams):
        t = sample_texp(law, rng, size=len(net.members))
        return RadiusAssignment(t, law.l, law.M)
    if isinstance(law, TgeoParams):
        t = sample_tgeo(law, rng, size=len(net.members)).astype(float)
        return RadiusAssignment(t, 1.0, float(law.M))
    raise TypeError(f"unsupported law {type(law).__name__}")


@dataclass
class CutProbeResult:
    """Per-center and aggregate cut frequencies with binomial standard errors."""

    centers: np.ndarray
    trials: int
    probe_radius: float
    per_center_freq: np.ndarray
    per_center_se: np.ndarray
    aggregate_freq: float
    aggregate_se: float
    cut_matrix: np.ndarray = field(repr=False)  # trials x centers booleans


def _law_bounds(law):
    if isinstance(law, TexpParams):
        return law.l, law.M
    if isinstance(law, TgeoParams):
        return 1.0, float(law.M)
    raise TypeError(f"unsupported law {type(law).__name__}")


def cut_probability_mc(space: FiniteMetricSpace, net: Net, M: float, l: float, law,
                       probe_radius: float, centers, trials: int, seed: int,
                       threads: int = 1) -> CutProbeResult:
    """Monte Carlo cut frequencies of probe balls under i.i.d. carving radii.

    Each trial draws one radius per net member (see :func:`draw_radii`),
    carves, and tests whether each probe ball meets two clusters.  The carve
    is evaluated lazily through the first-touching-ball rule, which agrees
    with carving the full layer (the test suite checks this against a literal
    inductive implementation).  Deterministic given ``seed``; ``threads > 1``
    fans trials out over a thread pool without changing any result.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    if probe_radius <= 0:
        raise ValueError("probe_radius must be positive")
    law_l, law_M = _law_bounds(law)
    if (law_l, law_M) != (float(l), float(M)):
        raise ValueError(f"law truncation ({law_l}, {law_M}) does not match (l, M)=({l}, {M})")
    if l < net.eps:
        raise ValueError(f"need l >= net.eps for coverage, got l={l} < eps={net.eps}")
    centers = np.asarray(centers, dtype=np.intp)
    if len(centers) == 0:
        raise ValueError("need at least one probe center")

    coloring = greedy_color(net_graph(net, 2 * M))
    colors = coloring.colors

    # Per probe: candidate members able to touch the ball at all, with their
    # nearest/farthest distance to the ball and their colors.
    probes = []
    for c in centers:
        ball = space.ball(int(c), probe_radius)
        sub = space.dist_block(ball, net.members)
        dmin = sub.min(axis=0)
        dmax = sub.max(axis=0)
        cand = np.nonzero(dmin < M)[0]
        probes.append((cand, dmin[cand], dmax[cand], colors[cand].astype(np.int64)))

    cut = np.zeros((trials, len(centers)), dtype=bool)
    big = np.iinfo(np.int64).max

    def eval_probe(j, radii_chunk, rows):
        cand, dmin, dmax, cols = probes[j]
        tc = radii_chunk[:, cand]
        touch = tc > dmin[None, :]
        if not touch.any(axis=1).all():
            raise CarveError("probe ball touched by no ball despite coverage")
        cmin = np.where(touch, cols[None, :], big).min(axis=1)
        contains = touch & (cols[None, :] == cmin[:, None]) & (tc > dmax[None, :])
        cut[rows, j] = ~contains.any(axis=1)

    # Radii are drawn per trial (stream [seed, trial]), evaluated for all
    # trials of a chunk at once; threads split the probe loop.
    chunk = max(1, int(30_000_000 // max(1, len(net.members))))
    for start in range(0, trials, chunk):
        ks = range(start, min(start + chunk, trials))
        radii_chunk = np.stack([draw_radii(law, net, seed, k).t for k in ks])
        rows = np.arange(ks.start, ks.stop)
        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                list(pool.map(lambda j: eval_probe(j, radii_chunk, rows),
                              range(len(probes))))
        else:
            for j in range(len(probes)):
                eval_probe(j, radii_chunk, rows)

    per_freq = cut.mean(axis=0)
    per_se = np.sqrt(per_freq * (1 - per_freq) / trials)
    agg = float(cut.mean())
    agg_se = float(np.sqrt(agg * (1 - agg) / cut.size))
    return CutProbeResult(centers, trials, float(probe_radius), per_freq, per_se,
                          agg, agg_se, cut)
