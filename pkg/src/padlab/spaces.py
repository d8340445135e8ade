"""Finite metric spaces and the fixture zoo.

Every geometric object in this package is built on top of a
:class:`FiniteMetricSpace`: a finite point set 0..n-1 together with a total
distance oracle.  Balls are *open* everywhere: ``ball(c, r)`` contains the
points at distance strictly less than ``r`` from ``c``.

Three concrete backends cover all fixtures:

* :class:`CoordSpace` - points with coordinates under an l1 / l2 / linf norm
  (segments, grids, random clouds).
* :class:`MatrixSpace` - an explicit distance matrix (graph metrics loaded
  from edge lists, balanced trees).
* :class:`HeisenbergBall` - a word-metric ball in the discrete Heisenberg
  group, backed by a packed-key lookup table instead of a matrix.

Distances for random Euclidean clouds are rounded to 12 decimal digits at
construction time so that runs reproduce bit-for-bit across platforms.
"""

from __future__ import annotations

import heapq
from collections import deque

import numpy as np

__all__ = [
    "FiniteMetricSpace",
    "CoordSpace",
    "MatrixSpace",
    "HeisenbergBall",
    "MeasuredSpace",
    "integer_segment",
    "grid_2d",
    "euclidean_cloud",
    "balanced_tree",
    "heisenberg_ball",
    "load_points",
    "load_edge_list",
    "parse_fixture",
    "validate_metric",
    "MetricError",
]

# Hard ceiling for fixtures that need an all-pairs shortest path matrix.
_APSP_MAX_POINTS = 5000


class MetricError(ValueError):
    """A claimed metric violates one of the metric axioms."""


class FiniteMetricSpace:
    """A finite point set with a total distance oracle.

    Subclasses implement :meth:`dist_row`; everything else has generic
    fallbacks.  Instances are immutable after construction and safe to share
    across concurrent readers.
    """

    def __init__(self, n: int, label: str):
        self.n = int(n)
        self.label = label
        self._diameter = None

    def dist_row(self, i: int) -> np.ndarray:
        """Distances from point ``i`` to every point, as a float array."""
        raise NotImplementedError

    def dist(self, i: int, j: int) -> float:
        return float(self.dist_row(i)[j])

    def dist_block(self, rows, cols=None) -> np.ndarray:
        """Distance submatrix ``rows x cols`` (``cols=None`` means all points)."""
        rows = np.asarray(rows, dtype=np.intp)
        out = np.empty((len(rows), self.n if cols is None else len(cols)))
        for k, i in enumerate(rows):
            r = self.dist_row(int(i))
            out[k] = r if cols is None else r[cols]
        return out

    def ball(self, center: int, r: float) -> np.ndarray:
        """Indices of the open ball of radius ``r`` around ``center``."""
        return np.nonzero(self.dist_row(center) < r)[0]

    def diameter(self) -> float:
        if self._diameter is None:
            self._diameter = max(float(self.dist_row(i).max()) for i in range(self.n))
        return self._diameter

    def distance_matrix(self) -> np.ndarray:
        if self.n > _APSP_MAX_POINTS:
            raise ValueError(f"refusing to materialize a {self.n}x{self.n} distance matrix")
        return self.dist_block(np.arange(self.n))

    def __repr__(self):
        return f"{type(self).__name__}(n={self.n}, label={self.label!r})"


class CoordSpace(FiniteMetricSpace):
    """Points with coordinates under an l1, l2 or linf metric."""

    def __init__(self, coords, metric: str = "l2", label: str = "", round_digits=None):
        coords = np.asarray(coords, dtype=float)
        if coords.ndim == 1:
            coords = coords[:, None]
        if coords.ndim != 2:
            raise ValueError("coords must be an (n, dim) array")
        if metric not in ("l1", "l2", "linf"):
            raise ValueError(f"unknown metric {metric!r}")
        super().__init__(coords.shape[0], label)
        self.coords = coords
        self.metric = metric
        self.round_digits = round_digits

    def _reduce(self, diff):
        if diff.shape[-1] == 1:
            d = np.abs(diff[..., 0])  # all three norms coincide in 1-d
        elif self.metric == "l1":
            d = np.abs(diff).sum(axis=-1)
        elif self.metric == "linf":
            d = np.abs(diff).max(axis=-1)
        else:
            d = np.sqrt((diff * diff).sum(axis=-1))
        if self.round_digits is not None:
            d = np.round(d, self.round_digits)
        return d

    def dist_row(self, i):
        if self.coords.shape[1] == 1:
            d = np.abs(self.coords[:, 0] - self.coords[i, 0])
            return np.round(d, self.round_digits) if self.round_digits is not None else d
        return self._reduce(self.coords - self.coords[i])

    def dist_block(self, rows, cols=None):
        a = self.coords[np.asarray(rows, dtype=np.intp)]
        b = self.coords if cols is None else self.coords[np.asarray(cols, dtype=np.intp)]
        return self._reduce(a[:, None, :] - b[None, :, :])


class MatrixSpace(FiniteMetricSpace):
    """Explicit symmetric distance matrix."""

    def __init__(self, matrix, label: str = ""):
        matrix = np.asarray(matrix, dtype=float)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise ValueError("distance matrix must be square")
        super().__init__(matrix.shape[0], label)
        self.matrix = matrix

    def dist_row(self, i):
        return self.matrix[i]

    def dist_block(self, rows, cols=None):
        rows = np.asarray(rows, dtype=np.intp)
        sub = self.matrix[rows]
        return sub if cols is None else sub[:, np.asarray(cols, dtype=np.intp)]

    def distance_matrix(self):
        return self.matrix


class MeasuredSpace:
    """A finite metric space together with a strictly positive point mass."""

    def __init__(self, base: FiniteMetricSpace, mass):
        mass = np.asarray(mass, dtype=float)
        if mass.shape != (base.n,):
            raise ValueError("mass must have one entry per point")
        if not (mass > 0).all():
            raise ValueError("every point mass must be strictly positive")
        self.base = base
        self.mass = mass

    @classmethod
    def uniform(cls, base: FiniteMetricSpace) -> "MeasuredSpace":
        return cls(base, np.ones(base.n))

    def ball_mass(self, center: int, r: float) -> float:
        return float(self.mass[self.base.ball(center, r)].sum())


# ---------------------------------------------------------------------------
# Heisenberg group ball
# ---------------------------------------------------------------------------

_HEIS_GENERATORS = ((1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0))
_HEIS_MAX_RADIUS = 16  # ball size grows like radius**4


def _heis_mul(g, h):
    a, b, c = g
    aa, bb, cc = h
    return (a + aa, b + bb, c + cc + a * bb)


def _heis_bfs(radius):
    """Word lengths of all group elements within the given radius."""
    wl = {(0, 0, 0): 0}
    frontier = deque([(0, 0, 0)])
    while frontier:
        g = frontier.popleft()
        d = wl[g]
        if d == radius:
            continue
        for s in _HEIS_GENERATORS:
            h = _heis_mul(g, s)
            if h not in wl:
                wl[h] = d + 1
                frontier.append(h)
    return wl


class HeisenbergBall(FiniteMetricSpace):
    """Word-metric ball in the discrete Heisenberg group.

    Elements are integer triples (a, b, c) composed by
    ``(a,b,c)*(a',b',c') = (a+a', b+b', c+c'+a*b')``; the two off-diagonal
    unipotent generators and their inverses generate.  The space consists of
    all elements of word length <= ``radius`` in BFS order, and distances are
    the *group* word metric restricted to the ball (computed from a lookup
    table that extends to word length ``2*radius``, so no pair ever falls
    outside it).
    """

    def __init__(self, radius: int):
        radius = int(radius)
        if radius < 1:
            raise ValueError("radius must be >= 1")
        if radius > _HEIS_MAX_RADIUS:
            raise ValueError(
                f"radius {radius} exceeds the memory guard {_HEIS_MAX_RADIUS}"
            )
        wl_ball = _heis_bfs(radius)
        elements = sorted(wl_ball, key=lambda g: (wl_ball[g], g))
        super().__init__(len(elements), f"heis:{radius}")
        self.radius = radius
        self.elements = np.array(elements, dtype=np.int64)
        self.word_lengths = np.array([wl_ball[g] for g in elements], dtype=np.int64)
        counts = np.bincount(self.word_lengths, minlength=radius + 1)
        #: ball_sizes[k] = number of elements of word length <= k
        self.ball_sizes = np.cumsum(counts).tolist()

        table = _heis_bfs(2 * radius)
        self._span = 2 * radius
        triples = np.array(list(table.keys()), dtype=np.int64)
        keys = self._pack(triples)
        vals = np.fromiter(table.values(), dtype=np.int64, count=len(table))
        order = np.argsort(keys)
        self._keys = keys[order]
        self._vals = vals[order].astype(float)

    def _pack(self, triples):
        # injective packing for |a|,|b| <= span and |c| <= span**2
        s = self._span
        base_ab = 2 * s + 1
        a = triples[..., 0] + s
        b = triples[..., 1] + s
        c = triples[..., 2] + s * s
        return (c * base_ab + b) * base_ab + a

    def _lookup(self, triples):
        k = self._pack(triples)
        pos = np.searchsorted(self._keys, k)
        if not (self._keys[pos] == k).all():
            raise AssertionError("queried element outside the word-length table")
        return self._vals[pos]

    def dist_row(self, i):
        a, b, c = (int(v) for v in self.elements[i])
        e = self.elements
        # inverse(g_i) * g_j, computed coordinate-wise
        prod = np.empty_like(e)
        prod[:, 0] = e[:, 0] - a
        prod[:, 1] = e[:, 1] - b
        prod[:, 2] = e[:, 2] - c + a * (b - e[:, 1])
        return self._lookup(prod)


# ---------------------------------------------------------------------------
# Fixture generators
# ---------------------------------------------------------------------------


def integer_segment(n: int) -> CoordSpace:
    """The integer points 0..n on a line (n+1 points)."""
    if n < 0:
        raise ValueError("n must be >= 0")
    return CoordSpace(np.arange(n + 1, dtype=float)[:, None], "l1", f"segment:{n}")


def grid_2d(w: int, h: int, metric: str = "l2") -> CoordSpace:
    """A w x h integer grid under the given norm."""
    if w < 1 or h < 1:
        raise ValueError("grid sides must be >= 1")
    xs, ys = np.meshgrid(np.arange(w, dtype=float), np.arange(h, dtype=float), indexing="ij")
    coords = np.column_stack([xs.ravel(), ys.ravel()])
    return CoordSpace(coords, metric, f"grid:{w}x{h}:{metric}")


def euclidean_cloud(n: int, dim: int, seed: int = 0, scale: float = 1.0) -> CoordSpace:
    """n uniform random points in [0, scale]^dim with l2 distances.

    Distances are rounded to 12 decimal digits so identical seeds reproduce
    identical spaces everywhere.
    """
    if n < 1 or dim < 1:
        raise ValueError("need n >= 1 and dim >= 1")
    rng = np.random.default_rng(seed)
    coords = rng.random((n, dim)) * scale
    return CoordSpace(coords, "l2", f"cloud:{n}:{dim}:seed={seed}", round_digits=12)


def balanced_tree(branching: int, depth: int) -> MatrixSpace:
    """Complete rooted tree with the graph (hop-count) metric."""
    if branching < 1 or depth < 0:
        raise ValueError("need branching >= 1 and depth >= 0")
    parents = [-1]
    level = [0]
    for _ in range(depth):
        nxt = []
        for v in level:
            for _ in range(branching):
                parents.append(v)
                nxt.append(len(parents) - 1)
        level = nxt
    n = len(parents)
    if n > _APSP_MAX_POINTS:
        raise ValueError(f"tree with {n} nodes exceeds the {_APSP_MAX_POINTS}-point guard")
    parents = np.asarray(parents)
    depth_of = np.zeros(n, dtype=int)
    for v in range(1, n):
        depth_of[v] = depth_of[parents[v]] + 1
    # anc[k][v] = ancestor of v at depth k (or -1 when k > depth(v));
    # LCA depth falls out as the number of levels on which ancestors agree.
    anc = np.full((depth + 1, n), -1, dtype=np.int64)
    for v in range(n):
        u, d = v, depth_of[v]
        while u != -1:
            anc[d, v] = u
            u = parents[u] if u > 0 else -1
            d -= 1
    lca_depth = np.full((n, n), -1, dtype=np.int64)
    for k in range(depth + 1):
        row = anc[k]
        eq = (row[:, None] == row[None, :]) & (row[:, None] >= 0)
        lca_depth += eq
    mat = (depth_of[:, None] + depth_of[None, :] - 2 * lca_depth).astype(float)
    return MatrixSpace(mat, f"tree:{branching}:{depth}")


def heisenberg_ball(radius: int) -> HeisenbergBall:
    """BFS ball of the given radius in the discrete Heisenberg group."""
    return HeisenbergBall(radius)


# ---------------------------------------------------------------------------
# File ingestion
# ---------------------------------------------------------------------------


def load_points(path, metric: str = "l2") -> CoordSpace:
    """Read a point cloud: one point per line, whitespace-separated coordinates."""
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            rows.append([float(tok) for tok in line.split()])
    if not rows:
        raise ValueError(f"no points in {path}")
    width = {len(r) for r in rows}
    if len(width) != 1:
        raise ValueError("inconsistent coordinate count across lines")
    return CoordSpace(np.asarray(rows), metric, f"points:{path}")


def load_edge_list(path) -> MatrixSpace:
    """Read a graph as ``u v [w]`` lines and return its shortest-path metric.

    Vertex ids are 0-based; the optional weight must be positive and defaults
    to 1.  The graph must be connected, otherwise the shortest-path "metric"
    would take infinite values.
    """
    edges = []
    nmax = -1
    weighted = False
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) not in (2, 3):
                raise ValueError(f"bad edge line: {line!r}")
            u, v = int(parts[0]), int(parts[1])
            w = float(parts[2]) if len(parts) == 3 else 1.0
            if w <= 0:
                raise ValueError("edge weights must be positive")
            if len(parts) == 3 and w != 1.0:
                weighted = True
            edges.append((u, v, w))
            nmax = max(nmax, u, v)
    n = nmax + 1
    if n < 1:
        raise ValueError(f"no edges in {path}")
    if n > _APSP_MAX_POINTS:
        raise ValueError(f"graph with {n} vertices exceeds the {_APSP_MAX_POINTS}-point guard")
    adj = [[] for _ in range(n)]
    for u, v, w in edges:
        adj[u].append((v, w))
        adj[v].append((u, w))
    mat = np.full((n, n), np.inf)
    for s in range(n):
        if weighted:
            dist = np.full(n, np.inf)
            dist[s] = 0.0
            heap = [(0.0, s)]
            while heap:
                d, u = heapq.heappop(heap)
                if d > dist[u]:
                    continue
                for v, w in adj[u]:
                    nd = d + w
                    if nd < dist[v]:
                        dist[v] = nd
                        heapq.heappush(heap, (nd, v))
        else:
            dist = np.full(n, np.inf)
            dist[s] = 0.0
            q = deque([s])
            while q:
                u = q.popleft()
                for v, _ in adj[u]:
                    if np.isinf(dist[v]):
                        dist[v] = dist[u] + 1
                        q.append(v)
        mat[s] = dist
    if np.isinf(mat).any():
        raise ValueError("graph is disconnected; shortest-path metric undefined")
    return MatrixSpace(mat, f"edges:{path}")


def parse_fixture(spec: str) -> FiniteMetricSpace:
    """Build a fixture from a spec string.

    Recognized forms::

        segment:1000
        grid:200x200:linf      (metric optional, default l2)
        heis:12
        cloud:500:2:seed=7     (seed optional, default 0)
        tree:3:6
    """
    parts = spec.strip().split(":")
    kind = parts[0]
    try:
        if kind == "segment" and len(parts) == 2:
            return integer_segment(int(parts[1]))
        if kind == "grid" and len(parts) in (2, 3):
            w, h = parts[1].lower().split("x")
            metric = parts[2] if len(parts) == 3 else "l2"
            return grid_2d(int(w), int(h), metric)
        if kind == "heis" and len(parts) == 2:
            return heisenberg_ball(int(parts[1]))
        if kind == "cloud" and len(parts) in (3, 4):
            seed = 0
            if len(parts) == 4:
                if not parts[3].startswith("seed="):
                    raise ValueError
                seed = int(parts[3][5:])
            return euclidean_cloud(int(parts[1]), int(parts[2]), seed)
        if kind == "tree" and len(parts) == 3:
            return balanced_tree(int(parts[1]), int(parts[2]))
    except (ValueError, IndexError) as exc:
        raise ValueError(f"bad fixture spec {spec!r}") from exc
    raise ValueError(f"unknown fixture spec {spec!r}")


# ---------------------------------------------------------------------------
# Metric validation
# ---------------------------------------------------------------------------


def validate_metric(space: FiniteMetricSpace, seed: int = 0, exhaustive_limit: int = 300,
                    samples: int = 100_000) -> None:
    """Check the metric axioms, raising :class:`MetricError` on violation.

    Symmetry and zero diagonal are always checked exhaustively.  The triangle
    inequality is exhaustive for ``n <= exhaustive_limit`` and sampled over
    ``samples`` random triples otherwise; it allows a hairline slack of 1e-9
    relative to the largest distance, because square-root metrics land within
    a unit in the last place of collinear equality.
    """
    n = space.n
    if n <= exhaustive_limit:
        mat = space.dist_block(np.arange(n))
        if (mat < 0).any():
            raise MetricError("negative distance")
        if not np.allclose(np.diag(mat), 0.0, atol=0.0):
            raise MetricError("nonzero diagonal")
        if not (mat == mat.T).all():
            raise MetricError("asymmetric distances")
        tol = 1e-9 * max(1.0, float(mat.max()))
        for i in range(n):
            slack = mat[i][None, :] + mat[i][:, None] - mat
            if (slack < -tol).any():
                j, k = np.argwhere(slack < -tol)[0]
                raise MetricError(
                    f"triangle inequality fails: d({j},{k}) > d({j},{i}) + d({i},{k})"
                )
        return
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, n, size=(samples, 3))
    tol = 1e-9
    for i, j, k in idx:
        dij = space.dist(int(i), int(j))
        dji = space.dist(int(j), int(i))
        if dij != dji:
            raise MetricError(f"asymmetric: d({i},{j}) != d({j},{i})")
        if space.dist(int(i), int(i)) != 0.0:
            raise MetricError(f"nonzero self distance at {i}")
        if space.dist(int(j), int(k)) > dij + space.dist(int(i), int(k)) + tol * max(1.0, dij):
            raise MetricError(f"triangle inequality fails on triple ({j},{i},{k})")
