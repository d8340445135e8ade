"""Covers, padded decompositions, and exhaustive verification.

A *cover* is a tuple of layers, each layer a family of point sets that is
mutually separated (strictly, beyond ``r_disjoint``) and diameter-bounded;
the layers jointly cover the space.  A *padded decomposition* is a tuple of
layers of clusters that each partition the net (disjointness is required on
net members only - sets may overlap off the net), are diameter-bounded, and
give every net member one layer whose cluster contains its whole padding
ball.

Verifiers are exhaustive, never sampled: a verifier that guesses is not a
verifier.  They refuse spaces beyond 20000 points rather than silently
degrade.  Every failed condition yields a concrete witness that can be
re-checked in isolation.

The two conversion directions grow cover sets into clusters (plus singleton
balls for net members left over) and shrink clusters away from their
complement, with the radius bookkeeping

    (2R + r, D)-cover        ->  (R, 2R + 2r + D)-padded decomposition
    (R + 2r, D)-padded dec.  ->  (R, D)-cover

for nets with equal covering and separation radius r.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .nets import Net
from .spaces import FiniteMetricSpace, parse_fixture

__all__ = [
    "Cover",
    "PaddedDecomposition",
    "VerificationReport",
    "VerificationFailure",
    "verify_cover",
    "verify_padded",
    "padded_from_cover",
    "cover_from_padded",
    "cover_to_json",
    "cover_from_json",
    "decomposition_to_json",
    "decomposition_from_json",
    "set_distance",
    "set_diameter",
    "shrink_set",
]

_VERIFY_MAX_POINTS = 20000


def _as_index_array(points) -> np.ndarray:
    arr = np.unique(np.asarray(points, dtype=np.intp))
    return arr


@dataclass
class Cover:
    """Layered family of separated, bounded point sets covering the space."""

    space: FiniteMetricSpace
    layers: list  # list of layers; each layer is a list of index arrays
    r_disjoint: float
    D_bound: float

    def __post_init__(self):
        self.layers = [[_as_index_array(s) for s in layer] for layer in self.layers]

    @property
    def m(self) -> int:
        return len(self.layers)


@dataclass
class PaddedDecomposition:
    """Layered clusters partitioning a net, with padding parameters (R, D)."""

    net: Net
    layers: list  # list of layers; each layer is a list of index arrays
    R: float
    D: float

    def __post_init__(self):
        self.layers = [[_as_index_array(s) for s in layer] for layer in self.layers]

    @property
    def m(self) -> int:
        return len(self.layers)

    @property
    def space(self) -> FiniteMetricSpace:
        return self.net.space


class VerificationFailure(RuntimeError):
    """An operation required a verified object and verification said no."""

    def __init__(self, message: str, report: "VerificationReport"):
        super().__init__(f"{message}: first witnesses {report.witnesses[:3]}")
        self.report = report


@dataclass
class VerificationReport:
    """Outcome of an exhaustive check: per-condition verdicts plus witnesses."""

    kind: str
    parameters: dict
    conditions: dict
    witnesses: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.witnesses

    def sort_witnesses(self):
        self.witnesses.sort(key=lambda w: json.dumps(w, sort_keys=True))

    def to_jsonable(self) -> dict:
        return {
            "kind": self.kind,
            "parameters": self.parameters,
            "conditions": self.conditions,
            "passed": self.passed,
            "witnesses": self.witnesses,
        }


def set_diameter(space: FiniteMetricSpace, points) -> float:
    points = np.asarray(points, dtype=np.intp)
    if len(points) <= 1:
        return 0.0
    return float(space.dist_block(points, points).max())


def set_distance(space: FiniteMetricSpace, a, b) -> float:
    """min distance between two point sets; +inf if either is empty."""
    a = np.asarray(a, dtype=np.intp)
    b = np.asarray(b, dtype=np.intp)
    if len(a) == 0 or len(b) == 0:
        return math.inf
    return float(space.dist_block(a, b).min())


def point_to_set_distance(space: FiniteMetricSpace, p: int, points) -> float:
    points = np.asarray(points, dtype=np.intp)
    if len(points) == 0:
        return math.inf
    return float(space.dist_row(int(p))[points].min())


def _guard(space: FiniteMetricSpace):
    if space.n > _VERIFY_MAX_POINTS:
        raise ValueError(
            f"exhaustive verification is limited to {_VERIFY_MAX_POINTS} points, got {space.n}")


def _layer_pairwise_min(space, layer):
    """min cross-distance for every pair of sets in a layer."""
    k = len(layer)
    out = np.full((k, k), np.inf)
    if k <= 1:
        return out
    pts = np.concatenate(layer)
    owner = np.concatenate([np.full(len(s), i, dtype=np.intp) for i, s in enumerate(layer)])
    if len(pts) <= 2500:
        dmat = space.dist_block(pts, pts)
        idx_i = np.repeat(owner, len(pts))
        idx_j = np.tile(owner, len(pts))
        np.minimum.at(out, (idx_i, idx_j), dmat.ravel())
    else:
        for i in range(k):
            for j in range(i + 1, k):
                d = set_distance(space, layer[i], layer[j])
                out[i, j] = out[j, i] = d
    np.fill_diagonal(out, np.inf)
    return out


def verify_cover(cover: Cover) -> VerificationReport:
    """Exhaustively check separation, boundedness and coverage, with witnesses."""
    space = cover.space
    _guard(space)
    report = VerificationReport(
        kind="cover",
        parameters={"r_disjoint": cover.r_disjoint, "D_bound": cover.D_bound,
                    "m": cover.m, "n_points": space.n},
        conditions={"disjointness": True, "diameter": True, "coverage": True},
    )
    for i, layer in enumerate(cover.layers):
        pmin = _layer_pairwise_min(space, layer)
        bad = np.argwhere(pmin <= cover.r_disjoint)
        for a, b in bad:
            if a < b:
                report.conditions["disjointness"] = False
                report.witnesses.append({
                    "condition": "disjointness", "layer": int(i),
                    "sets": [int(a), int(b)], "distance": float(pmin[a, b]),
                    "required_exceeding": cover.r_disjoint,
                })
        for s_id, s in enumerate(layer):
            diam = set_diameter(space, s)
            if diam > cover.D_bound:
                report.conditions["diameter"] = False
                report.witnesses.append({
                    "condition": "diameter", "layer": int(i), "set": int(s_id),
                    "diameter": diam, "bound": cover.D_bound,
                })
    covered = np.zeros(space.n, dtype=bool)
    for layer in cover.layers:
        for s in layer:
            covered[s] = True
    for p in np.nonzero(~covered)[0]:
        report.conditions["coverage"] = False
        report.witnesses.append({"condition": "coverage", "point": int(p)})
    report.sort_witnesses()
    return report


def verify_padded(layers, net: Net, R: float, D: float,
                  strict_disjoint: bool = False) -> VerificationReport:
    """Exhaustively check the three padded-decomposition conditions.

    1. each layer's clusters cover the net and are pairwise disjoint *on net
       members* (overlap off the net is allowed);
    2. every cluster has diameter at most D;
    3. every net member has some layer with a cluster containing its whole
       open R-ball.

    ``strict_disjoint=True`` additionally witnesses overlaps at non-net
    points; that is stronger than the definition requires, but useful when a
    decomposition is meant to come from a carving (whose layers partition the
    whole space).
    """
    if isinstance(layers, PaddedDecomposition):
        layers = layers.layers
    layers = [[_as_index_array(s) for s in layer] for layer in layers]
    if not layers:
        raise ValueError("need at least one layer")
    space = net.space
    _guard(space)
    report = VerificationReport(
        kind="padded_decomposition",
        parameters={"R": R, "D": D, "m": len(layers), "n_points": space.n,
                    "net_size": len(net.members)},
        conditions={"net_partition": True, "diameter": True, "padding": True},
    )
    masks = []
    for i, layer in enumerate(layers):
        layer_masks = np.zeros((len(layer), space.n), dtype=bool)
        for s_id, s in enumerate(layer):
            layer_masks[s_id, s] = True
        masks.append(layer_masks)
        member_count = layer_masks[:, net.members].sum(axis=0)
        for pos in np.nonzero(member_count == 0)[0]:
            report.conditions["net_partition"] = False
            report.witnesses.append({
                "condition": "net_partition", "layer": int(i),
                "member": int(net.members[pos]), "problem": "uncovered",
            })
        for pos in np.nonzero(member_count > 1)[0]:
            owners = np.nonzero(layer_masks[:, net.members[pos]])[0]
            report.conditions["net_partition"] = False
            report.witnesses.append({
                "condition": "net_partition", "layer": int(i),
                "member": int(net.members[pos]), "problem": "overlap",
                "sets": [int(o) for o in owners],
            })
        if strict_disjoint:
            report.conditions.setdefault("strict_disjointness", True)
            for p in np.nonzero(layer_masks.sum(axis=0) > 1)[0]:
                owners = np.nonzero(layer_masks[:, p])[0]
                report.conditions["strict_disjointness"] = False
                report.witnesses.append({
                    "condition": "strict_disjointness", "layer": int(i),
                    "point": int(p), "sets": [int(o) for o in owners],
                })
        for s_id, s in enumerate(layer):
            diam = set_diameter(space, s)
            if diam > D:
                report.conditions["diameter"] = False
                report.witnesses.append({
                    "condition": "diameter", "layer": int(i), "set": int(s_id),
                    "diameter": diam, "bound": D,
                })
    for x in net.members:
        ball = space.ball(int(x), R)
        padded = False
        for layer_masks in masks:
            holders = np.nonzero(layer_masks[:, x])[0]
            for s_id in holders:
                if layer_masks[s_id, ball].all():
                    padded = True
                    break
            if padded:
                break
        if not padded:
            escaping = []
            for i, layer_masks in enumerate(masks):
                for s_id in np.nonzero(layer_masks[:, x])[0]:
                    out = ball[~layer_masks[s_id, ball]]
                    escaping.append({"layer": int(i), "set": int(s_id),
                                     "outside_points": [int(p) for p in out[:5]]})
            report.conditions["padding"] = False
            report.witnesses.append({
                "condition": "padding", "member": int(x), "R": R,
                "closest_misses": escaping[:4],
            })
    report.sort_witnesses()
    return report


def _ball_of_set(space: FiniteMetricSpace, points, R: float) -> np.ndarray:
    """Open R-neighborhood of a point set."""
    points = np.asarray(points, dtype=np.intp)
    mask = np.zeros(space.n, dtype=bool)
    block = max(1, 2_000_000 // max(1, space.n))
    for start in range(0, len(points), block):
        sub = space.dist_block(points[start:start + block])
        mask |= (sub < R).any(axis=0)
    return np.nonzero(mask)[0]


def padded_from_cover(cover: Cover, net: Net, R: float) -> PaddedDecomposition:
    """Grow a verified (2R + r, D)-cover into an (R, 2R + 2r + D)-padded
    decomposition: each cover set becomes its open R-neighborhood, and net
    members missed by a layer get their own open r-ball."""
    if net.eps != net.delta:
        raise ValueError("conversion requires a net with eps == delta")
    r = net.eps
    space = cover.space
    if space is not net.space:
        raise ValueError("cover and net live on different spaces")
    in_report = verify_cover(cover)
    if not in_report.passed:
        raise VerificationFailure("input cover fails verification", in_report)
    if cover.r_disjoint < 2 * R + r:
        raise ValueError(f"cover separation {cover.r_disjoint} is below the "
                         f"required 2R + r = {2 * R + r}")
    out_layers = []
    for layer in cover.layers:
        grown = [_ball_of_set(space, s, R) for s in layer]
        hit = np.zeros(space.n, dtype=bool)
        for g in grown:
            hit[g] = True
        extras = [space.ball(int(x), r) for x in net.members if not hit[x]]
        out_layers.append(grown + extras)
    pd = PaddedDecomposition(net, out_layers, R=float(R),
                             D=2 * R + 2 * r + cover.D_bound)
    out_report = verify_padded(pd, net, pd.R, pd.D)
    if not out_report.passed:
        raise VerificationFailure("constructed decomposition fails verification", out_report)
    return pd


def shrink_set(space: FiniteMetricSpace, points, margin: float) -> np.ndarray:
    """Points of the set at distance >= margin from its complement.

    The whole set survives when the complement is empty (distance to the
    empty set is +inf by convention)."""
    s = _as_index_array(points)
    inside = np.zeros(space.n, dtype=bool)
    inside[s] = True
    comp = np.nonzero(~inside)[0]
    if len(comp) == 0:
        return s
    dist_to_comp = space.dist_block(s, comp).min(axis=1)
    return s[dist_to_comp >= margin]


def cover_from_padded(pd: PaddedDecomposition, net: Net) -> Cover:
    """Shrink a verified (R + 2r, D)-padded decomposition into an (R, D)-cover:
    each cluster keeps the points at distance >= R + r from its complement
    (all of them, when the complement is empty)."""
    if net.eps != net.delta:
        raise ValueError("conversion requires a net with eps == delta")
    r = net.eps
    space = pd.space
    if pd.R < 3 * r:
        raise ValueError(f"padding radius {pd.R} must be at least 3r = {3 * r}")
    in_report = verify_padded(pd, net, pd.R, pd.D)
    if not in_report.passed:
        raise VerificationFailure("input decomposition fails verification", in_report)
    R_out = pd.R - 2 * r
    keep_from = R_out + r
    out_layers = []
    for layer in pd.layers:
        shrunk = []
        for s in layer:
            kept = shrink_set(space, s, keep_from)
            if len(kept):
                shrunk.append(kept)
        out_layers.append(shrunk)
    cover = Cover(space, out_layers, r_disjoint=R_out, D_bound=pd.D)
    out_report = verify_cover(cover)
    if not out_report.passed:
        raise VerificationFailure("constructed cover fails verification", out_report)
    return cover


# ---------------------------------------------------------------------------
# JSON serialization
# ---------------------------------------------------------------------------


def _round_floats(obj):
    """Recursively cap floats at 12 significant digits for stable output."""
    if isinstance(obj, float):
        return float(format(obj, ".12g"))
    if isinstance(obj, dict):
        return {k: _round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(v) for v in obj]
    if isinstance(obj, (np.floating,)):
        return float(format(float(obj), ".12g"))
    if isinstance(obj, (np.integer,)):
        return int(obj)
    return obj


def dump_json(obj, path=None) -> str:
    """Serialize with sorted keys and 12-significant-digit floats."""
    text = json.dumps(_round_floats(obj), sort_keys=True, indent=1) + "\n"
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text)
    return text


def cover_to_json(cover: Cover, fixture: str) -> dict:
    return {
        "kind": "cover",
        "fixture": fixture,
        "n_points": cover.space.n,
        "r_disjoint": cover.r_disjoint,
        "D_bound": cover.D_bound,
        "m": cover.m,
        "layers": [[[int(p) for p in s] for s in layer] for layer in cover.layers],
    }


def cover_from_json(doc: dict, space: FiniteMetricSpace | None = None) -> Cover:
    if doc.get("kind") != "cover":
        raise ValueError("not a cover document")
    if space is None:
        space = parse_fixture(doc["fixture"])
    if space.n != doc["n_points"]:
        raise ValueError("fixture size mismatch")
    return Cover(space, doc["layers"], float(doc["r_disjoint"]), float(doc["D_bound"]))


def decomposition_to_json(pd: PaddedDecomposition, fixture: str) -> dict:
    return {
        "kind": "padded_decomposition",
        "fixture": fixture,
        "n_points": pd.space.n,
        "R": pd.R,
        "D": pd.D,
        "m": pd.m,
        "net": {
            "members": [int(x) for x in pd.net.members],
            "eps": pd.net.eps,
            "delta": pd.net.delta,
        },
        "layers": [[[int(p) for p in s] for s in layer] for layer in pd.layers],
    }


def decomposition_from_json(doc: dict, space: FiniteMetricSpace | None = None) -> PaddedDecomposition:
    if doc.get("kind") != "padded_decomposition":
        raise ValueError("not a padded decomposition document")
    if space is None:
        space = parse_fixture(doc["fixture"])
    if space.n != doc["n_points"]:
        raise ValueError("fixture size mismatch")
    net = Net(space, np.asarray(doc["net"]["members"], dtype=np.intp),
              float(doc["net"]["eps"]), float(doc["net"]["delta"]))
    return PaddedDecomposition(net, doc["layers"], float(doc["R"]), float(doc["D"]))
