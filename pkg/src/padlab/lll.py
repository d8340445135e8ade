"""Constraint-satisfaction view of carving and a constructive solver.

Each net member contributes one constraint: its probe ball must be uncut in
at least one of the m independently carved layers.  The classical local
lemma certifies a solution exists when e * p * (d + 1) < 1, with p bounding
the violation probability of a single constraint and d the number of
constraints sharing radii with it.  Both closed-form bound calculators work
entirely in log space so that astronomically large schedules (the regime the
guarantee actually needs) evaluate without overflow; comparisons within
1e-12 relative of the boundary are resolved conservatively, toward
infeasible.

The constructive side is Moser-Tardos resampling: start from i.i.d. radii,
repeatedly pick the lowest-index violated constraint, redraw every radius in
its domain across all layers, and recarve incrementally.  Success yields
radius assignments whose carved layers form a padded decomposition at the
probe radius.  The solver reports failure after max_rounds; it never
silently retries with a fresh seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .carving import RadiusAssignment, _assign_block, carve, greedy_color
from .decomposition import PaddedDecomposition, VerificationReport, verify_padded
from .nets import Net, net_graph
from .sampler import TexpParams, TgeoParams, sample_texp, sample_tgeo
from .spaces import FiniteMetricSpace

__all__ = [
    "LllBudget",
    "lll_feasible",
    "TexpSchedule",
    "TgeoSchedule",
    "TgeoRun",
    "texp_csp_bounds",
    "tgeo_csp_bounds",
    "find_min_D",
    "CspInstance",
    "csp_from_schedule",
    "moser_tardos",
    "MoserTardosResult",
    "MoserTardosFailure",
    "certify_decomposition",
    "CertifiedRun",
    "schedule_to_json",
    "schedule_from_json",
]

_BOUNDARY_SLACK = 1e-12
_MT_MATRIX_GUARD = 50_000_000


def _feasible_from_logs(log_p: float, log_d_plus_one: float) -> bool:
    """Strict e*p*(d+1) < 1 in log space, conservative near the boundary."""
    if log_p == -math.inf:
        return True
    return 1.0 + log_p + log_d_plus_one < -_BOUNDARY_SLACK


@dataclass(frozen=True)
class LllBudget:
    """Violation-probability and neighborhood bounds, kept in log space."""

    log_p_bound: float
    log_d_plus_one: float
    feasible: bool

    @property
    def p_bound(self) -> float:
        try:
            return math.exp(self.log_p_bound)
        except OverflowError:
            return math.inf

    @property
    def d_bound(self) -> float:
        try:
            return math.exp(self.log_d_plus_one) - 1.0
        except OverflowError:
            return math.inf

    @property
    def margin_log(self) -> float:
        """log of e * p_bound * (d_bound + 1); negative means feasible."""
        return 1.0 + self.log_p_bound + self.log_d_plus_one


def lll_feasible(p_bound: float, d_bound: float) -> bool:
    """Whether e * p * (d + 1) < 1, conservatively (boundary counts as no)."""
    if p_bound < 0 or d_bound < 0:
        raise ValueError("bounds must be nonnegative")
    if p_bound == 0:
        return True
    return _feasible_from_logs(math.log(p_bound), math.log1p(d_bound))


# ---------------------------------------------------------------------------
# Parameter schedules
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TexpSchedule:
    """Truncated-exponential carving schedule for a doubling constant N.

    Derived quantities: rate lam = eps / (3r), window [l, M] = [3r, (2D+3)r],
    layer count m = floor(log2 N) + 1, and diameter factor c = 4D + 6 (the
    carved clusters have diameter at most 2M = c*r).
    """

    N: int
    r: float
    eps: float
    D: float
    lam: float = field(init=False)
    M: float = field(init=False)
    l: float = field(init=False)
    m: int = field(init=False)
    c: float = field(init=False)

    def __post_init__(self):
        if self.N < 2:
            raise ValueError("doubling constant must be >= 2")
        if self.r <= 0 or self.eps <= 0 or self.D <= 0:
            raise ValueError("r, eps and D must be positive")
        object.__setattr__(self, "lam", self.eps / (3 * self.r))
        object.__setattr__(self, "M", (2 * self.D + 3) * self.r)
        object.__setattr__(self, "l", 3 * self.r)
        object.__setattr__(self, "m", math.floor(math.log2(self.N)) + 1)
        object.__setattr__(self, "c", 4 * self.D + 6)
        # stored derivations must hold exactly, not approximately
        assert self.lam == self.eps / (3 * self.r)
        assert self.M == (2 * self.D + 3) * self.r and self.l == 3 * self.r
        assert self.m == math.floor(math.log2(self.N)) + 1 and self.c == 4 * self.D + 6

    @property
    def probe_radius(self) -> float:
        # the padding conclusion needs balls of three net scales intact
        return 3 * self.r

    @property
    def domain_radius(self) -> float:
        return self.M + 3 * self.r

    def law(self) -> TexpParams:
        return TexpParams(self.lam, self.l, self.M)


@dataclass(frozen=True)
class TgeoRun:
    """Explicit truncated-geometric run parameters (desk-scale regime).

    The packaged guarantee schedule (:class:`TgeoSchedule`) produces radii
    far beyond desk scale; end-to-end runs instead fix (b, p, M, m, r)
    directly, subject to p <= 1/(4b+5), and lean on the exhaustive verifier.
    """

    b: float
    p: float
    M: int
    m: int
    r: float

    def __post_init__(self):
        if self.b < 0:
            raise ValueError("growth exponent must be >= 0")
        if not (0 < self.p < 1):
            raise ValueError("need 0 < p < 1")
        if self.M < 2 or self.m < 1 or self.r <= 0:
            raise ValueError("need M >= 2, m >= 1, r > 0")

    @property
    def probe_radius(self) -> float:
        return self.r

    @property
    def domain_radius(self) -> float:
        return self.M + self.r

    def law(self) -> TgeoParams:
        return TgeoParams(self.p, self.M)


@dataclass(frozen=True)
class TgeoSchedule:
    """Guarantee-level truncated-geometric schedule for growth exponent b.

    Layer count m = floor(b) + 1, window exponent alpha = (1+eps)*m/(m-b),
    and per-radius parameters p(r) = 8*alpha*b*ln(r)/r^alpha and
    M(r) = floor(4b * (1/p) * ln(1/p)).  The schedule is honest about its
    own applicability: r_min is the smallest radius at which the feasibility
    chain is guaranteed, and it is astronomically large.
    """

    b: float
    eps: float

    def __post_init__(self):
        if self.b <= 0 or self.eps <= 0:
            raise ValueError("b and eps must be positive")

    @property
    def m(self) -> int:
        return math.floor(self.b) + 1

    @property
    def alpha(self) -> float:
        return (1 + self.eps) * self.m / (self.m - self.b)

    @property
    def log_r_min(self) -> float:
        a, b, eps = self.alpha, self.b, self.eps
        return max(
            math.log(9.0),
            (2 / a) * math.log(32 * b * b + 40 * b),
            8 * a * b,
            (2 / eps) * math.log(8000 * a * b / eps),
        )

    @property
    def r_min(self) -> float:
        try:
            return math.exp(self.log_r_min)
        except OverflowError:
            return math.inf

    def p_at(self, r: float) -> float:
        if r <= 1:
            raise ValueError("need r > 1")
        log_p = math.log(8 * self.alpha * self.b) + math.log(math.log(r)) \
            - self.alpha * math.log(r)
        return math.exp(log_p)

    def M_at(self, r: float) -> float:
        p = self.p_at(r)
        return math.floor(4 * self.b * (1 / p) * math.log(1 / p))

    def run_at(self, r: float) -> TgeoRun:
        return TgeoRun(self.b, self.p_at(r), int(self.M_at(r)), self.m, r)


def texp_csp_bounds(schedule: TexpSchedule) -> LllBudget:
    """Closed-form constraint bounds for a truncated-exponential schedule.

    Violation probability per constraint is bounded by
    (4 N^3 (D+3)^{log2 N} e^{-(D-3/2) eps} + 12 eps)^m and the neighborhood
    size by N^4 (D+3)^{log2 N} - 1; both are evaluated in log space.
    """
    N, D, eps, m = schedule.N, schedule.D, schedule.eps, schedule.m
    b = math.log2(N)
    log_far = math.log(4.0) + 3 * math.log(N) + b * math.log(D + 3) - (D - 1.5) * eps
    log_near = math.log(12.0 * eps)
    log_p_single = np.logaddexp(log_far, log_near)
    log_p = m * float(log_p_single)
    log_d_plus_one = 4 * math.log(N) + b * math.log(D + 3)
    return LllBudget(log_p, log_d_plus_one, _feasible_from_logs(log_p, log_d_plus_one))


def tgeo_csp_bounds(b: float, r: float, m: int, p: float, M: float) -> LllBudget:
    """Closed-form constraint bounds for truncated-geometric carving:
    p-bound (20 r p)^m, neighborhood bound (2M + 2r)^b - 1, in log space.

    Requires the estimate's hypotheses r >= 9 and p <= 1/(4b+5).
    """
    if r < 9:
        raise ValueError("the cut estimate needs r >= 9")
    if b < 0 or m < 1:
        raise ValueError("need b >= 0 and m >= 1")
    if not (0 < p < 1):
        raise ValueError("need 0 < p < 1")
    if p > 1 / (4 * b + 5):
        raise ValueError(f"p={p} violates p <= 1/(4b+5) = {1 / (4 * b + 5)}")
    log_p = m * (math.log(20.0) + math.log(r) + math.log(p))
    log_d_plus_one = b * math.log(2 * M + 2 * r)
    return LllBudget(log_p, log_d_plus_one, _feasible_from_logs(log_p, log_d_plus_one))


def find_min_D(N: int, m: int, alpha_prime: float = 0.4, D_cap: float = 1e100):
    """Smallest D (within bisection tolerance) whose schedule is feasible
    under the exponent rule eps = (D+3)^(-(log2 N)/m - alpha_prime).

    Doubling search finds a factor-2 bracket, bisection tightens it.  Raises
    RuntimeError when no feasible D exists below ``D_cap``.
    """
    b = math.log2(N)
    if m <= b:
        raise ValueError(f"need m > log2(N) = {b}")
    if not (0 < alpha_prime < 1 - b / m):
        raise ValueError(f"need 0 < alpha_prime < 1 - log2(N)/m = {1 - b / m}")
    exponent = -(b / m + alpha_prime)

    def budget_at(D: float) -> LllBudget:
        eps = (D + 3) ** exponent
        return texp_csp_bounds(TexpSchedule(N=N, r=1.0, eps=eps, D=D))

    D = 1.0
    while not budget_at(D).feasible:
        D *= 2
        if D > D_cap:
            raise RuntimeError(f"no feasible D found up to {D_cap}")
    if D == 1.0:
        return D, budget_at(D)
    lo, hi = D / 2, D
    while hi / lo > 1 + 1e-9:
        mid = math.sqrt(lo * hi)
        if budget_at(mid).feasible:
            hi = mid
        else:
            lo = mid
    return hi, budget_at(hi)


# ---------------------------------------------------------------------------
# The constructive engine
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CspInstance:
    """One constraint per net member: its probe ball must be uncut in at
    least one of m layers.  The constraint's domain consists of the net
    members within ``domain_radius``; those are the radii whose balls can
    reach the probe ball, and they are what a resampling step redraws."""

    net: Net
    m: int
    law: object  # TexpParams | TgeoParams
    probe_radius: float
    domain_radius: float

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("need at least one layer")
        if self.probe_radius <= 0 or self.domain_radius <= 0:
            raise ValueError("radii must be positive")
        if not isinstance(self.law, (TexpParams, TgeoParams)):
            raise TypeError("law must be TexpParams or TgeoParams")


def csp_from_schedule(net: Net, schedule) -> CspInstance:
    if isinstance(schedule, (TexpSchedule, TgeoRun)):
        return CspInstance(net, schedule.m, schedule.law(),
                           schedule.probe_radius, schedule.domain_radius)
    raise TypeError(f"cannot build a CSP from {type(schedule).__name__}")


@dataclass
class MoserTardosResult:
    success: bool
    rounds: int
    assignments: list  # m RadiusAssignments (final state, even on failure)
    violated_history: list  # violated-constraint count after init and each round
    residual_violations: int
    seed: int

    def __bool__(self):
        return self.success


class MoserTardosFailure(RuntimeError):
    """Raised by pipelines when resampling exhausts its round budget."""

    def __init__(self, result: MoserTardosResult):
        super().__init__(
            f"resampling did not converge: {result.residual_violations} violated "
            f"constraints after {result.rounds} rounds")
        self.result = result


def _law_bounds(law):
    if isinstance(law, TexpParams):
        return law.l, law.M
    return 1.0, float(law.M)


def _sample_law(law, rng, size):
    if isinstance(law, TexpParams):
        return sample_texp(law, rng, size)
    return sample_tgeo(law, rng, size).astype(float)


def moser_tardos(space: FiniteMetricSpace, net: Net, csp: CspInstance, seed: int,
                 max_rounds: int | None = None) -> MoserTardosResult:
    """Resample until every probe ball is uncut in some layer.

    All m * |net| radii start i.i.d. from the law.  Each round picks the
    violated constraint with the lowest net index, redraws every radius in
    its domain across all m layers, and recarves exactly the points whose
    assignment can have changed.  Deterministic given ``seed``; reports
    failure (never retries) after ``max_rounds`` (default: 100 per
    constraint).
    """
    if csp.net is not net:
        raise ValueError("csp was built for a different net")
    members = net.members
    T = len(members)
    l, M = _law_bounds(csp.law)
    if T == 0:
        return MoserTardosResult(True, 0, [RadiusAssignment(np.empty(0), l, M)
                                           for _ in range(csp.m)], [0], 0, seed)
    if l < net.eps:
        raise ValueError(f"law lower truncation {l} is below the covering radius {net.eps}")
    if space.n * T > _MT_MATRIX_GUARD:
        raise ValueError("space times net size exceeds the resampler's matrix guard")
    if max_rounds is None:
        max_rounds = 100 * T

    coloring = greedy_color(net_graph(net, 2 * M))
    colors, K = coloring.colors, coloring.num_colors
    dist_pm = space.dist_block(np.arange(space.n), members)
    dist_mm = dist_pm[members]

    balls = [np.nonzero(dist_pm[:, k] < csp.probe_radius)[0] for k in range(T)]
    sizes = np.array([len(b) for b in balls])
    flat = np.concatenate(balls)
    offsets = np.concatenate([[0], np.cumsum(sizes)])[:-1]

    rng = np.random.default_rng(seed)
    radii = [_sample_law(csp.law, rng, T) for _ in range(csp.m)]
    assign = [_assign_block(dist_pm, colors, t, K) for t in radii]

    def cut_per_constraint(a):
        f = a[flat]
        heads = np.repeat(f[offsets], sizes)
        return np.add.reduceat(f != heads, offsets) > 0

    def violated_now():
        v = cut_per_constraint(assign[0])
        for li in range(1, csp.m):
            v &= cut_per_constraint(assign[li])
        return v

    violated = violated_now()
    history = [int(violated.sum())]
    rounds = 0
    while violated.any() and rounds < max_rounds:
        u = int(np.argmax(violated))
        dom = np.nonzero(dist_mm[u] < csp.domain_radius)[0]
        for li in range(csp.m):
            radii[li][dom] = _sample_law(csp.law, rng, len(dom))
        affected = np.nonzero((dist_pm[:, dom] < M).any(axis=1))[0]
        if len(affected):
            cand = np.nonzero((dist_pm[affected] < M).any(axis=0))[0]
            sub = dist_pm[np.ix_(affected, cand)]
            for li in range(csp.m):
                idx = _assign_block(sub, colors[cand], radii[li][cand], K)
                assign[li][affected] = cand[idx]
        violated = violated_now()
        rounds += 1
        history.append(int(violated.sum()))
    residual = int(violated.sum())
    return MoserTardosResult(residual == 0, rounds,
                             [RadiusAssignment(t, l, M) for t in radii],
                             history, residual, seed)


@dataclass
class CertifiedRun:
    decomposition: PaddedDecomposition
    report: VerificationReport
    meta: dict
    partition_layers: list  # the m carved PartitionLayers backing the claim


def certify_decomposition(space: FiniteMetricSpace, net: Net, schedule, seed: int,
                          max_rounds: int | None = None) -> CertifiedRun:
    """Run the resampler, carve all layers, and exhaustively verify the
    claimed padding: (R, D) = (probe radius, 2M).  Raises
    :class:`MoserTardosFailure` when the resampler gives up."""
    csp = csp_from_schedule(net, schedule)
    result = moser_tardos(space, net, csp, seed, max_rounds=max_rounds)
    if not result.success:
        raise MoserTardosFailure(result)
    l, M = _law_bounds(csp.law)
    coloring = greedy_color(net_graph(net, 2 * M))
    partition_layers = [carve(space, net, coloring, assignment)
                        for assignment in result.assignments]
    layers = [layer.cluster_sets() for layer in partition_layers]
    pd = PaddedDecomposition(net, layers, R=csp.probe_radius, D=2 * M)
    report = verify_padded(pd, net, pd.R, pd.D)
    meta = {
        "seed": seed,
        "rounds": result.rounds,
        "violated_history": result.violated_history,
        "schedule": schedule_to_json(schedule),
        "probe_radius": csp.probe_radius,
        "domain_radius": csp.domain_radius,
        "m": csp.m,
    }
    return CertifiedRun(pd, report, meta, partition_layers)


# ---------------------------------------------------------------------------
# Schedule serialization
# ---------------------------------------------------------------------------


def schedule_to_json(schedule) -> dict:
    if isinstance(schedule, TexpSchedule):
        return {"kind": "texp", "N": schedule.N, "r": schedule.r,
                "eps": schedule.eps, "D": schedule.D}
    if isinstance(schedule, TgeoRun):
        return {"kind": "tgeo", "b": schedule.b, "p": schedule.p,
                "M": schedule.M, "m": schedule.m, "r": schedule.r}
    raise TypeError(f"cannot serialize {type(schedule).__name__}")


def schedule_from_json(doc: dict):
    kind = doc.get("kind")
    if kind == "texp":
        return TexpSchedule(N=int(doc["N"]), r=float(doc["r"]),
                            eps=float(doc["eps"]), D=float(doc["D"]))
    if kind == "tgeo":
        return TgeoRun(b=float(doc["b"]), p=float(doc["p"]), M=int(doc["M"]),
                       m=int(doc["m"]), r=float(doc["r"]))
    raise ValueError(f"unknown schedule kind {kind!r}")
