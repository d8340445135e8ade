"""Command-line front end.

Subcommands::

    gen       write a fixture file plus a JSON sidecar of measured constants
    carve     run the resampling pipeline and verify the claimed padding
    cutprob   Monte Carlo cut frequencies against the closed-form bounds
    growth    growth-function table and its log-log slope
    convert   grow a cover into a padded decomposition, or shrink one back
    lll-check evaluate the feasibility budget of a schedule

Exit codes: 0 = pass, 1 = a verified failure (a bound or verifier said no),
2 = usage or configuration error.  Identical config + seed produces
byte-identical output files: floats are capped at 12 significant digits,
JSON keys are sorted, and nothing timestamps itself.

``--threads`` (or the LAB_THREADS environment variable, which wins) sets the
worker count for Monte Carlo trials; it never changes results.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .carving import cut_probability_mc
from .decomposition import (VerificationFailure, cover_from_json, cover_from_padded,
                            cover_to_json, decomposition_from_json, decomposition_to_json,
                            dump_json, padded_from_cover)
from .growth import doubling_constant_estimate, growth_table, loglog_slope
from .lll import (MoserTardosFailure, TexpSchedule, TgeoRun, certify_decomposition,
                  schedule_from_json, schedule_to_json, texp_csp_bounds,
                  tgeo_csp_bounds)
from .nets import build_net
from .spaces import CoordSpace, parse_fixture

PASS, FAIL, USAGE = 0, 1, 2

_SIDE_CAR_LIMIT = 4000


class ConfigError(Exception):
    pass


def _fmt(x) -> str:
    if isinstance(x, float):
        return format(x, ".12g")
    return str(x)


def _load_config(path) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc


def _threads(args) -> int:
    env = os.environ.get("LAB_THREADS")
    if env is not None:
        try:
            return max(1, int(env))
        except ValueError as exc:
            raise ConfigError(f"LAB_THREADS must be an integer, got {env!r}") from exc
    return max(1, args.threads)


# ---------------------------------------------------------------------------
# gen
# ---------------------------------------------------------------------------


def cmd_gen(args) -> int:
    space = parse_fixture(args.fixture)
    out = args.out
    sidecar = {"fixture": args.fixture, "n": space.n}
    if isinstance(space, CoordSpace):
        sidecar["format"] = "points"
        sidecar["metric"] = space.metric
        with open(out, "w") as fh:
            for row in space.coords:
                fh.write(" ".join(_fmt(float(v)) for v in row) + "\n")
    else:
        # graph metrics serialize as the unit-distance edge list
        sidecar["format"] = "edges"
        sidecar["metric"] = "graph"
        with open(out, "w") as fh:
            for i in range(space.n):
                row = space.dist_row(i)
                for j in np.nonzero(row == 1.0)[0]:
                    if j > i:
                        fh.write(f"{i} {int(j)}\n")
    if space.n <= _SIDE_CAR_LIMIT:
        sidecar["diameter"] = float(space.diameter())
        span = max(1.0, space.diameter())
        radii = [r for r in (2.0, 4.0, 8.0, 16.0) if 2 * r <= span] or [max(span / 4, 1.0)]
        sidecar["doubling_estimate_lower"] = int(doubling_constant_estimate(space, radii))
        gradii = [r for r in (2.0, 4.0, 8.0) if r <= span] or [1.0]
        table = growth_table(space, gradii, trials=1, seed=0)
        sidecar["growth_table"] = {_fmt(r): int(v) for r, v in sorted(table.items())}
    dump_json(sidecar, out + ".json")
    print(f"wrote {out} and {out}.json ({space.n} points)")
    return PASS


# ---------------------------------------------------------------------------
# carve
# ---------------------------------------------------------------------------


def cmd_carve(args) -> int:
    cfg = _load_config(args.config)
    fixture = args.fixture or cfg.get("fixture")
    seed = args.seed if args.seed is not None else cfg.get("seed", 0)
    out = args.out or cfg.get("out")
    if not fixture or out is None or "schedule" not in cfg:
        raise ConfigError("carve needs fixture, out and schedule")
    schedule = schedule_from_json(cfg["schedule"])
    space = parse_fixture(fixture)
    net = build_net(space, schedule.r, schedule.r)
    try:
        run = certify_decomposition(space, net, schedule, int(seed),
                                    max_rounds=cfg.get("max_rounds"))
    except MoserTardosFailure as exc:
        dump_json({
            "outcome": "resampling_failure",
            "fixture": fixture,
            "schedule": schedule_to_json(schedule),
            "seed": int(seed),
            "rounds": exc.result.rounds,
            "residual_violations": exc.result.residual_violations,
            "violated_history": exc.result.violated_history,
        }, out + ".failure.json")
        print(f"resampling failed; report in {out}.failure.json", file=sys.stderr)
        return FAIL
    dump_json(decomposition_to_json(run.decomposition, fixture), out + ".decomposition.json")
    dump_json(run.report.to_jsonable(), out + ".verification.json")
    dump_json({"fixture": fixture, **run.meta}, out + ".meta.json")
    for k, layer in enumerate(run.partition_layers):
        layer.write_csv(f"{out}.layer{k}.csv")
    print(f"verified={run.report.passed} rounds={run.meta['rounds']} -> {out}.*.json")
    return PASS if run.report.passed else FAIL


# ---------------------------------------------------------------------------
# cutprob
# ---------------------------------------------------------------------------


def _texp_cut_bound(N, D, eps):
    b = np.log2(N)
    return float(4 * N**3 * (D + 3) ** b * np.exp(-(D - 1.5) * eps) + 12 * eps)


def _cutprob_row(space, net, entry, trials, n_centers, seed, threads):
    schedule = schedule_from_json(entry)
    if isinstance(schedule, TgeoRun):
        law = schedule.law()
        l, M = 1.0, float(schedule.M)
        probe = schedule.r
        bound = 20.0 * schedule.r * schedule.p
        regime = schedule.p <= 1 / (4 * schedule.b + 5) and schedule.r >= 9
    elif isinstance(schedule, TexpSchedule):
        law = schedule.law()
        l, M = schedule.l, schedule.M
        probe = schedule.probe_radius
        bound = _texp_cut_bound(schedule.N, schedule.D, schedule.eps)
        regime = law.in_estimate_regime and 0 < schedule.eps < 1 \
            and schedule.D > 1 / schedule.eps + 0.5
    else:
        raise ConfigError(f"unsupported grid entry {entry}")
    rng = np.random.default_rng([seed, 0xC3])
    centers = rng.choice(net.members, size=min(n_centers, len(net.members)), replace=False)
    centers = np.sort(centers)
    res = cut_probability_mc(space, net, M, l, law, probe, centers, trials, seed,
                             threads=threads)
    params = ";".join(f"{k}={_fmt(entry[k])}" for k in sorted(entry))
    ok = "" if not regime else str(res.aggregate_freq <= bound + 3 * res.aggregate_se).lower()
    return {
        "params": params,
        "probe_radius": probe,
        "measured": res.aggregate_freq,
        "stderr": res.aggregate_se,
        "bound": bound,
        "regime": str(regime).lower(),
        "pass": ok,
    }


def cmd_cutprob(args) -> int:
    cfg = _load_config(args.config)
    fixture = args.fixture or cfg.get("fixture")
    seed = args.seed if args.seed is not None else cfg.get("seed", 0)
    out = args.out or cfg.get("out")
    grid = cfg.get("grid")
    if not fixture or out is None or not grid:
        raise ConfigError("cutprob needs fixture, out and a nonempty grid")
    net_cfg = cfg.get("net", {})
    trials = int(cfg.get("trials", 100))
    n_centers = int(cfg.get("centers", 50))
    space = parse_fixture(fixture)
    net = build_net(space, float(net_cfg.get("eps", 1.0)), float(net_cfg.get("delta", 1.0)))
    rows = []
    for k, entry in enumerate(grid):
        row = _cutprob_row(space, net, entry, trials, n_centers, int(seed), _threads(args))
        row["experiment"] = f"cutprob-{k}"
        rows.append(row)
    cols = ["experiment", "fixture", "params", "probe_radius", "trials", "centers",
            "measured", "stderr", "bound", "regime", "pass"]
    with open(out, "w") as fh:
        fh.write(",".join(cols) + "\n")
        for row in rows:
            full = {**row, "fixture": fixture, "trials": trials, "centers": n_centers}
            fh.write(",".join(_fmt(full[c]) for c in cols) + "\n")
    failed = [r for r in rows if r["pass"] == "false"]
    print(f"wrote {out}: {len(rows)} rows, {len(failed)} failing")
    return FAIL if failed else PASS


# ---------------------------------------------------------------------------
# growth
# ---------------------------------------------------------------------------


def cmd_growth(args) -> int:
    fixture = args.fixture
    if not fixture:
        raise ConfigError("growth needs --fixture")
    radii = [float(tok) for tok in args.radii.split(",") if tok]
    if not radii:
        raise ConfigError("growth needs a nonempty --radii list")
    space = parse_fixture(fixture)
    seed = args.seed if args.seed is not None else 0
    table = growth_table(space, radii, trials=args.trials, seed=int(seed))
    out = args.out or "growth.csv"
    with open(out, "w") as fh:
        fh.write("fixture,r,trials,gamma_lower\n")
        for r in sorted(table):
            fh.write(f"{fixture},{_fmt(r)},{args.trials},{table[r]}\n")
    slope = loglog_slope(sorted(table), [table[r] for r in sorted(table)])
    dump_json({"fixture": fixture, "radii": sorted(table),
               "slope": slope if slope is not None else None,
               "slope_defined": slope is not None}, out + ".slope.json")
    print(f"wrote {out}; slope={'undefined' if slope is None else _fmt(slope)}")
    return PASS


# ---------------------------------------------------------------------------
# convert
# ---------------------------------------------------------------------------


def cmd_convert(args) -> int:
    with open(args.input) as fh:
        doc = json.load(fh)
    out = args.out
    if out is None:
        raise ConfigError("convert needs --out")
    if args.direction == "to-padded":
        if args.R is None or args.r is None:
            raise ConfigError("to-padded needs --R and the net scale --r")
        cover = cover_from_json(doc)
        net = build_net(cover.space, args.r, args.r)
        pd = padded_from_cover(cover, net, args.R)
        dump_json(decomposition_to_json(pd, doc["fixture"]), out)
        print(f"wrote {out}: ({_fmt(pd.R)}, {_fmt(pd.D)})-padded, {pd.m} layers")
        return PASS
    if args.direction == "to-cover":
        pd = decomposition_from_json(doc)
        cover = cover_from_padded(pd, pd.net)
        dump_json(cover_to_json(cover, doc["fixture"]), out)
        print(f"wrote {out}: ({_fmt(cover.r_disjoint)}, {_fmt(cover.D_bound)})-cover")
        return PASS
    raise ConfigError(f"unknown direction {args.direction!r}")


# ---------------------------------------------------------------------------
# lll-check
# ---------------------------------------------------------------------------


def cmd_lll_check(args) -> int:
    if args.schedule:
        doc = json.loads(args.schedule)
    elif args.config:
        doc = _load_config(args.config).get("schedule")
    else:
        raise ConfigError("lll-check needs --schedule or --config")
    schedule = schedule_from_json(doc)
    if isinstance(schedule, TexpSchedule):
        budget = texp_csp_bounds(schedule)
    else:
        budget = tgeo_csp_bounds(schedule.b, schedule.r, schedule.m,
                                 schedule.p, schedule.M)
    payload = {
        "schedule": schedule_to_json(schedule),
        "log_p_bound": budget.log_p_bound,
        "log_d_plus_one": budget.log_d_plus_one,
        "p_bound": budget.p_bound if np.isfinite(budget.p_bound) else None,
        "d_bound": budget.d_bound if np.isfinite(budget.d_bound) else None,
        "margin_log": budget.margin_log,
        "feasible": budget.feasible,
    }
    text = dump_json(payload, args.out)
    sys.stdout.write(text)
    return PASS


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="padlab", description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--threads", type=int, default=1,
                    help="worker threads for Monte Carlo trials (LAB_THREADS overrides)")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="write a fixture file plus a constants sidecar")
    p.add_argument("--fixture", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("carve", help="resample, carve, and verify the padding claim")
    p.add_argument("--config", required=True)
    p.add_argument("--fixture")
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_carve)

    p = sub.add_parser("cutprob", help="Monte Carlo cut frequencies vs closed-form bounds")
    p.add_argument("--config", required=True)
    p.add_argument("--fixture")
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_cutprob)

    p = sub.add_parser("growth", help="growth table and log-log slope")
    p.add_argument("--fixture", required=True)
    p.add_argument("--radii", required=True, help="comma-separated radii")
    p.add_argument("--trials", type=int, default=3)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_growth)

    p = sub.add_parser("convert", help="cover -> padded decomposition or back")
    p.add_argument("--input", required=True)
    p.add_argument("--direction", required=True, choices=["to-padded", "to-cover"])
    p.add_argument("--R", type=float)
    p.add_argument("--r", type=float)
    p.add_argument("--out")
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("lll-check", help="evaluate a schedule's feasibility budget")
    p.add_argument("--schedule", help="inline schedule JSON")
    p.add_argument("--config")
    p.add_argument("--out")
    p.set_defaults(func=cmd_lll_check)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return USAGE
    except VerificationFailure as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        sys.stderr.write(dump_json(exc.report.to_jsonable()))
        return FAIL
    except (ValueError, TypeError, OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
