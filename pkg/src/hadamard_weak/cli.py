"""Command-line front end: ``hadamard-weak <experiment> --config FILE ...``.

Each experiment reads its parameters from the JSON config, calls one
library routine and turns the result into a report.  Exit status: 0 on
success, 1 when a counterexample turns up where none was expected, 2 on
bad input or unmet preconditions.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

from . import __version__
from .core import Geodesic, HadamardError, InputError, Point, Space, ToleranceConfig
from .projection import project_to_ball, project_to_geodesic
from .properties import (
    PropertyName,
    book_witness_tw_ne_tg,
    check_fingerprint_separation,
    fingerprint,
    search_counterexamples,
    verify_witness,
)
from .report import (
    REPORT_KEYS,
    convergence_rows,
    convergence_to_dict,
    dumps,
    fingerprint_to_dict,
    mismatch_to_dict,
    point_to_json,
    rows_to_csv,
    witness_to_dict,
)
from .spaces import ClosedBall, Spike, space_from_dict
from .topology import (
    check_convex_complement,
    check_preimage_identity,
    cone_cover_certificate,
    in_elementary_set,
    make_net,
    weak_convergence_report,
)

EXPERIMENT_NAMES = (
    "project",
    "elementary",
    "weakconv",
    "preimage-identity",
    "convex-complement",
    "cone-cover",
    "property-search",
    "book-witness",
    "fingerprint",
)
RANDOMIZED = {"preimage-identity", "convex-complement", "cone-cover", "property-search"}


@dataclass
class Outcome:
    verdict: str
    traces: Any = None
    witnesses: list = field(default_factory=list)
    mismatches: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    rows: list = field(default_factory=list)
    status: int = 0


@dataclass(frozen=True)
class Context:
    space: Space
    params: dict
    seed: int | None
    threads: int
    cfg: ToleranceConfig

    def point(self, key: str) -> Point:
        if key not in self.params:
            raise InputError(f"missing parameter {key!r}")
        return self.space.point_from_json(self.params[key])

    def points(self, key: str) -> list[Point]:
        value = self.params.get(key)
        if not isinstance(value, list):
            raise InputError(f"parameter {key!r} must be a list of points")
        return [self.space.point_from_json(v) for v in value]

    def number(self, key: str, default=None) -> float:
        value = self.params.get(key, default)
        if value is None:
            raise InputError(f"missing parameter {key!r}")
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise InputError(f"parameter {key!r} must be a number")
        return value

    def rng(self) -> random.Random:
        if self.seed is None:
            raise InputError("this experiment is randomized; a seed is required")
        return random.Random(self.seed)

    def samples(self, key: str, draw: Callable[[random.Random], Point]) -> list[Point]:
        value = self.params.get(key)
        if isinstance(value, list):
            return self.points(key)
        count = int(self.number(key))
        if count < 1:
            raise InputError(f"{key!r} must be a positive count")
        rng = self.rng()
        return [draw(rng) for _ in range(count)]


# ---------------------------------------------------------------------------
# experiment adapters
# ---------------------------------------------------------------------------


def _project(ctx: Context) -> Outcome:
    z = ctx.point("z")
    if "center" in ctx.params:
        body = ClosedBall(ctx.point("center"), ctx.number("radius"))
        p = project_to_ball(ctx.space, body, z)
        summary = {"point": point_to_json(p), "dist": ctx.space.distance(z, p)}
    else:
        res = project_to_geodesic(ctx.space, Geodesic(ctx.point("a"), ctx.point("b")), z, ctx.cfg)
        summary = {"point": point_to_json(res.point), "t": res.t, "dist": res.dist, "iterations": res.iterations}
    return Outcome("ok", summary=summary, rows=[summary])


def _elementary(ctx: Context) -> Outcome:
    x, y = ctx.point("x"), ctx.point("y")
    zs = ctx.points("points") if "points" in ctx.params else [ctx.point("z")]
    queries = []
    for z in zs:
        q = in_elementary_set(ctx.space, x, y, z, ctx.cfg)
        queries.append({"z": point_to_json(z), "status": q.status.value, "margin": q.margin, "t": q.t})
    verdict = queries[0]["status"] if len(queries) == 1 else "evaluated"
    return Outcome(verdict, summary={"queries": queries}, rows=queries)


def _sequence(ctx: Context, key: str) -> list[Point]:
    value = ctx.params.get(key)
    if isinstance(value, dict):
        kind, count = value.get("kind"), int(value.get("count", 0))
        if count < 1:
            raise InputError(f"{key}: generator needs a positive count")
        space = ctx.space
        if kind == "spike-endpoints" and isinstance(space, Spike):
            return [space.point(n, n) for n in range(1, min(count, space.branches) + 1)]
        if kind == "spike-midpoints" and isinstance(space, Spike):
            return [space.point(n, n / 2) for n in range(1, min(count, space.branches) + 1)]
        if kind == "random":
            rng = ctx.rng()
            return [space.sample(rng) for _ in range(count)]
        raise InputError(f"{key}: unknown generator {kind!r} for {space.kind}")
    return ctx.points(key)


def _weakconv(ctx: Context) -> Outcome:
    x = ctx.point("candidate")
    seq = _sequence(ctx, "sequence")
    probes = _sequence(ctx, "probes")
    rep = weak_convergence_report(
        ctx.space, seq, x, probes, ctx.number("epsilon"), ctx.cfg, ctx.threads, ctx.number("min_tail", 0.1)
    )
    traces = convergence_to_dict(rep)
    return Outcome(str(rep.verdict), traces=traces, rows=convergence_rows(rep), summary={"length": len(seq)})


def _preimage(ctx: Context) -> Outcome:
    g = Geodesic(ctx.point("a"), ctx.point("b"))
    x = ctx.point("x") if "x" in ctx.params else g.at(ctx.number("x_t"))
    y = ctx.point("y") if "y" in ctx.params else g.at(ctx.number("y_t"))
    samples = ctx.samples("samples", ctx.space.sample)
    chk = check_preimage_identity(ctx.space, g, x, y, samples, ctx.cfg, ctx.threads)
    mism = [mismatch_to_dict(m) for m in chk.mismatches]
    summary = {"checked": chk.checked, "indeterminate": chk.indeterminate, "x": point_to_json(x), "y": point_to_json(y)}
    return Outcome("holds" if chk.holds else "violated", mismatches=mism, summary=summary, rows=mism, status=0 if chk.holds else 1)


def _convex_complement(ctx: Context) -> Outcome:
    body = ClosedBall(ctx.point("center"), ctx.number("radius"))
    samples = ctx.samples("samples", lambda rng: ctx.space.sample_ball(body.center, body.radius, rng))
    chk = check_convex_complement(ctx.space, body, ctx.point("x"), samples, ctx.cfg, ctx.threads)
    mism = [mismatch_to_dict(m) for m in chk.mismatches]
    summary = {"checked": chk.checked, "indeterminate": chk.indeterminate, "skipped": chk.skipped}
    return Outcome("holds" if chk.holds else "violated", mismatches=mism, summary=summary, rows=mism, status=0 if chk.holds else 1)


def _cone_cover(ctx: Context) -> Outcome:
    x, eps = ctx.point("x"), ctx.number("eps")
    net = ctx.points("net") if "net" in ctx.params else make_net(ctx.space, x, eps)
    space = ctx.space

    def outside(rng):
        while True:
            z = space.sample_ball(x, 3.0 * eps, rng)
            if space.distance(x, z) > eps:
                return z

    testers = ctx.samples("testers", outside)
    cert = cone_cover_certificate(
        space, x, eps, net, testers, ctx.cfg, int(ctx.number("coverage_samples", 2000)), ctx.seed or 0, ctx.threads
    )
    rows = [
        {"tester": k, "z": point_to_json(z), "expelled_by": i}
        for k, (z, i) in enumerate(zip(testers, cert.expelled_by))
    ]
    mism = [rows[k] for k in cert.counterexamples]
    summary = {
        "net_size": len(net),
        "covering_radius": cert.covering_radius,
        "testers": len(testers),
        "expelled_by": list(cert.expelled_by),
    }
    return Outcome(
        "certified" if cert.certified else "not certified",
        mismatches=mism,
        summary=summary,
        rows=rows,
        status=0 if cert.certified else 1,
    )


def _property_search(ctx: Context) -> Outcome:
    prop = PropertyName(ctx.params.get("property", "N"))
    if ctx.seed is None:
        raise InputError("property-search is randomized; a seed is required")
    limit = ctx.params.get("limit", 20)
    found = search_counterexamples(
        ctx.space,
        prop,
        int(ctx.number("budget")),
        ctx.seed,
        ctx.cfg,
        int(ctx.number("m_count", 3)),
        limit,
        ctx.threads,
    )
    witnesses = [witness_to_dict(w) for w in found]
    summary = {"found": len(found), "reverified": sum(verify_witness(w, ctx.cfg) for w in found)}
    expect = ctx.params.get("expect")
    status = 1 if (expect == "none" and found) else 0
    rows = [{"kind": w["kind"], "draw": w["values"].get("draw"), "points": w["points"], "values": w["values"]} for w in witnesses]
    return Outcome(f"found {len(found)}" if found else "none found", witnesses=witnesses, summary=summary, rows=rows, status=status)


def _book_witness(ctx: Context) -> Outcome:
    w = book_witness_tw_ne_tg(ctx.space, ctx.points("probes"), ctx.cfg)
    d = witness_to_dict(w)
    n = int(w.values["n"])
    return Outcome(f"witness C{n}", witnesses=[d], summary={"n": n, "reverified": verify_witness(w, ctx.cfg)}, rows=[{"n": n, **d["values"]}])


def _fingerprint(ctx: Context) -> Outcome:
    base = ctx.points("base_set")
    fp = fingerprint(ctx.space, base, ctx.point("z"), ctx.cfg)
    out = Outcome("ok", traces=fingerprint_to_dict(fp))
    out.rows = [
        {"i": i, "j": j, "value": point_to_json(v), "t": t} for (i, j), v, t in zip(fp.geodesics, fp.values, fp.params)
    ]
    if "x" in ctx.params or "y" in ctx.params:
        w = check_fingerprint_separation(ctx.space, base, ctx.point("x"), ctx.point("y"), ctx.cfg)
        out.witnesses = [witness_to_dict(w)]
        if w.values["excess"] <= 0.0:
            out.verdict, out.status = "separation failed", 1
        else:
            out.verdict = "separated"
    return out


EXPERIMENTS: dict[str, Callable[[Context], Outcome]] = {
    "project": _project,
    "elementary": _elementary,
    "weakconv": _weakconv,
    "preimage-identity": _preimage,
    "convex-complement": _convex_complement,
    "cone-cover": _cone_cover,
    "property-search": _property_search,
    "book-witness": _book_witness,
    "fingerprint": _fingerprint,
}


# ---------------------------------------------------------------------------
# driver
# ---------------------------------------------------------------------------


def resolve_config(args: argparse.Namespace) -> tuple[dict[str, Any], Path | None]:
    config: dict[str, Any] = {}
    if args.config is not None:
        try:
            config = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(config, dict):
            raise InputError("config must be a JSON object")
    declared = config.get("experiment")
    if declared is not None and declared != args.experiment:
        raise InputError(f"config is for experiment {declared!r}, not {args.experiment!r}")
    params = dict(config.get("params") or {})
    for item in args.param or []:
        key, sep, raw = item.partition("=")
        if not sep:
            raise InputError(f"--param expects KEY=VALUE, got {item!r}")
        try:
            params[key] = json.loads(raw)
        except json.JSONDecodeError:
            params[key] = raw
    resolved = {
        "experiment": args.experiment,
        "space": config.get("space"),
        "params": params,
        "seed": args.seed if args.seed is not None else config.get("seed"),
        "format": args.format or config.get("format", "json"),
        "tolerance": config.get("tolerance", {}),
    }
    output = args.output if args.output is not None else config.get("output")
    if resolved["space"] is None:
        raise InputError("config needs a 'space' descriptor")
    if resolved["format"] not in ("json", "csv"):
        raise InputError(f"unknown format {resolved['format']!r}")
    if resolved["seed"] is not None and (isinstance(resolved["seed"], bool) or not isinstance(resolved["seed"], int)):
        raise InputError("seed must be an integer")
    return resolved, output


def run(resolved: dict[str, Any], threads: int = 1) -> tuple[dict[str, Any], Outcome]:
    """Execute one resolved config and build the report document."""
    space = space_from_dict(resolved["space"])
    try:
        cfg = ToleranceConfig(**resolved["tolerance"])
    except TypeError as exc:
        raise InputError(f"bad tolerance block: {exc}") from None
    experiment = resolved["experiment"]
    if experiment in RANDOMIZED and resolved["seed"] is None and not _all_explicit(experiment, resolved["params"]):
        raise InputError(f"experiment {experiment!r} is randomized; pass --seed or set 'seed'")
    ctx = Context(space, resolved["params"], resolved["seed"], threads, cfg)
    outcome = EXPERIMENTS[experiment](ctx)
    report = {
        "config": {k: resolved[k] for k in ("experiment", "space", "params", "seed", "tolerance")},
        "verdict": outcome.verdict,
        "traces": outcome.traces,
        "witnesses": outcome.witnesses,
        "mismatches": outcome.mismatches,
        "metadata": {"tool": "hadamard-weak", "version": __version__, "summary": outcome.summary},
    }
    assert tuple(report) == REPORT_KEYS
    return report, outcome


def _all_explicit(experiment: str, params: dict) -> bool:
    keys = {"preimage-identity": ["samples"], "convex-complement": ["samples"], "cone-cover": ["testers"]}.get(experiment)
    return keys is not None and all(isinstance(params.get(k), list) for k in keys)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hadamard-weak",
        description="Weak-topology experiments on Hadamard model spaces.",
    )
    parser.add_argument("experiment", choices=EXPERIMENT_NAMES)
    parser.add_argument("--config", type=Path, help="JSON experiment config")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--threads", type=int, default=1, help="worker thread cap")
    parser.add_argument("--output", type=Path, help="report path (stdout if omitted)")
    parser.add_argument("--format", choices=("json", "csv"))
    parser.add_argument("--param", action="append", metavar="KEY=VALUE", help="override a params entry (JSON value)")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if argv and argv[0] == "run":
        argv = argv[1:]
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        resolved, output = resolve_config(args)
        report, outcome = run(resolved, max(1, args.threads))
        text = dumps(report) if resolved["format"] == "json" else rows_to_csv(outcome.rows)
        if output is None:
            sys.stdout.write(text)
        else:
            try:
                Path(output).write_text(text, encoding="utf-8")
            except OSError as exc:
                raise InputError(f"cannot write report to {output}: {exc}") from None
    except (HadamardError, ValueError) as exc:
        print(f"hadamard-weak: error: {exc}", file=sys.stderr)
        return 2
    return outcome.status


if __name__ == "__main__":
    sys.exit(main())
