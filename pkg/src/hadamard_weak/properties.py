"""Checkers for property (N) and the four-point conditions, the book-of-triangles
witnesses, projection fingerprints, and a seeded counterexample search.
"""

from __future__ import annotations

import enum
import itertools
import random
from dataclasses import dataclass, field
from typing import Sequence

from .core import (
    DEFAULT_TOLERANCE,
    Geodesic,
    InputError,
    NumericalError,
    Point,
    PreconditionError,
    Space,
    ToleranceConfig,
    parallel_map,
)
from .projection import project_to_geodesic
from .spaces import Book
from .topology import Membership, in_elementary_set


class WitnessKind(str, enum.Enum):
    PROPERTY_N = "PropertyNViolation"
    Q4 = "Q4Violation"
    TW_NE_TG = "TwNeTgWitness"
    SEPARATION = "SeparationRecord"


@dataclass(frozen=True)
class Witness:
    kind: WitnessKind
    points: dict[str, Point]
    values: dict[str, float]
    seed: int | None = None

    @property
    def space(self) -> Space:
        return next(iter(self.points.values())).space


def _interior_params(m_count: int) -> list[float]:
    if m_count < 1:
        raise InputError("m_count must be >= 1")
    return [j / (m_count + 1) for j in range(1, m_count + 1)]


# ---------------------------------------------------------------------------
# property (N)
# ---------------------------------------------------------------------------


def _property_n_values(space, g, x, m, y, cfg):
    tx = project_to_geodesic(space, g, x, cfg).t
    ty = project_to_geodesic(space, g, y, cfg).t
    tm = project_to_geodesic(space, g, m, cfg).t
    lo, hi = min(tx, ty), max(tx, ty)
    margin = max(lo - tm, tm - hi) * g.length
    return {"t_x": tx, "t_y": ty, "t_m": tm, "margin": margin}


def check_property_N(
    space: Space,
    g: Geodesic,
    x: Point,
    y: Point,
    m_count: int = 1,
    cfg: ToleranceConfig = DEFAULT_TOLERANCE,
) -> Witness | None:
    """Look for ``m`` on ``[x, y]`` whose projection to ``g`` leaves ``[P_g x, P_g y]``.

    ``m_count`` evenly spaced interior points are tried (``m_count=1`` is the
    midpoint).  The first violation by more than ``tol_point`` is returned.
    """
    if g.length == 0.0:
        raise InputError("property (N) needs a nondegenerate geodesic")
    if space._distance(x.coords, y.coords) == 0.0:
        return None
    seg = Geodesic(x, y)
    tx = project_to_geodesic(space, g, x, cfg).t
    ty = project_to_geodesic(space, g, y, cfg).t
    lo, hi = min(tx, ty), max(tx, ty)
    for s in _interior_params(m_count):
        m = seg._point(s)
        tm = project_to_geodesic(space, g, m, cfg).t
        margin = max(lo - tm, tm - hi) * g.length
        if margin > cfg.tol_point:
            return Witness(
                WitnessKind.PROPERTY_N,
                {"g_a": g.a, "g_b": g.b, "x": x, "y": y, "m": m},
                {"t_x": tx, "t_y": ty, "t_m": tm, "margin": margin, "s": s},
            )
    return None


# ---------------------------------------------------------------------------
# (Q4) and its non-strict variant
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Q4Outcome:
    hypothesis_met: bool
    witness: Witness | None = None


def _q4_hypothesis(space, x, y, p, q, strict, tol) -> bool:
    d = space._distance
    gx = d(x.coords, q.coords) - d(x.coords, p.coords)
    gy = d(y.coords, q.coords) - d(y.coords, p.coords)
    if strict:
        return gx > tol and gy > tol
    return gx >= 0.0 and gy >= 0.0


def check_q4(
    space: Space,
    x: Point,
    y: Point,
    p: Point,
    q: Point,
    m_count: int = 3,
    strict: bool = True,
    cfg: ToleranceConfig = DEFAULT_TOLERANCE,
) -> Q4Outcome:
    """Test the four-point condition for one quadruple.

    With ``strict`` the hypothesis ``d(x,p) < d(x,q)``, ``d(y,p) < d(y,q)`` must
    hold by more than ``tol_point``; without it the plain ``<=`` comparisons
    are used.  A violation is ``d(m,p) > d(m,q) + tol_point`` for some
    ``m`` on ``[x, y]``.
    """
    if not _q4_hypothesis(space, x, y, p, q, strict, cfg.tol_point):
        return Q4Outcome(False)
    seg = Geodesic(x, y)
    d = space._distance
    for s in _interior_params(m_count):
        m = seg._point(s)
        excess = d(m.coords, p.coords) - d(m.coords, q.coords)
        if excess > cfg.tol_point:
            return Q4Outcome(
                True,
                Witness(
                    WitnessKind.Q4,
                    {"x": x, "y": y, "p": p, "q": q, "m": m},
                    {"excess": excess, "s": s, "strict": float(strict)},
                ),
            )
    return Q4Outcome(True)


# ---------------------------------------------------------------------------
# book of triangles
# ---------------------------------------------------------------------------


def book_witness_tw_ne_tg(
    space: Book, probes: Sequence[Point], cfg: ToleranceConfig = DEFAULT_TOLERANCE
) -> Witness:
    """Find ``C_n`` inside every ``U_A(D_j)`` but outside ``U_P(B)``.

    No finite intersection of elementary sets around ``A`` fits inside
    ``U_P(B)``, even though ``A`` belongs to it; the returned index makes
    that concrete for the given probes.
    """
    if not isinstance(space, Book):
        raise InputError("the tau_w != tau_g witness lives in the book of triangles")
    if not probes:
        raise InputError("need at least one probe")
    for d in probes:
        space._check(d)
        if space._distance(d.coords, space.A.coords) <= cfg.tol_point:
            raise InputError("probes must differ from A")
    need = max(d.coords[0] for d in probes) + 2
    if space.pages < need:
        raise InputError(f"book truncated at {space.pages} pages; use at least {need} pages for these probes")
    A, B, P = space.A, space.B, space.P
    for n in range(1, space.pages + 1):
        c = space.C(n)
        outside = in_elementary_set(space, P, B, c, cfg)
        if outside.status is not Membership.OUT:
            continue
        inside = [in_elementary_set(space, A, d, c, cfg) for d in probes]
        if all(q.status is Membership.IN for q in inside):
            points = {"A": A, "B": B, "P": P, "C": c}
            values = {"n": float(n), "margin_PB": outside.margin}
            for j, (d, q) in enumerate(zip(probes, inside), start=1):
                points[f"D{j}"] = d
                values[f"margin_D{j}"] = q.margin
            return Witness(WitnessKind.TW_NE_TG, points, values)
    raise NumericalError("no witness page found; the truncation is too small")


# ---------------------------------------------------------------------------
# projection fingerprints
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Fingerprint:
    base_set: tuple[Point, ...]
    geodesics: tuple[tuple[int, int], ...]
    values: tuple[Point, ...]
    params: tuple[float, ...] = field(default=())


def _distinct(space: Space, points: Sequence[Point], tol: float) -> list[Point]:
    out: list[Point] = []
    for p in points:
        space._check(p)
        if all(space._distance(p.coords, q.coords) > tol for q in out):
            out.append(p)
    return out


def fingerprint(
    space: Space, base_set: Sequence[Point], z: Point, cfg: ToleranceConfig = DEFAULT_TOLERANCE
) -> Fingerprint:
    """Project ``z`` onto every geodesic joining two points of ``base_set``."""
    base = _distinct(space, base_set, cfg.tol_point)
    if len(base) < 2:
        raise InputError("fingerprints need at least two distinct base points")
    pairs = tuple(itertools.combinations(range(len(base)), 2))
    results = [project_to_geodesic(space, Geodesic(base[i], base[j]), z, cfg) for i, j in pairs]
    return Fingerprint(tuple(base), pairs, tuple(r.point for r in results), tuple(r.t for r in results))


def check_fingerprint_separation(
    space: Space,
    base_set: Sequence[Point],
    x: Point,
    y: Point,
    cfg: ToleranceConfig = DEFAULT_TOLERANCE,
) -> Witness:
    """Separate ``x`` and ``y`` by one fingerprint coordinate.

    With ``r = d(x, y)`` and base points ``x_D``, ``y_D`` within ``r/3`` of ``x``
    and ``y``, the projections to ``[x_D, y_D]`` are more than ``r/3`` apart.
    """
    d = space._distance
    r = d(x.coords, y.coords)
    if r <= cfg.tol_point:
        raise PreconditionError("x and y must be distinct")
    xd = min(base_set, key=lambda b: d(x.coords, b.coords))
    yd = min(base_set, key=lambda b: d(y.coords, b.coords))
    if not (d(x.coords, xd.coords) < r / 3 and d(y.coords, yd.coords) < r / 3):
        raise PreconditionError("base set has no points within r/3 of both x and y")
    g = Geodesic(xd, yd)
    px = project_to_geodesic(space, g, x, cfg).point
    py = project_to_geodesic(space, g, y, cfg).point
    sep = d(px.coords, py.coords)
    return Witness(
        WitnessKind.SEPARATION,
        {"x": x, "y": y, "x_D": xd, "y_D": yd, "P_x": px, "P_y": py},
        {"r": r, "separation": sep, "excess": sep - r / 3},
    )


# ---------------------------------------------------------------------------
# re-verification
# ---------------------------------------------------------------------------


def verify_witness(w: Witness, cfg: ToleranceConfig = DEFAULT_TOLERANCE) -> bool:
    """Recompute a witness from its stored points and confirm its claim."""
    space = w.space
    pts, vals, tol = w.points, w.values, cfg.tol_point
    if w.kind is WitnessKind.PROPERTY_N:
        g = Geodesic(pts["g_a"], pts["g_b"])
        got = _property_n_values(space, g, pts["x"], pts["m"], pts["y"], cfg)
        same = all(abs(got[k] - vals[k]) <= tol for k in ("t_x", "t_y", "t_m"))
        return same and got["margin"] > tol
    if w.kind is WitnessKind.Q4:
        strict = bool(vals.get("strict", 1.0))
        x, y, p, q, m = (pts[k] for k in ("x", "y", "p", "q", "m"))
        if not _q4_hypothesis(space, x, y, p, q, strict, tol):
            return False
        excess = space._distance(m.coords, p.coords) - space._distance(m.coords, q.coords)
        on_segment = abs(
            space._distance(x.coords, m.coords) + space._distance(m.coords, y.coords) - space._distance(x.coords, y.coords)
        ) <= tol
        return on_segment and excess > tol and abs(excess - vals["excess"]) <= tol
    if w.kind is WitnessKind.TW_NE_TG:
        c = pts["C"]
        if in_elementary_set(space, pts["P"], pts["B"], c, cfg).status is not Membership.OUT:
            return False
        probes = [pts[k] for k in sorted(pts) if k.startswith("D")]
        return all(in_elementary_set(space, pts["A"], d, c, cfg).status is Membership.IN for d in probes)
    if w.kind is WitnessKind.SEPARATION:
        g = Geodesic(pts["x_D"], pts["y_D"])
        px = project_to_geodesic(space, g, pts["x"], cfg).point
        py = project_to_geodesic(space, g, pts["y"], cfg).point
        sep = space._distance(px.coords, py.coords)
        return abs(sep - vals["separation"]) <= tol and sep > vals["r"] / 3 - 1e-9
    raise InputError(f"unknown witness kind {w.kind!r}")


# ---------------------------------------------------------------------------
# randomized search
# ---------------------------------------------------------------------------


class PropertyName(str, enum.Enum):
    N = "N"
    Q4 = "Q4"
    Q4BAR = "Q4bar"


def _draw(space: Space, prop: PropertyName, rng: random.Random, tol: float):
    while True:
        pts = [space.sample(rng) for _ in range(4)]
        if prop is PropertyName.Q4BAR and rng.random() < 0.5:
            # put x on the bisector of p, q to exercise the tie case
            x, y, p, q = pts
            x = Geodesic(p, q)._point(0.5)
            pts = [x, y, p, q]
        if prop is PropertyName.N:
            a, b = pts[0], pts[1]
            if space._distance(a.coords, b.coords) <= tol:
                continue
        return pts


def search_counterexamples(
    space: Space,
    prop: PropertyName | str,
    budget: int,
    seed: int,
    cfg: ToleranceConfig = DEFAULT_TOLERANCE,
    m_count: int = 3,
    limit: int | None = None,
    threads: int = 1,
) -> list[Witness]:
    """Seeded random search for violations of (N), (Q4) or the non-strict (Q4).

    Draws are generated sequentially from ``seed`` before evaluation, so the
    output does not depend on ``threads``.  Each witness records its draw
    index under ``values["draw"]``.
    """
    prop = PropertyName(prop)
    if isinstance(budget, bool) or not isinstance(budget, int) or budget < 1:
        raise InputError("budget must be a positive integer")
    rng = random.Random(seed)
    draws = [_draw(space, prop, rng, cfg.tol_point) for _ in range(budget)]

    def evaluate(item):
        k, (a, b, c, e) = item
        if prop is PropertyName.N:
            w = check_property_N(space, Geodesic(a, b), c, e, m_count, cfg)
        else:
            w = check_q4(space, a, b, c, e, m_count, prop is PropertyName.Q4, cfg).witness
        if w is None:
            return None
        return Witness(w.kind, w.points, {**w.values, "draw": float(k)}, seed)

    found = []
    for w in parallel_map(evaluate, list(enumerate(draws)), threads):
        if w is not None:
            found.append(w)
            if limit is not None and len(found) >= limit:
                break
    return found
