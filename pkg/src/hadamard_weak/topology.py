"""Elementary sets, weak-convergence reports and pointwise set-identity checks.

Every predicate here is evaluated on finite data.  Membership tests that
fall inside the floating-point band around a set's boundary come back as
``INDETERMINATE`` and are never counted as evidence either way.
"""

from __future__ import annotations

import enum
import math
import random
from dataclasses import dataclass, field
from typing import Sequence

from .core import (
    DEFAULT_TOLERANCE,
    Geodesic,
    InputError,
    Point,
    PreconditionError,
    Space,
    ToleranceConfig,
    parallel_map,
)
from .projection import project_to_ball, project_to_geodesic
from .spaces import Book, ClosedBall, Euclidean, HalfPlane, Spike


class Membership(str, enum.Enum):
    IN = "In"
    OUT = "Out"
    INDETERMINATE = "Indeterminate"


@dataclass(frozen=True)
class ElementaryQuery:
    x: Point
    y: Point
    z: Point
    margin: float  # d(P_[x,y] z, y)
    t: float
    status: Membership


def in_elementary_set(
    space: Space, x: Point, y: Point, z: Point, cfg: ToleranceConfig = DEFAULT_TOLERANCE
) -> ElementaryQuery:
    """Decide whether ``z`` lies in ``U_x(y) = {z : P_[x,y] z != y}``.

    ``Out`` is only reported when the projection landed exactly on ``y``
    (the search resolved to the endpoint); margins in ``(0, tol_point]``
    are ``Indeterminate``.
    """
    g = Geodesic(x, y)
    if g.length <= cfg.tol_point:
        raise InputError("elementary sets need distinct points x != y")
    res = project_to_geodesic(space, g, z, cfg)
    margin = space._distance(res.point.coords, y.coords)
    if margin > cfg.tol_point:
        status = Membership.IN
    elif res.t == 1.0:
        status = Membership.OUT
    else:
        status = Membership.INDETERMINATE
    return ElementaryQuery(x, y, z, margin, res.t, status)


@dataclass(frozen=True)
class HalfspaceAgreement:
    metric: Membership
    formula_in: bool
    inner: float  # <b, z - x> with b = (y - x)/|y - x|^2
    gap: float  # |<b, z - x> - 1|

    @property
    def agree(self) -> bool | None:
        if self.metric is Membership.INDETERMINATE:
            return None
        return (self.metric is Membership.IN) == self.formula_in


def halfspace_formula_check(
    space: Euclidean, x: Point, y: Point, z: Point, cfg: ToleranceConfig = DEFAULT_TOLERANCE
) -> HalfspaceAgreement:
    """Compare metric membership in ``U_x(y)`` with the inner-product half-space test."""
    if not isinstance(space, Euclidean):
        raise InputError("the half-space formula applies to Euclidean space only")
    q = in_elementary_set(space, x, y, z, cfg)
    diff = [yi - xi for xi, yi in zip(x.coords, y.coords)]
    norm2 = sum(d * d for d in diff)
    inner = sum(d * (zi - xi) for d, xi, zi in zip(diff, x.coords, z.coords)) / norm2
    return HalfspaceAgreement(q.status, inner < 1.0, inner, abs(inner - 1.0))


# ---------------------------------------------------------------------------
# Weak convergence of finite sequence prefixes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Verdict:
    kind: str  # ConvergedWithin | NotConvergedWithin | Indeterminate
    epsilon: float
    index: int | None = None

    def __str__(self):
        if self.kind == "ConvergedWithin":
            return f"ConvergedWithin({self.epsilon!r}, {self.index})"
        if self.kind == "NotConvergedWithin":
            return f"NotConvergedWithin({self.epsilon!r})"
        return "Indeterminate"

    @property
    def converged(self) -> bool:
        return self.kind == "ConvergedWithin"


@dataclass(frozen=True)
class ConvergenceReport:
    candidate: Point
    probes: tuple[Point, ...]
    traces: tuple[tuple[float, ...], ...]  # traces[j][k] = d(x, P_[x, y_j] x_k)
    strong_trace: tuple[float, ...]
    verdict: Verdict
    epsilon: float


def classify_traces(
    traces: Sequence[Sequence[float]], epsilon: float, tol: float, min_tail: float = 0.1
) -> Verdict:
    """Verdict for per-probe traces; indices in the verdict are 1-based.

    ``ConvergedWithin(eps, N)`` needs every trace below ``eps`` from index
    ``N`` on, and the tail ``N..K`` must cover at least ``min_tail`` of the
    prefix; a prefix that only settles in its last few entries is reported
    as not converged.
    """
    K = len(traces[0])
    worst = [max(tr[k] for tr in traces) for k in range(K)]
    # entries within tol of epsilon are neither certainly below nor above it
    unsettled = [k for k in range(K) if worst[k] > epsilon - tol]
    last = unsettled[-1] if unsettled else -1
    certain_bad = last >= 0 and worst[last] - epsilon > tol
    if last == K - 1:
        return Verdict("NotConvergedWithin" if certain_bad else "Indeterminate", epsilon)
    if K - 1 - last < max(1, math.ceil(min_tail * K)):
        return Verdict("NotConvergedWithin" if certain_bad else "Indeterminate", epsilon)
    return Verdict("ConvergedWithin", epsilon, last + 2)


def weak_convergence_report(
    space: Space,
    seq: Sequence[Point],
    x: Point,
    probes: Sequence[Point],
    epsilon: float,
    cfg: ToleranceConfig = DEFAULT_TOLERANCE,
    threads: int = 1,
    min_tail: float = 0.1,
) -> ConvergenceReport:
    """Trace ``d(x, P_[x,y] x_k)`` for every probe ``y`` along the prefix ``seq``.

    The verdict is relative to the probe set; it does not certify a limit.
    """
    if not seq:
        raise InputError("sequence prefix must be nonempty")
    if not probes:
        raise InputError("probe set must be nonempty")
    if not epsilon > 0:
        raise InputError("epsilon must be positive")
    if not 0.0 <= min_tail <= 1.0:
        raise InputError("min_tail must lie in [0, 1]")
    space._check(x)
    for p in seq:
        space._check(p)
    for y in probes:
        space._check(y)
        if space._distance(x.coords, y.coords) <= cfg.tol_point:
            raise InputError(f"probe {y!r} coincides with the candidate limit")

    def trace(y):
        g = Geodesic(x, y)
        return tuple(
            space._distance(x.coords, project_to_geodesic(space, g, p, cfg).point.coords) for p in seq
        )

    traces = tuple(parallel_map(trace, probes, threads))
    strong = tuple(space._distance(x.coords, p.coords) for p in seq)
    verdict = classify_traces(traces, epsilon, cfg.tol_point, min_tail)
    return ConvergenceReport(x, tuple(probes), traces, strong, verdict, epsilon)


# ---------------------------------------------------------------------------
# Pointwise set identities
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Mismatch:
    index: int
    z: Point
    left: bool | None
    right: bool | None
    detail: dict = field(default_factory=dict)


@dataclass(frozen=True)
class SetCheck:
    mismatches: tuple[Mismatch, ...]
    checked: int
    indeterminate: int
    skipped: int = 0

    @property
    def holds(self) -> bool:
        return not self.mismatches


def _on_geodesic(space: Space, g: Geodesic, p: Point, tol: float) -> float:
    da = space._distance(g.a.coords, p.coords)
    db = space._distance(p.coords, g.b.coords)
    if da + db - g.length > tol * max(1.0, g.length):
        raise InputError(f"{p!r} does not lie on the geodesic")
    return da


def _excluded(space, x, y, z, cfg) -> bool | None:
    """``z not in U_x(y)``; None when undecided.  ``U_x(x)`` is taken empty."""
    if space._distance(x.coords, y.coords) <= cfg.tol_point:
        return True
    status = in_elementary_set(space, x, y, z, cfg).status
    if status is Membership.INDETERMINATE:
        return None
    return status is Membership.OUT


def check_preimage_identity(
    space: Space,
    g: Geodesic,
    x: Point,
    y: Point,
    samples: Sequence[Point],
    cfg: ToleranceConfig = DEFAULT_TOLERANCE,
    threads: int = 1,
) -> SetCheck:
    """Compare ``P_g z in [x, y]`` against ``z notin U_a(x)`` and ``z notin U_b(y)``.

    ``x`` and ``y`` must lie on ``g = [a, b]`` with ``d(a, x) <= d(a, y)``.
    """
    tol = cfg.tol_point
    sx = _on_geodesic(space, g, x, tol)
    sy = _on_geodesic(space, g, y, tol)
    if sx > sy + tol:
        raise InputError("need d(a, x) <= d(a, y)")
    x_is_a = sx <= tol
    y_is_b = g.length - sy <= tol

    def evaluate(item):
        i, z = item
        sz = project_to_geodesic(space, g, z, cfg).t * g.length
        lower = True if x_is_a else (None if abs(sz - sx) <= tol else sz > sx)
        upper = True if y_is_b else (None if abs(sz - sy) <= tol else sz < sy)
        left = False if (lower is False or upper is False) else (None if None in (lower, upper) else True)
        ra = _excluded(space, g.a, x, z, cfg)
        rb = _excluded(space, g.b, y, z, cfg)
        right = False if (ra is False or rb is False) else (None if None in (ra, rb) else True)
        return i, z, left, right, sz

    mismatches, undecided = [], 0
    for i, z, left, right, sz in parallel_map(evaluate, list(enumerate(samples)), threads):
        if left is None or right is None:
            undecided += 1
        elif left != right:
            mismatches.append(Mismatch(i, z, left, right, {"arc_position": sz, "x": sx, "y": sy}))
    return SetCheck(tuple(mismatches), len(samples), undecided)


def check_convex_complement(
    space: Space,
    body: ClosedBall,
    x: Point,
    samples: Sequence[Point],
    cfg: ToleranceConfig = DEFAULT_TOLERANCE,
    threads: int = 1,
) -> SetCheck:
    """Check that no point of the ball lies in ``U_x(P_C x)`` for ``x`` outside it.

    Samples outside the ball are skipped (rejection sampling).
    """
    if space._distance(body.center.coords, x.coords) <= body.radius:
        raise PreconditionError("x must lie outside the convex body")
    px = project_to_ball(space, body, x)
    inside = [(i, c) for i, c in enumerate(samples) if body.contains(c)]

    def evaluate(item):
        i, c = item
        return i, c, in_elementary_set(space, x, px, c, cfg)

    mismatches, undecided = [], 0
    for i, c, q in parallel_map(evaluate, inside, threads):
        if q.status is Membership.INDETERMINATE:
            undecided += 1
        elif q.status is Membership.IN:
            mismatches.append(Mismatch(i, c, True, False, {"margin": q.margin, "t": q.t}))
    return SetCheck(tuple(mismatches), len(inside), undecided, len(samples) - len(inside))


# ---------------------------------------------------------------------------
# Cone-cover certificate for locally compact spaces
# ---------------------------------------------------------------------------


def make_net(space: Space, x: Point, eps: float, shrink: float = 0.9) -> list[Point]:
    """Deterministic ``eps/2``-net of the closed ball ``B(x, eps)``.

    Grid points are pulled into the ball by the (nonexpansive) ball
    projection, which keeps the covering radius of the raw grid.
    """
    if not eps > 0:
        raise InputError("eps must be positive")
    ball = ClosedBall(x, eps)
    target = shrink * eps / 2.0
    raw: list[Point] = []
    if isinstance(space, Euclidean):
        h = 2.0 * target / math.sqrt(space.dim)
        n = int(math.ceil(eps / h))
        offsets = [k * h for k in range(-n, n + 1)]
        grid = [()]
        for _ in range(space.dim):
            grid = [g + (o,) for g in grid for o in offsets]
        raw = [Point(space, tuple(c + o for c, o in zip(x.coords, g))) for g in grid]
    elif isinstance(space, HalfPlane):
        # geodesic polar grid: radial gap <= delta/2, angular arc <= sinh(rho) * pi / m
        rings = max(3, int(math.ceil(eps / (0.4 * target))))
        delta = eps / rings
        budget = target - delta / 2.0
        raw = [x]
        for k in range(1, rings + 1):
            rho = k * delta
            m = max(3, int(math.ceil(math.pi * math.sinh(rho) / budget)))
            raw.extend(space.exp_polar(x, rho, 2.0 * math.pi * j / m) for j in range(m))
    elif isinstance(space, Spike):
        h = 2.0 * target
        cb, cs = x.coords
        for branch in range(1, space.branches + 1):
            if branch == cb:
                lo, hi = max(0.0, cs - eps), min(float(branch), cs + eps)
            else:
                lo, hi = 0.0, min(float(branch), eps - cs)
            if hi < lo:
                continue
            n = int(math.ceil((hi - lo) / h))
            raw.extend(space.point(branch, lo + (hi - lo) * k / max(n, 1)) for k in range(n + 1))
    elif isinstance(space, Book):
        h = 2.0 * target / math.sqrt(2.0)
        n = int(math.ceil(space.leg / h))
        step = space.leg / n
        cells = [(i * step, j * step) for i in range(n + 1) for j in range(n + 1 - i)]
        for page in range(1, space.pages + 1):
            for u, v in cells:
                q = Point(space, space._canon(page, u, v))
                if space._distance(x.coords, q.coords) <= eps + 2.0 * target:
                    raw.append(q)
    else:
        raise InputError(f"no net construction for {space!r}")
    net: list[Point] = []
    seen = set()
    for p in raw:
        q = project_to_ball(space, ball, p) if isinstance(space, (Euclidean, Book)) else p
        if q.coords not in seen and space._distance(x.coords, q.coords) <= eps * (1 + 1e-12):
            seen.add(q.coords)
            net.append(q)
    return net


def covering_radius(space: Space, x: Point, eps: float, net: Sequence[Point], samples: int, seed: int) -> float:
    """Largest sampled distance from a point of ``B(x, eps)`` to the net."""
    rng = random.Random(seed)
    worst = 0.0
    coords = [p.coords for p in net]
    for _ in range(samples):
        s = space.sample_ball(x, eps, rng).coords
        worst = max(worst, min(space._distance(s, c) for c in coords))
    return worst


@dataclass(frozen=True)
class ConeCoverCertificate:
    center: Point
    eps: float
    net: tuple[Point, ...]
    midpoints: tuple[Point | None, ...]
    expelled_by: tuple[int | None, ...]  # per tester: net index whose midpoint set expels it
    counterexamples: tuple[int, ...]
    covering_radius: float

    @property
    def certified(self) -> bool:
        return not self.counterexamples


def cone_cover_certificate(
    space: Space,
    x: Point,
    eps: float,
    net: Sequence[Point],
    testers: Sequence[Point],
    cfg: ToleranceConfig = DEFAULT_TOLERANCE,
    coverage_samples: int = 2000,
    seed: int = 0,
    threads: int = 1,
) -> ConeCoverCertificate:
    """Certify that each tester outside ``K = B(x, eps)`` leaves some ``U_x(m_i)``.

    ``m_i`` is the midpoint of ``[x, y_i]`` for the net point ``y_i``; a
    tester is expelled by ``i`` when ``d(y_i, P_K z) <= eps/2`` and
    ``P_[x, m_i] z = m_i``.
    """
    if not eps > 0:
        raise InputError("eps must be positive")
    if not net:
        raise PreconditionError("empty net")
    for y in net:
        if space._distance(x.coords, y.coords) > eps * (1 + 1e-12):
            raise PreconditionError(f"net point {y!r} lies outside the ball")
    for z in testers:
        if space._distance(x.coords, z.coords) <= eps:
            raise PreconditionError(f"tester {z!r} is not strictly outside the ball")
    radius = covering_radius(space, x, eps, net, coverage_samples, seed)
    if radius > eps / 2.0:
        raise PreconditionError(
            f"net covering radius {radius:.6g} exceeds eps/2 = {eps / 2:.6g}; certificate would be vacuous"
        )
    midpoints = tuple(
        None if space._distance(x.coords, y.coords) <= cfg.tol_point else Geodesic(x, y)._point(0.5) for y in net
    )
    ball = ClosedBall(x, eps)

    def expel(z):
        pz = project_to_ball(space, ball, z)
        near = sorted(
            (space._distance(y.coords, pz.coords), i)
            for i, y in enumerate(net)
            if midpoints[i] is not None
        )
        for dist, i in near:
            if dist > eps / 2.0:
                break
            if in_elementary_set(space, x, midpoints[i], z, cfg).status is Membership.OUT:
                return i
        return None

    expelled = tuple(parallel_map(expel, testers, threads))
    bad = tuple(k for k, i in enumerate(expelled) if i is None)
    return ConeCoverCertificate(x, eps, tuple(net), midpoints, expelled, bad, radius)
