"""The four catalog spaces: Euclidean R^n, the spike, the book of triangles,
and the hyperbolic upper half-plane.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Callable

from .core import InputError, Point, Space

# coordinates produced by geodesic evaluation may leave their domain by a few ulps
_SLACK = 1e-12


def _log_uniform_index(rng, n: int) -> int:
    """Integer in ``[1, n]`` whose logarithm is roughly uniform."""
    k = int(math.exp(rng.uniform(0.0, math.log(n + 1.0))))
    return min(max(k, 1), n)


def _check_int(name: str, value, minimum: int) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        if isinstance(value, float) and value.is_integer():
            value = int(value)
        else:
            raise InputError(f"{name} must be an integer, got {value!r}")
    if value < minimum:
        raise InputError(f"{name} must be >= {minimum}, got {value}")
    return value


def _check_real(name: str, value) -> float:
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise InputError(f"{name} must be a real number, got {value!r}") from None
    if not math.isfinite(value):
        raise InputError(f"{name} must be finite")
    return value


# ---------------------------------------------------------------------------
# Euclidean space
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Euclidean(Space):
    dim: int
    box: float = 3.0

    kind = "euclidean"

    def __post_init__(self):
        _check_int("dimension", self.dim, 1)

    def params(self):
        return {"dim": self.dim}

    def point(self, *coords) -> Point:
        if len(coords) == 1 and isinstance(coords[0], (list, tuple)):
            coords = tuple(coords[0])
        if len(coords) != self.dim:
            raise InputError(f"expected {self.dim} coordinates, got {len(coords)}")
        return Point(self, tuple(_check_real("coordinate", c) for c in coords))

    def _distance(self, p, q):
        return math.dist(p, q)

    def _geodesic(self, a, b):
        delta = tuple(bi - ai for ai, bi in zip(a, b))
        return lambda t: tuple(ai + t * di for ai, di in zip(a, delta))

    def _profile(self, a, b, z):
        if self.dim == 2:
            ax, ay = a
            dx, dy = b[0] - ax, b[1] - ay
            zx, zy = z
            return lambda t: math.hypot(ax + t * dx - zx, ay + t * dy - zy)
        return super()._profile(a, b, z)

    def sample(self, rng) -> Point:
        return Point(self, tuple(rng.uniform(-self.box, self.box) for _ in range(self.dim)))

    def sample_ball(self, center, radius, rng) -> Point:
        c = center.coords
        while True:
            q = tuple(ci + rng.uniform(-radius, radius) for ci in c)
            if math.dist(c, q) <= radius:
                return Point(self, q)

    def point_to_json(self, p):
        return list(p.coords)

    def point_from_json(self, obj):
        if isinstance(obj, dict):
            obj = obj.get("coords")
        if not isinstance(obj, (list, tuple)):
            raise InputError(f"cannot read a Euclidean point from {obj!r}")
        return self.point(*obj)


# ---------------------------------------------------------------------------
# The infinite spike, truncated to finitely many branches
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Spike(Space):
    """Intervals ``I_n = [0, n]`` for ``n = 1..branches`` glued at 0.

    Coordinates are ``(branch, s)``; the glue point is stored as ``(1, 0.0)``.
    """

    branches: int

    kind = "spike"

    def __post_init__(self):
        _check_int("branch count", self.branches, 1)

    def params(self):
        return {"branches": self.branches}

    @property
    def origin(self) -> Point:
        return Point(self, (1, 0.0))

    def point(self, branch, s) -> Point:
        branch = _check_int("branch", branch, 1)
        if branch > self.branches:
            raise InputError(f"branch {branch} exceeds truncation {self.branches}")
        s = _check_real("s", s)
        if s < -_SLACK or s > branch + _SLACK * branch:
            raise InputError(f"s={s} outside [0, {branch}]")
        return Point(self, self._canon(branch, min(max(s, 0.0), float(branch))))

    @staticmethod
    def _canon(branch, s):
        return (1, 0.0) if s == 0.0 else (branch, s)

    def _distance(self, p, q):
        if p[0] == q[0]:
            return abs(p[1] - q[1])
        return p[1] + q[1]

    def _geodesic(self, a, b):
        (m, s), (n, r) = a, b
        canon = self._canon
        if m == n or s == 0.0 or r == 0.0:
            branch = n if s == 0.0 else m
            return lambda t: canon(branch, min(max(s + t * (r - s), 0.0), float(branch)))
        total = s + r

        def along(t):
            tau = t * total
            if tau < s:
                return (m, s - tau)
            if tau == s:
                return (1, 0.0)
            return (n, min(tau - s, float(n)))

        return along

    def _profile(self, a, b, z):
        (m, s), (n, r) = a, b
        zb, zs = z
        if m == n or s == 0.0 or r == 0.0:
            branch = n if s == 0.0 else m
            if zb == branch or zs == 0.0:
                return lambda t: abs(s + t * (r - s) - zs)
            return lambda t: s + t * (r - s) + zs
        total = s + r

        def prof(t):
            tau = t * total
            if tau <= s:
                pos_b, pos = m, s - tau
            else:
                pos_b, pos = n, tau - s
            if pos_b == zb or pos == 0.0 or zs == 0.0:
                return abs(pos - zs)
            return pos + zs

        return prof

    def sample(self, rng) -> Point:
        branch = _log_uniform_index(rng, self.branches)
        return Point(self, self._canon(branch, rng.uniform(0.0, float(branch))))

    def sample_ball(self, center, radius, rng) -> Point:
        cb, cs = center.coords
        while True:
            if rng.random() < 0.5:
                branch = cb
                lo, hi = max(0.0, cs - radius), min(float(cb), cs + radius)
            else:
                branch = rng.randint(1, self.branches)
                lo, hi = 0.0, min(float(branch), max(radius - cs, 0.0))
            q = self._canon(branch, rng.uniform(lo, hi))
            if self._distance(center.coords, q) <= radius:
                return Point(self, q)

    def point_to_json(self, p):
        return [p.coords[0], p.coords[1]]

    def point_from_json(self, obj):
        if obj == "origin":
            return self.origin
        if isinstance(obj, dict):
            return self.point(obj["branch"], obj["s"])
        if isinstance(obj, (list, tuple)) and len(obj) == 2:
            return self.point(obj[0], obj[1])
        raise InputError(f"cannot read a spike point from {obj!r}")


# ---------------------------------------------------------------------------
# Book of triangles
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Book(Space):
    """Copies of an isosceles right triangle glued along the cathetus ``[A, B]``.

    Page coordinates ``(u, v)``: ``A = (0, 0)``, ``B = (leg, 0)``,
    ``C_n = (0, leg)`` on page n.  Spine points (``v = 0``) are stored on page 1.
    """

    pages: int
    leg: float = 1.0

    kind = "book"

    def __post_init__(self):
        _check_int("page count", self.pages, 1)
        if not (isinstance(self.leg, (int, float)) and self.leg > 0 and math.isfinite(self.leg)):
            raise InputError(f"leg length must be positive, got {self.leg!r}")
        object.__setattr__(self, "leg", float(self.leg))

    def params(self):
        return {"pages": self.pages, "leg": self.leg}

    # named vertices
    @property
    def A(self) -> Point:
        return Point(self, (1, 0.0, 0.0))

    @property
    def B(self) -> Point:
        return Point(self, (1, self.leg, 0.0))

    @property
    def P(self) -> Point:
        """Midpoint of the hypotenuse of page 1."""
        return Point(self, (1, 0.5 * self.leg, 0.5 * self.leg))

    def C(self, n: int) -> Point:
        return self.point(n, 0.0, self.leg)

    def point(self, page, u, v) -> Point:
        page = _check_int("page", page, 1)
        if page > self.pages:
            raise InputError(f"page {page} exceeds truncation {self.pages}")
        u, v = _check_real("u", u), _check_real("v", v)
        slack = _SLACK * self.leg
        if u < -slack or v < -slack or u + v > self.leg + slack:
            raise InputError(f"(u, v)=({u}, {v}) outside the triangle with leg {self.leg}")
        return Point(self, self._canon(page, u, v))

    def _canon(self, page, u, v):
        u = max(u, 0.0)
        v = max(v, 0.0)
        excess = u + v - self.leg
        if excess > 0.0:
            u, v = u - 0.5 * excess, v - 0.5 * excess
        if v == 0.0:
            return (1, min(u, self.leg), 0.0)
        return (page, u, v)

    def _distance(self, p, q):
        pp, pu, pv = p
        qp, qu, qv = q
        if pp == qp or pv == 0.0 or qv == 0.0:
            return math.hypot(pu - qu, pv - qv)
        # unfold q's page across the spine; the chord crosses the spine line at s
        s = (pu * qv + qu * pv) / (pv + qv)
        if 0.0 <= s <= self.leg:
            return math.hypot(pu - qu, pv + qv)
        e = 0.0 if s < 0.0 else self.leg
        return math.hypot(pu - e, pv) + math.hypot(e - qu, qv)

    def _unfolded(self, a, b):
        """Page of a, page of b, and b expressed in a's page plane."""
        ap, au, av = a
        bp, bu, bv = b
        if av == 0.0:
            ap = bp
        if bv == 0.0:
            bp = ap
        if ap == bp:
            return ap, bp, (bu, bv)
        return ap, bp, (bu, -bv)

    def _geodesic(self, a, b):
        ap, bp, (bu, bv) = self._unfolded(a, b)
        au, av = a[1], a[2]
        du, dv = bu - au, bv - av
        canon = self._canon

        def along(t):
            u, v = au + t * du, av + t * dv
            if v >= 0.0:
                return canon(ap, u, v)
            return canon(bp, u, -v)

        return along

    def _profile(self, a, b, z):
        along = self._geodesic(a, b)
        dist = self._distance
        return lambda t: dist(z, along(t))

    def _sample_triangle(self, rng):
        r1, r2 = rng.random(), rng.random()
        if r1 + r2 > 1.0:
            r1, r2 = 1.0 - r1, 1.0 - r2
        return self.leg * r1, self.leg * r2

    def sample(self, rng) -> Point:
        page = _log_uniform_index(rng, self.pages)
        u, v = self._sample_triangle(rng)
        return Point(self, self._canon(page, u, v))

    def sample_ball(self, center, radius, rng) -> Point:
        cp, cu, cv = center.coords
        ulo, uhi = max(0.0, cu - radius), min(self.leg, cu + radius)
        vhi = min(self.leg, cv + radius)
        while True:
            page = cp if rng.random() < 0.5 else rng.randint(1, self.pages)
            u, v = rng.uniform(ulo, uhi), rng.uniform(0.0, vhi)
            if u + v > self.leg:
                continue
            q = self._canon(page, u, v)
            if self._distance(center.coords, q) <= radius:
                return Point(self, q)

    def point_to_json(self, p):
        return [p.coords[0], p.coords[1], p.coords[2]]

    def point_from_json(self, obj):
        if isinstance(obj, str):
            if obj in ("A", "B", "P"):
                return getattr(self, obj)
            if obj.startswith("C") and obj[1:].isdigit():
                return self.C(int(obj[1:]))
            raise InputError(f"unknown named book point {obj!r}")
        if isinstance(obj, dict):
            return self.point(obj["page"], obj["u"], obj["v"])
        if isinstance(obj, (list, tuple)) and len(obj) == 3:
            return self.point(*obj)
        raise InputError(f"cannot read a book point from {obj!r}")


# ---------------------------------------------------------------------------
# Hyperbolic upper half-plane
# ---------------------------------------------------------------------------


def _to_hyperboloid(x, y):
    r2 = x * x + y * y
    return ((r2 + 1.0) / (2.0 * y), x / y, (r2 - 1.0) / (2.0 * y))


def _from_hyperboloid(X):
    y = 1.0 / (X[0] - X[2])
    return (X[1] * y, y)


@dataclass(frozen=True)
class HalfPlane(Space):
    """The upper half-plane model of the hyperbolic plane (curvature -1)."""

    kind = "halfplane"

    def params(self):
        return {}

    def point(self, x, y) -> Point:
        x, y = _check_real("x", x), _check_real("y", y)
        if y <= 0.0:
            raise InputError(f"half-plane points need y > 0, got y={y}")
        return Point(self, (x, y))

    def _distance(self, p, q):
        return 2.0 * math.asinh(
            math.hypot(p[0] - q[0], p[1] - q[1]) / (2.0 * math.sqrt(p[1] * q[1]))
        )

    def _geodesic(self, a, b):
        d = self._distance(a, b)
        if d == 0.0:
            return lambda t: a
        A = _to_hyperboloid(*a)
        B = _to_hyperboloid(*b)
        sd = math.sinh(d)

        def along(t):
            wa = math.sinh((1.0 - t) * d) / sd
            wb = math.sinh(t * d) / sd
            x, y = _from_hyperboloid(tuple(wa * ai + wb * bi for ai, bi in zip(A, B)))
            return (x, max(y, 1e-300))

        return along

    def _profile(self, a, b, z):
        d = self._distance(a, b)
        if d == 0.0:
            return lambda t: self._distance(z, a)
        a0, a1, a2 = _to_hyperboloid(*a)
        b0, b1, b2 = _to_hyperboloid(*b)
        sd = math.sinh(d)
        zx, zy = z
        sinh, asinh, hypot, sqrt = math.sinh, math.asinh, math.hypot, math.sqrt

        def prof(t):
            wa = sinh((1.0 - t) * d) / sd
            wb = sinh(t * d) / sd
            y = 1.0 / (wa * (a0 - a2) + wb * (b0 - b2))
            x = (wa * a1 + wb * b1) * y
            return 2.0 * asinh(hypot(x - zx, y - zy) / (2.0 * sqrt(y * zy)))

        return prof

    def exp_polar(self, center: Point, rho: float, theta: float) -> Point:
        """Point at distance ``rho`` from ``center`` in direction ``theta``.

        ``theta`` is measured from the upward vertical direction.
        """
        x, y = center.coords
        # unit tangent vectors at (x, y): the Euclidean frame scaled by y
        X = _to_hyperboloid(x, y)
        ex = _tangent(x, y, 1.0, 0.0)
        ey = _tangent(x, y, 0.0, 1.0)
        c, s = math.cos(theta), math.sin(theta)
        ch, sh = math.cosh(rho), math.sinh(rho)
        Y = tuple(ch * Xi + sh * (c * eyi + s * exi) for Xi, exi, eyi in zip(X, ex, ey))
        return self.point(*_from_hyperboloid(Y))

    def sample(self, rng) -> Point:
        return Point(self, (rng.uniform(-2.0, 2.0), math.exp(rng.uniform(math.log(0.25), math.log(4.0)))))

    def sample_ball(self, center, radius, rng) -> Point:
        x0, y0 = center.coords
        # hyperbolic balls are Euclidean disks with a shifted center
        cy, er = y0 * math.cosh(radius), y0 * math.sinh(radius)
        while True:
            q = (rng.uniform(x0 - er, x0 + er), rng.uniform(max(cy - er, 0.0), cy + er))
            if q[1] > 0.0 and self._distance(center.coords, q) <= radius:
                return Point(self, q)

    def point_to_json(self, p):
        return [p.coords[0], p.coords[1]]

    def point_from_json(self, obj):
        if isinstance(obj, dict):
            return self.point(obj["x"], obj["y"])
        if isinstance(obj, (list, tuple)) and len(obj) == 2:
            return self.point(*obj)
        raise InputError(f"cannot read a half-plane point from {obj!r}")


def _tangent(x, y, vx, vy):
    """Push the unit vector ``(vx, vy)/y`` at ``(x, y)`` into hyperboloid coordinates."""
    # derivative of _to_hyperboloid along (vx, vy), times y for unit hyperbolic speed
    r2 = x * x + y * y
    d0 = (2 * x * vx + 2 * y * vy) / (2 * y) - (r2 + 1.0) * vy / (2 * y * y)
    d1 = vx / y - x * vy / (y * y)
    d2 = (2 * x * vx + 2 * y * vy) / (2 * y) - (r2 - 1.0) * vy / (2 * y * y)
    return (y * d0, y * d1, y * d2)


# ---------------------------------------------------------------------------
# Convex bodies
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ClosedBall:
    """Closed metric ball; balls are convex in any CAT(0) space."""

    center: Point
    radius: float
    kind: str = "ClosedBall"

    def __post_init__(self):
        if not self.radius > 0:
            raise InputError(f"ball radius must be positive, got {self.radius}")

    @property
    def space(self) -> Space:
        return self.center.space

    def contains(self, p: Point) -> bool:
        # relative slack absorbs rounding for points placed on the sphere
        return self.space.distance(self.center, p) <= self.radius * (1.0 + 1e-12)


ConvexBody = ClosedBall


# ---------------------------------------------------------------------------
# Factories and descriptors
# ---------------------------------------------------------------------------


def make_euclidean(dim: int) -> Euclidean:
    return Euclidean(dim)


def make_spike(branches: int) -> Spike:
    return Spike(branches)


def make_book(pages: int, leg: float = 1.0) -> Book:
    return Book(pages, leg)


def make_halfplane() -> HalfPlane:
    return HalfPlane()


_FACTORIES: dict[str, Callable[..., Space]] = {
    "euclidean": lambda d: Euclidean(_check_int("dim", d.get("dim", 2), 1)),
    "spike": lambda d: Spike(_check_int("branches", d.get("branches", 50), 1)),
    "book": lambda d: Book(_check_int("pages", d.get("pages", 10), 1), _check_real("leg", d.get("leg", 1.0))),
    "halfplane": lambda d: HalfPlane(),
}


def space_from_dict(descriptor: dict[str, Any]) -> Space:
    if not isinstance(descriptor, dict) or "kind" not in descriptor:
        raise InputError("space descriptor must be an object with a 'kind' field")
    kind = str(descriptor["kind"]).lower()
    if kind not in _FACTORIES:
        raise InputError(f"unknown space kind {descriptor['kind']!r}; expected one of {sorted(_FACTORIES)}")
    return _FACTORIES[kind](descriptor)
