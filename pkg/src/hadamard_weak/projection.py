"""Closest-point projections onto compact geodesics and closed balls."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import DEFAULT_TOLERANCE, Geodesic, InputError, NumericalError, Point, Space, ToleranceConfig
from .spaces import ClosedBall

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
# metric step used by the parabolic refinement and the endpoint model
_PARABOLA_STEP = 1e-5
# an endpoint within this metric distance of the search result may absorb it
_SNAP_WINDOW = 1e-6


@dataclass(frozen=True)
class ProjectionResult:
    point: Point
    t: float
    dist: float
    iterations: int

    @property
    def at_start(self) -> bool:
        return self.t == 0.0

    @property
    def at_end(self) -> bool:
        return self.t == 1.0


def _step(length: float) -> float:
    # a fixed metric step keeps the refinement's resolution independent of the length
    return min(max(_PARABOLA_STEP / length, 1e-8), 1e-3) if length > 0 else _PARABOLA_STEP


def _tie(value: float) -> float:
    return 64.0 * math.ulp(max(value, 1.0))


def _settle_endpoint(f, e: float, sign: float, fe: float, t: float, ft: float, h: float) -> tuple[float, float]:
    """Decide between the endpoint ``e`` and a nearby interior minimizer.

    The two values tie in floating point, so a one-sided quadratic model
    ``f(e + sign*s) ~ fe + b s + c s^2`` on ``s = 0, h, 2h`` is fitted.  The
    endpoint wins when the model's vertex lies within the noise of ``b``;
    otherwise the vertex is returned.
    """
    g1, g2 = f(e + sign * h), f(e + 2.0 * sign * h)
    c = (fe - 2.0 * g1 + g2) / (2.0 * h * h)
    b = (-3.0 * fe + 4.0 * g1 - g2) / (2.0 * h)
    noise = 16.0 * math.ulp(max(fe, g1, g2, 1.0)) / h
    if c <= 0.0 or b >= -noise:
        return e, fe
    s = -b / (2.0 * c)
    if s > 2.0 * h:
        return t, ft
    cand = e + sign * s
    fc = f(cand)
    return (cand, fc) if fc <= ft + _tie(ft) else (t, ft)


def minimize_convex(f, tol: float, max_iter: int, length: float = 1.0) -> tuple[float, int]:
    """Golden-ratio ternary search for the minimizer of a convex ``f`` on [0, 1].

    Returns the parameter and the iteration count.  Equal interior values
    shrink the bracket from both sides, which is valid for convex ``f``.
    ``length`` converts parameter steps to metric steps for the endpoint test.
    """
    lo, hi = 0.0, 1.0
    c = hi - _INV_PHI * (hi - lo)
    d = lo + _INV_PHI * (hi - lo)
    fc, fd = f(c), f(d)
    it = 0
    while hi - lo > tol:
        if it >= max_iter:
            raise NumericalError(
                f"ternary search did not reach bracket width {tol} in {max_iter} iterations",
                bracket=(lo, hi),
            )
        it += 1
        if fc < fd:
            hi, d, fd = d, c, fc
            c = hi - _INV_PHI * (hi - lo)
            fc = f(c)
        elif fc > fd:
            lo, c, fc = c, d, fd
            d = lo + _INV_PHI * (hi - lo)
            fd = f(d)
        else:
            lo, hi = c, d
            c = hi - _INV_PHI * (hi - lo)
            d = lo + _INV_PHI * (hi - lo)
            fc, fd = f(c), f(d)
    t = 0.5 * (lo + hi)
    ft = f(t)

    # parabolic refinement; ternary search cannot resolve a smooth minimum
    # beyond roughly sqrt(machine epsilon)
    h = _step(length)
    if h <= t <= 1.0 - h:
        f1, f3 = f(t - h), f(t + h)
        curv = f1 - 2.0 * ft + f3
        if curv > 0.0:
            cand = t + 0.5 * h * (f1 - f3) / curv
            if abs(cand - t) <= h:
                fcand = f(cand)
                if fcand <= ft:
                    t, ft = cand, fcand

    # the search resolves a flat minimum only to about sqrt(eps) * f in metric units
    window = min(1e-2, max(_SNAP_WINDOW, _SNAP_WINDOW * max(ft, 1.0) / length)) if length > 0 else _SNAP_WINDOW
    f0, f1 = f(0.0), f(1.0)
    if 1.0 - t <= window and f1 <= ft + _tie(ft):
        t, ft = _settle_endpoint(f, 1.0, -1.0, f1, t, ft, h)
    elif t <= window and f0 <= ft + _tie(ft):
        t, ft = _settle_endpoint(f, 0.0, 1.0, f0, t, ft, h)
    if t not in (0.0, 1.0):
        # an endpoint clearly below the search result means the bracket closed on the wrong side
        if f1 + _tie(ft) < ft and f1 <= f0:
            t = 1.0
        elif f0 + _tie(ft) < ft:
            t = 0.0
    return t, it


def project_to_geodesic(
    space: Space, g: Geodesic, z: Point, cfg: ToleranceConfig = DEFAULT_TOLERANCE
) -> ProjectionResult:
    """Nearest point of ``g`` to ``z``.

    The profile ``t -> d(z, g(t))`` is convex, so a bracketing search on
    [0, 1] finds the unique minimizer.
    """
    space._check(z)
    if g.space != space:
        raise InputError("geodesic lives in a different space")
    if g.length == 0.0:
        return ProjectionResult(g.a, 0.0, space._distance(z.coords, g.a.coords), 0)
    f = space._profile(g.a.coords, g.b.coords, z.coords)
    t, it = minimize_convex(f, cfg.tol_opt, cfg.max_iter, g.length)
    point = g._point(t)
    return ProjectionResult(point, t, space._distance(z.coords, point.coords), it)


def project(space: Space, a: Point, b: Point, z: Point, cfg: ToleranceConfig = DEFAULT_TOLERANCE) -> ProjectionResult:
    """Shorthand for projecting ``z`` onto ``[a, b]``."""
    return project_to_geodesic(space, Geodesic(a, b), z, cfg)


def project_to_ball(space: Space, body: ClosedBall, z: Point) -> Point:
    space._check(z)
    if body.space != space:
        raise InputError("ball lives in a different space")
    dist = space._distance(body.center.coords, z.coords)
    if dist <= body.radius:
        return z
    return Geodesic(body.center, z)._point(body.radius / dist)
