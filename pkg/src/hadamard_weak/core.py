"""Geodesic-space interface shared by every model space.

A space is an immutable value object.  Points carry a reference to the
space they live in together with a tuple of canonical coordinates, so two
points compare equal exactly when they are the same point of the glued
space.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, TypeVar

T = TypeVar("T")
R = TypeVar("R")


class HadamardError(Exception):
    """Base class for errors raised by this package."""


class InputError(HadamardError, ValueError):
    """Invalid arguments: wrong space, out-of-range coordinates, bad parameters."""


class PreconditionError(InputError):
    """Inputs are well formed but violate an operation's precondition."""


class NumericalError(HadamardError, ArithmeticError):
    """An iterative routine did not reach its tolerance."""

    def __init__(self, message: str, bracket: tuple[float, float] | None = None):
        super().__init__(message)
        self.bracket = bracket


@dataclass(frozen=True)
class ToleranceConfig:
    tol_point: float = 1e-9
    tol_opt: float = 1e-12
    max_iter: int = 200

    def __post_init__(self):
        if not (self.tol_point > 0 and self.tol_opt > 0):
            raise InputError("tolerances must be positive")
        if self.tol_opt > self.tol_point:
            raise InputError("tol_opt must not exceed tol_point")
        if self.max_iter < 1:
            raise InputError("max_iter must be a positive integer")


DEFAULT_TOLERANCE = ToleranceConfig()


@dataclass(frozen=True)
class Point:
    space: "Space"
    coords: tuple

    def __repr__(self):
        return f"{type(self.space).__name__}Point{self.coords!r}"


class Space(ABC):
    """A complete CAT(0) model space.

    Subclasses are frozen dataclasses and implement the exact metric, the
    constant-speed geodesic between two points, and a few sampling helpers
    used by the experiment drivers.
    """

    kind: str = ""

    # -- construction -----------------------------------------------------
    @abstractmethod
    def point(self, *coords) -> Point:
        """Validate ``coords`` and return the canonical point."""

    @abstractmethod
    def params(self) -> dict[str, Any]:
        ...

    def to_dict(self) -> dict[str, Any]:
        return {"kind": self.kind, **self.params()}

    # -- metric geometry --------------------------------------------------
    @abstractmethod
    def _distance(self, p: tuple, q: tuple) -> float:
        ...

    @abstractmethod
    def _geodesic(self, a: tuple, b: tuple) -> Callable[[float], tuple]:
        """Return ``t -> coords`` for the constant-speed geodesic from a to b."""

    def _profile(self, a: tuple, b: tuple, z: tuple) -> Callable[[float], float]:
        """Return ``t -> d(z, gamma(t))``; overridden where a faster form exists."""
        along = self._geodesic(a, b)
        dist = self._distance
        return lambda t: dist(z, along(t))

    def distance(self, p: Point, q: Point) -> float:
        self._check(p)
        self._check(q)
        return self._distance(p.coords, q.coords)

    def _wrap(self, coords: tuple) -> Point:
        return Point(self, coords)

    def _check(self, p: Point) -> None:
        if not isinstance(p, Point) or p.space != self:
            raise InputError(f"point {p!r} does not belong to {self!r}")

    # -- sampling ---------------------------------------------------------
    @abstractmethod
    def sample(self, rng) -> Point:
        """Draw a point from the space's default experiment distribution."""

    @abstractmethod
    def sample_ball(self, center: Point, radius: float, rng) -> Point:
        """Draw a point of the closed ball ``B(center, radius)``."""

    # -- serialization ----------------------------------------------------
    @abstractmethod
    def point_to_json(self, p: Point) -> list:
        ...

    @abstractmethod
    def point_from_json(self, obj) -> Point:
        ...


@dataclass(frozen=True)
class Geodesic:
    """The geodesic segment ``[a, b]`` with its constant-speed parametrization."""

    a: Point
    b: Point
    length: float = field(init=False)
    _along: Callable[[float], tuple] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        space = self.a.space
        space._check(self.a)
        space._check(self.b)
        object.__setattr__(self, "length", space._distance(self.a.coords, self.b.coords))
        object.__setattr__(self, "_along", space._geodesic(self.a.coords, self.b.coords))

    @property
    def space(self) -> Space:
        return self.a.space

    def at(self, t: float) -> Point:
        return geodesic_point(self, t)

    def _point(self, t: float) -> Point:
        if t == 0.0:
            return self.a
        if t == 1.0:
            return self.b
        return self.space._wrap(self._along(t))


def distance(space: Space, p: Point, q: Point) -> float:
    return space.distance(p, q)


def geodesic_point(g: Geodesic, t: float) -> Point:
    if not 0.0 <= t <= 1.0:
        raise InputError(f"geodesic parameter {t} outside [0, 1]")
    return g._point(float(t))


def midpoint(space: Space, p: Point, q: Point) -> Point:
    return geodesic_point(Geodesic(p, q), 0.5)


@dataclass(frozen=True)
class CNResidual:
    lhs: float
    rhs: float
    residual: float
    passed: bool


def check_cn_inequality(space: Space, p: Point, q: Point, r: Point, tol: float = 1e-9) -> CNResidual:
    """Evaluate the midpoint (Bruhat-Tits) inequality at ``p`` for the pair ``q, r``.

    ``residual = rhs - lhs`` where ``lhs = d(p, m)^2`` for the midpoint ``m`` of
    ``[q, r]`` and ``rhs = d(p,q)^2/2 + d(p,r)^2/2 - d(q,r)^2/4``.
    """
    m = midpoint(space, q, r)
    lhs = space.distance(p, m) ** 2
    rhs = (
        0.5 * space.distance(p, q) ** 2
        + 0.5 * space.distance(p, r) ** 2
        - 0.25 * space.distance(q, r) ** 2
    )
    residual = rhs - lhs
    return CNResidual(lhs, rhs, residual, residual >= -tol)


def parallel_map(fn: Callable[[T], R], items: Iterable[T], threads: int = 1) -> list[R]:
    """Order-preserving map; results never depend on the thread count."""
    items = list(items)
    if threads <= 1 or len(items) < 2:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))
