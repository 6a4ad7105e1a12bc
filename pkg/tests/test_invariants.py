"""Property-based checks of the metric, projection and elementary-set invariants."""

import numpy as np
import pytest
from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st

from hadamard_weak import (
    ClosedBall,
    Geodesic,
    Membership,
    check_cn_inequality,
    in_elementary_set,
    project,
    project_to_ball,
    project_to_geodesic,
)

from strategies import SPACES, points, unit

NAMES = list(SPACES)
FAST = settings(max_examples=150, deadline=None, suppress_health_check=[HealthCheck.too_slow])


def triple(name):
    return st.tuples(points(name), points(name), points(name))


@pytest.mark.parametrize("name", NAMES)
def test_distance_axioms(name):
    space = SPACES[name]

    @FAST
    @given(triple(name))
    def check(pqr):
        p, q, r = pqr
        assert space.distance(p, p) == 0.0
        assert space.distance(p, q) == space.distance(q, p)
        assert space.distance(p, r) <= space.distance(p, q) + space.distance(q, r) + 1e-12
        if space.distance(p, q) == 0.0:
            assert p == q

    check()


@pytest.mark.parametrize("name", NAMES)
def test_constant_speed(name):
    space = SPACES[name]

    @FAST
    @given(points(name), points(name), unit, unit)
    def check(a, b, s, t):
        g = Geodesic(a, b)
        assert space.distance(g.at(s), g.at(t)) == pytest.approx(abs(s - t) * g.length, abs=1e-9)
        assert space.distance(a, g.at(t)) == pytest.approx(t * g.length, abs=1e-9)

    check()


@pytest.mark.parametrize("name", NAMES)
def test_cn_inequality(name):
    space = SPACES[name]

    @FAST
    @given(triple(name))
    def check(pqr):
        assert check_cn_inequality(space, *pqr).residual >= -1e-9

    check()


@pytest.mark.parametrize("name", NAMES)
def test_projection_idempotent(name):
    space = SPACES[name]

    @FAST
    @given(triple(name))
    def check(abz):
        a, b, z = abz
        assume(space.distance(a, b) > 1e-6)
        g = Geodesic(a, b)
        p = project_to_geodesic(space, g, z).point
        assert space.distance(project_to_geodesic(space, g, p).point, p) <= 1e-9

    check()


@pytest.mark.parametrize("name", NAMES)
def test_profile_is_unimodal(name):
    space = SPACES[name]

    @FAST
    @given(triple(name))
    def check(abz):
        a, b, z = abz
        g = Geodesic(a, b)
        prof = np.array([space.distance(z, g.at(float(t))) for t in np.linspace(0, 1, 65)])
        # no strict interior local maximum
        inner = prof[1:-1]
        assert not np.any((inner > prof[:-2] + 1e-12) & (inner > prof[2:] + 1e-12))

    check()


@pytest.mark.parametrize("name", NAMES)
def test_ball_projection_nonexpansive(name):
    space = SPACES[name]

    @FAST
    @given(triple(name), st.floats(0.05, 2.0))
    def check(cz, radius):
        c, z1, z2 = cz
        ball = ClosedBall(c, radius)
        p1, p2 = project_to_ball(space, ball, z1), project_to_ball(space, ball, z2)
        assert space.distance(p1, p2) <= space.distance(z1, z2) + 1e-9
        assert space.distance(c, p1) <= radius * (1 + 1e-12)
        if space.distance(c, z1) > radius:
            assert space.distance(c, p1) == pytest.approx(radius, abs=1e-9)

    check()


@pytest.mark.parametrize("name", NAMES)
def test_lemma_parts(name):
    """For a strictly inside [x, y]: U_x(a) lands in [x, a), sits in U_x(y), misses U_y(a)."""
    space = SPACES[name]

    @FAST
    @given(points(name), points(name), points(name), st.floats(0.05, 0.95))
    def check(x, y, z, s):
        assume(space.distance(x, y) > 1e-3)
        g = Geodesic(x, y)
        a = g.at(s)
        qa = in_elementary_set(space, x, a, z)
        if qa.status is Membership.IN:
            t = project_to_geodesic(space, g, z).t
            assert t * g.length < space.distance(x, a) + 1e-9
            assert in_elementary_set(space, x, y, z).status is not Membership.OUT
            assert in_elementary_set(space, y, a, z).status is not Membership.IN

    check()


@pytest.mark.parametrize("name", NAMES)
def test_projection_beats_grid(name):
    space = SPACES[name]

    @FAST
    @given(triple(name))
    def check(abz):
        a, b, z = abz
        res = project(space, a, b, z)
        g = Geodesic(a, b)
        best = min(space.distance(z, g.at(float(t))) for t in np.linspace(0, 1, 101))
        assert res.dist <= best + 1e-9

    check()
