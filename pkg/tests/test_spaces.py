import math
import random

import pytest

from hadamard_weak import (
    ClosedBall,
    Geodesic,
    InputError,
    check_cn_inequality,
    geodesic_point,
    make_book,
    make_euclidean,
    make_halfplane,
    make_spike,
    project,
    space_from_dict,
)

import oracles


# -- construction ------------------------------------------------------------


@pytest.mark.parametrize(
    "factory, args",
    [(make_euclidean, (0,)), (make_spike, (0,)), (make_book, (0,)), (make_book, (2, 0.0)), (make_book, (2, -1.0))],
)
def test_invalid_parameters(factory, args):
    with pytest.raises(InputError):
        factory(*args)


def test_space_descriptor_roundtrip():
    for sp in (make_euclidean(3), make_spike(7), make_book(4, 2.0), make_halfplane()):
        assert space_from_dict(sp.to_dict()) == sp
    with pytest.raises(InputError):
        space_from_dict({"kind": "torus"})
    with pytest.raises(InputError):
        space_from_dict([1, 2])


def test_point_validation():
    with pytest.raises(InputError):
        make_euclidean(2).point(1.0)
    with pytest.raises(InputError):
        make_spike(3).point(4, 1.0)
    with pytest.raises(InputError):
        make_book(2).point(1, 0.8, 0.8)
    with pytest.raises(InputError):
        make_halfplane().point(0.0, 0.0)
    with pytest.raises(InputError):
        make_halfplane().point(0.0, float("inf"))


def test_gluing_identifications():
    sp = make_spike(5)
    assert sp.point(3, 0.0) == sp.point(1, 0.0) == sp.origin
    bk = make_book(5)
    assert bk.point(4, 0.3, 0.0) == bk.point(1, 0.3, 0.0)
    assert bk.point(4, 0.0, 0.0) == bk.A


@pytest.mark.parametrize("sp", [make_euclidean(2), make_spike(6), make_book(5, 1.5), make_halfplane()])
def test_point_json_roundtrip(sp):
    rng = random.Random(3)
    for _ in range(50):
        p = sp.sample(rng)
        assert sp.point_from_json(sp.point_to_json(p)) == p


def test_named_points_in_json():
    bk = make_book(4)
    assert bk.point_from_json("C3") == bk.C(3)
    assert bk.point_from_json("P") == bk.P
    sp = make_spike(3)
    assert sp.point_from_json("origin") == sp.origin
    with pytest.raises(InputError):
        bk.point_from_json("Q")


# -- Euclidean -----------------------------------------------------------------


def test_euclidean_examples():
    e2 = make_euclidean(2)
    assert e2.distance(e2.point(0, 0), e2.point(1, 1)) == pytest.approx(math.sqrt(2), abs=1e-15)
    e1 = make_euclidean(1)
    assert geodesic_point(Geodesic(e1.point(0), e1.point(4)), 0.25) == e1.point(1)
    e3 = make_euclidean(3)
    rng = random.Random(0)
    for _ in range(100):
        p, q, r = (e3.sample(rng) for _ in range(3))
        assert abs(check_cn_inequality(e3, p, q, r).residual) <= 1e-12


# -- spike -------------------------------------------------------------------------


def test_spike_examples():
    sp = make_spike(5)
    assert sp.distance(sp.point(1, 0.5), sp.point(1, 0.25)) == 0.25
    assert sp.distance(sp.point(2, 2), sp.point(3, 3)) == 5.0


def test_spike_endpoint_projects_to_origin():
    sp = make_spike(20)
    big_n = 4
    y = sp.point(big_n, 3.0)
    for n in range(big_n + 1, 21):
        res = project(sp, sp.origin, y, sp.point(n, n))
        assert res.point == sp.origin and res.t == 0.0


def test_spike_cross_branch_distance_is_exact_sum():
    sp = make_spike(30)
    rng = random.Random(1)
    for _ in range(1000):
        p, q = sp.sample(rng), sp.sample(rng)
        if p.coords[0] != q.coords[0]:
            assert sp.distance(p, q) == p.coords[1] + q.coords[1]
        assert sp.distance(p, q) == oracles.spike_distance(p.coords, q.coords)


# -- book ------------------------------------------------------------------------------


def test_book_examples():
    bk = make_book(5)
    assert bk.distance(bk.C(2), bk.C(3)) == 2.0
    assert oracles.book_spine_search((2, 0.0, 1.0), (3, 0.0, 1.0))[0] == pytest.approx(2.0, abs=1e-9)
    assert bk.distance(bk.A, bk.C(5)) == 1.0
    assert bk.P.coords == (1, 0.5, 0.5)
    assert bk.distance(bk.C(2), bk.B) == pytest.approx(math.sqrt(2), abs=1e-15)
    assert oracles.book_spine_search((2, 0.0, 1.0), (1, 1.0, 0.0))[0] == pytest.approx(math.sqrt(2), abs=1e-9)


@pytest.mark.parametrize("leg", [1.0, 2.5])
def test_book_distance_matches_spine_grid_search(leg):
    bk = make_book(6, leg)
    rng = random.Random(11)
    checked = 0
    while checked < 300:
        p, q = bk.sample(rng), bk.sample(rng)
        if p.coords[0] == q.coords[0]:
            continue
        want, _ = oracles.book_spine_search(p.coords, q.coords, leg)
        assert bk.distance(p, q) == pytest.approx(want, abs=1e-6)
        checked += 1


def test_book_geodesics_cross_the_spine():
    bk = make_book(6)
    rng = random.Random(5)
    for _ in range(200):
        p, q = bk.sample(rng), bk.sample(rng)
        if p.coords[0] == q.coords[0] or p.coords[2] == 0 or q.coords[2] == 0:
            continue
        _, s = oracles.book_spine_search(p.coords, q.coords)
        cross = bk.point(1, s, 0.0)
        g = Geodesic(p, q)
        t = bk.distance(p, cross) / g.length
        assert bk.distance(g.at(t), cross) <= 1e-7
        assert bk.distance(p, cross) + bk.distance(cross, q) == pytest.approx(g.length, abs=1e-9)


# -- half-plane --------------------------------------------------------------------------


def test_halfplane_examples():
    hp = make_halfplane()
    assert hp.distance(hp.point(0, 1), hp.point(0, 2)) == pytest.approx(math.log(2), abs=1e-15)
    g = Geodesic(hp.point(-1, 1), hp.point(1, 1))
    m = g.at(0.5)
    assert m.coords[0] == pytest.approx(0.0, abs=1e-12)
    assert m.coords[1] == pytest.approx(math.sqrt(2), abs=1e-12)
    for t in (0.1, 0.37, 0.8):
        x, y = g.at(t).coords
        assert math.hypot(x, y) == pytest.approx(math.sqrt(2), abs=1e-12)
        assert oracles.hp_arc_length((-1, 1), (x, y)) == pytest.approx(t * g.length, abs=1e-9)
    assert check_cn_inequality(hp, hp.point(0, 1), hp.point(-1, 1), hp.point(1, 1)).residual > 0


def test_halfplane_distance_matches_arc_length():
    hp = make_halfplane()
    rng = random.Random(2)
    for _ in range(300):
        p, q = hp.sample(rng), hp.sample(rng)
        assert hp.distance(p, q) == pytest.approx(oracles.hp_arc_length(p.coords, q.coords), abs=1e-8)


def test_halfplane_geodesic_matches_semicircle_parametrization():
    hp = make_halfplane()
    rng = random.Random(4)
    for _ in range(100):
        a, b = hp.sample(rng), hp.sample(rng)
        g = Geodesic(a, b)
        for t in (0.2, 0.5, 0.9):
            x, y = oracles.hp_path(a.coords, b.coords, [t])
            got = g.at(t).coords
            assert oracles.hp_distance(got, (float(x[0]), float(y[0]))) <= 1e-9


def test_exp_polar_distance():
    hp = make_halfplane()
    c = hp.point(0.5, 2.0)
    for k in range(8):
        p = hp.exp_polar(c, 0.7, k * math.pi / 4)
        assert hp.distance(c, p) == pytest.approx(0.7, abs=1e-12)


# -- balls ---------------------------------------------------------------------------------


def test_closed_ball_validation_and_membership():
    e2 = make_euclidean(2)
    with pytest.raises(InputError):
        ClosedBall(e2.point(0, 0), 0.0)
    ball = ClosedBall(e2.point(0, 0), 1.0)
    assert ball.contains(e2.point(0.6, 0.8))
    assert not ball.contains(e2.point(1.0, 0.1))


@pytest.mark.parametrize("sp", [make_euclidean(3), make_spike(6), make_book(5), make_halfplane()])
def test_sample_ball_stays_in_ball(sp):
    rng = random.Random(9)
    for _ in range(200):
        c = sp.sample(rng)
        r = rng.uniform(0.05, 1.5)
        assert sp.distance(c, sp.sample_ball(c, r, rng)) <= r * (1 + 1e-12)
