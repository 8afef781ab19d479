import itertools

import pytest

from qfint import constructions as C
from qfint.ffield import as_field, prime_power
from qfint.geometry import Point, sq_dist
from qfint.known import example_q3, example_q7

import oracles


def _oracle_integral(points):
    q = points[0].field.q
    O = oracles.PolyField(*prime_power(q), modulus=points[0].field.modulus)
    sq = O.squares()
    return all(oracles.integral(O, a.coords, b.coords, sq) for a, b in itertools.combinations(points, 2))


def _oracle_distances(points):
    f = points[0].field
    O = oracles.PolyField(f.p, f.r, modulus=f.modulus)
    return {oracles.norm(O, [O.sub(x, y) for x, y in zip(a.coords, b.coords)])
            for a, b in itertools.combinations(points, 2)}


def test_line():
    c = C.line(3, 5)
    assert len(c) == 5 and _oracle_integral(c.points)
    assert {p.coords for p in C.line(1, 3)} == {(0,), (1,), (2,)}
    assert len(C.line(2, 7)) == 7


@pytest.mark.parametrize("q", [5, 9, 13, 17, 25])
def test_hyperplane(q):
    c = C.hyperplane_q1mod4(q)
    assert len(c) == q * q and c.m == 3
    if q <= 13:
        assert _oracle_integral(c.points)


def test_hyperplane_rejects_q3mod4():
    with pytest.raises(C.ConstructionError):
        C.hyperplane_q1mod4(7)


@pytest.mark.parametrize("q", [3, 7, 11, 19, 23, 27])
def test_circle_plus_line(q):
    c = C.circle_plus_line(q)
    assert len(c) == q
    assert _oracle_integral(c.points)
    assert sum(1 for p in c if p.coords[:2] != (0, 0)) == (q + 1) // 2


@pytest.mark.parametrize("q", [3, 5, 7, 9, 11])
def test_isotropic_plane(q):
    c = C.isotropic_plane_4d(q)
    assert len(c) == q * q and c.m == 4
    assert _oracle_distances(c.points) == {0}


def test_isotropic_plane_q3_alternative_root():
    # 1^2 + 0^2 = 1 = -2 in F_3 also spans a totally isotropic plane
    f = as_field(3)
    u, v = Point(f, (1, 0, 1, 1)), Point(f, (0, 1, 2, 1))
    pts = [u.scale(t) + v.scale(n) for t in range(3) for n in range(3)]
    assert _oracle_distances(pts) == {0}


@pytest.mark.parametrize("q", [3, 7, 11])
def test_nonintegral_plane(q):
    c = C.nonintegral_plane(q)
    assert len(c) == q * q
    f = c.field
    for a, b in itertools.combinations(c.points, 2):
        assert not f.is_square(sq_dist(a, b)) or sq_dist(a, b) == 0
    assert any(sq_dist(a, b) for a, b in itertools.combinations(c.points[:q + 1], 2))


def test_product_examples():
    iso = C.isotropic_pairs(5)
    p = C.product(C.line(1, 5), iso)
    assert len(p) == 25 and p.m == 3
    big = C.product(C.line(1, 7), C.isotropic_plane_4d(7))
    assert len(big) == 343 and big.m == 5
    with pytest.raises(C.ConstructionError):
        C.product(C.line(1, 5), C.line(2, 5))


@pytest.mark.parametrize("m,q", [(1, 3), (3, 3), (4, 3), (5, 3), (6, 3), (3, 5), (4, 5), (5, 5), (4, 7), (9, 3)])
def test_lower_bound(m, q):
    value, c = C.lower_bound(m, q)
    assert value == len(c) == C.lower_bound_value(m, q)
    if len(c) <= 400:
        assert _oracle_integral(c.points)


def test_lower_bound_even():
    value, c = C.lower_bound(2, 4)
    assert value == 16 and len(c) == 16


def test_build_dispatch():
    for name in C.NAMES:
        q = 5 if name in ("hyperplane_q1mod4",) else 7 if name != "isotropic_plane_4d" else 3
        c = C.build(name, q, 4 if name == "product" else None)
        assert len(c) > 0
    with pytest.raises(C.ConstructionError):
        C.build("nope", 3)


def test_published_examples_q3_q7():
    assert _oracle_integral(example_q3())
    assert _oracle_integral(example_q7())
    assert len(example_q7()) == 8
