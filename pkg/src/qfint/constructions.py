"""Explicit integral point sets giving lower bounds for I(m,q).

Every constructor verifies its output before returning it.  Two-square
representations are found by scanning alpha in canonical order and taking
the first hit.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field as dc_field
from itertools import combinations

from .ffield import GF, as_field, prime_power
from .geometry import Point, all_coords, first_violation, has_duplicates, integral_violation, pairwise_sq_dist

log = logging.getLogger(__name__)

NAMES = ("line", "hyperplane_q1mod4", "circle_plus_line", "isotropic_plane_4d", "product", "nonintegral_plane")


class ConstructionError(ValueError):
    pass


@dataclass(frozen=True)
class Construction:
    name: str
    params: dict = dc_field(hash=False, compare=False)
    points: tuple[Point, ...] = ()
    claimed: int = 0

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    @property
    def field(self) -> GF:
        return self.points[0].field

    @property
    def m(self) -> int:
        return self.points[0].m


def _zero_or_nonsquare(chi):
    return chi <= 0


def _all_zero(points) -> bool:
    return len(points) < 2 or not pairwise_sq_dist(points).any()


def _finish(name, params, points, claimed, integral=True) -> Construction:
    points = tuple(points)
    if len(points) != claimed or has_duplicates(points):
        raise ConstructionError(f"{name}: expected {claimed} distinct points, got {len(set(points))}")
    check = integral_violation if integral else (lambda p: first_violation(p, _zero_or_nonsquare))
    bad = check(points)
    if bad is not None:
        i, j = bad
        raise ConstructionError(f"{name}: pair {points[i]}, {points[j]} fails verification")
    return Construction(name, dict(params), points, claimed)


def _odd(f: GF):
    if f.p == 2:
        raise ConstructionError("odd q required")


def _need_mod4(f: GF, r: int, name: str):
    _odd(f)
    if f.q % 4 != r:
        raise ConstructionError(f"{name} needs q = {r} mod 4, got q = {f.q}")


def two_square_rep(f: GF, c: int) -> tuple[int, int]:
    """First (alpha, beta) with alpha^2 + beta^2 = c, scanning alpha in canonical order."""
    for a in range(f.q):
        b = f.sqrt(f.sub(c, f.square(a)))
        if b is not None:
            return a, b
    raise ConstructionError(f"{c} is not a sum of two squares")  # impossible for odd q


def line(m: int, q) -> Construction:
    f = as_field(q)
    if m < 1:
        raise ConstructionError("m >= 1 required")
    pts = [Point(f, (a,) + (0,) * (m - 1)) for a in range(f.q)]
    return _finish("line", {"m": m, "q": f.descriptor}, pts, f.q)


def hyperplane_q1mod4(q) -> Construction:
    f = as_field(q)
    _need_mod4(f, 1, "hyperplane_q1mod4")
    w = f.omega()
    pts = [Point(f, (a, f.mul(w, a), b)) for a in range(f.q) for b in range(f.q)]
    return _finish("hyperplane_q1mod4", {"q": f.descriptor, "omega": w}, pts, f.q**2)


def _unit_circle_squares(f: GF) -> list[tuple[int, int]]:
    """The squares inside the norm-one group of F_q[x]/(x^2+1), as coordinate pairs."""
    q = f.q
    if f.r == 1:
        ext = GF(q, 2, (1, 0, 1))
        circle = [z for z in range(1, q * q) if ext.pow(z, q + 1) == 1]
        squares = sorted({ext.square(z) for z in circle})
        return [(z % q, z // q) for z in squares]
    # prime powers: multiply pairs (a, b) ~ a + b x directly
    def mul(u, v):
        (a, b), (c, d) = u, v
        return f.sub(f.mul(a, c), f.mul(b, d)), f.add(f.mul(a, d), f.mul(b, c))
    circle = [(a, b) for a in range(q) for b in range(q) if f.add(f.square(a), f.square(b)) == 1]
    return sorted({mul(z, z) for z in circle}, key=lambda t: (t[1], t[0]))


def _max_integral_subset(f: GF, pairs) -> list[tuple[int, int]]:  # pragma: no cover - fallback
    pts = [Point(f, (a, b)) for a, b in pairs]
    for k in range(len(pts), 0, -1):
        for sub in combinations(range(len(pts)), k):
            if integral_violation([pts[i] for i in sub]) is None:
                return [pairs[i] for i in sub]
    return []


def circle_plus_line(q) -> Construction:
    f = as_field(q)
    _need_mod4(f, 3, "circle_plus_line")
    disc = _unit_circle_squares(f)
    if len(disc) != (f.q + 1) // 2:
        raise ConstructionError("squares of the unit circle have the wrong size")
    bad = integral_violation([Point(f, z) for z in disc])
    if bad is not None:  # pragma: no cover - never observed, kept as a guard
        log.warning("square sub-circle for q=%s is not integral; using exhaustive fallback", f.q)
        disc = _max_integral_subset(f, disc)
    taus = [t for t in range(f.q) if f.is_square(f.add(f.square(t), 1))]
    pts = [Point(f, (a, b, 0)) for a, b in disc] + [Point(f, (0, 0, t)) for t in taus]
    return _finish("circle_plus_line", {"q": f.descriptor}, pts, f.q)


def isotropic_plane_4d(q) -> Construction:
    f = as_field(q)
    _odd(f)
    a, b = two_square_rep(f, f.neg(2 % f.p))
    one, neg = 1, f.neg(1)
    u = Point(f, (a, b, one, one))
    v = Point(f, (f.neg(b), a, neg, one))
    pts = [u.scale(t) + v.scale(n) for t in range(f.q) for n in range(f.q)]
    c = _finish("isotropic_plane_4d", {"q": f.descriptor, "alpha": a, "beta": b}, pts, f.q**2)
    if not _all_zero(c.points):
        raise ConstructionError("isotropic plane has a nonzero squared distance")
    return c


def isotropic_pairs(q) -> Construction:
    """{(alpha, omega * alpha)} in F_q^2, all squared distances zero (q = 1 mod 4)."""
    f = as_field(q)
    _need_mod4(f, 1, "isotropic_pairs")
    w = f.omega()
    pts = [Point(f, (a, f.mul(w, a))) for a in range(f.q)]
    c = _finish("isotropic_pairs", {"q": f.descriptor}, pts, f.q)
    if not _all_zero(c.points):
        raise ConstructionError("isotropic pairs have a nonzero squared distance")
    return c


def product(p1, p2) -> Construction:
    """Concatenate coordinates; p2 must have every squared distance equal to zero."""
    p1, p2 = list(p1), list(p2)
    if p1[0].field != p2[0].field:
        raise ConstructionError("factors live over different fields")
    if integral_violation(p1) is not None:
        raise ConstructionError("first factor is not integral")
    if not _all_zero(p2):
        raise ConstructionError("second factor has a nonzero squared distance")
    f = p1[0].field
    pts = [Point(f, a.coords + b.coords) for a in p1 for b in p2]
    params = {"q": f.descriptor, "m1": p1[0].m, "m2": p2[0].m}
    return _finish("product", params, pts, len(p1) * len(p2))


def nonintegral_plane(q) -> Construction:
    f = as_field(q)
    _need_mod4(f, 3, "nonintegral_plane")
    a, b = two_square_rep(f, f.neg(1))
    u = Point(f, (a, b, 1))
    v = Point(f, (f.neg(b), a, 0))
    pts = [u.scale(t) + v.scale(n) for t in range(f.q) for n in range(f.q)]
    return _finish("nonintegral_plane", {"q": f.descriptor, "alpha": a, "beta": b}, pts, f.q**2,
                   integral=False)


def lower_bound_value(m: int, q: int) -> int:
    if q % 2 == 0:
        return q**m
    if q % 4 == 1:
        return q ** (-(-m // 2))
    return q ** (2 * (m // 4) + (1 if m % 4 else 0))


def lower_bound(m: int, q) -> tuple[int, Construction]:
    """Best product lower bound and its witness."""
    if m < 1:
        raise ConstructionError("m >= 1 required")
    if isinstance(q, int) and q % 2 == 0:
        # every squared distance is a square in characteristic 2
        p, r = prime_power(q)
        f = GF(p, r, allow_even=True)
        pts = tuple(Point(f, tuple(int(x) for x in row)) for row in all_coords(f, m))
        return f.q**m, Construction("space", {"m": m, "q": f.descriptor}, pts, f.q**m)
    f = as_field(q)
    if f.q % 4 == 1:
        block, width, count = isotropic_pairs(f), 2, m // 2
    else:
        block, width, count = isotropic_plane_4d(f), 4, m // 4
    rest = m - width * count
    zero_part = None
    for _ in range(count):
        zero_part = block.points if zero_part is None else product(zero_part, block).points
    if rest:
        base = line(rest, f)
        result = base if zero_part is None else product(base, zero_part)
    else:
        result = Construction(block.name if count == 1 else "product", {}, zero_part, len(zero_part))
    expected = lower_bound_value(m, f.q)
    if len(result) != expected:
        raise ConstructionError(f"lower bound witness has {len(result)} points, expected {expected}")
    return expected, result


def build(name: str, q, m: int | None = None) -> Construction:
    """CLI entry: construct by name.  ``product`` builds the lower-bound witness for m."""
    if name == "line":
        return line(m or 3, q)
    if name == "hyperplane_q1mod4":
        return hyperplane_q1mod4(q)
    if name == "circle_plus_line":
        return circle_plus_line(q)
    if name == "isotropic_plane_4d":
        return isotropic_plane_4d(q)
    if name == "nonintegral_plane":
        return nonintegral_plane(q)
    if name == "product":
        return lower_bound(m or 3, q)[1]
    raise ConstructionError(f"unknown construction {name!r}; choose from {', '.join(NAMES)}")
