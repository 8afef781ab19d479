"""Points of F_q^m, the standard bilinear form and the integrality predicate."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np

from .ffield import GF, QuadClass, as_field


class NormClass(enum.Enum):
    ORIGIN = "origin"
    PPLUS = "P+"
    PZERO = "P0"
    PMINUS = "P-"


@dataclass(frozen=True)
class Point:
    """A point of F_q^m stored as a tuple of canonical element encodings."""

    field: GF
    coords: tuple[int, ...]

    def __post_init__(self):
        coords = tuple(self.field.check(c) for c in self.coords)
        if not coords:
            raise ValueError("points need at least one coordinate")
        object.__setattr__(self, "coords", coords)

    @property
    def m(self) -> int:
        return len(self.coords)

    @property
    def index(self) -> int:
        """Canonical vertex id: sum of coords[i] * q**i."""
        idx = 0
        for c in reversed(self.coords):
            idx = idx * self.field.q + c
        return idx

    @classmethod
    def from_index(cls, field: GF, m: int, index: int) -> "Point":
        coords = []
        for _ in range(m):
            index, c = divmod(index, field.q)
            coords.append(c)
        return cls(field, tuple(coords))

    @classmethod
    def zero(cls, field: GF, m: int) -> "Point":
        return cls(field, (0,) * m)

    @classmethod
    def unit(cls, field: GF, m: int, i: int = 0) -> "Point":
        return cls(field, tuple(1 if j == i else 0 for j in range(m)))

    def _same_space(self, other: "Point"):
        if self.field != other.field or self.m != other.m:
            raise ValueError("points live in different spaces")

    def __add__(self, other: "Point") -> "Point":
        self._same_space(other)
        f = self.field
        return Point(f, tuple(f.add(a, b) for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "Point") -> "Point":
        self._same_space(other)
        f = self.field
        return Point(f, tuple(f.sub(a, b) for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "Point":
        return Point(self.field, tuple(self.field.neg(a) for a in self.coords))

    def scale(self, c: int) -> "Point":
        return Point(self.field, tuple(self.field.mul(c, a) for a in self.coords))

    def is_zero(self) -> bool:
        return not any(self.coords)

    def __str__(self):
        return "(" + ",".join(map(str, self.coords)) + ")"


class PythTriple(NamedTuple):
    alpha: int
    beta: int
    gamma: int


def inner(u: Point, v: Point) -> int:
    u._same_space(v)
    f = u.field
    acc = 0
    for a, b in zip(u.coords, v.coords):
        acc = f.add(acc, f.mul(a, b))
    return acc


def norm(u: Point) -> int:
    return inner(u, u)


def sq_dist(u: Point, v: Point) -> int:
    d = u - v
    return inner(d, d)


def is_integral(u: Point, v: Point) -> bool:
    """The predicate Delta: squared distance is 0 or a nonzero square."""
    return u.field.is_square(sq_dist(u, v))


def cross(u: Point, v: Point) -> Point:
    u._same_space(v)
    if u.m != 3:
        raise ValueError("the cross product is only defined for m = 3")
    f = u.field
    u1, u2, u3 = u.coords
    v1, v2, v3 = v.coords
    return Point(f, (
        f.sub(f.mul(u2, v3), f.mul(u3, v2)),
        f.sub(f.mul(u3, v1), f.mul(u1, v3)),
        f.sub(f.mul(u1, v2), f.mul(u2, v1)),
    ))


def norm_class(u: Point) -> NormClass:
    if u.is_zero():
        return NormClass.ORIGIN
    qc = u.field.quad_class(norm(u))
    return {QuadClass.SQUARE: NormClass.PPLUS,
            QuadClass.ZERO: NormClass.PZERO,
            QuadClass.NONSQUARE: NormClass.PMINUS}[qc]


def _require_odd(f: GF):
    if f.p == 2:
        raise ValueError("odd characteristic required")


def pyth_triples(field, gamma: int) -> list[PythTriple]:
    """All (alpha, beta) with alpha^2 + beta^2 = gamma^2, by the rational parametrisation.

    Order: for gamma != 0 the four axis solutions come first, then the
    parametrised family by increasing tau.  For gamma = 0 the isotropic
    family (tau, +-omega*tau) by increasing tau.
    """
    f = as_field(field)
    _require_odd(f)
    gamma = f.check(gamma)
    if gamma == 0:
        if f.q % 4 == 3:
            return [PythTriple(0, 0, 0)]
        w = f.omega()
        out = [PythTriple(0, 0, 0)]
        for tau in range(1, f.q):
            b = f.mul(tau, w)
            out.append(PythTriple(tau, b, 0))
            out.append(PythTriple(tau, f.neg(b), 0))
        return out
    g, ng = gamma, f.neg(gamma)
    out = [PythTriple(g, 0, g), PythTriple(ng, 0, g), PythTriple(0, g, g), PythTriple(0, ng, g)]
    one, minus_one = 1, f.neg(1)
    for tau in range(1, f.q):
        t2 = f.square(tau)
        if t2 in (one, minus_one):
            continue
        den = f.inv(f.add(t2, 1))
        alpha = f.mul(f.mul(f.sub(t2, 1), den), g)
        beta = f.mul(f.mul(f.add(tau, tau), den), g)
        out.append(PythTriple(alpha, beta, g))
    return out


def pyth_triples_brute(field, gamma: int) -> set[PythTriple]:
    f = as_field(field)
    target = f.square(gamma)
    sq = f.square_table
    return {PythTriple(a, b, gamma) for a in range(f.q) for b in range(f.q)
            if f.add(int(sq[a]), int(sq[b])) == target}


def count_circle(field, gamma: int) -> int:
    """|{(a, b): a^2 + b^2 = gamma}| from the residue of q mod 4."""
    f = as_field(field)
    _require_odd(f)
    q = f.q
    if f.check(gamma) == 0:
        return 2 * q - 1 if q % 4 == 1 else 1
    return q - 1 if q % 4 == 1 else q + 1


def count_circle_brute(field, gamma: int) -> int:
    f = as_field(field)
    sq = f.square_table
    sums = f.add_arr(sq[:, None], sq[None, :])
    return int(np.count_nonzero(sums == gamma))


# -- vectorised views of the whole space -------------------------------------

def all_coords(field: GF, m: int) -> np.ndarray:
    """(q**m, m) array of coordinates in canonical index order."""
    idx = np.arange(field.q**m, dtype=np.int64)
    return np.stack([(idx // field.q**i) % field.q for i in range(m)], axis=1)


def index_of(field: GF, coords: np.ndarray) -> np.ndarray:
    coords = np.asarray(coords, dtype=np.int64)
    weights = np.array([field.q**i for i in range(coords.shape[-1])], dtype=np.int64)
    return coords @ weights


def norm_table(field: GF, m: int) -> np.ndarray:
    """norms[idx] = <u, u> for every point u of F_q^m."""
    sq = field.square_table
    norms = sq.copy()
    for _ in range(1, m):
        norms = field.add_arr(sq[:, None], norms[None, :]).ravel()
    return norms


def norm_arr(field: GF, coords: np.ndarray) -> np.ndarray:
    coords = np.asarray(coords, dtype=np.int64)
    sq = field.square_table[coords]
    acc = sq[..., 0]
    for i in range(1, coords.shape[-1]):
        acc = field.add_arr(acc, sq[..., i])
    return acc


def parse_point(field: GF, text: str) -> Point:
    body = text.strip().strip("()")
    return Point(field, tuple(int(x) for x in body.split(",")))


def point_sets_equal(a: Iterable[Point], b: Iterable[Point]) -> bool:
    return {p.coords for p in a} == {p.coords for p in b}


# -- pairwise checks over a whole point set ----------------------------------

def _as_array(points) -> tuple[GF, np.ndarray]:
    points = list(points)
    if not points:
        raise ValueError("empty point set")
    f, m = points[0].field, points[0].m
    for p in points:
        if p.field != f or p.m != m:
            raise ValueError("points live in different spaces")
    return f, np.array([p.coords for p in points], dtype=np.int64).reshape(len(points), m)


def pairwise_sq_dist(points) -> np.ndarray:
    """(n, n) matrix of squared distances."""
    f, arr = _as_array(points)
    diff = f.sub_arr(arr[:, None, :], arr[None, :, :])
    return norm_arr(f, diff)


def first_violation(points, allowed, chunk: int = 256) -> tuple[int, int] | None:
    """First pair (i, j), i < j, in row-major order whose squared distance fails ``allowed``.

    ``allowed`` maps an int8 array of quadratic classes to a boolean array.
    """
    points = list(points)
    if len(points) < 2:
        return None
    f, arr = _as_array(points)
    n = len(arr)
    cols = np.arange(n)
    for start in range(0, n, chunk):
        rows = arr[start:start + chunk]
        d2 = norm_arr(f, f.sub_arr(rows[:, None, :], arr[None, :, :]))
        bad = ~allowed(f.chi_table[d2])
        bad &= cols[None, :] > (start + np.arange(len(rows)))[:, None]
        if bad.any():
            i, j = np.argwhere(bad)[0]
            return int(start + i), int(j)
    return None


def integral_violation(points) -> tuple[int, int] | None:
    return first_violation(points, lambda chi: chi >= 0)


def has_duplicates(points) -> bool:
    points = list(points)
    return len({p.coords for p in points}) != len(points)


# -- point-set files ----------------------------------------------------------

def format_point_set(points, field: GF | None = None, m: int | None = None) -> str:
    """Header ``q=<descriptor> m=<dim>`` followed by one point per line."""
    points = list(points)
    if points:
        field, m = points[0].field, points[0].m
    if field is None or m is None:
        raise ValueError("an empty point set needs an explicit field and dimension")
    lines = [f"q={field.descriptor} m={m}"] + [str(p) for p in points]
    return "\n".join(lines) + "\n"


def parse_point_set(text: str) -> tuple[GF, int, list[Point]]:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise ValueError("empty point-set file")
    header = dict(tok.split("=", 1) for tok in lines[0].split())
    if set(header) != {"q", "m"}:
        raise ValueError(f"bad header {lines[0]!r}; expected 'q=<descriptor> m=<dim>'")
    f, m = as_field(header["q"]), int(header["m"])
    pts = [parse_point(f, ln) for ln in lines[1:]]
    for p in pts:
        if p.m != m:
            raise ValueError(f"point {p} does not have {m} coordinates")
    return f, m, pts


def write_point_set(path, points, field: GF | None = None, m: int | None = None):
    with open(path, "w") as fh:
        fh.write(format_point_set(points, field, m))


def read_point_set(path) -> tuple[GF, int, list[Point]]:
    with open(path) as fh:
        return parse_point_set(fh.read())
