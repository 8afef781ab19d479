"""Orthogonal groups over F_q, automorphisms preserving integral distances, orbit witnesses.

Matrices are small and exact, so they are kept as tuples of canonical
integers.  Brute-force enumeration over all q^(m*m) matrices is vectorised
with numpy.  Every witness matrix returned by :func:`transitivity_witness`
is re-checked before it is handed out.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import combinations
from typing import Iterator

import numpy as np

from .counting import BudgetExceeded
from .ffield import GF, QuadClass, as_field
from .geometry import NormClass, Point, all_coords, cross, index_of, inner, norm, norm_arr, norm_class, pyth_triples

ENUM_BUDGET = 2 * 10**6


class WitnessError(AssertionError):
    """A constructed witness failed its own verification (a defect, never expected)."""


@dataclass(frozen=True)
class Matrix:
    field: GF
    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(self.field.check(x) for x in row) for row in self.rows)
        if not rows or any(len(r) != len(rows) for r in rows):
            raise ValueError("matrix must be square")
        object.__setattr__(self, "rows", rows)

    @property
    def m(self) -> int:
        return len(self.rows)

    @classmethod
    def identity(cls, field: GF, m: int) -> "Matrix":
        return cls(field, tuple(tuple(int(i == j) for j in range(m)) for i in range(m)))

    @classmethod
    def from_columns(cls, field: GF, cols) -> "Matrix":
        cols = [c.coords if isinstance(c, Point) else tuple(c) for c in cols]
        return cls(field, tuple(zip(*cols)))

    @classmethod
    def scalar(cls, field: GF, m: int, c: int) -> "Matrix":
        return cls(field, tuple(tuple(c if i == j else 0 for j in range(m)) for i in range(m)))

    @classmethod
    def parse(cls, field: GF, text: str) -> "Matrix":
        return cls(field, tuple(tuple(int(x) for x in row.split(",")) for row in text.strip().split(";")))

    @property
    def T(self) -> "Matrix":
        return Matrix(self.field, tuple(zip(*self.rows)))

    def column(self, j: int) -> Point:
        return Point(self.field, tuple(r[j] for r in self.rows))

    def __matmul__(self, other):
        f = self.field
        if isinstance(other, Point):
            if other.m != self.m or other.field != f:
                raise ValueError("dimension or field mismatch")
            return Point(f, tuple(_dot(f, row, other.coords) for row in self.rows))
        if other.m != self.m or other.field != f:
            raise ValueError("dimension or field mismatch")
        cols = list(zip(*other.rows))
        return Matrix(f, tuple(tuple(_dot(f, row, col) for col in cols) for row in self.rows))

    def scale(self, c: int) -> "Matrix":
        f = self.field
        return Matrix(f, tuple(tuple(f.mul(c, x) for x in row) for row in self.rows))

    def is_identity(self) -> bool:
        return self == Matrix.identity(self.field, self.m)

    def scalar_value(self) -> int | None:
        """c if the matrix equals c * E, else None."""
        c = self.rows[0][0]
        return c if self == Matrix.scalar(self.field, self.m, c) else None

    def rank(self) -> int:
        f = self.field
        a = [list(r) for r in self.rows]
        rank, n = 0, self.m
        for col in range(n):
            piv = next((i for i in range(rank, n) if a[i][col]), None)
            if piv is None:
                continue
            a[rank], a[piv] = a[piv], a[rank]
            inv = f.inv(a[rank][col])
            a[rank] = [f.mul(inv, x) for x in a[rank]]
            for i in range(n):
                if i != rank and a[i][col]:
                    c = a[i][col]
                    a[i] = [f.sub(x, f.mul(c, y)) for x, y in zip(a[i], a[rank])]
            rank += 1
        return rank

    def is_invertible(self) -> bool:
        return self.rank() == self.m

    def embed(self, m: int, offset: int) -> "Matrix":
        """Block-diagonal extension by identity, placing self at rows/cols offset.."""
        rows = [[int(i == j) for j in range(m)] for i in range(m)]
        for i, row in enumerate(self.rows):
            for j, x in enumerate(row):
                rows[offset + i][offset + j] = x
        return Matrix(self.field, tuple(map(tuple, rows)))

    def __str__(self):
        return ";".join(",".join(map(str, r)) for r in self.rows)


def _dot(f: GF, a, b) -> int:
    acc = 0
    for x, y in zip(a, b):
        if x and y:
            acc = f.add(acc, f.mul(x, y))
    return acc


def permutation_matrix(field: GF, perm) -> Matrix:
    """Matrix sending e_j to e_perm[j]."""
    m = len(perm)
    rows = [[0] * m for _ in range(m)]
    for j, i in enumerate(perm):
        rows[i][j] = 1
    return Matrix(field, tuple(map(tuple, rows)))


def is_orthogonal(a: Matrix) -> bool:
    return (a.T @ a).is_identity() and (a @ a.T).is_identity()


def similitude_multiplier(a: Matrix) -> int | None:
    """lambda with A^T A = A A^T = lambda E, lambda != 0; None otherwise."""
    g, h = a.T @ a, a @ a.T
    lam = g.scalar_value()
    if lam is None or lam == 0 or h != g:
        return None
    return lam


def is_oz(a: Matrix) -> bool:
    """Membership in F_q^* . O(m,q): the multiplier must be a nonzero square.

    For even m a similitude can have a non-square multiplier; such maps
    swap P+ and P- and are not products of a scalar and an orthogonal
    matrix, so they are excluded here.
    """
    lam = similitude_multiplier(a)
    return lam is not None and a.field.quad_class(lam) is QuadClass.SQUARE


# -- group orders -----------------------------------------------------------

def order_GL(m: int, q: int) -> int:
    out = 1
    for i in range(m):
        out *= q**m - q**i
    return out


def order_O(m: int, q: int) -> int:
    if m < 1 or q % 2 == 0:
        raise ValueError("m >= 1 and odd q required")
    n, odd = divmod(m, 2)
    if odd:
        out = 2 * q**n
        for i in range(n):
            out *= q ** (2 * n) - q ** (2 * i)
        return out
    if q % 4 == 1:
        out = 2 * (q**n - 1)
    else:
        out = 2 * (q**n + (-1) ** (n + 1))
    for i in range(1, n):
        out *= q ** (2 * n) - q ** (2 * i)
    return out


def order_OZ(m: int, q: int) -> int:
    if m < 2:
        raise ValueError("order_OZ needs m >= 2")
    return (q - 1) // 2 * order_O(m, q)


@dataclass(frozen=True)
class GroupOrderRecord:
    m: int
    q: int
    order_O: int
    order_OZ: int


def group_orders(m: int, q: int) -> GroupOrderRecord:
    return GroupOrderRecord(m, q, order_O(m, q), order_OZ(m, q))


# -- brute-force enumeration --------------------------------------------------

def _all_matrices(f: GF, m: int, budget: int) -> np.ndarray:
    n = f.q ** (m * m)
    if n > budget:
        raise BudgetExceeded(f"q^(m^2) = {n} matrices exceed the budget {budget}")
    return all_coords(f, m * m).reshape(n, m, m)


def _matmul_arr(f: GF, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Batched product over the field: a[..., i, k] * b[..., k, j]."""
    m = a.shape[-1]
    out = None
    for k in range(m):
        term = f.mul_arr(a[..., :, k, None], b[..., None, k, :])
        out = term if out is None else f.add_arr(out, term)
    return out


def orthogonal_matrices_brute(m: int, q, budget: int = ENUM_BUDGET) -> list[Matrix]:
    f = as_field(q)
    mats = _all_matrices(f, m, budget)
    gram = _matmul_arr(f, np.swapaxes(mats, 1, 2), mats)
    eye = np.eye(m, dtype=np.int64)
    ok = np.all(gram == eye, axis=(1, 2))
    return [Matrix(f, tuple(map(tuple, a.tolist()))) for a in mats[ok]]


def enumerate_O_brute(m: int, q, budget: int = ENUM_BUDGET) -> int:
    f = as_field(q)
    mats = _all_matrices(f, m, budget)
    gram = _matmul_arr(f, np.swapaxes(mats, 1, 2), mats)
    return int(np.count_nonzero(np.all(gram == np.eye(m, dtype=np.int64), axis=(1, 2))))


def _delta_preserving_mask(f: GF, m: int, mats: np.ndarray) -> np.ndarray:
    pts = all_coords(f, m)                      # (P, m)
    ok_src = f.chi_table[norm_arr(f, pts)] >= 0  # (P,)
    mask = np.ones(len(mats), dtype=bool)
    chunk = max(1, 2_000_000 // (len(pts) * m * m))
    for start in range(0, len(mats), chunk):
        a = mats[start:start + chunk]           # (N, m, m)
        img = None
        for j in range(m):
            term = f.mul_arr(a[:, None, :, j], pts[None, :, j, None])  # (N, P, m)
            img = term if img is None else f.add_arr(img, term)
        ok_img = f.chi_table[norm_arr(f, img)] >= 0
        injective = np.all(img[:, 1:, :].any(axis=2), axis=1)
        mask[start:start + chunk] = injective & np.all(ok_img == ok_src[None, :], axis=1)
    return mask


def aut_linear_matrices(m: int, q, budget: int = ENUM_BUDGET) -> list[Matrix]:
    """All invertible matrices preserving Delta, by exhaustion."""
    f = as_field(q)
    mats = _all_matrices(f, m, budget)
    keep = mats[_delta_preserving_mask(f, m, mats)]
    return [Matrix(f, tuple(map(tuple, a.tolist()))) for a in keep]


def enumerate_aut_linear(m: int, q, budget: int = ENUM_BUDGET) -> int:
    f = as_field(q)
    mats = _all_matrices(f, m, budget)
    return int(np.count_nonzero(_delta_preserving_mask(f, m, mats)))


# -- affine semilinear maps ---------------------------------------------------

@dataclass(frozen=True)
class AffineMap:
    """u -> A . frob_i(u) + t."""

    matrix: Matrix
    translation: Point | None = None
    frobenius: int = 0

    def __post_init__(self):
        f, m = self.matrix.field, self.matrix.m
        if not self.matrix.is_invertible():
            raise ValueError("affine map needs an invertible matrix")
        if not 0 <= self.frobenius < f.r:
            raise ValueError(f"Frobenius index must lie in 0..{f.r - 1}")
        if self.translation is None:
            object.__setattr__(self, "translation", Point.zero(f, m))

    def linear_part(self, u: Point) -> Point:
        f = u.field
        fu = Point(f, tuple(f.frobenius(c, self.frobenius) for c in u.coords))
        return self.matrix @ fu

    def __call__(self, u: Point) -> Point:
        return self.linear_part(u) + self.translation


def verify_delta_map(fmap: AffineMap, budget: int = 10**6) -> bool:
    """True iff the map preserves Delta on all pairs.

    f(u) - f(v) = A frob(u - v), so it is enough to compare the class of
    every difference vector with the class of its image.
    """
    a = fmap.matrix
    f, m = a.field, a.m
    if f.q**m > budget:
        raise BudgetExceeded("space too large to verify exhaustively")
    pts = all_coords(f, m)
    src = f.chi_table[norm_arr(f, pts)] >= 0
    frob = np.array([f.frobenius(x, fmap.frobenius) for x in range(f.q)], dtype=np.int64)[pts]
    mat = np.array(a.rows, dtype=np.int64)
    img = None
    for j in range(m):
        term = f.mul_arr(mat[None, :, j], frob[:, j, None])
        img = term if img is None else f.add_arr(img, term)
    dst = f.chi_table[norm_arr(f, img)] >= 0
    return bool(np.all(src == dst))


# -- constructive transitivity ------------------------------------------------

def _rotation(f: GF, a: int, b: int) -> Matrix:
    return Matrix(f, ((a, b), (f.neg(b), a)))


def _witness_2d(u: Point, v: Point) -> Matrix:
    f = u.field
    tau = norm(u)
    (u1, u2), (v1, v2) = u.coords, v.coords
    if tau:
        inv = f.inv(tau)
        alpha = f.mul(f.add(f.mul(u1, v1), f.mul(u2, v2)), inv)
        beta = f.mul(f.sub(f.mul(u2, v1), f.mul(u1, v2)), inv)
        return _rotation(f, alpha, beta)
    # isotropic: search the rotations (gamma, delta) with gamma^2 + delta^2 = 1,
    # then the same rotations composed with diag(-1, 1)
    flip = Matrix(f, ((f.neg(1), 0), (0, 1)))
    rotations = [_rotation(f, t.alpha, t.beta) for t in pyth_triples(f, 1)]
    for cand in rotations + [flip @ r for r in rotations]:
        if cand @ u == v:
            return cand
    raise WitnessError(f"no element of O(2,{f.q}) maps {u} to {v}")


def _two_squares(f: GF, mu: int) -> tuple[int, int]:
    """First (alpha, beta) in canonical order with alpha^2 + beta^2 = mu."""
    for a in range(f.q):
        b = f.sqrt(f.sub(mu, f.square(a)))
        if b is not None:
            return a, b
    raise WitnessError(f"{mu} is not a sum of two squares in F_{f.q}")


def _weighted_two_squares(f: GF, c1: int, c2: int, target: int) -> tuple[int, int]:
    """alpha, beta with c1 alpha^2 + c2 beta^2 = target (c1, c2 nonzero)."""
    inv2 = f.inv(c2)
    for a in range(f.q):
        b = f.sqrt(f.mul(f.sub(target, f.mul(c1, f.square(a))), inv2))
        if b is not None:
            return a, b
    raise WitnessError("no representation found")


def _orthonormal_frame(u: Point) -> Matrix:
    """Orthogonal matrix whose first column is u (requires <u, u> = 1, m = 3)."""
    f = u.field
    k = next(i for i, c in enumerate(u.coords) if c)
    inv = f.inv(u.coords[k])
    basis = []
    for j in range(3):
        if j == k:
            continue
        b = [0, 0, 0]
        b[j] = 1
        b[k] = f.neg(f.mul(u.coords[j], inv))
        basis.append(Point(f, tuple(b)))
    b1, b2 = basis
    vhat = next(x for x in (b1, b2, b1 + b2) if norm(x))
    what = cross(u, vhat)
    a, b = _weighted_two_squares(f, norm(vhat), norm(what), 1)
    v = vhat.scale(a) + what.scale(b)
    w = cross(u, v)
    return Matrix.from_columns(f, [u, v, w])


def _reflection(w: Point) -> Matrix:
    """x -> x - 2 <x, w>/<w, w> w; needs <w, w> != 0."""
    f, m = w.field, w.m
    c = f.mul(2 % f.p, f.inv(norm(w)))
    rows = []
    for i in range(m):
        row = []
        for j in range(m):
            val = f.mul(c, f.mul(w.coords[i], w.coords[j]))
            row.append(f.sub(int(i == j), val))
        rows.append(tuple(row))
    return Matrix(f, tuple(rows))


def _witness_reflections(u: Point, v: Point) -> Matrix:
    """Product of at most two reflections mapping u to v (same norm)."""
    f, m = u.field, u.m
    d = u - v
    if norm(d):
        return _reflection(d)
    tau = norm(u)
    if tau:
        # <u+v, u+v> = 4 tau - <u-v, u-v> = 4 tau
        return _reflection(v) @ _reflection(u + v)
    # u, v isotropic with <u, v> = 0: route through an isotropic w
    # with <u, w> != 0 and <v, w> != 0
    for idx in range(1, f.q**m):
        x = Point.from_index(f, m, idx)
        if inner(u, x) and inner(v, x):
            break
    else:  # pragma: no cover
        raise WitnessError("no vector outside both hyperplanes")
    lam = f.neg(f.div(norm(x), f.mul(2 % f.p, inner(u, x))))
    w = x + u.scale(lam)
    return _reflection(w - v) @ _reflection(u - w)


def _pair_rotation(u: Point) -> Matrix | None:
    """Orthogonal B with (B u)_3 = 0 through a rotation on a coordinate pair, if possible."""
    f = u.field
    for i, j in ((1, 2), (0, 2), (0, 1)):
        s = f.add(f.square(u.coords[i]), f.square(u.coords[j]))
        nu = f.sqrt(s) if s else None
        if not nu:
            continue
        rot = _witness_2d(Point(f, (u.coords[i], u.coords[j])), Point(f, (nu, 0)))
        rows = [[int(a == b) for b in range(3)] for a in range(3)]
        for a, ia in enumerate((i, j)):
            for b, ib in enumerate((i, j)):
                rows[ia][ib] = rot.rows[a][b]
        step = Matrix(f, tuple(map(tuple, rows)))
        # coordinate j is now zero; move it to the last slot
        perm = list(range(3))
        perm[j], perm[2] = 2, j
        return permutation_matrix(f, perm) @ step
    return None


def _witness_3d(u: Point, v: Point) -> Matrix:
    f = u.field
    tau = norm(u)
    if tau and f.quad_class(tau) is QuadClass.SQUARE:
        nu_inv = f.inv(f.sqrt(tau))
        return _orthonormal_frame(v.scale(nu_inv)) @ _orthonormal_frame(u.scale(nu_inv)).T
    if tau:
        bu, bv = _pair_rotation(u), _pair_rotation(v)
        if bu is None or bv is None:
            # bounded search: one rotation in the (1, 2)-plane first
            for t in pyth_triples(f, 1):
                r = _rotation(f, t.alpha, t.beta).embed(3, 0)
                if bu is None and (b := _pair_rotation(r @ u)) is not None:
                    bu = b @ r
                if bv is None and (b := _pair_rotation(r @ v)) is not None:
                    bv = b @ r
                if bu is not None and bv is not None:
                    break
        if bu is not None and bv is not None:
            uu, vv = bu @ u, bv @ v
            inner2 = _witness_2d(Point(f, uu.coords[:2]), Point(f, vv.coords[:2]))
            return bv.T @ inner2.embed(3, 0) @ bu
    return _witness_reflections(u, v)


# orthogonal over any field of characteristic 3; sends (1,1,1,1) to (1,0,0,0)
_CHAR3_BLOCK = ((1, 1, 1, 1), (1, 1, 2, 2), (1, 2, 1, 2), (1, 2, 2, 1))


def _zero_last(u: Point) -> Matrix:
    """Orthogonal B with (B u)_m = 0, for m >= 4."""
    f, m = u.field, u.m
    zeros = [i for i, c in enumerate(u.coords) if c == 0]
    if zeros:
        perm = list(range(m))
        i = zeros[-1]
        perm[i], perm[m - 1] = m - 1, i
        return permutation_matrix(f, perm)
    sq = [f.square(c) for c in u.coords]
    triples = sorted(combinations(range(m), 3), key=lambda t: tuple(-x for x in reversed(t)))
    for t in triples:
        mu = f.add(f.add(sq[t[0]], sq[t[1]]), sq[t[2]])
        if mu == 0:
            continue
        rest = [i for i in range(m) if i not in t]
        order = rest + list(t)              # order[k] = source coordinate at slot k
        perm = [0] * m
        for slot, src in enumerate(order):
            perm[src] = slot
        p = permutation_matrix(f, perm)
        pu = p @ u
        tail = Point(f, pu.coords[m - 3:])
        a, b = _two_squares(f, mu)
        block = _witness_3d_checked(tail, Point(f, (a, b, 0)))
        return block.embed(m, m - 3) @ p
    # every triple of squares sums to zero: only possible in characteristic 3,
    # and then all coordinates agree up to sign
    if f.p != 3:
        raise WitnessError("coordinate elimination failed")
    c = u.coords[-1]
    signs = Matrix(f, tuple(tuple(f.div(c, u.coords[i]) if i == j else 0 for j in range(m)) for i in range(m)))
    block = Matrix(f, _CHAR3_BLOCK).embed(m, m - 4)
    # block maps c(1,1,1,1) to c(1,0,0,0) on the last four slots
    return block @ signs


def _witness(u: Point, v: Point) -> Matrix:
    f, m = u.field, u.m
    if u == v:
        return Matrix.identity(f, m)
    if m == 1:
        return Matrix(f, ((f.div(v.coords[0], u.coords[0]),),))
    if m == 2:
        return _witness_2d(u, v)
    if m == 3:
        return _witness_3d(u, v)
    bu, bv = _zero_last(u), _zero_last(v)
    uu, vv = bu @ u, bv @ v
    inner_w = _witness(Point(f, uu.coords[:-1]), Point(f, vv.coords[:-1]))
    return bv.T @ inner_w.embed(m, 0) @ bu


def _witness_3d_checked(u: Point, v: Point) -> Matrix:
    w = _witness(u, v)
    if not (is_orthogonal(w) and w @ u == v):
        raise WitnessError(f"bad witness for {u} -> {v}")
    return w


def transitivity_witness(u: Point, v: Point) -> Matrix:
    """An orthogonal matrix A with A u = v; u, v nonzero with equal norms."""
    u._same_space(v)
    if u.is_zero() or v.is_zero():
        raise ValueError("witnesses are only defined for nonzero vectors")
    if norm(u) != norm(v):
        raise ValueError(f"norms differ: {norm(u)} != {norm(v)}")
    w = _witness(u, v)
    if not (is_orthogonal(w) and w @ u == v):
        raise WitnessError(f"constructed matrix does not map {u} to {v} orthogonally")
    return w


def oz_witness(u: Point, v: Point) -> Matrix:
    """c * A in F_q^* . O(m,q) mapping u to v, for u, v in the same norm class."""
    cu, cv = norm_class(u), norm_class(v)
    if cu != cv or cu is NormClass.ORIGIN:
        raise ValueError("u and v must be nonzero and in the same norm class")
    f = u.field
    c = 1 if cu is NormClass.PZERO else f.sqrt(f.div(norm(v), norm(u)))
    a = transitivity_witness(u, v.scale(f.inv(c))).scale(c)
    if not (is_oz(a) and a @ u == v):
        raise WitnessError("bad OZ witness")
    return a


def orbit_partition_check(m: int, q, pairs: int | None = None, seed: int = 0,
                          budget: int = 10**6) -> bool:
    """Every norm class is a single OZ-orbit and OZ maps never change the class.

    With ``pairs=None`` the first member of each class is joined to every
    other member; otherwise ``pairs`` random same-class pairs per class.
    """
    f = as_field(q)
    if f.q**m > budget:
        raise BudgetExceeded("space too large")
    pts = all_coords(f, m)
    chi = f.chi_table[norm_arr(f, pts)]
    rng = random.Random(seed)
    for val in (1, 0, -1):
        members = np.flatnonzero(chi == val)
        members = members[members != 0]
        if members.size == 0:
            continue
        if pairs is None:
            todo = [(members[0], x) for x in members]
        else:
            todo = [(members[rng.randrange(members.size)], members[rng.randrange(members.size)])
                    for _ in range(pairs)]
        for a, b in todo:
            u = Point(f, tuple(int(x) for x in pts[a]))
            v = Point(f, tuple(int(x) for x in pts[b]))
            w = oz_witness(u, v)
            lam = similitude_multiplier(w)
            # N(Bx) = lam N(x) with lam a nonzero square: no class is ever left
            if lam is None or f.quad_class(lam) is not QuadClass.SQUARE:
                return False
    return True


def sample_same_norm_pairs(field: GF, m: int, count: int, rng: random.Random) -> Iterator[tuple[Point, Point]]:
    """Random nonzero u, v with <u, u> = <v, v>, v drawn by rejection."""
    q = field.q
    made = 0
    while made < count:
        u = Point.from_index(field, m, rng.randrange(1, q**m))
        target = norm(u)
        while True:
            v = Point.from_index(field, m, rng.randrange(1, q**m))
            if norm(v) == target:
                break
        made += 1
        yield u, v


__all__ = [
    "AffineMap", "BudgetExceeded", "GroupOrderRecord", "Matrix", "WitnessError",
    "aut_linear_matrices", "enumerate_O_brute", "enumerate_aut_linear", "group_orders",
    "is_orthogonal", "is_oz", "orbit_partition_check", "order_GL", "order_O", "order_OZ",
    "orthogonal_matrices_brute", "oz_witness", "permutation_matrix", "sample_same_norm_pairs",
    "similitude_multiplier", "transitivity_witness", "verify_delta_map",
]
