"""Slow, independent reference implementations used only by the tests.

Nothing here imports qfint.  Field elements use the same base-p packing so
results can be compared index for index, but all arithmetic is redone
from polynomial definitions.
"""

from __future__ import annotations

import itertools


def is_prime(n: int) -> bool:
    return n >= 2 and all(n % d for d in range(2, int(n**0.5) + 1))


def prime_power(q: int) -> tuple[int, int]:
    for p in range(2, q + 1):
        if is_prime(p):
            r, x = 0, q
            while x % p == 0:
                x //= p
                r += 1
            if x == 1:
                return p, r
            if r:
                break
    raise ValueError(q)


class PolyField:
    """F_{p^r} as coefficient tuples, multiplication by schoolbook product and reduction."""

    def __init__(self, p: int, r: int, modulus=None):
        self.p, self.r, self.q = p, r, p**r
        if r == 1:
            self.modulus = (0, 1)
        else:
            self.modulus = tuple(modulus) if modulus else self._smallest_irreducible()

    def _has_root_free_factorisation(self, mod) -> bool:
        # irreducible iff no monic factor of degree 1..r//2 divides it
        for d in range(1, self.r // 2 + 1):
            for low in itertools.product(range(self.p), repeat=d):
                if self._divides(list(low) + [1], list(mod)):
                    return False
        return True

    def _divides(self, g, f) -> bool:
        f = f[:]
        while len(f) >= len(g):
            c = f[-1]
            shift = len(f) - len(g)
            for i, gi in enumerate(g):
                f[shift + i] = (f[shift + i] - c * gi) % self.p
            f.pop()
        return not any(f)

    def _smallest_irreducible(self):
        for low in itertools.product(range(self.p), repeat=self.r):
            mod = tuple(reversed(low)) + (1,)
            if self._has_root_free_factorisation(mod):
                return mod
        raise AssertionError

    def irreducible_moduli(self):
        out = []
        for low in itertools.product(range(self.p), repeat=self.r):
            mod = tuple(reversed(low)) + (1,)
            if self._has_root_free_factorisation(mod):
                out.append(mod)
        return out

    def coeffs(self, a: int):
        return [(a // self.p**i) % self.p for i in range(self.r)]

    def pack(self, c) -> int:
        return sum((x % self.p) * self.p**i for i, x in enumerate(c))

    def add(self, a, b):
        return self.pack([x + y for x, y in zip(self.coeffs(a), self.coeffs(b))])

    def sub(self, a, b):
        return self.pack([x - y for x, y in zip(self.coeffs(a), self.coeffs(b))])

    def mul(self, a, b):
        if self.r == 1:
            return a * b % self.p
        ca, cb = self.coeffs(a), self.coeffs(b)
        prod = [0] * (2 * self.r - 1)
        for i, x in enumerate(ca):
            for j, y in enumerate(cb):
                prod[i + j] += x * y
        mod = self.modulus
        for k in range(len(prod) - 1, self.r - 1, -1):
            c = prod[k] % self.p
            prod[k] = 0
            for i in range(self.r):
                prod[k - self.r + i] -= c * mod[i]
        return self.pack(prod[: self.r])

    def squares(self) -> set[int]:
        return {self.mul(x, x) for x in range(self.q)}


def norm(F: PolyField, u) -> int:
    acc = 0
    for x in u:
        acc = F.add(acc, F.mul(x, x))
    return acc


def points(F: PolyField, m: int):
    """All points in canonical index order (first coordinate least significant)."""
    for idx in range(F.q**m):
        yield tuple((idx // F.q**i) % F.q for i in range(m))


def counts(F: PolyField, m: int) -> tuple[int, int, int]:
    sq = F.squares()
    S = Z = N = 0
    for u in points(F, m):
        t = norm(F, u)
        if t == 0:
            Z += 1
        elif t in sq:
            S += 1
        else:
            N += 1
    return S, Z, N


def integral(F: PolyField, u, v, sq=None) -> bool:
    sq = sq if sq is not None else F.squares()
    return norm(F, [F.sub(a, b) for a, b in zip(u, v)]) in sq


def common_neighbours(F: PolyField, u, v) -> int:
    sq = F.squares()
    m = len(u)
    return sum(1 for w in points(F, m) if w != u and w != v
               and integral(F, u, w, sq) and integral(F, v, w, sq))


def matmul(F: PolyField, a, b):
    n = len(a)
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            acc = 0
            for k in range(n):
                acc = F.add(acc, F.mul(a[i][k], b[k][j]))
            row.append(acc)
        out.append(tuple(row))
    return tuple(out)


def orthogonal_count(F: PolyField, m: int) -> int:
    eye = tuple(tuple(int(i == j) for j in range(m)) for i in range(m))
    count = 0
    for entries in itertools.product(range(F.q), repeat=m * m):
        a = tuple(tuple(entries[i * m:(i + 1) * m]) for i in range(m))
        at = tuple(zip(*a))
        if matmul(F, at, a) == eye:
            count += 1
    return count


def pythagorean(F: PolyField, gamma: int) -> set[tuple[int, int, int]]:
    g2 = F.mul(gamma, gamma)
    return {(a, b, gamma) for a in range(F.q) for b in range(F.q)
            if F.add(F.mul(a, a), F.mul(b, b)) == g2}


def max_clique_size(F: PolyField, m: int) -> int:
    """Clique number of the integral-distance graph, through networkx."""
    import networkx as nx
    sq = F.squares()
    pts = list(points(F, m))
    g = nx.Graph()
    g.add_nodes_from(range(len(pts)))
    for i, j in itertools.combinations(range(len(pts)), 2):
        if integral(F, pts[i], pts[j], sq):
            g.add_edge(i, j)
    clique, _ = nx.max_weight_clique(g, weight=None)
    return len(clique)
