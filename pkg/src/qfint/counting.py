"""Norm counts S, Z, N, the degree D and common-neighbour counts of the integral distance graph.

S(m,q), Z(m,q), N(m,q) count the points of F_q^m whose norm is a nonzero
square, zero, or a non-square.  The graph joins two points when their
squared distance is a square (zero included), so its degree is
D = S + Z - 1.  A(m,q) is the number of common neighbours of 0 and e1,
B(m,q) the (conjectured) number for an isotropic neighbour.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

import numpy as np

from .ffield import GF, as_field, odd_primes, prime_power
from .geometry import Point, all_coords, index_of, norm_table

BRUTE_BUDGET = 10**7


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class CountRecord:
    m: int
    q: int
    S: int
    Z: int
    N: int
    D: int
    method: str

    def __post_init__(self):
        assert self.S + self.Z + self.N == self.q**self.m
        assert self.D == self.S + self.Z - 1

    def values(self) -> tuple[int, int, int, int]:
        return (self.S, self.Z, self.N, self.D)


def _q_of(q) -> int:
    return q.q if isinstance(q, GF) else int(q)


def _check_args(m: int, q: int):
    if m < 1:
        raise ValueError("dimension must be >= 1")
    prime_power(q)


def _even_record(m: int, q: int, method: str) -> CountRecord:
    # char 2: <u,u> = (sum u_i)^2, every element is a square
    Z = q ** (m - 1)
    S = q**m - Z
    return CountRecord(m, q, S, Z, 0, S + Z - 1, method)


def circle_counts(q: int) -> tuple[int, int]:
    """(|I_0|, |I_1|): solutions of a^2 + b^2 = 0 and of a^2 + b^2 = 1."""
    if q % 4 == 1:
        return 2 * q - 1, q - 1
    return 1, q + 1


def _base(m: int, q: int) -> tuple[int, int, int]:
    if m == 1:
        return q - 1, 1, 0
    if q % 4 == 1:
        return (q - 1) ** 2 // 2, 2 * q - 1, (q - 1) ** 2 // 2
    return (q * q - 1) // 2, 1, (q * q - 1) // 2


def counts_recursive(m: int, q) -> CountRecord:
    q = _q_of(q)
    _check_args(m, q)
    if q % 2 == 0:
        return _even_record(m, q, "recursive")
    i0, i1 = circle_counts(q)
    k = 2 if m % 2 == 0 else 1
    S, Z, N = _base(k, q)
    while k + 2 <= m:
        Z_next = Z * i0 + (q**k - Z) * i1
        S_next = (q - 1) // 2 * (N + Z) * i1 + (q - 3) // 2 * S * i1 + S * i0
        k += 2
        S, Z = S_next, Z_next
        N = q**k - S - Z
    return CountRecord(m, q, S, Z, N, S + Z - 1, "recursive")


def counts_closed(m: int, q) -> CountRecord:
    q = _q_of(q)
    _check_args(m, q)
    if q % 2 == 0:
        return _even_record(m, q, "closed")
    qm, qm1 = q**m, q ** (m - 1)
    if q % 4 == 1:
        if m % 2:
            h = q ** ((m + 1) // 2) - q ** ((m - 1) // 2)
            Z = qm1
            S = (qm - qm1 + h) // 2
            N = (qm - qm1 - h) // 2
        else:
            h = q ** (m // 2) - q ** ((m - 2) // 2)
            Z = qm1 + h
            S = (qm - qm1 - h) // 2
            N = (qm - qm1 - h) // 2
    else:
        if m % 2:
            h = (-q) ** ((m + 1) // 2) + (-q) ** ((m - 1) // 2)
            Z = qm1
            S = (qm - qm1 - h) // 2
            N = (qm - qm1 + h) // 2
        else:
            h = (-q) ** (m // 2) + (-q) ** ((m - 2) // 2)
            Z = qm1 + h
            S = (qm - qm1 - h) // 2
            N = (qm - qm1 - h) // 2
    return CountRecord(m, q, S, Z, N, S + Z - 1, "closed")


def counts_brute(m: int, q, budget: int = BRUTE_BUDGET) -> CountRecord:
    f = as_field(q)
    if f.q**m > budget:
        raise BudgetExceeded(f"q^m = {f.q**m} exceeds the enumeration budget {budget}")
    chi = f.chi_table[norm_table(f, m)]
    Z = int(np.count_nonzero(chi == 0))
    S = int(np.count_nonzero(chi == 1))
    N = int(np.count_nonzero(chi == -1))
    return CountRecord(m, f.q, S, Z, N, S + Z - 1, "brute")


def degree(m: int, q) -> int:
    return counts_closed(m, q).D


# -- common neighbours ---------------------------------------------------

def _sign(exponent: int) -> int:
    return -1 if exponent % 2 else 1


def common_adjacent_closed(m: int, q) -> int:
    """A(m,q): common neighbours of 0 and e1."""
    q = _q_of(q)
    _check_args(m, q)
    if q % 2 == 0:
        return q**m - 2
    if m % 2:
        s = _sign((m - 1) * (q - 1) // 4)
        # q^((m-3)/2) is q^-1 for m = 1
        val = (Fraction(q) ** (m - 2) * (q + 1) ** 2
               + s * Fraction(q) ** ((m - 3) // 2) * (3 * q * q - 2 * q - 1)) / 4 - 2
    else:
        s = _sign(m * (q - 1) // 4)
        val = (Fraction(q) ** (m - 2) * (q + 1) ** 2
               + 2 * s * Fraction(q) ** ((m - 2) // 2) * (q - 1)) / 4 - 2
    assert val.denominator == 1, val
    return int(val)


def has_isotropic(m: int, q: int) -> bool:
    return m >= 3 or (m == 2 and q % 4 == 1)


def conjectured_B(m: int, q) -> int:
    """Conjectured common-neighbour count of 0 and an isotropic v (unproven)."""
    q = _q_of(q)
    _check_args(m, q)
    if m < 2 or not has_isotropic(m, q):
        raise ValueError(f"F_{q}^{m} has no isotropic vector")
    a = common_adjacent_closed(m, q)
    if m % 2 == 0:
        return a
    s = _sign((q - 1) * (m - 1) // 4)
    corr = q ** ((m - 3) // 2) * (q * q - 1)
    assert corr % 4 == 0
    return a - s * corr // 4


class SpaceView:
    """Coordinates, norms and characters of every point of F_q^m, for brute force."""

    def __init__(self, field, m: int, budget: int = BRUTE_BUDGET):
        f = as_field(field)
        if f.q**m > budget:
            raise BudgetExceeded(f"q^m = {f.q**m} exceeds the enumeration budget {budget}")
        self.field, self.m = f, m
        self.coords = all_coords(f, m)
        self.norms = norm_table(f, m)
        self.chi = f.chi_table[self.norms]
        self.adjacent = self.chi >= 0
        self.adjacent[0] = False

    def shifted_index(self, v) -> np.ndarray:
        """Index of w - v for every w, as an array over w."""
        v = np.asarray(v.coords if isinstance(v, Point) else v, dtype=np.int64)
        return index_of(self.field, self.field.sub_arr(self.coords, v[None, :]))

    def common_neighbors(self, v) -> int:
        """Common neighbours of 0 and v (v != 0)."""
        if not np.any(v.coords if isinstance(v, Point) else v):
            raise ValueError("v must differ from 0")
        both = self.adjacent & self.adjacent[self.shifted_index(v)]
        return int(np.count_nonzero(both))


def common_neighbors_brute(u: Point, v: Point, budget: int = BRUTE_BUDGET) -> int:
    """|{w not in {u, v}: Delta(u, w) = Delta(v, w) = 1}| by enumeration."""
    u._same_space(v)
    if u == v:
        raise ValueError("u and v must differ")
    view = SpaceView(u.field, u.m, budget)
    return view.common_neighbors(v - u)


# -- strong regularity -----------------------------------------------------

@dataclass(frozen=True)
class SrgReport:
    m: int
    q: int
    v: int
    k: int
    lam: int
    mu: Fraction
    is_srg: bool | None
    method: str

    @property
    def is_integral_mu(self) -> bool:
        return self.mu.denominator == 1


def mu_from_identity(v: int, k: int, lam: int) -> Fraction:
    return Fraction(k * (k - lam - 1), v - k - 1)


def mu_even_closed(m: int, q: int) -> int:
    """mu for even m from the closed displays; integral by construction."""
    if m % 2:
        raise ValueError("even dimension required")
    h = q ** ((m - 2) // 2)
    if q % 4 == 1:
        num = h * (q + 1) * (q ** (m // 2) + h + 2)
    else:
        s = _sign(m // 2)
        num = h * (q + 1) * (q ** (m // 2) + h + 2 * s)
    assert num % 4 == 0
    return num // 4


def srg_brute(m: int, q, budget: int = BRUTE_BUDGET) -> bool:
    """Decide strong regularity by checking common(0, w) for every w != 0."""
    view = SpaceView(q, m, budget)
    n = view.field.q**m
    if n * n > 50 * budget:
        raise BudgetExceeded("pair enumeration too large")
    lam_seen, mu_seen = set(), set()
    for w in range(1, n):
        c = int(np.count_nonzero(view.adjacent & view.adjacent[view.shifted_index(view.coords[w])]))
        (lam_seen if view.adjacent[w] else mu_seen).add(c)
        if len(lam_seen) > 1 or len(mu_seen) > 1:
            return False
    return True


def srg_report(m: int, q, budget: int = BRUTE_BUDGET) -> SrgReport:
    qi = _q_of(q)
    if qi % 2 == 0 or m < 2:
        raise ValueError("odd q and m >= 2 required")
    v = qi**m
    k = degree(m, qi)
    lam = common_adjacent_closed(m, qi)
    mu = mu_from_identity(v, k, lam)
    if m % 2:
        return SrgReport(m, qi, v, k, lam, mu, False, "non-integral mu" if mu.denominator != 1 else "odd m")
    if m == 2:
        return SrgReport(m, qi, v, k, lam, mu, True, "known (m=2)")
    try:
        decided = srg_brute(m, q, budget)
    except BudgetExceeded:
        return SrgReport(m, qi, v, k, lam, mu, None, "undecided")
    return SrgReport(m, qi, v, k, lam, mu, decided, "brute")


# -- empirical check of the conjecture -------------------------------------

@dataclass
class ConjectureRow:
    p: int
    norm_class: str
    expected: int | None
    observed: list[int]
    ok: bool


@dataclass
class ConjectureReport:
    m: int
    p_max: int
    rows: list[ConjectureRow] = dc_field(default_factory=list)
    counterexample: ConjectureRow | None = None

    @property
    def agrees(self) -> bool:
        return self.counterexample is None


def _class_representatives(view: SpaceView, rng: random.Random, k: int) -> dict[str, list[np.ndarray]]:
    chi = view.chi
    out = {}
    for label, val in (("P+", 1), ("P0", 0), ("P-", -1)):
        idx = np.flatnonzero(chi == val)
        idx = idx[idx != 0]
        if idx.size == 0:
            continue
        first = int(idx[0])
        picks = [first] + [int(idx[rng.randrange(idx.size)]) for _ in range(k)]
        out[label] = [view.coords[i] for i in picks]
    return out


def verify_conjecture(m: int, p_max: int, k: int = 5, seed: int = 0,
                      budget: int = BRUTE_BUDGET) -> ConjectureReport:
    """Compare brute-force common-neighbour counts with A, B (and mu for even m).

    Every norm class gets its first member plus ``k`` random members; all
    of them must give the same count, which must equal the formula where
    one exists.  The P- class is compared with mu for even m only.
    """
    if m < 2:
        raise ValueError("m >= 2 required")
    rng = random.Random(seed)
    report = ConjectureReport(m, p_max)
    for p in odd_primes(p_max):
        view = SpaceView(p, m, budget)
        expected = {"P+": common_adjacent_closed(m, p)}
        if has_isotropic(m, p):
            expected["P0"] = conjectured_B(m, p)
        expected["P-"] = mu_even_closed(m, p) if m % 2 == 0 else None
        for label, reps in _class_representatives(view, rng, k).items():
            observed = [view.common_neighbors(r) for r in reps]
            want = expected.get(label)
            ok = len(set(observed)) == 1 and (want is None or observed[0] == want)
            row = ConjectureRow(p, label, want, observed, ok)
            report.rows.append(row)
            if not ok and report.counterexample is None:
                report.counterexample = row
    return report
