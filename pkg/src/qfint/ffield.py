"""Arithmetic in finite fields F_q, q = p^r, p odd.

Elements are handled as canonical integers: the coefficients of the
polynomial representative c_0 + c_1 w + ... + c_{r-1} w^{r-1} are packed
base p, so ``value = c_0 + c_1 p + ... + c_{r-1} p^{r-1}``.  All other
modules number points and vertices through this encoding.

``GF`` exposes integer-level operations (``gf.mul(a, b)``) plus numpy
vectorised versions (``gf.mul_arr``) used by the enumeration code.
``FieldElement`` wraps an integer together with its field for operator
syntax and mixed-field checking.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property
from itertools import product

import numpy as np

TABLE_LIMIT = 1 << 16


class QuadClass(enum.Enum):
    ZERO = 0
    SQUARE = 1
    NONSQUARE = -1


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def odd_primes(upto: int) -> list[int]:
    return [p for p in range(3, upto + 1, 2) if is_prime(p)]


def prime_power(q: int) -> tuple[int, int]:
    """Return (p, r) with q = p**r, or raise ValueError."""
    if q < 2:
        raise ValueError(f"{q} is not a prime power")
    p = next(f for f in range(2, q + 1) if q % f == 0)
    r, rest = 0, q
    while rest % p == 0:
        rest //= p
        r += 1
    if rest != 1:
        raise ValueError(f"{q} is not a prime power")
    return p, r


# -- polynomials over F_p, coefficient lists constant term first ----------

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mod(a: list[int], f: list[int], p: int) -> list[int]:
    a = _trim([c % p for c in a])
    df = len(f) - 1
    inv_lead = pow(f[-1], -1, p)
    while len(a) - 1 >= df:
        c = a[-1] * inv_lead % p
        shift = len(a) - 1 - df
        for i, fc in enumerate(f):
            a[shift + i] = (a[shift + i] - c * fc) % p
        _trim(a)
    return a


def _poly_mulmod(a: list[int], b: list[int], f: list[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _poly_mod(out, f, p)


def _poly_powmod(a: list[int], e: int, f: list[int], p: int) -> list[int]:
    result = [1]
    base = _poly_mod(list(a), f, p)
    while e:
        if e & 1:
            result = _poly_mulmod(result, base, f, p)
        base = _poly_mulmod(base, base, f, p)
        e >>= 1
    return result


def _poly_gcd(a: list[int], b: list[int], p: int) -> list[int]:
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _poly_mod(a, b, p)
    return a


def _prime_factors(n: int) -> list[int]:
    out, f = [], 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


def is_irreducible(f: list[int], p: int) -> bool:
    """Rabin's test for a monic polynomial ``f`` over F_p."""
    r = len(f) - 1
    if r < 1:
        return False
    if r == 1:
        return True
    x = [0, 1]
    if _poly_powmod(x, p**r, f, p) != _poly_mod(list(x), f, p):
        return False
    for d in _prime_factors(r):
        h = _poly_powmod(x, p ** (r // d), f, p)
        h = h + [0] * max(0, 2 - len(h))
        h[1] = (h[1] - 1) % p
        if len(_poly_gcd(f, _trim(h), p)) != 1:
            return False
    return True


def default_modulus(p: int, r: int) -> tuple[int, ...]:
    """Lexicographically smallest monic irreducible of degree r over F_p.

    Coefficients are compared from the leading term down, so x^3+2x+1
    precedes x^3+2x^2+1.  Returned lowest degree first.
    """
    if r == 1:
        return (0, 1)
    for high in product(range(p), repeat=r):
        f = list(reversed(high)) + [1]
        if is_irreducible(f, p):
            return tuple(f)
    raise AssertionError("no irreducible polynomial found")  # pragma: no cover


class GF:
    """The field F_{p^r} with elements encoded as integers 0..q-1."""

    def __init__(self, p: int, r: int = 1, modulus=None, *, allow_even: bool = False):
        if not is_prime(p):
            raise ValueError(f"p={p} is not prime")
        if p == 2 and not allow_even:
            raise ValueError("characteristic 2 is not supported (every distance is integral there)")
        if r < 1:
            raise ValueError("extension degree must be >= 1")
        if r == 1:
            modulus = (0, 1)
        elif modulus is None:
            modulus = default_modulus(p, r)
        else:
            modulus = tuple(int(c) for c in modulus)
            if len(modulus) != r + 1:
                raise ValueError(f"modulus must have {r + 1} coefficients")
            if any(not 0 <= c < p for c in modulus):
                raise ValueError(f"modulus coefficients must lie in 0..{p - 1}")
            if modulus[-1] != 1:
                raise ValueError("modulus must be monic")
            if not is_irreducible(list(modulus), p):
                raise ValueError(f"modulus {modulus} is reducible over F_{p}")
        self.p = p
        self.r = r
        self.q = p**r
        self.modulus = modulus
        if r > 1 and self.q > TABLE_LIMIT:
            raise ValueError(f"extension fields with q > {TABLE_LIMIT} are not supported")

    # -- identity ---------------------------------------------------------

    @property
    def descriptor(self) -> str:
        if self.r == 1:
            return str(self.p)
        return f"{self.p}^{self.r}:" + ",".join(map(str, self.modulus))

    @classmethod
    def from_descriptor(cls, text: str) -> "GF":
        text = text.strip()
        if ":" in text:
            head, coeffs = text.split(":", 1)
            p, r = (int(x) for x in head.split("^"))
            return cls(p, r, [int(c) for c in coeffs.split(",")])
        if "^" in text:
            p, r = (int(x) for x in text.split("^"))
            return cls(p, r)
        p, r = prime_power(int(text))
        return cls(p, r)

    def __eq__(self, other):
        return isinstance(other, GF) and (self.p, self.r, self.modulus) == (other.p, other.r, other.modulus)

    def __hash__(self):
        return hash((self.p, self.r, self.modulus))

    def __repr__(self):
        return f"GF({self.descriptor})"

    def __call__(self, value: int) -> "FieldElement":
        return FieldElement(self, self.check(value))

    def check(self, a: int) -> int:
        a = int(a)
        if not 0 <= a < self.q:
            raise ValueError(f"{a} is not an element of F_{self.q}")
        return a

    def elements(self) -> range:
        return range(self.q)

    # -- coefficient packing ------------------------------------------------

    def to_coeffs(self, a: int) -> list[int]:
        out = []
        for _ in range(self.r):
            a, c = divmod(a, self.p)
            out.append(c)
        return out

    def from_coeffs(self, coeffs) -> int:
        v = 0
        for c in reversed(list(coeffs)[: self.r]):
            v = v * self.p + c % self.p
        return v

    def _polymul(self, a: int, b: int) -> int:
        prod = _poly_mulmod(self.to_coeffs(a), self.to_coeffs(b), list(self.modulus), self.p)
        return self.from_coeffs(prod)

    # -- tables (built lazily) ---------------------------------------------

    @property
    def tabulated(self) -> bool:
        return self.q <= TABLE_LIMIT

    @cached_property
    def _exp_log(self) -> tuple[np.ndarray, np.ndarray]:
        q = self.q
        order = q - 1
        factors = _prime_factors(order) if order > 1 else []
        for g in range(1, q):
            if all(self._slow_pow(g, order // f) != 1 for f in factors):
                break
        exp = np.zeros(2 * order, dtype=np.int64)
        log = np.full(q, -1, dtype=np.int64)
        x = 1
        for k in range(order):
            exp[k] = x
            log[x] = k
            x = self._polymul(x, g) if self.r > 1 else x * g % q
        exp[order:] = exp[:order]
        return exp, log

    def primitive_element(self) -> int:
        """The smallest generator of the multiplicative group."""
        return int(self._exp_log[0][1]) if self.q > 2 else 1

    @cached_property
    def _digits(self) -> np.ndarray:
        vals = np.arange(self.q, dtype=np.int64)
        return np.stack([(vals // self.p**i) % self.p for i in range(self.r)], axis=1)

    @cached_property
    def _powers_of_p(self) -> np.ndarray:
        return np.array([self.p**i for i in range(self.r)], dtype=np.int64)

    @cached_property
    def neg_table(self) -> np.ndarray:
        return self.neg_arr(np.arange(self.q, dtype=np.int64))

    @cached_property
    def square_table(self) -> np.ndarray:
        x = np.arange(self.q, dtype=np.int64)
        return self.mul_arr(x, x)

    @cached_property
    def chi_table(self) -> np.ndarray:
        """Quadratic character as int8: 0 at 0, +1 on squares, -1 otherwise."""
        chi = np.full(self.q, -1, dtype=np.int8)
        chi[self.square_table] = 1
        chi[0] = 0
        return chi

    @cached_property
    def _sqrt_table(self) -> np.ndarray:
        root = np.full(self.q, -1, dtype=np.int64)
        sq = self.square_table
        # reversed so the smaller of the two roots is written last
        for x in range(self.q - 1, -1, -1):
            root[sq[x]] = x
        return root

    # -- scalar arithmetic --------------------------------------------------

    def add(self, a: int, b: int) -> int:
        if self.r == 1:
            return (a + b) % self.p
        p, out, scale = self.p, 0, 1
        for _ in range(self.r):
            a, ca = divmod(a, p)
            b, cb = divmod(b, p)
            out += ((ca + cb) % p) * scale
            scale *= p
        return out

    def neg(self, a: int) -> int:
        if self.r == 1:
            return -a % self.p
        return self.from_coeffs([-c for c in self.to_coeffs(a)])

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self.r == 1:
            return a * b % self.p
        if a == 0 or b == 0:
            return 0
        exp, log = self._exp_log
        return int(exp[log[a] + log[b]])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("0 has no inverse")
        if self.r == 1:
            return pow(a, -1, self.p)
        exp, log = self._exp_log
        return int(exp[(self.q - 1 - log[a]) % (self.q - 1)])

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def _slow_pow(self, a: int, e: int) -> int:
        result, base = 1, a
        while e:
            if e & 1:
                result = self._polymul(result, base) if self.r > 1 else result * base % self.q
            base = self._polymul(base, base) if self.r > 1 else base * base % self.q
            e >>= 1
        return result

    def pow(self, a: int, e: int) -> int:
        if a == 0:
            if e < 0:
                raise ZeroDivisionError("0 has no inverse")
            return 1 if e == 0 else 0
        e %= self.q - 1
        if self.r == 1:
            return pow(a, e, self.p)
        exp, log = self._exp_log
        return int(exp[log[a] * e % (self.q - 1)])

    def square(self, a: int) -> int:
        return self.mul(a, a)

    def quad_class(self, a: int) -> QuadClass:
        if a == 0:
            return QuadClass.ZERO
        if self.p == 2:
            return QuadClass.SQUARE
        if self.tabulated:
            return QuadClass(int(self.chi_table[a]))
        return QuadClass.SQUARE if self.pow(a, (self.q - 1) // 2) == 1 else QuadClass.NONSQUARE

    def chi(self, a: int) -> int:
        return self.quad_class(a).value

    def is_square(self, a: int) -> bool:
        """True for 0 and the nonzero squares."""
        return self.quad_class(a) is not QuadClass.NONSQUARE

    def sqrt(self, a: int) -> int | None:
        if a == 0:
            return 0
        if self.tabulated:
            root = int(self._sqrt_table[a])
            return None if root < 0 else root
        if not self.is_square(a):
            return None
        # prime field beyond the table limit: exhaustive search is still O(p)
        return next(x for x in range(self.q) if x * x % self.q == a)

    def omega(self) -> int:
        """The square root of -1 with smaller encoding; needs q = 1 mod 4."""
        if self.q % 4 != 1:
            raise ValueError(f"-1 is not a square in F_{self.q} (q = 3 mod 4)")
        return self.sqrt(self.neg(1))

    def frobenius(self, a: int, i: int) -> int:
        if not 0 <= i < self.r:
            raise ValueError(f"Frobenius index must be in 0..{self.r - 1}")
        return self.pow(a, self.p**i) if a else 0

    def nonsquare(self) -> int:
        return next(x for x in range(1, self.q) if self.quad_class(x) is QuadClass.NONSQUARE)

    # -- vectorised arithmetic on int64 arrays -----------------------------

    def add_arr(self, a, b) -> np.ndarray:
        a, b = np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64)
        if self.r == 1:
            return (a + b) % self.p
        da, db = self._digits[a], self._digits[b]
        return ((da + db) % self.p) @ self._powers_of_p

    def neg_arr(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        if self.r == 1:
            return (-a) % self.p
        return ((-self._digits[a]) % self.p) @ self._powers_of_p

    def sub_arr(self, a, b) -> np.ndarray:
        a, b = np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64)
        if self.r == 1:
            return (a - b) % self.p
        return ((self._digits[a] - self._digits[b]) % self.p) @ self._powers_of_p

    def mul_arr(self, a, b) -> np.ndarray:
        a, b = np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64)
        if self.r == 1:
            return (a * b) % self.p
        exp, log = self._exp_log
        a, b = np.broadcast_arrays(a, b)
        out = exp[(log[a] + log[b]) % (self.q - 1)]
        return np.where((a == 0) | (b == 0), 0, out)


@dataclass(frozen=True)
class FieldElement:
    field: GF
    value: int

    def _other(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise ValueError("operands belong to different fields")
            return other.value
        if isinstance(other, int):
            if self.field.r == 1:
                return other % self.field.p
            return self.field.check(other)
        return NotImplemented

    def __add__(self, other):
        return FieldElement(self.field, self.field.add(self.value, self._other(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return FieldElement(self.field, self.field.sub(self.value, self._other(other)))

    def __rsub__(self, other):
        return FieldElement(self.field, self.field.sub(self._other(other), self.value))

    def __mul__(self, other):
        return FieldElement(self.field, self.field.mul(self.value, self._other(other)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return FieldElement(self.field, self.field.div(self.value, self._other(other)))

    def __neg__(self):
        return FieldElement(self.field, self.field.neg(self.value))

    def __pow__(self, e: int):
        return FieldElement(self.field, self.field.pow(self.value, e))

    def inv(self) -> "FieldElement":
        return FieldElement(self.field, self.field.inv(self.value))

    def quad_class(self) -> QuadClass:
        return self.field.quad_class(self.value)

    def sqrt(self) -> "FieldElement | None":
        root = self.field.sqrt(self.value)
        return None if root is None else FieldElement(self.field, root)

    def frobenius(self, i: int) -> "FieldElement":
        return FieldElement(self.field, self.field.frobenius(self.value, i))

    def __int__(self):
        return self.value

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.field == other.field and self.value == other.value
        if isinstance(other, int):
            return self.value == other
        return NotImplemented

    def __hash__(self):
        return hash((self.field, self.value))

    def __repr__(self):
        return f"{self.value}@F{self.field.q}"


def make_field(p: int, r: int = 1, modulus=None) -> GF:
    return GF(p, r, modulus)


def field_of_order(q: int) -> GF:
    p, r = prime_power(q)
    return GF(p, r)


def as_field(q) -> GF:
    """Accept a GF, an integer order, or a descriptor string."""
    if isinstance(q, GF):
        return q
    if isinstance(q, str):
        return GF.from_descriptor(q)
    return field_of_order(int(q))
