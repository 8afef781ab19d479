"""Published reference data: exact values of I(m,q) and example point sets of size q + 1."""

from __future__ import annotations

import re

from .ffield import GF, as_field
from .geometry import Point

# I(m, q) for odd q
KNOWN_I = {
    (3, 3): 4, (3, 5): 25, (3, 7): 8, (3, 11): 11, (3, 13): 169, (3, 17): 289,
    (3, 19): 19, (3, 23): 23, (3, 27): 28,
    (4, 3): 9, (5, 3): 27, (6, 3): 33, (4, 5): 25, (5, 5): 125,
    (4, 7): 49, (5, 7): 343, (4, 11): 121,
}

F27_DESCRIPTOR = "3^3:2,1,1,1"  # w^3 + w^2 + w + 2

_Q3 = "(0,0,0) (1,0,0) (2,1,1) (2,2,1)"
_Q7 = "(0,0,0) (1,0,0) (0,0,1) (1,5,5) (2,1,3) (3,1,2) (5,5,1) (6,3,6)"
_F27 = """
(2+2w+2w^2,2+w^2,w^2) (0,2w+2w^2,1+2w) (1,1+w+w^2,w) (2,0,0)
(2,w^2,2+w) (2,2w^2,1+2w) (2,2w+2w^2,1+2w) (w,2+2w,2+2w+2w^2)
(2w,2w^2,2+2w+w^2) (2+2w,w^2,2+w+w^2) (2+2w,w+2w^2,w+2w^2)
(2+2w,2w+2w^2,2w) (w^2,2+w+w^2,1+2w^2) (1+w^2,2w+2w^2,2w)
(0,0,0) (2+w^2,1+2w,2w^2) (1+w+w^2,w^2,2+w^2) (2+w+w^2,w^2,0)
(1,0,0) (2w+w^2,1+2w+2w^2,2+2w+2w^2) (2+2w+w^2,2+2w^2,1)
(1,0,1+w^2) (1+2w^2,w+w^2,2w) (w+2w^2,1+w^2,1+w+2w^2)
(2+w+2w^2,2+w,2+w+2w^2) (2+w+2w^2,2+2w,2w+w^2)
(1+2w+2w^2,2+w+w^2,2w+w^2) (1+2w+2w^2,2w+2w^2,2w)
"""

_TERM = re.compile(r"^(\d*)(w(?:\^(\d+))?)?$")


def parse_poly_element(field: GF, text: str, var: str = "w") -> int:
    """Encode a polynomial expression like ``2+w+2w^2`` in the field's basis."""
    coeffs = [0] * field.r
    for term in text.replace(" ", "").replace(var, "w").split("+"):
        mt = _TERM.match(term)
        if not term or mt is None:
            raise ValueError(f"cannot parse term {term!r}")
        digits, has_w, power = mt.groups()
        c = int(digits) if digits else 1
        k = (int(power) if power else 1) if has_w else 0
        if k >= field.r:
            raise ValueError(f"power {k} exceeds the field degree")
        coeffs[k] = (coeffs[k] + c) % field.p
    return field.from_coeffs(coeffs)


def _parse_set(field: GF, text: str) -> list[Point]:
    pts = []
    for tup in re.findall(r"\(([^)]*)\)", text):
        pts.append(Point(field, tuple(parse_poly_element(field, x) for x in tup.split(","))))
    return pts


def example_q3() -> list[Point]:
    return _parse_set(as_field(3), _Q3)


def example_q7() -> list[Point]:
    return _parse_set(as_field(7), _Q7)


def example_f27() -> list[Point]:
    return _parse_set(as_field(F27_DESCRIPTOR), _F27)


EXAMPLES = {"q3": example_q3, "q7": example_q7, "f27": example_f27}
