"""
Orthogonal groups and orbit witnesses
=====================================

Orthogonal maps, scalars, translations and the Frobenius all preserve
integrality.  Here we count O(m,q) by brute force, compare with the
closed formulas and construct explicit matrices moving one vector to
another of the same norm.
"""

import random

from qfint import make_field
from qfint.geometry import Point
from qfint.symmetry import (enumerate_aut_linear, enumerate_O_brute, order_O, order_OZ,
                            sample_same_norm_pairs, transitivity_witness)

# %%
for m, q in [(2, 3), (2, 5), (2, 7), (2, 9), (3, 3)]:
    print(f"|O({m},{q})| brute {enumerate_O_brute(m, q):4d}  formula {order_O(m, q):4d}")

# %%
# For most (m,q) every linear automorphism of the distance graph is a
# scaled orthogonal map.  F_5^2 and F_9^2 have extra ones.
for m, q in [(3, 3), (2, 5), (2, 9)]:
    print(m, q, enumerate_aut_linear(m, q) // order_OZ(m, q))

# %%
F = make_field(11)
a = transitivity_witness(Point(F, (1, 0, 0)), Point(F, (3, 5, 0)))
print(a)

# %%
# Random same-norm pairs, including isotropic ones.
rng = random.Random(3)
for u, v in sample_same_norm_pairs(make_field(3, 2), 3, 5, rng):
    w = transitivity_witness(u, v)
    print(u, "->", v, w @ u == v)
