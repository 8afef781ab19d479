"""
Integral distances over a finite field
======================================

Squared distances in F_q^m are field elements; a pair of points is
integral when that value is a square (zero included).  This walk-through
builds a few fields, looks at norm classes and counts them.
"""

import numpy as np

from qfint import make_field
from qfint.counting import counts_brute, counts_closed
from qfint.geometry import Point, norm_class, norm_table, sq_dist

# %%
# Prime and extension fields.  Elements are plain ints; F_27 uses the
# modulus w^3 + w^2 + w + 2, written lowest coefficient first.
F7 = make_field(7)
F27 = make_field(3, 3, [2, 1, 1, 1])
print(F7, F27)
print("squares in F_7:", sorted({F7.square(a) for a in range(7)}))

# %%
# The distance from the origin to (1,2) over F_5 is 1 + 4 = 0: an integral,
# isotropic direction.
F5 = make_field(5)
u, v = Point(F5, (0, 0)), Point(F5, (1, 2))
print(sq_dist(u, v), norm_class(v - u))

# %%
# Norm classes across a whole space.  chi = +1, 0, -1 for non-zero squares,
# zero and non-squares.
norms = norm_table(F7, 3)
chi = F7.chi_table[norms]
print({c: int(np.count_nonzero(chi == c)) for c in (1, 0, -1)})

# %%
# Closed forms for S (square norm), Z (zero norm) and N agree with
# enumeration.  D = S + Z - 1 is the degree of the distance graph.
for m in range(1, 5):
    print(m, counts_closed(m, 7).values(), counts_brute(m, 7).values())
