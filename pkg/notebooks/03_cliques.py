"""
Largest integral point sets
===========================

I(m,q) is the clique number of the graph of integral distances.  Small
values come from exhaustive search through a fixed pair of points, the
rest from explicit constructions that meet an upper bound.
"""

from qfint import compute_I
from qfint.clique import SearchConfig, build_graph
from qfint.constructions import circle_plus_line, hyperplane_q1mod4, lower_bound
from qfint.known import KNOWN_I

# %%
g = build_graph(3, 7)
print(g.n, "vertices, degree", g.degree, "edges", g.edge_count())

# %%
for m, q in [(3, 3), (3, 5), (3, 7), (3, 11), (3, 13), (4, 3), (5, 3), (4, 5)]:
    r = compute_I(m, q)
    print(f"I({m},{q}) = {r.size:4d}  {r.status:18s} published {KNOWN_I[(m, q)]}")

# %%
# A witness for I(3,7) = 8: one point more than the best line-type set.
print(compute_I(3, 7).record(timing=False))

# %%
# Constructions.
print(len(hyperplane_q1mod4(13)), len(circle_plus_line(11)))
for m in range(3, 8):
    print(m, lower_bound(m, 3)[0], lower_bound(m, 5)[0])

# %%
# A short time limit keeps the best set found so far.
print(compute_I(3, 19, SearchConfig(time_limit=0.5)).status)
