"""The graph of integral distances and exact clique search for I(m,q).

The graph is a Cayley graph of (F_q^m, +), so it is stored as its
connection set only.  Search is branch and bound with a greedy colouring
bound on Python-int bitsets (vertex i of a local instance is bit i).

Symmetry is used in two places.  Translations let us fix the vertex 0.
Stabiliser orbits are used at the first branching level: if the orbits
of the candidates are O_1 < O_2 < ..., then branch i contains the
representative of O_i and may only use vertices from O_i, O_{i+1}, ...
The stabiliser generators are checked to preserve the connection set
before they are used.
"""

from __future__ import annotations

import hashlib
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field as dc_field, replace
from functools import lru_cache
from multiprocessing import get_context
from pathlib import Path
from typing import NamedTuple

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from . import constructions
from .counting import BudgetExceeded, SpaceView, counts_closed
from .ffield import GF, as_field
from .geometry import Point, all_coords, index_of, integral_violation, parse_point, pyth_triples

GRAPH_BUDGET = 2 * 10**6
STATUSES = ("optimal", "lower_bound", "formula_certified")
REDUCTIONS = ("none", "prescribed_pair", "construction")


# -- graph --------------------------------------------------------------------

class IntegralityGraph:
    """Vertices are canonical point indices; u ~ v iff u - v lies in the connection set."""

    def __init__(self, field, m: int, budget: int = GRAPH_BUDGET):
        f = as_field(field)
        if f.q**m > budget:
            raise BudgetExceeded(f"q^m = {f.q**m} exceeds the graph budget {budget}")
        self.field, self.m = f, m
        self._view = SpaceView(f, m, budget)
        self.coords = self._view.coords
        self.connection = self._view.adjacent        # bool mask over difference indices
        self.isotropic = (self._view.norms == 0)
        self.isotropic[0] = False
        self.connection_bits = _mask_to_int(self.connection)

    @property
    def n(self) -> int:
        return len(self.connection)

    @property
    def degree(self) -> int:
        return int(np.count_nonzero(self.connection))

    def diff_index(self, u, v) -> np.ndarray:
        """Index of coords[u] - coords[v], broadcasting over index arrays."""
        f = self.field
        return index_of(f, f.sub_arr(self.coords[np.asarray(u)], self.coords[np.asarray(v)]))

    def adjacent(self, u: int, v: int) -> bool:
        return bool(self.connection[int(self.diff_index(u, v))])

    def neighbors(self, u: int) -> np.ndarray:
        """Sorted neighbour indices of vertex u."""
        return np.flatnonzero(self.connection[self.diff_index(np.arange(self.n), u)])

    def edges(self):
        """Pairs (i, j), i < j, in lexicographic order."""
        for i in range(self.n):
            nb = self.neighbors(i)
            for j in nb[nb > i]:
                yield i, int(j)

    def edge_count(self) -> int:
        return self.n * self.degree // 2


def _mask_to_int(mask: np.ndarray) -> int:
    return int.from_bytes(np.packbits(mask.astype(bool), bitorder="little").tobytes(), "little")


@lru_cache(maxsize=8)
def _graph(descriptor: str, m: int) -> IntegralityGraph:
    return IntegralityGraph(as_field(descriptor), m)


def build_graph(m: int, q) -> IntegralityGraph:
    f = as_field(q)
    g = _graph(f.descriptor, m)
    expected = counts_closed(m, f.q).D
    if g.degree != expected:
        raise AssertionError(f"|C| = {g.degree} but D({m},{f.q}) = {expected}")
    return g


# -- point-set verification ---------------------------------------------------

class PointSetCheck(NamedTuple):
    ok: bool
    pair: tuple[Point, Point] | None

    def __bool__(self):
        return self.ok


def verify_point_set(points) -> PointSetCheck:
    """All pairs at integral distance?  Reports the first bad pair otherwise."""
    points = list(points)
    bad = integral_violation(points) if len(points) > 1 else None
    if bad is None:
        return PointSetCheck(True, None)
    i, j = bad
    return PointSetCheck(False, (points[i], points[j]))


# -- results and configuration ------------------------------------------------

@dataclass(frozen=True)
class SearchConfig:
    prescribed: tuple[Point, ...] = ()
    time_limit: float | None = None
    deterministic: bool = True
    workers: int = 1
    symmetry: bool = True

    def __post_init__(self):
        object.__setattr__(self, "prescribed", tuple(self.prescribed))
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        check = verify_point_set(self.prescribed)
        if not check.ok:
            a, b = check.pair
            raise ValueError(f"prescribed points {a} and {b} are not at integral distance")

    def key(self) -> str:
        """Hash of the result-relevant settings (workers and determinism excluded)."""
        payload = json.dumps({
            "prescribed": [str(p) for p in self.prescribed],
            "time_limit": self.time_limit,
            "symmetry": self.symmetry,
        }, sort_keys=True)
        return hashlib.sha256(payload.encode()).hexdigest()[:8]


@dataclass(frozen=True)
class CliqueResult:
    m: int
    field: GF
    size: int
    witness: tuple[Point, ...]
    status: str
    reduction: str
    elapsed: float = 0.0
    upper_bound: int | None = None
    construction: str | None = None
    nodes: int = dc_field(default=0, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "witness", tuple(sorted(self.witness, key=lambda p: p.index)))
        if self.status not in STATUSES:
            raise ValueError(f"unknown status {self.status!r}")
        if self.reduction not in REDUCTIONS:
            raise ValueError(f"unknown reduction {self.reduction!r}")
        if self.witness:
            if len(self.witness) != self.size:
                raise AssertionError("size differs from witness cardinality")
            if not verify_point_set(self.witness).ok:
                raise AssertionError("witness is not an integral point set")
        if self.status == "formula_certified" and (self.upper_bound != self.size or not self.construction):
            raise AssertionError("formula_certified needs a matching construction and upper bound")

    @property
    def q(self) -> int:
        return self.field.q

    def record(self, timing: bool = True) -> str:
        """One-line machine-readable record: m q size status elapsed witness..."""
        elapsed = f"{self.elapsed:.3f}" if timing else "-"
        return " ".join([str(self.m), self.field.descriptor, str(self.size), self.status, elapsed,
                         *(str(p) for p in self.witness)])


# -- branch and bound ---------------------------------------------------------

class _Timeout(Exception):
    pass


class _BranchAndBound:
    """Maximum clique in a local graph given by bitsets, strictly above ``best``."""

    def __init__(self, adj: list[int], best: int, deadline: float | None):
        self.adj = adj
        self.best = best
        self.best_clique: list[int] | None = None
        self.deadline = deadline
        self.nodes = 0
        self._stack: list[int] = []

    def run(self, candidates: int) -> bool:
        """True when the search finished, False on timeout."""
        try:
            if candidates:
                self._expand(candidates, 0)
            return True
        except _Timeout:
            return False

    def _expand(self, P: int, size: int):
        self.nodes += 1
        if self.deadline is not None and not self.nodes & 255 and time.monotonic() > self.deadline:
            raise _Timeout
        adj = self.adj
        # greedy sequential colouring: class k takes the lowest vertices that fit
        order, colours = [], []
        U, k = P, 0
        while U:
            k += 1
            Q = U
            while Q:
                low = Q & -Q
                v = low.bit_length() - 1
                Q &= ~adj[v]
                Q ^= low
                U ^= low
                order.append(v)
                colours.append(k)
        stack = self._stack
        for i in range(len(order) - 1, -1, -1):
            if size + colours[i] <= self.best:
                return
            v = order[i]
            stack.append(v)
            nxt = P & adj[v]
            if nxt:
                self._expand(nxt, size + 1)
            elif size + 1 > self.best:
                self.best = size + 1
                self.best_clique = list(stack)
            stack.pop()
            P &= ~(1 << v)


@dataclass(frozen=True)
class _Task:
    descriptor: str
    m: int
    kind: str                    # "integral" or "isotropic" connection set
    prescribed: tuple[int, ...]  # canonical indices, already a clique
    candidates: tuple[int, ...]  # canonical indices adjacent to all prescribed
    target: int                  # report only cliques of total size > target
    deadline: float | None


class _TaskResult(NamedTuple):
    clique: tuple[int, ...] | None   # full clique (prescribed included) if size > target
    complete: bool
    nodes: int


def _local_adjacency(g: IntegralityGraph, kind: str, verts: np.ndarray) -> np.ndarray:
    conn = g.connection if kind == "integral" else g.isotropic
    d = g.diff_index(verts[:, None], verts[None, :])
    return conn[d]


def _run_task(task: _Task, best: int | None = None) -> _TaskResult:
    g = _graph(task.descriptor, task.m)
    base = len(task.prescribed)
    target = task.target if best is None else max(task.target, best)
    cand = np.array(task.candidates, dtype=np.int64)
    if cand.size == 0 or base + cand.size <= target:
        return _TaskResult(None, True, 0)
    if task.deadline is not None and time.monotonic() > task.deadline:
        return _TaskResult(None, False, 0)
    a = _local_adjacency(g, task.kind, cand)
    deg = a.sum(axis=1)
    # degree descending, ties by canonical index (cand is sorted)
    order = np.lexsort((cand, -deg))
    a = a[np.ix_(order, order)]
    verts = cand[order]
    adj = [_mask_to_int(row) for row in a]
    bnb = _BranchAndBound(adj, target - base, task.deadline)
    complete = bnb.run((1 << len(verts)) - 1)
    clique = None
    if bnb.best_clique is not None:
        clique = tuple(sorted(task.prescribed + tuple(int(verts[i]) for i in bnb.best_clique)))
    return _TaskResult(clique, complete, bnb.nodes)


def _run_tasks(tasks: list[_Task], workers: int) -> list[_TaskResult]:
    """Serial runs share the incumbent in branch order; parallel runs keep branches independent.

    Both give the same final answer and witness: the incumbent never
    exceeds the optimum, so the first optimal clique in depth-first order
    of the lowest optimal branch is found either way.
    """
    if workers <= 1 or len(tasks) <= 1:
        out, best = [], None
        for t in tasks:
            r = _run_task(t, best)
            if r.clique is not None:
                best = len(r.clique)
            out.append(r)
        return out
    with ProcessPoolExecutor(max_workers=workers, mp_context=get_context("spawn")) as pool:
        return list(pool.map(_run_task, tasks))


# -- symmetry -----------------------------------------------------------------

def _linear_generators(f: GF, m: int) -> list[np.ndarray]:
    """Matrices in OZ(m,q): coordinate swaps, sign flips, plane rotations, a primitive scalar."""
    gens = []
    eye = np.eye(m, dtype=np.int64)
    for i in range(m - 1):
        p = eye.copy()
        p[[i, i + 1]] = p[[i + 1, i]]
        gens.append(p)
    for i in range(m):
        s = eye.copy()
        s[i, i] = f.neg(1)
        gens.append(s)
    rotations = [t for t in pyth_triples(f, 1) if t.beta != 0]
    for i in range(m - 1):
        for t in rotations:
            r = eye.copy()
            r[i, i], r[i, i + 1], r[i + 1, i], r[i + 1, i + 1] = t.alpha, t.beta, f.neg(t.beta), t.alpha
            gens.append(r)
    gens.append(eye * f.primitive_element())
    return gens


def _apply_linear(g: IntegralityGraph, a: np.ndarray) -> np.ndarray:
    f, x = g.field, g.coords
    img = None
    for j in range(g.m):
        term = f.mul_arr(a[None, :, j], x[:, j, None])
        img = term if img is None else f.add_arr(img, term)
    return index_of(f, img)


def _stabiliser_perms(g: IntegralityGraph, fixed: tuple[int, ...]) -> list[np.ndarray]:
    """Point permutations x -> A x + t (A a generator or -E, t in fixed) mapping ``fixed`` onto itself.

    Frobenius maps are added for prime-power q.  Every linear part is
    checked to preserve the connection set before use.
    """
    f = g.field
    linear = [_apply_linear(g, a) for a in _linear_generators(f, g.m)]
    linear.append(_apply_linear(g, np.eye(g.m, dtype=np.int64) * f.neg(1)))
    if f.r > 1:
        frob = np.array([f.frobenius(x, 1) for x in range(f.q)], dtype=np.int64)
        linear.append(index_of(f, frob[g.coords]))
    target = set(fixed)
    perms = []
    for lin in linear:
        if not np.array_equal(g.connection[lin], g.connection):
            raise AssertionError("generator does not preserve integral distances")
        if not np.array_equal(g.isotropic[lin], g.isotropic):
            raise AssertionError("generator does not preserve isotropy")
        for t in fixed:
            tc = g.coords[t]
            perm = index_of(f, f.add_arr(g.coords[lin], tc[None, :]))
            if {int(perm[x]) for x in fixed} == target:
                perms.append(perm)
    return perms


def _orbit_labels(g: IntegralityGraph, perms: list[np.ndarray]) -> np.ndarray:
    n = g.n
    if not perms:
        return np.arange(n)
    src = np.concatenate([np.arange(n)] * len(perms))
    dst = np.concatenate(perms)
    adj = coo_matrix((np.ones(src.size, dtype=np.int8), (src, dst)), shape=(n, n))
    _, labels = connected_components(adj, directed=True, connection="weak")
    return labels


def _first_level_tasks(g: IntegralityGraph, kind: str, prescribed: tuple[int, ...], target: int,
                       deadline: float | None, symmetry: bool) -> list[_Task]:
    conn = g.connection if kind == "integral" else g.isotropic
    cand = np.ones(g.n, dtype=bool)
    for p in prescribed:
        cand &= conn[g.diff_index(np.arange(g.n), p)]
    cand = np.flatnonzero(cand)
    if cand.size == 0:
        return []
    if symmetry:
        labels = _orbit_labels(g, _stabiliser_perms(g, prescribed))[cand]
    else:
        labels = np.arange(cand.size)
    # orbits ranked by their smallest canonical member
    reps = {}
    for v, lab in zip(cand, labels):
        reps.setdefault(int(lab), int(v))
    rank = {lab: i for i, lab in enumerate(sorted(reps, key=reps.get))}
    ranks = np.array([rank[int(lab)] for lab in labels])
    tasks = []
    for lab in sorted(reps, key=reps.get):
        r, i = reps[lab], rank[lab]
        allowed = cand[(ranks >= i) & (cand != r)]
        if allowed.size:
            allowed = allowed[conn[g.diff_index(allowed, r)]]
        tasks.append(_Task(g.field.descriptor, g.m, kind, tuple(sorted(prescribed + (r,))),
                           tuple(int(x) for x in allowed), target, deadline))
    return tasks


def _collect(g: IntegralityGraph, results: list[_TaskResult]):
    best, nodes, complete = None, 0, True
    for r in results:
        nodes += r.nodes
        complete &= r.complete
        if r.clique is not None and (best is None or len(r.clique) > len(best)):
            best = r.clique
    return best, complete, nodes


def _points(g: IntegralityGraph, idx) -> tuple[Point, ...]:
    return tuple(Point.from_index(g.field, g.m, int(i)) for i in idx)


# -- public search ------------------------------------------------------------

def max_clique(m: int, q, config: SearchConfig | None = None) -> CliqueResult:
    """Maximum clique of the integral-distance graph, optionally through prescribed points.

    Without prescribed points the vertex 0 is fixed and the first level
    branches over orbits of its stabiliser (``symmetry=True``) or over
    single vertices (``symmetry=False``).
    """
    config = config or SearchConfig()
    start = time.monotonic()
    g = build_graph(m, q)
    deadline = start + config.time_limit if config.time_limit else None
    for p in config.prescribed:
        if p.field != g.field or p.m != m:
            raise ValueError("prescribed points live in a different space")
    prescribed = tuple(sorted({p.index for p in config.prescribed})) or (0,)
    floor = len(prescribed)
    tasks = _first_level_tasks(g, "integral", prescribed, floor, deadline, config.symmetry)
    best, complete, nodes = _collect(g, _run_tasks(tasks, config.workers))
    witness = _points(g, best if best is not None else prescribed)
    return CliqueResult(m, g.field, len(witness), witness, "optimal" if complete else "lower_bound",
                        "prescribed_pair" if config.prescribed else "none",
                        time.monotonic() - start, nodes=nodes)


def _pair_search(g: IntegralityGraph, target: int, deadline, workers: int, isotropic: bool):
    """Cliques larger than ``target``, split by the first pair of points they contain.

    Any clique with a pair at nonzero-square distance maps to one through
    {0, e1}; any other clique of size >= 2 has all distances zero and maps
    to one through {0, z} for a fixed isotropic z.
    """
    e1 = Point.unit(g.field, g.m, 0).index
    tasks = _first_level_tasks(g, "integral", (0, e1), target, deadline, True)
    if isotropic:
        iso = np.flatnonzero(g.isotropic)
        if iso.size:
            tasks += _first_level_tasks(g, "isotropic", (0, int(iso[0])), target, deadline, False)
    return _collect(g, _run_tasks(tasks, workers))


def compute_I(m: int, q, config: SearchConfig | None = None, *, confirm: bool = False,
              cache: "ResultCache | None" = None) -> CliqueResult:
    """Exact I(m,q) by formula where available, otherwise by reduced search."""
    config = config or SearchConfig()
    if config.prescribed:
        raise ValueError("compute_I chooses its own prescribed points")
    if isinstance(q, int) and q % 2 == 0:
        size, con = constructions.lower_bound(m, q)
        return CliqueResult(m, con.field, size, (), "formula_certified", "construction",
                            upper_bound=size, construction="space")
    f = as_field(q)
    if cache is not None:
        hit = cache.get(f, m, "auto", config)
        if hit is not None:
            return hit
    result = _compute_I(m, f, config, confirm)
    if cache is not None:
        cache.put(result, "auto", config)
    return result


def _compute_I(m: int, f: GF, config: SearchConfig, confirm: bool) -> CliqueResult:
    start = time.monotonic()
    q = f.q
    if m == 1 or m == 2:
        con = constructions.line(m, f)
        res = CliqueResult(m, f, q, con.points, "formula_certified", "construction",
                           time.monotonic() - start, upper_bound=q, construction="line")
        if confirm and m == 2:
            found = max_clique(m, f, replace(config, prescribed=()))
            if found.size != q:
                raise AssertionError(f"search gives {found.size} for I(2,{q})")
        return res
    if m == 3 and q % 4 == 1:
        con = constructions.hyperplane_q1mod4(f)
        return CliqueResult(m, f, q * q, con.points, "formula_certified", "construction",
                            time.monotonic() - start, upper_bound=q * q, construction=con.name)
    deadline = start + config.time_limit if config.time_limit else None
    g = build_graph(m, f)
    if m == 3:
        # q = 3 mod 4: a clique without a nonzero-square distance has at most q points
        base = constructions.line(3, f)
        best, complete, nodes = _pair_search(g, q, deadline, config.workers, isotropic=False)
    else:
        _, base = constructions.lower_bound(m, f)
        best, complete, nodes = _pair_search(g, len(base), deadline, config.workers, isotropic=True)
    witness = _points(g, best) if best is not None else base.points
    return CliqueResult(m, f, len(witness), witness, "optimal" if complete else "lower_bound",
                        "prescribed_pair", time.monotonic() - start, nodes=nodes)


# -- result cache -------------------------------------------------------------

class ResultCache:
    """Append-only text records ``fieldspec|m|reduction@mode#hash|size|status|witness``.

    ``hash`` is ``SearchConfig.key()``; the last matching record wins.
    """

    FILENAME = "results.txt"

    def __init__(self, directory):
        self.path = Path(directory) / self.FILENAME

    @classmethod
    def from_env(cls) -> "ResultCache | None":
        d = os.environ.get("QFINT_CACHE_DIR")
        return cls(d) if d else None

    def _records(self):
        if not self.path.exists():
            return
        for line in self.path.read_text().splitlines():
            parts = line.split("|")
            if len(parts) == 6:
                yield parts

    def get(self, f: GF, m: int, mode: str, config: SearchConfig) -> CliqueResult | None:
        key = f"{mode}#{config.key()}"
        hit = None
        for spec, mm, red, size, status, wit in self._records():
            if spec == f.descriptor and int(mm) == m and red.split("@")[-1] == key:
                hit = (red.split("@")[0], int(size), status, wit)
        if hit is None:
            return None
        reduction, size, status, wit = hit
        pts = tuple(parse_point(f, t) for t in wit.split(";")) if wit else ()
        upper = size if status == "formula_certified" else None
        con = "cached" if status == "formula_certified" else None
        return CliqueResult(m, f, size, pts, status, reduction, 0.0, upper_bound=upper, construction=con)

    def put(self, result: CliqueResult, mode: str, config: SearchConfig):
        self.path.parent.mkdir(parents=True, exist_ok=True)
        wit = ";".join(str(p) for p in result.witness)
        red = f"{result.reduction}@{mode}#{config.key()}"
        line = "|".join([result.field.descriptor, str(result.m), red, str(result.size), result.status, wit])
        with open(self.path, "a") as fh:
            fh.write(line + "\n")


# -- DIMACS -------------------------------------------------------------------

def export_dimacs(g: IntegralityGraph, destination) -> int:
    """Write the graph in DIMACS edge format (vertex = canonical index + 1); returns the edge count."""
    count = g.edge_count()
    with open(destination, "w") as fh:
        fh.write(f"c integral distance graph m={g.m} q={g.field.descriptor}\n")
        fh.write(f"p edge {g.n} {count}\n")
        written = 0
        for i, j in g.edges():
            fh.write(f"e {i + 1} {j + 1}\n")
            written += 1
    if written != count:
        raise AssertionError(f"wrote {written} edges, expected {count}")
    return count


def read_dimacs(source) -> tuple[int, set[tuple[int, int]]]:
    """(vertex count, set of 0-based edges (i, j) with i < j)."""
    n, declared, edges = None, None, set()
    with open(source) as fh:
        for line in fh:
            parts = line.split()
            if not parts or parts[0] == "c":
                continue
            if parts[0] == "p":
                n, declared = int(parts[2]), int(parts[3])
            elif parts[0] == "e":
                i, j = int(parts[1]) - 1, int(parts[2]) - 1
                edges.add((min(i, j), max(i, j)))
    if n is None:
        raise ValueError("missing problem line")
    if declared != len(edges):
        raise ValueError(f"header declares {declared} edges, found {len(edges)}")
    return n, edges


__all__ = [
    "CliqueResult", "IntegralityGraph", "PointSetCheck", "ResultCache", "SearchConfig",
    "build_graph", "compute_I", "export_dimacs", "max_clique", "read_dimacs", "verify_point_set",
]
