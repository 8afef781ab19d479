"""Acceptance criteria 1-12.  Each test records one PASS/FAIL line, printed at the end of the run."""

import itertools
import os
import random
import subprocess
import sys
import time

import pytest

from qfint import constructions as C
from qfint.clique import build_graph, compute_I, export_dimacs, read_dimacs, verify_point_set
from qfint.counting import (common_adjacent_closed, common_neighbors_brute, counts_brute, counts_closed,
                            counts_recursive, srg_report, verify_conjecture)
from qfint.ffield import as_field
from qfint.geometry import Point, count_circle, pyth_triples, pyth_triples_brute
from qfint.known import F27_DESCRIPTOR, KNOWN_I, example_f27
from qfint.symmetry import (enumerate_aut_linear, enumerate_O_brute, is_orthogonal, order_O, order_OZ,
                            sample_same_norm_pairs, transitivity_witness)

from conftest import ACCEPTANCE

ODD_PRIME_POWERS = [3, 5, 7, 9, 11, 13, 17, 19, 23, 25, 27, 29, 31, 37, 41, 43, 47, 49]


def record(label, ok, detail=""):
    print(f"{'PASS' if ok else 'FAIL'}  {label}  {detail}")
    ACCEPTANCE.append((label, ok, detail))
    assert ok, f"{label}: {detail}"


def _timed_I(m, q, limit=None):
    from qfint.clique import SearchConfig
    t = time.monotonic()
    r = compute_I(m, q, SearchConfig(time_limit=limit))
    return r, time.monotonic() - t


def test_c01_table_values():
    budgets = {(3, 3): 60, (3, 5): 60, (3, 7): 60, (3, 11): 1800, (3, 13): 1.0}
    bad = []
    for (m, q), limit in budgets.items():
        r, secs = _timed_I(m, q, limit)
        want_status = "formula_certified" if q % 4 == 1 else "optimal"
        if r.size != KNOWN_I[(m, q)] or r.status != want_status or secs > limit:
            bad.append(f"({m},{q}) -> {r.size} {r.status} {secs:.1f}s")
        if not verify_point_set(r.witness).ok:
            bad.append(f"({m},{q}) witness")
    record("C1 I(3,q) for q in 3,5,7,11,13", not bad, "; ".join(bad) or "all exact within budget")


@pytest.mark.slow
def test_c01_optional_extended():
    notes = []
    ok = True
    for m, q in [(3, 17), (3, 19)]:
        r, secs = _timed_I(m, q, 7200)
        notes.append(f"({m},{q})={r.size} {r.status} {secs:.0f}s")
        if r.status == "lower_bound":
            continue  # soft failure, allowed for the optional targets
        ok &= r.size == KNOWN_I[(m, q)]
    record("C1 optional (3,17), (3,19)", ok, ", ".join(notes))


def test_c02_higher_dimensions():
    t0 = time.monotonic()
    bad = []
    for m, q in [(4, 3), (5, 3), (4, 5)]:
        r, _ = _timed_I(m, q, 1800)
        if r.size != KNOWN_I[(m, q)] or r.status != "optimal":
            bad.append(f"({m},{q}) -> {r.size} {r.status}")
    total = time.monotonic() - t0
    ok = not bad and total < 1800
    record("C2 I(4,3), I(5,3), I(4,5)", ok, "; ".join(bad) or f"exact, {total:.2f}s total")


@pytest.mark.slow
def test_c02_optional_six_three():
    r, secs = _timed_I(6, 3, 7200)
    ok = r.status == "lower_bound" or r.size == KNOWN_I[(6, 3)]
    record("C2 optional I(6,3)=33", ok, f"{r.size} {r.status} {secs:.1f}s")


def test_c03_counting_oracles():
    t0 = time.monotonic()
    bad = []
    for m in range(1, 6):
        for q in [3, 5, 7, 9, 11, 13]:
            a, b, c = counts_closed(m, q), counts_recursive(m, q), counts_brute(m, q)
            if not a.values() == b.values() == c.values():
                bad.append(f"({m},{q})")
    secs = time.monotonic() - t0
    record("C3 closed = recursive = brute, m<=5", not bad and secs < 300, ", ".join(bad) or f"{secs:.2f}s")


def test_c04_neighbour_counts():
    bad = []
    for m in range(1, 5):
        for q in [3, 5, 7, 9, 11, 13]:
            f = as_field(q)
            got = common_neighbors_brute(Point.zero(f, m), Point.unit(f, m, 0))
            if got != common_adjacent_closed(m, q):
                bad.append(f"({m},{q}) {got}")
    ok = not bad and common_adjacent_closed(3, 5) == 59 and common_adjacent_closed(3, 7) == 77
    record("C4 common neighbours of 0, e1 equal A(m,q)", ok, ", ".join(bad) or "A(3,5)=59, A(3,7)=77")


def test_c05_conjecture():
    t0 = time.monotonic()
    r3, r4 = verify_conjecture(3, 101), verify_conjecture(4, 13)
    secs = time.monotonic() - t0
    ok = r3.agrees and r4.agrees and secs < 600
    detail = f"m=3 p<=101 and m=4 p<=13 agree, {secs:.1f}s"
    if not ok:
        detail = f"counterexamples {r3.counterexample} {r4.counterexample}, {secs:.1f}s"
    record("C5 conjectured common-neighbour counts", ok, detail)


def test_c06_srg():
    r = srg_report(2, 5)
    ok = (r.v, r.k, r.lam, r.mu) == (25, 16, 9, 12) and r.is_srg
    odd = [srg_report(3, q) for q in [3, 5, 7, 9, 11, 13]]
    ok &= all(not x.is_integral_mu and x.is_srg is False for x in odd)
    ok &= srg_report(4, 3).is_srg is True and srg_report(4, 5).is_srg is True
    ok &= srg_report(4, 3).method == "brute" == srg_report(4, 5).method
    record("C6 SRG parameters", ok, "(25,16,9,12); mu non-integral for m=3; (4,3), (4,5) SRG by enumeration")


def test_c07_group_orders():
    t0 = time.monotonic()
    expect = {(2, 3): 8, (2, 5): 8, (2, 7): 16, (2, 9): 16, (3, 3): 48}
    ok = all(enumerate_O_brute(m, q) == v == order_O(m, q) for (m, q), v in expect.items())
    ratios = {(3, 3): 1, (2, 5): 2, (2, 9): 3}
    ok &= all(enumerate_aut_linear(m, q) == k * order_OZ(m, q) for (m, q), k in ratios.items())
    secs = time.monotonic() - t0
    record("C7 group orders by enumeration", ok and secs < 600, f"{secs:.1f}s")


def test_c08_pythagorean():
    bad = []
    for q in ODD_PRIME_POWERS:
        total = 0
        for g in range(q):
            n = len(pyth_triples(q, g))
            g2 = as_field(q).square(g)
            if n != count_circle(q, g2) or n != ((2 * q - 1 if g == 0 else q - 1) if q % 4 == 1
                                                 else (1 if g == 0 else q + 1)):
                bad.append(f"q={q} g={g}")
            if q <= 27 and set(pyth_triples(q, g)) != pyth_triples_brute(q, g):
                bad.append(f"q={q} g={g} set")
            total += n
        if total != q * q:
            bad.append(f"q={q} total {total}")
    record("C8 Pythagorean triples", not bad, ", ".join(bad) or f"{len(ODD_PRIME_POWERS)} fields")


def test_c09_orbit_witnesses():
    failures, tried = 0, 0
    for m in (2, 3):
        for q in [3, 5, 7, 9, 11, 13]:
            f = as_field(q)
            rng = random.Random(1000 * m + q)
            for u, v in sample_same_norm_pairs(f, m, 100, rng):
                tried += 1
                try:
                    a = transitivity_witness(u, v)
                    failures += not (is_orthogonal(a) and a @ u == v)
                except Exception:
                    failures += 1
    record("C9 transitivity witnesses", failures == 0, f"{tried} pairs, {failures} failures")


def test_c10_constructions():
    bad = []
    for q in [5, 9, 13, 17, 25]:
        if len(C.hyperplane_q1mod4(q)) != q * q:
            bad.append(f"hyperplane {q}")
    for q in [3, 7, 11, 19, 23, 27]:
        if len(C.circle_plus_line(q)) != q:
            bad.append(f"circle {q}")
    for q in [3, 5, 7, 9, 11]:
        if len(C.isotropic_plane_4d(q)) != q * q:
            bad.append(f"isotropic {q}")
    for q in [3, 7, 11]:
        if len(C.nonintegral_plane(q)) != q * q:
            bad.append(f"nonintegral {q}")
    record("C10 constructions verify", not bad, ", ".join(bad) or "all four families")


@pytest.mark.xfail(strict=True, reason="the published 28-point F_27 set has a pair at non-square distance; "
                                       "see the decisions ledger")
def test_c10_f27_example():
    pts = example_f27()
    res = verify_point_set(pts)
    detail = "28 points integral" if res.ok else f"pair {res.pair[0]}, {res.pair[1]} is not integral"
    ok = len(pts) == 28 and len({p.coords for p in pts}) == 28 and res.ok
    record(f"C10 F_27 example under {F27_DESCRIPTOR}", ok, detail)


def test_c11_dimacs(tmp_path):
    bad = []
    for m, q in [(2, 3), (3, 5)]:
        g = build_graph(m, q)
        path = tmp_path / f"g{m}{q}.col"
        written = export_dimacs(g, path)
        n, edges = read_dimacs(path)
        if n != q**m or written != q**m * counts_closed(m, q).D // 2 or len(edges) != written:
            bad.append(f"({m},{q}) counts")
        if edges != {(i, j) for i, j in itertools.combinations(range(n), 2) if g.adjacent(i, j)}:
            bad.append(f"({m},{q}) adjacency")
    record("C11 DIMACS export and re-read", not bad, ", ".join(bad) or "18 and 5250 edges")


def test_c12_determinism():
    spec = ["3:3,5,7,11,13", "4,3", "5,3", "4,5"]
    env = {k: v for k, v in os.environ.items() if k != "QFINT_CACHE_DIR"}
    outs = {}
    for w in (1, 2, 8):
        res = subprocess.run([sys.executable, "-m", "qfint", "itable", *spec, "--deterministic", "--workers", str(w)],
                             capture_output=True, text=True, check=False, env=env)
        outs[w] = (res.returncode, res.stdout)
    ok = outs[1] == outs[2] == outs[8] and outs[1][0] == 0
    record("C12 byte-identical output for 1, 2, 8 workers", ok, f"{len(outs[1][1])} bytes")
