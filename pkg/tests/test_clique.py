import itertools

import pytest

from qfint import constructions
from qfint.clique import (CliqueResult, ResultCache, SearchConfig, build_graph, compute_I, export_dimacs,
                          max_clique, read_dimacs, verify_point_set)
from qfint.counting import counts_closed
from qfint.ffield import as_field, prime_power
from qfint.geometry import Point
from qfint.known import KNOWN_I, example_f27, example_q3, example_q7

import oracles


@pytest.mark.parametrize("m,q", [(1, 3), (2, 3), (2, 5), (2, 9), (3, 3), (1, 27), (1, 25)])
def test_graph_matches_oracle(m, q):
    g = build_graph(m, q)
    O = oracles.PolyField(*prime_power(q))
    sq = O.squares()
    pts = list(oracles.points(O, m))
    for i in range(g.n):
        expect = {j for j in range(g.n) if j != i and oracles.integral(O, pts[i], pts[j], sq)}
        assert set(g.neighbors(i).tolist()) == expect
    assert g.degree == counts_closed(m, q).D


@pytest.mark.parametrize("m,q", [(2, 3), (2, 5), (2, 7), (3, 3), (2, 9), (4, 3)])
def test_clique_number_matches_networkx(m, q):
    expect = oracles.max_clique_size(oracles.PolyField(*prime_power(q)), m)
    assert max_clique(m, q).size == expect
    assert max_clique(m, q, SearchConfig(symmetry=False)).size == expect


def test_examples():
    assert max_clique(3, 3).size == 4
    assert max_clique(2, 7).size == 7
    assert max_clique(4, 3).size == 9
    r = compute_I(3, 7)
    assert (r.size, r.status) == (8, "optimal")
    r = compute_I(3, 13)
    assert (r.size, r.status) == (169, "formula_certified")


def test_pair_reduction_agrees_with_plain_search():
    for m, q in [(3, 3), (3, 7)]:
        plain = max_clique(m, q, SearchConfig(symmetry=False))
        reduced = compute_I(m, q)
        assert plain.size == reduced.size == KNOWN_I[(m, q)]
        assert reduced.reduction == "prescribed_pair"
        assert verify_point_set(reduced.witness).ok


def test_prescribed_points():
    f = as_field(7)
    pre = (Point(f, (0, 0, 0)), Point(f, (1, 0, 0)))
    r = max_clique(3, 7, SearchConfig(prescribed=pre))
    assert r.size == 8 and set(pre) <= set(r.witness)
    assert r.reduction == "prescribed_pair"
    bad = (Point(f, (0, 0, 0)), Point(f, (1, 1, 1)))
    with pytest.raises(ValueError):
        SearchConfig(prescribed=bad)
    with pytest.raises(ValueError):
        compute_I(3, 7, SearchConfig(prescribed=pre))


def test_translation_invariance_of_clique_number():
    f = as_field(3)
    for t in [Point(f, (1, 2, 0)), Point(f, (2, 2, 2))]:
        pre = (t, t + Point(f, (1, 0, 0)))
        assert max_clique(3, 3, SearchConfig(prescribed=pre)).size == 4


def test_time_limit_degrades_to_lower_bound():
    r = compute_I(3, 19, SearchConfig(time_limit=0.2))
    assert r.status == "lower_bound"
    assert r.size >= 19 and verify_point_set(r.witness).ok


def test_formula_cases():
    assert compute_I(2, 11).size == 11
    assert compute_I(2, 5, confirm=True).status == "formula_certified"
    assert compute_I(3, 5).witness == tuple(sorted(constructions.hyperplane_q1mod4(5).points, key=lambda p: p.index))
    r = compute_I(3, 4)
    assert (r.size, r.status) == (64, "formula_certified")


def test_worker_count_does_not_change_result():
    one = compute_I(4, 3, SearchConfig(workers=1))
    two = compute_I(4, 3, SearchConfig(workers=2))
    assert one.record(timing=False) == two.record(timing=False)


def test_cache_round_trip(tmp_path):
    cache = ResultCache(tmp_path)
    cfg = SearchConfig()
    fresh = compute_I(3, 7, cfg, cache=cache)
    again = compute_I(3, 7, cfg, cache=cache)
    assert again.record(timing=False) == fresh.record(timing=False)
    assert again.record(timing=False) == compute_I(3, 7, cfg).record(timing=False)
    assert cache.get(as_field(11), 3, "auto", cfg) is None
    lines = (tmp_path / "results.txt").read_text().splitlines()
    assert len(lines) == 1 and lines[0].startswith("7|3|prescribed_pair@auto#")


def test_result_invariants():
    f = as_field(3)
    with pytest.raises(AssertionError):
        CliqueResult(2, f, 3, (Point(f, (0, 0)),), "optimal", "none")
    with pytest.raises(AssertionError):
        CliqueResult(2, f, 2, (Point(f, (0, 0)), Point(f, (1, 1))), "optimal", "none")
    with pytest.raises(ValueError):
        CliqueResult(2, f, 0, (), "great", "none")


def test_verify_point_set_examples():
    assert verify_point_set(example_q3()).ok
    assert verify_point_set(example_q7()).ok
    check = verify_point_set(example_f27())
    assert not check.ok and check.pair is not None


@pytest.mark.parametrize("m,q", [(1, 3), (2, 3), (3, 5), (2, 9)])
def test_dimacs_round_trip(tmp_path, m, q):
    g = build_graph(m, q)
    path = tmp_path / "g.col"
    count = export_dimacs(g, path)
    assert count == q**m * counts_closed(m, q).D // 2
    n, edges = read_dimacs(path)
    assert n == q**m and len(edges) == count
    assert edges == {(i, j) for i, j in itertools.combinations(range(n), 2) if g.adjacent(i, j)}


def test_dimacs_triangle(tmp_path):
    path = tmp_path / "t.col"
    export_dimacs(build_graph(1, 3), path)
    assert "p edge 3 3" in path.read_text()
