from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from decmatch.graph import GraphError, is_integral_matching
from decmatch.oracle import exact_mwm
from decmatch.small_match import SmallMatchEngine, greedy_maximal_matching

from helpers import build, multigraphs

EPS = Fraction(1, 5)


def test_greedy_matching_is_maximal():
    g = build(5, [(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 4, 1)])
    M = greedy_maximal_matching(g)
    assert M == [0, 2]
    covered = {v for e in M for v in g.ends(e)}
    assert all(set(g.ends(e)) & covered for e in g.edges())


def test_core_keeps_heaviest_distinct_neighbours():
    # star centre 0 with parallel edges to leaf 1; the cover is {0, 1}
    g = build(6, [(0, 1, 1), (0, 2, 1), (0, 2, 4), (0, 3, 2), (0, 4, 3), (0, 5, 1), (0, 1, 2)])
    eng = SmallMatchEngine(g, EPS)
    assert eng.S == frozenset({0, 1}) and eng.quota == 3
    assert eng.kept[0] == {2, 4, 3}               # leaves 2 (w=4), 4 (w=3), 3 (w=2)
    assert 6 in eng.core_edges()                  # heaviest parallel inside the cover
    assert 0 not in eng.core_edges()


@given(multigraphs(max_n=9, max_m=20), st.randoms(use_true_random=False))
@settings(max_examples=60, deadline=None)
def test_core_preserves_optimum_under_deletions(g, rnd):
    eng = SmallMatchEngine(g, EPS)
    order = list(g.edges())
    rnd.shuffle(order)
    assert exact_mwm(eng.core_graph()).value == exact_mwm(g).value
    for e in order:
        M = eng.delete(e)
        assert exact_mwm(eng.core_graph()).value == exact_mwm(g).value
        assert is_integral_matching(g, M) and g.total_weight(M) == exact_mwm(g).value


def test_threshold_guard():
    g = build(4, [(0, 1, 4), (2, 3, 4)])
    with pytest.raises(GraphError, match="threshold"):
        SmallMatchEngine(g, EPS, threshold=7)
    SmallMatchEngine(g, EPS, threshold=8)


def test_recompute_only_when_output_edge_dies():
    g = build(6, [(0, 1, 3), (2, 3, 3), (4, 5, 1), (1, 2, 1)])
    eng = SmallMatchEngine(g, EPS)
    before = eng.recomputes
    eng.delete(3)
    assert eng.recomputes == before
    eng.delete(0)
    assert eng.recomputes == before + 1
