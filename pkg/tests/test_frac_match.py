import json
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from decmatch.frac_match import (BWD, FWD, InvariantViolation, check_invariants, init_state, is_acyclic,
                                 running, step, weighted_frac_match, weighted_frac_match_general)
from decmatch.graph import GraphError, check_fractional, check_small_odd_sets, double_cover, matching_value
from decmatch.oracle import exact_bipartite_frac_opt, exact_mwm

from helpers import build, multigraphs

F = Fraction
INVARIANT_KEYS = {"granularity", "domination", "tightness", "free_duals", "complementary_slackness",
                  "primal_feasible", "eligible_exclusive", "eligible_acyclic"}


def test_single_edge_reaches_its_capacity():
    g = build(2, [(0, 1, 2, F(1, 3))])
    res = weighted_frac_match(g, None, F(1, 5))
    assert res.x == {0: F(1, 3)} and res.value == F(2, 3)


def test_frozen_mixed_capacity_instance():
    g = build(8, [(0, 4, 3, F(1, 2)), (0, 5, 2, F(3, 4)), (1, 4, 4, F(1, 4)), (1, 6, 1, 1),
                  (2, 5, 3, F(5, 8)), (2, 7, 4, F(3, 8)), (3, 6, 2, F(1, 8)), (3, 7, 1, F(7, 8)),
                  (0, 4, 4, F(1, 8))])
    res = weighted_frac_match(g, None, F(1, 5))
    assert check_fractional(g, res.x).ok
    assert res.value >= (1 - 5 * F(1, 5)) * F(35, 4)
    assert res.value <= F(35, 4)


@given(multigraphs(max_n=12, max_m=18, bipartite=True, random_kappa=True),
       st.sampled_from([F(1, 3), F(1, 5), F(1, 8)]))
@settings(max_examples=80, deadline=None)
def test_solver_bound_and_invariants(g, eps):
    res = weighted_frac_match(g, None, eps)           # raises on any broken invariant
    opt = exact_bipartite_frac_opt(g).value
    assert check_fractional(g, res.x).ok
    assert res.value >= (1 - 5 * eps) * opt
    assert res.iterations <= g.W / eps + 1
    for rec in res.trace:
        assert INVARIANT_KEYS <= set(rec) and all(rec[k] for k in INVARIANT_KEYS)


def test_stops_when_free_left_duals_hit_zero():
    g = build(4, [(0, 2, 1), (1, 2, 1), (1, 3, 4)])
    res = weighted_frac_match(g, None, F(1, 4))
    s = res.state
    assert not running(s)
    assert all(s.y[u] == 0 for u in s.free_left())
    assert res.value == exact_bipartite_frac_opt(g).value == 5


def test_isolated_vertices_are_ignored():
    g = build(50, [(0, 25, 3)])
    s = init_state(g, None, F(1, 5))
    assert set(s.y) == {0, 25}


def test_non_bipartite_is_rejected():
    with pytest.raises(GraphError):
        weighted_frac_match(build(3, [(0, 1, 1), (1, 2, 1), (2, 0, 1)]), None, F(1, 5))
    with pytest.raises(GraphError):
        weighted_frac_match(build(3, [(0, 1, 1)]), None, F(1, 5), left={0, 1})


def test_invariant_checks_flag_tampered_state():
    g = build(4, [(0, 2, 3), (1, 3, 2)])
    s = init_state(g, None, F(1, 5))
    step(s)
    assert all(check_invariants(s).values())
    s.y[0] += F(1, 7)
    assert check_invariants(s)["granularity"] is False
    s.y[0] -= F(1, 7)
    s.x[0] = F(2)
    assert check_invariants(s)["primal_feasible"] is False
    with pytest.raises(InvariantViolation) as info:
        step(s)
    assert info.value.trace


def test_acyclicity_check():
    assert is_acyclic({0: [(0, FWD, 1)], 1: [(1, BWD, 2)]})
    assert not is_acyclic({0: [(0, FWD, 1)], 1: [(0, BWD, 0)]})


def test_trace_is_json_lines():
    g = build(4, [(0, 2, 3), (0, 3, 1), (1, 2, 2)])
    res = weighted_frac_match(g, None, F(1, 5))
    rows = [json.loads(ln) for ln in res.trace_jsonl().splitlines()]
    assert [r["iteration"] for r in rows] == list(range(1, res.iterations + 1))


def test_general_lift_on_triangle():
    g = build(3, [(0, 1, 2), (1, 2, 2), (0, 2, 2)])
    eps = F(1, 5)
    res = weighted_frac_match_general(g, None, eps)
    assert check_fractional(g, res.x).ok
    # the double cover allows 1/2 on each triangle edge, total 3; the blossom bound is 2
    assert res.value >= (1 - 5 * eps) * exact_mwm(g).value
    assert res.value <= 3


def test_general_group_cap_is_enforced():
    g = build(2, [(0, 1, 1, F(1, 8)), (0, 1, 1, F(1, 8))])
    weighted_frac_match_general(g, None, F(1, 5), group_cap=F(1, 4))
    with pytest.raises(GraphError):
        weighted_frac_match_general(g, None, F(1, 5), group_cap=F(1, 8))


@given(multigraphs(max_n=8, max_m=14, random_kappa=True))
@settings(max_examples=60, deadline=None)
def test_general_lift_feasible_and_within_cover_bound(g):
    eps = F(1, 5)
    res = weighted_frac_match_general(g, None, eps)
    assert check_fractional(g, res.x).ok
    bc = double_cover(g)
    cover_opt = exact_bipartite_frac_opt(bc.graph, left=bc.left).value
    assert 2 * res.value <= cover_opt
    assert 2 * res.value >= (1 - 5 * eps) * cover_opt
    if res.max_pair_flow <= eps:
        assert check_small_odd_sets(g, res.x, eps).scaled_passes
    assert matching_value(g, res.x) == res.value

