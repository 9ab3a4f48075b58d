from fractions import Fraction

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from decmatch.blossom import max_weight_matching
from decmatch.oracle import exact_mwm
from decmatch.static_match import (GeneralDuals, as_epsilon, exact_general_duals, is_laminar, round_to_grid,
                                   shrink_large_blossoms, static_weighted_match, undercovered_edges,
                                   verify_certificate)

from helpers import build, multigraphs, random_multigraph

F = Fraction
EPSILONS = [F(1, 2), F(1, 3), F(1, 5), F(1, 8)]


@pytest.mark.parametrize("bad", [F(2, 5), F(1), F(0), F(-1, 3), F(3, 2)])
def test_epsilon_must_be_unit_fraction(bad):
    with pytest.raises(ValueError):
        as_epsilon(bad)


def test_blossom_agrees_with_networkx_on_larger_graphs():
    rng = np.random.default_rng(11)
    for _ in range(40):
        n = int(rng.integers(10, 40))
        edges = {}
        for _ in range(int(rng.integers(n, 4 * n))):
            u, v = sorted(int(a) for a in rng.choice(n, size=2, replace=False))
            edges[(u, v)] = int(rng.integers(1, 30))
        elist = [(u, v, w) for (u, v), w in edges.items()]
        res = max_weight_matching(n, elist)
        mine = sum(elist[k][2] for k in set(res.mate_edge) if k >= 0)
        G = nx.Graph()
        G.add_weighted_edges_from((u, v, w) for (u, v), w in edges.items())
        ref = sum(G[u][v]["weight"] for u, v in nx.max_weight_matching(G))
        assert mine == ref


@given(multigraphs(max_n=10, max_m=18))
@settings(max_examples=150, deadline=None)
def test_exact_duals_are_a_tight_certificate(g):
    matching, duals = exact_general_duals(g)
    opt = exact_mwm(g).value
    assert g.total_weight(matching) == opt
    assert duals.objective() == opt
    assert undercovered_edges(g, duals, F(0)) == []
    assert is_laminar(duals.omega)
    assert all(len(B) % 2 == 1 for B in duals.omega)


@given(multigraphs(max_n=12, max_m=22), st.sampled_from(EPSILONS), st.booleans())
@settings(max_examples=150, deadline=None)
def test_certificate_items_hold(g, eps, grid):
    cert = static_weighted_match(g, eps, grid=grid)
    rep = verify_certificate(g, cert, grid=grid)
    assert rep.ok, (rep.items, rep.uncovered)
    assert rep.items["4_grid"] is (True if grid else None)
    assert cert.f == cert.duals.objective()


def test_large_blossom_dual_moves_onto_vertices():
    eps = F(1, 4)                                  # 3/eps = 12
    big = frozenset(range(13))
    small = frozenset(range(20, 31))               # 11 vertices, stays
    duals = GeneralDuals({v: F(1, 2) for v in range(31)}, {big: eps, small: eps}, [big, small])
    out, inflation = shrink_large_blossoms(duals, eps)
    assert big not in out.r and big not in out.omega
    assert out.r == {small: eps}
    assert all(out.y[v] == F(1, 2) + F(1, 8) for v in big)
    assert inflation == F(1, 8)
    assert out.objective() == duals.objective() + inflation
    # coverage never drops
    for u in range(31):
        for v in range(u + 1, 31):
            assert out.yr(u, v) >= duals.yr(u, v)


def test_shrink_threshold_is_exclusive_at_three_over_eps():
    eps = F(1, 4)
    B = frozenset(range(12))
    duals = GeneralDuals({}, {B: F(1)}, [B])
    out, inflation = shrink_large_blossoms(duals, eps)
    assert out.r == {B: F(1)} and inflation == 0


def test_grid_rounding_only_goes_up():
    duals = GeneralDuals({0: F(1, 7), 1: F(2, 5)}, {frozenset({0, 1, 2}): F(1, 9)}, [frozenset({0, 1, 2})])
    out, inflation = round_to_grid(duals, F(1, 5))
    assert out.y == {0: F(1, 5), 1: F(2, 5)}
    assert out.r == {frozenset({0, 1, 2}): F(1, 5)}
    assert inflation == F(1, 5) - F(1, 7) + F(1, 5) - F(1, 9)


def test_laminarity_check():
    assert is_laminar([frozenset({1, 2, 3}), frozenset({1, 2, 3, 4, 5}), frozenset({7, 8, 9})])
    assert not is_laminar([frozenset({1, 2, 3}), frozenset({3, 4, 5})])


def test_verifier_catches_lowered_vertex_dual():
    # dropping a dual by more than eps * w breaks (1 - eps) coverage for some edge
    rng = np.random.default_rng(3)
    eps = F(1, 5)
    caught = 0
    for _ in range(30):
        g = random_multigraph(rng, 8, 14)
        cert = static_weighted_match(g, eps)
        tight = [(e, u, v, w) for e, u, v, w in g.edge_tuples() if cert.duals.yr(u, v) == w]
        if not tight:
            continue
        e, u, v, w = tight[0]
        cert.duals.y[u] -= eps * w + F(1, 100)
        rep = verify_certificate(g, cert)
        assert rep.items["5_coverage"] is False and e in rep.uncovered
        caught += 1
    assert caught >= 20


def test_verifier_catches_wrong_matching_and_weight():
    g = build(4, [(0, 1, 1), (1, 2, 4), (2, 3, 1)])
    cert = static_weighted_match(g, F(1, 5))
    assert cert.matching == [1]
    cert.matching = [0, 2]                          # valid but weight 2 < (4/5) * 4
    assert verify_certificate(g, cert).items["1_weight"] is False
    cert.matching = [0, 1]
    assert verify_certificate(g, cert).items["matching_valid"] is False


def test_verifier_skips_oracle_items_on_large_graphs():
    g = build(40, [(2 * i, 2 * i + 1, 1) for i in range(20)])
    rep = verify_certificate(g, static_weighted_match(g, F(1, 5)))
    assert rep.items["1_weight"] is None and "skipped" in rep.notes["1_weight"]
    assert rep.ok


@pytest.mark.parametrize("eps", EPSILONS)
def test_rescaling_a_barely_covered_edge(eps):
    # an edge covered at exactly (1 - eps) w: multiplying by (1 + eps) falls short,
    # dividing by (1 - eps) restores full coverage
    g = build(2, [(0, 1, 4)])
    duals = GeneralDuals({0: (1 - eps) * 2, 1: (1 - eps) * 2}, {}, [])
    assert undercovered_edges(g, duals, eps) == []
    assert (1 + eps) * duals.yr(0, 1) < 4
    assert duals.yr(0, 1) / (1 - eps) == 4
