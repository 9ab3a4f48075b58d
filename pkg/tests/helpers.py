"""Shared builders, strategies and independent reference oracles."""
from __future__ import annotations

from fractions import Fraction

import numpy as np
from hypothesis import strategies as st

from decmatch.graph import WeightedMultigraph

CAPACITY_CHOICES = [Fraction(1, 8), Fraction(1, 4), Fraction(1, 3), Fraction(1, 2), Fraction(3, 4), Fraction(1)]


def build(n, edges, W=4):
    """Multigraph from (u, v, w) or (u, v, w, kappa) tuples."""
    g = WeightedMultigraph(n, W)
    for t in edges:
        g.add_edge(*t)
    return g


def random_multigraph(rng, n, m, W=4, bipartite=False, random_kappa=False):
    g = WeightedMultigraph(n, W)
    half = n // 2
    for _ in range(m):
        if bipartite:
            u = int(rng.integers(0, half))
            v = int(rng.integers(half, n))
        else:
            u, v = (int(a) for a in rng.choice(n, size=2, replace=False))
        w = int(rng.integers(1, W + 1))
        kappa = CAPACITY_CHOICES[int(rng.integers(len(CAPACITY_CHOICES)))] if random_kappa else 1
        g.add_edge(u, v, w, kappa)
    return g


@st.composite
def multigraphs(draw, max_n=8, max_m=14, W=4, bipartite=False, random_kappa=False):
    n = draw(st.integers(2 if not bipartite else 2, max_n))
    m = draw(st.integers(0, max_m))
    g = WeightedMultigraph(n, W)
    half = max(1, n // 2)
    for _ in range(m):
        if bipartite:
            u = draw(st.integers(0, half - 1))
            v = draw(st.integers(half, n - 1))
        else:
            u = draw(st.integers(0, n - 1))
            v = draw(st.integers(0, n - 1).filter(lambda t, u=u: t != u))
        w = draw(st.integers(1, W))
        kappa = draw(st.sampled_from(CAPACITY_CHOICES)) if random_kappa else 1
        g.add_edge(u, v, w, kappa)
    return g


# reference oracles, written independently of the package

def brute_mwm(g, weight=None):
    """Max total weight over all sets of pairwise disjoint alive edges (plain recursion)."""
    weight = weight or g.weight
    edges = [(e, *g.ends(e)) for e in g.edges()]
    best = 0

    def rec(i, used, val):
        nonlocal best
        if i == len(edges):
            best = max(best, val)
            return
        rec(i + 1, used, val)
        e, u, v = edges[i]
        if u not in used and v not in used:
            rec(i + 1, used | {u, v}, val + weight(e))

    rec(0, frozenset(), 0)
    return best


def lp_frac_opt(g, kappa=None):
    """Float optimum of max sum w x s.t. vertex loads <= 1, 0 <= x <= kappa (no odd-set rows)."""
    from scipy.optimize import linprog

    kappa = g.kappa if kappa is None else kappa
    ids = list(g.edges())
    if not ids:
        return 0.0
    A = np.zeros((g.n, len(ids)))
    for j, e in enumerate(ids):
        u, v = g.ends(e)
        A[u, j] = A[v, j] = 1
    res = linprog([-g.weight(e) for e in ids], A_ub=A, b_ub=np.ones(g.n),
                  bounds=[(0, float(kappa[e])) for e in ids], method="highs")
    assert res.status == 0
    return -res.fun
