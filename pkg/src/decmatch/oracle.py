"""Brute-force ground truth used by tests and the CLI verifier."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Mapping

from .graph import ONE, ZERO, GraphError, WeightedMultigraph, two_coloring

MAX_ORACLE_VERTICES = 16


class OracleError(ValueError):
    pass


@dataclass
class OracleResult:
    value: Fraction
    witness: dict  # edge id -> value (1 for integral matchings)
    dual_y: dict[int, Fraction] = field(default_factory=dict)
    dual_z: dict[int, Fraction] = field(default_factory=dict)


def _best_pair_edges(g: WeightedMultigraph) -> dict[tuple[int, int], tuple[int, int]]:
    """(u, v) -> (weight, edge id) of the heaviest parallel, lowest id on ties."""
    best: dict[tuple[int, int], tuple[int, int]] = {}
    for e, u, v, w in g.edge_tuples():
        key = (u, v) if u < v else (v, u)
        cur = best.get(key)
        if cur is None or w > cur[0]:
            best[key] = (w, e)
    return best


def exact_mwm(g: WeightedMultigraph) -> OracleResult:
    """Maximum-weight integral matching by memoized search over vertex subsets."""
    active = sorted({v for e in g.edges() for v in g.ends(e)})
    if len(active) > MAX_ORACLE_VERTICES:
        raise OracleError(f"exact_mwm limited to {MAX_ORACLE_VERTICES} non-isolated vertices, got {len(active)}")
    index = {v: i for i, v in enumerate(active)}
    k = len(active)
    nbrs: list[list[tuple[int, int, int]]] = [[] for _ in range(k)]
    for (u, v), (w, e) in _best_pair_edges(g).items():
        a, b = index[u], index[v]
        nbrs[a].append((b, w, e))
        nbrs[b].append((a, w, e))

    @lru_cache(maxsize=None)
    def best(mask: int) -> tuple[int, tuple[int, ...]]:
        if not mask:
            return 0, ()
        i = (mask & -mask).bit_length() - 1
        rest = mask & ~(1 << i)
        top = best(rest)
        for j, w, e in nbrs[i]:
            if rest >> j & 1:
                val, chosen = best(rest & ~(1 << j))
                if val + w > top[0]:
                    top = (val + w, chosen + (e,))
        return top

    value, chosen = best((1 << k) - 1)
    best.cache_clear()
    return OracleResult(Fraction(value), {e: ONE for e in chosen})


# capacitated bipartite fractional optimum via min-cost flow

def exact_bipartite_frac_opt(g: WeightedMultigraph, kappa: Mapping[int, Fraction] | None = None,
                             left: set[int] | None = None) -> OracleResult:
    """Optimum of max sum w*x s.t. x <= kappa and vertex loads <= 1, exactly.

    Successive augmentation along maximum-gain source-sink paths in the
    residual network source -> L -> R -> sink (unit vertex arcs, edge arcs of
    capacity kappa), stopping when no path has positive gain.  Node
    potentials from a final Bellman-Ford give a dual (y, z) with no gap.
    """
    kappa = g.kappa if kappa is None else kappa
    if left is None:
        side = two_coloring(g)
        if side is None:
            raise GraphError("graph is not bipartite")
        left = {v for v, s in side.items() if s == 0}
    else:
        for e, u, v, _ in g.edge_tuples():
            if (u in left) == (v in left):
                raise GraphError(f"edge {e} does not cross the given bipartition")
    n = g.n
    src, snk = n, n + 1
    # arcs: [tail, head, residual, cost, twin index, edge id or -1]
    arcs: list[list] = []

    def add_arc(a, b, cap, cost, eid):
        arcs.append([a, b, Fraction(cap), cost, len(arcs) + 1, eid])
        arcs.append([b, a, ZERO, -cost, len(arcs) - 1, -1])

    for v in range(n):
        if v in left:
            add_arc(src, v, ONE, 0, -1)
        else:
            add_arc(v, snk, ONE, 0, -1)
    edge_arc: dict[int, int] = {}
    for e, u, v, w in g.edge_tuples():
        a, b = (u, v) if u in left else (v, u)
        edge_arc[e] = len(arcs)
        add_arc(a, b, kappa[e], -w, e)
    nodes = n + 2

    def bellman_ford(sources):
        dist = [None] * nodes
        pred = [-1] * nodes
        for s in sources:
            dist[s] = 0
        for _ in range(nodes):
            changed = False
            for idx, (a, b, res, cost, _, _) in enumerate(arcs):
                if res > 0 and dist[a] is not None and (dist[b] is None or dist[a] + cost < dist[b]):
                    dist[b] = dist[a] + cost
                    pred[b] = idx
                    changed = True
            if not changed:
                return dist, pred
        raise AssertionError("negative residual cycle in min-cost flow")

    total = ZERO
    while True:
        dist, pred = bellman_ford([src])
        if dist[snk] is None or dist[snk] >= 0:
            break
        path = []
        v = snk
        while v != src:
            path.append(pred[v])
            v = arcs[pred[v]][0]
        delta = min(arcs[i][2] for i in path)
        for i in path:
            arcs[i][2] -= delta
            arcs[arcs[i][4]][2] += delta
        total += -dist[snk] * delta

    x = {e: arcs[i + 1][2] for e, i in edge_arc.items() if arcs[i + 1][2] > 0}
    # Potentials: shortest distances from a virtual root to every node in the
    # residual network of the circulation that closes the flow with a
    # sink->source arc (uncapacitated, so always residual; its reverse is
    # residual whenever some flow was sent).
    flow = sum((arcs[i + 1][2] for e, i in edge_arc.items()), ZERO)
    extra = [[snk, src, ONE, 0, -1, -1]]
    if flow > 0:
        extra.append([src, snk, flow, 0, -1, -1])
    arcs.extend(extra)
    pi, _ = bellman_ford(range(nodes))
    del arcs[-len(extra):]
    y: dict[int, Fraction] = {}
    for v in range(n):
        if v in left:
            y[v] = Fraction(max(0, pi[v] - pi[src]))
        else:
            y[v] = Fraction(max(0, pi[snk] - pi[v]))
    z: dict[int, Fraction] = {}
    for e, i in edge_arc.items():
        a, b = arcs[i][0], arcs[i][1]
        z[e] = Fraction(max(0, g.weight(e) - pi[a] + pi[b]))
    return OracleResult(total, x, y, z)


def bipartite_dual_gap(g: WeightedMultigraph, res: OracleResult,
                       kappa: Mapping[int, Fraction] | None = None) -> tuple[Fraction, list[int]]:
    """Dual objective minus primal value, plus the edges whose constraint fails."""
    kappa = g.kappa if kappa is None else kappa
    bad = []
    for e, u, v, w in g.edge_tuples():
        if res.dual_y.get(u, ZERO) + res.dual_y.get(v, ZERO) + res.dual_z.get(e, ZERO) < w:
            bad.append(e)
    dual = sum(res.dual_y.values(), ZERO) + sum((z * kappa[e] for e, z in res.dual_z.items()), ZERO)
    return dual - res.value, bad
