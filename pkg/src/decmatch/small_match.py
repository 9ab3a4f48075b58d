"""Decremental exact matching for graphs whose optimum is small.

A maximal matching fixes a vertex cover S once.  The core graph keeps every
edge inside S (heaviest parallel per pair) and, for each cover vertex, its
heaviest edges to |S| + 1 distinct outside neighbours.  That core has the
same optimum as the full graph, and deletions only ever shrink it.
"""
from __future__ import annotations

from fractions import Fraction

from .graph import GraphError, WeightedMultigraph
from .static_match import static_weighted_match


def greedy_maximal_matching(g: WeightedMultigraph) -> list[int]:
    used: set[int] = set()
    out = []
    for e, u, v, _ in g.edge_tuples():
        if u not in used and v not in used:
            used.update((u, v))
            out.append(e)
    return out


class SmallMatchEngine:
    def __init__(self, G: WeightedMultigraph, eps, threshold=None):
        self.G = G
        self.eps = Fraction(eps)
        if threshold is not None:
            est = static_weighted_match(G, self.eps).weight
            if est > threshold:
                raise GraphError(f"optimum {est} exceeds the small-matching threshold {threshold}")
        self.S = frozenset(v for e in greedy_maximal_matching(G) for v in G.ends(e))
        self.quota = len(self.S) + 1
        # immutable cross-edge lists, heaviest first, lowest id on ties
        self.lists: dict[int, tuple[int, ...]] = {}
        for s in self.S:
            cross = [e for e in G.incident(s) if G.other(e, s) not in self.S]
            self.lists[s] = tuple(sorted(cross, key=lambda e: (-G.weight(e), e)))
        self.kept: dict[int, set[int]] = {}
        for s in self.S:
            self._refresh(s)
        self.recomputes = 0
        self._recompute()

    def _refresh(self, s: int) -> None:
        G = self.G
        kept, nbrs = set(), set()
        for e in self.lists[s]:
            if len(nbrs) == self.quota:
                break
            if not G.is_alive(e):
                continue
            t = G.other(e, s)
            if t not in nbrs:
                nbrs.add(t)
                kept.add(e)
        self.kept[s] = kept

    def core_edges(self) -> list[int]:
        G = self.G
        inner: dict[tuple[int, int], int] = {}
        for s in self.S:
            for e in G.incident(s):
                t = G.other(e, s)
                if t in self.S:
                    key = (min(s, t), max(s, t))
                    cur = inner.get(key)
                    if cur is None or (G.weight(e), -e) > (G.weight(cur), -cur):
                        inner[key] = e
        cross = set().union(*self.kept.values()) if self.kept else set()
        return sorted(set(inner.values()) | cross)

    def core_graph(self) -> WeightedMultigraph:
        return self.G.restrict(self.core_edges())

    def _recompute(self) -> None:
        self.M = static_weighted_match(self.core_graph(), self.eps).matching
        self.recomputes += 1

    def delete(self, e: int) -> list[int]:
        G = self.G
        if not G.is_alive(e):
            raise GraphError(f"edge {e} is not alive")
        G.delete_edge(e)
        u, v = G.ends(e)
        for s in (u, v):
            if s in self.S and e in self.kept.get(s, ()):
                self._refresh(s)
        if e in self.M:
            self._recompute()
        return list(self.M)

    def weight(self) -> int:
        return self.G.total_weight(self.M)
