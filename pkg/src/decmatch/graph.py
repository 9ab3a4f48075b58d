"""Weighted multigraphs, fractional matchings and the transforms between them.

All numbers that are not edge weights are ``fractions.Fraction`` so that
statements like "a multiple of eps" can be checked exactly.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Iterator, Mapping

FracMatching = dict[int, Fraction]
GroupKey = tuple[int, int, int]  # (min endpoint, max endpoint, weight)
CollapsedMatching = dict[GroupKey, Fraction]

ZERO = Fraction(0)
ONE = Fraction(1)


class GraphError(ValueError):
    pass


def group_key(u: int, v: int, w: int) -> GroupKey:
    return (u, v, w) if u < v else (v, u, w)


class WeightedMultigraph:
    """Multigraph with integer weights in 1..W and tombstoned edge deletion.

    Edge ids are handed out sequentially and never reused.  Each edge also
    carries a capacity (``kappa``), defaulting to 1.
    """

    def __init__(self, n: int, W: int):
        if n < 0:
            raise GraphError("vertex count must be non-negative")
        if W < 1:
            raise GraphError("W must be at least 1")
        self.n = n
        self.W = W
        self._ends: list[tuple[int, int]] = []
        self._weight: list[int] = []
        self._alive: list[bool] = []
        self._incident: list[set[int]] = [set() for _ in range(n)]
        self._groups: dict[GroupKey, set[int]] = {}
        self.kappa: dict[int, Fraction] = {}
        self._alive_count = 0

    # construction / mutation

    def add_edge(self, u: int, v: int, weight: int, capacity=ONE) -> int:
        if u == v:
            raise GraphError(f"self-loop at vertex {u}")
        if not (0 <= u < self.n and 0 <= v < self.n):
            raise GraphError(f"endpoint out of range: ({u}, {v}) with n={self.n}")
        if not (isinstance(weight, int) and 1 <= weight <= self.W):
            raise GraphError(f"weight {weight} outside 1..{self.W}")
        capacity = Fraction(capacity)
        if not (0 < capacity <= 1):
            raise GraphError(f"capacity {capacity} outside (0, 1]")
        eid = len(self._ends)
        self._ends.append((u, v))
        self._weight.append(weight)
        self._alive.append(True)
        self._incident[u].add(eid)
        self._incident[v].add(eid)
        self._groups.setdefault(group_key(u, v, weight), set()).add(eid)
        self.kappa[eid] = capacity
        self._alive_count += 1
        return eid

    def delete_edge(self, eid: int) -> None:
        if not (0 <= eid < len(self._ends)):
            raise GraphError(f"unknown edge id {eid}")
        if not self._alive[eid]:
            raise GraphError(f"edge {eid} already deleted")
        self._alive[eid] = False
        u, v = self._ends[eid]
        self._incident[u].discard(eid)
        self._incident[v].discard(eid)
        key = group_key(u, v, self._weight[eid])
        grp = self._groups[key]
        grp.discard(eid)
        if not grp:
            del self._groups[key]
        self._alive_count -= 1

    # queries

    @property
    def num_edge_ids(self) -> int:
        return len(self._ends)

    @property
    def num_alive(self) -> int:
        return self._alive_count

    def is_alive(self, eid: int) -> bool:
        return 0 <= eid < len(self._ends) and self._alive[eid]

    def ends(self, eid: int) -> tuple[int, int]:
        return self._ends[eid]

    def weight(self, eid: int) -> int:
        return self._weight[eid]

    def other(self, eid: int, v: int) -> int:
        a, b = self._ends[eid]
        return b if a == v else a

    def edges(self) -> Iterator[int]:
        """Alive edge ids in increasing order."""
        return (e for e in range(len(self._ends)) if self._alive[e])

    def edge_tuples(self) -> Iterator[tuple[int, int, int, int]]:
        for e in self.edges():
            u, v = self._ends[e]
            yield e, u, v, self._weight[e]

    def incident(self, v: int) -> set[int]:
        return self._incident[v]

    def degree(self, v: int) -> int:
        return len(self._incident[v])

    def group_of(self, eid: int) -> GroupKey:
        u, v = self._ends[eid]
        return group_key(u, v, self._weight[eid])

    def group(self, u: int, v: int, w: int) -> set[int]:
        """Alive parallel edges of weight ``w`` between ``u`` and ``v``."""
        return self._groups.get(group_key(u, v, w), set())

    def groups(self) -> Mapping[GroupKey, set[int]]:
        return self._groups

    def group_capacity(self, key: GroupKey, kappa: Mapping[int, Fraction] | None = None) -> Fraction:
        kappa = self.kappa if kappa is None else kappa
        return sum((kappa[e] for e in self._groups.get(key, ())), ZERO)

    def copy(self) -> "WeightedMultigraph":
        g = WeightedMultigraph(self.n, self.W)
        g._ends = list(self._ends)
        g._weight = list(self._weight)
        g._alive = list(self._alive)
        g._incident = [set(s) for s in self._incident]
        g._groups = {k: set(s) for k, s in self._groups.items()}
        g.kappa = dict(self.kappa)
        g._alive_count = self._alive_count
        return g

    def restrict(self, keep: Iterable[int]) -> "WeightedMultigraph":
        """Same id space, but only the alive edges in ``keep`` stay alive."""
        keep = set(keep)
        g = self.copy()
        for e in list(g.edges()):
            if e not in keep:
                g.delete_edge(e)
        return g

    def with_alive(self, keep: Iterable[int]) -> "WeightedMultigraph":
        """Same id space with exactly the edges in ``keep`` alive, including edges already deleted here."""
        keep = set(keep)
        g = WeightedMultigraph(self.n, self.W)
        for e, (u, v) in enumerate(self._ends):
            g.add_edge(u, v, self._weight[e], self.kappa[e])
        for e in range(len(self._ends)):
            if e not in keep:
                g.delete_edge(e)
        return g

    def total_weight(self, edge_ids: Iterable[int]) -> int:
        return sum(self._weight[e] for e in edge_ids)

    def __repr__(self) -> str:
        return f"WeightedMultigraph(n={self.n}, W={self.W}, alive={self._alive_count})"


# fractional matchings

def matching_value(g: WeightedMultigraph, x: Mapping[int, Fraction]) -> Fraction:
    return sum((g.weight(e) * val for e, val in x.items()), ZERO)


def support(x: Mapping) -> set:
    return {k for k, val in x.items() if val > 0}


def vertex_loads(g: WeightedMultigraph, x: Mapping[int, Fraction]) -> dict[int, Fraction]:
    load: dict[int, Fraction] = {}
    for e, val in x.items():
        if val:
            for v in g.ends(e):
                load[v] = load.get(v, ZERO) + val
    return load


def collapse(g: WeightedMultigraph, x: Mapping[int, Fraction]) -> CollapsedMatching:
    out: CollapsedMatching = {}
    for e, val in x.items():
        if val:
            key = g.group_of(e)
            out[key] = out.get(key, ZERO) + val
    return out


def distribute(g: WeightedMultigraph, y: Mapping[GroupKey, Fraction],
               kappa: Mapping[int, Fraction] | None = None) -> FracMatching:
    kappa = g.kappa if kappa is None else kappa
    out: FracMatching = {}
    for key, mass in y.items():
        if not mass:
            continue
        members = g.groups().get(key, ())
        cap = sum((kappa[e] for e in members), ZERO)
        if cap <= 0:
            raise GraphError(f"group {key} has zero capacity but mass {mass}")
        for e in members:
            out[e] = mass * kappa[e] / cap
    return out


def is_integral_matching(g: WeightedMultigraph, edge_ids: Iterable[int]) -> bool:
    seen: set[int] = set()
    for e in edge_ids:
        if not g.is_alive(e):
            return False
        u, v = g.ends(e)
        if u in seen or v in seen:
            return False
        seen.update((u, v))
    return True


@dataclass
class FeasibilityReport:
    vertex_violations: dict[int, Fraction] = field(default_factory=dict)
    capacity_violations: dict[int, Fraction] = field(default_factory=dict)
    negative: list[int] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not (self.vertex_violations or self.capacity_violations or self.negative)


def check_fractional(g: WeightedMultigraph, x: Mapping[int, Fraction],
                     kappa: Mapping[int, Fraction] | None = None,
                     cap_factor=ONE) -> FeasibilityReport:
    """List every vertex with load above 1 and every edge above ``cap_factor * kappa``.

    Pass ``kappa=None`` together with ``cap_factor=None`` to skip capacities.
    """
    rep = FeasibilityReport()
    for e, val in x.items():
        if val < 0:
            rep.negative.append(e)
    for v, load in vertex_loads(g, x).items():
        if load > 1:
            rep.vertex_violations[v] = load
    if cap_factor is not None:
        kappa = g.kappa if kappa is None else kappa
        for e, val in x.items():
            if val > cap_factor * kappa[e]:
                rep.capacity_violations[e] = val
    return rep


@dataclass
class OddSetReport:
    max_size: int
    violations: list[tuple[frozenset, Fraction]] = field(default_factory=list)
    max_pair_flow: Fraction = ZERO
    # None when the per-pair premise does not hold, else whether x/(1+eps) passed
    scaled_passes: bool | None = None

    @property
    def ok(self) -> bool:
        return not self.violations


def _pair_flows(g: WeightedMultigraph, x: Mapping[int, Fraction]) -> dict[tuple[int, int], Fraction]:
    flows: dict[tuple[int, int], Fraction] = {}
    for e, val in x.items():
        if val:
            u, v = g.ends(e)
            key = (u, v) if u < v else (v, u)
            flows[key] = flows.get(key, ZERO) + val
    return flows


def _odd_set_violations(flows, vertices, max_size, scale=ONE):
    bad = []
    for size in range(3, max_size + 1, 2):
        for B in combinations(vertices, size):
            inside = set(B)
            total = sum((f for (a, b), f in flows.items() if a in inside and b in inside), ZERO) * scale
            if total > Fraction(size - 1, 2):
                bad.append((frozenset(B), total))
    return bad


def check_small_odd_sets(g: WeightedMultigraph, x: Mapping[int, Fraction], eps: Fraction,
                         cap: int = 9) -> OddSetReport:
    """Exhaustive odd-set check for |B| <= min(1/eps, cap).

    Also evaluates the small-flow implication: when every vertex pair carries
    at most ``eps`` total flow, ``x / (1 + eps)`` must pass every such set.
    """
    eps = Fraction(eps)
    max_size = min(int(1 / eps), cap)
    flows = _pair_flows(g, x)
    vertices = sorted({v for pair in flows for v in pair})
    rep = OddSetReport(max_size=max_size)
    rep.violations = _odd_set_violations(flows, vertices, max_size)
    rep.max_pair_flow = max(flows.values(), default=ZERO)
    if rep.max_pair_flow <= eps:
        rep.scaled_passes = not _odd_set_violations(flows, vertices, max_size, 1 / (1 + eps))
    return rep


def split_integral_fractional(g: WeightedMultigraph, x: Mapping[int, Fraction], alpha,
                              threshold=None) -> tuple[FracMatching, FracMatching]:
    """Split ``x`` by group mass: groups above ``threshold`` form the integral part.

    The threshold defaults to ``1/alpha**2``.
    """
    threshold = Fraction(1, 1) / (Fraction(alpha) ** 2) if threshold is None else Fraction(threshold)
    mass = collapse(g, x)
    xi: FracMatching = {}
    xf: FracMatching = {}
    for e, val in x.items():
        if not val:
            continue
        if mass[g.group_of(e)] > threshold:
            xi[e] = val
        else:
            xf[e] = val
    return xi, xf


def support_vertices(g: WeightedMultigraph, x: Mapping[int, Fraction]) -> set[int]:
    return {v for e, val in x.items() if val for v in g.ends(e)}


# bipartite double cover

@dataclass
class DoubleCover:
    graph: WeightedMultigraph
    left: frozenset[int]
    source_edge: dict[int, int]        # cover edge -> source edge
    twins: dict[int, tuple[int, int]]  # source edge -> (e', e'')
    n_source: int


def double_cover(g: WeightedMultigraph, kappa: Mapping[int, Fraction] | None = None) -> DoubleCover:
    """Vertex v keeps id v on the left; its copy v' gets id v + n on the right."""
    kappa = g.kappa if kappa is None else kappa
    n = g.n
    bc = WeightedMultigraph(2 * n, g.W)
    back: dict[int, int] = {}
    twins: dict[int, tuple[int, int]] = {}
    for e, u, v, w in g.edge_tuples():
        a = bc.add_edge(u, v + n, w, kappa[e])
        b = bc.add_edge(v, u + n, w, kappa[e])
        back[a] = e
        back[b] = e
        twins[e] = (a, b)
    return DoubleCover(bc, frozenset(range(n)), back, twins, n)


def two_coloring(g: WeightedMultigraph) -> dict[int, int] | None:
    """Side (0/1) per vertex, or None if ``g`` has an odd cycle.

    The smallest vertex of each component lands on side 0.
    """
    side: dict[int, int] = {}
    for s in range(g.n):
        if s in side:
            continue
        side[s] = 0
        stack = [s]
        while stack:
            v = stack.pop()
            for e in g.incident(v):
                u = g.other(e, v)
                if u not in side:
                    side[u] = 1 - side[v]
                    stack.append(u)
                elif side[u] == side[v]:
                    return None
    return side


# file formats

def parse_graph(text: str, source: str = "<graph>") -> WeightedMultigraph:
    lines = [(i + 1, ln.strip()) for i, ln in enumerate(text.splitlines())]
    lines = [(i, ln) for i, ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise GraphError(f"{source}: empty graph file")
    lineno, header = lines[0]
    try:
        n, m, W = (int(t) for t in header.split())
    except ValueError:
        raise GraphError(f"{source}:{lineno}: header must be 'n m W', got {header!r}") from None
    body = lines[1:]
    if len(body) != m:
        where = body[m][0] if len(body) > m else (body[-1][0] if body else lineno)
        raise GraphError(f"{source}:{where}: header declares m={m} edges but file has {len(body)}")
    g = WeightedMultigraph(n, W)
    for lineno, ln in body:
        try:
            u, v, w = (int(t) for t in ln.split())
            g.add_edge(u, v, w)
        except (ValueError, GraphError) as exc:
            raise GraphError(f"{source}:{lineno}: bad edge line {ln!r} ({exc})") from None
    return g


def format_graph(g: WeightedMultigraph) -> str:
    rows = [f"{u} {v} {w}" for _, u, v, w in g.edge_tuples()]
    return "\n".join([f"{g.n} {len(rows)} {g.W}", *rows]) + "\n"


def parse_deletions(text: str, source: str = "<deletions>") -> list[int]:
    out = []
    for i, ln in enumerate(text.splitlines(), start=1):
        ln = ln.strip()
        if not ln or ln.startswith("#"):
            continue
        try:
            out.append(int(ln))
        except ValueError:
            raise GraphError(f"{source}:{i}: expected an edge id, got {ln!r}") from None
    return out
