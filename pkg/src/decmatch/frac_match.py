"""Primal-dual solver for capacitated fractional matching on bipartite multigraphs.

Duals start at ``W - eps`` on the left and 0 on the right.  Every iteration
fixes up edge duals on eligible backward arcs, pushes a blocking set of
augmenting paths through the eligible graph, then lowers the duals of the
left vertices reachable from free left vertices by eps (raising their right
partners by eps).  It stops when free left vertices have dual 0.

An arc is eligible when its dual slack is exactly ``-eps`` (forward, room
left under the capacity) or ``+eps`` (backward, positive flow).
"""
from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .graph import ZERO, FracMatching, GraphError, WeightedMultigraph, double_cover, two_coloring
from .static_match import as_epsilon

FWD, BWD = 0, 1


class InvariantViolation(AssertionError):
    def __init__(self, message: str, trace: list | None = None):
        super().__init__(message)
        self.trace = trace or []


@dataclass
class SolverState:
    eps: Fraction
    W: int
    left: frozenset[int]
    edges: list[tuple[int, int, int, int]]   # (edge id, left end, right end, weight)
    kappa: dict[int, Fraction]
    x: dict[int, Fraction]
    z: dict[int, Fraction]
    y: dict[int, Fraction]
    load: dict[int, Fraction]
    iteration: int = 0
    trace: list[dict] = field(default_factory=list)
    check: bool = True

    def yz(self, e: int, u: int, v: int) -> Fraction:
        return self.y[u] + self.y[v] + self.z[e]

    def is_free(self, v: int) -> bool:
        return self.load[v] < 1

    def free_left(self) -> list[int]:
        return [u for u in sorted(self.left) if self.load[u] < 1]

    def value(self) -> Fraction:
        return sum((w * self.x[e] for e, _, _, w in self.edges), ZERO)


def init_state(g: WeightedMultigraph, kappa: Mapping[int, Fraction] | None, eps,
               left=None, check: bool = True) -> SolverState:
    eps = as_epsilon(eps)
    kappa = g.kappa if kappa is None else kappa
    if left is None:
        side = two_coloring(g)
        if side is None:
            raise GraphError("graph is not bipartite")
        left = {v for v, s in side.items() if s == 0}
    left = frozenset(left)
    edges = []
    for e, u, v, w in g.edge_tuples():
        if (u in left) == (v in left):
            raise GraphError(f"edge {e} does not cross the bipartition")
        edges.append((e, u, v, w) if u in left else (e, v, u, w))
    # isolated vertices never interact with anything, so they are left out
    verts = sorted({v for _, a, b, _ in edges for v in (a, b)})
    left = frozenset(v for v in verts if v in left)
    W = g.W
    y = {v: (W - eps if v in left else ZERO) for v in verts}
    return SolverState(eps=eps, W=W, left=left, edges=edges,
                       kappa={e: Fraction(kappa[e]) for e, *_ in edges},
                       x={e: ZERO for e, *_ in edges}, z={e: ZERO for e, *_ in edges},
                       y=y, load={v: ZERO for v in verts}, check=check)


def eligible_arcs(s: SolverState) -> tuple[set[int], set[int]]:
    fwd, bwd = set(), set()
    for e, u, v, w in s.edges:
        slack = s.yz(e, u, v) - w
        if slack == -s.eps and s.x[e] < s.kappa[e]:
            fwd.add(e)
        if slack == s.eps and s.x[e] > 0:
            bwd.add(e)
    return fwd, bwd


def _adjacency(s: SolverState, fwd, bwd) -> dict[int, list[tuple[int, int, int]]]:
    adj: dict[int, list[tuple[int, int, int]]] = {}
    for e, u, v, _ in s.edges:
        if e in fwd:
            adj.setdefault(u, []).append((e, FWD, v))
        if e in bwd:
            adj.setdefault(v, []).append((e, BWD, u))
    return adj


def is_acyclic(adj: Mapping[int, list[tuple[int, int, int]]]) -> bool:
    indeg: dict[int, int] = {}
    for v, arcs in adj.items():
        indeg.setdefault(v, 0)
        for _, _, to in arcs:
            indeg[to] = indeg.get(to, 0) + 1
    ready = deque(v for v, d in indeg.items() if d == 0)
    seen = 0
    while ready:
        v = ready.popleft()
        seen += 1
        for _, _, to in adj.get(v, ()):
            indeg[to] -= 1
            if indeg[to] == 0:
                ready.append(to)
    return seen == len(indeg)


def _residual(s: SolverState, e: int, kind: int) -> Fraction:
    return s.kappa[e] - s.x[e] if kind == FWD else s.x[e]


def reachable(s: SolverState, adj, sources) -> set[int]:
    seen = set(sources)
    stack = list(sources)
    while stack:
        v = stack.pop()
        for e, kind, to in adj.get(v, ()):
            if to not in seen and _residual(s, e, kind) > 0:
                seen.add(to)
                stack.append(to)
    return seen


def has_augmenting_path(s: SolverState, adj) -> bool:
    reach = reachable(s, adj, s.free_left())
    return any(v not in s.left and s.is_free(v) for v in reach)


def maximal_augmenting_paths(s: SolverState, adj) -> Fraction:
    """Blocking flow by repeated DFS with dead-end pruning. Returns the mass pushed."""
    if s.check and not is_acyclic(adj):
        raise InvariantViolation(f"eligible graph has a cycle at iteration {s.iteration}", s.trace)
    ptr: dict[int, int] = {}
    dead: set[int] = set()
    pushed = ZERO
    for src in s.free_left():
        while s.is_free(src) and src not in dead:
            nodes = [src]
            path: list[tuple[int, int, int]] = []
            found = False
            while nodes:
                v = nodes[-1]
                if v not in s.left and s.is_free(v):
                    found = True
                    break
                arcs = adj.get(v, ())
                i = ptr.get(v, 0)
                while i < len(arcs):
                    e, kind, to = arcs[i]
                    if to not in dead and _residual(s, e, kind) > 0:
                        break
                    i += 1
                ptr[v] = i
                if i < len(arcs):
                    path.append(arcs[i])
                    nodes.append(arcs[i][2])
                else:
                    dead.add(v)
                    nodes.pop()
                    if path:
                        path.pop()
            if not found:
                break
            sink = nodes[-1]
            delta = min(1 - s.load[src], 1 - s.load[sink],
                        min(_residual(s, e, kind) for e, kind, _ in path))
            for e, kind, _ in path:
                s.x[e] += delta if kind == FWD else -delta
            s.load[src] += delta
            s.load[sink] += delta
            pushed += delta
    return pushed


def check_invariants(s: SolverState) -> dict[str, bool]:
    eps = s.eps
    res = {}
    res["granularity"] = all((q / eps).denominator == 1 for q in [*s.y.values(), *s.z.values()])
    dom = tight = cs = feasible = True
    for e, u, v, w in s.edges:
        yz = s.yz(e, u, v)
        if yz < w - eps:  # every edge has a residual arc since kappa > 0
            dom = False
        if s.x[e] > 0 and yz > w + eps:
            tight = False
        if s.z[e] > 0 and s.x[e] != s.kappa[e]:
            cs = False
        if s.z[e] < 0 or s.x[e] < 0 or s.x[e] > s.kappa[e]:
            feasible = False
    res["domination"] = dom
    res["tightness"] = tight
    free_l = s.free_left()
    lefts = [s.y[u] for u in s.left]
    free_vals = {s.y[u] for u in free_l}
    res["free_duals"] = (len(free_vals) <= 1
                         and all(val <= min(lefts) for val in free_vals)
                         and all(s.y[v] == 0 for v in s.y if v not in s.left and s.is_free(v)))
    res["complementary_slackness"] = cs
    res["primal_feasible"] = feasible and all(load <= 1 for load in s.load.values())
    return res


def step(s: SolverState) -> SolverState:
    eps = s.eps
    # z-fixup: afterwards every eligible backward edge has z = 0 or is no longer eligible
    for e, u, v, w in s.edges:
        if s.z[e] > 0 and s.x[e] > 0 and s.yz(e, u, v) == w + eps:
            s.z[e] -= min(s.z[e], s.yz(e, u, v) - w + eps)

    fwd, bwd = eligible_arcs(s)
    exclusive = not (fwd & bwd)
    adj = _adjacency(s, fwd, bwd)
    acyclic = is_acyclic(adj)
    if s.check and not (exclusive and acyclic):
        raise InvariantViolation(
            f"eligible graph broken at iteration {s.iteration}: exclusive={exclusive} acyclic={acyclic}",
            s.trace)
    pushed = maximal_augmenting_paths(s, adj)

    fwd, bwd = eligible_arcs(s)
    adj = _adjacency(s, fwd, bwd)
    if s.check and has_augmenting_path(s, adj):
        raise InvariantViolation(f"augmenting path left after augmentation at iteration {s.iteration}", s.trace)
    Z = reachable(s, adj, s.free_left())

    for e, u, v, w in s.edges:
        if (u in Z and v not in Z and s.x[e] > 0 and e not in bwd
                and s.yz(e, u, v) == w - eps):
            s.z[e] += eps
    for v in Z:
        s.y[v] += -eps if v in s.left else eps
    s.iteration += 1

    inv = check_invariants(s) if s.check else {}
    free_l = s.free_left()
    s.trace.append({
        "iteration": s.iteration,
        "free_dual": str(s.y[free_l[0]]) if free_l else None,
        "support": sum(1 for q in s.x.values() if q > 0),
        "pushed": str(pushed),
        "reached": len(Z),
        "eligible_exclusive": exclusive,
        "eligible_acyclic": acyclic,
        **inv,
    })
    if s.check and not all(inv.values()):
        broken = sorted(k for k, ok in inv.items() if not ok)
        raise InvariantViolation(f"invariants {broken} failed after iteration {s.iteration}", s.trace)
    return s


def running(s: SolverState) -> bool:
    return any(s.y[u] > 0 for u in s.free_left())


@dataclass
class FracResult:
    x: FracMatching
    y: dict[int, Fraction]
    z: dict[int, Fraction]
    value: Fraction
    iterations: int
    trace: list[dict]
    state: SolverState

    def trace_jsonl(self) -> str:
        return "".join(json.dumps(rec, sort_keys=True) + "\n" for rec in self.trace)


def weighted_frac_match(g: WeightedMultigraph, kappa: Mapping[int, Fraction] | None, eps,
                        left=None, check: bool = True) -> FracResult:
    s = init_state(g, kappa, eps, left, check)
    limit = s.W / s.eps + 1
    while running(s):
        step(s)
        if s.iteration > limit:
            raise InvariantViolation(f"iteration count exceeded W/eps + 1 = {limit}", s.trace)
    x = {e: q for e, q in s.x.items() if q > 0}
    return FracResult(x, dict(s.y), dict(s.z), s.value(), s.iteration, s.trace, s)


def dual_objective(s: SolverState) -> Fraction:
    return sum(s.y.values(), ZERO) + sum((s.z[e] * s.kappa[e] for e in s.z), ZERO)


@dataclass
class GeneralFracResult:
    x: FracMatching
    value: Fraction
    cover_result: FracResult
    max_pair_flow: Fraction


def weighted_frac_match_general(g: WeightedMultigraph, kappa: Mapping[int, Fraction] | None, eps,
                                group_cap=None, check: bool = True) -> GeneralFracResult:
    """Solve on the bipartite double cover and fold back: x(e) = (x'(e') + x'(e''))/2.

    ``group_cap`` bounds kappa over every weight-class group; a breach raises.
    """
    kappa = g.kappa if kappa is None else kappa
    if group_cap is not None:
        group_cap = Fraction(group_cap)
        for key, members in g.groups().items():
            cap = sum((kappa[e] for e in members), ZERO)
            if cap > group_cap:
                raise GraphError(f"group {key} has capacity {cap} > {group_cap}")
    bc = double_cover(g, kappa)
    res = weighted_frac_match(bc.graph, None, eps, left=bc.left, check=check)
    x: FracMatching = {}
    for e, (a, b) in bc.twins.items():
        val = (res.x.get(a, ZERO) + res.x.get(b, ZERO)) / 2
        if val > 0:
            x[e] = val
    flows: dict[tuple[int, int], Fraction] = {}
    for e, val in x.items():
        u, v = g.ends(e)
        key = (min(u, v), max(u, v))
        flows[key] = flows.get(key, ZERO) + val
    value = sum((g.weight(e) * val for e, val in x.items()), ZERO)
    return GeneralFracResult(x, value, res, max(flows.values(), default=ZERO))

