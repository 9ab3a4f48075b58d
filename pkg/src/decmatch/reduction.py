"""Vertex reduction by random binning, and the top-level decremental driver
that runs one engine per reduced multigraph."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .config import Config, stream
from .decremental import DecMatchingEngine
from .graph import GraphError, WeightedMultigraph
from .small_match import SmallMatchEngine
from .static_match import static_weighted_match


@dataclass
class ReducedInstance:
    H: WeightedMultigraph
    bins: list[int]
    to_h: dict[int, int]
    to_g: dict[int, int]
    active: bool = True
    engine: DecMatchingEngine | None = None


def vertex_red_basic(G: WeightedMultigraph, tau: int, rng: np.random.Generator) -> ReducedInstance:
    """Put each vertex in a uniform bin; keep the edges whose endpoints land in different bins."""
    if tau < 2:
        raise ValueError("tau must be at least 2")
    bins = [int(b) for b in rng.integers(0, tau, size=G.n)]
    H = WeightedMultigraph(tau, G.W)
    to_h, to_g = {}, {}
    for e, u, v, w in G.edge_tuples():
        if bins[u] != bins[v]:
            h = H.add_edge(bins[u], bins[v], w, G.kappa[e])
            to_h[e] = h
            to_g[h] = e
    return ReducedInstance(H, bins, to_h, to_g)


def bin_count(G: WeightedMultigraph, mu, delta) -> int:
    return max(2, math.ceil(4 * (1 + Fraction(delta)) * G.W * Fraction(mu) / Fraction(delta)))


def vertex_red(G: WeightedMultigraph, mu, delta, lam: int, seed: int,
               path: tuple[int, ...] = ()) -> list[ReducedInstance]:
    tau = bin_count(G, mu, delta)
    return [vertex_red_basic(G, tau, stream(seed, *path, i)) for i in range(lam)]


@dataclass
class Epoch:
    mu: Fraction
    mode: str
    attempts: int = 1
    instance_active: list[bool] = field(default_factory=list)


class Orchestrator:
    """Keeps lambda engines on reduced graphs; outputs the least-indexed live one."""

    MAX_DRAWS = 4

    def __init__(self, G: WeightedMultigraph, cfg: Config, check: bool = True):
        self.G = G
        self.cfg = cfg
        self.eps = cfg.eps
        self.check = check
        self.epochs: list[Epoch] = []
        self.instances: list[ReducedInstance] = []
        self.small: SmallMatchEngine | None = None
        self.cur = 0
        self.mode = "empty"
        self._restart()

    @property
    def restarts(self) -> int:
        return len(self.epochs) - 1

    def small_threshold(self) -> Fraction:
        return self.cfg.small_c * Fraction(math.log2(max(2, self.G.n)))

    def _restart(self) -> None:
        G, eps = self.G, self.eps
        mu = Fraction(static_weighted_match(G, eps).weight)
        self.instances, self.small = [], None
        epoch_index = len(self.epochs)
        if mu == 0:
            self.mode = "empty"
            self.epochs.append(Epoch(mu, self.mode))
            return
        if mu <= self.small_threshold():
            self._go_small(mu)
            return
        for attempt in range(self.MAX_DRAWS):
            insts = vertex_red(G, mu, eps, self.cfg.lam, self.cfg.seed, (epoch_index, attempt))
            for i, inst in enumerate(insts):
                est = static_weighted_match(inst.H, eps).weight
                if est < (1 - eps) * mu:
                    inst.active = False
                    continue
                inst.engine = DecMatchingEngine(inst.H, mu * (1 - eps), self.cfg,
                                                stream_path=(epoch_index, attempt, i), check=self.check)
                inst.active = not inst.engine.terminated
            if any(inst.active for inst in insts):
                self.instances = insts
                self.mode = "reduced"
                self.cur = next(i for i, inst in enumerate(insts) if inst.active)
                self.epochs.append(Epoch(mu, self.mode, attempt + 1, [i.active for i in insts]))
                return
        self._go_small(mu, attempts=self.MAX_DRAWS)

    def _go_small(self, mu: Fraction, attempts: int = 0) -> None:
        self.small = SmallMatchEngine(self.G.copy(), self.eps)
        self.mode = "small"
        self.epochs.append(Epoch(mu, self.mode, attempts))

    def matching(self) -> list[int]:
        if self.mode == "small":
            return list(self.small.M)
        if self.mode == "empty":
            return []
        inst = self.instances[self.cur]
        return sorted(inst.to_g[h] for h in inst.engine.M)

    def weight(self) -> int:
        return self.G.total_weight(self.matching())

    def delete(self, e: int) -> list[int]:
        G = self.G
        if not G.is_alive(e):
            raise GraphError(f"edge {e} is not alive")
        G.delete_edge(e)
        if self.mode == "small":
            self.small.delete(e)
        elif self.mode == "reduced":
            for inst in self.instances:
                h = inst.to_h.get(e)
                if inst.active and h is not None:
                    if not inst.engine.delete(h).ok:
                        inst.active = False
            while self.cur < len(self.instances) and not self.instances[self.cur].active:
                self.cur += 1
            if self.cur >= len(self.instances):
                self._restart()
        return self.matching()

    def report(self) -> dict:
        return {
            "mode": self.mode,
            "restarts": self.restarts,
            "epoch_mu": [str(ep.mu) for ep in self.epochs],
            "cur": self.cur,
            "active": [inst.active for inst in self.instances],
            "phases": sum(i.engine.phases for i in self.instances if i.engine),
            "calls_to_m_or_e": sum(i.engine.calls_to_m_or_e for i in self.instances if i.engine),
        }
