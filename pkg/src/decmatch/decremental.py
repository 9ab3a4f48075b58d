"""Decremental matching engine driven by capacity boosting.

A phase computes a static estimate, then calls the sample-or-bottleneck step
until it returns a fractional matching, multiplying the capacity of every
bottleneck edge by alpha in between.  The fractional matching is split into
an integral part (mass-1 groups) and a fractional part; the fractional part
is sparsified and the output matching is a static matching on the sparse
graph plus the integral groups.  Deletions are absorbed until the deleted
fractional weight exceeds eps * mu (new phase) or the deleted output weight
exceeds eps * mu (rebuild of the output matching).
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

from .config import Config, stream
from .congestion import weighted_m_or_estar
from .graph import (ZERO, CollapsedMatching, FracMatching, GraphError, WeightedMultigraph, collapse,
                    is_integral_matching, split_integral_fractional)
from .sparsify import Sparsifier, Update, representative, round_to_integral
from .static_match import static_weighted_match


def ceil_log(base: Fraction, n: int) -> int:
    """Smallest k >= 0 with base**k >= n."""
    k, p = 0, Fraction(1)
    while p < n:
        p *= base
        k += 1
    return k


@dataclass
class Status:
    ok: bool
    matching: list[int]


@dataclass
class EstarRecord:
    phase: int
    alive: list[int]
    sampled: list[int]
    estar: list[int]
    kappa: dict[int, Fraction]
    budget: Fraction


def jsonable(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, (list, tuple)):
        return [jsonable(a) for a in v]
    if isinstance(v, dict):
        return {str(k): jsonable(a) for k, a in v.items()}
    return v


class DecMatchingEngine:
    def __init__(self, H: WeightedMultigraph, mu, cfg: Config, stream_path: tuple[int, ...] = (),
                 record_estar: bool = False, check: bool = True):
        self.H = H
        self.mu = Fraction(mu)
        self.cfg = cfg
        self.eps = cfg.eps
        self.alpha = cfg.alpha
        self.path = tuple(stream_path)
        self.check = check
        self.record_estar = record_estar
        self.estar_log: list[EstarRecord] = []
        self.events: list[dict] = []
        self._clock = 0

        self.levels = ceil_log(self.alpha, H.n)
        k0 = 1 / self.alpha ** self.levels
        self.kappa: dict[int, Fraction] = {e: k0 for e in H.edges()}
        self.boosts_of: dict[int, int] = {e: 0 for e in H.edges()}
        self.calls_to_m_or_e = 0
        self.phases = 0
        self.capacity_boosts = 0
        self.rebuilds = 0
        self.w_kappa_E0 = sum((H.weight(e) * k0 for e in H.edges()), ZERO)
        self.phi_del = ZERO
        self.phi_at_phase_start: list[Fraction] = []

        self.terminated = False
        self.sparsifier_enabled = cfg.sparsifier_enabled
        self.x: FracMatching = {}
        self.xi: FracMatching = {}
        self.xf: FracMatching = {}
        self.zC: CollapsedMatching = {}
        self.yC: CollapsedMatching = {}
        self.sparsifier: Sparsifier | None = None
        self.M: list[int] = []
        self.counter_m = ZERO
        self.counter_x = ZERO
        self._start_phase()

    # logging

    def _log(self, event: str, **fields) -> None:
        self._clock += 1
        rec = {"t": self._clock, "event": event, "phase": self.phases,
               "counter_x": self.counter_x, "counter_m": self.counter_m}
        rec.update(fields)
        self.events.append(jsonable(rec))

    def events_jsonl(self) -> str:
        return "".join(json.dumps(r, sort_keys=True) + "\n" for r in self.events)

    # phases

    def _start_phase(self) -> None:
        self.phases += 1
        self.phi_at_phase_start.append(self.phi_del)
        self.counter_x = ZERO
        self.counter_m = ZERO
        H, eps = self.H, self.eps
        mu_p = Fraction(static_weighted_match(H, eps).weight)
        self._log("phase_start", estimate=mu_p, phi_del=self.phi_del)
        if mu_p <= (1 - 3 * eps) * self.mu:
            self.terminated = True
            self.M = []
            self._log("no_signal", estimate=mu_p, mu=self.mu)
            return
        call = 0
        while True:
            call += 1
            self.calls_to_m_or_e += 1
            rng = stream(self.cfg.seed, *self.path, self.phases, call)
            out = weighted_m_or_estar(H, self.kappa, eps, mu_p, self.alpha, self.cfg.rho, rng,
                                      check=self.check)
            if out.is_matching:
                break
            if self.record_estar:
                self.estar_log.append(EstarRecord(self.phases, list(H.edges()), out.sampled,
                                                  list(out.estar),
                                                  {e: self.kappa[e] for e in out.estar}, out.estar_budget))
            for e in out.estar:
                if self.check and not self.kappa[e] < 1:
                    raise AssertionError(f"bottleneck edge {e} already has capacity 1")
                old = self.kappa[e]
                self.kappa[e] = old * self.alpha
                self.boosts_of[e] += 1
                self.w_kappa_E0 += H.weight(e) * (self.kappa[e] - old)
            self.capacity_boosts += len(out.estar)
            self._log("boost", edges=len(out.estar), budget=out.estar_budget)
        self.x = dict(out.x)
        # mass-1 groups are integral, everything else is at most 1/alpha per group
        self.xi, self.xf = split_integral_fractional(H, self.x, self.alpha, threshold=1 / self.alpha)
        self.zC = collapse(H, self.xi)
        self.yC = collapse(H, self.xf)
        if self.sparsifier_enabled:
            self.sparsifier = Sparsifier(self.yC, eps, self.cfg.seed, self.cfg.theta, H.n, H.W,
                                         stream_path=(*self.path, self.phases, 0))
        self._rebuild()

    def _rebuild(self) -> None:
        H = self.H
        if self.sparsifier is not None:
            self.M = round_to_integral(H, self.sparsifier.K, self.zC, self.eps)
        else:
            z_edges = [representative(H, k) for k, v in self.zC.items() if v > 0 and H.group(*k)]
            cert = static_weighted_match(H.restrict(self.xf), self.eps)
            self.M = sorted(cert.matching + z_edges)
        self.counter_m = ZERO
        self.rebuilds += 1
        self._log("rebuild", weight=self.weight(), size=len(self.M),
                  sparsifier=self.sparsifier is not None)

    # deletions

    def delete(self, e: int) -> Status:
        if self.terminated:
            return Status(False, [])
        H = self.H
        if not H.is_alive(e):
            raise GraphError(f"edge {e} is not alive")
        w = H.weight(e)
        key = H.group_of(e)
        H.delete_edge(e)
        self.phi_del += w * self.kappa[e]
        self._log("delete", edge=e, weight=w, kappa=self.kappa[e])
        if e in self.x:
            val = self.x.pop(e)
            if e in self.xi:
                del self.xi[e]
                self.zC[key] -= val
                if not self.zC[key]:
                    del self.zC[key]
            else:
                del self.xf[e]
                self.yC[key] -= val
                if self.sparsifier is not None:
                    self.sparsifier.update(Update("decrease", key, self.yC[key]))
                if not self.yC[key]:
                    del self.yC[key]
            self.counter_x += w * val
            if self.counter_x > self.eps * self.mu:
                self._start_phase()
                return self.status()
        if e in self.M:
            self.M.remove(e)
            self.counter_m += w
            if self.counter_m > self.eps * self.mu:
                self._rebuild()
        if self.check and not is_integral_matching(H, self.M):
            raise AssertionError("output is not a matching of alive edges")
        return self.status()

    def status(self) -> Status:
        return Status(not self.terminated, list(self.M))

    def weight(self) -> int:
        return self.H.total_weight(self.M)

    def instrumentation_report(self) -> dict:
        return {
            "calls_to_m_or_e": self.calls_to_m_or_e,
            "phases": self.phases,
            "capacity_boosts": self.capacity_boosts,
            "rebuilds": self.rebuilds,
            "w_kappa_E0": self.w_kappa_E0,
            "phi_del": self.phi_del,
            "max_boosts_per_edge": max(self.boosts_of.values(), default=0),
            "terminated": self.terminated,
        }
