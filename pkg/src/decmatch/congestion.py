"""Sample by capacity, match statically, then either build a large fractional
matching or report the bottleneck edges whose capacity should grow."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

import numpy as np

from .frac_match import weighted_frac_match_general
from .graph import ZERO, FracMatching, WeightedMultigraph, distribute
from .static_match import CertifiedMatching, static_weighted_match, undercovered_edges


def sample_graph(g: WeightedMultigraph, kappa: Mapping[int, Fraction], rho,
                 rng: np.random.Generator) -> WeightedMultigraph:
    """Keep each alive edge independently with probability min(1, kappa * rho)."""
    rho = Fraction(rho)
    ids = list(g.edges())
    draws = rng.random(len(ids))
    keep = [e for e, u in zip(ids, draws) if u < min(Fraction(1), kappa[e] * rho)]
    return g.restrict(keep)


def low_capacity_edges(g: WeightedMultigraph, kappa: Mapping[int, Fraction],
                       alpha) -> tuple[set[int], dict[int, Fraction]]:
    """Edges whose weight-class group has capacity at most 1/alpha^2, with kappa scaled by alpha."""
    alpha = Fraction(alpha)
    bound = 1 / alpha ** 2
    low: set[int] = set()
    for key, members in g.groups().items():
        if sum((kappa[e] for e in members), ZERO) <= bound:
            low.update(members)
    return low, {e: kappa[e] * alpha for e in low}


def extract_estar(g: WeightedMultigraph, cert: CertifiedMatching, eps) -> list[int]:
    return undercovered_edges(g, cert.duals, eps)


@dataclass
class MOrEOutcome:
    kind: str                      # "matching" or "bottleneck"
    x: FracMatching | None
    estar: list[int] | None
    cert: CertifiedMatching
    sampled: list[int]
    estar_budget: Fraction = ZERO  # sum of w * kappa over E*
    integral_edges: list[int] = field(default_factory=list)   # M minus low-capacity edges
    low_edges: list[int] = field(default_factory=list)        # M restricted to low-capacity edges

    @property
    def is_matching(self) -> bool:
        return self.kind == "matching"


def weighted_m_or_estar(g: WeightedMultigraph, kappa: Mapping[int, Fraction], eps, mu,
                        alpha, rho, rng: np.random.Generator, check: bool = False) -> MOrEOutcome:
    eps, mu, alpha = Fraction(eps), Fraction(mu), Fraction(alpha)
    gs = sample_graph(g, kappa, rho, rng)
    cert = static_weighted_match(gs, eps)
    sampled = list(gs.edges())
    if cert.weight <= (1 - 6 * eps) * mu:
        estar = extract_estar(g, cert, eps)
        budget = sum((g.weight(e) * kappa[e] for e in estar), ZERO)
        return MOrEOutcome("bottleneck", None, estar, cert, sampled, budget)

    low, kappa_plus = low_capacity_edges(g, kappa, alpha)
    m_int = [e for e in cert.matching if e not in low]
    m_low = [e for e in cert.matching if e in low]
    x = distribute(g, {g.group_of(e): Fraction(1) for e in m_int}, kappa)
    low_vertices = {v for e in m_low for v in g.ends(e)}
    keep = [e for e in low if all(v in low_vertices for v in g.ends(e))]
    if keep:
        sub = g.restrict(keep)
        frac = weighted_frac_match_general(sub, kappa_plus, eps, group_cap=1 / alpha, check=check)
        for e, val in frac.x.items():
            x[e] = x.get(e, ZERO) + val
    return MOrEOutcome("matching", x, None, cert, sampled, ZERO, m_int, m_low)
