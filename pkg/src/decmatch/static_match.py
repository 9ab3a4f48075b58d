"""Static maximum-weight matching with a general-graph dual certificate.

The matching itself is exact (blossom algorithm).  The certificate is the
blossom LP dual ``(y, r, Omega)`` after two post-processing steps:

* large blossoms (``|B| > 3/eps``) have their dual pushed onto their vertices,
* optionally, every dual is rounded up to the eps-grid.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil

from .blossom import max_weight_matching
from .graph import ZERO, WeightedMultigraph, is_integral_matching
from .oracle import MAX_ORACLE_VERTICES, exact_mwm


def as_epsilon(eps) -> Fraction:
    eps = Fraction(eps)
    if eps <= 0 or eps.numerator != 1 or eps.denominator < 2:
        raise ValueError(f"eps must be 1/k for an integer k >= 2, got {eps}")
    return eps


@dataclass
class GeneralDuals:
    y: dict[int, Fraction]
    r: dict[frozenset, Fraction]
    omega: list[frozenset]

    def yr(self, u: int, v: int) -> Fraction:
        total = self.y.get(u, ZERO) + self.y.get(v, ZERO)
        for B, val in self.r.items():
            if val and u in B and v in B:
                total += val
        return total

    def objective(self) -> Fraction:
        return (sum(self.y.values(), ZERO)
                + sum((val * Fraction(len(B) - 1, 2) for B, val in self.r.items()), ZERO))

    def copy(self) -> "GeneralDuals":
        return GeneralDuals(dict(self.y), dict(self.r), list(self.omega))


@dataclass
class CertifiedMatching:
    matching: list[int]
    weight: int
    duals: GeneralDuals
    f: Fraction
    eps: Fraction
    shrink_inflation: Fraction = ZERO
    grid_inflation: Fraction = ZERO


def _pair_representatives(g: WeightedMultigraph) -> list[tuple[int, int, int, int]]:
    """One (id, u, v, w) per vertex pair: heaviest, lowest id on ties; sorted by id."""
    best: dict[tuple[int, int], tuple[int, int, int, int]] = {}
    for e, u, v, w in g.edge_tuples():
        key = (u, v) if u < v else (v, u)
        cur = best.get(key)
        if cur is None or w > cur[3]:
            best[key] = (e, u, v, w)
    return sorted(best.values())


def exact_general_duals(g: WeightedMultigraph) -> tuple[list[int], GeneralDuals]:
    reps = _pair_representatives(g)
    verts = sorted({v for _, u, v_, _ in reps for v in (u, v_)})
    local = {v: i for i, v in enumerate(verts)}
    res = max_weight_matching(len(verts), [(local[u], local[v], w) for _, u, v, w in reps])
    matching = sorted({reps[k][0] for k in res.mate_edge if k >= 0})
    y = {v: res.y[local[v]] for v in verts}
    r: dict[frozenset, Fraction] = {}
    omega = []
    for members, val in res.blossoms:
        B = frozenset(verts[i] for i in members)
        omega.append(B)
        if val:
            r[B] = val
    return matching, GeneralDuals(y, r, omega)


def shrink_large_blossoms(duals: GeneralDuals, eps) -> tuple[GeneralDuals, Fraction]:
    """Move r(B)/2 onto every vertex of each blossom with |B| >= 3/eps + 1.

    Coverage yr(e) never decreases; the objective grows by r(B)/2 per blossom.
    Returns the new duals and the total objective inflation.
    """
    eps = Fraction(eps)
    limit = 3 / eps
    out = duals.copy()
    inflation = ZERO
    for B, val in duals.r.items():
        if val > 0 and len(B) >= limit + 1:
            for v in B:
                out.y[v] = out.y.get(v, ZERO) + val / 2
            del out.r[B]
            out.omega = [S for S in out.omega if S != B]
            inflation += val / 2
    return out, inflation


def round_to_grid(duals: GeneralDuals, eps) -> tuple[GeneralDuals, Fraction]:
    eps = Fraction(eps)

    def up(q: Fraction) -> Fraction:
        return ceil(q / eps) * eps

    out = GeneralDuals({v: up(q) for v, q in duals.y.items()},
                       {B: up(q) for B, q in duals.r.items()}, list(duals.omega))
    return out, out.objective() - duals.objective()


def static_weighted_match(g: WeightedMultigraph, eps, grid: bool = False) -> CertifiedMatching:
    eps = as_epsilon(eps)
    matching, duals = exact_general_duals(g)
    duals, shrink_inf = shrink_large_blossoms(duals, eps)
    grid_inf = ZERO
    if grid:
        duals, grid_inf = round_to_grid(duals, eps)
    return CertifiedMatching(matching, g.total_weight(matching), duals, duals.objective(), eps,
                             shrink_inf, grid_inf)


def undercovered_edges(g: WeightedMultigraph, duals: GeneralDuals, eps) -> list[int]:
    """Alive edges with yr(e) < (1 - eps) w(e)."""
    eps = Fraction(eps)
    return [e for e, u, v, w in g.edge_tuples() if duals.yr(u, v) < (1 - eps) * w]


def is_laminar(family) -> bool:
    sets = list(family)
    for i, A in enumerate(sets):
        for B in sets[i + 1:]:
            if A & B and not (A <= B or B <= A):
                return False
    return True


@dataclass
class CertificateReport:
    items: dict[str, bool | None] = field(default_factory=dict)
    notes: dict[str, str] = field(default_factory=dict)
    uncovered: list[int] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(v is not False for v in self.items.values())


def verify_certificate(g: WeightedMultigraph, cert: CertifiedMatching, eps=None,
                       grid: bool | None = None, oracle_value: Fraction | None = None) -> CertificateReport:
    """Check each contract item separately; oracle items are skipped above 16 vertices."""
    eps = cert.eps if eps is None else Fraction(eps)
    rep = CertificateReport()
    d = cert.duals
    rep.items["matching_valid"] = is_integral_matching(g, cert.matching)

    if oracle_value is None:
        active = {v for e in g.edges() for v in g.ends(e)}
        if len(active) <= MAX_ORACLE_VERTICES:
            oracle_value = exact_mwm(g).value
    if oracle_value is None:
        rep.items["1_weight"] = None
        rep.notes["1_weight"] = "skipped: more than 16 vertices, no oracle"
        rep.items["6_objective"] = None
        rep.notes["6_objective"] = "skipped: more than 16 vertices, no oracle"
    else:
        rep.items["1_weight"] = g.total_weight(cert.matching) >= (1 - eps) * oracle_value
        rep.items["6_objective"] = d.objective() <= (1 + eps) * oracle_value

    rep.items["2_laminar"] = is_laminar(d.omega) and all(B in d.omega for B, v in d.r.items() if v > 0)
    rep.items["3_small_blossoms"] = all(len(B) <= 3 / eps for B, v in d.r.items() if v > 0)
    if grid is None:
        grid = cert.grid_inflation != 0
    if grid:
        rep.items["4_grid"] = all((q / eps).denominator == 1
                                  for q in [*d.y.values(), *d.r.values()])
    else:
        rep.items["4_grid"] = None
        rep.notes["4_grid"] = "grid mode off"
    rep.uncovered = undercovered_edges(g, d, eps)
    rep.items["5_coverage"] = not rep.uncovered
    rep.items["nonnegative"] = all(q >= 0 for q in [*d.y.values(), *d.r.values()])
    return rep
