"""Command-line front end: ``decmatch run`` executes a mode on a graph file,
``decmatch gen`` writes a synthetic instance and a deletion order."""
from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction
from pathlib import Path

from .config import Config, stream
from .congestion import weighted_m_or_estar
from .decremental import DecMatchingEngine, ceil_log, jsonable
from .frac_match import InvariantViolation, weighted_frac_match, weighted_frac_match_general
from .graph import (GraphError, WeightedMultigraph, double_cover, format_graph, is_integral_matching,
                    parse_deletions, parse_graph, two_coloring)
from .oracle import MAX_ORACLE_VERTICES, exact_bipartite_frac_opt, exact_mwm
from .reduction import Orchestrator
from .static_match import static_weighted_match, verify_certificate

MODES = ("frac_solve", "m_or_e", "engine", "orchestrate", "verify")
FAMILIES = ("random_bipartite", "random_general", "disjoint_matching", "star", "parallel_heavy")


def _s(q) -> str | None:
    return None if q is None else str(q)


def _oracle(g: WeightedMultigraph, mode: str) -> Fraction | None:
    if mode == "off":
        return None
    active = {v for e in g.edges() for v in g.ends(e)}
    if len(active) > MAX_ORACLE_VERTICES:
        return None
    return exact_mwm(g).value


class Run:
    def __init__(self, cfg: Config, oracle: str):
        self.cfg = cfg
        self.oracle = oracle
        self.steps: list[dict] = []
        self.violations: list[str] = []
        self.events: list[dict] = []

    def fail(self, msg: str) -> None:
        self.violations.append(msg)

    def record(self, step, deleted, g, matching, extra=None):
        weight = g.total_weight(matching)
        opt = _oracle(g, self.oracle)
        rec = {"step": step, "deleted_edge": deleted, "matching_weight": weight,
               "oracle_weight": _s(opt),
               "ratio": _s(Fraction(weight) / opt) if opt else None}
        if extra:
            rec["counters"] = jsonable(extra)
        if not is_integral_matching(g, matching):
            self.fail(f"step {step}: output is not a matching of alive edges")
        if opt is not None and weight > opt:
            self.fail(f"step {step}: matching weight {weight} exceeds optimum {opt}")
        self.steps.append(rec)
        return opt


def _mode_frac_solve(run: Run, g: WeightedMultigraph, deletions, cfg: Config) -> dict:
    eps = cfg.eps
    if two_coloring(g) is not None:
        res = weighted_frac_match(g, None, eps)
        value, iters, trace = res.value, res.iterations, res.trace
        opt = exact_bipartite_frac_opt(g).value if run.oracle != "off" else None
    else:
        gen = weighted_frac_match_general(g, None, eps)
        value, iters, trace = gen.value, gen.cover_result.iterations, gen.cover_result.trace
        # the cover optimum halved bounds the general optimum from above
        opt = exact_bipartite_frac_opt(double_cover(g).graph).value / 2 if run.oracle != "off" else None
    run.events.extend(trace)
    if iters > g.W / eps + 1:
        run.fail(f"iterations {iters} > W/eps + 1 = {g.W / eps + 1}")
    ratio = value / opt if opt else None
    if opt is not None and value < (1 - 5 * eps) * opt:
        run.fail(f"value {value} < (1 - 5 eps) * {opt}")
    run.steps.append({"step": 0, "deleted_edge": None, "value": str(value), "oracle_weight": _s(opt),
                      "ratio": _s(ratio), "iterations": iters})
    return {"min_ratio": _s(ratio), "iterations": iters}


def _mode_m_or_e(run: Run, g: WeightedMultigraph, deletions, cfg: Config) -> dict:
    k0 = 1 / cfg.alpha ** ceil_log(cfg.alpha, g.n)
    kappa = {e: k0 for e in g.edges()}
    mu = static_weighted_match(g, cfg.eps).weight
    out = weighted_m_or_estar(g, kappa, cfg.eps, mu, cfg.alpha, cfg.rho, stream(cfg.seed, 0), check=True)
    rec = {"step": 0, "deleted_edge": None, "branch": out.kind, "sample_weight": out.cert.weight,
           "estimate": str(mu)}
    if out.is_matching:
        rec["value"] = str(sum((g.weight(e) * v for e, v in out.x.items()), Fraction(0)))
    else:
        rec["estar"] = out.estar
        rec["estar_budget"] = str(out.estar_budget)
        if any(kappa[e] >= 1 for e in out.estar):
            run.fail("bottleneck edge with capacity 1")
    run.steps.append(rec)
    return {"branch": out.kind}


def _mode_engine(run: Run, g: WeightedMultigraph, deletions, cfg: Config) -> dict:
    eps = cfg.eps
    mu = Fraction(static_weighted_match(g, eps).weight)
    eng = DecMatchingEngine(g.copy(), mu, cfg)
    ratios = []
    run.record(0, None, g, eng.M, eng.instrumentation_report())
    for i, e in enumerate(deletions, start=1):
        st = eng.delete(e)
        g.delete_edge(e)
        opt = run.record(i, e, g, st.matching, eng.instrumentation_report())
        if not st.ok:
            if opt is not None and not opt < (1 - 2 * eps) * mu:
                run.fail(f"step {i}: no-signal while optimum {opt} >= (1 - 2 eps) mu")
            break
        if eng.weight() < (1 - 20 * eps) * mu:
            run.fail(f"step {i}: w(M) = {eng.weight()} < (1 - 20 eps) mu")
        if opt:
            ratios.append(Fraction(eng.weight()) / opt)
    run.events.extend(eng.events)
    rep = eng.instrumentation_report()
    return {"min_ratio": _s(min(ratios, default=None)), "phases": rep["phases"],
            "m_or_e_calls": rep["calls_to_m_or_e"], "restarts": 0,
            "terminated": rep["terminated"], "phi_del": str(rep["phi_del"]),
            "w_kappa_E0": str(rep["w_kappa_E0"])}


def _mode_orchestrate(run: Run, g: WeightedMultigraph, deletions, cfg: Config) -> dict:
    orch = Orchestrator(g.copy(), cfg)
    ratios = []
    run.record(0, None, g, orch.matching(), orch.report())
    for i, e in enumerate(deletions, start=1):
        m = orch.delete(e)
        g.delete_edge(e)
        opt = run.record(i, e, g, m, orch.report())
        if opt:
            ratios.append(Fraction(g.total_weight(m)) / opt)
    rep = orch.report()
    for inst in orch.instances:
        if inst.engine:
            run.events.extend(inst.engine.events)
    return {"min_ratio": _s(min(ratios, default=None)), "phases": rep["phases"],
            "m_or_e_calls": rep["calls_to_m_or_e"], "restarts": rep["restarts"]}


def _mode_verify(run: Run, g: WeightedMultigraph, deletions, cfg: Config) -> dict:
    def snapshot(i, e):
        cert = static_weighted_match(g, cfg.eps)
        opt = run.record(i, e, g, cert.matching)
        rep = verify_certificate(g, cert, cfg.eps, oracle_value=opt if run.oracle != "off" else None)
        run.steps[-1]["certificate"] = {k: v for k, v in rep.items.items()}
        if not rep.ok:
            run.fail(f"step {i}: certificate items failed: {[k for k, v in rep.items.items() if v is False]}")

    snapshot(0, None)
    for i, e in enumerate(deletions, start=1):
        g.delete_edge(e)
        snapshot(i, e)
    return {"snapshots": len(run.steps)}


HANDLERS = {"frac_solve": _mode_frac_solve, "m_or_e": _mode_m_or_e, "engine": _mode_engine,
            "orchestrate": _mode_orchestrate, "verify": _mode_verify}


def run(cfg: Config, mode: str, graph_text: str, deletions_text: str = "", oracle: str = "guarded",
        graph_source: str = "<graph>", deletions_source: str = "<deletions>") -> dict:
    """Execute ``mode`` and return the report dict (raises GraphError on bad input)."""
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}; choose from {', '.join(MODES)}")
    g = parse_graph(graph_text, graph_source)
    deletions = parse_deletions(deletions_text, deletions_source)
    r = Run(cfg, oracle)
    start = time.perf_counter()
    try:
        summary = HANDLERS[mode](r, g, deletions, cfg)
    except (InvariantViolation, AssertionError) as exc:
        r.fail(f"invariant breach: {exc}")
        summary = {}
    summary["wall_time_s"] = round(time.perf_counter() - start, 6)
    return jsonable({
        "mode": mode,
        "config": {"epsilon": str(cfg.eps), "alpha": str(cfg.alpha), "rho": str(cfg.rho),
                   "lambda": cfg.lam, "theta": str(cfg.theta), "seed": cfg.seed, "oracle": oracle},
        "steps": r.steps,
        "summary": summary,
        "violations": r.violations,
        "invariants_ok": not r.violations,
        "events": r.events,
    })


# instance generation

def gen_instance(family: str, n: int, m: int, W: int, seed: int, k: int = 5, w: int = 3,
                 order: str = "random") -> tuple[str, str]:
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")
    rng = stream(seed, 7)
    if family == "disjoint_matching":
        g = WeightedMultigraph(2 * k, max(W, w))
        for i in range(k):
            g.add_edge(2 * i, 2 * i + 1, w)
    elif family == "star":
        g = WeightedMultigraph(n, W)
        for leaf in range(1, n):
            g.add_edge(0, leaf, int(rng.integers(1, W + 1)))
    else:
        g = WeightedMultigraph(n, W)
        if family == "parallel_heavy":
            pairs = [tuple(int(a) for a in rng.choice(n, size=2, replace=False))
                     for _ in range(max(1, n // 2))]
        for _ in range(m):
            if family == "random_bipartite":
                half = n // 2
                u, v = int(rng.integers(0, half)), int(rng.integers(half, n))
            elif family == "random_general":
                u, v = (int(a) for a in rng.choice(n, size=2, replace=False))
            else:
                u, v = pairs[int(rng.integers(0, len(pairs)))]
            g.add_edge(u, v, int(rng.integers(1, W + 1)))
    ids = list(g.edges())
    if order == "heavy_first":
        ids.sort(key=lambda e: (-g.weight(e), e))
    else:
        ids = [ids[i] for i in rng.permutation(len(ids))]
    return format_graph(g), "".join(f"{e}\n" for e in ids)


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="decmatch", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run a mode on a graph file")
    r.add_argument("--mode", choices=MODES, required=True)
    r.add_argument("--graph", required=True, type=Path)
    r.add_argument("--deletions", type=Path)
    r.add_argument("--epsilon", type=_fraction, default=Fraction(1, 5))
    r.add_argument("--alpha", type=_fraction, default=Fraction(8))
    r.add_argument("--rho", type=_fraction, default=Fraction(8))
    r.add_argument("--lambda", dest="lam", type=int, default=16)
    r.add_argument("--theta", type=_fraction, default=Fraction(1, 8))
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--report", type=Path, help="summary JSON path (default: stdout)")
    r.add_argument("--events", type=Path, help="JSON-lines event log / solver trace path")
    r.add_argument("--oracle", choices=("off", "guarded"), default="guarded")

    gsub = sub.add_parser("gen", help="write a synthetic instance and deletion order")
    gsub.add_argument("--family", choices=FAMILIES, required=True)
    gsub.add_argument("--n", type=int, default=12)
    gsub.add_argument("--m", type=int, default=24)
    gsub.add_argument("--W", type=int, default=4)
    gsub.add_argument("--k", type=int, default=5, help="pairs for disjoint_matching")
    gsub.add_argument("--w", type=int, default=3, help="edge weight for disjoint_matching")
    gsub.add_argument("--order", choices=("random", "heavy_first"), default="random")
    gsub.add_argument("--seed", type=int, default=0)
    gsub.add_argument("--out-graph", type=Path, required=True)
    gsub.add_argument("--out-deletions", type=Path, required=True)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "gen":
        graph, dels = gen_instance(args.family, args.n, args.m, args.W, args.seed, args.k, args.w, args.order)
        args.out_graph.write_text(graph)
        args.out_deletions.write_text(dels)
        return 0

    cfg = Config(eps=args.epsilon, alpha=args.alpha, rho=args.rho, lam=args.lam,
                 theta=args.theta, seed=args.seed)
    bad = cfg.violations()
    if bad:
        print("config error: " + "; ".join(bad), file=sys.stderr)
        return 2
    try:
        report = run(cfg, args.mode, args.graph.read_text(),
                     args.deletions.read_text() if args.deletions else "", args.oracle,
                     str(args.graph), str(args.deletions))
    except GraphError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    events = report.pop("events")
    if args.events:
        args.events.write_text("".join(json.dumps(ev, sort_keys=True) + "\n" for ev in events))
    text = json.dumps(report, indent=2, sort_keys=True)
    if args.report:
        args.report.write_text(text + "\n")
    else:
        print(text)
    if not report["invariants_ok"]:
        where = f" (event log: {args.events})" if args.events else ""
        for v in report["violations"]:
            print(f"violation: {v}{where}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
