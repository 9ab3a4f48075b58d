"""Decremental approximate maximum-weight matching on weighted multigraphs."""
from .config import Config
from .congestion import weighted_m_or_estar
from .decremental import DecMatchingEngine
from .frac_match import weighted_frac_match, weighted_frac_match_general
from .graph import WeightedMultigraph
from .oracle import exact_bipartite_frac_opt, exact_mwm
from .reduction import Orchestrator, vertex_red, vertex_red_basic
from .small_match import SmallMatchEngine
from .sparsify import Sparsifier, round_to_integral
from .static_match import static_weighted_match, verify_certificate

__version__ = "0.1.0"

__all__ = [
    "Config", "DecMatchingEngine", "Orchestrator", "SmallMatchEngine", "Sparsifier", "WeightedMultigraph",
    "exact_bipartite_frac_opt", "exact_mwm", "round_to_integral", "static_weighted_match", "verify_certificate",
    "vertex_red", "vertex_red_basic", "weighted_frac_match", "weighted_frac_match_general", "weighted_m_or_estar",
]
