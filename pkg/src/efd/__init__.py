"""Metric back-and-forth games: distances, strategies, clocks, proofs."""

from .backforth import (BnfEngine, DistanceTable, EMPTY, equiv_bf,
                        position_key, parse_position_key, position_of,
                        r0, r_alpha, r_stab, sync_closure)
from .formula_search import formula_sup_lower_bound
from .lang import (DEFAULT_OMEGA, MetricLanguage, WeakModulus, fixture,
                   load_language, parse_omega_spec, validate_language)
from .structures import (FiniteStructure, MorphismMatrix, compose_matrices,
                         decode_matrix, encode_morphism, find_isomorphism,
                         is_homomorphism, load_structure, validate_structure)

__version__ = "0.1.0"

__all__ = [
    "BnfEngine", "DistanceTable", "EMPTY", "DEFAULT_OMEGA",
    "MetricLanguage", "WeakModulus", "FiniteStructure", "MorphismMatrix",
    "compose_matrices", "decode_matrix", "encode_morphism", "equiv_bf",
    "find_isomorphism", "fixture", "formula_sup_lower_bound",
    "is_homomorphism", "load_language", "load_structure", "parse_omega_spec",
    "parse_position_key", "position_key", "position_of", "r0", "r_alpha",
    "r_stab", "sync_closure", "validate_language", "validate_structure",
    "__version__",
]
