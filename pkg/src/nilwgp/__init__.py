"""Exact experiments on nilpotent matrix groups: free nilpotent Lie algebras,
nilprogressions, subvariety catalogs and general-position statistics."""

from .errors import NilwgpError
from .exact import RATIONAL, ExactMatrix, FunctionFieldMode, MultiPoly
from .freelie import CommutatorTerm, HallBasis, hall_basis, validate_hall_basis, witt_dimension
from .nilgroup import (NilMatrix, UnipotentMatrix, abelian, affine, bch_star, central_series, exp,
                       group_commutator, group_spec, heisenberg, iterated_commutator, log, quotient,
                       sample_generics, upp)
from .progressions import PointSet, arithmetic_progression, nilbox, nilprogression, word_ball
from .stats import (approx_subgroup_check, doubling, energy, es_experiment, find_control, growth_fit,
                    position_report, triple_count)
from .varieties import SubvarietySpec, annihilator_search, intersect_count, make_catalog

__version__ = "0.1.0"

__all__ = [
    "NilwgpError", "RATIONAL", "ExactMatrix", "FunctionFieldMode", "MultiPoly",
    "CommutatorTerm", "HallBasis", "hall_basis", "validate_hall_basis", "witt_dimension",
    "NilMatrix", "UnipotentMatrix", "abelian", "affine", "bch_star", "central_series", "exp",
    "group_commutator", "group_spec", "heisenberg", "iterated_commutator", "log", "quotient",
    "sample_generics", "upp", "PointSet", "arithmetic_progression", "nilbox", "nilprogression", "word_ball",
    "approx_subgroup_check", "doubling", "energy", "es_experiment", "find_control", "growth_fit",
    "position_report", "triple_count", "SubvarietySpec", "annihilator_search", "intersect_count", "make_catalog",
]
