"""Commutator bounds for tuples of real skew-symmetric matrices."""
from .canonical import CanonicalForm, canonical_form, lemma5_report, orthogonal_factor
from .compound_gram import gram_of_commutators, lhs_via_trace, second_compound
from .errors import BoundViolation, NumericFailure, UnsupportedDimensionError, UnsupportedInputError
from .inequality import Theorem1Report, bound_constant, equality_canonicalize, simplex_quadratic, theorem1_report
from .optimize import OptimizerConfig, sharpness_search, simplex_maximize

__all__ = [
    "BoundViolation",
    "CanonicalForm",
    "NumericFailure",
    "OptimizerConfig",
    "Theorem1Report",
    "UnsupportedDimensionError",
    "UnsupportedInputError",
    "bound_constant",
    "canonical_form",
    "equality_canonicalize",
    "gram_of_commutators",
    "lemma5_report",
    "lhs_via_trace",
    "orthogonal_factor",
    "second_compound",
    "sharpness_search",
    "simplex_maximize",
    "simplex_quadratic",
    "theorem1_report",
]
