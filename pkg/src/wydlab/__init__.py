"""Trace-functional laboratory for the two-variable relative entropies
J_p and their convexity, monotonicity, and equality structure."""

from .entropy import JEvaluation, j_p, j_p_quadrature, j_tilde_p, klein_gap, relative_entropy, wyd_skew
from .inequalities import GapReport, InstanceFamily
from .linalg import matrix_from_json, matrix_to_json

__all__ = [
    "JEvaluation",
    "j_p",
    "j_p_quadrature",
    "j_tilde_p",
    "klein_gap",
    "relative_entropy",
    "wyd_skew",
    "GapReport",
    "InstanceFamily",
    "matrix_from_json",
    "matrix_to_json",
]

__version__ = "0.1.0"
