"""Bounded linear temporal logic: syntax, trace semantics and monitoring."""

from .formula import (
    FALSE,
    TRUE,
    And,
    BoolVar,
    Bound,
    Compare,
    Const,
    Eventually,
    Formula,
    Globally,
    Implies,
    Not,
    Or,
    Until,
    depth,
    desugar,
    format_formula,
    horizon,
    variables,
)
from .monitor import Monitor, Verdict, check_trace
from .parser import MixedBoundsWarning, parse
from .semantics import atom_holds, evaluate

__all__ = [
    "FALSE", "TRUE", "And", "BoolVar", "Bound", "Compare", "Const", "Eventually",
    "Formula", "Globally", "Implies", "Not", "Or", "Until", "depth", "desugar",
    "format_formula", "horizon", "variables", "Monitor", "Verdict", "check_trace",
    "MixedBoundsWarning", "parse", "atom_holds", "evaluate",
]
