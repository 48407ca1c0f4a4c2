"""Set-constraint models compiled to CNF, with social-golfer builders,
unit-propagation simplification, and a complete internal SAT solver."""

from .cnf import CnfFormula, EncodingStats, parse_dimacs, read_varmap
from .dsl import ParseError, SemanticError, format_model, parse_model
from .encoder import EncodeOptions, encode_model
from .model import ModelError, ProblemModel, SetVariable, Universe
from .sgp import SgpConfig, SgpVariant, decode_schedule, verify_schedule
from .simplify import Simplification, extend_model, unit_propagate
from .solver import Budget, SolveResult, check_model, iter_models, solve_external, solve_internal

__version__ = "0.1.0"

__all__ = [
    "Budget",
    "CnfFormula",
    "EncodeOptions",
    "EncodingStats",
    "ModelError",
    "ParseError",
    "ProblemModel",
    "SemanticError",
    "SetVariable",
    "SgpConfig",
    "SgpVariant",
    "Simplification",
    "SolveResult",
    "Universe",
    "check_model",
    "decode_schedule",
    "encode_model",
    "extend_model",
    "format_model",
    "iter_models",
    "parse_dimacs",
    "parse_model",
    "read_varmap",
    "solve_external",
    "solve_internal",
    "unit_propagate",
    "verify_schedule",
]
