"""Depth-indexed type checking and validity analysis for coinductive LF signatures."""

__version__ = "0.1.0"

from .elaborate import elaborate
from .parser import parse_signature
from .pipeline import check_source, load_file, load_source
from .printer import pretty_print, print_signature
from .typecheck import check_signature
from .unfolding import DefTable, eq_at_depth, expand_signature, expand_term
from .validity import validity_report

__all__ = [
    "__version__",
    "parse_signature",
    "elaborate",
    "load_source",
    "load_file",
    "check_source",
    "check_signature",
    "pretty_print",
    "print_signature",
    "DefTable",
    "expand_term",
    "expand_signature",
    "eq_at_depth",
    "validity_report",
]
