"""Glue between the passes: load, parse, elaborate, validate, check."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .diagnostics import Diagnostic, sort_diagnostics
from .elaborate import elaborate
from .parser import SurfaceDecl, parse_signature
from .syntax import Signature
from .typecheck import check_signature
from .unfolding import DefTable
from .validity import ValidityReport, validity_report


@dataclass
class Loaded:
    file: str
    surface: list[SurfaceDecl]
    signature: Signature
    diagnostics: list[Diagnostic] = field(default_factory=list)


def load_source(source: str, file: str = "<input>") -> Loaded:
    surface, diags = parse_signature(source, file)
    sig, more = elaborate(surface)
    return Loaded(file, surface, sig, diags + more)


def load_file(path: str | Path) -> Loaded:
    """Read and elaborate a file; ``OSError`` and ``UnicodeDecodeError`` propagate."""
    path = Path(path)
    return load_source(path.read_text(encoding="utf-8"), str(path))


def check_loaded(loaded: Loaded, depth: int) -> tuple[list[Diagnostic], ValidityReport]:
    report = validity_report(loaded.signature)
    diags = list(loaded.diagnostics) + report.diagnostics
    diags += check_signature(loaded.signature, depth, DefTable(loaded.signature))
    return sort_diagnostics(diags), report


def check_source(source: str, depth: int, file: str = "<input>") -> list[Diagnostic]:
    diags, _ = check_loaded(load_source(source, file), depth)
    return diags
