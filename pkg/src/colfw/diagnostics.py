"""Source spans, diagnostics and their text/JSON renderings."""

from __future__ import annotations

import json
import os
import sys
from dataclasses import dataclass, field
from typing import Any, Iterable

JSON_VERSION = 1

# codes, grouped by the stage that emits them
SYNTAX_ERROR = "syntax-error"
LEX_ERROR = "lex-error"
DUPLICATE_NAME = "duplicate-name"
UNDECLARED_NAME = "undeclared-name"
NAMESPACE_MISUSE = "namespace-misuse"
IMPLICIT_UNINFERABLE = "implicit-uninferable"
IMPLICIT_SHADOWING = "implicit-shadowing"
UNIFY_MISMATCH = "unify-mismatch"
OCCURS_CHECK = "occurs-check"
UNSOLVED_CONSTRAINT = "unsolved-constraint"
HIGHER_ORDER = "higher-order-unsupported"

FAMILY_UNDER_APPLIED = "family-under-applied"
SPINE_ARITY = "spine-arity"
SHAPE_MISMATCH = "shape-mismatch"
TYPE_MISMATCH = "type-mismatch"
UNBOUND_HEAD = "unbound-head"
SUBST_UNDEFINED = "subst-undefined"
EXPANSION_ERROR = "expansion-error"

NON_CONTRACTIVE = "non-contractive"
INVALID_CYCLE = "invalid-cycle"
UNPRODUCTIVE_CYCLE = "unproductive-cycle"

IO_ERROR = "io-error"


@dataclass(frozen=True)
class SourceSpan:
    file: str
    start: int
    end: int
    line: int
    col: int
    end_line: int
    end_col: int

    def __post_init__(self) -> None:
        if self.start > self.end:
            raise ValueError("span start after end")

    def merge(self, other: "SourceSpan | None") -> "SourceSpan":
        if other is None:
            return self
        first, last = (self, other) if self.start <= other.start else (other, self)
        return SourceSpan(
            self.file, first.start, max(self.end, other.end), first.line, first.col,
            last.end_line, last.end_col,
        )

    def to_dict(self) -> dict[str, Any]:
        return {"line": self.line, "col": self.col, "endLine": self.end_line, "endCol": self.end_col}


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str
    span: SourceSpan | None = None
    severity: str = "error"
    judgment: tuple[str, ...] = field(default=())
    decl: str | None = None

    def sort_key(self) -> tuple:
        if self.span is None:
            return (1, 0, 0, self.code, self.message)
        return (0, self.span.line, self.span.col, self.code, self.message)

    def to_dict(self) -> dict[str, Any]:
        item: dict[str, Any] = {"severity": self.severity, "code": self.code}
        if self.span is not None:
            item.update(self.span.to_dict())
        else:
            item.update({"line": 0, "col": 0, "endLine": 0, "endCol": 0})
        item["message"] = self.message
        if self.judgment:
            item["judgment"] = " > ".join(self.judgment)
        return item


class DiagnosticError(Exception):
    """Carries a single diagnostic out of a pass that cannot continue."""

    def __init__(self, diagnostic: Diagnostic) -> None:
        super().__init__(diagnostic.message)
        self.diagnostic = diagnostic


def sort_diagnostics(diags: Iterable[Diagnostic]) -> list[Diagnostic]:
    seen = set()
    out = []
    for d in sorted(diags, key=Diagnostic.sort_key):
        key = (d.code, d.span, d.message)
        if key not in seen:
            seen.add(key)
            out.append(d)
    return out


def _use_color(stream) -> bool:
    mode = os.environ.get("COLFW_COLOR", "auto")
    if mode == "never":
        return False
    return hasattr(stream, "isatty") and stream.isatty()


def format_diagnostic(diag: Diagnostic, color: bool = False) -> str:
    where = ""
    if diag.span is not None:
        where = f"{diag.span.file}:{diag.span.line}:{diag.span.col}: "
    label = diag.severity
    if color:
        label = f"\x1b[31m{label}\x1b[0m" if diag.severity == "error" else f"\x1b[33m{label}\x1b[0m"
    text = f"{where}{label}[{diag.code}]: {diag.message}"
    if diag.judgment:
        text += f"\n  in {' > '.join(diag.judgment)}"
    return text


def render_text(diags: Iterable[Diagnostic], stream=None) -> str:
    stream = stream or sys.stderr
    color = _use_color(stream)
    return "\n".join(format_diagnostic(d, color) for d in diags)


def render_json(diags: Iterable[Diagnostic], file: str) -> str:
    payload = {
        "version": JSON_VERSION,
        "file": file,
        "items": [d.to_dict() for d in diags],
    }
    return json.dumps(payload, indent=2, sort_keys=False)
