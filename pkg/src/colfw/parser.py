"""Lexer and parser for Twelf-style concrete syntax.

Grammar accepted::

    decl  ::= ID ':' expr ['=' expr] '.'
    expr  ::= app ('->' app)*  |  app ('<-' app)*
    app   ::= atom+                        (a binder atom swallows the rest)
    atom  ::= ID | '_' | 'type' | 'cotype' | '(' expr ')'
            | '{' ID [':' expr] '}' expr | '[' ID [':' expr] ']' expr

``%`` starts a comment running to the end of the line.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

from .diagnostics import LEX_ERROR, SYNTAX_ERROR, Diagnostic, DiagnosticError, SourceSpan

_WORD = re.compile(r"[A-Za-z0-9_/'+\-<>]+")
_IDENT = re.compile(r"[A-Za-z0-9_/'+\-]+")
_PUNCT = set("(){}[]:.=")
KEYWORDS = {"type", "cotype"}


@dataclass(frozen=True)
class Token:
    kind: str  # "id", "arrow", "larrow", "hole", "type", "cotype", a punctuation char, or "eof"
    text: str
    span: SourceSpan


# --- surface expressions -----------------------------------------------------


@dataclass(frozen=True)
class SId:
    name: str
    span: SourceSpan


@dataclass(frozen=True)
class SHole:
    span: SourceSpan


@dataclass(frozen=True)
class SSort:
    co: bool
    span: SourceSpan


@dataclass(frozen=True)
class SApp:
    fn: "SExpr"
    arg: "SExpr"
    span: SourceSpan


@dataclass(frozen=True)
class SArrow:
    dom: "SExpr"
    cod: "SExpr"
    span: SourceSpan


@dataclass(frozen=True)
class SPi:
    var: str
    ann: "SExpr | None"
    body: "SExpr"
    span: SourceSpan


@dataclass(frozen=True)
class SLam:
    var: str
    ann: "SExpr | None"
    body: "SExpr"
    span: SourceSpan


SExpr = Union[SId, SHole, SSort, SApp, SArrow, SPi, SLam]


@dataclass(frozen=True)
class SurfaceDecl:
    name: str
    type: SExpr
    body: SExpr | None
    span: SourceSpan
    name_span: SourceSpan


def flatten_app(expr: SExpr) -> tuple[SExpr, list[SExpr]]:
    args = []
    while isinstance(expr, SApp):
        args.append(expr.arg)
        expr = expr.fn
    args.reverse()
    return expr, args


# --- lexer -----------------------------------------------------------------


class _Source:
    def __init__(self, text: str, file: str) -> None:
        self.text = text
        self.file = file
        self.line_starts = [0]
        for i, ch in enumerate(text):
            if ch == "\n":
                self.line_starts.append(i + 1)

    def position(self, offset: int) -> tuple[int, int]:
        lo, hi = 0, len(self.line_starts) - 1
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if self.line_starts[mid] <= offset:
                lo = mid
            else:
                hi = mid - 1
        return lo + 1, offset - self.line_starts[lo] + 1

    def span(self, start: int, end: int) -> SourceSpan:
        line, col = self.position(start)
        end_line, end_col = self.position(end)
        return SourceSpan(self.file, start, end, line, col, end_line, end_col)


def tokenize(text: str, file: str = "<input>") -> list[Token]:
    src = _Source(text, file)
    tokens: list[Token] = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch == "%":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if ch in _PUNCT:
            tokens.append(Token(ch, ch, src.span(i, i + 1)))
            i += 1
            continue
        m = _WORD.match(text, i)
        if m is None:
            raise DiagnosticError(
                Diagnostic(LEX_ERROR, f"unexpected character {ch!r}", src.span(i, i + 1))
            )
        word = m.group()
        span = src.span(i, m.end())
        i = m.end()
        if word == "->":
            tokens.append(Token("arrow", word, span))
        elif word == "<-":
            tokens.append(Token("larrow", word, span))
        elif word == "_":
            tokens.append(Token("hole", word, span))
        elif word in KEYWORDS:
            tokens.append(Token(word, word, span))
        elif _IDENT.fullmatch(word):
            tokens.append(Token("id", word, span))
        else:
            raise DiagnosticError(Diagnostic(LEX_ERROR, f"malformed identifier {word!r}", span))
    tokens.append(Token("eof", "", src.span(n, n)))
    return tokens


# --- parser ----------------------------------------------------------------

_ATOM_START = {"id", "hole", "type", "cotype", "(", "{", "["}


class _Parser:
    def __init__(self, tokens: list[Token]) -> None:
        self.tokens = tokens
        self.pos = 0

    @property
    def peek(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def expect(self, kind: str, what: str) -> Token:
        tok = self.peek
        if tok.kind != kind:
            found = "end of input" if tok.kind == "eof" else repr(tok.text)
            raise DiagnosticError(Diagnostic(SYNTAX_ERROR, f"expected {what}, found {found}", tok.span))
        return self.advance()

    def recover(self) -> None:
        """Skip past the next '.' so parsing can resume at a declaration."""
        while self.peek.kind not in (".", "eof"):
            self.advance()
        self.advance()

    def decl(self) -> SurfaceDecl:
        name = self.expect("id", "a declaration name")
        self.expect(":", "':'")
        ty = self.expr()
        body = None
        if self.peek.kind == "=":
            self.advance()
            body = self.expr()
        end = self.expect(".", "'.' ending the declaration")
        return SurfaceDecl(name.text, ty, body, name.span.merge(end.span), name.span)

    def expr(self) -> SExpr:
        parts = [self.app()]
        ops = []
        while self.peek.kind in ("arrow", "larrow"):
            ops.append(self.advance())
            parts.append(self.app())
        if not ops:
            return parts[0]
        if len({op.kind for op in ops}) > 1:
            raise DiagnosticError(
                Diagnostic(SYNTAX_ERROR, "cannot mix '->' and '<-' without parentheses", ops[0].span)
            )
        if ops[0].kind == "arrow":
            result = parts[-1]
            for part in reversed(parts[:-1]):
                result = SArrow(part, result, part.span.merge(result.span))
            return result
        # A <- B <- C  is  (A <- B) <- C,  i.e.  C -> B -> A
        result = parts[0]
        for part in parts[1:]:
            result = SArrow(part, result, result.span.merge(part.span))
        return result

    def app(self) -> SExpr:
        if self.peek.kind not in _ATOM_START:
            tok = self.peek
            found = "end of input" if tok.kind == "eof" else repr(tok.text)
            raise DiagnosticError(Diagnostic(SYNTAX_ERROR, f"expected an expression, found {found}", tok.span))
        head = self.atom()
        while self.peek.kind in _ATOM_START and not isinstance(head, (SPi, SLam)):
            arg = self.atom()
            head = SApp(head, arg, head.span.merge(arg.span))
        return head

    def atom(self) -> SExpr:
        tok = self.advance()
        if tok.kind == "id":
            return SId(tok.text, tok.span)
        if tok.kind == "hole":
            return SHole(tok.span)
        if tok.kind in ("type", "cotype"):
            return SSort(tok.kind == "cotype", tok.span)
        if tok.kind == "(":
            inner = self.expr()
            self.expect(")", "')'")
            return inner
        if tok.kind in ("{", "["):
            close = "}" if tok.kind == "{" else "]"
            name = self.advance()
            if name.kind not in ("id", "hole"):
                raise DiagnosticError(Diagnostic(SYNTAX_ERROR, "expected a binder name", name.span))
            ann = None
            if self.peek.kind == ":":
                self.advance()
                ann = self.expr()
            self.expect(close, f"'{close}'")
            body = self.expr()
            cls = SPi if tok.kind == "{" else SLam
            return cls(name.text, ann, body, tok.span.merge(body.span))
        raise DiagnosticError(Diagnostic(SYNTAX_ERROR, f"unexpected {tok.text!r}", tok.span))


def parse_signature(source: str, file: str = "<input>") -> tuple[list[SurfaceDecl], list[Diagnostic]]:
    """Parse a whole file; syntax errors are reported and parsing resumes after the next '.'."""
    try:
        tokens = tokenize(source, file)
    except DiagnosticError as err:
        return [], [err.diagnostic]
    parser = _Parser(tokens)
    decls: list[SurfaceDecl] = []
    diags: list[Diagnostic] = []
    while parser.peek.kind != "eof":
        start = parser.pos
        try:
            decls.append(parser.decl())
        except DiagnosticError as err:
            diags.append(err.diagnostic)
            if parser.pos == start or parser.tokens[parser.pos - 1].kind != ".":
                parser.recover()
    return decls, diags


def parse_expr(source: str, file: str = "<input>") -> SExpr:
    parser = _Parser(tokenize(source, file))
    expr = parser.expr()
    parser.expect("eof", "end of input")
    return expr
