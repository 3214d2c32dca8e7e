"""Depth-k expansion of recursive definitions and equality at a depth.

``expand_term`` replaces every recursion constant by its unfolded body until
the observation depth runs out.  Constant-headed spines are observed one
level lower, so a contractive definition unfolds a bounded number of times.
"""

from __future__ import annotations

from .diagnostics import EXPANSION_ERROR, Diagnostic, DiagnosticError
from .substitution import erase, spine_apply
from .syntax import (
    STUB,
    App,
    Atom,
    ConstDecl,
    DefDecl,
    HeadKind,
    KindDecl,
    Lam,
    Pi,
    Signature,
    Sort,
    Stub,
)


class ExpansionError(DiagnosticError):
    def __init__(self, message: str, decl: DefDecl | None = None) -> None:
        span = decl.span if decl is not None else None
        name = decl.name if decl is not None else None
        super().__init__(Diagnostic(EXPANSION_ERROR, message, span, decl=name))


class DefTable:
    """Recursive definitions of a signature, with a memo of expanded bodies.

    The memo maps ``(name, depth)`` to the expanded body.  Entries are pure
    functions of their key, so concurrent inserts of the same key agree.
    """

    def __init__(self, sig: Signature, max_entries: int | None = None) -> None:
        self.defs: dict[str, DefDecl] = {d.name: d for d in sig.definitions}
        self.simple = {name: erase(d.type) for name, d in self.defs.items()}
        self.max_entries = max_entries
        self._memo: dict[tuple[str, int], object] = {}
        self._active: set[tuple[str, int]] = set()

    def __contains__(self, name: str) -> bool:
        return name in self.defs

    def body(self, name: str, depth: int):
        key = (name, depth)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        decl = self.defs.get(name)
        if decl is None:
            raise ExpansionError(f"unbound recursion constant {name!r}")
        if key in self._active:
            raise ExpansionError(f"definition {name!r} unfolds without producing a constructor", decl)
        self._active.add(key)
        try:
            result = expand_term(decl.body, depth, self)
        finally:
            self._active.discard(key)
        if self.max_entries is None or len(self._memo) < self.max_entries:
            self._memo[key] = result
        return result


def expand_term(term, depth: int, defs: DefTable):
    if depth <= 0 or isinstance(term, Stub):
        return STUB
    if isinstance(term, Lam):
        return Lam(term.var, expand_term(term.body, depth, defs))
    if not isinstance(term, App):
        raise TypeError(f"not a term: {term!r}")
    if term.kind is HeadKind.CONST:
        return App(term.head, term.kind, tuple(expand_term(a, depth - 1, defs) for a in term.spine))
    if term.kind is HeadKind.VAR:
        return App(term.head, term.kind, tuple(expand_term(a, depth, defs) for a in term.spine))
    if term.kind is HeadKind.REC:
        spine = tuple(expand_term(a, depth, defs) for a in term.spine)
        body = defs.body(term.head, depth)
        result = spine_apply(spine, defs.simple[term.head], body, depth)
        if result is None:
            raise ExpansionError(
                f"applying the unfolding of {term.head!r} to its arguments is undefined",
                defs.defs[term.head],
            )
        return result
    raise ExpansionError(f"unresolved unification variable {term.head}")


def expand_type(ty, depth: int, defs: DefTable):
    """Expand inside a type or kind; atomic-type indices are observed at ``depth - 1``."""
    if isinstance(ty, Pi):
        return Pi(ty.var, expand_type(ty.dom, depth, defs), expand_type(ty.cod, depth, defs))
    if isinstance(ty, Atom):
        return Atom(ty.family, tuple(expand_term(a, depth - 1, defs) for a in ty.spine))
    if isinstance(ty, Sort):
        return ty
    raise TypeError(f"not a type or kind: {ty!r}")


expand_kind = expand_type


def expand_signature(sig: Signature, depth: int, defs: DefTable | None = None) -> Signature:
    """Expand every family and constant declaration; definitions are dropped."""
    defs = defs or DefTable(sig)
    out = []
    for d in sig:
        if isinstance(d, KindDecl):
            out.append(KindDecl(d.name, expand_kind(d.kind, depth, defs), d.implicit, d.span))
        elif isinstance(d, ConstDecl):
            out.append(ConstDecl(d.name, expand_type(d.type, depth, defs), d.implicit, d.span))
    return Signature(tuple(out))


# --- equality at a depth -----------------------------------------------------


def eq_at_depth(m, n, depth: int) -> bool:
    return _eq(m, n, depth, {}, {}, 0)


def _eq(m, n, depth, left, right, level) -> bool:
    if depth <= 0:
        return True
    if isinstance(m, Lam) and isinstance(n, Lam):
        return _eq(m.body, n.body, depth, {**left, m.var: level}, {**right, n.var: level}, level + 1)
    if isinstance(m, App) and isinstance(n, App):
        if m.kind is not n.kind or len(m.spine) != len(n.spine):
            return False
        if m.kind is HeadKind.VAR:
            if left.get(m.head, m.head) != right.get(n.head, n.head):
                return False
        elif m.head != n.head:
            return False
        inner = depth - 1 if m.kind is HeadKind.CONST else depth
        return all(_eq(a, b, inner, left, right, level) for a, b in zip(m.spine, n.spine))
    return isinstance(m, Stub) and isinstance(n, Stub)


def eq_types_at_depth(a, b, depth: int) -> bool:
    return _eq_type(a, b, depth, {}, {}, 0)


eq_kinds_at_depth = eq_types_at_depth


def _eq_type(a, b, depth, left, right, level) -> bool:
    if isinstance(a, Pi) and isinstance(b, Pi):
        if not _eq_type(a.dom, b.dom, depth, left, right, level):
            return False
        return _eq_type(a.cod, b.cod, depth, {**left, a.var: level}, {**right, b.var: level}, level + 1)
    if isinstance(a, Atom) and isinstance(b, Atom):
        if a.family != b.family or len(a.spine) != len(b.spine):
            return False
        return all(_eq(x, y, depth - 1, left, right, level) for x, y in zip(a.spine, b.spine))
    if isinstance(a, Sort) and isinstance(b, Sort):
        return a == b
    return False
