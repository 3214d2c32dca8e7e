"""Bidirectional type checking at a finite observation depth.

Every judgment takes the depth ``k`` explicitly.  At depth 0 all judgments
hold.  Spines after a variable head are checked at the same depth, spines
after a constant head (and indices of atomic types) one level lower; that
drop is what makes checking of infinite terms terminate.
"""

from __future__ import annotations

from contextlib import contextmanager
from typing import Iterator

from .diagnostics import (
    FAMILY_UNDER_APPLIED,
    SHAPE_MISMATCH,
    SPINE_ARITY,
    SUBST_UNDEFINED,
    TYPE_MISMATCH,
    UNBOUND_HEAD,
    Diagnostic,
    DiagnosticError,
)
from .printer import pretty_print
from .substitution import ErasureError, erase, subst_cantype
from .syntax import (
    App,
    Atom,
    ConstDecl,
    Context,
    DefDecl,
    HeadKind,
    KindDecl,
    Lam,
    Pi,
    Signature,
    Sort,
    fresh_name,
    free_vars,
    rename,
)
from .unfolding import DefTable, eq_types_at_depth, expand_kind, expand_term, expand_type


class CheckError(DiagnosticError):
    pass


class CheckState:
    """Expanded signature, definitions and the trail of open judgments."""

    def __init__(self, sig: Signature | None = None, defs: DefTable | None = None) -> None:
        self.families: dict[str, object] = {}
        self.constants: dict[str, object] = {}
        self.implicits: dict[str, int] = {}
        self.defs = defs
        self.trail: list[str] = []
        self.decl = None
        if sig is not None:
            for d in sig:
                if isinstance(d, KindDecl):
                    self.families[d.name] = d.kind
                elif isinstance(d, ConstDecl):
                    self.constants[d.name] = d.type
            self.implicits = sig.implicit_counts()

    @contextmanager
    def judgment(self, name: str, depth: int) -> Iterator[None]:
        self.trail.append(f"{name}@{depth}")
        try:
            yield
        finally:
            self.trail.pop()

    def fail(self, code: str, message: str):
        span = getattr(self.decl, "span", None)
        name = getattr(self.decl, "name", None)
        raise CheckError(Diagnostic(code, message, span, judgment=tuple(self.trail), decl=name))

    def show(self, node) -> str:
        return pretty_print(node, self.implicits, show_implicit=True)

    # --- contexts ------------------------------------------------------------

    @staticmethod
    def lookup(ctx: Context, name: str):
        for x, ty in reversed(ctx):
            if x == name:
                return ty
        return None

    @staticmethod
    def fresh(base: str, ctx: Context, *nodes) -> str:
        avoid = {x for x, _ in ctx}
        for node in nodes:
            avoid |= free_vars(node)
        return fresh_name(base, avoid)

    def check_context(self, ctx: Context, k: int) -> None:
        with self.judgment("check_context", k):
            for i, (_, ty) in enumerate(ctx):
                self.check_type(ctx[:i], ty, k)

    # --- kinds and types -----------------------------------------------------

    def check_kind(self, ctx: Context, kind, k: int) -> None:
        if k <= 0:
            return
        with self.judgment("check_kind", k):
            while isinstance(kind, Pi):
                self.check_type(ctx, kind.dom, k)
                z = self.fresh(kind.var, ctx, kind.cod)
                ctx = ctx + ((z, kind.dom),)
                kind = kind.cod if kind.var == "_" else rename(kind.cod, kind.var, z)
            if not isinstance(kind, Sort):
                self.fail(TYPE_MISMATCH, f"expected a kind, found {self.show(kind)}")

    def check_type(self, ctx: Context, ty, k: int) -> None:
        if k <= 0:
            return
        with self.judgment("check_type", k):
            while isinstance(ty, Pi):
                self.check_type(ctx, ty.dom, k)
                z = self.fresh(ty.var, ctx, ty.cod)
                ctx = ctx + ((z, ty.dom),)
                ty = ty.cod if ty.var == "_" else rename(ty.cod, ty.var, z)
            if not isinstance(ty, Atom):
                self.fail(TYPE_MISMATCH, f"expected a type, found {self.show(ty)}")
            kind = self.infer_atomic(ctx, ty, k)
            if isinstance(kind, Pi):
                self.fail(
                    FAMILY_UNDER_APPLIED,
                    f"type family {ty.family!r} is under-applied: its kind still expects {self.show(kind)}",
                )

    def infer_atomic(self, ctx: Context, ty: Atom, k: int):
        with self.judgment("infer_atomic", k):
            kind = self.families.get(ty.family)
            if kind is None:
                self.fail(UNBOUND_HEAD, f"unknown type family {ty.family!r}")
            if k <= 0:
                return Sort(False)
            return self.spine_check_kind(ctx, ty.spine, kind, k)

    def spine_check_kind(self, ctx: Context, spine, kind, k: int):
        with self.judgment("spine_check_kind", k):
            for m in spine:
                if not isinstance(kind, Pi):
                    self.fail(SPINE_ARITY, "type family applied to too many arguments")
                self.check_term(ctx, m, kind.dom, k - 1)
                kind = self._instantiate(kind, m, k)
            return kind

    # --- terms ---------------------------------------------------------------

    def check_term(self, ctx: Context, term, ty, k: int) -> None:
        if k <= 0:
            return
        with self.judgment("check_term", k):
            if isinstance(term, Lam):
                if not isinstance(ty, Pi):
                    self.fail(SHAPE_MISMATCH, f"lambda checked against atomic type {self.show(ty)}")
                z = self.fresh(term.var, ctx, term.body, ty.cod)
                body = rename(term.body, term.var, z)
                cod = ty.cod if ty.var == "_" else rename(ty.cod, ty.var, z)
                self.check_term(ctx + ((z, ty.dom),), body, cod, k)
                return
            if isinstance(term, App):
                if isinstance(ty, Pi):
                    self.fail(
                        SHAPE_MISMATCH,
                        f"{self.show(term)} is not eta-long: it is checked against {self.show(ty)}",
                    )
                found = self.infer_neutral(ctx, term, k)
                if not eq_types_at_depth(found, ty, k):
                    self.fail(
                        TYPE_MISMATCH,
                        f"{self.show(term)} has type {self.show(found)} but {self.show(ty)} was expected",
                    )
                return
            self.fail(TYPE_MISMATCH, f"unobservable term checked at depth {k}")

    def infer_neutral(self, ctx: Context, term: App, k: int):
        with self.judgment("infer_neutral", k):
            if term.kind is HeadKind.VAR:
                ty = self.lookup(ctx, term.head)
                if ty is None:
                    self.fail(UNBOUND_HEAD, f"unbound variable {term.head!r}")
                result = self.spine_check_continuing(ctx, term.spine, ty, k, term.head)
            elif term.kind is HeadKind.CONST:
                ty = self.constants.get(term.head)
                if ty is None:
                    what = "type family" if term.head in self.families else "constant"
                    self.fail(UNBOUND_HEAD, f"unknown {what} {term.head!r} in head position")
                result = self.spine_check_suspended(ctx, term.spine, ty, k, term.head)
            else:
                self.fail(UNBOUND_HEAD, f"{term.head!r} should have been expanded")
            if isinstance(result, Pi):
                self.fail(SPINE_ARITY, f"{term.head!r} is applied to too few arguments")
            return result

    def spine_check_continuing(self, ctx: Context, spine, ty, k: int, head: str = "head"):
        with self.judgment("spine_check_continuing", k):
            return self._spine(ctx, spine, ty, k, k, head)

    def spine_check_suspended(self, ctx: Context, spine, ty, k: int, head: str = "head"):
        with self.judgment("spine_check_suspended", k):
            return self._spine(ctx, spine, ty, k - 1, k, head)

    def _spine(self, ctx, spine, ty, elem_depth, k, head):
        for m in spine:
            if not isinstance(ty, Pi):
                self.fail(SPINE_ARITY, f"{head!r} is applied to too many arguments")
            self.check_term(ctx, m, ty.dom, elem_depth)
            ty = self._instantiate(ty, m, k)
        return ty

    def _instantiate(self, pi: Pi, m, k: int):
        if pi.var == "_":
            return pi.cod
        try:
            tau = erase(pi.dom)
        except ErasureError:
            self.fail(TYPE_MISMATCH, f"ill-formed domain {self.show(pi.dom)}")
        result = subst_cantype(m, pi.var, tau, pi.cod, k)
        if result is None:
            self.fail(SUBST_UNDEFINED, f"substituting {self.show(m)} for {pi.var} is undefined")
        return result

    # --- declarations --------------------------------------------------------

    def check_declaration(self, decl, k: int) -> None:
        from .validity import contractiveness_check

        self.decl = decl
        with self.judgment(f"decl {decl.name}", k):
            if isinstance(decl, KindDecl):
                kind = expand_kind(decl.kind, k, self.defs)
                self.check_kind((), kind, k)
                self.families[decl.name] = kind
            elif isinstance(decl, ConstDecl):
                ty = expand_type(decl.type, k, self.defs)
                self.check_type((), ty, k)
                self.constants[decl.name] = ty
            elif isinstance(decl, DefDecl):
                problem = contractiveness_check(decl)
                if problem is not None:
                    raise CheckError(problem)
                ty = expand_type(decl.type, k, self.defs)
                self.check_type((), ty, k)
                body = expand_term(decl.body, k, self.defs) if k > 0 else None
                self.check_term((), body, ty, k)


def check_signature(sig: Signature, k: int, defs: DefTable | None = None) -> list[Diagnostic]:
    """Check each declaration left to right; failed declarations are skipped."""
    if k <= 0:
        return []
    state = CheckState(defs=defs or DefTable(sig))
    state.implicits = sig.implicit_counts()
    diags = []
    for decl in sig:
        try:
            state.check_declaration(decl, k)
        except DiagnosticError as err:
            diags.append(err.diagnostic)
    return diags


# --- judgment-level entry points over an expanded signature ------------------


def _run(fn, *args) -> list[Diagnostic]:
    try:
        fn(*args)
    except DiagnosticError as err:
        return [err.diagnostic]
    return []


def check_kind(sig: Signature, ctx: Context, kind, k: int) -> list[Diagnostic]:
    return _run(CheckState(sig).check_kind, ctx, kind, k)


def check_type(sig: Signature, ctx: Context, ty, k: int) -> list[Diagnostic]:
    return _run(CheckState(sig).check_type, ctx, ty, k)


def check_term(sig: Signature, ctx: Context, term, ty, k: int) -> list[Diagnostic]:
    return _run(CheckState(sig).check_term, ctx, term, ty, k)


def check_context(sig: Signature, ctx: Context, k: int) -> list[Diagnostic]:
    return _run(CheckState(sig).check_context, ctx, k)


def infer_atomic(sig: Signature, ctx: Context, ty: Atom, k: int):
    """Kind of an atomic type; raises :class:`CheckError` on failure."""
    return CheckState(sig).infer_atomic(ctx, ty, k)


def infer_neutral(sig: Signature, ctx: Context, term: App, k: int):
    return CheckState(sig).infer_neutral(ctx, term, k)


def spine_check_kind(sig: Signature, ctx: Context, spine, kind, k: int):
    return CheckState(sig).spine_check_kind(ctx, spine, kind, k)


def spine_check_continuing(sig: Signature, ctx: Context, spine, ty, k: int):
    return CheckState(sig).spine_check_continuing(ctx, spine, ty, k)


def spine_check_suspended(sig: Signature, ctx: Context, spine, ty, k: int):
    return CheckState(sig).spine_check_suspended(ctx, spine, ty, k)
