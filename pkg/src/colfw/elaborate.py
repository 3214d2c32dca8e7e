"""Elaboration of surface declarations into kernel syntax.

Free capitalised identifiers in a declaration become implicit Pi binders,
uses of a constant with implicit parameters receive fresh unification
variables (metas), and pattern unification fills them in.  Metas are kept in
eta-long form over the local variables in scope, so that a solution is just a
lambda abstraction over those locals.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .diagnostics import (
    DUPLICATE_NAME,
    HIGHER_ORDER,
    IMPLICIT_SHADOWING,
    IMPLICIT_UNINFERABLE,
    NAMESPACE_MISUSE,
    OCCURS_CHECK,
    SHAPE_MISMATCH,
    SUBST_UNDEFINED,
    UNDECLARED_NAME,
    UNIFY_MISMATCH,
    UNSOLVED_CONSTRAINT,
    Diagnostic,
    DiagnosticError,
    SourceSpan,
)
from .parser import SApp, SArrow, SExpr, SHole, SId, SLam, SPi, SSort, SurfaceDecl, flatten_app
from .printer import pretty_print
from .substitution import ErasureError, erase, spine_apply, subst_cantype
from .syntax import (
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
    TypeHole,
    eta_variable,
    fresh_name,
    free_vars,
    heads,
    lam,
    rename,
    var,
)

# substitution during elaboration works on finite surface terms, so any depth
# larger than the terms themselves behaves like "unbounded"
FINITE = 1 << 30
UNIFY_FUEL = 2000


class _Postpone(Exception):
    """The expected type is not known well enough yet."""


class _Blocked(Exception):
    """A unification problem outside the pattern fragment."""


@dataclass
class _Local:
    surface: str
    name: str
    type: object


@dataclass
class _Meta:
    ident: str
    type: object
    locals: tuple[_Local, ...]
    hint: str
    span: SourceSpan | None
    solution: object = None


@dataclass
class _Entry:
    sort: str  # "family", "const" or "rec"
    type: object
    implicit: int
    body: object = None
    simple: object = None


@dataclass
class _CheckC:
    expr: SExpr
    expected: object
    locals: tuple[_Local, ...]
    placeholder: object
    span: SourceSpan


@dataclass
class _UnifyC:
    left: object
    right: object
    span: SourceSpan | None


def _fail(code: str, message: str, span: SourceSpan | None):
    raise DiagnosticError(Diagnostic(code, message, span))


def _is_kind_expr(expr: SExpr) -> bool:
    while isinstance(expr, (SPi, SArrow)):
        expr = expr.body if isinstance(expr, SPi) else expr.cod
    return isinstance(expr, SSort)


def _capitalized(name: str) -> bool:
    return name[:1].isupper()


@dataclass
class _Scan:
    free: list[str] = field(default_factory=list)
    binders: dict[str, SourceSpan] = field(default_factory=dict)


class Elaborator:
    def __init__(self) -> None:
        self.entries: dict[str, _Entry] = {}
        self.decls: list = []
        self.diagnostics: list[Diagnostic] = []
        self._ids = itertools.count(1)
        self._reset()

    # --- per-declaration state ----------------------------------------------

    def _reset(self) -> None:
        self.metas: dict[str, _Meta] = {}
        self.holes: dict[int, object] = {}
        self.globals: dict[str, object] = {}
        self.constraints: list = []
        self.progress = 0
        self._assumed: set = set()
        self._fuel = UNIFY_FUEL

    def new_hole(self) -> TypeHole:
        hole = TypeHole(next(self._ids))
        self.holes[hole.ident] = None
        return hole

    def scope_names(self, locals_) -> set[str]:
        names = {l.name for l in locals_}
        names.update(self.globals)
        names.update(self.entries)
        return names

    def deref(self, ty):
        while isinstance(ty, TypeHole) and self.holes.get(ty.ident) is not None:
            ty = self.holes[ty.ident]
        return ty

    def eta_var(self, name: str, ty, avoid: set[str]):
        ty = self.deref(ty)
        params = []
        taken = set(avoid) | {name}
        while isinstance(ty, Pi):
            p = fresh_name(ty.var if ty.var != "_" else "y", taken)
            taken.add(p)
            params.append((p, ty.dom))
            cod = ty.cod if ty.var == "_" else rename(ty.cod, ty.var, p)
            ty = self.deref(cod)
        args = [self.eta_var(p, dom, taken) for p, dom in params]
        return lam([p for p, _ in params], var(name, *args))

    def new_meta_term(self, ty, locals_, hint: str = "X", span=None):
        ty = self.deref(ty)
        if isinstance(ty, Pi):
            v = fresh_name(ty.var if ty.var != "_" else "x", self.scope_names(locals_))
            cod = ty.cod if ty.var == "_" else rename(ty.cod, ty.var, v)
            body = self.new_meta_term(cod, [*locals_, _Local(v, v, ty.dom)], hint, span)
            return Lam(v, body)
        ident = f"?{next(self._ids)}"
        self.metas[ident] = _Meta(ident, ty, tuple(locals_), hint, span)
        names = self.scope_names(locals_)
        spine = tuple(self.eta_var(l.name, l.type, names) for l in locals_)
        return App(ident, HeadKind.META, spine)

    # --- zonking ----------------------------------------------------------

    def zonk_type(self, ty):
        ty = self.deref(ty)
        if isinstance(ty, Pi):
            return Pi(ty.var, self.zonk_type(ty.dom), self.zonk_type(ty.cod))
        if isinstance(ty, Atom):
            return Atom(ty.family, tuple(self.zonk_term(a) for a in ty.spine))
        return ty

    def zonk_term(self, t):
        if isinstance(t, Lam):
            return Lam(t.var, self.zonk_term(t.body))
        if isinstance(t, App):
            app = App(t.head, t.kind, tuple(self.zonk_term(a) for a in t.spine))
            if t.kind is HeadKind.META and self.metas[t.head].solution is not None:
                return self.zonk_term(self._instantiate(app))
            return app
        return t

    def _instantiate(self, app: App):
        meta = self.metas[app.head]
        params, body = [], meta.solution
        while isinstance(body, Lam) and len(params) < len(app.spine):
            params.append(body.var)
            body = body.body
        if [eta_variable(a) for a in app.spine] == params:
            return body
        try:
            ty = meta.type
            for l in reversed(meta.locals):
                ty = Pi(l.name, l.type, ty)
            tau = erase(self.zonk_type(ty))
        except ErasureError:
            raise _Blocked from None
        result = spine_apply(app.spine, tau, meta.solution, FINITE)
        if result is None:
            _fail(SUBST_UNDEFINED, "ill-typed instantiation of a unification variable", meta.span)
        return result

    def head_norm(self, t):
        while isinstance(t, App) and t.kind is HeadKind.META and self.metas[t.head].solution is not None:
            t = self._instantiate(t)
        return t

    def has_holes(self, node) -> bool:
        node = self.deref(node)
        if isinstance(node, TypeHole):
            return True
        if isinstance(node, Pi):
            return self.has_holes(node.dom) or self.has_holes(node.cod)
        return False

    @staticmethod
    def metas_in(node) -> list[str]:
        found: list[str] = []
        stack = [node]
        while stack:
            n = stack.pop()
            if isinstance(n, Pi):
                stack += [n.cod, n.dom]
            elif isinstance(n, Atom):
                stack += reversed(n.spine)
            elif isinstance(n, (Lam, App)):
                for h in heads(n):
                    if h.kind is HeadKind.META and h.head not in found:
                        found.append(h.head)
        return found

    # --- substitution -------------------------------------------------------

    def subst_type(self, m, x: str, dom, cod):
        if x == "_" or x not in free_vars(cod):
            return cod
        try:
            tau = erase(self.zonk_type(dom))
        except ErasureError:
            raise _Postpone from None
        result = subst_cantype(m, x, tau, cod, FINITE)
        if result is None:
            _fail(SUBST_UNDEFINED, f"substituting for {x} is undefined", None)
        return result

    # --- unification --------------------------------------------------------

    def show(self, node) -> str:
        try:
            if isinstance(node, (Pi, Atom, Sort, TypeHole)):
                return pretty_print(self.zonk_type(node), show_implicit=True)
            return pretty_print(self.zonk_term(node), show_implicit=True)
        except (_Blocked, DiagnosticError):
            return pretty_print(node, show_implicit=True)

    def unify(self, a, b, span) -> None:
        try:
            self._unify(a, b, span)
        except _Blocked:
            self.constraints.append(_UnifyC(a, b, span))

    def _unify(self, a, b, span) -> None:
        a, b = self.head_norm(a), self.head_norm(b)
        if a == b:
            return
        if isinstance(a, Lam) and isinstance(b, Lam):
            v = fresh_name(a.var, free_vars(a) | free_vars(b))
            self.unify(rename(a.body, a.var, v), rename(b.body, b.var, v), span)
            return
        if isinstance(a, Lam) or isinstance(b, Lam):
            fn, other = (a, b) if isinstance(a, Lam) else (b, a)
            if not isinstance(other, App):
                self._mismatch(a, b, span)
            v = fresh_name(fn.var, free_vars(fn) | free_vars(other))
            extended = App(other.head, other.kind, other.spine + (var(v),))
            self.unify(rename(fn.body, fn.var, v), extended, span)
            return
        if not isinstance(a, App) or not isinstance(b, App):
            self._mismatch(a, b, span)
        if a.kind is HeadKind.META:
            self._solve(a, b, span)
            return
        if b.kind is HeadKind.META:
            self._solve(b, a, span)
            return
        if a.kind is b.kind and a.head == b.head and len(a.spine) == len(b.spine):
            for x, y in zip(a.spine, b.spine):
                self.unify(x, y, span)
            return
        if HeadKind.REC in (a.kind, b.kind):
            # equality of recursive definitions is coinductive: assume and unfold
            key = (self.zonk_term(a), self.zonk_term(b))
            if key in self._assumed:
                return
            self._fuel -= 1
            if self._fuel <= 0:
                raise _Blocked
            self._assumed.add(key)
            a2 = self._unfold(a) if a.kind is HeadKind.REC else a
            b2 = self._unfold(b) if b.kind is HeadKind.REC else b
            if a2 is not None and b2 is not None:
                self._unify(a2, b2, span)
                return
        self._mismatch(a, b, span)

    def _unfold(self, app: App):
        entry = self.entries.get(app.head)
        if entry is None or entry.body is None:
            return None
        return spine_apply(app.spine, entry.simple, entry.body, FINITE)

    def _mismatch(self, a, b, span):
        _fail(UNIFY_MISMATCH, f"cannot unify {self.show(a)} with {self.show(b)}", span)

    def _solve(self, app: App, t, span) -> None:
        meta = self.metas[app.head]
        params = [eta_variable(a) for a in app.spine]
        if None in params or len(set(params)) != len(params):
            raise _Blocked
        t = self.zonk_term(t)
        if any(h.kind is HeadKind.META and h.head == app.head for h in heads(t)):
            _fail(OCCURS_CHECK, f"{self.show(app)} occurs in {self.show(t)}", span)
        if not free_vars(t) <= set(params) | set(self.globals):
            raise _Blocked
        meta.solution = lam(params, t)
        self.progress += 1

    def unify_type(self, a, b, span) -> None:
        a, b = self.deref(a), self.deref(b)
        if a == b:
            return
        if isinstance(a, TypeHole) or isinstance(b, TypeHole):
            hole, other = (a, b) if isinstance(a, TypeHole) else (b, a)
            if self._hole_occurs(hole, other):
                _fail(OCCURS_CHECK, f"type variable occurs in {self.show(other)}", span)
            self.holes[hole.ident] = other
            self.progress += 1
            return
        if isinstance(a, Pi) and isinstance(b, Pi):
            self.unify_type(a.dom, b.dom, span)
            v = fresh_name(a.var if a.var != "_" else b.var, free_vars(a) | free_vars(b))
            ca = a.cod if a.var == "_" else rename(a.cod, a.var, v)
            cb = b.cod if b.var == "_" else rename(b.cod, b.var, v)
            self.unify_type(ca, cb, span)
            return
        if isinstance(a, Atom) and isinstance(b, Atom) and a.family == b.family and len(a.spine) == len(b.spine):
            for x, y in zip(a.spine, b.spine):
                self.unify(x, y, span)
            return
        _fail(UNIFY_MISMATCH, f"type mismatch: {self.show(a)} and {self.show(b)}", span)

    def _hole_occurs(self, hole: TypeHole, ty) -> bool:
        ty = self.deref(ty)
        if ty == hole:
            return True
        if isinstance(ty, Pi):
            return self._hole_occurs(hole, ty.dom) or self._hole_occurs(hole, ty.cod)
        return False

    # --- constraints --------------------------------------------------------

    def solve(self) -> None:
        while self.constraints:
            before = self.progress
            pending, self.constraints = self.constraints, []
            for c in pending:
                if isinstance(c, _CheckC):
                    mark = len(self.constraints)
                    try:
                        t = self._check(c.expr, c.expected, list(c.locals))
                    except _Postpone:
                        del self.constraints[mark:]
                        self.constraints.append(c)
                        continue
                    self.progress += 1
                    self.unify(c.placeholder, t, c.span)
                else:
                    mark = len(self.constraints)
                    self.unify(c.left, c.right, c.span)
                    if len(self.constraints) == mark:
                        self.progress += 1
            if self.progress == before:
                break
        if self.constraints:
            c = self.constraints[0]
            if isinstance(c, _CheckC):
                head, _ = flatten_app(c.expr)
                if isinstance(head, SId) and isinstance(self.deref(self.globals.get(head.name)), TypeHole):
                    _fail(IMPLICIT_UNINFERABLE, f"cannot infer the type of implicit variable {head.name}", head.span)
                msg = "could not determine the type expected here"
            else:
                msg = f"could not solve {self.show(c.left)} = {self.show(c.right)}"
            _fail(UNSOLVED_CONSTRAINT, msg, c.span)

    # --- resolution ---------------------------------------------------------

    def resolve(self, ident: SId, locals_):
        for l in reversed(locals_):
            if l.surface == ident.name:
                return l.name, HeadKind.VAR, l.type, 0
        if ident.name in self.globals:
            return ident.name, HeadKind.VAR, self.globals[ident.name], 0
        entry = self.entries.get(ident.name)
        if entry is None:
            _fail(UNDECLARED_NAME, f"undeclared name {ident.name!r}", ident.span)
        if entry.sort == "family":
            return ident.name, None, entry.type, entry.implicit
        kind = HeadKind.REC if entry.sort == "rec" else HeadKind.CONST
        return ident.name, kind, entry.type, entry.implicit

    # --- kinds and types ----------------------------------------------------

    def _binder(self, name: str, dom, locals_) -> _Local:
        return _Local(name, fresh_name(name, self.scope_names(locals_)), dom)

    def elab_kind(self, expr: SExpr, locals_):
        if isinstance(expr, SSort):
            return Sort(expr.co)
        if isinstance(expr, SArrow):
            return Pi("_", self.elab_type(expr.dom, locals_), self.elab_kind(expr.cod, locals_))
        if isinstance(expr, SPi):
            dom = self.elab_type(expr.ann, locals_) if expr.ann is not None else self.new_hole()
            if expr.var == "_":
                return Pi("_", dom, self.elab_kind(expr.body, locals_))
            local = self._binder(expr.var, dom, locals_)
            return Pi(local.name, dom, self.elab_kind(expr.body, [*locals_, local]))
        _fail(NAMESPACE_MISUSE, "expected a kind", expr.span)

    def elab_type(self, expr: SExpr, locals_):
        if isinstance(expr, SArrow):
            return Pi("_", self.elab_type(expr.dom, locals_), self.elab_type(expr.cod, locals_))
        if isinstance(expr, SPi):
            dom = self.elab_type(expr.ann, locals_) if expr.ann is not None else self.new_hole()
            if expr.var == "_":
                return Pi("_", dom, self.elab_type(expr.body, locals_))
            local = self._binder(expr.var, dom, locals_)
            return Pi(local.name, dom, self.elab_type(expr.body, [*locals_, local]))
        if isinstance(expr, SSort):
            _fail(NAMESPACE_MISUSE, f"'{'cotype' if expr.co else 'type'}' is a kind, not a type", expr.span)
        if isinstance(expr, (SLam, SHole)):
            _fail(NAMESPACE_MISUSE, "expected a type", expr.span)
        head, args = flatten_app(expr)
        if not isinstance(head, SId):
            _fail(NAMESPACE_MISUSE, "expected a type family", head.span)
        name, kind, fam_kind, nimpl = self.resolve(head, locals_)
        if kind is not None:
            _fail(NAMESPACE_MISUSE, f"{name!r} is not a type family", head.span)
        spine, _ = self.apply_spine(fam_kind, nimpl, args, locals_, expr.span)
        return Atom(name, tuple(spine))

    def apply_spine(self, ty, nimpl: int, args, locals_, span):
        spine = []
        for _ in range(nimpl):
            ty = self.deref(ty)
            m = self.new_meta_term(ty.dom, locals_, ty.var, span)
            spine.append(m)
            ty = self.subst_type(m, ty.var, ty.dom, ty.cod)
        for arg in args:
            ty = self.deref(ty) if ty is not None else None
            if isinstance(ty, Pi):
                m = self.check(arg, ty.dom, locals_)
                spine.append(m)
                ty = self.subst_type(m, ty.var, ty.dom, ty.cod)
            elif isinstance(ty, TypeHole):
                raise _Postpone
            else:
                # too many arguments: elaborate anyway, the kernel reports it
                spine.append(self.check(arg, self.new_hole(), locals_))
                ty = None
        return spine, ty

    # --- terms --------------------------------------------------------------

    def check(self, expr: SExpr, ty, locals_):
        mark = len(self.constraints)
        try:
            return self._check(expr, ty, locals_)
        except _Postpone:
            del self.constraints[mark:]
            placeholder = self.new_meta_term(ty, locals_, "X", expr.span)
            self.constraints.append(_CheckC(expr, ty, tuple(locals_), placeholder, expr.span))
            return placeholder

    def _check(self, expr: SExpr, ty, locals_):
        ty = self.deref(ty)
        if isinstance(expr, SLam):
            if isinstance(ty, TypeHole):
                raise _Postpone
            if not isinstance(ty, Pi):
                _fail(SHAPE_MISMATCH, f"a lambda cannot have type {self.show(ty)}", expr.span)
            if expr.ann is not None:
                self.unify_type(self.elab_type(expr.ann, locals_), ty.dom, expr.ann.span)
            local = self._binder(expr.var, ty.dom, locals_)
            cod = ty.cod if ty.var == "_" else rename(ty.cod, ty.var, local.name)
            return Lam(local.name, self.check(expr.body, cod, [*locals_, local]))
        if isinstance(expr, SHole):
            return self.new_meta_term(ty, locals_, "X", expr.span)
        if isinstance(expr, (SSort, SPi, SArrow)):
            _fail(NAMESPACE_MISUSE, "a type cannot appear where a term is expected", expr.span)
        head, args = flatten_app(expr)
        if not isinstance(head, SId):
            _fail(HIGHER_ORDER, "only a variable or constant may be applied", head.span)
        name, kind, hty, nimpl = self.resolve(head, locals_)
        if kind is None:
            _fail(NAMESPACE_MISUSE, f"type family {name!r} used as a term", head.span)
        hty = self.deref(hty)
        if isinstance(hty, TypeHole):
            want = self.deref(ty)
            if isinstance(want, TypeHole):
                raise _Postpone
            guess = self._guess_head_type(args, want, locals_)
            if guess is None:
                raise _Postpone
            self.unify_type(hty, guess, expr.span)
            hty = guess
        spine, result = self.apply_spine(hty, nimpl, args, locals_, expr.span)
        term = App(name, kind, tuple(spine))
        if result is None:
            return term
        return self._coerce(term, result, ty, locals_, expr.span)

    def _guess_head_type(self, args, want, locals_):
        """Type of an unknown head applied to variables of known type (the pattern case)."""
        doms, names = [], set()
        for arg in args:
            if not isinstance(arg, SId):
                return None
            local = next((l for l in reversed(locals_) if l.surface == arg.name), None)
            if local is None:
                return None
            dom = self.zonk_type(local.type)
            if self.has_holes(dom) or self._leftover(dom):
                return None
            doms.append(dom)
            names.add(local.name)
        if free_vars(self.zonk_type(want)) & names:
            return None
        ty = want
        for dom in reversed(doms):
            ty = Pi("_", dom, ty)
        return ty

    def _coerce(self, term: App, have, want, locals_, span):
        have, want = self.deref(have), self.deref(want)
        if isinstance(want, TypeHole):
            if isinstance(have, Pi) and term.kind is HeadKind.VAR:
                raise _Postpone
            self.unify_type(want, have, span)
            return term
        if isinstance(have, Pi) and isinstance(want, Pi):
            if term.kind is not HeadKind.VAR:
                # constants are not eta-expanded; the kernel insists on eta-long forms
                self.unify_type(have, want, span)
                return term
            self.unify_type(have.dom, want.dom, span)
            local = self._binder(want.var if want.var != "_" else have.var, want.dom, locals_)
            inner = [*locals_, local]
            arg = self.eta_var(local.name, want.dom, self.scope_names(inner))
            have_cod = self.subst_type(arg, have.var, have.dom, have.cod)
            want_cod = want.cod if want.var == "_" else rename(want.cod, want.var, local.name)
            applied = App(term.head, term.kind, term.spine + (arg,))
            return Lam(local.name, self._coerce(applied, have_cod, want_cod, inner, span))
        if isinstance(have, Atom) and isinstance(want, Atom):
            self.unify_type(have, want, span)
            return term
        if isinstance(have, TypeHole):
            self.unify_type(have, want, span)
        # remaining shape errors are the kernel's to report
        return term

    # --- declarations -------------------------------------------------------

    def _scan(self, expr: SExpr, bound: frozenset, out: _Scan) -> None:
        if isinstance(expr, SId):
            name = expr.name
            if name not in bound and _capitalized(name) and name not in self.entries and name not in out.free:
                out.free.append(name)
        elif isinstance(expr, SApp):
            self._scan(expr.fn, bound, out)
            self._scan(expr.arg, bound, out)
        elif isinstance(expr, SArrow):
            self._scan(expr.dom, bound, out)
            self._scan(expr.cod, bound, out)
        elif isinstance(expr, (SPi, SLam)):
            if expr.ann is not None:
                self._scan(expr.ann, bound, out)
            out.binders.setdefault(expr.var, expr.span)
            self._scan(expr.body, bound | {expr.var}, out)

    def _generalize(self, ty, free: list[str], span):
        """Abstract implicit variables and leftover top-level metas as implicit Pis."""
        binders: list[list] = []
        for name in free:
            binders.append([name, self.globals[name]])
        taken = self.scope_names([])
        while True:
            pending = []
            for node in [ty] + [t for _, t in binders]:
                for m in self.metas_in(self.zonk_type(node)):
                    if m not in pending:
                        pending.append(m)
            if not pending:
                break
            for ident in pending:
                meta = self.metas[ident]
                if meta.locals:
                    _fail(IMPLICIT_UNINFERABLE, f"cannot infer implicit argument {meta.hint}", meta.span)
                base = meta.hint if meta.hint not in ("_", "") else "X"
                name = fresh_name(base[:1].upper() + base[1:], taken)
                taken.add(name)
                self.globals[name] = meta.type
                meta.solution = var(name)
                binders.append([name, meta.type])
        ty = self.zonk_type(ty)
        for b in binders:
            b[1] = self.zonk_type(b[1])
            if self.has_holes(b[1]):
                _fail(IMPLICIT_UNINFERABLE, f"cannot infer the type of implicit variable {b[0]}", span)
        if self._leftover(ty):
            _fail(IMPLICIT_UNINFERABLE, "cannot infer a type annotation", span)
        ordered = []
        names = {b[0] for b in binders}
        remaining = list(binders)
        while remaining:
            placed = {b[0] for b in ordered}
            for i, (name, t) in enumerate(remaining):
                if not (free_vars(t) & names) - placed:
                    ordered.append(remaining.pop(i))
                    break
            else:
                _fail(IMPLICIT_UNINFERABLE, "circular dependency among implicit arguments", span)
        for name, t in reversed(ordered):
            ty = Pi(name, t, ty)
        return ty, [b[0] for b in ordered], [b[1] for b in ordered]

    def _leftover(self, node) -> bool:
        node = self.deref(node)
        if isinstance(node, TypeHole):
            return True
        if isinstance(node, Pi):
            return self._leftover(node.dom) or self._leftover(node.cod)
        if isinstance(node, Atom):
            return bool(self.metas_in(node))
        return False

    def declare(self, sd: SurfaceDecl) -> None:
        self._reset()
        try:
            decl = self._declare(sd)
        except DiagnosticError as err:
            d = err.diagnostic
            if d.span is None:
                d = Diagnostic(d.code, d.message, sd.span, d.severity, d.judgment, sd.name)
            else:
                d = Diagnostic(d.code, d.message, d.span, d.severity, d.judgment, sd.name)
            self.diagnostics.append(d)
            return
        self.decls.append(decl)

    def _declare(self, sd: SurfaceDecl):
        if sd.name in self.entries:
            _fail(DUPLICATE_NAME, f"{sd.name!r} is already declared", sd.name_span)
        scan = _Scan()
        self._scan(sd.type, frozenset(), scan)
        body_scan = _Scan()
        if sd.body is not None:
            self._scan(sd.body, frozenset(scan.free), body_scan)
        for name in scan.free:
            if name in scan.binders or name in body_scan.binders:
                span = scan.binders.get(name) or body_scan.binders[name]
                _fail(IMPLICIT_SHADOWING, f"binder {name!r} shadows an implicit variable", span)
        for name in scan.free:
            self.globals[name] = self.new_hole()

        if _is_kind_expr(sd.type):
            if sd.body is not None:
                _fail(NAMESPACE_MISUSE, "a definition must have a type, not a kind", sd.type.span)
            kind = self.elab_kind(sd.type, [])
            self.solve()
            kind, names, _ = self._generalize(kind, scan.free, sd.type.span)
            self.entries[sd.name] = _Entry("family", kind, len(names))
            return KindDecl(sd.name, kind, len(names), sd.span)

        ty = self.elab_type(sd.type, [])
        self.solve()
        ty, names, types = self._generalize(ty, scan.free, sd.type.span)
        if sd.body is None:
            self.entries[sd.name] = _Entry("const", ty, len(names))
            return ConstDecl(sd.name, ty, len(names), sd.span)

        entry = _Entry("rec", ty, len(names))
        self.entries[sd.name] = entry
        try:
            body = self._elab_body(sd, ty, names, types)
        except BaseException:
            del self.entries[sd.name]
            raise
        entry.body = body
        entry.simple = erase(ty)
        return DefDecl(sd.name, ty, body, len(names), sd.span)

    def _elab_body(self, sd: SurfaceDecl, ty, names, types):
        self._reset()
        locals_ = [_Local(n, n, t) for n, t in zip(names, types)]
        inner = ty
        for _ in names:
            inner = inner.cod
        term = self.check(sd.body, inner, locals_)
        self.solve()
        term = self.zonk_term(term)
        if self.metas_in(Atom("_", (term,))):
            _fail(UNSOLVED_CONSTRAINT, "could not infer every hole in the definition", sd.body.span)
        return lam(names, term)


def elaborate(decls: list[SurfaceDecl]) -> tuple[Signature, list[Diagnostic]]:
    """Elaborate parsed declarations; failing declarations are reported and dropped."""
    elab = Elaborator()
    for sd in decls:
        elab.declare(sd)
    return Signature(tuple(elab.decls)), elab.diagnostics
