"""Kernel syntax: canonical terms in head-spine form, types, kinds and signatures.

Terms carry no depth annotation.  A term "at depth k" is any tree whose
unobservable leaves (``STUB``) sit only where the remaining observation depth
has reached zero; judgments take the depth as an explicit argument.
"""

from __future__ import annotations

import enum
import itertools
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Union


class HeadKind(enum.Enum):
    VAR = "var"
    CONST = "const"
    REC = "rec"
    # unification variables; only ever present during elaboration
    META = "meta"


class SpineKind(enum.Enum):
    CONTINUING = "continuing"
    SUSPENDED = "suspended"
    SURFACE = "surface"


_SPINE_OF_HEAD = {
    HeadKind.VAR: SpineKind.CONTINUING,
    HeadKind.CONST: SpineKind.SUSPENDED,
    HeadKind.REC: SpineKind.SURFACE,
    HeadKind.META: SpineKind.SURFACE,
}


class Term:
    __slots__ = ()


@dataclass(frozen=True, slots=True)
class Stub(Term):
    """The depth-0 term: nothing about it can be observed."""

    def __repr__(self) -> str:
        return "_"


STUB = Stub()


@dataclass(frozen=True, slots=True)
class Lam(Term):
    var: str
    body: Term


@dataclass(frozen=True, slots=True)
class App(Term):
    head: str
    kind: HeadKind
    spine: tuple[Term, ...] = ()

    @property
    def spine_kind(self) -> SpineKind:
        return _SPINE_OF_HEAD[self.kind]


def var(name: str, *args: Term) -> App:
    return App(name, HeadKind.VAR, tuple(args))


def const(name: str, *args: Term) -> App:
    return App(name, HeadKind.CONST, tuple(args))


def rec(name: str, *args: Term) -> App:
    return App(name, HeadKind.REC, tuple(args))


def lam(names: str | Iterable[str], body: Term) -> Term:
    if isinstance(names, str):
        names = names.split()
    for name in reversed(list(names)):
        body = Lam(name, body)
    return body


# --- types and kinds -------------------------------------------------------


class Type:
    __slots__ = ()


@dataclass(frozen=True, slots=True)
class Atom(Type):
    family: str
    spine: tuple[Term, ...] = ()


@dataclass(frozen=True, slots=True)
class Pi(Type):
    """Dependent function type; when ``cod`` is a kind this is a kind Pi."""

    var: str
    dom: Type
    cod: Union[Type, "Sort"]


@dataclass(frozen=True, slots=True)
class Sort:
    co: bool

    def __repr__(self) -> str:
        return "cotype" if self.co else "type"


TYPE = Sort(False)
COTYPE = Sort(True)

Kind = Union[Pi, Sort]


@dataclass(frozen=True, slots=True)
class TypeHole(Type):
    """Unknown type during elaboration (e.g. of an implicit variable)."""

    ident: int


def atom(family: str, *args: Term) -> Atom:
    return Atom(family, tuple(args))


def arrow(dom: Type, cod: Union[Type, Sort]) -> Pi:
    return Pi("_", dom, cod)


def telescope(ty: Union[Type, Sort]) -> tuple[list[tuple[str, Type]], Union[Type, Sort]]:
    binders = []
    while isinstance(ty, Pi):
        binders.append((ty.var, ty.dom))
        ty = ty.cod
    return binders, ty


# --- simple types ----------------------------------------------------------


class SimpleType:
    __slots__ = ()


@dataclass(frozen=True, slots=True)
class Base(SimpleType):
    def __str__(self) -> str:
        return "*"


@dataclass(frozen=True, slots=True)
class Arrow(SimpleType):
    dom: SimpleType
    cod: SimpleType

    def __str__(self) -> str:
        left = f"({self.dom})" if isinstance(self.dom, Arrow) else str(self.dom)
        return f"{left} -> {self.cod}"


BASE = Base()


def simple_arrows(*parts: SimpleType) -> SimpleType:
    result = parts[-1]
    for part in reversed(parts[:-1]):
        result = Arrow(part, result)
    return result


# --- signatures ------------------------------------------------------------


@dataclass(frozen=True)
class KindDecl:
    name: str
    kind: Kind
    implicit: int = 0
    span: object = field(default=None, compare=False)


@dataclass(frozen=True)
class ConstDecl:
    name: str
    type: Type
    implicit: int = 0
    span: object = field(default=None, compare=False)


@dataclass(frozen=True)
class DefDecl:
    name: str
    type: Type
    body: Term
    implicit: int = 0
    span: object = field(default=None, compare=False)


Declaration = Union[KindDecl, ConstDecl, DefDecl]
Context = tuple[tuple[str, Type], ...]


@dataclass(frozen=True)
class Signature:
    decls: tuple[Declaration, ...] = ()

    def __iter__(self) -> Iterator[Declaration]:
        return iter(self.decls)

    def __len__(self) -> int:
        return len(self.decls)

    @cached_property
    def _index(self) -> dict[str, Declaration]:
        return {d.name: d for d in self.decls}

    def get(self, name: str) -> Declaration | None:
        return self._index.get(name)

    def __getitem__(self, name: str) -> Declaration:
        return self._index[name]

    def __contains__(self, name: object) -> bool:
        return name in self._index

    @property
    def families(self) -> list[KindDecl]:
        return [d for d in self.decls if isinstance(d, KindDecl)]

    @property
    def constants(self) -> list[ConstDecl]:
        return [d for d in self.decls if isinstance(d, ConstDecl)]

    @property
    def definitions(self) -> list[DefDecl]:
        return [d for d in self.decls if isinstance(d, DefDecl)]

    def implicit_counts(self) -> dict[str, int]:
        return {d.name: d.implicit for d in self.decls if d.implicit}


# --- names -----------------------------------------------------------------

_TRAILING_DIGITS = re.compile(r"\d+$")


def fresh_name(base: str, avoid) -> str:
    """Return ``base`` or ``base`` with a numeric suffix, not in ``avoid``."""
    if base == "_" or not base:
        base = "x"
    if base not in avoid:
        return base
    stem = _TRAILING_DIGITS.sub("", base) or "x"
    for i in itertools.count(1):
        candidate = f"{stem}{i}"
        if candidate not in avoid:
            return candidate
    raise AssertionError("unreachable")


def free_vars(node) -> frozenset[str]:
    """Free variables of a term, type or kind (constants never count)."""
    out: set[str] = set()
    _fv(node, frozenset(), out)
    return frozenset(out)


def _fv(node, bound: frozenset[str], out: set[str]) -> None:
    while True:
        if isinstance(node, Lam):
            bound = bound | {node.var}
            node = node.body
        elif isinstance(node, App):
            if node.kind is HeadKind.VAR and node.head not in bound:
                out.add(node.head)
            for arg in node.spine:
                _fv(arg, bound, out)
            return
        elif isinstance(node, Pi):
            _fv(node.dom, bound, out)
            bound = bound | {node.var}
            node = node.cod
        elif isinstance(node, Atom):
            for arg in node.spine:
                _fv(arg, bound, out)
            return
        else:
            return


def occurs_free(name: str, node) -> bool:
    return name in free_vars(node)


def rename(node, old: str, new: str):
    """Replace free occurrences of variable ``old`` by variable ``new``.

    A binder named ``new`` on the way down is renamed first, so ``new`` is
    never captured.
    """
    if old == new:
        return node
    if isinstance(node, Lam):
        if node.var == old:
            return node
        var_, body = _unshadow(node.var, node.body, old, new)
        return Lam(var_, rename(body, old, new))
    if isinstance(node, App):
        head = new if (node.kind is HeadKind.VAR and node.head == old) else node.head
        return App(head, node.kind, tuple(rename(a, old, new) for a in node.spine))
    if isinstance(node, Pi):
        dom = rename(node.dom, old, new)
        if node.var == old:
            return Pi(node.var, dom, node.cod)
        var_, cod = _unshadow(node.var, node.cod, old, new)
        return Pi(var_, dom, rename(cod, old, new))
    if isinstance(node, Atom):
        return Atom(node.family, tuple(rename(a, old, new) for a in node.spine))
    return node


def _unshadow(binder: str, body, old: str, new: str):
    if binder != new or old not in free_vars(body):
        return binder, body
    fresh = fresh_name(new, free_vars(body) | {new, old})
    return fresh, rename(body, binder, fresh)


def alpha_rename(term: Term, avoid: Iterable[str] = ()) -> Term:
    """Rename every binder to a distinct fresh name outside ``avoid``."""
    taken = set(avoid) | set(free_vars(term))
    counter = itertools.count()

    def pick(base: str) -> str:
        stem = _TRAILING_DIGITS.sub("", base) or "x"
        if stem == "_":
            stem = "x"
        while True:
            candidate = f"{stem}{next(counter)}"
            if candidate not in taken:
                taken.add(candidate)
                return candidate

    def go(t: Term, env: dict[str, str]) -> Term:
        if isinstance(t, Lam):
            new = pick(t.var)
            return Lam(new, go(t.body, {**env, t.var: new}))
        if isinstance(t, App):
            head = env.get(t.head, t.head) if t.kind is HeadKind.VAR else t.head
            return App(head, t.kind, tuple(go(a, env) for a in t.spine))
        return t

    return go(term, {})


def alpha_equal(a, b) -> bool:
    """Depth-free alpha-equivalence of terms, types or kinds."""
    return _alpha(a, b, {}, {})


def _alpha(a, b, left: dict, right: dict) -> bool:
    if isinstance(a, Lam) and isinstance(b, Lam):
        return _alpha(a.body, b.body, {**left, a.var: b.var}, {**right, b.var: a.var})
    if isinstance(a, App) and isinstance(b, App):
        if a.kind is not b.kind or len(a.spine) != len(b.spine):
            return False
        if a.kind is HeadKind.VAR:
            if left.get(a.head, a.head) != b.head or right.get(b.head, b.head) != a.head:
                return False
        elif a.head != b.head:
            return False
        return all(_alpha(x, y, left, right) for x, y in zip(a.spine, b.spine))
    if isinstance(a, Pi) and isinstance(b, Pi):
        return _alpha(a.dom, b.dom, left, right) and _alpha(
            a.cod, b.cod, {**left, a.var: b.var}, {**right, b.var: a.var}
        )
    if isinstance(a, Atom) and isinstance(b, Atom):
        return (
            a.family == b.family
            and len(a.spine) == len(b.spine)
            and all(_alpha(x, y, left, right) for x, y in zip(a.spine, b.spine))
        )
    return a == b


def child_depth(kind: HeadKind, depth: int) -> int:
    """Depth at which the spine elements after a head of ``kind`` are observed."""
    return depth - 1 if kind is HeadKind.CONST else depth


def truncate(term: Term, from_depth: int, to_depth: int) -> Term:
    """View a term of depth ``from_depth`` at the smaller depth ``to_depth``."""
    if to_depth > from_depth:
        raise ValueError(f"cannot raise observation depth from {from_depth} to {to_depth}")
    if to_depth == from_depth:
        return term
    return _cut(term, to_depth)


def _cut(term: Term, depth: int) -> Term:
    if depth <= 0:
        return STUB
    if isinstance(term, Lam):
        return Lam(term.var, _cut(term.body, depth))
    if isinstance(term, App):
        inner = child_depth(term.kind, depth)
        return App(term.head, term.kind, tuple(_cut(a, inner) for a in term.spine))
    return term


def fits_depth(term: Term, depth: int) -> bool:
    """True when ``term`` is a well-formed observation of depth ``depth``.

    Unobservable leaves may only sit where the remaining depth is zero.
    """
    if depth <= 0:
        return True
    if isinstance(term, Lam):
        return fits_depth(term.body, depth)
    if isinstance(term, App):
        inner = child_depth(term.kind, depth)
        return all(fits_depth(a, inner) for a in term.spine)
    return False


def term_size(term: Term) -> int:
    if isinstance(term, Lam):
        return 1 + term_size(term.body)
    if isinstance(term, App):
        return 1 + sum(term_size(a) for a in term.spine)
    return 1


def strip_lambdas(term: Term) -> tuple[list[str], Term]:
    names = []
    while isinstance(term, Lam):
        names.append(term.var)
        term = term.body
    return names, term


def eta_variable(term: Term) -> str | None:
    """Name ``y`` if ``term`` is the eta-long form of variable ``y``, else None."""
    params, body = strip_lambdas(term)
    if not isinstance(body, App) or body.kind is not HeadKind.VAR:
        return None
    if body.head in params or len(body.spine) != len(params):
        return None
    for p, arg in zip(params, body.spine):
        if eta_variable(arg) != p:
            return None
    return body.head


def heads(term: Term) -> Iterator[App]:
    """Every neutral subterm, preorder."""
    stack = [term]
    while stack:
        t = stack.pop()
        if isinstance(t, Lam):
            stack.append(t.body)
        elif isinstance(t, App):
            yield t
            stack.extend(reversed(t.spine))
