"""Erasure and depth-indexed hereditary substitution.

Every ``subst_*`` function returns ``None`` for an undefined result: the
substitution terminates on every input, but when the simple type does not fit
the substituted term no clause applies.  ``None`` is a value here, never an
error; the type checker turns it into a diagnostic.
"""

from __future__ import annotations

from typing import Mapping

from .syntax import (
    BASE,
    STUB,
    App,
    Arrow,
    Atom,
    Context,
    HeadKind,
    Lam,
    Pi,
    SimpleType,
    Sort,
    Term,
    Type,
    TypeHole,
    fresh_name,
    free_vars,
    rename,
)


class _Undefined(Exception):
    pass


class ErasureError(ValueError):
    pass


def erase(ty) -> SimpleType:
    """Map a canonical type to its simple type: Pis become arrows, atoms become ``*``."""
    if isinstance(ty, Pi):
        return Arrow(erase(ty.dom), erase(ty.cod))
    if isinstance(ty, Atom):
        return BASE
    raise ErasureError(f"cannot erase {ty!r}")


def simple_type_check(delta: Mapping[str, SimpleType], term: Term, tau: SimpleType, depth: int) -> bool:
    if depth == 0:
        return True
    if isinstance(term, Lam):
        if not isinstance(tau, Arrow):
            return False
        return simple_type_check({**delta, term.var: tau.dom}, term.body, tau.cod, depth)
    if not isinstance(term, App) or term.head not in delta:
        return False
    ty = delta[term.head]
    inner = depth - 1 if term.kind is HeadKind.CONST else depth
    for arg in term.spine:
        if not isinstance(ty, Arrow) or not simple_type_check(delta, arg, ty.dom, inner):
            return False
        ty = ty.cod
    return ty == tau


# --- terms -----------------------------------------------------------------


def subst_canonical(n: Term, x: str, tau: SimpleType, m: Term, depth: int) -> Term | None:
    try:
        return _canonical(n, free_vars(n), x, tau, m, depth)
    except _Undefined:
        return None


def subst_neutral(n: Term, x: str, tau: SimpleType, r: App, depth: int) -> Term | None:
    try:
        return _neutral(n, free_vars(n), x, tau, r, depth)
    except _Undefined:
        return None


def subst_continuing_spine(
    n: Term, x: str, tau: SimpleType, spine: tuple[Term, ...], depth: int
) -> tuple[Term, ...] | None:
    try:
        fv = free_vars(n)
        return tuple(_canonical(n, fv, x, tau, m, depth) for m in spine)
    except _Undefined:
        return None


def subst_suspended_spine(
    n: Term, x: str, tau: SimpleType, spine: tuple[Term, ...], depth: int
) -> tuple[Term, ...] | None:
    """Substitute into a spine of depth ``depth`` whose elements sit one level lower."""
    try:
        fv = free_vars(n)
        return tuple(_canonical(n, fv, x, tau, m, depth - 1) for m in spine)
    except _Undefined:
        return None


def spine_apply(spine: tuple[Term, ...], tau: SimpleType, n: Term, depth: int) -> Term | None:
    try:
        return _apply(spine, tau, n, depth)
    except _Undefined:
        return None


def _canonical(n, fv, x, tau, m, depth):
    if depth <= 0:
        return STUB
    if isinstance(m, Lam):
        if m.var == x:
            return m
        y, body = m.var, m.body
        if y in fv:
            y = fresh_name(y, fv | free_vars(body) | {x})
            body = rename(body, m.var, y)
        return Lam(y, _canonical(n, fv, x, tau, body, depth))
    if isinstance(m, App):
        return _neutral(n, fv, x, tau, m, depth)
    return m


def _neutral(n, fv, x, tau, r, depth):
    if depth <= 0:
        return STUB
    if r.kind is HeadKind.CONST:
        inner = depth - 1
    else:
        inner = depth
    spine = tuple(_canonical(n, fv, x, tau, a, inner) for a in r.spine)
    if r.kind is HeadKind.VAR and r.head == x:
        return _apply(spine, tau, n, depth)
    return App(r.head, r.kind, spine)


def _apply(spine, tau, n, depth):
    if depth <= 0:
        return STUB
    if n is STUB:
        # the argument was only observed to a smaller depth than requested
        return STUB
    if not spine:
        if tau == BASE and isinstance(n, App):
            return n
        raise _Undefined
    if not isinstance(tau, Arrow) or not isinstance(n, Lam):
        raise _Undefined
    first, rest = spine[0], spine[1:]
    body = _canonical(first, free_vars(first), n.var, tau.dom, n.body, depth)
    return _apply(rest, tau.cod, body, depth)


# --- types, kinds and contexts ----------------------------------------------


def subst_cantype(n: Term, x: str, tau: SimpleType, ty, depth: int):
    """Substitute ``n`` (observed at ``depth - 1``) into a type or kind of depth ``depth``."""
    try:
        return _type(n, free_vars(n), x, tau, ty, depth)
    except _Undefined:
        return None


subst_kind = subst_cantype


def subst_atomtype(n: Term, x: str, tau: SimpleType, ty: Atom, depth: int) -> Atom | None:
    return subst_cantype(n, x, tau, ty, depth)


def subst_context(n: Term, x: str, tau: SimpleType, ctx: Context, depth: int) -> Context | None:
    out = []
    for name, ty in ctx:
        new = subst_cantype(n, x, tau, ty, depth)
        if new is None:
            return None
        out.append((name, new))
    return tuple(out)


def _type(n, fv, x, tau, ty, depth):
    if depth <= 0:
        return ty
    if isinstance(ty, Pi):
        dom = _type(n, fv, x, tau, ty.dom, depth)
        if ty.var == x:
            return Pi(ty.var, dom, ty.cod)
        y, cod = ty.var, ty.cod
        if y in fv:
            y = fresh_name(y, fv | free_vars(cod) | {x})
            cod = rename(cod, ty.var, y)
        return Pi(y, dom, _type(n, fv, x, tau, cod, depth))
    if isinstance(ty, Atom):
        return Atom(ty.family, tuple(_canonical(n, fv, x, tau, m, depth - 1) for m in ty.spine))
    if isinstance(ty, (Sort, TypeHole)):
        return ty
    raise TypeError(f"not a type or kind: {ty!r}")


def instantiate_pi(ty: Pi, arg: Term, depth: int):
    """Codomain of ``ty`` with ``arg`` substituted for its bound variable."""
    return subst_cantype(arg, ty.var, erase(ty.dom), ty.cod, depth)


__all__ = [
    "erase",
    "simple_type_check",
    "subst_canonical",
    "subst_neutral",
    "subst_continuing_spine",
    "subst_suspended_spine",
    "spine_apply",
    "subst_cantype",
    "subst_kind",
    "subst_atomtype",
    "subst_context",
    "instantiate_pi",
    "ErasureError",
]
