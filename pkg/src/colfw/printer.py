"""Render kernel syntax back to concrete syntax."""

from __future__ import annotations

from typing import Mapping

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
    Stub,
    TypeHole,
    free_vars,
)


class Printer:
    """Pretty printer; implicit arguments are hidden unless ``show_implicit``."""

    def __init__(self, implicits: Mapping[str, int] | None = None, show_implicit: bool = True) -> None:
        self.implicits = implicits or {}
        self.show_implicit = show_implicit

    def _visible(self, head: str, kind: HeadKind | None, spine):
        if self.show_implicit or kind in (HeadKind.VAR, HeadKind.META):
            return spine
        return spine[self.implicits.get(head, 0):]

    def term(self, t, nested: bool = False) -> str:
        if isinstance(t, Stub):
            return "_"
        if isinstance(t, Lam):
            text = f"[{t.var}] {self.term(t.body)}"
            return f"({text})" if nested else text
        if isinstance(t, App):
            head = f"?{t.head.lstrip('?')}" if t.kind is HeadKind.META else t.head
            args = self._visible(t.head, t.kind, t.spine)
            if not args:
                return head
            text = " ".join([head] + [self.term(a, nested=True) for a in args])
            return f"({text})" if nested else text
        raise TypeError(f"not a term: {t!r}")

    def type(self, ty, nested: bool = False) -> str:
        if isinstance(ty, Sort):
            return "cotype" if ty.co else "type"
        if isinstance(ty, TypeHole):
            return f"?T{ty.ident}"
        if isinstance(ty, Atom):
            args = self._visible(ty.family, None, ty.spine)
            if not args:
                return ty.family
            text = " ".join([ty.family] + [self.term(a, nested=True) for a in args])
            return f"({text})" if nested else text
        if isinstance(ty, Pi):
            if ty.var == "_" or ty.var not in free_vars(ty.cod):
                text = f"{self.type(ty.dom, nested=isinstance(ty.dom, Pi))} -> {self.type(ty.cod)}"
            else:
                text = f"{{{ty.var} : {self.type(ty.dom)}}} {self.type(ty.cod)}"
            return f"({text})" if nested else text
        raise TypeError(f"not a type: {ty!r}")

    def decl(self, d) -> str:
        ty = d.kind if isinstance(d, KindDecl) else d.type
        body = d.body if isinstance(d, DefDecl) else None
        if not self.show_implicit:
            for _ in range(d.implicit):
                ty = ty.cod
                if body is not None:
                    body = body.body
        text = f"{d.name} : {self.type(ty)}"
        if body is not None:
            text += f" = {self.term(body)}"
        return text + "."

    def signature(self, sig: Signature) -> str:
        return "\n".join(self.decl(d) for d in sig) + ("\n" if len(sig) else "")


def pretty_print(node, implicits: Mapping[str, int] | None = None, show_implicit: bool = True) -> str:
    p = Printer(implicits, show_implicit)
    if isinstance(node, Signature):
        return p.signature(node)
    if isinstance(node, (KindDecl, ConstDecl, DefDecl)):
        return p.decl(node)
    if isinstance(node, (Pi, Atom, Sort, TypeHole)):
        return p.type(node)
    return p.term(node)


def print_signature(sig: Signature, show_implicit: bool = False) -> str:
    return Printer(sig.implicit_counts(), show_implicit).signature(sig)
