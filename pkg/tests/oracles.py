"""Reference implementations used only by the tests.

* ``naive_subst`` / ``normalize``: ordinary capture-avoiding substitution on
  binary-application lambda terms followed by normal-order beta reduction
  with fuel.  Hereditary substitution must agree with it on well-typed input.
* ``TraceOracle``: unfolds definitions naively, tags every constructor
  occurrence with the definition body position and unfolding instance it
  came from, enumerates traces up to a bounded number of constructors and
  looks for a body position revisited in a later unfolding whose segment is
  dominated by an inductive constructor.
"""

from __future__ import annotations

import itertools

from colfw.syntax import App, HeadKind, KindDecl, Lam, Signature, telescope

# --- lambda terms with binary application -------------------------------------
# ("var", x) | ("const", c) | ("app", f, a) | ("lam", x, body)

_counter = itertools.count()


def to_plain(term):
    if isinstance(term, Lam):
        return ("lam", term.var, to_plain(term.body))
    if isinstance(term, App):
        tag = "var" if term.kind is HeadKind.VAR else "const"
        out = (tag, term.head)
        for arg in term.spine:
            out = ("app", out, to_plain(arg))
        return out
    raise ValueError(f"cannot convert {term!r}")


def from_plain(t):
    """Back to head-spine form; None if ``t`` is not beta-normal."""
    if t[0] == "lam":
        body = from_plain(t[2])
        return None if body is None else Lam(t[1], body)
    args = []
    while t[0] == "app":
        args.append(t[2])
        t = t[1]
    if t[0] == "lam":
        return None
    spine = []
    for a in reversed(args):
        c = from_plain(a)
        if c is None:
            return None
        spine.append(c)
    kind = HeadKind.VAR if t[0] == "var" else HeadKind.CONST
    return App(t[1], kind, tuple(spine))


def plain_fv(t) -> set[str]:
    if t[0] == "var":
        return {t[1]}
    if t[0] == "const":
        return set()
    if t[0] == "app":
        return plain_fv(t[1]) | plain_fv(t[2])
    return plain_fv(t[2]) - {t[1]}


def naive_subst(n, x: str, t):
    if t[0] == "var":
        return n if t[1] == x else t
    if t[0] == "const":
        return t
    if t[0] == "app":
        return ("app", naive_subst(n, x, t[1]), naive_subst(n, x, t[2]))
    y, body = t[1], t[2]
    if y == x:
        return t
    if y in plain_fv(n):
        z = f"{y}_{next(_counter)}"
        body = naive_subst(("var", z), y, body)
        y = z
    return ("lam", y, naive_subst(n, x, body))


class OutOfFuel(Exception):
    pass


def normalize(t, fuel: int = 10_000):
    """Normal-order reduction to beta-normal form; raises OutOfFuel."""
    budget = [fuel]

    def step(t):
        budget[0] -= 1
        if budget[0] < 0:
            raise OutOfFuel
        if t[0] == "lam":
            return ("lam", t[1], step(t[2]))
        if t[0] == "app":
            f = whnf(t[1])
            if f[0] == "lam":
                return step(naive_subst(t[2], f[1], f[2]))
            return ("app", step(f), step(t[2]))
        return t

    def whnf(t):
        while True:
            budget[0] -= 1
            if budget[0] < 0:
                raise OutOfFuel
            if t[0] == "app":
                f = whnf(t[1])
                if f[0] == "lam":
                    t = naive_subst(t[2], f[1], f[2])
                    continue
                return ("app", f, t[2])
            return t

    return step(t)


def oracle_subst(n, x: str, m):
    """Canonical result of ``[n/x]m`` by substitution then normalisation, or None."""
    try:
        return from_plain(normalize(naive_subst(to_plain(n), x, to_plain(m))))
    except (OutOfFuel, RecursionError):
        return None


# --- trace enumeration ---------------------------------------------------------
# tagged trees: ("c", name, tag, args) | ("v", name, args) | ("r", name, args) | ("lam", x, body)


def _tag(term, owner: str, counter):
    if isinstance(term, Lam):
        return ("lam", term.var, _tag(term.body, owner, counter))
    args = tuple(_tag(a, owner, counter) for a in term.spine)
    if term.kind is HeadKind.CONST:
        return ("c", term.head, (owner, next(counter)), args)
    if term.kind is HeadKind.REC:
        return ("r", term.head, args)
    return ("v", term.head, args)


def _stamp(t, inst):
    """Mark the constructors of a freshly unfolded body with its instance number."""
    kind = t[0]
    if kind == "lam":
        return ("lam", t[1], _stamp(t[2], inst))
    if kind == "c":
        return ("c", t[1], (t[2], inst), tuple(_stamp(a, inst) for a in t[3]))
    return (kind, t[1], tuple(_stamp(a, inst) for a in t[2]))


def _subst_tagged(value, x, t):
    kind = t[0]
    if kind == "lam":
        if t[1] == x:
            return t
        return ("lam", t[1], _subst_tagged(value, x, t[2]))
    if kind == "c":
        return ("c", t[1], t[2], tuple(_subst_tagged(value, x, a) for a in t[3]))
    args = tuple(_subst_tagged(value, x, a) for a in t[2])
    if kind == "v" and t[1] == x:
        if args:
            raise NotImplementedError("higher-order parameter in trace oracle")
        return value
    return (kind, t[1], args)


class TraceOracle:
    def __init__(self, sig: Signature, max_constants: int = 12, max_paths: int = 200_000) -> None:
        families = [d.name for d in sig if isinstance(d, KindDecl)]
        self.rank = {}
        self.co = {}
        for i, d in enumerate(d for d in sig if isinstance(d, KindDecl)):
            self.rank[d.name] = i
            self.co[d.name] = telescope(d.kind)[1].co
        for d in sig:
            if not isinstance(d, KindDecl):
                fam = getattr(telescope(d.type)[1], "family", None)
                if fam in families:
                    self.rank[d.name] = self.rank[fam]
                    self.co[d.name] = self.co[fam]
        self.bodies = {}
        for d in sig.definitions:
            self.bodies[d.name] = _tag(d.body, d.name, itertools.count())
        self.instances = itertools.count()
        self.max_constants = max_constants
        self.max_paths = max_paths

    def _unfold(self, name, args):
        body = _stamp(self.bodies[name], next(self.instances))
        for a in args:
            if body[0] != "lam":
                raise ValueError("over-applied definition")
            body = _subst_tagged(a, body[1], body[2])
        return body

    def violations(self, name: str) -> list[tuple]:
        """Segments witnessing an invalid cycle on some trace from ``name``."""
        found = []
        paths = 0
        stack = [(_stamp(self.bodies[name], next(self.instances)), (), 0)]
        while stack:
            node, trace, unfolds = stack.pop()
            kind = node[0]
            if kind == "lam":
                stack.append((node[2], trace, unfolds))
                continue
            if kind == "r":
                if unfolds > 4 * self.max_constants:
                    found.append(("unproductive", trace))
                    continue
                stack.append((self._unfold(node[1], node[2]), trace, unfolds + 1))
                continue
            if kind == "c":
                trace = trace + ((node[1], node[2]),)
                bad = self._check(trace)
                if bad is not None:
                    found.append(bad)
                    continue
                if len(trace) >= self.max_constants:
                    continue
                children = node[3]
                unfolds = 0
            else:
                children = node[2]
            paths += 1
            if paths > self.max_paths:
                raise RuntimeError("trace enumeration budget exceeded")
            for child in children:
                stack.append((child, trace, unfolds))
        return found

    def _check(self, trace):
        # a cycle revisits a body position in a later unfolding; an earlier
        # instance is only a copy passed down through a parameter
        last_pos, last_inst = trace[-1][1]
        for i in range(len(trace) - 1):
            pos, inst = trace[i][1]
            if pos == last_pos and inst < last_inst:
                segment = [c for c, _ in trace[i + 1:]]
                top = max(segment, key=lambda c: self.rank.get(c, -1))
                if not self.co.get(top, False):
                    return ("invalid", tuple(segment))
        return None

    def valid(self, name: str) -> bool:
        return not self.violations(name)
