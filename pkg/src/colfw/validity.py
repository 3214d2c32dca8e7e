"""Trace validity of recursive definitions.

Families are ranked by declaration order (later is higher) and constructors
inherit rank and polarity from the family they construct.  A trace graph has
one node per definition and one edge per occurrence of a definition inside
another definition's body, labelled with the constructors passed on the way.
On every cycle the highest-ranked constructor must be coinductive, and every
cycle must pass at least one constructor.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .diagnostics import INVALID_CYCLE, NON_CONTRACTIVE, UNPRODUCTIVE_CYCLE, Diagnostic
from .syntax import App, ConstDecl, DefDecl, HeadKind, KindDecl, Lam, Signature, eta_variable, strip_lambdas, telescope


@dataclass(frozen=True)
class Tables:
    priority: dict[str, int]
    coinductive: dict[str, bool]
    family_of: dict[str, str]


def assign_priorities(sig: Signature) -> Tables:
    priority: dict[str, int] = {}
    coinductive: dict[str, bool] = {}
    family_of: dict[str, str] = {}
    rank = 0
    for d in sig:
        if isinstance(d, KindDecl):
            _, sort = telescope(d.kind)
            priority[d.name] = rank
            coinductive[d.name] = sort.co
            family_of[d.name] = d.name
            rank += 1
    for d in sig:
        if isinstance(d, (ConstDecl, DefDecl)):
            _, target = telescope(d.type)
            fam = getattr(target, "family", None)
            if fam in priority:
                priority.setdefault(d.name, priority[fam])
                coinductive.setdefault(d.name, coinductive[fam])
                family_of.setdefault(d.name, fam)
    return Tables(priority, coinductive, family_of)


def contractiveness_check(decl: DefDecl) -> Diagnostic | None:
    _, body = strip_lambdas(decl.body)
    if isinstance(body, App) and body.kind is HeadKind.CONST:
        return None
    what = "a variable" if isinstance(body, App) and body.kind is HeadKind.VAR else "a recursion constant"
    return Diagnostic(
        NON_CONTRACTIVE,
        f"definition {decl.name!r} is not contractive: its body is headed by {what}, not a constructor",
        decl.span,
        decl=decl.name,
    )


def _rec_occurrences(term):
    stack = [term]
    while stack:
        t = stack.pop()
        if isinstance(t, Lam):
            stack.append(t.body)
        elif isinstance(t, App):
            if t.kind is HeadKind.REC:
                yield t
            stack.extend(t.spine)


def prepattern_check(sig: Signature) -> dict[str, bool]:
    """Per definition: are all recursion constants applied to bound variables only?"""
    report = {}
    for d in sig.definitions:
        report[d.name] = all(
            all(eta_variable(arg) is not None for arg in occ.spine) for occ in _rec_occurrences(d.body)
        )
    return report


@dataclass(frozen=True)
class Edge:
    src: str
    dst: str
    labels: tuple[str, ...]

    @property
    def has_constant(self) -> bool:
        return bool(self.labels)


@dataclass
class TraceGraph:
    nodes: list[str] = field(default_factory=list)
    edges: list[Edge] = field(default_factory=list)


def build_trace_graph(sig: Signature, tables: Tables | None = None) -> TraceGraph:
    """Only contractive definitions become nodes."""
    graph = TraceGraph()
    for d in sig.definitions:
        if contractiveness_check(d) is not None:
            continue
        graph.nodes.append(d.name)
        stack = [(d.body, ())]
        while stack:
            t, label = stack.pop()
            if isinstance(t, Lam):
                stack.append((t.body, label))
            elif isinstance(t, App):
                if t.kind is HeadKind.CONST:
                    label = label + (t.head,)
                elif t.kind is HeadKind.REC:
                    graph.edges.append(Edge(d.name, t.head, label))
                # arguments of a definition are reached through its body, so
                # they are walked with the label collected so far
                for arg in reversed(t.spine):
                    stack.append((arg, label))
    return graph


def _sccs(nodes, edges) -> list[list[str]]:
    """Tarjan's algorithm, iterative."""
    succ: dict[str, list[str]] = {n: [] for n in nodes}
    for e in edges:
        if e.src in succ and e.dst in succ:
            succ[e.src].append(e.dst)
    index: dict[str, int] = {}
    low: dict[str, int] = {}
    on_stack: set[str] = set()
    stack: list[str] = []
    out: list[list[str]] = []
    counter = 0
    for root in nodes:
        if root in index:
            continue
        work = [(root, 0)]
        while work:
            node, i = work.pop()
            if i == 0:
                index[node] = low[node] = counter
                counter += 1
                stack.append(node)
                on_stack.add(node)
            recurse = False
            for j in range(i, len(succ[node])):
                nxt = succ[node][j]
                if nxt not in index:
                    work.append((node, j + 1))
                    work.append((nxt, 0))
                    recurse = True
                    break
                if nxt in on_stack:
                    low[node] = min(low[node], index[nxt])
            if recurse:
                continue
            if low[node] == index[node]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == node:
                        break
                out.append(comp)
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])
    return out


def _path(edges, start: str, goal: str) -> list[str]:
    """Shortest node path from start to goal using the given edges."""
    prev: dict[str, str | None] = {start: None}
    queue = deque([start])
    while queue:
        n = queue.popleft()
        if n == goal:
            break
        for e in edges:
            if e.src == n and e.dst not in prev:
                prev[e.dst] = n
                queue.append(e.dst)
    path = [goal]
    while prev.get(path[-1]) is not None:
        path.append(prev[path[-1]])
    return path[::-1]


@dataclass(frozen=True)
class Violation:
    code: str
    cycle: tuple[str, ...]
    constructor: str | None = None


def _top(edge: Edge, tables: Tables) -> int:
    return max((tables.priority.get(c, -1) for c in edge.labels), default=-1)


def find_violations(graph: TraceGraph, tables: Tables) -> list[Violation]:
    found: list[Violation] = []
    work = [(graph.nodes, graph.edges)]
    while work:
        nodes, edges = work.pop()
        for comp in _sccs(nodes, edges):
            members = set(comp)
            inner = [e for e in edges if e.src in members and e.dst in members]
            if not inner:
                continue
            labelled = [e for e in inner if e.has_constant]
            if not labelled:
                e = inner[0]
                found.append(Violation(UNPRODUCTIVE_CYCLE, _cycle(inner, e)))
                continue
            top = max(_top(e, tables) for e in labelled)
            dominated = [e for e in labelled if _top(e, tables) == top]
            witness = next(c for c in dominated[0].labels if tables.priority.get(c, -1) == top)
            if top < 0 or not tables.coinductive.get(witness, False):
                found.append(Violation(INVALID_CYCLE, _cycle(inner, dominated[0]), witness))
            rest = [e for e in inner if e not in dominated]
            work.append(([n for n in comp], rest))
    return found


def _cycle(edges, edge: Edge) -> tuple[str, ...]:
    return (edge.src, *_path(edges, edge.dst, edge.src))


def check_validity(graph: TraceGraph, tables: Tables, sig: Signature | None = None) -> list[Diagnostic]:
    diags = []
    for v in find_violations(graph, tables):
        path = " -> ".join(v.cycle)
        first = sig.get(v.cycle[0]) if sig is not None else None
        span = getattr(first, "span", None)
        if v.code == UNPRODUCTIVE_CYCLE:
            msg = f"cycle {path} passes no constructor"
        else:
            fam = tables.family_of.get(v.constructor, "?")
            msg = (
                f"cycle {path}: its highest-priority constructor {v.constructor!r} "
                f"belongs to inductive family {fam!r}"
            )
        diags.append(Diagnostic(v.code, msg, span, decl=v.cycle[0]))
    return diags


@dataclass
class DefValidity:
    name: str
    contractive: bool
    prepattern: bool
    valid: bool
    witness: tuple[str, ...] | None = None

    def to_dict(self) -> dict:
        out = {
            "name": self.name,
            "contractive": self.contractive,
            "prepattern": self.prepattern,
            "valid": self.valid,
        }
        if self.witness:
            out["witness"] = list(self.witness)
        return out


@dataclass
class ValidityReport:
    definitions: list[DefValidity]
    diagnostics: list[Diagnostic]

    @property
    def ok(self) -> bool:
        return all(d.valid for d in self.definitions)

    @property
    def prepattern(self) -> bool:
        return all(d.prepattern for d in self.definitions)

    def to_dict(self) -> dict:
        return {
            "valid": self.ok,
            "prepattern": self.prepattern,
            "definitions": [d.to_dict() for d in self.definitions],
        }

    def render(self) -> str:
        lines = []
        for d in self.definitions:
            status = "valid" if d.valid else "INVALID"
            flags = []
            if not d.contractive:
                flags.append("non-contractive")
            flags.append("prepattern" if d.prepattern else "not prepattern")
            line = f"{d.name}: {status} ({', '.join(flags)})"
            if d.witness:
                line += f" cycle: {' -> '.join(d.witness)}"
            lines.append(line)
        lines.append(f"prepattern: {'yes' if self.prepattern else 'no'}")
        return "\n".join(lines)


def validity_report(sig: Signature) -> ValidityReport:
    tables = assign_priorities(sig)
    diags: list[Diagnostic] = []
    contractive = {}
    for d in sig.definitions:
        problem = contractiveness_check(d)
        contractive[d.name] = problem is None
        if problem is not None:
            diags.append(problem)
    graph = build_trace_graph(sig, tables)
    violations = find_violations(graph, tables)
    diags += check_validity(graph, tables, sig)
    prepattern = prepattern_check(sig)

    bad = {n for n, ok in contractive.items() if not ok}
    witness: dict[str, tuple[str, ...]] = {}
    for v in violations:
        for n in v.cycle:
            bad.add(n)
            witness.setdefault(n, v.cycle)
    # anything that can reach a bad definition is invalid too
    succ: dict[str, set[str]] = {}
    for e in graph.edges:
        succ.setdefault(e.src, set()).add(e.dst)
    changed = True
    while changed:
        changed = False
        for n, outs in succ.items():
            if n not in bad and outs & bad:
                bad.add(n)
                witness.setdefault(n, witness.get(next(iter(sorted(outs & bad))), ()))
                changed = True
    defs = [
        DefValidity(d.name, contractive[d.name], prepattern[d.name], d.name not in bad, witness.get(d.name) or None)
        for d in sig.definitions
    ]
    return ValidityReport(defs, diags)
