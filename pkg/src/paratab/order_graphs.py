"""Order constraints between coordinate terms, for the Goedel tableaux.

A term is a coordinate of a formula (1:phi or 2:phi) or one of the constants
0, 1.  Constraints are weak or strict comparisons between terms.  A set of
constraints is unsatisfiable exactly when its reachability graph, extended
with the implicit edges 0 <= t, t <= 1 and 0 < 1, has a strict edge inside a
strongly connected component; that single condition covers strict cycles and
every constant-bound violation.

Model extraction follows the completeness argument: atoms explicitly forced
to a constant are pinned; the remaining atom-coordinate terms are grouped
into mutual-reachability classes, ordered by reachability, and valued by
counting predecessor classes against denominator 2n (n = atoms involved).
That construction ignores the constants, so the result is verified exactly
and, when it fails, a rank-based valuation (longest path from 0 in the
condensation, scaled by the rank of 1) is used instead; the rank valuation
satisfies any open constraint graph, and extraction re-verifies it too.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Union

from .formulas import Atom, Formula, LogicId, render
from .semantics import TruthPair, evaluate

LE = "<="
LT = "<"

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass(frozen=True)
class Coord:
    coord: int
    formula: Formula

    def __str__(self):
        return f"{self.coord}:{render(self.formula)}"


@dataclass(frozen=True)
class Const0:
    def __str__(self):
        return "0"


@dataclass(frozen=True)
class Const1:
    def __str__(self):
        return "1"


CONST0 = Const0()
CONST1 = Const1()

OTerm = Union[Coord, Const0, Const1]


@dataclass(frozen=True)
class OConstraint:
    lhs: OTerm
    rel: str
    rhs: OTerm

    def __post_init__(self):
        if self.rel not in (LE, LT):
            raise ValueError(f"rel must be {LE!r} or {LT!r}")

    def __str__(self):
        return f"{self.lhs} {self.rel} {self.rhs}"


@dataclass(frozen=True)
class OGraph:
    constraints: tuple[OConstraint, ...]

    @staticmethod
    def of(constraints: Iterable[OConstraint]) -> "OGraph":
        return OGraph(tuple(constraints))

    def nodes(self) -> list[OTerm]:
        seen: dict[OTerm, None] = {}
        for c in self.constraints:
            seen.setdefault(c.lhs)
            seen.setdefault(c.rhs)
        seen.setdefault(CONST0)
        seen.setdefault(CONST1)
        return list(seen)

    def explicit_edges(self) -> list[tuple[OTerm, OTerm, bool]]:
        return [(c.lhs, c.rhs, c.rel == LT) for c in self.constraints]

    def full_edges(self) -> list[tuple[OTerm, OTerm, bool]]:
        """Explicit edges plus 0 <= t, t <= 1 for every node and 0 < 1."""
        edges = self.explicit_edges()
        for t in self.nodes():
            if t != CONST0:
                edges.append((CONST0, t, False))
            if t != CONST1:
                edges.append((t, CONST1, False))
        edges.append((CONST0, CONST1, True))
        return edges


def _sccs(nodes: list, edges: list[tuple]) -> dict:
    """Tarjan, iterative; returns node -> component id (ids in reverse
    topological order of the condensation)."""
    adj: dict = {n: [] for n in nodes}
    for u, v, *_ in edges:
        adj[u].append(v)
    index: dict = {}
    low: dict = {}
    comp: dict = {}
    on_stack: set = set()
    stack: list = []
    counter = [0]
    comp_counter = [0]

    for start in nodes:
        if start in index:
            continue
        work = [(start, iter(adj[start]))]
        index[start] = low[start] = counter[0]
        counter[0] += 1
        stack.append(start)
        on_stack.add(start)
        while work:
            node, it = work[-1]
            advanced = False
            for nxt in it:
                if nxt not in index:
                    index[nxt] = low[nxt] = counter[0]
                    counter[0] += 1
                    stack.append(nxt)
                    on_stack.add(nxt)
                    work.append((nxt, iter(adj[nxt])))
                    advanced = True
                    break
                if nxt in on_stack:
                    low[node] = min(low[node], index[nxt])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])
            if low[node] == index[node]:
                cid = comp_counter[0]
                comp_counter[0] += 1
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp[w] = cid
                    if w == node:
                        break
    return comp


def closed(g: OGraph) -> bool:
    nodes = g.nodes()
    edges = g.full_edges()
    comp = _sccs(nodes, edges)
    return any(strict and comp[u] == comp[v] for u, v, strict in edges)


def contradiction_cycle(g: OGraph) -> Optional[list[OTerm]]:
    """A cycle through a strict edge witnessing closure, or None if open."""
    nodes = g.nodes()
    edges = g.full_edges()
    comp = _sccs(nodes, edges)
    for u, v, strict in edges:
        if strict and comp[u] == comp[v]:
            # path v -> ... -> u inside the component
            adj: dict = {n: [] for n in nodes}
            for a, b, _ in edges:
                if comp[a] == comp[u] and comp[b] == comp[u]:
                    adj[a].append(b)
            prev: dict = {v: None}
            queue = deque([v])
            while queue:
                n = queue.popleft()
                if n == u:
                    break
                for nxt in adj[n]:
                    if nxt not in prev:
                        prev[nxt] = n
                        queue.append(nxt)
            path = [u]
            n = u
            while prev[n] is not None:
                n = prev[n]
                path.append(n)
            path.reverse()  # v ... u
            return [u] + path
    return None


def certificate_from_cycle(cycle: list[OTerm]) -> list[str]:
    steps = " -> ".join(str(t) for t in cycle)
    return [f"strict cycle: {steps}"]


# -- model extraction ---------------------------------------------------------


class ModelExtractionError(RuntimeError):
    """Both valuation constructions failed verification; indicates a bug."""


def _term_value(
    t: OTerm, v: Mapping[str, TruthPair], logic: LogicId, cache: dict
) -> Fraction:
    if t == CONST0:
        return ZERO
    if t == CONST1:
        return ONE
    pair = cache.get(t.formula)
    if pair is None:
        pair = evaluate(t.formula, v, logic)
        cache[t.formula] = pair
    return pair.pos if t.coord == 1 else pair.neg


def first_violation(
    g: OGraph, v: Mapping[str, TruthPair], logic: LogicId
) -> Optional[OConstraint]:
    """First violated constraint under the exact semantic values, or None."""
    cache: dict = {}
    for c in g.constraints:
        a = _term_value(c.lhs, v, logic, cache)
        b = _term_value(c.rhs, v, logic, cache)
        if not (a < b if c.rel == LT else a <= b):
            return c
    return None


def _is_atomic(t: OTerm) -> bool:
    return isinstance(t, Coord) and isinstance(t.formula, Atom)


def _class_model(g: OGraph, names: Iterable[str]) -> dict[str, TruthPair]:
    """The predecessor-counting construction over explicit constraints."""
    pinned: dict[Coord, Fraction] = {}
    for c in g.constraints:
        if c.rel == LE and c.lhs == CONST1 and _is_atomic(c.rhs):
            pinned[c.rhs] = ONE
        if c.rel == LE and c.rhs == CONST0 and _is_atomic(c.lhs):
            pinned[c.lhs] = ZERO

    nodes = g.nodes()
    edges = g.explicit_edges()
    comp = _sccs(nodes, edges)
    free = [t for t in nodes if _is_atomic(t) and t not in pinned]
    class_ids = sorted({comp[t] for t in free})

    adj: dict[int, set[int]] = {comp[t]: set() for t in nodes}
    for u, v, _ in edges:
        if comp[u] != comp[v]:
            adj[comp[u]].add(comp[v])

    reach: dict[int, set[int]] = {}

    def reachable(cid: int) -> set[int]:
        if cid in reach:
            return reach[cid]
        seen = {cid}
        queue = deque([cid])
        while queue:
            x = queue.popleft()
            for y in adj.get(x, ()):
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
        reach[cid] = seen
        return seen

    n = len({t.formula.name for t in free}) or 1
    value: dict[int, Fraction] = {}
    for cid in class_ids:
        below = sum(1 for other in class_ids if cid in reachable(other))
        value[cid] = Fraction(below, 2 * n)

    out: dict[str, TruthPair] = {}
    for name in names:
        coords = []
        for k in (1, 2):
            t = Coord(k, Atom(name))
            if t in pinned:
                coords.append(pinned[t])
            elif t in comp and comp[t] in value:
                coords.append(value[comp[t]])
            else:
                coords.append(ZERO)
        out[name] = TruthPair(coords[0], coords[1])
    return out


def _rank_model(g: OGraph, names: Iterable[str]) -> dict[str, TruthPair]:
    """Longest-path ranks in the condensation, scaled so 1 sits at value 1."""
    nodes = g.nodes()
    edges = g.full_edges()
    comp = _sccs(nodes, edges)
    cids = sorted(set(comp.values()))
    succ: dict[int, set[int]] = {c: set() for c in cids}
    pred_count: dict[int, int] = {c: 0 for c in cids}
    pairs = set()
    for u, v, _ in edges:
        cu, cv = comp[u], comp[v]
        if cu != cv and (cu, cv) not in pairs:
            pairs.add((cu, cv))
            succ[cu].add(cv)
    for cu, cv in pairs:
        pred_count[cv] += 1

    rank: dict[int, int] = {c: 0 for c in cids}
    ready = deque(c for c in cids if pred_count[c] == 0)
    while ready:
        c = ready.popleft()
        for d in succ[c]:
            rank[d] = max(rank[d], rank[c] + 1)
            pred_count[d] -= 1
            if pred_count[d] == 0:
                ready.append(d)

    denom = rank[comp[CONST1]]
    if denom == 0:
        raise ValueError("constraint graph is closed; no model exists")

    def term_val(t: OTerm) -> Fraction:
        return Fraction(rank[comp[t]], denom)

    out: dict[str, TruthPair] = {}
    for name in names:
        coords = []
        for k in (1, 2):
            t = Coord(k, Atom(name))
            coords.append(term_val(t) if t in comp else ZERO)
        out[name] = TruthPair(coords[0], coords[1])
    return out


def extract_model(
    g: OGraph, atoms: Iterable[str], logic: LogicId
) -> dict[str, TruthPair]:
    """A valuation satisfying every constraint of the open saturated graph.

    Tries the predecessor-counting construction first, then the rank
    valuation; each candidate is verified exactly (semantic values of the
    formulas behind the terms) before being accepted.
    """
    names = sorted(set(atoms))
    candidate = _class_model(g, names)
    if first_violation(g, candidate, logic) is None:
        return candidate
    fallback = _rank_model(g, names)
    bad = first_violation(g, fallback, logic)
    if bad is None:
        return fallback
    raise ModelExtractionError(f"rank valuation violates {bad}")
