"""Tableaux over order constraints for the two-dimensional Goedel logics.

Goedel truth functions return a constant or one of their arguments, so a
branch never needs arithmetic: it is a set of order constraints between
coordinate terms (1:phi, 2:phi) and the constants.  Expansion rewrites the
compound side of a constraint; when both sides are compound, both rewrites
fire and the branch options are their pairwise unions.  A branch closes when
its constraint graph forces a strict cycle.

Validity over any non-trivial filter is decided by the single tableau rooted
at {1:f < 1}: every formula takes value 1 in the first coordinate under all
valuations exactly when it is designated under all valuations, because order
automorphisms of [0,1] fixing the endpoints commute with the connectives and
the conflation dual swaps the coordinates.  Countermodels extracted from an
open branch are rescaled the same way to land outside the requested filter.

Entailment tableaux exist for the filters (1,0) and (1,1): premises are
pinned by {1:g >= 1} (plus {2:g <= 0} at (1,0)) and the conclusion is pushed
outside the filter on each side.  Other filters are rejected; strict interior
thresholds are not expressible as order constraints against 0 and 1 alone,
and the verdicts genuinely differ there.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

from .formulas import (
    And,
    Atom,
    Bot,
    CoImp,
    Formula,
    Imp,
    ImplKind,
    LogicBase,
    LogicId,
    Neg,
    Or,
    Top,
    WImp,
    atoms,
    validate_signature,
)
from .order_graphs import (
    CONST0,
    CONST1,
    LE,
    LT,
    Coord,
    ModelExtractionError,
    OConstraint,
    OGraph,
    certificate_from_cycle,
    closed,
    contradiction_cycle,
    extract_model,
    first_violation,
)
from .proofs import Invalid, LeafInfo, ProofNode, Valid, Verdict
from .semantics import (
    EXACTLY_TRUE,
    POSITIVELY_TRUE,
    Filter,
    FilterError,
    TruthPair,
    check_filter,
    default_filter,
    dual_valuation,
    evaluate,
    is_designated,
)

_SYMBOL = {
    Bot: "0",
    Top: "1",
    Neg: "!",
    And: "&",
    Or: "|",
    Imp: "->",
    CoImp: "-<",
    WImp: "~>",
}


@dataclass(frozen=True)
class GBranch:
    """A saturated branch: accumulated constraints, its root prefix, and the
    (rule, premise) trace that produced it."""

    constraints: tuple[OConstraint, ...]
    root: tuple[OConstraint, ...]
    trace: tuple[tuple[str, OConstraint], ...] = ()


def _compound(t) -> bool:
    return isinstance(t, Coord) and not isinstance(t.formula, Atom)


def _side_rule(c: OConstraint, side: str) -> tuple[str, list[list[OConstraint]]]:
    term = c.lhs if side == "L" else c.rhs
    other = c.rhs if side == "L" else c.lhs
    x, f, rel = term.coord, term.formula, c.rel
    strict = rel == LT
    family = ("<" if strict else "<=") if side == "L" else (">" if strict else ">=")
    name = f"{_SYMBOL[type(f)]}{x}{family}"

    if isinstance(f, (Bot, Top)):
        if x == 1:
            mapped = CONST0 if isinstance(f, Bot) else CONST1
        else:
            mapped = CONST1 if isinstance(f, Bot) else CONST0
        name = f"c{x}{family}"
        new = (
            OConstraint(mapped, rel, other)
            if side == "L"
            else OConstraint(other, rel, mapped)
        )
        return name, [[new]]

    if isinstance(f, Neg):
        t = Coord(3 - x, f.sub)
        new = (
            OConstraint(t, rel, other) if side == "L" else OConstraint(other, rel, t)
        )
        return name, [[new]]

    if isinstance(f, (And, Or)):
        a, b = Coord(x, f.lhs), Coord(x, f.rhs)
        minlike = isinstance(f, And) == (x == 1)
        if side == "L":
            if minlike:
                return name, [[OConstraint(a, rel, other)], [OConstraint(b, rel, other)]]
            return name, [[OConstraint(a, rel, other), OConstraint(b, rel, other)]]
        if minlike:
            return name, [[OConstraint(other, rel, a), OConstraint(other, rel, b)]]
        return name, [[OConstraint(other, rel, a)], [OConstraint(other, rel, b)]]

    if isinstance(f, Imp) or (isinstance(f, WImp) and x == 1):
        if x == 1:
            a1, b1 = Coord(1, f.lhs), Coord(1, f.rhs)
            if side == "L" and not strict:
                return name, [
                    [OConstraint(CONST1, LE, other)],
                    [
                        OConstraint(other, LT, CONST1),
                        OConstraint(b1, LE, other),
                        OConstraint(b1, LT, a1),
                    ],
                ]
            if side == "L":
                return name, [[OConstraint(b1, LT, other), OConstraint(b1, LT, a1)]]
            return name, [[OConstraint(a1, LE, b1)], [OConstraint(other, rel, b1)]]
        a2, b2 = Coord(2, f.lhs), Coord(2, f.rhs)
        if side == "L":
            return name, [[OConstraint(b2, LE, a2)], [OConstraint(b2, rel, other)]]
        if not strict:
            return name, [
                [OConstraint(other, LE, CONST0)],
                [
                    OConstraint(CONST0, LT, other),
                    OConstraint(other, LE, b2),
                    OConstraint(a2, LT, b2),
                ],
            ]
        return name, [[OConstraint(other, LT, b2), OConstraint(a2, LT, b2)]]

    if isinstance(f, CoImp):
        if x == 1:
            a1, b1 = Coord(1, f.lhs), Coord(1, f.rhs)
            if side == "L":
                return name, [[OConstraint(a1, LE, b1)], [OConstraint(a1, rel, other)]]
            if strict:
                return name, [[OConstraint(other, LT, a1), OConstraint(b1, LT, a1)]]
            return name, [
                [OConstraint(other, LE, CONST0)],
                [
                    OConstraint(CONST0, LT, other),
                    OConstraint(other, LE, a1),
                    OConstraint(b1, LT, a1),
                ],
            ]
        a2, b2 = Coord(2, f.lhs), Coord(2, f.rhs)
        if side == "R":
            return name, [[OConstraint(other, rel, a2)], [OConstraint(b2, LE, a2)]]
        if not strict:
            return name, [
                [OConstraint(CONST1, LE, other)],
                [
                    OConstraint(other, LT, CONST1),
                    OConstraint(a2, LE, other),
                    OConstraint(a2, LT, b2),
                ],
            ]
        return name, [[OConstraint(a2, LT, other), OConstraint(a2, LT, b2)]]

    if isinstance(f, WImp):
        a1, b2 = Coord(1, f.lhs), Coord(2, f.rhs)
        if side == "L":
            return name, [[OConstraint(a1, rel, other)], [OConstraint(b2, rel, other)]]
        return name, [[OConstraint(other, rel, a1), OConstraint(other, rel, b2)]]

    raise ValueError(f"no rule for {c}")


def expand_constraint(c: OConstraint) -> Optional[tuple[str, list[list[OConstraint]]]]:
    """Rule application for one constraint, or None when both sides are
    atomic.  With two compound sides both rewrites fire; the options are the
    pairwise unions, which keeps open branches semantically invertible."""
    left = _compound(c.lhs)
    right = _compound(c.rhs)
    if not left and not right:
        return None
    if left and right:
        ln, lopts = _side_rule(c, "L")
        rn, ropts = _side_rule(c, "R")
        return f"{ln}*{rn}", [lo + ro for lo in lopts for ro in ropts]
    return _side_rule(c, "L" if left else "R")


# saturation ------------------------------------------------------------------

_QueueEntry = tuple[OConstraint, str, list]


class _GState:
    __slots__ = ("constraints", "cset", "ns", "ns_idx", "sp", "sp_idx")

    def __init__(self):
        self.constraints: list[OConstraint] = []
        self.cset: set[OConstraint] = set()
        self.ns: list[_QueueEntry] = []
        self.ns_idx = 0
        self.sp: list[_QueueEntry] = []
        self.sp_idx = 0

    def push(self, items: Iterable[OConstraint]) -> None:
        for c in items:
            if c in self.cset:
                continue
            self.cset.add(c)
            self.constraints.append(c)
            exp = expand_constraint(c)
            if exp is None:
                continue
            name, options = exp
            if len(options) == 1:
                self.ns.append((c, name, options))
            else:
                self.sp.append((c, name, options))

    def mark(self):
        return (len(self.constraints), len(self.ns), self.ns_idx, len(self.sp), self.sp_idx)

    def release(self, mark):
        nc, nns, ns_idx, nsp, sp_idx = mark
        for c in self.constraints[nc:]:
            self.cset.discard(c)
        del self.constraints[nc:]
        del self.ns[nns:]
        del self.sp[nsp:]
        self.ns_idx = ns_idx
        self.sp_idx = sp_idx

    def next_nonsplit(self) -> Optional[_QueueEntry]:
        if self.ns_idx < len(self.ns):
            entry = self.ns[self.ns_idx]
            self.ns_idx += 1
            return entry
        return None

    def next_split(self) -> Optional[_QueueEntry]:
        if self.sp_idx < len(self.sp):
            entry = self.sp[self.sp_idx]
            self.sp_idx += 1
            return entry
        return None

    def graph(self) -> OGraph:
        return OGraph(tuple(self.constraints))


def g_saturate(root: Iterable[OConstraint]) -> list[GBranch]:
    """All complete branches, closure ignored; for small inputs and tests."""
    root = tuple(root)
    state = _GState()
    state.push(root)
    out: list[GBranch] = []
    trace: list[tuple[str, OConstraint]] = []

    def walk():
        frame = state.mark()
        tlen = len(trace)
        try:
            while True:
                entry = state.next_nonsplit() or state.next_split()
                if entry is None:
                    out.append(GBranch(tuple(state.constraints), root, tuple(trace)))
                    return
                c, name, options = entry
                trace.append((name, c))
                if len(options) == 1:
                    state.push(options[0])
                    continue
                for option in options:
                    inner = state.mark()
                    state.push(option)
                    walk()
                    state.release(inner)
                return
        finally:
            state.release(frame)
            del trace[tlen:]

    walk()
    return out


# pruned search used by the provers -------------------------------------------


@dataclass
class GTableauRun:
    closed: bool
    tree: ProofNode
    open_branch: Optional[GBranch] = None


def _closed_leaf(g: OGraph) -> ProofNode:
    cycle = contradiction_cycle(g)
    cert = certificate_from_cycle(cycle) if cycle is not None else ["closed"]
    return ProofNode(leaf=LeafInfo(closed=True, certificate=cert))


def run_godel(root: Iterable[OConstraint]) -> GTableauRun:
    """Depth-first expansion, checking the strict-cycle condition after every
    push; the first open complete branch stops the search."""
    root = tuple(root)
    state = _GState()
    state.push(root)
    if closed(state.graph()):
        return GTableauRun(True, _closed_leaf(state.graph()))

    found: list[GBranch] = []
    trace: list[tuple[str, OConstraint]] = []

    def explore() -> tuple[ProofNode, bool]:
        frame = state.mark()
        tlen = len(trace)
        head: Optional[ProofNode] = None
        tail: Optional[ProofNode] = None

        def attach(node: ProofNode) -> ProofNode:
            nonlocal head, tail
            if tail is None:
                head = node
            else:
                tail.children.append(node)
            tail = node
            return node

        try:
            while True:
                entry = state.next_nonsplit()
                if entry is not None:
                    c, name, options = entry
                    attach(ProofNode(rule=name, premise=c))
                    trace.append((name, c))
                    state.push(options[0])
                    if closed(state.graph()):
                        attach(_closed_leaf(state.graph()))
                        return head, True
                    continue

                entry = state.next_split()
                if entry is None:
                    if closed(state.graph()):
                        attach(_closed_leaf(state.graph()))
                        return head, True
                    branch = GBranch(tuple(state.constraints), root, tuple(trace))
                    found.append(branch)
                    attach(ProofNode(leaf=LeafInfo(closed=False)))
                    return head, False

                c, name, options = entry
                split = attach(ProofNode(rule=name, premise=c))
                trace.append((name, c))
                all_closed = True
                for option in options:
                    inner = state.mark()
                    state.push(option)
                    if closed(state.graph()):
                        split.children.append(_closed_leaf(state.graph()))
                    else:
                        sub, sub_closed = explore()
                        split.children.append(sub)
                        if not sub_closed:
                            all_closed = False
                    state.release(inner)
                    if found:
                        return head, False
                return head, all_closed
        finally:
            state.release(frame)
            del trace[tlen:]

    tree, was_closed = explore()
    if found:
        return GTableauRun(False, tree, found[0])
    return GTableauRun(was_closed, tree)


# countermodels ---------------------------------------------------------------


def g_extract_countermodel(branch: GBranch, logic: LogicId) -> dict[str, TruthPair]:
    """Valuation satisfying an open complete branch, root re-checked exactly."""
    names = sorted(
        {
            a
            for c in branch.constraints
            for t in (c.lhs, c.rhs)
            if isinstance(t, Coord)
            for a in atoms(t.formula)
        }
    )
    v = extract_model(OGraph(branch.constraints), names, logic)
    bad = first_violation(OGraph(branch.root), v, logic)
    if bad is not None:
        raise ModelExtractionError(f"countermodel violates root constraint {bad}")
    return v


def _h(val: Fraction, a: Fraction, t: Fraction) -> Fraction:
    if val <= a:
        return val * t / a
    return t + (val - a) * (1 - t) / (1 - a)


def _apply_h(v: dict[str, TruthPair], a: Fraction, t: Fraction) -> dict[str, TruthPair]:
    return {name: TruthPair(_h(p.pos, a, t), _h(p.neg, a, t)) for name, p in v.items()}


def _fail_filter(
    v: dict[str, TruthPair], f: Formula, d: Filter, logic: LogicId
) -> dict[str, TruthPair]:
    """Rescale an open-branch valuation until f lands outside the filter.

    Increasing bijections of [0,1] fixing the endpoints commute with the
    Goedel connectives, and the conflation dual swaps and flips the two
    coordinates; together they turn any valuation with v_1(f) < 1 into one
    violating the given (non-trivial) filter."""
    pair = evaluate(f, v, logic)
    if d.x > 0:
        if pair.pos < d.x:
            return v
        if pair.pos >= 1:
            raise ModelExtractionError("open branch gave the formula value 1")
        return _apply_h(v, pair.pos, d.x / 2)
    w = dual_valuation(v)
    wpair = evaluate(f, w, logic)
    if wpair.neg > d.y:
        return w
    if wpair.neg <= 0:
        raise ModelExtractionError("dual valuation lost the witness")
    return _apply_h(w, wpair.neg, (d.y + 1) / 2)


# provers ---------------------------------------------------------------------


def g_prove_valid(
    f: Formula, logic: LogicId, d: Optional[Filter] = None
) -> Verdict:
    """Valid iff the tableau rooted at {1:f < 1} closes.

    The verdict does not depend on the filter; the filter shapes the
    countermodel, which is rescaled to be non-designated and re-checked.
    The trivial filter (0,1) designates the whole square and is rejected.
    """
    validate_signature(f, logic)
    if logic.base is not LogicBase.GODEL:
        raise ValueError("g_prove_valid covers the Goedel logics only")
    if d is None:
        d = default_filter(logic)
    check_filter(d, logic)
    if d.x == 0 and d.y == 1:
        raise FilterError("the filter (0,1) designates every pair")
    run = run_godel([OConstraint(Coord(1, f), LT, CONST1)])
    if run.closed:
        return Valid((run.tree,))
    v = g_extract_countermodel(run.open_branch, logic)
    v = _fail_filter(v, f, d, logic)
    if is_designated(evaluate(f, v, logic), d):
        raise ModelExtractionError("adapted countermodel is designated")
    return Invalid(v)


def g_prove_entailment(
    gamma: Iterable[Formula],
    f: Formula,
    logic: LogicId,
    d: Optional[Filter] = None,
) -> Verdict:
    """Finitary entailment at the filters (1,0) and (1,1).

    At (1,0) the premises are pinned by {1:g >= 1, 2:g <= 0} and both
    conclusion tableaux {1:f < 1} and {2:f > 0} must close; at (1,1) only
    the positive side exists.  Defaults follow the logic: (1,0) with the
    two-implication signature, (1,1) with the weak one.
    """
    gamma = list(gamma)
    for g in gamma:
        validate_signature(g, logic)
    validate_signature(f, logic)
    if logic.base is not LogicBase.GODEL:
        raise ValueError("g_prove_entailment covers the Goedel logics only")
    if d is None:
        d = default_filter(logic)
    check_filter(d, logic)
    if d == EXACTLY_TRUE and logic.impl_kind is ImplKind.ARROW:
        premises = []
        for g in gamma:
            premises.append(OConstraint(CONST1, LE, Coord(1, g)))
            premises.append(OConstraint(Coord(2, g), LE, CONST0))
        goals = [
            [OConstraint(Coord(1, f), LT, CONST1)],
            [OConstraint(CONST0, LT, Coord(2, f))],
        ]
    elif d == POSITIVELY_TRUE:
        premises = [OConstraint(CONST1, LE, Coord(1, g)) for g in gamma]
        goals = [[OConstraint(Coord(1, f), LT, CONST1)]]
    else:
        raise FilterError(
            "entailment tableaux exist for the filters (1,0) and (1,1) only"
        )
    trees = []
    for goal in goals:
        run = run_godel(premises + goal)
        if not run.closed:
            v = g_extract_countermodel(run.open_branch, logic)
            for g in gamma:
                if not is_designated(evaluate(g, v, logic), d):
                    raise ModelExtractionError("countermodel drops a premise")
            if is_designated(evaluate(f, v, logic), d):
                raise ModelExtractionError("countermodel designates the conclusion")
            return Invalid(v)
        trees.append(run.tree)
    return Valid(tuple(trees))
