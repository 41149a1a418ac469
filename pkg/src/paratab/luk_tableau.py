"""Constraint tableaux for the two-dimensional Lukasiewicz logics.

A tableau node is either a labelled formula (a formula bounded in one
coordinate by an affine expression over parameters) or a plain numeric
inequality.  Expansion rules decompose labelled formulas until only atoms
remain; a branch closes when the linear translation of its constraint set
(each labelled formula phi rel_k e contributing L[phi] rel e or R[phi] rel e)
is infeasible over [0,1].

Validity of f over the filter (x,y)^ is decided by two tableaux,

    {f <=_1 c, c < x}   and   {f >=_2 d, d > y},

both of which must close; an open complete branch of either yields an exact
rational countermodel.  Entailment adds, to both tableaux, the premise
constraints {g >=_1 x, g <=_2 y} for every premise g.

The branching mode applies the rules as written; the linear mode replaces
each splitting rule by a single conclusion with a fresh {0,1} variable and
decides closure by binary enumeration over the translated system.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

from .formulas import (
    And,
    Atom,
    Bot,
    Formula,
    Imp,
    ImplKind,
    LogicBase,
    LogicId,
    Neg,
    Or,
    Top,
    WImp,
    render,
    validate_signature,
)
from .linear import (
    LE,
    LT,
    AffineExpr,
    LinIneq,
    Sat,
    Unsat,
    Var,
    VarKind,
    certificate_lines,
    extend_model,
    feasible_with_binaries,
    fm_feasible,
    fm_project,
    ineq,
    lp_probe,
)
from .proofs import Invalid, LeafInfo, ProofNode, Valid, Verdict
from .semantics import (
    Filter,
    TruthPair,
    check_filter,
    evaluate,
    is_designated,
    valuation_to_json,
)

GEQ = ">="
LEQ = "<="

ZERO = Fraction(0)
ONE = Fraction(1)


def _bound_key(e: AffineExpr):
    return (e.constant, frozenset(e.terms.items()))


@dataclass(frozen=True, eq=False)
class LabelledFormula:
    formula: Formula
    coord: int
    rel: str
    bound: AffineExpr

    def __post_init__(self):
        if self.coord not in (1, 2):
            raise ValueError("coord must be 1 or 2")
        if self.rel not in (LEQ, GEQ):
            raise ValueError(f"rel must be {LEQ!r} or {GEQ!r}")

    def key(self):
        return (self.formula, self.coord, self.rel, _bound_key(self.bound))

    def __eq__(self, other):
        return isinstance(other, LabelledFormula) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __str__(self):
        return f"{render(self.formula)} {self.rel}_{self.coord} {self.bound}"


@dataclass(frozen=True, eq=False)
class NumericConstraint:
    ineq: LinIneq

    def key(self):
        expr = self.ineq.lhs - self.ineq.rhs
        return ("num", self.ineq.rel, _bound_key(expr))

    def __eq__(self, other):
        return isinstance(other, NumericConstraint) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __str__(self):
        return str(self.ineq)


LukConstraint = Union[LabelledFormula, NumericConstraint]


def _lf(formula: Formula, coord: int, rel: str, bound) -> LabelledFormula:
    if not isinstance(bound, AffineExpr):
        bound = AffineExpr(bound)
    return LabelledFormula(formula, coord, rel, bound)


def _num(lhs, rel, rhs) -> NumericConstraint:
    return NumericConstraint(ineq(lhs, rel, rhs))


@dataclass(frozen=True)
class LukBranch:
    """A saturated branch: accumulated constraints, its root prefix, and the
    (rule, premise) trace that produced it."""

    constraints: tuple[LukConstraint, ...]
    root: tuple[LukConstraint, ...]
    trace: tuple[tuple[str, LukConstraint], ...] = ()


# rule table ------------------------------------------------------------------

_SPLITTING = {
    (And, 1, LEQ),
    (And, 2, GEQ),
    (Or, 1, GEQ),
    (Or, 2, LEQ),
    (Imp, 1, LEQ),
    (Imp, 2, GEQ),
    (WImp, 1, LEQ),
    (WImp, 2, GEQ),
}

_SYMBOL = {Bot: "0", Neg: "!", And: "&", Or: "|", Imp: "->", WImp: "~>"}


def rule_name(item: LabelledFormula) -> str:
    return f"{_SYMBOL[type(item.formula)]}{item.rel}{item.coord}"


def luk_expand(
    item: LabelledFormula, fresh_param
) -> tuple[str, list[list[LukConstraint]]]:
    """Conclusions of the rule matching item: a list of branch options.

    fresh_param() must yield a new parameter variable on each call.
    """
    f, coord, rel, i = item.formula, item.coord, item.rel, item.bound
    name = rule_name(item)

    if isinstance(f, Bot):
        value = ZERO if coord == 1 else ONE
        return name, [[_num(value, rel, i)]]
    if isinstance(f, Neg):
        return name, [[_lf(f.sub, 3 - coord, rel, i)]]
    if isinstance(f, And):
        a, b = f.lhs, f.rhs
        if (coord, rel) in ((1, LEQ), (2, GEQ)):
            return name, [[_lf(a, coord, rel, i)], [_lf(b, coord, rel, i)]]
        return name, [[_lf(a, coord, rel, i), _lf(b, coord, rel, i)]]
    if isinstance(f, Or):
        a, b = f.lhs, f.rhs
        if (coord, rel) in ((1, GEQ), (2, LEQ)):
            return name, [[_lf(a, coord, rel, i)], [_lf(b, coord, rel, i)]]
        return name, [[_lf(a, coord, rel, i), _lf(b, coord, rel, i)]]

    a, b = f.lhs, f.rhs
    j = AffineExpr.of(fresh_param())
    if isinstance(f, Imp) or (isinstance(f, WImp) and coord == 1):
        if coord == 1 and rel == LEQ:
            return name, [
                [_num(1, LEQ, i)],
                [_lf(a, 1, GEQ, 1 - i + j), _lf(b, 1, LEQ, j), _num(j, LEQ, i)],
            ]
        if coord == 1 and rel == GEQ:
            return name, [[_lf(a, 1, LEQ, 1 - i + j), _lf(b, 1, GEQ, j)]]
        if coord == 2 and rel == LEQ:
            return name, [[_lf(a, 2, GEQ, j), _lf(b, 2, LEQ, i + j)]]
        return name, [
            [_num(i, LEQ, 0)],
            [_lf(a, 2, LEQ, j), _lf(b, 2, GEQ, i + j), _num(j, LEQ, 1 - i)],
        ]
    if isinstance(f, WImp):
        if rel == LEQ:
            return name, [[_lf(a, 1, LEQ, i + j), _lf(b, 2, LEQ, 1 - j)]]
        return name, [
            [_num(i, LEQ, 0)],
            [_lf(a, 1, GEQ, i + j), _lf(b, 2, GEQ, 1 - j), _num(j, LEQ, 1 - i)],
        ]
    raise ValueError(f"no rule for {item}")


# translation and closure -----------------------------------------------------


# constraint objects recur in thousands of feasibility calls along a branch;
# caching per instance keeps the produced LinIneq identities stable so the
# integer-row cache underneath can hit as well
_TR_CACHE: dict[int, tuple] = {}
_TR_CACHE_LIMIT = 500_000


def _translate_one(c: LukConstraint) -> LinIneq:
    hit = _TR_CACHE.get(id(c))
    if hit is not None:
        return hit[1]
    if isinstance(c, LabelledFormula):
        var = Var.left(c.formula) if c.coord == 1 else Var.right(c.formula)
        q = ineq(AffineExpr.of(var), c.rel, c.bound)
    else:
        q = c.ineq
    if len(_TR_CACHE) > _TR_CACHE_LIMIT:
        _TR_CACHE.clear()
    _TR_CACHE[id(c)] = (c, q)
    return q


def translate(branch) -> list[LinIneq]:
    """Linear image of a branch: every labelled formula, compound or atomic,
    becomes one inequality on its per-formula variable; numerics pass through."""
    constraints = branch.constraints if isinstance(branch, LukBranch) else branch
    return [_translate_one(c) for c in constraints]


def branch_closed(branch) -> bool:
    return isinstance(fm_feasible(translate(branch)), Unsat)


# saturation ------------------------------------------------------------------


# order in which pending splits are consumed; "fifo" expands the oldest
# pending split, "lifo" the newest
SPLIT_ORDER = "fifo"


class _State:
    __slots__ = (
        "constraints",
        "keys",
        "key_set",
        "ns",
        "ns_idx",
        "sp",
        "sp_done",
        "sp_done_set",
        "counter",
    )

    def __init__(self):
        self.constraints: list[LukConstraint] = []
        self.keys: list = []
        self.key_set: set = set()
        self.ns: list[LabelledFormula] = []
        self.ns_idx = 0
        self.sp: list[LabelledFormula] = []
        # consumed split slots, journalled so release can hand an ancestor's
        # splits back to a sibling branch whatever order they were taken in
        self.sp_done: list[int] = []
        self.sp_done_set: set[int] = set()
        self.counter = 0

    def fresh(self) -> Var:
        v = Var.param(self.counter, "j")
        self.counter += 1
        return v

    def push(self, items: Iterable[LukConstraint]) -> None:
        for c in items:
            k = c.key()
            if k in self.key_set:
                continue
            self.key_set.add(k)
            self.keys.append(k)
            self.constraints.append(c)
            if isinstance(c, LabelledFormula) and not isinstance(c.formula, Atom):
                if (type(c.formula), c.coord, c.rel) in _SPLITTING:
                    self.sp.append(c)
                else:
                    self.ns.append(c)

    def mark(self):
        return (
            len(self.constraints),
            len(self.keys),
            len(self.ns),
            self.ns_idx,
            len(self.sp),
            len(self.sp_done),
        )

    def release(self, mark):
        nc, nk, nns, ns_idx, nsp, nd = mark
        for k in self.keys[nk:]:
            self.key_set.discard(k)
        for i in self.sp_done[nd:]:
            self.sp_done_set.discard(i)
        del self.sp_done[nd:]
        del self.constraints[nc:]
        del self.keys[nk:]
        del self.ns[nns:]
        del self.sp[nsp:]
        self.ns_idx = ns_idx

    def next_nonsplit(self) -> Optional[LabelledFormula]:
        if self.ns_idx < len(self.ns):
            item = self.ns[self.ns_idx]
            self.ns_idx += 1
            return item
        return None

    def next_split(self) -> Optional[LabelledFormula]:
        done = self.sp_done_set
        pick = -1
        if SPLIT_ORDER == "lifo":
            for i in range(len(self.sp) - 1, -1, -1):
                if i not in done:
                    pick = i
                    break
        else:
            for i in range(len(self.sp)):
                if i not in done:
                    pick = i
                    break
        if pick < 0:
            return None
        self.sp_done.append(pick)
        self.sp_done_set.add(pick)
        return self.sp[pick]


def _constant_contradiction(items: Iterable[LukConstraint]) -> Optional[NumericConstraint]:
    for c in items:
        if isinstance(c, NumericConstraint):
            expr = c.ineq.lhs - c.ineq.rhs
            if not expr.terms and (
                expr.constant > 0 or (c.ineq.rel == LT and expr.constant == 0)
            ):
                return c
    return None


def saturate(root: Iterable[LukConstraint]) -> list[LukBranch]:
    """All complete branches of the tableau rooted at the given constraints.

    Pure expansion, no closure pruning; exponential in the number of
    splitting rules, intended for small inputs and tests.  The provers use
    the pruned search in prove_valid/prove_entailment instead.
    """
    root = tuple(root)
    state = _State()
    state.push(root)
    out: list[LukBranch] = []
    trace: list[tuple[str, LukConstraint]] = []

    def walk():
        frame = state.mark()
        tlen = len(trace)
        try:
            while True:
                item = state.next_nonsplit() or state.next_split()
                if item is None:
                    out.append(LukBranch(tuple(state.constraints), root, tuple(trace)))
                    return
                name, options = luk_expand(item, state.fresh)
                trace.append((name, item))
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
class TableauRun:
    closed: bool
    tree: ProofNode
    open_branch: Optional[LukBranch] = None
    open_model: Optional[dict[Var, Fraction]] = None
    open_leaves: Optional[list] = None
    aborted: bool = False
    params_used: int = 0


def _closed_leaf(verdict: Unsat) -> ProofNode:
    return ProofNode(leaf=LeafInfo(closed=True, certificate=certificate_lines(verdict)))


def _row_vars(q: LinIneq) -> set:
    vars_ = set(q.lhs.terms)
    vars_.update(q.rhs.terms)
    return vars_


def _local_subsystem(
    model: dict, full: list[LinIneq], n_added: int
) -> tuple[list[LinIneq], frozenset]:
    """Rows interacting with the freshly added rows, and the variables those
    rows may move.

    Seed variables are the added rows' unvalued variables plus their valued
    low-degree ones; high-degree variables (the root parameters reach almost
    every row through the affine bounds) stay pinned so the subsystem stays
    small.  Single-variable rows on the pinned variables the subsystem
    mentions are kept, since they carry the root bounds.
    """
    deg: dict = {}
    var_rows: dict = {}
    row_vars = []
    for idx, q in enumerate(full):
        vs = _row_vars(q)
        row_vars.append(vs)
        for v in vs:
            deg[v] = deg.get(v, 0) + 1
            var_rows.setdefault(v, []).append(idx)
    cap = max(8, len(full) // 6)
    seeds = set()
    for idx in range(len(full) - n_added, len(full)):
        for v in row_vars[idx]:
            if v not in model or deg[v] <= cap:
                seeds.add(v)
    picked = set(range(len(full) - n_added, len(full)))
    for v in seeds:
        picked.update(var_rows[v])
    boundary = set()
    for idx in picked:
        boundary.update(row_vars[idx] - seeds)
    for v in boundary:
        for idx in var_rows.get(v, ()):
            if len(row_vars[idx]) == 1:
                picked.add(idx)
    sub = [full[i] for i in sorted(picked)]
    return sub, frozenset(seeds)


# independent-part decomposition ----------------------------------------------


# a branching run may notice, before its first split, that the pending work
# falls into groups that can never share a formula variable (disjoint atom
# sets, and expansion only ever touches subformulas).  The groups interact
# only through the parameters already on the branch, so the search runs one
# group alone, projects each of its open leaves onto those parameters, and
# explores the other group against the projected regions disjunctively.
# The switch exists so tests can compare both routes on the same input.
DECOMPOSE = True

# give up on decomposition when the standalone first group is itself large
_PART_LEAF_CAP = 512
_PART_NODE_CAP = 50_000


class _AbortRun(Exception):
    pass


def _subformula_nodes(f: Formula) -> set:
    seen: set = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if g in seen:
            continue
        seen.add(g)
        if isinstance(g, Neg):
            stack.append(g.sub)
        elif isinstance(g, (And, Or, Imp, WImp)):
            stack.append(g.lhs)
            stack.append(g.rhs)
    return seen


_FOOT_CACHE: dict = {}


def _footprint(f: Formula) -> frozenset:
    hit = _FOOT_CACHE.get(f)
    if hit is None:
        hit = frozenset(
            g for g in _subformula_nodes(f) if not isinstance(g, (Bot, Top))
        )
        _FOOT_CACHE[f] = hit
    return hit


def _component_split(state: _State):
    """Partition the current constraints by the formula variables their
    expansions can ever touch.  Returns (group_a, group_b, shared) when the
    pending splits fall into at least two groups, with group_a the smallest
    such group and shared the purely numeric rows, or None otherwise.

    Compound items already expanded on this branch are handed over as their
    translated row wrapped in a numeric constraint, so the sub-searches see
    the row without queueing the item again.  Constants (0, 1) are left out
    of the footprints; their variables count as shared interface, like the
    parameters."""
    if state.ns_idx < len(state.ns):
        return None
    pending = [
        state.sp[i] for i in range(len(state.sp)) if i not in state.sp_done_set
    ]
    if len(pending) < 2:
        return None

    # most nodes have a single pending group; if every item meets the union
    # of the items before it the groups are connected, and the check is one
    # cheap pass over cached footprints
    pfeet = [_footprint(c.formula) for c in pending]
    running = set(pfeet[0])
    connected = True
    for nodes in pfeet[1:]:
        if running.isdisjoint(nodes):
            connected = False
        running.update(nodes)
    if connected:
        return None

    parent: dict = {}

    def find(g):
        r = g
        while parent[r] != r:
            r = parent[r]
        while parent[g] != r:
            parent[g], g = r, parent[g]
        return r

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb

    for nodes in pfeet:
        first = None
        for g in nodes:
            if g not in parent:
                parent[g] = g
            if first is None:
                first = g
            else:
                union(first, g)
    classes = {find(next(iter(nodes))) for nodes in pfeet if nodes}
    if len(classes) < 2:
        return None

    pend_ids = {id(c) for c in pending}

    def rep_of(c) -> Optional[object]:
        if not isinstance(c, LabelledFormula):
            return None
        g = c.formula
        if isinstance(g, (Bot, Top)):
            return None
        if id(c) in pend_ids:
            nodes = _footprint(g)
            if not nodes:
                # a split over constants alone touches only shared variables
                return None
            g = next(iter(nodes))
        if g not in parent:
            parent[g] = g
        return find(g)

    reps = [rep_of(c) for c in state.constraints]
    active: dict = {}
    by_id = {id(c): rep for c, rep in zip(state.constraints, reps)}
    for c in pending:
        rep = by_id[id(c)]
        if rep is not None:
            active[rep] = active.get(rep, 0) + 1
    if len(active) < 2:
        return None
    size: dict = {}
    first_idx: dict = {}
    for i, rep in enumerate(reps):
        if rep is not None:
            size[rep] = size.get(rep, 0) + 1
            if rep not in first_idx:
                first_idx[rep] = i
    a_rep = min(active, key=lambda r: (active[r], size[r], first_idx[r]))

    def carry(c: LukConstraint) -> LukConstraint:
        if (
            isinstance(c, LabelledFormula)
            and not isinstance(c.formula, Atom)
            and id(c) not in pend_ids
        ):
            return NumericConstraint(_translate_one(c))
        return c

    group_a = [
        carry(c) for c, rep in zip(state.constraints, reps) if rep == a_rep
    ]
    group_b = [
        carry(c)
        for c, rep in zip(state.constraints, reps)
        if rep is not None and rep != a_rep
    ]
    shared = [c for c, rep in zip(state.constraints, reps) if rep is None]
    return group_a, group_b, shared


def _interface_vars(constraints: Sequence[LukConstraint]) -> set:
    """Variables both groups may mention: every non-formula variable already
    on the branch, plus the constant formulas' variables."""
    iface: set = set()
    for q in translate(constraints):
        for v in _row_vars(q):
            if v.kind not in (VarKind.FORMULA_LEFT, VarKind.FORMULA_RIGHT):
                iface.add(v)
    for g in (Bot(), Top()):
        iface.add(Var.left(g))
        iface.add(Var.right(g))
    return iface


def _canon_rows(rows: Iterable[LinIneq]) -> frozenset:
    out = set()
    for q in rows:
        e = q.lhs - q.rhs
        out.add((q.rel, e.constant, frozenset(e.terms.items())))
    return frozenset(out)


def _poly_cert(certs) -> list[str]:
    lines: list[str] = []
    for idx, cert in certs:
        lines.append(f"against interface region {idx}:")
        lines.extend("  " + s for s in cert)
    return lines


def _negate(q: LinIneq) -> LinIneq:
    if q.rel == LE:
        return LinIneq(q.rhs, LT, q.lhs)
    return LinIneq(q.rhs, LE, q.lhs)


def _union_cuts(polys: list) -> list[LinIneq]:
    """Planes valid for every region at once: for each interface variable
    and each scaled pairwise sum and difference, the extreme values over
    the regions.  Conjoining them to the other group's rows is sound (any
    joint model lies in some region, hence under every cut) and lets most
    branches close on the ordinary single-system ladder.

    Directions are rescaled into [0,1] because the projection engine keeps
    every variable inside the unit box.  Strict extremes are relaxed to
    weak ones; cuts only ever over-approximate the union."""
    vars_: set = set()
    for rows, _carrier in polys:
        for q in rows:
            vars_.update(_row_vars(q))
    vs = sorted(vars_, key=str)
    half = Fraction(1, 2)
    dirs: list[tuple[dict, Fraction]] = [({v: ONE}, ZERO) for v in vs]
    for i, v in enumerate(vs):
        for u in vs[i + 1 :]:
            dirs.append(({v: half, u: half}, ZERO))
            dirs.append(({v: half, u: -half}, half))
    cuts: list[LinIneq] = []
    for j, (terms, shift) in enumerate(dirs):
        t = Var.param(j, "cut")
        e_t = AffineExpr(ZERO, {t: ONE})
        e_u = AffineExpr(shift, dict(terms))
        tie = [LinIneq(e_t, LE, e_u), LinIneq(e_u, LE, e_t)]
        ulo, uhi = ONE, ZERO
        contributed = False
        for rows, _carrier in polys:
            tag, proj = fm_project(rows + tie, vars_)
            if tag == "unsat":
                continue
            contributed = True
            lo, hi = ZERO, ONE
            for q in proj:
                e = q.lhs - q.rhs
                a = e.terms.get(t)
                if a is None:
                    continue
                if a > 0:
                    hi = min(hi, -e.constant / a)
                else:
                    lo = max(lo, -e.constant / a)
            ulo = min(ulo, lo)
            uhi = max(uhi, hi)
        if not contributed:
            continue
        if uhi < 1:
            cuts.append(ineq(e_u, LE, AffineExpr(uhi)))
        if ulo > 0:
            cuts.append(ineq(AffineExpr(ulo), LE, e_u))
    return cuts


def _prune_regions(polys: list) -> list:
    """Drop any region contained in a kept one; the union is unchanged, so
    both closure (refute every region) and openness (a witness region) are
    preserved.  Weakest regions (fewest rows) are kept first."""
    order = sorted(range(len(polys)), key=lambda i: (len(polys[i][0]), i))
    kept: list = []
    for i in order:
        rows_i = polys[i][0]
        contained = False
        for rows_j, _carrier in kept:
            inside = True
            for q in rows_j:
                if not isinstance(fm_feasible(rows_i + [_negate(q)]), Unsat):
                    inside = False
                    break
            if inside:
                contained = True
                break
        if not contained:
            kept.append(polys[i])
    return kept


@dataclass
class _ConstrainedRun:
    closed: bool
    tree: ProofNode
    open_branch: Optional[LukBranch] = None
    open_model: Optional[dict] = None
    witness: int = -1


def _run_constrained(
    root: Iterable[LukConstraint], polys: list, counter_start: int, iface
) -> _ConstrainedRun:
    """Branching search whose closure test is disjunctive: a branch stays
    open while its rows are satisfiable together with at least one of the
    polygon systems (each a projection of the other group's open leaf onto
    the interface variables), and closes when every polygon refutes it.

    The ladder mirrors the main search: cheap model extension against the
    witness polygon first, then a float screen whose "unsat" answers are
    confirmed exactly on the named rows and whose "sat" answers only let
    the branch continue provisionally.  Every closure rests on an exact
    refutation of each living polygon, and a completed branch re-verifies
    its model exactly before it counts as open."""
    root = tuple(root)
    iface_free = frozenset(iface)
    state = _State()
    state.counter = counter_start
    state.push(root)
    # the caller's run already applied every non-splitting rule to the root
    state.ns_idx = len(state.ns)
    result: list = []
    trace: list[tuple[str, LukConstraint]] = []

    def settle(alive, w, model, prov, added, full, exact_only=False):
        """Find a polygon the branch can continue under, witness first.
        The interface variables were pinned by an earlier extension, so a
        failed fast path is retried with only those variables released
        before any float work.  Polygons are discarded only on exact
        refutation; the unchecked tail stays alive.  Returns
        (alive, witness, model, provisional, None) or
        (None, -1, None, False, refutations)."""
        order = [w] + [i for i in alive if i != w]
        certs = []
        for pos, idx in enumerate(order):
            left = [idx] + order[pos + 1 :]
            rows_p = polys[idx][0]
            m = extend_model(model, added + rows_p)
            if m is not None:
                return left, idx, m, prov, None
            fullw = full + rows_p
            m = extend_model(model, fullw, free=iface_free)
            if m is not None:
                return left, idx, m, False, None
            probe = lp_probe(fullw)
            if probe is not None and probe[0] == "unsat":
                verdict = fm_feasible(probe[1])
                if isinstance(verdict, Unsat):
                    certs.append((idx, certificate_lines(verdict)))
                    continue
            elif probe is not None and probe[0] == "sat" and not exact_only:
                return left, idx, dict(model), True, None
            verdict = fm_feasible(fullw)
            if isinstance(verdict, Sat):
                return left, idx, verdict.model, False, None
            certs.append((idx, certificate_lines(verdict)))
        return None, -1, None, False, certs

    def explore(alive: list, w: int, model: dict, prov: bool, checked: int):
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
                item = state.next_nonsplit()
                if item is None:
                    break
                name, options = luk_expand(item, state.fresh)
                attach(ProofNode(rule=name, premise=item))
                trace.append((name, item))
                state.push(options[0])
                bad = _constant_contradiction(options[0])
                if bad is not None:
                    attach(
                        ProofNode(
                            leaf=LeafInfo(
                                closed=True,
                                certificate=[f"contradiction: {bad}"],
                            )
                        )
                    )
                    return head, True

            if len(state.constraints) > checked:
                added = translate(state.constraints[checked:])
                m = extend_model(model, added + polys[w][0])
                if m is not None:
                    model = m
                else:
                    full = translate(state.constraints)
                    # the interface values inherited from the root solve may
                    # just sit badly for the new rows; re-solve them against
                    # the whole system before any heavier machinery
                    m = extend_model(model, full + polys[w][0], free=iface_free)
                    if m is not None:
                        model = m
                        prov = False
                    else:
                        # when the rows alone contradict, close without
                        # touching the polygons at all
                        probe = lp_probe(full)
                        if probe is not None and probe[0] == "unsat":
                            verdict = fm_feasible(probe[1])
                            if isinstance(verdict, Unsat):
                                attach(_closed_leaf(verdict))
                                return head, True
                        alive, w, model, prov, certs = settle(
                            alive, w, model, prov, added, full
                        )
                        if alive is None:
                            attach(
                                ProofNode(
                                    leaf=LeafInfo(
                                        closed=True, certificate=_poly_cert(certs)
                                    )
                                )
                            )
                            return head, True
                checked = len(state.constraints)

            item = state.next_split()
            if item is None:
                whole = translate(state.constraints)
                final = extend_model(model, whole + polys[w][0])
                if final is None:
                    alive, w, final, _prov, certs = settle(
                        alive, w, model, prov, whole, whole, exact_only=True
                    )
                    if alive is None:
                        attach(
                            ProofNode(
                                leaf=LeafInfo(
                                    closed=True, certificate=_poly_cert(certs)
                                )
                            )
                        )
                        return head, True
                branch = LukBranch(tuple(state.constraints), root, tuple(trace))
                result.append((branch, final, w))
                attach(ProofNode(leaf=LeafInfo(closed=False)))
                return head, False

            name, options = luk_expand(item, state.fresh)
            split = attach(ProofNode(rule=name, premise=item))
            trace.append((name, item))
            all_closed = True
            for option in options:
                inner = state.mark()
                state.push(option)
                sub, sub_closed = explore(alive, w, model, prov, checked)
                split.children.append(sub)
                if not sub_closed:
                    all_closed = False
                state.release(inner)
                if result:
                    return head, False
            return head, all_closed
        finally:
            state.release(frame)
            del trace[tlen:]

    rows0 = translate(state.constraints)
    alive0, w0, model0, prov0, certs = settle(
        list(range(len(polys))), 0, {}, False, rows0, rows0
    )
    if alive0 is None:
        leaf = ProofNode(leaf=LeafInfo(closed=True, certificate=_poly_cert(certs)))
        return _ConstrainedRun(True, leaf)
    tree, closed = explore(alive0, w0, model0, prov0, len(state.constraints))
    if result:
        branch, model, w = result[0]
        return _ConstrainedRun(False, tree, branch, model, w)
    return _ConstrainedRun(closed, tree)


def _paired_run(
    parts, root, prefix, parent_trace, counter: int, found: list
):
    """Drive the two-group search: enumerate the smaller group's open
    leaves, project them onto the interface, then run the larger group
    against the projections.  Returns (tree, closed) or None to fall back
    to the ordinary product search."""
    group_a, group_b, shared = parts
    run_a = run_branching(
        shared + group_a,
        counter_start=counter,
        collect_all=True,
        leaf_cap=_PART_LEAF_CAP,
        node_cap=_PART_NODE_CAP,
        decompose=False,
    )
    if run_a.aborted:
        return None
    part_node = ProofNode(rule="independent parts", premise=None)
    part_node.children.append(run_a.tree)
    if run_a.closed:
        return part_node, True
    iface = _interface_vars(shared + group_a + group_b)
    polys: list = []
    seen: set = set()
    for branch, _model in run_a.open_leaves:
        rows = translate(branch.constraints)
        vs: set = set()
        for q in rows:
            vs.update(_row_vars(q))
        tag, proj = fm_project(rows, vs - iface)
        if tag == "unsat":
            continue
        key = _canon_rows(proj)
        if key in seen:
            continue
        seen.add(key)
        polys.append((proj, branch))
    if not polys:
        return part_node, True
    polys = _prune_regions(polys)
    cuts = [NumericConstraint(q) for q in _union_cuts(polys)]
    run_b = _run_constrained(
        shared + group_b + cuts, polys, run_a.params_used, iface
    )
    part_node.children.append(run_b.tree)
    if run_b.closed:
        return part_node, True
    a_branch = polys[run_b.witness][1]
    full = extend_model(run_b.open_model, translate(a_branch.constraints))
    if full is not None:
        # the expanded items carried over as bare rows have vacuous
        # variables of their own; value those too
        full = extend_model(full, translate(prefix))
    if full is None:
        raise ExtractionError("interface model failed to extend over the paired part")
    combined = list(prefix)
    keys = {c.key() for c in combined}
    for c in a_branch.constraints + run_b.open_branch.constraints:
        k = c.key()
        if k not in keys:
            keys.add(k)
            combined.append(c)
    branch = LukBranch(
        tuple(combined),
        root,
        parent_trace + a_branch.trace + run_b.open_branch.trace,
    )
    found.append((branch, full))
    return part_node, False


def run_branching(
    root: Iterable[LukConstraint],
    *,
    counter_start: int = 0,
    collect_all: bool = False,
    leaf_cap: Optional[int] = None,
    node_cap: Optional[int] = None,
    skip_root_nonsplits: bool = False,
    decompose: bool = True,
    guide: Optional[dict] = None,
) -> TableauRun:
    """Depth-first expansion with infeasibility pruning at splits.

    Each node first applies every pending non-splitting rule (scanning new
    constant inequalities as they land), then checks the rows added since
    the last exact feasibility check: the inherited satisfying assignment
    is extended over them where possible, and a full Fourier-Motzkin run
    happens only when that extension fails.  A completed branch therefore
    always carries a model that satisfies every constraint, and an open
    complete branch stops the search with that model.

    collect_all keeps searching past open branches and returns every open
    leaf; the caps bound that enumeration and mark the run aborted when
    exceeded.  skip_root_nonsplits declares the root already saturated
    under the non-splitting rules, as when it came off another branch.

    guide is an optional variable assignment believed to satisfy an open
    completion (typically read off a grid-search countermodel).  It seeds
    the working model and, at each split, the option consistent with the
    working model is explored first.  Order never affects which branches
    close, so a wrong or stale guide costs time, not correctness.
    """
    root = tuple(root)
    state = _State()
    state.counter = counter_start
    state.push(root)
    if skip_root_nonsplits:
        state.ns_idx = len(state.ns)
    found: list = []
    trace: list[tuple[str, LukConstraint]] = []
    nodes_seen = [0]

    def explore(model: dict, checked: int) -> tuple[ProofNode, bool]:
        nodes_seen[0] += 1
        if node_cap is not None and nodes_seen[0] > node_cap:
            raise _AbortRun()
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
                item = state.next_nonsplit()
                if item is None:
                    break
                name, options = luk_expand(item, state.fresh)
                attach(ProofNode(rule=name, premise=item))
                trace.append((name, item))
                state.push(options[0])
                bad = _constant_contradiction(options[0])
                if bad is not None:
                    attach(
                        ProofNode(
                            leaf=LeafInfo(
                                closed=True,
                                certificate=[f"contradiction: {bad}"],
                            )
                        )
                    )
                    return head, True

            if len(state.constraints) > checked:
                n_added = len(state.constraints) - checked
                added = translate(state.constraints[checked:])
                extended = extend_model(model, added)
                if extended is None and guide is not None:
                    # along the guided branch every formula variable can keep
                    # its witness value and only the parameters need a joint
                    # re-solve; off the guided branch this fails fast
                    extended = extend_model(guide, translate(state.constraints))
                if extended is None:
                    full = translate(state.constraints)
                    sub, seeds = _local_subsystem(model, full, n_added)
                    if len(sub) < (4 * len(full)) // 5:
                        # revise only the variables near the new rows; when
                        # even the unpinned local subsystem is infeasible
                        # the branch closes outright on that subsystem
                        extended = extend_model(model, sub, seeds)
                        if extended is None:
                            verdict = fm_feasible(sub)
                            if isinstance(verdict, Unsat):
                                attach(_closed_leaf(verdict))
                                return head, True
                    if extended is None:
                        # a float screen suggests the likely answer; "unsat"
                        # names a handful of rows that only an exact solve of
                        # them may close, "sat" lets the branch continue on
                        # the inherited model provisionally (completions
                        # re-verify with exact arithmetic), and any doubt
                        # falls through to the full exact solve
                        probe = lp_probe(full)
                        if probe is not None and probe[0] == "unsat":
                            verdict = fm_feasible(probe[1])
                            if isinstance(verdict, Unsat):
                                attach(_closed_leaf(verdict))
                                return head, True
                        elif probe is not None and probe[0] == "sat":
                            extended = dict(model)
                    if extended is None:
                        verdict = fm_feasible(full)
                        if isinstance(verdict, Unsat):
                            attach(_closed_leaf(verdict))
                            return head, True
                        extended = verdict.model
                model = extended
                checked = len(state.constraints)

            if decompose and DECOMPOSE and not collect_all:
                parts = _component_split(state)
                if parts is not None:
                    done = _paired_run(
                        parts,
                        root,
                        tuple(state.constraints),
                        tuple(trace),
                        state.counter,
                        found,
                    )
                    if done is not None:
                        node, closed = done
                        attach(node)
                        return head, closed

            item = state.next_split()
            if item is None:
                # the carried model may be provisional after a float-screen
                # continuation; an open verdict must rest on exact arithmetic
                whole = translate(state.constraints)
                final = extend_model(model, whole)
                if final is None:
                    verdict = fm_feasible(whole)
                    if isinstance(verdict, Unsat):
                        attach(_closed_leaf(verdict))
                        return head, True
                    final = verdict.model
                branch = LukBranch(tuple(state.constraints), root, tuple(trace))
                found.append((branch, final))
                if (
                    collect_all
                    and leaf_cap is not None
                    and len(found) > leaf_cap
                ):
                    raise _AbortRun()
                attach(ProofNode(leaf=LeafInfo(closed=False)))
                return head, False

            name, options = luk_expand(item, state.fresh)
            split = attach(ProofNode(rule=name, premise=item))
            trace.append((name, item))
            if guide is not None and len(options) > 1:
                options = sorted(
                    options,
                    key=lambda opt: extend_model(model, translate(opt)) is None,
                )
            all_closed = True
            for option in options:
                inner = state.mark()
                state.push(option)
                sub, sub_closed = explore(model, checked)
                split.children.append(sub)
                if not sub_closed:
                    all_closed = False
                state.release(inner)
                if found and not collect_all:
                    return head, False
            return head, all_closed
        finally:
            state.release(frame)
            del trace[tlen:]

    try:
        tree, closed = explore(dict(guide) if guide else {}, 0)
    except _AbortRun:
        return TableauRun(
            False, ProofNode(leaf=LeafInfo(closed=False)), aborted=True
        )
    run = TableauRun(closed, tree, params_used=state.counter)
    if found:
        run.open_branch, run.open_model = found[0]
        run.closed = False
    if collect_all:
        run.open_leaves = found
    return run


# linear (non-branching) mode -------------------------------------------------


def _def_or(a: Formula, b: Formula) -> Formula:
    return Imp(Imp(a, b), b)


def _def_and(a: Formula, b: Formula) -> Formula:
    return Imp(_def_or(Imp(a, Bot()), Imp(b, Bot())), Bot())


def lattice_free(f: Formula) -> Formula:
    """Rewrite And/Or through -> and 0; value-preserving in the strong
    implication logics (not in the weak ones, which keep their lattice
    connectives in linear mode)."""
    if isinstance(f, (Atom, Bot, Top)):
        return f
    if isinstance(f, Neg):
        return Neg(lattice_free(f.sub))
    a, b = lattice_free(f.lhs), lattice_free(f.rhs)
    if isinstance(f, And):
        return _def_and(a, b)
    if isinstance(f, Or):
        return _def_or(a, b)
    return type(f)(a, b)


def luk_expand_linear(
    item: LabelledFormula, fresh_param, fresh_binary
) -> tuple[str, list[LukConstraint]]:
    """Single-conclusion variant of the splitting rules; non-splitting rules
    are unchanged.  Each split is absorbed by a fresh binary variable y:
    value 0 selects the main conclusion, 1 the side condition."""
    f, coord, rel, i = item.formula, item.coord, item.rel, item.bound
    if (type(f), coord, rel) not in _SPLITTING:
        name, options = luk_expand(item, fresh_param)
        return name, options[0]
    name = rule_name(item) + " [linear]"
    y = AffineExpr.of(fresh_binary())
    a, b = f.lhs, f.rhs
    if isinstance(f, (Imp, WImp)):
        j = AffineExpr.of(fresh_param())
        if coord == 1:
            return name, [
                _lf(a, 1, GEQ, 1 - i + j - y),
                _lf(b, 1, LEQ, j + y),
                _num(y, LEQ, i),
                _num(j, LEQ, i),
            ]
        if isinstance(f, Imp):
            return name, [
                _lf(a, 2, LEQ, j + y),
                _lf(b, 2, GEQ, i + j - y),
                _num(y, LEQ, 1 - i),
                _num(j, LEQ, 1 - i),
            ]
        return name, [
            _lf(a, 1, GEQ, i + j - y),
            _lf(b, 2, GEQ, 1 - j - y),
            _num(y, LEQ, 1 - i),
            _num(j, LEQ, 1 - i),
        ]
    if isinstance(f, And):
        if (coord, rel) == (1, LEQ):
            return name, [_lf(a, 1, LEQ, i + y), _lf(b, 1, LEQ, i + 1 - y)]
        return name, [_lf(a, 2, GEQ, i - y), _lf(b, 2, GEQ, i - 1 + y)]
    if (coord, rel) == (1, GEQ):
        return name, [_lf(a, 1, GEQ, i - y), _lf(b, 1, GEQ, i - 1 + y)]
    return name, [_lf(a, 2, LEQ, i + y), _lf(b, 2, LEQ, i + 1 - y)]


@dataclass(frozen=True)
class LinearBranch:
    constraints: tuple[LukConstraint, ...]
    root: tuple[LukConstraint, ...]
    binaries: tuple[Var, ...]
    trace: tuple[tuple[str, LukConstraint], ...] = ()


def saturate_linear(
    root: Iterable[LukConstraint], logic: LogicId
) -> LinearBranch:
    """Exhaustive non-branching expansion; returns the single branch and its
    binary variables.  Lattice connectives are assumed already rewritten for
    the strong-implication logics (prove_* handles that)."""
    if logic.base is not LogicBase.LUK:
        raise ValueError("linear saturation applies to the Lukasiewicz logics")
    root = tuple(root)
    state = _State()
    state.push(root)
    binaries: list[Var] = []
    bcounter = [0]

    def fresh_binary() -> Var:
        v = Var.binary(bcounter[0])
        bcounter[0] += 1
        binaries.append(v)
        return v

    trace: list[tuple[str, LukConstraint]] = []
    while True:
        item = state.next_nonsplit() or state.next_split()
        if item is None:
            break
        name, conclusion = luk_expand_linear(item, state.fresh, fresh_binary)
        trace.append((name, item))
        state.push(conclusion)
    return LinearBranch(tuple(state.constraints), root, tuple(binaries), tuple(trace))


def run_linear(root: Iterable[LukConstraint], logic: LogicId) -> TableauRun:
    branch = saturate_linear(root, logic)
    system = translate(branch.constraints)
    verdict = feasible_with_binaries(system, None, branch.binaries)
    chain = ProofNode(rule="linear saturation", premise=None)
    if isinstance(verdict, Unsat):
        chain.children.append(_closed_leaf(verdict))
        return TableauRun(True, chain)
    open_branch = LukBranch(branch.constraints, branch.root, branch.trace)
    chain.children.append(ProofNode(leaf=LeafInfo(closed=False)))
    return TableauRun(False, chain, open_branch, verdict.model)


# provers ---------------------------------------------------------------------


class ExtractionError(RuntimeError):
    """A countermodel failed its exact re-check; indicates a rule bug."""


def _valuation_from_model(
    model: dict[Var, Fraction], names: Iterable[str]
) -> dict[str, TruthPair]:
    out = {}
    for name in names:
        pos = model.get(Var.left(Atom(name)), ZERO)
        neg = model.get(Var.right(Atom(name)), ZERO)
        out[name] = TruthPair(pos, neg)
    return out


def _check_root(
    branch: LukBranch, model: dict[Var, Fraction], v: dict[str, TruthPair], logic: LogicId
) -> None:
    for c in branch.root:
        if isinstance(c, LabelledFormula):
            pair = evaluate(c.formula, v, logic)
            value = pair.pos if c.coord == 1 else pair.neg
            bound = c.bound.evaluate(model)
            ok = value <= bound if c.rel == LEQ else value >= bound
            if not ok:
                raise ExtractionError(f"countermodel violates root constraint {c}")


def extract_countermodel(branch: LukBranch, logic: LogicId) -> dict[str, TruthPair]:
    """Read a valuation off an open complete branch.

    The satisfying model of the translated system, restricted to the atomic
    formula variables, is the countermodel; atoms never constrained default
    to (0,0).  The result is re-checked against every root constraint.
    """
    verdict = fm_feasible(translate(branch))
    if not isinstance(verdict, Sat):
        raise ValueError("branch is closed; no countermodel to extract")
    names = sorted(
        {
            g.name
            for c in branch.constraints
            if isinstance(c, LabelledFormula)
            for g in [c.formula]
            if isinstance(g, Atom)
        }
    )
    v = _valuation_from_model(verdict.model, names)
    _check_root(branch, verdict.model, v, logic)
    return v


def _roots_valid(f: Formula, d: Filter) -> tuple[list[LukConstraint], list[LukConstraint]]:
    c = AffineExpr.of(Var.param(0, "c"))
    dv = AffineExpr.of(Var.param(0, "d"))
    pos_root = [_lf(f, 1, LEQ, c), NumericConstraint(ineq(c, LT, AffineExpr(d.x)))]
    neg_root = [_lf(f, 2, GEQ, dv), NumericConstraint(ineq(AffineExpr(d.y), LT, dv))]
    return pos_root, neg_root


def _run(
    root: list[LukConstraint], logic: LogicId, mode: str, guide: Optional[dict] = None
) -> TableauRun:
    if mode == "branching":
        return run_branching(root, guide=guide)
    if mode == "linear":
        return run_linear(root, logic)
    raise ValueError(f"unknown mode {mode!r}; use 'branching' or 'linear'")


def _witness_hint(f: Formula, d: Filter, logic: LogicId):
    """A quick grid hunt for a non-designated valuation, used only to steer
    branch order toward an open completion; a miss changes nothing and a
    hit never decides the verdict by itself."""
    from .formulas import atoms as _atoms
    from .oracles import luk_refuter

    n_atoms = len(_atoms(f))
    if n_atoms > 4:
        return None
    size = len(_subformula_nodes(f))
    for den in (2, 3, 4):
        # the sweep evaluates every node on the whole grid at once; skip
        # denominators whose grid would not fit comfortably in memory
        if (den + 1) ** (2 * n_atoms) * size > 20_000_000:
            break
        try:
            v = luk_refuter(f, d, logic, den)
        except ValueError:
            return None
        if v is not None:
            return v
    return None


def _guide_from_valuation(
    f: Formula, v: dict[str, TruthPair], logic: LogicId
) -> dict[Var, Fraction]:
    guide: dict[Var, Fraction] = {}
    for g in _subformula_nodes(f):
        pair = evaluate(g, v, logic)
        guide[Var.left(g)] = pair.pos
        guide[Var.right(g)] = pair.neg
    return guide


def _atom_names(*formulas: Formula) -> list[str]:
    from .formulas import atoms as _atoms

    names: set[str] = set()
    for f in formulas:
        names.update(_atoms(f))
    return sorted(names)


def prove_valid(
    f: Formula, d: Filter, logic: LogicId, mode: str = "branching"
) -> Verdict:
    """Valid iff both the positive and the negative tableau close.

    Invalid verdicts carry a countermodel extracted from the first open
    complete branch and re-checked to be non-designated, exactly.
    """
    validate_signature(f, logic)
    check_filter(d, logic)
    if logic.base is not LogicBase.LUK:
        raise ValueError("prove_valid here covers the Lukasiewicz logics only")
    query = f
    if mode == "linear" and logic.impl_kind is ImplKind.ARROW:
        query = lattice_free(f)
    names = _atom_names(f)
    pos_root, neg_root = _roots_valid(query, d)
    guide_pos = guide_neg = None
    if mode == "branching":
        wit = _witness_hint(query, d, logic)
        if wit is not None:
            pair = evaluate(query, wit, logic)
            hint = _guide_from_valuation(query, wit, logic)
            if pair.pos < d.x:
                guide_pos = hint
            if pair.neg > d.y:
                guide_neg = hint
    sides = [(pos_root, guide_pos), (neg_root, guide_neg)]
    if guide_neg is not None and guide_pos is None:
        # an open branch ends the search, so try the side the witness
        # already breaks before the one it satisfies
        sides.reverse()
    trees = {}
    for root, hint in sides:
        run = _run(root, logic, mode, hint)
        if not run.closed:
            v = _valuation_from_model(run.open_model, names)
            _check_root(run.open_branch, run.open_model, v, logic)
            if is_designated(evaluate(f, v, logic), d):
                raise ExtractionError("extracted countermodel is designated")
            return Invalid(v)
        trees[id(root)] = run.tree
    return Valid((trees[id(pos_root)], trees[id(neg_root)]))


def prove_entailment(
    gamma: Iterable[Formula],
    f: Formula,
    d: Filter,
    logic: LogicId,
    mode: str = "branching",
) -> Verdict:
    """Entailed iff both tableaux over the premise constraints close.

    The premise constraints pin every g in gamma inside the filter
    ({g >=_1 x, g <=_2 y}); the two tableaux then bound the conclusion
    outside it, on each side."""
    gamma = list(gamma)
    for g in gamma:
        validate_signature(g, logic)
    validate_signature(f, logic)
    check_filter(d, logic)
    if logic.base is not LogicBase.LUK:
        raise ValueError("prove_entailment here covers the Lukasiewicz logics only")
    gq, fq = gamma, f
    if mode == "linear" and logic.impl_kind is ImplKind.ARROW:
        gq = [lattice_free(g) for g in gamma]
        fq = lattice_free(f)
    premises: list[LukConstraint] = []
    for g in gq:
        premises.append(_lf(g, 1, GEQ, d.x))
        premises.append(_lf(g, 2, LEQ, d.y))
    pos_root, neg_root = _roots_valid(fq, d)
    names = _atom_names(f, *gamma)
    trees = []
    for root in (pos_root, neg_root):
        run = _run(premises + root, logic, mode)
        if not run.closed:
            v = _valuation_from_model(run.open_model, names)
            _check_root(run.open_branch, run.open_model, v, logic)
            for g in gamma:
                if not is_designated(evaluate(g, v, logic), d):
                    raise ExtractionError("countermodel drops a premise")
            if is_designated(evaluate(f, v, logic), d):
                raise ExtractionError("countermodel designates the conclusion")
            return Invalid(v)
        trees.append(run.tree)
    return Valid(tuple(trees))
