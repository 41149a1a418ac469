"""Exact feasibility for strict/weak linear inequalities over [0,1] variables.

Systems are decided by Fourier-Motzkin elimination over fractions.Fraction.
Every variable carries implicit bounds 0 <= v <= 1, added explicitly before
elimination.  Combining a strict with a weak inequality yields a strict one.
Unsat verdicts carry the elimination ancestry of the contradictory constant
inequality, so certificates can be replayed; Sat models are re-checked
against the original system before being returned.

An optional mode assigns {0,1} values to designated binary variables by
depth-first enumeration, pruning with the continuous relaxation.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Mapping, Optional, Sequence, Union

from .formulas import Formula, render

ZERO = Fraction(0)
ONE = Fraction(1)


class VarKind(enum.Enum):
    FORMULA_LEFT = "L"
    FORMULA_RIGHT = "R"
    PARAM = "param"
    BINARY = "binary"


@dataclass(frozen=True, slots=True)
class Var:
    kind: VarKind
    key: object
    label: str = ""

    @staticmethod
    def left(f: Formula) -> "Var":
        return Var(VarKind.FORMULA_LEFT, f)

    @staticmethod
    def right(f: Formula) -> "Var":
        return Var(VarKind.FORMULA_RIGHT, f)

    @staticmethod
    def param(index: int, label: str = "t") -> "Var":
        return Var(VarKind.PARAM, index, label)

    @staticmethod
    def binary(index: int, label: str = "y") -> "Var":
        return Var(VarKind.BINARY, index, label)

    def __str__(self) -> str:
        if self.kind is VarKind.FORMULA_LEFT:
            return f"L[{render(self.key)}]"
        if self.kind is VarKind.FORMULA_RIGHT:
            return f"R[{render(self.key)}]"
        return f"{self.label}{self.key}"


class AffineExpr:
    """constant + sum(coeff * var); exact, zero coefficients dropped."""

    __slots__ = ("constant", "terms")

    def __init__(self, constant=ZERO, terms: Optional[Mapping[Var, Fraction]] = None):
        self.constant = Fraction(constant)
        self.terms: dict[Var, Fraction] = {}
        if terms:
            for v, c in terms.items():
                c = Fraction(c)
                if c != 0:
                    self.terms[v] = c

    @staticmethod
    def const(value) -> "AffineExpr":
        return AffineExpr(value)

    @staticmethod
    def of(var: Var, coeff=ONE) -> "AffineExpr":
        return AffineExpr(ZERO, {var: Fraction(coeff)})

    def __add__(self, other: Union["AffineExpr", int, Fraction]) -> "AffineExpr":
        if not isinstance(other, AffineExpr):
            return AffineExpr(self.constant + Fraction(other), self.terms)
        terms = dict(self.terms)
        for v, c in other.terms.items():
            terms[v] = terms.get(v, ZERO) + c
        return AffineExpr(self.constant + other.constant, terms)

    __radd__ = __add__

    def __neg__(self) -> "AffineExpr":
        return AffineExpr(-self.constant, {v: -c for v, c in self.terms.items()})

    def __sub__(self, other) -> "AffineExpr":
        if not isinstance(other, AffineExpr):
            return AffineExpr(self.constant - Fraction(other), self.terms)
        return self + (-other)

    def __rsub__(self, other) -> "AffineExpr":
        return (-self) + other

    def __mul__(self, scalar) -> "AffineExpr":
        s = Fraction(scalar)
        return AffineExpr(self.constant * s, {v: c * s for v, c in self.terms.items()})

    __rmul__ = __mul__

    def evaluate(self, model: Mapping[Var, Fraction]) -> Fraction:
        total = self.constant
        for v, c in self.terms.items():
            total += c * model[v]
        return total

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, AffineExpr)
            and self.constant == other.constant
            and self.terms == other.terms
        )

    def __str__(self) -> str:
        parts = []
        for v, c in sorted(self.terms.items(), key=lambda t: str(t[0])):
            if c == 1:
                parts.append(f"+ {v}")
            elif c == -1:
                parts.append(f"- {v}")
            elif c < 0:
                parts.append(f"- {-c}*{v}")
            else:
                parts.append(f"+ {c}*{v}")
        if self.constant != 0 or not parts:
            parts.append(f"+ {self.constant}" if self.constant >= 0 else f"- {-self.constant}")
        text = " ".join(parts)
        return text[2:] if text.startswith("+ ") else text

    __repr__ = __str__


LE = "<="
LT = "<"


@dataclass(frozen=True)
class LinIneq:
    lhs: AffineExpr
    rel: str
    rhs: AffineExpr

    def __post_init__(self):
        if self.rel not in (LE, LT):
            raise ValueError(f"relation must be {LE!r} or {LT!r}, got {self.rel!r}")

    def __str__(self) -> str:
        return f"{self.lhs} {self.rel} {self.rhs}"


def ineq(lhs, rel: str, rhs) -> LinIneq:
    """Build lhs rel rhs, coercing rationals to constant expressions."""
    if not isinstance(lhs, AffineExpr):
        lhs = AffineExpr(lhs)
    if not isinstance(rhs, AffineExpr):
        rhs = AffineExpr(rhs)
    if rel in (">=", ">"):
        lhs, rhs = rhs, lhs
        rel = LE if rel == ">=" else LT
    return LinIneq(lhs, rel, rhs)


class _Node:
    """One inequality sum(terms) + const (<= | <) 0, with its ancestry."""

    __slots__ = ("terms", "const", "strict", "how", "parents", "info")

    def __init__(self, terms, const, strict, how, parents=(), info=None):
        self.terms = terms
        self.const = const
        self.strict = strict
        self.how = how
        self.parents = parents
        self.info = info

    def contradictory(self) -> bool:
        if self.terms:
            return False
        return self.const > 0 or (self.strict and self.const == 0)

    def render(self) -> str:
        expr = AffineExpr(self.const, self.terms)
        rel = LT if self.strict else LE
        return f"{expr} {rel} 0"


@dataclass
class Sat:
    model: dict[Var, Fraction]


@dataclass
class Unsat:
    node: Optional[_Node] = None
    cases: Sequence[tuple[dict[Var, int], "Unsat"]] = ()


Feasibility = Union[Sat, Unsat]


def _normalize(q: LinIneq) -> _Node:
    expr = q.lhs - q.rhs
    return _Node(dict(expr.terms), expr.constant, q.rel == LT, "input", (), q)


class _IRow:
    """Integer-scaled inequality sum(terms) + const (<= | <) 0.

    Variables are interned as small integers so the elimination loop hashes
    and compares plain ints.  Rows are gcd-reduced after every combination
    to keep coefficients small; key is the canonical left-hand side used
    for tightest-row deduplication.
    """

    __slots__ = ("terms", "const", "strict", "how", "parents", "info", "key")

    def __init__(self, terms, const, strict, how, parents=(), info=None, key=None):
        self.terms = terms
        self.const = const
        self.strict = strict
        self.how = how
        self.parents = parents
        self.info = info
        self.key = key if key is not None else tuple(sorted(terms.items()))

    def contradictory(self) -> bool:
        if self.terms:
            return False
        return self.const > 0 or (self.strict and self.const == 0)


# variables interned once per process; rows cached per LinIneq instance (the
# cache holds a strong reference, so an id cannot be reused while its entry
# is alive)
_VAR_IDS: dict[Var, int] = {}
_VAR_ORDER: list[Var] = []
_ROW_CACHE: dict[int, tuple] = {}
_ROW_CACHE_LIMIT = 500_000


def _vid(v: Var) -> int:
    k = _VAR_IDS.get(v)
    if k is None:
        k = len(_VAR_ORDER)
        _VAR_IDS[v] = k
        _VAR_ORDER.append(v)
    return k


def _int_row(q: LinIneq) -> tuple:
    """(terms, const, strict, key) with integer coefficients, gcd-reduced."""
    hit = _ROW_CACHE.get(id(q))
    if hit is not None:
        return hit[1], hit[2], hit[3], hit[4]
    n = _normalize(q)
    denom = n.const.denominator
    for c in n.terms.values():
        denom = lcm(denom, c.denominator)
    terms = {_vid(v): int(c * denom) for v, c in n.terms.items()}
    const = int(n.const * denom)
    g = gcd(const, *terms.values())
    if g > 1:
        terms = {k: c // g for k, c in terms.items()}
        const //= g
    key = tuple(sorted(terms.items()))
    if len(_ROW_CACHE) > _ROW_CACHE_LIMIT:
        _ROW_CACHE.clear()
    _ROW_CACHE[id(q)] = (q, terms, const, q.rel == LT, key)
    return terms, const, q.rel == LT, key


def _publish(row: _IRow) -> _Node:
    """Convert an integer ancestry DAG back to Var-keyed certificate nodes."""
    memo: dict[int, _Node] = {}

    def convert(r: _IRow) -> _Node:
        done = memo.get(id(r))
        if done is not None:
            return done
        parents = tuple(convert(p) for p in r.parents)
        terms = {_VAR_ORDER[k]: Fraction(c) for k, c in r.terms.items()}
        if r.how == "combine":
            info = _VAR_ORDER[r.info]
        elif r.how == "bound":
            info = (_VAR_ORDER[r.info[0]], r.info[1])
        else:
            info = r.info
        node = _Node(terms, Fraction(r.const), r.strict, r.how, parents, info)
        memo[id(r)] = node
        return node

    return convert(row)


def fm_feasible(
    system: Iterable[LinIneq], variables: Optional[Iterable[Var]] = None
) -> Feasibility:
    """Decide the system plus implicit bounds 0 <= v <= 1 on every variable.

    Single-variable rows are folded into per-variable intervals instead of
    joining the combination pipeline; multi-variable rows are eliminated
    fewest-products-first, and the Sat witness is built by midpoint
    back-substitution.  Binary-kind variables are not allowed here (see
    feasible_with_binaries).
    """
    original = [q if isinstance(q, LinIneq) else q for q in system]

    # bnd[k] = [lo_val, lo_strict, lo_row, hi_val, hi_strict, hi_row] with
    # None rows standing for the implicit 0 <= k <= 1 bounds
    bnd: dict[int, list] = {}

    def touch(k: int) -> list:
        b = bnd.get(k)
        if b is None:
            b = [ZERO, False, None, ONE, False, None]
            bnd[k] = b
        return b

    def default_lo(k: int) -> _IRow:
        return _IRow({k: -1}, 0, False, "bound", (), (k, "lo"), ((k, -1),))

    def default_hi(k: int) -> _IRow:
        return _IRow({k: 1}, -1, False, "bound", (), (k, "hi"), ((k, 1),))

    def clash(lo_row: Optional[_IRow], hi_row: Optional[_IRow], k: int) -> _IRow:
        lo_row = lo_row if lo_row is not None else default_lo(k)
        hi_row = hi_row if hi_row is not None else default_hi(k)
        beta = -lo_row.terms[k]
        alpha = hi_row.terms[k]
        return _IRow(
            {},
            lo_row.const * alpha + hi_row.const * beta,
            lo_row.strict or hi_row.strict,
            "combine",
            (lo_row, hi_row),
            k,
        )

    def fold(row: _IRow) -> Optional[_IRow]:
        """Tighten the interval of the row's single variable; returns a
        contradiction row when the interval empties."""
        ((k, a),) = row.terms.items()
        b = touch(k)
        if a > 0:
            val = Fraction(-row.const, a)
            if val < b[3] or (val == b[3] and row.strict and not b[4]):
                b[3], b[4], b[5] = val, row.strict, row
        else:
            val = Fraction(row.const, -a)
            if val > b[0] or (val == b[0] and row.strict and not b[1]):
                b[0], b[1], b[2] = val, row.strict, row
        if b[0] > b[3] or (b[0] == b[3] and (b[1] or b[4])):
            return clash(b[2], b[5], k)
        return None

    rows: list[_IRow] = []
    checks: list[tuple] = []
    occurring: set[int] = set()
    for q in original:
        terms, const, strict, key = _int_row(q)
        occurring.update(terms)
        checks.append((terms, const, strict, q))
        row = _IRow(terms, const, strict, "input", (), q, key)
        if len(terms) > 1:
            rows.append(row)
        elif terms:
            bad = fold(row)
            if bad is not None:
                return Unsat(_publish(bad))
        elif row.contradictory():
            return Unsat(_publish(row))
    if variables is not None:
        for v in variables:
            occurring.add(_vid(v))
    for k in occurring:
        if _VAR_ORDER[k].kind is VarKind.BINARY:
            raise ValueError("binary variables require feasible_with_binaries")
        touch(k)

    eliminated: list[tuple[int, list[_IRow], list[_IRow]]] = []
    remaining = set(occurring)
    while rows:
        present: set[int] = set()
        for r in rows:
            present.update(r.terms)
        pos = dict.fromkeys(present, 0)
        neg = dict.fromkeys(present, 0)
        for r in rows:
            for k, c in r.terms.items():
                if c > 0:
                    pos[k] += 1
                else:
                    neg[k] += 1
        target = min(present, key=lambda k: ((pos[k] + 1) * (neg[k] + 1), k))
        remaining.discard(target)

        lowers, uppers, rest = [], [], []
        for r in rows:
            c = r.terms.get(target)
            if c is None:
                rest.append(r)
            elif c < 0:
                lowers.append(r)
            else:
                uppers.append(r)
        b = touch(target)
        lowers.append(b[2] if b[2] is not None else default_lo(target))
        uppers.append(b[5] if b[5] is not None else default_hi(target))
        eliminated.append((target, lowers, uppers))

        # identical left-hand sides: keep the tightest (largest const; strict
        # wins ties); a larger const means a smaller right-hand bound here.
        # Entries are (const, strict, payload); surviving fresh combinations
        # only become _IRow objects after the round
        best: dict[tuple, tuple] = {}
        for r in rest:
            cur = best.get(r.key)
            if (
                cur is None
                or r.const > cur[0]
                or (r.const == cur[0] and r.strict and not cur[1])
            ):
                best[r.key] = (r.const, r.strict, r)
        up_data = []
        for up in uppers:
            up_data.append(
                (
                    up,
                    up.terms[target],
                    [(k, c) for k, c in up.terms.items() if k != target],
                )
            )
        for lo in lowers:
            beta = -lo.terms[target]
            lo_items = [(k, c) for k, c in lo.terms.items() if k != target]
            lo_const = lo.const
            lo_strict = lo.strict
            for up, alpha, up_items in up_data:
                terms = {k: c * alpha for k, c in lo_items}
                get = terms.get
                for k, c in up_items:
                    acc = get(k, 0) + c * beta
                    if acc:
                        terms[k] = acc
                    else:
                        terms.pop(k, None)
                const = lo_const * alpha + up.const * beta
                strict = lo_strict or up.strict
                if not terms:
                    if const > 0 or (strict and const == 0):
                        row = _IRow({}, const, strict, "combine", (lo, up), target)
                        return Unsat(_publish(row))
                    continue
                # interval redundancy: a row that cannot be violated anywhere
                # inside the current variable intervals is implied by the
                # interval rows and adds nothing to the projection
                worst = Fraction(const)
                for k, c in terms.items():
                    b2 = bnd[k]
                    worst += c * (b2[3] if c > 0 else b2[0])
                if worst < 0 or (worst == 0 and not strict):
                    continue
                g = gcd(const, *terms.values())
                if g > 1:
                    terms = {k: c // g for k, c in terms.items()}
                    const //= g
                if len(terms) == 1:
                    row = _IRow(terms, const, strict, "combine", (lo, up), target)
                    bad = fold(row)
                    if bad is not None:
                        return Unsat(_publish(bad))
                    continue
                key = tuple(sorted(terms.items()))
                cur = best.get(key)
                if (
                    cur is None
                    or const > cur[0]
                    or (const == cur[0] and strict and not cur[1])
                ):
                    best[key] = (const, strict, (terms, lo, up))
        rows = []
        for key, (const, strict, payload) in best.items():
            if type(payload) is _IRow:
                rows.append(payload)
            else:
                terms, lo, up = payload
                rows.append(
                    _IRow(terms, const, strict, "combine", (lo, up), target, key)
                )

    values: dict[int, Fraction] = {}
    # variables never pulled into a combination keep only their interval;
    # any point of it completes a model, the midpoint is used
    for k in remaining:
        b = touch(k)
        lo_val, hi_val = b[0], b[3]
        values[k] = lo_val if lo_val == hi_val else (lo_val + hi_val) / 2
    for target, lowers, uppers in reversed(eliminated):
        lo_val, lo_strict = ZERO, False
        for r in lowers:
            beta = -r.terms[target]
            acc = ZERO
            for k, c in r.terms.items():
                if k != target:
                    acc += c * values[k]
            value = (r.const + acc) / beta
            if value > lo_val or (value == lo_val and r.strict):
                lo_val, lo_strict = value, r.strict
        hi_val = ONE
        for r in uppers:
            alpha = r.terms[target]
            acc = ZERO
            for k, c in r.terms.items():
                if k != target:
                    acc += c * values[k]
            value = -(r.const + acc) / alpha
            if value < hi_val:
                hi_val = value
        values[target] = lo_val if lo_val == hi_val else (lo_val + hi_val) / 2

    for terms, const, strict, q in checks:
        total = Fraction(const)
        for k, c in terms.items():
            total += c * values[k]
        ok = total < 0 if strict else total <= 0
        if not ok:
            raise AssertionError(f"extracted model violates {q}")
    for k in occurring:
        if not ZERO <= values[k] <= ONE:
            raise AssertionError(f"extracted model leaves [0,1] on {_VAR_ORDER[k]}")
    return Sat({_VAR_ORDER[k]: value for k, value in values.items()})


_SCIPY: Optional[tuple] = None


def _scipy() -> tuple:
    global _SCIPY
    if _SCIPY is None:
        try:
            import numpy
            from scipy.optimize import linprog

            _SCIPY = (numpy, linprog)
        except Exception:
            _SCIPY = ()
    return _SCIPY


def lp_probe(system: Iterable[LinIneq]):
    """Float screen for a system under the implicit [0,1] bounds.

    Solves a phase-1 linear program minimising one shared slack.  Returns
    ("unsat", rows) where rows is the small subsystem named by the dual
    solution, ("sat", floats) with a float point keeping a margin on every
    row, or None when the solver is missing or the outcome is too close to
    call.  Neither answer is trusted: callers must confirm "unsat" by an
    exact solve of the returned rows and "sat" via snap_model.
    """
    pack = _scipy()
    if not pack:
        return None
    np, linprog = pack
    original = list(system)
    m = len(original)
    if m == 0:
        return ("sat", {})
    cols: dict[int, int] = {}
    packed = []
    for q in original:
        terms, const, strict, _key = _int_row(q)
        packed.append((terms, const, strict))
        for k in terms:
            if k not in cols:
                cols[k] = len(cols)
    n = len(cols)
    # weak rows forming an equality pair, or pinning a variable at a native
    # bound, are necessarily tight at every solution; they carry no slack so
    # the margin is measured only where the system has freedom
    by_key: dict[tuple, int] = {}
    for i, (terms, const, strict) in enumerate(packed):
        if not strict:
            by_key[tuple(sorted(terms.items())) + (const,)] = i
    exempt = [False] * m
    for i, (terms, const, strict) in enumerate(packed):
        if strict:
            continue
        if len(terms) == 1:
            ((_k, c),) = terms.items()
            if const == 0 or const == -c:
                exempt[i] = True
                continue
        j = by_key.get(tuple(sorted((k, -c) for k, c in terms.items())) + (-const,))
        if j is not None:
            exempt[i] = True
            exempt[j] = True
    a = np.zeros((m, n + 1))
    b = np.zeros(m)
    for i, (terms, const, strict) in enumerate(packed):
        scale = float(max(1, abs(const), *(abs(c) for c in terms.values()))) if terms else float(max(1, abs(const)))
        for k, c in terms.items():
            a[i, cols[k]] = c / scale
        rhs = -const / scale
        if strict:
            # large enough that infeasibility driven purely by strictness
            # still shows up as positive slack at float tolerance
            rhs -= 1e-4
        if not exempt[i]:
            a[i, n] = -1.0
        b[i] = rhs
    cost = np.zeros(n + 1)
    cost[n] = 1.0
    # the slack may go negative: minimising it then maximises the margin on
    # the non-exempt rows, so feasible systems yield a point with room to
    # spare instead of a degenerate boundary vertex
    bounds = [(0.0, 1.0)] * n + [(-1.0, None)]
    res = linprog(cost, A_ub=a, b_ub=b, bounds=bounds, method="highs")
    if res.status != 0 or res.x is None:
        return None
    slack = float(res.x[n])
    if slack > 1e-6:
        dual = getattr(getattr(res, "ineqlin", None), "marginals", None)
        if dual is None:
            return None
        picked = [original[i] for i in range(m) if abs(dual[i]) > 1e-9]
        if not picked or len(picked) == m:
            return None
        return ("unsat", picked)
    if slack < -1e-6:
        inverse = {ci: k for k, ci in cols.items()}
        return ("sat", {inverse[ci]: float(res.x[ci]) for ci in range(n)})
    return None


def fm_project(system: Iterable[LinIneq], drop: Iterable[Var]):
    """Eliminate the given variables exactly under the implicit [0,1] bounds.

    Returns ("rows", projected) where the projected inequalities over the
    remaining variables have exactly the solutions that extend over the
    dropped variables, or ("unsat", verdict) when the system itself is
    infeasible.  Used to reduce a subsystem to its footprint on shared
    variables so independent parts can be recombined cheaply.
    """
    original = list(system)
    dropped: set[int] = {_vid(v) for v in drop}

    bnd: dict[int, list] = {}

    def touch(k: int) -> list:
        b = bnd.get(k)
        if b is None:
            b = [ZERO, False, None, ONE, False, None]
            bnd[k] = b
        return b

    def default_lo(k: int) -> _IRow:
        return _IRow({k: -1}, 0, False, "bound", (), (k, "lo"), ((k, -1),))

    def default_hi(k: int) -> _IRow:
        return _IRow({k: 1}, -1, False, "bound", (), (k, "hi"), ((k, 1),))

    def clash(lo_row: Optional[_IRow], hi_row: Optional[_IRow], k: int) -> _IRow:
        lo_row = lo_row if lo_row is not None else default_lo(k)
        hi_row = hi_row if hi_row is not None else default_hi(k)
        beta = -lo_row.terms[k]
        alpha = hi_row.terms[k]
        return _IRow(
            {},
            lo_row.const * alpha + hi_row.const * beta,
            lo_row.strict or hi_row.strict,
            "combine",
            (lo_row, hi_row),
            k,
        )

    def fold(row: _IRow) -> Optional[_IRow]:
        ((k, a),) = row.terms.items()
        b = touch(k)
        if a > 0:
            val = Fraction(-row.const, a)
            if val < b[3] or (val == b[3] and row.strict and not b[4]):
                b[3], b[4], b[5] = val, row.strict, row
        else:
            val = Fraction(row.const, -a)
            if val > b[0] or (val == b[0] and row.strict and not b[1]):
                b[0], b[1], b[2] = val, row.strict, row
        if b[0] > b[3] or (b[0] == b[3] and (b[1] or b[4])):
            return clash(b[2], b[5], k)
        return None

    rows: list[_IRow] = []
    occurring: set[int] = set()
    for q in original:
        terms, const, strict, key = _int_row(q)
        occurring.update(terms)
        row = _IRow(terms, const, strict, "input", (), q, key)
        if len(terms) > 1:
            rows.append(row)
        elif terms:
            bad = fold(row)
            if bad is not None:
                return ("unsat", Unsat(_publish(bad)))
        elif row.contradictory():
            return ("unsat", Unsat(_publish(row)))
    for k in occurring:
        touch(k)

    while True:
        present: set[int] = set()
        for r in rows:
            present.update(r.terms)
        targets = present & dropped
        if not targets:
            break
        pos = dict.fromkeys(targets, 0)
        neg = dict.fromkeys(targets, 0)
        for r in rows:
            for k, c in r.terms.items():
                if k in pos:
                    if c > 0:
                        pos[k] += 1
                    else:
                        neg[k] += 1
        target = min(targets, key=lambda k: ((pos[k] + 1) * (neg[k] + 1), k))

        lowers, uppers, rest = [], [], []
        for r in rows:
            c = r.terms.get(target)
            if c is None:
                rest.append(r)
            elif c < 0:
                lowers.append(r)
            else:
                uppers.append(r)
        b = touch(target)
        lowers.append(b[2] if b[2] is not None else default_lo(target))
        uppers.append(b[5] if b[5] is not None else default_hi(target))

        best: dict[tuple, tuple] = {}
        for r in rest:
            cur = best.get(r.key)
            if (
                cur is None
                or r.const > cur[0]
                or (r.const == cur[0] and r.strict and not cur[1])
            ):
                best[r.key] = (r.const, r.strict, r)
        up_data = [
            (
                up,
                up.terms[target],
                [(k, c) for k, c in up.terms.items() if k != target],
            )
            for up in uppers
        ]
        for lo in lowers:
            beta = -lo.terms[target]
            lo_items = [(k, c) for k, c in lo.terms.items() if k != target]
            lo_const = lo.const
            lo_strict = lo.strict
            for up, alpha, up_items in up_data:
                terms = {k: c * alpha for k, c in lo_items}
                get = terms.get
                for k, c in up_items:
                    acc = get(k, 0) + c * beta
                    if acc:
                        terms[k] = acc
                    else:
                        terms.pop(k, None)
                const = lo_const * alpha + up.const * beta
                strict = lo_strict or up.strict
                if not terms:
                    if const > 0 or (strict and const == 0):
                        row = _IRow({}, const, strict, "combine", (lo, up), target)
                        return ("unsat", Unsat(_publish(row)))
                    continue
                worst = Fraction(const)
                for k, c in terms.items():
                    b2 = touch(k)
                    worst += c * (b2[3] if c > 0 else b2[0])
                if worst < 0 or (worst == 0 and not strict):
                    continue
                g = gcd(const, *terms.values())
                if g > 1:
                    terms = {k: c // g for k, c in terms.items()}
                    const //= g
                if len(terms) == 1:
                    row = _IRow(terms, const, strict, "combine", (lo, up), target)
                    bad = fold(row)
                    if bad is not None:
                        return ("unsat", Unsat(_publish(bad)))
                    continue
                key = tuple(sorted(terms.items()))
                cur = best.get(key)
                if (
                    cur is None
                    or const > cur[0]
                    or (const == cur[0] and strict and not cur[1])
                ):
                    best[key] = (const, strict, (terms, lo, up))
        rows = []
        for key, (const, strict, payload) in best.items():
            if type(payload) is _IRow:
                rows.append(payload)
            else:
                terms, lo, up = payload
                rows.append(
                    _IRow(terms, const, strict, "combine", (lo, up), target, key)
                )

    out: list[LinIneq] = []
    for r in rows:
        terms = {_VAR_ORDER[k]: Fraction(c) for k, c in r.terms.items()}
        out.append(
            LinIneq(
                AffineExpr(Fraction(r.const), terms),
                LT if r.strict else LE,
                AffineExpr(),
            )
        )
    for k in sorted(bnd):
        if k in dropped:
            continue
        lo_val, lo_s, _lo_row, hi_val, hi_s, _hi_row = bnd[k]
        v = _VAR_ORDER[k]
        if lo_val > 0 or lo_s:
            out.append(
                LinIneq(
                    AffineExpr(lo_val, {v: Fraction(-1)}),
                    LT if lo_s else LE,
                    AffineExpr(),
                )
            )
        if hi_val < 1 or hi_s:
            out.append(
                LinIneq(
                    AffineExpr(-hi_val, {v: Fraction(1)}),
                    LT if hi_s else LE,
                    AffineExpr(),
                )
            )
    return ("rows", out)


def snap_model(floats: dict, system: Iterable[LinIneq]) -> Optional[dict]:
    """Round a float point to rationals and verify it exactly; None if no
    rounding level satisfies every row of the system."""
    packed = []
    for q in system:
        terms, const, strict, _key = _int_row(q)
        packed.append((terms, const, strict))
    for den in (64, 46080, 1 << 20):
        cand: dict[int, Fraction] = {}
        for k, x in floats.items():
            f = Fraction(x).limit_denominator(den)
            if f < ZERO:
                f = ZERO
            elif f > ONE:
                f = ONE
            cand[k] = f
        ok = True
        for terms, const, strict in packed:
            total = Fraction(const)
            for k, c in terms.items():
                total += c * cand[k]
            if total > 0 or (strict and total == 0):
                ok = False
                break
        if ok:
            return {_VAR_ORDER[k]: v for k, v in cand.items()}
    return None


def extend_model(
    model: Mapping[Var, Fraction],
    system: Iterable[LinIneq],
    free: frozenset = frozenset(),
    report: Optional[list] = None,
) -> Optional[dict[Var, Fraction]]:
    """Extend a satisfying assignment to additional inequalities.

    Variables the model already values are fixed, except those listed in
    free; the residual system over the unfixed variables is solved exactly.
    Returns the merged model, or None when no extension exists with the
    fixed variables pinned (the full system may still be feasible by
    moving them).  When a report list is given, the input rows that drove
    the failure are appended to it, so callers can retry with the pinned
    variables of those rows freed.
    """
    residual: list[LinIneq] = []
    sources: dict[int, LinIneq] = {}
    for q in system:
        expr = q.lhs - q.rhs
        const = expr.constant
        terms: dict[Var, Fraction] = {}
        for v, c in expr.terms.items():
            val = model.get(v)
            if val is None or v in free:
                terms[v] = c
            else:
                const += c * val
        if not terms:
            if const > 0 or (q.rel == LT and const == 0):
                if report is not None:
                    report.append(q)
                return None
            continue
        part = LinIneq(AffineExpr(const, terms), q.rel, AffineExpr())
        sources[id(part)] = q
        residual.append(part)
    if not residual:
        return dict(model)
    verdict = fm_feasible(residual)
    if isinstance(verdict, Unsat):
        if report is not None:
            stack = [verdict.node]
            seen: set[int] = set()
            while stack:
                n = stack.pop()
                if id(n) in seen:
                    continue
                seen.add(id(n))
                if n.how == "input":
                    src = sources.get(id(n.info))
                    if src is not None:
                        report.append(src)
                stack.extend(n.parents)
        return None
    merged = dict(model)
    merged.update(verdict.model)
    return merged


def feasible_with_binaries(
    system: Iterable[LinIneq],
    variables: Optional[Iterable[Var]] = None,
    binaries: Iterable[Var] = (),
) -> Feasibility:
    """Depth-first {0,1} assignment over binaries, pruned by relaxation.

    A continuous relaxation (binaries ranging over [0,1]) that is already
    infeasible rules out the whole subtree.
    """
    binaries = list(dict.fromkeys(binaries))
    for b in binaries:
        if b.kind is not VarKind.BINARY:
            raise ValueError(f"{b} is not a binary variable")
    system = list(system)
    variables = list(variables) if variables is not None else None

    def substituted(assignment: dict[Var, int]) -> list[LinIneq]:
        out = []
        for q in system:
            lhs, rhs = q.lhs, q.rhs
            for b, val in assignment.items():
                if b in lhs.terms or b in rhs.terms:
                    lhs = _plug(lhs, b, val)
                    rhs = _plug(rhs, b, val)
            out.append(LinIneq(lhs, q.rel, rhs))
        return out

    def relax_vars(assignment):
        if variables is None:
            return None
        keep = [v for v in variables if v not in assignment]
        return [
            Var(VarKind.PARAM, ("relaxed", v.key), v.label) if v.kind is VarKind.BINARY else v
            for v in keep
        ]

    def descend(idx: int, assignment: dict[Var, int]):
        sub = substituted(assignment)
        relaxed = [
            LinIneq(_relax(q.lhs), q.rel, _relax(q.rhs)) for q in sub
        ]
        verdict = fm_feasible(relaxed, relax_vars(assignment))
        if isinstance(verdict, Unsat):
            return verdict
        if idx == len(binaries):
            exact = fm_feasible(sub, [v for v in (variables or []) if v not in assignment])
            if isinstance(exact, Sat):
                model = dict(exact.model)
                for b, val in assignment.items():
                    model[b] = Fraction(val)
                return Sat(model)
            return exact
        failures = []
        for val in (0, 1):
            assignment[binaries[idx]] = val
            result = descend(idx + 1, assignment)
            if isinstance(result, Sat):
                del assignment[binaries[idx]]
                return result
            failures.append(({**assignment}, result))
            del assignment[binaries[idx]]
        return Unsat(None, failures)

    def _plug(expr: AffineExpr, b: Var, val: int) -> AffineExpr:
        if b not in expr.terms:
            return expr
        terms = {v: c for v, c in expr.terms.items() if v is not b and v != b}
        return AffineExpr(expr.constant + expr.terms[b] * val, terms)

    def _relax(expr: AffineExpr) -> AffineExpr:
        terms = {}
        for v, c in expr.terms.items():
            if v.kind is VarKind.BINARY:
                terms[Var(VarKind.PARAM, ("relaxed", v.key), v.label)] = c
            else:
                terms[v] = c
        return AffineExpr(expr.constant, terms)

    return descend(0, {})


# -- certificates ------------------------------------------------------------


def certificate_lines(unsat: Unsat) -> list[str]:
    """Human-readable elimination trace ending in the contradiction."""
    if unsat.node is None and unsat.cases:
        lines = ["all binary assignments infeasible:"]
        for assignment, sub in unsat.cases:
            desc = ", ".join(f"{b}={v}" for b, v in assignment.items()) or "(root)"
            lines.append(f"  case {desc}:")
            lines.extend("    " + l for l in certificate_lines(sub))
        return lines

    steps: list[_Node] = []
    seen_ids = set()

    def visit(n: _Node):
        if id(n) in seen_ids:
            return
        seen_ids.add(id(n))
        for p in n.parents:
            visit(p)
        steps.append(n)

    visit(unsat.node)
    lines = []
    for n in steps:
        if n.how == "input":
            lines.append(f"given   {n.render()}    [{n.info}]")
        elif n.how == "bound":
            v, side = n.info
            lines.append(f"bound   {n.render()}    [{side} of {v}]")
        else:
            lines.append(f"combine {n.render()}    [eliminating {n.info}]")
    lines.append(f"contradiction: {unsat.node.render()}")
    return lines


def replay_certificate(unsat: Unsat) -> bool:
    """Recompute the trace arithmetic from its leaves; True iff it really
    derives a contradictory constant inequality by valid combinations."""
    if unsat.node is None:
        return bool(unsat.cases) and all(
            replay_certificate(sub) for _, sub in unsat.cases
        )

    def rebuild(n: _Node) -> tuple[dict[Var, Fraction], Fraction, bool]:
        if n.how in ("input", "bound"):
            return dict(n.terms), n.const, n.strict
        lo, up = n.parents
        lt, lc, ls = rebuild(lo)
        ut, uc, us = rebuild(up)
        target = n.info
        beta, alpha = -lt[target], ut[target]
        if beta <= 0 or alpha <= 0:
            raise AssertionError("combination signs are wrong")
        terms: dict[Var, Fraction] = {}
        for v, c in lt.items():
            if v != target:
                terms[v] = terms.get(v, ZERO) + c * alpha
        for v, c in ut.items():
            if v != target:
                terms[v] = terms.get(v, ZERO) + c * beta
        terms = {v: c for v, c in terms.items() if c != 0}
        return terms, lc * alpha + uc * beta, ls or us

    terms, const, strict = rebuild(unsat.node)
    return not terms and (const > 0 or (strict and const == 0))
