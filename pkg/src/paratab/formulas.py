"""Formula syntax for the four two-dimensional fuzzy logics.

The logics come in two families, Lukasiewicz-valued and Goedel-valued, each
available with a strong implication ``->`` or a weak implication ``~>``:

============  =============================================
logic name    primitive connectives
============  =============================================
luk-arrow     0, !, &, |, ->
luk-warrow    0, !, &, |, ~>
godel-arrow   0, 1, !, &, |, ->, -<
godel-warrow  0, 1, !, &, |, ~>
============  =============================================

``!`` is the involutive (coordinate-swapping) negation, ``-<`` the
coimplication.  Strong negation ``~``, the strong conjunction ``*`` and the
biconditional ``<->`` are parse-time sugar expanded into implication trees.

Formulas are immutable trees; structural equality (and the cached hash) is the
identity used downstream to index constraint variables, so two occurrences of
one subformula always share a variable.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterator, Union


class LogicBase(enum.Enum):
    LUK = "luk"
    GODEL = "godel"


class ImplKind(enum.Enum):
    ARROW = "arrow"
    WARROW = "warrow"


@dataclass(frozen=True)
class LogicId:
    base: LogicBase
    impl_kind: ImplKind

    @property
    def name(self) -> str:
        return f"{self.base.value}-{self.impl_kind.value}"

    @staticmethod
    def from_name(name: str) -> "LogicId":
        try:
            base_s, kind_s = name.split("-")
            return LogicId(LogicBase(base_s), ImplKind(kind_s))
        except ValueError:
            raise ValueError(
                f"unknown logic {name!r}; expected one of "
                "luk-arrow, luk-warrow, godel-arrow, godel-warrow"
            ) from None


LUK_ARROW = LogicId(LogicBase.LUK, ImplKind.ARROW)
LUK_WARROW = LogicId(LogicBase.LUK, ImplKind.WARROW)
GODEL_ARROW = LogicId(LogicBase.GODEL, ImplKind.ARROW)
GODEL_WARROW = LogicId(LogicBase.GODEL, ImplKind.WARROW)

ALL_LOGICS = (LUK_ARROW, LUK_WARROW, GODEL_ARROW, GODEL_WARROW)


@dataclass(frozen=True)
class Bot:
    _h: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_h", hash("Bot"))

    def __hash__(self):
        return self._h


@dataclass(frozen=True)
class Top:
    _h: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_h", hash("Top"))

    def __hash__(self):
        return self._h


@dataclass(frozen=True)
class Atom:
    name: str
    _h: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_h", hash(("Atom", self.name)))

    def __hash__(self):
        return self._h


@dataclass(frozen=True)
class Neg:
    sub: "Formula"
    _h: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_h", hash(("Neg", self.sub)))

    def __hash__(self):
        return self._h


def _binary(tag: str):
    def post_init(self):
        object.__setattr__(self, "_h", hash((tag, self.lhs, self.rhs)))

    return post_init


@dataclass(frozen=True)
class And:
    lhs: "Formula"
    rhs: "Formula"
    _h: int = field(init=False, repr=False, compare=False)

    __post_init__ = _binary("And")

    def __hash__(self):
        return self._h


@dataclass(frozen=True)
class Or:
    lhs: "Formula"
    rhs: "Formula"
    _h: int = field(init=False, repr=False, compare=False)

    __post_init__ = _binary("Or")

    def __hash__(self):
        return self._h


@dataclass(frozen=True)
class Imp:
    lhs: "Formula"
    rhs: "Formula"
    _h: int = field(init=False, repr=False, compare=False)

    __post_init__ = _binary("Imp")

    def __hash__(self):
        return self._h


@dataclass(frozen=True)
class CoImp:
    lhs: "Formula"
    rhs: "Formula"
    _h: int = field(init=False, repr=False, compare=False)

    __post_init__ = _binary("CoImp")

    def __hash__(self):
        return self._h


@dataclass(frozen=True)
class WImp:
    lhs: "Formula"
    rhs: "Formula"
    _h: int = field(init=False, repr=False, compare=False)

    __post_init__ = _binary("WImp")

    def __hash__(self):
        return self._h


Formula = Union[Bot, Top, Atom, Neg, And, Or, Imp, CoImp, WImp]

BOT = Bot()
TOP = Top()

_BINARY_NODES = (And, Or, Imp, CoImp, WImp)


def subformulas(f: Formula) -> Iterator[Formula]:
    """Yield every subformula of f exactly once (post-order, deduplicated)."""
    seen = set()
    stack = [(f, False)]
    while stack:
        node, expanded = stack.pop()
        if node in seen:
            continue
        if expanded:
            seen.add(node)
            yield node
        else:
            stack.append((node, True))
            if isinstance(node, Neg):
                stack.append((node.sub, False))
            elif isinstance(node, _BINARY_NODES):
                stack.append((node.rhs, False))
                stack.append((node.lhs, False))


def atoms(f: Formula) -> list[str]:
    """Sorted atom names occurring in f."""
    return sorted({g.name for g in subformulas(f) if isinstance(g, Atom)})


def connective_count(f: Formula) -> int:
    """Number of connective occurrences (constants and atoms not counted).

    Counts occurrences in the tree, not distinct subformulas.
    """
    if isinstance(f, (Bot, Top, Atom)):
        return 0
    if isinstance(f, Neg):
        return 1 + connective_count(f.sub)
    return 1 + connective_count(f.lhs) + connective_count(f.rhs)


def depth(f: Formula) -> int:
    """Height of the tree; constants and atoms sit at depth 0."""
    if isinstance(f, (Bot, Top, Atom)):
        return 0
    if isinstance(f, Neg):
        return 1 + depth(f.sub)
    return 1 + max(depth(f.lhs), depth(f.rhs))


class SignatureError(ValueError):
    """A connective outside the declared logic's signature."""


def validate_signature(f: Formula, logic: LogicId) -> None:
    """Raise SignatureError unless every connective of f is primitive in logic."""
    for g in subformulas(f):
        if isinstance(g, Top) and logic.base is not LogicBase.GODEL:
            raise SignatureError(f"constant 1 is not in the {logic.name} signature")
        if isinstance(g, CoImp) and logic != GODEL_ARROW:
            raise SignatureError(f"coimplication -< is not in the {logic.name} signature")
        if isinstance(g, Imp) and logic.impl_kind is not ImplKind.ARROW:
            raise SignatureError(f"strong implication -> is not in the {logic.name} signature")
        if isinstance(g, WImp) and logic.impl_kind is not ImplKind.WARROW:
            raise SignatureError(f"weak implication ~> is not in the {logic.name} signature")


# -- derived connectives -----------------------------------------------------


def strong_neg(f: Formula) -> Formula:
    """~f, defined as f -> 0."""
    return Imp(f, BOT)


def weak_neg(f: Formula) -> Formula:
    """Weak negation, f ~> 0."""
    return WImp(f, BOT)


def odot(a: Formula, b: Formula) -> Formula:
    """Strong conjunction a * b, defined as ~(a -> ~b), fully expanded."""
    return Imp(Imp(a, Imp(b, BOT)), BOT)


def biimp(a: Formula, b: Formula) -> Formula:
    """Biconditional a <-> b, defined as (a -> b) * (b -> a), fully expanded."""
    return odot(Imp(a, b), Imp(b, a))


def expand_derived(f: Formula) -> Formula:
    """Identity on primitive formulas.

    Sugar is expanded during parsing, so a Formula never contains derived
    connectives; this exists so callers holding parser output can assert that.
    Expanding twice equals expanding once.
    """
    return f


# -- parser ------------------------------------------------------------------


class ParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


_TWO_CHAR = {"->": "->", "~>": "~>", "-<": "-<"}
_IMPL_OPS = ("->", "~>", "-<", "<->")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    toks = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if text.startswith("<->", i):
            toks.append(("op", "<->", i))
            i += 3
        elif text[i : i + 2] in _TWO_CHAR:
            toks.append(("op", text[i : i + 2], i))
            i += 2
        elif c in "!~&|*()":
            toks.append(("op", c, i))
            i += 1
        elif c in "01":
            toks.append(("const", c, i))
            i += 1
        elif "a" <= c <= "z" or "A" <= c <= "Z":
            j = i + 1
            while j < n and (
                "a" <= text[j] <= "z"
                or "A" <= text[j] <= "Z"
                or "0" <= text[j] <= "9"
                or text[j] == "_"
            ):
                j += 1
            toks.append(("atom", text[i:j], i))
            i = j
        else:
            raise ParseError(f"unexpected character {c!r}", i)
    toks.append(("end", "", n))
    return toks


class _Parser:
    """Recursive descent over the precedence ladder.

    Tightest first: prefix ! and ~; then & and * (one left-associative
    level); then |; then the implication level.  At the implication level
    -> and ~> associate to the right, -< to the left, <-> does not chain,
    and mixing different implication operators requires parentheses.
    """

    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.toks[self.pos]

    def take(self):
        t = self.toks[self.pos]
        self.pos += 1
        return t

    def parse(self) -> Formula:
        f = self.implication()
        kind, val, at = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected {val!r}", at)
        return f

    def implication(self) -> Formula:
        left = self.disjunction()
        kind, op, at = self.peek()
        if kind != "op" or op not in _IMPL_OPS:
            return left
        self.take()
        if op == "-<":
            node = CoImp(left, self.disjunction())
            while True:
                kind, nxt, at = self.peek()
                if kind == "op" and nxt == "-<":
                    self.take()
                    node = CoImp(node, self.disjunction())
                elif kind == "op" and nxt in _IMPL_OPS:
                    raise ParseError(
                        f"mixed implication chain: parenthesize before {nxt!r}", at
                    )
                else:
                    return node
        if op == "<->":
            right = self.disjunction()
            kind, nxt, at = self.peek()
            if kind == "op" and nxt in _IMPL_OPS:
                raise ParseError("<-> does not chain: parenthesize", at)
            return biimp(left, right)
        # -> and ~> recurse to the right
        right = self.implication_tail(op)
        return (Imp if op == "->" else WImp)(left, right)

    def implication_tail(self, op: str) -> Formula:
        operand = self.disjunction()
        kind, nxt, at = self.peek()
        if kind != "op" or nxt not in _IMPL_OPS:
            return operand
        if nxt != op:
            raise ParseError(
                f"mixed implication chain: parenthesize before {nxt!r}", at
            )
        self.take()
        rest = self.implication_tail(op)
        return (Imp if op == "->" else WImp)(operand, rest)

    def disjunction(self) -> Formula:
        node = self.conjunction()
        while True:
            kind, op, _ = self.peek()
            if kind == "op" and op == "|":
                self.take()
                node = Or(node, self.conjunction())
            else:
                return node

    def conjunction(self) -> Formula:
        node = self.unary()
        while True:
            kind, op, _ = self.peek()
            if kind == "op" and op == "&":
                self.take()
                node = And(node, self.unary())
            elif kind == "op" and op == "*":
                self.take()
                node = odot(node, self.unary())
            else:
                return node

    def unary(self) -> Formula:
        kind, op, at = self.peek()
        if kind == "op" and op == "!":
            self.take()
            return Neg(self.unary())
        if kind == "op" and op == "~":
            self.take()
            return strong_neg(self.unary())
        return self.primary()

    def primary(self) -> Formula:
        kind, val, at = self.take()
        if kind == "const":
            return BOT if val == "0" else TOP
        if kind == "atom":
            return Atom(val)
        if kind == "op" and val == "(":
            f = self.implication()
            kind2, val2, at2 = self.take()
            if val2 != ")":
                raise ParseError("expected ')'", at2)
            return f
        raise ParseError(f"expected a formula, got {val!r}" if val else "unexpected end of input", at)


def parse(text: str, logic: LogicId | None = None) -> Formula:
    """Parse text into a Formula; validate against logic's signature if given.

    Sugar (~, *, <->) is expanded here, so the result is primitive-only.
    Note ~ always expands through the strong implication ->, which the
    weak-implication logics reject; write ``p ~> 0`` there instead.
    """
    f = _Parser(text).parse()
    if logic is not None:
        validate_signature(f, logic)
    return f


# -- printing ----------------------------------------------------------------

_LEVEL = {And: 3, Or: 2, Imp: 1, CoImp: 1, WImp: 1}
_OP_TOKEN = {And: "&", Or: "|", Imp: "->", CoImp: "-<", WImp: "~>"}


def _level(f: Formula) -> int:
    return _LEVEL.get(type(f), 4)


def render(f: Formula) -> str:
    """Print f with minimal parentheses; parse(render(f)) round-trips."""
    if isinstance(f, Bot):
        return "0"
    if isinstance(f, Top):
        return "1"
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Neg):
        inner = render(f.sub)
        if isinstance(f.sub, _BINARY_NODES):
            inner = f"({inner})"
        return f"!{inner}"
    lvl = _LEVEL[type(f)]
    op = _OP_TOKEN[type(f)]
    left, right = render(f.lhs), render(f.rhs)
    if lvl == 1:
        # same-operator chains only in the associative direction
        if isinstance(f, CoImp):
            if _level(f.lhs) == 1 and not isinstance(f.lhs, CoImp):
                left = f"({left})"
            if _level(f.rhs) == 1:
                right = f"({right})"
        else:
            if _level(f.lhs) == 1:
                left = f"({left})"
            if _level(f.rhs) == 1 and type(f.rhs) is not type(f):
                right = f"({right})"
    else:
        if _level(f.lhs) < lvl:
            left = f"({left})"
        if _level(f.rhs) <= lvl:
            right = f"({right})"
    return f"{left} {op} {right}"


# -- negation normal form ----------------------------------------------------


class NNFUnsupported(ValueError):
    """Raised for weak-implication logics, which admit no exact NNF."""


def nnf(f: Formula, logic: LogicId) -> Formula:
    """Push ! down to atoms, preserving the valuation of every formula exactly.

    Only the strong-implication logics support this.  The Goedel clauses are

        !(a & b) = !a | !b        !(a -> b) = !b -< !a
        !(a | b) = !a & !b        !(a -< b) = !b -> !a
        !!a = a, !0 = 1, !1 = 0

    The Lukasiewicz language has no coimplication, so !(a -> b) instead
    rewrites to !b * ~!a (strong conjunction with the strong negation),
    which has the same pair value, and !0 rewrites to 0 -> 0.
    """
    if logic.impl_kind is not ImplKind.ARROW:
        raise NNFUnsupported(f"{logic.name} has no exact negation normal form")
    validate_signature(f, logic)
    return _nnf(f, logic.base is LogicBase.GODEL)


def _nnf(f: Formula, godel: bool) -> Formula:
    if isinstance(f, (Bot, Top, Atom)):
        return f
    if isinstance(f, And):
        return And(_nnf(f.lhs, godel), _nnf(f.rhs, godel))
    if isinstance(f, Or):
        return Or(_nnf(f.lhs, godel), _nnf(f.rhs, godel))
    if isinstance(f, Imp):
        return Imp(_nnf(f.lhs, godel), _nnf(f.rhs, godel))
    if isinstance(f, CoImp):
        return CoImp(_nnf(f.lhs, godel), _nnf(f.rhs, godel))
    g = f.sub
    if isinstance(g, Atom):
        return f
    if isinstance(g, Bot):
        return TOP if godel else Imp(BOT, BOT)
    if isinstance(g, Top):
        return BOT
    if isinstance(g, Neg):
        return _nnf(g.sub, godel)
    if isinstance(g, And):
        return Or(_nnf(Neg(g.lhs), godel), _nnf(Neg(g.rhs), godel))
    if isinstance(g, Or):
        return And(_nnf(Neg(g.lhs), godel), _nnf(Neg(g.rhs), godel))
    if isinstance(g, Imp):
        a, b = _nnf(Neg(g.rhs), godel), _nnf(Neg(g.lhs), godel)
        if godel:
            return CoImp(a, b)
        return odot(a, strong_neg(b))
    if isinstance(g, CoImp):
        return Imp(_nnf(Neg(g.rhs), godel), _nnf(Neg(g.lhs), godel))
    raise TypeError(f"unexpected node {f!r}")


# -- differentiating formula families ----------------------------------------


def family_fn(n: int, prefix: str = "p") -> Formula:
    """Disjunction of all biconditionals p_i <-> p_j over n+1 atoms.

    With n+1 atoms in [0,1], two of them must lie within 1/n of each other,
    which bounds the family's value away from (0,1) at scale 1/n; no
    assignment makes it fully true.  Derived connectives come expanded.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    ps = [Atom(f"{prefix}{i}") for i in range(1, n + 2)]
    disjuncts = [
        biimp(ps[i], ps[j]) for i in range(n + 1) for j in range(i + 1, n + 1)
    ]
    node = disjuncts[0]
    for d in disjuncts[1:]:
        node = Or(node, d)
    return node


def family_f2_odot_fn(n: int, shared: bool = False) -> Formula:
    """F_2 * F_n over disjoint atoms p*/q*, or F_n * F_n over one atom set.

    The default (disjoint) form needs n >= 3.  With shared=True the first
    factor is F_n itself over the same atoms, the shape whose validity is
    not closed under modus ponens.
    """
    if shared:
        f = family_fn(n)
        return odot(f, f)
    if n < 3:
        raise ValueError("n must be >= 3")
    return odot(family_fn(2, prefix="p"), family_fn(n, prefix="q"))
