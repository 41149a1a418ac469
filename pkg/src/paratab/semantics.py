"""Exact evaluation over the product bilattice [0,1] x [0,1].

A truth value is a pair (pos, neg) of rationals: positive and negative
support.  The truth order compares pos upward and neg downward, so the top
value is (1,0) and the bottom (0,1).  Designated values form an upset
(x,y)^ = {(p,n) | p >= x, n <= y} generated by a Filter.

Every connective acts coordinatewise through the Lukasiewicz or Goedel
operations; see the clause table in _compile.  All arithmetic is over
fractions.Fraction; nothing here ever rounds.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Optional

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
    subformulas,
    validate_signature,
)

ZERO = Fraction(0)
ONE = Fraction(1)


def _as_unit_fraction(value, what: str) -> Fraction:
    r = Fraction(value)
    if not ZERO <= r <= ONE:
        raise ValueError(f"{what} must lie in [0,1], got {r}")
    return r


@dataclass(frozen=True)
class TruthPair:
    pos: Fraction
    neg: Fraction

    def __post_init__(self):
        object.__setattr__(self, "pos", _as_unit_fraction(self.pos, "pos"))
        object.__setattr__(self, "neg", _as_unit_fraction(self.neg, "neg"))

    def __iter__(self):
        return iter((self.pos, self.neg))


@dataclass(frozen=True)
class Filter:
    """Generator (x,y) of the designated upset (x,y)^."""

    x: Fraction
    y: Fraction

    def __post_init__(self):
        object.__setattr__(self, "x", _as_unit_fraction(self.x, "x"))
        object.__setattr__(self, "y", _as_unit_fraction(self.y, "y"))


Valuation = Mapping[str, TruthPair]

TOP_PAIR = TruthPair(ONE, ZERO)
BOT_PAIR = TruthPair(ZERO, ONE)

EXACTLY_TRUE = Filter(ONE, ZERO)
POSITIVELY_TRUE = Filter(ONE, ONE)


def default_filter(logic: LogicId) -> Filter:
    """(1,0) for the strong-implication logics, (1,1) for the weak ones."""
    if logic.impl_kind is ImplKind.WARROW:
        return POSITIVELY_TRUE
    return EXACTLY_TRUE


class FilterError(ValueError):
    """Filter incompatible with the logic (weak implications need y = 1)."""


def check_filter(d: Filter, logic: LogicId) -> None:
    """The weak implication preserves only filters containing (1,1), so
    validity over a weak-implication logic requires y = 1."""
    if logic.impl_kind is ImplKind.WARROW and d.y != ONE:
        raise FilterError(
            f"{logic.name} admits only filters with y = 1; got y = {d.y}"
        )


def _g_imp(a: Fraction, b: Fraction) -> Fraction:
    return ONE if a <= b else b


def _g_coimp(a: Fraction, b: Fraction) -> Fraction:
    return ZERO if a <= b else a


def _compile(f: Formula, logic: LogicId) -> Callable[[Valuation], TruthPair]:
    """Build a closure evaluating f; used by evaluate and the samplers.

    Subformulas are evaluated once per valuation (postorder over the
    deduplicated DAG), which matters for the shared-atom families.
    """
    validate_signature(f, logic)
    order = list(subformulas(f))
    index = {g: i for i, g in enumerate(order)}
    luk = logic.base is LogicBase.LUK

    steps = []
    for g in order:
        if isinstance(g, Bot):
            steps.append(("const", BOT_PAIR, None))
        elif isinstance(g, Top):
            steps.append(("const", TOP_PAIR, None))
        elif isinstance(g, Atom):
            steps.append(("atom", g.name, None))
        elif isinstance(g, Neg):
            steps.append(("neg", index[g.sub], None))
        else:
            steps.append((type(g).__name__, index[g.lhs], index[g.rhs]))

    def run(v: Valuation) -> TruthPair:
        vals: list[TruthPair] = [None] * len(steps)  # type: ignore[list-item]
        for i, (tag, a, b) in enumerate(steps):
            if tag == "const":
                vals[i] = a
            elif tag == "atom":
                try:
                    vals[i] = v[a]
                except KeyError:
                    raise ValueError(f"valuation missing atom {a!r}") from None
            elif tag == "neg":
                s = vals[a]
                vals[i] = TruthPair(s.neg, s.pos)
            else:
                l, r = vals[a], vals[b]
                if tag == "And":
                    vals[i] = TruthPair(min(l.pos, r.pos), max(l.neg, r.neg))
                elif tag == "Or":
                    vals[i] = TruthPair(max(l.pos, r.pos), min(l.neg, r.neg))
                elif tag == "Imp":
                    if luk:
                        vals[i] = TruthPair(
                            min(ONE, ONE - l.pos + r.pos), max(ZERO, r.neg - l.neg)
                        )
                    else:
                        vals[i] = TruthPair(
                            _g_imp(l.pos, r.pos), _g_coimp(r.neg, l.neg)
                        )
                elif tag == "WImp":
                    if luk:
                        vals[i] = TruthPair(
                            min(ONE, ONE - l.pos + r.pos),
                            max(ZERO, l.pos + r.neg - ONE),
                        )
                    else:
                        vals[i] = TruthPair(
                            _g_imp(l.pos, r.pos), min(l.pos, r.neg)
                        )
                else:  # CoImp, Goedel only
                    vals[i] = TruthPair(
                        _g_coimp(l.pos, r.pos), _g_imp(r.neg, l.neg)
                    )
        return vals[-1]

    return run


def evaluate(f: Formula, v: Valuation, logic: LogicId) -> TruthPair:
    """The pair value of f under v, by the clause tables of the two logics."""
    return _compile(f, logic)(v)


# the operation goes by this name in the library API
eval = evaluate


def is_designated(t: TruthPair, d: Filter) -> bool:
    return t.pos >= d.x and t.neg <= d.y


def dual_valuation(v: Valuation) -> dict[str, TruthPair]:
    """Per-atom conflation (pos,neg) -> (1-neg, 1-pos); an involution."""
    return {name: TruthPair(ONE - t.neg, ONE - t.pos) for name, t in v.items()}


def conflation_closed(d: Filter) -> bool:
    """The upset (x,y)^ is stable under conflation exactly when y = 1-x."""
    return d.y == ONE - d.x


def normalize_filter(d: Filter) -> Filter:
    """Collapse a rectangle filter to the square one with the same
    strong-implication Lukasiewicz validities: (x,y) -> (x,1-x) when
    y >= 1-x, else (1-y,y)."""
    if d.y >= ONE - d.x:
        return Filter(d.x, ONE - d.x)
    return Filter(ONE - d.y, d.y)


# -- sampling refuters -------------------------------------------------------

_GRID = (Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), Fraction(1))
_GRID_PAIRS = tuple(TruthPair(p, n) for p in _GRID for n in _GRID)
_SWEEP_CAP = 60000
_MAX_DEN = 64


def _sweep(names: list[str]) -> Iterable[dict[str, TruthPair]]:
    product = itertools.product(_GRID_PAIRS, repeat=len(names))
    for combo in itertools.islice(product, _SWEEP_CAP):
        yield dict(zip(names, combo))


def _random_valuation(rng: random.Random, names: list[str]) -> dict[str, TruthPair]:
    out = {}
    for name in names:
        den1 = rng.randint(1, _MAX_DEN)
        den2 = rng.randint(1, _MAX_DEN)
        out[name] = TruthPair(
            Fraction(rng.randint(0, den1), den1), Fraction(rng.randint(0, den2), den2)
        )
    return out


def sample_falsify(
    f: Formula, d: Filter, logic: LogicId, trials: int = 1000, seed: int = 0
) -> Optional[dict[str, TruthPair]]:
    """Search for a valuation whose value of f is not designated.

    Deterministic: a grid sweep with coordinates in {0,1/4,1/2,3/4,1}
    (truncated past 60000 points) followed by `trials` seeded random
    valuations with denominators up to 64.  Returning None proves nothing.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    check_filter(d, logic)
    run = _compile(f, logic)
    names = atoms(f)
    for v in _sweep(names):
        if not is_designated(run(v), d):
            return v
    rng = random.Random(seed)
    for _ in range(trials):
        v = _random_valuation(rng, names)
        if not is_designated(run(v), d):
            return v
    return None


def entails_sample(
    gamma: Iterable[Formula],
    f: Formula,
    d: Filter,
    logic: LogicId,
    trials: int = 1000,
    seed: int = 0,
) -> Optional[dict[str, TruthPair]]:
    """Search for a valuation designating all of gamma but not f."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    check_filter(d, logic)
    gamma = list(gamma)
    runs = [_compile(g, logic) for g in gamma]
    run_f = _compile(f, logic)
    names = sorted(set(atoms(f)).union(*(atoms(g) for g in gamma)))

    def hit(v):
        return all(is_designated(r(v), d) for r in runs) and not is_designated(
            run_f(v), d
        )

    for v in _sweep(names):
        if hit(v):
            return v
    rng = random.Random(seed)
    for _ in range(trials):
        v = _random_valuation(rng, names)
        if hit(v):
            return v
    return None


# -- JSON form of valuations -------------------------------------------------


def _frac_str(r: Fraction) -> str:
    return f"{r.numerator}/{r.denominator}"


def valuation_to_json(v: Valuation) -> dict[str, list[str]]:
    """Atom -> ["num/den", "num/den"] with pos first."""
    return {name: [_frac_str(t.pos), _frac_str(t.neg)] for name, t in sorted(v.items())}


def valuation_from_json(data: Mapping[str, list[str]]) -> dict[str, TruthPair]:
    out = {}
    for name, pair in data.items():
        if not isinstance(pair, (list, tuple)) or len(pair) != 2:
            raise ValueError(f"valuation entry for {name!r} must be a [pos, neg] pair")
        out[name] = TruthPair(Fraction(str(pair[0])), Fraction(str(pair[1])))
    return out


def filter_to_json(d: Filter) -> list[str]:
    return [_frac_str(d.x), _frac_str(d.y)]
