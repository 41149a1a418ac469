"""Brute-force verdict oracles and seeded formula corpora.

The Goedel oracle is complete: every Goedel-side connective clause returns a
constant or one of its argument values, so whether some valuation pushes a
formula below 1 in the first coordinate depends only on the weak/strict
order type of the 2m atom coordinates against {0,1}.  A grid with 2m+2
levels realizes every such order type, so sweeping it decides validity
exactly.  The Lukasiewicz truth functions do arithmetic, not just ordering,
so no fixed grid is complete there; luk_refuter only searches for
countermodels over one denominator and a miss proves nothing.

Both sweeps run on integer numpy arrays (value = level/denominator), which
keeps them exact; any hit is decoded to Fractions and re-checked with the
reference evaluator before being returned.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .formulas import (
    BOT,
    TOP,
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
    connective_count,
    parse,
    render,
    validate_signature,
)
from .semantics import Filter, TruthPair, evaluate, is_designated

_SWEEP_LIMIT = 2_000_000


def _coordinate_grids(n_coords: int, levels: int) -> np.ndarray:
    if n_coords == 0:
        return np.zeros((0, 1), dtype=np.int32)
    total = levels**n_coords
    if total > _SWEEP_LIMIT:
        raise ValueError(
            f"sweep of {total} valuations exceeds the {_SWEEP_LIMIT} cap"
        )
    return np.indices((levels,) * n_coords, dtype=np.int32).reshape(n_coords, -1)


def _geval(f: Formula, pos: dict, neg: dict, top: int):
    if isinstance(f, Atom):
        return pos[f.name], neg[f.name]
    if isinstance(f, Bot):
        return 0, top
    if isinstance(f, Top):
        return top, 0
    if isinstance(f, Neg):
        a, b = _geval(f.sub, pos, neg, top)
        return b, a
    a1, a2 = _geval(f.lhs, pos, neg, top)
    b1, b2 = _geval(f.rhs, pos, neg, top)
    if isinstance(f, And):
        return np.minimum(a1, b1), np.maximum(a2, b2)
    if isinstance(f, Or):
        return np.maximum(a1, b1), np.minimum(a2, b2)
    if isinstance(f, Imp):
        return np.where(a1 <= b1, top, b1), np.where(b2 <= a2, 0, b2)
    if isinstance(f, CoImp):
        return np.where(a1 <= b1, 0, a1), np.where(b2 <= a2, top, b2)
    if isinstance(f, WImp):
        return np.where(a1 <= b1, top, b1), np.minimum(a1, b2)
    raise TypeError(f"unknown node {f!r}")


def godel_validity_oracle(f: Formula, logic: LogicId) -> bool:
    """True iff eval(f, v).pos = 1 for every valuation; exact and complete
    for formulas with at most three atoms (grid of 2m+2 levels per
    coordinate, sufficient by the order-type argument in the module docs)."""
    validate_signature(f, logic)
    if logic.base is not LogicBase.GODEL:
        raise ValueError("the grid oracle covers the Goedel logics only")
    names = atoms(f)
    m = len(names)
    if m > 3:
        raise ValueError(f"too many atoms for the grid oracle ({m} > 3)")
    top = 2 * m + 1
    grids = _coordinate_grids(2 * m, top + 1)
    pos = {names[i]: grids[2 * i] for i in range(m)}
    neg = {names[i]: grids[2 * i + 1] for i in range(m)}
    p1, _ = _geval(f, pos, neg, top)
    return bool(np.all(p1 == top))


def _leval(f: Formula, pos: dict, neg: dict, den: int):
    if isinstance(f, Atom):
        return pos[f.name], neg[f.name]
    if isinstance(f, Bot):
        return 0, den
    if isinstance(f, Neg):
        a, b = _leval(f.sub, pos, neg, den)
        return b, a
    a1, a2 = _leval(f.lhs, pos, neg, den)
    b1, b2 = _leval(f.rhs, pos, neg, den)
    if isinstance(f, And):
        return np.minimum(a1, b1), np.maximum(a2, b2)
    if isinstance(f, Or):
        return np.maximum(a1, b1), np.minimum(a2, b2)
    if isinstance(f, Imp):
        return np.minimum(den, den - a1 + b1), np.maximum(0, b2 - a2)
    if isinstance(f, WImp):
        return np.minimum(den, den - a1 + b1), np.maximum(0, a1 + b2 - den)
    raise TypeError(f"unknown node {f!r}")


def luk_refuter(
    f: Formula,
    d: Filter,
    logic: LogicId,
    denominator: int,
    max_atoms: int = 4,
    target_value: Optional[TruthPair] = None,
) -> Optional[dict[str, TruthPair]]:
    """First valuation on the k/denominator grid falling outside the filter,
    or evaluating exactly to target_value when one is given; None on a miss.

    A miss is not a validity proof.  The default atom cap admits the shared
    product formulas over four atoms; raise it knowingly, the sweep is
    exponential in 2*atoms.
    """
    validate_signature(f, logic)
    if logic.base is not LogicBase.LUK:
        raise ValueError("luk_refuter covers the Lukasiewicz logics only")
    if denominator < 1:
        raise ValueError("denominator must be positive")
    names = atoms(f)
    if len(names) > max_atoms:
        raise ValueError(f"too many atoms for the sweep ({len(names)} > {max_atoms})")
    den = denominator
    grids = _coordinate_grids(2 * len(names), den + 1)
    pos = {names[i]: grids[2 * i] for i in range(len(names))}
    neg = {names[i]: grids[2 * i + 1] for i in range(len(names))}
    p1, p2 = _leval(f, pos, neg, den)

    if target_value is not None:
        t = TruthPair(target_value.pos, target_value.neg)
        tp, tn = t.pos * den, t.neg * den
        if tp.denominator != 1 or tn.denominator != 1:
            return None
        hits = (p1 == int(tp)) & (p2 == int(tn))
    else:
        # designated iff pos >= x and neg <= y; on integer levels that is
        # p1 >= ceil(x*den) and p2 <= floor(y*den)
        hits = (p1 < math.ceil(d.x * den)) | (p2 > math.floor(d.y * den))
    hits = np.broadcast_to(hits, (grids.shape[1],))
    idx = np.flatnonzero(hits)
    if idx.size == 0:
        return None
    i = int(idx[0])
    v = {
        name: TruthPair(
            Fraction(int(grids[2 * j, i]), den), Fraction(int(grids[2 * j + 1, i]), den)
        )
        for j, name in enumerate(names)
    }
    got = evaluate(f, v, logic)
    if target_value is not None:
        if got != TruthPair(target_value.pos, target_value.neg):
            raise AssertionError("sweep hit disagrees with the evaluator")
    elif is_designated(got, d):
        raise AssertionError("sweep hit disagrees with the evaluator")
    return v


# -- corpora ------------------------------------------------------------------

MAX_CORPUS_CONNECTIVES = 12


@dataclass(frozen=True)
class Corpus:
    """Seeded formula collection; regeneration from the seed is identical."""

    seed: int
    max_depth: int
    atoms: int
    formulas: tuple[tuple[LogicId, Formula], ...]


def _gen_formula(rng: random.Random, names: list[str], depth: int, logic: LogicId) -> Formula:
    godel = logic.base is LogicBase.GODEL
    if depth == 0 or rng.random() < 0.3:
        r = rng.random()
        if r < 0.85 or not godel:
            return Atom(rng.choice(names)) if r < 0.9 else BOT
        return TOP if r < 0.93 else BOT
    imp = Imp if logic.impl_kind is ImplKind.ARROW else WImp
    ops = ["neg", "and", "or", "imp", "imp"]
    if godel and logic.impl_kind is ImplKind.ARROW:
        ops.append("coimp")
    op = rng.choice(ops)
    if op == "neg":
        return Neg(_gen_formula(rng, names, depth - 1, logic))
    a = _gen_formula(rng, names, depth - 1, logic)
    b = _gen_formula(rng, names, depth - 1, logic)
    if op == "and":
        return And(a, b)
    if op == "or":
        return Or(a, b)
    if op == "coimp":
        return CoImp(a, b)
    return imp(a, b)


def gen_corpus(seed: int, count: int, max_depth: int, atoms: int, logic: LogicId) -> Corpus:
    """Deterministic weighted random formulas within the logic's signature.

    Formulas are capped at MAX_CORPUS_CONNECTIVES connective occurrences
    (oversized draws are discarded and redrawn) so worst-case branching
    stays within the tested runtime budget.
    """
    rng = random.Random(seed)
    names = [f"p{i}" for i in range(1, atoms + 1)]
    formulas: list[tuple[LogicId, Formula]] = []
    while len(formulas) < count:
        f = _gen_formula(rng, names, max_depth, logic)
        if connective_count(f) > MAX_CORPUS_CONNECTIVES:
            continue
        formulas.append((logic, f))
    return Corpus(seed, max_depth, atoms, tuple(formulas))


def write_corpus(corpus: Corpus, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for logic, f in corpus.formulas:
            fh.write(json.dumps({"logic": logic.name, "formula": render(f)}) + "\n")


def read_corpus_lines(path: str) -> list[tuple[LogicId, Formula]]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            data = json.loads(line)
            logic = LogicId.from_name(data["logic"])
            out.append((logic, parse(data["formula"], logic)))
    return out
