"""Command-line front end.

Verbs: check, entail, eval, nnf, gen, oracle.  Exit codes are stable:
0 = valid / entailed / consistent, 1 = invalid / not entailed / oracle
disagreement, 2 = usage, parse, signature, or filter error.

Filters are written as two fractions, "num/den,num/den"; decimals are
rejected so no float ever enters the pipeline.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Optional

from .formulas import (
    LogicBase,
    LogicId,
    NNFUnsupported,
    ParseError,
    SignatureError,
    atoms,
    family_f2_odot_fn,
    family_fn,
    nnf,
    parse,
    render,
)
from .godel_tableau import g_prove_entailment, g_prove_valid
from .luk_tableau import prove_entailment, prove_valid
from .oracles import gen_corpus, godel_validity_oracle, luk_refuter, write_corpus
from .proofs import Invalid, ProofNode, Valid, count_nodes, proof_to_json
from .semantics import (
    Filter,
    FilterError,
    default_filter,
    evaluate,
    filter_to_json,
    is_designated,
    sample_falsify,
    valuation_from_json,
    valuation_to_json,
)

LOGIC_NAMES = ("luk-arrow", "luk-warrow", "godel-arrow", "godel-warrow")


class UsageError(ValueError):
    pass


def _fraction(text: str) -> Fraction:
    text = text.strip()
    if "." in text:
        raise UsageError(f"decimal {text!r} rejected; write a fraction num/den")
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad fraction {text!r}: {exc}") from exc


def _parse_filter(text: str) -> Filter:
    parts = text.split(",")
    if len(parts) != 2:
        raise UsageError(f"filter must be 'num/den,num/den', got {text!r}")
    return Filter(_fraction(parts[0]), _fraction(parts[1]))


def _logic(name: str) -> LogicId:
    return LogicId.from_name(name)


def _tree_lines(root: ProofNode) -> list[str]:
    out: list[str] = []
    stack: list[tuple[ProofNode, int]] = [(root, 0)]
    while stack:
        node, ind = stack.pop()
        pad = "  " * ind
        if node.leaf is not None:
            out.append(f"{pad}[{'closed' if node.leaf.closed else 'open'}]")
            for line in node.leaf.certificate or ():
                out.append(f"{pad}  {line}")
            continue
        out.append(f"{pad}{node.rule}  {node.premise}")
        bump = 1 if len(node.children) > 1 else 0
        for ch in reversed(node.children):
            stack.append((ch, ind + bump))
    return out


def _emit(report: dict, args, text_lines: list[str]) -> None:
    if args.output == "json":
        print(json.dumps(report, indent=2))
    else:
        for line in text_lines:
            print(line)


def _countermodel_lines(v) -> list[str]:
    return [f"  {name} = ({t.pos}, {t.neg})" for name, t in sorted(v.items())]


def _dispatch_valid(f, logic: LogicId, d: Filter, mode: str):
    if logic.base is LogicBase.LUK:
        return prove_valid(f, d, logic, mode=mode)
    if mode != "branching":
        raise UsageError("linear mode applies to the Lukasiewicz logics only")
    return g_prove_valid(f, logic, d)


def _dispatch_entail(gamma, f, logic: LogicId, d: Filter, mode: str):
    if logic.base is LogicBase.LUK:
        return prove_entailment(gamma, f, d, logic, mode=mode)
    if mode != "branching":
        raise UsageError("linear mode applies to the Lukasiewicz logics only")
    return g_prove_entailment(gamma, f, logic, d)


def cmd_check(args) -> int:
    logic = _logic(args.logic)
    d = _parse_filter(args.filter) if args.filter else default_filter(logic)
    f = parse(args.formula, logic)
    verdict = _dispatch_valid(f, logic, d, args.mode)
    report = {
        "command": "check",
        "formula": render(f),
        "logic": logic.name,
        "filter": filter_to_json(d),
        "mode": args.mode,
    }
    if isinstance(verdict, Valid):
        report["verdict"] = "valid"
        report["proof_nodes"] = [count_nodes(t) for t in verdict.proofs]
        lines = [f"valid  ({logic.name}, filter {d.x},{d.y})"]
        if args.explain:
            report["proofs"] = [proof_to_json(t) for t in verdict.proofs]
            for i, t in enumerate(verdict.proofs):
                lines.append(f"tableau {i + 1}:")
                lines.extend(_tree_lines(t))
        _emit(report, args, lines)
        return 0
    report["verdict"] = "invalid"
    report["countermodel"] = valuation_to_json(verdict.countermodel)
    value = evaluate(f, verdict.countermodel, logic)
    report["value"] = [str(value.pos), str(value.neg)]
    lines = [f"invalid  ({logic.name}, filter {d.x},{d.y})", "countermodel:"]
    lines.extend(_countermodel_lines(verdict.countermodel))
    lines.append(f"value: ({value.pos}, {value.neg})")
    _emit(report, args, lines)
    return 1


def _read_gamma(args, logic: LogicId) -> list:
    texts: list[str] = []
    if args.gamma_file:
        with open(args.gamma_file, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if line and not line.startswith("#"):
                    texts.append(line)
    texts.extend(args.premise or ())
    return [parse(t, logic) for t in texts]


def cmd_entail(args) -> int:
    logic = _logic(args.logic)
    d = _parse_filter(args.filter) if args.filter else default_filter(logic)
    f = parse(args.formula, logic)
    gamma = _read_gamma(args, logic)
    verdict = _dispatch_entail(gamma, f, logic, d, args.mode)
    report = {
        "command": "entail",
        "formula": render(f),
        "premises": [render(g) for g in gamma],
        "logic": logic.name,
        "filter": filter_to_json(d),
        "mode": args.mode,
    }
    if isinstance(verdict, Valid):
        report["verdict"] = "entailed"
        report["proof_nodes"] = [count_nodes(t) for t in verdict.proofs]
        lines = ["entailed"]
        if args.explain:
            report["proofs"] = [proof_to_json(t) for t in verdict.proofs]
            for i, t in enumerate(verdict.proofs):
                lines.append(f"tableau {i + 1}:")
                lines.extend(_tree_lines(t))
        _emit(report, args, lines)
        return 0
    report["verdict"] = "not-entailed"
    report["countermodel"] = valuation_to_json(verdict.countermodel)
    lines = ["not entailed", "countermodel:"]
    lines.extend(_countermodel_lines(verdict.countermodel))
    _emit(report, args, lines)
    return 1


def cmd_eval(args) -> int:
    logic = _logic(args.logic)
    d = _parse_filter(args.filter) if args.filter else default_filter(logic)
    f = parse(args.formula, logic)
    if args.valuation_file:
        with open(args.valuation_file, encoding="utf-8") as fh:
            data = json.load(fh)
    elif args.valuation:
        data = json.loads(args.valuation)
    else:
        raise UsageError("eval needs --valuation or --valuation-file")
    v = valuation_from_json(data)
    missing = [name for name in atoms(f) if name not in v]
    if missing:
        raise UsageError(f"valuation misses atoms: {', '.join(missing)}")
    value = evaluate(f, v, logic)
    designated = is_designated(value, d)
    report = {
        "command": "eval",
        "formula": render(f),
        "logic": logic.name,
        "filter": filter_to_json(d),
        "value": [str(value.pos), str(value.neg)],
        "designated": designated,
    }
    _emit(
        report,
        args,
        [
            f"value: ({value.pos}, {value.neg})",
            f"{'designated' if designated else 'not designated'} at ({d.x},{d.y})",
        ],
    )
    return 0


def cmd_nnf(args) -> int:
    logic = _logic(args.logic)
    f = parse(args.formula, logic)
    g = nnf(f, logic)
    report = {
        "command": "nnf",
        "formula": render(f),
        "logic": logic.name,
        "nnf": render(g),
    }
    _emit(report, args, [render(g)])
    return 0


def cmd_gen(args) -> int:
    if args.family == "fn":
        print(render(family_fn(args.n)))
        return 0
    if args.family == "f2ofn":
        print(render(family_f2_odot_fn(args.n, shared=args.shared)))
        return 0
    logic = _logic(args.logic)
    corpus = gen_corpus(args.seed, args.count, args.max_depth, args.atoms, logic)
    if args.out:
        write_corpus(corpus, args.out)
    else:
        for lg, f in corpus.formulas:
            print(json.dumps({"logic": lg.name, "formula": render(f)}))
    return 0


def cmd_oracle(args) -> int:
    logic = _logic(args.logic)
    d = _parse_filter(args.filter) if args.filter else default_filter(logic)
    f = parse(args.formula, logic)
    report: dict = {"command": "oracle", "formula": render(f), "logic": logic.name}
    lines: list[str] = []
    if logic.base is LogicBase.GODEL:
        oracle_valid = godel_validity_oracle(f, logic)
        prover_valid = isinstance(g_prove_valid(f, logic, d), Valid)
        agree = oracle_valid == prover_valid
        report |= {
            "oracle_valid": oracle_valid,
            "prover_valid": prover_valid,
            "agree": agree,
        }
        lines.append(f"oracle: {'valid' if oracle_valid else 'invalid'}")
        lines.append(f"prover: {'valid' if prover_valid else 'invalid'}")
        lines.append("agreement" if agree else "DISAGREEMENT")
        _emit(report, args, lines)
        return 0 if agree else 1
    hit = luk_refuter(f, d, logic, args.denominator)
    verdict = prove_valid(f, d, logic)
    prover_valid = isinstance(verdict, Valid)
    consistent = not (prover_valid and hit is not None)
    report |= {
        "prover_valid": prover_valid,
        "refuter_hit": valuation_to_json(hit) if hit is not None else None,
        "denominator": args.denominator,
        "consistent": consistent,
    }
    lines.append(f"prover: {'valid' if prover_valid else 'invalid'}")
    lines.append(
        f"refuter (denominator {args.denominator}): "
        + ("hit" if hit is not None else "no hit")
    )
    if args.trials:
        sampled = sample_falsify(f, d, logic, trials=args.trials, seed=args.seed)
        consistent = consistent and not (prover_valid and sampled is not None)
        report["sampler_hit"] = (
            valuation_to_json(sampled) if sampled is not None else None
        )
        lines.append(
            f"sampler ({args.trials} trials): "
            + ("hit" if sampled is not None else "no hit")
        )
    report["consistent"] = consistent
    lines.append("consistent" if consistent else "INCONSISTENT")
    _emit(report, args, lines)
    return 0 if consistent else 1


def _common_flags(p: argparse.ArgumentParser, mode: bool = True) -> None:
    p.add_argument("--logic", required=True, choices=LOGIC_NAMES)
    p.add_argument("--filter", help="designated filter, 'num/den,num/den'")
    if mode:
        p.add_argument("--mode", choices=("branching", "linear"), default="branching")
        p.add_argument(
            "--jobs",
            type=int,
            default=1,
            help="worker cap; the present engines search depth-first in process",
        )
        p.add_argument(
            "--explain", action="store_true", help="emit proof trees and certificates"
        )
    p.add_argument("--output", choices=("text", "json"), default="text")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="paratab",
        description="tableau prover for two-dimensional Lukasiewicz and Goedel logics",
    )
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("check", help="decide validity of a formula")
    p.add_argument("formula")
    _common_flags(p)
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("entail", help="decide finitary entailment")
    p.add_argument("formula")
    p.add_argument("--gamma-file", help="premises, one formula per line")
    p.add_argument("--premise", action="append", help="inline premise (repeatable)")
    _common_flags(p)
    p.set_defaults(fn=cmd_entail)

    p = sub.add_parser("eval", help="evaluate a formula under a valuation")
    p.add_argument("formula")
    p.add_argument("--valuation", help='JSON like {"p": ["1/2","1/3"]}')
    p.add_argument("--valuation-file")
    _common_flags(p, mode=False)
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("nnf", help="negation normal form (Arrow logics)")
    p.add_argument("formula")
    _common_flags(p, mode=False)
    p.set_defaults(fn=cmd_nnf)

    p = sub.add_parser("gen", help="emit formula families or a seeded corpus")
    p.add_argument("family", choices=("fn", "f2ofn", "corpus"))
    p.add_argument("--n", type=int, default=2, help="family index for fn/f2ofn")
    p.add_argument("--shared", action="store_true", help="f2ofn over shared atoms")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=50)
    p.add_argument("--max-depth", type=int, default=4)
    p.add_argument("--atoms", type=int, default=3)
    p.add_argument("--logic", choices=LOGIC_NAMES, default="luk-arrow")
    p.add_argument("--out", help="write JSON lines here instead of stdout")
    p.set_defaults(fn=cmd_gen)

    p = sub.add_parser("oracle", help="cross-check the prover against brute force")
    p.add_argument("formula")
    p.add_argument("--denominator", type=int, default=4, help="Lukasiewicz grid step")
    p.add_argument("--trials", type=int, default=0, help="extra random samples")
    p.add_argument("--seed", type=int, default=0)
    _common_flags(p, mode=False)
    p.set_defaults(fn=cmd_oracle)

    return ap


def run(argv: Optional[list[str]] = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except (
        UsageError,
        ParseError,
        SignatureError,
        FilterError,
        NNFUnsupported,
        ValueError,
        OSError,
        json.JSONDecodeError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
