"""Verdicts and proof-tree evidence shared by the two tableau engines.

A proof tree records, per node, which rule expanded which constraint and
the subtrees for the conclusions; leaves either close with a certificate
(text lines replaying the contradiction) or stay open with a model.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from .semantics import TruthPair, valuation_to_json


@dataclass
class LeafInfo:
    closed: bool
    certificate: Optional[list[str]] = None
    model: Optional[dict] = None


@dataclass
class ProofNode:
    rule: str = ""
    premise: object = None
    children: list["ProofNode"] = field(default_factory=list)
    leaf: Optional[LeafInfo] = None


@dataclass
class Valid:
    """The query holds; one closed proof tree per tableau."""

    proofs: tuple[ProofNode, ...]


@dataclass
class Invalid:
    """The query fails; countermodel maps atoms to truth pairs."""

    countermodel: dict[str, TruthPair]


Verdict = Valid | Invalid


def proof_to_json(root: ProofNode) -> dict:
    """Serialize iteratively; chains of one-child nodes can be deep."""
    out_of: dict[int, dict] = {}
    stack: list[tuple[ProofNode, bool]] = [(root, False)]
    while stack:
        node, done = stack.pop()
        if done:
            d: dict = {"rule": node.rule}
            if node.premise is not None:
                d["premise"] = str(node.premise)
            if node.leaf is not None:
                leaf: dict = {"closed": node.leaf.closed}
                if node.leaf.certificate is not None:
                    leaf["certificate"] = node.leaf.certificate
                if node.leaf.model is not None:
                    leaf["model"] = node.leaf.model
                d["leaf"] = leaf
            else:
                d["children"] = [out_of[id(c)] for c in node.children]
            out_of[id(node)] = d
        else:
            stack.append((node, True))
            for c in node.children:
                stack.append((c, False))
    return out_of[id(root)]


def count_nodes(root: ProofNode) -> int:
    total = 0
    stack = [root]
    while stack:
        n = stack.pop()
        total += 1
        stack.extend(n.children)
    return total


def open_model_json(valuation: dict[str, TruthPair]) -> dict:
    return valuation_to_json(valuation)
