"""Tableau-based provers for two-dimensional Lukasiewicz and Goedel logics.

Formulas are evaluated on pairs (positive support, negative support) over
[0,1]; validity and finitary entailment are decided against a designated
filter by constraint tableaux, with exact rational countermodels on failure.
"""

from .formulas import (
    ALL_LOGICS,
    GODEL_ARROW,
    GODEL_WARROW,
    LUK_ARROW,
    LUK_WARROW,
    And,
    Atom,
    Bot,
    CoImp,
    Formula,
    Imp,
    LogicId,
    Neg,
    NNFUnsupported,
    Or,
    ParseError,
    SignatureError,
    Top,
    WImp,
    atoms,
    biimp,
    connective_count,
    depth,
    family_f2_odot_fn,
    family_fn,
    nnf,
    odot,
    parse,
    render,
    strong_neg,
    validate_signature,
    weak_neg,
)
from .godel_tableau import g_prove_entailment, g_prove_valid, g_saturate
from .luk_tableau import prove_entailment, prove_valid, saturate
from .oracles import Corpus, gen_corpus, godel_validity_oracle, luk_refuter
from .proofs import Invalid, ProofNode, Valid, Verdict, proof_to_json
from .semantics import (
    EXACTLY_TRUE,
    POSITIVELY_TRUE,
    Filter,
    FilterError,
    TruthPair,
    default_filter,
    dual_valuation,
    entails_sample,
    evaluate,
    is_designated,
    normalize_filter,
    sample_falsify,
    valuation_from_json,
    valuation_to_json,
)

__version__ = "0.1.0"

__all__ = [
    "ALL_LOGICS",
    "And",
    "Atom",
    "Bot",
    "CoImp",
    "Corpus",
    "EXACTLY_TRUE",
    "Filter",
    "FilterError",
    "Formula",
    "GODEL_ARROW",
    "GODEL_WARROW",
    "Imp",
    "Invalid",
    "LUK_ARROW",
    "LUK_WARROW",
    "LogicId",
    "NNFUnsupported",
    "Neg",
    "Or",
    "POSITIVELY_TRUE",
    "ParseError",
    "ProofNode",
    "SignatureError",
    "Top",
    "TruthPair",
    "Valid",
    "Verdict",
    "WImp",
    "atoms",
    "biimp",
    "connective_count",
    "default_filter",
    "depth",
    "dual_valuation",
    "entails_sample",
    "evaluate",
    "family_f2_odot_fn",
    "family_fn",
    "g_prove_entailment",
    "g_prove_valid",
    "g_saturate",
    "gen_corpus",
    "godel_validity_oracle",
    "is_designated",
    "luk_refuter",
    "nnf",
    "normalize_filter",
    "odot",
    "parse",
    "proof_to_json",
    "prove_entailment",
    "prove_valid",
    "render",
    "sample_falsify",
    "saturate",
    "strong_neg",
    "valuation_from_json",
    "valuation_to_json",
    "validate_signature",
    "weak_neg",
]
