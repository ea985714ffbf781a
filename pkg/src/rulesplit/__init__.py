"""Rule splitting for logic programs via tree decomposition.

Large rules ground exponentially in their variable count; splitting them
along a tree decomposition of their variable graph makes the grounding
exponential only in the decomposition width.  This package provides the
program model, a parser/renderer for a standard input-language subset, the
decomposition heuristics, the rewriting itself, and a desk-scale oracle
(naive grounder plus exact stable-model enumeration) that checks the
rewriting preserves answer sets.
"""

from .ast import (
    Aggregate,
    AggregateElement,
    ArithTerm,
    Assignment,
    Atom,
    BodyElement,
    Comparison,
    Constant,
    Cost,
    Interpretation,
    Literal,
    Program,
    Rule,
    Term,
    Variable,
    active_domain,
    schema_of,
    vars_of,
)
from .decompose import (
    DecompositionReport,
    FreshNamer,
    RuleReport,
    UnsupportedConstructError,
    check_safety,
    decompose_program,
    decompose_rule,
    rewrite_aggregate,
    rewrite_weak_constraint,
    synthesize_domain_rule,
)
from .oracle import (
    GroundProgram,
    GroundingStats,
    OracleError,
    WeightedModel,
    equivalent,
    ground,
    grounding_size,
    grounding_stats,
    stable_models,
    strip,
    weigh,
    weighted_models,
)
from .parser import ParseError, SourceLocation, parse, render
from .rulegraph import RuleGraph, build
from .treedecomp import (
    HEURISTICS,
    DecompositionError,
    TreeDecomposition,
    decomposition_from_order,
    elimination_order,
    ensure_head_root,
    validate,
)

__version__ = "0.1.0"

__all__ = [
    "Aggregate",
    "AggregateElement",
    "ArithTerm",
    "Assignment",
    "Atom",
    "BodyElement",
    "Comparison",
    "Constant",
    "Cost",
    "DecompositionError",
    "DecompositionReport",
    "FreshNamer",
    "GroundProgram",
    "GroundingStats",
    "HEURISTICS",
    "Interpretation",
    "Literal",
    "OracleError",
    "ParseError",
    "Program",
    "Rule",
    "RuleGraph",
    "RuleReport",
    "SourceLocation",
    "Term",
    "TreeDecomposition",
    "UnsupportedConstructError",
    "Variable",
    "WeightedModel",
    "active_domain",
    "build",
    "check_safety",
    "decompose_program",
    "decompose_rule",
    "decomposition_from_order",
    "elimination_order",
    "ensure_head_root",
    "equivalent",
    "ground",
    "grounding_size",
    "grounding_stats",
    "parse",
    "render",
    "rewrite_aggregate",
    "rewrite_weak_constraint",
    "schema_of",
    "stable_models",
    "strip",
    "synthesize_domain_rule",
    "validate",
    "vars_of",
    "weigh",
    "weighted_models",
]
