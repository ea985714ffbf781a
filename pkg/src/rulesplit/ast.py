"""Immutable data model for logic programs: terms, atoms, rules, programs.

Everything here is a frozen dataclass, so values are hashable and safe to
share between threads or use as dict keys.  Construction normalizes
sequence fields to tuples and checks the basic shape invariants (variable
names start uppercase, symbolic constants start lowercase, arities match).
No evaluation logic lives in this module.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

ARITH_OPS = ("+", "-", "*", "/")
RELATIONS = ("<", "<=", "=", "!=", ">=", ">")
AGGREGATE_FUNCTIONS = ("count", "sum", "max", "min")


@dataclass(frozen=True, slots=True)
class Constant:
    """A symbolic (lowercase) or integer constant."""

    value: int | str

    def __post_init__(self) -> None:
        if isinstance(self.value, bool):
            raise ValueError("constants are integers or symbols, not booleans")
        if isinstance(self.value, str):
            if not self.value or not (self.value[0].islower()):
                raise ValueError(f"symbolic constant must start lowercase: {self.value!r}")

    def sort_key(self) -> tuple:
        """Total order used by #max/#min: integers by value, then symbols
        lexicographically, integers before symbols."""
        if isinstance(self.value, int):
            return (0, self.value)
        return (1, self.value)


@dataclass(frozen=True, slots=True)
class Variable:
    """A variable; names start with an uppercase letter."""

    name: str

    def __post_init__(self) -> None:
        if not self.name or not self.name[0].isupper():
            raise ValueError(f"variable name must start uppercase: {self.name!r}")


@dataclass(frozen=True, slots=True)
class ArithTerm:
    """Composite integer term built from +, -, *, / over subterms."""

    op: str
    left: "Term"
    right: "Term"

    def __post_init__(self) -> None:
        if self.op not in ARITH_OPS:
            raise ValueError(f"unknown arithmetic operator: {self.op!r}")


Term = Union[Constant, Variable, ArithTerm]


@dataclass(frozen=True, slots=True)
class Atom:
    """A predicate applied to a tuple of terms; arity 0 is allowed."""

    predicate: str
    args: tuple[Term, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "args", tuple(self.args))

    @property
    def arity(self) -> int:
        return len(self.args)


@dataclass(frozen=True, slots=True)
class Literal:
    """An atom, possibly under default negation."""

    atom: Atom
    negated: bool = False


@dataclass(frozen=True, slots=True)
class Comparison:
    """A builtin relation between two terms, e.g. ``X != Y``."""

    relation: str
    lhs: Term
    rhs: Term

    def __post_init__(self) -> None:
        if self.relation not in RELATIONS:
            raise ValueError(f"unknown relation: {self.relation!r}")


@dataclass(frozen=True, slots=True)
class Assignment:
    """A binding equality ``target = expr`` with a variable or constant on
    the left.  Unlike a Comparison it can make its target variable safe."""

    target: Term
    expr: Term

    def __post_init__(self) -> None:
        if isinstance(self.target, ArithTerm):
            raise ValueError("assignment target must be a variable or constant")


@dataclass(frozen=True, slots=True)
class AggregateElement:
    """One ``t1,...,tn : cond`` entry of an aggregate."""

    terms: tuple[Term, ...] = ()
    condition: tuple["BodyElement", ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "terms", tuple(self.terms))
        object.__setattr__(self, "condition", tuple(self.condition))
        if not self.terms and not self.condition:
            raise ValueError("aggregate element needs terms or a condition")


@dataclass(frozen=True, slots=True)
class Aggregate:
    """A guarded aggregate ``guard rel #func{elements}``.

    The guard always sits on the left.  Two-sided source forms are
    normalized by the parser into two Aggregate elements sharing their
    element list.
    """

    guard: Term
    relation: str
    func: str
    elements: tuple[AggregateElement, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "elements", tuple(self.elements))
        if self.relation not in RELATIONS:
            raise ValueError(f"unknown relation: {self.relation!r}")
        if self.func not in AGGREGATE_FUNCTIONS:
            raise ValueError(f"unknown aggregate function: {self.func!r}")
        if not self.elements:
            raise ValueError("aggregate needs at least one element")


BodyElement = Union[Literal, Comparison, Assignment, Aggregate]


@dataclass(frozen=True, slots=True)
class Cost:
    """Weight annotation of a weak constraint: ``[weight@level, terms]``."""

    weight: Term
    level: Term
    terms: tuple[Term, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "terms", tuple(self.terms))


@dataclass(frozen=True, slots=True)
class Rule:
    """A rule with a (possibly empty, possibly disjunctive) head.

    An empty head is a constraint; a constraint with a ``cost`` annotation
    is a weak constraint.
    """

    head: tuple[Atom, ...] = ()
    body: tuple[BodyElement, ...] = ()
    cost: Cost | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "head", tuple(self.head))
        object.__setattr__(self, "body", tuple(self.body))
        if self.cost is not None and self.head:
            raise ValueError("weak constraints cannot have a head")

    @property
    def is_fact(self) -> bool:
        return bool(self.head) and not self.body

    @property
    def is_constraint(self) -> bool:
        return not self.head


@dataclass(frozen=True, slots=True)
class Program:
    """A finite sequence of rules."""

    rules: tuple[Rule, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "rules", tuple(self.rules))


# An interpretation is simply a set of ground atoms.
Interpretation = frozenset[Atom]


def vars_of(node) -> set[str]:
    """All variable names syntactically occurring in ``node``.

    Accepts any model value: terms, atoms, body elements, aggregate
    elements, cost annotations, rules, and programs.  For rules this is the
    union over head, body, and weak-annotation terms, including variables
    local to aggregates.
    """
    out: set[str] = set()
    _collect_vars(node, out)
    return out


def _collect_vars(node, out: set[str]) -> None:
    if isinstance(node, Variable):
        out.add(node.name)
    elif isinstance(node, Constant):
        pass
    elif isinstance(node, ArithTerm):
        _collect_vars(node.left, out)
        _collect_vars(node.right, out)
    elif isinstance(node, Atom):
        for t in node.args:
            _collect_vars(t, out)
    elif isinstance(node, Literal):
        _collect_vars(node.atom, out)
    elif isinstance(node, Comparison):
        _collect_vars(node.lhs, out)
        _collect_vars(node.rhs, out)
    elif isinstance(node, Assignment):
        _collect_vars(node.target, out)
        _collect_vars(node.expr, out)
    elif isinstance(node, AggregateElement):
        for t in node.terms:
            _collect_vars(t, out)
        for c in node.condition:
            _collect_vars(c, out)
    elif isinstance(node, Aggregate):
        _collect_vars(node.guard, out)
        for e in node.elements:
            _collect_vars(e, out)
    elif isinstance(node, Cost):
        _collect_vars(node.weight, out)
        _collect_vars(node.level, out)
        for t in node.terms:
            _collect_vars(t, out)
    elif isinstance(node, Rule):
        for a in node.head:
            _collect_vars(a, out)
        for b in node.body:
            _collect_vars(b, out)
        if node.cost is not None:
            _collect_vars(node.cost, out)
    elif isinstance(node, Program):
        for r in node.rules:
            _collect_vars(r, out)
    else:
        raise TypeError(f"cannot collect variables from {type(node).__name__}")


def outer_vars(rule: Rule) -> set[str]:
    """Variables of ``rule`` that occur outside aggregate expressions.

    Variables appearing only inside aggregates are local to them and are
    invisible to the rule's variable graph and to grounding substitutions.
    """
    out: set[str] = set()
    for a in rule.head:
        _collect_vars(a, out)
    if rule.cost is not None:
        _collect_vars(rule.cost, out)
    for b in rule.body:
        if not isinstance(b, Aggregate):
            _collect_vars(b, out)
    return out


def is_ground(node) -> bool:
    """True when ``node`` contains no variables."""
    return not vars_of(node)


def active_domain(program: Program) -> set[Constant]:
    """All constants occurring anywhere in the program."""
    out: set[Constant] = set()
    _collect_constants(program, out)
    return out


def _collect_constants(node, out: set[Constant]) -> None:
    if isinstance(node, Constant):
        out.add(node)
    elif isinstance(node, Variable):
        pass
    elif isinstance(node, ArithTerm):
        _collect_constants(node.left, out)
        _collect_constants(node.right, out)
    elif isinstance(node, Atom):
        for t in node.args:
            _collect_constants(t, out)
    elif isinstance(node, Literal):
        _collect_constants(node.atom, out)
    elif isinstance(node, Comparison):
        _collect_constants(node.lhs, out)
        _collect_constants(node.rhs, out)
    elif isinstance(node, Assignment):
        _collect_constants(node.target, out)
        _collect_constants(node.expr, out)
    elif isinstance(node, AggregateElement):
        for t in node.terms:
            _collect_constants(t, out)
        for c in node.condition:
            _collect_constants(c, out)
    elif isinstance(node, Aggregate):
        _collect_constants(node.guard, out)
        for e in node.elements:
            _collect_constants(e, out)
    elif isinstance(node, Cost):
        _collect_constants(node.weight, out)
        _collect_constants(node.level, out)
        for t in node.terms:
            _collect_constants(t, out)
    elif isinstance(node, Rule):
        for a in node.head:
            _collect_constants(a, out)
        for b in node.body:
            _collect_constants(b, out)
        if node.cost is not None:
            _collect_constants(node.cost, out)
    elif isinstance(node, Program):
        for r in node.rules:
            _collect_constants(r, out)
    else:
        raise TypeError(f"cannot collect constants from {type(node).__name__}")


def schema_of(program: Program) -> set[tuple[str, int]]:
    """Every predicate of the program as a (name, arity) pair.

    The same name at different arities yields distinct entries.
    """
    out: set[tuple[str, int]] = set()
    for rule in program.rules:
        for atom in rule.head:
            out.add((atom.predicate, atom.arity))
        for elem in rule.body:
            _collect_schema(elem, out)
    return out


def _collect_schema(elem: BodyElement, out: set[tuple[str, int]]) -> None:
    if isinstance(elem, Literal):
        out.add((elem.atom.predicate, elem.atom.arity))
    elif isinstance(elem, Aggregate):
        for agg_elem in elem.elements:
            for c in agg_elem.condition:
                _collect_schema(c, out)
    # comparisons and assignments carry no predicates
