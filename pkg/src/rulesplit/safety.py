"""Rule safety: every variable must be bound by the positive body.

A variable is safe if it occurs in a positive body atom, or if it is the
target of a binding equality ``X = expr`` whose expression variables are
all safe (computed as a least fixpoint).  Head variables, comparison
variables, negated-literal variables, aggregate guard variables, and
weak-annotation variables all need to be safe.  Variables local to an
aggregate element must be safe within that element's own condition, with
the enclosing rule's safe variables granted.
"""

from __future__ import annotations

from typing import Iterable

from .ast import (
    Aggregate,
    Assignment,
    BodyElement,
    Comparison,
    Literal,
    Rule,
    Variable,
    vars_of,
)


def _fixpoint(seed: set[str], bindings: list[tuple[str, set[str]]]) -> set[str]:
    safe = set(seed)
    changed = True
    while changed:
        changed = False
        for target, needs in bindings:
            if target not in safe and needs <= safe:
                safe.add(target)
                changed = True
    return safe


def _scope_unsafe(
    elements: Iterable[BodyElement], granted: set[str], extra_required: set[str]
) -> set[str]:
    """Unsafe variables of one scope (a rule body or an aggregate element
    condition), including those of nested aggregate scopes."""
    seed = set(granted)
    bindings: list[tuple[str, set[str]]] = []
    required = set(extra_required)
    aggregates: list[Aggregate] = []
    for el in elements:
        if isinstance(el, Literal):
            required |= vars_of(el)
            if not el.negated:
                seed |= vars_of(el)
        elif isinstance(el, Comparison):
            required |= vars_of(el)
        elif isinstance(el, Assignment):
            required |= vars_of(el)
            if isinstance(el.target, Variable):
                bindings.append((el.target.name, vars_of(el.expr)))
        elif isinstance(el, Aggregate):
            required |= vars_of(el.guard)
            aggregates.append(el)
        else:
            raise TypeError(f"unexpected body element {type(el).__name__}")
    safe = _fixpoint(seed, bindings)
    unsafe = required - safe
    for agg in aggregates:
        for element in agg.elements:
            term_vars: set[str] = set()
            for t in element.terms:
                term_vars |= vars_of(t)
            unsafe |= _scope_unsafe(element.condition, safe, term_vars)
    return unsafe


def unsafe_vars(rule: Rule) -> set[str]:
    """The set of unsafe variables of ``rule``; empty iff the rule is safe."""
    required: set[str] = set()
    for atom in rule.head:
        required |= vars_of(atom)
    if rule.cost is not None:
        required |= vars_of(rule.cost)
    return _scope_unsafe(rule.body, set(), required)
