from __future__ import annotations

import pytest

from rulesplit import (
    Aggregate,
    AggregateElement,
    ArithTerm,
    Assignment,
    Atom,
    Comparison,
    Constant,
    Cost,
    Literal,
    Program,
    Rule,
    Variable,
    active_domain,
    parse,
    schema_of,
    vars_of,
)
from rulesplit.ast import outer_vars


def test_vars_of_join_rule():
    rule = parse("h(X,W) :- e(X,Y), e(Y,Z), not e(Z,W), e(W,X).").rules[0]
    assert vars_of(rule) == {"X", "Y", "Z", "W"}


def test_vars_of_ground_atom():
    assert vars_of(Atom("p", (Constant("a"), Constant("b")))) == set()


def test_vars_of_binding_equality():
    elem = Assignment(Variable("X"), ArithTerm("+", Variable("Z"), Variable("Z")))
    assert vars_of(elem) == {"X", "Z"}


def test_vars_of_covers_all_rule_parts():
    rule = parse(
        ":~ e(A,B), not f(C), f(C), A != B, S = A+B,"
        " 1 <= #count{Q : e(Q,R), f(R)}. [S@1, A]"
    ).rules[0]
    pieces: set[str] = set()
    for atom in rule.head:
        pieces |= vars_of(atom)
    for el in rule.body:
        pieces |= vars_of(el)
    pieces |= vars_of(rule.cost)
    assert vars_of(rule) == pieces == {"A", "B", "C", "S", "Q", "R"}


def test_outer_vars_excludes_aggregate_locals():
    rule = parse("good(X) :- vertex(X), 2 <= #count{Y : edge(X,Y), edge(Y,Z)}.").rules[0]
    assert outer_vars(rule) == {"X"}
    assert vars_of(rule) == {"X", "Y", "Z"}


def test_active_domain_facts():
    assert active_domain(parse("e(1,2). e(2,3).")) == {
        Constant(1),
        Constant(2),
        Constant(3),
    }


def test_active_domain_variable_only():
    assert active_domain(parse("p(X) :- q(X), not r(X).")) == set()


def test_active_domain_single_symbol():
    assert active_domain(parse("p(X) :- q(X). q(a).")) == {Constant("a")}


def test_schema_of_rule():
    assert schema_of(parse("p(X) :- q(X,Y).")) == {("p", 1), ("q", 2)}


def test_schema_of_empty():
    assert schema_of(Program()) == set()


def test_schema_of_distinguishes_arity():
    assert schema_of(parse("p(a). p(a,b).")) == {("p", 1), ("p", 2)}


def test_schema_of_sees_aggregate_conditions():
    program = parse("g :- 1 <= #count{X : inner(X)}.")
    assert schema_of(program) == {("g", 0), ("inner", 1)}


def test_constant_ordering_integers_before_symbols():
    mixed = [Constant("b"), Constant(3), Constant("a"), Constant(-1)]
    assert sorted(mixed, key=Constant.sort_key) == [
        Constant(-1),
        Constant(3),
        Constant("a"),
        Constant("b"),
    ]


@pytest.mark.parametrize("bad", ["x", "_X", "1X", ""])
def test_variable_names_start_uppercase(bad):
    with pytest.raises(ValueError):
        Variable(bad)


def test_symbolic_constants_start_lowercase():
    with pytest.raises(ValueError):
        Constant("Big")


def test_weak_constraints_have_no_head():
    cost = Cost(Constant(1), Constant(0))
    with pytest.raises(ValueError):
        Rule(head=(Atom("p"),), cost=cost)


def test_aggregate_needs_elements():
    with pytest.raises(ValueError):
        Aggregate(Constant(1), "<=", "count", ())


def test_aggregate_element_needs_content():
    with pytest.raises(ValueError):
        AggregateElement((), ())


def test_values_are_hashable():
    rule = parse("p(X) :- q(X), X < 3.").rules[0]
    assert rule in {rule}
    assert rule.body[1] == Comparison("<", Variable("X"), Constant(3))
    assert isinstance(rule.body[0], Literal)
