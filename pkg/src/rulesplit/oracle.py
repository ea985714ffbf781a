"""Reference semantics at desk scale.

A naive grounder instantiates rule variables over the active domain and
evaluates arithmetic and comparisons instance-wise; an exact enumerator
produces all stable models; weak constraints weigh models per level; and
``equivalent`` checks that a rewritten program has the same stable models
as the original once fresh predicates are stripped (a bijection), with
equal optimal weights when weak constraints are present.

Stable models are computed two ways:

* Programs without disjunctive heads: enumerate truth assignments to the
  atoms that occur under negation plus the ground aggregate occurrences,
  compute the least model of the corresponding reduct by forward
  propagation, and keep assignments whose least model confirms every
  guess.  This is exact (Gelfond-Lifschitz) and the exponent is the guess
  signature, not the atom count.
* Programs with a disjunctive head anywhere: enumerate candidate
  interpretations over the derivable atoms and test subset-minimality
  against the reduct directly.

Both paths treat an aggregate as a monolithic condition evaluated under
the candidate model, which matches the standard semantics exactly for
aggregate-stratified programs; programs where an aggregate depends
recursively on its own predicate are refused.

The enumeration dimension (candidate atoms, or guess signature) is capped;
grounding is capped by variables per rule.  Integer arithmetic must stay
within signed 64-bit range; division truncates toward zero; division by
zero drops the ground instance and is tallied on the ground program.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

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
    Variable,
    active_domain,
    outer_vars,
    schema_of,
    vars_of,
)

_INT64_MIN = -(1 << 63)
_INT64_MAX = (1 << 63) - 1


class OracleError(Exception):
    """Raised on cap violations, unsupported constructs, or bad arithmetic."""


class _DropInstance(Exception):
    """Internal: this ground instance is discarded (division by zero)."""


@dataclass(frozen=True, slots=True)
class GroundProgram:
    """Ground rules with all arithmetic evaluated away."""

    rules: tuple[Rule, ...]
    dropped_instances: int = 0


@dataclass(frozen=True, slots=True)
class GroundingStats:
    rule_instances: int
    fact_instances: int
    atom_count: int


@dataclass(frozen=True, slots=True)
class WeightedModel:
    """A stable model with its total weak-constraint weight per level."""

    interpretation: Interpretation
    weight_by_level: dict[int, int]


# ----------------------------------------------------------------- terms


def _as_int(value: Constant) -> int:
    if not isinstance(value.value, int):
        raise OracleError(f"non-integer arithmetic operand: {value.value!r}")
    return value.value


def _eval_term(term, env: dict[str, Constant]) -> Constant:
    if isinstance(term, Constant):
        return term
    if isinstance(term, Variable):
        try:
            return env[term.name]
        except KeyError:
            raise OracleError(f"unbound variable {term.name} during grounding") from None
    left = _as_int(_eval_term(term.left, env))
    right = _as_int(_eval_term(term.right, env))
    if term.op == "+":
        result = left + right
    elif term.op == "-":
        result = left - right
    elif term.op == "*":
        result = left * right
    else:
        if right == 0:
            raise _DropInstance()
        result = abs(left) // abs(right)
        if (left < 0) != (right < 0):
            result = -result
    if not _INT64_MIN <= result <= _INT64_MAX:
        raise OracleError("arithmetic overflow beyond 64-bit range")
    return Constant(result)


def _compare(relation: str, lhs: Constant, rhs: Constant) -> bool:
    if relation == "=":
        return lhs == rhs
    if relation == "!=":
        return lhs != rhs
    a, b = lhs.sort_key(), rhs.sort_key()
    if relation == "<":
        return a < b
    if relation == "<=":
        return a <= b
    if relation == ">":
        return a > b
    return a >= b


# -------------------------------------------------------------- grounding


def _substitution_plan(
    elements: tuple[BodyElement, ...], bound: set[str], needed: set[str]
) -> tuple[list[str], list[tuple[str, object]]]:
    """Split ``needed`` variables into enumerated ones (bound by positive
    literals) and ones derived by binding equalities, in evaluation order."""
    positive: set[str] = set()
    for el in elements:
        if isinstance(el, Literal) and not el.negated:
            positive |= vars_of(el)
    enumerated = sorted((positive & needed) - bound)
    known = bound | set(enumerated)
    derived: list[tuple[str, object]] = []
    changed = True
    while changed:
        changed = False
        for el in elements:
            if (
                isinstance(el, Assignment)
                and isinstance(el.target, Variable)
                and el.target.name not in known
                and vars_of(el.expr) <= known
            ):
                derived.append((el.target.name, el.expr))
                known.add(el.target.name)
                changed = True
    missing = needed - known
    if missing:
        raise OracleError(f"cannot ground unsafe variables: {sorted(missing)}")
    return enumerated, derived


def _ground_elements(
    elements: tuple[BodyElement, ...], env: dict[str, Constant], adom: list[Constant]
) -> tuple[BodyElement, ...] | None:
    """Ground a body-element sequence under ``env``; None when a builtin
    fails.  Satisfied comparisons and equalities are removed."""
    out: list[BodyElement] = []
    for el in elements:
        if isinstance(el, Literal):
            args = tuple(_eval_term(t, env) for t in el.atom.args)
            out.append(Literal(Atom(el.atom.predicate, args), el.negated))
        elif isinstance(el, Comparison):
            if not _compare(el.relation, _eval_term(el.lhs, env), _eval_term(el.rhs, env)):
                return None
        elif isinstance(el, Assignment):
            if _eval_term(el.target, env) != _eval_term(el.expr, env):
                return None
        elif isinstance(el, Aggregate):
            out.append(_ground_aggregate(el, env, adom))
        else:
            raise TypeError(f"unexpected body element {type(el).__name__}")
    return tuple(out)


def _ground_aggregate(agg: Aggregate, env: dict[str, Constant], adom: list[Constant]):
    guard = _eval_term(agg.guard, env)
    instances: dict[AggregateElement, None] = {}
    for element in agg.elements:
        for c in element.condition:
            if isinstance(c, Aggregate):
                raise OracleError("nested aggregates are not supported by the oracle")
        local_vars = vars_of(element) - set(env)
        enumerated, derived = _substitution_plan(element.condition, set(env), local_vars)
        for values in product(adom, repeat=len(enumerated)):
            local_env = dict(env)
            local_env.update(zip(enumerated, values))
            try:
                for name, expr in derived:
                    local_env[name] = _eval_term(expr, local_env)
                condition = _ground_elements(element.condition, local_env, adom)
                if condition is None:
                    continue
                terms = tuple(_eval_term(t, local_env) for t in element.terms)
            except _DropInstance:
                continue
            if not terms and not condition:
                # the empty tuple is realized unconditionally; keep a
                # trivially true condition to satisfy the element shape
                condition = (Comparison("=", Constant(0), Constant(0)),)
            instances[AggregateElement(terms, condition)] = None
    return Aggregate(guard, agg.relation, agg.func, tuple(instances))


def _positive_atoms(body: tuple[BodyElement, ...]) -> list[Atom]:
    return [el.atom for el in body if isinstance(el, Literal) and not el.negated]


def _derivable_closure(instances: dict[Rule, None]) -> set[Atom]:
    """Optimistic derivability: negation and aggregates assumed satisfied."""
    derivable: set[Atom] = set()
    changed = True
    while changed:
        changed = False
        for rule in instances:
            if not rule.head:
                continue
            if all(atom in derivable for atom in _positive_atoms(rule.body)):
                for atom in rule.head:
                    if atom not in derivable:
                        derivable.add(atom)
                        changed = True
    return derivable


def _collect_instance_constants(rule: Rule, out: set[Constant]) -> None:
    for atom in rule.head:
        out.update(atom.args)
    for el in rule.body:
        if isinstance(el, Literal):
            out.update(el.atom.args)
        elif isinstance(el, Aggregate):
            out.add(el.guard)
            for element in el.elements:
                out.update(element.terms)
                for c in element.condition:
                    if isinstance(c, Literal):
                        out.update(c.atom.args)
    if rule.cost is not None:
        out.add(rule.cost.weight)
        out.add(rule.cost.level)
        out.update(rule.cost.terms)


def ground(program: Program, *, var_cap: int = 10, domain_cap: int = 64) -> GroundProgram:
    """All ground instances of the program's rules.

    Rule variables range over the active domain (the constants written in
    the program); instances whose comparisons or equalities fail are
    dropped, and the surviving builtin elements are removed from bodies.
    Binding equalities are evaluated rather than enumerated, so derived
    constants (say 4 from 2+2) enter the ground program.  Because a
    derived value may feed another rule through a predicate, grounding
    iterates: substitutions drawing on constants beyond the active domain
    are added when every positive body atom is optimistically derivable,
    until the constant pool stabilizes (or exceeds ``domain_cap``, for
    programs that keep deriving fresh values).
    """
    base = sorted(active_domain(program), key=Constant.sort_key)
    base_set = set(base)

    plans = []
    for rule in program.rules:
        every_var = vars_of(rule)
        if len(every_var) > var_cap:
            raise OracleError(
                f"rule has {len(every_var)} variables, above the cap of {var_cap}"
            )
        needed = outer_vars(rule)
        for agg in rule.body:
            if isinstance(agg, Aggregate) and not vars_of(agg.guard) <= needed:
                raise OracleError("aggregate guard variables must be bound outside")
        plans.append((rule, _substitution_plan(rule.body, set(), needed)))

    pool = list(base)
    derivable: set[Atom] = set()
    instances: dict[Rule, None] = {}
    dropped = 0
    while True:
        instances = {}
        dropped = 0
        for rule, (enumerated, derived) in plans:
            for values in product(pool, repeat=len(enumerated)):
                novel = any(v not in base_set for v in values)
                env = dict(zip(enumerated, values))
                try:
                    for name, expr in derived:
                        env[name] = _eval_term(expr, env)
                    body = _ground_elements(rule.body, env, pool)
                    if body is None:
                        continue
                    if novel and not all(
                        atom in derivable for atom in _positive_atoms(body)
                    ):
                        continue
                    head = tuple(
                        Atom(a.predicate, tuple(_eval_term(t, env) for t in a.args))
                        for a in rule.head
                    )
                    cost = None
                    if rule.cost is not None:
                        cost = Cost(
                            _eval_term(rule.cost.weight, env),
                            _eval_term(rule.cost.level, env),
                            tuple(_eval_term(t, env) for t in rule.cost.terms),
                        )
                except _DropInstance:
                    if not novel:
                        dropped += 1
                    continue
                instances[Rule(head, body, cost)] = None
        constants: set[Constant] = set(base)
        for rule in instances:
            _collect_instance_constants(rule, constants)
        new_pool = sorted(constants, key=Constant.sort_key)
        new_derivable = _derivable_closure(instances)
        if new_pool == pool and new_derivable == derivable:
            break
        if len(new_pool) > domain_cap:
            raise OracleError(
                f"constant pool grew to {len(new_pool)}, above the cap of {domain_cap}"
            )
        pool, derivable = new_pool, new_derivable
    return GroundProgram(tuple(instances), dropped)


# ------------------------------------------------------------ satisfaction


def _aggregate_satisfied(agg: Aggregate, true_atoms: frozenset[Atom] | set[Atom]) -> bool:
    realized: set[tuple[Constant, ...]] = set()
    for element in agg.elements:
        if _condition_satisfied(element.condition, true_atoms):
            realized.add(element.terms)
    if agg.func == "count":
        value = Constant(len(realized))
    elif agg.func == "sum":
        total = 0
        for terms in realized:
            if terms:
                total += _as_int(terms[0])
        value = Constant(total)
    else:
        firsts = [terms[0] for terms in realized if terms]
        if not firsts:
            return False  # empty #max/#min satisfies no guard
        picker = max if agg.func == "max" else min
        value = picker(firsts, key=Constant.sort_key)
    return _compare(agg.relation, agg.guard, value)


def _condition_satisfied(
    condition: tuple[BodyElement, ...], true_atoms: frozenset[Atom] | set[Atom]
) -> bool:
    for el in condition:
        if isinstance(el, Literal):
            if el.negated == (el.atom in true_atoms):
                return False
        elif isinstance(el, Comparison):
            if not _compare(el.relation, el.lhs, el.rhs):
                return False
        else:
            raise TypeError(f"unexpected ground condition element {type(el).__name__}")
    return True


def _body_satisfied(
    body: tuple[BodyElement, ...], true_atoms: frozenset[Atom] | set[Atom]
) -> bool:
    for el in body:
        if isinstance(el, Literal):
            if el.negated == (el.atom in true_atoms):
                return False
        elif isinstance(el, Aggregate):
            if not _aggregate_satisfied(el, true_atoms):
                return False
        elif isinstance(el, Comparison):
            if not _compare(el.relation, el.lhs, el.rhs):
                return False
        else:
            raise TypeError(f"unexpected ground body element {type(el).__name__}")
    return True


# ------------------------------------------------------- stable models


def _aggregate_stratified(rules: list[Rule]) -> bool:
    depends: dict[str, set[str]] = {}
    agg_uses: list[tuple[str, str]] = []
    for rule in rules:
        body_preds: set[str] = set()
        via_aggregate: set[str] = set()
        for el in rule.body:
            if isinstance(el, Literal):
                body_preds.add(el.atom.predicate)
            elif isinstance(el, Aggregate):
                for element in el.elements:
                    for c in element.condition:
                        if isinstance(c, Literal):
                            body_preds.add(c.atom.predicate)
                            via_aggregate.add(c.atom.predicate)
        for atom in rule.head:
            depends.setdefault(atom.predicate, set()).update(body_preds)
            for used in via_aggregate:
                agg_uses.append((atom.predicate, used))
    for head_pred, used in agg_uses:
        stack, seen = [used], {used}
        while stack:
            pred = stack.pop()
            if pred == head_pred:
                return False
            for nxt in depends.get(pred, ()):
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
    return True


def _atom_key(atom: Atom):
    return (atom.predicate, atom.arity, tuple(a.sort_key() for a in atom.args))


def stable_models(
    ground_program: GroundProgram, *, atom_cap: int = 22
) -> set[Interpretation]:
    """Exact stable models of a ground program (weak constraints are
    weights, not rules, and are ignored here)."""
    rules = [r for r in ground_program.rules if r.cost is None]
    if not _aggregate_stratified(rules):
        raise OracleError("aggregate depends recursively on its own predicate")
    if any(len(r.head) > 1 for r in rules):
        return _stable_by_enumeration(rules, atom_cap)
    return _stable_by_propagation(rules, atom_cap)


def _head_universe(rules: list[Rule]) -> list[Atom]:
    atoms: dict[Atom, None] = {}
    for rule in rules:
        for atom in rule.head:
            atoms[atom] = None
    return sorted(atoms, key=_atom_key)


def _stable_by_propagation(rules: list[Rule], atom_cap: int) -> set[Interpretation]:
    universe = _head_universe(rules)
    index = {atom: i for i, atom in enumerate(universe)}
    facts = 0
    for rule in rules:
        if rule.head and not rule.body:
            facts |= 1 << index[rule.head[0]]

    # compile derivation rules; constraints are only verified afterwards
    compiled: list[tuple[int, list[int], list[Aggregate], int]] = []
    constraints: list[Rule] = []
    guess_atoms: dict[int, None] = {}
    guess_aggs: dict[Aggregate, None] = {}
    for rule in rules:
        if not rule.head:
            constraints.append(rule)
            continue
        positive = 0
        negated: list[int] = []
        aggregates: list[Aggregate] = []
        reachable = True
        for el in rule.body:
            if isinstance(el, Literal):
                bit = index.get(el.atom)
                if el.negated:
                    if bit is None:
                        continue  # can never be true: literal holds
                    if facts >> bit & 1:
                        reachable = False  # negated fact: rule never fires
                        break
                    negated.append(bit)
                else:
                    if bit is None:
                        reachable = False  # positive atom is underivable
                        break
                    positive |= 1 << bit
            elif isinstance(el, Aggregate):
                aggregates.append(el)
            else:
                raise TypeError(f"unexpected ground element {type(el).__name__}")
        if not reachable:
            continue
        for bit in negated:
            guess_atoms[bit] = None
        for agg in aggregates:
            guess_aggs[agg] = None
        compiled.append((positive, negated, aggregates, 1 << index[rule.head[0]]))

    signature = list(guess_atoms)
    aggregates = list(guess_aggs)
    if len(signature) + len(aggregates) > atom_cap:
        raise OracleError(
            f"guess signature has {len(signature) + len(aggregates)} entries, "
            f"above the cap of {atom_cap}"
        )

    models: set[Interpretation] = set()
    for choice in range(1 << (len(signature) + len(aggregates))):
        assumed = 0
        for i, bit in enumerate(signature):
            if choice >> i & 1:
                assumed |= 1 << bit
        agg_truth = {
            agg: bool(choice >> (len(signature) + j) & 1)
            for j, agg in enumerate(aggregates)
        }
        active = [
            (pos, head)
            for pos, negated, aggs, head in compiled
            if all(not (assumed >> bit & 1) for bit in negated)
            and all(agg_truth[a] for a in aggs)
        ]
        model = facts
        changed = True
        while changed:
            changed = False
            for pos, head in active:
                if model & head != head and model & pos == pos:
                    model |= head
                    changed = True
        # the guess must be confirmed by the least model it produced
        interp = frozenset(universe[i] for i in range(len(universe)) if model >> i & 1)
        if any((model >> bit & 1) != (assumed >> bit & 1) for bit in signature):
            continue
        if any(_aggregate_satisfied(agg, interp) != truth for agg, truth in agg_truth.items()):
            continue
        if any(_body_satisfied(c.body, interp) for c in constraints):
            continue
        models.add(interp)
    return models


def _stable_by_enumeration(rules: list[Rule], atom_cap: int) -> set[Interpretation]:
    universe = _head_universe(rules)
    if len(universe) > atom_cap:
        raise OracleError(
            f"{len(universe)} candidate atoms, above the cap of {atom_cap}"
        )
    index = {atom: i for i, atom in enumerate(universe)}

    # compile: (positive mask, negated in-universe masks, aggregates, head mask)
    compiled: list[tuple[int, int, list[Aggregate], int]] = []
    for rule in rules:
        positive = 0
        negated = 0
        aggregates: list[Aggregate] = []
        underivable = False
        for el in rule.body:
            if isinstance(el, Literal):
                bit = index.get(el.atom)
                if el.negated:
                    if bit is not None:
                        negated |= 1 << bit
                else:
                    if bit is None:
                        underivable = True
                        break
                    positive |= 1 << bit
            elif isinstance(el, Aggregate):
                aggregates.append(el)
            else:
                raise TypeError(f"unexpected ground element {type(el).__name__}")
        if underivable:
            continue  # body can never be satisfied within the universe
        head = 0
        for atom in rule.head:
            head |= 1 << index[atom]
        compiled.append((positive, negated, aggregates, head))

    models: set[Interpretation] = set()
    for mask in range(1 << len(universe)):
        interp = frozenset(universe[i] for i in range(len(universe)) if mask >> i & 1)
        if _is_stable(compiled, interp, mask):
            models.add(interp)
    return models


def _is_stable(
    compiled: list[tuple[int, int, list[Aggregate], int]], interp: Interpretation, mask: int
) -> bool:
    reduct: list[tuple[int, int]] = []  # (positive mask, head mask)
    for positive, negated, aggregates, head in compiled:
        if negated & mask:
            continue
        if aggregates and not all(_aggregate_satisfied(a, interp) for a in aggregates):
            continue
        if positive & mask == positive and head & mask == 0:
            return False  # candidate is not even a classical model
        reduct.append((positive, head))
    if mask == 0:
        return True  # the empty set has no proper subset
    sub = (mask - 1) & mask
    while True:
        if all(pos & sub != pos or head & sub for pos, head in reduct):
            return False  # a proper subset already satisfies the reduct
        if sub == 0:
            return True
        sub = (sub - 1) & mask


# ------------------------------------------------------------- weights


def weigh(ground_program: GroundProgram, model: Interpretation) -> dict[int, int]:
    """Total weight of a model per level, summing each realized
    (weight, level, terms) tuple once."""
    tuples: set[tuple[int, int, tuple[Constant, ...]]] = set()
    for rule in ground_program.rules:
        if rule.cost is None:
            continue
        if _body_satisfied(rule.body, model):
            weight = _as_int(rule.cost.weight)
            level = _as_int(rule.cost.level)
            tuples.add((level, weight, rule.cost.terms))
    out: dict[int, int] = {}
    for level, weight, _terms in tuples:
        out[level] = out.get(level, 0) + weight
    return out


def weighted_models(
    ground_program: GroundProgram, *, atom_cap: int = 22
) -> list[WeightedModel]:
    """All stable models with their weights, in a deterministic order."""
    models = stable_models(ground_program, atom_cap=atom_cap)
    keyed = sorted(models, key=lambda m: sorted(_atom_key(a) for a in m))
    return [WeightedModel(m, weigh(ground_program, m)) for m in keyed]


def _cost_levels(*programs: GroundProgram) -> list[int]:
    levels: set[int] = set()
    for g in programs:
        for rule in g.rules:
            if rule.cost is not None:
                levels.add(_as_int(rule.cost.level))
    return sorted(levels, reverse=True)


def _cost_key(weights: dict[int, int], levels: list[int]) -> tuple[int, ...]:
    """Lexicographic optimization key, higher levels first."""
    return tuple(weights.get(level, 0) for level in levels)


# ---------------------------------------------------------- equivalence


def strip(interp: Interpretation, original_schema: set[tuple[str, int]]) -> Interpretation:
    """Drop atoms whose (predicate, arity) is not in the original schema."""
    return frozenset(a for a in interp if (a.predicate, a.arity) in original_schema)


def equivalent(
    original: Program,
    rewritten: Program,
    *,
    var_cap: int = 10,
    atom_cap: int = 22,
) -> bool:
    """True iff stripping fresh predicates maps the rewritten program's
    stable models bijectively onto the original's, and, when weak
    constraints are present, optimal weights per level agree."""
    schema = schema_of(original)
    g_original = ground(original, var_cap=var_cap)
    g_rewritten = ground(rewritten, var_cap=var_cap)
    models_original = stable_models(g_original, atom_cap=atom_cap)
    models_rewritten = stable_models(g_rewritten, atom_cap=atom_cap)
    if len(models_original) != len(models_rewritten):
        return False
    stripped = {strip(m, schema) for m in models_rewritten}
    if len(stripped) != len(models_rewritten) or stripped != models_original:
        return False
    weighted = any(r.cost is not None for r in original.rules) or any(
        r.cost is not None for r in rewritten.rules
    )
    if weighted and models_original:
        levels = _cost_levels(g_original, g_rewritten)
        best_original = min(
            _cost_key(weigh(g_original, m), levels) for m in models_original
        )
        best_rewritten = min(
            _cost_key(weigh(g_rewritten, m), levels) for m in models_rewritten
        )
        if best_original != best_rewritten:
            return False
    return True


# ------------------------------------------------------- grounding size


def grounding_size(program: Program, *, var_cap: int = 10) -> int:
    """Number of ground rule instances with a non-empty body (facts are
    tallied separately by ``grounding_stats``)."""
    return grounding_stats(program, var_cap=var_cap).rule_instances


def grounding_stats(program: Program, *, var_cap: int = 10) -> GroundingStats:
    g = ground(program, var_cap=var_cap)
    rule_instances = sum(1 for r in g.rules if r.body)
    fact_instances = len(g.rules) - rule_instances
    atoms: set[Atom] = set()
    for rule in g.rules:
        atoms.update(rule.head)
        for el in rule.body:
            if isinstance(el, Literal):
                atoms.add(el.atom)
            elif isinstance(el, Aggregate):
                for element in el.elements:
                    for c in element.condition:
                        if isinstance(c, Literal):
                            atoms.add(c.atom)
    return GroundingStats(rule_instances, fact_instances, len(atoms))
