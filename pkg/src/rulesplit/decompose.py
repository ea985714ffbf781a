"""Rule splitting along tree decompositions.

Each rule's variable graph is decomposed into a tree of bags; every bag
becomes one emitted rule whose head is a fresh temp predicate carrying the
variables shared with the parent bag (the original head for the root).
Every body element lands in exactly one emitted rule: the deepest node
whose bag covers its variables.  Splitting can leave emitted rules unsafe;
safety is restored with synthesized domain predicates, one per unsafe
variable, built greedily from the original rule body.

Weak constraints are first rewritten into a plain rule deriving a temp
atom plus a minimal weak constraint over that atom.  Aggregate conditions
are split so that the part connected to the rest of the rule stays inside
the aggregate and the remainder moves into its own rule.
"""

from __future__ import annotations

from dataclasses import dataclass

from .ast import (
    Aggregate,
    AggregateElement,
    Assignment,
    Atom,
    BodyElement,
    Literal,
    Program,
    Rule,
    Variable,
    schema_of,
    vars_of,
)
from .rulegraph import build
from .safety import unsafe_vars
from .treedecomp import (
    DecompositionError,
    TreeDecomposition,
    decomposition_from_order,
    elimination_order,
    ensure_head_root,
)


class UnsupportedConstructError(Exception):
    """Raised when a construct cannot be rewritten (nested aggregates)."""


class UnsafeRuleError(Exception):
    """Raised when a domain predicate is requested for an unbindable variable."""


def check_safety(rule: Rule) -> set[str]:
    """Unsafe variables of ``rule``; the empty set means the rule is safe."""
    return unsafe_vars(rule)


class FreshNamer:
    """Names for temp and domain predicates, guaranteed fresh.

    Temp predicates are ``temp_<ruleIdx>_<tag>`` and domain predicates
    ``dom_<ruleIdx>_<var>``; on collision with the input schema or an
    earlier fresh name, ``_<counter>`` is appended until free.
    """

    def __init__(
        self,
        forbidden: set[str] | None = None,
        temp_prefix: str = "temp_",
        dom_prefix: str = "dom_",
    ):
        self.temp_prefix = temp_prefix
        self.dom_prefix = dom_prefix
        self.forbidden = set(forbidden or ())
        self.generated: set[str] = set()
        self.counter = 0

    def _claim(self, base: str) -> str:
        name = base
        while name in self.forbidden or name in self.generated:
            self.counter += 1
            name = f"{base}_{self.counter}"
        self.generated.add(name)
        return name

    def temp_name(self, rule_index: int, tag) -> str:
        return self._claim(f"{self.temp_prefix}{rule_index}_{tag}")

    def dom_name(self, rule_index: int, var: str) -> str:
        return self._claim(f"{self.dom_prefix}{rule_index}_{var}")


def _greedy_domain_body(var: str, rule: Rule) -> tuple[BodyElement, ...]:
    """Body of the domain rule for ``var``: a minimal safe binding set.

    Work-set loop: for each variable still to bind, take the first positive
    body atom containing it; failing that, the smallest binding equality
    targeting it (fewest variables, ties by body order), whose expression
    variables join the work-set.  Terminates because the source rule is
    safe.
    """
    work = [var]
    done = {var}
    picked: list[BodyElement] = []
    while work:
        current = work.pop(0)
        atom_elem = next(
            (
                b
                for b in rule.body
                if isinstance(b, Literal) and not b.negated and current in vars_of(b)
            ),
            None,
        )
        if atom_elem is not None:
            if atom_elem not in picked:
                picked.append(atom_elem)
            continue
        candidates = [
            (len(vars_of(b.expr)), idx, b)
            for idx, b in enumerate(rule.body)
            if isinstance(b, Assignment) and b.target == Variable(current)
        ]
        if not candidates:
            raise UnsafeRuleError(f"variable {current} cannot be bound from the rule body")
        chosen = min(candidates)[2]
        if chosen not in picked:
            picked.append(chosen)
        for name in sorted(vars_of(chosen.expr)):
            if name not in done:
                done.add(name)
                work.append(name)
    return tuple(picked)


def synthesize_domain_rule(var: str, rule: Rule, namer: FreshNamer, rule_index: int = 0) -> Rule:
    """A safe rule ``dom_var(var) :- ...`` covering the values of ``var``."""
    body = _greedy_domain_body(var, rule)
    pred = namer.dom_name(rule_index, var)
    return Rule((Atom(pred, (Variable(var),)),), body)


class _DomainPool:
    """Deduplicates domain rules program-wide by (variable, body)."""

    def __init__(self, namer: FreshNamer):
        self.namer = namer
        self.known: dict[tuple[str, tuple[BodyElement, ...]], str] = {}

    def request(
        self, var: str, context: Rule, rule_index: int
    ) -> tuple[Literal, Rule | None]:
        """The dom atom for ``var`` plus its defining rule if new."""
        body = _greedy_domain_body(var, context)
        key = (var, body)
        if key in self.known:
            pred = self.known[key]
            return Literal(Atom(pred, (Variable(var),))), None
        pred = self.namer.dom_name(rule_index, var)
        self.known[key] = pred
        head = Atom(pred, (Variable(var),))
        return Literal(head), Rule((head,), body)


def _repair_safety(
    rule: Rule, context: Rule, pool: _DomainPool, rule_index: int
) -> tuple[Rule, list[Rule]]:
    """Append dom atoms for every unsafe variable of ``rule``."""
    unsafe = unsafe_vars(rule)
    if not unsafe:
        return rule, []
    extras: list[Literal] = []
    dom_rules: list[Rule] = []
    for var in sorted(unsafe):
        literal, fresh = pool.request(var, context, rule_index)
        extras.append(literal)
        if fresh is not None:
            dom_rules.append(fresh)
    return Rule(rule.head, rule.body + tuple(extras), rule.cost), dom_rules


def decompose_rule(
    rule: Rule,
    td: TreeDecomposition,
    namer: FreshNamer,
    *,
    rule_index: int = 0,
    ignore_head: bool = False,
    pool: _DomainPool | None = None,
) -> list[Rule]:
    """Split ``rule`` along ``td`` into one rule per decomposition node,
    with the needed domain rules appended.

    A single-bag decomposition (complete graph) emits the rule verbatim.
    """
    node_rules, dom_rules = _split_rule(
        rule, td, namer, rule_index, ignore_head, pool or _DomainPool(namer)
    )
    return node_rules + dom_rules


def _split_rule(
    rule: Rule,
    td: TreeDecomposition,
    namer: FreshNamer,
    rule_index: int,
    ignore_head: bool,
    pool: _DomainPool,
) -> tuple[list[Rule], list[Rule]]:
    if rule.cost is not None:
        raise DecompositionError("weak constraints must be rewritten before splitting")
    if len(td.bags) == 1:
        return [rule], []

    head_vars: set[str] = set()
    for atom in rule.head:
        head_vars |= vars_of(atom)
    if not ignore_head and not head_vars <= td.bags[td.root]:
        raise DecompositionError("root bag does not contain the head variables")

    parents = td.parents()
    depths = td.depths()
    vertices: set[str] = set().union(*td.bags)

    # each body element goes to the deepest covering node (ties: lowest id)
    placed: dict[int, list[BodyElement]] = {i: [] for i in range(len(td.bags))}
    for elem in rule.body:
        cover = vars_of(elem) & vertices
        node = max(
            (i for i, bag in enumerate(td.bags) if cover <= bag),
            key=lambda i: (depths[i], -i),
        )
        placed[node].append(elem)

    # variables visible in each subtree, for carrying head variables upward
    # when the root bag is not forced to contain them
    subtree_vars: dict[int, set[str]] = {}

    def collect(node: int) -> set[str]:
        acc = set(td.bags[node])
        for child in td.children[node]:
            acc |= collect(child)
        subtree_vars[node] = acc
        return acc

    collect(td.root)

    def temp_args(node: int) -> tuple[str, ...]:
        shared = td.bags[node] & td.bags[parents[node]]
        if ignore_head:
            shared = shared | (head_vars & subtree_vars[node])
        return tuple(sorted(shared))

    temp_pred = {
        node: namer.temp_name(rule_index, node)
        for node in range(len(td.bags))
        if node != td.root
    }

    order: list[int] = []

    def postorder(node: int) -> None:
        for child in td.children[node]:
            postorder(child)
        order.append(node)

    postorder(td.root)

    node_rules: list[Rule] = []
    dom_rules: list[Rule] = []
    for node in order:
        body = list(placed[node])
        for child in td.children[node]:
            args = tuple(Variable(v) for v in temp_args(child))
            body.append(Literal(Atom(temp_pred[child], args)))
        if node == td.root:
            head: tuple[Atom, ...] = rule.head
        else:
            args = tuple(Variable(v) for v in temp_args(node))
            head = (Atom(temp_pred[node], args),)
        emitted, fresh = _repair_safety(Rule(head, tuple(body)), rule, pool, rule_index)
        node_rules.append(emitted)
        dom_rules.extend(fresh)
    return node_rules, dom_rules


def rewrite_weak_constraint(
    rule: Rule, namer: FreshNamer, rule_index: int = 0
) -> tuple[Rule, Rule]:
    """Rewrite ``:~ body. [w@l, t]`` into a temp rule and a minimal weak
    constraint over the temp atom.

    The temp atom carries the weight, the level, and the annotation terms,
    so the weak constraint needs nothing but the temp atom as its body.
    """
    if rule.cost is None:
        raise DecompositionError("not a weak constraint")
    cost = rule.cost
    pred = namer.temp_name(rule_index, "w")
    temp_atom = Atom(pred, (cost.weight, cost.level, *cost.terms))
    temp_rule = Rule((temp_atom,), rule.body)
    weak_rule = Rule((), (Literal(temp_atom),), cost)
    return temp_rule, weak_rule


def rewrite_aggregate(
    rule: Rule, aggregate: Aggregate, namer: FreshNamer, rule_index: int = 0
) -> tuple[Rule, list[Rule]]:
    """Split off the part of an aggregate's condition that is disconnected
    from the rest of the rule.

    Per element: condition atoms sharing a variable with the rest of the
    rule stay; when at least two atoms remain on the other side, they move
    into a fresh rule projecting the element's carried terms plus the
    variables shared with the kept part, and the condition references the
    projection instead.  Returns the rule unchanged when nothing is worth
    splitting; otherwise the second component holds the projection rules
    followed by any domain rules that keep them safe.
    """
    for position, elem in enumerate(rule.body):
        if elem == aggregate:
            pool = _DomainPool(namer)
            modified, temps, doms, _ = _rewrite_aggregate_at(
                rule, position, namer, rule_index, 0, pool
            )
            return modified, temps + doms
    raise DecompositionError("aggregate does not occur in the rule body")


def _rewrite_aggregate_at(
    rule: Rule,
    position: int,
    namer: FreshNamer,
    rule_index: int,
    counter: int,
    pool: _DomainPool,
) -> tuple[Rule, list[Rule], list[Rule], int]:
    aggregate = rule.body[position]
    assert isinstance(aggregate, Aggregate)
    for element in aggregate.elements:
        if any(isinstance(c, Aggregate) for c in element.condition):
            raise UnsupportedConstructError("nested aggregates cannot be rewritten")

    shared: set[str] = set()
    for atom in rule.head:
        shared |= vars_of(atom)
    if rule.cost is not None:
        shared |= vars_of(rule.cost)
    for i, other in enumerate(rule.body):
        if i != position:
            shared |= vars_of(other)

    new_elements: list[AggregateElement] = []
    temp_rules: list[Rule] = []
    dom_rules: list[Rule] = []
    for element in aggregate.elements:
        kept = [c for c in element.condition if vars_of(c) & shared]
        moved = [c for c in element.condition if not vars_of(c) & shared]
        if len(moved) <= 1:
            new_elements.append(element)
            continue
        moved_vars: set[str] = set().union(*(vars_of(c) for c in moved))
        kept_vars: set[str] = set().union(*(vars_of(c) for c in kept)) if kept else set()
        term_vars: set[str] = set()
        for t in element.terms:
            term_vars |= vars_of(t)
        carried = [t for t in element.terms if vars_of(t) & moved_vars]
        joint = (moved_vars & (kept_vars | term_vars)) - shared
        args = list(dict.fromkeys(carried))
        for name in sorted(joint):
            if Variable(name) not in args:
                args.append(Variable(name))
        pred = namer.temp_name(rule_index, f"a{counter}")
        counter += 1
        temp_atom = Atom(pred, tuple(args))
        # variables of the projection bound only in the kept part need a
        # domain predicate; search the element's condition before the body
        context = Rule((), element.condition + rule.body)
        repaired, fresh = _repair_safety(
            Rule((temp_atom,), tuple(moved)), context, pool, rule_index
        )
        temp_rules.append(repaired)
        dom_rules.extend(fresh)
        new_elements.append(
            AggregateElement(element.terms, tuple(kept) + (Literal(temp_atom),))
        )
    if not temp_rules:
        return rule, [], [], counter
    new_aggregate = Aggregate(
        aggregate.guard, aggregate.relation, aggregate.func, tuple(new_elements)
    )
    body = rule.body[:position] + (new_aggregate,) + rule.body[position + 1 :]
    return Rule(rule.head, body, rule.cost), temp_rules, dom_rules, counter


def _rewrite_all_aggregates(
    rule: Rule, namer: FreshNamer, rule_index: int, pool: _DomainPool
) -> tuple[Rule, list[Rule], list[Rule]]:
    counter = 0
    temps: list[Rule] = []
    doms: list[Rule] = []
    current = rule
    for position in range(len(rule.body)):
        if isinstance(current.body[position], Aggregate):
            current, fresh, fresh_doms, counter = _rewrite_aggregate_at(
                current, position, namer, rule_index, counter, pool
            )
            temps.extend(fresh)
            doms.extend(fresh_doms)
    return current, temps, doms


@dataclass(frozen=True, slots=True)
class RuleReport:
    """Per-rule decomposition summary."""

    rule_index: int
    width: int
    bag_count: int
    rules_emitted: int
    domain_rules: int
    bags: tuple[frozenset[str], ...]


@dataclass(frozen=True, slots=True)
class DecompositionReport:
    rows: tuple[RuleReport, ...]

    @property
    def max_width(self) -> int:
        return max((row.width for row in self.rows), default=-1)


_SEED_MIX = 2654435761


def _rule_seed(seed: int, rule_index: int, sub: int = 0) -> int:
    """Per-rule seed so parallel and serial processing agree."""
    return (seed * 6364136223846793005 + (rule_index + 1) * _SEED_MIX + sub) & ((1 << 64) - 1)


def _decompose_for(
    rule: Rule, heuristic: str, seed: int, include_head_clique: bool
) -> TreeDecomposition:
    graph = build(rule, include_head_clique=include_head_clique)
    order = elimination_order(graph, heuristic, seed)
    td = decomposition_from_order(graph, order)
    if include_head_clique:
        head_vars: set[str] = set()
        for atom in rule.head:
            head_vars |= vars_of(atom)
        td = ensure_head_root(td, head_vars)
    return td


def decompose_program(
    program: Program,
    *,
    heuristic: str = "miw",
    seed: int = 0,
    include_head_clique: bool = True,
    enabled: bool = True,
) -> tuple[Program, DecompositionReport]:
    """Apply the full rewriting to every rule of ``program``.

    Per rule: weak-constraint rewriting, then aggregate splitting, then
    tree decomposition and rule splitting.  Facts and rules whose variable
    graph is complete pass through verbatim.  With ``enabled`` unset the
    input program is returned unchanged while the report is still
    computed.  Deterministic given the options.
    """
    namer = FreshNamer(forbidden={name for name, _ in schema_of(program)})
    pool = _DomainPool(namer)
    out: list[Rule] = []
    rows: list[RuleReport] = []
    for index, rule in enumerate(program.rules):
        if rule.cost is not None:
            working, weak_rule = rewrite_weak_constraint(rule, namer, index)
        else:
            working, weak_rule = rule, None
        td = _decompose_for(working, heuristic, _rule_seed(seed, index), include_head_clique)

        if not enabled:
            out.append(rule)
            rows.append(RuleReport(index, td.width, len(td.bags), 1, 0, _preorder_bags(td)))
            continue

        modified, agg_temps, agg_doms = _rewrite_all_aggregates(working, namer, index, pool)
        # aggregate splitting only touches aggregate internals, so the
        # decomposition computed for the unsplit rule still applies
        node_rules, dom_rules = _split_rule(
            modified, td, namer, index, not include_head_clique, pool
        )

        agg_rules: list[Rule] = []
        for sub, temp in enumerate(agg_temps, start=1):
            sub_td = _decompose_for(
                temp, heuristic, _rule_seed(seed, index, sub), include_head_clique
            )
            sub_nodes, sub_doms = _split_rule(
                temp, sub_td, namer, index, not include_head_clique, pool
            )
            agg_rules.extend(sub_nodes)
            agg_doms.extend(sub_doms)

        untouched = modified == working and len(node_rules) == 1 and not (
            dom_rules or agg_rules or agg_doms
        )
        if untouched:
            emitted = [rule]
        else:
            emitted = node_rules + dom_rules + agg_rules + agg_doms
            if weak_rule is not None:
                emitted.append(weak_rule)
        out.extend(emitted)
        rows.append(
            RuleReport(
                index,
                td.width,
                len(td.bags),
                len(emitted),
                len(dom_rules) + len(agg_doms),
                _preorder_bags(td),
            )
        )
    return Program(tuple(out)), DecompositionReport(tuple(rows))


def _preorder_bags(td: TreeDecomposition) -> tuple[frozenset[str], ...]:
    return tuple(td.bags[node] for node in td.preorder())
