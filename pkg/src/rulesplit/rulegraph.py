"""The variable graph of a rule.

Vertices are the rule's variables that occur outside aggregate expressions
(aggregate-local variables are invisible).  Variables co-occurring in a
body atom, comparison, or binding equality form a clique, as do the
non-local variables of each aggregate expression.  When requested, all
head variables form one additional clique, which guarantees that some bag
of any tree decomposition contains the whole head.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .ast import Rule, outer_vars, vars_of


@dataclass(frozen=True, slots=True)
class RuleGraph:
    """Undirected graph over variable names, no self-loops."""

    vertices: frozenset[str]
    edges: frozenset[tuple[str, str]]

    def __post_init__(self) -> None:
        for a, b in self.edges:
            if a == b or a not in self.vertices or b not in self.vertices:
                raise ValueError(f"bad edge ({a}, {b})")
            if a > b:
                raise ValueError("edges are stored as sorted pairs")

    def neighbors(self) -> dict[str, set[str]]:
        adj: dict[str, set[str]] = {v: set() for v in sorted(self.vertices)}
        for a, b in self.edges:
            adj[a].add(b)
            adj[b].add(a)
        return adj

    @property
    def is_complete(self) -> bool:
        n = len(self.vertices)
        return len(self.edges) == n * (n - 1) // 2


def _clique(vars_: set[str]) -> set[tuple[str, str]]:
    return {tuple(sorted(pair)) for pair in combinations(sorted(vars_), 2)}


def build(rule: Rule, include_head_clique: bool = True) -> RuleGraph:
    """Variable graph of ``rule``.

    With ``include_head_clique`` unset (the head-ignoring mode), head
    variables contribute no edges of their own; they usually remain
    vertices anyway because safe rules bind them in the positive body.
    """
    vertices = outer_vars(rule)
    edges: set[tuple[str, str]] = set()
    for elem in rule.body:
        # non-aggregate elements only have outer variables, so the
        # intersection only trims aggregate-local ones
        edges |= _clique(vars_of(elem) & vertices)
    if include_head_clique:
        head_vars: set[str] = set()
        for atom in rule.head:
            head_vars |= vars_of(atom)
        edges |= _clique(head_vars & vertices)
    return RuleGraph(frozenset(vertices), frozenset(edges))
