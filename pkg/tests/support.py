"""Shared helpers for the test suite: independent oracles and generators.

The treewidth oracles here deliberately avoid the package's own
elimination machinery: ``exact_treewidth`` runs a subset DP over the
reachability characterization of elimination, and ``treewidth_by_orders``
brute-forces every permutation with a standalone fill simulation.
"""

from __future__ import annotations

import random
from itertools import permutations

from rulesplit.rulegraph import RuleGraph


def induced_width(graph: RuleGraph, order: list[str]) -> int:
    """Width of eliminating ``order`` front to back, simulated directly."""
    adj = {v: set(ns) for v, ns in graph.neighbors().items()}
    width = -1
    for v in order:
        later = adj[v]
        width = max(width, len(later))
        for a in later:
            for b in later:
                if a != b:
                    adj[a].add(b)
        for u in later:
            u_set = adj[u]
            u_set.discard(v)
        del adj[v]
    return width


def treewidth_by_orders(graph: RuleGraph) -> int:
    """Exact treewidth by enumerating every elimination order (tiny graphs)."""
    verts = sorted(graph.vertices)
    if not verts:
        return -1
    return min(induced_width(graph, list(p)) for p in permutations(verts))


def exact_treewidth(graph: RuleGraph) -> int:
    """Exact treewidth via DP over vertex subsets.

    f(S) is the best width achievable when the vertices of S are
    eliminated first; eliminating v after S costs the number of vertices
    outside S ∪ {v} reachable from v through S.
    """
    verts = sorted(graph.vertices)
    n = len(verts)
    if n == 0:
        return -1
    index = {v: i for i, v in enumerate(verts)}
    adj = [0] * n
    for a, b in graph.edges:
        adj[index[a]] |= 1 << index[b]
        adj[index[b]] |= 1 << index[a]

    def cost(eliminated: int, v: int) -> int:
        seen = 1 << v
        frontier = [v]
        reach = 0
        while frontier:
            u = frontier.pop()
            rest = adj[u] & ~seen
            while rest:
                low = rest & -rest
                rest ^= low
                w = low.bit_length() - 1
                seen |= low
                if eliminated >> w & 1:
                    frontier.append(w)
                else:
                    reach |= low
        return bin(reach & ~(1 << v)).count("1")

    f = [0] * (1 << n)
    for subset in range(1, 1 << n):
        best = n
        rest = subset
        while rest:
            low = rest & -rest
            rest ^= low
            v = low.bit_length() - 1
            prev = subset ^ low
            best = min(best, max(f[prev], cost(prev, v)))
        f[subset] = best
    return f[(1 << n) - 1]


def random_graph(rng: random.Random, max_vertices: int = 12, edge_prob: float = 0.3) -> RuleGraph:
    n = rng.randint(0, max_vertices)
    verts = [f"V{i}" for i in range(n)]
    edges = {
        tuple(sorted((verts[i], verts[j])))
        for i in range(n)
        for j in range(i + 1, n)
        if rng.random() < edge_prob
    }
    return RuleGraph(frozenset(verts), frozenset(edges))


def chain_program_text(n: int, domain: int = 3) -> str:
    """h(X1) over an (n-1)-step chain of e-atoms, plus all e-facts."""
    body = ", ".join(f"e(X{i},X{i+1})" for i in range(1, n))
    facts = "\n".join(
        f"e({i},{j})." for i in range(1, domain + 1) for j in range(1, domain + 1)
    )
    return f"h(X1) :- {body}.\n{facts}\n"


def random_program_text(seed: int) -> str:
    """A small random safe program; used by the equivalence suite.

    Seeds 0-29 carry one count- or sum-aggregate, seeds 30-49 one weak
    constraint.  Programs pair a few facts over e/2 and f/1 with up to
    four derived rules mixing negation, comparisons, and arithmetic; at
    least one rule has a path- or star-shaped body so the rewriting has
    something to split.
    """
    rng = random.Random(seed * 7919 + 17)
    domain = rng.choice([2, 2, 3])
    lines: list[str] = []

    pairs = [(i, j) for i in range(1, domain + 1) for j in range(1, domain + 1)]
    rng.shuffle(pairs)
    for i, j in pairs[: rng.randint(2, 4)]:
        lines.append(f"e({i},{j}).")
    singles = list(range(1, domain + 1))
    rng.shuffle(singles)
    for i in singles[: rng.randint(1, domain)]:
        lines.append(f"f({i}).")

    def chain_rule() -> str:
        extras = []
        if rng.random() < 0.6:
            extras.append("not e(D,A)")
        if rng.random() < 0.4:
            extras.append(rng.choice(["A != C", "B <= C", "A < D"]))
        body = ["e(A,B)", "e(B,C)", "e(C,D)"] + extras
        head = rng.choice(["big(A,D)", "big(A,C)"])
        return f"{head} :- {', '.join(body)}."

    def star_rule() -> str:
        body = ["e(A,B)", "e(A,C)", "f(B)"]
        if rng.random() < 0.5:
            body.append("not f(C)")
        return f"hub(A) :- {', '.join(body)}."

    def arith_rule() -> str:
        expr = rng.choice(["B+C", "B*C", "C-B"])
        body = ["e(A,B)", "e(B,C)", f"S = {expr}"]
        if rng.random() < 0.4:
            body.append("not f(S)")
        return f"val(A,S) :- {', '.join(body)}."

    def loop_rules() -> list[str]:
        return ["pick(A) :- f(A), not drop(A).", "drop(A) :- f(A), not pick(A)."]

    def aggregate_rule() -> str:
        func = rng.choice(["count", "sum"])
        guard = rng.randint(1, 2)
        condition = "e(A,B), e(B,C), f(C)"
        return f"good(A) :- f(A), {guard} <= #{func}{{B : {condition}}}."

    def weak_rule() -> str:
        weight = rng.choice(["1", "2", "A"])
        level = rng.choice(["0", "0", "1"])
        body = ["e(A,B)", "e(B,C)"]
        if rng.random() < 0.5:
            body.append("not f(C)")
        return f":~ {', '.join(body)}. [{weight}@{level}, A, C]"

    lines.append(chain_rule())
    roll = rng.random()
    if roll < 0.25:
        lines.append(star_rule())
    elif roll < 0.45:
        lines.append(arith_rule())
    elif roll < 0.70:
        lines.extend(loop_rules())
    if seed < 30:
        lines.append(aggregate_rule())
    elif seed < 50:
        lines.append(weak_rule())
    return "\n".join(lines) + "\n"
