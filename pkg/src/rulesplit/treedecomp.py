"""Tree decompositions of rule graphs via elimination-ordering heuristics.

Three classic heuristics produce elimination orders:

* ``mcs`` (maximum cardinality search): repeatedly visit the vertex with
  the most already-visited neighbors; the elimination order is the
  reverse of the visit order.
* ``mf`` (minimum fill): eliminate the vertex whose elimination adds the
  fewest fill edges.
* ``miw`` (minimum induced width): eliminate the vertex of minimum
  current degree.

Ties are broken uniformly at random with a 64-bit linear congruential
generator (Knuth's MMIX constants) rather than the platform RNG, so runs
are reproducible everywhere given the same seed.

An elimination order turns into a decomposition the standard way: the bag
of v is v plus its not-yet-eliminated neighbors in the fill graph, and the
bag's parent is the bag of the earliest-eliminated of those neighbors.
Bags comparable by inclusion are then merged, which keeps widths intact
and trims the node count.
"""

from __future__ import annotations

from dataclasses import dataclass

from .rulegraph import RuleGraph

HEURISTICS = ("mcs", "mf", "miw")


class Lcg:
    """Reproducible 64-bit linear congruential generator.

    state' = (6364136223846793005 * state + 1442695040888963407) mod 2^64,
    with the top 31 bits of the new state used as output.
    """

    MULTIPLIER = 6364136223846793005
    INCREMENT = 1442695040888963407
    MASK = (1 << 64) - 1

    def __init__(self, seed: int):
        self._state = seed & self.MASK

    def next(self) -> int:
        self._state = (self._state * self.MULTIPLIER + self.INCREMENT) & self.MASK
        return self._state >> 33

    def pick(self, count: int) -> int:
        """Index into a sequence of ``count`` candidates."""
        if count <= 0:
            raise ValueError("nothing to pick from")
        return self.next() % count


class DecompositionError(Exception):
    """Raised on invalid inputs to decomposition operations."""


@dataclass(frozen=True, slots=True)
class TreeDecomposition:
    """A rooted tree of bags; node ids index ``bags`` and ``children``."""

    bags: tuple[frozenset[str], ...]
    children: tuple[tuple[int, ...], ...]
    root: int

    @property
    def width(self) -> int:
        """Largest bag size minus one; -1 for a single empty bag."""
        return max(len(bag) for bag in self.bags) - 1

    def parents(self) -> dict[int, int | None]:
        parent: dict[int, int | None] = {self.root: None}
        stack = [self.root]
        while stack:
            node = stack.pop()
            for child in self.children[node]:
                parent[child] = node
                stack.append(child)
        return parent

    def depths(self) -> dict[int, int]:
        depth = {self.root: 0}
        stack = [self.root]
        while stack:
            node = stack.pop()
            for child in self.children[node]:
                depth[child] = depth[node] + 1
                stack.append(child)
        return depth

    def preorder(self) -> list[int]:
        order = []
        stack = [self.root]
        while stack:
            node = stack.pop()
            order.append(node)
            stack.extend(reversed(self.children[node]))
        return order


def elimination_order(graph: RuleGraph, heuristic: str, seed: int) -> list[str]:
    """A permutation of the graph's vertices chosen by ``heuristic``.

    Deterministic given (graph, heuristic, seed); ties among equally
    scored vertices are broken by the seeded LCG.
    """
    if heuristic not in HEURISTICS:
        raise ValueError(f"unknown heuristic {heuristic!r}, expected one of {HEURISTICS}")
    rng = Lcg(seed)
    adj = graph.neighbors()
    if heuristic == "mcs":
        return _mcs_order(adj, rng)
    return _greedy_elimination(adj, rng, fill_score=(heuristic == "mf"))


def _choose(candidates: list[str], rng: Lcg) -> str:
    if len(candidates) == 1:
        return candidates[0]
    return candidates[rng.pick(len(candidates))]


def _mcs_order(adj: dict[str, set[str]], rng: Lcg) -> list[str]:
    visited: list[str] = []
    chosen: set[str] = set()
    weight = {v: 0 for v in adj}
    remaining = sorted(adj)
    while remaining:
        best = max(weight[v] for v in remaining)
        v = _choose([u for u in remaining if weight[u] == best], rng)
        visited.append(v)
        chosen.add(v)
        remaining.remove(v)
        for u in adj[v]:
            if u not in chosen:
                weight[u] += 1
    return visited[::-1]


def _greedy_elimination(adj: dict[str, set[str]], rng: Lcg, fill_score: bool) -> list[str]:
    work = {v: set(ns) for v, ns in adj.items()}
    order: list[str] = []
    while work:
        scores: dict[str, int] = {}
        for v in sorted(work):
            if fill_score:
                ns = sorted(work[v])
                scores[v] = sum(
                    1
                    for i in range(len(ns))
                    for j in range(i + 1, len(ns))
                    if ns[j] not in work[ns[i]]
                )
            else:
                scores[v] = len(work[v])
        best = min(scores.values())
        v = _choose([u for u in sorted(work) if scores[u] == best], rng)
        order.append(v)
        neighbors = sorted(work[v])
        for i, a in enumerate(neighbors):
            for b in neighbors[i + 1 :]:
                work[a].add(b)
                work[b].add(a)
        for u in neighbors:
            work[u].discard(v)
        del work[v]
    return order


def decomposition_from_order(graph: RuleGraph, order: list[str]) -> TreeDecomposition:
    """Build a valid decomposition whose width is the induced width of
    ``order``; comparable adjacent bags are merged afterwards."""
    if sorted(order) != sorted(graph.vertices):
        raise DecompositionError("order must be a permutation of the graph vertices")
    if not order:
        return TreeDecomposition((frozenset(),), ((),), 0)

    position = {v: i for i, v in enumerate(order)}
    work = graph.neighbors()
    bags: list[frozenset[str]] = []
    for v in order:
        later = sorted(work[v])
        bags.append(frozenset([v, *later]))
        for i, a in enumerate(later):
            for b in later[i + 1 :]:
                work[a].add(b)
                work[b].add(a)
        for u in later:
            work[u].discard(v)
        del work[v]

    # parent of bag i: the bag of the earliest-eliminated other member
    parent: list[int | None] = []
    for i, bag in enumerate(bags):
        rest = [position[u] for u in bag if u != order[i]]
        parent.append(min(rest) if rest else None)

    roots = [i for i, p in enumerate(parent) if p is None]
    if len(roots) > 1:
        # disconnected graph: join the component roots under a fresh empty bag
        synthetic = len(bags)
        bags.append(frozenset())
        parent.append(None)
        for r in roots:
            parent[r] = synthetic
        root = synthetic
    else:
        root = roots[0]

    return _simplify(bags, parent, root)


def _simplify(
    bags: list[frozenset[str]], parent: list[int | None], root: int
) -> TreeDecomposition:
    """Contract tree edges whose endpoint bags are comparable by inclusion."""
    alive = set(range(len(bags)))
    changed = True
    while changed:
        changed = False
        for node in sorted(alive):
            p = parent[node]
            if p is None:
                continue
            if bags[node] <= bags[p]:
                # splice the node out, handing its children to the parent
                for child in alive:
                    if parent[child] == node:
                        parent[child] = p
                alive.remove(node)
                changed = True
                break
            if bags[p] <= bags[node]:
                # the node replaces its parent
                for child in list(alive):
                    if parent[child] == p and child != node:
                        parent[child] = node
                parent[node] = parent[p]
                alive.remove(p)
                if p == root:
                    root = node
                changed = True
                break

    renumber = {old: new for new, old in enumerate(sorted(alive))}
    new_bags = tuple(bags[old] for old in sorted(alive))
    children: list[list[int]] = [[] for _ in alive]
    for old in sorted(alive):
        p = parent[old]
        if p is not None:
            children[renumber[p]].append(renumber[old])
    return TreeDecomposition(new_bags, tuple(tuple(c) for c in children), renumber[root])


def validate(td: TreeDecomposition, graph: RuleGraph) -> bool:
    """Check vertex cover, edge cover, and connectedness."""
    n = len(td.bags)
    if len(td.children) != n or not (0 <= td.root < n):
        return False
    # the children arrays must describe a tree rooted at td.root
    seen = set()
    stack = [td.root]
    while stack:
        node = stack.pop()
        if node in seen:
            return False
        seen.add(node)
        stack.extend(td.children[node])
    if seen != set(range(n)):
        return False

    for v in graph.vertices:
        if not any(v in bag for bag in td.bags):
            return False
    for a, b in graph.edges:
        if not any(a in bag and b in bag for bag in td.bags):
            return False

    # connectedness: nodes containing v induce a connected subtree
    undirected: dict[int, set[int]] = {i: set() for i in range(n)}
    for node in range(n):
        for child in td.children[node]:
            undirected[node].add(child)
            undirected[child].add(node)
    for v in graph.vertices:
        holders = {i for i, bag in enumerate(td.bags) if v in bag}
        start = next(iter(holders))
        reached = {start}
        stack = [start]
        while stack:
            node = stack.pop()
            for other in undirected[node]:
                if other in holders and other not in reached:
                    reached.add(other)
                    stack.append(other)
        if reached != holders:
            return False
    return True


def ensure_head_root(td: TreeDecomposition, head_vars: set[str]) -> TreeDecomposition:
    """Re-root the decomposition at a bag containing all of ``head_vars``.

    Bags and tree edges are unchanged; only the orientation flips.  Fails
    when no bag contains the head variables (which cannot happen when the
    rule graph carried the head clique).
    """
    if not head_vars:
        return td
    new_root = None
    for i, bag in enumerate(td.bags):
        if head_vars <= bag:
            new_root = i
            break
    if new_root is None:
        raise DecompositionError(f"no bag contains the head variables {sorted(head_vars)}")
    if new_root == td.root:
        return td

    undirected: dict[int, set[int]] = {i: set() for i in range(len(td.bags))}
    for node in range(len(td.bags)):
        for child in td.children[node]:
            undirected[node].add(child)
            undirected[child].add(node)
    children: list[list[int]] = [[] for _ in td.bags]
    seen = {new_root}
    stack = [new_root]
    while stack:
        node = stack.pop()
        for other in sorted(undirected[node]):
            if other not in seen:
                seen.add(other)
                children[node].append(other)
                stack.append(other)
    return TreeDecomposition(td.bags, tuple(tuple(c) for c in children), new_root)
