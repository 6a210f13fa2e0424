"""The exchange graph between spanning trees and spanning 2-forests.

Side-1 vertices are ordered pairs ``(F, T)`` and side-2 vertices are pairs
``(T, F)`` of an edge-disjoint 2-forest ``F`` and spanning tree ``T``. Two
vertices are adjacent when one is obtained from the other by pivoting on a
single edge: ``(F, T) -- (F + e, T - e)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from itertools import combinations
from typing import Iterable, Iterator

from .multigraph import (
    DisjointSet,
    Multigraph,
    VertexPartition,
    contract,
    crossing_edges,
    is_spanning_2forest,
    is_spanning_tree,
    spanning_2forests,
    spanning_trees,
)

DEFAULT_BUDGET = 200_000


class BudgetExceeded(RuntimeError):
    def __init__(self, message: str, counts: dict | None = None):
        super().__init__(message)
        self.counts = counts or {}


class PivotError(ValueError):
    pass


def _key(s: frozenset[int]) -> tuple[int, ...]:
    return tuple(sorted(s))


@dataclass(frozen=True, order=True)
class ExchangeVertex:
    side: int
    first: frozenset[int] = field(compare=False)
    second: frozenset[int] = field(compare=False)
    sort_key: tuple = field(default=(), repr=False)

    @classmethod
    def make(cls, side: int, first: Iterable[int], second: Iterable[int]) -> "ExchangeVertex":
        a, b = frozenset(first), frozenset(second)
        return cls(side, a, b, (_key(a), _key(b)))

    @property
    def tree(self) -> frozenset[int]:
        return self.second if self.side == 1 else self.first

    @property
    def forest(self) -> frozenset[int]:
        return self.first if self.side == 1 else self.second

    @property
    def edges(self) -> frozenset[int]:
        return self.first | self.second

    def to_json(self) -> dict:
        return {"side": self.side, "first": sorted(self.first), "second": sorted(self.second)}


def pivot(g: Multigraph, v: ExchangeVertex, e: int) -> ExchangeVertex:
    """Move the tree edge ``e`` into the forest: ``(.., T, F) -> (.., F + e, T - e)``.

    The forest and tree swap slots, so the side flips. Pivoting twice on the
    same edge is the identity.
    """
    tree, forest = v.tree, v.forest
    if e not in tree:
        raise PivotError(f"edge {e} is not in the tree {sorted(tree)}")
    new_forest = tree - {e}
    new_tree = forest | {e}
    if e in forest or not is_spanning_tree(g, new_tree):
        raise PivotError(f"forest {sorted(forest)} plus edge {e} is not a spanning tree")
    if not is_spanning_2forest(g, new_forest):
        raise PivotError(f"tree {sorted(tree)} minus edge {e} is not a spanning 2-forest")
    if v.side == 2:
        return ExchangeVertex.make(1, new_forest, new_tree)
    return ExchangeVertex.make(2, new_tree, new_forest)


class ExchangeGraph:
    """Bipartite exchange graph with union-find components."""

    def __init__(self, graph: Multigraph, vertices: list[ExchangeVertex], adjacency: list[list[tuple[int, int]]]):
        self.graph = graph
        self.vertices = vertices
        self.adjacency = adjacency
        self.index = {v: i for i, v in enumerate(vertices)}
        ds = DisjointSet(len(vertices))
        for i, nbrs in enumerate(adjacency):
            for j, _ in nbrs:
                ds.union(i, j)
        roots = ds.labels()
        order: dict[int, int] = {}
        for r in roots:
            order.setdefault(r, len(order))
        self.component_of = [order[r] for r in roots]
        self.n_components = len(order)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @cached_property
    def n_edges(self) -> int:
        return sum(len(a) for a in self.adjacency) // 2

    def is_connected(self) -> bool:
        return self.n_components == 1

    @cached_property
    def components(self) -> list[list[int]]:
        comps: list[list[int]] = [[] for _ in range(self.n_components)]
        for i, c in enumerate(self.component_of):
            comps[c].append(i)
        return comps

    def edges(self) -> Iterator[tuple[int, int, int]]:
        """``(i, j, pivot_edge)`` with ``i < j``."""
        for i, nbrs in enumerate(self.adjacency):
            for j, e in nbrs:
                if i < j:
                    yield i, j, e

    def to_dot(self, name: str = "exchange") -> str:
        colors = {1: "lightblue", 2: "lightsalmon"}
        lines = [f"graph {name} {{", "  node [style=filled];"]
        for i, v in enumerate(self.vertices):
            a = ",".join(map(str, sorted(v.first))) or "-"
            b = ",".join(map(str, sorted(v.second))) or "-"
            lines.append(
                f'  v{i} [label="({a} | {b})", fillcolor={colors[v.side]}, '
                f'side={v.side}, component={self.component_of[i]}];'
            )
        for i, j, e in self.edges():
            lines.append(f'  v{i} -- v{j} [label="{e}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def exchange_vertex_count(g: Multigraph) -> int:
    trees, forests = spanning_trees(g), spanning_2forests(g)
    return 2 * sum(1 for f in forests for t in trees if f.isdisjoint(t))


def build_exchange_graph(g: Multigraph, budget: int | None = DEFAULT_BUDGET) -> ExchangeGraph:
    trees = spanning_trees(g)
    forests = spanning_2forests(g)
    tree_set = set(trees)
    pairs = [(f, t) for f in forests for t in trees if f.isdisjoint(t)]
    if budget is not None and 2 * len(pairs) > budget:
        raise BudgetExceeded(
            f"exchange graph has {2 * len(pairs)} vertices, budget is {budget}",
            {"vertices": 2 * len(pairs), "trees": len(trees), "forests": len(forests)},
        )
    side1 = [ExchangeVertex.make(1, f, t) for f, t in pairs]
    side2 = sorted(ExchangeVertex.make(2, t, f) for f, t in pairs)
    side1.sort()
    vertices = side1 + side2
    index = {v: i for i, v in enumerate(vertices)}
    adjacency: list[list[tuple[int, int]]] = [[] for _ in vertices]
    for i, v in enumerate(side1):
        f, t = v.first, v.second
        for e in sorted(t):
            new_tree = f | {e}
            if new_tree in tree_set:
                j = index[ExchangeVertex.make(2, new_tree, t - {e})]
                adjacency[i].append((j, e))
                adjacency[j].append((i, e))
    for nbrs in adjacency:
        nbrs.sort()
    return ExchangeGraph(g, vertices, adjacency)


@lru_cache(maxsize=4096)
def _quotient_exchange(g: Multigraph) -> ExchangeGraph:
    return build_exchange_graph(g, budget=None)


def restrict_edges(g: Multigraph, s: Iterable[int], vertices: Iterable[int]) -> frozenset[int]:
    """``S[X]``: the edges of ``s`` with both endpoints in ``vertices``."""
    return g.induced_edges(vertices, s)


def splits_as_tree_and_forest(g: Multigraph, g0: Iterable[int]) -> tuple[frozenset[int], frozenset[int]] | None:
    """A decomposition ``g0 = T + F`` into a spanning tree and 2-forest, if any."""
    g0 = frozenset(g0)
    if len(g0) != 2 * g.n - 3:
        return None
    for t in combinations(sorted(g0), g.n - 1):
        t = frozenset(t)
        if is_spanning_tree(g, t) and is_spanning_2forest(g, g0 - t):
            return t, g0 - t
    return None


def saturated_partition(g: Multigraph, g0: Iterable[int], check: bool = True) -> VertexPartition:
    """Partition of the vertices into maximal saturated sets of ``g0``.

    ``X`` is saturated when ``g0[X]`` has exactly ``2|X| - 2`` edges;
    singletons always are. Every vertex subset is tried, which is fine for
    the vertex counts handled here.
    """
    g0 = frozenset(g0)
    if check and splits_as_tree_and_forest(g, g0) is None:
        raise ValueError("edge set is not a disjoint union of a spanning tree and a spanning 2-forest")
    return _saturated_partition(g, g0)


@lru_cache(maxsize=65536)
def _saturated_partition(g: Multigraph, g0: frozenset[int]) -> VertexPartition:
    n = g.n
    ends = [(1 << g.edges[e][0]) | (1 << g.edges[e][1]) for e in g0]
    saturated = []
    for mask in range(1, 1 << n):
        size = mask.bit_count()
        if size == 1:
            saturated.append(mask)
            continue
        count = sum(1 for em in ends if em & mask == em)
        if count == 2 * size - 2:
            saturated.append(mask)
    maximal = [a for a in saturated if not any(a != b and a & b == a for b in saturated)]
    blocks = [frozenset(v for v in range(n) if mask >> v & 1) for mask in maximal]
    try:
        return VertexPartition.of(blocks, n)
    except ValueError as exc:
        raise AssertionError(f"maximal saturated sets do not partition V: {blocks}") from exc


def _components_without(g: Multigraph, tree: frozenset[int], forest: frozenset[int]) -> VertexPartition:
    """Components of ``tree`` with the edges crossing ``P(forest)`` removed."""
    cut = crossing_edges(g, g.components(forest))
    return g.components(tree - cut)


def _common_refinement(parts: Iterable[VertexPartition], n: int) -> VertexPartition:
    result = VertexPartition.of([range(n)])
    for p in parts:
        result = result.refine(p)
    return result


@dataclass(frozen=True)
class EquivalenceReport:
    side1: VertexPartition
    side2: VertexPartition
    saturated: VertexPartition

    @property
    def consistent(self) -> bool:
        return self.side1 == self.side2 == self.saturated

    @property
    def partition(self) -> VertexPartition:
        return self.side1


def vertex_equivalence(h: ExchangeGraph, component: int) -> EquivalenceReport:
    """The relation ``u ~ v`` (same component of ``T - E(P(F))`` for every member).

    Computed once from the side-1 members and once from the side-2 members;
    both should agree with the saturated partition of the component's ``G0``.
    """
    g = h.graph
    members = [h.vertices[i] for i in h.components[component]]
    if not members:
        raise ValueError("empty component")
    per_side = {}
    for side in (1, 2):
        parts = (_components_without(g, v.tree, v.forest) for v in members if v.side == side)
        per_side[side] = _common_refinement(parts, g.n)
    sat = saturated_partition(g, members[0].edges, check=False)
    return EquivalenceReport(per_side[1], per_side[2], sat)


@dataclass(frozen=True)
class ComponentProfile:
    g0: frozenset[int]
    blocks: VertexPartition
    trees: tuple[tuple[frozenset[int], frozenset[int]], ...]

    def matches(self, g: Multigraph, v: ExchangeVertex) -> bool:
        if v.edges != self.g0:
            return False
        for block, (t1, t2) in zip(self.blocks, self.trees):
            if restrict_edges(g, v.first, block) != t1 or restrict_edges(g, v.second, block) != t2:
                return False
        return True

    def block_edges(self) -> frozenset[int]:
        return frozenset().union(*(a | b for a, b in self.trees))

    def key(self) -> tuple:
        return (_key(self.g0), tuple(map(tuple, self.blocks.as_lists())),
                tuple((_key(a), _key(b)) for a, b in self.trees))

    def to_json(self) -> dict:
        return {
            "g0": sorted(self.g0),
            "blocks": self.blocks.as_lists(),
            "block_trees": [[sorted(a), sorted(b)] for a, b in self.trees],
        }


def _profile_of(g: Multigraph, v: ExchangeVertex) -> ComponentProfile:
    blocks = saturated_partition(g, v.edges, check=False)
    trees = tuple((restrict_edges(g, v.first, b), restrict_edges(g, v.second, b)) for b in blocks)
    return ComponentProfile(v.edges, blocks, trees)


def component_profile(h: ExchangeGraph, component: int) -> ComponentProfile:
    return _profile_of(h.graph, h.vertices[h.components[component][0]])


def contracted_exchange_check(h: ExchangeGraph, component: int, profile: ComponentProfile) -> bool:
    """Contract every block tree; the exchange graph of the quotient must be
    connected and isomorphic to the component via the induced map."""
    g = h.graph
    sub = g.restrict(profile.g0)
    quotient = contract(sub.graph, sub.push(profile.block_edges()))

    def image(v: ExchangeVertex) -> ExchangeVertex:
        return ExchangeVertex.make(v.side, quotient.push(sub.push(v.first)), quotient.push(sub.push(v.second)))

    hq = _quotient_exchange(quotient.graph)
    if not hq.is_connected():
        return False
    members = h.components[component]
    images = {i: image(h.vertices[i]) for i in members}
    if len(set(images.values())) != len(members) or set(images.values()) != set(hq.vertices):
        return False
    mapped = {frozenset((hq.index[images[i]], hq.index[images[j]])) for i in members for j, _ in h.adjacency[i]}
    target = {frozenset((i, j)) for i, j, _ in hq.edges()}
    return mapped == target


@dataclass
class ThmConnReport:
    n_vertices: int = 0
    n_edges: int = 0
    n_components: int = 0
    connected: bool = False
    splits: bool = False  # E(G) (loops removed) = T + F
    all_singletons: bool = False
    part1: bool = True
    part2: bool = True
    mismatches: int = 0
    no_isolated: bool = True
    g0_constant: bool = True
    pivots_cross_blocks: bool = True
    equivalence: bool = True
    contraction: bool = True
    within_budget: bool = True
    counterexample: str | None = None
    profiles: list[ComponentProfile] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.within_budget and all((
            self.part1, self.part2, self.no_isolated, self.g0_constant,
            self.pivots_cross_blocks, self.equivalence, self.contraction,
        ))

    @property
    def vacuous(self) -> bool:
        return self.within_budget and self.n_vertices == 0

    def _fail(self, attr: str, message: str) -> None:
        setattr(self, attr, False)
        if self.counterexample is None:
            self.counterexample = message

    def to_json(self) -> dict:
        return {
            "vertices": self.n_vertices,
            "edges": self.n_edges,
            "components": self.n_components,
            "connected": self.connected,
            "splits_as_tree_and_forest": self.splits,
            "saturated_sets_singletons": self.all_singletons,
            "part1": self.part1,
            "part2": self.part2,
            "mismatches": self.mismatches,
            "no_isolated_vertices": self.no_isolated,
            "g0_constant": self.g0_constant,
            "pivots_cross_blocks": self.pivots_cross_blocks,
            "equivalence": self.equivalence,
            "contraction": self.contraction,
            "within_budget": self.within_budget,
            "vacuous": self.vacuous,
            "passed": self.passed,
            "counterexample": self.counterexample,
            "profiles": [p.to_json() for p in self.profiles],
        }


def verify_thm_conn(
    g: Multigraph,
    budget: int | None = DEFAULT_BUDGET,
    check_contraction: bool = True,
    exchange: ExchangeGraph | None = None,
) -> ThmConnReport:
    """Check the component classification of the exchange graph on ``g``.

    Part (1): the exchange graph is connected iff the loop-free edge set
    splits as a spanning tree plus a spanning 2-forest whose saturated sets
    are all singletons. Part (2): each component is exactly the set of
    vertices predicted by its profile ``(G0, block trees)``, and distinct
    components have distinct profiles. Self-loops never lie in a tree or
    forest, so they are ignored for the splitting condition.
    """
    report = ThmConnReport()
    if exchange is None:
        try:
            exchange = build_exchange_graph(g, budget)
        except BudgetExceeded as exc:
            report.within_budget = False
            report.n_vertices = exc.counts.get("vertices", 0)
            report.counterexample = str(exc)
            return report
    h = exchange
    report.n_vertices = h.n_vertices
    report.n_edges = h.n_edges
    report.n_components = h.n_components if h.n_vertices else 0
    report.connected = h.n_vertices > 0 and h.is_connected()

    loopless = g.all_edges - g.loops
    report.splits = splits_as_tree_and_forest(g, loopless) is not None
    if report.splits:
        report.all_singletons = saturated_partition(g, loopless, check=False).is_trivial()
    if report.connected != (report.splits and report.all_singletons):
        report._fail("part1", f"connected={report.connected} but splits={report.splits}, "
                               f"singletons={report.all_singletons}")

    for i, nbrs in enumerate(h.adjacency):
        if not nbrs:
            report._fail("no_isolated", f"isolated vertex {h.vertices[i].to_json()}")

    predicted_sets: dict[tuple, set[int]] = {}
    for i, v in enumerate(h.vertices):
        predicted_sets.setdefault(_profile_of(g, v).key(), set()).add(i)

    seen_profiles: dict[tuple, int] = {}
    for c in range(report.n_components):
        members = h.components[c]
        profile = component_profile(h, c)
        report.profiles.append(profile)
        if any(h.vertices[i].edges != profile.g0 for i in members):
            report._fail("g0_constant", f"component {c}: E(A) + E(B) varies")
        key = profile.key()
        if key in seen_profiles:
            report._fail("part2", f"components {seen_profiles[key]} and {c} share a profile")
        seen_profiles[key] = c

        # profile data: blocks carry two disjoint trees covering g0[X]
        for block, (t1, t2) in zip(profile.blocks, profile.trees):
            sub = g.induced_edges(block, profile.g0)
            if t1 & t2 or (t1 | t2) != sub or len(t1) != len(block) - 1 or len(t2) != len(block) - 1:
                report._fail("part2", f"component {c}: block {sorted(block)} does not split into two trees")

        predicted = predicted_sets.get(key, set())
        actual = set(members)
        if predicted != actual:
            report.mismatches += len(predicted ^ actual)
            report._fail("part2", f"component {c}: predicted {len(predicted)} vertices, found {len(actual)}")

        cut = crossing_edges(g, profile.blocks)
        for i in members:
            for _, e in h.adjacency[i]:
                if e not in cut:
                    report._fail("pivots_cross_blocks", f"component {c}: pivot on edge {e} inside a block")

        eq = vertex_equivalence(h, c)
        if not eq.consistent:
            report._fail("equivalence", f"component {c}: side-1 {eq.side1.as_lists()}, "
                                        f"side-2 {eq.side2.as_lists()}, saturated {eq.saturated.as_lists()}")

        if check_contraction and not contracted_exchange_check(h, c, profile):
            report._fail("contraction", f"component {c}: contracted exchange graph is not isomorphic")
    return report
