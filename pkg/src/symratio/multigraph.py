"""Oriented finite multigraphs and their spanning trees and 2-forests.

Edge subsets are plain ``frozenset`` objects of edge ids. Vertex partitions
are :class:`VertexPartition` instances normalised so that equal partitions
compare equal.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import cached_property, lru_cache
from itertools import combinations
from typing import Iterable, Iterator, Sequence

EdgeSubset = frozenset  # frozenset[int] of edge ids


class NotConnectedError(ValueError):
    pass


class DisjointSet:
    """Union-find over ``0..n-1`` with path halving."""

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.count = n

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if ra < rb:
            ra, rb = rb, ra
        self.parent[ra] = rb
        self.count -= 1
        return True

    def labels(self) -> list[int]:
        return [self.find(i) for i in range(len(self.parent))]


@dataclass(frozen=True)
class VertexPartition:
    blocks: tuple[frozenset[int], ...]

    @classmethod
    def of(cls, blocks: Iterable[Iterable[int]], n: int | None = None) -> "VertexPartition":
        fb = [frozenset(b) for b in blocks]
        if any(not b for b in fb):
            raise ValueError("empty block in partition")
        seen: set[int] = set()
        for b in fb:
            if seen & b:
                raise ValueError("partition blocks overlap")
            seen |= b
        if n is not None and seen != set(range(n)):
            raise ValueError("partition does not cover all vertices")
        return cls(tuple(sorted(fb, key=min)))

    @classmethod
    def from_labels(cls, labels: Sequence) -> "VertexPartition":
        groups: dict = {}
        for v, lab in enumerate(labels):
            groups.setdefault(lab, set()).add(v)
        return cls.of(groups.values())

    def __len__(self) -> int:
        return len(self.blocks)

    def __iter__(self) -> Iterator[frozenset[int]]:
        return iter(self.blocks)

    @cached_property
    def block_index(self) -> dict[int, int]:
        return {v: i for i, b in enumerate(self.blocks) for v in b}

    def is_trivial(self) -> bool:
        """True if every block is a singleton."""
        return all(len(b) == 1 for b in self.blocks)

    def refine(self, other: "VertexPartition") -> "VertexPartition":
        """Common refinement (meet) of two partitions of the same set."""
        a, b = self.block_index, other.block_index
        return VertexPartition.from_labels([(a[v], b[v]) for v in sorted(a)])

    def as_lists(self) -> list[list[int]]:
        return [sorted(b) for b in self.blocks]


@dataclass(frozen=True)
class Multigraph:
    """Oriented multigraph on vertices ``0..n-1``.

    ``edges[i] = (tail, head)`` is edge ``i``. Parallel edges and self-loops
    are allowed; connectivity is only checked when an operation needs it.
    """

    n: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple((int(t), int(h)) for t, h in self.edges))
        if self.n < 0:
            raise ValueError("negative vertex count")
        for i, (t, h) in enumerate(self.edges):
            if not (0 <= t < self.n and 0 <= h < self.n):
                raise ValueError(f"edge {i} has an endpoint outside 0..{self.n - 1}")

    @property
    def m(self) -> int:
        return len(self.edges)

    def tail(self, e: int) -> int:
        return self.edges[e][0]

    def head(self, e: int) -> int:
        return self.edges[e][1]

    def is_loop(self, e: int) -> bool:
        t, h = self.edges[e]
        return t == h

    @cached_property
    def loops(self) -> frozenset[int]:
        return frozenset(e for e in range(self.m) if self.is_loop(e))

    @cached_property
    def all_edges(self) -> frozenset[int]:
        return frozenset(range(self.m))

    def complement(self, s: Iterable[int]) -> frozenset[int]:
        return self.all_edges - frozenset(s)

    def components(self, edge_subset: Iterable[int] | None = None) -> VertexPartition:
        """Connected components of the spanning subgraph on ``edge_subset``."""
        if isinstance(edge_subset, frozenset):
            return _components(self, edge_subset)
        return self._components(edge_subset)

    def _components(self, edge_subset: Iterable[int] | None) -> VertexPartition:
        ds = DisjointSet(self.n)
        for e in range(self.m) if edge_subset is None else edge_subset:
            ds.union(*self.edges[e])
        return VertexPartition.from_labels(ds.labels())

    def is_connected(self) -> bool:
        return self.n > 0 and len(self.components()) == 1

    def induced_edges(self, vertices: Iterable[int], edge_subset: Iterable[int] | None = None) -> frozenset[int]:
        """Edges of ``edge_subset`` (default: all) with both endpoints in ``vertices``."""
        vs = set(vertices)
        pool = range(self.m) if edge_subset is None else edge_subset
        return frozenset(e for e in pool if self.edges[e][0] in vs and self.edges[e][1] in vs)

    def restrict(self, edge_subset: Iterable[int]) -> "Contraction":
        """Spanning subgraph keeping only ``edge_subset`` (ids renumbered in order)."""
        keep = sorted(set(edge_subset))
        sub = Multigraph(self.n, tuple(self.edges[e] for e in keep))
        return Contraction(sub, tuple(range(self.n)), tuple(keep))

    def key(self) -> tuple:
        return (self.n, self.edges)


@dataclass(frozen=True)
class Contraction:
    """A derived multigraph with its vertex map (old -> new) and edge map (new -> old)."""

    graph: Multigraph
    vertex_map: tuple[int, ...]
    edge_map: tuple[int, ...]

    @cached_property
    def edge_index(self) -> dict[int, int]:
        return {old: new for new, old in enumerate(self.edge_map)}

    def push(self, s: Iterable[int]) -> frozenset[int]:
        """Image of an old edge subset (edges that were removed are dropped)."""
        idx = self.edge_index
        return frozenset(idx[e] for e in s if e in idx)

    def pull(self, s: Iterable[int]) -> frozenset[int]:
        return frozenset(self.edge_map[e] for e in s)


@lru_cache(maxsize=1 << 17)
def _components(g: Multigraph, edge_subset: frozenset[int]) -> VertexPartition:
    return g._components(edge_subset)


def _require_connected(g: Multigraph) -> None:
    if not g.is_connected():
        raise NotConnectedError("graph not connected")


def genus(g: Multigraph) -> int:
    """First Betti number ``m - n + 1`` of a connected multigraph."""
    _require_connected(g)
    return g.m - g.n + 1


def is_acyclic(g: Multigraph, s: Iterable[int]) -> bool:
    ds = DisjointSet(g.n)
    return all(ds.union(*g.edges[e]) for e in s)


def _acyclic_subsets(g: Multigraph, size: int) -> Iterator[tuple[tuple[int, ...], DisjointSet]]:
    candidates = [e for e in range(g.m) if not g.is_loop(e)]
    for combo in combinations(candidates, size):
        ds = DisjointSet(g.n)
        if all(ds.union(*g.edges[e]) for e in combo):
            yield combo, ds


@lru_cache(maxsize=4096)
def _spanning_trees(g: Multigraph) -> tuple[frozenset[int], ...]:
    if g.n == 0:
        return ()
    return tuple(frozenset(c) for c, ds in _acyclic_subsets(g, g.n - 1) if ds.count == 1)


@lru_cache(maxsize=4096)
def _spanning_2forests(g: Multigraph) -> tuple[frozenset[int], ...]:
    return tuple(frozenset(c) for c, ds in _acyclic_subsets(g, g.n - 2) if ds.count == 2)


def spanning_trees(g: Multigraph) -> list[frozenset[int]]:
    """All spanning trees, in lexicographic order of their sorted edge ids.

    A disconnected graph has none; a ``RuntimeWarning`` flags that case.
    """
    if not g.is_connected():
        warnings.warn("graph not connected: no spanning trees", RuntimeWarning, stacklevel=2)
        return []
    return list(_spanning_trees(g))


def spanning_2forests(g: Multigraph) -> list[frozenset[int]]:
    """All spanning forests with exactly two components (``n - 2`` edges)."""
    if g.n < 2:
        raise ValueError("no 2-forest exists")
    return list(_spanning_2forests(g))


def is_spanning_tree(g: Multigraph, s: Iterable[int]) -> bool:
    s = frozenset(s)
    return len(s) == g.n - 1 and is_acyclic(g, s)


def is_spanning_2forest(g: Multigraph, s: Iterable[int]) -> bool:
    s = frozenset(s)
    return g.n >= 2 and len(s) == g.n - 2 and is_acyclic(g, s)


def forest_partition(g: Multigraph, f: Iterable[int]) -> VertexPartition:
    f = frozenset(f)
    if not is_spanning_2forest(g, f):
        raise ValueError(f"{sorted(f)} is not a spanning 2-forest")
    return g.components(f)


def crossing_edges(g: Multigraph, partition: VertexPartition) -> frozenset[int]:
    """Edges whose endpoints lie in different blocks (never self-loops)."""
    idx = partition.block_index
    return frozenset(e for e, (t, h) in enumerate(g.edges) if idx[t] != idx[h])


def contract(g: Multigraph, s: Iterable[int]) -> Contraction:
    """Identify the endpoints of every edge in ``s`` and drop those edges.

    Edges outside ``s`` survive (possibly as self-loops) with their relative
    order; new vertices are numbered by the smallest old vertex they contain.
    """
    s = frozenset(s)
    classes = g.components(s)
    vmap = tuple(classes.block_index[v] for v in range(g.n))
    kept = tuple(e for e in range(g.m) if e not in s)
    quotient = Multigraph(len(classes), tuple((vmap[g.edges[e][0]], vmap[g.edges[e][1]]) for e in kept))
    return Contraction(quotient, vmap, kept)
