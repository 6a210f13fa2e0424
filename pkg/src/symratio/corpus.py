"""Deterministic corpus of small connected multigraphs with scalar momenta."""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, permutations

from .multigraph import Multigraph
from .symanzik import MomentumAssignment

Shape = tuple[tuple[int, int], ...]  # sorted undirected edge list, u <= v


@lru_cache(maxsize=None)
def _perms(n: int) -> tuple[tuple[int, ...], ...]:
    return tuple(permutations(range(n)))


def canonical_shape(n: int, edges) -> Shape:
    """Lexicographically least relabelling of an undirected multigraph."""
    best = None
    for p in _perms(n):
        cand = tuple(sorted((p[u], p[v]) if p[u] <= p[v] else (p[v], p[u]) for u, v in edges))
        if best is None or cand < best:
            best = cand
    return best


def _connected(n: int, shape: Shape) -> bool:
    seen, stack = {0}, [0]
    adj = {v: [] for v in range(n)}
    for u, v in shape:
        adj[u].append(v)
        adj[v].append(u)
    while stack:
        for w in adj[stack.pop()]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == n


def connected_shapes(n: int, max_m: int) -> list[Shape]:
    """All connected loopless multigraphs on ``n`` vertices with ``n-1..max_m`` edges,
    one per isomorphism class, by adding one edge at a time and deduplicating."""
    pairs = list(combinations(range(n), 2)) if n > 1 else []
    level: set[Shape] = {()}
    found: list[Shape] = [()] if n == 1 else []
    for _ in range(max_m):
        nxt: set[Shape] = set()
        for shape in level:
            for pr in pairs:
                nxt.add(canonical_shape(n, shape + (pr,)))
        level = nxt
        found.extend(s for s in level if _connected(n, s))
    return sorted(found, key=lambda s: (len(s), s))


def random_shape(n: int, m: int, rng: random.Random) -> Shape:
    verts = list(range(n))
    rng.shuffle(verts)
    edges = [(verts[rng.randrange(i)], verts[i]) for i in range(1, n)]
    edges += [tuple(rng.sample(range(n), 2)) for _ in range(m - (n - 1))]
    return canonical_shape(n, edges)


@dataclass(frozen=True)
class CorpusItem:
    family: str
    graph: Multigraph
    momenta: MomentumAssignment

    @property
    def key(self) -> tuple:
        return (self.family, self.graph.n, self.graph.m, self.graph.edges)

    @property
    def name(self) -> str:
        return f"{self.family}:n{self.graph.n}:" + "-".join(f"{t}{h}" for t, h in self.graph.edges)


def _orient(shape, rng: random.Random) -> tuple[tuple[int, int], ...]:
    return tuple((v, u) if rng.random() < 0.5 else (u, v) for u, v in shape)


def _momenta(n: int, rng: random.Random) -> MomentumAssignment:
    vals = [rng.randint(-3, 3) for _ in range(n - 1)]
    return MomentumAssignment.scalar(vals + [-sum(vals)])


def build_corpus(
    max_n: int = 6,
    max_m: int = 10,
    seed: int = 0,
    exhaustive_n: int = 5,
    samples: int = 200,
    loop_graphs: int = 30,
) -> list[CorpusItem]:
    """Every connected loopless multigraph with ``2 <= n <= min(max_n, exhaustive_n)``
    and at most ``max_m`` edges, ``samples`` seeded distinct graphs for each
    larger ``n <= max_n``, and ``loop_graphs`` seeded graphs with self-loops;
    sorted by :attr:`CorpusItem.key`.

    Orientation and momenta are drawn from one generator seeded by ``seed``
    after the shapes are fixed, so the result depends only on the arguments.
    """
    shapes: list[tuple[str, int, Shape]] = []
    for n in range(2, min(max_n, exhaustive_n) + 1):
        shapes += [("all", n, s) for s in connected_shapes(n, max_m)]
    rng = random.Random(seed)
    for n in range(exhaustive_n + 1, max_n + 1):
        if n - 1 > max_m:
            break
        seen: set[Shape] = set()
        attempts = 0
        while len(seen) < samples and attempts < 50 * samples:
            attempts += 1
            seen.add(random_shape(n, rng.randint(n - 1, max_m), rng))
        shapes += [("sampled", n, s) for s in sorted(seen)]
    small = [(n, s) for fam, n, s in shapes if fam == "all" and n <= 4 and len(s) < max_m]
    for _ in range(loop_graphs if small else 0):
        n, s = small[rng.randrange(len(small))]
        room = max_m - len(s)
        loops = tuple((v, v) for v in (rng.randrange(n) for _ in range(rng.randint(1, min(2, room)))))
        shapes.append(("loops", n, tuple(sorted(s + loops))))

    items: dict[tuple, CorpusItem] = {}
    for family, n, shape in shapes:
        item = CorpusItem(family, Multigraph(n, _orient(shape, rng)), _momenta(n, rng))
        items.setdefault(item.key, item)
    return [items[k] for k in sorted(items)]
