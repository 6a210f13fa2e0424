"""Variation of phi/psi under a bounded perturbation of the edge Gram form.

With ``Y = diag(y)`` and a bounded matrix ``A`` we compare

    f1 = det(M Y M^T),        f2 = det(N Y N^T),
    g1 = det(M (Y+A) M^T),    g2 = det(N (Y+A) N^T),

and certify along a scaling grid ``y = t * y0`` that ``g2/g1 - f2/f1`` stays
bounded. The bookkeeping goes through the triple graph: side 1 holds
``(F1, F2, T)`` and side 2 holds ``(T1, T2, F)``, adjacent when
``T = F + e``, ``F1 = T1 - e`` and ``F2 = T2 - e`` for one edge ``e``.
"""

from __future__ import annotations

import csv
import io
import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import product
from math import prod
from typing import Iterable, Sequence

from .exchange import BudgetExceeded, ExchangeVertex, build_exchange_graph
from .homology import (
    RationalMatrix,
    canonical_cycle_basis,
    det,
    gram,
    minor_det,
    momentum_lift,
)
from .multigraph import (
    DisjointSet,
    Multigraph,
    VertexPartition,
    contract,
    crossing_edges,
    spanning_2forests,
    spanning_trees,
)
from .symanzik import MomentumAssignment, phi_enum, psi_enum, q_of_forest

DEFAULT_TRIPLE_BUDGET = 200_000
DECADE_GRID = tuple(Fraction(10**k) for k in range(1, 7))


class ConditionViolated(ArithmeticError):
    """A perturbed Gram matrix is singular at some grid point."""


class IdentityViolation(AssertionError):
    pass


def _require_unit_scalar(mom: MomentumAssignment) -> None:
    if mom.dim != 1 or mom.form != ((Fraction(1),),):
        raise ValueError("variation needs scalar momenta with the unit form")


def _frac_tuple(xs: Iterable) -> tuple[Fraction, ...]:
    return tuple(Fraction(x) for x in xs)


@dataclass(frozen=True)
class PerturbationSpec:
    base: tuple[Fraction, ...]
    A: RationalMatrix
    bound: Fraction
    grid: tuple[Fraction, ...] = DECADE_GRID

    def __post_init__(self):
        object.__setattr__(self, "base", _frac_tuple(self.base))
        object.__setattr__(self, "grid", _frac_tuple(self.grid))
        object.__setattr__(self, "bound", Fraction(self.bound))
        m = len(self.base)
        if self.A.shape != (m, m):
            raise ValueError(f"perturbation must be {m}x{m}, got {self.A.shape}")
        if any(v <= 0 for v in self.base):
            raise ValueError("base weights must be positive")
        if self.bound <= 0:
            raise ValueError("bound must be positive")
        if any(abs(x) > self.bound for r in self.A.rows for x in r):
            raise ValueError(f"perturbation entry exceeds bound {self.bound}")
        if not self.grid or any(t <= 0 for t in self.grid):
            raise ValueError("grid must be nonempty and positive")
        if any(a >= b for a, b in zip(self.grid, self.grid[1:])):
            raise ValueError("grid must be strictly increasing")

    @property
    def m(self) -> int:
        return len(self.base)

    def weights(self, t) -> list[Fraction]:
        t = Fraction(t)
        return [t * v for v in self.base]

    def perturbed(self, t) -> RationalMatrix:
        return RationalMatrix.diag(self.weights(t)) + self.A


def sample_perturbation(m: int, bound, rng: random.Random, max_den: int = 16) -> RationalMatrix:
    """Entrywise uniform rationals in ``[-bound, bound]`` with denominators up to ``max_den``.

    Not symmetrized on purpose.
    """
    bound = Fraction(bound)
    rows = []
    for _ in range(m):
        row = []
        for _ in range(m):
            den = rng.randint(1, max_den)
            top = (bound * den).numerator // (bound * den).denominator
            row.append(Fraction(rng.randint(-top, top), den))
        rows.append(row)
    return RationalMatrix(rows, m)


def _extended(g: Multigraph, mom: MomentumAssignment) -> tuple[RationalMatrix, RationalMatrix]:
    _require_unit_scalar(mom)
    basis = canonical_cycle_basis(g)
    lift = momentum_lift(g, mom.coordinate(0))
    return basis.M, basis.M.vstack(lift.omega)


def eval_f(g: Multigraph, mom: MomentumAssignment, y: Sequence, check: bool = True) -> tuple[Fraction, Fraction]:
    """``(f1, f2)`` at ``y`` by determinants, optionally cross-checked by enumeration."""
    M, N = _extended(g, mom)
    w = RationalMatrix.diag(_frac_tuple(y))
    f1, f2 = det(gram(M, w)), det(gram(N, w))
    if check and (f1 != psi_enum(g).evaluate(y) or f2 != phi_enum(g, mom).evaluate(y)):
        raise IdentityViolation("determinant and enumeration disagree")
    return f1, f2


def eval_g(g: Multigraph, mom: MomentumAssignment, spec: PerturbationSpec, t) -> tuple[Fraction, Fraction]:
    """``(g1, g2)`` with ``Y = diag(t * y0)`` perturbed by ``A``."""
    M, N = _extended(g, mom)
    w = spec.perturbed(t)
    g1, g2 = det(gram(M, w)), det(gram(N, w))
    if g1 == 0 or g2 == 0:
        raise ConditionViolated(f"condition (ii) violated at t={t}")
    return g1, g2


@dataclass(frozen=True)
class TripleVertex:
    side: int
    parts: tuple[frozenset[int], frozenset[int], frozenset[int]]

    def to_json(self) -> dict:
        return {"side": self.side, "parts": [sorted(p) for p in self.parts]}


def triple_vertex_count(g: Multigraph) -> int:
    t, f = len(spanning_trees(g)), len(spanning_2forests(g))
    return f * f * t + t * t * f


class TripleGraph:
    """Bipartite triple graph; vertices are index triples into the tree and
    forest lists: side 1 ``(a, b, k)`` is ``(forests[a], forests[b], trees[k])``
    and side 2 ``(i, j, k)`` is ``(trees[i], trees[j], forests[k])``."""

    def __init__(self, g: Multigraph, mom: MomentumAssignment, budget: int | None = DEFAULT_TRIPLE_BUDGET):
        self.graph = g
        self.mom = mom
        trees = spanning_trees(g)
        forests = spanning_2forests(g)
        self.trees, self.forests = trees, forests
        nt, nf = len(trees), len(forests)
        total = nf * nf * nt + nt * nt * nf
        if budget is not None and total > budget:
            raise BudgetExceeded(
                f"triple graph has {total} vertices, budget is {budget}",
                {"vertices": total, "trees": nt, "forests": nf},
            )
        tree_idx = {t: i for i, t in enumerate(trees)}
        forest_idx = {f: i for i, f in enumerate(forests)}
        self.partitions = [g.components(f) for f in forests]
        self.forest_q = [q_of_forest(g, f, mom) for f in forests]

        keys = [(1, a, b, k) for a, b, k in product(range(nf), range(nf), range(nt))]
        offset = len(keys)
        keys += [(2, i, j, k) for i, j, k in product(range(nt), range(nt), range(nf))]
        self.keys = keys
        self.n_side1 = offset

        def side2_index(i, j, k):
            return offset + (i * nt + j) * nf + k

        def side1_index(a, b, k):
            return (a * nf + b) * nt + k

        adjacency: list[list[tuple[int, int]]] = [[] for _ in keys]
        special = [False] * len(keys)
        for idx in range(offset):
            _, a, b, _k = keys[idx]
            special[idx] = self.partitions[a] != self.partitions[b]
        for i, j, k in product(range(nt), range(nt), range(nf)):
            t1, t2, f = trees[i], trees[j], forests[k]
            me = side2_index(i, j, k)
            special[me] = any((f | {e}) in tree_idx for e in t1 ^ t2)
            for e in sorted((t1 & t2) - f):
                new_tree = f | {e}
                kt = tree_idx.get(new_tree)
                if kt is None:
                    continue
                other = side1_index(forest_idx[t1 - {e}], forest_idx[t2 - {e}], kt)
                adjacency[me].append((other, e))
                adjacency[other].append((me, e))
        for nbrs in adjacency:
            nbrs.sort()
        self.adjacency = adjacency
        self.special = special

        ds = DisjointSet(len(keys))
        for i, nbrs in enumerate(adjacency):
            for j, _ in nbrs:
                ds.union(i, j)
        order: dict[int, int] = {}
        self.component_of = []
        for r in ds.labels():
            self.component_of.append(order.setdefault(r, len(order)))
        self.n_components = len(order)

    def __len__(self) -> int:
        return len(self.keys)

    @cached_property
    def components(self) -> list[list[int]]:
        comps: list[list[int]] = [[] for _ in range(self.n_components)]
        for i, c in enumerate(self.component_of):
            comps[c].append(i)
        return comps

    def vertex(self, i: int) -> TripleVertex:
        side, a, b, k = self.keys[i]
        if side == 1:
            return TripleVertex(1, (self.forests[a], self.forests[b], self.trees[k]))
        return TripleVertex(2, (self.trees[a], self.trees[b], self.forests[k]))

    def q(self, i: int) -> Fraction | None:
        """``q(F)`` on side 2; ``q(F1)`` on non-special side 1; ``None`` otherwise."""
        side, a, b, k = self.keys[i]
        if side == 2:
            return self.forest_q[k]
        if self.special[i]:
            return None
        if self.forest_q[a] != self.forest_q[b]:
            raise IdentityViolation("vertex-equivalent forests with different q")
        return self.forest_q[a]

    def special_free_components(self) -> list[int]:
        return [c for c, members in enumerate(self.components) if not any(self.special[i] for i in members)]

    def edges(self):
        for i, nbrs in enumerate(self.adjacency):
            for j, e in nbrs:
                if i < j:
                    yield i, j, e


def build_triple_graph(g: Multigraph, mom: MomentumAssignment, budget: int | None = DEFAULT_TRIPLE_BUDGET) -> TripleGraph:
    return TripleGraph(g, mom, budget)


class Weights:
    """``xi`` and ``zeta`` on triple vertices at one point ``(t * y0, A)``."""

    def __init__(self, g: Multigraph, mom: MomentumAssignment, spec: PerturbationSpec, t):
        self.graph = g
        self.mom = mom
        self.t = Fraction(t)
        self.M, self.N = _extended(g, mom)
        self.y = spec.weights(t)
        self.W = spec.perturbed(t)
        self._minor: dict[tuple[frozenset, frozenset], Fraction] = {}
        self._detM: dict[frozenset, Fraction] = {}
        self._detN: dict[frozenset, Fraction] = {}
        self._q: dict[frozenset, Fraction] = {}

    def mono(self, s: Iterable[int]) -> Fraction:
        return prod((self.y[e] for e in s), start=Fraction(1))

    def perturbed_minor(self, rows: frozenset[int], cols: frozenset[int]) -> Fraction:
        key = (rows, cols)
        if key not in self._minor:
            self._minor[key] = minor_det(self.W, sorted(rows), sorted(cols))
        return self._minor[key]

    def det_m(self, cols: frozenset[int]) -> Fraction:
        if cols not in self._detM:
            self._detM[cols] = minor_det(self.M, None, sorted(cols))
        return self._detM[cols]

    def det_n(self, cols: frozenset[int]) -> Fraction:
        if cols not in self._detN:
            self._detN[cols] = minor_det(self.N, None, sorted(cols))
        return self._detN[cols]

    def q(self, forest: frozenset[int]) -> Fraction:
        if forest not in self._q:
            self._q[forest] = q_of_forest(self.graph, forest, self.mom)
        return self._q[forest]

    def xi_zeta(self, v: TripleVertex) -> tuple[Fraction, Fraction]:
        c = self.graph.complement
        a, b, s = v.parts
        ca, cb = c(a), c(b)
        xi = self.perturbed_minor(ca, cb) * self.mono(c(s))
        if not xi:
            return xi, xi
        if v.side == 1:
            return xi, self.det_n(ca) * self.det_n(cb) * xi
        return xi, self.det_m(ca) * self.det_m(cb) * self.q(s) * xi


def xi_zeta(g: Multigraph, mom: MomentumAssignment, v: TripleVertex, spec: PerturbationSpec, t) -> tuple[Fraction, Fraction]:
    return Weights(g, mom, spec, t).xi_zeta(v)


@dataclass
class WeightIdentityReport:
    t: Fraction
    side1_sum: Fraction
    g2_f1: Fraction
    side2_sum: Fraction
    g1_f2: Fraction

    @property
    def side1_holds(self) -> bool:
        return self.side1_sum == self.g2_f1

    @property
    def side2_holds(self) -> bool:
        return self.side2_sum == self.g1_f2

    @property
    def passed(self) -> bool:
        return self.side1_holds and self.side2_holds


def weight_identities(g: Multigraph, mom: MomentumAssignment, spec: PerturbationSpec, t) -> WeightIdentityReport:
    """Sum ``zeta`` over each side and compare with ``g2 f1`` and ``g1 f2``.

    Raises :class:`IdentityViolation` on mismatch.
    """
    w = Weights(g, mom, spec, t)
    trees, forests = spanning_trees(g), spanning_2forests(g)
    side1 = sum((w.xi_zeta(TripleVertex(1, (f1, f2, tr)))[1] for f1, f2, tr in product(forests, forests, trees)), Fraction(0))
    side2 = sum((w.xi_zeta(TripleVertex(2, (t1, t2, f)))[1] for t1, t2, f in product(trees, trees, forests)), Fraction(0))
    f1, f2 = eval_f(g, mom, w.y, check=False)
    W = w.W
    g1, g2 = det(gram(w.M, W)), det(gram(w.N, W))
    report = WeightIdentityReport(w.t, side1, g2 * f1, side2, g1 * f2)
    if not report.passed:
        raise IdentityViolation(f"weight identities fail at t={t}: {report}")
    return report


@dataclass
class QBalanceReport:
    components: int
    special_free: int
    balanced: int
    sums: list[tuple[int, Fraction, Fraction]] = field(default_factory=list)
    max_zeta_residual: Fraction | None = None  # max |zeta - q zeta0| / f1^2, reported only

    @property
    def passed(self) -> bool:
        return self.balanced == self.special_free


def q_balance_check(tg: TripleGraph, weights: Weights | None = None) -> QBalanceReport:
    """On each special-free component, ``sum q`` over side 1 equals side 2."""
    free = tg.special_free_components()
    report = QBalanceReport(tg.n_components, len(free), 0)
    residual = Fraction(0) if weights is not None else None
    f1sq = None
    if weights is not None:
        f1sq = psi_enum(tg.graph).evaluate(weights.y) ** 2
    for c in free:
        members = tg.components[c]
        s1 = sum((tg.q(i) for i in members if tg.keys[i][0] == 1), Fraction(0))
        s2 = sum((tg.q(i) for i in members if tg.keys[i][0] == 2), Fraction(0))
        report.sums.append((c, s1, s2))
        if s1 == s2:
            report.balanced += 1
        if weights is not None:
            zetas = [(tg.q(i), weights.xi_zeta(tg.vertex(i))[1]) for i in members]
            ref = next(((q, z) for q, z in zetas if q), None)
            if ref is not None:
                zeta0 = ref[1] / ref[0]
                for q, z in zetas:
                    residual = max(residual, abs(z - q * zeta0) / f1sq)
    report.max_zeta_residual = residual
    return report


@dataclass
class ProjectionReport:
    component: int
    equivalences_agree: bool = False
    constant_trees: bool = False
    tree_edges_stable: bool = False
    multiset_constant: bool = False
    quotient_connected: bool = False
    isomorphism: bool = False
    classes: list[list[int]] = field(default_factory=list)
    quotient_edges: list[int] = field(default_factory=list)
    message: str | None = None

    @property
    def passed(self) -> bool:
        return all((self.equivalences_agree, self.constant_trees, self.tree_edges_stable,
                    self.multiset_constant, self.quotient_connected, self.isomorphism))


def _refine_all(parts: Iterable[VertexPartition], n: int) -> VertexPartition:
    out = VertexPartition.of([range(n)])
    for p in parts:
        out = out.refine(p)
    return out


def projection_iso_check(tg: TripleGraph, component: int) -> ProjectionReport:
    """Project a special-free component onto the exchange graph of the
    quotient multigraph and check that the projection is an isomorphism."""
    g = tg.graph
    report = ProjectionReport(component)
    members = tg.components[component]
    if any(tg.special[i] for i in members):
        report.message = "component contains a special vertex"
        return report
    verts = {i: tg.vertex(i) for i in members}
    side1 = [i for i in members if verts[i].side == 1]
    side2 = [i for i in members if verts[i].side == 2]

    def pieces(tree, forest):
        return g.components(tree - crossing_edges(g, g.components(forest)))

    rel1 = _refine_all((pieces(verts[i].parts[0], verts[i].parts[2]) for i in side2), g.n)
    rel2 = _refine_all((pieces(verts[i].parts[1], verts[i].parts[2]) for i in side2), g.n)
    rel3 = _refine_all((pieces(verts[i].parts[2], verts[i].parts[0]) for i in side1), g.n)
    report.classes = rel1.as_lists()
    if not rel1 == rel2 == rel3:
        report.message = f"equivalences differ: {rel1.as_lists()} {rel2.as_lists()} {rel3.as_lists()}"
        return report
    report.equivalences_agree = True
    classes = rel1

    taus = None
    for i in members:
        restricted = tuple(tuple(g.induced_edges(x, part) for part in verts[i].parts) for x in classes)
        if taus is None:
            taus = restricted
        elif restricted != taus:
            report.message = "restrictions to a class vary inside the component"
            return report
    for x, trio in zip(classes, taus):
        for tau in trio:
            if len(tau) != len(x) - 1 or len(g.components(tau).blocks) != g.n - len(x) + 1:
                report.message = f"restriction to class {sorted(x)} is not a spanning tree of it"
                return report
    report.constant_trees = True

    cut = crossing_edges(g, classes)
    images = {}
    e_g = None
    for i in members:
        a, b, s = verts[i].parts
        if (a & cut) != (b & cut):
            report.message = "edges outside the classes differ between the two trees"
            return report
        e12, e3 = a & cut, s & cut
        if e12 & e3:
            report.message = "edge multiset has a repeated edge"
            return report
        if e_g is None:
            e_g = e12 | e3
        elif e12 | e3 != e_g:
            report.message = "edge multiset varies inside the component"
            return report
        images[i] = (verts[i].side, e12, e3)
    report.tree_edges_stable = True
    report.multiset_constant = True
    report.quotient_edges = sorted(e_g)

    tau1_edges = frozenset().union(*(trio[0] for trio in taus))
    sub = g.restrict(e_g | tau1_edges)
    quotient = contract(sub.graph, sub.push(tau1_edges))
    h0 = build_exchange_graph(quotient.graph, budget=None)
    report.quotient_connected = h0.n_vertices > 0 and h0.is_connected()

    def push(s):
        return quotient.push(sub.push(s))

    pi = {i: ExchangeVertex.make(side, push(e12), push(e3)) for i, (side, e12, e3) in images.items()}
    if len(set(pi.values())) != len(members):
        report.message = "projection is not injective"
        return report
    if set(pi.values()) != set(h0.vertices):
        report.message = "projection is not onto the quotient exchange graph"
        return report
    member_set = set(members)
    mapped = {
        (frozenset((h0.index[pi[i]], h0.index[pi[j]])), push({e}))
        for i in members for j, e in tg.adjacency[i] if j in member_set
    }
    target = {(frozenset((i, j)), frozenset({e})) for i, j, e in h0.edges()}
    report.isomorphism = mapped == target
    if not report.isomorphism:
        report.message = "projection does not preserve adjacency"
    return report


def tail_stability(values: Sequence[Fraction], factor=1) -> tuple[bool, list[Fraction], Fraction]:
    """Tail certificate used for O(1) claims along a scaling grid.

    Successive absolute differences must be non-increasing and the range of
    the values at most ``factor * (1 + |last value|)``.
    """
    diffs = [abs(b - a) for a, b in zip(values, values[1:])]
    spread = max(values) - min(values) if values else Fraction(0)
    monotone = all(d2 <= d1 for d1, d2 in zip(diffs, diffs[1:]))
    ok = monotone and spread <= Fraction(factor) * (1 + abs(values[-1])) if values else True
    return ok, diffs, spread


@dataclass
class SweepRow:
    t: Fraction
    f1: Fraction
    f2: Fraction
    g1: Fraction | None
    g2: Fraction | None

    @property
    def singular(self) -> bool:
        return not self.g1 or not self.g2

    @property
    def delta(self) -> Fraction | None:
        if self.singular:
            return None
        return self.g2 / self.g1 - self.f2 / self.f1

    @property
    def g1_over_f1(self) -> Fraction | None:
        return None if self.g1 is None else self.g1 / self.f1


CSV_COLUMNS = ("t", "f1", "f2", "g1", "g2", "Delta", "g1_over_f1")


def _s(x) -> str:
    return "" if x is None else str(x)


@dataclass
class SweepReport:
    rows: list[SweepRow]
    tail_start: Fraction
    factor: Fraction = Fraction(1)

    @property
    def singular_at(self) -> list[Fraction]:
        return [r.t for r in self.rows if r.singular]

    @property
    def tail(self) -> list[SweepRow]:
        return [r for r in self.rows if r.t >= self.tail_start]

    @cached_property
    def _tail_check(self):
        deltas = [r.delta for r in self.tail]
        if not deltas or any(d is None for d in deltas):
            return False, [], None
        return tail_stability(deltas, self.factor)

    @property
    def tail_differences(self) -> list[Fraction]:
        return self._tail_check[1]

    @property
    def tail_range(self) -> Fraction | None:
        return self._tail_check[2]

    @property
    def sandwich(self) -> tuple[Fraction, Fraction] | None:
        ratios = [r.g1_over_f1 for r in self.rows if r.g1 is not None]
        return (min(ratios), max(ratios)) if ratios else None

    @property
    def passed(self) -> bool:
        sw = self.sandwich
        return not self.singular_at and self._tail_check[0] and sw is not None and sw[0] > 0

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for r in self.rows:
            writer.writerow([_s(r.t), _s(r.f1), _s(r.f2), _s(r.g1), _s(r.g2), _s(r.delta), _s(r.g1_over_f1)])
        return buf.getvalue()

    def to_json(self) -> dict:
        sw = self.sandwich
        return {
            "rows": [dict(zip(CSV_COLUMNS, (_s(r.t), _s(r.f1), _s(r.f2), _s(r.g1), _s(r.g2),
                                             _s(r.delta), _s(r.g1_over_f1)))) | {"singular": r.singular}
                     for r in self.rows],
            "tail_start": str(self.tail_start),
            "tail_differences": [str(d) for d in self.tail_differences],
            "tail_range": _s(self.tail_range),
            "acceptance_factor": str(self.factor),
            "sandwich": None if sw is None else [str(sw[0]), str(sw[1])],
            "singular_at": [str(t) for t in self.singular_at],
            "passed": self.passed,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n"


def boundedness_sweep(g: Multigraph, mom: MomentumAssignment, spec: PerturbationSpec, factor=1) -> SweepReport:
    """Exact ``g2/g1 - f2/f1`` at every grid point ``t`` (``y = t * y0``).

    The tail starts at the second grid point. Singular perturbed Gram
    matrices are recorded per row rather than raised.
    """
    M, N = _extended(g, mom)
    rows = []
    for t in spec.grid:
        y = RationalMatrix.diag(spec.weights(t))
        w = spec.perturbed(t)
        f1, f2 = det(gram(M, y)), det(gram(N, y))
        g1, g2 = det(gram(M, w)), det(gram(N, w))
        rows.append(SweepRow(t, f1, f2, g1, g2))
    tail_start = spec.grid[1] if len(spec.grid) > 1 else spec.grid[0]
    return SweepReport(rows, tail_start, Fraction(factor))


def random_large_probe(
    g: Multigraph, mom: MomentumAssignment, A: RationalMatrix, rng: random.Random, points: int = 20, scale=10**4
) -> list[Fraction]:
    """``g2/g1 - f2/f1`` at independently random large weights ``y_e in [scale, 100 scale]``."""
    M, N = _extended(g, mom)
    out = []
    for _ in range(points):
        y = [Fraction(scale) * Fraction(rng.randint(100, 10_000), 100) for _ in range(g.m)]
        Y = RationalMatrix.diag(y)
        W = Y + A
        g1, g2 = det(gram(M, W)), det(gram(N, W))
        if g1 == 0 or g2 == 0:
            continue
        out.append(g2 / g1 - det(gram(N, Y)) / det(gram(M, Y)))
    return out


def polynomial_degree(values: Sequence[Fraction]) -> int:
    """Degree of the polynomial sampled at ``t = 0, 1, ..., len(values) - 1``.

    Exact as long as the true degree is below ``len(values)``; the zero
    polynomial has degree -1.
    """
    row = list(values)
    degree = -1
    for k in range(len(row)):
        if row[0]:
            degree = k
        row = [b - a for a, b in zip(row, row[1:])]
    return degree


@dataclass
class SurrogateReport:
    """Ray-degree certificates for the ``O(f1^2)`` estimates.

    Each quantity is a polynomial in ``t`` along ``y = t * y0``; it is
    ``O(f1^2)`` on the ray iff its degree is at most ``2 h``. The grid
    count is informational: series whose decade-grid samples fail
    :func:`tail_stability`.
    """

    genus: int
    special_light: bool
    adjacent_xi: bool
    adjacent_zeta: bool
    end_to_end: bool
    checked_special: int
    checked_pairs: int
    max_excess: int = 0  # largest (degree - 2h) seen; <= 0 when everything is bounded
    grid_heuristic_failures: int = 0

    @property
    def passed(self) -> bool:
        return self.special_light and self.adjacent_xi and self.adjacent_zeta and self.end_to_end


def asymptotic_surrogates(
    tg: TripleGraph, spec: PerturbationSpec, factor=1, limit: int | None = None
) -> SurrogateReport:
    """Check along the ray ``y = t * y0`` that each of

    * ``xi`` of every special vertex,
    * ``xi(v) - xi(u)`` for adjacent ``v, u``,
    * ``q(u) zeta(v) - q(v) zeta(u)`` for adjacent ``v, u`` with ``v`` non-special,
    * ``g2 f1 - g1 f2``

    grows no faster than ``f1^2``. ``limit`` caps how many vertices/pairs are
    checked (deterministically, in index order).
    """
    g, mom = tg.graph, tg.mom
    h = g.m - g.n + 1
    samples = [Weights(g, mom, spec, t) for t in range(2 * g.m + 3)]
    grid = [Weights(g, mom, spec, t) for t in spec.grid]
    psi = psi_enum(g)
    grid_f1sq = [psi.evaluate(w.y) ** 2 for w in grid]
    report = SurrogateReport(h, True, True, True, True, 0, 0, -2 * h - 1)

    def bounded(fn) -> bool:
        excess = polynomial_degree([fn(w) for w in samples]) - 2 * h
        report.max_excess = max(report.max_excess, excess)
        series = [fn(w) / s for w, s in zip(grid, grid_f1sq)][1:]
        report.grid_heuristic_failures += not tail_stability(series, factor)[0]
        return excess <= 0

    specials = [i for i in range(len(tg)) if tg.special[i]]
    if limit is not None:
        specials = specials[:limit]
    for i in specials:
        v = tg.vertex(i)
        report.special_light &= bounded(lambda w: w.xi_zeta(v)[0])
    report.checked_special = len(specials)
    pairs = [(i, j) for i, j, _ in tg.edges()]
    if limit is not None:
        pairs = pairs[:limit]
    for i, j in pairs:
        v, u = tg.vertex(i), tg.vertex(j)  # side-1 indices come first, so v is on side 1
        report.adjacent_xi &= bounded(lambda w: w.xi_zeta(v)[0] - w.xi_zeta(u)[0])
        if not tg.special[i]:
            qv, qu = tg.q(i), tg.q(j)
            report.adjacent_zeta &= bounded(lambda w: qu * w.xi_zeta(v)[1] - qv * w.xi_zeta(u)[1])
    report.checked_pairs = len(pairs)
    M, N = _extended(g, mom)

    def gap(w: Weights) -> Fraction:
        Y = RationalMatrix.diag(w.y)
        return det(gram(N, w.W)) * det(gram(M, Y)) - det(gram(M, w.W)) * det(gram(N, Y))

    report.end_to_end = bounded(gap)
    return report


@dataclass
class MinorReport:
    trees: int = 0
    tree_failures: int = 0
    forests: int = 0
    forest_failures: int = 0
    pairs: int = 0
    pair_failures: int = 0
    unsigned_mismatches: int = 0  # pairs where the identity only holds after the cofactor sign

    @property
    def passed(self) -> bool:
        return not (self.tree_failures or self.forest_failures or self.pair_failures)


def _position(s: frozenset[int], e: int) -> int:
    return sum(1 for x in s if x < e)


def minor_identities(g: Multigraph, mom: MomentumAssignment, pair_limit: int | None = None) -> MinorReport:
    """Square minors of the cycle and extended matrices.

    Checks ``det(M_{T^c})^2 = 1`` for spanning trees, ``det(N_{F^c})^2 = q(F)``
    for 2-forests, and for vertex-equivalent forests ``F1, F2`` sharing a
    crossing edge ``e``: ``det(N_{F1^c}) det(N_{F2^c}) =
    s q(F1) det(M_{(F1+e)^c}) det(M_{(F2+e)^c})``, where ``s = (-1)^(i+j)``
    and ``i, j`` are the positions of ``e`` in the sorted complements of
    ``F1`` and ``F2`` (the Laplace cofactor signs along the momentum row).
    """
    M, N = _extended(g, mom)
    c = g.complement
    report = MinorReport()
    det_m = {}
    for t in spanning_trees(g):
        det_m[t] = minor_det(M, None, sorted(c(t)))
        report.trees += 1
        report.tree_failures += det_m[t] ** 2 != 1
    by_partition: dict[VertexPartition, list[frozenset[int]]] = {}
    det_n = {}
    qs = {}
    for f in spanning_2forests(g):
        det_n[f] = minor_det(N, None, sorted(c(f)))
        qs[f] = q_of_forest(g, f, mom)
        report.forests += 1
        report.forest_failures += det_n[f] ** 2 != qs[f]
        by_partition.setdefault(g.components(f), []).append(f)
    for part, forests in by_partition.items():
        cross = sorted(crossing_edges(g, part))
        for f1, f2 in product(forests, forests):
            for e in cross:
                if pair_limit is not None and report.pairs >= pair_limit:
                    return report
                report.pairs += 1
                lhs = det_n[f1] * det_n[f2]
                rhs = qs[f1] * det_m[f1 | {e}] * det_m[f2 | {e}]
                sign = -1 if (_position(c(f1), e) + _position(c(f2), e)) % 2 else 1
                report.pair_failures += lhs != sign * rhs
                report.unsigned_mismatches += lhs != rhs
    return report
