"""First and second Symanzik polynomials, by enumeration and by determinants."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import lcm, prod
from typing import Iterable, Mapping, Sequence

from .homology import (
    RationalMatrix,
    MomentumNotConservedError,
    canonical_cycle_basis,
    det,
    extended_matrix,
    gram,
    momentum_lift,
)
from .multigraph import (
    Multigraph,
    NotConnectedError,
    forest_partition,
    genus,
    spanning_2forests,
    spanning_trees,
)


@dataclass(frozen=True)
class MomentumAssignment:
    """External momenta ``p_v`` in ``R^dim`` paired by a symmetric ``form``."""

    p: tuple[tuple[Fraction, ...], ...]
    form: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        p = tuple(tuple(Fraction(x) for x in pv) for pv in self.p)
        form = tuple(tuple(Fraction(x) for x in r) for r in self.form)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "form", form)
        d = len(form)
        if any(len(r) != d for r in form):
            raise ValueError("bilinear form must be square")
        if any(form[i][j] != form[j][i] for i in range(d) for j in range(d)):
            raise ValueError("bilinear form must be symmetric")
        if any(len(pv) != d for pv in p):
            raise ValueError(f"every momentum must have dimension {d}")
        for a in range(d):
            if sum(pv[a] for pv in p) != 0:
                raise MomentumNotConservedError("momentum not conserved")

    @classmethod
    def scalar(cls, values: Sequence) -> "MomentumAssignment":
        return cls(tuple((v,) for v in values), ((1,),))

    @classmethod
    def euclidean(cls, vectors: Sequence[Sequence]) -> "MomentumAssignment":
        d = len(vectors[0]) if vectors else 1
        return cls(tuple(tuple(v) for v in vectors), tuple(tuple(int(i == j) for j in range(d)) for i in range(d)))

    @property
    def dim(self) -> int:
        return len(self.form)

    @property
    def n(self) -> int:
        return len(self.p)

    def coordinate(self, a: int) -> tuple[Fraction, ...]:
        return tuple(pv[a] for pv in self.p)

    def pair(self, u: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
        d = self.dim
        return sum((u[i] * self.form[i][j] * v[j] for i in range(d) for j in range(d) if u[i] and v[j]), Fraction(0))

    def total(self, vertices: Iterable[int]) -> tuple[Fraction, ...]:
        vs = list(vertices)
        return tuple(sum((self.p[v][a] for v in vs), Fraction(0)) for a in range(self.dim))

    def is_zero(self) -> bool:
        return all(x == 0 for pv in self.p for x in pv)


@dataclass(frozen=True, eq=False)
class SymanzikPolynomial:
    """Homogeneous multilinear polynomial ``sum_S c_S prod_{e in S} y_e``."""

    m: int
    degree: int
    terms: Mapping[frozenset, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        for s in self.terms:
            if len(s) != self.degree:
                raise ValueError(f"term {sorted(s)} has size {len(s)}, expected degree {self.degree}")

    def __eq__(self, other) -> bool:
        if not isinstance(other, SymanzikPolynomial):
            return NotImplemented
        return self.m == other.m and dict(self.terms) == dict(other.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    @cached_property
    def _integer_terms(self) -> tuple[int, list[tuple[int, tuple[int, ...]]]]:
        den = lcm(*(c.denominator for c in self.terms.values())) if self.terms else 1
        items = [(c.numerator * (den // c.denominator), tuple(sorted(s))) for s, c in self.terms.items()]
        items.sort(key=lambda it: it[1])
        return den, items

    def __call__(self, y: Sequence) -> Fraction:
        return self.evaluate(y)

    def evaluate(self, y: Sequence) -> Fraction:
        if len(y) != self.m:
            raise ValueError(f"expected {self.m} edge weights, got {len(y)}")
        ys = [Fraction(v) for v in y]
        dy = lcm(*(v.denominator for v in ys)) if ys else 1
        yi = [v.numerator * (dy // v.denominator) for v in ys]
        dc, items = self._integer_terms
        total = sum(c * prod(yi[e] for e in s) for c, s in items)
        return Fraction(total, dc * dy**self.degree)

    def sorted_terms(self) -> list[tuple[tuple[int, ...], Fraction]]:
        return sorted(((tuple(sorted(s)), c) for s, c in self.terms.items()))

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "degree": self.degree,
            "terms": [{"edges": list(s), "coefficient": str(c)} for s, c in self.sorted_terms()],
        }

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for s, c in self.sorted_terms():
            mono = "*".join(f"y{e}" for e in s) or "1"
            parts.append(mono if c == 1 else f"{c}*{mono}")
        return " + ".join(parts)


def _check_mom(g: Multigraph, mom: MomentumAssignment) -> None:
    if mom.n != g.n:
        raise ValueError(f"momenta given for {mom.n} vertices, graph has {g.n}")


def q_of_forest(g: Multigraph, f: Iterable[int], mom: MomentumAssignment) -> Fraction:
    """``-<p_X, p_Y>`` for the two components ``X, Y`` of the 2-forest ``f``."""
    _check_mom(g, mom)
    x, y = forest_partition(g, f).blocks
    return -mom.pair(mom.total(x), mom.total(y))


def psi_enum(g: Multigraph) -> SymanzikPolynomial:
    """First Symanzik polynomial as the sum over complements of spanning trees."""
    h = genus(g)
    return SymanzikPolynomial(g.m, h, {g.complement(t): Fraction(1) for t in spanning_trees(g)})


def phi_enum(g: Multigraph, mom: MomentumAssignment) -> SymanzikPolynomial:
    """Second Symanzik polynomial, ``sum_F q(F) y^{F^c}`` over spanning 2-forests."""
    h = genus(g)
    _check_mom(g, mom)
    terms = {}
    for f in spanning_2forests(g):
        q = q_of_forest(g, f, mom)
        if q:
            terms[g.complement(f)] = q
    return SymanzikPolynomial(g.m, h + 1, terms)


def _check_weights(g: Multigraph, y: Sequence) -> list[Fraction]:
    if len(y) != g.m:
        raise ValueError(f"expected {g.m} edge weights, got {len(y)}")
    return [Fraction(v) for v in y]


def psi_det(g: Multigraph, y: Sequence) -> Fraction:
    """``det(M Y M^T)`` for the canonical fundamental-cycle basis ``M``."""
    ys = _check_weights(g, y)
    basis = canonical_cycle_basis(g)
    return det(gram(basis.M, RationalMatrix.diag(ys)))


def _phi_det_scalar(g: Multigraph, omega: Sequence[Fraction], ys: list[Fraction]) -> Fraction:
    basis = canonical_cycle_basis(g)
    return det(gram(basis.M.vstack(omega), RationalMatrix.diag(ys)))


def phi_det(g: Multigraph, mom: MomentumAssignment, y: Sequence, tree: Iterable[int] | None = None) -> Fraction:
    """``det(N Y N^T)`` extended bilinearly to vector momenta.

    Each coordinate of the momenta gets its own lift ``omega_a``. Off-diagonal
    pairings come from polarization,
    ``B(a, b) = (Q(omega_a + omega_b) - Q(omega_a - omega_b)) / 4``, and the
    result is ``sum_{a,b} form[a][b] B(a, b)``. ``tree`` picks the support
    of the lifts (default: the canonical spanning tree).
    """
    ys = _check_weights(g, y)
    _check_mom(g, mom)
    if not g.is_connected():
        raise NotConnectedError("graph not connected")
    omegas = [momentum_lift(g, mom.coordinate(a), tree).omega for a in range(mom.dim)]
    total = Fraction(0)
    for a in range(mom.dim):
        for b in range(a, mom.dim):
            coeff = mom.form[a][b]
            if not coeff:
                continue
            if a == b:
                total += coeff * _phi_det_scalar(g, omegas[a], ys)
            else:
                plus = [u + v for u, v in zip(omegas[a], omegas[b])]
                minus = [u - v for u, v in zip(omegas[a], omegas[b])]
                bil = (_phi_det_scalar(g, plus, ys) - _phi_det_scalar(g, minus, ys)) / 4
                total += 2 * coeff * bil
    return total


def ratio(g: Multigraph, mom: MomentumAssignment, y: Sequence) -> Fraction:
    """``phi / psi`` at ``y``."""
    psi = psi_det(g, y)
    if psi == 0:
        raise ZeroDivisionError("first Symanzik polynomial vanishes at y")
    return phi_det(g, mom, y) / psi
