"""Exact rational linear algebra on graph homology.

Everything here is exact: entries are :class:`fractions.Fraction` and
determinants run fraction-free (Bareiss) on integer-scaled rows.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import lcm, prod
from typing import Iterable, Sequence

from .multigraph import Multigraph, NotConnectedError, is_spanning_tree, spanning_trees


class SingularMatrixError(ArithmeticError):
    pass


class MomentumNotConservedError(ValueError):
    pass


def _frac(x) -> Fraction:
    return x if type(x) is Fraction else Fraction(x)


class RationalMatrix:
    """Dense immutable matrix of exact rationals."""

    __slots__ = ("_rows", "nrows", "ncols")

    def __init__(self, rows: Iterable[Iterable], ncols: int | None = None):
        self._rows = tuple(tuple(_frac(x) for x in r) for r in rows)
        self.nrows = len(self._rows)
        if self.nrows:
            self.ncols = len(self._rows[0])
            if any(len(r) != self.ncols for r in self._rows):
                raise ValueError("ragged rows")
        else:
            self.ncols = 0 if ncols is None else ncols

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "RationalMatrix":
        return cls(([0] * ncols for _ in range(nrows)), ncols)

    @classmethod
    def identity(cls, n: int) -> "RationalMatrix":
        return cls(([int(i == j) for j in range(n)] for i in range(n)), n)

    @classmethod
    def diag(cls, values: Sequence) -> "RationalMatrix":
        n = len(values)
        return cls(([values[i] if i == j else 0 for j in range(n)] for i in range(n)), n)

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    @property
    def rows(self) -> tuple[tuple[Fraction, ...], ...]:
        return self._rows

    def __getitem__(self, ij: tuple[int, int]) -> Fraction:
        i, j = ij
        return self._rows[i][j]

    def __eq__(self, other) -> bool:
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        return self.shape == other.shape and self._rows == other._rows

    def __hash__(self) -> int:
        return hash((self.shape, self._rows))

    def __repr__(self) -> str:
        body = ", ".join("[" + ", ".join(str(x) for x in r) + "]" for r in self._rows)
        return f"RationalMatrix([{body}])"

    @property
    def T(self) -> "RationalMatrix":
        return RationalMatrix(([r[j] for r in self._rows] for j in range(self.ncols)), self.nrows)

    def _check_same(self, other: "RationalMatrix") -> None:
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")

    def __add__(self, other: "RationalMatrix") -> "RationalMatrix":
        self._check_same(other)
        return RationalMatrix((tuple(a + b for a, b in zip(r, s)) for r, s in zip(self._rows, other._rows)), self.ncols)

    def __sub__(self, other: "RationalMatrix") -> "RationalMatrix":
        self._check_same(other)
        return RationalMatrix((tuple(a - b for a, b in zip(r, s)) for r, s in zip(self._rows, other._rows)), self.ncols)

    def __neg__(self) -> "RationalMatrix":
        return RationalMatrix((tuple(-a for a in r) for r in self._rows), self.ncols)

    def scale(self, c) -> "RationalMatrix":
        c = _frac(c)
        return RationalMatrix((tuple(c * a for a in r) for r in self._rows), self.ncols)

    def __matmul__(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        a, da = _integer_rows(self._rows)
        cols = tuple(zip(*other._rows))
        b, db = _integer_rows(cols)
        out = []
        for r, d in zip(a, da):
            out.append(tuple(
                Fraction(sum(x * y for x, y in zip(r, c) if x and y), d * dc) for c, dc in zip(b, db)
            ))
        return RationalMatrix(out, other.ncols)

    def submatrix(self, rows: Iterable[int] | None, cols: Iterable[int] | None) -> "RationalMatrix":
        ri = range(self.nrows) if rows is None else sorted(rows)
        ci = range(self.ncols) if cols is None else sorted(cols)
        ci = list(ci)
        return RationalMatrix((tuple(self._rows[i][j] for j in ci) for i in ri), len(ci))

    def column(self, j: int) -> tuple[Fraction, ...]:
        return tuple(r[j] for r in self._rows)

    def vstack(self, row: Sequence) -> "RationalMatrix":
        if self.nrows and len(row) != self.ncols:
            raise ValueError("row length mismatch")
        return RationalMatrix(self._rows + (tuple(row),), len(row))

    def is_diagonal(self) -> bool:
        return all(x == 0 for i, r in enumerate(self._rows) for j, x in enumerate(r) if i != j)

    def to_strings(self) -> list[list[str]]:
        return [[str(x) for x in r] for r in self._rows]


def _integer_rows(rows) -> tuple[list[list[int]], list[int]]:
    """Scale each row to integers; returns the integer rows and the divisors."""
    out, dens = [], []
    for r in rows:
        d = lcm(*(x.denominator for x in r)) if r else 1
        out.append([x.numerator * (d // x.denominator) for x in r])
        dens.append(d)
    return out, dens


def _bareiss(a: list[list[int]]) -> int:
    n = len(a)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = a[k][k]
        rk = a[k]
        for i in range(k + 1, n):
            ri = a[i]
            aik = ri[k]
            for j in range(k + 1, n):
                ri[j] = (ri[j] * akk - aik * rk[j]) // prev
        prev = akk
    return sign * a[n - 1][n - 1]


def det(x: RationalMatrix) -> Fraction:
    """Exact determinant; the empty 0x0 matrix has determinant 1."""
    if x.nrows != x.ncols:
        raise ValueError(f"det of non-square {x.shape} matrix")
    a, dens = _integer_rows(x.rows)
    return Fraction(_bareiss(a), prod(dens))


def minor_det(x: RationalMatrix, rows: Iterable[int] | None, cols: Iterable[int]) -> Fraction:
    """Determinant of the submatrix on ``rows`` x ``cols`` (``rows=None``: all rows)."""
    rows = range(x.nrows) if rows is None else list(rows)
    cols = list(cols)
    if len(rows) != len(cols):
        raise ValueError(f"minor needs |rows| == |cols|, got {len(rows)} and {len(cols)}")
    return det(x.submatrix(rows, cols))


def solve(a: RationalMatrix, b: RationalMatrix) -> RationalMatrix:
    """Solve ``a @ x = b`` exactly by Gauss-Jordan elimination."""
    n = a.nrows
    if a.ncols != n or b.nrows != n:
        raise ValueError("solve needs square a and matching b")
    aug = [list(ra) + list(rb) for ra, rb in zip(a.rows, b.rows)]
    w = n + b.ncols
    for k in range(n):
        piv = next((i for i in range(k, n) if aug[i][k] != 0), None)
        if piv is None:
            raise SingularMatrixError("matrix is singular")
        aug[k], aug[piv] = aug[piv], aug[k]
        inv = 1 / aug[k][k]
        rk = [x * inv for x in aug[k]]
        aug[k] = rk
        for i in range(n):
            if i != k and aug[i][k] != 0:
                f = aug[i][k]
                aug[i] = [x - f * y for x, y in zip(aug[i], rk)]
    return RationalMatrix((r[n:w] for r in aug), b.ncols)


def inverse(a: RationalMatrix) -> RationalMatrix:
    return solve(a, RationalMatrix.identity(a.nrows))


def boundary_matrix(g: Multigraph) -> RationalMatrix:
    """``n x m`` incidence matrix; column ``e`` is ``head(e) - tail(e)``."""
    rows = [[0] * g.m for _ in range(g.n)]
    for e, (t, h) in enumerate(g.edges):
        if t != h:
            rows[h][e] += 1
            rows[t][e] -= 1
    return RationalMatrix(rows, g.m)


def _tree_adjacency(g: Multigraph, tree: Iterable[int]) -> dict[int, list[tuple[int, int]]]:
    adj: dict[int, list[tuple[int, int]]] = {v: [] for v in range(g.n)}
    for e in sorted(tree):
        t, h = g.edges[e]
        adj[t].append((h, e))
        adj[h].append((t, e))
    return adj


def _tree_path(g: Multigraph, adj, start: int, goal: int) -> list[tuple[int, int]]:
    """Signed edges along the tree path from ``start`` to ``goal``."""
    parent: dict[int, tuple[int, int] | None] = {start: None}
    stack = [start]
    while stack:
        v = stack.pop()
        if v == goal:
            break
        for w, e in adj[v]:
            if w not in parent:
                parent[w] = (v, e)
                stack.append(w)
    path = []
    v = goal
    while parent[v] is not None:
        u, e = parent[v]
        path.append((e, 1 if g.edges[e] == (u, v) else -1))
        v = u
    return path


@dataclass(frozen=True)
class CycleBasis:
    graph: Multigraph
    tree: frozenset[int]
    M: RationalMatrix
    cycle_edges: tuple[int, ...]  # the non-tree edge defining each row

    @property
    def h(self) -> int:
        return self.M.nrows


def cycle_basis(g: Multigraph, tree: Iterable[int]) -> CycleBasis:
    """Fundamental-cycle basis of ``H_1(G, Z)`` with respect to a spanning tree.

    Row ``i`` is the cycle closed by the ``i``-th non-tree edge ``e``, with
    coefficient ``+1`` on ``e``.
    """
    tree = frozenset(tree)
    if not is_spanning_tree(g, tree):
        raise ValueError(f"{sorted(tree)} is not a spanning tree")
    adj = _tree_adjacency(g, tree)
    rows, defining = [], []
    for e in range(g.m):
        if e in tree:
            continue
        row = [0] * g.m
        row[e] = 1
        t, h = g.edges[e]
        for f, sign in _tree_path(g, adj, h, t):
            row[f] += sign
        rows.append(row)
        defining.append(e)
    return CycleBasis(g, tree, RationalMatrix(rows, g.m), tuple(defining))


@lru_cache(maxsize=4096)
def canonical_tree(g: Multigraph) -> frozenset[int]:
    trees = spanning_trees(g)
    if not trees:
        raise NotConnectedError("graph not connected")
    return trees[0]


@lru_cache(maxsize=4096)
def canonical_cycle_basis(g: Multigraph) -> CycleBasis:
    return cycle_basis(g, canonical_tree(g))


@dataclass(frozen=True)
class MomentumLift:
    omega: tuple[Fraction, ...]
    p: tuple[Fraction, ...]
    tree: frozenset[int]


def momentum_lift(g: Multigraph, p: Sequence, tree: Iterable[int] | None = None) -> MomentumLift:
    """Edge vector ``omega`` supported on ``tree`` with ``boundary(omega) = p``.

    ``p`` is one scalar momentum coordinate per vertex. Leaves of the tree are
    peeled off one at a time, each fixing the value on its unique tree edge.
    """
    p = tuple(_frac(x) for x in p)
    if len(p) != g.n:
        raise ValueError("momentum vector length differs from vertex count")
    if sum(p) != 0:
        raise MomentumNotConservedError("momentum not conserved")
    tree = canonical_tree(g) if tree is None else frozenset(tree)
    if not is_spanning_tree(g, tree):
        raise ValueError(f"{sorted(tree)} is not a spanning tree")
    omega = [Fraction(0)] * g.m
    residual = list(p)
    incident: dict[int, set[int]] = {v: set() for v in range(g.n)}
    for e in tree:
        t, h = g.edges[e]
        incident[t].add(e)
        incident[h].add(e)
    leaves = sorted(v for v in range(g.n) if len(incident[v]) == 1)
    while leaves:
        v = leaves.pop()
        if len(incident[v]) != 1:
            continue
        (e,) = incident[v]
        t, h = g.edges[e]
        other = t if h == v else h
        omega[e] = residual[v] if h == v else -residual[v]
        # remove v's demand from the neighbour: it now has to route it through e
        residual[other] += residual[v]
        residual[v] = Fraction(0)
        incident[v].clear()
        incident[other].discard(e)
        if len(incident[other]) == 1:
            leaves.append(other)
    return MomentumLift(tuple(omega), p, tree)


def extended_matrix(basis: CycleBasis, lift: MomentumLift) -> RationalMatrix:
    """The ``(h+1) x m`` matrix N: cycle rows followed by the lift ``omega``."""
    if len(lift.omega) != basis.graph.m:
        raise ValueError("lift and basis live on different graphs")
    return basis.M.vstack(lift.omega)


def gram(x: RationalMatrix, w: RationalMatrix) -> RationalMatrix:
    """``x @ w @ x.T``, exactly."""
    if w.nrows != w.ncols or x.ncols != w.nrows:
        raise ValueError(f"gram shape mismatch: X {x.shape}, W {w.shape}")
    if x.nrows == 0:
        return RationalMatrix.zeros(0, 0)
    if w.is_diagonal():
        d = [w[i, i] for i in range(w.nrows)]
        dw = lcm(*(v.denominator for v in d)) if d else 1
        di = [v.numerator * (dw // v.denominator) for v in d]
        xi, dx = _integer_rows(x.rows)
        out = []
        for r, a in zip(xi, dx):
            out.append(tuple(
                Fraction(sum(u * c * v for u, c, v in zip(r, di, s) if u and v), a * b * dw)
                for s, b in zip(xi, dx)
            ))
        return RationalMatrix(out, x.nrows)
    return x @ w @ x.T


def cauchy_binet_expand(x: RationalMatrix, w: RationalMatrix | None = None) -> dict[frozenset[int], Fraction]:
    """Coefficients of ``det(x diag(y) x^T)`` as a polynomial in ``y``.

    Maps each column subset ``I`` with ``|I| = rows(x)`` and nonzero maximal
    minor to ``det(x_I)^2``. ``w``, if given, only has to be diagonal.
    """
    if w is not None and not w.is_diagonal():
        raise ValueError("cauchy_binet_expand needs a diagonal weight matrix")
    r = x.nrows
    out = {}
    for cols in combinations(range(x.ncols), r):
        d = minor_det(x, None, cols)
        if d:
            out[frozenset(cols)] = d * d
    return out


def schur_ratio(m: RationalMatrix, w: Sequence, s) -> Fraction:
    """``s - w^T m^{-1} w``, which equals ``det([[m, w], [w^T, s]]) / det(m)``."""
    col = RationalMatrix(((x,) for x in w), 1)
    if col.nrows != m.nrows:
        raise ValueError("vector length differs from block size")
    if m.nrows == 0:
        return _frac(s)
    z = solve(m, col)
    return _frac(s) - sum(a * b[0] for a, b in zip(col.column(0), z.rows))


def assemble_blocks(m11: RationalMatrix, m12: RationalMatrix, m21: RationalMatrix, m22: RationalMatrix) -> RationalMatrix:
    if m11.nrows != m12.nrows or m21.nrows != m22.nrows or m11.ncols != m21.ncols or m12.ncols != m22.ncols:
        raise ValueError("incompatible block shapes")
    top = [r + s for r, s in zip(m11.rows, m12.rows)]
    bottom = [r + s for r, s in zip(m21.rows, m22.rows)]
    return RationalMatrix(top + bottom, m11.ncols + m12.ncols)


def _inverse_named(a: RationalMatrix, name: str) -> RationalMatrix:
    try:
        return inverse(a)
    except SingularMatrixError:
        raise SingularMatrixError(f"{name} is singular") from None


def block_inverse_identities(
    m11: RationalMatrix, m12: RationalMatrix, m21: RationalMatrix, m22: RationalMatrix
) -> dict[str, bool]:
    """Check the four Schur-complement formulas for the blocks of the inverse.

    With ``S1 = m11 - m12 m22^-1 m21`` and ``S2 = m22 - m21 m11^-1 m12``::

        N11 = S1^-1          N12 = -m11^-1 m12 S2^-1
        N22 = S2^-1          N21 = -m22^-1 m21 S1^-1

    Each formula is compared against the corresponding block of the directly
    computed inverse of the assembled matrix.
    """
    full_inv = _inverse_named(assemble_blocks(m11, m12, m21, m22), "full block matrix")
    m11_inv = _inverse_named(m11, "M11")
    m22_inv = _inverse_named(m22, "M22")
    s1_inv = _inverse_named(m11 - m12 @ m22_inv @ m21, "Schur complement M11 - M12 M22^-1 M21")
    s2_inv = _inverse_named(m22 - m21 @ m11_inv @ m12, "Schur complement M22 - M21 M11^-1 M12")
    k = m11.nrows
    idx1, idx2 = range(k), range(k, full_inv.nrows)
    return {
        "N11": full_inv.submatrix(idx1, idx1) == s1_inv,
        "N22": full_inv.submatrix(idx2, idx2) == s2_inv,
        "N12": full_inv.submatrix(idx1, idx2) == -(m11_inv @ m12 @ s2_inv),
        "N21": full_inv.submatrix(idx2, idx1) == -(m22_inv @ m21 @ s1_inv),
    }
