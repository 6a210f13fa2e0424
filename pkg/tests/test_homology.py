import random
from fractions import Fraction

import networkx as nx
import pytest
from hypothesis import given
from hypothesis import strategies as st

from symratio.homology import (
    MomentumNotConservedError,
    RationalMatrix,
    SingularMatrixError,
    assemble_blocks,
    block_inverse_identities,
    boundary_matrix,
    canonical_cycle_basis,
    cauchy_binet_expand,
    cycle_basis,
    det,
    extended_matrix,
    gram,
    inverse,
    minor_det,
    momentum_lift,
    schur_ratio,
    solve,
)
from symratio.multigraph import Multigraph, spanning_trees

from .strategies import BANANA2, C3, K2, PATH3, connected_multigraphs, weights

F = Fraction
N_C3 = RationalMatrix([[1, 1, 1], [-1, -2, 0]])


def rm(rows):
    return RationalMatrix(rows)


def test_boundary_examples():
    assert boundary_matrix(K2).column(0) == (-1, 1)
    assert boundary_matrix(Multigraph(1, ((0, 0),))).column(0) == (0,)
    b = boundary_matrix(C3)
    assert [b.column(e) for e in range(3)] == [(-1, 1, 0), (0, -1, 1), (1, 0, -1)]


def test_cycle_basis_examples():
    assert cycle_basis(C3, {0, 1}).M == rm([[1, 1, 1]])
    assert cycle_basis(BANANA2, {0}).M == rm([[-1, 1]])
    tree = cycle_basis(PATH3, {0, 1})
    assert tree.M.shape == (0, 2) and tree.h == 0


def test_cycle_basis_rejects_non_tree():
    with pytest.raises(ValueError):
        cycle_basis(C3, {0})


def test_momentum_lift_examples():
    assert momentum_lift(K2, [1, -1]).omega == (-1,)
    assert momentum_lift(C3, [0, 0, 0]).omega == (0, 0, 0)
    assert momentum_lift(C3, [1, 1, -2], {0, 1}).omega == (-1, -2, 0)


def test_momentum_lift_requires_conservation():
    with pytest.raises(MomentumNotConservedError, match="momentum not conserved"):
        momentum_lift(C3, [1, 1, 1])


def test_extended_matrix_examples():
    basis = cycle_basis(C3, {0, 1})
    assert extended_matrix(basis, momentum_lift(C3, [1, 1, -2], {0, 1})) == N_C3
    assert extended_matrix(basis, momentum_lift(C3, [0, 0, 0], {0, 1})).rows[-1] == (0, 0, 0)
    lone = extended_matrix(cycle_basis(PATH3, {0, 1}), momentum_lift(PATH3, [1, 0, -1]))
    assert lone.shape == (1, 2)


def test_gram_examples():
    y = [F(2), F(3), F(5)]
    assert gram(rm([[1, 1, 1]]), RationalMatrix.diag(y)) == rm([[10]])
    assert gram(RationalMatrix.zeros(0, 3), RationalMatrix.identity(3)).shape == (0, 0)
    assert det(gram(RationalMatrix.zeros(0, 3), RationalMatrix.identity(3))) == 1
    assert gram(rm([[1, 1, 1]]), RationalMatrix.identity(3)) == rm([[3]])
    with pytest.raises(ValueError):
        gram(rm([[1, 1]]), RationalMatrix.identity(3))


def test_det_examples():
    assert det(rm([[1, 1], [-2, 0]])) == 2
    assert det(RationalMatrix.zeros(0, 0)) == 1
    assert det(rm([[1, 1], [1, 1]])) == 0
    with pytest.raises(ValueError):
        det(rm([[1, 2, 3]]))


def test_minor_examples():
    assert minor_det(N_C3, None, [1, 2]) == 2
    assert minor_det(N_C3, [], []) == 1
    assert minor_det(rm([[1, 1, 1]]), None, [2]) == 1
    with pytest.raises(ValueError):
        minor_det(N_C3, [0], [0, 1])


def test_cauchy_binet_examples():
    assert cauchy_binet_expand(rm([[1, 1, 1]])) == {frozenset({e}): 1 for e in range(3)}
    assert frozenset({1}) not in cauchy_binet_expand(rm([[1, 0, 1]]))
    # {e0, e2}: det [[1, 1], [-1, 0]] = 1, so its square is 1
    assert cauchy_binet_expand(N_C3) == {frozenset({0, 1}): 1, frozenset({0, 2}): 1, frozenset({1, 2}): 4}
    with pytest.raises(ValueError):
        cauchy_binet_expand(N_C3, RationalMatrix.identity(3) + rm([[0, 1, 0], [0, 0, 0], [0, 0, 0]]))


def test_schur_ratio_examples():
    assert schur_ratio(rm([[2]]), [1], 1) == F(1, 2)
    assert schur_ratio(rm([[2, 1], [1, 3]]), [0, 0], F(7, 3)) == F(7, 3)
    assert schur_ratio(RationalMatrix.identity(2), [1, 1], 3) == 1
    with pytest.raises(SingularMatrixError):
        schur_ratio(rm([[1, 1], [1, 1]]), [1, 0], 0)


def test_block_inverse_examples():
    m11, m22 = rm([[2, 1], [1, 1]]), rm([[3]])
    flags = block_inverse_identities(m11, RationalMatrix.zeros(2, 1), RationalMatrix.zeros(1, 2), m22)
    assert all(flags.values())
    full = inverse(assemble_blocks(m11, RationalMatrix.zeros(2, 1), RationalMatrix.zeros(1, 2), m22))
    assert full.submatrix([0, 1], [0, 1]) == inverse(m11)
    a, b, c, d = F(2), F(3), F(5), F(7)
    flags = block_inverse_identities(rm([[a]]), rm([[b]]), rm([[c]]), rm([[d]]))
    assert all(flags.values())
    assert inverse(rm([[a, b], [c, d]]))[0, 0] == d / (a * d - b * c) == 1 / (a - b / d * c)


def test_block_inverse_names_singular_block():
    with pytest.raises(SingularMatrixError, match="M22"):
        block_inverse_identities(rm([[1]]), rm([[1]]), rm([[1]]), rm([[0]]))


def test_random_three_plus_two_split():
    rng = random.Random(3)
    done = 0
    while done < 5:
        blocks = [rm([[F(rng.randint(-5, 5), rng.randint(1, 4)) for _ in range(c)] for _ in range(r)])
                  for r, c in ((3, 3), (3, 2), (2, 3), (2, 2))]
        try:
            flags = block_inverse_identities(*blocks)
        except SingularMatrixError:
            continue
        assert all(flags.values())
        done += 1


def test_solve_and_inverse():
    a = rm([[2, 1], [1, 3]])
    assert a @ inverse(a) == RationalMatrix.identity(2)
    assert solve(a, rm([[3], [4]])) == rm([[1], [1]])
    with pytest.raises(SingularMatrixError):
        inverse(rm([[1, 2], [2, 4]]))


rational_entries = st.builds(Fraction, st.integers(-6, 6), st.integers(1, 5))


@st.composite
def square_matrices(draw, max_n=4):
    n = draw(st.integers(1, max_n))
    return rm([[draw(rational_entries) for _ in range(n)] for _ in range(n)])


def _leibniz(a: RationalMatrix) -> Fraction:
    from itertools import permutations

    n = a.nrows
    total = F(0)
    for p in permutations(range(n)):
        inversions = sum(p[i] > p[j] for i in range(n) for j in range(i + 1, n))
        term = F(-1) ** inversions
        for i in range(n):
            term *= a[i, p[i]]
        total += term
    return total


@given(square_matrices())
def test_det_matches_permutation_expansion(a):
    assert det(a) == _leibniz(a)


@given(square_matrices(), square_matrices())
def test_det_is_multiplicative(a, b):
    if a.shape == b.shape:
        assert det(a @ b) == det(a) * det(b)


@given(connected_multigraphs(max_n=5, loops=True))
def test_cycle_rows_are_cycles(g):
    basis = canonical_cycle_basis(g)
    product = boundary_matrix(g) @ basis.M.T
    assert all(x == 0 for r in product.rows for x in r)
    assert basis.h == g.m - g.n + 1
    for row, e in zip(basis.M.rows, basis.cycle_edges):
        assert row[e] == 1 and set(x for x in row) <= {-1, 0, 1}


@given(connected_multigraphs(max_n=5, loops=True))
def test_kirchhoff_against_reduced_laplacian(g):
    basis = canonical_cycle_basis(g)
    lap = nx.laplacian_matrix(_nx(g), nodelist=range(g.n)).toarray().tolist()
    reduced = rm([r[1:] for r in lap[1:]])
    count = det(gram(basis.M, RationalMatrix.identity(g.m)))
    assert count == det(reduced) == len(spanning_trees(g))


def _nx(g):
    h = nx.MultiGraph()
    h.add_nodes_from(range(g.n))
    h.add_edges_from((t, hd) for t, hd in g.edges if t != hd)
    return h


@given(st.data())
def test_lift_has_prescribed_boundary(data):
    g = data.draw(connected_multigraphs(max_n=5))
    vals = [data.draw(rational_entries) for _ in range(g.n - 1)]
    p = vals + [-sum(vals)]
    trees = spanning_trees(g)
    tree = trees[data.draw(st.integers(0, len(trees) - 1))]
    lift = momentum_lift(g, p, tree)
    image = boundary_matrix(g) @ rm([[w] for w in lift.omega])
    assert image.column(0) == tuple(p)
    assert all(lift.omega[e] == 0 for e in range(g.m) if e not in tree)


@given(st.data())
def test_minor_expansion_reproduces_gram_determinant(data):
    g = data.draw(connected_multigraphs(max_n=5))
    y = data.draw(weights(g.m))
    basis = canonical_cycle_basis(g)
    coeffs = cauchy_binet_expand(basis.M)
    total = F(0)
    for s, c in coeffs.items():
        term = c
        for e in s:
            term *= y[e]
        total += term
    assert total == det(gram(basis.M, RationalMatrix.diag(y)))


@given(st.data())
def test_gram_determinant_independent_of_tree(data):
    g = data.draw(connected_multigraphs(max_n=5))
    trees = spanning_trees(g)
    t1 = trees[data.draw(st.integers(0, len(trees) - 1))]
    t2 = trees[data.draw(st.integers(0, len(trees) - 1))]
    assert cauchy_binet_expand(cycle_basis(g, t1).M) == cauchy_binet_expand(cycle_basis(g, t2).M)


@given(square_matrices(), st.data())
def test_schur_ratio_times_det_is_bordered_det(m, data):
    if det(m) == 0:
        return
    w = [data.draw(rational_entries) for _ in range(m.nrows)]
    s = data.draw(rational_entries)
    col = rm([[x] for x in w])
    bordered = assemble_blocks(m, col, col.T, rm([[s]]))
    assert schur_ratio(m, w, s) * det(m) == det(bordered)
