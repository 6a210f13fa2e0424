import random
from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from symratio.exchange import BudgetExceeded
from symratio.homology import RationalMatrix, minor_det
from symratio.multigraph import Multigraph
from symratio.symanzik import MomentumAssignment, phi_enum, psi_enum, q_of_forest
from symratio.variation import (
    ConditionViolated,
    PerturbationSpec,
    TripleVertex,
    Weights,
    _extended,
    asymptotic_surrogates,
    boundedness_sweep,
    build_triple_graph,
    eval_f,
    eval_g,
    minor_identities,
    polynomial_degree,
    projection_iso_check,
    q_balance_check,
    sample_perturbation,
    tail_stability,
    triple_vertex_count,
    weight_identities,
    xi_zeta,
)

from .strategies import BANANA3, C3, C3_MOMENTA, K2, PARALLEL, graphs_with_momenta

F = Fraction
fs = frozenset
K2_MOM = MomentumAssignment.scalar([1, -1])
B3_MOM = MomentumAssignment.scalar([3, -3])
C3_A = sample_perturbation(3, 1, random.Random(7))
# cross-checked against hand-expanded 1x1 and 2x2 Gram forms
C3_DELTAS = [
    F(413763, 220580),
    F(4969743, 2382740),
    F(50529543, 24004340),
    F(506127543, 240220340),
    F(5062107543, 2402380340),
    F(50621907543, 24023980340),
]


def spec_for(m, a, grid=None, bound=1):
    kw = {} if grid is None else {"grid": grid}
    return PerturbationSpec([1] * m, a, bound, **kw)


def mixed_expansion(x: RationalMatrix, w: RationalMatrix) -> Fraction:
    """det(X W X^T) as a double sum over column subsets (mixed Cauchy-Binet)."""
    r, m = x.shape
    total = F(0)
    for s in combinations(range(m), r):
        ds = minor_det(x, None, list(s))
        if not ds:
            continue
        for t in combinations(range(m), r):
            total += ds * minor_det(w, list(s), list(t)) * minor_det(x, None, list(t))
    return total


def test_eval_f_examples():
    assert eval_f(C3, C3_MOMENTA, [1, 1, 1]) == (3, 6)
    assert eval_f(C3, C3_MOMENTA, [2, 3, 5]) == (10, 76)


def test_eval_g_without_perturbation_is_f():
    spec = spec_for(3, RationalMatrix.zeros(3, 3))
    assert eval_g(C3, C3_MOMENTA, spec, 5) == eval_f(C3, C3_MOMENTA, [5, 5, 5])


def test_eval_g_on_single_edge():
    spec = spec_for(1, RationalMatrix([[F(1, 2)]]))
    assert eval_g(K2, K2_MOM, spec, 10) == (1, F(21, 2))


def test_eval_g_reports_singular_points():
    spec = spec_for(1, RationalMatrix([[-1]]), grid=(1, 2))
    with pytest.raises(ConditionViolated, match="t=1"):
        eval_g(K2, K2_MOM, spec, 1)


@settings(max_examples=30)
@given(st.data())
def test_eval_g_matches_mixed_expansion(data):
    g, mom = data.draw(graphs_with_momenta(max_n=4, max_extra=2))
    a = sample_perturbation(g.m, 1, random.Random(data.draw(st.integers(0, 10**6))))
    spec = spec_for(g.m, a)
    t = data.draw(st.sampled_from([F(3), F(17, 2), F(100)]))
    M, N = _extended(g, mom)
    w = spec.perturbed(t)
    try:
        g1, g2 = eval_g(g, mom, spec, t)
    except ConditionViolated:
        return
    assert (g1, g2) == (mixed_expansion(M, w), mixed_expansion(N, w))


def test_spec_validation():
    with pytest.raises(ValueError, match="exceeds bound"):
        spec_for(1, RationalMatrix([[2]]))
    with pytest.raises(ValueError, match="increasing"):
        spec_for(1, RationalMatrix([[0]]), grid=(10, 10))
    with pytest.raises(ValueError):
        spec_for(1, RationalMatrix([[0]]), grid=(0, 10))
    with pytest.raises(ValueError):
        PerturbationSpec([1, -1], RationalMatrix.zeros(2, 2), 1)
    with pytest.raises(ValueError):
        spec_for(2, RationalMatrix.zeros(3, 3))
    with pytest.raises(ValueError, match="scalar"):
        eval_f(K2, MomentumAssignment.euclidean([[1, 0], [-1, 0]]), [1])


def test_sampled_perturbation_respects_bound():
    a = sample_perturbation(4, F(1, 3), random.Random(1))
    assert all(abs(x) <= F(1, 3) for r in a.rows for x in r)
    assert a == sample_perturbation(4, F(1, 3), random.Random(1))


def test_banana_triple_graph():
    tg = build_triple_graph(BANANA3, B3_MOM)
    assert len(tg) == triple_vertex_count(BANANA3) == 12
    assert tg.n_side1 == 3 and sum(tg.special) == 6
    assert tg.special_free_components() == [0, 1, 2]
    assert [tg.components[c] for c in range(3)] == [[0, 3], [1, 7], [2, 11]]
    assert all(tg.q(i) == 9 for i in range(len(tg)))


def test_single_edge_triple_graph():
    tg = build_triple_graph(K2, K2_MOM)
    assert tg.keys == [(1, 0, 0, 0), (2, 0, 0, 0)]
    assert tg.components == [[0, 1]] and not any(tg.special)
    assert tg.vertex(1) == TripleVertex(2, (fs({0}), fs({0}), fs()))


def test_triple_budget():
    with pytest.raises(BudgetExceeded):
        build_triple_graph(C3, C3_MOMENTA, budget=10)


def test_xi_zeta_single_edge():
    spec = spec_for(1, RationalMatrix([[F(1, 2)]]))
    side1 = TripleVertex(1, (fs(), fs(), fs({0})))
    side2 = TripleVertex(2, (fs({0}), fs({0}), fs()))
    # side 1: det W_{e,e} * (empty monomial) * det N_e^2; side 2: empty minor * y_e * q
    assert xi_zeta(K2, K2_MOM, side1, spec, 10) == (F(21, 2), F(21, 2))
    assert xi_zeta(K2, K2_MOM, side2, spec, 10) == (10, 10)


def test_weight_identities_small():
    for g, mom in ((K2, K2_MOM), (C3, C3_MOMENTA), (BANANA3, B3_MOM), (PARALLEL, MomentumAssignment.scalar([1, 0, -1]))):
        spec = spec_for(g.m, sample_perturbation(g.m, 1, random.Random(g.m)))
        for t in (F(10), F(1000)):
            assert weight_identities(g, mom, spec, t).passed


@settings(max_examples=15)
@given(st.data())
def test_weight_identities_random(data):
    g, mom = data.draw(graphs_with_momenta(max_n=4, max_extra=2))
    a = sample_perturbation(g.m, 1, random.Random(data.draw(st.integers(0, 10**6))))
    assert weight_identities(g, mom, spec_for(g.m, a), F(37, 3)).passed


def test_q_balance_banana():
    report = q_balance_check(build_triple_graph(BANANA3, B3_MOM))
    assert report.passed and report.special_free == 3
    assert [(s1, s2) for _, s1, s2 in report.sums] == [(9, 9)] * 3


@pytest.mark.parametrize("g, mom", [
    (K2, K2_MOM),
    (BANANA3, B3_MOM),
    (PARALLEL, MomentumAssignment.scalar([2, -1, -1])),
    (C3, C3_MOMENTA),
])
def test_projection_isomorphism(g, mom):
    tg = build_triple_graph(g, mom)
    reports = [projection_iso_check(tg, c) for c in tg.special_free_components()]
    assert reports and all(r.passed for r in reports)


@settings(max_examples=20)
@given(graphs_with_momenta(max_n=4, max_extra=2))
def test_balance_and_projection_random(gm):
    g, mom = gm
    tg = build_triple_graph(g, mom)
    assert q_balance_check(tg).passed
    for c in tg.special_free_components():
        report = projection_iso_check(tg, c)
        assert report.passed, report.message


def test_single_edge_sweep_is_constant():
    a = F(1, 2)
    report = boundedness_sweep(K2, K2_MOM, spec_for(1, RationalMatrix([[a]])))
    assert {r.delta for r in report.rows} == {q_of_forest(K2, set(), K2_MOM) * a}
    assert report.passed


def test_unperturbed_sweep_is_zero():
    report = boundedness_sweep(C3, C3_MOMENTA, spec_for(3, RationalMatrix.zeros(3, 3)))
    assert all(r.delta == 0 for r in report.rows) and report.passed


def test_c3_regression_anchor():
    report = boundedness_sweep(C3, C3_MOMENTA, spec_for(3, C3_A))
    assert [r.delta for r in report.rows] == C3_DELTAS
    assert report.passed and report.tail_start == 100
    assert report.to_csv().splitlines()[0] == "t,f1,f2,g1,g2,Delta,g1_over_f1"


def test_singular_row_gives_partial_report():
    report = boundedness_sweep(K2, K2_MOM, spec_for(1, RationalMatrix([[-1]]), grid=(1, 2, 4)))
    assert report.singular_at == [1] and not report.passed
    assert report.rows[0].delta is None and report.rows[1].delta == -1
    assert report.to_json()["rows"][0]["Delta"] == ""


def test_tail_stability():
    assert tail_stability([F(1), F(3, 2), F(7, 4)])[0]
    assert not tail_stability([F(0), F(1), F(3)])[0]
    assert not tail_stability([F(0), F(1, 2), F(5)], factor=1)[0]


@pytest.mark.parametrize("values, degree", [
    ([0, 0, 0], -1),
    ([5, 5, 5, 5], 0),
    ([t * t - 3 for t in range(6)], 2),
    ([t**4 for t in range(9)], 4),
])
def test_polynomial_degree(values, degree):
    assert polynomial_degree([F(v) for v in values]) == degree


def test_surrogates_pass_on_small_graphs():
    for g, mom in ((K2, K2_MOM), (C3, C3_MOMENTA), (BANANA3, B3_MOM)):
        tg = build_triple_graph(g, mom)
        report = asymptotic_surrogates(tg, spec_for(g.m, sample_perturbation(g.m, 1, random.Random(5))))
        assert report.passed and report.max_excess <= 0


def test_degree_certificate_detects_unbounded_weights():
    # a non-special diagonal vertex carries xi of degree 3 > 2h on C3
    spec = spec_for(3, C3_A)
    v = TripleVertex(1, (fs({0}), fs({0}), fs({0, 1})))
    series = [Weights(C3, C3_MOMENTA, spec, t).xi_zeta(v)[0] for t in range(9)]
    assert polynomial_degree(series) == 3


def test_signed_minor_identity():
    g = Multigraph(4, ((0, 1), (1, 2), (2, 3), (3, 0), (0, 2), (1, 3), (0, 1)))
    report = minor_identities(g, MomentumAssignment.scalar([1, 2, -3, 0]))
    assert report.passed and report.pairs == 248
    assert report.unsigned_mismatches == 52


@settings(max_examples=25)
@given(graphs_with_momenta(max_n=5, max_extra=3))
def test_minor_identities_random(gm):
    assert minor_identities(*gm).passed


@given(graphs_with_momenta(max_n=5, max_extra=3))
def test_forest_minor_squares_match_polynomial(gm):
    g, mom = gm
    _, N = _extended(g, mom)
    for s, c in phi_enum(g, mom).terms.items():
        assert minor_det(N, None, sorted(s)) ** 2 == c
    assert set(psi_enum(g).terms.values()) <= {1}
