from fractions import Fraction

from hypothesis import strategies as st

from symratio.multigraph import Multigraph
from symratio.symanzik import MomentumAssignment

K2 = Multigraph(2, ((0, 1),))
C3 = Multigraph(3, ((0, 1), (1, 2), (2, 0)))
BANANA2 = Multigraph(2, ((0, 1), (0, 1)))
BANANA3 = Multigraph(2, ((0, 1), (0, 1), (0, 1)))
PATH3 = Multigraph(3, ((0, 1), (1, 2)))
PARALLEL = Multigraph(3, ((0, 1), (1, 2), (0, 1)))  # two parallel edges plus a pendant
C3_MOMENTA = MomentumAssignment.scalar([1, 1, -2])


@st.composite
def connected_multigraphs(draw, min_n=2, max_n=5, max_extra=4, loops=False):
    n = draw(st.integers(min_n, max_n))
    edges = []
    for v in range(1, n):
        u = draw(st.integers(0, v - 1))
        edges.append((u, v) if draw(st.booleans()) else (v, u))
    for _ in range(draw(st.integers(0, max_extra))):
        u, v = draw(st.integers(0, n - 1)), draw(st.integers(0, n - 1))
        if u == v and not loops:
            v = (u + 1) % n
        edges.append((u, v))
    return Multigraph(n, tuple(draw(st.permutations(edges))))


@st.composite
def scalar_momenta(draw, n):
    vals = [draw(st.integers(-4, 4)) for _ in range(n - 1)]
    return MomentumAssignment.scalar(vals + [-sum(vals)])


@st.composite
def graphs_with_momenta(draw, **kw):
    g = draw(connected_multigraphs(**kw))
    return g, draw(scalar_momenta(g.n))


positive_rationals = st.builds(Fraction, st.integers(1, 40), st.integers(1, 7))


def weights(m):
    return st.lists(positive_rationals, min_size=m, max_size=m)
