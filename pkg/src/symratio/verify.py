"""Property suites over the corpus and the acceptance checks built on them.

Every suite returns an :class:`Outcome`. Outcomes hold counts and the first
few counterexamples, never timings, so serialized summaries are byte-stable
for a fixed seed.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .corpus import CorpusItem, build_corpus
from .exchange import DEFAULT_BUDGET, verify_thm_conn
from .homology import (
    RationalMatrix,
    SingularMatrixError,
    assemble_blocks,
    block_inverse_identities,
    boundary_matrix,
    canonical_cycle_basis,
    cauchy_binet_expand,
    cycle_basis,
    det,
    gram,
    schur_ratio,
)
from .multigraph import Multigraph, is_spanning_2forest, is_spanning_tree, spanning_2forests, spanning_trees
from .symanzik import MomentumAssignment, phi_det, phi_enum, psi_det, psi_enum
from .variation import (
    PerturbationSpec,
    Weights,
    asymptotic_surrogates,
    boundedness_sweep,
    build_triple_graph,
    minor_identities,
    projection_iso_check,
    q_balance_check,
    sample_perturbation,
    triple_vertex_count,
    weight_identities,
)

MAX_EXAMPLES = 5
DEFAULT_TRIPLE_BUDGET = 5_000


@dataclass
class Outcome:
    name: str
    checked: int = 0
    failures: int = 0
    skipped: int = 0
    notes: dict = field(default_factory=dict)
    examples: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.checked > 0 and self.failures == 0

    def fail(self, example: str) -> None:
        self.failures += 1
        if len(self.examples) < MAX_EXAMPLES:
            self.examples.append(example)

    def record(self, ok: bool, example: Callable[[], str]) -> None:
        self.checked += 1
        if not ok:
            self.fail(example())

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "checked": self.checked,
            "failures": self.failures,
            "skipped": self.skipped,
            "notes": self.notes,
            "examples": self.examples,
        }

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        extra = f", skipped {self.skipped}" if self.skipped else ""
        return f"{verdict} {self.name}: {self.checked} checked, {self.failures} failed{extra}"


def random_weights(m: int, rng: random.Random) -> list[Fraction]:
    return [Fraction(rng.randint(1, 50), rng.randint(1, 9)) for _ in range(m)]


# -- graph-level suites ------------------------------------------------------


def enumeration_suite(items: Sequence[CorpusItem]) -> Outcome:
    """Trees have n-1 edges and connect; 2-forests are acyclic with two parts;
    the 2-forests are exactly the trees minus one edge."""
    out = Outcome("enumeration")
    for it in items:
        g = it.graph
        trees, forests = spanning_trees(g), spanning_2forests(g)
        from_trees = {t - {e} for t in trees for e in t}
        ok = (all(is_spanning_tree(g, t) and len(g.components(t)) == 1 for t in trees)
              and all(is_spanning_2forest(g, f) and len(g.components(f)) == 2 for f in forests)
              and from_trees == set(forests))
        out.record(ok, lambda: it.name)
    return out


def homology_suite(items: Sequence[CorpusItem], seed: int = 0, points: int = 3) -> Outcome:
    """Cycle rows lie in the kernel of the boundary map, the unweighted Gram
    determinant counts spanning trees, the minor expansion reproduces the
    determinant, and the Gram determinant does not depend on the tree."""
    rng = random.Random(seed)
    out = Outcome("homology")
    for it in items:
        g = it.graph
        basis = canonical_cycle_basis(g)
        trees = spanning_trees(g)
        ok = all(x == 0 for r in (boundary_matrix(g) @ basis.M.T).rows for x in r)
        ok &= det(gram(basis.M, RationalMatrix.identity(g.m))) == len(trees)
        coeffs = cauchy_binet_expand(basis.M)
        for _ in range(points):
            y = random_weights(g.m, rng)
            expanded = sum((c * _mono(s, y) for s, c in coeffs.items()), Fraction(0))
            ok &= expanded == det(gram(basis.M, RationalMatrix.diag(y)))
        other = trees[rng.randrange(len(trees))]
        ok &= cauchy_binet_expand(cycle_basis(g, other).M) == coeffs
        out.record(ok, lambda: it.name)
    return out


def _mono(s: Iterable[int], y: Sequence[Fraction]) -> Fraction:
    out = Fraction(1)
    for e in s:
        out *= y[e]
    return out


def kirchhoff_oracle(items: Sequence[CorpusItem], seed: int = 0, points: int = 50) -> Outcome:
    """Determinant and enumeration forms of both polynomials agree exactly."""
    rng = random.Random(seed)
    out = Outcome("determinant vs enumeration")
    for it in items:
        g, mom = it.graph, it.momenta
        psi, phi = psi_enum(g), phi_enum(g, mom)
        bad = None
        for _ in range(points):
            y = random_weights(g.m, rng)
            if psi_det(g, y) != psi.evaluate(y) or phi_det(g, mom, y) != phi.evaluate(y):
                bad = y
                break
        out.record(bad is None, lambda: f"{it.name} at y={[str(v) for v in bad]}")
    out.notes["points_per_graph"] = points
    return out


def symanzik_suite(items: Sequence[CorpusItem], seed: int = 0) -> Outcome:
    """Lift independence and homogeneity of both polynomials."""
    rng = random.Random(seed)
    out = Outcome("symanzik invariance")
    for it in items:
        g, mom = it.graph, it.momenta
        trees = spanning_trees(g)
        y = random_weights(g.m, rng)
        t = Fraction(rng.randint(2, 9), rng.randint(1, 5))
        h = g.m - g.n + 1
        ok = phi_det(g, mom, y) == phi_det(g, mom, y, tree=trees[-1])
        ty = [t * v for v in y]
        ok &= psi_det(g, ty) == t**h * psi_det(g, y)
        ok &= phi_det(g, mom, ty) == t ** (h + 1) * phi_det(g, mom, y)
        out.record(ok, lambda: it.name)
    return out


def minor_square_suite(items: Sequence[CorpusItem]) -> Outcome:
    """Squared maximal minors are 1 on tree complements and q(F) on 2-forest
    complements; the signed product identity holds for vertex-equivalent forests."""
    out = Outcome("minor identities")
    totals = {"trees": 0, "forests": 0, "pairs": 0, "unsigned_mismatches": 0}
    for it in items:
        r = minor_identities(it.graph, it.momenta)
        for k in totals:
            totals[k] += getattr(r, k)
        out.record(r.passed, lambda: f"{it.name}: {r}")
    out.notes.update(totals)
    return out


def exchange_suite(items: Sequence[CorpusItem], budget: int = DEFAULT_BUDGET) -> Outcome:
    """Component classification of the exchange graph."""
    out = Outcome("exchange components")
    connected = vacuous = 0
    for it in items:
        r = verify_thm_conn(it.graph, budget)
        if not r.within_budget:
            out.skipped += 1
            continue
        connected += r.connected
        vacuous += r.vacuous
        out.record(r.passed and r.mismatches == 0, lambda: f"{it.name}: {r.counterexample}")
    out.notes.update({"connected": connected, "empty": vacuous, "budget": budget})
    return out


# -- triple graph and weights -------------------------------------------------


def _spec_for(g: Multigraph, rng: random.Random, bound=1) -> PerturbationSpec:
    base = [Fraction(rng.randint(1, 4)) for _ in range(g.m)]
    return PerturbationSpec(base, sample_perturbation(g.m, bound, rng), Fraction(bound))


def _has_momentum(it: CorpusItem) -> bool:
    return not it.momenta.is_zero()


def triple_suite(
    items: Sequence[CorpusItem], seed: int = 0, budget: int = DEFAULT_TRIPLE_BUDGET
) -> tuple[Outcome, Outcome]:
    """q-balance and the projection isomorphism on every special-free component
    of each triple graph within ``budget``."""
    balance, iso = Outcome("q-balance"), Outcome("projection isomorphism")
    rng = random.Random(seed)
    for it in items:
        if triple_vertex_count(it.graph) > budget:
            balance.skipped += 1
            iso.skipped += 1
            continue
        tg = build_triple_graph(it.graph, it.momenta, budget)
        weights = Weights(it.graph, it.momenta, _spec_for(it.graph, rng), 1000)
        qb = q_balance_check(tg, weights)
        for c, s1, s2 in qb.sums:
            balance.record(s1 == s2, lambda: f"{it.name} component {c}: {s1} != {s2}")
        for c in tg.special_free_components():
            r = projection_iso_check(tg, c)
            iso.record(r.passed, lambda: f"{it.name} component {c}: {r.message}")
    balance.notes["budget"] = iso.notes["budget"] = budget
    return balance, iso


def identity_instances(
    items: Sequence[CorpusItem], seed: int = 0, count: int = 50, budget: int = DEFAULT_TRIPLE_BUDGET
) -> list[tuple[CorpusItem, PerturbationSpec, Fraction]]:
    """Seeded (graph, momenta, y0, A, t) instances among graphs within ``budget``."""
    rng = random.Random(seed)
    pool = [it for it in items if _has_momentum(it) and triple_vertex_count(it.graph) <= budget]
    if not pool:
        return []
    picks = [pool[rng.randrange(len(pool))] for _ in range(count)]
    return [(it, _spec_for(it.graph, rng), Fraction(10) ** rng.randint(0, 4)) for it in picks]


def weight_identity_suite(instances) -> Outcome:
    out = Outcome("weight identities")
    for it, spec, t in instances:
        try:
            ok = weight_identities(it.graph, it.momenta, spec, t).passed
        except AssertionError as exc:
            ok, msg = False, str(exc)
        else:
            msg = ""
        out.record(ok, lambda: f"{it.name} t={t}: {msg}")
    return out


def sweep_instances(items: Sequence[CorpusItem], seed: int = 0, count: int = 20, bound=1, budget: int | None = None):
    """Seeded (graph, spec) pairs with nonzero momenta and at least one loop;
    ``budget`` restricts to graphs whose triple graph fits."""
    rng = random.Random(seed)
    pool = [it for it in items if _has_momentum(it) and it.graph.m - it.graph.n + 1 >= 1
            and (budget is None or triple_vertex_count(it.graph) <= budget)]
    picks = [pool[rng.randrange(len(pool))] for _ in range(count)]
    return [(it, _spec_for(it.graph, rng, bound)) for it in picks]


def k2_closed_form(seed: int = 0, count: int = 10) -> Outcome:
    """On a single edge the gap is exactly ``q * a`` at every scale."""
    rng = random.Random(seed)
    out = Outcome("single-edge closed form")
    g = Multigraph(2, ((0, 1),))
    for _ in range(count):
        p = Fraction(rng.randint(-9, 9), rng.randint(1, 5))
        mom = MomentumAssignment.scalar([p, -p])
        a = sample_perturbation(1, 1, rng)
        spec = PerturbationSpec([Fraction(rng.randint(1, 5))], a, 1)
        rep = boundedness_sweep(g, mom, spec)
        out.record(all(r.delta == p * p * a[0, 0] for r in rep.rows), lambda: f"p={p}, a={a[0, 0]}")
    return out


def boundedness_suite(instances) -> tuple[Outcome, list]:
    out = Outcome("bounded gap along the scaling grid")
    reports = []
    lows = []
    for it, spec in instances:
        rep = boundedness_sweep(it.graph, it.momenta, spec)
        reports.append((it, rep))
        if rep.sandwich is not None:
            lows.append(rep.sandwich[0])
        out.record(rep.passed, lambda: f"{it.name}: tail differences {[str(d) for d in rep.tail_differences]}")
    if lows:
        out.notes["min_g1_over_f1"] = str(min(lows))
    return out, reports


def surrogate_suite(instances, budget: int = DEFAULT_TRIPLE_BUDGET) -> Outcome:
    out = Outcome("weight estimates along the scaling grid")
    for it, spec in instances:
        if triple_vertex_count(it.graph) > budget:
            out.skipped += 1
            continue
        r = asymptotic_surrogates(build_triple_graph(it.graph, it.momenta, budget), spec)
        out.record(r.passed, lambda: f"{it.name}: {r}")
    return out


# -- matrix identities --------------------------------------------------------


def _random_matrix(rows: int, cols: int, rng: random.Random) -> RationalMatrix:
    return RationalMatrix(
        [[Fraction(rng.randint(-9, 9), rng.randint(1, 6)) for _ in range(cols)] for _ in range(rows)], cols
    )


def schur_suite(seed: int = 0, count: int = 100) -> Outcome:
    rng = random.Random(seed)
    out = Outcome("schur ratio")
    while out.checked < count:
        r = rng.randint(1, 4)
        m = _random_matrix(r, r, rng)
        dm = det(m)
        if not dm:
            continue
        w = [Fraction(rng.randint(-9, 9), rng.randint(1, 6)) for _ in range(r)]
        s = Fraction(rng.randint(-9, 9), rng.randint(1, 6))
        col = RationalMatrix([[x] for x in w], 1)
        full = assemble_blocks(m, col, col.T, RationalMatrix([[s]], 1))
        value = schur_ratio(m, w, s)
        out.record(value * dm == det(full), lambda: f"{m.to_strings()} {w} {s}")
    return out


def block_inverse_suite(seed: int = 0, count: int = 100) -> Outcome:
    rng = random.Random(seed)
    out = Outcome("block inverse")
    while out.checked < count:
        k, l = rng.randint(1, 3), rng.randint(1, 3)
        blocks = (_random_matrix(k, k, rng), _random_matrix(k, l, rng),
                  _random_matrix(l, k, rng), _random_matrix(l, l, rng))
        try:
            flags = block_inverse_identities(*blocks)
        except SingularMatrixError:
            continue
        out.record(all(flags.values()), lambda: str(flags))
    return out


# -- acceptance ---------------------------------------------------------------


@dataclass
class Criterion:
    number: int
    title: str
    outcomes: list[Outcome]

    @property
    def passed(self) -> bool:
        return all(o.passed for o in self.outcomes)

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        parts = "; ".join(o.line() for o in self.outcomes)
        return f"[{verdict}] criterion {self.number} ({self.title}): {parts}"


def criterion_kirchhoff(items, seed=0) -> Criterion:
    return Criterion(1, "determinant forms match enumeration", [kirchhoff_oracle(items, seed)])


def criterion_minors(items) -> Criterion:
    return Criterion(2, "squared minors and forest-pair identity", [minor_square_suite(items)])


def criterion_exchange(items, budget=DEFAULT_BUDGET) -> Criterion:
    return Criterion(3, "exchange graph components", [exchange_suite(items, budget)])


def criterion_triple(items, seed=0, budget=DEFAULT_TRIPLE_BUDGET) -> Criterion:
    weights = weight_identity_suite(identity_instances(items, seed, 50, budget))
    balance, iso = triple_suite(items, seed, budget)
    return Criterion(4, "triple graph identities", [weights, balance, iso])


def criterion_boundedness(items, seed=0) -> Criterion:
    bounded, _ = boundedness_suite(sweep_instances(items, seed, 20))
    return Criterion(5, "bounded gap surrogate", [bounded, k2_closed_form(seed)])


def criterion_matrices(seed=0) -> Criterion:
    return Criterion(6, "block matrix identities", [schur_suite(seed), block_inverse_suite(seed)])


@dataclass
class VerifyConfig:
    seed: int = 0
    max_n: int = 6
    max_m: int = 10
    exhaustive_n: int = 5
    samples: int = 200
    loop_graphs: int = 30
    budget: int = DEFAULT_BUDGET
    triple_budget: int = DEFAULT_TRIPLE_BUDGET
    points: int = 50

    def corpus(self) -> list[CorpusItem]:
        return build_corpus(self.max_n, self.max_m, self.seed, self.exhaustive_n, self.samples, self.loop_graphs)


@dataclass
class Summary:
    config: VerifyConfig
    corpus_size: int
    outcomes: list[Outcome]

    @property
    def passed(self) -> bool:
        return all(o.passed or (o.checked == 0 and not o.failures) for o in self.outcomes)

    def to_json(self) -> dict:
        cfg = self.config
        return {
            "config": {k: getattr(cfg, k) for k in cfg.__dataclass_fields__},
            "corpus_size": self.corpus_size,
            "passed": self.passed,
            "properties": [o.to_json() for o in self.outcomes],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n"

    def table(self) -> str:
        return "".join(o.line() + "\n" for o in self.outcomes)


def run_all(cfg: VerifyConfig, items: list[CorpusItem] | None = None, progress: Callable[[str], None] | None = None) -> Summary:
    """Every property suite over one corpus."""
    items = cfg.corpus() if items is None else items
    seed = cfg.seed
    steps: list[Callable[[], list[Outcome]]] = [
        lambda: [enumeration_suite(items)],
        lambda: [homology_suite(items, seed)],
        lambda: [kirchhoff_oracle(items, seed, cfg.points)],
        lambda: [symanzik_suite(items, seed)],
        lambda: [minor_square_suite(items)],
        lambda: [exchange_suite(items, cfg.budget)],
        lambda: [weight_identity_suite(identity_instances(items, seed, 50, cfg.triple_budget))],
        lambda: list(triple_suite(items, seed, cfg.triple_budget)),
        lambda: [boundedness_suite(sweep_instances(items, seed, 20))[0], k2_closed_form(seed)],
        lambda: [surrogate_suite(sweep_instances(items, seed, 20, budget=cfg.triple_budget), cfg.triple_budget)],
        lambda: [schur_suite(seed), block_inverse_suite(seed)],
    ]
    outcomes: list[Outcome] = []
    for step in steps:
        for o in step():
            outcomes.append(o)
            if progress is not None:
                progress(o.line())
    return Summary(cfg, len(items), outcomes)
