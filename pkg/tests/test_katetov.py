import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from fraisse_lab.amalgam import ExtensionType
from fraisse_lab.core import (GRAPH, NGon, are_isomorphic, automorphisms, empty, graph, induced,
                              metric, path, poset)
from fraisse_lab.errors import MenuRequired, SearchBoundExceeded
from fraisse_lab.katetov import (PartialTower, back_and_forth_iso, build_tower, check_richness,
                                 enum_types, finite_determination_witness, katetov_step,
                                 lift_automorphism, saturate)
from fraisse_lab.sir import COMPLETE_GRAPH, FREE_GRAPH, MIN_METRIC, POSET_AMALGAM, NGonStrong

from _oracles import brute_embeddings, brute_iso, rand_graph, rand_poset, seeded


def _brute_graph_types(X, m):
    """Isomorphism classes over X of graphs on X + m new vertices, by exhaustive search."""
    s = max(X.vertices, default=-1) + 1
    new = list(range(s, s + m))
    vs = list(X.vertices) + new
    slots = [(u, v) for u, v in itertools.combinations(vs, 2) if v in new]
    reps = []
    for bits in itertools.product((0, 1), repeat=len(slots)):
        G = graph(vs, set(X.edges) | {p for p, b in zip(slots, bits) if b})
        if not any(brute_iso(G, H, X.vertices) for H in reps):
            reps.append(G)
    return len(reps)


def _brute_poset_points(X):
    """One-point extensions of a poset: down-set / up-set pairs, by brute force."""
    v = max(X.vertices, default=-1) + 1
    count = 0
    vs = list(X.vertices)
    for below in itertools.product((0, 1, 2), repeat=len(vs)):   # 0 incomparable, 1 below v, 2 above v
        pairs = set(X.order)
        pairs |= {(x, v) for x, b in zip(vs, below) if b == 1}
        pairs |= {(v, x) for x, b in zip(vs, below) if b == 2}
        P = poset(vs + [v], pairs)
        if any((b, a) in P.order for a, b in P.order):
            continue
        # the closure must not add relations we did not ask for
        want = {(x, v) for x, b in zip(vs, below) if b == 1} | {(v, x) for x, b in zip(vs, below) if b == 2}
        got = {p for p in P.order if v in p}
        if got == want and {p for p in P.order if v not in p} == set(X.order):
            count += 1
    return count


def test_enum_examples():
    assert len(enum_types(FREE_GRAPH, graph([0]), 1)) == 2
    assert len(enum_types(FREE_GRAPH, graph([0, 1]), 1)) == 4
    cat = enum_types(NGonStrong(3), path(5, NGon(3)), 1)
    assert len(cat) >= 1
    assert all(len(e.new) == 1 for e in cat)


def test_enum_errors():
    with pytest.raises(MenuRequired):
        enum_types(MIN_METRIC, metric([0], {}), 1)
    with pytest.raises(SearchBoundExceeded):
        enum_types(FREE_GRAPH, graph(range(10)), 1)
    with pytest.raises(ValueError):
        enum_types(FREE_GRAPH, graph([0]), 0)


@pytest.mark.parametrize("X,m", [
    (graph([]), 1), (graph([]), 2), (graph([0]), 2), (graph([0, 1], [(0, 1)]), 2),
    (graph([0, 1, 2], [(0, 1)]), 1), (graph([0, 1]), 2),
])
def test_graph_catalog_matches_exhaustive(X, m):
    want = sum(_brute_graph_types(X, j) for j in range(1, m + 1))
    assert len(enum_types(FREE_GRAPH, X, m)) == want


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6))
def test_poset_catalog_matches_exhaustive(seed):
    X = rand_poset(seeded("pc", seed), seeded("pk", seed).randint(0, 4))
    assert len(enum_types(POSET_AMALGAM, X, 1)) == _brute_poset_points(X)


def test_metric_catalog_over_a_point():
    # d(v, x) in {1, 2}
    assert len(enum_types(MIN_METRIC, metric([0], {}), 1, menu=[1, 2])) == 2
    # over two points at distance 1: pairs (a, b) in {1,2}^2 with |a-b| <= 1 <= a+b
    assert len(enum_types(MIN_METRIC, metric([0, 1], {(0, 1): 1}), 1, menu=[1, 2])) == 4


def test_step_examples():
    E1, cat, am = katetov_step(FREE_GRAPH, graph([0]), 1)
    assert len(E1) == 3 and len(E1.edges) == 1 and len(cat) == 2
    E1, _, _ = katetov_step(COMPLETE_GRAPH, graph([0]), 1)
    assert len(E1) == 3 and len(E1.edges) == 2
    adj = [v for v in E1.vertices if v != 0 and E1.has_edge(0, v)]
    non = [v for v in E1.vertices if v != 0 and not E1.has_edge(0, v)]
    assert E1.has_edge(adj[0], non[0])
    E1, _, _ = katetov_step(FREE_GRAPH, empty(GRAPH), 1)
    assert len(E1) == 1


def test_step_order_must_be_permutation():
    with pytest.raises(ValueError):
        katetov_step(FREE_GRAPH, graph([0]), 1, order=[0, 0])


def test_tower_examples():
    X = graph([0])
    assert build_tower(FREE_GRAPH, X, 1, 0).levels == [X]
    t = build_tower(FREE_GRAPH, X, 1, 2, bound=12)
    # frozen: 1, 3, 3 + 2**3
    assert [len(L) for L in t.levels] == [1, 3, 11]
    # the same value from the reversed fold order at every level
    s1 = katetov_step(FREE_GRAPH, X, 1, order=[1, 0])
    cat2 = enum_types(FREE_GRAPH, s1.E1, 1)
    s2 = katetov_step(FREE_GRAPH, s1.E1, 1, order=list(reversed(range(len(cat2)))), catalog=cat2)
    assert len(s2.E1) == 11
    assert are_isomorphic(s2.E1, t.levels[2], over=[0], bound=12) is not None
    assert all(e.is_valid() for e in t.inclusions)


def test_tower_growth_law_for_graphs():
    # a one-point type over a graph is a neighbourhood, so |E_{j+1}| = |E_j| + 2^|E_j|
    X = rand_graph(seeded("law"), 3)
    t = build_tower(FREE_GRAPH, X, 1, 1, bound=12)
    assert len(t.levels[1]) == 3 + 8


def test_partial_tower():
    with pytest.raises(PartialTower) as exc:
        build_tower(FREE_GRAPH, graph([0]), 1, 3, bound=11)
    assert [len(L) for L in exc.value.partial.levels] == [1, 3, 11]


def test_lift_identity():
    t = build_tower(FREE_GRAPH, graph([0, 1], [(0, 1)]), 1, 2, bound=16)
    lift = lift_automorphism(FREE_GRAPH, t, {0: 0, 1: 1})
    for j, L in enumerate(t.levels):
        assert lift[j] == {v: v for v in L.vertices}


def test_lift_swap_matches_exhaustive():
    X = graph([0, 1])
    t = build_tower(FREE_GRAPH, X, 1, 1)
    E1 = t.levels[1]
    g = lift_automorphism(FREE_GRAPH, t, {0: 1, 1: 0})[1]
    assert brute_embeddings(E1, E1, {0: 1, 1: 0}) == [g]
    typed = {frozenset(E1.adj[v]): v for v in E1.vertices if v > 1}
    assert g[typed[frozenset({0})]] == typed[frozenset({1})]
    assert g[typed[frozenset()]] == typed[frozenset()]
    assert g[typed[frozenset({0, 1})]] == typed[frozenset({0, 1})]


@pytest.mark.parametrize("X", [graph([0, 1, 2]), graph([0, 1, 2], [(0, 1)]),
                               graph([0, 1, 2], [(0, 1), (1, 2)]), graph([0, 1, 2], [(0, 1), (1, 2), (0, 2)])])
def test_lift_is_injective_homomorphism(X):
    t = build_tower(FREE_GRAPH, X, 1, 1)
    auts = [a.map for a in automorphisms(X)]
    lifts = {tuple(sorted(f.items())): lift_automorphism(FREE_GRAPH, t, f)[1] for f in auts}
    for f in auts:
        for g in auts:
            gf = {v: g[f[v]] for v in X.vertices}
            Lf, Lg = lifts[tuple(sorted(f.items()))], lifts[tuple(sorted(g.items()))]
            Lgf = lifts[tuple(sorted(gf.items()))]
            assert Lgf == {v: Lg[Lf[v]] for v in t.levels[1].vertices}
    assert len({tuple(sorted(m.items())) for m in lifts.values()}) == len(auts)


def test_determination_examples():
    X = graph([0, 1])
    t = build_tower(FREE_GRAPH, X, 1, 1)
    E1 = t.levels[1]
    swap = {0: 1, 1: 0}
    assert finite_determination_witness(FREE_GRAPH, t, swap, {0}).C == {0}
    v = next(w for w in E1.vertices if E1.adj[w] == {0})
    w = finite_determination_witness(FREE_GRAPH, t, swap, {v})
    assert 0 in w.C and w.checked >= 1
    assert finite_determination_witness(FREE_GRAPH, t, swap, E1.vertices).C == {0, 1}
    with pytest.raises(ValueError):
        finite_determination_witness(FREE_GRAPH, t, swap, {99})


def test_saturate_examples():
    X = graph([])
    chain = saturate(FREE_GRAPH, X, 1, 3)
    assert chain[0] == X and len(chain) == 4
    rep = check_richness(chain[2:], max_base=2)
    assert rep.complete and rep.levels[0]["probes"] > 0
    assert saturate(FREE_GRAPH, X, 1, 0) == [X]


def test_saturate_poset_point():
    x = poset([0])
    chain = saturate(POSET_AMALGAM, x, 1, 2)
    probes = [(0, ExtensionType(x, poset([0, 1], pairs))) for pairs in ([(1, 0)], [(0, 1)], [])]
    rep = check_richness(chain, probes=probes)
    assert rep.levels[0]["solved"] == 3


def test_saturate_seeded_graphs_differ_but_stay_rich():
    a = saturate(FREE_GRAPH, graph([]), 1, 3, seed=1)
    b = saturate(FREE_GRAPH, graph([]), 1, 3, seed=2)
    assert a[-1].edges != b[-1].edges
    assert check_richness(a[2:], max_base=2).complete


def test_bnf_examples():
    A = saturate(FREE_GRAPH, graph([]), 1, 3, seed=5)[-1]
    for d in (1, 2, 3):
        assert back_and_forth_iso(A, A, d)
    B = saturate(FREE_GRAPH, graph([]), 1, 3, seed=6)[-1]
    assert back_and_forth_iso(A, B, 2)
    # a universal vertex: the type "not adjacent to u" goes missing
    u = max(A.vertices) + 1
    C = graph(list(A.vertices) + [u], set(A.edges) | {(v, u) for v in A.vertices})
    res = back_and_forth_iso(A, C, 2)
    assert not res and res.witness["spoiler_moves"]
    assert not back_and_forth_iso(graph([]), graph([0]), 1)
    with pytest.raises(SearchBoundExceeded):
        back_and_forth_iso(A, B, 5)


def test_richness_examples():
    X = graph([0, 1], [(0, 1)])
    t = build_tower(FREE_GRAPH, X, 1, 1)
    rep = check_richness(t, probes=[(0, ExtensionType(X, X))])
    assert rep.levels[0]["solved"] == 1
    assert check_richness(t).complete
    assert check_richness(t).solved_ratio == [1.0]
    two = ExtensionType(X, graph([0, 1, 2, 3], [(0, 1)]))
    rep = check_richness(t, probes=[(0, two)], m=1)
    assert rep.levels[0]["out_of_bound"] == 1 and rep.levels[0]["unsolved"] == 0


def test_richness_sees_a_gap():
    X = graph([0])
    # E_1 missing the non-adjacent type
    rep = check_richness([X, graph([0, 1], [(0, 1)])])
    assert not rep.complete and rep.failures
