import itertools
from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qaw.colim import (
    ConstraintSet,
    DeclaredLimits,
    OmegaChainMet,
    OmegaChainPos,
    Stable,
    basic_weight_colimit,
    check_coinserter_products,
    check_coinserter_universal,
    check_met_colimit_characterization,
    check_product_commutation,
    coinserter,
    collapsing_chain,
    constant_chain_met,
    constant_chain_pos,
    is_reflexive,
    omega_colimit_met,
    omega_colimit_pos,
    order_pair_projections,
    ordinal_family,
    pair_from_tables,
    precongruence,
    respects_constraints,
)
from qaw.dist import INF
from qaw.errors import InvalidTail, NonStabilizingChain, NotReflexive
from qaw.mspace import FinMetric, MetricMap, discrete_space, identity_map, nonexpanding_maps, same_space, validate_metric
from qaw.poset import (
    FinPoset,
    MonotoneMap,
    chain,
    check_monotone,
    discrete_poset,
    find_order_iso,
    identity_monotone,
    poset_product,
)

import oracles
from strategies import QUARTERS, metric_spaces, posets

ONE = discrete_poset(["*"])


def triples(c):
    return {(x, y, eps) for x, y, eps in c.constraints}


# precongruences and basic-weight colimits


def test_precongruence_examples():
    assert triples(precongruence(discrete_space(["p"]))) == set()
    M = FinMetric.from_pairs("pq", {("p", "q"): 1})
    assert triples(precongruence(M)) == {("p", "q", 1)}
    M = FinMetric.from_pairs("pqr", {("p", "q"): 1, ("q", "r"): 2, ("p", "r"): F(5, 2)})
    assert triples(precongruence(M)) == {("p", "q", 1), ("q", "r", 2), ("p", "r", F(5, 2))}
    assert precongruence(M).base.d("p", "q") is INF


def test_path_constraints_add_up():
    c = ConstraintSet(discrete_space("abc"), (("a", "b", 1), ("b", "c", 1)))
    C, unit = basic_weight_colimit(c)
    assert C.d("a", "c") == 2
    raw = [[0, 1, None], [1, 0, 1], [None, 1, 0]]
    assert oracles.shortest_paths(raw)[0][2] == C.d("a", "c")


def test_parallel_constraints_take_min():
    c = ConstraintSet(discrete_space("ab"), tuple(("a", "b", e) for e in (1, F(1, 2), F(1, 4))))
    C, _ = basic_weight_colimit(c)
    assert C.d("a", "b") == F(1, 4)


def test_constraints_must_be_positive_and_finite():
    with pytest.raises(ValueError):
        ConstraintSet(discrete_space("ab"), (("a", "b", 0),))
    with pytest.raises(ValueError):
        ConstraintSet(discrete_space("ab"), (("a", "b", INF),))


@given(metric_spaces(max_points=8))
def test_precongruence_reconstructs(M):
    C, unit = basic_weight_colimit(precongruence(M))
    assert same_space(C, M)
    assert unit.table == M.points


@st.composite
def constraint_sets(draw, max_points=5):
    base = draw(metric_spaces(max_points=max_points))
    pts = base.points
    cons = []
    if pts:
        for _ in range(draw(st.integers(0, 6))):
            cons.append((draw(st.sampled_from(pts)), draw(st.sampled_from(pts)),
                         draw(st.sampled_from(QUARTERS))))
    return ConstraintSet(base, tuple(cons))


@given(constraint_sets())
def test_closure_output_is_a_metric(c):
    C, unit = basic_weight_colimit(c)
    validate_metric(C.points, C.dist)
    assert set(unit.table) == set(C.points)
    # compare against an independent relaxation of the same lowered table
    rows = [[oracles.raw(d) for d in r] for r in c.base.dist]
    idx = c.base.index
    for x, y, eps in c.constraints:
        i, j = idx[x], idx[y]
        if oracles.le(F(eps), rows[i][j]):
            rows[i][j] = rows[j][i] = F(eps)
    closed = oracles.shortest_paths(rows)
    for x in c.base.points:
        for y in c.base.points:
            assert oracles.raw(C.d(unit(x), unit(y))) == closed[idx[x]][idx[y]]


@given(constraint_sets(max_points=3), metric_spaces(min_points=1, max_points=3, values=[F(1, 4), F(1, 2), F(1)], prefix="z"))
def test_colimit_universal_property(c, Z):
    C, unit = basic_weight_colimit(c)
    respecting = [g for g in itertools.product(Z.points, repeat=len(c.base))
                  if respects_constraints(c, MetricMap(c.base, Z, g))]
    factored = sorted(tuple(h[C.index[unit(x)]] for x in c.base.points) for h in nonexpanding_maps(C, Z))
    assert factored == sorted(respecting)
    assert len(set(factored)) == len(factored)


# coinserters


def test_coinserter_of_equal_maps_is_identity():
    B = chain(["0", "1"])
    ident = identity_monotone(B)
    Q, c = coinserter(pair_from_tables(B, B, ident.table, ident.table))
    assert Q == B and c.table == B.points


def test_coinserter_of_order_pairs_of_two_chain():
    C = chain(["a", "b"])
    p = order_pair_projections(C)
    assert set(p.A.points) == {"(a,a)", "(a,b)", "(b,b)"}
    Q, c = coinserter(p)
    assert find_order_iso(Q, C) == {"a": "a", "b": "b"}
    ok, d = is_reflexive(p)
    assert ok and d.as_dict() == {"a": "(a,a)", "b": "(b,b)"}


def test_coinserter_adds_single_pair():
    p = pair_from_tables(ONE, discrete_poset("uv"), ("u",), ("v",))
    Q, c = coinserter(p)
    assert Q.leq("u", "v") and not Q.leq("v", "u")
    assert is_reflexive(p) == (False, None)


def test_identity_pair_reflexive():
    B = chain("xyz")
    ok, d = is_reflexive(pair_from_tables(B, B, B.points, B.points))
    assert ok and d.table == B.points


@st.composite
def parallel_pairs(draw, max_a=4, max_b=4):
    A = draw(posets(max_points=max_a, prefix="a"))
    B = draw(posets(min_points=1, max_points=max_b, prefix="b"))
    from qaw.poset import monotone_maps
    maps = monotone_maps(A, B)
    return pair_from_tables(A, B, draw(st.sampled_from(maps)), draw(st.sampled_from(maps)))


@given(parallel_pairs())
def test_coinserter_invariants(p):
    Q, c = coinserter(p)
    assert check_monotone(c)[0]
    assert set(c.table) == set(Q.points)
    assert all(Q.leq(c(p.f0(a)), c(p.f1(a))) for a in p.A.points)
    B = p.B
    n = len(B)
    pairs = [(i, j) for i in range(n) for j in range(n) if B.leq_table[i][j]]
    pairs += [(B.index[p.f0(a)], B.index[p.f1(a)]) for a in p.A.points]
    pre = oracles.preorder_closure(n, pairs)
    assert len(oracles.order_classes(pre)) == len(Q)
    for i in range(n):
        for j in range(n):
            assert Q.leq(c(B.points[i]), c(B.points[j])) == pre[i][j]


@given(posets(max_points=6))
def test_order_pairs_recover_poset(C):
    Q, c = coinserter(order_pair_projections(C))
    assert find_order_iso(Q, C) is not None


@given(parallel_pairs(max_a=3, max_b=3))
def test_computed_coinserter_is_universal(p):
    ok, why = check_coinserter_universal(p, coinserter(p), max_target=3)
    assert ok, why


def test_universal_check_rejects_identity_candidate():
    B = discrete_poset("uv")
    p = pair_from_tables(ONE, B, ("u",), ("v",))
    ok, why = check_coinserter_universal(p, (B, identity_monotone(B)), max_target=3)
    assert not ok


def test_universal_check_rejects_collapsed_candidate():
    B = discrete_poset("uv")
    p = pair_from_tables(ONE, B, ("u",), ("v",))
    one = discrete_poset(["*"])
    ok, why = check_coinserter_universal(p, (one, MonotoneMap(B, one, ("*", "*"))), max_target=3)
    assert not ok


def test_coinserter_products():
    ident = pair_from_tables(ONE, ONE, ("*",), ("*",))
    assert check_coinserter_products(ident, ident)[0]
    pc = order_pair_projections(chain(["a", "b"]))
    ok, info = check_coinserter_products(pc, pc)
    assert ok and len(info["colimit_of_product"]) == 4
    bad = pair_from_tables(ONE, discrete_poset("uv"), ("u",), ("v",))
    with pytest.raises(NotReflexive) as err:
        check_coinserter_products(ident, bad)
    assert err.value.which == "B"


# ω-chains


def test_constant_chain_colimit():
    M = FinMetric.from_pairs("ab", {("a", "b"): 3})
    C, cocone = omega_colimit_met(constant_chain_met(M, 3))
    assert same_space(C, M)


def test_collapsing_chain_has_point_colimit():
    ch = collapsing_chain(5)
    assert [s.d("0", "1") for s in ch.stages] == [F(1, 2 ** n) for n in range(5)]
    C, cocone = omega_colimit_met(ch)
    assert len(C) == 1
    assert check_met_colimit_characterization(ch, C, cocone)[0]


def test_collapsing_link_gives_point():
    D = discrete_space("ab")
    S = discrete_space(["*"])
    ch = OmegaChainMet((D, S), (MetricMap(D, S, ("*", "*")),), Stable())
    C, _ = omega_colimit_met(ch)
    assert len(C) == 1


def test_declared_limits_are_validated():
    M = FinMetric.from_pairs("ab", {("a", "b"): 1})
    with pytest.raises(InvalidTail):
        OmegaChainMet((M,), (), DeclaredLimits({("a", "b"): 2}))
    X = FinMetric.from_pairs("abc", {("a", "b"): 1, ("b", "c"): 1, ("a", "c"): 2})
    with pytest.raises(InvalidTail):
        OmegaChainMet((X,), (), DeclaredLimits({("a", "b"): 0, ("b", "c"): 0, ("a", "c"): 1}))


def test_pos_chain_examples():
    c2 = chain(["0", "1"])
    assert omega_colimit_pos(constant_chain_pos(c2, 2))[0] == c2
    c1 = chain(["0"])
    ch = OmegaChainPos((c1, c2, c2), (MonotoneMap(c1, c2, ("0",)), identity_monotone(c2)), Stable())
    assert omega_colimit_pos(ch)[0] == c2
    with pytest.raises(NonStabilizingChain, match="ℕ"):
        ordinal_family(4, stabilize=False)
    assert len(omega_colimit_pos(ordinal_family(4))[0]) == 4


@st.composite
def met_chains(draw, max_stages=3, max_points=3):
    stages = [draw(metric_spaces(min_points=1, max_points=max_points, prefix=f"s{k}_"))
              for k in range(draw(st.integers(1, max_stages)))]
    links = []
    for a, b in zip(stages, stages[1:]):
        links.append(MetricMap(a, b, draw(st.sampled_from(nonexpanding_maps(a, b)))))
    return OmegaChainMet(tuple(stages), tuple(links), Stable())


@given(met_chains())
def test_met_colimit_characterization(ch):
    C, cocone = omega_colimit_met(ch)
    assert check_met_colimit_characterization(ch, C, cocone)[0]


def test_product_commutation_examples():
    M = FinMetric.from_pairs("ab", {("a", "b"): 1})
    assert check_product_commutation(constant_chain_met(M, 2), constant_chain_met(M, 1), "met")[0]
    single = constant_chain_met(discrete_space(["*"]), 1)
    assert check_product_commutation(collapsing_chain(4), single, "met")[0]
    c1, c2 = chain(["0"]), chain(["0", "1"])
    diamond, _ = poset_product([c2, c2])
    grow = OmegaChainPos((c1, c2), (MonotoneMap(c1, c2, ("1",)),), Stable())
    corner = FinPoset(["(0,0)"], [[True]])
    to_diamond = OmegaChainPos((corner, diamond), (MonotoneMap(corner, diamond, ("(0,0)",)),), Stable())
    ok, info = check_product_commutation(grow, to_diamond, "pos")
    assert ok and len(info["product_of_colimits"]) == 8


def test_declared_tail_paired_with_points_that_appear_late():
    # the second chain only reaches its point v at stage 2
    one = discrete_space(["u"])
    two = FinMetric.from_pairs("uv", {("u", "v"): F(1, 2)})
    late = OmegaChainMet((one, one, two), (identity_map(one), MetricMap(one, two, ("u",))), Stable())
    ok, info = check_product_commutation(collapsing_chain(2), late, "met")
    assert ok and len(info["colimit_of_product"]) == 2


@given(met_chains(max_stages=3, max_points=2), met_chains(max_stages=2, max_points=2))
def test_product_commutation_met(a, b):
    assert check_product_commutation(a, b, "met")[0]
