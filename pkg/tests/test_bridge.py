import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import raw, shortest_paths
from qaw.alg import Homo, check_homomorphism, make_algebra
from qaw.bridge import (
    FIXTURES,
    MET,
    POS,
    EMAlgebraDesc,
    MonadPresentation,
    alpha_of_algebra,
    builtin,
    check_em_algebra,
    check_freeness,
    check_kleisli_laws,
    discrete_carrier,
    em_to_variety_algebra,
    enumerate_em_algebras,
    enumerate_variety_alpha,
    enumerate_variety_tables,
    generate_variety,
    is_member,
    kan_evaluate,
    materialize,
    mutate,
    presentation_signature,
    small_carriers,
    symbol_name,
    translate_alpha,
    var_labels,
    variety_failure,
)
from qaw.dist import INF
from qaw.eqn import ContEq, QuantEq, check_variety_membership
from qaw.errors import ArityBudgetExceeded, ModeMismatch, NotAMember, NotAnEMAlgebra
from qaw.mspace import FinMetric, discrete_space, same_space
from qaw.term import App, EventuallyConstant, Join, Var

HALF = Fraction(1, 2)


def _ops(A):
    return dict(A.ops)


# ---------------------------------------------------------------------------
# laws


@pytest.mark.parametrize("name", sorted(FIXTURES))
@pytest.mark.parametrize("mode", [MET, POS])
def test_fixtures_pass_laws(name, mode):
    assert check_kleisli_laws(builtin(name, 3, mode)).ok


def test_semilattice_laws_by_brute_force():
    # independent reading of the union rule on frozensets
    P = builtin("semilattice", 3)
    for n, m in itertools.product(range(4), repeat=2):
        for k in P.kleisli_maps(n, m):
            for s, image in zip(P.points(n), P.ext(n, m, k)):
                members = set()
                for x in s.split("_"):
                    members |= set(k[int(x[1:])].split("_"))
                assert set(image.split("_")) == members


def test_materialized_tables_agree_with_rule():
    P = builtin("writer", 2)
    Q = materialize(P)
    assert Q.rule is None and check_kleisli_laws(Q).ok
    for n, m in itertools.product(range(3), repeat=2):
        for k in P.kleisli_maps(n, m):
            assert P.ext(n, m, k) == Q.ext(n, m, k)


@pytest.mark.parametrize("name", sorted(FIXTURES))
def test_single_cell_mutation_is_caught(name):
    rng = random.Random(7)
    P = builtin(name, 3)
    for _ in range(5):
        Q, (key, cell, value) = mutate(P, rng)
        report = check_kleisli_laws(Q)
        assert not report.ok
        assert report.failures[0].witness is not None


def test_law_failure_names_the_law():
    lift = builtin("maybe", 1)
    tables = dict(materialize(lift).tables)
    tables[(1, 1, ("x0",))] = ("bot", "bot")
    report = check_kleisli_laws(MonadPresentation(MET, 1, lift.carriers, lift.units, tables=tables))
    laws = {f.law for f in report.failures}
    assert "ext(k) ∘ unit = k" in laws


def test_presentation_shape_is_validated():
    P = builtin("identity", 2)
    with pytest.raises(ValueError):
        MonadPresentation(MET, 3, P.carriers, P.units, rule="identity")
    with pytest.raises(ValueError):
        MonadPresentation(MET, 2, P.carriers, P.units)
    with pytest.raises(ValueError):
        MonadPresentation(POS, 2, P.carriers, P.units, rule="identity")


# ---------------------------------------------------------------------------
# generated equations


def test_identity_equations_have_no_distance_clause():
    V = generate_variety(builtin("identity", 2))
    assert all(isinstance(e, QuantEq) and e.eps == 0 for e in V.eqs)
    A = make_algebra(V.sig, discrete_space(["a", "b"]),
                     {symbol_name(f"x{i}", n): tuple(args[i] for args in itertools.product("ab", repeat=n))
                      for n in range(3) for i in range(n)})
    assert is_member(builtin("identity", 2), A)


def test_semilattice_signature_counts():
    V = generate_variety(builtin("semilattice", 2))
    arities = [n for _, n in V.sig.symbols]
    assert [arities.count(n) for n in range(3)] == [0, 1, 3]
    assert ("x0_x1@2", 2) in V.sig.symbols


def test_semilattice_binary_symbol_is_a_semilattice_in_every_member():
    P = builtin("semilattice", 3)
    for C in small_carriers(MET, 3):
        for A in enumerate_variety_alpha(P, C):
            pts = A.carrier.points
            join = {(a, b): A.apply("x0_x1@2", (a, b)) for a in pts for b in pts}
            for a, b, c in itertools.product(pts, repeat=3):
                assert join[a, a] == a
                assert join[a, b] == join[b, a]
                assert join[join[a, b], c] == join[a, join[b, c]]


def test_writer_clause_one_pairs():
    V = generate_variety(builtin("writer", 2))
    xs = (Var("x0"),)
    assert QuantEq(App("x0@1", xs), App("x0_t@1", xs), 1) in V.eqs
    distances = [e.eps for e in V.eqs if e.eps != 0]
    assert distances and all(d == 1 for d in distances)


def test_poset_two_chain_emits_join_equation():
    V = generate_variety(builtin("maybe", 1, POS))
    xs = (Var("x0"),)
    expected = ContEq(App("x0@1", xs), Join(EventuallyConstant((App("bot@1", xs), App("x0@1", xs)))))
    assert expected in V.eqs
    assert sum(isinstance(e.right, Join) for e in V.eqs) == 1


def test_discrete_poset_presentation_has_no_join_equations():
    V = generate_variety(builtin("semilattice", 2, POS))
    assert not any(isinstance(e.right, Join) for e in V.eqs)


def test_wrong_mode_is_rejected():
    from qaw.bridge import generate_variety_cpo, generate_variety_met
    with pytest.raises(ModeMismatch):
        generate_variety_met(builtin("identity", 1, POS))
    with pytest.raises(ModeMismatch):
        generate_variety_cpo(builtin("identity", 1, MET))


@st.composite
def presentation_algebras(draw, name, mode, arity=2):
    P = builtin(name, arity, mode)
    sig = presentation_signature(P)
    carrier = draw(st.sampled_from(small_carriers(mode, 2)))
    pts = carrier.points
    members = enumerate_variety_alpha(P, carrier)
    if members and draw(st.booleans()):
        A = draw(st.sampled_from(members))
        if draw(st.booleans()):
            return P, A
        name_ = draw(st.sampled_from([s for s, _ in sig.symbols]))
        table = list(A.table[name_])
        i = draw(st.integers(0, len(table) - 1))
        table[i] = draw(st.sampled_from(pts))
        ops = dict(A.ops)
        ops[name_] = tuple(table)
        return P, make_algebra(sig, carrier, ops)
    ops = {s: tuple(draw(st.sampled_from(pts)) for _ in range(len(pts) ** n)) for s, n in sig.symbols}
    return P, make_algebra(sig, carrier, ops)


@pytest.mark.parametrize("name,mode", [("semilattice", MET), ("writer", MET), ("maybe", POS), ("writer", POS)])
@settings(max_examples=25)
@given(data=st.data())
def test_fast_membership_agrees_with_equation_list(name, mode, data):
    P, A = data.draw(presentation_algebras(name, mode))
    V = generate_variety(P)
    generic = check_variety_membership(A, V.eqs, stop_early=True).member
    assert (variety_failure(P, A, check_structure=False) is None) == generic


@pytest.mark.parametrize("name", sorted(FIXTURES))
def test_free_algebras_belong_to_the_variety(name):
    P = builtin(name, 3)
    for n in range(4):
        T = P.carriers[n]
        if not 0 < len(T) <= 3:
            continue
        mu = P.ext(len(T), n, T.points)
        A = translate_alpha(P, T, mu)
        assert is_member(P, A)
        for m in range(4):
            for k in P.kleisli_maps(m, n):
                for s, image in zip(P.points(m), P.ext(m, n, k)):
                    assert A.apply(symbol_name(s, m), k) == image


# ---------------------------------------------------------------------------
# Eilenberg–Moore algebras


def test_identity_em_algebra():
    P = builtin("identity", 2)
    assert check_em_algebra(P, EMAlgebraDesc(2, ("x0", "x1"))) == (True, None)
    A = em_to_variety_algebra(P, EMAlgebraDesc(2, ("x0", "x1")))
    assert A.apply("x1@2", ("x0", "x1")) == "x1"


def test_semilattice_em_algebra_at_arity_four():
    P = builtin("semilattice", 4)
    # x0 ≤ x1: the pair {x0, x1} goes to x1
    ok, _ = check_em_algebra(P, EMAlgebraDesc(2, ("x0", "x1", "x1")))
    assert ok
    A = em_to_variety_algebra(P, EMAlgebraDesc(2, ("x0", "x1", "x1")))
    assert is_member(P, A)
    assert A.apply("x0_x1@2", ("x0", "x1")) == "x1"
    assert A.apply("x0_x1@2", ("x0", "x0")) == "x0"


def test_unit_law_witness():
    P = builtin("semilattice", 3)
    assert check_em_algebra(P, EMAlgebraDesc(2, ("x1", "x1", "x1"))) == (False, ("unit", "x0"))
    with pytest.raises(NotAnEMAlgebra):
        em_to_variety_algebra(P, EMAlgebraDesc(2, ("x1", "x1", "x1")))


def test_em_check_needs_second_level_carrier():
    with pytest.raises(ArityBudgetExceeded):
        check_em_algebra(builtin("semilattice", 2), EMAlgebraDesc(2, ("x0", "x1", "x1")))


def test_semilattice_em_algebras_on_two_points():
    P = builtin("semilattice", 3)
    alphas = sorted(a.alpha for a in enumerate_em_algebras(P, 2))
    assert alphas == [("x0", "x1", "x0"), ("x0", "x1", "x1")]


def test_writer_em_algebras_must_respect_the_flag_distance():
    P = builtin("writer", 4)
    assert [a.alpha for a in enumerate_em_algebras(P, 2)] == [("x0", "x0", "x1", "x1")]


@pytest.mark.parametrize("name,mode,arity", [
    ("identity", MET, 2), ("semilattice", MET, 3), ("semilattice", POS, 3),
    ("maybe", MET, 3), ("maybe", POS, 3), ("writer", MET, 4), ("writer", POS, 4)])
def test_round_trip_on_two_points(name, mode, arity):
    P = builtin(name, arity, mode)
    em = enumerate_em_algebras(P, 2)
    translated = [em_to_variety_algebra(P, a) for a in em]
    assert all(is_member(P, A) for A in translated)
    assert len({tuple(A.ops) for A in translated}) == len(em)
    carrier = discrete_carrier(mode, var_labels(2))
    members = enumerate_variety_alpha(P, carrier)
    assert {tuple(A.ops) for A in members} == {tuple(A.ops) for A in translated}
    for A in members:
        a = EMAlgebraDesc(2, alpha_of_algebra(P, A))
        assert check_em_algebra(P, a)[0]
        assert _ops(em_to_variety_algebra(P, a)) == _ops(A)


@pytest.mark.parametrize("name,mode,arity", [
    ("semilattice", MET, 2), ("semilattice", POS, 2), ("maybe", MET, 2), ("writer", POS, 2)])
def test_two_enumeration_routes_agree(name, mode, arity):
    P = builtin(name, arity, mode)
    V = generate_variety(P)
    for C in small_carriers(mode, 2):
        by_alpha = {tuple(A.ops) for A in enumerate_variety_alpha(P, C)}
        by_tables = {tuple(A.ops) for A in enumerate_variety_tables(P, V, C)}
        assert by_alpha == by_tables


def test_homomorphism_transfer():
    P = builtin("semilattice", 3)
    em = {j: enumerate_em_algebras(P, j) for j in (1, 2)}
    seen = 0
    for i, j in itertools.product((1, 2), repeat=2):
        for a, b in itertools.product(em[i], em[j]):
            A, B = em_to_variety_algebra(P, a), em_to_variety_algebra(P, b)
            for h in itertools.product(var_labels(j), repeat=i):
                Th = P.ext(i, j, tuple(P.units[j][int(x[1:])] for x in h))
                alpha_a = dict(zip(P.points(i), a.alpha))
                alpha_b = dict(zip(P.points(j), b.alpha))
                commutes = all(h[int(alpha_a[s][1:])] == alpha_b[t] for s, t in zip(P.points(i), Th))
                if commutes:
                    seen += 1
                    assert check_homomorphism(Homo(A, B, h))[0]
    assert seen > 0


# ---------------------------------------------------------------------------
# freeness


def test_identity_freeness():
    P = builtin("identity", 2)
    targets = [A for C in small_carriers(MET, 2) for A in enumerate_variety_alpha(P, C)]
    assert check_freeness(P, 2, targets).ok


def test_semilattice_freeness_against_small_targets():
    P = builtin("semilattice", 3)
    targets = [A for C in small_carriers(MET, 3) for A in enumerate_variety_alpha(P, C)]
    report = check_freeness(P, 2, targets, variety=generate_variety(P))
    assert report.ok
    assert report.checked == sum(len(A) ** 2 for A in targets)


def test_unique_extension_by_brute_force():
    # count every map T_2 → A commuting with the binary join, independently
    P = builtin("semilattice", 3)
    for C in small_carriers(MET, 2):
        for A in enumerate_variety_alpha(P, C):
            pts = A.carrier.points
            for f in itertools.product(pts, repeat=2):
                count = 0
                for g in itertools.product(pts, repeat=3):
                    gm = dict(zip(P.points(2), g))
                    if (gm["x0"], gm["x1"]) != f:
                        continue
                    if gm["x0_x1"] != A.apply("x0_x1@2", (gm["x0"], gm["x1"])):
                        continue
                    count += 1
                assert count == 1


def test_non_member_target_is_rejected():
    P = builtin("semilattice", 2)
    C = discrete_space(["x0", "x1"])
    sig = presentation_signature(P)
    ops = {s: tuple("x0" for _ in range(2 ** n)) for s, n in sig.symbols}
    bad = make_algebra(sig, C, ops)
    with pytest.raises(NotAMember) as info:
        check_freeness(P, 2, [bad], variety=generate_variety(P))
    assert info.value.index == 0


# ---------------------------------------------------------------------------
# evaluation on non-discrete spaces


@pytest.mark.parametrize("name", sorted(FIXTURES))
def test_discrete_space_gives_the_carrier(name):
    P = builtin(name, 3)
    for n in range(1, 4):
        M = discrete_space(var_labels(n))
        assert same_space(kan_evaluate(P, M, relabel=False), P.carriers[n])


@given(st.sampled_from([HALF, Fraction(1), Fraction(3, 2), INF]),
       st.sampled_from([HALF, Fraction(1), INF]))
def test_identity_monad_returns_the_space(d01, d12):
    rows = [[0, d01, INF], [d01, 0, d12], [INF, d12, 0]]
    closed = shortest_paths([[raw(x) if x is not INF else None for x in r] for r in rows])
    M = FinMetric(("a", "b", "c"), [[INF if x is None else x for x in r] for r in closed])
    assert same_space(kan_evaluate(builtin("identity", 9), M), M)


def test_writer_on_two_points_at_half():
    P = builtin("writer", 4)
    M = FinMetric.from_pairs(["p", "q"], {("p", "q"): HALF})
    got = kan_evaluate(P, M)
    pts = ("p", "p_t", "q", "q_t")
    seed = {("p", "p_t"): 1, ("q", "q_t"): 1, ("p", "q"): HALF, ("p_t", "q_t"): HALF}
    rows = [[Fraction(0) if a == b else seed.get((a, b), seed.get((b, a))) for b in pts] for a in pts]
    expected = shortest_paths(rows)
    assert got.points == pts
    for i, a in enumerate(pts):
        for j, b in enumerate(pts):
            assert raw(got.d(a, b)) == expected[i][j]
    assert got.d("p", "q_t") == Fraction(3, 2)


def test_kan_needs_arity():
    M = FinMetric.from_pairs(["p", "q"], {("p", "q"): HALF})
    with pytest.raises(ArityBudgetExceeded):
        kan_evaluate(builtin("writer", 3), M)
    with pytest.raises(ModeMismatch):
        kan_evaluate(builtin("writer", 4, POS), M)
