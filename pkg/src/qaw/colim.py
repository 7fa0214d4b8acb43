"""Weighted colimits at finite scale.

Covers colimits of precongruences (and of arbitrary constraint sets over a
finite base) in Met, coinserters in Pos, ω-chain colimits in both settings,
and the product-commutation checks built from them.

A finite directed poset has a top element, so a colimit over it is just the
object at the top; only ω-chains with a described tail are modelled here.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence, Union

from .dist import INF, ZERO, Dist, as_dist
from .errors import InvalidTail, NonStabilizingChain, NotReflexive, StructureError
from .mspace import (
    FinMetric,
    MetricMap,
    check_nonexpanding,
    discrete_space,
    identity_map,
    sup_product,
    tuple_label,
)
from .poset import (
    FinPoset,
    MonotoneMap,
    chain as chain_poset,
    check_monotone,
    find_order_iso,
    identity_monotone,
    monotone_maps,
    poset_product,
    posets_up_to_iso,
    transitive_closure,
)


def class_label(members: Sequence[str]) -> str:
    """Label of a quotient class: the point itself when the class is a singleton."""
    if len(members) == 1:
        return members[0]
    return "{" + "=".join(members) + "}"


# ---------------------------------------------------------------------------
# Met: constraint sets, precongruences, and their colimits


@dataclass(frozen=True)
class ConstraintSet:
    """A base space together with triples ``(x, y, ε)`` demanding ``d(x, y) ≤ ε``."""

    base: FinMetric
    constraints: tuple[tuple[str, str, Fraction], ...] = ()

    def __post_init__(self):
        cleaned = []
        for x, y, eps in self.constraints:
            eps = as_dist(eps)
            if x not in self.base or y not in self.base:
                raise ValueError(f"constraint ({x}, {y}) mentions a point outside the base")
            if eps is INF or eps <= 0:
                raise ValueError(f"constraint bound must be a positive rational, got {eps}")
            cleaned.append((x, y, eps))
        object.__setattr__(self, "constraints", tuple(cleaned))


def precongruence(M: FinMetric) -> ConstraintSet:
    """The precongruence of ``M``: its underlying discrete set plus one
    constraint per pair at finite positive distance (larger bounds are implied)."""
    return ConstraintSet(discrete_space(M.points), tuple(M.finite_pairs()))


def shortest_path_closure(rows: list[list[Dist]]) -> list[list[Dist]]:
    """Floyd–Warshall over exact extended distances."""
    n = len(rows)
    rows = [list(r) for r in rows]
    for k in range(n):
        rk = rows[k]
        for i in range(n):
            dik = rows[i][k]
            if dik is INF:
                continue
            ri = rows[i]
            for j in range(n):
                dkj = rk[j]
                if dkj is INF:
                    continue
                via = dik + dkj
                if via < ri[j]:
                    ri[j] = via
    return rows


def zero_quotient(points: Sequence[str], rows) -> tuple[FinMetric, dict[str, str]]:
    """Identify points at distance zero in a pseudometric table.

    Returns the metric quotient and the projection as a label dictionary.
    """
    n = len(points)
    cls = [-1] * n
    classes: list[list[int]] = []
    for i in range(n):
        if cls[i] >= 0:
            continue
        members = [j for j in range(n) if rows[i][j] == ZERO]
        for j in members:
            cls[j] = len(classes)
        classes.append(members)
    labels = [class_label([points[j] for j in members]) for members in classes]
    reps = [members[0] for members in classes]
    quotient_rows = [[rows[a][b] for b in reps] for a in reps]
    violations = _pseudometric_problems(points, rows)
    if violations:
        raise StructureError(violations)
    space = FinMetric._trusted(labels, quotient_rows)
    return space, {points[i]: labels[cls[i]] for i in range(n)}


def _pseudometric_problems(points, rows):
    from .errors import AxiomViolation

    n = len(points)
    out = []
    for i in range(n):
        if rows[i][i] != ZERO:
            out.append(AxiomViolation("zero diagonal", (points[i],)))
        for j in range(n):
            if rows[i][j] != rows[j][i]:
                out.append(AxiomViolation("symmetry", (points[i], points[j])))
            if rows[i][j] is INF:
                continue
            for k in range(n):
                if rows[i][k] > rows[i][j] + rows[j][k]:
                    out.append(AxiomViolation("triangle", (points[i], points[j], points[k])))
    return out


def basic_weight_colimit(c: ConstraintSet) -> tuple[FinMetric, MetricMap]:
    """Universal metric quotient of ``c.base`` forcing every constraint.

    Lower each constrained distance to its bound, close under the triangle
    inequality, then merge points at distance zero.
    """
    base = c.base
    rows = [list(r) for r in base.dist]
    for x, y, eps in c.constraints:
        i, j = base.index[x], base.index[y]
        if eps < rows[i][j]:
            rows[i][j] = rows[j][i] = eps
    rows = shortest_path_closure(rows)
    space, proj = zero_quotient(base.points, rows)
    return space, MetricMap(base, space, proj)


def respects_constraints(c: ConstraintSet, g: MetricMap) -> bool:
    """Whether a map out of the base is nonexpanding and meets every bound."""
    if not check_nonexpanding(g)[0]:
        return False
    Z = g.codomain
    return all(Z.d(g(x), g(y)) <= eps for x, y, eps in c.constraints)


# ---------------------------------------------------------------------------
# ω-chains


@dataclass(frozen=True)
class Stable:
    """All data past the last explicit stage repeats it with identity links."""


@dataclass(frozen=True)
class DeclaredLimits:
    """For each pair of last-stage points, the infimum of its later distances."""

    table: tuple[tuple[Dist, ...], ...]


Tail = Union[Stable, DeclaredLimits]


@dataclass(frozen=True)
class OmegaChainMet:
    stages: tuple[FinMetric, ...]
    links: tuple[MetricMap, ...]
    tail: Tail = field(default_factory=Stable)

    def __post_init__(self):
        object.__setattr__(self, "stages", tuple(self.stages))
        object.__setattr__(self, "links", tuple(self.links))
        if not self.stages:
            raise ValueError("a chain needs at least one stage")
        if len(self.links) != len(self.stages) - 1:
            raise ValueError("need exactly one link between consecutive stages")
        for i, f in enumerate(self.links):
            if f.domain != self.stages[i] or f.codomain != self.stages[i + 1]:
                raise ValueError(f"link {i} does not connect stages {i} and {i + 1}")
            ok, witness = check_nonexpanding(f)
            if not ok:
                raise ValueError(f"link {i} expands the pair {witness}")
        if isinstance(self.tail, DeclaredLimits):
            last = self.stages[-1]
            table = self.tail.table
            if isinstance(table, Mapping):
                rows = [[ZERO if i == j else INF for j in range(len(last))] for i in range(len(last))]
                for (x, y), v in table.items():
                    i, j = last.index[x], last.index[y]
                    rows[i][j] = rows[j][i] = as_dist(v)
                table = rows
            table = tuple(tuple(as_dist(v) for v in r) for r in table)
            object.__setattr__(self, "tail", DeclaredLimits(table))
            self._check_limits()

    def _check_limits(self):
        last = self.stages[-1]
        n = len(last)
        table = self.tail.table
        if len(table) != n or any(len(r) != n for r in table):
            raise InvalidTail("declared limits must cover every pair of last-stage points")
        problems = _pseudometric_problems(last.points, table)
        if problems:
            raise InvalidTail(f"declared limits are not a pseudometric: {problems[0]}")
        # each limit must sit below every finite-stage distance of its orbit
        for i, stage in enumerate(self.stages):
            to_last = self.to_last(i)
            for a in range(len(stage)):
                for b in range(len(stage)):
                    la = last.index[to_last[a]]
                    lb = last.index[to_last[b]]
                    if table[la][lb] > stage.dist[a][b]:
                        raise InvalidTail(
                            f"limit for ({to_last[a]}, {to_last[b]}) exceeds the stage-{i} distance")

    def to_last(self, i: int) -> tuple[str, ...]:
        """Images of stage-``i`` points in the last explicit stage."""
        img = list(self.stages[i].points)
        for f in self.links[i:]:
            img = [f(y) for y in img]
        return tuple(img)

    def tail_table(self) -> tuple[tuple[Dist, ...], ...]:
        if isinstance(self.tail, DeclaredLimits):
            return self.tail.table
        return self.stages[-1].dist


@dataclass(frozen=True)
class OmegaChainPos:
    stages: tuple[FinPoset, ...]
    links: tuple[MonotoneMap, ...]
    tail: Stable = field(default_factory=Stable)

    def __post_init__(self):
        object.__setattr__(self, "stages", tuple(self.stages))
        object.__setattr__(self, "links", tuple(self.links))
        if not self.stages:
            raise ValueError("a chain needs at least one stage")
        if not isinstance(self.tail, Stable):
            raise NonStabilizingChain("poset chains must stabilize; only the stable tail is supported")
        if len(self.links) != len(self.stages) - 1:
            raise ValueError("need exactly one link between consecutive stages")
        for i, f in enumerate(self.links):
            if f.domain != self.stages[i] or f.codomain != self.stages[i + 1]:
                raise ValueError(f"link {i} does not connect stages {i} and {i + 1}")
            ok, witness = check_monotone(f)
            if not ok:
                raise ValueError(f"link {i} is not monotone at {witness}")

    def to_last(self, i: int) -> tuple[str, ...]:
        img = list(self.stages[i].points)
        for f in self.links[i:]:
            img = [f(y) for y in img]
        return tuple(img)


def constant_chain_met(M: FinMetric, length: int = 1) -> OmegaChainMet:
    return OmegaChainMet((M,) * length, (identity_map(M),) * (length - 1), Stable())


def constant_chain_pos(P: FinPoset, length: int = 1) -> OmegaChainPos:
    return OmegaChainPos((P,) * length, (identity_monotone(P),) * (length - 1), Stable())


def collapsing_chain(k: int = 4) -> OmegaChainMet:
    """Two points at distance ``2^-n`` in stage ``n``, identity links; the
    distances shrink to zero so the colimit is a single point."""
    stages = tuple(FinMetric.from_pairs(("0", "1"), {("0", "1"): Fraction(1, 2 ** n)}) for n in range(k))
    links = tuple(MetricMap(stages[n], stages[n + 1], ("0", "1")) for n in range(k - 1))
    return OmegaChainMet(stages, links, DeclaredLimits(((ZERO, ZERO), (ZERO, ZERO))))


def ordinal_family(k: int, stabilize: bool = True) -> OmegaChainPos:
    """Finite ordinals ``A_1 ↪ … ↪ A_k``; with ``stabilize`` the last repeats forever.

    Without stabilization the family keeps growing: its colimit in CPO is the
    natural numbers with a top added, which is not finite.
    """
    if not stabilize:
        raise NonStabilizingChain(
            "the growing ordinal family A_0 ↪ A_1 ↪ … has colimit ℕ^⊤ "
            "(naturals with a top element), which is not a finite poset")
    stages = tuple(chain_poset([str(i) for i in range(n)]) for n in range(1, k + 1))
    links = tuple(MonotoneMap(stages[n], stages[n + 1], stages[n].points) for n in range(k - 1))
    return OmegaChainPos(stages, links, Stable())


def omega_colimit_met(ch: OmegaChainMet) -> tuple[FinMetric, list[MetricMap]]:
    last = ch.stages[-1]
    space, proj = zero_quotient(last.points, ch.tail_table())
    cocone = [MetricMap(stage, space, tuple(proj[y] for y in ch.to_last(i)))
              for i, stage in enumerate(ch.stages)]
    return space, cocone


def omega_colimit_pos(ch: OmegaChainPos) -> tuple[FinPoset, list[MonotoneMap]]:
    last = ch.stages[-1]
    cocone = [MonotoneMap(stage, last, ch.to_last(i)) for i, stage in enumerate(ch.stages)]
    return last, cocone


def check_met_colimit_characterization(ch: OmegaChainMet, C: FinMetric, cocone: Sequence[MetricMap]) -> tuple[bool, str]:
    """Clause (a): the cocone images cover ``C``; clause (b): the distance of
    two images is the infimum of their distances at all later stages."""
    covered = set()
    for c in cocone:
        covered.update(c.table)
    if covered != set(C.points):
        return False, f"points {sorted(set(C.points) - covered)} are not in any image"
    k = len(ch.stages)
    tail = ch.tail_table()
    last = ch.stages[-1]
    for i, stage in enumerate(ch.stages):
        for y in stage.points:
            for y2 in stage.points:
                inf_d: Dist = INF
                img, img2 = y, y2
                for j in range(i, k):
                    inf_d = min(inf_d, ch.stages[j].d(img, img2))
                    if j < k - 1:
                        img, img2 = ch.links[j](img), ch.links[j](img2)
                inf_d = min(inf_d, tail[last.index[img]][last.index[img2]])
                if C.d(cocone[i](y), cocone[i](y2)) != inf_d:
                    return False, f"stage {i} pair ({y}, {y2}): colimit distance differs from {inf_d}"
    return True, "ok"


def _pad(ch, length: int):
    extra = length - len(ch.stages)
    if extra <= 0:
        return ch
    last = ch.stages[-1]
    if isinstance(ch, OmegaChainMet):
        return OmegaChainMet(ch.stages + (last,) * extra, ch.links + (identity_map(last),) * extra, ch.tail)
    return OmegaChainPos(ch.stages + (last,) * extra, ch.links + (identity_monotone(last),) * extra, ch.tail)


def product_chain_met(chA: OmegaChainMet, chB: OmegaChainMet) -> OmegaChainMet:
    """Stagewise sup-product of two chains.

    The shorter chain is padded by repeating its last stage with identity
    links.  A declared tail stays attached to the repeated stage, which keeps
    the colimit; the product tail is the entrywise max, since the infimum of
    a max of two descending sequences is the max of their infima.
    """
    length = max(len(chA.stages), len(chB.stages))
    A, B = _pad(chA, length), _pad(chB, length)
    stages, projections = [], []
    for SA, SB in zip(A.stages, B.stages):
        P, proj = sup_product([SA, SB])
        stages.append(P)
        projections.append(proj)
    links = []
    for i in range(length - 1):
        fa, fb = A.links[i], B.links[i]
        pa, pb = projections[i]
        links.append(MetricMap(stages[i], stages[i + 1],
                               tuple(tuple_label([fa(pa(p)), fb(pb(p))]) for p in stages[i].points)))
    if isinstance(A.tail, Stable) and isinstance(B.tail, Stable):
        return OmegaChainMet(tuple(stages), tuple(links), Stable())
    ta, tb = A.tail_table(), B.tail_table()
    lastA, lastB = A.stages[-1], B.stages[-1]
    pa, pb = projections[-1]
    top = stages[-1]
    rows = [[max(ta[lastA.index[pa(p)]][lastA.index[pa(q)]], tb[lastB.index[pb(p)]][lastB.index[pb(q)]])
             for q in top.points] for p in top.points]
    return OmegaChainMet(tuple(stages), tuple(links), DeclaredLimits(tuple(tuple(r) for r in rows)))


def product_chain_pos(chA: OmegaChainPos, chB: OmegaChainPos) -> OmegaChainPos:
    length = max(len(chA.stages), len(chB.stages))
    A, B = _pad(chA, length), _pad(chB, length)
    stages, projections = [], []
    for SA, SB in zip(A.stages, B.stages):
        P, proj = poset_product([SA, SB])
        stages.append(P)
        projections.append(proj)
    links = []
    for i in range(length - 1):
        fa, fb = A.links[i], B.links[i]
        pa, pb = projections[i]
        links.append(MonotoneMap(stages[i], stages[i + 1],
                                 tuple(tuple_label([fa(pa(p)), fb(pb(p))]) for p in stages[i].points)))
    return OmegaChainPos(tuple(stages), tuple(links), Stable())


def _cocone_at(cocone, i):
    return cocone[min(i, len(cocone) - 1)]


def check_product_commutation(chA, chB, mode: str = "met") -> tuple[bool, dict]:
    """Compare the colimit of the stagewise product with the product of colimits.

    The comparison map sends the class of a top-stage pair ``(a, b)`` to
    ``(c_A(a), c_B(b))``; the check passes when that map is well defined,
    bijective and an isometry (Met) or order isomorphism (Pos).
    """
    if mode == "met":
        CA, coA = omega_colimit_met(chA)
        CB, coB = omega_colimit_met(chB)
        prod_chain = product_chain_met(chA, chB)
        CP, coP = omega_colimit_met(prod_chain)
        target, _ = sup_product([CA, CB])
    elif mode == "pos":
        CA, coA = omega_colimit_pos(chA)
        CB, coB = omega_colimit_pos(chB)
        prod_chain = product_chain_pos(chA, chB)
        CP, coP = omega_colimit_pos(prod_chain)
        target, _ = poset_product([CA, CB])
    else:
        raise ValueError(f"unknown mode {mode!r}")
    top = len(prod_chain.stages) - 1
    stage = prod_chain.stages[top]
    cA, cB = _cocone_at(coA, top), _cocone_at(coB, top)
    pA_labels, pB_labels = _components(stage, chA, chB, top)
    phi: dict[str, str] = {}
    for p, a, b in zip(stage.points, pA_labels, pB_labels):
        q = coP[top](p)
        value = tuple_label([cA(a), cB(b)])
        if phi.setdefault(q, value) != value:
            return False, _report(False, "comparison map is not well defined", CP, target)
    ok = _is_iso(CP, target, phi, mode)
    return ok, _report(ok, "canonical comparison map is an isomorphism" if ok else
                       "canonical comparison map is not an isomorphism", CP, target)


def _components(stage, chA, chB, top):
    # the product chain's stage ``top`` is a product of the components' stage ``top``
    SA = chA.stages[min(top, len(chA.stages) - 1)]
    SB = chB.stages[min(top, len(chB.stages) - 1)]
    pa, pb = [], []
    for a in SA.points:
        for b in SB.points:
            pa.append(a)
            pb.append(b)
    if len(pa) != len(stage.points):
        raise AssertionError("product stage does not match its components")
    return pa, pb


def _is_iso(X, Y, phi, mode) -> bool:
    if set(phi) != set(X.points) or len(set(phi.values())) != len(Y.points) or set(phi.values()) != set(Y.points):
        return False
    if mode == "met":
        return all(X.d(p, q) == Y.d(phi[p], phi[q]) for p in X.points for q in X.points)
    return all(X.leq(p, q) == Y.leq(phi[p], phi[q]) for p in X.points for q in X.points)


def _report(ok, message, left, right) -> dict:
    return {"holds": ok, "message": message,
            "colimit_of_product": list(left.points), "product_of_colimits": list(right.points)}


# ---------------------------------------------------------------------------
# Pos: coinserters


@dataclass(frozen=True)
class ParallelPair:
    A: FinPoset
    B: FinPoset
    f0: MonotoneMap
    f1: MonotoneMap

    def __post_init__(self):
        for name, f in (("f0", self.f0), ("f1", self.f1)):
            if f.domain != self.A or f.codomain != self.B:
                raise ValueError(f"{name} must map A to B")
            ok, witness = check_monotone(f)
            if not ok:
                raise ValueError(f"{name} is not monotone at {witness}")


def pair_from_tables(A: FinPoset, B: FinPoset, f0, f1) -> ParallelPair:
    return ParallelPair(A, B, MonotoneMap(A, B, f0), MonotoneMap(A, B, f1))


def coinserter(p: ParallelPair) -> tuple[FinPoset, MonotoneMap]:
    """Least preorder on ``B`` containing its order and every ``f0(a) ≤ f1(a)``,
    quotiented by its symmetric part."""
    B = p.B
    rows = [list(r) for r in B.leq_table]
    for a in p.A.points:
        rows[B.index[p.f0(a)]][B.index[p.f1(a)]] = True
    rows = transitive_closure(rows)
    n = len(B)
    cls = [-1] * n
    classes: list[list[int]] = []
    for i in range(n):
        if cls[i] >= 0:
            continue
        members = [j for j in range(n) if rows[i][j] and rows[j][i]]
        for j in members:
            cls[j] = len(classes)
        classes.append(members)
    labels = [class_label([B.points[j] for j in m]) for m in classes]
    reps = [m[0] for m in classes]
    Q = FinPoset._trusted(labels, [[rows[a][b] for b in reps] for a in reps])
    return Q, MonotoneMap(B, Q, tuple(labels[cls[i]] for i in range(n)))


def order_pair_projections(C: FinPoset) -> ParallelPair:
    """The projections ``C^(2) → |C|`` from the set of comparable pairs to the
    discrete underlying set; their coinserter recovers ``C``."""
    from .poset import discrete_poset

    pairs = [(x, y) for x in C.points for y in C.points if C.leq(x, y)]
    A = discrete_poset([tuple_label(pr) for pr in pairs])
    B = discrete_poset(C.points)
    return ParallelPair(A, B, MonotoneMap(A, B, tuple(x for x, _ in pairs)),
                        MonotoneMap(A, B, tuple(y for _, y in pairs)))


def is_reflexive(p: ParallelPair) -> tuple[bool, MonotoneMap | None]:
    """Search for a monotone joint splitting ``d`` with ``f0∘d = f1∘d = id``."""
    A, B = p.A, p.B
    options = [[a for a in A.points if p.f0(a) == b and p.f1(a) == b] for b in B.points]
    if any(not opts for opts in options):
        return False, None
    n = len(B)
    chosen: list[str] = []

    def extend(i: int) -> bool:
        if i == n:
            return True
        for a in options[i]:
            if all((not B.leq_table[k][i] or A.leq(chosen[k], a)) and
                   (not B.leq_table[i][k] or A.leq(a, chosen[k])) for k in range(i)):
                chosen.append(a)
                if extend(i + 1):
                    return True
                chosen.pop()
        return False

    if extend(0):
        return True, MonotoneMap(B, A, tuple(chosen))
    return False, None


def product_pair(pA: ParallelPair, pB: ParallelPair) -> ParallelPair:
    A, _ = poset_product([pA.A, pB.A])
    B, _ = poset_product([pA.B, pB.B])
    combos = [(x, y) for x in pA.A.points for y in pB.A.points]
    f0 = tuple(tuple_label([pA.f0(x), pB.f0(y)]) for x, y in combos)
    f1 = tuple(tuple_label([pA.f1(x), pB.f1(y)]) for x, y in combos)
    return ParallelPair(A, B, MonotoneMap(A, B, f0), MonotoneMap(A, B, f1))


def check_coinserter_products(pA: ParallelPair, pB: ParallelPair) -> tuple[bool, dict]:
    """Coinserter of the componentwise product pair versus the product of coinserters."""
    for which, p in (("A", pA), ("B", pB)):
        if not is_reflexive(p)[0]:
            raise NotReflexive(which)
    CA, cA = coinserter(pA)
    CB, cB = coinserter(pB)
    pair = product_pair(pA, pB)
    CP, cP = coinserter(pair)
    target, _ = poset_product([CA, CB])
    phi: dict[str, str] = {}
    for x in pA.B.points:
        for y in pB.B.points:
            q = cP(tuple_label([x, y]))
            value = tuple_label([cA(x), cB(y)])
            if phi.setdefault(q, value) != value:
                return False, _report(False, "comparison map is not well defined", CP, target)
    ok = _is_iso(CP, target, phi, "pos")
    return ok, _report(ok, "canonical comparison map is an isomorphism" if ok else
                       "canonical comparison map is not an isomorphism", CP, target)


def check_coinserter_universal(p: ParallelPair, candidate: tuple[FinPoset, MonotoneMap],
                               max_target: int = 4) -> tuple[bool, str]:
    """Exhaustively test both universal clauses against every poset with at
    most ``max_target`` points (one per isomorphism class suffices)."""
    C, c = candidate
    if c.domain != p.B or c.codomain != C:
        raise ValueError("candidate map must go from B to the candidate poset")
    B = p.B
    for a in p.A.points:
        if not C.leq(c(p.f0(a)), c(p.f1(a))):
            return False, f"candidate fails c∘f0 ⊑ c∘f1 at {a}"
    c_idx = [C.index[c(b)] for b in B.points]
    f0_idx = [B.index[p.f0(a)] for a in p.A.points]
    f1_idx = [B.index[p.f1(a)] for a in p.A.points]
    for size in range(max_target + 1):
        for D in posets_up_to_iso(size):
            Dix = D.index
            from_C = [tuple(Dix[v] for v in u) for u in monotone_maps(C, D)]
            composites: dict[tuple, int] = {}
            for u in from_C:
                key = tuple(u[i] for i in c_idx)
                composites[key] = composites.get(key, 0) + 1
            for cp in monotone_maps(B, D):
                cp = tuple(Dix[v] for v in cp)
                if all(D.leq_table[cp[i]][cp[j]] for i, j in zip(f0_idx, f1_idx)):
                    count = composites.get(cp, 0)
                    if count != 1:
                        return False, (f"clause (a): map {cp} into a {size}-point poset has "
                                       f"{count} factorizations")
            for u in from_C:
                uc = [u[i] for i in c_idx]
                for v in from_C:
                    if all(D.leq_table[x][y] for x, y in zip(uc, (v[i] for i in c_idx))):
                        if not all(D.leq_table[x][y] for x, y in zip(u, v)):
                            return False, f"clause (b): u∘c ⊑ v∘c but not u ⊑ v into a {size}-point poset"
    reference, _ = coinserter(p)
    if find_order_iso(C, reference) is None:
        return False, "candidate is not isomorphic to the computed coinserter"
    return True, "ok"
