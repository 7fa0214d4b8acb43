"""Finite posets, read simultaneously as ω-cpos and dcpos.

Every ascending chain in a finite poset is eventually constant, so joins of
chains are last elements and continuity of a map is plain monotonicity.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, Mapping, Sequence

from . import bounds
from .errors import AxiomViolation, NotAChain, StructureError
from .mspace import tuple_label


def poset_violations(points: Sequence[str], leq) -> list[AxiomViolation]:
    out: list[AxiomViolation] = []
    n = len(points)
    if len(set(points)) != n:
        out.append(AxiomViolation("unique labels", tuple(points)))
    for i in range(n):
        if not leq[i][i]:
            out.append(AxiomViolation("reflexivity", (points[i],)))
    for i in range(n):
        for j in range(i + 1, n):
            if leq[i][j] and leq[j][i]:
                out.append(AxiomViolation("antisymmetry", (points[i], points[j])))
    for i in range(n):
        for j in range(n):
            if not leq[i][j]:
                continue
            for k in range(n):
                if leq[j][k] and not leq[i][k]:
                    out.append(AxiomViolation("transitivity", (points[i], points[j], points[k])))
    return out


def _normalize(points, leq) -> tuple[tuple[bool, ...], ...]:
    n = len(points)
    if isinstance(leq, Mapping) or isinstance(leq, (set, frozenset)):
        index = {p: i for i, p in enumerate(points)}
        rows = [[i == j for j in range(n)] for i in range(n)]
        pairs = leq.keys() if isinstance(leq, Mapping) else leq
        for x, y in pairs:
            if x not in index or y not in index:
                raise StructureError([AxiomViolation("unknown point", (x, y))])
            rows[index[x]][index[y]] = True
        return tuple(tuple(r) for r in rows)
    rows = tuple(tuple(bool(v) for v in row) for row in leq)
    if len(rows) != n or any(len(r) != n for r in rows):
        raise StructureError([AxiomViolation("relation not total", (n,))])
    return rows


@dataclass(frozen=True)
class FinPoset:
    points: tuple[str, ...]
    leq_table: tuple[tuple[bool, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))
        object.__setattr__(self, "leq_table", _normalize(self.points, self.leq_table))
        violations = poset_violations(self.points, self.leq_table)
        if violations:
            raise StructureError(violations)

    @classmethod
    def _trusted(cls, points, rows) -> "FinPoset":
        obj = object.__new__(cls)
        object.__setattr__(obj, "points", tuple(points))
        object.__setattr__(obj, "leq_table", tuple(tuple(r) for r in rows))
        return obj

    @classmethod
    def from_pairs(cls, points: Iterable[str], pairs: Iterable[tuple[str, str]], close: bool = False) -> "FinPoset":
        """Order generated by ``pairs`` (reflexivity added; transitivity only if ``close``)."""
        points = tuple(points)
        rows = [list(r) for r in _normalize(points, set(pairs))]
        if close:
            rows = transitive_closure(rows)
        return cls(points, rows)

    @cached_property
    def index(self) -> dict[str, int]:
        return {p: i for i, p in enumerate(self.points)}

    def leq(self, x: str, y: str) -> bool:
        return self.leq_table[self.index[x]][self.index[y]]

    def __len__(self) -> int:
        return len(self.points)

    def __contains__(self, x) -> bool:
        return x in self.index

    def strict_pairs(self) -> list[tuple[str, str]]:
        n = len(self.points)
        return [(self.points[i], self.points[j]) for i in range(n) for j in range(n)
                if i != j and self.leq_table[i][j]]

    def restrict(self, subset: Iterable[str]) -> "FinPoset":
        keep_set = set(subset)
        keep = [p for p in self.points if p in keep_set]
        idx = [self.index[p] for p in keep]
        return FinPoset._trusted(keep, [[self.leq_table[i][j] for j in idx] for i in idx])

    @cached_property
    def longest_chain(self) -> int:
        """Number of elements in a longest strictly ascending chain."""
        n = len(self.points)
        memo: dict[int, int] = {}

        def height(i: int) -> int:
            if i not in memo:
                memo[i] = 1 + max((height(j) for j in range(n) if j != i and self.leq_table[i][j]), default=0)
            return memo[i]

        return max((height(i) for i in range(n)), default=0)


def transitive_closure(rows: list[list[bool]]) -> list[list[bool]]:
    n = len(rows)
    rows = [list(r) for r in rows]
    for k in range(n):
        for i in range(n):
            if rows[i][k]:
                rk = rows[k]
                ri = rows[i]
                for j in range(n):
                    if rk[j]:
                        ri[j] = True
    return rows


def validate_poset(points: Sequence[str], leq) -> FinPoset:
    return FinPoset(tuple(points), leq)


def discrete_poset(labels: Iterable[str]) -> FinPoset:
    pts = tuple(labels)
    return FinPoset._trusted(pts, [[i == j for j in range(len(pts))] for i in range(len(pts))])


def chain(labels: Sequence[str]) -> FinPoset:
    n = len(labels)
    return FinPoset._trusted(labels, [[i <= j for j in range(n)] for i in range(n)])


@dataclass(frozen=True)
class MonotoneMap:
    domain: FinPoset
    codomain: FinPoset
    table: tuple[str, ...]

    def __post_init__(self):
        table = self.table
        if isinstance(table, Mapping):
            table = tuple(table[p] for p in self.domain.points)
        table = tuple(table)
        if len(table) != len(self.domain):
            raise ValueError("map table length differs from domain size")
        bad = [y for y in table if y not in self.codomain]
        if bad:
            raise ValueError(f"map values {bad} are not codomain points")
        object.__setattr__(self, "table", table)

    def __call__(self, x: str) -> str:
        return self.table[self.domain.index[x]]

    def as_dict(self) -> dict[str, str]:
        return dict(zip(self.domain.points, self.table))

    def then(self, other: "MonotoneMap") -> "MonotoneMap":
        return MonotoneMap(self.domain, other.codomain, tuple(other(y) for y in self.table))


def identity_monotone(P: FinPoset) -> MonotoneMap:
    return MonotoneMap(P, P, P.points)


def check_monotone(f: MonotoneMap) -> tuple[bool, tuple[str, str] | None]:
    P, Q = f.domain, f.codomain
    img = [Q.index[y] for y in f.table]
    for i in range(len(P)):
        for j in range(len(P)):
            if P.leq_table[i][j] and not Q.leq_table[img[i]][img[j]]:
                return False, (P.points[i], P.points[j])
    return True, None


def join_of_chain(P: FinPoset, seq: Sequence[str]) -> str:
    """Least upper bound of an eventually-constant ascending sequence."""
    if not seq:
        raise ValueError("empty sequence has no chain join here")
    for k in range(len(seq) - 1):
        if not P.leq(seq[k], seq[k + 1]):
            raise NotAChain(k)
    return seq[-1]


def poset_product(factors: Sequence[FinPoset]) -> tuple[FinPoset, list[MonotoneMap]]:
    """Componentwise order on the cartesian product, plus projections."""
    factors = list(factors)
    combos = list(itertools.product(*[range(len(F)) for F in factors]))
    labels = [tuple_label([F.points[c] for F, c in zip(factors, combo)]) for combo in combos]
    rows = [[all(F.leq_table[i][j] for F, i, j in zip(factors, a, b)) for b in combos] for a in combos]
    space = FinPoset._trusted(labels, rows)
    projections = [MonotoneMap(space, F, tuple(F.points[combo[k]] for combo in combos))
                   for k, F in enumerate(factors)]
    return space, projections


def monotone_maps(P: FinPoset, Q: FinPoset, limit: int | None = bounds.MAPS) -> list[tuple[str, ...]]:
    bounds.check(len(Q) ** len(P), limit, "map enumeration")
    n = len(P)
    out: list[tuple[str, ...]] = []
    chosen: list[int] = []

    def extend(i: int):
        if i == n:
            out.append(tuple(Q.points[c] for c in chosen))
            return
        for c in range(len(Q)):
            ok = True
            for k in range(i):
                if P.leq_table[k][i] and not Q.leq_table[chosen[k]][c]:
                    ok = False
                    break
                if P.leq_table[i][k] and not Q.leq_table[c][chosen[k]]:
                    ok = False
                    break
            if ok:
                chosen.append(c)
                extend(i + 1)
                chosen.pop()

    extend(0)
    return out


def same_poset(P: FinPoset, Q: FinPoset) -> bool:
    if set(P.points) != set(Q.points) or len(P) != len(Q):
        return False
    return all(P.leq(x, y) == Q.leq(x, y) for x in P.points for y in P.points)


def find_order_iso(P: FinPoset, Q: FinPoset, bound: int = bounds.ISO_SEARCH_BOUND) -> dict[str, str] | None:
    """An order isomorphism, trying the label identity first."""
    if len(P) != len(Q):
        return None
    if same_poset(P, Q):
        return {p: p for p in P.points}
    bounds.check(len(P), bound, "isomorphism search")
    n = len(P)

    def degree(R: FinPoset, i: int):
        return (sum(R.leq_table[i]), sum(R.leq_table[j][i] for j in range(len(R))))

    dp = [degree(P, i) for i in range(n)]
    dq = [degree(Q, i) for i in range(n)]
    assignment: list[int] = []
    used = [False] * n

    def extend(i: int) -> bool:
        if i == n:
            return True
        for c in range(n):
            if used[c] or dp[i] != dq[c]:
                continue
            if all(P.leq_table[k][i] == Q.leq_table[assignment[k]][c]
                   and P.leq_table[i][k] == Q.leq_table[c][assignment[k]] for k in range(i)):
                used[c] = True
                assignment.append(c)
                if extend(i + 1):
                    return True
                assignment.pop()
                used[c] = False
        return False

    if extend(0):
        return {P.points[i]: Q.points[c] for i, c in enumerate(assignment)}
    return None


def is_order_iso(P: FinPoset, Q: FinPoset, mapping: Mapping[str, str]) -> bool:
    if len(P) != len(Q) or len(set(mapping.values())) != len(Q):
        return False
    return all(P.leq(x, y) == Q.leq(mapping[x], mapping[y]) for x in P.points for y in P.points)


@lru_cache(maxsize=None)
def posets_up_to_iso(n: int) -> tuple[FinPoset, ...]:
    """One representative per isomorphism class of posets on ``n`` points (n ≤ 4)."""
    bounds.check(n, 4, "poset enumeration size")
    labels = tuple(str(i) for i in range(n))
    off = [(i, j) for i in range(n) for j in range(n) if i != j]
    perms = list(itertools.permutations(range(n)))
    seen: set = set()
    reps = []
    for bits in range(1 << len(off)):
        rows = [[i == j for j in range(n)] for i in range(n)]
        for b, (i, j) in enumerate(off):
            if bits >> b & 1:
                rows[i][j] = True
        if poset_violations(labels, rows):
            continue
        key = min(tuple(rows[p[i]][p[j]] for i in range(n) for j in range(n)) for p in perms)
        if key in seen:
            continue
        seen.add(key)
        reps.append(FinPoset._trusted(labels, rows))
    return tuple(reps)
