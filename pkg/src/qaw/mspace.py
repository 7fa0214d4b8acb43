"""Finite extended metric spaces and nonexpanding maps.

Points are opaque string labels. Product constructions label their points
``"(a,b)"``; the projections returned alongside carry the component structure,
so nothing downstream needs to parse labels.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from . import bounds
from .dist import INF, ZERO, Dist, as_dist
from .errors import AxiomViolation, StructureError


def tuple_label(parts: Sequence[str]) -> str:
    return "(" + ",".join(parts) + ")"


def metric_violations(points: Sequence[str], rows) -> list[AxiomViolation]:
    """Every failed axiom instance of a candidate distance table."""
    out: list[AxiomViolation] = []
    n = len(points)
    if len(set(points)) != n:
        seen = set()
        for p in points:
            if p in seen:
                out.append(AxiomViolation("unique labels", (p,)))
            seen.add(p)
    for i in range(n):
        if rows[i][i] != ZERO:
            out.append(AxiomViolation("zero diagonal", (points[i],)))
    for i in range(n):
        for j in range(i + 1, n):
            if rows[i][j] != rows[j][i]:
                out.append(AxiomViolation("symmetry", (points[i], points[j])))
            if rows[i][j] == ZERO:
                out.append(AxiomViolation("separation", (points[i], points[j])))
    for i in range(n):
        ri = rows[i]
        for j in range(n):
            dij = ri[j]
            if dij is INF:
                continue
            rj = rows[j]
            for k in range(n):
                if ri[k] > dij + rj[k]:
                    out.append(AxiomViolation("triangle", (points[i], points[j], points[k])))
    return out


def _normalize_table(points: Sequence[str], table) -> tuple[tuple[Dist, ...], ...]:
    n = len(points)
    if isinstance(table, Mapping):
        index = {p: i for i, p in enumerate(points)}
        rows = [[INF] * n for _ in range(n)]
        for i in range(n):
            rows[i][i] = ZERO
        for (x, y), value in table.items():
            if x not in index or y not in index:
                raise StructureError([AxiomViolation("unknown point", (x, y))])
            d = as_dist(value)
            rows[index[x]][index[y]] = d
            rows[index[y]][index[x]] = d
        return tuple(tuple(r) for r in rows)
    rows = [tuple(as_dist(v) for v in row) for row in table]
    if len(rows) != n or any(len(r) != n for r in rows):
        raise StructureError([AxiomViolation("table not total", (n,))])
    return tuple(rows)


@dataclass(frozen=True)
class FinMetric:
    """A finite extended metric space with its full distance table."""

    points: tuple[str, ...]
    dist: tuple[tuple[Dist, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))
        object.__setattr__(self, "dist", _normalize_table(self.points, self.dist))
        violations = metric_violations(self.points, self.dist)
        if violations:
            raise StructureError(violations)

    @classmethod
    def _trusted(cls, points, rows) -> "FinMetric":
        obj = object.__new__(cls)
        object.__setattr__(obj, "points", tuple(points))
        object.__setattr__(obj, "dist", tuple(tuple(r) for r in rows))
        return obj

    @classmethod
    def from_pairs(cls, points: Iterable[str], pairs: Mapping[tuple[str, str], object]) -> "FinMetric":
        """Distances for the listed pairs; every unlisted distinct pair is INF."""
        return cls(tuple(points), dict(pairs))

    @cached_property
    def index(self) -> dict[str, int]:
        return {p: i for i, p in enumerate(self.points)}

    def d(self, x: str, y: str) -> Dist:
        return self.dist[self.index[x]][self.index[y]]

    def __len__(self) -> int:
        return len(self.points)

    def __contains__(self, x) -> bool:
        return x in self.index

    def finite_pairs(self) -> list[tuple[str, str, Dist]]:
        """Unordered pairs at finite positive distance, in carrier order."""
        n = len(self.points)
        return [(self.points[i], self.points[j], self.dist[i][j])
                for i in range(n) for j in range(i + 1, n) if self.dist[i][j] is not INF]

    def restrict(self, subset: Iterable[str]) -> "FinMetric":
        keep = [p for p in self.points if p in set(subset)]
        idx = [self.index[p] for p in keep]
        return FinMetric._trusted(keep, [[self.dist[i][j] for j in idx] for i in idx])

    def relabel(self, mapping: Mapping[str, str]) -> "FinMetric":
        return FinMetric._trusted([mapping[p] for p in self.points], self.dist)


def validate_metric(points: Sequence[str], table) -> FinMetric:
    """Build a space, raising :class:`StructureError` listing every violation."""
    return FinMetric(tuple(points), table)


def discrete_space(labels: Iterable[str]) -> FinMetric:
    pts = tuple(labels)
    n = len(pts)
    return FinMetric._trusted(pts, [[ZERO if i == j else INF for j in range(n)] for i in range(n)])


@dataclass(frozen=True)
class MetricMap:
    domain: FinMetric
    codomain: FinMetric
    table: tuple[str, ...]

    def __post_init__(self):
        table = self.table
        if isinstance(table, Mapping):
            missing = [p for p in self.domain.points if p not in table]
            if missing:
                raise ValueError(f"map undefined on {missing}")
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

    def then(self, other: "MetricMap") -> "MetricMap":
        """Composite ``other ∘ self``."""
        return MetricMap(self.domain, other.codomain, tuple(other(y) for y in self.table))


def identity_map(X: FinMetric) -> MetricMap:
    return MetricMap(X, X, X.points)


def check_nonexpanding(f: MetricMap) -> tuple[bool, tuple[str, str] | None]:
    """Nonexpansiveness with the worst violating pair (largest excess) on failure."""
    X, Y = f.domain, f.codomain
    worst, worst_excess = None, None
    n = len(X)
    img = [Y.index[y] for y in f.table]
    for i in range(n):
        for j in range(i + 1, n):
            dx = X.dist[i][j]
            dy = Y.dist[img[i]][img[j]]
            if dy > dx:
                excess = INF if dy is INF else dy - dx
                if worst_excess is None or excess > worst_excess:
                    worst, worst_excess = (X.points[i], X.points[j]), excess
    return worst is None, worst


def sup_product(factors: Sequence[FinMetric]) -> tuple[FinMetric, list[MetricMap]]:
    """Cartesian product with the maximum metric, plus its projections."""
    factors = list(factors)
    combos = list(itertools.product(*[range(len(F)) for F in factors]))
    labels = [tuple_label([F.points[c] for F, c in zip(factors, combo)]) for combo in combos]
    rows = []
    for a in combos:
        row = []
        for b in combos:
            m = ZERO
            for F, i, j in zip(factors, a, b):
                dij = F.dist[i][j]
                if dij > m:
                    m = dij
            row.append(m)
        rows.append(row)
    space = FinMetric._trusted(labels, rows)
    projections = [MetricMap(space, F, tuple(F.points[combo[k]] for combo in combos))
                   for k, F in enumerate(factors)]
    return space, projections


def pairing(maps: Sequence[MetricMap], product: FinMetric) -> MetricMap:
    """The map ``x ↦ (f_1 x, …, f_k x)`` into a product built by :func:`sup_product`."""
    dom = maps[0].domain
    return MetricMap(dom, product, tuple(tuple_label([f(x) for f in maps]) for x in dom.points))


def tensor(X: FinMetric, Y: FinMetric) -> FinMetric:
    """Cartesian product with the addition metric."""
    combos = [(i, j) for i in range(len(X)) for j in range(len(Y))]
    labels = [tuple_label([X.points[i], Y.points[j]]) for i, j in combos]
    rows = [[X.dist[i][k] + Y.dist[j][l] for k, l in combos] for i, j in combos]
    return FinMetric._trusted(labels, rows)


def all_maps(X, Y, limit: int | None = bounds.MAPS):
    """Every function between carriers as a tuple of codomain labels."""
    bounds.check(len(Y.points) ** len(X.points), limit, "map enumeration")
    return itertools.product(Y.points, repeat=len(X.points))


def nonexpanding_maps(X: FinMetric, Y: FinMetric, limit: int | None = bounds.MAPS) -> list[tuple[str, ...]]:
    """All nonexpanding maps, by backtracking over the domain in carrier order."""
    bounds.check(len(Y) ** len(X), limit, "map enumeration")
    n = len(X)
    out: list[tuple[str, ...]] = []
    chosen: list[int] = []

    def extend(i: int):
        if i == n:
            out.append(tuple(Y.points[c] for c in chosen))
            return
        for c in range(len(Y)):
            if all(Y.dist[chosen[k]][c] <= X.dist[k][i] for k in range(i)):
                chosen.append(c)
                extend(i + 1)
                chosen.pop()

    extend(0)
    return out


def hom_space(X: FinMetric, Y: FinMetric, limit: int | None = bounds.MAPS) -> FinMetric:
    """Nonexpanding maps ``X → Y`` with the supremum metric.

    A map is labelled by its image list in domain order, e.g. ``"[u,v]"``.
    """
    maps = nonexpanding_maps(X, Y, limit)
    labels = ["[" + ",".join(m) + "]" for m in maps]
    rows = []
    for f in maps:
        row = []
        for g in maps:
            m = ZERO
            for a, b in zip(f, g):
                dab = Y.d(a, b)
                if dab > m:
                    m = dab
            row.append(m)
        rows.append(row)
    return FinMetric._trusted(labels, rows)


def same_space(X: FinMetric, Y: FinMetric) -> bool:
    """Label-respecting isometry: same labels and the same distance per label pair."""
    if set(X.points) != set(Y.points) or len(X) != len(Y):
        return False
    return all(X.d(p, q) == Y.d(p, q) for p in X.points for q in X.points)


def is_isometry(X: FinMetric, Y: FinMetric, mapping: Mapping[str, str]) -> bool:
    if len(X) != len(Y) or len(set(mapping.values())) != len(Y):
        return False
    return all(X.d(p, q) == Y.d(mapping[p], mapping[q]) for p in X.points for q in X.points)


def find_isometry(X: FinMetric, Y: FinMetric, bound: int = bounds.ISO_SEARCH_BOUND) -> dict[str, str] | None:
    """A distance-preserving bijection, trying the label identity first."""
    if len(X) != len(Y):
        return None
    if same_space(X, Y):
        return {p: p for p in X.points}
    bounds.check(len(X), bound, "isometry search")
    profile_x = [sorted(row, key=_dist_key) for row in X.dist]
    profile_y = [sorted(row, key=_dist_key) for row in Y.dist]
    n = len(X)
    assignment: list[int] = []
    used = [False] * n

    def extend(i: int) -> bool:
        if i == n:
            return True
        for c in range(n):
            if used[c] or profile_x[i] != profile_y[c]:
                continue
            if all(X.dist[k][i] == Y.dist[assignment[k]][c] for k in range(i)):
                used[c] = True
                assignment.append(c)
                if extend(i + 1):
                    return True
                assignment.pop()
                used[c] = False
        return False

    if extend(0):
        return {X.points[i]: Y.points[c] for i, c in enumerate(assignment)}
    return None


def _dist_key(d: Dist):
    return (1, 0) if d is INF else (0, d)
