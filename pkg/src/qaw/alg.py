"""Quantitative and continuous algebras on finite carriers.

An operation of arity ``n`` is stored as a flat table over ``carrier^n`` in
lexicographic order of argument tuples (carrier order per coordinate).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Sequence, Union

from . import bounds
from .dist import INF, ZERO
from .errors import NotAHomomorphism, OpNotMonotone, OpNotNonexpanding, OpViolation, UnmappedVariable
from .mspace import FinMetric, check_nonexpanding, MetricMap, sup_product
from .poset import FinPoset, MonotoneMap, check_monotone, poset_product
from .term import Signature, Term, Var

Carrier = Union[FinMetric, FinPoset]


def _tuples(points: Sequence[str], n: int):
    return itertools.product(points, repeat=n)


@dataclass(frozen=True)
class Algebra:
    sig: Signature
    carrier: Carrier
    ops: tuple[tuple[str, tuple[str, ...]], ...]

    kind = "algebra"

    def __post_init__(self):
        ops = self.ops
        if isinstance(ops, Mapping):
            ops = ops.items()
        given = {}
        for name, table in ops:
            n = self.sig.arity(name)
            if isinstance(table, Mapping):
                table = tuple(table[args] for args in _tuples(self.carrier.points, n))
            table = tuple(table)
            if len(table) != len(self.carrier) ** n:
                raise ValueError(f"table for {name!r} has {len(table)} entries, "
                                 f"expected {len(self.carrier) ** n}")
            bad = [v for v in table if v not in self.carrier]
            if bad:
                raise ValueError(f"table for {name!r} mentions non-points {bad[:3]}")
            given[name] = table
        missing = [name for name, _ in self.sig.symbols if name not in given]
        if missing:
            raise ValueError(f"no table for {missing}")
        extra = [name for name in given if name not in self.sig]
        if extra:
            raise ValueError(f"tables for unknown symbols {extra}")
        object.__setattr__(self, "ops", tuple((name, given[name]) for name, _ in self.sig.symbols))

    @cached_property
    def table(self) -> dict[str, tuple[str, ...]]:
        return dict(self.ops)

    @cached_property
    def _index(self) -> dict[str, int]:
        return {p: i for i, p in enumerate(self.carrier.points)}

    def apply(self, name: str, args: Sequence[str]) -> str:
        idx = 0
        size = len(self.carrier)
        index = self._index
        for a in args:
            idx = idx * size + index[a]
        return self.table[name][idx]

    def op_dict(self, name: str) -> dict[tuple[str, ...], str]:
        n = self.sig.arity(name)
        return dict(zip(_tuples(self.carrier.points, n), self.table[name]))

    def __len__(self) -> int:
        return len(self.carrier)


class QuantAlgebra(Algebra):
    """Operations are meant to be nonexpanding for the sup metric on powers."""

    kind = "quant"


class ContAlgebra(Algebra):
    """Operations are meant to be monotone for the componentwise order."""

    kind = "cont"


def make_algebra(sig: Signature, carrier: Carrier, ops) -> Algebra:
    cls = QuantAlgebra if isinstance(carrier, FinMetric) else ContAlgebra
    return cls(sig, carrier, ops)


def _op_violation_met(A: Algebra, name: str):
    X = A.carrier
    n = A.sig.arity(name)
    tuples = list(_tuples(range(len(X)), n))
    table = A.table[name]
    worst, worst_excess = None, None
    D = X.dist
    for a in range(len(tuples)):
        ta = tuples[a]
        va = X.index[table[a]]
        for b in range(a + 1, len(tuples)):
            tb = tuples[b]
            bound = ZERO
            for i, j in zip(ta, tb):
                if D[i][j] > bound:
                    bound = D[i][j]
                    if bound is INF:
                        break
            if bound is INF:
                continue
            got = D[va][X.index[table[b]]]
            if got > bound:
                excess = INF if got is INF else got - bound
                if worst_excess is None or excess > worst_excess:
                    worst = (tuple(X.points[i] for i in ta), tuple(X.points[j] for j in tb))
                    worst_excess = excess
    return worst


def _op_violation_pos(A: Algebra, name: str):
    P = A.carrier
    n = A.sig.arity(name)
    tuples = list(_tuples(range(len(P)), n))
    table = A.table[name]
    L = P.leq_table
    for a, ta in enumerate(tuples):
        va = P.index[table[a]]
        for b, tb in enumerate(tuples):
            if a != b and all(L[i][j] for i, j in zip(ta, tb)) and not L[va][P.index[table[b]]]:
                return (tuple(P.points[i] for i in ta), tuple(P.points[j] for j in tb))
    return None


def algebra_violations(A: Algebra) -> list[OpViolation]:
    """Every operation that breaks the carrier structure, with a witness pair."""
    out = []
    for name, _ in A.sig.symbols:
        if isinstance(A.carrier, FinMetric):
            w = _op_violation_met(A, name)
            if w is not None:
                out.append(OpNotNonexpanding(name, w))
        else:
            w = _op_violation_pos(A, name)
            if w is not None:
                out.append(OpNotMonotone(name, w))
    return out


def validate_quant_algebra(A: QuantAlgebra) -> dict:
    """Report on nonexpansiveness; raises the first violation found."""
    if not isinstance(A.carrier, FinMetric):
        raise TypeError("a quantitative algebra needs a metric carrier")
    violations = algebra_violations(A)
    if violations:
        raise violations[0]
    return {"valid": True, "operations": [name for name, _ in A.sig.symbols]}


def validate_cont_algebra(A: ContAlgebra) -> dict:
    if not isinstance(A.carrier, FinPoset):
        raise TypeError("a continuous algebra needs a poset carrier")
    violations = algebra_violations(A)
    if violations:
        raise violations[0]
    return {"valid": True, "operations": [name for name, _ in A.sig.symbols]}


def is_valid(A: Algebra) -> bool:
    return not algebra_violations(A)


def eval_term(A: Algebra, f: Mapping[str, str], t: Term) -> str:
    if isinstance(t, Var):
        try:
            return f[t.name]
        except KeyError:
            raise UnmappedVariable(t.name) from None
    return A.apply(t.op, [eval_term(A, f, a) for a in t.args])


@dataclass(frozen=True)
class Homo:
    source: Algebra
    target: Algebra
    table: tuple[str, ...]

    def __post_init__(self):
        table = self.table
        if isinstance(table, Mapping):
            table = tuple(table[p] for p in self.source.carrier.points)
        table = tuple(table)
        if len(table) != len(self.source):
            raise ValueError("homomorphism table must be total")
        if any(v not in self.target.carrier for v in table):
            raise ValueError("homomorphism values must be target points")
        object.__setattr__(self, "table", table)

    def __call__(self, x: str) -> str:
        return self.table[self.source.carrier.index[x]]

    def as_dict(self) -> dict[str, str]:
        return dict(zip(self.source.carrier.points, self.table))


def check_homomorphism(h: Homo) -> tuple[bool, tuple | None]:
    """Commutation with every table plus nonexpansiveness / monotonicity.

    On failure the witness is ``(symbol, argument tuple)`` or
    ``("carrier", pair)``.
    """
    A, B = h.source, h.target
    if A.sig != B.sig:
        return False, ("signature", None)
    for name, n in A.sig.symbols:
        for args, value in zip(_tuples(A.carrier.points, n), A.table[name]):
            if h(value) != B.apply(name, [h(a) for a in args]):
                return False, (name, args)
    if isinstance(A.carrier, FinMetric):
        ok, w = check_nonexpanding(MetricMap(A.carrier, B.carrier, h.table))
    else:
        ok, w = check_monotone(MonotoneMap(A.carrier, B.carrier, h.table))
    return (True, None) if ok else (False, ("carrier", w))


def identity_homo(A: Algebra) -> Homo:
    return Homo(A, A, A.carrier.points)


def product_algebra(algebras: Sequence[Algebra], sig: Signature | None = None,
                    kind: str | None = None, limit: int | None = None) -> tuple[Algebra, list[Homo]]:
    """Componentwise operations on the product carrier, with its projections."""
    algebras = list(algebras)
    if algebras:
        sig = algebras[0].sig
        kind = algebras[0].kind
        if any(B.sig != sig for B in algebras):
            raise ValueError("product factors must share a signature")
    elif sig is None or kind is None:
        raise ValueError("an empty product needs an explicit signature and kind")
    size = 1
    for B in algebras:
        size *= len(B)
    bounds.check(size, limit if limit is not None else bounds.max_carrier() ** 2, "product carrier")
    carriers = [B.carrier for B in algebras]
    if kind == "quant":
        carrier, cprojs = sup_product(carriers)
    else:
        carrier, cprojs = poset_product(carriers)
    comps = list(itertools.product(*[B.carrier.points for B in algebras]))
    label_of = dict(zip(comps, carrier.points))
    ops = {}
    for name, n in sig.symbols:
        table = []
        for args in _tuples(range(len(comps)), n):
            parts = tuple(B.apply(name, [comps[a][k] for a in args]) for k, B in enumerate(algebras))
            table.append(label_of[parts])
        ops[name] = tuple(table)
    P = make_algebra(sig, carrier, ops)
    projections = [Homo(P, B, proj.table) for B, proj in zip(algebras, cprojs)]
    return P, projections


def subalgebra_generated(A: Algebra, S: Iterable[str]) -> tuple[Algebra, Homo]:
    """Least operation-closed subset containing ``S``, with the restricted structure."""
    closed = set(S)
    unknown = closed - set(A.carrier.points)
    if unknown:
        raise ValueError(f"{sorted(unknown)} are not carrier points")
    changed = True
    while changed:
        changed = False
        current = [p for p in A.carrier.points if p in closed]
        for name, n in A.sig.symbols:
            for args in _tuples(current, n):
                v = A.apply(name, args)
                if v not in closed:
                    closed.add(v)
                    changed = True
    carrier = A.carrier.restrict(closed)
    ops = {name: tuple(A.apply(name, args) for args in _tuples(carrier.points, n))
           for name, n in A.sig.symbols}
    B = make_algebra(A.sig, carrier, ops)
    return B, Homo(B, A, carrier.points)


def homomorphic_image(h: Homo) -> tuple[Algebra, Homo]:
    """The image of ``h`` with structure induced from the target, and the
    corestriction onto it."""
    ok, witness = check_homomorphism(h)
    if not ok:
        raise NotAHomomorphism(f"not a homomorphism at {witness}")
    image = set(h.table)
    B = h.target
    carrier = B.carrier.restrict(image)
    ops = {name: tuple(B.apply(name, args) for args in _tuples(carrier.points, n))
           for name, n in B.sig.symbols}
    C = make_algebra(B.sig, carrier, ops)
    return C, Homo(h.source, C, h.table)


def enumerate_algebras(sig: Signature, carrier: Carrier, limit: int | None = bounds.MAPS,
                       valid_only: bool = True) -> Iterator[Algebra]:
    """Every algebra of ``sig`` on ``carrier`` in deterministic order."""
    size = len(carrier)
    shapes = [(name, size ** n) for name, n in sig.symbols]
    total = 1
    for _, cells in shapes:
        total *= size ** cells
    bounds.check(total, limit, "algebra enumeration")
    per_op = [list(itertools.product(carrier.points, repeat=cells)) for _, cells in shapes]
    for choice in itertools.product(*per_op):
        A = make_algebra(sig, carrier, {name: table for (name, _), table in zip(shapes, choice)})
        if not valid_only or is_valid(A):
            yield A


def all_homomorphisms(A: Algebra, B: Algebra, limit: int | None = bounds.MAPS) -> list[Homo]:
    bounds.check(len(B) ** len(A), limit, "homomorphism enumeration")
    out = []
    for table in itertools.product(B.carrier.points, repeat=len(A)):
        h = Homo(A, B, table)
        if check_homomorphism(h)[0]:
            out.append(h)
    return out
