"""Equations, the partial interpretation of extended terms, and satisfaction."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence, Union

from . import bounds
from .alg import Algebra, ContAlgebra, eval_term
from .dist import INF, Dist, as_dist, format_dist
from .errors import ModeMismatch
from .mspace import FinMetric
from .term import (
    HOLE,
    EventuallyConstant,
    ExtTerm,
    Join,
    Term,
    is_term,
    ordered_vars,
)


@dataclass(frozen=True)
class QuantEq:
    left: Term
    right: Term
    eps: Dist

    def __post_init__(self):
        eps = as_dist(self.eps)
        if eps is INF:
            raise ValueError("the bound of a quantitative equation must be finite")
        if not (is_term(self.left) and is_term(self.right)):
            raise ValueError("quantitative equations relate plain terms")
        object.__setattr__(self, "eps", eps)

    def __str__(self) -> str:
        return f"{self.left} == {self.right} within {format_dist(self.eps)}"


@dataclass(frozen=True)
class ContEq:
    left: ExtTerm
    right: ExtTerm

    def __str__(self) -> str:
        return f"{self.left} == {self.right}"


Equation = Union[QuantEq, ContEq]


@dataclass(frozen=True)
class ChainConditionFailed:
    index: int

    def __str__(self) -> str:
        return f"chain condition fails at index {self.index}"


@dataclass(frozen=True)
class NonStabilizing:
    def __str__(self) -> str:
        return "values did not stabilize within the longest chain of the carrier"


@dataclass(frozen=True)
class Defined:
    value: str


@dataclass(frozen=True)
class Undefined:
    reason: Union[ChainConditionFailed, NonStabilizing]


PartialValue = Union[Defined, Undefined]


@dataclass(frozen=True)
class Verdict:
    """Outcome of a universally quantified check; truthy when it holds."""

    holds: bool
    witness: Mapping[str, str] | None = None
    detail: Any = None

    def __bool__(self) -> bool:
        return self.holds


def equation_vars(e: Equation) -> list[str]:
    names = ordered_vars(e.left)
    for name in ordered_vars(e.right):
        if name not in names:
            names.append(name)
    return names


def interpretations(A: Algebra, names: Sequence[str], limit: int | None = bounds.MAPS):
    """All assignments of carrier points to ``names`` in canonical order."""
    bounds.check(len(A) ** len(names), limit, "interpretation enumeration")
    for values in itertools.product(A.carrier.points, repeat=len(names)):
        yield dict(zip(names, values))


def satisfies_quant(A: Algebra, e: QuantEq, limit: int | None = bounds.MAPS) -> Verdict:
    """Whether ``d(f♯ t, f♯ t') ≤ ε`` for every interpretation ``f``."""
    if not isinstance(A.carrier, FinMetric):
        raise ModeMismatch("quantitative equations need a metric carrier")
    X = A.carrier
    for f in interpretations(A, equation_vars(e), limit):
        a = eval_term(A, f, e.left)
        b = eval_term(A, f, e.right)
        d = X.d(a, b)
        if d > e.eps:
            return Verdict(False, f, {"left": a, "right": b, "distance": format_dist(d)})
    return Verdict(True)


def _leq(A: Algebra, a: str, b: str) -> bool:
    C = A.carrier
    if isinstance(C, FinMetric):
        return a == b
    return C.leq(a, b)


def _chain_bound(A: Algebra) -> int:
    C = A.carrier
    if isinstance(C, FinMetric):
        return 1
    return C.longest_chain


def interpret_extended(A: Algebra, f: Mapping[str, str], t: ExtTerm) -> PartialValue:
    """The partial interpretation ``f^@``.

    Joins are defined when every member is defined and the values ascend;
    the join is then the eventual value.
    """
    if not isinstance(t, Join):
        return Defined(eval_term(A, f, t))
    fam = t.family
    if isinstance(fam, EventuallyConstant):
        values = [interpret_extended(A, f, s) for s in fam.items]
        for k, v in enumerate(values):
            if isinstance(v, Undefined):
                return Undefined(ChainConditionFailed(k))
            if k + 1 < len(values) and isinstance(values[k + 1], Defined):
                if not _leq(A, v.value, values[k + 1].value):
                    return Undefined(ChainConditionFailed(k))
        return values[-1]
    current = eval_term(A, f, fam.seed)
    env = dict(f)
    for k in range(_chain_bound(A)):
        env[HOLE] = current
        following = eval_term(A, env, fam.step)
        if not _leq(A, current, following):
            return Undefined(ChainConditionFailed(k))
        if following == current:
            return Defined(current)
        current = following
    return Undefined(NonStabilizing())


def satisfies_cont(A: Algebra, e: ContEq, limit: int | None = bounds.MAPS) -> Verdict:
    """Both sides defined and equal under every interpretation."""
    for f in interpretations(A, equation_vars(e), limit):
        a = interpret_extended(A, f, e.left)
        b = interpret_extended(A, f, e.right)
        if isinstance(a, Undefined) or isinstance(b, Undefined) or a.value != b.value:
            return Verdict(False, f, {"left": _show(a), "right": _show(b)})
    return Verdict(True)


def _show(v: PartialValue) -> str:
    return v.value if isinstance(v, Defined) else f"undefined ({v.reason})"


def inequation(t: ExtTerm, u: ExtTerm) -> ContEq:
    """``t ⊑ u`` as ``u = ⋁[t, u, u, …]``: the join exists exactly when
    ``t ⊑ u``, and then equals ``u``."""
    return ContEq(u, Join(EventuallyConstant((t, u))))


def is_definable(A: Algebra, t: ExtTerm, limit: int | None = bounds.MAPS) -> Verdict:
    names = ordered_vars(t)
    for f in interpretations(A, names, limit):
        v = interpret_extended(A, f, t)
        if isinstance(v, Undefined):
            return Verdict(False, f, {"reason": str(v.reason)})
    return Verdict(True)


def satisfies(A: Algebra, e: Equation, limit: int | None = bounds.MAPS) -> Verdict:
    """Dispatch on equation kind.

    A continuous equation between plain terms is read on a metric carrier as
    the ε = 0 equation; joins there have no meaning.
    """
    if isinstance(e, QuantEq):
        return satisfies_quant(A, e, limit)
    if isinstance(A.carrier, FinMetric):
        if not (is_term(e.left) and is_term(e.right)):
            raise ModeMismatch("joins need a poset carrier")
        return satisfies_quant(A, QuantEq(e.left, e.right, 0), limit)
    return satisfies_cont(A, e, limit)


@dataclass
class MembershipReport:
    member: bool
    verdicts: list[tuple[int, Verdict]] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.member

    def first_failure(self) -> tuple[int, Verdict] | None:
        for i, v in self.verdicts:
            if not v:
                return i, v
        return None


def check_variety_membership(A: Algebra, eqs: Sequence[Equation], stop_early: bool = False,
                             limit: int | None = bounds.MAPS) -> MembershipReport:
    """Per-equation verdicts and the overall membership decision."""
    for e in eqs:
        if isinstance(e, QuantEq) and isinstance(A, ContAlgebra):
            raise ModeMismatch("quantitative equations do not apply to continuous algebras")
    report = MembershipReport(True)
    for i, e in enumerate(eqs):
        v = satisfies(A, e, limit)
        report.verdicts.append((i, v))
        if not v:
            report.member = False
            if stop_early:
                break
    return report
