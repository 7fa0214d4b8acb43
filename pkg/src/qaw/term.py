"""First-order terms over a signature, plus extended terms with formal ω-joins.

Variables live in one global pool ``x0, x1, …``; ``V_n`` is the first ``n``.
The label ``z`` is reserved as the hole of generated join families.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence, Union

from . import bounds
from .dist import INF, ZERO, Dist
from .errors import UnknownLeaf, UnmappedVariable, WorkbenchError

HOLE = "z"


class ArityError(WorkbenchError):
    pass


@dataclass(frozen=True)
class Signature:
    symbols: tuple[tuple[str, int], ...]

    def __post_init__(self):
        symbols = tuple((str(name), int(arity)) for name, arity in self.symbols)
        names = [name for name, _ in symbols]
        if len(set(names)) != len(names):
            dupes = sorted({n for n in names if names.count(n) > 1})
            raise ValueError(f"duplicate symbols {dupes}")
        if any(arity < 0 for _, arity in symbols):
            raise ValueError("arities must be natural numbers")
        object.__setattr__(self, "symbols", symbols)

    def arity(self, name: str) -> int:
        for sym, arity in self.symbols:
            if sym == name:
                return arity
        raise KeyError(name)

    def __contains__(self, name) -> bool:
        return any(sym == name for sym, _ in self.symbols)

    def by_arity(self, n: int) -> list[str]:
        return [sym for sym, arity in self.symbols if arity == n]


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class App:
    op: str
    args: tuple["Term", ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))

    def __str__(self) -> str:
        return f"{self.op}(" + ", ".join(str(a) for a in self.args) + ")"


Term = Union[Var, App]


@dataclass(frozen=True)
class EventuallyConstant:
    """A finite list of extended terms whose last entry repeats forever."""

    items: tuple["ExtTerm", ...]

    def __post_init__(self):
        items = tuple(self.items)
        if not items:
            raise ValueError("an eventually constant family needs at least one term")
        object.__setattr__(self, "items", items)


@dataclass(frozen=True)
class Generated:
    """``t_0 = seed`` and ``t_{k+1} = step[z := t_k]``.

    The seed is a plain term: substituting a join into an operation would
    leave the class of extended terms, which is not closed under operations.
    """

    seed: Term
    step: Term

    def __post_init__(self):
        if not is_term(self.seed) or not is_term(self.step):
            raise ValueError("generated families take plain terms for seed and step")
        if HOLE in vars_of(self.seed):
            raise ValueError(f"the hole variable {HOLE!r} may not occur in a seed")

    def member(self, k: int) -> Term:
        t = self.seed
        for _ in range(k):
            t = substitute(self.step, {HOLE: t}, partial=True)
        return t


@dataclass(frozen=True)
class Join:
    family: Union[EventuallyConstant, Generated]

    def __str__(self) -> str:
        fam = self.family
        if isinstance(fam, EventuallyConstant):
            return "join [" + ", ".join(str(t) for t in fam.items) + "]"
        return f"join from {fam.seed} step {fam.step}"


ExtTerm = Union[Var, App, Join]


def is_term(t) -> bool:
    if isinstance(t, Var):
        return True
    if isinstance(t, App):
        return all(is_term(a) for a in t.args)
    return False


def var(i: int) -> Var:
    return Var(f"x{i}")


def var_pool(n: int) -> tuple[Var, ...]:
    """The variables of ``V_n``."""
    return tuple(var(i) for i in range(n))


def vars_of(t) -> frozenset[str]:
    if isinstance(t, Var):
        return frozenset((t.name,))
    if isinstance(t, App):
        return frozenset().union(*(vars_of(a) for a in t.args))
    fam = t.family
    if isinstance(fam, EventuallyConstant):
        return frozenset().union(*(vars_of(s) for s in fam.items))
    return vars_of(fam.seed) | (vars_of(fam.step) - {HOLE})


def ordered_vars(t) -> list[str]:
    """Variables in first-occurrence order (hole excluded for generated joins)."""
    seen: dict[str, None] = {}

    def walk(s):
        if isinstance(s, Var):
            seen.setdefault(s.name)
        elif isinstance(s, App):
            for a in s.args:
                walk(a)
        elif isinstance(s.family, EventuallyConstant):
            for item in s.family.items:
                walk(item)
        else:
            walk(s.family.seed)
            for name in ordered_vars(s.family.step):
                if name != HOLE:
                    seen.setdefault(name)

    walk(t)
    return list(seen)


def height(t: Term) -> int:
    if isinstance(t, Var):
        return 0
    return 1 + max((height(a) for a in t.args), default=-1)


def symbols_of(t) -> frozenset[tuple[str, int]]:
    if isinstance(t, Var):
        return frozenset()
    if isinstance(t, App):
        return frozenset({(t.op, len(t.args))}).union(*(symbols_of(a) for a in t.args))
    fam = t.family
    if isinstance(fam, EventuallyConstant):
        return frozenset().union(*(symbols_of(s) for s in fam.items))
    return symbols_of(fam.seed) | symbols_of(fam.step)


def check_arities(sig: Signature, t) -> None:
    for name, n in symbols_of(t):
        if name not in sig:
            raise ArityError(f"unknown symbol {name!r}")
        if sig.arity(name) != n:
            raise ArityError(f"symbol {name!r} has arity {sig.arity(name)}, used with {n}")


def similar(t: Term, u: Term) -> bool:
    if isinstance(t, Var) and isinstance(u, Var):
        return True
    if isinstance(t, App) and isinstance(u, App):
        return t.op == u.op and len(t.args) == len(u.args) and all(
            similar(a, b) for a, b in zip(t.args, u.args))
    return False


def term_metric(M) -> Callable[[Term, Term], Dist]:
    """Distance on terms with leaves in ``M``: INF unless similar, else the
    largest leafwise distance."""

    def leaf(name):
        if name not in M:
            raise UnknownLeaf(f"{name!r} is not a point of the space")
        return name

    def d(t: Term, u: Term) -> Dist:
        if isinstance(t, Var) and isinstance(u, Var):
            return M.d(leaf(t.name), leaf(u.name))
        for s in (t, u):
            for name in vars_of(s):
                leaf(name)
        if not similar(t, u):
            return INF
        return max((d(a, b) for a, b in zip(t.args, u.args)), default=ZERO)

    return d


def term_order(P) -> Callable[[Term, Term], bool]:
    """Order on terms with leaves in ``P``: similar and leafwise below."""

    def leaf(name):
        if name not in P:
            raise UnknownLeaf(f"{name!r} is not a point of the poset")
        return name

    def leq(t: Term, u: Term) -> bool:
        if isinstance(t, Var) and isinstance(u, Var):
            return P.leq(leaf(t.name), leaf(u.name))
        for s in (t, u):
            for name in vars_of(s):
                leaf(name)
        if not similar(t, u):
            return False
        return all(leq(a, b) for a, b in zip(t.args, u.args))

    return leq


def enumerate_terms(sig: Signature, gens: Iterable[str], depth: int,
                    limit: int | None = 100_000) -> list[Term]:
    """All terms of height ≤ ``depth``, ordered by height, then symbol order,
    then argument tuples in product order."""
    if depth < 0:
        raise ValueError("depth must be natural")
    levels: list[list[Term]] = [[Var(g) for g in gens]]
    for name, arity in sig.symbols:
        if arity == 0:
            levels[0].append(App(name, ()))
    out = list(levels[0])
    bounds.check(len(out), limit, "term enumeration")
    for h in range(1, depth + 1):
        below = [t for level in levels for t in level]
        fresh: list[Term] = []
        newest = set(levels[-1])
        for name, arity in sig.symbols:
            if arity == 0:
                continue
            for args in itertools.product(below, repeat=arity):
                if any(a in newest for a in args):
                    fresh.append(App(name, args))
                    bounds.check(len(out) + len(fresh), limit, "term enumeration")
        levels.append(fresh)
        out.extend(fresh)
    return out


def substitute(t, m: Mapping[str, Term], partial: bool = False):
    """Simultaneous replacement of variables; unmapped ones raise unless ``partial``."""
    if isinstance(t, Var):
        if t.name in m:
            return m[t.name]
        if partial:
            return t
        raise UnmappedVariable(t.name)
    if isinstance(t, App):
        return App(t.op, tuple(substitute(a, m, partial) for a in t.args))
    fam = t.family
    if isinstance(fam, EventuallyConstant):
        return Join(EventuallyConstant(tuple(substitute(s, m, partial) for s in fam.items)))
    inner = {k: v for k, v in m.items() if k != HOLE}
    step_map = dict(inner)
    step_map[HOLE] = Var(HOLE)
    return Join(Generated(substitute(fam.seed, inner, partial), substitute(fam.step, step_map, partial)))


def rename(t, names: Mapping[str, str]):
    return substitute(t, {k: Var(v) for k, v in names.items()}, partial=True)


def apply(op: str, args: Sequence[Term]) -> App:
    return App(op, tuple(args))
