"""Seeded random declarations of every DSL kind, for round-trip checks."""
from __future__ import annotations

import random
from fractions import Fraction

from qaw.alg import make_algebra
from qaw.bridge import FIXTURES, MET, POS, builtin, materialize
from qaw.colim import ConstraintSet, DeclaredLimits, OmegaChainMet, OmegaChainPos, ParallelPair, shortest_path_closure
from qaw.dist import INF
from qaw.eqn import ContEq, QuantEq
from qaw.mspace import FinMetric, MetricMap
from qaw.poset import FinPoset, MonotoneMap, monotone_maps, transitive_closure
from qaw.term import HOLE, App, EventuallyConstant, Generated, Join, Signature, Var

KINDS = ("space", "poset", "signature", "algebra", "eq", "chain", "pair", "constraints", "presentation")

# labels that need quoting sit next to plain ones
LABELS = ["a", "b", "c", "p0", "top", "0", "1", "join", "inf", "x y", "é", "q-r", "\"q\""]
VALUES = [Fraction(k, 4) for k in range(1, 41)]
SYMBOLS = {"e": 0, "inv": 1, "mul": 2, "f": 1, "g3": 3}
VARS = ["x", "y", "w", "x0"]


def _labels(rng: random.Random, n: int) -> list[str]:
    return rng.sample(LABELS, n)


def _rows(rng: random.Random, n: int):
    rows = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            rows[i][j] = rows[j][i] = rng.choice(VALUES + [INF])
    return shortest_path_closure(rows)


def space(rng: random.Random, max_points: int = 4) -> FinMetric:
    n = rng.randint(0, max_points)
    return FinMetric(_labels(rng, n), _rows(rng, n))


def _order(rng: random.Random, n: int, density: float = 0.4):
    perm = list(range(n))
    rng.shuffle(perm)
    rows = [[i == j for j in range(n)] for i in range(n)]
    for a in range(n):
        for b in range(a + 1, n):
            if rng.random() < density:
                rows[perm[a]][perm[b]] = True
    return transitive_closure(rows)


def poset(rng: random.Random, max_points: int = 4, min_points: int = 0) -> FinPoset:
    n = rng.randint(min_points, max_points)
    return FinPoset(_labels(rng, n), _order(rng, n))


def signature(rng: random.Random) -> Signature:
    names = rng.sample(sorted(SYMBOLS), rng.randint(0, 3))
    return Signature(tuple((s, SYMBOLS[s]) for s in names))


def algebra(rng: random.Random):
    sig = signature(rng)
    n = rng.randint(1, 3)
    carrier = FinMetric(_labels(rng, n), _rows(rng, n)) if rng.random() < 0.5 else FinPoset(
        _labels(rng, n), _order(rng, n))
    ops = {s: tuple(rng.choice(carrier.points) for _ in range(n ** a)) for s, a in sig.symbols}
    return make_algebra(sig, carrier, ops)


def term(rng: random.Random, height: int = 3, names=VARS):
    if height == 0 or rng.random() < 0.3:
        return App("e") if rng.random() < 0.15 else Var(rng.choice(names))
    op = rng.choice(["inv", "mul", "f", "g3"])
    return App(op, tuple(term(rng, height - 1, names) for _ in range(SYMBOLS[op])))


def ext_term(rng: random.Random, height: int = 2):
    r = rng.random()
    if height == 0 or r < 0.5:
        return term(rng, 2)
    if r < 0.75:
        return Join(EventuallyConstant(tuple(ext_term(rng, height - 1) for _ in range(rng.randint(1, 3)))))
    return Join(Generated(term(rng, 2), term(rng, 2, VARS + [HOLE])))


def eq(rng: random.Random):
    if rng.random() < 0.5:
        return QuantEq(term(rng), term(rng), rng.choice([Fraction(0)] + VALUES))
    return ContEq(ext_term(rng), ext_term(rng))


def chain(rng: random.Random):
    n = rng.randint(1, 3)
    length = rng.randint(1, 3)
    pts = _labels(rng, n)
    if rng.random() < 0.5:
        base = _rows(rng, n)
        scales = sorted((Fraction(rng.randint(1, 4), 4) for _ in range(length)), reverse=True)
        stages = [FinMetric(pts, [[d if d is INF else d * s for d in row] for row in base]) for s in scales]
        links = [MetricMap(stages[i], stages[i + 1], tuple(pts)) for i in range(length - 1)]
        if rng.random() < 0.5:
            last = stages[-1].dist
            limits = DeclaredLimits(tuple(tuple(d if d is INF else d / 2 for d in row) for row in last))
            return OmegaChainMet(stages, links, limits)
        return OmegaChainMet(stages, links)
    rows = _order(rng, n)
    stages = []
    for _ in range(length):
        stages.append(FinPoset(pts, rows))
        grown = _order(rng, n, 0.2)
        rows = transitive_closure([[rows[i][j] or (grown[i][j] and _compatible(rows, i, j))
                                    for j in range(n)] for i in range(n)])
    links = [MonotoneMap(stages[i], stages[i + 1], tuple(pts)) for i in range(length - 1)]
    return OmegaChainPos(stages, links)


def _compatible(rows, i, j) -> bool:
    # adding i ≤ j keeps antisymmetry when j ≤ i does not already hold
    return not rows[j][i]


def pair(rng: random.Random):
    A = poset(rng, 3)
    B = poset(rng, 3, min_points=1)
    maps = monotone_maps(A, B)
    f0, f1 = rng.choice(maps), rng.choice(maps)
    return ParallelPair(A, B, MonotoneMap(A, B, tuple(f0)), MonotoneMap(A, B, tuple(f1)))


def constraints(rng: random.Random):
    base = space(rng, 4)
    entries = []
    if len(base) >= 2:
        for _ in range(rng.randint(0, 3)):
            x, y = rng.sample(base.points, 2)
            entries.append((x, y, rng.choice(VALUES)))
    return ConstraintSet(base, tuple(entries))


def presentation(rng: random.Random):
    P = builtin(rng.choice(sorted(FIXTURES)), rng.randint(0, 2), rng.choice([MET, POS]))
    return materialize(P) if rng.random() < 0.3 else P


MAKERS = {"space": space, "poset": poset, "signature": signature, "algebra": algebra, "eq": eq,
          "chain": chain, "pair": pair, "constraints": constraints, "presentation": presentation}


def declaration(kind: str, rng: random.Random):
    return MAKERS[kind](rng)
