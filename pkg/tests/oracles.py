"""Independent reference computations used to freeze expected values.

These never call into the library's algorithms; they work on plain lists,
with ``None`` standing for an infinite distance.
"""
from __future__ import annotations

import itertools
from fractions import Fraction

from qaw.dist import INF


def raw(d):
    return None if d is INF else Fraction(d)


def add(a, b):
    return None if a is None or b is None else a + b


def le(a, b):
    if b is None:
        return True
    if a is None:
        return False
    return a <= b


def metric_ok(rows) -> bool:
    """Triple-loop check of the metric axioms on a raw table."""
    n = len(rows)
    for i in range(n):
        if rows[i][i] != 0:
            return False
        for j in range(n):
            if rows[i][j] != rows[j][i]:
                return False
            if i != j and rows[i][j] == 0:
                return False
            for k in range(n):
                if not le(rows[i][k], add(rows[i][j], rows[j][k])):
                    return False
    return True


def poset_ok(rows) -> bool:
    n = len(rows)
    return (all(rows[i][i] for i in range(n))
            and not any(rows[i][j] and rows[j][i] for i in range(n) for j in range(n) if i != j)
            and all(rows[i][k] or not (rows[i][j] and rows[j][k])
                    for i in range(n) for j in range(n) for k in range(n)))


def shortest_paths(rows):
    """Bellman-Ford style relaxation until nothing changes."""
    n = len(rows)
    cur = [list(r) for r in rows]
    changed = True
    while changed:
        changed = False
        for i, j, k in itertools.product(range(n), repeat=3):
            via = add(cur[i][k], cur[k][j])
            if via is not None and not le(cur[i][j], via):
                cur[i][j] = via
                changed = True
    return cur


def nonexpanding_count(X, Y) -> int:
    n = len(X.points)
    total = 0
    for f in itertools.product(range(len(Y.points)), repeat=n):
        if all(le(raw(Y.dist[f[i]][f[j]]), raw(X.dist[i][j])) for i in range(n) for j in range(n)):
            total += 1
    return total


def monotone_count(P, Q) -> int:
    n = len(P.points)
    return sum(
        all(Q.leq_table[f[i]][f[j]] for i in range(n) for j in range(n) if P.leq_table[i][j])
        for f in itertools.product(range(len(Q.points)), repeat=n))


def order_classes(rows):
    """Classes of the equivalence ``x ⊑ y and y ⊑ x`` of a preorder."""
    n = len(rows)
    out, seen = [], set()
    for i in range(n):
        if i in seen:
            continue
        cls = [j for j in range(n) if rows[i][j] and rows[j][i]]
        seen.update(cls)
        out.append(cls)
    return out


def preorder_closure(n, pairs):
    rows = [[i == j for j in range(n)] for i in range(n)]
    for i, j in pairs:
        rows[i][j] = True
    changed = True
    while changed:
        changed = False
        for i, j, k in itertools.product(range(n), repeat=3):
            if rows[i][j] and rows[j][k] and not rows[i][k]:
                rows[i][k] = True
                changed = True
    return rows


def extended_value(A, f, t):
    """Reference f^@: expand join members explicitly and test every link.

    Returns ``("defined", point)`` or ``("undefined", index)``.  Generated
    families are unfolded for ``|A| + 1`` members, which on a finite carrier
    is past any strictly ascending run.
    """
    from qaw.alg import eval_term
    from qaw.mspace import FinMetric
    from qaw.term import EventuallyConstant, Join

    def below(a, b):
        if isinstance(A.carrier, FinMetric):
            return a == b
        return A.carrier.leq(a, b)

    if not isinstance(t, Join):
        return ("defined", eval_term(A, f, t))
    fam = t.family
    if isinstance(fam, EventuallyConstant):
        vals = [extended_value(A, f, s) for s in fam.items]
    else:
        vals = [("defined", eval_term(A, f, fam.member(k))) for k in range(len(A) + 2)]
    for k, v in enumerate(vals):
        if v[0] == "undefined":
            return ("undefined", k)
        if k + 1 < len(vals) and vals[k + 1][0] == "defined" and not below(v[1], vals[k + 1][1]):
            return ("undefined", k)
    return vals[-1]
