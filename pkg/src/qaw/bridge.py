"""Finitary monads given as Kleisli triples on the discrete arities ``V_n``.

A presentation stores, for ``n ≤ N``, the carrier ``T_n`` (the value of the
monad on ``V_n``), the unit ``η_n : V_n → T_n`` and the extension operator:
every ``k : V_n → T_m`` lifts to ``ext(k) : T_n → T_m``.  From this data we
generate the equational presentation of the corresponding variety, translate
Eilenberg–Moore algebras on discrete carriers into variety algebras, check
freeness of ``T_n`` against finite members, and evaluate the monad on finite
non-discrete spaces through precongruence colimits.
"""
from __future__ import annotations

import itertools
import random
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Mapping, Sequence, Union

import numpy as np

from . import bounds
from .alg import Algebra, algebra_violations, make_algebra
from .colim import ConstraintSet, basic_weight_colimit
from .dist import INF, ZERO, Dist, format_dist
from .eqn import ContEq, QuantEq
from .errors import (
    ArityBudgetExceeded,
    FreenessFailure,
    LawViolation,
    ModeMismatch,
    NotAMember,
    NotAnEMAlgebra,
)
from .mspace import FinMetric, MetricMap, check_nonexpanding, discrete_space
from .poset import FinPoset, MonotoneMap, check_monotone, discrete_poset
from .term import App, Join, EventuallyConstant, Signature, Var, var_pool

MET, POS = "met", "pos"
Carrier = Union[FinMetric, FinPoset]


def var_labels(n: int) -> tuple[str, ...]:
    return tuple(f"x{i}" for i in range(n))


def symbol_name(label: str, n: int) -> str:
    """Operation symbol for the point ``label`` of ``T_n``."""
    return f"{label}@{n}"


# ---------------------------------------------------------------------------
# built-in rules


def _carrier(mode: str, points: Sequence[str], pairs: Mapping[tuple[str, str], Dist] | Iterable = ()) -> Carrier:
    if mode == MET:
        return FinMetric.from_pairs(points, dict(pairs)) if pairs else discrete_space(points)
    return FinPoset.from_pairs(points, list(pairs)) if pairs else discrete_poset(points)


def _identity_points(n):
    return var_labels(n)


def _semilattice_points(n):
    subsets = [s for size in range(1, n + 1) for s in itertools.combinations(range(n), size)]
    return tuple("_".join(f"x{i}" for i in s) for s in subsets)


def _lift_points(n):
    return ("bot",) + var_labels(n)


def _writer_points(n):
    return tuple(label for i in range(n) for label in (f"x{i}", f"x{i}_t"))


class Rule:
    """A family of presentations indexed by mode and arity bound."""

    name = ""
    modes = (MET, POS)

    def points(self, n: int) -> tuple[str, ...]:
        raise NotImplementedError

    def carrier(self, mode: str, n: int) -> Carrier:
        return _carrier(mode, self.points(n))

    def unit(self, n: int) -> tuple[str, ...]:
        return var_labels(n)

    def ext(self, n: int, m: int, k: Sequence[str]) -> tuple[str, ...]:
        raise NotImplementedError


class IdentityRule(Rule):
    name = "identity"

    def points(self, n):
        return _identity_points(n)

    def ext(self, n, m, k):
        return tuple(k)


class UnionRule(Rule):
    """Nonempty finite subsets; extension takes unions."""

    name = "union"

    def points(self, n):
        return _semilattice_points(n)

    def unit(self, n):
        return var_labels(n)

    def ext(self, n, m, k):
        out = []
        for label in self.points(n):
            members: set[int] = set()
            for x in label.split("_"):
                members.update(int(y[1:]) for y in k[int(x[1:])].split("_"))
            out.append("_".join(f"x{i}" for i in sorted(members)))
        return tuple(out)


class LiftRule(Rule):
    """One adjoined point ``bot``; below everything in the poset reading."""

    name = "lift"

    def points(self, n):
        return _lift_points(n)

    def carrier(self, mode, n):
        pts = self.points(n)
        if mode == POS:
            return FinPoset.from_pairs(pts, [("bot", x) for x in pts[1:]])
        return discrete_space(pts)

    def ext(self, n, m, k):
        return ("bot",) + tuple(k)


class WriterRule(Rule):
    """``V_n × {0,1}`` with the flag combined by max.

    The metric reading puts the two flags of a point at distance 1; the poset
    reading orders flag 0 below flag 1.
    """

    name = "writer-max"

    def points(self, n):
        return _writer_points(n)

    def carrier(self, mode, n):
        pts = self.points(n)
        if mode == MET:
            return FinMetric.from_pairs(pts, {(f"x{i}", f"x{i}_t"): 1 for i in range(n)})
        return FinPoset.from_pairs(pts, [(f"x{i}", f"x{i}_t") for i in range(n)])

    def ext(self, n, m, k):
        out = []
        for label in self.points(n):
            i = int(label.split("_")[0][1:])
            flagged = label.endswith("_t")
            target = k[i]
            if flagged and not target.endswith("_t"):
                target += "_t"
            out.append(target)
        return tuple(out)


RULES: dict[str, Rule] = {r.name: r for r in (IdentityRule(), UnionRule(), LiftRule(), WriterRule())}

FIXTURES = {"identity": "identity", "semilattice": "union", "maybe": "lift", "writer": "writer-max"}


# ---------------------------------------------------------------------------
# presentations


@dataclass(frozen=True, eq=False)
class MonadPresentation:
    mode: str
    arity: int
    carriers: tuple[Carrier, ...]
    units: tuple[tuple[str, ...], ...]
    rule: str | None = None
    tables: Mapping[tuple[int, int, tuple[str, ...]], tuple[str, ...]] | None = None

    def __post_init__(self):
        if self.mode not in (MET, POS):
            raise ValueError(f"mode must be {MET!r} or {POS!r}")
        object.__setattr__(self, "carriers", tuple(self.carriers))
        object.__setattr__(self, "units", tuple(tuple(u) for u in self.units))
        if len(self.carriers) != self.arity + 1 or len(self.units) != self.arity + 1:
            raise ValueError("need a carrier and a unit for every arity 0..N")
        for n, (T, u) in enumerate(zip(self.carriers, self.units)):
            expected = FinMetric if self.mode == MET else FinPoset
            if not isinstance(T, expected):
                raise ValueError(f"carrier {n} has the wrong kind for mode {self.mode}")
            if len(u) != n or any(p not in T for p in u):
                raise ValueError(f"unit {n} must send each of x0..x{n - 1} to a point of T_{n}")
        if (self.rule is None) == (self.tables is None):
            raise ValueError("give exactly one of a named rule or explicit extension tables")
        if self.rule is not None and self.rule not in RULES:
            raise ValueError(f"unknown rule {self.rule!r}")
        if self.tables is not None:
            tables = {}
            for (n, m, k), table in dict(self.tables).items():
                table = tuple(table)
                if len(table) != len(self.carriers[n]) or any(p not in self.carriers[m] for p in table):
                    raise ValueError(f"extension table for {(n, m, k)} is malformed")
                tables[(n, m, tuple(k))] = table
            object.__setattr__(self, "tables", tables)
        object.__setattr__(self, "_cache", {})
        object.__setattr__(self, "_arrays", {})

    def __eq__(self, other) -> bool:
        if not isinstance(other, MonadPresentation):
            return NotImplemented
        return (self.mode, self.arity, self.carriers, self.units, self.rule, self.tables) == (
            other.mode, other.arity, other.carriers, other.units, other.rule, other.tables)

    def __hash__(self) -> int:
        return hash((self.mode, self.arity, self.rule))

    def points(self, n: int) -> tuple[str, ...]:
        return self.carriers[n].points

    def ext(self, n: int, m: int, k: Sequence[str]) -> tuple[str, ...]:
        """``ext(k)`` as a table aligned with the points of ``T_n``."""
        key = (n, m, tuple(k))
        cache = self._cache
        if key not in cache:
            if self.tables is not None:
                if key not in self.tables:
                    raise KeyError(f"no extension table for {key}")
                cache[key] = self.tables[key]
            else:
                cache[key] = RULES[self.rule].ext(n, m, key[2])
        return cache[key]

    def kleisli_maps(self, n: int, m: int) -> Iterator[tuple[str, ...]]:
        """Every ``k : V_n → T_m`` as the tuple ``(k(x_0), …, k(x_{n-1}))``."""
        return itertools.product(self.points(m), repeat=n)

    def ext_array(self, n: int, m: int) -> tuple[np.ndarray, np.ndarray]:
        """All ``k`` (as index rows) and their extensions (as index rows)."""
        key = (n, m)
        if key not in self._arrays:
            Tm = self.carriers[m]
            ks = list(self.kleisli_maps(n, m))
            k_idx = np.array([[Tm.index[p] for p in k] for k in ks], dtype=np.int64).reshape(len(ks), n)
            e_idx = np.array([[Tm.index[p] for p in self.ext(n, m, k)] for k in ks],
                             dtype=np.int64).reshape(len(ks), len(self.carriers[n]))
            self._arrays[key] = (k_idx, e_idx)
        return self._arrays[key]


def builtin(name: str, arity: int, mode: str = MET) -> MonadPresentation:
    """A shipped presentation by fixture name (or rule name) truncated at ``arity``."""
    rule = RULES[FIXTURES.get(name, name)]
    carriers = tuple(rule.carrier(mode, n) for n in range(arity + 1))
    units = tuple(rule.unit(n) for n in range(arity + 1))
    return MonadPresentation(mode, arity, carriers, units, rule=rule.name)


def materialize(P: MonadPresentation) -> MonadPresentation:
    """The same presentation with every extension table written out."""
    tables = {}
    for n in range(P.arity + 1):
        for m in range(P.arity + 1):
            for k in P.kleisli_maps(n, m):
                tables[(n, m, k)] = P.ext(n, m, k)
    return MonadPresentation(P.mode, P.arity, P.carriers, P.units, tables=tables)


def mutate(P: MonadPresentation, rng: random.Random) -> tuple[MonadPresentation, tuple]:
    """Change one cell of one extension table to a different point."""
    explicit = P if P.tables is not None else materialize(P)
    keys = [key for key, table in explicit.tables.items()
            if table and len(explicit.carriers[key[1]]) > 1]
    key = rng.choice(sorted(keys))
    n, m, _ = key
    table = list(explicit.tables[key])
    cell = rng.randrange(len(table))
    choices = [p for p in explicit.points(m) if p != table[cell]]
    table[cell] = rng.choice(choices)
    tables = dict(explicit.tables)
    tables[key] = tuple(table)
    return MonadPresentation(P.mode, P.arity, P.carriers, P.units, tables=tables), (key, cell, table[cell])


# ---------------------------------------------------------------------------
# laws


@dataclass
class LawReport:
    failures: list[LawViolation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def __bool__(self) -> bool:
        return self.ok


def _structure_ok(P: MonadPresentation, n: int, m: int, table: Sequence[str]):
    if P.mode == MET:
        return check_nonexpanding(MetricMap(P.carriers[n], P.carriers[m], tuple(table)))
    return check_monotone(MonotoneMap(P.carriers[n], P.carriers[m], tuple(table)))


def check_kleisli_laws(P: MonadPresentation, stop_early: bool = False) -> LawReport:
    """Exhaustively check the four laws over every ``n, m, p ≤ N``."""
    report = LawReport()
    N = P.arity

    def fail(law, witness):
        report.failures.append(LawViolation(law, witness))
        return stop_early

    for n in range(N + 1):
        if P.ext(n, n, P.units[n]) != P.points(n):
            if fail("ext(unit) = id", (n,)):
                return report
    for n in range(N + 1):
        for m in range(N + 1):
            k_idx, e_idx = P.ext_array(n, m)
            Tm = P.points(m)
            for row, (k, ext_k) in enumerate(zip(k_idx, e_idx)):
                table = tuple(Tm[i] for i in ext_k)
                ok, w = _structure_ok(P, n, m, table)
                if not ok and fail("ext(k) preserves structure", (n, m, tuple(Tm[i] for i in k), w)):
                    return report
                unit_idx = [P.carriers[n].index[u] for u in P.units[n]]
                if any(ext_k[u] != k[i] for i, u in enumerate(unit_idx)):
                    if fail("ext(k) ∘ unit = k", (n, m, tuple(Tm[i] for i in k))):
                        return report
    for p in range(N + 1):
        for n in range(N + 1):
            l_idx, el = P.ext_array(p, n)
            for m in range(N + 1):
                k_idx, ek = P.ext_array(n, m)
                if len(k_idx) == 0 or len(l_idx) == 0:
                    continue
                # ext(ext(k) ∘ l) versus ext(k) ∘ ext(l), for every k and l at once
                composite = ek[:, l_idx]                      # (K, L, p): ext(k) ∘ l
                right = ek[:, el]                              # (K, L, |T_p|)
                lookup = _row_lookup(P, p, m)
                left = lookup(composite)                       # (K, L, |T_p|)
                bad = np.argwhere(np.any(left != right, axis=2))
                for ki, li in bad:
                    Tm, Tn = P.points(m), P.points(n)
                    witness = (p, n, m, tuple(Tm[i] for i in k_idx[ki]), tuple(Tn[i] for i in l_idx[li]))
                    if fail("ext(ext(k) ∘ l) = ext(k) ∘ ext(l)", witness):
                        return report
    return report


def _row_lookup(P: MonadPresentation, n: int, m: int) -> Callable[[np.ndarray], np.ndarray]:
    """Vectorized ``k ↦ ext(k)`` for index rows ``k`` of shape ``(..., n)``."""
    k_idx, e_idx = P.ext_array(n, m)
    size = len(P.carriers[m])
    weights = size ** np.arange(n - 1, -1, -1, dtype=np.int64)

    def lookup(rows: np.ndarray) -> np.ndarray:
        flat = (rows * weights).sum(axis=-1) if n else np.zeros(rows.shape[:-1], dtype=np.int64)
        return e_idx[flat]

    return lookup


def require_laws(P: MonadPresentation) -> None:
    report = check_kleisli_laws(P, stop_early=True)
    if not report.ok:
        raise report.failures[0]


# ---------------------------------------------------------------------------
# generated varieties


@dataclass(frozen=True)
class GeneratedVariety:
    sig: Signature
    eqs: tuple
    mode: str


def presentation_signature(P: MonadPresentation) -> Signature:
    return Signature(tuple((symbol_name(p, n), n) for n in range(P.arity + 1) for p in P.points(n)))


def _equation(mode: str, left, right):
    return QuantEq(left, right, 0) if mode == MET else ContEq(left, right)


def _variety_eqs(P: MonadPresentation, first_clause: list) -> GeneratedVariety:
    eqs = list(first_clause)
    N = P.arity
    for n in range(N + 1):
        for m in range(N + 1):
            xs = var_pool(m)
            for k in P.kleisli_maps(n, m):
                ext_k = P.ext(n, m, k)
                inner = tuple(App(symbol_name(q, m), xs) for q in k)
                for sigma, image in zip(P.points(n), ext_k):
                    eqs.append(_equation(P.mode, App(symbol_name(image, m), xs),
                                         App(symbol_name(sigma, n), inner)))
    for n in range(N + 1):
        xs = var_pool(n)
        for i, u in enumerate(P.units[n]):
            eqs.append(_equation(P.mode, App(symbol_name(u, n), xs), xs[i]))
    return GeneratedVariety(presentation_signature(P), tuple(eqs), P.mode)


def generate_variety_met(P: MonadPresentation) -> GeneratedVariety:
    """Equations of the variety presented by ``P`` in the metric reading.

    (1) ``σ(x⃗) =_ε σ'(x⃗)`` for each unordered pair at finite distance ``ε``;
    (2) ``ext(k)(σ)(x⃗) = σ(k(x_0)(x⃗), …)`` for every ``k`` and ``σ``;
    (3) ``η_n(x_i)(x⃗) = x_i``.
    """
    if P.mode != MET:
        raise ModeMismatch("metric equations need a metric presentation")
    first = []
    for n in range(P.arity + 1):
        xs = var_pool(n)
        for a, b, d in P.carriers[n].finite_pairs():
            first.append(QuantEq(App(symbol_name(a, n), xs), App(symbol_name(b, n), xs), d))
    return _variety_eqs(P, first)


def generate_variety_cpo(P: MonadPresentation) -> GeneratedVariety:
    """Equations of the variety presented by ``P`` in the poset reading.

    Item (1) becomes ``σ = ⋁[σ', σ]`` for each strictly comparable ``σ' ⊑ σ``:
    in a finite poset every ascending chain is eventually constant, so these
    two-step joins carry the whole content of the chain equations.
    """
    if P.mode != POS:
        raise ModeMismatch("continuous equations need a poset presentation")
    first = []
    for n in range(P.arity + 1):
        xs = var_pool(n)
        for lo, hi in P.carriers[n].strict_pairs():
            s_lo, s_hi = App(symbol_name(lo, n), xs), App(symbol_name(hi, n), xs)
            first.append(ContEq(s_hi, Join(EventuallyConstant((s_lo, s_hi)))))
    return _variety_eqs(P, first)


def generate_variety(P: MonadPresentation) -> GeneratedVariety:
    return generate_variety_met(P) if P.mode == MET else generate_variety_cpo(P)


# ---------------------------------------------------------------------------
# fast membership for generated varieties


def _op_arrays(P: MonadPresentation, A: Algebra) -> list[np.ndarray]:
    """Per arity ``n``, an array ``(|T_n|, |A|^n)`` of operation values as indices."""
    index = A.carrier.index
    out = []
    for n in range(P.arity + 1):
        rows = [[index[v] for v in A.table[symbol_name(s, n)]] for s in P.points(n)]
        out.append(np.array(rows, dtype=np.int64).reshape(len(rows), len(A) ** n))
    return out


def _projections(c: int, n: int) -> np.ndarray:
    """``proj[i, a] = a_i`` for argument tuples ``a`` in lexicographic order."""
    if n == 0:
        return np.zeros((0, 1), dtype=np.int64)
    grid = np.indices((c,) * n).reshape(n, -1)
    return grid.astype(np.int64)


@dataclass(frozen=True)
class MembershipFailure:
    clause: str
    detail: tuple

    def __str__(self) -> str:
        return f"clause {self.clause} fails at {self.detail}"


def variety_failure(P: MonadPresentation, A: Algebra, check_structure: bool = True) -> MembershipFailure | None:
    """First violated clause of the generated variety, or ``None`` for members.

    Evaluates every instance of clauses (1)–(3) on whole arrays of
    interpretations; agrees with checking the generated equation list one by
    one, which the tests confirm.
    """
    if A.sig != presentation_signature(P):
        raise ValueError("algebra signature does not match the presentation")
    c = len(A)
    ops = _op_arrays(P, A)
    N = P.arity
    for n in range(N + 1):
        proj = _projections(c, n)
        Tn = P.carriers[n]
        for i, u in enumerate(P.units[n]):
            bad = np.nonzero(ops[n][Tn.index[u]] != proj[i])[0]
            if len(bad):
                return MembershipFailure("3", (symbol_name(u, n), int(bad[0])))
    for n in range(N + 1):
        Tn = P.carriers[n]
        if P.mode == MET:
            D = A.carrier.dist
            for a, b, d in Tn.finite_pairs():
                ra, rb = ops[n][Tn.index[a]], ops[n][Tn.index[b]]
                for col in range(len(ra)):
                    if D[ra[col]][rb[col]] > d:
                        return MembershipFailure("1", (symbol_name(a, n), symbol_name(b, n), col))
        else:
            L = np.array(A.carrier.leq_table, dtype=bool)
            for lo, hi in Tn.strict_pairs():
                ok = L[ops[n][Tn.index[lo]], ops[n][Tn.index[hi]]]
                if not ok.all():
                    return MembershipFailure("1", (symbol_name(lo, n), symbol_name(hi, n),
                                                   int(np.argmin(ok))))
    for n in range(N + 1):
        if len(P.carriers[n]) == 0:
            continue
        weights = c ** np.arange(n - 1, -1, -1, dtype=np.int64)
        for m in range(N + 1):
            k_idx, e_idx = P.ext_array(n, m)
            if len(k_idx) == 0:
                continue
            inner = ops[m][k_idx]                                  # (K, n, c^m)
            flat = np.einsum("kic,i->kc", inner, weights) if n else np.zeros(
                (len(k_idx), c ** m), dtype=np.int64)
            right = ops[n][:, flat]                                # (|T_n|, K, c^m)
            left = ops[m][e_idx].transpose(1, 0, 2)                # (|T_n|, K, c^m)
            diff = np.argwhere(left != right)
            if len(diff):
                s, kk, col = diff[0]
                k = tuple(P.points(m)[i] for i in k_idx[kk])
                return MembershipFailure("2", (P.points(n)[s], n, m, k, int(col)))
    if check_structure:
        violations = algebra_violations(A)
        if violations:
            return MembershipFailure("structure", (violations[0].symbol, violations[0].witness))
    return None


def is_member(P: MonadPresentation, A: Algebra) -> bool:
    return variety_failure(P, A) is None


# ---------------------------------------------------------------------------
# Eilenberg–Moore algebras on discrete carriers


@dataclass(frozen=True)
class EMAlgebraDesc:
    """``α : T_j → V_j`` given as labels ``x0..x{j-1}`` aligned with ``T_j``."""

    j: int
    alpha: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "alpha", tuple(self.alpha))


def discrete_carrier(mode: str, labels: Sequence[str]) -> Carrier:
    return discrete_space(labels) if mode == MET else discrete_poset(labels)


def check_em_algebra(P: MonadPresentation, a: EMAlgebraDesc) -> tuple[bool, tuple | None]:
    """Unit law, multiplication law (through ``T_{|T_j|}``), and structure of ``α``."""
    j = a.j
    if j > P.arity:
        raise ArityBudgetExceeded(f"carrier V_{j} exceeds arity bound {P.arity}")
    Tj = P.carriers[j]
    t = len(Tj)
    if t > P.arity:
        raise ArityBudgetExceeded(f"the multiplication law needs T_{t}, beyond arity bound {P.arity}")
    Vj = var_labels(j)
    if len(a.alpha) != t or any(v not in Vj for v in a.alpha):
        return False, ("table", a.alpha)
    alpha = dict(zip(Tj.points, a.alpha))
    for i, x in enumerate(Vj):
        if alpha[P.units[j][i]] != x:
            return False, ("unit", x)
    V = discrete_carrier(P.mode, Vj)
    if P.mode == MET:
        ok, w = check_nonexpanding(MetricMap(Tj, V, a.alpha))
    else:
        ok, w = check_monotone(MonotoneMap(Tj, V, a.alpha))
    if not ok:
        return False, ("structure", w)
    iota = Tj.points                      # x_i ↦ i-th point of T_j
    eta_alpha = tuple(P.units[j][Vj.index(alpha[s])] for s in iota)
    left = P.ext(t, j, iota)
    right = P.ext(t, j, eta_alpha)
    for s, l, r in zip(P.points(t), left, right):
        if alpha[l] != alpha[r]:
            return False, ("multiplication", s)
    return True, None


def translate_alpha(P: MonadPresentation, carrier: Carrier, alpha: Sequence[str]) -> Algebra:
    """Operations ``σ_A(a) = α(ext(â)(σ))`` where ``â(x_i) = η_c(x_{pos(a_i)})``.

    ``alpha`` is aligned with ``T_c`` for ``c = |carrier|`` and the carrier's
    ``i``-th point plays the role of ``x_i``.
    """
    c = len(carrier)
    if c > P.arity:
        raise ArityBudgetExceeded(f"carrier of size {c} exceeds arity bound {P.arity}")
    Tc = P.carriers[c]
    alpha_of = dict(zip(Tc.points, alpha))
    units = P.units[c]
    ops = {}
    for n in range(P.arity + 1):
        tables = {s: [] for s in P.points(n)}
        for args in itertools.product(range(c), repeat=n):
            lifted = P.ext(n, c, tuple(units[i] for i in args))
            for s, image in zip(P.points(n), lifted):
                tables[s].append(alpha_of[image])
        for s, table in tables.items():
            ops[symbol_name(s, n)] = tuple(table)
    return make_algebra(presentation_signature(P), carrier, ops)


def em_to_variety_algebra(P: MonadPresentation, a: EMAlgebraDesc) -> Algebra:
    ok, witness = check_em_algebra(P, a)
    if not ok:
        raise NotAnEMAlgebra(f"not an Eilenberg–Moore algebra: {witness}")
    return translate_alpha(P, discrete_carrier(P.mode, var_labels(a.j)), a.alpha)


def alpha_of_algebra(P: MonadPresentation, A: Algebra) -> tuple[str, ...]:
    """Read off ``α(τ) = τ_A(x_0, …, x_{c-1})`` on ``T_c``."""
    c = len(A)
    pts = A.carrier.points
    return tuple(A.apply(symbol_name(s, c), pts) for s in P.points(c))


def enumerate_em_algebras(P: MonadPresentation, j: int) -> list[EMAlgebraDesc]:
    Tj = P.points(j)
    out = []
    bounds.check(j ** len(Tj), bounds.MAPS, "EM algebra enumeration")
    for alpha in itertools.product(var_labels(j), repeat=len(Tj)):
        desc = EMAlgebraDesc(j, alpha)
        if check_em_algebra(P, desc)[0]:
            out.append(desc)
    return out


def enumerate_variety_alpha(P: MonadPresentation, carrier: Carrier) -> list[Algebra]:
    """Variety members on ``carrier`` via their reading ``α`` on ``T_c``.

    Every member arises as ``translate_alpha`` of its own ``α`` (clauses (2)
    and (3) at the identity interpretation force this), so ranging over all
    maps ``α`` fixing the unit points and filtering by membership is complete.
    """
    c = len(carrier)
    if c > P.arity:
        raise ArityBudgetExceeded(f"carrier of size {c} exceeds arity bound {P.arity}")
    Tc = P.points(c)
    fixed = {u: carrier.points[i] for i, u in enumerate(P.units[c])}
    free = [s for s in Tc if s not in fixed]
    bounds.check(c ** len(free), bounds.MAPS, "variety enumeration")
    out = []
    for values in itertools.product(carrier.points, repeat=len(free)):
        chosen = dict(fixed)
        chosen.update(zip(free, values))
        A = translate_alpha(P, carrier, tuple(chosen[s] for s in Tc))
        if is_member(P, A):
            out.append(A)
    return out


def enumerate_variety_tables(P: MonadPresentation, variety: GeneratedVariety, carrier: Carrier) -> list[Algebra]:
    """Variety members on ``carrier`` by search over low-arity tables.

    Tables of arity ``≤ c`` are chosen symbol by symbol; after each choice,
    every generated equation mentioning only chosen symbols is checked on all
    interpretations.  Higher arities are then determined by clause (2) with
    ``m = c`` at the identity interpretation, and the completed algebra is
    checked against the whole variety.
    """
    c = len(carrier)
    pts = carrier.points
    low = [(name, n) for name, n in variety.sig.symbols if n <= c]
    position = {name: i for i, (name, _) in enumerate(low)}
    buckets: list[list] = [[] for _ in low]
    for e in variety.eqs:
        names = _symbols(e.left) | _symbols(e.right)
        if all(name in position for name in names) and names:
            buckets[max(position[name] for name in names)].append(e)
    index = {p: i for i, p in enumerate(pts)}
    results: list[Algebra] = []
    tables: dict[str, tuple[str, ...]] = {}

    def value(t, env):
        if isinstance(t, Var):
            return env[t.name]
        if isinstance(t, Join):
            # only item (1) of the poset reading: σ = ⋁[σ', σ] holds iff σ' ⊑ σ
            lo, hi = (value(s, env) for s in t.family.items)
            return hi if carrier.leq(lo, hi) else None
        args = [value(a, env) for a in t.args]
        if any(a is None for a in args):
            return None
        i = 0
        for a in args:
            i = i * c + index[a]
        return tables[t.op][i]

    def holds(e) -> bool:
        names = sorted(set(_vars(e.left)) | set(_vars(e.right)))
        for vals in itertools.product(pts, repeat=len(names)):
            env = dict(zip(names, vals))
            l, r = value(e.left, env), value(e.right, env)
            if l is None or r is None:
                return False
            if isinstance(e, QuantEq):
                if carrier.d(l, r) > e.eps:
                    return False
            elif l != r:
                return False
        return True

    def extend(i: int):
        if i == len(low):
            results.append(_complete(P, carrier, tables))
            return
        name, n = low[i]
        for table in itertools.product(pts, repeat=c ** n):
            tables[name] = table
            if all(holds(e) for e in buckets[i]):
                extend(i + 1)
        del tables[name]

    extend(0)
    return [A for A in results if A is not None and is_member(P, A)]


def _complete(P: MonadPresentation, carrier: Carrier, low_tables: Mapping[str, tuple[str, ...]]):
    c = len(carrier)
    alpha = tuple(low_tables[symbol_name(s, c)][_identity_column(c)] for s in P.points(c))
    A = translate_alpha(P, carrier, alpha)
    for name, table in low_tables.items():
        if A.table[name] != table:
            return None
    return A


def _identity_column(c: int) -> int:
    i = 0
    for a in range(c):
        i = i * c + a
    return i


def _symbols(t) -> set[str]:
    if isinstance(t, Var):
        return set()
    if isinstance(t, Join):
        return set().union(*(_symbols(s) for s in t.family.items))
    return {t.op}.union(*(_symbols(a) for a in t.args))


def _vars(t) -> set[str]:
    if isinstance(t, Var):
        return {t.name}
    if isinstance(t, Join):
        return set().union(*(_vars(s) for s in t.family.items))
    return set().union(*(_vars(a) for a in t.args))


# ---------------------------------------------------------------------------
# freeness


@dataclass
class FreenessReport:
    checked: int = 0
    failures: list[FreenessFailure] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def __bool__(self) -> bool:
        return self.ok


def _hom_on_symbols(P: MonadPresentation, n: int, A: Algebra, ops, g: np.ndarray) -> bool:
    """Whether ``g : T_n → A`` (index array) commutes with every ``τ ∈ T_m``,
    where ``τ`` acts on ``T_n`` by ``(s_i) ↦ ext(s)(τ)``."""
    c = len(A)
    for m in range(P.arity + 1):
        s_idx, e_idx = P.ext_array(m, n)
        if len(s_idx) == 0 or len(P.carriers[m]) == 0:
            continue
        left = g[e_idx]                                          # (K, |T_m|)
        weights = c ** np.arange(m - 1, -1, -1, dtype=np.int64)
        flat = (g[s_idx] * weights).sum(axis=1) if m else np.zeros(len(s_idx), dtype=np.int64)
        right = ops[m][:, flat].T                                # (K, |T_m|)
        if not np.array_equal(left, right):
            return False
    return True


def _structure_map_ok(P: MonadPresentation, n: int, A: Algebra, table: Sequence[str]) -> bool:
    if P.mode == MET:
        return check_nonexpanding(MetricMap(P.carriers[n], A.carrier, tuple(table)))[0]
    return check_monotone(MonotoneMap(P.carriers[n], A.carrier, tuple(table)))[0]


def check_freeness(P: MonadPresentation, n: int, targets: Sequence[Algebra],
                   variety: GeneratedVariety | None = None) -> FreenessReport:
    """For every target and every ``f : V_n → A``, the map
    ``f̄(σ) = σ_A(f(x_0), …, f(x_{n-1}))`` must be the unique structure
    preserving homomorphism ``T_n → A`` extending ``f`` along ``η_n``."""
    from .eqn import check_variety_membership

    if n > P.arity:
        raise ArityBudgetExceeded(f"arity {n} beyond bound {P.arity}")
    for t_index, A in enumerate(targets):
        if variety is not None:
            report = check_variety_membership(A, variety.eqs, stop_early=True)
            if not report:
                i, verdict = report.first_failure()
                raise NotAMember(t_index, {"equation": i, "interpretation": verdict.witness})
        failure = variety_failure(P, A)
        if failure is not None:
            raise NotAMember(t_index, str(failure))
    report = FreenessReport()
    Tn = P.carriers[n]
    unit_idx = [Tn.index[u] for u in P.units[n]]
    for t_index, A in enumerate(targets):
        ops = _op_arrays(P, A)
        c = len(A)
        pts = A.carrier.points
        free_positions = [i for i in range(len(Tn)) if i not in unit_idx]
        for f in itertools.product(range(c), repeat=n):
            report.checked += 1
            assignment = {f"x{i}": pts[v] for i, v in enumerate(f)}
            col = 0
            for v in f:
                col = col * c + v
            fbar = ops[n][:, col] if len(Tn) else np.zeros(0, dtype=np.int64)
            if not _hom_on_symbols(P, n, A, ops, fbar) or not _structure_map_ok(
                    P, n, A, [pts[v] for v in fbar]):
                report.failures.append(FreenessFailure(t_index, assignment, "NotHomomorphism"))
                continue
            if any(fbar[u] != f[i] for i, u in enumerate(unit_idx)):
                report.failures.append(FreenessFailure(t_index, assignment, "UnitMismatch"))
                continue
            count = 0
            g = np.zeros(len(Tn), dtype=np.int64)
            for i, u in enumerate(unit_idx):
                g[u] = f[i]
            bounds.check(c ** len(free_positions), bounds.MAPS, "uniqueness search")
            for values in itertools.product(range(c), repeat=len(free_positions)):
                g[free_positions] = values
                if _hom_on_symbols(P, n, A, ops, g) and _structure_map_ok(P, n, A, [pts[v] for v in g]):
                    count += 1
            if count != 1:
                report.failures.append(FreenessFailure(t_index, assignment, "NotUnique"))
    return report


# ---------------------------------------------------------------------------
# evaluation on non-discrete spaces


_VAR_TOKEN = re.compile(r"(?<![A-Za-z0-9])x(\d+)(?![0-9])")


def kan_evaluate(P: MonadPresentation, M: FinMetric, relabel: bool = True) -> FinMetric:
    """Value of the monad on ``M`` as a colimit over ``T_{|M|}``.

    For every finite positive distance ``ε`` of ``M`` let ``M_ε`` be the set
    of ordered pairs (diagonal included) at distance ``≤ ε``; each point of
    ``T_{|M_ε|}`` yields the constraint ``d(T π_0 s, T π_1 s) ≤ ε`` on
    ``T_{|M|}``.  Labels mention ``x_i`` for the ``i``-th point of ``M``;
    with ``relabel`` those tokens are replaced by the point names.
    """
    if P.mode != MET:
        raise ModeMismatch("evaluation on metric spaces needs a metric presentation")
    n = len(M)
    if n > P.arity:
        raise ArityBudgetExceeded(f"|M| = {n} exceeds arity bound {P.arity}")
    base = P.carriers[n]
    eta = P.units[n]
    constraints = []
    for eps in sorted({d for _, _, d in M.finite_pairs()}):
        pairs = [(i, j) for i in range(n) for j in range(n) if M.dist[i][j] <= eps]
        size = len(pairs)
        if size > P.arity:
            raise ArityBudgetExceeded(
                f"the pairs within distance {format_dist(eps)} need T_{size}, beyond arity bound {P.arity}")
        left = P.ext(size, n, tuple(eta[i] for i, _ in pairs))
        right = P.ext(size, n, tuple(eta[j] for _, j in pairs))
        for a, b in zip(left, right):
            if a != b:
                constraints.append((a, b, eps))
    space, _ = basic_weight_colimit(ConstraintSet(base, tuple(constraints)))
    if not relabel:
        return space
    names = {p: _VAR_TOKEN.sub(lambda mt: M.points[int(mt.group(1))], p) for p in space.points}
    if len(set(names.values())) != len(names):
        return space
    return space.relabel(names)


# ---------------------------------------------------------------------------
# small target carriers


def small_carriers(mode: str, max_size: int, values: Sequence[Fraction] = (Fraction(1, 2), Fraction(1))) -> list[Carrier]:
    """Carriers labelled ``x0, x1, …`` used as freeness targets.

    Metric mode: all metrics with distances drawn from ``values ∪ {INF}``;
    poset mode: one poset per isomorphism class.
    """
    from .poset import posets_up_to_iso
    out: list[Carrier] = []
    for size in range(1, max_size + 1):
        labels = var_labels(size)
        if mode == POS:
            for Q in posets_up_to_iso(size):
                out.append(FinPoset(labels, Q.leq_table))
            continue
        pairs = [(i, j) for i in range(size) for j in range(i + 1, size)]
        for choice in itertools.product(list(values) + [INF], repeat=len(pairs)):
            rows = [[ZERO if i == j else INF for j in range(size)] for i in range(size)]
            for (i, j), d in zip(pairs, choice):
                rows[i][j] = rows[j][i] = d
            try:
                out.append(FinMetric(labels, rows))
            except Exception:
                continue
    return out
