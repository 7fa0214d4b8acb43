"""Text format for workbench files, its serializer, and a JSON mirror.

    space M { points p q; d p q = 1/2; }
    poset P { points a b; a <= b; }
    signature S { mul(2); e(0); }
    algebra A over M { op mul(2) = table [p, q, q, p]; }
    eq comm: mul(x0, x1) == mul(x1, x0) within 1;
    ineq up: x0 <= mul(x0, x0);
    chain C met { stage { points a b; d a b = 1; } stage M; link [a -> p, b -> q]; tail stable; }
    pair Q { A poset { points u; } B P; f0 [u -> a]; f1 [u -> b]; }
    constraints K over M { d p q <= 1/4; }
    presentation T met arity 3 { ext = union; }

Declarations may appear in any order; names are unique per kind, with
spaces and posets sharing one namespace since both can serve as carriers.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable

from .alg import Algebra, make_algebra
from .bridge import MET, POS, RULES, MonadPresentation, builtin
from .colim import ConstraintSet, DeclaredLimits, OmegaChainMet, OmegaChainPos, ParallelPair, Stable
from .dist import INF, Dist, as_dist, format_dist
from .eqn import ContEq, QuantEq, inequation
from .errors import WorkbenchError
from .mspace import FinMetric, MetricMap
from .poset import FinPoset, MonotoneMap
from .term import App, EventuallyConstant, Generated, Join, Signature, Var, is_term, symbols_of


class DslError(WorkbenchError):
    kind = "error"

    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.message = message
        self.line = line
        self.col = col
        super().__init__(f"{line}:{col}: {self.kind}: {message}")


class DslSyntaxError(DslError):
    kind = "syntax error"


class UnresolvedName(DslError):
    kind = "unresolved name"


class DuplicateName(DslError):
    kind = "duplicate name"


class ArityMismatch(DslError):
    kind = "arity mismatch"


class InvalidDeclaration(DslError):
    kind = "invalid declaration"


class ParseFailure(WorkbenchError):
    """Every error found in a file, in source order."""

    def __init__(self, errors: list[DslError]):
        self.errors = errors
        super().__init__("\n".join(str(e) for e in errors))


KINDS = ("space", "poset", "signature", "algebra", "eq", "chain", "pair", "constraints", "presentation")


@dataclass
class WorkbenchFile:
    spaces: dict[str, FinMetric] = field(default_factory=dict)
    posets: dict[str, FinPoset] = field(default_factory=dict)
    signatures: dict[str, Signature] = field(default_factory=dict)
    algebras: dict[str, Algebra] = field(default_factory=dict)
    equations: dict[str, Any] = field(default_factory=dict)
    chains: dict[str, Any] = field(default_factory=dict)
    pairs: dict[str, ParallelPair] = field(default_factory=dict)
    constraints: dict[str, ConstraintSet] = field(default_factory=dict)
    presentations: dict[str, MonadPresentation] = field(default_factory=dict)
    rejected: dict[str, tuple[str, list]] = field(default_factory=dict)

    def table_for(self, kind: str) -> dict:
        return {"space": self.spaces, "poset": self.posets, "signature": self.signatures,
                "algebra": self.algebras, "eq": self.equations, "chain": self.chains,
                "pair": self.pairs, "constraints": self.constraints,
                "presentation": self.presentations}[kind]

    def lookup(self, kind: str, name: str):
        table = self.table_for(kind)
        if name not in table:
            raise UnresolvedName(f"no {kind} named {name!r}")
        return table[name]


# ---------------------------------------------------------------------------
# lexer

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r]+) | (?P<nl>\n) | (?P<comment>\#[^\n]*)
  | (?P<string>"(?:[^"\\\n]|\\.)*")
  | (?P<num>\d+(?:/\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_@]*(?:-[A-Za-z0-9_@]+)*)
  | (?P<punct>==|<=|->|[{}()\[\];,:=\-])
""", re.VERBOSE)

_BARE = re.compile(r"[A-Za-z_][A-Za-z0-9_@]*(?:-[A-Za-z0-9_@]+)*\Z|\d+\Z")
RESERVED = {"join", "from", "step", "within", "inf", "table", "points", "stage", "link", "tail"}


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(source: str) -> list[Token]:
    tokens = []
    line, line_start, pos = 1, 0, 0
    while pos < len(source):
        m = _TOKEN.match(source, pos)
        if m is None:
            raise DslSyntaxError(f"unexpected character {source[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind not in ("ws", "comment"):
            tokens.append(Token(kind, m.group(), line, pos - line_start + 1))
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


def quote(label: str) -> str:
    """A label as it must appear in source text."""
    if _BARE.match(label) and label not in RESERVED:
        return label
    return json.dumps(label, ensure_ascii=False)


# ---------------------------------------------------------------------------
# parser


class _Parser:
    def __init__(self, source: str):
        self.tokens = tokenize(source)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def error(self, message: str, tok: Token | None = None, cls=DslSyntaxError):
        tok = tok or self.tok
        return cls(message, tok.line, tok.col)

    def at(self, text: str) -> bool:
        t = self.tok
        return t.text == text and t.kind in ("punct", "ident")

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> Token:
        if not self.at(text):
            raise self.error(f"expected {text!r}, found {self.tok.text or 'end of input'!r}")
        t = self.tok
        self.i += 1
        return t

    def name(self) -> str:
        t = self.tok
        if t.kind == "ident" and t.text not in RESERVED:
            self.i += 1
            return t.text
        if t.kind == "string":
            self.i += 1
            return json.loads(t.text)
        raise self.error(f"expected a name, found {t.text or 'end of input'!r}")

    def label(self) -> str:
        t = self.tok
        if t.kind == "num" and "/" not in t.text:
            self.i += 1
            return t.text
        return self.name()

    def at_label(self) -> bool:
        t = self.tok
        return (t.kind == "ident" and t.text not in RESERVED) or t.kind == "string" or (
            t.kind == "num" and "/" not in t.text)

    def natural(self) -> int:
        t = self.tok
        if t.kind != "num" or "/" in t.text:
            raise self.error("expected a natural number")
        self.i += 1
        return int(t.text)

    def dist(self) -> Dist:
        t = self.tok
        if t.text == "-":
            raise self.error("negative distance")
        if t.kind == "ident" and t.text == "inf":
            self.i += 1
            return INF
        if t.kind != "num":
            raise self.error("expected a distance")
        if "/" in t.text and int(t.text.split("/")[1]) == 0:
            raise self.error("zero denominator", t)
        self.i += 1
        return Fraction(t.text)

    # -- bodies

    def label_list_until(self, stop: str) -> list[str]:
        out = []
        while not self.at(stop):
            out.append(self.label())
        return out

    def points_clause(self) -> list[str]:
        self.expect("points")
        pts = self.label_list_until(";")
        self.expect(";")
        return pts

    def space_body(self):
        start = self.expect("{")
        pts = self.points_clause()
        pairs = {}
        while not self.accept("}"):
            self.expect("d")
            x, y = self.label(), self.label()
            self.expect("=")
            pairs[(x, y)] = self.dist()
            self.expect(";")
        return self.build(start, lambda: FinMetric.from_pairs(pts, pairs))

    def poset_body(self):
        start = self.expect("{")
        pts = self.points_clause()
        pairs = []
        while not self.accept("}"):
            x = self.label()
            self.expect("<=")
            pairs.append((x, self.label()))
            self.expect(";")
        return self.build(start, lambda: FinPoset.from_pairs(pts, pairs, close=True))

    def build(self, tok: Token, make: Callable):
        try:
            return make()
        except DslError:
            raise
        except (WorkbenchError, ValueError, KeyError) as exc:
            err = self.error(str(exc), tok, InvalidDeclaration)
            err.violations = getattr(exc, "violations", [])
            raise err from None

    def carrier_ref(self, allowed=("space", "poset")):
        """Inline carrier, or a deferred reference resolved after parsing."""
        tok = self.tok
        if self.accept("space"):
            return self.space_body()
        if self.accept("poset"):
            return self.poset_body()
        return _Ref(self.name(), tok)

    def mapping(self) -> list[tuple[str, str]]:
        self.expect("[")
        out = []
        while not self.accept("]"):
            x = self.label()
            self.expect("->")
            out.append((x, self.label()))
            if not self.at("]"):
                self.expect(",")
        return out

    def bracket_labels(self) -> list[str]:
        self.expect("[")
        out = []
        while not self.accept("]"):
            out.append(self.label())
            if not self.at("]"):
                self.expect(",")
        return out

    # -- terms

    def ext_term(self):
        if self.accept("join"):
            if self.accept("from"):
                seed = self.term()
                self.expect("step")
                step = self.term()
                tok = self.tok
                return self.build(tok, lambda: Join(Generated(seed, step)))
            self.expect("[")
            items = []
            while not self.accept("]"):
                items.append(self.ext_term())
                if not self.at("]"):
                    self.expect(",")
            if not items:
                raise self.error("a join needs at least one term")
            return Join(EventuallyConstant(tuple(items)))
        return self.term()

    def term(self):
        if self.at("join"):
            raise self.error("joins may not appear inside operations or generated families")
        name = self.label()
        if self.accept("("):
            args = []
            while not self.accept(")"):
                args.append(self.term())
                if not self.at(")"):
                    self.expect(",")
            return App(name, tuple(args))
        return Var(name)


@dataclass(frozen=True)
class _Ref:
    name: str
    tok: Token


@dataclass
class _Decl:
    kind: str
    name: str
    tok: Token
    data: Any


@dataclass(frozen=True)
class _Rejected:
    violations: list


def _carrier_decl(p: _Parser, kind: str, lenient: bool) -> _Decl:
    tok = p.tokens[p.i - 1]
    name = p.name()
    body_start = p.i
    try:
        return _Decl(kind, name, tok, p.space_body() if kind == "space" else p.poset_body())
    except InvalidDeclaration as exc:
        if not lenient or not getattr(exc, "violations", None):
            raise
        # skip to the end of the body so parsing can go on
        depth, p.i = 0, body_start
        while True:
            if p.accept("{"):
                depth += 1
            elif p.accept("}"):
                depth -= 1
                if depth == 0:
                    break
            else:
                p.i += 1
        return _Decl(kind, name, tok, _Rejected(exc.violations))


def _parse_decl(p: _Parser, auto: list[int], lenient: bool = False) -> _Decl:
    tok = p.tok
    if p.accept("space"):
        return _carrier_decl(p, "space", lenient)
    if p.accept("poset"):
        return _carrier_decl(p, "poset", lenient)
    if p.accept("signature"):
        name = p.name()
        p.expect("{")
        symbols = []
        while not p.accept("}"):
            sym = p.label()
            p.expect("(")
            n = p.natural()
            p.expect(")")
            p.expect(";")
            symbols.append((sym, n))
        return _Decl("signature", name, tok, p.build(tok, lambda: Signature(tuple(symbols))))
    if p.accept("algebra"):
        name = p.name()
        p.expect("over")
        carrier = p.carrier_ref()
        p.expect("{")
        ops = []
        while not p.accept("}"):
            op_tok = p.expect("op")
            sym = p.label()
            p.expect("(")
            n = p.natural()
            p.expect(")")
            p.expect("=")
            p.expect("table")
            ops.append((sym, n, p.bracket_labels(), op_tok))
            p.expect(";")
        return _Decl("algebra", name, tok, (carrier, ops))
    if p.at("eq") or p.at("ineq"):
        kind = p.tok.text
        p.i += 1
        if p.tokens[p.i + 1].text == ":" and p.at_label():
            name = p.name()
            p.expect(":")
        else:
            auto[0] += 1
            name = f"e{auto[0]}"
        left = p.ext_term()
        if kind == "ineq":
            p.expect("<=")
            value = inequation(left, p.ext_term())
        else:
            p.expect("==")
            right = p.ext_term()
            if p.accept("within"):
                eps_tok = p.tok
                eps = p.dist()
                if eps is INF:
                    raise p.error("the bound of an equation must be finite", eps_tok)
                if not (is_term(left) and is_term(right)):
                    raise p.error("quantitative equations relate plain terms", eps_tok)
                value = QuantEq(left, right, eps)
            else:
                value = ContEq(left, right)
        p.expect(";")
        return _Decl("eq", name, tok, value)
    if p.accept("chain"):
        name = p.name()
        if p.accept("met"):
            mode = MET
        elif p.accept("pos"):
            mode = POS
        else:
            raise p.error("expected 'met' or 'pos'")
        p.expect("{")
        stages, links, tail = [], [], ("stable", None)
        while not p.accept("}"):
            if p.accept("stage"):
                if p.at("{"):
                    stages.append(p.space_body() if mode == MET else p.poset_body())
                else:
                    stages.append(_Ref(p.name(), p.tokens[p.i - 1]))
                    p.expect(";")
            elif p.accept("link"):
                links.append(p.mapping())
                p.expect(";")
            elif p.accept("tail"):
                if p.accept("stable"):
                    tail = ("stable", None)
                    p.expect(";")
                elif p.accept("limits"):
                    p.expect("{")
                    entries = {}
                    while not p.accept("}"):
                        p.expect("d")
                        x, y = p.label(), p.label()
                        p.expect("=")
                        entries[(x, y)] = p.dist()
                        p.expect(";")
                    tail = ("limits", entries)
                else:
                    raise p.error("expected 'stable' or 'limits'")
            else:
                raise p.error("expected 'stage', 'link' or 'tail'")
        return _Decl("chain", name, tok, (mode, stages, links, tail))
    if p.accept("pair"):
        name = p.name()
        p.expect("{")
        parts: dict[str, Any] = {}
        while not p.accept("}"):
            part_tok = p.tok
            key = p.name()
            if key in ("A", "B"):
                if p.accept("poset"):
                    parts[key] = p.poset_body()
                else:
                    parts[key] = _Ref(p.name(), p.tokens[p.i - 1])
                    p.expect(";")
            elif key in ("f0", "f1"):
                parts[key] = p.mapping()
                p.expect(";")
            else:
                raise p.error("expected A, B, f0 or f1", part_tok)
        missing = [k for k in ("A", "B", "f0", "f1") if k not in parts]
        if missing:
            raise p.error(f"pair {name!r} lacks {missing}", tok)
        return _Decl("pair", name, tok, parts)
    if p.accept("constraints"):
        name = p.name()
        p.expect("over")
        if p.accept("space"):
            base = p.space_body()
        else:
            base = _Ref(p.name(), p.tokens[p.i - 1])
        p.expect("{")
        entries = []
        while not p.accept("}"):
            p.expect("d")
            x, y = p.label(), p.label()
            p.expect("<=")
            entries.append((x, y, p.dist()))
            p.expect(";")
        return _Decl("constraints", name, tok, (base, entries))
    if p.accept("presentation"):
        name = p.name()
        if p.accept("met"):
            mode = MET
        elif p.accept("pos"):
            mode = POS
        else:
            raise p.error("expected 'met' or 'pos'")
        p.expect("arity")
        N = p.natural()
        p.expect("{")
        if p.accept("ext"):
            p.expect("=")
            rule_tok = p.tok
            rule = p.name()
            if rule not in RULES:
                raise p.error(f"unknown extension rule {rule!r}", rule_tok, UnresolvedName)
            p.expect(";")
            p.expect("}")
            return _Decl("presentation", name, tok, p.build(tok, lambda: builtin(rule, N, mode)))
        carriers: dict[int, Any] = {}
        units: dict[int, list[str]] = {}
        tables: dict = {}
        while not p.accept("}"):
            if p.accept("carrier"):
                n = p.natural()
                carriers[n] = p.space_body() if mode == MET else p.poset_body()
            elif p.accept("unit"):
                n = p.natural()
                units[n] = p.bracket_labels()
                p.expect(";")
            elif p.accept("ext"):
                n = p.natural()
                p.expect("->")
                m = p.natural()
                k = tuple(p.bracket_labels())
                p.expect("=")
                tables[(n, m, k)] = tuple(p.bracket_labels())
                p.expect(";")
            else:
                raise p.error("expected 'carrier', 'unit' or 'ext'")

        def make():
            return MonadPresentation(mode, N, tuple(carriers[n] for n in range(N + 1)),
                                     tuple(units.get(n, ()) for n in range(N + 1)), tables=tables)

        return _Decl("presentation", name, tok, p.build(tok, make))
    raise p.error(f"expected a declaration, found {p.tok.text or 'end of input'!r}")


def parse(source: str, lenient: bool = False) -> WorkbenchFile:
    """Parse and resolve a workbench file; raises :class:`ParseFailure`.

    With ``lenient``, spaces and posets that fail their axioms are recorded
    in ``rejected`` (with every violation) instead of aborting the parse.
    """
    decls: list[_Decl] = []
    errors: list[DslError] = []
    auto = [0]
    try:
        p = _Parser(source)
        while p.tok.kind != "eof":
            decls.append(_parse_decl(p, auto, lenient))
    except DslError as exc:
        raise ParseFailure([exc]) from None
    out = WorkbenchFile()
    carriers: dict[str, Any] = {}
    seen: dict[tuple[str, str], Token] = {}
    for d in decls:
        kind = "carrier" if d.kind in ("space", "poset") else d.kind
        if (kind, d.name) in seen:
            errors.append(DuplicateName(f"{d.kind} {d.name!r} already declared", d.tok.line, d.tok.col))
            continue
        seen[(kind, d.name)] = d.tok
        if isinstance(d.data, _Rejected):
            out.rejected[d.name] = (d.kind, d.data.violations)
        elif d.kind in ("space", "poset"):
            carriers[d.name] = d.data
            out.table_for(d.kind)[d.name] = d.data
        elif d.kind in ("signature", "presentation", "eq"):
            out.table_for(d.kind)[d.name] = d.data

    arities: dict[str, tuple[int, Token]] = {}

    def note_arity(sym: str, n: int, tok: Token):
        if sym in arities and arities[sym][0] != n:
            errors.append(ArityMismatch(f"symbol {sym!r} used with arity {n} and {arities[sym][0]}",
                                        tok.line, tok.col))
        else:
            arities.setdefault(sym, (n, tok))

    def resolve(x, want=None):
        if isinstance(x, _Ref):
            if x.name not in carriers:
                raise UnresolvedName(f"no space or poset named {x.name!r}", x.tok.line, x.tok.col)
            value = carriers[x.name]
        else:
            value = x
        if want is not None and not isinstance(value, want):
            tok = x.tok if isinstance(x, _Ref) else Token("", "", 0, 0)
            raise InvalidDeclaration(f"expected a {want.__name__}", tok.line, tok.col)
        return value

    for d in decls:
        if d.kind == "signature":
            for sym, n in d.data.symbols:
                note_arity(sym, n, d.tok)
    for d in decls:
        if seen.get(("carrier" if d.kind in ("space", "poset") else d.kind, d.name)) is not d.tok:
            continue
        try:
            if d.kind == "algebra":
                carrier_src, ops = d.data
                carrier = resolve(carrier_src)
                for sym, n, table, tok in ops:
                    note_arity(sym, n, tok)
                    if len(table) != len(carrier) ** n:
                        raise ArityMismatch(f"table for {sym!r} has {len(table)} entries, expected "
                                            f"{len(carrier) ** n}", tok.line, tok.col)
                sig = Signature(tuple((sym, n) for sym, n, _, _ in ops))
                out.algebras[d.name] = _guard(d.tok, lambda: make_algebra(
                    sig, carrier, {sym: tuple(table) for sym, _, table, _ in ops}))
            elif d.kind == "eq":
                for side in (d.data.left, d.data.right):
                    for sym, n in symbols_of(side):
                        note_arity(sym, n, d.tok)
            elif d.kind == "chain":
                mode, stage_src, link_src, tail = d.data
                want = FinMetric if mode == MET else FinPoset
                stages = [resolve(s, want) for s in stage_src]
                out.chains[d.name] = _guard(d.tok, lambda: _build_chain(mode, stages, link_src, tail))
            elif d.kind == "pair":
                A = resolve(d.data["A"], FinPoset)
                B = resolve(d.data["B"], FinPoset)
                out.pairs[d.name] = _guard(d.tok, lambda: ParallelPair(
                    A, B, MonotoneMap(A, B, _total(A, d.data["f0"])), MonotoneMap(A, B, _total(A, d.data["f1"]))))
            elif d.kind == "constraints":
                base_src, entries = d.data
                base = resolve(base_src, FinMetric)
                out.constraints[d.name] = _guard(d.tok, lambda: ConstraintSet(base, tuple(entries)))
        except DslError as exc:
            errors.append(exc)
    if errors:
        errors.sort(key=lambda e: (e.line, e.col))
        raise ParseFailure(errors)
    return out


def _guard(tok: Token, make: Callable):
    try:
        return make()
    except DslError:
        raise
    except (WorkbenchError, ValueError, KeyError) as exc:
        raise InvalidDeclaration(str(exc), tok.line, tok.col) from None


def _total(domain, pairs) -> dict[str, str]:
    table = dict(pairs)
    missing = [x for x in domain.points if x not in table]
    if missing or len(table) != len(pairs):
        raise ValueError(f"map must list each domain point once (missing {missing})")
    return table


def _build_chain(mode, stages, link_src, tail):
    if len(link_src) != len(stages) - 1:
        raise ValueError(f"{len(stages)} stages need {len(stages) - 1} links, got {len(link_src)}")
    if mode == MET:
        links = [MetricMap(stages[i], stages[i + 1], _total(stages[i], pairs)) for i, pairs in enumerate(link_src)]
        if tail[0] == "stable":
            return OmegaChainMet(tuple(stages), tuple(links), Stable())
        return OmegaChainMet(tuple(stages), tuple(links), DeclaredLimits(tail[1]))
    if tail[0] != "stable":
        raise ValueError("poset chains only take a stable tail")
    links = [MonotoneMap(stages[i], stages[i + 1], _total(stages[i], pairs)) for i, pairs in enumerate(link_src)]
    return OmegaChainPos(tuple(stages), tuple(links), Stable())


# ---------------------------------------------------------------------------
# serializer


def _labels(pts) -> str:
    return " ".join(quote(p) for p in pts)


def space_body(M: FinMetric) -> str:
    lines = [f"points {_labels(M.points)};".replace("points ;", "points;")]
    for x, y, d in M.finite_pairs():
        lines.append(f"d {quote(x)} {quote(y)} = {format_dist(d)};")
    return "{ " + " ".join(lines) + " }"


def poset_body(P: FinPoset) -> str:
    lines = [f"points {_labels(P.points)};".replace("points ;", "points;")]
    for x, y in P.strict_pairs():
        lines.append(f"{quote(x)} <= {quote(y)};")
    return "{ " + " ".join(lines) + " }"


def carrier_text(C) -> str:
    return ("space " + space_body(C)) if isinstance(C, FinMetric) else ("poset " + poset_body(C))


def term_text(t) -> str:
    if isinstance(t, Var):
        return quote(t.name)
    if isinstance(t, App):
        return f"{quote(t.op)}(" + ", ".join(term_text(a) for a in t.args) + ")"
    fam = t.family
    if isinstance(fam, EventuallyConstant):
        return "join [" + ", ".join(term_text(s) for s in fam.items) + "]"
    return f"join from {term_text(fam.seed)} step {term_text(fam.step)}"


def _mapping_text(f) -> str:
    return "[" + ", ".join(f"{quote(x)} -> {quote(y)}" for x, y in zip(f.domain.points, f.table)) + "]"


def serialize_decl(kind: str, name: str, value) -> str:
    n = quote(name)
    if kind == "space":
        return f"space {n} {space_body(value)}"
    if kind == "poset":
        return f"poset {n} {poset_body(value)}"
    if kind == "signature":
        body = " ".join(f"{quote(s)}({a});" for s, a in value.symbols)
        return f"signature {n} {{ {body} }}"
    if kind == "algebra":
        ops = " ".join(f"op {quote(s)}({a}) = table [{', '.join(quote(v) for v in value.table[s])}];"
                       for s, a in value.sig.symbols)
        return f"algebra {n} over {carrier_text(value.carrier)} {{ {ops} }}"
    if kind == "eq":
        if isinstance(value, QuantEq):
            return (f"eq {n}: {term_text(value.left)} == {term_text(value.right)} "
                    f"within {format_dist(value.eps)};")
        return f"eq {n}: {term_text(value.left)} == {term_text(value.right)};"
    if kind == "chain":
        mode = "met" if isinstance(value, OmegaChainMet) else "pos"
        body = " ".join("stage " + (space_body(S) if mode == "met" else poset_body(S)) for S in value.stages)
        links = " ".join(f"link {_mapping_text(f)};" for f in value.links)
        if isinstance(value.tail, DeclaredLimits):
            last = value.stages[-1]
            entries = " ".join(f"d {quote(last.points[i])} {quote(last.points[j])} = "
                               f"{format_dist(value.tail.table[i][j])};"
                               for i in range(len(last)) for j in range(i + 1, len(last)))
            tail = f"tail limits {{ {entries} }}"
        else:
            tail = "tail stable;"
        return f"chain {n} {mode} {{ {' '.join(x for x in (body, links, tail) if x)} }}"
    if kind == "pair":
        return (f"pair {n} {{ A poset {poset_body(value.A)} B poset {poset_body(value.B)} "
                f"f0 {_mapping_text(value.f0)}; f1 {_mapping_text(value.f1)}; }}")
    if kind == "constraints":
        entries = " ".join(f"d {quote(x)} {quote(y)} <= {format_dist(e)};" for x, y, e in value.constraints)
        return f"constraints {n} over space {space_body(value.base)} {{ {entries} }}"
    if kind == "presentation":
        head = f"presentation {n} {value.mode} arity {value.arity}"
        if value.rule is not None:
            return f"{head} {{ ext = {value.rule}; }}"
        parts = []
        for i, C in enumerate(value.carriers):
            parts.append(f"carrier {i} " + (space_body(C) if value.mode == MET else poset_body(C)))
        for i, u in enumerate(value.units):
            parts.append(f"unit {i} [{', '.join(quote(x) for x in u)}];")
        for (a, b, k), table in value.tables.items():
            parts.append(f"ext {a} -> {b} [{', '.join(quote(x) for x in k)}] = "
                         f"[{', '.join(quote(x) for x in table)}];")
        return f"{head} {{ {' '.join(parts)} }}"
    raise ValueError(f"unknown declaration kind {kind!r}")


def serialize(wf: WorkbenchFile) -> str:
    lines = []
    for kind in KINDS:
        for name, value in wf.table_for(kind).items():
            lines.append(serialize_decl(kind, name, value))
    return "\n".join(lines) + ("\n" if lines else "")


def variety_text(variety, header: str = "") -> str:
    """A generated variety as a signature declaration plus its equations."""
    lines = [f"# {header}"] if header else []
    lines.append(serialize_decl("signature", "generated", variety.sig))
    for i, e in enumerate(variety.eqs):
        lines.append(serialize_decl("eq", f"g{i}", e))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# JSON mirror


def _d(x: Dist) -> str:
    return format_dist(x)


def to_json_value(kind: str, value) -> dict:
    if kind == "space":
        return {"points": list(value.points),
                "distances": [[x, y, _d(d)] for x, y, d in value.finite_pairs()]}
    if kind == "poset":
        return {"points": list(value.points), "order": [[x, y] for x, y in value.strict_pairs()]}
    if kind == "signature":
        return {"symbols": [[s, a] for s, a in value.symbols]}
    if kind == "algebra":
        carrier_kind = "space" if isinstance(value.carrier, FinMetric) else "poset"
        return {"carrier": {carrier_kind: to_json_value(carrier_kind, value.carrier)},
                "ops": [[s, a, list(value.table[s])] for s, a in value.sig.symbols]}
    if kind == "eq":
        out = {"left": term_text(value.left), "right": term_text(value.right)}
        if isinstance(value, QuantEq):
            out["within"] = _d(value.eps)
        return out
    if kind == "chain":
        mode = "met" if isinstance(value, OmegaChainMet) else "pos"
        sk = "space" if mode == "met" else "poset"
        out = {"mode": mode, "stages": [to_json_value(sk, S) for S in value.stages],
               "links": [list(f.table) for f in value.links]}
        if isinstance(value.tail, DeclaredLimits):
            out["tail"] = {"limits": [[_d(v) for v in row] for row in value.tail.table]}
        else:
            out["tail"] = "stable"
        return out
    if kind == "pair":
        return {"A": to_json_value("poset", value.A), "B": to_json_value("poset", value.B),
                "f0": list(value.f0.table), "f1": list(value.f1.table)}
    if kind == "constraints":
        return {"base": to_json_value("space", value.base),
                "constraints": [[x, y, _d(e)] for x, y, e in value.constraints]}
    if kind == "presentation":
        out = {"mode": value.mode, "arity": value.arity}
        if value.rule is not None:
            out["ext"] = value.rule
            return out
        sk = "space" if value.mode == MET else "poset"
        out["carriers"] = [to_json_value(sk, C) for C in value.carriers]
        out["units"] = [list(u) for u in value.units]
        out["tables"] = [[a, b, list(k), list(t)] for (a, b, k), t in value.tables.items()]
        return out
    raise ValueError(f"unknown declaration kind {kind!r}")


def parse_term(text: str, ext: bool = True):
    p = _Parser(text)
    t = p.ext_term() if ext else p.term()
    if p.tok.kind != "eof":
        raise p.error("trailing input after term")
    return t


def from_json_value(kind: str, data: dict):
    if kind == "space":
        return FinMetric.from_pairs(data["points"], {(x, y): as_dist(d) for x, y, d in data["distances"]})
    if kind == "poset":
        return FinPoset.from_pairs(data["points"], [tuple(pr) for pr in data["order"]], close=True)
    if kind == "signature":
        return Signature(tuple((s, a) for s, a in data["symbols"]))
    if kind == "algebra":
        (ck, cdata), = data["carrier"].items()
        carrier = from_json_value(ck, cdata)
        sig = Signature(tuple((s, a) for s, a, _ in data["ops"]))
        return make_algebra(sig, carrier, {s: tuple(t) for s, _, t in data["ops"]})
    if kind == "eq":
        if "within" in data:
            return QuantEq(parse_term(data["left"], False), parse_term(data["right"], False), as_dist(data["within"]))
        return ContEq(parse_term(data["left"]), parse_term(data["right"]))
    if kind == "chain":
        mode = data["mode"]
        sk = "space" if mode == "met" else "poset"
        stages = [from_json_value(sk, s) for s in data["stages"]]
        links = [list(zip(stages[i].points, t)) for i, t in enumerate(data["links"])]
        tail = data["tail"]
        if tail == "stable":
            return _build_chain(mode, stages, links, ("stable", None))
        table = tuple(tuple(as_dist(v) for v in row) for row in tail["limits"])
        built = _build_chain(mode, stages, links, ("stable", None))
        return OmegaChainMet(built.stages, built.links, DeclaredLimits(table))
    if kind == "pair":
        A, B = from_json_value("poset", data["A"]), from_json_value("poset", data["B"])
        return ParallelPair(A, B, MonotoneMap(A, B, tuple(data["f0"])), MonotoneMap(A, B, tuple(data["f1"])))
    if kind == "constraints":
        base = from_json_value("space", data["base"])
        return ConstraintSet(base, tuple((x, y, as_dist(e)) for x, y, e in data["constraints"]))
    if kind == "presentation":
        if "ext" in data:
            return builtin(data["ext"], data["arity"], data["mode"])
        sk = "space" if data["mode"] == MET else "poset"
        return MonadPresentation(data["mode"], data["arity"],
                                 tuple(from_json_value(sk, c) for c in data["carriers"]),
                                 tuple(tuple(u) for u in data["units"]),
                                 tables={(a, b, tuple(k)): tuple(t) for a, b, k, t in data["tables"]})
    raise ValueError(f"unknown declaration kind {kind!r}")


def file_to_json(wf: WorkbenchFile) -> str:
    decls = [{"kind": kind, "name": name, "value": to_json_value(kind, value)}
             for kind in KINDS for name, value in wf.table_for(kind).items()]
    return json.dumps({"declarations": decls}, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def file_from_json(text: str) -> WorkbenchFile:
    data = json.loads(text)
    out = WorkbenchFile()
    for decl in data["declarations"]:
        table = out.table_for(decl["kind"])
        if decl["name"] in table:
            raise DuplicateName(f"{decl['kind']} {decl['name']!r} already declared")
        try:
            table[decl["name"]] = from_json_value(decl["kind"], decl["value"])
        except (WorkbenchError, ValueError, KeyError, TypeError) as exc:
            if isinstance(exc, DslError):
                raise
            raise InvalidDeclaration(f"{decl['kind']} {decl['name']!r}: {exc}") from None
    return out


def load(path: str) -> WorkbenchFile:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return file_from_json(text) if path.endswith(".json") else parse(text)
