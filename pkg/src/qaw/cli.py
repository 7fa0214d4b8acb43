"""Command-line front end.

Exit codes: 0 every verdict positive, 1 some verdict negative (with witness),
2 input error, 3 enumeration bound exceeded.
"""
from __future__ import annotations

import argparse
import itertools
import sys
import time
from typing import Callable, Sequence

from . import bounds
from .alg import (
    algebra_violations,
    all_homomorphisms,
    homomorphic_image,
    product_algebra,
    subalgebra_generated,
)
from .bridge import (
    FIXTURES,
    MET,
    POS,
    RULES,
    builtin,
    check_freeness,
    check_kleisli_laws,
    enumerate_variety_alpha,
    generate_variety,
    kan_evaluate,
    small_carriers,
)
from .colim import (
    OmegaChainMet,
    basic_weight_colimit,
    check_coinserter_products,
    check_coinserter_universal,
    check_met_colimit_characterization,
    check_product_commutation,
    coinserter,
    omega_colimit_met,
    omega_colimit_pos,
    precongruence,
)
from .dsl import (
    WorkbenchFile,
    file_from_json,
    parse,
    parse_term,
    poset_body,
    space_body,
    term_text,
    variety_text,
)
from .eqn import QuantEq, is_definable, satisfies
from .errors import WorkbenchError
from .mspace import FinMetric, same_space
from .report import Report, content_hash, error_report
from .term import Signature, enumerate_terms

Handler = Callable[[argparse.Namespace, "Context"], None]


class Context:
    def __init__(self, args: argparse.Namespace, report: Report):
        self.args = args
        self.report = report
        self._file: WorkbenchFile | None = None
        self._text: str | None = None

    def text(self) -> str:
        if self._text is None:
            if not self.args.file:
                raise UsageError("this command needs an input file")
            with open(self.args.file, "rb") as fh:
                data = fh.read()
            self.report.input_hash = content_hash(data)
            self._text = data.decode("utf-8")
        return self._text

    def file(self, lenient: bool = False) -> WorkbenchFile:
        if self._file is None:
            text = self.text()
            self._file = file_from_json(text) if self.args.file.endswith(".json") else parse(text, lenient)
        return self._file

    def get(self, kind: str, name: str):
        return self.file().lookup(kind, name)


class UsageError(WorkbenchError):
    pass


def _carrier_bound(A) -> None:
    bounds.check_carrier(len(A), "algebra carrier")


# ---------------------------------------------------------------------------
# handlers


def cmd_check_metric(args, ctx: Context):
    wf = ctx.file(lenient=True)
    names = args.name or list(wf.spaces) + list(wf.posets) + list(wf.rejected)
    for name in names:
        if name in wf.rejected:
            kind, violations = wf.rejected[name]
            ctx.report.verdict(f"{kind} {name}", False, [str(v) for v in violations])
        elif name in wf.spaces:
            ctx.report.verdict(f"space {name}", True)
        elif name in wf.posets:
            ctx.report.verdict(f"poset {name}", True)
        else:
            raise UsageError(f"no space or poset named {name!r}")


def cmd_check_algebra(args, ctx: Context):
    wf = ctx.file()
    for name in args.algebra or list(wf.algebras):
        A = ctx.get("algebra", name)
        violations = algebra_violations(A)
        witness = [{"symbol": v.symbol, "kind": v.kind, "pair": v.witness} for v in violations]
        ctx.report.verdict(f"algebra {name}", not violations, witness or None)


def cmd_satisfies(args, ctx: Context):
    wf = ctx.file()
    A = ctx.get("algebra", args.algebra)
    _carrier_bound(A)
    # without --eq, check every equation that makes sense for the carrier
    names = args.eq or [n for n, e in wf.equations.items()
                        if isinstance(A.carrier, FinMetric) or not isinstance(e, QuantEq)]
    for name in names:
        v = satisfies(A, ctx.get("eq", name))
        ctx.report.verdict(f"{args.algebra} satisfies {name}", v.holds,
                           None if v.holds else {"interpretation": v.witness, "values": v.detail})


def cmd_definable(args, ctx: Context):
    A = ctx.get("algebra", args.algebra)
    _carrier_bound(A)
    t = parse_term(args.term)
    v = is_definable(A, t)
    ctx.report.verdict(f"{term_text(t)} definable in {args.algebra}", v.holds,
                       None if v.holds else {"interpretation": v.witness, "reason": v.detail["reason"]})


def cmd_colimit(args, ctx: Context):
    r = ctx.report
    if args.what == "precongruence":
        if args.space:
            M = ctx.get("space", args.space)
            C, unit = basic_weight_colimit(precongruence(M))
            r.verdict(f"colimit of the precongruence of {args.space} reconstructs it", same_space(C, M))
        elif args.constraints:
            C, unit = basic_weight_colimit(ctx.get("constraints", args.constraints))
        else:
            raise UsageError("give --space or --constraints")
        r.result.update(colimit="space " + space_body(C), unit=unit.as_dict())
    elif args.what == "coinserter":
        if not args.pair:
            raise UsageError("give --pair")
        p = ctx.get("pair", args.pair)
        Q, c = coinserter(p)
        r.verdict("c∘f0 ⊑ c∘f1", all(Q.leq(c(p.f0(a)), c(p.f1(a))) for a in p.A.points))
        if args.verify:
            ok, why = check_coinserter_universal(p, (Q, c), args.max_target)
            r.verdict(f"universal property against posets with at most {args.max_target} points", ok,
                      None if ok else why)
        r.result.update(coinserter="poset " + poset_body(Q), map=c.as_dict())
    elif args.what == "chain":
        if not args.chain:
            raise UsageError("give --chain")
        ch = ctx.get("chain", args.chain)
        if isinstance(ch, OmegaChainMet):
            C, cocone = omega_colimit_met(ch)
            ok, why = check_met_colimit_characterization(ch, C, cocone)
            r.verdict("colimit characterization", ok, None if ok else why)
            r.result["colimit"] = "space " + space_body(C)
        else:
            C, cocone = omega_colimit_pos(ch)
            r.result["colimit"] = "poset " + poset_body(C)
        r.result["cocone"] = [c.as_dict() for c in cocone]


def cmd_commute(args, ctx: Context):
    r = ctx.report
    if args.chain:
        if len(args.chain) != 2:
            raise UsageError("give exactly two --chain names")
        a, b = (ctx.get("chain", n) for n in args.chain)
        mode = "met" if isinstance(a, OmegaChainMet) else "pos"
        if (mode == "met") != isinstance(b, OmegaChainMet):
            raise UsageError("both chains must live in the same setting")
        ok, info = check_product_commutation(a, b, mode)
    elif args.pair:
        if len(args.pair) != 2:
            raise UsageError("give exactly two --pair names")
        ok, info = check_coinserter_products(*(ctx.get("pair", n) for n in args.pair))
    else:
        raise UsageError("give two --chain or two --pair names")
    r.verdict(info["message"], ok)
    r.result.update(colimit_of_product=info["colimit_of_product"],
                    product_of_colimits=info["product_of_colimits"])


def cmd_hsp(args, ctx: Context):
    wf = ctx.file()
    r = ctx.report
    algebras = {name: ctx.get("algebra", name) for name in (args.algebra or list(wf.algebras))}
    eqs = {name: ctx.get("eq", name) for name in (args.eq or list(wf.equations))}
    for A in algebras.values():
        _carrier_bound(A)

    def holds_all(B):
        for name, e in eqs.items():
            v = satisfies(B, e)
            if not v:
                return name, v.witness
        return None

    members = {n: A for n, A in algebras.items() if holds_all(A) is None}
    r.result["members"] = sorted(members)
    r.result["constructed"] = 0
    checks = []
    names = sorted(members)
    for a, b in itertools.combinations_with_replacement(names, 2):
        if members[a].sig != members[b].sig or members[a].kind != members[b].kind:
            continue
        P, _ = product_algebra([members[a], members[b]])
        checks.append((f"product {a} × {b}", P))
    for a in names:
        A = members[a]
        for size in range(len(A) + 1):
            for S in itertools.combinations(A.carrier.points, size):
                B, _ = subalgebra_generated(A, S)
                checks.append((f"subalgebra of {a} generated by {list(S)}", B))
        for b in names:
            if members[b].sig != A.sig or members[b].kind != A.kind:
                continue
            for h in all_homomorphisms(A, members[b]):
                image, _ = homomorphic_image(h)
                checks.append((f"image of {a} under {h.as_dict()}", image))
    for label, B in checks:
        failure = holds_all(B)
        if failure is not None:
            r.verdict(label, False, {"equation": failure[0], "interpretation": failure[1]})
    r.result["constructed"] = len(checks)
    r.verdict("every constructed algebra satisfies the equations",
              all(v["holds"] for v in r.verdicts))


def _presentation(args, ctx: Context):
    name = args.presentation
    if args.file:
        wf = ctx.file()
        if name in wf.presentations:
            return wf.presentations[name]
    if name in FIXTURES or name in RULES:
        return builtin(name, args.arity, args.mode)
    raise UsageError(f"no presentation named {name!r} (built-ins: {', '.join(sorted(FIXTURES))})")


def cmd_monad(args, ctx: Context):
    r = ctx.report
    P = _presentation(args, ctx)
    if args.what == "laws":
        report = check_kleisli_laws(P)
        r.verdict("Kleisli laws", report.ok,
                  None if report.ok else [{"law": f.law, "witness": f.witness} for f in report.failures[:20]])
        r.result["failures"] = len(report.failures)
    elif args.what == "eqgen":
        variety = generate_variety(P)
        text = variety_text(variety, f"{args.presentation} {P.mode} arity {P.arity}")
        if args.output:
            with open(args.output, "w", encoding="utf-8") as fh:
                fh.write(text)
        r.result.update(equations=len(variety.eqs), symbols=len(variety.sig.symbols))
        if not args.output:
            r.result["variety"] = text
    elif args.what == "freeness":
        if args.target:
            targets = [ctx.get("algebra", n) for n in args.target]
        else:
            size = min(args.max_target, P.arity)
            targets = [A for C in small_carriers(P.mode, size) for A in enumerate_variety_alpha(P, C)]
        report = check_freeness(P, args.n, targets)
        r.verdict(f"T_{args.n} is free over V_{args.n}", report.ok,
                  None if report.ok else [{"target": f.target, "f": f.assignment, "reason": f.reason}
                                          for f in report.failures[:20]])
        r.result.update(targets=len(targets), assignments=report.checked)


def cmd_kan(args, ctx: Context):
    M = ctx.get("space", args.space)
    if args.arity is None:
        # the largest M_ε is at most every ordered pair of points
        args.arity = max(len(M) ** 2, 1)
    P = _presentation(args, ctx)
    T = kan_evaluate(P, M)
    ctx.report.result["value"] = "space " + space_body(T)
    if not M.finite_pairs():
        ctx.report.verdict("discrete input gives the presentation carrier",
                           same_space(T, P.carriers[len(M)].relabel(
                               {p: q for p, q in zip(P.carriers[len(M)].points, T.points)})))


def cmd_free_terms(args, ctx: Context):
    if args.signature:
        sig = ctx.get("signature", args.signature)
    elif args.symbols:
        symbols = []
        for item in args.symbols.split(","):
            name, _, arity = item.strip().partition(":")
            if not arity.isdigit():
                raise UsageError(f"symbols look like name:arity, got {item!r}")
            symbols.append((name, int(arity)))
        sig = Signature(tuple(symbols))
    else:
        raise UsageError("give --signature or --symbols")
    terms = enumerate_terms(sig, args.gens, args.depth, limit=bounds.max_maps())
    ctx.report.result.update(count=len(terms), terms=[term_text(t) for t in terms])


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--max-carrier", type=int, default=None,
                        help="largest carrier enumerated over (default 6, or $QAW_MAX_CARRIER)")
    common.add_argument("--max-maps", type=int, default=None, help="largest map count enumerated (default 10^7)")
    common.add_argument("--no-timing", action="store_true", help="report zero elapsed time")

    def add(sub, name, handler, help_text, file_required=True):
        p = sub.add_parser(name, parents=[common], help=help_text)
        if file_required:
            p.add_argument("file")
        else:
            p.add_argument("file", nargs="?")
        p.set_defaults(handler=handler)
        return p

    parser = argparse.ArgumentParser(prog="qaw", description="Quantitative algebra workbench")
    sub = parser.add_subparsers(dest="command", required=True)

    p = add(sub, "check-metric", cmd_check_metric, "validate spaces and posets")
    p.add_argument("--name", action="append")
    p = add(sub, "check-algebra", cmd_check_algebra, "validate algebra operations")
    p.add_argument("--algebra", action="append")
    p = add(sub, "satisfies", cmd_satisfies, "check equations in an algebra")
    p.add_argument("--algebra", required=True)
    p.add_argument("--eq", action="append")
    p = add(sub, "definable", cmd_definable, "check definability of an extended term")
    p.add_argument("--algebra", required=True)
    p.add_argument("--term", required=True)

    colim = sub.add_parser("colimit", help="compute colimits").add_subparsers(dest="what", required=True)
    for what in ("precongruence", "coinserter", "chain"):
        p = add(colim, what, cmd_colimit, f"{what} colimit")
        p.set_defaults(what=what)
        p.add_argument("--space")
        p.add_argument("--constraints")
        p.add_argument("--pair")
        p.add_argument("--chain")
        p.add_argument("--verify", action="store_true")
        p.add_argument("--max-target", type=int, default=3)

    commute = sub.add_parser("commute", help="commutation with products").add_subparsers(dest="what", required=True)
    p = add(commute, "products", cmd_commute, "compare colimits of products with products of colimits")
    p.add_argument("--chain", action="append")
    p.add_argument("--pair", action="append")

    hsp = sub.add_parser("hsp", help="closure under H, S, P").add_subparsers(dest="what", required=True)
    p = add(hsp, "close", cmd_hsp, "check equations on products, subalgebras and images")
    p.add_argument("--algebra", action="append")
    p.add_argument("--eq", action="append")

    monad = sub.add_parser("monad", help="monad presentations").add_subparsers(dest="what", required=True)
    for what in ("laws", "eqgen", "freeness"):
        p = add(monad, what, cmd_monad, f"monad {what}", file_required=False)
        p.set_defaults(what=what)
        p.add_argument("--presentation", required=True)
        p.add_argument("--mode", choices=(MET, POS), default=MET)
        p.add_argument("--arity", type=int, default=2, help="arity bound of a built-in presentation")
        if what == "eqgen":
            p.add_argument("--output")
        if what == "freeness":
            p.add_argument("--n", type=int, default=2)
            p.add_argument("--target", action="append")
            p.add_argument("--max-target", type=int, default=2)

    kan = sub.add_parser("kan", help="evaluate a presentation on a space").add_subparsers(dest="what", required=True)
    p = add(kan, "eval", cmd_kan, "value of the monad on a finite space")
    p.add_argument("--space", required=True)
    p.add_argument("--presentation", required=True)
    p.add_argument("--mode", choices=(MET,), default=MET)
    p.add_argument("--arity", type=int, default=None, help="arity bound of a built-in presentation "
                   "(default: the square of the number of points)")

    p = add(sub, "free-terms", cmd_free_terms, "terms up to a given height", file_required=False)
    p.add_argument("--signature")
    p.add_argument("--symbols", help="comma separated name:arity list")
    p.add_argument("--gens", nargs="*", default=[])
    p.add_argument("--depth", type=int, required=True)
    return parser


def run(argv: Sequence[str]) -> tuple[int, str]:
    """Execute one command; returns the exit code and the rendered output."""
    parser = build_parser()
    args = parser.parse_args(list(argv))
    bounds.reset()
    bounds.configure(max_maps=args.max_maps, max_carrier=args.max_carrier)
    report = Report(command=list(argv))
    ctx = Context(args, report)
    start = time.perf_counter()
    try:
        args.handler(args, ctx)
    except (WorkbenchError, OSError, UnicodeDecodeError) as exc:
        code = getattr(exc, "exit_code", 2)
        if args.format == "json":
            import json
            return code, json.dumps(error_report(list(argv), exc, report.input_hash),
                                    sort_keys=True, indent=2, ensure_ascii=False) + "\n"
        return code, f"error: {exc}\n"
    report.seconds = 0.0 if args.no_timing else time.perf_counter() - start
    if args.format == "json":
        out = report.to_json()
    elif args.command == "monad" and args.what == "eqgen" and "variety" in report.result:
        out = report.result["variety"]
    else:
        out = report.to_text()
    return (0 if report.ok else 1), out


def main(argv: Sequence[str] | None = None) -> int:
    code, out = run(sys.argv[1:] if argv is None else argv)
    stream = sys.stdout if code in (0, 1) else sys.stderr
    stream.write(out)
    return code


if __name__ == "__main__":
    sys.exit(main())
