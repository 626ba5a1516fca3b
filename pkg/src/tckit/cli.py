"""Command-line front end.

Exit codes: 0 affirmative/member, 1 negative/not found, 2 error,
3 indeterminate/evidence-only.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field

from . import acceptance
from .closures import (
    ClosureCertificate,
    default_test_element,
    frobenius_closure_ideal,
    frobenius_closure_membership,
    frobenius_power_ideal,
    frobenius_root,
    intersection_chain_membership,
    tight_closure_evidence,
    tight_closure_oracle,
)
from .ffpoly import make_context
from .groebner import CACHE, GREVLEX, IdealSpec, TermOrder, buchberger, split_generators
from .hull import (
    HullError,
    dcc_check,
    format_terms,
    nonvanishing_witness,
    parse_formal_sum,
    parse_frac_poly,
    parse_support,
    scalar_multiply,
)
from .inputs import InputError, ParsedInput, load_input
from .modules import graded_dual_dimensions, is_m_coprimary, module_frobenius_closure_membership
from .monomial import briancon_skoda_check, format_monomial, integral_closure_generators, parse_monomial_ideal

EXIT = {"affirmative": 0, "member": 0, "negative": 1, "not-found": 1, "non-member": 1,
        "error": 2, "indeterminate": 3, "evidence-only": 3}


class UsageError(ValueError):
    pass


@dataclass
class Report:
    command: str
    verdict: str
    provenance: str = ""
    lines: list[str] = field(default_factory=list)
    result: dict = field(default_factory=dict)
    certificates: list[ClosureCertificate] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def exit_code(self) -> int:
        return EXIT[self.verdict]

    def to_json(self) -> dict:
        out = {"tckit": 1, "command": self.command, "verdict": self.verdict,
               "provenance": self.provenance, "result": self.result,
               "seconds": round(self.seconds, 4)}
        if self.certificates:
            out["certificates"] = [c.to_json() for c in self.certificates]
        return out


# ------------------------------------------------------------ helpers


def _order(args) -> TermOrder:
    return GREVLEX if args.order == "grevlex" else TermOrder("lex")


def _inputs(args, need_ring=True) -> ParsedInput:
    if args.file:
        parsed = load_input(args.file)
    else:
        parsed = ParsedInput()
    if need_ring and parsed.ctx is None:
        raise UsageError(f"{args.command} needs an input file with a ring block")
    return parsed


def _ideal(args, parsed: ParsedInput) -> IdealSpec:
    if args.ideal:
        return IdealSpec.of(parsed.ctx, args.ideal)
    if parsed.ideal is None:
        raise UsageError("no ideal: pass --ideal or add an ideal block")
    return parsed.ideal


def _u(args, parsed: ParsedInput):
    if args.u is None:
        raise UsageError(f"{args.command} needs --u")
    return parsed.ctx.parse(args.u)


def _polys(gens) -> list[str]:
    return [str(g) for g in gens]


def _vector_text(text: str) -> list[str]:
    t = text.strip()
    if t[:1] in "[(" and t[-1:] in "])":
        t = t[1:-1]
    return split_generators(t)


def _cert_lines(cert: ClosureCertificate) -> list[str]:
    out = [f"certificate: e = {cert.e}, q = {cert.q}"]
    for g, h in zip(cert.generators, cert.cofactors):
        if not h.is_zero():
            out.append(f"  cofactor of {g if not cert.is_module else list(map(str, g))}: {h}")
    for g, h in zip(cert.presentation, cert.presentation_cofactors):
        if not h.is_zero():
            out.append(f"  relation {list(map(str, g))}: {h}")
    return out


# ------------------------------------------------------------ commands


def cmd_gb(args) -> Report:
    parsed = _inputs(args)
    I = _ideal(args, parsed)
    G = buchberger(I, _order(args))
    return Report("gb", "affirmative", lines=[f"reduced Groebner basis ({G.order.label()}):"]
                  + [f"  {g}" for g in G.basis], result={"basis": _polys(G.basis)})


def cmd_frob_power(args) -> Report:
    parsed = _inputs(args)
    J = frobenius_power_ideal(_ideal(args, parsed), args.e)
    return Report("frob-power", "affirmative", lines=[f"I^[{parsed.ctx.p ** args.e}] = ("
                  + ", ".join(_polys(J.generators)) + ")"], result={"generators": _polys(J.generators)})


def cmd_frob_root(args) -> Report:
    parsed = _inputs(args)
    J = frobenius_root(_ideal(args, parsed), args.e)
    G = buchberger(J)
    return Report("frob-root", "affirmative", lines=["root = (" + ", ".join(_polys(G.basis)) + ")"],
                  result={"generators": _polys(G.basis)})


def cmd_fc_member(args) -> Report:
    parsed = _inputs(args)
    I, u = _ideal(args, parsed), _u(args, parsed)
    cert = frobenius_closure_membership(u, I, args.e_max, _order(args))
    if cert is None:
        return Report("fc-member", "not-found", lines=[f"{u}: not found up to e_max = {args.e_max}"],
                      result={"e_max": args.e_max})
    return Report("fc-member", "member", lines=[f"{u} is in the Frobenius closure"] + _cert_lines(cert),
                  result={"e": cert.e}, certificates=[cert])


def cmd_fc_ideal(args) -> Report:
    parsed = _inputs(args)
    chain = frobenius_closure_ideal(_ideal(args, parsed), max(args.e_max, 1), _order(args))
    gens = buchberger(chain.ideal).basis
    note = (f"stabilized: C_{chain.e_stop} = C_{chain.e_stop + 1} (heuristic stop, no proven bound)"
            if chain.stabilized else f"no stabilization up to e_max = {args.e_max}")
    return Report("fc-ideal", "affirmative" if chain.stabilized else "indeterminate",
                  lines=["I^F = (" + ", ".join(_polys(gens)) + ")", note, f"method: {chain.method}"],
                  result={"generators": _polys(gens), "stabilized": chain.stabilized,
                          "e_stop": chain.e_stop, "method": chain.method})


def cmd_tc_evidence(args) -> Report:
    parsed = _inputs(args)
    I, u = _ideal(args, parsed), _u(args, parsed)
    c = parsed.ctx.parse(args.c) if args.c else default_test_element(parsed.ctx)
    ev = tight_closure_evidence(u, I, c, args.e_max, certify=True, order=_order(args))
    lines = [f"e={e}: {'pass' if ok else 'fail'}" for e, ok in enumerate(ev.passes)]
    verdict = "evidence-only" if ev.all_pass else "negative"
    lines.append("all pass (evidence, not a proof)" if ev.all_pass
                 else f"fails at e = {ev.first_failure} for c = {c}")
    return Report("tc-evidence", verdict, "evidence-only", lines,
                  {"test_element": str(c), "passes": ev.passes},
                  [x for x in ev.certificates if x is not None])


def cmd_tc_oracle(args) -> Report:
    parsed = _inputs(args)
    I, u = _ideal(args, parsed), _u(args, parsed)
    c = parsed.ctx.parse(args.c) if args.c else None
    v = tight_closure_oracle(u, I, args.e_max, c, _order(args))
    lines = [f"verdict: {v.verdict}", f"provenance: {v.provenance}"]
    if v.rule is not None and v.verdict != "evidence-only":
        lines.append(f"source: {v.rule.citation}")
    if v.note:
        lines.append(f"note: {v.note}")
    certs = []
    if v.certificate is not None:
        lines += _cert_lines(v.certificate)
        certs.append(v.certificate)
    if v.evidence is not None:
        lines.append("evidence: " + " ".join("pass" if ok else "fail" for ok in v.evidence.passes))
    result = {"note": v.note, "rule": v.rule.name if v.rule else None}
    if v.evidence is not None:
        result["passes"] = v.evidence.passes
    return Report("tc-oracle", v.verdict, v.provenance, lines, result, certs)


def cmd_chain_member(args) -> Report:
    parsed = _inputs(args)
    I, u = _ideal(args, parsed), _u(args, parsed)
    rows = intersection_chain_membership(u, I, args.k_max, args.e_max, _order(args))
    lines = [f"k={k}: " + (f"member (e={c.e})" if c else f"not found up to e_max = {args.e_max}")
             for k, c in rows]
    allin = all(c is not None for _, c in rows)
    return Report("chain-member", "member" if allin else "not-found", lines=lines,
                  result={"per_k": {str(k): (c.e if c else None) for k, c in rows}},
                  certificates=[c for _, c in rows if c is not None])


def cmd_module_fc(args) -> Report:
    parsed = _inputs(args)
    if parsed.module is None or parsed.submodule is None:
        raise UsageError("module-fc needs module and submodule blocks")
    if args.u is None:
        raise UsageError("module-fc needs --u")
    u = parsed.module.element(_vector_text(args.u))
    cert = module_frobenius_closure_membership(u, parsed.submodule, parsed.module, args.e_max, _order(args))
    shown = "(" + ", ".join(map(str, u)) + ")"
    if cert is None:
        return Report("module-fc", "not-found", lines=[f"{shown}: not found up to e_max = {args.e_max}"])
    return Report("module-fc", "member", lines=[f"{shown} is in the Frobenius closure"] + _cert_lines(cert),
                  result={"e": cert.e}, certificates=[cert])


def cmd_coprimary(args) -> Report:
    parsed = _inputs(args)
    if parsed.module is None or parsed.submodule is None:
        raise UsageError("coprimary needs module and submodule blocks")
    v = is_m_coprimary(parsed.module, parsed.submodule, args.cap, _order(args))
    verdict = {"true": "affirmative", "false": "negative", "unknown": "indeterminate"}[v.verdict]
    if v.verdict == "true":
        line = f"m-coprimary: m^{v.n} kills M/N (dim {v.dimension})"
    elif v.witness is not None:
        pos, var = v.witness
        line = f"not m-coprimary: powers of {parsed.ctx.names[var]} in coordinate {pos + 1} never die"
    elif v.verdict == "false":
        line = f"not m-coprimary: m^{v.dimension} does not kill the finite quotient"
    else:
        line = f"unknown: search capped at n = {args.cap}"
    return Report("coprimary", verdict, lines=[line],
                  result={"verdict": v.verdict, "n": v.n, "dimension": v.dimension,
                          "ray": list(v.witness) if v.witness else None})


def cmd_dual_dims(args) -> Report:
    parsed = _inputs(args)
    dims = graded_dual_dimensions(parsed.ctx, args.q, args.n)
    lines = [f"j={j}: dim {d}" for j, d in dims] + [f"total: {sum(d for _, d in dims)}"]
    return Report("dual-dims", "affirmative", lines=lines,
                  result={"dims": {str(j): d for j, d in dims}, "total": sum(d for _, d in dims)})


def _monomial_ideal(args):
    parsed = _inputs(args, need_ring=False)
    if not args.ideal:
        raise UsageError(f"{args.command} needs --ideal")
    names = parsed.ctx.names if parsed.ctx else None
    return parse_monomial_ideal(args.ideal, names)


def cmd_ic_monomial(args) -> Report:
    I = _monomial_ideal(args)
    J = integral_closure_generators(I)
    gens = [format_monomial(v, J.names) for v in J.generators]
    return Report("ic-monomial", "affirmative", lines=["closure = (" + ", ".join(gens) + ")"],
                  result={"generators": gens})


def cmd_bs_check(args) -> Report:
    I = _monomial_ideal(args)
    rep = briancon_skoda_check(I, args.k)
    if rep.passed:
        line = f"pass: closure(I^{rep.d + args.k}) is inside I^{args.k + 1} (d = {rep.d})"
    else:
        bad = ", ".join(format_monomial(v, I.names) for v in rep.counterexamples)
        line = f"FAIL: {bad} not in I^{args.k + 1}"
    return Report("bs-check", "affirmative" if rep.passed else "negative", lines=[line],
                  result={"d": rep.d, "k": args.k,
                          "counterexamples": [format_monomial(v, I.names) for v in rep.counterexamples]})


def _hull_text(args) -> tuple[str, int, int]:
    if args.f:
        if args.n is None or args.p is None:
            raise UsageError("--f needs --n and --p")
        make_context(args.p, ["x"])  # prime check
        return args.f, args.n, args.p
    parsed = _inputs(args, need_ring=False)
    if parsed.hull_text is None:
        raise UsageError(f"{args.command} needs --f or a hull block")
    return parsed.hull_text


def _formal_sum(args):
    return parse_formal_sum(*_hull_text(args))


def _fmt_vec(v) -> list[str]:
    return [str(x) for x in v]


def cmd_hull_dcc(args) -> Report:
    v = dcc_check(parse_support(*_hull_text(args)))
    verdict = {"pass": "affirmative", "fail": "negative", "indeterminate": "indeterminate"}[v.verdict]
    lines = [f"{v.verdict}: {v.reason}"]
    result = {"verdict": v.verdict, "reason": v.reason}
    if v.verdict == "fail":
        a, b = v.witness
        lines.append(f"descending pair: {_fmt_vec(a)} > {_fmt_vec(b)}")
        result["witness"] = [_fmt_vec(a), _fmt_vec(b)]
    elif v.witness:
        result["minimal"] = [_fmt_vec(w) for w in v.witness]
    return Report("hull-dcc", verdict, lines=lines, result=result)


def cmd_hull_mul(args) -> Report:
    f = _formal_sum(args)
    if not args.s:
        raise UsageError("hull-mul needs --s")
    s = parse_frac_poly(args.s, f.n, f.p)
    prod = scalar_multiply(s, f, args.E)
    lines = [f"product: {prod.value}", f"truncated at E={args.E}: {format_terms(prod.truncated) or '0'}",
             f"exact: {prod.exact}"]
    return Report("hull-mul", "affirmative" if prod.exact else "indeterminate", lines=lines,
                  result={"product": str(prod.value), "truncated": format_terms(prod.truncated) or "0",
                          "exact": prod.exact, "survivors": prod.survivors})


def cmd_hull_witness(args) -> Report:
    if args.t is None:
        raise UsageError("hull-witness needs --t")
    p = args.p if args.p is not None else 2
    make_context(p, ["x"])
    w = nonvanishing_witness(args.t, args.E, p)
    return Report("hull-witness", "affirmative",
                  lines=[f"survivor {w.text()}", f"survivors up to E={w.E}: {w.count}"],
                  result={"survivor": w.text(), "count": w.count})


def cmd_selftest(args) -> Report:
    select = {int(x) for x in args.items.split(",")} if args.items else None
    echo = None if args.json else print
    results = acceptance.run_all(select, echo)
    ok = all(r.passed for r in results)
    return Report("selftest", "affirmative" if ok else "negative",
                  lines=[f"{sum(r.passed for r in results)}/{len(results)} items passed"],
                  result={str(r.number): {"name": r.name, "passed": r.passed, "detail": r.detail,
                                          "seconds": round(r.seconds, 3)} for r in results})


def cmd_verify(args) -> Report:
    if not args.file:
        raise UsageError("verify needs a certificate JSON file")
    with open(args.file, encoding="utf-8") as fh:
        data = json.load(fh)
    certs = data.get("certificates", [data]) if isinstance(data, dict) else data
    ok = all(ClosureCertificate.from_json(c).verify() for c in certs)
    return Report("verify", "affirmative" if ok else "negative",
                  lines=[f"{len(certs)} certificate(s) " + ("verified" if ok else "FAILED")])


COMMANDS = {
    "gb": cmd_gb, "frob-power": cmd_frob_power, "frob-root": cmd_frob_root,
    "fc-member": cmd_fc_member, "fc-ideal": cmd_fc_ideal, "tc-evidence": cmd_tc_evidence,
    "tc-oracle": cmd_tc_oracle, "chain-member": cmd_chain_member, "module-fc": cmd_module_fc,
    "coprimary": cmd_coprimary, "dual-dims": cmd_dual_dims, "ic-monomial": cmd_ic_monomial,
    "bs-check": cmd_bs_check, "hull-dcc": cmd_hull_dcc, "hull-mul": cmd_hull_mul,
    "hull-witness": cmd_hull_witness, "selftest": cmd_selftest, "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tckit", description="Frobenius and tight closure toolkit")
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("file", nargs="?", help="input file (ring/ideal/module/hull blocks)")
    ap.add_argument("--u", help="element to test")
    ap.add_argument("--ideal", help="ideal generators, e.g. 'y,z' or '(x^2,y^2)'")
    ap.add_argument("--c", help="test element for tight-closure evidence (default: last variable)")
    ap.add_argument("--e-max", type=int, default=4)
    ap.add_argument("--k-max", type=int, default=6)
    ap.add_argument("--E", type=int, default=32, help="truncation index for formal sums")
    ap.add_argument("--e", type=int, default=1, help="Frobenius exponent for frob-power/frob-root")
    ap.add_argument("--q", type=int, default=1)
    ap.add_argument("--n", type=int)
    ap.add_argument("--k", type=int, default=0)
    ap.add_argument("--t", type=int)
    ap.add_argument("--p", type=int)
    ap.add_argument("--s", help="scalar for hull-mul")
    ap.add_argument("--f", help="formal sum text")
    ap.add_argument("--cap", type=int, default=64)
    ap.add_argument("--items", help="comma-separated acceptance items for selftest")
    ap.add_argument("--order", choices=("grevlex", "lex"), default="grevlex")
    ap.add_argument("--json", action="store_true")
    ap.add_argument("--verify", action="store_true", help="replay emitted certificates")
    ap.add_argument("--cache-dir")
    return ap


def _validate(args):
    if args.e_max < 0:
        raise UsageError("--e-max must be nonnegative")
    if args.k_max < 1:
        raise UsageError("--k-max must be positive")
    if args.E < 0 or args.e < 0 or args.k < 0:
        raise UsageError("--E, --e and --k must be nonnegative")
    if args.command == "dual-dims":
        if args.n is None or args.n < 1:
            raise UsageError("dual-dims needs --n >= 1")
        if args.q < 1:
            raise UsageError("--q must be positive")


def run(argv=None) -> tuple[Report, argparse.Namespace]:
    args = build_parser().parse_args(argv)
    t0 = time.perf_counter()
    try:
        _validate(args)
        if args.cache_dir:
            CACHE.set_directory(args.cache_dir)
        report = COMMANDS[args.command](args)
        if args.verify and report.certificates:
            ok = all(ClosureCertificate.from_json(c.to_json()).verify() for c in report.certificates)
            report.result["verified"] = ok
            report.lines.append("certificate replay: " + ("verified" if ok else "FAILED"))
            if not ok:
                report.verdict = "error"
    except (UsageError, InputError, HullError, ValueError, OverflowError, OSError) as exc:
        report = Report(args.command, "error", lines=[f"error: {exc}"], result={"error": str(exc)})
    report.seconds = time.perf_counter() - t0
    return report, args


def main(argv=None) -> int:
    report, args = run(argv)
    if args.json:
        print(json.dumps(report.to_json(), indent=2))
    else:
        stream = sys.stderr if report.verdict == "error" else sys.stdout
        for line in report.lines:
            print(line, file=stream)
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
