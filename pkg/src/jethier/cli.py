"""Command-line front end: generate | deform | verify | dump.

Outputs are canonical JSON (sorted keys, fixed separators) or fixed-order
plain text, so identical configuration and seed produce identical bytes.
Exit codes: 0 all checks pass, 1 a verification failed, 2 malformed input.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction

from .bracket import (
    DeformationReport,
    PoissonOp,
    check_operator_homogeneity,
    check_series_homogeneity,
    def_a_residual,
    deformed_entries_for_residual,
    r_deform_bracket,
    s_deform_bracket,
)
from .diffop import is_skew, operator_to_obj
from .genus0 import Genus0Data, NotClosed, check_commutation, table0_to_obj, trr_extend
from .givental import (
    GiventalGen,
    gen_from_obj,
    r_deform_omega,
    s_deform_omega,
    table_to_obj,
)
from .jetcalc import JetPoly, render, render_series, series_to_obj
from .kdvbase import (
    OutOfDerivableRange,
    kdv_flow,
    kdv_omega_table,
    quasi_miura,
    tensor_power,
)
from .suites import run_suite


class InputError(ValueError):
    pass


# ---------------------------------------------------------------------------
# tiny polynomial expression parser for --hessian entries
# ---------------------------------------------------------------------------

def parse_poly(text: str) -> JetPoly:
    """Parse expressions like 'v', 'v1^2 + 1/2*v2', '-3*(v1+v2)'.

    Variables v, w (color 1) or v<k>, w<k> (color k) denote order-0
    coordinates; coefficients are integers or num/den rationals.
    """
    tokens = _tokenize(text)
    poly, pos = _parse_sum(tokens, 0)
    if pos != len(tokens):
        raise InputError(f"trailing input at token {pos} in {text!r}")
    return poly


def _tokenize(text: str) -> list:
    out = []
    i = 0
    while i < len(text):
        c = text[i]
        if c.isspace():
            i += 1
        elif c in "+-*^()":
            out.append(c)
            i += 1
        elif c.isdigit():
            j = i
            while j < len(text) and text[j].isdigit():
                j += 1
            if j < len(text) and text[j] == "/":
                k = j + 1
                while k < len(text) and text[k].isdigit():
                    k += 1
                if k == j + 1:
                    raise InputError(f"bad rational near {text[i:]!r}")
                out.append(Fraction(text[i:k]))
                i = k
            else:
                out.append(Fraction(text[i:j]))
                i = j
        elif c in "vw":
            j = i + 1
            while j < len(text) and text[j].isdigit():
                j += 1
            color = int(text[i + 1:j]) if j > i + 1 else 1
            out.append(("var", color))
            i = j
        else:
            raise InputError(f"unexpected character {c!r} in {text!r}")
    return out


def _parse_sum(tokens, pos):
    sign = 1
    if pos < len(tokens) and tokens[pos] in ("+", "-"):
        sign = -1 if tokens[pos] == "-" else 1
        pos += 1
    acc, pos = _parse_product(tokens, pos)
    acc = acc * sign
    while pos < len(tokens) and tokens[pos] in ("+", "-"):
        sign = -1 if tokens[pos] == "-" else 1
        term, pos = _parse_product(tokens, pos + 1)
        acc = acc + term * sign
    return acc, pos


def _parse_product(tokens, pos):
    acc, pos = _parse_power(tokens, pos)
    while pos < len(tokens) and tokens[pos] == "*":
        nxt, pos = _parse_power(tokens, pos + 1)
        acc = acc * nxt
    return acc, pos


def _parse_power(tokens, pos):
    base, pos = _parse_atom(tokens, pos)
    if pos < len(tokens) and tokens[pos] == "^":
        pos += 1
        if pos >= len(tokens) or not isinstance(tokens[pos], Fraction) \
                or tokens[pos].denominator != 1:
            raise InputError("exponent must be an integer")
        base = base ** int(tokens[pos])
        pos += 1
    return base, pos


def _parse_atom(tokens, pos):
    if pos >= len(tokens):
        raise InputError("unexpected end of expression")
    tok = tokens[pos]
    if tok == "(":
        inner, pos = _parse_sum(tokens, pos + 1)
        if pos >= len(tokens) or tokens[pos] != ")":
            raise InputError("unbalanced parentheses")
        return inner, pos + 1
    if tok == "-":
        inner, pos = _parse_atom(tokens, pos + 1)
        return -inner, pos
    if isinstance(tok, Fraction):
        return JetPoly.const(tok), pos + 1
    if isinstance(tok, tuple) and tok[0] == "var":
        return JetPoly.var(tok[1], 0), pos + 1
    raise InputError(f"unexpected token {tok!r}")


# ---------------------------------------------------------------------------
# output helpers
# ---------------------------------------------------------------------------

def _emit(obj: dict, fmt: str, out) -> None:
    if fmt == "json":
        out.write(json.dumps(obj, sort_keys=True, separators=(",", ": "),
                             indent=2))
        out.write("\n")
    else:
        _emit_text(obj, out)


def _emit_text(obj, out, indent=0) -> None:
    pad = "  " * indent
    if isinstance(obj, dict):
        for key in obj:
            val = obj[key]
            if isinstance(val, (dict, list)):
                out.write(f"{pad}{key}:\n")
                _emit_text(val, out, indent + 1)
            else:
                out.write(f"{pad}{key}: {val}\n")
    elif isinstance(obj, list):
        for val in obj:
            if isinstance(val, (dict, list)):
                _emit_text(val, out, indent)
                out.write("\n" if indent == 0 else "")
            else:
                out.write(f"{pad}{val}\n")
    else:
        out.write(f"{pad}{obj}\n")


def _load_generator(path: str) -> GiventalGen:
    try:
        with open(path) as fh:
            obj = json.load(fh)
        return gen_from_obj(obj)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise InputError(f"invalid generator file {path}: {exc}") from exc


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_generate(args) -> int:
    fmt = args.format
    if args.what == "kdv":
        trunc = args.hbar
        try:
            table = kdv_omega_table(args.pmax, args.qmax, trunc)
        except OutOfDerivableRange as exc:
            raise InputError(str(exc)) from exc
        if args.tensor > 1:
            table = tensor_power(table, args.tensor)
        for key, series in table.items():
            if not check_series_homogeneity(series, 0).ok:
                print(f"internal verification failed at entry {key}",
                      file=sys.stderr)
                return 1
        obj = table_to_obj(table)
        if fmt == "text":
            obj = {"dim": table.dim, "pmax": table.pmax, "qmax": table.qmax,
                   "trunc": table.trunc,
                   "entries": {f"{a}.{p}.{b}.{q}": render_series(v)
                               for (a, p, b, q), v in table.items()}}
        _emit(obj, fmt, sys.stdout)
        return 0
    if args.what == "principal":
        if args.hessian is None:
            raise InputError("generate principal requires --hessian")
        try:
            rows = json.loads(args.hessian)
            hess = {(i + 1, j + 1): parse_poly(cell)
                    for i, row in enumerate(rows)
                    for j, cell in enumerate(row)}
            data = Genus0Data(args.dim, hess)
        except (ValueError, TypeError) as exc:
            raise InputError(f"invalid Hessian: {exc}") from exc
        try:
            table = trr_extend(data, args.pmax, args.qmax)
        except NotClosed as exc:
            raise InputError(f"Hessian is not integrable: {exc}") from exc
        for p in range(min(args.pmax - 1, 2) + 1):
            for q in range(min(args.qmax, 2) + 1):
                if not check_commutation(table, 1, p, 1, q).is_zero():
                    print("internal verification failed: commutation residual",
                          file=sys.stderr)
                    return 1
        obj = table0_to_obj(table)
        if fmt == "text":
            obj = {"dim": table.dim, "pmax": table.pmax, "qmax": table.qmax,
                   "entries": {f"{a}.{p}.{b}.{q}": render(v)
                               for (a, p, b, q), v in table.items()}}
        _emit(obj, fmt, sys.stdout)
        return 0
    raise InputError(f"unknown generate target {args.what!r}")


def cmd_deform(args) -> int:
    gen = _load_generator(args.generator)
    trunc = args.hbar
    started = time.monotonic()
    bound = args.pmax + 1 + gen.level + args.qmax
    try:
        base = kdv_omega_table(bound, bound, trunc)
    except OutOfDerivableRange as exc:
        raise InputError(
            f"deformation at hbar-truncation {trunc} needs table bounds "
            f"{bound}: {exc}") from exc
    table = tensor_power(base, args.tensor) if args.tensor > 1 else base
    if gen.dim != table.dim:
        raise InputError(
            f"generator dimension {gen.dim} does not match table dimension "
            f"{table.dim} (use --tensor {gen.dim})")
    deform = r_deform_omega if gen.kind == "r" else s_deform_omega
    report = DeformationReport(generator={"kind": gen.kind, "level": gen.level,
                                          "matrix": [[str(x) for x in row]
                                                     for row in gen.matrix]},
                               target=args.what, seed=args.seed)
    if args.what == "omega":
        for a in range(1, table.dim + 1):
            for b in range(1, table.dim + 1):
                for p in range(args.pmax + 1):
                    for q in range(args.qmax + 1):
                        series = deform(table, gen, a, p, b, q)
                        hom = check_series_homogeneity(series, 0)
                        sym = series == deform(table, gen, b, q, a, p)
                        report.homogeneity_ok &= hom.ok
                        report.symmetric_ok &= sym
                        report.entries.append({
                            "index": [a, p, b, q],
                            "value": series_to_obj(series),
                            "homogeneous": hom.ok,
                            "symmetric": sym,
                        })
    elif args.what == "bracket":
        pop = PoissonOp.dx(table.dim, trunc)
        dP = (r_deform_bracket(table, pop, gen) if gen.kind == "r"
              else s_deform_bracket(pop, gen))
        report.skew_ok = is_skew(dP)
        report.order0_ok = all(dP.coeff(b, x, 0).is_zero()
                               for b in range(1, table.dim + 1)
                               for x in range(1, table.dim + 1))
        report.homogeneity_ok = check_operator_homogeneity(dP, 1).ok
        report.entries.append({"operator": operator_to_obj(dP)})
        for a in range(1, table.dim + 1):
            for p in range(args.pmax + 1):
                ent = deformed_entries_for_residual(table, gen, a, p)
                for b in range(1, table.dim + 1):
                    res = def_a_residual(table, pop, ent, dP, a, p, b)
                    report.residuals.append(((a, p, b), res.num_terms()))
    else:
        raise InputError(f"unknown deform target {args.what!r}")
    report.elapsed = time.monotonic() - started
    _emit(report.to_obj(), args.format, sys.stdout)
    print(f"deform {args.what} finished in {report.elapsed:.3f}s", file=sys.stderr)
    return 0 if report.all_pass() else 1


def cmd_verify(args) -> int:
    try:
        checks = run_suite(args.suite, seed=args.seed, count=args.count,
                           pmax=args.pmax, hbar=args.hbar)
    except KeyError as exc:
        raise InputError(str(exc)) from exc
    obj = {
        "suite": args.suite,
        "seed": args.seed,
        "count": args.count,
        "checks": [c.to_obj() for c in checks],
        "passed": sum(1 for c in checks if c.ok),
        "failed": sum(1 for c in checks if not c.ok),
        "ok": all(c.ok for c in checks),
    }
    _emit(obj, args.format, sys.stdout)
    return 0 if obj["ok"] else 1


def cmd_dump(args) -> int:
    fmt = args.format
    if args.what == "flows":
        flows = {q: kdv_flow(q, args.hbar) for q in range(3)}
        if fmt == "text":
            obj = {f"dw/dt{q}": render_series(f) for q, f in flows.items()}
        else:
            obj = {f"t{q}": series_to_obj(f) for q, f in flows.items()}
        _emit(obj, fmt, sys.stdout)
        return 0
    if args.what == "hamiltonians":
        table = kdv_omega_table(2, 0, args.hbar)
        dens = {p: table.unit_ext(1, p + 1) for p in range(-1, 2)}
        if fmt == "text":
            obj = {f"h{p}": render_series(v) for p, v in dens.items()}
        else:
            obj = {f"h{p}": series_to_obj(v) for p, v in dens.items()}
        _emit(obj, fmt, sys.stdout)
        return 0
    if args.what == "quasi-miura":
        m = quasi_miura("forward", min(args.hbar, 2))
        inv = m.inverse_images()
        if fmt == "text":
            obj = {"forward": render_series(m.forward[0], "v"),
                   "inverse": render_series(inv[0], "w")}
        else:
            obj = {"forward": series_to_obj(m.forward[0]),
                   "inverse": series_to_obj(inv[0])}
        _emit(obj, fmt, sys.stdout)
        return 0
    if args.what == "kdv-table":
        table = kdv_omega_table(args.pmax, args.qmax, args.hbar)
        _emit(table_to_obj(table), fmt, sys.stdout)
        return 0
    raise InputError(f"unknown dump target {args.what!r}")


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="jethier",
        description="Exact hierarchy tables, symmetry deformations, and "
                    "identity verification at the KdV base point.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, pmax=2, qmax=2, hbar=1):
        p.add_argument("--dim", type=int, default=1)
        p.add_argument("--pmax", type=int, default=pmax)
        p.add_argument("--qmax", type=int, default=qmax)
        p.add_argument("--hbar", type=int, default=hbar)
        p.add_argument("--seed", type=int, default=7)
        p.add_argument("--count", type=int, default=100)
        p.add_argument("--tensor", type=int, default=1)
        p.add_argument("--format", choices=("json", "text"), default="json")

    g = sub.add_parser("generate", help="build and verify hierarchy tables")
    g.add_argument("what", choices=("kdv", "principal"))
    g.add_argument("--hessian", help="JSON array of polynomial strings")
    common(g, hbar=2)
    g.set_defaults(func=cmd_generate)

    d = sub.add_parser("deform", help="apply a symmetry generator")
    d.add_argument("what", choices=("omega", "bracket"))
    d.add_argument("--generator", required=True, help="generator JSON file")
    common(d, pmax=1, qmax=0)
    d.set_defaults(func=cmd_deform)

    v = sub.add_parser("verify", help="run a named verification suite")
    v.add_argument("suite", choices=("lemmas", "commutation", "quasimiura",
                                     "homogeneity", "uniqueness",
                                     "defining-equation", "all"))
    common(v, pmax=3)
    v.set_defaults(func=cmd_verify)

    du = sub.add_parser("dump", help="print built-in base-point data")
    du.add_argument("what", choices=("kdv-table", "flows", "hamiltonians",
                                     "quasi-miura"))
    common(du, hbar=2)
    du.set_defaults(func=cmd_dump)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except BrokenPipeError:
        return 0


if __name__ == "__main__":
    sys.exit(main())
