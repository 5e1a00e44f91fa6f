"""Command-line front end.

Every subcommand writes its artifact (JSON or CSV) to stdout or ``--out`` and
a JSON run report to stderr.  Exit codes: 0 success, 1 failed assertion,
2 bad input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from . import serialize as ser
from .algebra import (automorphism_group, abelian_sum_decomposition,
                      derived_subalgebra, find_isomorphism, is_associative,
                      is_metabelian, ito_check, nilpotency_index)
from .cohomo import ext_enumerate
from .codimone import (ExtClassRep, build_algebra, enumerate_T, equalizer,
                       ext_k_census, im_sum, met_kv_census)
from .datum import decompose, metabelian_product
from .dimone import catalog, homothety_agreement
from .errors import (BudgetExceeded, InternalError, InvariantViolation, MetabelError,
                     ParseError)
from .exactla import Subspace, Vector, modulus


@dataclass
class RunReport:
    command: list[str]
    counts: dict = field(default_factory=dict)
    seconds: float = 0.0
    assertions: list[dict] = field(default_factory=list)
    outputs: list[str] = field(default_factory=list)
    error: str | None = None

    def check(self, name: str, passed: bool) -> None:
        self.assertions.append({"name": name, "passed": bool(passed)})

    @property
    def ok(self) -> bool:
        return all(a["passed"] for a in self.assertions)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ParseError(message)


def _prime(text: str) -> int:
    try:
        return modulus(int(text))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _positive(text: str) -> int:
    value = int(text)
    if value <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def _nonneg(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return value


def _fmt_matrix(a: np.ndarray) -> str:
    return ";".join(" ".join(str(int(x)) for x in row) for row in a)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _rows_span(text: str, p: int, n: int) -> Subspace:
    try:
        rows = [[int(x) for x in r.split(",")] for r in text.split(";") if r.strip()]
    except ValueError as exc:
        raise ParseError(f"bad span {text!r}: {exc}") from exc
    if any(len(r) != n for r in rows):
        raise ParseError(f"span vectors must have {n} coordinates")
    return Subspace.from_array(np.array(rows, dtype=np.int64).reshape(-1, n), n, p)


# --- subcommands ------------------------------------------------------------

def cmd_validate(args, rep):
    if args.datum:
        d = ser.parse_datum(args.datum, validate=False)
        report = d.validate()
        for msg in report.messages():
            rep.check(msg, False)
        rep.check("datum axioms", report.ok)
        return ser.dumps({"kind": "datum", "valid": report.ok, "violations": report.messages()})
    a = ser.parse_algebra(args.algebra)
    out = {"kind": "algebra", "dim": a.dim, "p": a.p, "associative": is_associative(a)}
    if out["associative"]:
        out["metabelian"] = is_metabelian(a)
        out["derived_dim"] = derived_subalgebra(a).dim
        out["nilpotency_index"] = nilpotency_index(a)
    rep.counts["dim"] = a.dim
    return ser.dumps(out)


def cmd_product(args, rep):
    e = metabelian_product(ser.parse_datum(args.datum))
    rep.check("associative", is_associative(e.total))
    rep.check("metabelian", is_metabelian(e.total))
    return ser.dumps(ser.algebra_to_json(e.total))


def cmd_decompose(args, rep):
    datum, phi = decompose(ser.parse_algebra(args.algebra))
    rep.counts.update(dimP=datum.dim_p, dimV=datum.dim_v)
    return ser.dumps({"datum": ser.datum_to_json(datum), "phi": ser.matrix_to_json(phi)})


def cmd_iso(args, rep):
    a, b = ser.parse_algebra(args.first), ser.parse_algebra(args.second)
    if (a.dim, a.p) != (b.dim, b.p):
        return ser.dumps({"isomorphic": False, "witness": None})
    c = find_isomorphism(a, b, args.budget)
    return ser.dumps({"isomorphic": c is not None,
                      "witness": None if c is None else ser.matrix_to_json(c)})


def cmd_aut(args, rep):
    group = automorphism_group(ser.parse_algebra(args.algebra), args.budget)
    rep.counts["order"] = len(group)
    return ser.dumps({"order": len(group), "automorphisms": [ser.matrix_to_json(g) for g in group]})


def cmd_ito(args, rep):
    a = ser.parse_algebra(args.algebra)
    if args.pspan is not None and args.vspan is not None:
        spans = (_rows_span(args.pspan, a.p, a.dim), _rows_span(args.vspan, a.p, a.dim))
    else:
        spans = abelian_sum_decomposition(a)
    if spans is None:
        return ser.dumps({"decomposable": False})
    r = ito_check(a, *spans)
    rep.check("metabelian", r.conclusion_holds)
    return ser.dumps({"decomposable": True,
                      "pSpan": [list(v.coords) for v in spans[0].basis_vectors()],
                      "vSpan": [list(v.coords) for v in spans[1].basis_vectors()],
                      **asdict(r)})


def cmd_ext(args, rep):
    cat = ext_enumerate(args.dimP, args.dimV, args.p, args.budget, verify=not args.no_verify)
    rep.counts.update(classes=len(cat), datums=cat.datums_checked, bimodules=len(cat.summary))
    rep.check("catalog complete", cat.verified)
    if args.format == "csv":
        return cat.summary_csv()
    return ser.dumps(ser.catalog_to_json(cat))


def cmd_classify_dim1(args, rep):
    r = homothety_agreement(args.n, args.p, jobs=args.jobs)
    classes = r.classes(args.mode)
    rep.counts.update(forms=len(r.forms), pairs=r.pairs, classes=len(classes),
                      disagreements=len(r.disagreements))
    rep.check("isomorphism agrees with homothety", r.ok)
    rep.check(f"{args.mode} is an equivalence", r.is_equivalence(args.mode))
    rows = [(_fmt_matrix(r.forms[c[0]].array), len(c), len(r.disagreements)) for c in classes]
    return _csv(["representative", "size", "disagreements"], rows)


def cmd_catalog(args, rep):
    from .dimone import catalog_entries
    entries = catalog_entries()
    if args.family not in entries:
        catalog(args.family, {}, args.p)  # raises UnknownFamily
    params = {k: getattr(args, k) for k in entries[args.family].params}
    missing = [k for k, v in params.items() if v is None]
    if missing:
        raise ParseError(f"{args.family} needs --{' --'.join(missing)}")
    value = catalog(args.family, params, args.p)
    if entries[args.family].kind == "form":
        body = {"kind": "form", "form": ser.form_to_json(value)}
    else:
        body = {"kind": "algebra", "algebra": ser.algebra_to_json(value)}
    return ser.dumps({"family": args.family, "params": params, "formal": True, **body})


def cmd_enumerate_T(args, rep):
    pairs = enumerate_T(args.n, args.p, args.budget)
    rows = []
    for t in pairs:
        eq, im = equalizer(t), im_sum(t)
        rows.append((_fmt_matrix(t.X.array), _fmt_matrix(t.Y.array), eq.cardinality(),
                     im.cardinality(), eq.cardinality() // im.cardinality()))
    rep.counts.update(pairs=len(pairs), classes=sum(r[4] for r in rows))
    return _csv(["X", "Y", "equalizer", "image", "classes"], rows)


def cmd_build_codim1(args, rep):
    t = ser.parse_tpair(args.pair)
    try:
        coords = [int(x) for x in args.u.split(",")]
    except ValueError as exc:
        raise ParseError(f"bad vector {args.u!r}") from exc
    if len(coords) != t.n:
        raise ParseError(f"u must have {t.n} coordinates")
    u = Vector(coords, t.p)
    if u not in equalizer(t):
        raise InvariantViolation("u must satisfy Xu = Yu")
    e = build_algebra(ExtClassRep(t, u))
    rep.check("metabelian", is_metabelian(e.total))
    return ser.dumps(ser.algebra_to_json(e.total))


def cmd_census(args, rep):
    if args.kind == "met-kv":
        r = met_kv_census(args.dimV, args.p, args.budget)
        rep.counts.update(datums=r.datum_count, triples=r.triple_count)
        rep.check("datums match triples", r.ok)
    else:
        r = ext_k_census(args.dimV, args.p, args.budget)
        rep.counts.update(quotient=r.quotient_count, catalog=r.catalog_count,
                          brute_force=r.brute_force_count)
        rep.check("three counts agree", r.ok)
    return ser.dumps({"kind": args.kind, **asdict(r), "ok": r.ok})


def cmd_selftest(args, rep):
    from .acceptance import run_all
    lines = []
    for res in run_all(jobs=args.jobs):
        rep.check(res.name, res.passed)
        lines.append(res.line())
    return "\n".join(lines) + "\n"


# --- parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="metabel", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_):
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(func=func)
        sp.add_argument("--out", help="write the artifact here instead of stdout")
        sp.add_argument("--budget", type=_positive, help="enumeration budget (default METABEL_BUDGET)")
        return sp

    sp = add("validate", cmd_validate, "check an algebra or datum file")
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--algebra")
    g.add_argument("--datum")

    add("product", cmd_product, "metabelian product of a datum").add_argument("--datum", required=True)
    add("decompose", cmd_decompose, "datum of a metabelian algebra").add_argument("--algebra", required=True)

    sp = add("iso", cmd_iso, "isomorphism test by search over GL")
    sp.add_argument("first")
    sp.add_argument("second")

    add("aut", cmd_aut, "automorphism group").add_argument("--algebra", required=True)

    sp = add("ito", cmd_ito, "check a sum of two abelian subalgebras")
    sp.add_argument("--algebra", required=True)
    sp.add_argument("--pspan", help='rows of the first span, e.g. "1,0,0;0,1,0"')
    sp.add_argument("--vspan", help="rows of the second span")

    sp = add("ext", cmd_ext, "catalog of extensions of abelian algebras")
    sp.add_argument("--dimP", type=_nonneg, required=True)
    sp.add_argument("--dimV", type=_nonneg, required=True)
    sp.add_argument("--p", type=_prime, required=True)
    sp.add_argument("--format", choices=("json", "csv"), default="json")
    sp.add_argument("--no-verify", action="store_true", help="skip the completeness check")

    sp = add("classify-dim1", cmd_classify_dim1, "classify forms and their algebras")
    sp.add_argument("--n", type=_positive, required=True)
    sp.add_argument("--p", type=_prime, required=True)
    sp.add_argument("--mode", choices=("homothety", "isometry"), default="homothety")
    sp.add_argument("--jobs", type=_positive, default=1)

    sp = add("catalog", cmd_catalog, "instantiate a catalog family")
    sp.add_argument("--family", required=True)
    sp.add_argument("--a", type=int)
    sp.add_argument("--b", type=int)
    sp.add_argument("--p", type=_prime, required=True)

    sp = add("enumerate-T", cmd_enumerate_T, "commuting square-zero pairs")
    sp.add_argument("--n", type=_positive, required=True)
    sp.add_argument("--p", type=_prime, required=True)

    sp = add("build-codim1", cmd_build_codim1, "algebra from a pair and a vector")
    sp.add_argument("--pair", required=True)
    sp.add_argument("--u", required=True)

    sp = add("census", cmd_census, "cross-checked counts for one-dimensional quotients")
    sp.add_argument("kind", choices=("met-kv", "ext-k"))
    sp.add_argument("--dimV", type=_positive, required=True)
    sp.add_argument("--p", type=_prime, required=True)

    sp = add("selftest", cmd_selftest, "run every acceptance check")
    sp.add_argument("--jobs", type=_positive, default=1)
    return parser


def run(argv: list[str]) -> tuple[int, RunReport, str]:
    """Execute one command; returns (exit code, report, artifact text)."""
    rep = RunReport(list(argv))
    start = time.perf_counter()
    text = ""
    saved = os.environ.get("METABEL_BUDGET")
    try:
        args = build_parser().parse_args(argv)
        # The override lives in the environment so worker processes see it.
        if args.budget is not None:
            os.environ["METABEL_BUDGET"] = str(args.budget)
        text = args.func(args, rep)
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(text)
            rep.outputs.append(args.out)
        code = 0 if rep.ok else 1
    except (InternalError, BudgetExceeded) as exc:
        rep.error = f"{type(exc).__name__}: {exc}"
        rep.check(type(exc).__name__, False)
        code = 1
    except (MetabelError, OSError) as exc:
        rep.error = f"{type(exc).__name__}: {exc}"
        code = 2
    finally:
        if saved is None:
            os.environ.pop("METABEL_BUDGET", None)
        else:
            os.environ["METABEL_BUDGET"] = saved
    rep.seconds = round(time.perf_counter() - start, 3)
    return code, rep, text


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    if any(a in ("-h", "--help") for a in argv) or not argv:
        build_parser().parse_args(argv or ["--help"])
    code, rep, text = run(argv)
    if text and not rep.outputs:
        sys.stdout.write(text)
    sys.stderr.write(json.dumps(asdict(rep)) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
