"""Command line front end.

Exit codes: 0 success, 1 verification failure, 2 parse or usage error.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Optional

from . import __version__
from . import dot as dotfmt
from . import serialize as sj
from .clauses import reduce_clause_set, rewrite_clause_term, sorted_clauses
from .dsl import Document, parse_file
from .eca import (
    EcaBundle,
    eca_herbrand,
    eca_refute,
    eca_report,
    extracted_clause_set,
    load_variant,
    variant_diff,
)
from .herbrand import EMPTY_AXIOMS, Provability, flatten
from .proofs import check_schema, render_proof, unfold_proof_schema
from .resolution import leaf_labels, render_tree
from .terms import fmt

OK, FAILED, USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class Output:
    def __init__(self, path: Optional[str]):
        self.path = path
        self.color = path is None and sys.stdout.isatty() and "NO_COLOR" not in os.environ

    def paint(self, text: str, good: bool) -> str:
        if not self.color:
            return text
        return f"\033[{32 if good else 31}m{text}\033[0m"

    def emit(self, text: str) -> None:
        if self.path is None:
            sys.stdout.write(text)
        else:
            Path(self.path).write_text(text, encoding="utf-8")


def _load(path: str) -> Document:
    try:
        doc = parse_file(path)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
    for d in doc.diagnostics:
        print(d, file=sys.stderr)
    return doc


def _bundle(doc: Document, args) -> EcaBundle:
    b = EcaBundle(doc)
    if getattr(args, "axioms", None):
        b.axioms = args.axioms
    return b


def _n_range(text: str) -> range:
    try:
        lo, hi = text.split("..")
        return range(int(lo), int(hi) + 1)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected A..B, got {text!r}") from exc


# --------------------------------------------------------------------------
# commands


def cmd_check(args, out: Output) -> int:
    doc = _load(args.file)
    problems = []
    for name, schema in doc.proof_schemas.items():
        problems += [f"proof schema {name}: {v}" for v in check_schema(schema)]
    for name, R in doc.rho_schemas.items():
        problems += [f"resolution schema {name}: {p}" for p in R.check()]
    for name, sub in doc.substitutions.items():
        problems += [f"substitution {name}: {p}" for p in sub.check()]
    if args.format == "dot":
        if not doc.rho_schemas:
            raise UsageError("no resolution schema to draw")
        R = doc.rho_schemas.get(args.rho) or next(iter(doc.rho_schemas.values()))
        out.emit(dotfmt.rho_graph_to_dot(R))
    elif args.format == "json":
        out.emit(sj.dumps(sj.envelope(
            "check", file=str(args.file),
            diagnostics=[d.to_json() for d in doc.diagnostics],
            problems=problems,
            ok=doc.ok and not problems,
        )))
    else:
        lines = [str(d) for d in doc.diagnostics] + problems
        status = "ok" if doc.ok and not problems else f"{len(doc.diagnostics) + len(problems)} problem(s)"
        lines.append(out.paint(status, doc.ok and not problems))
        out.emit("\n".join(lines) + "\n")
    if not doc.ok:
        return USAGE
    return FAILED if problems else OK


def cmd_unfold_proof(args, out: Output) -> int:
    doc = _load(args.file)
    if not doc.ok:
        return USAGE
    b = _bundle(doc, args)
    symbol = args.symbol or b.top_symbol
    try:
        p = unfold_proof_schema(b.schema, args.n, symbol)
    except KeyError as exc:
        raise UsageError(f"unknown proof symbol {exc}") from exc
    if args.format == "dot":
        out.emit(dotfmt.proof_to_dot(p))
    elif args.format == "json":
        out.emit(sj.dumps(sj.envelope("unfold-proof", gamma=args.n, symbol=symbol, proof=sj.proof_json(p))))
    else:
        out.emit(render_proof(p) + "\n")
    return OK


def cmd_clauseset(args, out: Output) -> int:
    doc = _load(args.file)
    if not doc.ok:
        return USAGE
    b = _bundle(doc, args)
    if args.format == "dot":
        term = rewrite_clause_term(b.crs, b.top_symbol, frozenset(), args.n)
        out.emit(dotfmt.clause_term_to_dot(term))
        return OK
    clauses = extracted_clause_set(b, args.n)
    if args.reduce:
        clauses = reduce_clause_set(clauses)
    if args.format == "json":
        out.emit(sj.dumps(sj.envelope("clauseset", gamma=args.n, reduced=bool(args.reduce),
                                      clauses=sj.clause_set_json(clauses))))
    else:
        out.emit("".join(f"{c}\n" for c in sorted_clauses(clauses)))
    return OK


def cmd_refute(args, out: Output) -> int:
    doc = _load(args.file)
    if not doc.ok:
        return USAGE
    if args.diff:
        out.emit(variant_diff(doc, args.variant if args.variant != "corrected" else "printed"))
        return OK
    b = _bundle(doc, args)
    b.refutation = args.variant
    if args.variant not in doc.rho_schemas:
        try:
            vdoc = load_variant(doc, args.variant, Path(args.file).parent)
        except KeyError as exc:
            raise UsageError(str(exc.args[0])) from exc
        except OSError as exc:
            raise UsageError(f"cannot read variant {args.variant}: {exc.strerror}") from exc
        if vdoc.errors:
            for d in vdoc.diagnostics:
                print(d, file=sys.stderr)
            print(f"variant {args.variant}: {len(vdoc.errors)} error(s); it cannot be unfolded", file=sys.stderr)
            if args.format == "json":
                out.emit(sj.dumps(sj.envelope("refute", gamma=args.n, k=args.k, variant=args.variant,
                                              verified=False, error="variant does not parse",
                                              diagnostics=[d.to_json() for d in vdoc.diagnostics])))
            return FAILED
        b = EcaBundle(vdoc, refutation=args.variant)
    result = eca_refute(args.n, args.k, b, check=args.verify)
    if result.error:
        print(f"error: {result.error}", file=sys.stderr)
    if args.format == "dot":
        if result.tree is not None:
            out.emit(dotfmt.tree_to_dot(result.tree))
    elif args.format == "json":
        payload = dict(gamma=args.n, k=args.k, variant=args.variant, error=result.error)
        if args.verify:
            payload["verified"] = result.verified
            payload["violations"] = sj.violations_json(result.violations)
        if result.tree is not None:
            payload["tree"] = sj.tree_json(result.tree)
            payload["leaf_labels"] = [list(lb[:2]) + [list(lb[2])] for lb in leaf_labels(result.tree) if lb]
        out.emit(sj.dumps(sj.envelope("refute", **payload)))
    else:
        text = render_tree(result.tree) + "\n" if result.tree is not None else ""
        if args.verify:
            text += "".join(f"violation {v}\n" for v in result.violations)
            text += out.paint("verified" if result.verified else "NOT verified", result.verified) + "\n"
        out.emit(text)
    if result.tree is None:
        return FAILED
    return FAILED if args.verify and not result.verified else OK


def cmd_herbrand(args, out: Output) -> int:
    doc = _load(args.file)
    if not doc.ok:
        return USAGE
    b = _bundle(doc, args)
    axioms = EMPTY_AXIOMS if args.no_axioms else b.axiom_set
    if args.check:
        res = eca_herbrand(args.n, b, axioms)
        seq = res.minimal if args.minimal else res.full
        verdict = res.minimal_check if args.minimal else res.full_check
    else:
        from .herbrand import build_herbrand_sequent
        from .eca import minimal_overrides

        over = minimal_overrides(b) if args.minimal else None
        seq = build_herbrand_sequent(b.sps, b.herbrand, args.n, b.rs, overrides=over)
        verdict = None
    if args.format == "dot":
        if verdict is None or verdict.certificate is None:
            raise UsageError("DOT output for herbrand needs --check and a PROVABLE verdict")
        out.emit(dotfmt.tree_to_dot(verdict.certificate, "certificate"))
    elif args.format == "json":
        payload = dict(gamma=args.n, minimal=bool(args.minimal), axioms=axioms.name,
                       sequent=sj.sequent_json(seq), flat=sj.sequent_json(flatten(seq)))
        if verdict is not None:
            payload["verdict"] = verdict.verdict.value
        out.emit(sj.dumps(sj.envelope("herbrand", **payload)))
    else:
        flat = flatten(seq)
        text = "".join(f"  {fmt(f)}\n" for f in flat.ante) + "⊢\n" + "".join(f"  {fmt(f)}\n" for f in flat.succ)
        if verdict is not None:
            good = verdict.verdict == Provability.PROVABLE
            text += out.paint(f"{verdict.verdict.value} from axiom set {axioms.name}", good) + "\n"
        out.emit(text)
    if verdict is not None and verdict.verdict != Provability.PROVABLE:
        return FAILED
    return OK


def _report_json(r, timings: bool) -> dict:
    out = {
        "gamma": r.gamma,
        "k": r.k,
        "clause_set_match": r.clause_set_match,
        "clause_set_size": len(r.clause_set.reduced),
        "refutation_verified": r.refutation_verified,
        "refutation_leaves": len(r.refutation.labels()),
        "oracle_verdict": r.oracle_verdict,
        "oracle_tree_verified": r.oracle_report == [],
        "herbrand_provable": r.herbrand_provable,
        "ok": r.ok,
    }
    if timings:
        out["timings_us"] = {k: int(v * 1e6) for k, v in sorted(r.timings.items())}
    return out


def cmd_report(args, out: Output) -> int:
    doc = _load(args.file)
    if not doc.ok:
        return USAGE
    b = _bundle(doc, args)
    b.crs  # build once before threads share it
    with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as pool:
        reports = list(pool.map(lambda g: eca_report(g, args.k, b), args.n_range))
    rows = [_report_json(r, args.timings) for r in reports]
    if args.format == "json":
        out.emit(sj.dumps(sj.envelope("report", instances=rows)))
    elif args.format == "dot":
        lines = ["digraph \"report\" {", "  node [shape=box];"]
        for row in rows:
            color = "palegreen" if row["ok"] else "lightpink"
            label = f"n={row['gamma']} k={row['k']}\\nclauses={row['clause_set_size']} leaves={row['refutation_leaves']}"
            lines.append(f"  g{row['gamma']} [label=\"{label}\", style=filled, fillcolor={color}];")
        for a, c in zip(rows, rows[1:]):
            lines.append(f"  g{a['gamma']} -> g{c['gamma']};")
        lines.append("}")
        out.emit("\n".join(lines) + "\n")
    else:
        head = f"{'n':>3} {'k':>3} {'clauses':>8} {'refuted':>8} {'oracle':>8} {'herbrand':>9}"
        lines = [head]
        for row in rows:
            lines.append(
                f"{row['gamma']:>3} {row['k']:>3} {row['clause_set_size']:>8} "
                f"{'yes' if row['refutation_verified'] else 'NO':>8} {row['oracle_verdict']:>8} "
                f"{'yes' if row['herbrand_provable'] else 'NO':>9}"
            )
        ok = all(row["ok"] for row in rows)
        lines.append(out.paint("all instances ok" if ok else "some instances failed", ok))
        out.emit("\n".join(lines) + "\n")
    return OK if all(row["ok"] for row in rows) else FAILED


# --------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json", "dot"), default="text")
    common.add_argument("--out", metavar="PATH", help="write output to PATH instead of stdout")

    p = argparse.ArgumentParser(prog="schematic-ceres", description="Schematic CERES pipeline over .lks documents")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", parents=[common], help="parse and check a document")
    c.add_argument("file")
    c.add_argument("--rho", help="resolution schema drawn by --format dot")
    c.set_defaults(func=cmd_check)

    c = sub.add_parser("unfold-proof", parents=[common], help="unfold a proof schema at a parameter")
    c.add_argument("file")
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--symbol")
    c.set_defaults(func=cmd_unfold_proof)

    c = sub.add_parser("clauseset", parents=[common], help="characteristic clause set at a parameter")
    c.add_argument("file")
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--reduce", action="store_true", help="drop tautologies and subsumed clauses")
    c.set_defaults(func=cmd_clauseset)

    c = sub.add_parser("refute", parents=[common], help="unfold a refutation schema")
    c.add_argument("file")
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--k", type=int, default=0)
    c.add_argument("--variant", default="corrected")
    c.add_argument("--verify", action="store_true")
    c.add_argument("--diff", action="store_true", help="show how the printed variant differs from the corrected one")
    c.set_defaults(func=cmd_refute)

    c = sub.add_parser("herbrand", parents=[common], help="assemble a Herbrand sequent")
    c.add_argument("file")
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--minimal", action="store_true")
    c.add_argument("--check", action="store_true", help="decide provability from the axiom set")
    c.add_argument("--axioms", help="axiom set name (default: corrected)")
    c.add_argument("--no-axioms", action="store_true", help="check against the empty axiom set")
    c.set_defaults(func=cmd_herbrand)

    c = sub.add_parser("report", parents=[common], help="batch report over a parameter range")
    c.add_argument("file")
    c.add_argument("--n-range", type=_n_range, required=True, metavar="A..B")
    c.add_argument("--k", type=int, default=0)
    c.add_argument("--axioms")
    c.add_argument("--jobs", type=int, default=1)
    c.add_argument("--timings", action="store_true", help="include wall-clock timings in microseconds")
    c.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    for name in ("n", "k"):
        if getattr(args, name, 0) is not None and getattr(args, name, 0) < 0:
            print(f"error: --{name} must be non-negative", file=sys.stderr)
            return USAGE
    try:
        return args.func(args, Output(args.out))
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE
    except KeyError as exc:
        print(f"error: {exc.args[0] if exc.args else exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
