"""Document -> DSL text.  ``parse(print_document(d))`` equals ``d``."""

from __future__ import annotations

from ..clauses import Clause
from ..herbrand import WCall
from ..proofs import ProofNode
from ..resolution import ClauseExpr, ClauseVarRef, RCall, RLeaf, RRes, TemplateRef
from ..terms import (
    And,
    App,
    Atom,
    BigOr,
    BoundVar,
    Const,
    DefApp,
    Exists,
    Forall,
    Imp,
    Neg,
    OmegaVar,
    Or,
    SchemApp,
    Sequent,
    Sort,
    Succ,
    Var,
    Zero,
    numeral_value,
)
from .sexpr import lst, string, sym, write


def term_sx(t):
    v = numeral_value(t)
    if v is not None:
        return sym(str(v))
    if isinstance(t, Succ):
        return lst("s", term_sx(t.arg))
    if isinstance(t, (OmegaVar, Var, BoundVar, Const)):
        return sym(t.name)
    if isinstance(t, SchemApp):
        return lst(t.name, term_sx(t.index))
    if isinstance(t, (App, DefApp)):
        return lst(t.fn, *[term_sx(a) for a in t.args])
    if isinstance(t, Zero):
        return sym("0")
    raise TypeError(f"cannot print term {t!r}")


def formula_sx(f):
    if isinstance(f, Atom):
        return lst(f.pred, *[term_sx(a) for a in f.args]) if f.args else sym(f.pred)
    if isinstance(f, Neg):
        return lst("not", formula_sx(f.body))
    if isinstance(f, (And, Or, Imp)):
        op = {And: "and", Or: "or", Imp: "imp"}[type(f)]
        return lst(op, formula_sx(f.left), formula_sx(f.right))
    if isinstance(f, (Forall, Exists)):
        v = sym(f.var.name) if f.var.sort == Sort.IOTA else lst(f.var.name, f.var.sort.value)
        return lst("forall" if isinstance(f, Forall) else "exists", v, formula_sx(f.body))
    if isinstance(f, BigOr):
        return lst("bigor", f.index.name, term_sx(f.upper), formula_sx(f.body))
    raise TypeError(f"cannot print formula {f!r}")


def sequent_sx(s):
    if isinstance(s, Clause):
        s = s.as_sequent()
    return lst("seq", lst(*[formula_sx(f) for f in s.ante]), lst(*[formula_sx(f) for f in s.succ]))


def proof_sx(p: ProofNode):
    flags = []
    if p.theory:
        flags.append(":theory")
    if p.reconstructed:
        flags.append(":reconstructed")
    r = p.rule
    if r == "axiom":
        return lst("axiom", sequent_sx(p.conclusion), *flags)
    if r == "link":
        return lst("link", p.link.symbol, term_sx(p.link.args[0]), sequent_sx(p.conclusion))
    if r in ("eps-l", "eps-r"):
        a = p.aux[0]
        old = p.premises[0].conclusion.side(a.side)[a.index]
        return lst(r, formula_sx(p.principal), formula_sx(old), proof_sx(p.premises[0]), *flags)
    if r in ("all-l", "all-r", "ex-l", "ex-r"):
        return lst(r, formula_sx(p.principal), term_sx(p.term), proof_sx(p.premises[0]), *flags)
    if r == "perm":
        raise TypeError("permutation nodes only occur in unfolded proofs")
    return lst(r, formula_sx(p.principal), *[proof_sx(q) for q in p.premises], *flags)


def clause_expr_sx(e: ClauseExpr):
    parts = []
    for p in e.parts:
        if isinstance(p, ClauseVarRef):
            parts.append(sym(p.name))
        elif isinstance(p, TemplateRef):
            parts.append(lst(p.name, *[arg_sx(a) for a in p.args]))
        else:
            parts.append(sequent_sx(p))
    if not parts:
        return sequent_sx(Sequent())
    return parts[0] if len(parts) == 1 else lst("o", *parts)


def arg_sx(a):
    if isinstance(a, str):
        return sym(a)
    if isinstance(a, ClauseExpr):
        return clause_expr_sx(a)
    return term_sx(a)


def rterm_sx(t):
    if isinstance(t, RRes):
        return lst("r", rterm_sx(t.left), rterm_sx(t.right), formula_sx(t.pivot))
    if isinstance(t, RCall):
        return lst("call", str(t.index), term_sx(t.param), *[arg_sx(a) for a in t.args])
    if isinstance(t, RLeaf):
        return clause_expr_sx(t.expr)
    raise TypeError(f"cannot print resolution term {t!r}")


def _wsym_sx(name: str):
    base, idx = name.rsplit(".", 1)
    return lst("w", base, idx)


def _sort_name(s) -> str:
    return "any" if s is None else s.value


def _forms(doc):
    sig = doc.signature
    for kind, name in doc.order:
        if kind == "const":
            c = sig.constants[name]
            yield lst("const", name, c.sort.value, *([string(c.display)] if c.display is not None else []))
        elif kind == "fun":
            argsorts, result = sig.functions[name]
            yield lst("fun", name, lst(*[s.value for s in argsorts]), result.value)
        elif kind == "pred":
            yield lst("pred", name, *[_sort_name(s) for s in sig.predicates[name]])
        elif kind == "var":
            yield lst("var", name, "iota")
        elif kind in ("omega-var", "schem", "clause-var"):
            yield lst(kind, name)
        elif kind == "abbrev":
            params, body = doc.abbrevs[name]
            yield lst("abbrev", name, lst(*params), body)
        elif kind == "defun":
            yield _defun_sx(doc, name)
        elif kind == "clause":
            cs = doc.clause_schemas[name]
            params = lst(*[p for p, _ in cs.params])
            if cs.step is None:
                yield lst("clause", name, params, sequent_sx(cs.base))
            else:
                yield lst("clause", name, params, lst("base", sequent_sx(cs.base)),
                          lst("step", cs.step_var, sequent_sx(cs.step)))
        elif kind == "proof-schema":
            ps = doc.proof_schemas[name]
            pairs = [lst("pair", p.symbol, lst("param", p.param), lst("step-var", p.step_var),
                         lst("end", sequent_sx(p.end)), lst("base", proof_sx(p.base)), lst("step", proof_sx(p.step)))
                     for p in ps.pairs]
            yield lst("proof-schema", name, *pairs)
        elif kind == "resolution-schema":
            yield lst("resolution-schema", name)
            for idx, rule in sorted(doc.rho_schemas[name].rules.items()):
                yield lst("rho", str(idx), lst("params", *[p for p, _ in rule.params]), lst("step-var", rule.step_var),
                          lst("base", rterm_sx(rule.base)), lst("step", rterm_sx(rule.step)))
        elif kind == "substitution":
            s = doc.substitutions[name]
            parts = [lst("schem", k, lst("lambda", v.var, term_sx(v.body))) for k, v in s.schem.items()]
            parts += [lst("clause", k, sequent_sx(v)) for k, v in s.clause.items()]
            parts += [lst("omega", k, term_sx(v)) for k, v in s.omega.items()]
            yield lst("substitution", name, *parts)
        elif kind == "sps":
            s = doc.sps[name]
            parts = [lst("param", s.param)]
            if s.delta:
                parts.append(lst("delta", *[formula_sx(f) for f in s.delta]))
            for q in s.universals + s.existentials:
                parts.append(lst(q.kind, _wsym_sx(q.wsym), lst(*[v.name for v in q.vars]), formula_sx(q.matrix)))
            if s.pi:
                parts.append(lst("pi", *[formula_sx(f) for f in s.pi]))
            yield lst("sps", name, *parts)
        elif kind == "herbrand-system":
            hs = doc.herbrand_systems[name]
            yield lst("herbrand-system", name, lst("step-var", hs.step_var))
            for wsym, rule in hs.rules.items():
                yield lst("herbrand-rule", _wsym_sx(wsym), lst("base", *[_witem_sx(i) for i in rule.base]),
                          lst("step", *[_witem_sx(i) for i in rule.step]))
        elif kind == "axiom-set":
            a = doc.axiom_sets[name]
            axioms = []
            for ax in a.axioms:
                rng = [lst("range", ax.range_var, term_sx(ax.lo), term_sx(ax.hi))] if ax.range_var else []
                axioms.append(lst("axiom", ax.name, *rng, sequent_sx(ax.seq)))
            yield lst("axiom-set", name, lst("param", a.param), *axioms)
        elif kind == "discrepancy":
            d = doc.discrepancies[name]
            yield lst("discrepancy", name, lst("target", *d.target), lst("printed", string(d.printed)),
                      lst("corrected", string(d.corrected)), lst("note", string(d.note)))
        elif kind == "variant":
            yield lst("variant", name, string(doc.variants[name]))
        else:
            raise ValueError(f"unknown declaration kind {kind}")


def _witem_sx(item):
    if isinstance(item, WCall):
        return lst("call", _wsym_sx(item.symbol), term_sx(item.arg))
    return lst("tuple", *[term_sx(t) for t in item])


def _defun_sx(doc, name: str):
    rules = [r for r in doc.rewrite_rules if r.lhs.fn == name]
    base = next(r for r in rules if isinstance(r.lhs.args[0], Zero))
    step = next(r for r in rules if isinstance(r.lhs.args[0], Succ))
    out = []
    for r in (base, step):
        args = [term_sx(a) for a in r.lhs.args]
        pat = args[0] if isinstance(r.lhs.args[0], Succ) and len(args) == 1 else lst(*args)
        out.append(lst(pat, term_sx(r.rhs)))
    return lst("defun", name, *out)


def print_document(doc, width: int = 100) -> str:
    return "\n\n".join(write(f, 0, width) for f in _forms(doc)) + "\n"
