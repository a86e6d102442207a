"""Parser from s-expressions to schema objects.

Every top-level form is handled independently: an error inside one form is
reported with its span and parsing continues with the next form.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from typing import Optional

from ..clauses import Clause
from ..herbrand import AxiomSchema, AxiomSet, HerbrandSystem, PrenexFormula, SpsSchema, WCall, WRule
from ..proofs import ProofError, ProofNode, ProofSchema, ProofSchemaPair, axiom, epsilon, infer, link
from ..resolution import (
    ClauseExpr,
    ClauseSchema,
    ClauseVarRef,
    RCall,
    ResolutionProofSchema,
    RhoRule,
    RLeaf,
    RRes,
    SubstitutionSchema,
    TemplateRef,
)
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
    Lambda,
    Neg,
    OmegaVar,
    Or,
    RewriteRule,
    RewriteSystem,
    RuleShapeError,
    SchemApp,
    Sequent,
    Signature,
    Sort,
    SortError,
    Succ,
    Term,
    Var,
    numeral,
)
from .sexpr import Diagnostic, SList, Span, Str, Sym, read


class ParseError(Exception):
    def __init__(self, node, message: str, targets: tuple = ()):
        super().__init__(message)
        self.span = getattr(node, "span", None)
        self.message = message
        self.targets = targets  # extra (kind, name) pairs for discrepancy hints


SORTS = {"omega": Sort.OMEGA, "iota": Sort.IOTA}
QUANT_RULES = {"all-l", "all-r", "ex-l", "ex-r"}
UNARY_RULES = {"and-l1", "and-l2", "or-r1", "or-r2", "imp-r", "neg-l", "neg-r",
               "weak-l", "weak-r", "contr-l", "contr-r"}
BINARY_RULES = {"and-r", "or-l", "imp-l", "cut"}


@dataclass(frozen=True)
class Discrepancy:
    id: str
    target: tuple  # e.g. ("rho", "4", "step")
    printed: str = ""
    corrected: str = ""
    note: str = ""

    def matches(self, kind: str, index) -> bool:
        return len(self.target) >= 2 and self.target[0] == kind and self.target[1] == str(index)


@dataclass
class Document:
    source: Optional[str] = None
    signature: Signature = field(default_factory=Signature)
    omega_vars: dict = field(default_factory=dict)
    iota_vars: dict = field(default_factory=dict)
    schem_vars: dict = field(default_factory=dict)
    clause_vars: dict = field(default_factory=dict)
    rewrite_rules: list = field(default_factory=list)
    abbrevs: dict = field(default_factory=dict)  # name -> (params, body sexpr)
    proof_schemas: dict = field(default_factory=dict)
    clause_schemas: dict = field(default_factory=dict)
    rho_schemas: dict = field(default_factory=dict)
    rho_params: dict = field(default_factory=dict)  # schema -> {index: (params, step var)}
    substitutions: dict = field(default_factory=dict)
    sps: dict = field(default_factory=dict)
    herbrand_systems: dict = field(default_factory=dict)
    axiom_sets: dict = field(default_factory=dict)
    discrepancies: dict = field(default_factory=dict)
    variants: dict = field(default_factory=dict)
    order: list = field(default_factory=list)  # (kind, name) in source order
    diagnostics: list = field(default_factory=list)
    _rewrite: Optional[RewriteSystem] = None

    @property
    def rewrite(self) -> RewriteSystem:
        if self._rewrite is None:
            self._rewrite = RewriteSystem(self.rewrite_rules, self.signature)
        return self._rewrite

    @property
    def errors(self) -> list:
        return [d for d in self.diagnostics if d.severity == "error"]

    @property
    def ok(self) -> bool:
        return not self.errors

    def semantic(self) -> tuple:
        """Everything that round-trips through the printer."""
        return (
            self.signature, self.omega_vars, self.iota_vars, self.schem_vars, self.clause_vars,
            set(self.rewrite_rules), self.abbrevs, self.proof_schemas, self.clause_schemas,
            {k: v.rules for k, v in self.rho_schemas.items()}, self.substitutions, self.sps,
            self.herbrand_systems, self.axiom_sets, self.discrepancies, self.variants,
        )

    def __eq__(self, other) -> bool:
        return isinstance(other, Document) and self.semantic() == other.semantic()


def _items(e, node_for_error=None) -> tuple:
    if not isinstance(e, SList):
        raise ParseError(node_for_error or e, "expected a list")
    return e.items


def _name(e) -> str:
    if not isinstance(e, Sym):
        raise ParseError(e, "expected a symbol")
    return e.name


class Parser:
    def __init__(self, doc: Document):
        self.doc = doc
        self.context: Optional[tuple] = None  # ("rho", index) while inside a rho form
        self.current_rho: Optional[str] = None
        self.current_herbrand: Optional[str] = None
        self.calls: list = []  # (schema, context, part, RCall, span)
        self.part: Optional[str] = None

    # ------------------------------------------------------------------ diagnostics

    def hint(self, targets: tuple = ()) -> Optional[str]:
        contexts = ([self.context] if self.context is not None else []) + list(targets)
        ids = {d.id for d in self.doc.discrepancies.values() for c in contexts if d.matches(*c)}
        if ids:
            return "see discrepancy " + ", ".join(sorted(ids))
        return None

    def error(self, span: Optional[Span], message: str, hint: Optional[str] = None, targets: tuple = ()) -> None:
        self.doc.diagnostics.append(Diagnostic("error", span, message, hint or self.hint(targets), self.doc.source))

    # ------------------------------------------------------------------ terms

    def term(self, e, bound: dict) -> Term:
        if isinstance(e, Sym):
            n = e.name
            if n.isdigit():
                return numeral(int(n))
            if n in bound:
                return bound[n]
            if n in self.doc.omega_vars:
                return OmegaVar(n)
            if n in self.doc.iota_vars:
                return Var(n, Sort.IOTA)
            if n in self.doc.signature.constants:
                return self.doc.signature.constants[n]
            if n in self.doc.schem_vars:
                raise ParseError(e, f"schematic variable {n} needs an index")
            raise ParseError(e, f"undeclared symbol {n}")
        if isinstance(e, Str):
            raise ParseError(e, "unexpected string")
        if not e.items:
            raise ParseError(e, "empty term")
        head = e.head
        if head is None:
            raise ParseError(e, "expected a function symbol")
        args = e.items[1:]
        sig = self.doc.signature
        if head == "s":
            if len(args) != 1:
                raise ParseError(e, "s takes one argument")
            a = self.term(args[0], bound)
            self._expect_sort(args[0], a, Sort.OMEGA, "s")
            return Succ(a)
        if head in self.doc.schem_vars:
            if len(args) != 1:
                raise ParseError(e, f"schematic variable {head} takes one index")
            a = self.term(args[0], bound)
            self._expect_sort(args[0], a, Sort.OMEGA, head)
            return SchemApp(head, a)
        if head in sig.functions or head in sig.defined:
            argsorts, result = sig.functions[head] if head in sig.functions else sig.defined[head]
            if len(args) != len(argsorts):
                raise ParseError(e, f"{head} expects {len(argsorts)} argument{'s' if len(argsorts) != 1 else ''}, got {len(args)}")
            ts = tuple(self.term(a, bound) for a in args)
            for a, t, s in zip(args, ts, argsorts):
                self._expect_sort(a, t, s, head)
            cls = App if head in sig.functions else DefApp
            return cls(head, ts, result)
        raise ParseError(e.items[0], f"undeclared function symbol {head}")

    @staticmethod
    def _expect_sort(node, t: Term, s: Sort, where: str) -> None:
        if t.sort != s:
            raise ParseError(node, f"{where}: expected a term of sort {s.value}, got sort {t.sort.value}")

    # ------------------------------------------------------------------ formulas

    def formula(self, e, bound: Optional[dict] = None):
        bound = bound or {}
        if isinstance(e, Sym):
            if e.name in self.doc.abbrevs:
                return self._expand(e, e.name, ())
            if e.name in self.doc.signature.predicates and not self.doc.signature.predicates[e.name]:
                return Atom(e.name, ())
            raise ParseError(e, f"undeclared formula symbol {e.name}")
        if not isinstance(e, SList) or e.head is None:
            raise ParseError(e, "expected a formula")
        head, args = e.head, e.items[1:]
        if head == "not":
            self._arity(e, 1)
            return Neg(self.formula(args[0], bound))
        if head in ("and", "or", "imp"):
            self._arity(e, 2)
            cls = {"and": And, "or": Or, "imp": Imp}[head]
            return cls(self.formula(args[0], bound), self.formula(args[1], bound))
        if head in ("forall", "exists"):
            self._arity(e, 2)
            var = self._binder(args[0], Sort.IOTA)
            inner = dict(bound)
            inner[var.name] = var
            cls = Forall if head == "forall" else Exists
            return cls(var, self.formula(args[1], inner))
        if head == "bigor":
            self._arity(e, 3)
            var = BoundVar(_name(args[0]), Sort.OMEGA)
            upper = self.term(args[1], bound)
            self._expect_sort(args[1], upper, Sort.OMEGA, "bigor")
            inner = dict(bound)
            inner[var.name] = var
            return BigOr(var, upper, self.formula(args[2], inner))
        if head in self.doc.abbrevs:
            return self._expand(e, head, args, bound)
        preds = self.doc.signature.predicates
        if head in preds:
            argsorts = preds[head]
            if len(args) != len(argsorts):
                raise ParseError(e, f"{head} expects {len(argsorts)} arguments, got {len(args)}")
            ts = tuple(self.term(a, bound) for a in args)
            for a, t, s in zip(args, ts, argsorts):
                if s is not None:
                    self._expect_sort(a, t, s, head)
            if any(s is None for s in argsorts) and len({t.sort for t in ts}) > 1:
                raise ParseError(e, f"{head}: arguments must share one sort")
            return Atom(head, ts)
        raise ParseError(e.items[0], f"undeclared predicate {head}")

    def _binder(self, e, default: Sort) -> BoundVar:
        if isinstance(e, SList):
            if len(e) != 2:
                raise ParseError(e, "binder is (name sort)")
            return BoundVar(_name(e[0]), self._sort(e[1]))
        return BoundVar(_name(e), default)

    def _sort(self, e) -> Sort:
        n = _name(e)
        if n not in SORTS:
            raise ParseError(e, f"unknown sort {n}")
        return SORTS[n]

    @staticmethod
    def _arity(e: SList, n: int) -> None:
        if len(e.items) - 1 != n:
            raise ParseError(e, f"{e.head} takes {n} argument{'s' if n != 1 else ''}, got {len(e.items) - 1}")

    def _expand(self, e, name: str, args, bound=None):
        params, body = self.doc.abbrevs[name]
        if len(args) != len(params):
            raise ParseError(e, f"abbreviation {name} expects {len(params)} arguments, got {len(args)}")
        mapping = dict(zip(params, args))

        def sub(x):
            if isinstance(x, Sym) and x.name in mapping:
                return mapping[x.name]
            if isinstance(x, SList):
                return SList(tuple(sub(y) for y in x.items), x.span)
            return x

        return self.formula(sub(body), bound)

    def sequent(self, e, bound: Optional[dict] = None) -> Sequent:
        if not (isinstance(e, SList) and e.head == "seq" and len(e) == 3):
            raise ParseError(e, "expected (seq (antecedent ...) (succedent ...))")
        return Sequent(tuple(self.formula(f, bound) for f in _items(e[1])),
                       tuple(self.formula(f, bound) for f in _items(e[2])))

    def clause(self, e) -> Clause:
        s = self.sequent(e)
        for f in s.formulas():
            if not isinstance(f, Atom):
                raise ParseError(e, "clauses contain atoms only")
        return Clause(s.ante, s.succ)

    # ------------------------------------------------------------------ proofs

    def proof(self, e) -> ProofNode:
        if not isinstance(e, SList) or e.head is None:
            raise ParseError(e, "expected a proof")
        flags = {x.name for x in e.items if isinstance(x, Sym) and x.name.startswith(":")}
        items = [x for x in e.items[1:] if not (isinstance(x, Sym) and x.name.startswith(":"))]
        unknown = flags - {":theory", ":reconstructed"}
        if unknown:
            raise ParseError(e, f"unknown flag {sorted(unknown)[0]}")
        recon = ":reconstructed" in flags
        rule = e.head
        try:
            if rule == "axiom":
                if len(items) != 1:
                    raise ParseError(e, "axiom takes a sequent")
                return axiom(self.sequent(items[0]), theory=":theory" in flags, reconstructed=recon)
            if rule == "link":
                if len(items) != 3:
                    raise ParseError(e, "link is (link symbol index sequent)")
                return link(_name(items[0]), (self.term(items[1], {}),), self.sequent(items[2]))
            if rule in ("eps-l", "eps-r"):
                if len(items) != 3:
                    raise ParseError(e, f"{rule} is ({rule} new old premise)")
                return epsilon(rule[-1], self.formula(items[0]), self.formula(items[1]), self.proof(items[2]), recon)
            if rule in QUANT_RULES:
                if len(items) != 3:
                    raise ParseError(e, f"{rule} is ({rule} principal term premise)")
                return infer(rule, [self.proof(items[2])], self.formula(items[0]), self.term(items[1], {}), recon)
            if rule in UNARY_RULES:
                if len(items) != 2:
                    raise ParseError(e, f"{rule} is ({rule} principal premise)")
                return infer(rule, [self.proof(items[1])], self.formula(items[0]), reconstructed=recon)
            if rule in BINARY_RULES:
                if len(items) != 3:
                    raise ParseError(e, f"{rule} is ({rule} principal left right)")
                return infer(rule, [self.proof(items[1]), self.proof(items[2])], self.formula(items[0]), reconstructed=recon)
        except (ProofError, SortError) as exc:
            raise ParseError(e, f"{rule}: {exc}") from None
        raise ParseError(e.items[0], f"unknown rule {rule}")

    # ------------------------------------------------------------------ resolution terms

    def clause_expr(self, e, scope: dict) -> ClauseExpr:
        parts: list = []

        def visit(x):
            if isinstance(x, Sym):
                if x.name in self.doc.clause_vars:
                    if scope.get(x.name) != "clause":
                        raise ParseError(x, f"clause variable {x.name} is not a parameter")
                    parts.append(ClauseVarRef(x.name))
                    return
                raise ParseError(x, f"undeclared clause variable {x.name}")
            if not isinstance(x, SList):
                raise ParseError(x, "expected a clause expression")
            if x.head == "o":
                for y in x.items[1:]:
                    visit(y)
                return
            if x.head == "seq":
                c = self.clause(x)
                self._check_scope(x, c.as_sequent(), scope)
                parts.append(c)
                return
            if x.head in self.doc.clause_schemas:
                parts.append(self.template_ref(x, scope))
                return
            raise ParseError(x, f"unknown clause schema {x.head}")

        visit(e)
        return ClauseExpr(tuple(parts))

    def template_ref(self, e: SList, scope: dict) -> TemplateRef:
        tmpl = self.doc.clause_schemas[e.head]
        args = e.items[1:]
        if len(args) != len(tmpl.params):
            raise ParseError(e, f"{e.head} expects {len(tmpl.params)} arguments, got {len(args)}", (("clause", e.head),))
        return TemplateRef(e.head, tuple(self._argument(a, kind, scope) for a, (_, kind) in zip(args, tmpl.params)))

    def _argument(self, a, kind: str, scope: dict):
        if kind == "schem":
            n = _name(a)
            if n not in self.doc.schem_vars:
                raise ParseError(a, f"undeclared schematic variable {n}")
            if scope.get(n) != "schem":
                raise ParseError(a, f"schematic variable {n} is not a parameter")
            return n
        if kind == "clause":
            return self.clause_expr(a, scope)
        t = self.term(a, {})
        self._expect_sort(a, t, Sort.OMEGA, "argument")
        self._check_scope(a, t, scope)
        return t

    def _check_scope(self, node, e, scope: dict) -> None:
        from ..terms import iter_terms

        for t in iter_terms(e):
            if isinstance(t, OmegaVar) and scope.get(t.name) != "omega":
                raise ParseError(node, f"omega variable {t.name} is not bound here")
            if isinstance(t, SchemApp) and scope.get(t.name) != "schem":
                raise ParseError(node, f"schematic variable {t.name} is not a parameter")
            if isinstance(t, Var):
                raise ParseError(node, f"free variable {t.name} in a resolution term")

    def rterm(self, e, scope: dict):
        if isinstance(e, SList) and e.head == "r":
            if len(e) != 4:
                raise ParseError(e, f"r takes 3 arguments (left, right, pivot), got {len(e) - 1}")
            left = self.rterm(e[1], scope)
            right = self.rterm(e[2], scope)
            pivot = self.formula(e[3])
            if not isinstance(pivot, Atom):
                raise ParseError(e[3], "pivot must be an atom")
            self._check_scope(e[3], pivot, scope)
            return RRes(left, right, pivot)
        if isinstance(e, SList) and e.head == "call":
            if len(e) < 3:
                raise ParseError(e, "call is (call index parameter args...)")
            idx = self._index(e[1])
            param = self.term(e[2], {})
            self._expect_sort(e[2], param, Sort.OMEGA, "call")
            self._check_scope(e[2], param, scope)
            args = tuple(self._argument(a, self._arg_kind(a), scope) for a in e.items[3:])
            call = RCall(idx, param, args)
            self.calls.append((self.current_rho, self.context, self.part, call, e.span))
            return call
        return RLeaf(self.clause_expr(e, scope))

    def _arg_kind(self, a) -> str:
        if isinstance(a, Sym) and a.name in self.doc.schem_vars:
            return "schem"
        if isinstance(a, Sym) and a.name in self.doc.clause_vars:
            return "clause"
        if isinstance(a, SList) and (a.head in ("o", "seq") or a.head in self.doc.clause_schemas):
            return "clause"
        return "omega"

    def check_calls(self) -> None:
        """Arity, kinds and ordering of rho calls, once every rule is known."""
        for schema, ctx, part, call, span in self.calls:
            self.context = ctx
            caller = ctx[1] if ctx else None
            table = self.doc.rho_params.get(schema, {})
            if call.index not in table:
                self.error(span, f"rho {caller}: call to undefined rho {call.index}")
                continue
            params, _ = table[call.index]
            if len(call.args) != len(params):
                self.error(span, f"rho {caller}: rho {call.index} expects {len(params)} arguments after the parameter, got {len(call.args)}")
                continue
            for a, (pname, kind) in zip(call.args, params):
                got = "schem" if isinstance(a, str) else "clause" if isinstance(a, ClauseExpr) else "omega"
                if got != kind:
                    self.error(span, f"rho {caller}: argument for {pname} of rho {call.index} must be {kind}, got {got}")
            if caller is not None and call.index <= caller:
                rule_step_var = self.doc.rho_params[schema][caller][1]
                if not (part == "step" and call.param == OmegaVar(rule_step_var)):
                    self.error(span, f"rho {caller}: call to rho {call.index} must be at the step variable of a step case")
        self.context = None

    @staticmethod
    def _index(e) -> int:
        if isinstance(e, Sym) and e.name.isdigit():
            return int(e.name)
        raise ParseError(e, "expected a rho index")

    def _param_kind(self, e) -> tuple:
        n = _name(e)
        if n in self.doc.omega_vars:
            return n, "omega"
        if n in self.doc.schem_vars:
            return n, "schem"
        if n in self.doc.clause_vars:
            return n, "clause"
        raise ParseError(e, f"undeclared parameter {n}")

    # ------------------------------------------------------------------ top level

    def declare(self, kind: str, name: str, node) -> None:
        taken = (self.doc.signature.functions, self.doc.signature.defined, self.doc.signature.constants,
                 self.doc.signature.predicates, self.doc.omega_vars, self.doc.iota_vars, self.doc.schem_vars,
                 self.doc.clause_vars, self.doc.abbrevs)
        if any(name in t for t in taken) or name in ("s", "o", "r", "call", "seq"):
            raise ParseError(node, f"{name} is already declared")
        self.doc.order.append((kind, name))

    def toplevel(self, e) -> None:
        if not isinstance(e, SList) or e.head is None:
            raise ParseError(e, "expected a top-level form")
        handler = getattr(self, "top_" + e.head.replace("-", "_"), None)
        if handler is None:
            raise ParseError(e.items[0], f"unknown form {e.head}")
        handler(e)

    def top_defsort(self, e) -> None:
        for s in e.items[1:]:
            self._sort(s)

    def top_const(self, e) -> None:
        if len(e) not in (3, 4):
            raise ParseError(e, "const is (const name sort [display])")
        name = _name(e[1])
        display = e[3].value if len(e) == 4 and isinstance(e[3], Str) else None
        c = Const(name, self._sort(e[2]), display)
        self.declare("const", name, e)
        self.doc.signature.constants[name] = c

    def top_fun(self, e) -> None:
        self._arity(e, 3)
        name = _name(e[1])
        argsorts = tuple(self._sort(s) for s in _items(e[2]))
        result = self._sort(e[3])
        self.declare("fun", name, e)
        self.doc.signature.functions[name] = (argsorts, result)

    def top_pred(self, e) -> None:
        name = _name(e[1])
        argsorts = tuple(None if _name(s) == "any" else self._sort(s) for s in e.items[2:])
        self.declare("pred", name, e)
        self.doc.signature.predicates[name] = argsorts

    def top_var(self, e) -> None:
        self._arity(e, 2)
        name = _name(e[1])
        if self._sort(e[2]) != Sort.IOTA:
            raise ParseError(e[2], "free variables are of sort iota; use omega-var for omega")
        self.declare("var", name, e)
        self.doc.iota_vars[name] = Var(name, Sort.IOTA)

    def top_omega_var(self, e) -> None:
        for x in e.items[1:]:
            self.declare("omega-var", _name(x), x)
            self.doc.omega_vars[x.name] = None

    def top_schem(self, e) -> None:
        for x in e.items[1:]:
            self.declare("schem", _name(x), x)
            self.doc.schem_vars[x.name] = None

    def top_clause_var(self, e) -> None:
        for x in e.items[1:]:
            self.declare("clause-var", _name(x), x)
            self.doc.clause_vars[x.name] = None

    def top_abbrev(self, e) -> None:
        self._arity(e, 3)
        name = _name(e[1])
        params = tuple(_name(p) for p in _items(e[2]))
        self.declare("abbrev", name, e)
        self.doc.abbrevs[name] = (params, e[3])

    def top_defun(self, e) -> None:
        """``(defun h ((0) rhs) ((s k) rhs))``; extra arguments follow the recursion pattern."""
        name = _name(e[1])
        rules = e.items[2:]
        if len(rules) != 2:
            raise ParseError(e, f"{name} needs one 0-rule and one s-rule")
        pats = []
        for r in rules:
            items = _items(r)
            if len(items) != 2:
                raise ParseError(r, "rule is (pattern rhs)")
            pat = items[0]
            pat_args = [pat] if isinstance(pat, SList) and pat.head == "s" else list(_items(pat))
            pats.append((pat_args, items[1], r))
        base = next((p for p in pats if isinstance(p[0][0], Sym) and p[0][0].name == "0"), None)
        step = next((p for p in pats if isinstance(p[0][0], SList) and p[0][0].head == "s"), None)
        if base is None or step is None:
            raise ParseError(e, f"{name} needs one 0-rule and one s-rule")
        extra = [self.term(a, {}) for a in base[0][1:]]
        argsorts = (Sort.OMEGA,) + tuple(t.sort for t in extra)
        result = self.term(base[1], {}).sort
        self.declare("defun", name, e)
        self.doc.signature.defined[name] = (argsorts, result)
        try:
            new_rules = []
            for pat_args, rhs, node in (base, step):
                if len(pat_args) != len(argsorts):
                    raise ParseError(node, f"{name} expects {len(argsorts)} arguments")
                lhs_args = tuple(self.term(a, {}) for a in pat_args)
                new_rules.append(RewriteRule(DefApp(name, lhs_args, result), self.term(rhs, {})))
            candidate = self.doc.rewrite_rules + new_rules
            RewriteSystem(candidate, self.doc.signature)
        except (ParseError, RuleShapeError) as exc:
            # the declaration stays so later uses do not cascade into more errors
            if isinstance(exc, RuleShapeError):
                raise ParseError(e, str(exc)) from None
            raise
        self.doc.rewrite_rules = candidate
        self.doc._rewrite = None

    def top_clause(self, e) -> None:
        """``(clause C (params) seq)`` or ``(clause C (params) (base seq) (step j seq))``."""
        name = _name(e[1])
        params = tuple(self._param_kind(p) for p in _items(e[2]))
        rest = e.items[3:]
        if len(rest) == 1:
            cs = ClauseSchema(name, params, self.clause(rest[0]))
        elif len(rest) == 2 and rest[0].head == "base" and rest[1].head == "step":
            step = _items(rest[1])
            if len(step) != 3:
                raise ParseError(rest[1], "step is (step var seq)")
            cs = ClauseSchema(name, params, self.clause(rest[0][1]), self.clause(step[2]), _name(step[1]))
        else:
            raise ParseError(e, "clause is (clause name (params) seq)")
        problems = cs.check()
        if problems:
            raise ParseError(e, problems[0])
        if name in self.doc.clause_schemas:
            raise ParseError(e[1], f"clause schema {name} is already defined")
        self.doc.clause_schemas[name] = cs
        self.doc.order.append(("clause", name))

    def top_proof_schema(self, e) -> None:
        name = _name(e[1])
        pairs = []
        for p in e.items[2:]:
            if not (isinstance(p, SList) and p.head == "pair"):
                raise ParseError(p, "expected (pair ...)")
            fields = self._fields(p, 2, {"param", "step-var", "end", "base", "step"})
            sym = _name(p[1])
            param = _name(fields["param"][0])
            step_var = _name(fields["step-var"][0])
            for v in (param, step_var):
                if v not in self.doc.omega_vars:
                    raise ParseError(p, f"undeclared omega variable {v}")
            pairs.append(ProofSchemaPair(sym, param, step_var, self.sequent(fields["end"][0]),
                                         self.proof(fields["base"][0]), self.proof(fields["step"][0])))
        if not pairs:
            raise ParseError(e, "a proof schema needs at least one pair")
        self.doc.proof_schemas[name] = ProofSchema(tuple(pairs), self.doc.rewrite)
        self.doc.order.append(("proof-schema", name))

    def _fields(self, e: SList, start: int, allowed: set) -> dict:
        out = {}
        for f in e.items[start:]:
            if not isinstance(f, SList) or f.head not in allowed:
                raise ParseError(f, f"expected one of {', '.join(sorted(allowed))}")
            if f.head in out:
                raise ParseError(f, f"duplicate {f.head}")
            out[f.head] = f.items[1:]
        missing = allowed - set(out)
        if missing:
            raise ParseError(e, f"missing {', '.join(sorted(missing))}")
        return out

    def top_resolution_schema(self, e) -> None:
        name = _name(e[1])
        if name not in self.doc.rho_schemas:
            self.doc.rho_schemas[name] = ResolutionProofSchema({}, self.doc.clause_schemas, None)
            self.doc.rho_params[name] = {}
            self.doc.order.append(("resolution-schema", name))
        self.current_rho = name

    def top_rho(self, e) -> None:
        if self.current_rho is None:
            raise ParseError(e, "rho outside a resolution-schema")
        idx = self._index(e[1])
        self.context = ("rho", idx)
        fields = {}
        for f in e.items[2:]:
            if not isinstance(f, SList) or f.head not in ("params", "step-var", "base", "step"):
                raise ParseError(f, "expected params, step-var, base or step")
            fields[f.head] = f
        params = tuple(self._param_kind(p) for p in fields["params"].items[1:]) if "params" in fields else ()
        step_var = _name(fields["step-var"][1]) if "step-var" in fields else "n"
        if step_var not in self.doc.omega_vars:
            raise ParseError(e, f"undeclared omega variable {step_var}")
        table = self.doc.rho_params[self.current_rho]
        if idx in table:
            raise ParseError(e[1], f"rho {idx} is already defined")
        table[idx] = (params, step_var)
        scope = {p: kind for p, kind in params}
        ok = True
        bodies = {}
        for part in ("base", "step"):
            f = fields.get(part)
            if f is None:
                self.error(e.span, f"rho {idx}: missing {part}")
                ok = False
                continue
            if len(f) != 2:
                self.error(f.span, f"rho {idx} {part}: expected one resolution term, got {len(f) - 1}")
                ok = False
                continue
            sc = dict(scope)
            if part == "step":
                sc[step_var] = "omega"
            self.part = part
            try:
                bodies[part] = self.rterm(f[1], sc)
            except ParseError as exc:
                self.error(exc.span, f"rho {idx} {part}: {exc.message}", targets=exc.targets)
                ok = False
        if ok:
            self.doc.rho_schemas[self.current_rho].rules[idx] = RhoRule(idx, params, step_var, bodies["base"], bodies["step"])
            self.doc.rho_schemas[self.current_rho].rewrite = self.doc.rewrite

    def top_substitution(self, e) -> None:
        name = _name(e[1])
        s = SubstitutionSchema()
        for f in e.items[2:]:
            items = _items(f)
            if f.head == "schem" and len(items) == 3:
                lam = _items(items[2])
                if not (isinstance(items[2], SList) and items[2].head == "lambda" and len(lam) == 3):
                    raise ParseError(items[2], "expected (lambda k term)")
                var = _name(lam[1])
                if var not in self.doc.omega_vars:
                    raise ParseError(lam[1], f"undeclared omega variable {var}")
                body = self.term(lam[2], {})
                s.schem[_name(items[1])] = Lambda(var, body)
            elif f.head == "clause" and len(items) == 3:
                s.clause[_name(items[1])] = self.clause(items[2])
            elif f.head == "omega" and len(items) == 3:
                s.omega[_name(items[1])] = self.term(items[2], {})
            else:
                raise ParseError(f, "expected (schem x (lambda k t)), (clause Y seq) or (omega k t)")
        problems = s.check()
        if problems:
            raise ParseError(e, problems[0])
        self.doc.substitutions[name] = s
        self.doc.order.append(("substitution", name))

    def _wsym(self, e) -> str:
        items = _items(e)
        if not (e.head == "w" and len(items) == 3):
            raise ParseError(e, "expected (w name index)")
        return f"{_name(items[1])}.{_name(items[2])}"

    def top_sps(self, e) -> None:
        name = _name(e[1])
        delta, pi, univ, exist = [], [], [], []
        param = None
        for f in e.items[2:]:
            items = _items(f)
            if f.head == "param":
                param = _name(items[1])
            elif f.head in ("delta", "pi"):
                (delta if f.head == "delta" else pi).extend(self.formula(x) for x in items[1:])
            elif f.head in ("forall", "exists"):
                if len(items) != 4:
                    raise ParseError(f, f"({f.head} (w name i) (vars) matrix)")
                wsym = self._wsym(items[1])
                vs = tuple(BoundVar(_name(v), Sort.IOTA) for v in _items(items[2]))
                bound = {v.name: v for v in vs}
                pf = PrenexFormula(f.head, wsym, vs, self.formula(items[3], bound))
                (univ if f.head == "forall" else exist).append(pf)
            else:
                raise ParseError(f, "expected param, delta, pi, forall or exists")
        if param is None:
            raise ParseError(e, "missing param")
        self.doc.sps[name] = SpsSchema(name, param, tuple(delta), tuple(pi), tuple(univ), tuple(exist))
        self.doc.order.append(("sps", name))

    def top_herbrand_system(self, e) -> None:
        name = _name(e[1])
        fields = self._fields(e, 2, {"step-var"})
        step_var = _name(fields["step-var"][0])
        self.doc.herbrand_systems[name] = HerbrandSystem(name, step_var, {}, self.doc.rewrite)
        self.doc.order.append(("herbrand-system", name))
        self.current_herbrand = name

    def top_herbrand_rule(self, e) -> None:
        if self.current_herbrand is None:
            raise ParseError(e, "herbrand-rule outside a herbrand-system")
        hs = self.doc.herbrand_systems[self.current_herbrand]
        wsym = self._wsym(e[1])
        fields = self._fields(e, 2, {"base", "step"})
        items = {part: tuple(self._witem(x) for x in fields[part]) for part in ("base", "step")}
        hs.rules[wsym] = WRule(wsym, items["base"], items["step"])
        hs.rewrite = self.doc.rewrite

    def _witem(self, e):
        if isinstance(e, SList) and e.head == "tuple":
            return tuple(self.term(x, {}) for x in e.items[1:])
        if isinstance(e, SList) and e.head == "call" and len(e) == 3:
            return WCall(self._wsym(e[1]), self.term(e[2], {}))
        raise ParseError(e, "expected (tuple t ...) or (call (w name i) arg)")

    def top_axiom_set(self, e) -> None:
        name = _name(e[1])
        param = None
        axioms = []
        for f in e.items[2:]:
            if f.head == "param":
                param = _name(f[1])
                continue
            if f.head != "axiom":
                raise ParseError(f, "expected (axiom name [range] seq)")
            items = f.items[1:]
            ax_name = _name(items[0])
            if len(items) == 3:
                rng = _items(items[1])
                if items[1].head != "range" or len(rng) != 4:
                    raise ParseError(items[1], "expected (range j lo hi)")
                axioms.append(AxiomSchema(ax_name, self.sequent(items[2]), _name(rng[1]),
                                          self.term(rng[2], {}), self.term(rng[3], {})))
            elif len(items) == 2:
                axioms.append(AxiomSchema(ax_name, self.sequent(items[1])))
            else:
                raise ParseError(f, "expected (axiom name [range] seq)")
        if param is None:
            raise ParseError(e, "missing param")
        self.doc.axiom_sets[name] = AxiomSet(name, param, tuple(axioms))
        self.doc.order.append(("axiom-set", name))

    def top_discrepancy(self, e) -> None:
        did = _name(e[1])
        target: tuple = ()
        text = {"printed": "", "corrected": "", "note": ""}
        for f in e.items[2:]:
            if f.head == "target":
                target = tuple(_name(x) for x in f.items[1:])
            elif f.head in text and len(f) == 2 and isinstance(f[1], Str):
                text[f.head] = f[1].value
            else:
                raise ParseError(f, "expected target, printed, corrected or note")
        self.doc.discrepancies[did] = Discrepancy(did, target, text["printed"], text["corrected"], text["note"])
        self.doc.order.append(("discrepancy", did))

    def top_variant(self, e) -> None:
        if len(e) != 3 or not isinstance(e[2], Str):
            raise ParseError(e, 'variant is (variant name "path")')
        self.doc.variants[_name(e[1])] = e[2].value
        self.doc.order.append(("variant", e[1].name))


def _form_context(form) -> Optional[tuple]:
    if isinstance(form, SList) and form.head == "rho" and len(form) > 1 and isinstance(form[1], Sym) and form[1].name.isdigit():
        return ("rho", int(form[1].name))
    return None


def parse(text: str, source: Optional[str] = None, base: Optional[Document] = None) -> Document:
    """Parse DSL ``text``; diagnostics are collected on ``Document.diagnostics``.

    With ``base`` the declarations and definitions of that document are in
    scope (used for variant files that extend a corpus file).
    """
    if base is not None:
        doc = copy.deepcopy(base)
        doc.source = source
        doc.diagnostics = []
        doc.order = []
    else:
        doc = Document(source=source)
    forms, read_diags = read(text, source)
    p = Parser(doc)
    starts = {(f.span.line, f.span.col): f for f in forms if isinstance(f, SList)}
    for d in read_diags:
        ctx = _form_context(starts.get((d.span.line, d.span.col))) if d.span else None
        p.context = ctx
        doc.diagnostics.append(Diagnostic(d.severity, d.span, d.message, d.hint or p.hint(), d.source))
    for f in forms:
        p.context = _form_context(f)
        try:
            p.toplevel(f)
        except ParseError as exc:
            p.error(exc.span, exc.message, targets=exc.targets)
    p.check_calls()
    return doc


def parse_file(path, base: Optional[Document] = None) -> Document:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read(), str(path), base)
