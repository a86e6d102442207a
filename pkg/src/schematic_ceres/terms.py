"""Two-sorted schematic terms and formulas, substitutions and the rewrite engine.

The schematic sort ``omega`` holds numerals built from :class:`Zero` and
:class:`Succ`; the individual sort ``iota`` holds ordinary first-order terms.
Defined function symbols are primitive recursive in their first argument and
are unrolled by :func:`normalize`.  The iterated disjunction :class:`BigOr` is
the only defined predicate and is unrolled by the same engine.

All objects are immutable; every operation returns new objects.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Callable, Iterable, Iterator, Optional, Union


class Sort(str, Enum):
    OMEGA = "omega"
    IOTA = "iota"


class SortError(ValueError):
    """Raised when an expression is not well sorted."""


class RuleShapeError(ValueError):
    """Raised when a rewrite system is not primitive recursive in shape."""


# --------------------------------------------------------------------------
# terms


@dataclass(frozen=True)
class Term:
    def __str__(self) -> str:
        return fmt(self)

    @cached_property
    def key(self) -> str:
        return fmt(self)


@dataclass(frozen=True)
class Zero(Term):
    @property
    def sort(self) -> Sort:
        return Sort.OMEGA


@dataclass(frozen=True)
class Succ(Term):
    arg: Term

    @property
    def sort(self) -> Sort:
        return Sort.OMEGA


@dataclass(frozen=True)
class OmegaVar(Term):
    name: str

    @property
    def sort(self) -> Sort:
        return Sort.OMEGA


@dataclass(frozen=True)
class Var(Term):
    """Free variable."""

    name: str
    sort: Sort = Sort.IOTA


@dataclass(frozen=True)
class BoundVar(Term):
    """Variable bound by a quantifier or by an iterated disjunction."""

    name: str
    sort: Sort = Sort.IOTA


@dataclass(frozen=True)
class SchemApp(Term):
    """A schematic variable of type omega -> iota applied to an index."""

    name: str
    index: Term

    @property
    def sort(self) -> Sort:
        return Sort.IOTA


@dataclass(frozen=True)
class Const(Term):
    name: str
    sort: Sort = Sort.IOTA
    display: Optional[str] = field(default=None, compare=False)


@dataclass(frozen=True)
class App(Term):
    fn: str
    args: tuple
    sort: Sort = Sort.IOTA


@dataclass(frozen=True)
class DefApp(Term):
    """Application of a defined (primitive recursive) function symbol."""

    fn: str
    args: tuple
    sort: Sort = Sort.IOTA


ZERO = Zero()


def numeral(n: int) -> Term:
    if n < 0:
        raise ValueError("numerals are non-negative")
    t: Term = ZERO
    for _ in range(n):
        t = Succ(t)
    return t


def numeral_value(t: Term) -> Optional[int]:
    """Return the integer denoted by ``t`` if it is a closed numeral."""
    count = 0
    while isinstance(t, Succ):
        count += 1
        t = t.arg
    return count if isinstance(t, Zero) else None


def is_numeral(t: Term) -> bool:
    return numeral_value(t) is not None


def succ(t: Term, times: int = 1) -> Term:
    for _ in range(times):
        t = Succ(t)
    return t


# --------------------------------------------------------------------------
# formulas


@dataclass(frozen=True)
class Formula:
    def __str__(self) -> str:
        return fmt(self)

    @cached_property
    def key(self) -> str:
        return fmt(self)


@dataclass(frozen=True)
class Atom(Formula):
    pred: str
    args: tuple


@dataclass(frozen=True)
class Neg(Formula):
    body: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Imp(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Forall(Formula):
    var: BoundVar
    body: Formula


@dataclass(frozen=True)
class Exists(Formula):
    var: BoundVar
    body: Formula


@dataclass(frozen=True)
class BigOr(Formula):
    """Iterated disjunction of ``body`` for ``index`` from 0 to ``upper``."""

    index: BoundVar
    upper: Term
    body: Formula


Expr = Union[Term, Formula]


def is_atomic(f: Formula) -> bool:
    return isinstance(f, Atom)


def is_quantifier_free(f: Formula) -> bool:
    if isinstance(f, (Forall, Exists)):
        return False
    if isinstance(f, Atom):
        return True
    if isinstance(f, (Neg,)):
        return is_quantifier_free(f.body)
    if isinstance(f, BigOr):
        return is_quantifier_free(f.body)
    return is_quantifier_free(f.left) and is_quantifier_free(f.right)


@dataclass(frozen=True)
class Sequent:
    ante: tuple = ()
    succ: tuple = ()

    def side(self, name: str) -> tuple:
        return self.ante if name == "l" else self.succ

    def same_multiset(self, other: "Sequent") -> bool:
        return _msort(self.ante) == _msort(other.ante) and _msort(self.succ) == _msort(other.succ)

    def map(self, fn: Callable[[Formula], Formula]) -> "Sequent":
        return Sequent(tuple(fn(f) for f in self.ante), tuple(fn(f) for f in self.succ))

    def formulas(self) -> Iterator[Formula]:
        yield from self.ante
        yield from self.succ

    def __str__(self) -> str:
        return fmt(self)


def _msort(fs: Iterable[Formula]) -> list:
    return sorted(f.key for f in fs)


# --------------------------------------------------------------------------
# signatures and rewrite systems


@dataclass
class Signature:
    """Declared symbols.  Predicate argument sorts of ``None`` are unchecked."""

    functions: dict = field(default_factory=dict)  # name -> (argsorts, result)
    defined: dict = field(default_factory=dict)  # name -> (argsorts, result)
    predicates: dict = field(default_factory=dict)  # name -> argsorts or None
    constants: dict = field(default_factory=dict)  # name -> Const


@dataclass(frozen=True)
class RewriteRule:
    lhs: DefApp
    rhs: Term


@dataclass(frozen=True)
class _DefinedSymbol:
    base: RewriteRule
    step: RewriteRule


class RewriteSystem:
    """Left-to-right rules for defined function symbols.

    Each symbol needs exactly one rule whose first argument is ``0`` and one
    whose first argument is ``s(k)`` for an omega variable ``k``; the remaining
    lhs arguments are variables.  This shape is checked on construction and
    guarantees termination.
    """

    def __init__(self, rules: Iterable[RewriteRule] = (), signature: Optional[Signature] = None):
        self.rules = tuple(rules)
        self.signature = signature
        self._by_symbol: dict[str, _DefinedSymbol] = {}
        grouped: dict[str, list[RewriteRule]] = {}
        for rule in self.rules:
            if not isinstance(rule.lhs, DefApp) or not rule.lhs.args:
                raise RuleShapeError(f"rule lhs must be a defined symbol application: {rule.lhs}")
            grouped.setdefault(rule.lhs.fn, []).append(rule)
        for name, rs in grouped.items():
            base = [r for r in rs if isinstance(r.lhs.args[0], Zero)]
            step = [r for r in rs if isinstance(r.lhs.args[0], Succ) and isinstance(r.lhs.args[0].arg, OmegaVar)]
            if len(base) != 1 or len(step) != 1 or len(rs) != 2:
                raise RuleShapeError(f"{name}: need exactly one 0-rule and one s(k)-rule")
            for r in rs:
                for a in r.lhs.args[1:]:
                    if not isinstance(a, (Var, OmegaVar)):
                        raise RuleShapeError(f"{name}: non-recursive lhs arguments must be variables")
                extra = free_vars(r.rhs) - free_vars(r.lhs)
                if extra:
                    raise RuleShapeError(f"{name}: rhs variables {sorted(extra)} not bound by lhs")
            self._by_symbol[name] = _DefinedSymbol(base[0], step[0])

    def __contains__(self, name: str) -> bool:
        return name in self._by_symbol

    def symbols(self) -> list:
        return list(self._by_symbol)

    def rules_for(self, name: str) -> Optional[_DefinedSymbol]:
        return self._by_symbol.get(name)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, RewriteSystem) and set(self.rules) == set(other.rules)

    def __repr__(self) -> str:
        return f"RewriteSystem({len(self.rules)} rules)"


EMPTY_RS = RewriteSystem()


# --------------------------------------------------------------------------
# traversal helpers


def map_term(t: Term, fn: Callable[[Term], Optional[Term]]) -> Term:
    """Bottom-up is not implied: ``fn`` sees each node first; ``None`` means recurse."""
    r = fn(t)
    if r is not None:
        return r
    if isinstance(t, Succ):
        return Succ(map_term(t.arg, fn))
    if isinstance(t, SchemApp):
        return SchemApp(t.name, map_term(t.index, fn))
    if isinstance(t, App):
        return App(t.fn, tuple(map_term(a, fn) for a in t.args), t.sort)
    if isinstance(t, DefApp):
        return DefApp(t.fn, tuple(map_term(a, fn) for a in t.args), t.sort)
    return t


def map_formula(f: Formula, fn: Callable[[Term], Optional[Term]]) -> Formula:
    """Apply :func:`map_term` to every term inside ``f``."""
    if isinstance(f, Atom):
        return Atom(f.pred, tuple(map_term(a, fn) for a in f.args))
    if isinstance(f, Neg):
        return Neg(map_formula(f.body, fn))
    if isinstance(f, (And, Or, Imp)):
        return type(f)(map_formula(f.left, fn), map_formula(f.right, fn))
    if isinstance(f, (Forall, Exists)):
        return type(f)(f.var, map_formula(f.body, fn))
    if isinstance(f, BigOr):
        return BigOr(f.index, map_term(f.upper, fn), map_formula(f.body, fn))
    raise TypeError(f"not a formula: {f!r}")


def map_expr(e, fn):
    if isinstance(e, Term):
        return map_term(e, fn)
    if isinstance(e, Formula):
        return map_formula(e, fn)
    if isinstance(e, Sequent):
        return e.map(lambda f: map_formula(f, fn))
    raise TypeError(f"not an expression: {e!r}")


def iter_terms(e) -> Iterator[Term]:
    """Yield every term node in ``e`` (pre-order)."""
    if isinstance(e, Sequent):
        for f in e.formulas():
            yield from iter_terms(f)
    elif isinstance(e, Term):
        yield e
        if isinstance(e, Succ):
            yield from iter_terms(e.arg)
        elif isinstance(e, SchemApp):
            yield from iter_terms(e.index)
        elif isinstance(e, (App, DefApp)):
            for a in e.args:
                yield from iter_terms(a)
    elif isinstance(e, Atom):
        for a in e.args:
            yield from iter_terms(a)
    elif isinstance(e, Neg):
        yield from iter_terms(e.body)
    elif isinstance(e, (And, Or, Imp)):
        yield from iter_terms(e.left)
        yield from iter_terms(e.right)
    elif isinstance(e, (Forall, Exists)):
        yield from iter_terms(e.body)
    elif isinstance(e, BigOr):
        yield from iter_terms(e.upper)
        yield from iter_terms(e.body)


def free_vars(e) -> set:
    """Names of free variables (iota, omega) and schematic variables in ``e``."""
    out = set()
    for t in iter_terms(e):
        if isinstance(t, (Var, OmegaVar)):
            out.add(t.name)
        elif isinstance(t, SchemApp):
            out.add(t.name)
    return out


def free_term_vars(e) -> list:
    """Free :class:`Var`/:class:`OmegaVar` nodes of ``e`` in first-occurrence order."""
    seen: dict = {}
    for t in iter_terms(e):
        if isinstance(t, (Var, OmegaVar)) and t not in seen:
            seen[t] = None
    return list(seen)


def is_ground(e) -> bool:
    return not any(isinstance(t, (Var, OmegaVar, SchemApp, BoundVar)) for t in iter_terms(e))


def sort_of(t: Term) -> Sort:
    return t.sort


def subst_bound(f, var: BoundVar, value: Term):
    """Replace the bound variable ``var`` by ``value`` (stopping at rebinding)."""
    if isinstance(f, Term):
        return map_term(f, lambda t: value if t == var else None)
    if isinstance(f, Atom):
        return map_formula(f, lambda t: value if t == var else None)
    if isinstance(f, Neg):
        return Neg(subst_bound(f.body, var, value))
    if isinstance(f, (And, Or, Imp)):
        return type(f)(subst_bound(f.left, var, value), subst_bound(f.right, var, value))
    if isinstance(f, (Forall, Exists)):
        if f.var == var:
            return f
        return type(f)(f.var, subst_bound(f.body, var, value))
    if isinstance(f, BigOr):
        upper = subst_bound(f.upper, var, value)
        if f.index == var:
            return BigOr(f.index, upper, f.body)
        return BigOr(f.index, upper, subst_bound(f.body, var, value))
    raise TypeError(f"cannot substitute into {f!r}")


def instantiate_quantifier(f: Union[Forall, Exists], t: Term) -> Formula:
    if t.sort != f.var.sort:
        raise SortError(f"cannot instantiate {f.var.name}:{f.var.sort.value} with {t} of sort {t.sort.value}")
    return subst_bound(f.body, f.var, t)


# --------------------------------------------------------------------------
# sort checking


def check_sorts(e, signature: Optional[Signature] = None) -> None:
    """Raise :class:`SortError` if ``e`` is ill sorted."""
    if isinstance(e, Sequent):
        for f in e.formulas():
            check_sorts(f, signature)
        return
    for t in iter_terms(e):
        if isinstance(t, Succ) and t.arg.sort != Sort.OMEGA:
            raise SortError(f"s(.) applied to {t.arg} of sort {t.arg.sort.value}")
        if isinstance(t, SchemApp) and t.index.sort != Sort.OMEGA:
            raise SortError(f"schematic index {t.index} is not of sort omega")
        if signature is not None and isinstance(t, (App, DefApp)):
            table = signature.functions if isinstance(t, App) else signature.defined
            if t.fn in table:
                argsorts, result = table[t.fn]
                if len(argsorts) != len(t.args):
                    raise SortError(f"{t.fn} expects {len(argsorts)} arguments")
                for a, s in zip(t.args, argsorts):
                    if a.sort != s:
                        raise SortError(f"{t.fn}: argument {a} has sort {a.sort.value}, expected {s.value}")
                if t.sort != result:
                    raise SortError(f"{t.fn}: result sort mismatch")
    if isinstance(e, Formula):
        _check_formula_sorts(e, signature)


def _check_formula_sorts(f: Formula, signature: Optional[Signature]) -> None:
    if isinstance(f, Atom):
        if signature is not None and f.pred in signature.predicates:
            argsorts = signature.predicates[f.pred]
            if argsorts is not None:
                if len(argsorts) != len(f.args):
                    raise SortError(f"{f.pred} expects {len(argsorts)} arguments")
                for a, s in zip(f.args, argsorts):
                    if s is not None and a.sort != s:
                        raise SortError(f"{f.pred}: argument {a} has sort {a.sort.value}, expected {s.value}")
    elif isinstance(f, Neg):
        _check_formula_sorts(f.body, signature)
    elif isinstance(f, (And, Or, Imp)):
        _check_formula_sorts(f.left, signature)
        _check_formula_sorts(f.right, signature)
    elif isinstance(f, (Forall, Exists)):
        _check_formula_sorts(f.body, signature)
    elif isinstance(f, BigOr):
        if f.upper.sort != Sort.OMEGA or f.index.sort != Sort.OMEGA:
            raise SortError("iterated disjunction bound and index must be of sort omega")
        _check_formula_sorts(f.body, signature)


# --------------------------------------------------------------------------
# normalization


class Normalizer:
    """Leftmost-innermost normalizer; ``steps`` counts rule applications."""

    def __init__(self, rs: Optional[RewriteSystem] = None):
        self.rs = rs or EMPTY_RS
        self.steps = 0

    def term(self, t: Term) -> Term:
        if isinstance(t, Succ):
            return Succ(self.term(t.arg))
        if isinstance(t, SchemApp):
            return SchemApp(t.name, self.term(t.index))
        if isinstance(t, App):
            return App(t.fn, tuple(self.term(a) for a in t.args), t.sort)
        if isinstance(t, DefApp):
            args = tuple(self.term(a) for a in t.args)
            t = DefApp(t.fn, args, t.sort)
            rules = self.rs.rules_for(t.fn)
            if rules is None:
                return t
            head = args[0]
            if isinstance(head, Zero):
                rule = rules.base
            elif isinstance(head, Succ):
                rule = rules.step
            else:
                return t
            sigma = syntactic_match(rule.lhs, t)
            if sigma is None:  # pragma: no cover - shape check makes this unreachable
                return t
            self.steps += 1
            return self.term(apply_substitution(rule.rhs, sigma))
        return t

    def formula(self, f: Formula) -> Formula:
        if isinstance(f, Atom):
            return Atom(f.pred, tuple(self.term(a) for a in f.args))
        if isinstance(f, Neg):
            return Neg(self.formula(f.body))
        if isinstance(f, (And, Or, Imp)):
            return type(f)(self.formula(f.left), self.formula(f.right))
        if isinstance(f, (Forall, Exists)):
            return type(f)(f.var, self.formula(f.body))
        if isinstance(f, BigOr):
            upper = self.term(f.upper)
            body = self.formula(f.body)
            if isinstance(upper, Zero):
                self.steps += 1
                return self.formula(subst_bound(body, f.index, ZERO))
            if isinstance(upper, Succ):
                self.steps += 1
                return self.formula(
                    Or(BigOr(f.index, upper.arg, body), subst_bound(body, f.index, upper))
                )
            return BigOr(f.index, upper, body)
        raise TypeError(f"not a formula: {f!r}")

    def __call__(self, e):
        if isinstance(e, Term):
            return self.term(e)
        if isinstance(e, Formula):
            return self.formula(e)
        if isinstance(e, Sequent):
            return e.map(self.formula)
        raise TypeError(f"cannot normalize {e!r}")


def normalize(e, rs: Optional[RewriteSystem] = None):
    """Normal form of a term, formula or sequent.

    Defined symbols unroll when their recursion argument is headed by ``0`` or
    ``s``; anything else (e.g. a bare parameter) is left in place.
    """
    check_sorts(e, rs.signature if rs is not None else None)
    return Normalizer(rs)(e)


# --------------------------------------------------------------------------
# substitutions


@dataclass(frozen=True)
class Lambda:
    """``λvar.body`` with ``var`` an omega variable."""

    var: str
    body: Term

    def __call__(self, index: Term) -> Term:
        return map_term(self.body, lambda t: index if t == OmegaVar(self.var) else None)

    def __str__(self) -> str:
        return f"λ{self.var}.{fmt(self.body)}"


@dataclass
class Substitution:
    omega: dict = field(default_factory=dict)
    iota: dict = field(default_factory=dict)
    schem: dict = field(default_factory=dict)

    def is_empty(self) -> bool:
        return not (self.omega or self.iota or self.schem)

    def copy(self) -> "Substitution":
        return Substitution(dict(self.omega), dict(self.iota), dict(self.schem))

    def __str__(self) -> str:
        parts = [f"{k}↦{fmt(v)}" for k, v in self.omega.items()]
        parts += [f"{k}↦{fmt(v)}" for k, v in self.iota.items()]
        parts += [f"{k}↦{v}" for k, v in self.schem.items()]
        return "{" + ", ".join(parts) + "}"


def _substitute_term(t: Term, s: Substitution) -> Term:
    def visit(u: Term) -> Optional[Term]:
        if isinstance(u, OmegaVar) and u.name in s.omega:
            v = s.omega[u.name]
            if v.sort != Sort.OMEGA:
                raise SortError(f"{u.name} is omega but bound to {v}")
            return v
        if isinstance(u, Var) and u.name in s.iota:
            v = s.iota[u.name]
            if v.sort != u.sort:
                raise SortError(f"{u.name} has sort {u.sort.value} but is bound to {v}")
            return v
        if isinstance(u, SchemApp):
            idx = map_term(u.index, visit)
            if u.name in s.schem:
                out = s.schem[u.name](idx)
                if out.sort != Sort.IOTA:
                    raise SortError(f"schematic variable {u.name} must map to iota terms, got {out}")
                return out
            return SchemApp(u.name, idx)
        return None

    return map_term(t, visit)


def apply_substitution(e, s: Substitution):
    """Apply ``s`` to a term, formula or sequent.  The result is not normalized."""
    if s.is_empty():
        return e
    return map_expr(e, lambda t: _substitute_term(t, s) if isinstance(t, (OmegaVar, Var, SchemApp)) else None)


def instantiate_parameter(e, gamma: int, param: str = "n"):
    return apply_substitution(e, Substitution(omega={param: numeral(gamma)}))


# --------------------------------------------------------------------------
# matching


def syntactic_match(pattern, target, sigma: Optional[Substitution] = None) -> Optional[Substitution]:
    """One-sided matching; free variables of ``pattern`` are bindable.

    Returns ``None`` when no match exists.
    """
    sigma = sigma.copy() if sigma is not None else Substitution()
    return sigma if _match(pattern, target, sigma) else None


def _match(p, t, s: Substitution) -> bool:
    if isinstance(p, Var):
        if not isinstance(t, Term) or t.sort != p.sort:
            return False
        bound = s.iota.get(p.name)
        if bound is None:
            s.iota[p.name] = t
            return True
        return bound == t
    if isinstance(p, OmegaVar):
        if not isinstance(t, Term) or t.sort != Sort.OMEGA:
            return False
        bound = s.omega.get(p.name)
        if bound is None:
            s.omega[p.name] = t
            return True
        return bound == t
    if type(p) is not type(t):
        return False
    if isinstance(p, Succ):
        return _match(p.arg, t.arg, s)
    if isinstance(p, SchemApp):
        return p.name == t.name and _match(p.index, t.index, s)
    if isinstance(p, (App, DefApp)):
        return p.fn == t.fn and len(p.args) == len(t.args) and all(_match(a, b, s) for a, b in zip(p.args, t.args))
    if isinstance(p, Atom):
        return p.pred == t.pred and len(p.args) == len(t.args) and all(_match(a, b, s) for a, b in zip(p.args, t.args))
    if isinstance(p, Neg):
        return _match(p.body, t.body, s)
    if isinstance(p, (And, Or, Imp)):
        return _match(p.left, t.left, s) and _match(p.right, t.right, s)
    if isinstance(p, (Forall, Exists)):
        return p.var == t.var and _match(p.body, t.body, s)
    if isinstance(p, BigOr):
        return p.index == t.index and _match(p.upper, t.upper, s) and _match(p.body, t.body, s)
    return p == t


# --------------------------------------------------------------------------
# printing

INFIX = {"eq": "=", "lt": "<", "leq": "≤"}


def fmt(e) -> str:
    if isinstance(e, Sequent):
        return f"{', '.join(fmt(f) for f in e.ante)} ⊢ {', '.join(fmt(f) for f in e.succ)}".strip()
    if isinstance(e, Term):
        return _fmt_term(e)
    if isinstance(e, Formula):
        return _fmt_formula(e, top=True)
    return str(e)


def _fmt_term(t: Term) -> str:
    if isinstance(t, (Zero, Succ)):
        count = 0
        base = t
        while isinstance(base, Succ):
            count += 1
            base = base.arg
        if isinstance(base, Zero):
            return str(count)
        if count == 0:
            return _fmt_term(base)
        if isinstance(base, (OmegaVar, BoundVar)):
            return f"{base.name}+{count}"
        return f"s({_fmt_term(t.arg)})"
    if isinstance(t, (OmegaVar, Var, BoundVar)):
        return t.name
    if isinstance(t, Const):
        return t.display or t.name
    if isinstance(t, SchemApp):
        return f"{t.name}({_fmt_term(t.index)})"
    if isinstance(t, (App, DefApp)):
        return f"{t.fn}({', '.join(_fmt_term(a) for a in t.args)})"
    return repr(t)


def _fmt_formula(f: Formula, top: bool = False) -> str:
    if isinstance(f, Atom):
        if f.pred in INFIX and len(f.args) == 2:
            return f"{_fmt_term(f.args[0])} {INFIX[f.pred]} {_fmt_term(f.args[1])}"
        if not f.args:
            return f.pred
        return f"{f.pred}({', '.join(_fmt_term(a) for a in f.args)})"
    if isinstance(f, Neg):
        return f"¬{_fmt_formula(f.body)}"
    if isinstance(f, (And, Or, Imp)):
        op = {And: "∧", Or: "∨", Imp: "→"}[type(f)]
        s = f"{_fmt_formula(f.left)} {op} {_fmt_formula(f.right)}"
        return s if top else f"({s})"
    if isinstance(f, Forall):
        return f"∀{f.var.name} {_fmt_formula(f.body)}"
    if isinstance(f, Exists):
        return f"∃{f.var.name} {_fmt_formula(f.body)}"
    if isinstance(f, BigOr):
        return f"⋁[{f.index.name}=0..{_fmt_term(f.upper)}] {_fmt_formula(f.body)}"
    return repr(f)
