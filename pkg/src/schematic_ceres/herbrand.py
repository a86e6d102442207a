"""Skolemized prenex sequent schemata, Herbrand systems and a ground provability check."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence

from .clauses import Clause
from .oracle import OracleResult, Verdict, default_universe, ground_instances, ground_refute_oracle
from .terms import (
    And,
    Atom,
    Exists,
    Forall,
    Formula,
    Imp,
    Neg,
    Or,
    RewriteSystem,
    Sequent,
    Substitution,
    Term,
    apply_substitution,
    fmt,
    is_ground,
    normalize,
    numeral,
    numeral_value,
    subst_bound,
)


class ArityMismatch(ValueError):
    pass


class MissingSymbol(KeyError):
    pass


@dataclass(frozen=True)
class PrenexFormula:
    """``Q x1..xn. matrix`` with the quantifier block tied to a w-symbol."""

    kind: str  # "forall" or "exists"
    wsym: str
    vars: tuple  # BoundVar
    matrix: Formula

    def formula(self) -> Formula:
        out = self.matrix
        q = Forall if self.kind == "forall" else Exists
        for v in reversed(self.vars):
            out = q(v, out)
        return out

    def instance(self, terms: Sequence[Term]) -> Formula:
        if len(terms) != len(self.vars):
            raise ArityMismatch(f"{self.wsym}: expected {len(self.vars)} terms, got {len(terms)}")
        out = self.matrix
        for v, t in zip(self.vars, terms):
            out = subst_bound(out, v, t)
        return out


@dataclass(frozen=True)
class SpsSchema:
    name: str
    param: str
    delta: tuple = ()
    pi: tuple = ()
    universals: tuple = ()
    existentials: tuple = ()

    def sequent(self, gamma: Optional[int] = None, rs: Optional[RewriteSystem] = None) -> Sequent:
        s = Sequent(
            self.delta + tuple(u.formula() for u in self.universals),
            tuple(e.formula() for e in self.existentials) + self.pi,
        )
        if gamma is None:
            return s
        return normalize(apply_substitution(s, Substitution(omega={self.param: numeral(gamma)})), rs)


@dataclass(frozen=True)
class WCall:
    symbol: str
    arg: Term


@dataclass(frozen=True)
class WRule:
    symbol: str
    base: tuple  # items: tuple of terms, or WCall
    step: tuple


@dataclass
class HerbrandSystem:
    name: str
    step_var: str
    rules: dict = field(default_factory=dict)
    rewrite: Optional[RewriteSystem] = None

    def __eq__(self, other) -> bool:
        return isinstance(other, HerbrandSystem) and (self.name, self.step_var, self.rules) == (other.name, other.step_var, other.rules)


def normalize_w(hs: HerbrandSystem, symbol: str, gamma: int, arity: Optional[int] = None,
                rs: Optional[RewriteSystem] = None) -> list:
    """Normal form of ``symbol(gamma)`` as a flat list of term tuples."""
    rs = rs if rs is not None else hs.rewrite
    rule = hs.rules.get(symbol)
    if rule is None:
        raise MissingSymbol(symbol)
    if gamma == 0:
        items, sigma = rule.base, Substitution()
    else:
        items, sigma = rule.step, Substitution(omega={hs.step_var: numeral(gamma - 1)})
    out: list = []
    for item in items:
        if isinstance(item, WCall):
            arg = normalize(apply_substitution(item.arg, sigma), rs)
            value = numeral_value(arg)
            if value is None:
                raise ValueError(f"{symbol}: argument {fmt(arg)} is not a numeral")
            out.extend(normalize_w(hs, item.symbol, value, arity, rs))
        else:
            tup = tuple(normalize(apply_substitution(t, sigma), rs) for t in item)
            if arity is not None and len(tup) != arity:
                raise ArityMismatch(f"{symbol}: tuple of length {len(tup)}, expected {arity}")
            out.append(tup)
    return out


def _big(op, fs: Sequence[Formula]) -> Formula:
    out = fs[0]
    for f in fs[1:]:
        out = op(out, f)
    return out


def build_herbrand_sequent(s: SpsSchema, hs: HerbrandSystem, gamma: int, rs: Optional[RewriteSystem] = None,
                           overrides: Optional[dict] = None) -> Sequent:
    """Instantiate ``s`` at ``gamma`` with the term lists of ``hs``.

    ``overrides`` maps a w-symbol to an explicit list of tuples, which is how
    smaller (for instance minimal) Herbrand sequents are assembled.
    """
    rs = rs if rs is not None else hs.rewrite
    sigma = Substitution(omega={s.param: numeral(gamma)})

    def prep(f: Formula) -> Formula:
        return normalize(apply_substitution(f, sigma), rs)

    def terms_for(q: PrenexFormula) -> list:
        if overrides and q.wsym in overrides:
            return [tuple(t) for t in overrides[q.wsym]]
        if q.wsym not in hs.rules:
            raise MissingSymbol(q.wsym)
        return normalize_w(hs, q.wsym, gamma, len(q.vars), rs)

    ante = [prep(f) for f in s.delta]
    for u in s.universals:
        tuples = terms_for(u)
        if tuples:
            ante.append(prep(_big(And, [u.instance(t) for t in tuples])))
    succ = []
    for e in s.existentials:
        tuples = terms_for(e)
        if tuples:
            succ.append(prep(_big(Or, [e.instance(t) for t in tuples])))
    succ.extend(prep(f) for f in s.pi)
    return Sequent(tuple(ante), tuple(succ))


def flatten(seq: Sequent) -> Sequent:
    """Split antecedent conjunctions and succedent disjunctions."""

    def split(f, op):
        if isinstance(f, op):
            return split(f.left, op) + split(f.right, op)
        return [f]

    ante = [g for f in seq.ante for g in split(f, And)]
    succ = [g for f in seq.succ for g in split(f, Or)]
    return Sequent(tuple(ante), tuple(succ))


# --------------------------------------------------------------------------
# axioms


@dataclass(frozen=True)
class AxiomSchema:
    name: str
    seq: Sequent
    range_var: Optional[str] = None
    lo: Optional[Term] = None
    hi: Optional[Term] = None


@dataclass(frozen=True)
class AxiomSet:
    name: str
    param: str
    axioms: tuple = ()

    def without(self, *names: str) -> "AxiomSet":
        return AxiomSet(self.name, self.param, tuple(a for a in self.axioms if a.name not in names))

    def replace(self, axiom: AxiomSchema) -> "AxiomSet":
        return AxiomSet(self.name, self.param, tuple(axiom if a.name == axiom.name else a for a in self.axioms))

    def instances(self, gamma: int, rs: Optional[RewriteSystem] = None) -> list:
        """``(name, index, sequent)`` with the range variable instantiated; iota variables stay free."""
        out = []
        base = Substitution(omega={self.param: numeral(gamma)})
        for ax in self.axioms:
            if ax.range_var is None:
                out.append((ax.name, None, normalize(apply_substitution(ax.seq, base), rs)))
                continue
            lo = numeral_value(normalize(apply_substitution(ax.lo, base), rs))
            hi = numeral_value(normalize(apply_substitution(ax.hi, base), rs))
            for j in range(lo, hi + 1):
                sigma = Substitution(omega={self.param: numeral(gamma), ax.range_var: numeral(j)})
                out.append((ax.name, j, normalize(apply_substitution(ax.seq, sigma), rs)))
        return out


EMPTY_AXIOMS = AxiomSet("empty", "n", ())


# --------------------------------------------------------------------------
# clausification


def _product(a: list, b: list) -> list:
    return [c.compose(d) for c in a for d in b]


def clauses_true(f: Formula) -> list:
    """Clauses whose conjunction is equivalent to ``f`` (quantifier-free, no ⋁-nodes)."""
    if isinstance(f, Atom):
        return [Clause((), (f,))]
    if isinstance(f, Neg):
        return clauses_false(f.body)
    if isinstance(f, And):
        return clauses_true(f.left) + clauses_true(f.right)
    if isinstance(f, Or):
        return _product(clauses_true(f.left), clauses_true(f.right))
    if isinstance(f, Imp):
        return _product(clauses_false(f.left), clauses_true(f.right))
    raise ValueError(f"cannot clausify {fmt(f)}")


def clauses_false(f: Formula) -> list:
    """Clauses whose conjunction is equivalent to ``¬f``."""
    if isinstance(f, Atom):
        return [Clause((f,), ())]
    if isinstance(f, Neg):
        return clauses_true(f.body)
    if isinstance(f, And):
        return _product(clauses_false(f.left), clauses_false(f.right))
    if isinstance(f, Or):
        return clauses_false(f.left) + clauses_false(f.right)
    if isinstance(f, Imp):
        return clauses_true(f.left) + clauses_false(f.right)
    raise ValueError(f"cannot clausify {fmt(f)}")


def sequent_clauses(seq: Sequent) -> list:
    """Clauses equivalent to the sequent read as ``⋀Γ → ⋁Δ``."""
    out = [Clause()]
    for f in seq.ante:
        out = _product(out, clauses_false(f))
    for f in seq.succ:
        out = _product(out, clauses_true(f))
    return [c for c in out if not c.is_tautology()]


def negated_sequent_clauses(seq: Sequent) -> list:
    out = []
    for f in seq.ante:
        out.extend(clauses_true(f))
    for f in seq.succ:
        out.extend(clauses_false(f))
    return out


# --------------------------------------------------------------------------
# provability


class Provability(str, Enum):
    PROVABLE = "PROVABLE"
    NOT_PROVABLE = "NOT-PROVABLE"
    INCONCLUSIVE = "INCONCLUSIVE"


@dataclass
class ProvabilityResult:
    verdict: Provability
    certificate: Optional[object] = None
    clauses: list = field(default_factory=list)
    universe: list = field(default_factory=list)
    oracle: Optional[OracleResult] = None


def herbrand_universe(seq: Sequent, extra_depth: int = 1) -> list:
    return default_universe([Clause((), tuple(a for f in seq.formulas() for a in _atoms(f)))], extra_depth)


def _atoms(f: Formula) -> list:
    if isinstance(f, Atom):
        return [f]
    if isinstance(f, Neg):
        return _atoms(f.body)
    if isinstance(f, (And, Or, Imp)):
        return _atoms(f.left) + _atoms(f.right)
    raise ValueError(f"not quantifier-free: {fmt(f)}")


def check_provable(seq: Sequent, axioms: Optional[AxiomSet], gamma: int, universe: Optional[Sequence[Term]] = None,
                   rs: Optional[RewriteSystem] = None, max_clauses: int = 200_000) -> ProvabilityResult:
    """Decide whether ``seq`` follows from the ground instances of ``axioms`` over ``universe``."""
    if not is_ground(seq):
        raise ValueError("the Herbrand sequent must be ground")
    if universe is None:
        universe = herbrand_universe(seq)
    clauses = list(negated_sequent_clauses(seq))
    for _name, _idx, ax in (axioms.instances(gamma, rs) if axioms is not None else []):
        clauses.extend(sequent_clauses(ax))
    ground = ground_instances(clauses, universe)
    result = ground_refute_oracle(ground, universe, max_clauses=max_clauses)
    verdict = {
        Verdict.UNSAT: Provability.PROVABLE,
        Verdict.SAT: Provability.NOT_PROVABLE,
        Verdict.INCONCLUSIVE: Provability.INCONCLUSIVE,
    }[result.verdict]
    return ProvabilityResult(verdict, result.tree, ground, list(universe), result)
