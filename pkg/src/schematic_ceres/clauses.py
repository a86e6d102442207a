"""Clauses, characteristic clause terms and clause-set reduction."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .proofs import ProofNode, ProofSchema, mark_ancestors, marked_positions, relevant_configurations
from .terms import (
    Atom,
    OmegaVar,
    RewriteSystem,
    SchemApp,
    Sequent,
    Substitution,
    Term,
    Var,
    apply_substitution,
    fmt,
    free_term_vars,
    iter_terms,
    map_formula,
    normalize,
    numeral,
    numeral_value,
    syntactic_match,
)


class UnmarkedProof(ValueError):
    pass


class UnresolvedSymbol(ValueError):
    pass


def _sorted_atoms(atoms: Iterable[Atom]) -> tuple:
    atoms = tuple(atoms)
    for a in atoms:
        if not isinstance(a, Atom):
            raise TypeError(f"clauses contain atoms only, got {fmt(a)}")
    return tuple(sorted(atoms, key=lambda a: a.key))


@dataclass(frozen=True, init=False)
class Clause:
    """A pair of atom multisets; sides are kept sorted so equality is multiset equality."""

    ante: tuple
    succ: tuple

    def __init__(self, ante: Iterable[Atom] = (), succ: Iterable[Atom] = ()):
        object.__setattr__(self, "ante", _sorted_atoms(ante))
        object.__setattr__(self, "succ", _sorted_atoms(succ))

    def compose(self, other: "Clause") -> "Clause":
        return Clause(self.ante + other.ante, self.succ + other.succ)

    def is_empty(self) -> bool:
        return not self.ante and not self.succ

    def is_tautology(self) -> bool:
        return bool(set(self.ante) & set(self.succ))

    def atoms(self) -> tuple:
        return self.ante + self.succ

    def merged(self) -> "Clause":
        """Drop duplicate atoms on each side (implicit factoring)."""
        return Clause(dict.fromkeys(self.ante), dict.fromkeys(self.succ))

    def map(self, fn) -> "Clause":
        return Clause((fn(a) for a in self.ante), (fn(a) for a in self.succ))

    def as_sequent(self) -> Sequent:
        return Sequent(self.ante, self.succ)

    def __len__(self) -> int:
        return len(self.ante) + len(self.succ)

    def __str__(self) -> str:
        return f"{', '.join(fmt(a) for a in self.ante)} ⊢ {', '.join(fmt(a) for a in self.succ)}".strip()


EMPTY_CLAUSE = Clause()


def substitute_clause(c: Clause, sigma: Substitution, rs: Optional[RewriteSystem] = None) -> Clause:
    return c.map(lambda a: normalize(apply_substitution(a, sigma), rs))


def clause_vars(c: Clause) -> list:
    """Free iota/omega variables of ``c`` in first-occurrence order over sorted sides."""
    return free_term_vars(c.as_sequent())


# --------------------------------------------------------------------------
# canonical renaming


def generalize_schematic(c: Clause) -> Clause:
    """Replace each distinct schematic application ``x(t)`` by a fresh variable."""
    table: dict = {}

    def visit(t: Term):
        if isinstance(t, SchemApp):
            if t not in table:
                table[t] = Var(f"_s{len(table)}")
            return table[t]
        return None

    return c.map(lambda a: map_formula(a, visit))


def rename(c: Clause, mapping: dict) -> Clause:
    def visit(t: Term):
        if isinstance(t, (Var, OmegaVar)) and t in mapping:
            return mapping[t]
        return None

    return c.map(lambda a: map_formula(a, visit))


MAX_PERMUTED_VARS = 6


def canonical(c: Clause) -> Clause:
    """The least variant of ``c`` under renaming to ``v0, v1, ...``.

    Exhaustive over variable permutations for small clauses, which makes the
    result independent of the input names.
    """
    vs = clause_vars(c)
    if not vs:
        return c
    targets = [Var(f"v{i}", v.sort) if isinstance(v, Var) else OmegaVar(f"w{i}") for i, v in enumerate(vs)]
    if len(vs) > MAX_PERMUTED_VARS:
        return rename(c, dict(zip(vs, targets)))
    best = None
    best_key = None
    for perm in itertools.permutations(vs):
        mapping = {}
        for v, t in zip(perm, targets):
            if (isinstance(v, Var) and isinstance(t, Var) and v.sort == t.sort) or (isinstance(v, OmegaVar) and isinstance(t, OmegaVar)):
                mapping[v] = t
            else:
                break
        else:
            cand = rename(c, mapping)
            key = str(cand)
            if best_key is None or key < best_key:
                best, best_key = cand, key
    return best if best is not None else rename(c, dict(zip(vs, targets)))


def canonical_key(c: Clause) -> str:
    return str(canonical(c))


def canonical_set(clauses: Iterable[Clause], schematic: bool = False) -> frozenset:
    """Canonical representatives, optionally generalizing schematic applications first."""
    return frozenset(canonical(generalize_schematic(c) if schematic else c) for c in clauses)


def sorted_clauses(clauses: Iterable[Clause]) -> list:
    return sorted(clauses, key=lambda c: (canonical_key(c), str(c)))


# --------------------------------------------------------------------------
# reduction


def eliminate_tautologies(clauses: Iterable[Clause]) -> frozenset:
    return frozenset(c for c in clauses if not c.is_tautology())


def subsumes(c: Clause, d: Clause) -> Optional[Substitution]:
    """A substitution mapping ``c`` side-wise into a sub-multiset of ``d``, if any."""
    if len(c.ante) > len(d.ante) or len(c.succ) > len(d.succ):
        return None
    lits = [("l", a) for a in c.ante] + [("r", a) for a in c.succ]
    # most constrained literals first
    lits.sort(key=lambda sl: -len(list(iter_terms(sl[1]))))
    return _subsume(lits, 0, d, {"l": set(), "r": set()}, Substitution())


def _subsume(lits, i, d: Clause, used, sigma):
    if i == len(lits):
        return sigma
    side, atom = lits[i]
    targets = d.ante if side == "l" else d.succ
    for j, t in enumerate(targets):
        if j in used[side] or t.pred != atom.pred:
            continue
        s2 = syntactic_match(atom, t, sigma)
        if s2 is None:
            continue
        used[side].add(j)
        found = _subsume(lits, i + 1, d, used, s2)
        used[side].discard(j)
        if found is not None:
            return found
    return None


def subsumption_reduce(clauses: Iterable[Clause]) -> frozenset:
    """Drop every clause subsumed by another; ties keep the canonically least clause."""
    reps: dict = {}
    for c in sorted(clauses, key=str):
        reps.setdefault(canonical_key(c), c)
    items = sorted(reps.items())
    keep = []
    for dk, d in items:
        removed = False
        for ck, c in items:
            if ck == dk:
                continue
            if subsumes(c, d) is not None and (subsumes(d, c) is None or ck < dk):
                removed = True
                break
        if not removed:
            keep.append(d)
    return frozenset(keep)


def reduce_clause_set(clauses: Iterable[Clause]) -> frozenset:
    return subsumption_reduce(eliminate_tautologies(clauses))


def check_subsumption_soundness(original: Iterable[Clause], reduced: Iterable[Clause]) -> list:
    """Clauses of ``original`` that are neither kept nor subsumed by a kept clause."""
    reduced = list(reduced)
    keys = {canonical_key(c) for c in reduced}
    bad = []
    for d in original:
        if canonical_key(d) in keys:
            continue
        if not any(subsumes(c, d) is not None for c in reduced):
            bad.append(d)
    return bad


# --------------------------------------------------------------------------
# clause terms


@dataclass(frozen=True)
class ClauseTerm:
    pass


@dataclass(frozen=True)
class Leaf(ClauseTerm):
    clauses: frozenset


@dataclass(frozen=True)
class Oplus(ClauseTerm):
    left: ClauseTerm
    right: ClauseTerm


@dataclass(frozen=True)
class Otimes(ClauseTerm):
    left: ClauseTerm
    right: ClauseTerm


@dataclass(frozen=True)
class ClSymbol(ClauseTerm):
    symbol: str
    config: frozenset
    arg: Term


def leaf(*clauses: Clause) -> Leaf:
    return Leaf(frozenset(clauses))


def format_clause_term(t: ClauseTerm) -> str:
    if isinstance(t, Leaf):
        return "{" + "; ".join(str(c) for c in sorted(t.clauses, key=str)) + "}"
    if isinstance(t, Oplus):
        return f"({format_clause_term(t.left)} ⊕ {format_clause_term(t.right)})"
    if isinstance(t, Otimes):
        return f"({format_clause_term(t.left)} ⊗ {format_clause_term(t.right)})"
    if isinstance(t, ClSymbol):
        conf = ",".join(f"{s}{i}" for s, i in sorted(t.config))
        return f"cl[{t.symbol},{{{conf}}}]({fmt(t.arg)})"
    raise TypeError(t)


def extract_char_term(p: ProofNode) -> ClauseTerm:
    """Characteristic clause term of a proof already marked by :func:`mark_ancestors`."""
    if p.marks is None:
        raise UnmarkedProof("run mark_ancestors first")
    return _extract(p)


def _extract(node: ProofNode) -> ClauseTerm:
    if node.marks is None:
        raise UnmarkedProof(f"unmarked node {node.rule}")
    if node.rule == "axiom":
        pos = marked_positions(node)
        ante = [f for i, f in enumerate(node.conclusion.ante) if ("l", i) in pos]
        succ = [f for i, f in enumerate(node.conclusion.succ) if ("r", i) in pos]
        for f in ante + succ:
            if not isinstance(f, Atom):
                raise ValueError(f"marked axiom formula {fmt(f)} is not an atom")
        return leaf(Clause(ante, succ))
    if node.rule == "link":
        return ClSymbol(node.link.symbol, marked_positions(node), node.link.args[0])
    if len(node.premises) == 1:
        return _extract(node.premises[0])
    left, right = (_extract(q) for q in node.premises)
    aux_marked = all(node.premises[a.premise].marked(a.side, a.index) for a in node.aux)
    return Oplus(left, right) if aux_marked and node.aux else Otimes(left, right)


def evaluate(t: ClauseTerm) -> frozenset:
    if isinstance(t, Leaf):
        return t.clauses
    if isinstance(t, Oplus):
        return evaluate(t.left) | evaluate(t.right)
    if isinstance(t, Otimes):
        a = evaluate(t.left)
        b = evaluate(t.right)
        return frozenset(c.compose(d) for c in a for d in b)
    if isinstance(t, ClSymbol):
        raise UnresolvedSymbol(f"clause-set symbol {t.symbol} remains")
    raise TypeError(t)


def map_clause_term(t: ClauseTerm, clause_fn, term_fn) -> ClauseTerm:
    if isinstance(t, Leaf):
        return Leaf(frozenset(clause_fn(c) for c in t.clauses))
    if isinstance(t, (Oplus, Otimes)):
        return type(t)(map_clause_term(t.left, clause_fn, term_fn), map_clause_term(t.right, clause_fn, term_fn))
    if isinstance(t, ClSymbol):
        return ClSymbol(t.symbol, t.config, term_fn(t.arg))
    raise TypeError(t)


def clause_symbols(t: ClauseTerm) -> list:
    if isinstance(t, ClSymbol):
        return [t]
    if isinstance(t, (Oplus, Otimes)):
        return clause_symbols(t.left) + clause_symbols(t.right)
    return []


# --------------------------------------------------------------------------
# schema-level rewriting


@dataclass(frozen=True)
class ClauseSetRule:
    symbol: str
    config: frozenset
    step_var: str
    base: ClauseTerm
    step: ClauseTerm


@dataclass
class ClauseSetRewriteSystem:
    rules: dict = field(default_factory=dict)  # (symbol, config) -> ClauseSetRule
    order: tuple = ()
    rewrite: Optional[RewriteSystem] = None

    def __len__(self) -> int:
        return 2 * len(self.rules)

    def rule(self, symbol: str, config: frozenset) -> ClauseSetRule:
        try:
            return self.rules[(symbol, frozenset(config))]
        except KeyError:
            raise UnresolvedSymbol(f"no clause-set rule for {symbol} with configuration {sorted(config)}") from None


def build_schema_rewrites(schema: ProofSchema) -> ClauseSetRewriteSystem:
    confs = relevant_configurations(schema)
    crs = ClauseSetRewriteSystem(order=tuple(p.symbol for p in schema.pairs), rewrite=schema.rewrite)
    for pair in schema.pairs:
        for omega in sorted(confs[pair.symbol], key=sorted):
            base = extract_char_term(mark_ancestors(pair.base, omega))
            step = extract_char_term(mark_ancestors(pair.step, omega))
            crs.rules[(pair.symbol, omega)] = ClauseSetRule(pair.symbol, omega, pair.step_var, base, step)
    return crs


def check_wellfounded(crs: ClauseSetRewriteSystem) -> list:
    """Rules whose right sides could recurse without decreasing the parameter."""
    problems = []
    for (sym, conf), rule in crs.rules.items():
        for side, term in (("base", rule.base), ("step", rule.step)):
            for s in clause_symbols(term):
                if s.symbol == sym:
                    if side == "base" or s.arg != OmegaVar(rule.step_var):
                        problems.append(f"{sym} {side}: self reference at {fmt(s.arg)}")
                elif crs.order.index(s.symbol) < crs.order.index(sym):
                    problems.append(f"{sym} {side}: refers to earlier symbol {s.symbol}")
                if (s.symbol, s.config) not in crs.rules:
                    problems.append(f"{sym} {side}: no rule for {s.symbol} at configuration {sorted(s.config)}")
    return problems


def rewrite_clause_term(crs: ClauseSetRewriteSystem, symbol: str, config: frozenset, gamma: int, _memo: Optional[dict] = None) -> ClauseTerm:
    """The symbol-free clause term that ``cl[symbol, config](gamma)`` rewrites to."""
    memo = _memo if _memo is not None else {}
    key = (symbol, frozenset(config), gamma)
    if key in memo:
        return memo[key]
    rule = crs.rule(symbol, config)
    rs = crs.rewrite
    if gamma == 0:
        sigma = Substitution()
        body = rule.base
    else:
        sigma = Substitution(omega={rule.step_var: numeral(gamma - 1)})
        body = rule.step
    inst = map_clause_term(
        body,
        lambda c: substitute_clause(c, sigma, rs),
        lambda t: normalize(apply_substitution(t, sigma), rs),
    )
    out = _resolve(crs, inst, memo)
    memo[key] = out
    return out


def _resolve(crs, t: ClauseTerm, memo) -> ClauseTerm:
    if isinstance(t, ClSymbol):
        value = numeral_value(t.arg)
        if value is None:
            raise UnresolvedSymbol(f"argument {fmt(t.arg)} of {t.symbol} is not a numeral")
        return rewrite_clause_term(crs, t.symbol, t.config, value, memo)
    if isinstance(t, (Oplus, Otimes)):
        return type(t)(_resolve(crs, t.left, memo), _resolve(crs, t.right, memo))
    return t


def normal_form(crs: ClauseSetRewriteSystem, symbol: str, gamma: int, config: Iterable = ()) -> frozenset:
    return evaluate(rewrite_clause_term(crs, symbol, frozenset(config), gamma))


def ground_clause_set(schema: ProofSchema, gamma: int) -> frozenset:
    """Extract and evaluate directly from the unfolded proof at ``gamma``."""
    from .proofs import unfold_proof_schema

    p = unfold_proof_schema(schema, gamma)
    return evaluate(extract_char_term(mark_ancestors(p, ())))
