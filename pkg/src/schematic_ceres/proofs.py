"""Sequent proofs for LK with an equational theory and proof links.

A :class:`ProofNode` stores its conclusion explicitly.  The builder functions
(:func:`infer` and friends) compute conclusions with a fixed layout: the
principal formula goes first on its side, followed by the remaining context of
each premise in order.  :func:`check_proof` recomputes every conclusion and
reports mismatches, so hand-written or tampered trees are validated rather
than trusted.

Occurrences are ``(side, index)`` pairs with side ``"l"`` or ``"r"``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Optional, Sequence

from .terms import (
    And,
    Atom,
    Exists,
    Forall,
    Formula,
    Imp,
    Neg,
    OmegaVar,
    Or,
    RewriteSystem,
    Sequent,
    Sort,
    SortError,
    Substitution,
    Term,
    Var,
    apply_substitution,
    fmt,
    free_vars,
    instantiate_quantifier,
    is_quantifier_free,
    normalize,
    numeral,
    numeral_value,
)

CUT = "cut"
CONFIG = "config"

UNARY_LOGICAL = {"and-l1", "and-l2", "or-r1", "or-r2", "imp-r", "neg-l", "neg-r", "all-l", "all-r", "ex-l", "ex-r"}
BINARY_LOGICAL = {"and-r", "or-l", "imp-l"}
STRUCTURAL = {"weak-l", "weak-r", "contr-l", "contr-r"}
RULES = UNARY_LOGICAL | BINARY_LOGICAL | STRUCTURAL | {"axiom", "link", "cut", "eps-l", "eps-r", "perm"}


class ProofError(ValueError):
    """A proof could not be built because a rule does not apply."""


class IllFormedSchema(ValueError):
    pass


class BadOccurrence(ValueError):
    pass


@dataclass(frozen=True)
class Aux:
    premise: int
    side: str
    index: int


@dataclass(frozen=True)
class Link:
    symbol: str
    args: tuple


@dataclass(frozen=True)
class ProofNode:
    rule: str
    premises: tuple
    conclusion: Sequent
    principal: Optional[Formula] = None
    aux: tuple = ()
    term: Optional[Term] = None
    link: Optional[Link] = None
    theory: bool = False
    reconstructed: bool = False
    marks: Optional[frozenset] = field(default=None, compare=False)
    # permutation for "perm" nodes: conclusion position -> premise position
    perm: Optional[tuple] = None

    def marked(self, side: str, index: int, flags: Iterable[str] = (CUT, CONFIG)) -> bool:
        if self.marks is None:
            return False
        return any((side, index, f) in self.marks for f in flags)

    def walk(self):
        yield self
        for p in self.premises:
            yield from p.walk()

    def size(self) -> int:
        return sum(1 for _ in self.walk())

    def __str__(self) -> str:
        return render_proof(self)


# --------------------------------------------------------------------------
# building


def _find(seq: Sequent, side: str, f: Formula, skip: Sequence[int] = ()) -> int:
    for i, g in enumerate(seq.side(side)):
        if g == f and i not in skip:
            return i
    raise ProofError(f"{fmt(f)} not found on the {'left' if side == 'l' else 'right'} of {fmt(seq)}")


def _without(fs: tuple, drop: Iterable[int]) -> tuple:
    drop = set(drop)
    return tuple(f for i, f in enumerate(fs) if i not in drop)


def _assemble(premises: Sequence[ProofNode], aux: Sequence[Aux], principal: Optional[Formula], pside: Optional[str]) -> Sequent:
    ante: list = []
    succ: list = []
    if principal is not None:
        (ante if pside == "l" else succ).append(principal)
    for pi, p in enumerate(premises):
        dl = [a.index for a in aux if a.premise == pi and a.side == "l"]
        dr = [a.index for a in aux if a.premise == pi and a.side == "r"]
        ante.extend(_without(p.conclusion.ante, dl))
        succ.extend(_without(p.conclusion.succ, dr))
    return Sequent(tuple(ante), tuple(succ))


def principal_side(rule: str) -> Optional[str]:
    if rule in {"and-l1", "and-l2", "or-l", "imp-l", "neg-l", "all-l", "ex-l", "weak-l", "contr-l"}:
        return "l"
    if rule in {"and-r", "or-r1", "or-r2", "imp-r", "neg-r", "all-r", "ex-r", "weak-r", "contr-r"}:
        return "r"
    return None


def axiom(seq: Sequent, theory: bool = False, reconstructed: bool = False) -> ProofNode:
    return ProofNode("axiom", (), seq, theory=theory, reconstructed=reconstructed)


def link(symbol: str, args: Sequence[Term], seq: Sequent) -> ProofNode:
    return ProofNode("link", (), seq, link=Link(symbol, tuple(args)))


def expected_aux(rule: str, principal: Formula, term: Optional[Term]) -> list:
    """Aux formulas ``(premise, side, formula)`` for a logical rule."""
    if rule == "and-l1":
        return [(0, "l", principal.left)]
    if rule == "and-l2":
        return [(0, "l", principal.right)]
    if rule == "and-r":
        return [(0, "r", principal.left), (1, "r", principal.right)]
    if rule == "or-l":
        return [(0, "l", principal.left), (1, "l", principal.right)]
    if rule == "or-r1":
        return [(0, "r", principal.left)]
    if rule == "or-r2":
        return [(0, "r", principal.right)]
    if rule == "imp-l":
        return [(0, "r", principal.left), (1, "l", principal.right)]
    if rule == "imp-r":
        return [(0, "l", principal.left), (0, "r", principal.right)]
    if rule == "neg-l":
        return [(0, "r", principal.body)]
    if rule == "neg-r":
        return [(0, "l", principal.body)]
    if rule in {"all-l", "ex-l"}:
        return [(0, "l", instantiate_quantifier(principal, term))]
    if rule in {"all-r", "ex-r"}:
        return [(0, "r", instantiate_quantifier(principal, term))]
    raise ProofError(f"{rule} is not a logical rule")


_SHAPES = {
    "and-l1": And, "and-l2": And, "and-r": And, "or-l": Or, "or-r1": Or, "or-r2": Or,
    "imp-l": Imp, "imp-r": Imp, "neg-l": Neg, "neg-r": Neg,
    "all-l": Forall, "all-r": Forall, "ex-l": Exists, "ex-r": Exists,
}


def infer(rule: str, premises: Sequence[ProofNode], principal: Optional[Formula] = None,
          term: Optional[Term] = None, reconstructed: bool = False) -> ProofNode:
    """Apply a logical or structural rule, locating auxiliary formulas by value."""
    premises = tuple(premises)
    if rule in _SHAPES:
        if not isinstance(principal, _SHAPES[rule]):
            raise ProofError(f"{rule} needs a principal formula of shape {_SHAPES[rule].__name__}, got {fmt(principal)}")
        if rule in {"all-l", "all-r", "ex-l", "ex-r"} and term is None:
            raise ProofError(f"{rule} needs a term")
        aux = []
        for pi, side, f in expected_aux(rule, principal, term):
            used = [a.index for a in aux if a.premise == pi and a.side == side]
            aux.append(Aux(pi, side, _find(premises[pi].conclusion, side, f, used)))
        concl = _assemble(premises, aux, principal, principal_side(rule))
        return ProofNode(rule, premises, concl, principal, tuple(aux), term, reconstructed=reconstructed)
    if rule in {"weak-l", "weak-r"}:
        side = rule[-1]
        return ProofNode(rule, premises, _assemble(premises, [], principal, side), principal, (), reconstructed=reconstructed)
    if rule in {"contr-l", "contr-r"}:
        side = rule[-1]
        i = _find(premises[0].conclusion, side, principal)
        j = _find(premises[0].conclusion, side, principal, [i])
        aux = (Aux(0, side, i), Aux(0, side, j))
        return ProofNode(rule, premises, _assemble(premises, aux, principal, side), principal, aux, reconstructed=reconstructed)
    if rule == "cut":
        aux = (Aux(0, "r", _find(premises[0].conclusion, "r", principal)),
               Aux(1, "l", _find(premises[1].conclusion, "l", principal)))
        return ProofNode(rule, premises, _assemble(premises, aux, None, None), principal, aux, reconstructed=reconstructed)
    raise ProofError(f"unknown rule {rule}")


def epsilon(side: str, new: Formula, old: Formula, premise: ProofNode, reconstructed: bool = False) -> ProofNode:
    """Replace ``old`` by the equationally equal ``new`` in place."""
    i = _find(premise.conclusion, side, old)
    fs = list(premise.conclusion.side(side))
    fs[i] = new
    c = premise.conclusion
    concl = Sequent(tuple(fs), c.succ) if side == "l" else Sequent(c.ante, tuple(fs))
    return ProofNode(f"eps-{side}", (premise,), concl, new, (Aux(0, side, i),), reconstructed=reconstructed)


def permute(premise: ProofNode, target: Sequent) -> ProofNode:
    """Reorder ``premise``'s conclusion to ``target`` (same multisets)."""
    perm = []
    for side in ("l", "r"):
        used: list = []
        for f in target.side(side):
            i = _find(premise.conclusion, side, f, used)
            used.append(i)
            perm.append((side, i))
    if len(perm) != len(premise.conclusion.ante) + len(premise.conclusion.succ):
        raise ProofError("permutation target is not a rearrangement")
    return ProofNode("perm", (premise,), target, perm=tuple(perm))


# --------------------------------------------------------------------------
# occurrence tracing


def ancestor_map(node: ProofNode) -> dict:
    """Map each conclusion occurrence to the premise occurrences it descends from.

    Keys are ``(side, index)``; values are lists of ``(premise, side, index)``.
    """
    c = node.conclusion
    out: dict = {}
    if node.rule in {"axiom", "link"}:
        return {(s, i): [] for s in ("l", "r") for i in range(len(c.side(s)))}
    if node.rule == "perm":
        for pos, (side, i) in enumerate(node.perm):
            n_left = len(c.ante)
            key = ("l", pos) if pos < n_left else ("r", pos - n_left)
            out[key] = [(0, side, i)]
        return out
    if node.rule in {"eps-l", "eps-r"}:
        for s in ("l", "r"):
            for i in range(len(c.side(s))):
                out[(s, i)] = [(0, s, i)]
        return out
    pside = principal_side(node.rule)
    cursor = {"l": 0, "r": 0}
    if pside is not None:
        out[(pside, 0)] = [(a.premise, a.side, a.index) for a in node.aux]
        cursor[pside] = 1
    for pi, p in enumerate(node.premises):
        for s in ("l", "r"):
            skip = {a.index for a in node.aux if a.premise == pi and a.side == s}
            for i in range(len(p.conclusion.side(s))):
                if i in skip:
                    continue
                out[(s, cursor[s])] = [(pi, s, i)]
                cursor[s] += 1
    return out


def mark_ancestors(p: ProofNode, omega: Iterable = ()) -> ProofNode:
    """Mark cut ancestors and ancestors of the end-sequent occurrences ``omega``."""
    omega = frozenset(tuple(o) for o in omega)
    for side, i in omega:
        if side not in ("l", "r") or not 0 <= i < len(p.conclusion.side(side)):
            raise BadOccurrence(f"no occurrence ({side}, {i}) in {fmt(p.conclusion)}")
    return _mark(p, frozenset((s, i, CONFIG) for s, i in omega))


def _mark(node: ProofNode, marks: frozenset) -> ProofNode:
    amap = ancestor_map(node)
    inherited: list = [set() for _ in node.premises]
    for (s, i, flag) in marks:
        for pi, ps, pj in amap.get((s, i), []):
            inherited[pi].add((ps, pj, flag))
    if node.rule == "cut":
        for a in node.aux:
            inherited[a.premise].add((a.side, a.index, CUT))
    premises = tuple(_mark(p, frozenset(m)) for p, m in zip(node.premises, inherited))
    return replace(node, premises=premises, marks=marks)


def marked_positions(node: ProofNode) -> frozenset:
    if node.marks is None:
        return frozenset()
    return frozenset((s, i) for s, i, _ in node.marks)


# --------------------------------------------------------------------------
# schemata


@dataclass(frozen=True)
class ProofSchemaPair:
    symbol: str
    param: str
    step_var: str
    end: Sequent
    base: ProofNode
    step: ProofNode
    # extra iota/omega arguments are not used by the corpus; links carry the index only

    def end_at(self, index: Term, rs: Optional[RewriteSystem] = None) -> Sequent:
        return normalize(apply_substitution(self.end, Substitution(omega={self.param: index})), rs)


@dataclass(frozen=True)
class ProofSchema:
    pairs: tuple
    rewrite: RewriteSystem = field(default_factory=RewriteSystem, compare=False)

    def pair(self, symbol: str) -> ProofSchemaPair:
        for p in self.pairs:
            if p.symbol == symbol:
                return p
        raise KeyError(symbol)

    def order(self, symbol: str) -> int:
        return [p.symbol for p in self.pairs].index(symbol)

    @property
    def root(self) -> ProofSchemaPair:
        return self.pairs[0]


# --------------------------------------------------------------------------
# checking


@dataclass(frozen=True)
class Violation:
    path: tuple
    rule: str
    message: str

    def __str__(self) -> str:
        where = ".".join(map(str, self.path)) or "root"
        return f"[{where}] {self.rule}: {self.message}"


def _is_tautological_axiom(seq: Sequent) -> bool:
    return len(seq.ante) == 1 and len(seq.succ) == 1 and seq.ante[0] == seq.succ[0] and isinstance(seq.ante[0], Atom)


def _expected_conclusion(node: ProofNode, rs: Optional[RewriteSystem]) -> Sequent:
    if node.rule in _SHAPES:
        for (pi, side, f), a in zip(expected_aux(node.rule, node.principal, node.term), node.aux):
            if (a.premise, a.side) != (pi, side):
                raise ProofError("auxiliary occurrence on the wrong side")
            fs = node.premises[a.premise].conclusion.side(a.side)
            if not 0 <= a.index < len(fs) or fs[a.index] != f:
                raise ProofError(f"expected auxiliary formula {fmt(f)}")
        if len(node.aux) != len(expected_aux(node.rule, node.principal, node.term)):
            raise ProofError("wrong number of auxiliary formulas")
        return _assemble(node.premises, node.aux, node.principal, principal_side(node.rule))
    if node.rule in {"weak-l", "weak-r"}:
        return _assemble(node.premises, (), node.principal, node.rule[-1])
    if node.rule in {"contr-l", "contr-r"}:
        side = node.rule[-1]
        fs = node.premises[0].conclusion.side(side)
        idx = [a.index for a in node.aux]
        if len(idx) != 2 or len(set(idx)) != 2 or any(not 0 <= i < len(fs) or fs[i] != node.principal for i in idx):
            raise ProofError("contraction needs two occurrences of the principal formula")
        return _assemble(node.premises, node.aux, node.principal, side)
    if node.rule == "cut":
        a, b = node.aux
        left = node.premises[0].conclusion.succ
        right = node.premises[1].conclusion.ante
        if not (0 <= a.index < len(left) and 0 <= b.index < len(right)):
            raise ProofError("cut occurrence out of range")
        if left[a.index] != right[b.index]:
            raise ProofError(f"cut formulas differ: {fmt(left[a.index])} vs {fmt(right[b.index])}")
        if node.principal is not None and left[a.index] != node.principal:
            raise ProofError("cut formula does not match the declared one")
        return _assemble(node.premises, node.aux, None, None)
    if node.rule in {"eps-l", "eps-r"}:
        side = node.rule[-1]
        (a,) = node.aux
        fs = list(node.premises[0].conclusion.side(side))
        old = fs[a.index]
        if normalize(old, rs) != normalize(node.principal, rs):
            raise ProofError(f"{fmt(old)} and {fmt(node.principal)} are not equal in the theory")
        fs[a.index] = node.principal
        c = node.premises[0].conclusion
        return Sequent(tuple(fs), c.succ) if side == "l" else Sequent(c.ante, tuple(fs))
    if node.rule == "perm":
        if not node.premises[0].conclusion.same_multiset(node.conclusion):
            raise ProofError("permutation changes the multiset")
        return node.conclusion
    raise ProofError(f"unknown rule {node.rule}")


def _eigen_violation(node: ProofNode) -> Optional[str]:
    if node.rule not in {"all-r", "ex-l"}:
        return None
    t = node.term
    if not isinstance(t, Var):
        return f"eigenvariable must be a free variable, got {fmt(t)}"
    if t.name in free_vars(node.conclusion):
        return f"eigenvariable {t.name} occurs in the conclusion"
    return None


def check_proof(p: ProofNode, theory: Optional[RewriteSystem] = None, schema: Optional[ProofSchema] = None,
                owner: Optional[str] = None, in_step: bool = False, step_var: str = "k") -> list:
    """Return every rule violation in ``p``; an empty list means well formed.

    When ``schema`` is given, proof links are checked against the linked end
    sequents and the link ordering discipline for ``owner``.
    """
    out: list = []
    _check(p, (), theory, schema, owner, in_step, step_var, out)
    return out


def _check(node, path, rs, schema, owner, in_step, step_var, out):
    for i, prem in enumerate(node.premises):
        _check(prem, path + (i,), rs, schema, owner, in_step, step_var, out)
    if node.rule not in RULES:
        out.append(Violation(path, node.rule, "unknown rule"))
        return
    if node.rule == "axiom":
        if not all(is_quantifier_free(f) for f in node.conclusion.formulas()):
            out.append(Violation(path, "axiom", "axioms must be quantifier-free"))
        elif not node.theory and not _is_tautological_axiom(node.conclusion):
            out.append(Violation(path, "axiom", f"{fmt(node.conclusion)} is not of the form A ⊢ A"))
        return
    if node.rule == "link":
        if schema is not None:
            msg = _check_link(node, rs, schema, owner, in_step, step_var)
            if msg:
                out.append(Violation(path, "link", msg))
        return
    expected_premises = 2 if node.rule in BINARY_LOGICAL or node.rule == "cut" else 1
    if len(node.premises) != expected_premises:
        out.append(Violation(path, node.rule, f"expected {expected_premises} premises"))
        return
    try:
        expected = _expected_conclusion(node, rs)
    except (ProofError, SortError, IndexError, ValueError, AttributeError) as e:
        out.append(Violation(path, node.rule, str(e)))
        return
    if expected != node.conclusion:
        out.append(Violation(path, node.rule, f"conclusion should be {fmt(expected)}, found {fmt(node.conclusion)}"))
    msg = _eigen_violation(node)
    if msg:
        out.append(Violation(path, node.rule, msg))


def _check_link(node, rs, schema: ProofSchema, owner, in_step, step_var) -> Optional[str]:
    ln = node.link
    try:
        target = schema.pair(ln.symbol)
    except KeyError:
        return f"unknown proof symbol {ln.symbol}"
    if len(ln.args) != 1 or ln.args[0].sort != Sort.OMEGA:
        return "link argument must be a single omega term"
    arg = ln.args[0]
    if owner is not None:
        if ln.symbol == owner:
            if not in_step:
                return "base proof links to its own symbol"
            if arg != OmegaVar(step_var):
                return f"self-link must be at the decremented parameter {step_var}"
        elif schema.order(ln.symbol) < schema.order(owner):
            return f"{owner} may not link to earlier symbol {ln.symbol}"
    expected = target.end_at(arg, rs)
    if not normalize(node.conclusion, rs).same_multiset(expected):
        return f"link conclusion {fmt(node.conclusion)} differs from {fmt(expected)}"
    return None


def check_schema(schema: ProofSchema) -> list:
    """Check every base and step proof and their end sequents."""
    out: list = []
    rs = schema.rewrite
    for pair in schema.pairs:
        for which, proof, index, in_step in (
            ("base", pair.base, numeral(0), False),
            ("step", pair.step, _succ_var(pair.step_var), True),
        ):
            for v in check_proof(proof, rs, schema, pair.symbol, in_step, pair.step_var):
                out.append(Violation((pair.symbol, which) + v.path, v.rule, v.message))
            expected = pair.end_at(index, rs)
            if not normalize(proof.conclusion, rs).same_multiset(expected):
                out.append(Violation((pair.symbol, which), "end", f"proves {fmt(proof.conclusion)}, expected {fmt(expected)}"))
    return out


def _succ_var(name: str) -> Term:
    from .terms import Succ

    return Succ(OmegaVar(name))


# --------------------------------------------------------------------------
# unfolding


def substitute_proof(p: ProofNode, sigma: Substitution, rs: Optional[RewriteSystem]) -> ProofNode:
    """Apply ``sigma`` to every formula and term, then normalize."""

    def sub(e):
        return normalize(apply_substitution(e, sigma), rs)

    premises = tuple(substitute_proof(q, sigma, rs) for q in p.premises)
    link_ = Link(p.link.symbol, tuple(sub(a) for a in p.link.args)) if p.link else None
    return replace(
        p,
        premises=premises,
        conclusion=sub(p.conclusion),
        principal=sub(p.principal) if p.principal is not None else None,
        term=sub(p.term) if p.term is not None else None,
        link=link_,
    )


def unfold_proof_schema(schema: ProofSchema, gamma: int, symbol: Optional[str] = None) -> ProofNode:
    """Ground LK proof of ``symbol`` (default: the first pair) at parameter ``gamma``."""
    if gamma < 0:
        raise ValueError("gamma must be non-negative")
    cache: dict = {}
    return _unfold(schema, symbol or schema.root.symbol, gamma, cache)


def _unfold(schema: ProofSchema, symbol: str, gamma: int, cache: dict) -> ProofNode:
    key = (symbol, gamma)
    if key in cache:
        return cache[key]
    pair = schema.pair(symbol)
    rs = schema.rewrite
    if gamma == 0:
        body = substitute_proof(pair.base, Substitution(), rs)
    else:
        body = substitute_proof(pair.step, Substitution(omega={pair.step_var: numeral(gamma - 1)}), rs)
    result = _splice(schema, body, cache)
    cache[key] = result
    return result


def _splice(schema: ProofSchema, node: ProofNode, cache: dict) -> ProofNode:
    if node.rule == "link":
        arg = node.link.args[0]
        value = numeral_value(arg)
        if value is None:
            raise IllFormedSchema(f"link argument {fmt(arg)} does not normalize to a numeral")
        sub = _unfold(schema, node.link.symbol, value, cache)
        if sub.conclusion == node.conclusion:
            return sub
        if sub.conclusion.same_multiset(node.conclusion):
            return permute(sub, node.conclusion)
        raise IllFormedSchema(f"link {node.link.symbol}({fmt(arg)}) expects {fmt(node.conclusion)}, unfolding proves {fmt(sub.conclusion)}")
    if not node.premises:
        return node
    return replace(node, premises=tuple(_splice(schema, p, cache) for p in node.premises))


def contains_links(p: ProofNode) -> bool:
    return any(n.rule == "link" for n in p.walk())


# --------------------------------------------------------------------------
# configurations


def link_configurations(p: ProofNode) -> list:
    """``(symbol, args, configuration)`` for every link in a marked proof."""
    out = []
    for n in p.walk():
        if n.rule == "link":
            out.append((n.link.symbol, n.link.args, marked_positions(n)))
    return out


def relevant_configurations(schema: ProofSchema) -> dict:
    """Configurations reachable from the root symbol with the empty configuration."""
    result: dict = {p.symbol: set() for p in schema.pairs}
    work = [(schema.root.symbol, frozenset())]
    while work:
        symbol, omega = work.pop()
        if omega in result[symbol]:
            continue
        result[symbol].add(omega)
        pair = schema.pair(symbol)
        for proof in (pair.base, pair.step):
            for sym, _args, conf in link_configurations(mark_ancestors(proof, omega)):
                work.append((sym, conf))
    for sym, confs in result.items():
        if not confs:
            confs.add(frozenset())
    return {k: frozenset(v) for k, v in result.items()}


# --------------------------------------------------------------------------
# rendering


def render_proof(p: ProofNode, indent: int = 0) -> str:
    lines: list = []
    _render(p, 0, lines)
    return "\n".join(lines)


def _render_sequent(node: ProofNode) -> str:
    def side(s: str) -> str:
        parts = []
        for i, f in enumerate(node.conclusion.side(s)):
            star = ""
            if node.marks is not None:
                if (s, i, CONFIG) in node.marks:
                    star = "**"
                elif (s, i, CUT) in node.marks:
                    star = "*"
            parts.append(fmt(f) + star)
        return ", ".join(parts)

    return f"{side('l')} ⊢ {side('r')}".strip()


def _render(node: ProofNode, depth: int, lines: list) -> None:
    label = node.rule
    if node.link is not None:
        label += f" {node.link.symbol}({', '.join(fmt(a) for a in node.link.args)})"
    if node.theory:
        label += " [theory]"
    lines.append("  " * depth + f"{_render_sequent(node)}    ({label})")
    for p in node.premises:
        _render(p, depth + 1, lines)
