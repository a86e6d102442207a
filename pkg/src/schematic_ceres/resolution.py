"""Resolution proof schemata, their unfolding to ground trees, and verification."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Union

from .clauses import Clause, EMPTY_CLAUSE, subsumes
from .terms import (
    Atom,
    Lambda,
    OmegaVar,
    RewriteSystem,
    Sort,
    SortError,
    Substitution,
    Term,
    apply_substitution,
    fmt,
    is_ground,
    normalize,
    numeral,
    numeral_value,
)


class MissingBinding(ValueError):
    pass


class IllFormedRho(ValueError):
    pass


# --------------------------------------------------------------------------
# clause schemata


@dataclass(frozen=True)
class ClauseSchema:
    """A named clause template.

    ``params`` are ``(name, kind)`` pairs with kind ``omega``, ``schem`` or
    ``clause``.  Without ``step`` the schema is a plain template.  With
    ``step`` the first parameter drives recursion: ``c(0) = base`` and
    ``c(k+1) = c(k) ∘ step``.
    """

    name: str
    params: tuple
    base: Clause
    step: Optional[Clause] = None
    step_var: str = "k"

    def check(self) -> list:
        """Variables of base/step must be parameters (plus the step variable)."""
        from .terms import free_vars

        names = {p for p, _ in self.params}
        problems = []
        extra = free_vars(self.base.as_sequent()) - names
        if extra:
            problems.append(f"{self.name}: base uses unbound {sorted(extra)}")
        if self.step is not None:
            extra = free_vars(self.step.as_sequent()) - names - {self.step_var}
            if extra:
                problems.append(f"{self.name}: step uses unbound {sorted(extra)}")
        return problems

    def instantiate(self, args: Sequence, rs: Optional[RewriteSystem] = None) -> Clause:
        if len(args) != len(self.params):
            raise IllFormedRho(f"{self.name} expects {len(self.params)} arguments, got {len(args)}")
        sigma = Substitution()
        clause_args: list = []
        for (name, kind), value in zip(self.params, args):
            if kind == "omega":
                if not isinstance(value, Term) or value.sort != Sort.OMEGA:
                    raise SortError(f"{self.name}: {name} needs an omega term")
                sigma.omega[name] = value
            elif kind == "schem":
                if not isinstance(value, Lambda):
                    raise SortError(f"{self.name}: {name} needs a schematic binding")
                sigma.schem[name] = value
            elif kind == "clause":
                clause_args.append(value)
            else:
                sigma.iota[name] = value
        out = _instantiate_clause(self.base, sigma, rs)
        if self.step is not None:
            first = self.params[0][0]
            n = numeral_value(sigma.omega[first])
            if n is None:
                raise MissingBinding(f"{self.name}: recursion parameter is not a numeral")
            for j in range(n):
                s2 = Substitution(dict(sigma.omega), dict(sigma.iota), dict(sigma.schem))
                s2.omega[self.step_var] = numeral(j)
                out = out.compose(_instantiate_clause(self.step, s2, rs))
        for c in clause_args:
            out = out.compose(c)
        return out


def _instantiate_clause(c: Clause, sigma: Substitution, rs) -> Clause:
    return c.map(lambda a: normalize(apply_substitution(a, sigma), rs))


# --------------------------------------------------------------------------
# resolution terms


@dataclass(frozen=True)
class ClauseVarRef:
    name: str


@dataclass(frozen=True)
class TemplateRef:
    name: str
    args: tuple  # terms (omega) or str names of schematic variables


@dataclass(frozen=True)
class ClauseExpr:
    """Composition ``∘`` of clause variables, templates and literal clauses."""

    parts: tuple

    def __str__(self) -> str:
        out = []
        for p in self.parts:
            if isinstance(p, ClauseVarRef):
                out.append(p.name)
            elif isinstance(p, TemplateRef):
                out.append(f"{p.name}({', '.join(a if isinstance(a, str) else fmt(a) for a in p.args)})")
            else:
                out.append(f"({p})")
        return " ∘ ".join(out) or "⊢"


@dataclass(frozen=True)
class RTerm:
    pass


@dataclass(frozen=True)
class RLeaf(RTerm):
    expr: ClauseExpr


@dataclass(frozen=True)
class RRes(RTerm):
    left: RTerm
    right: RTerm
    pivot: Atom


@dataclass(frozen=True)
class RCall(RTerm):
    index: int
    param: Term
    args: tuple  # omega terms, schematic names (str) or ClauseExpr


@dataclass(frozen=True)
class RhoRule:
    index: int
    params: tuple  # (name, kind) after the recursion parameter
    step_var: str
    base: RTerm
    step: RTerm


@dataclass
class ResolutionProofSchema:
    rules: dict  # index -> RhoRule
    templates: dict  # name -> ClauseSchema
    rewrite: Optional[RewriteSystem] = None

    def first(self) -> int:
        return min(self.rules)

    def check(self) -> list:
        """Ordering discipline: ρ_i may call ρ_j for j > i at any parameter, and
        ρ_j for j <= i only from its step case at the step variable."""
        problems = []
        for i, rule in self.rules.items():
            for side, term in (("base", rule.base), ("step", rule.step)):
                for call in _calls(term):
                    if call.index not in self.rules:
                        problems.append(f"rho {i} {side}: unknown rho {call.index}")
                        continue
                    smaller = side == "step" and call.param == OmegaVar(rule.step_var)
                    if call.index <= i and not smaller:
                        problems.append(f"rho {i} {side}: call to rho {call.index} violates the ordering")
                    if len(call.args) != len(self.rules[call.index].params):
                        problems.append(f"rho {i} {side}: rho {call.index} expects {len(self.rules[call.index].params)} arguments")
        for t in self.templates.values():
            problems.extend(t.check())
        return problems

    def dependency_edges(self) -> list:
        edges = []
        for i, rule in sorted(self.rules.items()):
            seen = set()
            for side, term in (("step", rule.step), ("base", rule.base)):
                for call in _calls(term):
                    if call.index in seen:
                        continue
                    seen.add(call.index)
                    omegas = [fmt(call.param)] + [fmt(a) for a in call.args if isinstance(a, Term)]
                    edges.append((i, call.index, f"({', '.join(omegas)})"))
        return edges


def _calls(t: RTerm) -> list:
    if isinstance(t, RCall):
        return [t]
    if isinstance(t, RRes):
        return _calls(t.left) + _calls(t.right)
    return []


# --------------------------------------------------------------------------
# ground trees


@dataclass(frozen=True)
class GLeaf:
    clause: Clause
    base: Clause
    label: Optional[tuple] = None  # (template name, rho level, the template's omega arguments)


@dataclass(frozen=True)
class GNode:
    left: "GroundTree"
    right: "GroundTree"
    pivot: Atom
    resolvent: Clause
    origin: Optional[tuple] = None  # (rho index, level, omega args) when produced by a call

    @property
    def clause(self) -> Clause:
        return self.resolvent


GroundTree = Union[GLeaf, GNode]


def resolve(left: Clause, right: Clause, pivot: Atom) -> Clause:
    """Remove every occurrence of ``pivot`` from left's succedent and right's antecedent."""
    out = Clause(
        [a for a in left.ante] + [a for a in right.ante if a != pivot],
        [a for a in left.succ if a != pivot] + [a for a in right.succ],
    )
    return out.merged()


def orient(left: GroundTree, right: GroundTree, pivot: Atom) -> tuple:
    """Put the clause holding ``pivot`` positively on the left when possible."""
    if pivot in left.clause.succ and pivot in right.clause.ante:
        return left, right
    if pivot in right.clause.succ and pivot in left.clause.ante:
        return right, left
    return left, right


def make_node(left: GroundTree, right: GroundTree, pivot: Atom, origin=None) -> GNode:
    left, right = orient(left, right, pivot)
    return GNode(left, right, pivot, resolve(left.clause, right.clause, pivot), origin)


def tree_nodes(t: GroundTree):
    yield t
    if isinstance(t, GNode):
        yield from tree_nodes(t.left)
        yield from tree_nodes(t.right)


def tree_size(t: GroundTree) -> int:
    return sum(1 for _ in tree_nodes(t))


def leaves(t: GroundTree) -> list:
    return [n for n in tree_nodes(t) if isinstance(n, GLeaf)]


def leaf_labels(t: GroundTree, share: bool = True) -> list:
    """Leaf labels, visiting each distinct ρ call ``(index, level, omegas)`` once when ``share``."""
    out: list = []
    seen: set = set()

    def walk(n):
        if isinstance(n, GLeaf):
            out.append(n.label)
            return
        if share and n.origin is not None:
            if n.origin in seen:
                return
            seen.add(n.origin)
        walk(n.left)
        walk(n.right)

    walk(t)
    return out


# --------------------------------------------------------------------------
# unfolding


@dataclass
class SubstitutionSchema:
    """ϑ for schematic variables, θ for clause variables, ν for omega variables."""

    schem: dict = field(default_factory=dict)  # name -> Lambda
    clause: dict = field(default_factory=dict)  # name -> Clause
    omega: dict = field(default_factory=dict)  # name -> Term

    def check(self) -> list:
        from .terms import free_vars

        problems = []
        for name, lam in self.schem.items():
            extra = free_vars(lam.body) - {lam.var}
            if extra:
                problems.append(f"{name}: λ-body mentions {sorted(extra)}")
        return problems


class _Env:
    def __init__(self, values: dict, level: int, omegas: tuple):
        self.values = values
        self.level = level
        self.omegas = omegas


def unfold(R: ResolutionProofSchema, gamma: int, theta: dict, nu: dict, vartheta: dict,
           top_args: Optional[Sequence[str]] = None, rs: Optional[RewriteSystem] = None) -> GroundTree:
    """Ground tree for ``ρ_first(γ, args)θνϑ``.

    ``top_args`` are the formal argument names of the first rule (defaults to
    its parameter names); each is looked up in ``nu``, ``vartheta`` or
    ``theta`` according to its kind.
    """
    rs = rs if rs is not None else R.rewrite
    first = R.rules[R.first()]
    names = list(top_args) if top_args is not None else [p for p, _ in first.params]
    values = []
    for (pname, kind), name in zip(first.params, names):
        if kind == "omega":
            if name not in nu:
                raise MissingBinding(f"omega variable {name} is unbound")
            values.append(normalize(nu[name], rs))
        elif kind == "schem":
            if name not in vartheta:
                raise MissingBinding(f"schematic variable {name} is unbound")
            values.append(vartheta[name])
        elif kind == "clause":
            if name not in theta:
                raise MissingBinding(f"clause variable {name} is unbound")
            values.append(theta[name])
        else:
            raise IllFormedRho(f"unknown parameter kind {kind}")
    memo: dict = {}
    return _call(R, R.first(), gamma, tuple(values), rs, memo)


def _call(R, index: int, level: int, args: tuple, rs, memo) -> GroundTree:
    rule = R.rules.get(index)
    if rule is None:
        raise IllFormedRho(f"rho {index} is not defined")
    if len(args) != len(rule.params):
        raise IllFormedRho(f"rho {index} expects {len(rule.params)} arguments, got {len(args)}")
    omegas = tuple(numeral_value(a) for (p, kind), a in zip(rule.params, args) if kind == "omega")
    key = (index, level, args)
    if key in memo:
        return memo[key]
    values = {p: a for (p, _), a in zip(rule.params, args)}
    if level == 0:
        body = rule.base
    else:
        body = rule.step
        values[rule.step_var] = numeral(level - 1)
    env = _Env(values, level, omegas)
    tree = _eval(R, body, env, rs, memo)
    if isinstance(tree, GNode):
        tree = GNode(tree.left, tree.right, tree.pivot, tree.resolvent, (index, level, omegas))
    memo[key] = tree
    return tree


def _omega(t: Term, env: _Env, rs) -> Term:
    sigma = Substitution(omega={k: v for k, v in env.values.items() if isinstance(v, Term)})
    out = normalize(apply_substitution(t, sigma), rs)
    if numeral_value(out) is None:
        raise MissingBinding(f"omega term {fmt(t)} does not reduce to a numeral")
    return out


def _sigma(env: _Env) -> Substitution:
    s = Substitution()
    for k, v in env.values.items():
        if isinstance(v, Term):
            s.omega[k] = v
        elif isinstance(v, Lambda):
            s.schem[k] = v
    return s


def _ground(e, env: _Env, rs):
    out = normalize(apply_substitution(e, _sigma(env)), rs)
    if not is_ground(out):
        raise MissingBinding(f"{fmt(out)} is not ground after substitution")
    return out


def _clause_expr(R, expr: ClauseExpr, env: _Env, rs) -> tuple:
    """``(whole clause, template part, label)`` for a leaf expression."""
    whole = EMPTY_CLAUSE
    base = None
    label = None
    for part in expr.parts:
        if isinstance(part, ClauseVarRef):
            if part.name not in env.values or not isinstance(env.values[part.name], Clause):
                raise MissingBinding(f"clause variable {part.name} is unbound")
            whole = whole.compose(env.values[part.name])
        elif isinstance(part, TemplateRef):
            tmpl = R.templates.get(part.name)
            if tmpl is None:
                raise IllFormedRho(f"unknown clause schema {part.name}")
            args = []
            for a, (_, kind) in zip(part.args, tmpl.params):
                if kind == "schem":
                    if a not in env.values:
                        raise MissingBinding(f"schematic variable {a} is unbound")
                    args.append(env.values[a])
                elif kind == "clause":
                    args.append(_clause_expr(R, a, env, rs)[0])
                else:
                    args.append(_omega(a, env, rs))
            c = tmpl.instantiate(args, rs)
            if not is_ground(c.as_sequent()):
                raise MissingBinding(f"{part.name} instance {c} is not ground")
            whole = whole.compose(c)
            if base is None:
                base = c
                omegas = tuple(numeral_value(x) for x, (_, kind) in zip(args, tmpl.params) if kind == "omega")
                label = (part.name, env.level, omegas)
            else:
                base = base.compose(c)
        else:
            whole = whole.compose(part.map(lambda a: _ground(a, env, rs)))
    return whole, base, label


def _eval(R, t: RTerm, env: _Env, rs, memo) -> GroundTree:
    if isinstance(t, RLeaf):
        whole, base, label = _clause_expr(R, t.expr, env, rs)
        return GLeaf(whole, base if base is not None else whole, label)
    if isinstance(t, RRes):
        left = _eval(R, t.left, env, rs, memo)
        right = _eval(R, t.right, env, rs, memo)
        return make_node(left, right, _ground(t.pivot, env, rs))
    if isinstance(t, RCall):
        level = numeral_value(_omega(t.param, env, rs))
        target = R.rules.get(t.index)
        if target is None:
            raise IllFormedRho(f"rho {t.index} is not defined")
        args = []
        for a, (_, kind) in zip(t.args, target.params):
            if kind == "omega":
                args.append(_omega(a, env, rs))
            elif kind == "schem":
                if a not in env.values:
                    raise MissingBinding(f"schematic variable {a} is unbound")
                args.append(env.values[a])
            elif kind == "clause":
                args.append(_clause_expr(R, a, env, rs)[0])
        if len(t.args) != len(target.params):
            raise IllFormedRho(f"rho {t.index} expects {len(target.params)} arguments, got {len(t.args)}")
        return _call(R, t.index, level, tuple(args), rs, memo)
    raise IllFormedRho(f"unexpected resolution term {t!r}")


# --------------------------------------------------------------------------
# verification


@dataclass(frozen=True)
class TreeViolation:
    path: tuple
    kind: str  # "leaf", "node" or "root"
    message: str

    def __str__(self) -> str:
        where = "".join("LR"[i] for i in self.path) or "root"
        return f"[{where}] {self.kind}: {self.message}"


def is_instance(c: Clause, d: Clause) -> bool:
    """``d`` equals ``σ(c)`` as multisets for some σ."""
    return len(c.ante) == len(d.ante) and len(c.succ) == len(d.succ) and subsumes(c, d) is not None


def _multiset_leq(small: Sequence, big: Sequence) -> bool:
    rest = list(big)
    for x in small:
        if x in rest:
            rest.remove(x)
        else:
            return False
    return True


def verify(t: GroundTree, S: Iterable[Clause], expected_root: Optional[Clause] = EMPTY_CLAUSE) -> list:
    """Check a ground tree against clause set ``S``; an empty list means it is a refutation.

    Leaves may carry extra literals contributed by clause variables: a leaf is
    accepted when its template part is an instance of a clause in ``S`` and
    the leaf clause contains that part.
    """
    S = list(S)
    by_shape: dict = {}
    for c in S:
        by_shape.setdefault((len(c.ante), len(c.succ)), []).append(c)
    out: list = []
    cache: dict = {}
    _verify(t, (), by_shape, out, cache, set())
    if expected_root is not None and t.clause.merged() != expected_root.merged():
        out.append(TreeViolation((), "root", f"root clause is {t.clause}, expected {expected_root}"))
    return out


def _verify(t, path, by_shape, out, cache, done):
    # shared subtrees are checked once
    if id(t) in done:
        return
    done.add(id(t))
    if isinstance(t, GLeaf):
        key = t.base
        ok = cache.get(key)
        if ok is None:
            ok = any(is_instance(c, t.base) for c in by_shape.get((len(t.base.ante), len(t.base.succ)), []))
            cache[key] = ok
        if not ok:
            out.append(TreeViolation(path, "leaf", f"{t.base} is not an instance of the clause set"))
        elif not (_multiset_leq(t.base.ante, t.clause.ante) and _multiset_leq(t.base.succ, t.clause.succ)):
            out.append(TreeViolation(path, "leaf", f"{t.clause} does not contain its clause {t.base}"))
        return
    _verify(t.left, path + (0,), by_shape, out, cache, done)
    _verify(t.right, path + (1,), by_shape, out, cache, done)
    problems = []
    if t.pivot not in t.left.clause.succ:
        problems.append(f"pivot {fmt(t.pivot)} not in the succedent of {t.left.clause}")
    if t.pivot not in t.right.clause.ante:
        problems.append(f"pivot {fmt(t.pivot)} not in the antecedent of {t.right.clause}")
    if not problems:
        expected = resolve(t.left.clause, t.right.clause, t.pivot)
        if expected != t.resolvent.merged():
            problems.append(f"resolvent should be {expected}, found {t.resolvent}")
    if problems:
        out.append(TreeViolation(path, "node", "; ".join(problems)))


# --------------------------------------------------------------------------
# rendering


def render_tree(t: GroundTree) -> str:
    lines: list = []

    def walk(n, depth):
        pad = "  " * depth
        if isinstance(n, GLeaf):
            label = ""
            if n.label is not None:
                name, level, omegas = n.label
                label = f"  [{name} level={level} omega={','.join(map(str, omegas))}]"
            lines.append(f"{pad}{n.clause}{label}")
        else:
            lines.append(f"{pad}{n.resolvent}    (resolve on {fmt(n.pivot)})")
            walk(n.left, depth + 1)
            walk(n.right, depth + 1)

    walk(t, 0)
    return "\n".join(lines)
