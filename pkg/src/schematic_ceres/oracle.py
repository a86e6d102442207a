"""Ground resolution saturation used as an independent unsatisfiability check.

Clauses are grounded over a finite universe and saturated with ordered
ground resolution (inferences only on the largest atom of both parents)
plus tautology, forward and backward subsumption deletion.  Ordered ground
resolution with these deletions is refutationally complete, so saturation of
a ground input means satisfiable.  For non-ground input saturation only
shows that the chosen universe is too small, hence ``INCONCLUSIVE``.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Optional, Sequence

from .clauses import Clause
from .resolution import GLeaf, GNode, GroundTree, resolve
from .terms import App, Const, Sort, Term, Var, free_term_vars, is_ground, iter_terms, map_formula


class Verdict(str, Enum):
    UNSAT = "UNSAT"
    SAT = "SAT"
    INCONCLUSIVE = "INCONCLUSIVE"


@dataclass
class OracleResult:
    verdict: Verdict
    tree: Optional[GroundTree] = None
    ground_clauses: int = 0
    generated: int = 0
    reason: str = ""


IOTA_ZERO = Const("zero", Sort.IOTA, display="0")


def g_chain(depth: int, fn: str = "g", base: Term = IOTA_ZERO) -> list:
    out = [base]
    for _ in range(depth):
        out.append(App(fn, (out[-1],), Sort.IOTA))
    return out


def default_universe(clauses: Iterable[Clause], depth: int = 1) -> list:
    """Ground iota subterms of ``clauses`` closed under their unary iota functions to ``depth``."""
    ground: dict = {}
    unary: set = set()
    for c in clauses:
        for t in iter_terms(c.as_sequent()):
            if isinstance(t, App) and t.sort == Sort.IOTA and len(t.args) == 1 and t.args[0].sort == Sort.IOTA:
                unary.add(t.fn)
            if t.sort == Sort.IOTA and is_ground(t):
                ground[t] = None
    if not ground:
        ground[IOTA_ZERO] = None
    layer = list(ground)
    for _ in range(depth):
        new = []
        for fn in sorted(unary):
            for t in layer:
                u = App(fn, (t,), Sort.IOTA)
                if u not in ground:
                    ground[u] = None
                    new.append(u)
        layer = new
    return sorted(ground, key=lambda t: (len(t.key), t.key))


def ground_instances(clauses: Iterable[Clause], universe: Sequence[Term]) -> list:
    """Every instance of every clause with its free iota variables drawn from ``universe``."""
    out = []
    for c in clauses:
        vs = free_term_vars(c.as_sequent())
        for v in vs:
            if not isinstance(v, Var) or v.sort != Sort.IOTA:
                raise ValueError(f"cannot ground variable {v} of {c}")
        if not vs:
            out.append(c)
            continue
        for combo in itertools.product(universe, repeat=len(vs)):
            mapping = dict(zip(vs, combo))
            out.append(c.map(lambda a: map_formula(a, lambda t: mapping.get(t))))
    return out


def _atom_rank(a) -> tuple:
    return (sum(1 for _ in iter_terms(a)), a.key)


class _Saturation:
    def __init__(self, inputs: list, max_clauses: int):
        self.inputs = inputs
        self.max_clauses = max_clauses
        self.origin: dict = {}  # id -> ("input", Clause) | ("res", left_id, right_id, pivot)
        self.key_of: dict = {}  # id -> (ante frozenset, succ frozenset)
        self.counter = itertools.count()
        self.generated = 0
        self.rank_cache: dict = {}

    def rank(self, a):
        r = self.rank_cache.get(a)
        if r is None:
            r = self.rank_cache[a] = _atom_rank(a)
        return r

    def max_atom(self, key):
        ante, succ = key
        best = None
        best_pos = None
        for a in ante:
            if best is None or self.rank(a) > self.rank(best):
                best, best_pos = a, "l"
        for a in succ:
            if best is None or self.rank(a) > self.rank(best):
                best, best_pos = a, "r"
        return best, best_pos

    def run(self):
        passive: list = []
        seen: set = set()
        for c in self.inputs:
            key = (frozenset(c.ante), frozenset(c.succ))
            if key[0] & key[1] or key in seen:
                continue
            seen.add(key)
            i = next(self.counter)
            self.origin[i] = ("input", c)
            self.key_of[i] = key
            heapq.heappush(passive, (len(key[0]) + len(key[1]), i))
        active: dict = {}  # max atom -> list of ids
        active_ids: set = set()
        while passive:
            _, gid = heapq.heappop(passive)
            g = self.key_of[gid]
            if not g[0] and not g[1]:
                return gid
            if any(self._subsumed(g, self.key_of[a]) for a in active_ids):
                continue
            for a in [a for a in active_ids if self._subsumed(self.key_of[a], g)]:
                active_ids.discard(a)
                atom, _ = self.max_atom(self.key_of[a])
                active[atom].remove(a)
            atom, pos = self.max_atom(g)
            for other in list(active.get(atom, ())):
                o = self.key_of[other]
                if pos == "r" and atom in o[0]:
                    left, right = gid, other
                elif pos == "l" and atom in o[1]:
                    left, right = other, gid
                else:
                    continue
                lk, rk = self.key_of[left], self.key_of[right]
                new = (lk[0] | (rk[0] - {atom}), (lk[1] - {atom}) | rk[1])
                if new[0] & new[1] or new in seen:
                    continue
                seen.add(new)
                nid = next(self.counter)
                self.origin[nid] = ("res", left, right, atom)
                self.key_of[nid] = new
                self.generated += 1
                if not new[0] and not new[1]:
                    return nid
                if self.generated > self.max_clauses:
                    raise _Exhausted()
                heapq.heappush(passive, (len(new[0]) + len(new[1]), nid))
            active.setdefault(atom, []).append(gid)
            active_ids.add(gid)
        return None

    @staticmethod
    def _subsumed(c, d) -> bool:
        """Ground subsumption: ``d`` subsumes ``c``."""
        return d[0] <= c[0] and d[1] <= c[1]

    def tree(self, i: int, memo: Optional[dict] = None) -> GroundTree:
        memo = {} if memo is None else memo
        stack = [i]
        while stack:
            j = stack[-1]
            if j in memo:
                stack.pop()
                continue
            o = self.origin[j]
            if o[0] == "input":
                memo[j] = GLeaf(o[1], o[1])
                stack.pop()
                continue
            _, l, r, atom = o
            missing = [x for x in (l, r) if x not in memo]
            if missing:
                stack.extend(missing)
                continue
            lt, rt = memo[l], memo[r]
            memo[j] = GNode(lt, rt, atom, resolve(lt.clause, rt.clause, atom))
            stack.pop()
        return memo[i]


class _Exhausted(Exception):
    pass


def _is_ground_set(clauses: Sequence[Clause]) -> bool:
    return all(not free_term_vars(c.as_sequent()) for c in clauses)


def _eliminate_pure(clauses: list) -> list:
    current = list(clauses)
    while True:
        pos: set = set()
        neg: set = set()
        for c in current:
            pos.update(c.succ)
            neg.update(c.ante)
        pure = (pos - neg) | (neg - pos)
        kept = [c for c in current if not (set(c.atoms()) & pure)]
        if len(kept) == len(current):
            return kept
        current = kept


def ground_refute_oracle(S: Iterable[Clause], universe: Optional[Sequence[Term]] = None, depth: int = 1,
                         max_clauses: int = 200_000) -> OracleResult:
    """Decide ground unsatisfiability of ``S`` instantiated over ``universe``.

    Returns ``UNSAT`` with a refutation tree, ``SAT`` when a ground input
    saturates, and ``INCONCLUSIVE`` when a non-ground input saturates or the
    clause budget runs out.
    """
    S = list(S)
    ground_input = _is_ground_set(S)
    if universe is None:
        universe = default_universe(S, depth)
    instances = ground_instances(S, universe)
    candidates = [c for c in instances if not c.is_tautology()]
    candidates = _eliminate_pure(candidates)
    sat = _Saturation(candidates, max_clauses)
    try:
        found = sat.run()
    except _Exhausted:
        return OracleResult(Verdict.INCONCLUSIVE, None, len(instances), sat.generated, "clause budget exhausted")
    if found is None:
        if ground_input:
            return OracleResult(Verdict.SAT, None, len(instances), sat.generated, "saturated")
        return OracleResult(Verdict.INCONCLUSIVE, None, len(instances), sat.generated, "saturated over a finite universe")
    return OracleResult(Verdict.UNSAT, sat.tree(found), len(instances), sat.generated, "empty clause derived")
