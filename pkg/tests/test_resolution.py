from __future__ import annotations

import random
from dataclasses import replace

import pytest

from schematic_ceres.clauses import Clause, reduce_clause_set
from schematic_ceres.eca import eca_refute, extracted_clause_set, tamper
from schematic_ceres.resolution import (
    GLeaf,
    GNode,
    RCall,
    make_node,
    resolve,
    tree_nodes,
    verify,
)
from schematic_ceres.terms import Atom, numeral

P = Atom("eq", (numeral(0), numeral(1)))
Q = Atom("eq", (numeral(1), numeral(1)))


def test_resolve_removes_all_pivot_copies_and_factors():
    left = Clause([Q], [P, P, Q])
    right = Clause([P, Q], [])
    assert resolve(left, right, P) == Clause([Q], [Q])


def test_make_node_orients_pivot():
    pos = GLeaf(Clause([], [P]), Clause([], [P]))
    neg = GLeaf(Clause([P], []), Clause([P], []))
    n = make_node(neg, pos, P)
    assert n.left is pos and n.resolvent == Clause()
    assert verify(n, [Clause([], [P]), Clause([P], [])]) == []


def test_verify_flags_foreign_leaves():
    pos = GLeaf(Clause([], [P]), Clause([], [P]))
    neg = GLeaf(Clause([P], []), Clause([P], []))
    out = verify(make_node(pos, neg, P), [Clause([], [P])])
    assert [v.kind for v in out] == ["leaf"]


def test_corpus_schema_obeys_ordering(bundle):
    assert bundle.rho.check() == []


def test_dependency_edges(bundle):
    edges = {(a, b) for a, b, _ in bundle.rho.dependency_edges()}
    assert edges == {(1, 2), (1, 5), (2, 3), (3, 4), (4, 5), (5, 6), (5, 5), (6, 7), (6, 8), (7, 9), (9, 5), (9, 10)}


def test_backward_call_from_base_rejected(bundle):
    R = bundle.rho
    rule = R.rules[5]
    bad = replace(rule, base=RCall(1, numeral(0), ()))
    problems = replace(R, rules={**R.rules, 5: bad}).check()
    assert any("ordering" in p for p in problems)


@pytest.mark.parametrize("gamma", range(5))
def test_unfolded_refutation_verifies(bundle, gamma):
    res = eca_refute(gamma, bundle=bundle)
    assert res.error is None
    assert res.violations == []
    assert res.tree.clause == Clause()


def test_tampered_tree_rejected(bundle):
    res = eca_refute(2, bundle=bundle)
    assert res.tree.clause == Clause()
    S = reduce_clause_set(extracted_clause_set(bundle, 2))
    assert verify(tamper(res.tree), S)


# --------------------------------------------------------------------------
# mutation testing: every mutant of a verified tree must be rejected


def _random_path(t, rng):
    path = []
    while isinstance(t, GNode) and rng.random() < 0.8:
        step = rng.randrange(2)
        path.append(step)
        t = t.right if step else t.left
    return path


def _at(t, path):
    for step in path:
        t = t.right if step else t.left
    return t


def _rebuild(t, path, new):
    """Copy ``t`` with the subtree at ``path`` replaced, keeping every stored resolvent."""
    if not path:
        return new
    child = _rebuild(t.right if path[0] else t.left, path[1:], new)
    return replace(t, right=child) if path[0] else replace(t, left=child)


def _atoms_of(t):
    return sorted({a for n in tree_nodes(t) for a in n.clause.atoms()}, key=lambda a: a.key)


def _mutate(t, rng, atoms):
    kind = rng.choice(["pivot", "swap", "resolvent", "leaf"])
    if kind == "leaf":
        path = []
        n = t
        while isinstance(n, GNode):
            step = rng.randrange(2)
            path.append(step)
            n = n.right if step else n.left
        lits = [("l", a) for a in n.clause.ante] + [("r", a) for a in n.clause.succ]
        side, a = rng.choice(lits)
        # every copy goes: dropping one of two copies is only factoring
        drop = [x for x in (n.clause.ante if side == "l" else n.clause.succ) if x != a]
        c = Clause(drop, n.clause.succ) if side == "l" else Clause(n.clause.ante, drop)
        return kind, _rebuild(t, path, replace(n, clause=c))
    path = _random_path(t, rng)
    n = _at(t, path)
    while not isinstance(n, GNode):
        path = path[:-1]
        n = _at(t, path)
    if kind == "pivot":
        others = [a for a in atoms if a not in n.left.clause.succ]
        return kind, _rebuild(t, path, replace(n, pivot=rng.choice(others)))
    if kind == "swap":
        return kind, _rebuild(t, path, replace(n, left=n.right, right=n.left))
    extra = rng.choice(atoms)
    r = n.resolvent
    c = Clause(r.ante + (extra,), r.succ) if rng.randrange(2) else Clause(r.ante, r.succ + (extra,))
    if c.merged() == r.merged():
        c = Clause(r.ante + (extra,), r.succ + (extra,))
    return kind, _rebuild(t, path, replace(n, resolvent=c))


def test_one_thousand_mutants_rejected(bundle):
    res = eca_refute(2, bundle=bundle)
    S = reduce_clause_set(extracted_clause_set(bundle, 2))
    assert verify(res.tree, S) == []
    rng = random.Random(20240611)
    atoms = _atoms_of(res.tree)
    survivors = []
    kinds = set()
    for _ in range(1000):
        kind, mutant = _mutate(res.tree, rng, atoms)
        kinds.add(kind)
        if not verify(mutant, S):
            survivors.append(kind)
    assert kinds == {"pivot", "swap", "resolvent", "leaf"}
    assert survivors == []
