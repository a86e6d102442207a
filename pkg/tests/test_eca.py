from __future__ import annotations

from collections import Counter

import pytest

from schematic_ceres.clauses import Clause, canonical_set, reduce_clause_set, sorted_clauses
from schematic_ceres.eca import (
    eca_clause_set,
    eca_refute,
    eca_report,
    extracted_clause_set,
    template_clause,
    variant_diff,
)
from schematic_ceres.terms import App, Atom, Sort, Var, numeral

from .strategies import ZERO_I

a = Var("alpha", Sort.IOTA)


def f(t):
    return App("f", (t,), Sort.OMEGA)


def g(t):
    return App("g", (t,), Sort.IOTA)


# Reference leaves of the refutation at n=2, k=0, grouped by block; each leaf
# is written (template, first omega, second omega).
APPENDIX_LEAVES = [
    # blocks (6), (5), (4) and (D), (C), (E)
    *[(name, 0, k) for k in (2, 1, 0) for name in ("C6", "C2", "C4'", "C3", "C1", "C4", "C5")],
    # blocks (3), (2) and (B), (A)
    *[(name, 1, k) for k in (1, 0) for name in ("C2", "C4'", "C3", "C1", "C4")],
    # block (1) and the root
    ("C2", 2, 0), ("C7", 2, 1), ("C3", 2, 0), ("C1", 2, 0), ("C7", 2, 0),
]


def appendix_view(label):
    """Single-omega templates are drawn with the ρ level in front of k."""
    name, level, omegas = label
    return (name, level, omegas[0]) if len(omegas) == 1 else (name, *omegas)


def lt0(t):
    return Atom("lt", (f(t), numeral(0)))


def eq0(t):
    return Atom("eq", (numeral(0), f(t)))


def test_unreduced_clause_set_at_zero(bundle):
    phi_part = {
        Clause([lt0(a)], []),
        Clause([lt0(g(a))], []),
        Clause([], [Atom("leq", (a, a))]),
        Clause([], [Atom("leq", (a, g(a)))]),
        Clause([eq0(a), eq0(g(a))], []),
    }
    # the ψ product, with the ≤ literal on the same variable as the other two
    psi_part = {Clause([Atom("leq", (ZERO_I, a))], [lt0(a), eq0(a)])}
    assert canonical_set(extracted_clause_set(bundle, 0)) == canonical_set(phi_part | psi_part)


@pytest.mark.parametrize("gamma", range(5))
def test_reduction_drops_exactly_the_subsumed_template(bundle, gamma):
    cmp = eca_clause_set(gamma, bundle)
    assert cmp.extra == frozenset()
    assert cmp.missing == canonical_set([Clause([Atom("lt", (f(g(a)), numeral(0)))], [])])
    assert eca_clause_set(gamma, bundle, reduce_templates=True).match


def test_reduced_sizes(bundle):
    assert [len(eca_clause_set(n, bundle).reduced) for n in range(4)] == [5, 7, 9, 11]


def test_template_rendering(bundle):
    assert str(template_clause(bundle, "C7", 0)) == "0 ≤ x(k) ⊢ 0 = f(x(k)), f(x(k)) < 0"
    assert str(template_clause(bundle, "C4'", 0)) == "f(y(k)) < 1, y(k) ≤ x(k+1) ⊢ 0 = f(x(k+1)), f(x(k+1)) < 0"
    assert str(template_clause(bundle, "C1")) == "⊢ x(k) ≤ x(k)"


def test_appendix_leaf_multiset(bundle):
    res = eca_refute(2, 0, bundle)
    assert res.verified
    got = [appendix_view(lb) for lb in res.labels()]
    assert Counter(got) == Counter(APPENDIX_LEAVES)
    assert len(got) == 36


def test_leaf_counts_per_template(bundle):
    names = Counter(lb[0] for lb in eca_refute(2, 0, bundle).labels())
    assert names == {"C1": 6, "C2": 6, "C3": 6, "C4": 5, "C4'": 5, "C5": 3, "C6": 3, "C7": 2}


def test_unshared_tree_is_larger(bundle):
    res = eca_refute(2, 0, bundle)
    assert len(res.labels(share=False)) > len(res.labels())


@pytest.mark.parametrize("k", [1, 2])
def test_refutation_is_sound_only_at_k_zero(bundle, k):
    # C7's 0 ≤ x(k) meets the pivot x(k) ≤ x(k) only when h(k) = 0
    res = eca_refute(2, k, bundle)
    assert not res.verified
    assert {v.kind for v in res.violations} == {"node", "root"}
    assert all(a.pred == "leq" and a.args[0] == ZERO_I for a in res.tree.clause.ante)
    assert res.tree.clause.succ == ()


def test_refutation_uses_only_reduced_clauses(bundle):
    res = eca_refute(1, 0, bundle)
    S = reduce_clause_set(extracted_clause_set(bundle, 1))
    assert res.verified
    for c in sorted_clauses(S):
        assert eca_refute(1, 0, bundle, clause_set=S - {c}).violations


def test_tampered_refutation_is_rejected(bundle):
    assert not eca_refute(1, 0, bundle, tampered=True).verified


def test_negative_parameters(bundle):
    with pytest.raises(ValueError):
        eca_refute(-1, 0, bundle)
    with pytest.raises(ValueError):
        eca_clause_set(-1, bundle)


def test_report(bundle):
    r = eca_report(1, 0, bundle)
    assert r.ok and r.clause_set_match and r.refutation_verified
    assert r.oracle_verdict == "UNSAT" and r.herbrand_provable
    assert set(r.timings) >= {"clause_set", "refutation"}


def test_variant_diff(eca_doc):
    text = variant_diff(eca_doc)
    assert text.startswith("--- corrected")
    for ident in ("rho2-base-pivot", "rho4-step-shape", "rho8-params", "rho9-clause-var", "rho10-index"):
        assert ident in text
