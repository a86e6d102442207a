"""Acceptance gate.

Each test records one line in the ``acceptance criteria`` section of the
terminal summary.  Criteria 1, 2 and 5 cannot hold when read literally;
those run as strict xfails and print FAIL, and a reconciled reading of
each runs alongside as ``1r``, ``2r`` and ``5r``.
"""

from __future__ import annotations

import time
from collections import Counter

import pytest

from schematic_ceres.cli import FAILED, main
from schematic_ceres.clauses import Clause, canonical_set
from schematic_ceres.eca import (
    eca_clause_set,
    eca_herbrand,
    eca_oracle,
    eca_refute,
    extracted_clause_set,
    load_variant,
)
from schematic_ceres.herbrand import EMPTY_AXIOMS, Provability, flatten, normalize_w
from schematic_ceres.oracle import Verdict
from schematic_ceres.terms import App, Atom, Imp, Or, Sort, Var, numeral

from . import test_clauses, test_resolution, test_terms
from .strategies import ZERO_I
from .test_eca import APPENDIX_LEAVES, appendix_view

GAMMAS = range(9)
a = Var("alpha", Sort.IOTA)
b = Var("beta", Sort.IOTA)


def f(t):
    return App("f", (t,), Sort.OMEGA)


def g_power(n):
    t = ZERO_I
    for _ in range(n):
        t = App("g", (t,), Sort.IOTA)
    return t


def g(t):
    return App("g", (t,), Sort.IOTA)


# --------------------------------------------------------------------------
# 1. clause-set reproduction


@pytest.mark.xfail(strict=True, reason="C6 is subsumed by C5, so no reduced set can contain both")
def test_c1_clause_set_literal(bundle, criterion):
    with criterion("1", "reduced clause set equals C1..C7, C4' for n=0..8"):
        diffs = {}
        for gamma in GAMMAS:
            cmp = eca_clause_set(gamma, bundle)
            if not cmp.match:
                diffs[gamma] = (sorted(map(str, cmp.missing)), sorted(map(str, cmp.extra)))
        shown = sorted({(tuple(m), tuple(e)) for m, e in diffs.values()})
        assert not diffs, f"differs at n={sorted(diffs)}: (missing, extra) = {shown}"


def test_c1_clause_set_reconciled(bundle, criterion):
    with criterion("1r", "reduced clause set equals the reduced template set for n=0..8") as c:
        worst = 0.0
        for gamma in GAMMAS:
            t0 = time.perf_counter()
            cmp = eca_clause_set(gamma, bundle, reduce_templates=True)
            worst = max(worst, time.perf_counter() - t0)
            assert cmp.match, f"n={gamma}"
        c.note(f"slowest instance {worst:.2f}s")
        assert worst < 1.0


# --------------------------------------------------------------------------
# 2. pre-reduction reproduction


def lt0(t):
    return Atom("lt", (f(t), numeral(0)))


def eq0(t):
    return Atom("eq", (numeral(0), f(t)))


def _reference_at_zero(product_var):
    phi = {
        Clause([lt0(a)], []),
        Clause([lt0(g(a))], []),
        Clause([], [Atom("leq", (a, a))]),
        Clause([], [Atom("leq", (a, g(a)))]),
        Clause([eq0(a), eq0(g(a))], []),
    }
    # {⊢ f(α)<0} ⊗ {⊢ 0=f(α)} ⊗ {0≤β ⊢}
    product = Clause([], [lt0(a)]).compose(Clause([], [eq0(a)])).compose(Clause([Atom("leq", (ZERO_I, product_var))], []))
    return canonical_set(phi | {product})


@pytest.mark.xfail(strict=True, reason="the reference product uses an independent β where extraction shares α")
def test_c2_unreduced_literal(bundle, criterion):
    with criterion("2", "unreduced clause set at n=0 equals the reference term"):
        got = canonical_set(extracted_clause_set(bundle, 0))
        expected = _reference_at_zero(b)
        assert got == expected, f"extra {sorted(map(str, got - expected))}, missing {sorted(map(str, expected - got))}"


def test_c2_unreduced_reconciled(bundle, criterion):
    with criterion("2r", "unreduced clause set at n=0 equals the reference term with β read as α"):
        assert canonical_set(extracted_clause_set(bundle, 0)) == _reference_at_zero(a)


# --------------------------------------------------------------------------
# 3. refutation verification


def test_c3_refutation(bundle, criterion):
    with criterion("3", "corrected refutation verifies for n=0..8, k=0; leaf multiset at n=2") as c:
        worst = 0.0
        for gamma in GAMMAS:
            t0 = time.perf_counter()
            res = eca_refute(gamma, 0, bundle)
            worst = max(worst, time.perf_counter() - t0)
            assert res.verified, f"n={gamma}: {res.error or res.violations[:2]}"
            assert res.tree.clause == Clause()
        labels = [appendix_view(lb) for lb in eca_refute(2, 0, bundle).labels()]
        assert Counter(labels) == Counter(APPENDIX_LEAVES)
        c.note(f"36 leaves match; slowest instance {worst:.2f}s")
        assert worst < 5.0


# --------------------------------------------------------------------------
# 4. independent unsatisfiability


def test_c4_oracle(bundle, criterion):
    with criterion("4", "ground oracle UNSAT for n=0..4 and its tree verifies") as c:
        sizes = []
        for gamma in range(5):
            res, report = eca_oracle(gamma, bundle)
            assert res.verdict == Verdict.UNSAT, f"n={gamma}: {res.verdict} ({res.reason})"
            assert report == [], f"n={gamma}: {report[:2]}"
            sizes.append(res.ground_clauses)
        c.note(f"ground instances {sizes}")


# --------------------------------------------------------------------------
# 5. Herbrand reproduction


def _disjunction(fs):
    out = fs[0]
    for x in fs[1:]:
        out = Or(out, x)
    return out


def _reference_sequent(gamma):
    """The four antecedent formulas and the consequent disjuncts, built by hand."""
    def fd(t):
        return _disjunction([Atom("eq", (numeral(i), f(t))) for i in range(gamma + 1)])

    def md(t):
        return Imp(Atom("leq", (ZERO_I, t)), Atom("leq", (f(t), f(ZERO_I))))

    ante = [fd(ZERO_I), fd(g_power(1)), md(ZERO_I), md(g_power(1))]
    succ = [Imp(Atom("leq", (g_power(i), g_power(i + 1))), Atom("eq", (f(g_power(i)), f(g_power(i + 1)))))
            for i in range(gamma + 1)]
    return ante, succ


def _herbrand_shape(bundle, gamma):
    hs, rs = bundle.herbrand, bundle.rs
    zero_g = [(ZERO_I,), (g_power(1),)]
    assert normalize_w(hs, "phi.1", gamma, rs=rs) == zero_g
    assert normalize_w(hs, "phi.2", gamma, rs=rs) == zero_g
    assert normalize_w(hs, "psi.1", gamma, rs=rs) == [(g_power(i),) for i in range(gamma, -1, -1)]
    res = eca_herbrand(gamma, bundle)
    ante, succ = _reference_sequent(gamma)
    flat = flatten(res.full)
    assert Counter(flat.ante) == Counter(ante), f"n={gamma}: antecedent differs"
    assert Counter(flat.succ) == Counter(succ), f"n={gamma}: succedent differs"
    assert Counter(flatten(res.minimal).ante) == Counter(ante)
    assert flatten(res.minimal).succ == (succ[0],)


@pytest.mark.xfail(strict=True, reason="with < in A1 the minimal sequent has a countermodel for n>=1")
def test_c5_herbrand_literal(bundle, criterion):
    with criterion("5", "normal forms, display and PROVABLE from A1..A6 as listed, n=0..5"):
        printed = bundle.doc.axiom_sets["printed"]
        for gamma in range(6):
            _herbrand_shape(bundle, gamma)
            res = eca_herbrand(gamma, bundle, printed)
            assert res.provable, (f"n={gamma}: full {res.full_check.verdict.value}, "
                                  f"minimal {res.minimal_check.verdict.value}")


def test_c5_herbrand_reconciled(bundle, criterion):
    with criterion("5r", "normal forms, display and PROVABLE from A1 with ≤, n=0..5") as c:
        worst = 0.0
        for gamma in range(6):
            t0 = time.perf_counter()
            _herbrand_shape(bundle, gamma)
            res = eca_herbrand(gamma, bundle)
            worst = max(worst, time.perf_counter() - t0)
            assert res.provable, f"n={gamma}"
        c.note(f"slowest instance {worst:.2f}s")
        assert worst < 5.0


# --------------------------------------------------------------------------
# 6. schema-vs-ground commutation


def test_c6_schema_vs_ground(bundle, criterion):
    with criterion("6", "schema extraction equals ground extraction for n=0..4"):
        for gamma in range(5):
            assert canonical_set(extracted_clause_set(bundle, gamma, via="schema")) == \
                canonical_set(extracted_clause_set(bundle, gamma, via="ground")), f"n={gamma}"


# --------------------------------------------------------------------------
# 7. property suites (fixed seeds via the hypothesis profile in conftest)


def test_c7_properties(eca_doc, bundle, criterion):
    with criterion("7", "property suites with fixed seeds") as c:
        test_terms.test_normalization_is_idempotent(eca_doc)
        test_terms.test_termination_bound(eca_doc)
        test_terms.test_substitution_distributes_over_normalization(eca_doc)
        test_clauses.test_subsumption_witness_is_sound()
        test_clauses.test_reduction_is_sound_and_idempotent()
        test_clauses.test_product_and_union_cardinality()
        test_resolution.test_one_thousand_mutants_rejected(bundle)
        c.note("1000 mutants rejected")


# --------------------------------------------------------------------------
# 8. negative controls


def test_c8_negative_controls(eca_doc, bundle, criterion, capsys):
    with criterion("8", "printed rho 4 rejected with ledger hints; empty axiom set rejects"):
        variant = load_variant(eca_doc, "printed")
        rho4 = [d for d in variant.errors if "rho 4" in d.message]
        assert rho4, "printed rho 4 parsed"
        for d in rho4:
            assert d.span is not None
            assert "rho4-base-shape" in d.hint and "rho4-step-shape" in d.hint
        assert {"rho4-base-shape", "rho4-step-shape"} <= set(eca_doc.discrepancies)
        assert main(["refute", str(eca_doc.source), "--n", "2", "--variant", "printed"]) == FAILED
        assert "rho4-step-shape" in capsys.readouterr().err
        for gamma in range(4):
            assert eca_herbrand(gamma, bundle, EMPTY_AXIOMS).full_check.verdict == Provability.NOT_PROVABLE
