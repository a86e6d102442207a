from __future__ import annotations

from collections import Counter

import pytest
from hypothesis import given
from hypothesis import strategies as st

from schematic_ceres.clauses import (
    Clause,
    Leaf,
    Oplus,
    Otimes,
    canonical,
    canonical_set,
    check_subsumption_soundness,
    check_wellfounded,
    eliminate_tautologies,
    evaluate,
    reduce_clause_set,
    rename,
    substitute_clause,
    subsumes,
)
from schematic_ceres.eca import extracted_clause_set
from schematic_ceres.terms import Atom, Sort, Var

from .strategies import ZERO_I, clauses

a, b = Var("alpha", Sort.IOTA), Var("beta", Sort.IOTA)


def leq(x, y):
    return Atom("leq", (x, y))


def test_subsumption_by_instance():
    general = Clause([leq(a, b)], [])
    special = Clause([leq(ZERO_I, ZERO_I), leq(a, a)], [leq(a, ZERO_I)])
    assert subsumes(general, special) is not None
    assert subsumes(special, general) is None
    # sides do not mix
    assert subsumes(Clause([], [leq(a, b)]), Clause([leq(ZERO_I, ZERO_I)], [])) is None


def test_multiset_subsumption_needs_distinct_targets():
    c = Clause([leq(a, ZERO_I), leq(b, ZERO_I)], [])
    assert subsumes(c, Clause([leq(ZERO_I, ZERO_I)], [])) is None


def test_tautologies_dropped():
    taut = Clause([leq(a, a)], [leq(a, a)])
    assert taut.is_tautology()
    assert eliminate_tautologies([taut, Clause([leq(a, a)], [])]) == {Clause([leq(a, a)], [])}


def test_reduction_keeps_one_variant():
    c1 = Clause([leq(a, b)], [])
    c2 = Clause([leq(b, a)], [])
    assert len(reduce_clause_set([c1, c2])) == 1


def test_clause_term_evaluation():
    c = Clause([leq(a, a)], [])
    d = Clause([], [leq(a, ZERO_I)])
    t = Otimes(Leaf(frozenset({c})), Oplus(Leaf(frozenset({d})), Leaf(frozenset({c}))))
    assert evaluate(t) == {c.compose(d), c.compose(c)}


def test_schema_rewrites_are_wellfounded(bundle):
    assert check_wellfounded(bundle.crs) == []


@pytest.mark.parametrize("gamma", range(5))
def test_schema_extraction_matches_ground_extraction(bundle, gamma):
    via_schema = extracted_clause_set(bundle, gamma, via="schema")
    via_ground = extracted_clause_set(bundle, gamma, via="ground")
    assert canonical_set(via_schema) == canonical_set(via_ground)


def test_reduced_sizes_grow_by_two(bundle):
    sizes = [len(reduce_clause_set(extracted_clause_set(bundle, n))) for n in range(5)]
    assert sizes == [5, 7, 9, 11, 13]


# --------------------------------------------------------------------------
# properties

clause_sets = st.frozensets(clauses(), max_size=6)


@given(clause_sets, clause_sets)
def test_product_and_union_cardinality(xs, ys):
    assert len(evaluate(Otimes(Leaf(xs), Leaf(ys)))) <= len(xs) * len(ys)
    assert len(evaluate(Oplus(Leaf(xs), Leaf(ys)))) <= len(xs) + len(ys)


@given(clauses(), clauses())
def test_subsumption_witness_is_sound(c, d):
    sigma = subsumes(c, d)
    if sigma is None:
        return
    image = substitute_clause(c, sigma)
    assert not Counter(image.ante) - Counter(d.ante)
    assert not Counter(image.succ) - Counter(d.succ)


@given(clause_sets)
def test_reduction_is_sound_and_idempotent(xs):
    reduced = reduce_clause_set(xs)
    assert reduced <= xs
    assert check_subsumption_soundness(eliminate_tautologies(xs), reduced) == []
    assert reduce_clause_set(reduced) == reduced


@given(clauses(), st.permutations(["alpha", "beta", "gamma"]))
def test_canonical_form_ignores_variable_names(c, names):
    mapping = {Var(old, Sort.IOTA): Var(new, Sort.IOTA) for old, new in zip(["alpha", "beta", "gamma"], names)}
    assert canonical(rename(c, mapping)) == canonical(c)
