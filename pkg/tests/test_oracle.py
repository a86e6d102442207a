from __future__ import annotations

import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from schematic_ceres.clauses import Clause
from schematic_ceres.eca import eca_oracle
from schematic_ceres.oracle import Verdict, g_chain, ground_refute_oracle
from schematic_ceres.resolution import verify
from schematic_ceres.terms import App, Atom, Sort, Var, numeral

from .strategies import ZERO_I

G0 = App("g", (ZERO_I,), Sort.IOTA)
GROUND_ATOMS = [Atom("leq", (s, t)) for s in (ZERO_I, G0) for t in (ZERO_I, G0)] + [
    Atom("eq", (numeral(i), App("f", (t,), Sort.OMEGA))) for i in range(3) for t in (ZERO_I, G0)
]


def brute_force_sat(clauses) -> bool:
    atoms = sorted({a for c in clauses for a in c.atoms()}, key=lambda a: a.key)
    for bits in itertools.product((False, True), repeat=len(atoms)):
        val = dict(zip(atoms, bits))
        if all(any(not val[a] for a in c.ante) or any(val[a] for a in c.succ) for c in clauses):
            return True
    return False


ground_clauses = st.builds(
    Clause,
    st.lists(st.sampled_from(GROUND_ATOMS), max_size=2),
    st.lists(st.sampled_from(GROUND_ATOMS), max_size=2),
)


@given(st.lists(ground_clauses, min_size=1, max_size=8))
def test_oracle_agrees_with_truth_tables(cs):
    res = ground_refute_oracle(cs)
    expected = Verdict.SAT if brute_force_sat(cs) else Verdict.UNSAT
    assert res.verdict == expected
    if res.verdict == Verdict.UNSAT:
        assert verify(res.tree, cs) == []


def test_non_ground_saturation_is_inconclusive():
    x = Var("alpha", Sort.IOTA)
    res = ground_refute_oracle([Clause([Atom("leq", (x, G0))], [])], g_chain(2))
    assert res.verdict == Verdict.INCONCLUSIVE


def test_non_ground_refutation_found():
    x = Var("alpha", Sort.IOTA)
    cs = [Clause([], [Atom("leq", (x, x))]), Clause([Atom("leq", (G0, G0))], [])]
    res = ground_refute_oracle(cs, g_chain(2))
    assert res.verdict == Verdict.UNSAT
    assert verify(res.tree, cs) == []


def test_budget_exhaustion_is_inconclusive():
    cs = [Clause([], [a, b]) for a, b in itertools.combinations(GROUND_ATOMS, 2)]
    cs += [Clause([a, b], []) for a, b in itertools.combinations(GROUND_ATOMS, 2)]
    res = ground_refute_oracle(cs, max_clauses=10)
    assert res.verdict == Verdict.INCONCLUSIVE


@pytest.mark.parametrize("gamma", range(5))
def test_eca_clause_set_is_unsatisfiable(bundle, gamma):
    res, report = eca_oracle(gamma, bundle)
    assert res.verdict == Verdict.UNSAT
    assert report == []
