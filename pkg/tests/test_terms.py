from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from schematic_ceres.terms import (
    App,
    Atom,
    BigOr,
    BoundVar,
    DefApp,
    Lambda,
    Normalizer,
    OmegaVar,
    Or,
    RewriteRule,
    RewriteSystem,
    RuleShapeError,
    SchemApp,
    Sort,
    SortError,
    Substitution,
    Succ,
    Var,
    ZERO,
    apply_substitution,
    fmt,
    is_ground,
    iter_terms,
    normalize,
    numeral,
    numeral_value,
)

from .strategies import ZERO_I, atoms, iota_terms, omega_terms


def g_power(n: int):
    t = ZERO_I
    for _ in range(n):
        t = App("g", (t,), Sort.IOTA)
    return t


def h(t):
    return DefApp("h", (t,), Sort.IOTA)


def p(t):
    return DefApp("p", (t,), Sort.OMEGA)


def test_numerals_round_trip():
    for n in range(6):
        assert numeral_value(numeral(n)) == n
    assert numeral_value(OmegaVar("n")) is None
    assert numeral(0) == ZERO


def test_h_unfolds_to_g_chain(eca_doc):
    for n in range(5):
        assert normalize(h(numeral(n)), eca_doc.rewrite) == g_power(n)


def test_predecessor(eca_doc):
    assert normalize(p(numeral(0)), eca_doc.rewrite) == ZERO
    assert normalize(p(numeral(4)), eca_doc.rewrite) == numeral(3)


def test_symbolic_argument_is_left_alone(eca_doc):
    t = h(OmegaVar("n"))
    assert normalize(t, eca_doc.rewrite) == t
    assert normalize(h(Succ(OmegaVar("n"))), eca_doc.rewrite) == App("g", (h(OmegaVar("n")),), Sort.IOTA)


def test_bigor_unrolls_on_constructor_bounds():
    i = BoundVar("i", Sort.OMEGA)
    body = Atom("eq", (i, App("f", (ZERO_I,), Sort.OMEGA)))
    f = normalize(BigOr(i, numeral(2), body))
    assert fmt(f) == "(0 = f(0) ∨ 1 = f(0)) ∨ 2 = f(0)"
    assert isinstance(f, Or)
    stuck = BigOr(i, OmegaVar("n"), body)
    assert normalize(stuck) == stuck
    # one step exposes the last disjunct
    assert fmt(normalize(BigOr(i, Succ(OmegaVar("n")), body))).endswith("n+1 = f(0)")


def test_sort_errors(eca_doc):
    with pytest.raises(SortError):
        normalize(App("g", (OmegaVar("n"),), Sort.IOTA), eca_doc.rewrite)
    with pytest.raises(SortError):
        apply_substitution(OmegaVar("n"), Substitution(omega={"n": ZERO_I}))
    with pytest.raises(SortError):
        apply_substitution(SchemApp("x", ZERO), Substitution(schem={"x": Lambda("k", OmegaVar("k"))}))


def test_rule_shapes_are_checked():
    k = OmegaVar("k")
    base = RewriteRule(DefApp("q", (ZERO,), Sort.OMEGA), ZERO)
    with pytest.raises(RuleShapeError):
        RewriteSystem([base])
    with pytest.raises(RuleShapeError):
        RewriteSystem([base, RewriteRule(DefApp("q", (Succ(Succ(k)),), Sort.OMEGA), k)])
    with pytest.raises(RuleShapeError):
        RewriteSystem([base, RewriteRule(DefApp("q", (Succ(k),), Sort.OMEGA), OmegaVar("m"))])
    ok = RewriteSystem([base, RewriteRule(DefApp("q", (Succ(k),), Sort.OMEGA), Succ(DefApp("q", (k,), Sort.OMEGA)))])
    assert normalize(DefApp("q", (numeral(3),), Sort.OMEGA), ok) == numeral(3)


def test_schematic_substitution_applies_lambda(eca_doc):
    theta = Substitution(schem={"x": Lambda("k", h(OmegaVar("k")))}, omega={"k": numeral(2)})
    t = apply_substitution(App("g", (SchemApp("x", OmegaVar("k")),), Sort.IOTA), theta)
    assert normalize(t, eca_doc.rewrite) == g_power(3)


# --------------------------------------------------------------------------
# properties


def _defined_nodes(e) -> int:
    return sum(1 for t in iter_terms(e) if isinstance(t, DefApp))


@given(st.one_of(omega_terms(8), iota_terms(8)))
def test_normalization_is_idempotent(eca_doc, t):
    rs = eca_doc.rewrite
    once = normalize(t, rs)
    assert normalize(once, rs) == once


@given(st.one_of(omega_terms(8, ground=True), iota_terms(8, ground=True)))
def test_ground_terms_normalize_away_defined_symbols(eca_doc, t):
    out = normalize(t, eca_doc.rewrite)
    assert is_ground(out)
    assert _defined_nodes(out) == 0


@given(st.one_of(omega_terms(8), iota_terms(8)))
def test_termination_bound(eca_doc, t):
    # each defined-symbol occurrence costs at most (largest numeral + 1) steps
    norm = Normalizer(eca_doc.rewrite)
    norm(t)
    largest = max([numeral_value(u) or 0 for u in iter_terms(t)] + [0])
    depth = sum(1 for u in iter_terms(t) if isinstance(u, Succ))
    assert norm.steps <= _defined_nodes(t) * (largest + depth + 1)


@given(atoms(), st.integers(0, 4), st.integers(0, 4), iota_terms(3, ground=True))
def test_substitution_distributes_over_normalization(eca_doc, a, n, k, alpha):
    rs = eca_doc.rewrite
    sigma = Substitution(
        omega={"n": numeral(n), "k": numeral(k), "m": numeral(n + k)},
        iota={"alpha": alpha, "beta": alpha, "gamma": alpha},
        schem={"x": Lambda("k", h(OmegaVar("k"))), "y": Lambda("k", g_power(1))},
    )
    direct = normalize(apply_substitution(a, sigma), rs)
    staged = normalize(apply_substitution(normalize(a, rs), sigma), rs)
    assert direct == staged


@given(atoms(), st.integers(0, 4), st.integers(0, 4))
def test_disjoint_substitutions_commute(eca_doc, a, n, k):
    rs = eca_doc.rewrite
    nu = Substitution(omega={"k": numeral(k)})
    gamma = Substitution(omega={"n": numeral(n)})
    vartheta = Substitution(schem={"x": Lambda("k", h(OmegaVar("k"))), "y": Lambda("k", h(OmegaVar("k")))})
    joint = Substitution(omega={"k": numeral(k), "n": numeral(n)}, schem=dict(vartheta.schem))
    in_order = a
    for s in (nu, vartheta, gamma):
        in_order = apply_substitution(in_order, s)
    assert normalize(in_order, rs) == normalize(apply_substitution(a, joint), rs)


@given(iota_terms(6))
def test_fmt_is_total(t):
    assert isinstance(fmt(t), str) and fmt(t)


def test_var_sorts_are_part_of_identity():
    assert Var("a", Sort.IOTA) != Var("a", Sort.OMEGA)
