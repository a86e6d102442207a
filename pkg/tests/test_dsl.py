from __future__ import annotations

from hypothesis import given
from hypothesis import strategies as st

from schematic_ceres.dsl import Document, parse, print_document, read, write
from schematic_ceres.dsl.sexpr import SList, Str, Sym, lst, string, sym
from schematic_ceres.eca import corpus_path, load_variant


def _corpus_text() -> str:
    return corpus_path().read_text(encoding="utf-8")


def test_empty_input():
    doc = parse("")
    assert doc.ok and doc.diagnostics == []
    assert doc == Document()


def test_comments_only():
    assert parse("; nothing here\n\n").ok


def test_undeclared_symbol_single_diagnostic():
    text = _corpus_text().replace("((s k) (g (h k)))", "((s k) (gee (h k)))", 1)
    doc = parse(text)
    assert len(doc.errors) == 1
    err = doc.errors[0]
    assert "gee" in err.message
    line = text.splitlines()[err.span.line - 1]
    assert line[err.span.col - 1:].startswith("gee") or line[err.span.col - 1:].startswith("(gee")


def test_recovery_reports_every_bad_form():
    text = "(fun g (iota) iota)\n(frobnicate)\n(const zero iota \"0\")\n(fun f iota)\n(fun f (iota) omega)\n"
    doc = parse(text)
    assert [d.span.line for d in doc.errors] == [2, 4]
    # forms after an error are still read
    assert {"g", "f"} <= set(doc.signature.functions)


def test_unclosed_form_located():
    doc = parse("(fun g (iota) iota)\n(fun f (iota")
    assert any(d.span.line == 2 and "not closed" in d.message for d in doc.errors)


def test_unbalanced_close():
    doc = parse("(fun g (iota) iota))")
    assert len(doc.errors) == 1


def test_corpus_parses_cleanly(eca_doc):
    assert eca_doc.ok
    assert set(eca_doc.axiom_sets) == {"printed", "corrected"}


def test_corpus_round_trip(eca_doc):
    printed = print_document(eca_doc)
    again = parse(printed)
    assert again.ok, [str(d) for d in again.errors]
    assert again == eca_doc
    assert print_document(again) == printed


def test_printed_variant_diagnostics_carry_hints(eca_doc):
    variant = load_variant(eca_doc, "printed")
    hints = " ".join(d.hint or "" for d in variant.errors)
    for ident in ("c7-bound", "rho4-base-shape", "rho4-step-shape", "rho8-params", "rho9-clause-var"):
        assert ident in hints
    assert all(d.span is not None for d in variant.errors)
    assert set(variant.rho_schemas["printed"].rules) == {1, 3, 5, 6, 7, 10}


# --------------------------------------------------------------------------
# reader properties

names = st.from_regex(r"[a-z][a-z0-9'+-]{0,5}", fullmatch=True)
sexprs = st.recursive(
    names.map(sym) | st.text(st.characters(blacklist_categories=("Cs",)), max_size=6).map(string),
    lambda children: st.lists(children, max_size=4).map(lambda xs: lst(*xs)),
    max_leaves=20,
)


def _strip(e):
    if isinstance(e, Sym):
        return ("sym", e.name)
    if isinstance(e, Str):
        return ("str", e.value)
    return tuple(_strip(x) for x in e.items)


@given(st.lists(sexprs, max_size=4), st.integers(10, 120))
def test_write_then_read_is_identity(forms, width):
    text = "\n".join(write(f, 0, width) for f in forms)
    got, diags = read(text)
    assert diags == []
    assert [_strip(g) for g in got] == [_strip(f) for f in forms]


@given(st.text(alphabet="() ab;\"\n", max_size=40))
def test_reader_never_raises(text):
    forms, diags = read(text)
    assert all(isinstance(f, (Sym, Str, SList)) for f in forms)
    for d in diags:
        assert d.span is not None
