"""The eventually-constant-assertion case study, end to end.

Everything is driven by the bundled ``corpus/eca.lks``: the proof schema,
the clause templates C1..C7 and C4', the refutation schema, the
substitution schema, the Herbrand system and the axiom sets.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from typing import Optional

from .clauses import (
    Clause,
    EMPTY_CLAUSE,
    build_schema_rewrites,
    canonical_set,
    ground_clause_set,
    normal_form,
    reduce_clause_set,
    sorted_clauses,
)
from .dsl import Document, parse, parse_file
from .herbrand import (
    EMPTY_AXIOMS,
    AxiomSet,
    Provability,
    ProvabilityResult,
    build_herbrand_sequent,
    check_provable,
    flatten,
)
from .oracle import OracleResult, Verdict, g_chain, ground_refute_oracle
from .resolution import (
    GNode,
    GroundTree,
    leaf_labels,
    unfold,
    verify,
)
from .terms import Lambda, OmegaVar, SchemApp, Sequent, numeral

CORPUS = "eca.lks"
PROOF_SCHEMA = "eca"
TOP_SYMBOL = "psi"
SPS = "S"
HERBRAND = "eca"
SUBSTITUTION = "eca"


def corpus_path(name: str = CORPUS):
    return resources.files("schematic_ceres") / "corpus" / name


def load_document(path=None) -> Document:
    if path is None:
        p = corpus_path()
        return parse(p.read_text(encoding="utf-8"), source=str(p))
    return parse_file(path)


def load_variant(doc: Document, name: str, base_dir=None) -> Document:
    """Parse the variant file named in ``doc`` on top of ``doc``."""
    if name not in doc.variants:
        raise KeyError(f"no variant {name!r}; known: {sorted(doc.variants)}")
    rel = doc.variants[name]
    if base_dir is None:
        p = corpus_path(rel)
        return parse(p.read_text(encoding="utf-8"), source=str(p), base=doc)
    from pathlib import Path

    return parse_file(Path(base_dir) / rel, base=doc)


def _pick(table: dict, preferred: str, what: str):
    if preferred in table:
        return table[preferred]
    if len(table) == 1:
        return next(iter(table.values()))
    raise KeyError(f"no {what} named {preferred!r}; known: {sorted(table)}")


@dataclass
class EcaBundle:
    """Named views into a document; each falls back to the only object of its kind."""

    doc: Document
    refutation: str = "corrected"
    axioms: str = "corrected"

    @property
    def schema(self):
        return _pick(self.doc.proof_schemas, PROOF_SCHEMA, "proof schema")

    @property
    def top_symbol(self) -> str:
        symbols = [p.symbol for p in self.schema.pairs]
        return TOP_SYMBOL if TOP_SYMBOL in symbols else symbols[0]

    @property
    def rs(self):
        return self.doc.rewrite

    @property
    def rho(self):
        return _pick(self.doc.rho_schemas, self.refutation, "resolution schema")

    @property
    def substitution(self):
        return _pick(self.doc.substitutions, SUBSTITUTION, "substitution")

    @property
    def sps(self):
        return _pick(self.doc.sps, SPS, "sps schema")

    @property
    def herbrand(self):
        return _pick(self.doc.herbrand_systems, HERBRAND, "Herbrand system")

    @property
    def axiom_set(self) -> AxiomSet:
        if not self.doc.axiom_sets:
            return EMPTY_AXIOMS
        return _pick(self.doc.axiom_sets, self.axioms, "axiom set")

    @property
    def crs(self):
        if not hasattr(self, "_crs"):
            self._crs = build_schema_rewrites(self.schema)
        return self._crs


@lru_cache(maxsize=1)
def default_bundle() -> EcaBundle:
    return EcaBundle(load_document())


# --------------------------------------------------------------------------
# clause sets


def template_ranges(gamma: int) -> list:
    """``(template, index)`` pairs making up the clause set at ``gamma``."""
    out = [("C1", None), ("C2", None)]
    out += [("C3", i) for i in range(gamma + 1)]
    out += [("C4", i) for i in range(gamma)]
    out += [("C4'", i) for i in range(gamma)]
    out += [("C5", None), ("C6", None), ("C7", gamma)]
    return out


def template_clause(bundle: EcaBundle, name: str, index: Optional[int] = None, k=None) -> Clause:
    """Instantiate a template, leaving schematic variables as ``x(k)``, ``y(k)``."""
    tmpl = bundle.doc.clause_schemas[name]
    kv = OmegaVar("k") if k is None else numeral(k)
    args = []
    for pname, kind in tmpl.params:
        if kind == "schem":
            args.append(Lambda("k", SchemApp(pname, OmegaVar("k"))))
        elif pname == "k":
            args.append(kv)
        else:
            args.append(numeral(index))
    return tmpl.instantiate(args, bundle.rs)


def template_clause_set(bundle: EcaBundle, gamma: int) -> frozenset:
    """The template set at ``gamma``, schematic applications generalized."""
    cs = [template_clause(bundle, name, i) for name, i in template_ranges(gamma)]
    return canonical_set(cs, schematic=True)


@dataclass
class ClauseSetComparison:
    gamma: int
    extracted: frozenset
    reduced: frozenset
    templates: frozenset
    missing: frozenset  # template clauses absent from the reduced extraction
    extra: frozenset  # reduced clauses not among the templates

    @property
    def match(self) -> bool:
        return not self.missing and not self.extra


def extracted_clause_set(bundle: EcaBundle, gamma: int, via: str = "schema") -> frozenset:
    if via == "schema":
        return normal_form(bundle.crs, bundle.top_symbol, gamma)
    if via == "ground":
        return ground_clause_set(bundle.schema, gamma)
    raise ValueError(f"unknown extraction route {via!r}")


def eca_clause_set(gamma: int, bundle: Optional[EcaBundle] = None, reduce_templates: bool = False) -> ClauseSetComparison:
    """Extract, reduce and compare against the template instances.

    With ``reduce_templates`` the template side is reduced too, so clauses
    the templates list but subsumption removes no longer count as missing.
    """
    if gamma < 0:
        raise ValueError("gamma must be non-negative")
    bundle = bundle or default_bundle()
    extracted = extracted_clause_set(bundle, gamma)
    reduced = reduce_clause_set(extracted)
    templates = template_clause_set(bundle, gamma)
    if reduce_templates:
        templates = canonical_set(reduce_clause_set(templates))
    mine = canonical_set(reduced)
    return ClauseSetComparison(gamma, extracted, reduced, templates, templates - mine, mine - templates)


# --------------------------------------------------------------------------
# refutation


@dataclass
class RefutationResult:
    gamma: int
    k: int
    tree: Optional[GroundTree]
    violations: list = field(default_factory=list)
    error: Optional[str] = None

    @property
    def verified(self) -> bool:
        return self.tree is not None and self.error is None and not self.violations

    def labels(self, share: bool = True) -> list:
        return leaf_labels(self.tree, share) if self.tree is not None else []


def tamper(t: GroundTree) -> GroundTree:
    """Flip the pivot of the root to its negation side; used to test the verifier."""
    if not isinstance(t, GNode):
        return t
    return GNode(t.right, t.left, t.pivot, t.resolvent, t.origin)


def eca_refute(gamma: int, k: int = 0, bundle: Optional[EcaBundle] = None, clause_set=None,
               tampered: bool = False, check: bool = True) -> RefutationResult:
    """Unfold the refutation schema with ``Y ← ⊢``, ``k ← k̄`` and verify it."""
    if gamma < 0 or k < 0:
        raise ValueError("gamma and k must be non-negative")
    bundle = bundle or default_bundle()
    sub = bundle.substitution
    theta = dict(sub.clause) or {"Y": EMPTY_CLAUSE}
    nu = dict(sub.omega)
    nu["k"] = numeral(k)
    try:
        tree = unfold(bundle.rho, gamma, theta, nu, sub.schem, rs=bundle.rs)
    except (ValueError, KeyError) as exc:
        return RefutationResult(gamma, k, None, [], f"{type(exc).__name__}: {exc}")
    if tampered:
        tree = tamper(tree)
    if not check:
        return RefutationResult(gamma, k, tree)
    if clause_set is None:
        clause_set = reduce_clause_set(extracted_clause_set(bundle, gamma))
    return RefutationResult(gamma, k, tree, verify(tree, clause_set))


def eca_oracle(gamma: int, bundle: Optional[EcaBundle] = None, clause_set=None, depth: Optional[int] = None):
    """Ground refutation of the reduced set over g-chains of depth ``gamma + 2``.

    Returns the oracle result and the verifier's report on its tree.
    """
    bundle = bundle or default_bundle()
    if clause_set is None:
        clause_set = reduce_clause_set(extracted_clause_set(bundle, gamma))
    universe = g_chain(gamma + 2 if depth is None else depth)
    result = ground_refute_oracle(clause_set, universe)
    report = verify(result.tree, clause_set) if result.tree is not None else None
    return result, report


# --------------------------------------------------------------------------
# Herbrand sequents


def minimal_overrides(bundle: EcaBundle) -> dict:
    zero = bundle.doc.signature.constants["zero"]
    return {e.wsym: [(zero,)] for e in bundle.sps.existentials}


@dataclass
class HerbrandResult:
    gamma: int
    full: Sequent
    minimal: Sequent
    full_check: ProvabilityResult
    minimal_check: ProvabilityResult

    @property
    def provable(self) -> bool:
        return self.full_check.verdict == Provability.PROVABLE and self.minimal_check.verdict == Provability.PROVABLE


def eca_herbrand(gamma: int, bundle: Optional[EcaBundle] = None, axioms: Optional[AxiomSet] = None) -> HerbrandResult:
    bundle = bundle or default_bundle()
    axioms = bundle.axiom_set if axioms is None else axioms
    full = build_herbrand_sequent(bundle.sps, bundle.herbrand, gamma, bundle.rs)
    minimal = build_herbrand_sequent(bundle.sps, bundle.herbrand, gamma, bundle.rs, overrides=minimal_overrides(bundle))
    return HerbrandResult(
        gamma, full, minimal,
        check_provable(full, axioms, gamma, rs=bundle.rs),
        check_provable(minimal, axioms, gamma, rs=bundle.rs),
    )


# --------------------------------------------------------------------------
# report


@dataclass
class EcaReport:
    gamma: int
    k: int
    clause_set: ClauseSetComparison
    refutation: RefutationResult
    oracle: OracleResult
    oracle_report: Optional[list]
    herbrand: HerbrandResult
    timings: dict = field(default_factory=dict)

    @property
    def clause_set_match(self) -> bool:
        return self.clause_set.match

    @property
    def refutation_verified(self) -> bool:
        return self.refutation.verified

    @property
    def oracle_verdict(self) -> str:
        return self.oracle.verdict.value

    @property
    def herbrand_provable(self) -> bool:
        return self.herbrand.provable

    @property
    def ok(self) -> bool:
        return (self.refutation_verified and self.herbrand_provable and self.oracle.verdict == Verdict.UNSAT
                and self.oracle_report == [])


def eca_report(gamma: int, k: int = 0, bundle: Optional[EcaBundle] = None) -> EcaReport:
    bundle = bundle or default_bundle()
    timings = {}
    t = time.perf_counter()
    cs = eca_clause_set(gamma, bundle, reduce_templates=True)
    timings["clause_set"] = time.perf_counter() - t
    t = time.perf_counter()
    ref = eca_refute(gamma, k, bundle, cs.reduced)
    timings["refutation"] = time.perf_counter() - t
    t = time.perf_counter()
    orc, orc_report = eca_oracle(gamma, bundle, cs.reduced)
    timings["oracle"] = time.perf_counter() - t
    t = time.perf_counter()
    hb = eca_herbrand(gamma, bundle)
    timings["herbrand"] = time.perf_counter() - t
    return EcaReport(gamma, k, cs, ref, orc, orc_report, hb, timings)


def _rho_sources(text: str, schema: str) -> dict:
    """Source text of the rho forms following ``(resolution-schema NAME)``, by index."""
    from .dsl.sexpr import read

    forms, _ = read(text)
    lines = text.splitlines()
    out: dict = {}
    current = None
    for f in forms:
        if getattr(f, "head", None) == "resolution-schema" and len(f) > 1:
            current = str(f[1])
        elif getattr(f, "head", None) == "rho" and current == schema and len(f) > 1:
            sp = f.span
            chunk = lines[sp.line - 1:sp.end_line]
            out[str(f[1])] = "\n".join(chunk).strip() + "\n"
    return out


def variant_diff(doc: Document, name: str = "printed", reference: str = "corrected") -> str:
    """Unified diff of the rho rules of a variant against the reference encoding, then the discrepancy notes."""
    import difflib
    from pathlib import Path

    base_text = Path(doc.source).read_text(encoding="utf-8") if doc.source else ""
    rel = doc.variants[name]
    vpath = Path(doc.source).parent / rel if doc.source else corpus_path(rel)
    var_text = Path(vpath).read_text(encoding="utf-8")
    ref = _rho_sources(base_text, reference)
    var = _rho_sources(var_text, name)
    chunks = []
    for idx in sorted(set(ref) | set(var), key=int):
        a, b = ref.get(idx, ""), var.get(idx, "")
        if a != b:
            chunks.extend(difflib.unified_diff(a.splitlines(True), b.splitlines(True),
                                               f"{reference}/rho{idx}", f"{name}/rho{idx}"))
    for d in doc.discrepancies.values():
        chunks.append(f"\n[{d.id}] {' '.join(d.target)}\n  printed:   {d.printed}\n"
                      f"  corrected: {d.corrected}\n  {d.note}\n")
    return "".join(chunks)


def leaf_names(t: GroundTree, share: bool = True) -> list:
    return [label[0] for label in leaf_labels(t, share) if label is not None]


__all__ = [
    "ClauseSetComparison",
    "EMPTY_AXIOMS",
    "EcaBundle",
    "EcaReport",
    "HerbrandResult",
    "RefutationResult",
    "corpus_path",
    "default_bundle",
    "eca_clause_set",
    "eca_herbrand",
    "eca_oracle",
    "eca_refute",
    "eca_report",
    "extracted_clause_set",
    "flatten",
    "leaf_names",
    "load_document",
    "load_variant",
    "sorted_clauses",
    "tamper",
    "template_clause",
    "template_clause_set",
    "template_ranges",
]
