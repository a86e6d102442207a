"""Graphviz DOT export for ground resolution trees, ρ-dependency graphs and proofs."""

from __future__ import annotations

from .proofs import ProofNode
from .resolution import GLeaf, GroundTree, ResolutionProofSchema
from .terms import fmt


def _q(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n") + '"'


def tree_to_dot(t: GroundTree, name: str = "refutation") -> str:
    """Shared subtrees are emitted once and drawn with several parents."""
    lines = [f"digraph {_q(name)} {{", "  rankdir=BT;", "  node [shape=box, fontname=\"Helvetica\", fontsize=10];"]
    ids: dict = {}

    def visit(n) -> str:
        key = id(n)
        if key in ids:
            return ids[key]
        nid = f"n{len(ids)}"
        ids[key] = nid
        if isinstance(n, GLeaf):
            label = str(n.clause)
            if n.label is not None:
                tmpl, level, omegas = n.label
                label += f"\n{tmpl} @{level} k={','.join(map(str, omegas))}"
            lines.append(f"  {nid} [label={_q(label)}, style=filled, fillcolor=\"#eeeeee\"];")
        else:
            lines.append(f"  {nid} [label={_q(str(n.resolvent))}];")
            left = visit(n.left)
            right = visit(n.right)
            lines.append(f"  {left} -> {nid} [label={_q('+' + fmt(n.pivot))}];")
            lines.append(f"  {right} -> {nid} [label={_q('-' + fmt(n.pivot))}];")
        return nid

    visit(t)
    lines.append("}")
    return "\n".join(lines) + "\n"


def rho_graph_to_dot(R: ResolutionProofSchema, name: str = "rho") -> str:
    lines = [f"digraph {_q(name)} {{", "  node [shape=circle];"]
    for i in sorted(R.rules):
        lines.append(f"  rho{i} [label={_q('ρ' + str(i))}];")
    for src, dst, label in R.dependency_edges():
        lines.append(f"  rho{src} -> rho{dst} [label={_q(label)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def proof_to_dot(p: ProofNode, name: str = "proof") -> str:
    lines = [f"digraph {_q(name)} {{", "  rankdir=BT;", "  node [shape=plaintext];"]
    counter = [0]

    def visit(n: ProofNode) -> str:
        nid = f"p{counter[0]}"
        counter[0] += 1
        label = f"{n.rule}: {fmt(n.conclusion)}"
        lines.append(f"  {nid} [label={_q(label)}];")
        for q in n.premises:
            lines.append(f"  {visit(q)} -> {nid};")
        return nid

    visit(p)
    lines.append("}")
    return "\n".join(lines) + "\n"


def clause_term_to_dot(t, name: str = "clause_term") -> str:
    from .clauses import ClSymbol, Leaf, Oplus, Otimes, format_clause_term

    lines = [f"digraph {_q(name)} {{", "  node [shape=box, fontname=\"Helvetica\", fontsize=10];"]
    counter = [0]

    def visit(n) -> str:
        nid = f"c{counter[0]}"
        counter[0] += 1
        if isinstance(n, (Oplus, Otimes)):
            lines.append(f"  {nid} [label={_q('⊕' if isinstance(n, Oplus) else '⊗')}, shape=circle];")
            lines.append(f"  {nid} -> {visit(n.left)};")
            lines.append(f"  {nid} -> {visit(n.right)};")
        elif isinstance(n, (Leaf, ClSymbol)):
            lines.append(f"  {nid} [label={_q(format_clause_term(n))}];")
        else:
            raise TypeError(f"not a clause term: {n!r}")
        return nid

    visit(t)
    lines.append("}")
    return "\n".join(lines) + "\n"
