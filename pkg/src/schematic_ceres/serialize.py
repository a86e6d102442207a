"""JSON views of the data model.  Integers and strings only, so output is bit-stable."""

from __future__ import annotations

import json

from .clauses import Clause, sorted_clauses
from .proofs import ProofNode
from .resolution import GLeaf, GroundTree
from .terms import Sequent, fmt

FORMAT_VERSION = 1


def clause_json(c: Clause) -> dict:
    return {"ante": [fmt(a) for a in c.ante], "succ": [fmt(a) for a in c.succ], "text": str(c)}


def clause_set_json(clauses) -> list:
    return [clause_json(c) for c in sorted_clauses(clauses)]


def sequent_json(s: Sequent) -> dict:
    return {"ante": [fmt(f) for f in s.ante], "succ": [fmt(f) for f in s.succ], "text": fmt(s)}


def proof_json(p: ProofNode) -> dict:
    out = {"rule": p.rule, "conclusion": fmt(p.conclusion), "premises": [proof_json(q) for q in p.premises]}
    if p.link is not None:
        out["link"] = {"symbol": p.link.symbol, "args": [fmt(a) for a in p.link.args]}
    return out


def tree_json(t: GroundTree) -> dict:
    """The tree as a DAG: shared subtrees appear once, nodes in post-order."""
    nodes: list = []
    ids: dict = {}

    def visit(n) -> int:
        if id(n) in ids:
            return ids[id(n)]
        if isinstance(n, GLeaf):
            entry = {"kind": "leaf", "clause": clause_json(n.clause)}
            if n.label is not None:
                name, level, omegas = n.label
                entry["template"] = name
                entry["level"] = level
                entry["omega"] = list(omegas)
        else:
            left, right = visit(n.left), visit(n.right)
            entry = {"kind": "resolution", "left": left, "right": right, "pivot": fmt(n.pivot),
                     "clause": clause_json(n.resolvent)}
        entry["id"] = len(nodes)
        nodes.append(entry)
        ids[id(n)] = entry["id"]
        return entry["id"]

    root = visit(t)
    return {"root": root, "nodes": nodes}


def violations_json(vs) -> list:
    return [{"path": "".join("LR"[i] for i in v.path), "kind": v.kind, "message": v.message} for v in vs]


def envelope(command: str, **payload) -> dict:
    return {"format": FORMAT_VERSION, "command": command, **payload}


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
