"""Denotational semantics: an expression on a document is a binary relation.

Relations are materialized eagerly as frozensets of (NodeId, NodeId)
pairs; documents are desk-scale, so |V|^2 is small.  The local view
``evaluate_from`` restricts a relation to one starting node.
"""

from __future__ import annotations

from .document import Document, NodeId
from .expr import (
    Compose,
    Count,
    Diff,
    Down,
    Empty,
    Eps,
    Expr,
    Intersect,
    Inverse,
    LabelTest,
    Proj1,
    Proj2,
    Union,
    Up,
)

Relation = frozenset[tuple[NodeId, NodeId]]
NodeSet = frozenset[NodeId]


def identity_relation(doc: Document) -> Relation:
    return frozenset((v, v) for v in doc.nodes())


def edge_relation(doc: Document) -> Relation:
    return frozenset((v, c) for v in doc.nodes() for c in doc.children[v])


def transpose(rel: Relation) -> Relation:
    return frozenset((w, v) for v, w in rel)


def compose_relations(r1: Relation, r2: Relation) -> Relation:
    # indexed join on the middle node
    succ: dict[NodeId, list[NodeId]] = {}
    for u, w in r2:
        succ.setdefault(u, []).append(w)
    return frozenset((u, w) for u, v in r1 for w in succ.get(v, ()))


def evaluate(e: Expr, doc: Document) -> Relation:
    """Evaluate e on doc per the algebra's semantics; total on all inputs."""
    memo: dict[int, Relation] = {}

    def ev(node: Expr) -> Relation:
        key = id(node)
        got = memo.get(key)
        if got is not None:
            return got
        if isinstance(node, Empty):
            out: Relation = frozenset()
        elif isinstance(node, Eps):
            out = identity_relation(doc)
        elif isinstance(node, LabelTest):
            out = frozenset((v, v) for v in doc.nodes() if doc.labels[v] == node.label)
        elif isinstance(node, Down):
            out = edge_relation(doc)
        elif isinstance(node, Up):
            out = transpose(edge_relation(doc))
        elif isinstance(node, Proj1):
            out = frozenset((v, v) for v in {p[0] for p in ev(node.body)})
        elif isinstance(node, Proj2):
            out = frozenset((w, w) for w in {p[1] for p in ev(node.body)})
        elif isinstance(node, Inverse):
            out = transpose(ev(node.body))
        elif isinstance(node, Count):
            sat = {p[0] for p in ev(node.body)}
            out = frozenset(
                (v, v)
                for v in doc.nodes()
                if sum(1 for c in doc.children[v] if c in sat) >= node.k
            )
        elif isinstance(node, Compose):
            out = compose_relations(ev(node.left), ev(node.right))
        elif isinstance(node, Union):
            out = ev(node.left) | ev(node.right)
        elif isinstance(node, Intersect):
            out = ev(node.left) & ev(node.right)
        elif isinstance(node, Diff):
            out = ev(node.left) - ev(node.right)
        else:
            raise TypeError(f"not an Expr: {node!r}")
        memo[key] = out
        return out

    return ev(e)


def evaluate_from(e: Expr, doc: Document, v: NodeId) -> NodeSet:
    """The node semantics e(doc)(v) = {w : (v, w) in e(doc)}."""
    doc.check_node(v)
    return frozenset(w for u, w in evaluate(e, doc) if u == v)


# --- text formats (CLI) ---------------------------------------------------


def format_relation(rel: Relation) -> str:
    return "\n".join(f"{u} {v}" for u, v in sorted(rel))


def parse_relation(text: str) -> Relation:
    """Accepts "u v" per line or comma-separated inline pairs."""
    pairs = []
    for chunk in text.replace(",", "\n").splitlines():
        chunk = chunk.strip()
        if not chunk:
            continue
        parts = chunk.split()
        if len(parts) != 2:
            raise ValueError(f"bad relation pair {chunk!r}")
        pairs.append((int(parts[0]), int(parts[1])))
    return frozenset(pairs)


def format_node_set(nodes: NodeSet) -> str:
    return ",".join(str(v) for v in sorted(nodes))


def parse_node_set(text: str) -> NodeSet:
    text = text.strip()
    if not text:
        return frozenset()
    return frozenset(int(part.strip()) for part in text.split(","))
