"""Signatures of node pairs: the unique up-then-down path shape between nodes.

The signature of (v, w) is up^m/down^n where the path from v to w climbs
m edges to the least common ancestor and descends n edges to w.  A pair
subsumes another when the second lies in the relation denoted by the
first pair's signature expression.
"""

from __future__ import annotations

from dataclasses import dataclass

from .document import Document, NodeId
from .expr import DOWN, EPS, UP, Expr, compose_all, print_expr

Pair = tuple[NodeId, NodeId]


@dataclass(frozen=True)
class Signature:
    up: int
    down: int
    path: tuple[NodeId, ...]  # v = path[0], ..., top = path[up], ..., w = path[-1]

    def shape(self) -> tuple[int, int]:
        return (self.up, self.down)

    def expression(self) -> Expr:
        return signature_expr(self.up, self.down)

    def __str__(self) -> str:
        return print_expr(self.expression())


def signature_expr(up: int, down: int) -> Expr:
    """The expression up^m/down^n, with self for m = n = 0."""
    if up == 0 and down == 0:
        return EPS
    return compose_all([UP] * up + [DOWN] * down)


def signature_of(doc: Document, v: NodeId, w: NodeId) -> Signature:
    doc.check_node(v)
    doc.check_node(w)
    dv, dw = doc.depths[v], doc.depths[w]
    a, b = v, w
    ups, downs = [], []
    while dv > dw:
        ups.append(a)
        a = doc.parent[a]
        dv -= 1
    while dw > dv:
        downs.append(b)
        b = doc.parent[b]
        dw -= 1
    while a != b:
        ups.append(a)
        downs.append(b)
        a = doc.parent[a]
        b = doc.parent[b]
    path = tuple(ups) + (a,) + tuple(reversed(downs))
    return Signature(up=len(ups), down=len(downs), path=path)


def in_template(doc: Document, m: int, n: int, pair: Pair) -> bool:
    """Membership of pair in up^m/down^n(doc), folds included."""
    v, w = pair
    if doc.depths[v] < m or doc.depths[w] < n:
        return False
    return doc.ancestor_at(v, m) == doc.ancestor_at(w, n)


def subsumes(doc: Document, p1: Pair, p2: Pair) -> bool:
    """True iff p2 lies in the relation denoted by p1's signature."""
    sig = signature_of(doc, *p1)
    doc.check_node(p2[0])
    doc.check_node(p2[1])
    return in_template(doc, sig.up, sig.down, p2)


def congruent(doc: Document, p1: Pair, p2: Pair) -> bool:
    """Mutual subsumption; holds exactly when the signatures coincide.

    Implemented via the shortcut: a single subsumption test for
    ancestor/descendant pairs, otherwise membership in
    up^m/down^n - up^(m-1)/down^(n-1).
    """
    sig = signature_of(doc, *p1)
    m, n = sig.up, sig.down
    doc.check_node(p2[0])
    doc.check_node(p2[1])
    if not in_template(doc, m, n, p2):
        return False
    if m == 0 or n == 0:
        return True
    return not in_template(doc, m - 1, n - 1, p2)


def congruent_by_shape(doc: Document, p1: Pair, p2: Pair) -> bool:
    """Cross-check implementation: equal (m, n) shapes."""
    return signature_of(doc, *p1).shape() == signature_of(doc, *p2).shape()


def corresponding_node(doc: Document, sig: Signature, p2: Pair, index: int) -> NodeId:
    """The node of p2 matching position `index` on p1's signature path.

    For an up-offset i <= m this is the i-th ancestor of p2's first node;
    past the top it is the ancestor of p2's second node at the remaining
    down-distance.  Well-defined whenever p1 subsumes p2, including folds.
    """
    if index <= sig.up:
        return doc.ancestor_at(p2[0], index)
    return doc.ancestor_at(p2[1], sig.up + sig.down - index)


def pairs_with_signature(doc: Document, m: int, n: int):
    """All pairs whose signature is exactly up^m/down^n."""
    for top in doc.nodes():
        firsts = doc.descendants_at(top, m)
        seconds = doc.descendants_at(top, n)
        for v in firsts:
            for w in seconds:
                if m > 0 and n > 0 and doc.ancestor_at(v, m - 1) == doc.ancestor_at(w, n - 1):
                    continue  # paths share the first step, so the top is lower
                yield (v, w)


def pairs_subsumed_by(doc: Document, p: Pair):
    """All pairs in the template relation of p's signature (folds included)."""
    sig = signature_of(doc, *p)
    for v in doc.nodes():
        if doc.depths[v] < sig.up:
            continue
        top = doc.ancestor_at(v, sig.up)
        for w in doc.descendants_at(top, sig.down):
            yield (v, w)
