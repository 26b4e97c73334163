"""Rooted unordered node-labeled trees with an s-expression file format.

A document is read from text like ``(a (b (c) (c)) (b (c)) (d))``.  Node
ids are the preorder positions in the input, starting at 0, so node 0 is
always the root.  Documents are immutable after construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

NodeId = int

_LABEL_FORBIDDEN = set("()#/")


class DocumentError(ValueError):
    """Malformed document text or an invalid structure query."""

    def __init__(self, message: str, position: int | None = None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


def check_label(token: str, position: int | None = None) -> str:
    if not token:
        raise DocumentError("empty label", position)
    for ch in token:
        if ch.isspace() or ch in _LABEL_FORBIDDEN:
            raise DocumentError(f"bad character {ch!r} in label {token!r}", position)
    return token


@dataclass(frozen=True)
class Document:
    """Tree (V, Ed, r, lambda) with dense preorder node ids.

    `labels[v]` is the label of node v, `parent[v]` its parent (None only
    for the root), and `children[v]` the children in NodeId order.  The
    tree is unordered semantically; no result may depend on child order.
    """

    labels: tuple[str, ...]
    parent: tuple[NodeId | None, ...]
    children: tuple[tuple[NodeId, ...], ...]
    root: NodeId = 0

    def __len__(self) -> int:
        return len(self.labels)

    def nodes(self) -> range:
        return range(len(self.labels))

    def check_node(self, v: NodeId) -> NodeId:
        if not isinstance(v, int) or not 0 <= v < len(self.labels):
            raise DocumentError(f"invalid node id {v!r}")
        return v

    def label(self, v: NodeId) -> str:
        return self.labels[v]

    def is_root(self, v: NodeId) -> bool:
        return v == self.root

    def is_leaf(self, v: NodeId) -> bool:
        return not self.children[v]

    @cached_property
    def depths(self) -> tuple[int, ...]:
        out = [0] * len(self.labels)
        for v in self._top_down_order:
            p = self.parent[v]
            out[v] = 0 if p is None else out[p] + 1
        return tuple(out)

    @cached_property
    def heights(self) -> tuple[int, ...]:
        out = [0] * len(self.labels)
        for v in reversed(self._top_down_order):
            out[v] = 1 + max((out[c] for c in self.children[v]), default=-1)
        return tuple(out)

    @cached_property
    def _top_down_order(self) -> tuple[NodeId, ...]:
        # BFS from the root; also serves as the acyclicity/connectivity check.
        order = [self.root]
        seen = {self.root}
        i = 0
        while i < len(order):
            for c in self.children[order[i]]:
                if c in seen:
                    raise DocumentError(f"node {c} reached twice")
                seen.add(c)
                order.append(c)
            i += 1
        if len(order) != len(self.labels):
            raise DocumentError("tree is not connected")
        return tuple(order)

    def depth(self, v: NodeId) -> int:
        return self.depths[self.check_node(v)]

    def height(self, v: NodeId) -> int:
        return self.heights[self.check_node(v)]

    def ancestor_at(self, v: NodeId, i: int) -> NodeId:
        """The ancestor of v reached by i parent steps; i=0 is v itself."""
        self.check_node(v)
        if i < 0 or i > self.depths[v]:
            raise DocumentError(f"ancestor_at({v}, {i}) exceeds depth {self.depths[v]}")
        while i:
            v = self.parent[v]
            i -= 1
        return v

    def is_descendant(self, w: NodeId, v: NodeId) -> bool:
        """True iff w is v or a descendant of v."""
        d = self.depths[w] - self.depths[v]
        return d >= 0 and self.ancestor_at(w, d) == v

    def descendants_at(self, v: NodeId, dist: int) -> tuple[NodeId, ...]:
        """All nodes exactly `dist` child steps below v."""
        frontier = [self.check_node(v)]
        for _ in range(dist):
            frontier = [c for u in frontier for c in self.children[u]]
        return tuple(frontier)

    def validate(self) -> None:
        """Check the structural invariants; raises DocumentError if broken."""
        n = len(self.labels)
        if not (len(self.parent) == len(self.children) == n and n > 0):
            raise DocumentError("field lengths disagree")
        roots = [v for v in self.nodes() if self.parent[v] is None]
        if roots != [self.root]:
            raise DocumentError(f"parentless nodes {roots} do not match root {self.root}")
        for v in self.nodes():
            check_label(self.labels[v])
            for c in self.children[v]:
                if self.parent[c] != v:
                    raise DocumentError(f"edge {v}->{c} not mirrored by parent array")
            p = self.parent[v]
            if p is not None and v not in self.children[p]:
                raise DocumentError(f"parent {p} does not list child {v}")
        self._top_down_order  # connectivity / acyclicity

    def alphabet(self) -> tuple[str, ...]:
        """Labels occurring in this document, sorted."""
        return tuple(sorted(set(self.labels)))


def parse_document(text: str) -> Document:
    """Parse s-expression document text; node ids follow input preorder."""
    labels: list[str] = []
    parents: list[NodeId | None] = []
    children: list[list[NodeId]] = []
    stack: list[NodeId] = []
    toplevel = 0
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch == "(":
            i += 1
            while i < n and text[i].isspace():
                i += 1
            start = i
            while i < n and not text[i].isspace() and text[i] not in _LABEL_FORBIDDEN:
                i += 1
            label = check_label(text[start:i], start)
            node = len(labels)
            if stack:
                parents.append(stack[-1])
                children[stack[-1]].append(node)
            else:
                if toplevel:
                    raise DocumentError("more than one top-level tree", start - 1)
                toplevel += 1
                parents.append(None)
            labels.append(label)
            children.append([])
            stack.append(node)
        elif ch == ")":
            if not stack:
                raise DocumentError("unbalanced ')'", i)
            stack.pop()
            i += 1
        else:
            raise DocumentError(f"unexpected character {ch!r}", i)
    if stack:
        raise DocumentError("unbalanced '(': tree not closed", n)
    if not labels:
        raise DocumentError("empty input")
    doc = Document(
        labels=tuple(labels),
        parent=tuple(parents),
        children=tuple(tuple(cs) for cs in children),
    )
    doc.validate()
    return doc


def serialize_document(doc: Document) -> str:
    """Render doc so that parse_document round-trips node-for-node."""

    def render(v: NodeId) -> str:
        inner = "".join(" " + render(c) for c in doc.children[v])
        return f"({doc.labels[v]}{inner})"

    return render(doc.root)
