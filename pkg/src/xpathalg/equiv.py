"""Structural node relations computed by fixpoint refinement.

Equivalence notions come back as partitions (block id = smallest member);
preorder notions come back as boolean matrices stored row-wise.  The
pair-level relations combine signature subsumption or congruence with a
node notion tested pointwise along corresponding path positions.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from functools import lru_cache

from .document import Document, NodeId
from . import signature as sig_mod

Pair = tuple[NodeId, NodeId]


@dataclass(frozen=True)
class NodeNotion:
    kind: str
    k: int | None = None

    def __post_init__(self):
        if self.kind in ("down-k", "k"):
            if self.k is None or self.k < 1:
                raise ValueError(f"notion {self.kind} needs k >= 1")
        elif self.k is not None:
            raise ValueError(f"notion {self.kind} takes no k")

    def __str__(self) -> str:
        return self.kind if self.k is None else f"{self.kind}({self.k})"


def down_k(k: int) -> NodeNotion:
    return NodeNotion("down-k", k)


def up_down_k(k: int) -> NodeNotion:
    return NodeNotion("k", k)


UPWARD = NodeNotion("up")
DOWN_RELATED = NodeNotion("down-rel")
WEAK_DOWN = NodeNotion("weak-down")
RELATED = NodeNotion("rel")
WEAK_EQUIV = NodeNotion("weak")
UP_RELATED = NodeNotion("up-rel")

_PARTITION_KINDS = {"down-k", "up", "k", "weak-down", "weak"}
_PREORDER_KINDS = {"down-rel", "rel", "up-rel"}


@dataclass(frozen=True)
class NodeRelationIndex:
    notion: NodeNotion
    kind: str  # "partition" | "preorder"
    block: tuple[int, ...] | None = None
    rows: tuple[frozenset[NodeId], ...] | None = None

    def holds(self, v1: NodeId, v2: NodeId) -> bool:
        if self.kind == "partition":
            return self.block[v1] == self.block[v2]
        return v2 in self.rows[v1]

    def blocks(self) -> list[tuple[NodeId, ...]]:
        if self.kind != "partition":
            raise ValueError(f"{self.notion} is a preorder, not a partition")
        by_block: dict[int, list[NodeId]] = {}
        for v, b in enumerate(self.block):
            by_block.setdefault(b, []).append(v)
        return [tuple(sorted(vs)) for _, vs in sorted(by_block.items())]

    def block_of(self, v: NodeId) -> tuple[NodeId, ...]:
        b = self.block[v]
        return tuple(u for u, bb in enumerate(self.block) if bb == b)

    def pairs(self) -> list[Pair]:
        """All related ordered pairs, for preorder printing."""
        if self.kind == "preorder":
            return sorted((v, u) for v, row in enumerate(self.rows) for u in row)
        return sorted(
            (v, u)
            for v in range(len(self.block))
            for u in range(len(self.block))
            if self.block[v] == self.block[u]
        )


def _canonical(block_key: list) -> tuple[int, ...]:
    """Rewrite arbitrary block keys to ids equal to the smallest member."""
    first: dict = {}
    for v, key in enumerate(block_key):
        first.setdefault(key, v)
    return tuple(first[key] for key in block_key)


def _down_k_blocks(doc: Document, k: int) -> tuple[int, ...]:
    """Coarsest partition closed under label equality plus per-block child
    counts capped at k; iterated refinement from the label partition."""
    block = _canonical([doc.labels[v] for v in doc.nodes()])
    while True:
        sigs = []
        for v in doc.nodes():
            counts = Counter(block[c] for c in doc.children[v])
            sigs.append((block[v], tuple(sorted((b, min(c, k)) for b, c in counts.items()))))
        new = _canonical(sigs)
        if new == block:
            return block
        block = new


def _chain_blocks(doc: Document, base: tuple[int, ...]) -> tuple[int, ...]:
    """Partition by root paths: pointwise base-equivalence and equal depth."""
    keys: list = [None] * len(doc)
    for v in doc._top_down_order:
        p = doc.parent[v]
        keys[v] = (base[v], None if p is None else keys[p])
    return _canonical(keys)


def _down_related_rows(doc: Document) -> tuple[frozenset[NodeId], ...]:
    """Greatest relation with equal labels where every child of the first
    node is related to some child of the second; deletion fixpoint."""
    rel = [
        {u for u in doc.nodes() if doc.labels[u] == doc.labels[v]} for v in doc.nodes()
    ]
    changed = True
    while changed:
        changed = False
        for v in doc.nodes():
            drop = set()
            for u in rel[v]:
                for c in doc.children[v]:
                    if not any(d in rel[c] for d in doc.children[u]):
                        drop.add(u)
                        break
            if drop:
                rel[v] -= drop
                changed = True
    return tuple(frozenset(r) for r in rel)


def _related_rows(doc: Document) -> tuple[frozenset[NodeId], ...]:
    down = _down_related_rows(doc)
    rows: list[frozenset[NodeId]] = [frozenset()] * len(doc)
    for v in doc._top_down_order:
        p = doc.parent[v]
        if p is None:
            rows[v] = frozenset({v}) & down[v]
        else:
            rows[v] = frozenset(
                u
                for u in down[v]
                if doc.parent[u] is not None and doc.parent[u] in rows[p]
            )
    return tuple(rows)


def _up_related_rows(doc: Document) -> tuple[frozenset[NodeId], ...]:
    rows: list[frozenset[NodeId]] = [frozenset()] * len(doc)
    for v in doc._top_down_order:
        p = doc.parent[v]
        same_label = (u for u in doc.nodes() if doc.labels[u] == doc.labels[v])
        if p is None:
            rows[v] = frozenset(same_label)
        else:
            rows[v] = frozenset(
                u
                for u in same_label
                if doc.parent[u] is not None and doc.parent[u] in rows[p]
            )
    return tuple(rows)


def _symmetric_blocks(doc: Document, rows: tuple[frozenset[NodeId], ...]) -> tuple[int, ...]:
    keys = [frozenset(u for u in rows[v] if v in rows[u]) for v in doc.nodes()]
    return _canonical(keys)


@lru_cache(maxsize=None)
def node_relation(doc: Document, notion: NodeNotion) -> NodeRelationIndex:
    """Compute the structural relation for `notion` on `doc`."""
    kind = notion.kind
    if kind == "down-k":
        return NodeRelationIndex(notion, "partition", block=_down_k_blocks(doc, notion.k))
    if kind == "up":
        base = _canonical([doc.labels[v] for v in doc.nodes()])
        return NodeRelationIndex(notion, "partition", block=_chain_blocks(doc, base))
    if kind == "k":
        base = _down_k_blocks(doc, notion.k)
        return NodeRelationIndex(notion, "partition", block=_chain_blocks(doc, base))
    if kind == "down-rel":
        return NodeRelationIndex(notion, "preorder", rows=_down_related_rows(doc))
    if kind == "weak-down":
        rows = _down_related_rows(doc)
        return NodeRelationIndex(notion, "partition", block=_symmetric_blocks(doc, rows))
    if kind == "rel":
        return NodeRelationIndex(notion, "preorder", rows=_related_rows(doc))
    if kind == "weak":
        rows = _related_rows(doc)
        return NodeRelationIndex(notion, "partition", block=_symmetric_blocks(doc, rows))
    if kind == "up-rel":
        return NodeRelationIndex(notion, "preorder", rows=_up_related_rows(doc))
    raise ValueError(f"unknown notion {notion}")


# --- pair-level relations --------------------------------------------------

MODE_SUBSUMES = "subsumes"
MODE_CONGRUENT = "congruent"


@dataclass(frozen=True)
class PairTheta:
    theta: NodeNotion
    mode: str

    def __post_init__(self):
        if self.mode not in (MODE_SUBSUMES, MODE_CONGRUENT):
            raise ValueError(f"bad mode {self.mode!r}")


def pair_related(doc: Document, theta: PairTheta, p1: Pair, p2: Pair) -> bool:
    """Signature subsumption/congruence of p1 over p2 plus the node notion
    between every node on p1's path and its corresponding node in p2."""
    sig = sig_mod.signature_of(doc, *p1)
    doc.check_node(p2[0])
    doc.check_node(p2[1])
    if theta.mode == MODE_CONGRUENT:
        if sig_mod.signature_of(doc, *p2).shape() != sig.shape():
            return False
    elif not sig_mod.in_template(doc, sig.up, sig.down, p2):
        return False
    idx = node_relation(doc, theta.theta)
    for i, y1 in enumerate(sig.path):
        y2 = sig_mod.corresponding_node(doc, sig, p2, i)
        if not idx.holds(y1, y2):
            return False
    return True


def pair_candidates(doc: Document, theta: PairTheta, p: Pair):
    """Pairs q that p could relate to, walking signature-compatible pairs
    directly instead of all |V|^2 pairs; callers still filter with
    pair_related for the pointwise condition."""
    sig = sig_mod.signature_of(doc, *p)
    if theta.mode == MODE_CONGRUENT:
        yield from sig_mod.pairs_with_signature(doc, sig.up, sig.down)
    else:
        yield from sig_mod.pairs_subsumed_by(doc, p)


def format_partition(index: NodeRelationIndex) -> str:
    return " ".join("{" + ",".join(str(v) for v in b) + "}" for b in index.blocks())


def format_preorder(index: NodeRelationIndex) -> str:
    return "\n".join(f"{v} <= {u}" for v, u in index.pairs())
