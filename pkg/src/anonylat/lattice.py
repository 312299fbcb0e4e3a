"""Full-domain generalisation lattice: node application and predictive tagging."""

from __future__ import annotations

import enum
import itertools
import math
from collections import Counter
from typing import Iterator, Mapping, Sequence

from .errors import BoundsError, TaggingError
from .hierarchy import GeneralisationHierarchy
from .tabular import Table

LatticeNode = tuple[int, ...]


class Tag(enum.Enum):
    UNTAGGED = "untagged"
    KANON = "kanon"
    NOT_KANON = "not_kanon"


def lattice_heights(table: Table,
                    hierarchies: Mapping[str, GeneralisationHierarchy]) -> tuple[int, ...]:
    """Per-QID hierarchy heights, in schema order."""
    return tuple(hierarchies[a.name].height for a in table.qids)


def lattice_size(heights: Sequence[int]) -> int:
    return math.prod(h + 1 for h in heights)


def iter_lattice(heights: Sequence[int]) -> Iterator[LatticeNode]:
    """All nodes, in lexicographic order."""
    return itertools.product(*(range(h + 1) for h in heights))


def node_in_bounds(node: LatticeNode, heights: Sequence[int]) -> bool:
    return len(node) == len(heights) and all(
        0 <= l <= h for l, h in zip(node, heights)
    )


def dominates(a: LatticeNode, b: LatticeNode) -> bool:
    """a >= b componentwise."""
    return all(x >= y for x, y in zip(a, b))


def iter_between_at_height(bottom: LatticeNode, top: LatticeNode,
                           height: int) -> Iterator[LatticeNode]:
    """Nodes N with bottom <= N <= top componentwise and sum(N) == height."""

    m = len(bottom)

    def rec(i: int, remaining: int, prefix: list[int]):
        if i == m:
            if remaining == 0:
                yield tuple(prefix)
            return
        tail_min = sum(bottom[i + 1 :])
        tail_max = sum(top[i + 1 :])
        lo = max(bottom[i], remaining - tail_max)
        hi = min(top[i], remaining - tail_min)
        for level in range(lo, hi + 1):
            prefix.append(level)
            yield from rec(i + 1, remaining - level, prefix)
            prefix.pop()

    yield from rec(0, height, [])


class TagStore:
    """Per-run k-anonymity tags over a lattice; tags are write-once."""

    def __init__(self, heights: Sequence[int]):
        self.heights = tuple(heights)
        self._tags: dict[LatticeNode, Tag] = {}

    def tag(self, node: LatticeNode) -> Tag:
        return self._tags.get(node, Tag.UNTAGGED)

    def _set(self, node: LatticeNode, tag: Tag) -> None:
        old = self._tags.get(node, Tag.UNTAGGED)
        if old is not Tag.UNTAGGED and old is not tag:
            raise TaggingError(
                f"node {node} already tagged {old.value}, refusing {tag.value}"
            )
        self._tags[node] = tag

    def tagged_count(self) -> int:
        return len(self._tags)

    def kanon_nodes(self) -> list[LatticeNode]:
        return [n for n, t in self._tags.items() if t is Tag.KANON]

    def untagged_nodes(self) -> list[LatticeNode]:
        return [n for n in iter_lattice(self.heights)
                if self.tag(n) is Tag.UNTAGGED]


def tag_and_propagate(store: TagStore, node: LatticeNode, tag: Tag) -> None:
    """Tag a node and propagate by monotonicity.

    kanon propagates to every componentwise-greater node, not_kanon to
    every componentwise-smaller one. Nodes already carrying the same tag
    are not re-expanded (their closure was propagated when they were set).
    """
    if tag not in (Tag.KANON, Tag.NOT_KANON):
        raise TaggingError(f"cannot propagate tag {tag}")
    if not node_in_bounds(node, store.heights):
        raise BoundsError(f"node {node} outside lattice heights {store.heights}")
    step = 1 if tag is Tag.KANON else -1
    stack = [node]
    store._set(node, tag)
    while stack:
        cur = stack.pop()
        for i, level in enumerate(cur):
            nxt_level = level + step
            if not 0 <= nxt_level <= store.heights[i]:
                continue
            nxt = cur[:i] + (nxt_level,) + cur[i + 1 :]
            if store.tag(nxt) is tag:
                continue
            store._set(nxt, tag)
            stack.append(nxt)


def k_minimal_nodes(store: TagStore) -> list[LatticeNode]:
    """kanon nodes with no componentwise-strictly-smaller kanon node.

    Requires complete tagging. Relies on the kanon set being upward closed,
    which `tag_and_propagate` maintains: a node is then minimal iff none of
    its immediate predecessors is kanon.
    """
    untagged = store.untagged_nodes()
    if untagged:
        raise TaggingError(
            f"{len(untagged)} nodes untagged (first: {untagged[0]})"
        )
    minimal = []
    for node in store.kanon_nodes():
        for i, level in enumerate(node):
            if level > 0:
                pred = node[:i] + (level - 1,) + node[i + 1 :]
                if store.tag(pred) is Tag.KANON:
                    break
        else:
            minimal.append(node)
    return sorted(minimal)


def apply_node(table: Table, node: LatticeNode,
               hierarchies: Mapping[str, GeneralisationHierarchy]) -> Table:
    """Generalise every QID cell to the node's level; ids preserved."""
    qid_idx = table.qid_indices
    qids = table.qids
    if len(node) != len(qid_idx):
        raise BoundsError(f"node {node} has {len(node)} levels for {len(qid_idx)} QIDs")
    heights = tuple(hierarchies[a.name].height for a in qids)
    if not node_in_bounds(node, heights):
        raise BoundsError(f"node {node} outside lattice heights {heights}")
    # per-QID memo: distinct leaves are few compared to rows
    memo: list[dict] = [{} for _ in qid_idx]
    rows = []
    for row in table.rows:
        cells = list(row)
        for qi, (j, attr, level) in enumerate(zip(qid_idx, qids, node)):
            value = row[j]
            cache = memo[qi]
            if value not in cache:
                cache[value] = hierarchies[attr.name].generalise(value, level)
            cells[j] = cache[value]
        rows.append(tuple(cells))
    return table.with_rows(rows)


def qid_signature(table: Table, row: Sequence) -> tuple:
    return tuple(row[j] for j in table.qid_indices)


def check_k_anonymous(table: Table, k: int,
                      max_sup: float = 0.0) -> tuple[bool, tuple[int, ...]]:
    """Check record-suppression k-anonymity of an already generalised table.

    Rows in signature groups of size < k are suppression candidates; the
    table satisfies the constraint iff their count is within max_sup * N.
    Returns (satisfied, candidate ids) in either case.
    """
    if k < 1:
        raise BoundsError(f"k must be >= 1, got {k}")
    if not 0.0 <= max_sup < 1.0:
        raise BoundsError(f"max_sup must lie in [0, 1), got {max_sup}")
    counts: Counter = Counter(qid_signature(table, row) for row in table.rows)
    candidates = tuple(
        i for i, row in enumerate(table.rows)
        if counts[qid_signature(table, row)] < k
    )
    satisfied = len(candidates) <= max_sup * table.n_rows
    return satisfied, candidates
