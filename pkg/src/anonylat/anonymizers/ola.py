"""Optimal lattice anonymisation: median-height bisection with predictive tagging.

The search recursively bisects product sublattices at their median height,
direct-checking only untagged nodes and letting monotone tag propagation
settle the rest. All k-minimal nodes are then scored with the requested
metric and the cheapest node wins (ties: lowest level sum, then
lexicographically smallest level vector).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from ..errors import InfeasibilityError
from ..hierarchy import GeneralisationHierarchy, GeneralisedValue
from ..lattice import (
    LatticeNode,
    Tag,
    TagStore,
    iter_between_at_height,
    k_minimal_nodes,
    lattice_heights,
    lattice_size,
    tag_and_propagate,
)
from ..metrics import (
    MetricKind,
    aecs_from_sizes,
    dm_from_sizes,
    metric_gweight,
    metric_prec,
)
from ..tabular import Table
from .partition import AlgoParams, Partition, build_partition

_KEY_LIMIT = 2**62


class _FastChecker:
    """Vectorised grouping of rows under any lattice node.

    Rows are coded per QID; each (QID, level) has a leaf-code -> group-code
    map, so the census of a node is one mixed-radix combine plus np.unique.
    """

    def __init__(self, table: Table,
                 hierarchies: Mapping[str, GeneralisationHierarchy]):
        self.table = table
        self.checks = 0
        self._row_codes: list[np.ndarray] = []
        self._level_maps: list[list[np.ndarray]] = []
        self._level_values: list[list[list[GeneralisedValue]]] = []
        for attr, j in zip(table.qids, table.qid_indices):
            h = hierarchies[attr.name]
            leaves: list = []
            leaf_code: dict = {}
            for row in table.rows:
                v = row[j]
                if v not in leaf_code:
                    leaf_code[v] = len(leaves)
                    leaves.append(v)
            self._row_codes.append(
                np.array([leaf_code[row[j]] for row in table.rows], dtype=np.int64)
            )
            maps, values = [], []
            for level in range(h.height + 1):
                gen_code: dict[GeneralisedValue, int] = {}
                gen_values: list[GeneralisedValue] = []
                arr = np.empty(len(leaves), dtype=np.int64)
                for code, leaf in enumerate(leaves):
                    gv = h.generalise(leaf, level)
                    if gv not in gen_code:
                        gen_code[gv] = len(gen_values)
                        gen_values.append(gv)
                    arr[code] = gen_code[gv]
                maps.append(arr)
                values.append(gen_values)
            self._level_maps.append(maps)
            self._level_values.append(values)

    def census(self, node: LatticeNode) -> tuple[np.ndarray, np.ndarray]:
        """(group sizes, row -> group index) for the node's generalisation."""
        key = np.zeros(self.table.n_rows, dtype=np.int64)
        radix = 1
        for codes, maps, level in zip(self._row_codes, self._level_maps, node):
            m = maps[level]
            n_codes = int(m.max()) + 1
            if radix * n_codes > _KEY_LIMIT:
                return self._census_tuples(node)
            key = key * n_codes + m[codes]
            radix *= n_codes
        _, inverse, counts = np.unique(key, return_inverse=True, return_counts=True)
        return counts, inverse

    def _census_tuples(self, node: LatticeNode) -> tuple[np.ndarray, np.ndarray]:
        stacked = np.stack(
            [maps[level][codes] for codes, maps, level
             in zip(self._row_codes, self._level_maps, node)],
            axis=1,
        )
        _, inverse, counts = np.unique(
            stacked, axis=0, return_inverse=True, return_counts=True
        )
        return counts, inverse.ravel()

    def is_k_anonymous(self, node: LatticeNode, k: int, max_sup: float) -> bool:
        self.checks += 1
        counts, _ = self.census(node)
        candidates = int(counts[counts < k].sum())
        return candidates <= max_sup * self.table.n_rows

    def signature_for_group(self, node: LatticeNode, group_row: int) -> tuple[GeneralisedValue, ...]:
        sig = []
        for codes, maps, values, level in zip(
            self._row_codes, self._level_maps, self._level_values, node
        ):
            sig.append(values[level][int(maps[level][codes[group_row]])])
        return tuple(sig)


@dataclass
class OlaResult:
    partition: Partition
    node: LatticeNode
    loss: float
    k_minimal: list[tuple[LatticeNode, float]]
    checked_nodes: int
    lattice_nodes: int
    store: TagStore


def _node_loss(checker: _FastChecker, node: LatticeNode, heights: Sequence[int],
               kind: MetricKind, k: int) -> float:
    n = checker.table.n_rows
    if kind is MetricKind.GWEIGHT:
        return metric_gweight(node, heights).value
    counts, _ = checker.census(node)
    suppressed = int(counts[counts < k].sum())
    if kind is MetricKind.PREC:
        return metric_prec(node, heights, n, suppressed).value
    kept = [int(c) for c in counts[counts >= k]]
    if kind is MetricKind.AECS:
        return aecs_from_sizes(kept)
    return dm_from_sizes(kept, suppressed, n)


def ola_search(table: Table, hierarchies: Mapping[str, GeneralisationHierarchy],
               params: AlgoParams) -> OlaResult:
    """Run the lattice search and return the winning node with search stats."""
    k = params.k
    n = table.n_rows
    if k > n:
        raise InfeasibilityError(f"k={k} exceeds the {n} available rows")
    heights = lattice_heights(table, hierarchies)
    store = TagStore(heights)
    checker = _FastChecker(table, hierarchies)
    bottom = tuple(0 for _ in heights)
    top = heights

    def ensure(node: LatticeNode) -> Tag:
        tag = store.tag(node)
        if tag is Tag.UNTAGGED:
            ok = checker.is_k_anonymous(node, k, params.max_sup)
            tag = Tag.KANON if ok else Tag.NOT_KANON
            tag_and_propagate(store, node, tag)
        return tag

    def solve(lo: LatticeNode, hi: LatticeNode) -> None:
        if store.tag(lo) is Tag.KANON or store.tag(hi) is Tag.NOT_KANON:
            return
        span = sum(hi) - sum(lo)
        if span == 0:
            ensure(lo)
            return
        if span == 1:
            if ensure(lo) is Tag.KANON:
                return
            ensure(hi)
            return
        mid = sum(lo) + span // 2
        for node in iter_between_at_height(lo, hi, mid):
            if ensure(node) is Tag.KANON:
                solve(lo, node)
            else:
                solve(node, hi)

    solve(bottom, top)
    candidates = k_minimal_nodes(store)
    scored = [
        (node, _node_loss(checker, node, heights, params.metric, k))
        for node in candidates
    ]
    best_node, best_loss = min(scored, key=lambda t: (t[1], sum(t[0]), t[0]))
    partition = _partition_for_node(checker, best_node, k, params)
    return OlaResult(
        partition=partition,
        node=best_node,
        loss=best_loss,
        k_minimal=scored,
        checked_nodes=checker.checks,
        lattice_nodes=lattice_size(heights),
        store=store,
    )


def _partition_for_node(checker: _FastChecker, node: LatticeNode, k: int,
                        params: AlgoParams) -> Partition:
    counts, inverse = checker.census(node)
    order = np.argsort(inverse, kind="stable")
    boundaries = np.cumsum(counts)[:-1]
    groups = np.split(order, boundaries)
    raw: list[tuple[tuple[GeneralisedValue, ...], list[int]]] = []
    suppressed: list[int] = []
    for member_rows in groups:
        ids = [int(r) for r in member_rows]
        if len(ids) < k:
            suppressed.extend(ids)
        else:
            raw.append((checker.signature_for_group(node, ids[0]), ids))
    return build_partition(
        raw, suppressed, k, "ola", node=node,
        meta={"metric": params.metric.value, "max_sup": params.max_sup},
    )


def ola_anonymise(table: Table, hierarchies: Mapping[str, GeneralisationHierarchy],
                  params: AlgoParams) -> Partition:
    """Anonymise with OLA; see `ola_search` for the node-level details."""
    return ola_search(table, hierarchies, params).partition
