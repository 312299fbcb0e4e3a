"""Mondrian: strict multidimensional partitioning with median cuts.

Numerical QIDs are cut at the (lower) median with ties going wholly to the
left side; categorical QIDs are cut by splitting the children of the
partition's hull node, keeping file order. A cut is allowable only when
both sides keep at least k rows; a partition with no allowable cut in any
dimension becomes one equivalence class whose signature is the
per-attribute hull.
"""

from __future__ import annotations

from typing import Mapping

import numpy as np

from ..errors import InfeasibilityError
from ..hierarchy import (
    CategoricalHierarchy,
    GeneralisationHierarchy,
    GeneralisedValue,
    format_number,
)
from ..tabular import Table
from .partition import AlgoParams, Partition, build_partition


class _Dim:
    def __init__(self, attr, j: int, table: Table,
                 hierarchies: Mapping[str, GeneralisationHierarchy]):
        self.attr = attr
        self.j = j
        self.numeric = attr.kind == "numerical"
        if self.numeric:
            self.col = np.array([float(row[j]) for row in table.rows])
            self.global_range = float(self.col.max() - self.col.min())
        else:
            h = hierarchies[attr.name]
            if not isinstance(h, CategoricalHierarchy):
                raise TypeError(f"{attr.name}: categorical QID needs a file hierarchy")
            self.h = h
            leaf_code = {leaf: c for c, leaf in enumerate(h.leaves)}
            self.codes = np.array(
                [leaf_code[str(row[j])] for row in table.rows], dtype=np.intp
            )
            self.leaves = h.leaves

    def width(self, idx: np.ndarray) -> float:
        if self.numeric:
            if self.global_range <= 0:
                return 0.0
            vals = self.col[idx]
            return float(vals.max() - vals.min()) / self.global_range
        distinct = len(np.unique(self.codes[idx]))
        if distinct <= 1:
            return 0.0
        return distinct / self.h.leaf_count

    def cut(self, idx: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray] | None:
        if self.numeric:
            vals = self.col[idx]
            split = np.sort(vals)[(len(vals) - 1) // 2]
            left = vals <= split
            if left.sum() >= k and (~left).sum() >= k:
                return idx[left], idx[~left]
            return None
        present = [self.leaves[c] for c in np.unique(self.codes[idx])]
        level, label = self.h.lca(present)
        if level == 0:
            return None
        children = self.h.children_of(label, level)
        child_pos = {c: p for p, c in enumerate(children)}
        # position of each row's ancestor among the hull's children
        pos_by_code = {}
        positions = np.empty(len(idx), dtype=np.intp)
        for i, code in enumerate(self.codes[idx]):
            if code not in pos_by_code:
                pos_by_code[code] = child_pos[self.h.chain(self.leaves[code])[level - 1]]
            positions[i] = pos_by_code[code]
        counts = np.bincount(positions, minlength=len(children))
        n = len(idx)
        best = None
        running = 0
        for s in range(1, len(children)):
            running += int(counts[s - 1])
            left_n = running
            if left_n >= k and n - left_n >= k:
                imbalance = abs(n - 2 * left_n)
                if best is None or imbalance < best[0]:
                    best = (imbalance, s)
        if best is None:
            return None
        left = positions < best[1]
        return idx[left], idx[~left]

    def hull_value(self, idx: np.ndarray) -> GeneralisedValue:
        if self.numeric:
            vals = self.col[idx]
            lo, hi = float(vals.min()), float(vals.max())
            if lo == hi:
                return GeneralisedValue(format_number(lo), (lo, lo))
            return GeneralisedValue(f"[{format_number(lo)}-{format_number(hi)}]", (lo, hi))
        present = [self.leaves[c] for c in np.unique(self.codes[idx])]
        _, label = self.h.lca(present)
        return GeneralisedValue(label)


def mondrian_anonymise(table: Table,
                       hierarchies: Mapping[str, GeneralisationHierarchy],
                       params: AlgoParams) -> Partition:
    """Anonymise by strict top-down Mondrian partitioning (no suppression)."""
    k = params.k
    n = table.n_rows
    if k > n:
        raise InfeasibilityError(f"k={k} exceeds the {n} available rows")
    dims = [
        _Dim(attr, j, table, hierarchies)
        for attr, j in zip(table.qids, table.qid_indices)
    ]
    stack: list[np.ndarray] = [np.arange(n, dtype=np.intp)]
    final: list[np.ndarray] = []
    while stack:
        idx = stack.pop()
        cut = None
        if len(idx) >= 2 * k:
            widths = [(d.width(idx), pos) for pos, d in enumerate(dims)]
            for w, pos in sorted(widths, key=lambda t: (-t[0], t[1])):
                if w <= 0:
                    break
                cut = dims[pos].cut(idx, k)
                if cut is not None:
                    break
        if cut is None:
            final.append(idx)
        else:
            stack.append(cut[1])
            stack.append(cut[0])
    raw = [
        (tuple(d.hull_value(idx) for d in dims), [int(i) for i in idx])
        for idx in final
    ]
    return build_partition(raw, [], k, "mondrian")
