"""Vectorised NCP geometry over a table, shared by TDG and CB.

Numerical QIDs live as raw value hulls; categorical QIDs as nodes of
their hierarchy with a precomputed pairwise-LCA table, so distances from
one record (or class hull) to many records reduce to numpy lookups.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from ..hierarchy import (
    CategoricalHierarchy,
    GeneralisationHierarchy,
    GeneralisedValue,
    format_number,
)
from ..tabular import Table


@dataclass
class Hull:
    """Per-class generalisation state: numeric bounds + categorical nodes."""

    lo: np.ndarray
    hi: np.ndarray
    cat_nodes: np.ndarray  # node ids, one per categorical QID


class _CatAttr:
    def __init__(self, name: str, hierarchy: CategoricalHierarchy,
                 column: Sequence[str]):
        self.name = name
        h = hierarchy
        leaves = h.leaves
        leaf_code = {leaf: i for i, leaf in enumerate(leaves)}
        # node ids in first-seen (file) order, level by level along chains
        node_id: dict[tuple[int, str], int] = {}
        for leaf in leaves:
            chain = h.chain(leaf)
            for level, label in enumerate(chain):
                node_id.setdefault((level, label), len(node_id))
        n_nodes = len(node_id)
        self.node_labels = [""] * n_nodes
        node_chain_rep = [""] * n_nodes
        node_level = [0] * n_nodes
        for (level, label), nid in node_id.items():
            self.node_labels[nid] = label
            node_level[nid] = level
        for leaf in leaves:
            chain = h.chain(leaf)
            for level, label in enumerate(chain):
                nid = node_id[(level, label)]
                if not node_chain_rep[nid]:
                    node_chain_rep[nid] = leaf
        self.leaf_node = np.array(
            [node_id[(0, leaf)] for leaf in leaves], dtype=np.intp
        )
        ncp = np.zeros(n_nodes)
        for (level, label), nid in node_id.items():
            count = h.subtree_leaf_count(label, level)
            ncp[nid] = 0.0 if count == 1 else count / h.leaf_count
        self.node_ncp = ncp
        lca = np.zeros((n_nodes, n_nodes), dtype=np.intp)
        for (la, lab_a), ida in node_id.items():
            chain_a = h.chain(node_chain_rep[ida])
            for (lb, lab_b), idb in node_id.items():
                if idb < ida:
                    continue
                chain_b = h.chain(node_chain_rep[idb])
                start = max(la, lb)
                for level in range(start, h.height + 1):
                    if chain_a[level] == chain_b[level]:
                        lca[ida, idb] = lca[idb, ida] = node_id[(level, chain_a[level])]
                        break
        self.lca = lca
        self.row_nodes = np.array(
            [self.leaf_node[leaf_code[str(v)]] for v in column], dtype=np.intp
        )


class NcpSpace:
    """NCP distances and hull bookkeeping for one table."""

    def __init__(self, table: Table,
                 hierarchies: Mapping[str, GeneralisationHierarchy],
                 weights: Mapping[str, float] | None = None):
        self.table = table
        self.qids = table.qids
        weights = weights or {}
        self._num: list[tuple[int, str, np.ndarray, float, float]] = []
        self._cat: list[tuple[int, _CatAttr, float]] = []
        self._order: list[tuple[str, int]] = []  # signature layout: kind + slot
        for attr, j in zip(table.qids, table.qid_indices):
            w = float(weights.get(attr.name, 1.0))
            if attr.kind == "numerical":
                col = np.array([float(row[j]) for row in table.rows])
                rng = float(col.max() - col.min())
                inv = 0.0 if rng <= 0 else 1.0 / rng
                self._order.append(("num", len(self._num)))
                self._num.append((j, attr.name, col, inv, w))
            else:
                h = hierarchies[attr.name]
                if not isinstance(h, CategoricalHierarchy):
                    raise TypeError(
                        f"{attr.name}: categorical QID needs a file hierarchy"
                    )
                cat = _CatAttr(attr.name, h, [str(row[j]) for row in table.rows])
                self._order.append(("cat", len(self._cat)))
                self._cat.append((j, cat, w))

    def dist_from(self, rid: int, ids: np.ndarray) -> np.ndarray:
        """NCP of the pairwise hull of record `rid` with each record in ids."""
        out = np.zeros(len(ids), dtype=float)
        for _, _, col, inv, w in self._num:
            out += w * inv * np.abs(col[ids] - col[rid])
        for _, cat, w in self._cat:
            out += w * cat.node_ncp[cat.lca[cat.row_nodes[rid], cat.row_nodes[ids]]]
        return out

    def hull_of_ids(self, ids: np.ndarray) -> Hull:
        lo = np.array([col[ids].min() for _, _, col, _, _ in self._num])
        hi = np.array([col[ids].max() for _, _, col, _, _ in self._num])
        nodes = np.zeros(len(self._cat), dtype=np.intp)
        for a, (_, cat, _) in enumerate(self._cat):
            uniq = np.unique(cat.row_nodes[ids])
            node = int(uniq[0])
            for other in uniq[1:]:
                node = int(cat.lca[node, other])
            nodes[a] = node
        return Hull(lo, hi, nodes)

    def merge_hulls(self, a: Hull, b: Hull) -> Hull:
        nodes = np.array(
            [int(cat.lca[na, nb])
             for (_, cat, _), na, nb in zip(self._cat, a.cat_nodes, b.cat_nodes)],
            dtype=np.intp,
        )
        return Hull(np.minimum(a.lo, b.lo), np.maximum(a.hi, b.hi), nodes)

    def ncp_of_hull(self, hull: Hull) -> float:
        total = 0.0
        for a, (_, _, _, inv, w) in enumerate(self._num):
            total += w * inv * (hull.hi[a] - hull.lo[a])
        for a, (_, cat, w) in enumerate(self._cat):
            total += w * cat.node_ncp[hull.cat_nodes[a]]
        return float(total)

    def union_ncp(self, hull: Hull, ids: np.ndarray) -> np.ndarray:
        """NCP of hull extended by each record in ids, as a vector."""
        out = np.zeros(len(ids), dtype=float)
        for a, (_, _, col, inv, w) in enumerate(self._num):
            vals = col[ids]
            out += w * inv * (np.maximum(hull.hi[a], vals) - np.minimum(hull.lo[a], vals))
        for a, (_, cat, w) in enumerate(self._cat):
            out += w * cat.node_ncp[cat.lca[hull.cat_nodes[a], cat.row_nodes[ids]]]
        return out

    def signature_of_hull(self, hull: Hull) -> tuple[GeneralisedValue, ...]:
        sig: list[GeneralisedValue] = []
        for kind, slot in self._order:
            if kind == "num":
                lo, hi = float(hull.lo[slot]), float(hull.hi[slot])
                if lo == hi:
                    sig.append(GeneralisedValue(format_number(lo), (lo, lo)))
                else:
                    label = f"[{format_number(lo)}-{format_number(hi)}]"
                    sig.append(GeneralisedValue(label, (lo, hi)))
            else:
                _, cat, _ = self._cat[slot]
                sig.append(GeneralisedValue(cat.node_labels[hull.cat_nodes[slot]]))
        return tuple(sig)
