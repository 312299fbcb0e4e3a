"""Clustering-based anonymisation: greedy k-member classes around random picks.

Each round picks a random remaining record, gathers its k-1 NCP-nearest
remaining records into one equivalence class and removes them. Records
left over at the end (fewer than k) are absorbed by whichever class grows
its size-weighted NCP least.
"""

from __future__ import annotations

from typing import Mapping

import numpy as np

from ..errors import InfeasibilityError
from ..hierarchy import GeneralisationHierarchy
from ..tabular import Table
from ._space import NcpSpace
from .partition import AlgoParams, Partition, build_partition


def cb_anonymise(table: Table,
                 hierarchies: Mapping[str, GeneralisationHierarchy],
                 params: AlgoParams) -> Partition:
    """Anonymise with k-NN clustering (no suppression)."""
    k = params.k
    n = table.n_rows
    if k > n:
        raise InfeasibilityError(f"k={k} exceeds the {n} available rows")
    space = NcpSpace(table, hierarchies)
    rng = np.random.default_rng(params.seed)
    remaining = np.arange(n, dtype=np.intp)
    clusters: list[np.ndarray] = []
    while len(remaining) >= k:
        pos = int(rng.integers(len(remaining)))
        rid = int(remaining[pos])
        d = space.dist_from(rid, remaining)
        d[pos] = np.inf  # the pick itself is not its own neighbour
        order = np.lexsort((remaining, d))  # distance, then row id
        chosen = order[: k - 1]
        members = np.sort(np.concatenate([[rid], remaining[chosen]]))
        clusters.append(members)
        remaining = np.delete(remaining, np.concatenate([[pos], chosen]))
    hulls = [space.hull_of_ids(ids) for ids in clusters]
    ncps = [space.ncp_of_hull(h) for h in hulls]
    for rid in remaining:
        best = None  # (delta, cluster index)
        for ci, (ids, hull) in enumerate(zip(clusters, hulls)):
            grown = space.union_ncp(hull, np.array([rid], dtype=np.intp))[0]
            delta = grown * (len(ids) + 1) - ncps[ci] * len(ids)
            if best is None or delta < best[0]:
                best = (delta, ci)
        ci = best[1]
        clusters[ci] = np.sort(np.append(clusters[ci], rid))
        hulls[ci] = space.merge_hulls(hulls[ci], space.hull_of_ids(
            np.array([rid], dtype=np.intp)))
        ncps[ci] = space.ncp_of_hull(hulls[ci])
    raw = [
        (space.signature_of_hull(hull), [int(i) for i in ids])
        for ids, hull in zip(clusters, hulls)
    ]
    return build_partition(raw, [], k, "cb", meta={"seed": params.seed})
