"""Top-down greedy anonymisation: NCP-guided bisection plus repair.

Each bisection seeds two tuples by iterated farthest-point search (capped
rounds), assigns every other record to the nearer seed under pairwise-hull
NCP, and recurses while a half could still split into two k-sized parts.
Undersized classes are then repaired: either steal the cheapest
(k - |G|)-subset from a donor of size >= 2k - |G|, or merge into the
nearest class, whichever increases the size-weighted NCP total less.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from ..errors import InfeasibilityError
from ..hierarchy import GeneralisationHierarchy
from ..tabular import Table
from ._space import Hull, NcpSpace
from .partition import AlgoParams, Partition, build_partition

FARTHEST_ROUNDS_CAP = 6


@dataclass
class _ClassState:
    ids: np.ndarray
    hull: Hull
    ncp: float


def _farthest_seeds(space: NcpSpace, ids: np.ndarray,
                    rng: np.random.Generator) -> tuple[int, int, float]:
    """Iterate farthest-point search from a random start, up to the cap."""
    pos = int(rng.integers(len(ids)))
    u = int(ids[pos])
    d = space.dist_from(u, ids)
    d[pos] = -1.0  # never pair a record with itself
    far = int(np.argmax(d))
    v, best_d = int(ids[far]), float(d[far])
    best = (u, v)
    cur = v
    for _ in range(FARTHEST_ROUNDS_CAP - 1):
        d = space.dist_from(cur, ids)
        d[np.searchsorted(ids, cur)] = -1.0
        far = int(np.argmax(d))
        w, dw = int(ids[far]), float(d[far])
        if dw <= best_d:
            break
        best, best_d = (cur, w), dw
        cur = w
    return best[0], best[1], best_d


def tdg_anonymise(table: Table,
                  hierarchies: Mapping[str, GeneralisationHierarchy],
                  params: AlgoParams) -> Partition:
    """Anonymise with top-down greedy bisection (no suppression)."""
    k = params.k
    n = table.n_rows
    if k > n:
        raise InfeasibilityError(f"k={k} exceeds the {n} available rows")
    space = NcpSpace(table, hierarchies)
    rng = np.random.default_rng(params.seed)
    finals: list[np.ndarray] = []
    # explicit LIFO stack: left half processed first, like the recursion
    stack: list[np.ndarray] = [np.arange(n, dtype=np.intp)]
    while stack:
        ids = stack.pop()
        if len(ids) < 2 * k:
            finals.append(ids)
            continue
        a, b, best_d = _farthest_seeds(space, ids, rng)
        if best_d <= 0.0:
            finals.append(ids)  # NCP-indistinguishable records
            continue
        a, b = sorted((a, b))
        d_a = space.dist_from(a, ids)
        d_b = space.dist_from(b, ids)
        left = d_a <= d_b  # ties go with the lower-id seed
        left[np.searchsorted(ids, a)] = True
        left[np.searchsorted(ids, b)] = False
        stack.append(ids[~left])
        stack.append(ids[left])

    classes = []
    for ids in finals:
        hull = space.hull_of_ids(ids)
        classes.append(_ClassState(np.sort(ids), hull, space.ncp_of_hull(hull)))
    _repair_undersized(space, classes, k)

    raw = [(space.signature_of_hull(c.hull), [int(i) for i in c.ids])
           for c in classes]
    return build_partition(
        raw, [], k, "tdg",
        meta={"seed": params.seed, "farthest_rounds_cap": FARTHEST_ROUNDS_CAP},
    )


def _repair_undersized(space: NcpSpace, classes: list[_ClassState], k: int) -> None:
    """Grow or merge classes below k until every class has >= k members."""
    while True:
        small = [
            (len(c.ids), int(c.ids[0]), gi)
            for gi, c in enumerate(classes) if len(c.ids) < k
        ]
        if not small:
            return
        gi = min(small)[2]
        g = classes[gi]
        need = k - len(g.ids)
        best_steal = None  # (delta, donor index, donor subset)
        for hi_idx, h in enumerate(classes):
            if hi_idx == gi or len(h.ids) < 2 * k - len(g.ids):
                continue
            scores = space.union_ncp(g.hull, h.ids)
            order = np.lexsort((h.ids, scores))
            subset = h.ids[order[:need]]
            new_g_ids = np.sort(np.concatenate([g.ids, subset]))
            rest = np.setdiff1d(h.ids, subset, assume_unique=True)
            new_g_hull = space.hull_of_ids(new_g_ids)
            rest_hull = space.hull_of_ids(rest)
            delta = (
                space.ncp_of_hull(new_g_hull) * len(new_g_ids)
                + space.ncp_of_hull(rest_hull) * len(rest)
                - g.ncp * len(g.ids)
                - h.ncp * len(h.ids)
            )
            if best_steal is None or delta < best_steal[0]:
                best_steal = (delta, hi_idx, subset, new_g_ids, new_g_hull, rest, rest_hull)
        best_merge = None  # (delta, other index)
        for hi_idx, h in enumerate(classes):
            if hi_idx == gi:
                continue
            merged_hull = space.merge_hulls(g.hull, h.hull)
            merged_ncp = space.ncp_of_hull(merged_hull)
            delta = (
                merged_ncp * (len(g.ids) + len(h.ids))
                - g.ncp * len(g.ids)
                - h.ncp * len(h.ids)
            )
            if best_merge is None or delta < best_merge[0]:
                best_merge = (delta, hi_idx, merged_hull, merged_ncp)
        if best_steal is not None and (best_merge is None
                                       or best_steal[0] <= best_merge[0]):
            _, hi_idx, _, new_g_ids, new_g_hull, rest, rest_hull = best_steal
            classes[gi] = _ClassState(new_g_ids, new_g_hull,
                                      space.ncp_of_hull(new_g_hull))
            classes[hi_idx] = _ClassState(rest, rest_hull,
                                          space.ncp_of_hull(rest_hull))
        else:
            _, hi_idx, merged_hull, merged_ncp = best_merge
            other = classes[hi_idx]
            merged_ids = np.sort(np.concatenate([g.ids, other.ids]))
            keep = min(gi, hi_idx)
            drop = max(gi, hi_idx)
            classes[keep] = _ClassState(merged_ids, merged_hull, merged_ncp)
            del classes[drop]
