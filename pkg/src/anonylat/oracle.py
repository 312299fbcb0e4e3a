"""Brute-force reference implementations used to validate the main paths.

Everything here recomputes results from first principles with its own
loops: grouping by pairwise signature comparison, exhaustive lattice
enumeration, and naive metric arithmetic. Performance is irrelevant;
inputs are guarded to test scale where needed.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import GuardError, InfeasibilityError
from .hierarchy import GeneralisationHierarchy, GeneralisedValue, ROOT_LABEL
from .tabular import Table

EXHAUSTIVE_LATTICE_LIMIT = 10_000


@dataclass(frozen=True)
class GroupCensus:
    groups: tuple[tuple[tuple, int], ...]  # (signature, count), first-seen order
    min_group_size: int

    def as_dict(self) -> dict[tuple, int]:
        return dict(self.groups)

    @property
    def num_groups(self) -> int:
        return len(self.groups)


def brute_force_census(table: Table) -> GroupCensus:
    """Group rows by QID signature using a quadratic equality scan."""
    signatures = [tuple(row[j] for j in table.qid_indices) for row in table.rows]
    groups: list[list] = []  # [signature, count]
    for sig in signatures:
        for entry in groups:
            if entry[0] == sig:
                entry[1] += 1
                break
        else:
            groups.append([sig, 1])
    return GroupCensus(
        tuple((sig, count) for sig, count in groups),
        min(count for _, count in groups),
    )


def _generalised_signatures(table: Table,
                            hierarchies: Mapping[str, GeneralisationHierarchy],
                            node: Sequence[int]) -> list[tuple]:
    out = []
    for row in table.rows:
        sig = []
        for attr, j, level in zip(table.qids, table.qid_indices, node):
            sig.append(hierarchies[attr.name].generalise(row[j], level))
        out.append(tuple(sig))
    return out


def exhaustive_ola(table: Table,
                   hierarchies: Mapping[str, GeneralisationHierarchy],
                   params) -> tuple[tuple[int, ...], float]:
    """Evaluate every lattice node; return the best (node, loss).

    Uses the same tie-break as the main algorithm (loss, level sum,
    lexicographic). Guarded to lattices of at most 10,000 nodes.
    """
    heights = [hierarchies[a.name].height for a in table.qids]
    size = 1
    for h in heights:
        size *= h + 1
    if size > EXHAUSTIVE_LATTICE_LIMIT:
        raise GuardError(f"lattice has {size} nodes, oracle limit is "
                         f"{EXHAUSTIVE_LATTICE_LIMIT}")
    n = table.n_rows
    k = params.k
    if k > n:
        raise InfeasibilityError(f"k={k} exceeds the {n} available rows")
    best = None
    for node in itertools.product(*(range(h + 1) for h in heights)):
        signatures = _generalised_signatures(table, hierarchies, node)
        sizes: dict[tuple, int] = {}
        for sig in signatures:
            sizes[sig] = sizes.get(sig, 0) + 1
        suppressed = sum(c for c in sizes.values() if c < k)
        if suppressed > params.max_sup * n:
            continue
        kept = [c for c in sizes.values() if c >= k]
        loss = naive_metric(
            params.metric, node=node, heights=heights, n_rows=n,
            suppressed_count=suppressed, class_sizes=kept,
        )
        key = (loss, sum(node), node)
        if best is None or key < best:
            best = key
    if best is None:
        raise InfeasibilityError("no k-anonymous node in the lattice")
    loss, _, node = best
    return node, loss


def exhaustive_ola_grid(table: Table,
                        hierarchies: Mapping[str, GeneralisationHierarchy],
                        metrics: Sequence, max_sups: Sequence[float],
                        ks: Sequence[int],
                        ) -> dict[tuple, tuple[tuple[int, ...], float]]:
    """`exhaustive_ola` over a parameter grid, one census pass per node.

    Returns {(metric, max_sup, k): (best node, best loss)}; same guard and
    tie-break as the single-parameter form.
    """
    heights = [hierarchies[a.name].height for a in table.qids]
    size = 1
    for h in heights:
        size *= h + 1
    if size > EXHAUSTIVE_LATTICE_LIMIT:
        raise GuardError(f"lattice has {size} nodes, oracle limit is "
                         f"{EXHAUSTIVE_LATTICE_LIMIT}")
    n = table.n_rows
    combos = [(m, s, k) for m in metrics for s in max_sups for k in ks if k <= n]
    best: dict[tuple, tuple] = {}
    for node in itertools.product(*(range(h + 1) for h in heights)):
        signatures = _generalised_signatures(table, hierarchies, node)
        sizes: dict[tuple, int] = {}
        for sig in signatures:
            sizes[sig] = sizes.get(sig, 0) + 1
        for combo in combos:
            metric, max_sup, k = combo
            suppressed = sum(c for c in sizes.values() if c < k)
            if suppressed > max_sup * n:
                continue
            kept = [c for c in sizes.values() if c >= k]
            loss = naive_metric(metric, node=node, heights=heights, n_rows=n,
                                suppressed_count=suppressed, class_sizes=kept)
            key = (loss, sum(node), node)
            if combo not in best or key < best[combo]:
                best[combo] = key
    return {
        combo: (node, loss) for combo, (loss, _, node) in best.items()
    }


def naive_metric(kind, *, node: Sequence[int] | None = None,
                 heights: Sequence[int] | None = None,
                 n_rows: int | None = None, suppressed_count: int = 0,
                 class_sizes: Sequence[int] | None = None) -> float:
    """Recompute a loss metric with plain rational arithmetic."""
    kind = getattr(kind, "value", kind)
    if kind == "prec":
        total = Fraction(0)
        qid_count = 0
        for level, height in zip(node, heights):
            if height > 0:
                qid_count += 1
                total += Fraction((n_rows - suppressed_count) * level, height)
        if qid_count == 0:
            return 0.0
        total += suppressed_count * qid_count
        return float(total / Fraction(n_rows * qid_count))
    if kind == "gweight":
        total = Fraction(0)
        for level, height in zip(node, heights):
            if height > 0:
                total += Fraction(level, height)
        return float(total)
    if kind == "aecs":
        return float(Fraction(sum(class_sizes), len(class_sizes)))
    if kind == "dm":
        total = 0
        for size in class_sizes:
            total += size * size
        return float(total + suppressed_count * n_rows)
    raise ValueError(f"unknown metric kind {kind!r}")


def naive_ncp(signature: Sequence[GeneralisedValue], qids,
              hierarchies: Mapping[str, GeneralisationHierarchy],
              domains: Mapping[str, tuple[float, float]],
              weights: Sequence[float] | None = None) -> float:
    """Recompute the NCP of a signature directly from chains and intervals."""
    if weights is None:
        weights = [1.0] * len(qids)
    total = Fraction(0)
    for value, attr, w in zip(signature, qids, weights):
        if attr.kind == "numerical":
            lo_d, hi_d = domains[attr.name]
            if hi_d - lo_d <= 0:
                continue
            lo, hi = value.interval
            total += Fraction(w) * (
                (Fraction(hi) - Fraction(lo))
                / (Fraction(hi_d) - Fraction(lo_d))
            )
        else:
            h = hierarchies[attr.name]
            if value.label == ROOT_LABEL:
                covered = h.leaf_count
            else:
                covered = 0
                for leaf in h.leaves:
                    if value.label in h.chain(leaf):
                        covered += 1
            if covered > 1:
                total += Fraction(w) * Fraction(covered, h.leaf_count)
    return float(total)
