"""Shared anonymisation output model and the k-anonymity verifier."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from ..errors import ContractError, SchemaError
from ..hierarchy import GeneralisationHierarchy, GeneralisedValue, ROOT_LABEL
from ..metrics import MetricKind
from ..tabular import Table

log = logging.getLogger(__name__)

ALGORITHMS = ("ola", "mondrian", "tdg", "cb")


@dataclass(frozen=True)
class EquivalenceClass:
    signature: tuple[GeneralisedValue, ...]
    member_ids: tuple[int, ...]


@dataclass(frozen=True)
class Partition:
    classes: tuple[EquivalenceClass, ...]
    suppressed_ids: tuple[int, ...]
    k: int
    algorithm: str
    node: tuple[int, ...] | None = None
    meta: dict = field(default_factory=dict)

    @property
    def num_classes(self) -> int:
        return len(self.classes)

    @property
    def suppressed_count(self) -> int:
        return len(self.suppressed_ids)


@dataclass(frozen=True)
class AlgoParams:
    """Parameters shared by the four algorithms.

    max_sup and metric apply to OLA only; seed to TDG and CB only.
    """

    k: int
    max_sup: float = 0.0
    metric: MetricKind = MetricKind.GWEIGHT
    seed: int = 0

    def __post_init__(self):
        if self.k < 1:
            raise SchemaError(f"k must be >= 1, got {self.k}")
        if not 0.0 <= self.max_sup < 1.0:
            raise SchemaError(f"max_sup must lie in [0, 1), got {self.max_sup}")
        if not isinstance(self.metric, MetricKind):
            object.__setattr__(self, "metric", MetricKind(self.metric))


def build_partition(raw_classes: Sequence[tuple[tuple[GeneralisedValue, ...], Sequence[int]]],
                    suppressed_ids: Sequence[int], k: int, algorithm: str,
                    node: tuple[int, ...] | None = None,
                    meta: dict | None = None) -> Partition:
    """Canonicalise algorithm output into a Partition.

    Classes sharing one signature are merged (they are by definition the
    same equivalence class); members are sorted and classes ordered by
    their smallest member id.
    """
    by_sig: dict[tuple[GeneralisedValue, ...], list[int]] = {}
    for sig, ids in raw_classes:
        by_sig.setdefault(tuple(sig), []).extend(int(i) for i in ids)
    classes = [
        EquivalenceClass(sig, tuple(sorted(ids))) for sig, ids in by_sig.items()
    ]
    classes.sort(key=lambda ec: ec.member_ids[0])
    return Partition(
        classes=tuple(classes),
        suppressed_ids=tuple(sorted(int(i) for i in suppressed_ids)),
        k=k,
        algorithm=algorithm,
        node=node,
        meta=meta or {},
    )


def partition_violation(partition: Partition, table: Table, k: int,
                        hierarchies: Mapping[str, GeneralisationHierarchy] | None = None,
                        ) -> str | None:
    """First violated k-anonymity clause, or None if the partition is valid.

    Checks class sizes, exact disjoint coverage of all row ids, and that
    every member's original QID values generalise to the class signature.
    Categorical ancestry needs the hierarchies; without them only leaf
    equality and the root are checkable and other labels are trusted.
    """
    seen: set[int] = set()
    for ci, ec in enumerate(partition.classes):
        if len(ec.member_ids) < k:
            return f"class {ci} has {len(ec.member_ids)} members, required {k}"
        for rid in ec.member_ids:
            if rid in seen:
                return f"row id {rid} appears in more than one class"
            seen.add(rid)
    for rid in partition.suppressed_ids:
        if rid in seen:
            return f"row id {rid} is both suppressed and in a class"
        seen.add(rid)
    if seen != set(range(table.n_rows)):
        missing = sorted(set(range(table.n_rows)) - seen)
        extra = sorted(seen - set(range(table.n_rows)))
        return f"coverage mismatch (missing {missing[:5]}, unknown {extra[:5]})"
    qid_idx = table.qid_indices
    qids = table.qids
    for ci, ec in enumerate(partition.classes):
        if len(ec.signature) != len(qid_idx):
            return f"class {ci} signature covers {len(ec.signature)} of {len(qid_idx)} QIDs"
        for rid in ec.member_ids:
            row = table.rows[rid]
            for sig, attr, j in zip(ec.signature, qids, qid_idx):
                if not _covers(sig, row[j], attr.kind,
                               hierarchies.get(attr.name) if hierarchies else None):
                    return (
                        f"class {ci}: member {rid} value {row[j]!r} does not "
                        f"generalise to {sig.label!r} on {attr.name}"
                    )
    return None


def _covers(sig: GeneralisedValue, value, kind: str,
            hierarchy: GeneralisationHierarchy | None) -> bool:
    if hierarchy is not None:
        return hierarchy.covers(sig, value)
    if kind == "numerical":
        if sig.interval is None:
            return sig.label == ROOT_LABEL
        lo, hi = sig.interval
        return lo <= float(value) <= hi
    # categorical without hierarchy: only leaf equality and root are decidable
    return sig.label == ROOT_LABEL or sig.label == str(value)


def verify_k_anonymity(partition: Partition, table: Table, k: int,
                       hierarchies: Mapping[str, GeneralisationHierarchy] | None = None,
                       ) -> bool:
    """True iff the partition is a valid k-anonymisation of the table."""
    violation = partition_violation(partition, table, k, hierarchies)
    if violation is not None:
        log.warning("k-anonymity verification failed: %s", violation)
        return False
    return True


def generalised_table_from_partition(partition: Partition, table: Table,
                                     hierarchies: Mapping[str, GeneralisationHierarchy] | None = None,
                                     ) -> Table:
    """Render the partition: QID cells become signatures, suppressed rows '*'.

    Non-QID attributes and the target are left untouched.
    """
    violation = partition_violation(partition, table, partition.k, hierarchies)
    if violation is not None:
        raise ContractError(f"refusing to render an invalid partition: {violation}")
    qid_idx = table.qid_indices
    qids = table.qids
    star: list[GeneralisedValue] = []
    for attr in qids:
        if attr.kind == "numerical":
            star.append(GeneralisedValue(ROOT_LABEL, table.numeric_domain(attr.name)))
        else:
            star.append(GeneralisedValue(ROOT_LABEL))
    cell_by_row: dict[int, Sequence[GeneralisedValue]] = {}
    for ec in partition.classes:
        for rid in ec.member_ids:
            cell_by_row[rid] = ec.signature
    for rid in partition.suppressed_ids:
        cell_by_row[rid] = star
    rows = []
    for rid, row in enumerate(table.rows):
        cells = list(row)
        for sig, j in zip(cell_by_row[rid], qid_idx):
            cells[j] = sig
        rows.append(tuple(cells))
    return table.with_rows(rows)
