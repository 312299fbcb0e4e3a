"""Information-loss metrics: OLA node metrics and the NCP distance.

All metrics are oriented so that lower is better. prec and gweight are
functions of a lattice node; aecs and dm are functions of a partition;
NCP scores generalised signatures and drives TDG/CB.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import DegeneratePartitionError
from .hierarchy import GeneralisationHierarchy, GeneralisedValue, ROOT_LABEL
from .tabular import AttributeSchema


class MetricKind(str, enum.Enum):
    PREC = "prec"
    GWEIGHT = "gweight"
    AECS = "aecs"
    DM = "dm"


NODE_METRICS = (MetricKind.PREC, MetricKind.GWEIGHT)
PARTITION_METRICS = (MetricKind.AECS, MetricKind.DM)


@dataclass(frozen=True)
class LossValue:
    value: float
    kind: MetricKind


def metric_prec(node: Sequence[int], heights: Sequence[int], n_rows: int,
                suppressed_count: int = 0) -> LossValue:
    """Precision-style loss: mean per-cell generalisation depth.

    Suppressed rows count as fully generalised; QIDs with height 0 cannot
    be generalised at all and are excluded. Computed in exact rational
    arithmetic, rounded once.
    """
    active = [(l, h) for l, h in zip(node, heights) if h > 0]
    m = len(active)
    if m == 0:
        return LossValue(0.0, MetricKind.PREC)
    kept = n_rows - suppressed_count
    total = sum((Fraction(kept * l, h) for l, h in active), Fraction(0))
    total += suppressed_count * m
    return LossValue(float(total / (n_rows * m)), MetricKind.PREC)


def metric_gweight(node: Sequence[int], heights: Sequence[int],
                   weights: Sequence[float] | None = None) -> LossValue:
    """Weighted sum of normalised generalisation levels."""
    if weights is None:
        weights = [1.0] * len(node)
    total = sum(
        (Fraction(w) * Fraction(l, h)
         for l, h, w in zip(node, heights, weights) if h > 0),
        Fraction(0),
    )
    return LossValue(float(total), MetricKind.GWEIGHT)


def aecs_from_sizes(class_sizes: Sequence[int]) -> float:
    if not class_sizes:
        raise DegeneratePartitionError("partition has no equivalence classes")
    return float(Fraction(sum(class_sizes), len(class_sizes)))


def dm_from_sizes(class_sizes: Sequence[int], suppressed_count: int,
                  n_rows: int) -> float:
    return float(sum(s * s for s in class_sizes) + suppressed_count * n_rows)


def metric_aecs(partition) -> LossValue:
    """Average equivalence-class size over non-suppressed records."""
    sizes = [len(ec.member_ids) for ec in partition.classes]
    return LossValue(aecs_from_sizes(sizes), MetricKind.AECS)


def metric_dm(partition, n_rows: int) -> LossValue:
    """Discernibility: sum of squared class sizes plus N per suppressed row."""
    sizes = [len(ec.member_ids) for ec in partition.classes]
    return LossValue(
        dm_from_sizes(sizes, len(partition.suppressed_ids), n_rows),
        MetricKind.DM,
    )


def _ncp_component(value: GeneralisedValue, attr: AttributeSchema,
                   hierarchies: Mapping[str, GeneralisationHierarchy],
                   domains: Mapping[str, tuple[float, float]]) -> Fraction:
    if attr.kind == "numerical":
        lo_d, hi_d = domains[attr.name]
        if hi_d - lo_d <= 0:
            return Fraction(0)  # constant attribute carries no uncertainty
        if value.interval is None:
            if value.label == ROOT_LABEL:
                return Fraction(1)
            raise ValueError(
                f"{attr.name}: numerical signature value lacks an interval"
            )
        lo, hi = value.interval
        return (Fraction(hi) - Fraction(lo)) / (Fraction(hi_d) - Fraction(lo_d))
    h = hierarchies[attr.name]
    count = h.subtree_leaf_count(value.label)
    if count == 1:
        return Fraction(0)
    return Fraction(count, h.leaf_count)


def ncp_component(value: GeneralisedValue, attr: AttributeSchema,
                  hierarchies: Mapping[str, GeneralisationHierarchy],
                  domains: Mapping[str, tuple[float, float]]) -> float:
    """Per-attribute normalised certainty penalty of one generalised value."""
    return float(_ncp_component(value, attr, hierarchies, domains))


def ncp_class(signature: Sequence[GeneralisedValue],
              qids: Sequence[AttributeSchema],
              hierarchies: Mapping[str, GeneralisationHierarchy],
              domains: Mapping[str, tuple[float, float]],
              weights: Sequence[float] | None = None) -> float:
    """NCP of one equivalence-class signature: weighted per-attribute sum."""
    if weights is None:
        weights = [1.0] * len(qids)
    total = sum(
        (Fraction(w) * _ncp_component(v, a, hierarchies, domains)
         for v, a, w in zip(signature, qids, weights)),
        Fraction(0),
    )
    return float(total)


def least_common_generalisation(
        sig_a: Sequence[GeneralisedValue], sig_b: Sequence[GeneralisedValue],
        qids: Sequence[AttributeSchema],
        hierarchies: Mapping[str, GeneralisationHierarchy],
) -> tuple[GeneralisedValue, ...]:
    """Per-attribute hull: interval hull for numerical, LCA for categorical."""
    merged = []
    for va, vb, attr in zip(sig_a, sig_b, qids):
        if attr.kind == "numerical":
            if va.interval is None or vb.interval is None:
                raise ValueError(f"{attr.name}: cannot hull values without intervals")
            lo = min(va.interval[0], vb.interval[0])
            hi = max(va.interval[1], vb.interval[1])
            if va.interval == (lo, hi):
                merged.append(va)
            elif vb.interval == (lo, hi):
                merged.append(vb)
            else:
                from .hierarchy import format_number
                merged.append(
                    GeneralisedValue(
                        f"[{format_number(lo)}-{format_number(hi)}]", (lo, hi)
                    )
                )
        else:
            if va.label == vb.label:
                merged.append(va)
            else:
                h = hierarchies[attr.name]
                _, label = h.lca_of_labels(va.label, vb.label)
                merged.append(GeneralisedValue(label))
    return tuple(merged)


def ncp_merge(sig_a: Sequence[GeneralisedValue],
              sig_b: Sequence[GeneralisedValue],
              qids: Sequence[AttributeSchema],
              hierarchies: Mapping[str, GeneralisationHierarchy],
              domains: Mapping[str, tuple[float, float]],
              weights: Sequence[float] | None = None) -> float:
    """NCP of the least common generalisation of two signatures."""
    merged = least_common_generalisation(sig_a, sig_b, qids, hierarchies)
    return ncp_class(merged, qids, hierarchies, domains, weights)
