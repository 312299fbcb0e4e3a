"""Value generalisation hierarchies for categorical and numerical attributes.

Two concrete flavours share one interface: hierarchies parsed from
semicolon-delimited files (one leaf chain per line, root column "*") and
interval hierarchies built from observed numeric values plus a ladder of
nested bucket widths.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .errors import BoundsError, CoverageError, FormatError, NestingError

ROOT_LABEL = "*"


def format_number(v: float) -> str:
    """Render a float the way cells are written to CSV (ints without '.0')."""
    if math.isfinite(v) and v == int(v) and abs(v) < 1e16:
        return str(int(v))
    return repr(float(v))


@dataclass(frozen=True)
class GeneralisedValue:
    """A value at some generalisation level.

    The label is what gets printed; for numerical attributes the interval
    is authoritative (encoders must never re-parse the label text).
    A leaf numeric value carries the degenerate interval (v, v).
    """

    label: str
    interval: tuple[float, float] | None = None

    def midpoint(self) -> float:
        if self.interval is None:
            raise ValueError(f"value {self.label!r} has no numeric interval")
        lo, hi = self.interval
        return (lo + hi) / 2.0


class GeneralisationHierarchy:
    """Common interface of both hierarchy flavours."""

    attribute: str
    height: int

    def generalise(self, value, level: int) -> GeneralisedValue:
        raise NotImplementedError

    def subtree_leaf_count(self, label: str, level: int | None = None) -> int:
        raise NotImplementedError

    @property
    def leaf_count(self) -> int:
        raise NotImplementedError

    def root_value(self) -> GeneralisedValue:
        raise NotImplementedError

    def covers(self, sig: GeneralisedValue, value) -> bool:
        """True if the original cell `value` generalises to `sig`."""
        raise NotImplementedError

    def _check_level(self, level: int) -> None:
        if not 0 <= level <= self.height:
            raise BoundsError(
                f"{self.attribute}: level {level} outside [0, {self.height}]"
            )


class CategoricalHierarchy(GeneralisationHierarchy):
    """Hierarchy defined by explicit leaf-to-root chains.

    Every leaf has a chain of exactly height+1 labels (level 0 = leaf,
    level height = "*"). Built by `parse_hierarchy_file` or directly from
    chains in tests.
    """

    def __init__(self, attribute: str, chains: dict[str, Sequence[str]]):
        if not chains:
            raise FormatError(f"{attribute}: hierarchy has no leaves")
        heights = {len(c) - 1 for c in chains.values()}
        if len(heights) != 1:
            raise FormatError(f"{attribute}: leaf chains have differing lengths")
        self.attribute = attribute
        self.height = heights.pop()
        for leaf, chain in chains.items():
            if chain[-1] != ROOT_LABEL:
                raise FormatError(
                    f"{attribute}: chain for {leaf!r} does not end in '*'"
                )
        self._chains: dict[str, tuple[str, ...]] = {
            leaf: tuple(chain) for leaf, chain in chains.items()
        }
        # node = (level, label); leaf sets and child order follow file order
        self._node_leaves: dict[tuple[int, str], list[str]] = {}
        self._node_children: dict[tuple[int, str], list[str]] = {}
        for leaf, chain in self._chains.items():
            for level, label in enumerate(chain):
                node = (level, label)
                self._node_leaves.setdefault(node, [])
                self._node_leaves[node].append(leaf)
                if level > 0:
                    kids = self._node_children.setdefault(node, [])
                    child = chain[level - 1]
                    if child not in kids:
                        kids.append(child)

    @property
    def leaf_count(self) -> int:
        return len(self._chains)

    @property
    def leaves(self) -> tuple[str, ...]:
        return tuple(self._chains)

    def chain(self, leaf: str) -> tuple[str, ...]:
        try:
            return self._chains[leaf]
        except KeyError:
            raise CoverageError(
                f"{self.attribute}: value {leaf!r} not covered by hierarchy"
            ) from None

    def generalise(self, value, level: int) -> GeneralisedValue:
        self._check_level(level)
        return GeneralisedValue(self.chain(str(value))[level])

    def resolve_level(self, label: str) -> int:
        """Lowest level at which `label` occurs."""
        for level in range(self.height + 1):
            if (level, label) in self._node_leaves:
                return level
        raise CoverageError(f"{self.attribute}: unknown label {label!r}")

    def subtree_leaf_count(self, label: str, level: int | None = None) -> int:
        if level is None:
            level = self.resolve_level(label)
        node = (level, label)
        if node not in self._node_leaves:
            raise CoverageError(
                f"{self.attribute}: no node {label!r} at level {level}"
            )
        return len(self._node_leaves[node])

    def children_of(self, label: str, level: int) -> list[str]:
        """Child labels (level-1) under the node, in file order."""
        node = (level, label)
        if node not in self._node_leaves:
            raise CoverageError(
                f"{self.attribute}: no node {label!r} at level {level}"
            )
        return list(self._node_children.get(node, []))

    def lca(self, leaves: Iterable[str]) -> tuple[int, str]:
        """Lowest node whose subtree contains every given leaf."""
        chains = [self.chain(str(v)) for v in leaves]
        if not chains:
            raise ValueError("lca of an empty leaf set")
        for level in range(self.height + 1):
            labels = {c[level] for c in chains}
            if len(labels) == 1:
                return level, labels.pop()
        raise CoverageError(f"{self.attribute}: chains never meet")  # unreachable

    def lca_of_labels(self, a: str, b: str) -> tuple[int, str]:
        """Lowest common ancestor of two nodes given by label."""
        la, lb = self.resolve_level(a), self.resolve_level(b)
        # climb both to a common level, then upward until labels agree
        reps_a = self._node_leaves[(la, a)][0]
        reps_b = self._node_leaves[(lb, b)][0]
        ca, cb = self.chain(reps_a), self.chain(reps_b)
        for level in range(max(la, lb), self.height + 1):
            if ca[level] == cb[level]:
                return level, ca[level]
        raise CoverageError(f"{self.attribute}: labels {a!r}, {b!r} never meet")

    def root_value(self) -> GeneralisedValue:
        return GeneralisedValue(ROOT_LABEL)

    def covers(self, sig: GeneralisedValue, value) -> bool:
        try:
            chain = self.chain(str(value))
        except CoverageError:
            return False
        return sig.label in chain


def parse_hierarchy_file(path, attribute) -> GeneralisationHierarchy:
    """Parse a semicolon-delimited hierarchy file.

    Each line is one leaf chain "leaf;gen1;...;*". All lines must have the
    same number of fields; height = fields - 1. For numerical attributes
    the leaf field must parse as a number and intermediate labels of the
    form "[lo-hi)" (or "lo-hi") carry their interval.
    """
    path = Path(path)
    lines = [
        ln for ln in path.read_text(encoding="utf-8").splitlines() if ln.strip()
    ]
    if not lines:
        raise FormatError(f"{path}: empty hierarchy file")
    rows = [[f.strip() for f in ln.split(";")] for ln in lines]
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise FormatError(f"{path}: ragged lines (field counts {sorted(widths)})")
    if rows[0][-1] != ROOT_LABEL or any(r[-1] != ROOT_LABEL for r in rows):
        raise FormatError(f"{path}: last column must be the root '*'")
    chains: dict[str, list[str]] = {}
    for r in rows:
        if r[0] in chains:
            raise FormatError(f"{path}: duplicate leaf {r[0]!r}")
        chains[r[0]] = r
    name = getattr(attribute, "name", str(attribute))
    kind = getattr(attribute, "kind", "categorical")
    if kind == "numerical":
        return _NumericFileHierarchy(name, chains)
    return CategoricalHierarchy(name, chains)


def _parse_interval_label(label: str) -> tuple[float, float] | None:
    text = label.strip()
    if text.startswith("["):
        text = text[1:]
    if text.endswith(")") or text.endswith("]"):
        text = text[:-1]
    for sep in (",", ";"):
        if sep in text:
            lo_s, hi_s = text.split(sep, 1)
            break
    else:
        # "lo-hi" with '-' as separator; careful with negative numbers
        idx = text.find("-", 1)
        if idx < 0:
            return None
        lo_s, hi_s = text[:idx], text[idx + 1 :]
    try:
        return float(lo_s), float(hi_s)
    except ValueError:
        return None


class _NumericFileHierarchy(CategoricalHierarchy):
    """File-based hierarchy over a numeric attribute.

    Chains are keyed by the leaf's text form; generalised values carry the
    interval parsed from the level label (the root spans the leaf range).
    """

    def __init__(self, attribute: str, chains: dict[str, Sequence[str]]):
        super().__init__(attribute, chains)
        self._leaf_by_float = {float(leaf): leaf for leaf in self._chains}
        vals = sorted(self._leaf_by_float)
        self._span = (vals[0], vals[-1])

    def _key(self, value) -> str:
        try:
            f = float(value)
        except (TypeError, ValueError):
            raise CoverageError(
                f"{self.attribute}: value {value!r} is not numeric"
            ) from None
        if f not in self._leaf_by_float:
            raise CoverageError(
                f"{self.attribute}: value {value!r} not covered by hierarchy"
            )
        return self._leaf_by_float[f]

    def generalise(self, value, level: int) -> GeneralisedValue:
        self._check_level(level)
        key = self._key(value)
        label = self.chain(key)[level]
        if level == 0:
            f = float(key)
            return GeneralisedValue(label, (f, f))
        if label == ROOT_LABEL:
            return GeneralisedValue(ROOT_LABEL, self._span)
        interval = _parse_interval_label(label)
        return GeneralisedValue(label, interval)

    def root_value(self) -> GeneralisedValue:
        return GeneralisedValue(ROOT_LABEL, self._span)

    def covers(self, sig: GeneralisedValue, value) -> bool:
        try:
            key = self._key(value)
        except CoverageError:
            return False
        if sig.label in self.chain(key) or sig.label == ROOT_LABEL:
            return True
        if sig.interval is not None:
            lo, hi = sig.interval
            f = float(key)
            if sig.label.endswith(")"):
                return lo <= f < hi
            return lo <= f <= hi
        return False


class IntervalHierarchy(GeneralisationHierarchy):
    """Numeric hierarchy of nested half-open buckets.

    Level l >= 1 maps v to [origin + w_l * floor((v - origin)/w_l), +w_l),
    labelled "[lo-hi)". The top level is "*" spanning the observed range.
    Widths must be strictly increasing and each an integer multiple of the
    previous so buckets nest.
    """

    def __init__(self, attribute: str, values: Iterable[float],
                 level_widths: Sequence[float], origin: float = 0.0):
        widths = [float(w) for w in level_widths]
        if not widths or any(w <= 0 for w in widths):
            raise NestingError(f"{attribute}: widths must be positive")
        for prev, cur in zip(widths, widths[1:]):
            if cur <= prev:
                raise NestingError(f"{attribute}: widths must strictly increase")
            ratio = cur / prev
            if not math.isclose(ratio, round(ratio), rel_tol=1e-9):
                raise NestingError(
                    f"{attribute}: width {cur} is not a multiple of {prev}"
                )
        distinct = sorted({float(v) for v in values})
        if not distinct:
            raise CoverageError(f"{attribute}: no values to build hierarchy from")
        self.attribute = attribute
        self.height = len(widths) + 1
        self._widths = widths
        self._origin = float(origin)
        self._values = distinct
        self._span = (distinct[0], distinct[-1])
        self._observed = set(distinct)

    @property
    def leaf_count(self) -> int:
        return len(self._values)

    def bucket(self, value: float, level: int) -> tuple[float, float]:
        w = self._widths[level - 1]
        lo = self._origin + w * math.floor((float(value) - self._origin) / w)
        return lo, lo + w

    def _check_value(self, value) -> float:
        try:
            f = float(value)
        except (TypeError, ValueError):
            raise CoverageError(
                f"{self.attribute}: value {value!r} is not numeric"
            ) from None
        if f not in self._observed:
            raise CoverageError(
                f"{self.attribute}: value {value!r} was not observed at build time"
            )
        return f

    def generalise(self, value, level: int) -> GeneralisedValue:
        self._check_level(level)
        f = self._check_value(value)
        if level == 0:
            return GeneralisedValue(format_number(f), (f, f))
        if level == self.height:
            return self.root_value()
        lo, hi = self.bucket(f, level)
        # clip to the observed span so buckets nest inside the root "*"
        lo = max(lo, self._span[0])
        if hi > self._span[1]:
            hi = self._span[1]
            label = f"[{format_number(lo)}-{format_number(hi)}]"
        else:
            label = f"[{format_number(lo)}-{format_number(hi)})"
        return GeneralisedValue(label, (lo, hi))

    def root_value(self) -> GeneralisedValue:
        return GeneralisedValue(ROOT_LABEL, self._span)

    def subtree_leaf_count(self, label: str, level: int | None = None) -> int:
        if label == ROOT_LABEL:
            return self.leaf_count
        interval = _parse_interval_label(label)
        if interval is not None:
            lo, hi = interval
            if label.endswith("]"):
                count = sum(1 for v in self._values if lo <= v <= hi)
            else:
                count = sum(1 for v in self._values if lo <= v < hi)
            if count == 0:
                raise CoverageError(
                    f"{self.attribute}: no observed leaf under {label!r}"
                )
            return count
        try:
            f = float(label)
        except ValueError:
            raise CoverageError(f"{self.attribute}: unknown label {label!r}") from None
        if f not in self._observed:
            raise CoverageError(
                f"{self.attribute}: no observed leaf under {label!r}"
            )
        return 1

    def covers(self, sig: GeneralisedValue, value) -> bool:
        try:
            f = self._check_value(value)
        except CoverageError:
            return False
        if sig.interval is None:
            return sig.label == ROOT_LABEL or sig.label == format_number(f)
        lo, hi = sig.interval
        # half-open for this hierarchy's own buckets "[lo-hi)"; hull labels
        # produced by the multidimensional algorithms close the upper end
        if sig.label.endswith(")"):
            return lo <= f < hi
        return lo <= f <= hi


def build_interval_hierarchy(values: Iterable[float],
                             level_widths: Sequence[float],
                             origin: float = 0.0,
                             attribute: str = "value") -> IntervalHierarchy:
    """Build an `IntervalHierarchy` over the observed values."""
    return IntervalHierarchy(attribute, values, level_widths, origin)


def generalise(h: GeneralisationHierarchy, value, level: int) -> GeneralisedValue:
    """Functional form of `h.generalise(value, level)`."""
    return h.generalise(value, level)


def subtree_leaf_count(h: GeneralisationHierarchy, label: str,
                       level: int | None = None) -> int:
    """Number of distinct leaves whose chain passes through the node."""
    return h.subtree_leaf_count(label, level)
