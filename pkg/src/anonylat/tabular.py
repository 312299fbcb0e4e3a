"""Dataset model, CSV ingestion and deterministic train/test splitting."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import ParseError, SchemaError, SizeError
from .hierarchy import GeneralisedValue, format_number

Cell = object  # str (categorical leaf) | float (numeric leaf) | GeneralisedValue

KINDS = ("categorical", "numerical")
ROLES = ("qid", "insensitive", "target")


@dataclass(frozen=True)
class AttributeSchema:
    name: str
    kind: str  # "categorical" | "numerical"
    role: str  # "qid" | "insensitive" | "target"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SchemaError(f"{self.name}: unknown kind {self.kind!r}")
        if self.role not in ROLES:
            raise SchemaError(f"{self.name}: unknown role {self.role!r}")


def validate_schema(schema: Sequence[AttributeSchema]) -> None:
    names = [a.name for a in schema]
    if len(set(names)) != len(names):
        raise SchemaError("attribute names are not unique")
    targets = [a for a in schema if a.role == "target"]
    if len(targets) != 1:
        raise SchemaError(f"expected exactly one target attribute, got {len(targets)}")
    if not any(a.role == "qid" for a in schema):
        raise SchemaError("schema declares no quasi-identifier")


@dataclass(frozen=True)
class Table:
    """Immutable table; row ids are the dense indices 0..N-1."""

    schema: tuple[AttributeSchema, ...]
    rows: tuple[tuple[Cell, ...], ...]

    def __post_init__(self):
        validate_schema(self.schema)
        width = len(self.schema)
        for i, row in enumerate(self.rows):
            if len(row) != width:
                raise SchemaError(f"row {i} has {len(row)} cells, expected {width}")

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    def attr_index(self, name: str) -> int:
        for i, a in enumerate(self.schema):
            if a.name == name:
                return i
        raise SchemaError(f"no attribute named {name!r}")

    @property
    def qid_indices(self) -> tuple[int, ...]:
        return tuple(i for i, a in enumerate(self.schema) if a.role == "qid")

    @property
    def qids(self) -> tuple[AttributeSchema, ...]:
        return tuple(a for a in self.schema if a.role == "qid")

    @property
    def target_index(self) -> int:
        return next(i for i, a in enumerate(self.schema) if a.role == "target")

    def column(self, name: str) -> list[Cell]:
        j = self.attr_index(name)
        return [row[j] for row in self.rows]

    def target_labels(self) -> list[str]:
        j = self.target_index
        return [str(row[j]) for row in self.rows]

    def numeric_domain(self, name: str) -> tuple[float, float]:
        """Observed (min, max) of a numerical column over leaf values."""
        j = self.attr_index(name)
        if self.schema[j].kind != "numerical":
            raise SchemaError(f"{name} is not numerical")
        lo = float("inf")
        hi = float("-inf")
        for row in self.rows:
            cell = row[j]
            if isinstance(cell, GeneralisedValue):
                if cell.interval is None:
                    continue
                a, b = cell.interval
            else:
                a = b = float(cell)
            lo = min(lo, a)
            hi = max(hi, b)
        return lo, hi

    def with_rows(self, rows: Iterable[Sequence[Cell]]) -> "Table":
        return Table(self.schema, tuple(tuple(r) for r in rows))


@dataclass(frozen=True)
class SplitSpec:
    train_fraction: float = 0.7
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.train_fraction < 1.0:
            raise SchemaError(
                f"train_fraction must lie in (0, 1), got {self.train_fraction}"
            )


def _is_missing(text: str, marker: str) -> bool:
    return text == "" or text == marker


def load_csv(path, schema: Sequence[AttributeSchema], drop_missing: bool = True,
             missing_marker: str = "?") -> Table:
    """Load a comma-delimited, UTF-8, single-header CSV against a schema.

    With drop_missing, rows containing an empty cell or the missing marker
    are removed and row ids reassigned densely.
    """
    schema = tuple(schema)
    validate_schema(schema)
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise SchemaError(f"{path}: empty file") from None
        expected = [a.name for a in schema]
        if header != expected:
            raise SchemaError(
                f"{path}: header {header} does not match schema {expected}"
            )
        rows: list[tuple[Cell, ...]] = []
        for lineno, raw in enumerate(reader):
            if not raw:
                continue
            if len(raw) != len(schema):
                raise SchemaError(
                    f"{path}: row {lineno} has {len(raw)} cells, expected {len(schema)}"
                )
            cells = [c.strip() for c in raw]
            if drop_missing and any(_is_missing(c, missing_marker) for c in cells):
                continue
            parsed: list[Cell] = []
            for attr, text in zip(schema, cells):
                if attr.kind == "numerical":
                    try:
                        value = float(text)
                    except ValueError:
                        raise ParseError(
                            f"{path}: row {lineno}, column {attr.name!r}: "
                            f"cannot parse {text!r} as a number"
                        ) from None
                    if not np.isfinite(value):
                        raise ParseError(
                            f"{path}: row {lineno}, column {attr.name!r}: "
                            f"non-finite value {text!r}"
                        )
                    parsed.append(value)
                else:
                    parsed.append(text)
            rows.append(tuple(parsed))
    if not rows:
        raise SizeError(f"{path}: no rows left after ingestion")
    return Table(schema, tuple(rows))


def cell_text(cell: Cell) -> str:
    """Canonical text form of a cell, as written to CSV."""
    if isinstance(cell, GeneralisedValue):
        return cell.label
    if isinstance(cell, float):
        return format_number(cell)
    return str(cell)


def write_csv(table: Table, path) -> None:
    """Write the table back out (header + canonical cell text)."""
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow([a.name for a in table.schema])
        for row in table.rows:
            writer.writerow([cell_text(c) for c in row])


def merge_target_values(table: Table, mapping: dict[str, str]) -> Table:
    """Rewrite target labels per mapping; all other cells unchanged."""
    if not mapping:
        return table
    j = table.target_index
    observed = {str(row[j]) for row in table.rows}
    unknown = set(mapping) - observed
    if unknown:
        raise SchemaError(
            f"merge mapping references labels not in the target column: "
            f"{sorted(unknown)}"
        )
    rows = []
    for row in table.rows:
        label = str(row[j])
        if label in mapping:
            row = row[:j] + (mapping[label],) + row[j + 1 :]
        rows.append(row)
    return table.with_rows(rows)


def split_train_test(table: Table, spec: SplitSpec) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Seeded uniform shuffle, then prefix take; returns sorted id tuples."""
    n = table.n_rows
    if n < 2:
        raise SizeError(f"need at least 2 rows to split, got {n}")
    n_train = int(round(spec.train_fraction * n))
    n_train = min(max(n_train, 1), n - 1)
    perm = np.random.default_rng(spec.seed).permutation(n)
    train = tuple(sorted(int(i) for i in perm[:n_train]))
    test = tuple(sorted(int(i) for i in perm[n_train:]))
    return train, test
