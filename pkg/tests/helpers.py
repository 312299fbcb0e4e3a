"""Shared builders for tests: toy fixtures and seeded random instances."""

from __future__ import annotations

import numpy as np

from anonylat.hierarchy import CategoricalHierarchy, build_interval_hierarchy
from anonylat.tabular import AttributeSchema, Table

POSTAL_CHAINS = {
    "3500": ("3500", "350*", "*"),
    "3506": ("3506", "350*", "*"),
    "3104": ("3104", "310*", "*"),
    "3105": ("3105", "310*", "*"),
}


def postal_vgh() -> CategoricalHierarchy:
    return CategoricalHierarchy("zip", POSTAL_CHAINS)


def toy_zip_sex_table():
    """8 rows over (zip, sex) with a binary target; heights (2, 1)."""
    schema = (
        AttributeSchema("zip", "categorical", "qid"),
        AttributeSchema("sex", "categorical", "qid"),
        AttributeSchema("cls", "categorical", "target"),
    )
    rows = (
        ("3500", "Male", "A"),
        ("3500", "Female", "A"),
        ("3506", "Male", "B"),
        ("3506", "Female", "A"),
        ("3104", "Male", "B"),
        ("3104", "Male", "A"),
        ("3105", "Female", "B"),
        ("3105", "Female", "B"),
    )
    table = Table(schema, rows)
    hierarchies = {
        "zip": postal_vgh(),
        "sex": CategoricalHierarchy(
            "sex", {"Male": ("Male", "*"), "Female": ("Female", "*")}
        ),
    }
    return table, hierarchies


def random_categorical_hierarchy(rng: np.random.Generator, name: str,
                                 ) -> CategoricalHierarchy:
    n_leaves = int(rng.integers(2, 9))
    height = int(rng.integers(1, 4))
    chains = {}
    group_counts = []
    for level in range(1, height):
        group_counts.append(max(1, n_leaves // (2 ** level)))
    for i in range(n_leaves):
        chain = [f"{name}v{i}"]
        for level, n_groups in enumerate(group_counts, start=1):
            chain.append(f"{name}L{level}g{i % n_groups}")
        chain.append("*")
        chains[chain[0]] = tuple(chain)
    return CategoricalHierarchy(name, chains)


WIDTH_LADDERS = ([2.0, 4.0], [5.0, 10.0], [2.0, 6.0, 12.0], [3.0, 6.0])


def random_table(seed: int, max_qids: int = 4, n_rows: int | None = None,
                 max_rows: int = 40):
    """Seeded random (table, hierarchies) with mixed QID kinds."""
    rng = np.random.default_rng(seed)
    n_qids = int(rng.integers(1, max_qids + 1))
    if n_rows is None:
        n_rows = int(rng.integers(6, max_rows + 1))
    schema = []
    hierarchies = {}
    generators = []
    for qi in range(n_qids):
        name = f"q{qi}"
        if rng.random() < 0.5:
            h = random_categorical_hierarchy(rng, name)
            schema.append(AttributeSchema(name, "categorical", "qid"))
            hierarchies[name] = h
            leaves = h.leaves
            generators.append(
                lambda rng, leaves=leaves: str(leaves[int(rng.integers(len(leaves)))])
            )
        else:
            schema.append(AttributeSchema(name, "numerical", "qid"))
            lo = int(rng.integers(0, 20))
            span = int(rng.integers(10, 40))
            generators.append(
                lambda rng, lo=lo, span=span: float(rng.integers(lo, lo + span))
            )
            hierarchies[name] = None  # built after sampling
    schema.append(AttributeSchema("label", "categorical", "target"))
    classes = ["A", "B", "C"][: int(rng.integers(2, 4))]
    rows = []
    for _ in range(n_rows):
        cells = [gen(rng) for gen in generators]
        cells.append(str(classes[int(rng.integers(len(classes)))]))
        rows.append(tuple(cells))
    table = Table(tuple(schema), tuple(rows))
    for qi, attr in enumerate(schema[:-1]):
        if attr.kind == "numerical":
            ladder = WIDTH_LADDERS[int(rng.integers(len(WIDTH_LADDERS)))]
            values = [row[qi] for row in rows]
            hierarchies[attr.name] = build_interval_hierarchy(
                values, ladder, 0, attribute=attr.name
            )
    return table, hierarchies


def qid_domains(table: Table) -> dict[str, tuple[float, float]]:
    return {
        a.name: table.numeric_domain(a.name)
        for a in table.qids if a.kind == "numerical"
    }
