"""Synthetic census-like datasets for demos and offline tests.

The real benchmark datasets are not redistributable with the package;
this generator produces tables with the same shape of problem (mixed
categorical/numerical QIDs, binary target correlated with the QIDs) at
any size, deterministically from a seed.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .hierarchy import CategoricalHierarchy
from .tabular import AttributeSchema, Table, write_csv

ZIP_CHAINS = {
    "3500": ("3500", "350*", "35**", "*"),
    "3501": ("3501", "350*", "35**", "*"),
    "3506": ("3506", "350*", "35**", "*"),
    "3511": ("3511", "351*", "35**", "*"),
    "3512": ("3512", "351*", "35**", "*"),
    "3104": ("3104", "310*", "31**", "*"),
    "3105": ("3105", "310*", "31**", "*"),
    "3109": ("3109", "310*", "31**", "*"),
}

SEX_CHAINS = {"Male": ("Male", "*"), "Female": ("Female", "*")}

EDUCATION_CHAINS = {
    "Primary": ("Primary", "Lower", "*"),
    "Secondary": ("Secondary", "Lower", "*"),
    "HS-grad": ("HS-grad", "Lower", "*"),
    "Some-college": ("Some-college", "Higher", "*"),
    "Bachelors": ("Bachelors", "Higher", "*"),
    "Masters": ("Masters", "Higher", "*"),
    "Doctorate": ("Doctorate", "Higher", "*"),
}

AGE_WIDTHS = (5.0, 10.0, 20.0)

SCHEMA = (
    AttributeSchema("zip", "categorical", "qid"),
    AttributeSchema("sex", "categorical", "qid"),
    AttributeSchema("education", "categorical", "qid"),
    AttributeSchema("age", "numerical", "qid"),
    AttributeSchema("hours", "numerical", "insensitive"),
    AttributeSchema("income", "categorical", "target"),
)


def synthetic_census(n: int = 600, seed: int = 2024):
    """Return (table, hierarchies) for a synthetic census-style dataset."""
    from .hierarchy import build_interval_hierarchy

    rng = np.random.default_rng(seed)
    zips = list(ZIP_CHAINS)
    educations = list(EDUCATION_CHAINS)
    edu_rank = {e: i for i, e in enumerate(educations)}
    rows = []
    for _ in range(n):
        z = zips[int(rng.integers(len(zips)))]
        sex = "Male" if rng.random() < 0.52 else "Female"
        edu = educations[int(rng.integers(len(educations)))]
        age = float(rng.integers(17, 76))
        hours = float(rng.integers(10, 61))
        score = (
            0.25 * (age - 17)
            + 0.7 * edu_rank[edu]
            + 0.5 * (sex == "Male")
            + rng.normal(0, 1.0)
        )
        income = ">50K" if score > 10.5 else "<=50K"
        rows.append((z, sex, edu, age, hours, income))
    table = Table(SCHEMA, tuple(rows))
    hierarchies = {
        "zip": CategoricalHierarchy("zip", ZIP_CHAINS),
        "sex": CategoricalHierarchy("sex", SEX_CHAINS),
        "education": CategoricalHierarchy("education", EDUCATION_CHAINS),
        "age": build_interval_hierarchy(
            [r[3] for r in rows], AGE_WIDTHS, 0, attribute="age"
        ),
    }
    return table, hierarchies


def write_synthetic_dataset(directory, n: int = 600, seed: int = 2024) -> Path:
    """Materialise the synthetic dataset as CSV + schema + hierarchy files.

    Returns the path of the schema JSON; the layout matches what the CLI
    expects for real datasets.
    """
    directory = Path(directory)
    (directory / "hierarchies").mkdir(parents=True, exist_ok=True)
    table, _ = synthetic_census(n, seed)
    write_csv(table, directory / "synth.csv")
    for name, chains in (
        ("zip", ZIP_CHAINS), ("sex", SEX_CHAINS), ("education", EDUCATION_CHAINS),
    ):
        lines = [";".join(chain) for chain in chains.values()]
        (directory / "hierarchies" / f"{name}.csv").write_text(
            "\n".join(lines) + "\n", encoding="utf-8"
        )
    attributes = []
    for attr in SCHEMA:
        entry = {"name": attr.name, "kind": attr.kind, "role": attr.role}
        if attr.role == "qid":
            if attr.kind == "categorical":
                entry["hierarchy"] = {
                    "type": "file", "path": f"hierarchies/{attr.name}.csv"
                }
            else:
                entry["hierarchy"] = {
                    "type": "interval", "widths": list(AGE_WIDTHS), "origin": 0
                }
        attributes.append(entry)
    schema_doc = {
        "name": "synth",
        "csv": str(directory / "synth.csv"),
        "missing_marker": "?",
        "drop_missing": True,
        "positive_class": ">50K",
        "attributes": attributes,
    }
    schema_path = directory / "synth.schema.json"
    schema_path.write_text(json.dumps(schema_doc, indent=2) + "\n",
                           encoding="utf-8")
    return schema_path
