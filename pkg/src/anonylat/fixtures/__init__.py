"""Bundled dataset descriptors: schemas and generalisation hierarchies.

The benchmark CSVs themselves are not redistributable here; place them
next to your working directory (see the README for sources and expected
headers) and point configs or the CLI at them. `dataset_spec(name)`
loads the bundled schema for "adult", "cahousing", "cmc" or "mgm".
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path

DATASETS = ("adult", "cahousing", "cmc", "mgm")


def fixture_dir(name: str) -> Path:
    if name not in DATASETS:
        raise KeyError(f"no bundled fixture for {name!r}; have {DATASETS}")
    return Path(resources.files(__package__) / name)


def schema_path(name: str) -> Path:
    return fixture_dir(name) / "schema.json"


def dataset_spec(name: str):
    from ..experiment import DatasetSpec

    return DatasetSpec.from_json(schema_path(name))
