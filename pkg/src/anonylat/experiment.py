"""Experiment configuration, sweep execution and result artefacts.

A sweep runs every (algorithm, k, suppression) cell on one dataset:
anonymise the full table, verify, render, split by the fixed shared
split, encode, score each classifier, and append one row per cell and
classifier. Baselines (non-anonymised and zero-rule) are computed once.
Result CSVs are written in deterministic order; wall times go to a
separate timing sidecar so rerunning a sweep is byte-identical.
"""

from __future__ import annotations

import csv
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

from .anonymizers import (
    ANONYMISERS,
    AlgoParams,
    Partition,
    generalised_table_from_partition,
    partition_violation,
)
from .errors import SchemaError
from .hierarchy import GeneralisationHierarchy, build_interval_hierarchy, parse_hierarchy_file
from .metrics import MetricKind
from .mlbridge import encode_for_ml, evaluate, knn_classify, zero_rule_predict
from .oracle import EXHAUSTIVE_LATTICE_LIMIT, brute_force_census, exhaustive_ola
from .tabular import (
    AttributeSchema,
    SplitSpec,
    Table,
    load_csv,
    merge_target_values,
    write_csv,
)

CLASSIFIERS = ("knn", "zero_rule", "export_only")
VERIFY_CENSUS_LIMIT = 5_000
VERIFY_ROWS_LIMIT = 2_000


@dataclass(frozen=True)
class HierarchySpec:
    type: str  # "file" | "interval"
    path: Path | None = None
    widths: tuple[float, ...] = ()
    origin: float = 0.0

    @classmethod
    def from_dict(cls, d: dict, base_dir: Path) -> "HierarchySpec":
        if d["type"] == "file":
            return cls("file", path=(base_dir / d["path"]).resolve())
        if d["type"] == "interval":
            return cls("interval", widths=tuple(float(w) for w in d["widths"]),
                       origin=float(d.get("origin", 0.0)))
        raise SchemaError(f"unknown hierarchy type {d['type']!r}")


@dataclass(frozen=True)
class DatasetSpec:
    name: str
    attributes: tuple[tuple[AttributeSchema, HierarchySpec | None], ...]
    csv_path: Path | None = None
    missing_marker: str = "?"
    drop_missing: bool = True
    target_merges: dict[str, str] = field(default_factory=dict)
    positive_class: str | None = None

    @property
    def schema(self) -> tuple[AttributeSchema, ...]:
        return tuple(a for a, _ in self.attributes)

    @classmethod
    def from_dict(cls, d: dict, base_dir: Path) -> "DatasetSpec":
        attributes = []
        for a in d["attributes"]:
            schema = AttributeSchema(a["name"], a["kind"], a["role"])
            hier = None
            if "hierarchy" in a:
                hier = HierarchySpec.from_dict(a["hierarchy"], base_dir)
            if schema.role == "qid" and hier is None:
                raise SchemaError(f"QID {schema.name!r} has no hierarchy")
            attributes.append((schema, hier))
        csv_path = d.get("csv")
        return cls(
            name=d["name"],
            attributes=tuple(attributes),
            csv_path=Path(csv_path) if csv_path else None,
            missing_marker=d.get("missing_marker", "?"),
            drop_missing=d.get("drop_missing", True),
            target_merges=dict(d.get("target_merges", {})),
            positive_class=d.get("positive_class"),
        )

    @classmethod
    def from_json(cls, path) -> "DatasetSpec":
        path = Path(path)
        return cls.from_dict(json.loads(path.read_text(encoding="utf-8")),
                             path.parent)

    def with_hierarchy_dir(self, hier_dir) -> "DatasetSpec":
        """Re-root file hierarchies at hier_dir/<basename>."""
        hier_dir = Path(hier_dir)
        attributes = []
        for schema, hier in self.attributes:
            if hier is not None and hier.type == "file":
                hier = replace(hier, path=hier_dir / hier.path.name)
            attributes.append((schema, hier))
        return replace(self, attributes=tuple(attributes))


def load_dataset(spec: DatasetSpec, csv_path=None,
                 ) -> tuple[Table, dict[str, GeneralisationHierarchy]]:
    """Load the CSV, apply target merges and build every QID hierarchy."""
    path = Path(csv_path) if csv_path is not None else spec.csv_path
    if path is None:
        raise SchemaError(f"dataset {spec.name!r} names no CSV file")
    table = load_csv(path, spec.schema, drop_missing=spec.drop_missing,
                     missing_marker=spec.missing_marker)
    if spec.target_merges:
        table = merge_target_values(table, spec.target_merges)
    hierarchies: dict[str, GeneralisationHierarchy] = {}
    for schema, hier in spec.attributes:
        if schema.role != "qid":
            continue
        if hier.type == "file":
            hierarchies[schema.name] = parse_hierarchy_file(hier.path, schema)
        else:
            values = [float(v) for v in table.column(schema.name)]
            hierarchies[schema.name] = build_interval_hierarchy(
                values, hier.widths, hier.origin, attribute=schema.name
            )
    return table, hierarchies


@dataclass(frozen=True)
class ExperimentConfig:
    dataset: DatasetSpec
    algorithms: tuple[str, ...] = ("ola", "mondrian", "tdg", "cb")
    k_values: tuple[int, ...] = tuple(range(2, 101))
    suppression_levels: tuple[float, ...] = (0.03,)
    metric: MetricKind = MetricKind.GWEIGHT
    classifiers: tuple[str, ...] = ("knn", "zero_rule")
    knn_neighbours: int = 10
    split: SplitSpec = SplitSpec(0.7, 0)
    algo_seed: int = 0
    output_dir: Path = Path("out")
    write_exports: bool = False
    write_homogeneity: bool = False

    def __post_init__(self):
        for algo in self.algorithms:
            if algo not in ANONYMISERS:
                raise SchemaError(f"unknown algorithm {algo!r}")
        for c in self.classifiers:
            if c not in CLASSIFIERS:
                raise SchemaError(f"unknown classifier {c!r}")
        ks = list(self.k_values)
        if ks != sorted(ks) or len(set(ks)) != len(ks):
            raise SchemaError("k_values must be strictly ascending")
        for i, k in enumerate(ks):
            if k < 2 and not (i == 0 and k == 1):
                raise SchemaError("k_values must be >= 2 (a leading 1 is allowed)")
        for s in self.suppression_levels:
            if not 0.0 <= s < 1.0:
                raise SchemaError(f"suppression level {s} outside [0, 1)")

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        path = Path(path)
        d = json.loads(path.read_text(encoding="utf-8"))
        base = path.parent
        ds = d["dataset"]
        if isinstance(ds, str):
            dataset = DatasetSpec.from_json(base / ds)
        else:
            dataset = DatasetSpec.from_dict(ds, base)
        if "csv" in d:
            dataset = replace(dataset, csv_path=Path(d["csv"]))
        split = d.get("split", {})
        out = dict(
            dataset=dataset,
            split=SplitSpec(split.get("train_fraction", 0.7),
                            int(split.get("seed", 0))),
            output_dir=Path(d.get("output_dir", "out")),
        )
        for key, cast in (
            ("algorithms", tuple), ("k_values", lambda v: tuple(int(x) for x in v)),
            ("suppression_levels", lambda v: tuple(float(x) for x in v)),
            ("metric", MetricKind), ("classifiers", tuple),
            ("knn_neighbours", int), ("algo_seed", int),
            ("write_exports", bool), ("write_homogeneity", bool),
        ):
            if key in d:
                out[key] = cast(d[key])
        return cls(**out)


@dataclass(frozen=True)
class RunRecord:
    dataset: str
    algorithm: str
    k: int
    suppression: float
    metric: str
    classifier: str
    seed: int
    accuracy: float | None
    precision: float | None
    recall: float | None
    f1: float | None
    num_classes: int
    suppressed_count: int
    node_levels: str  # per-QID levels joined by '|', '' for local algorithms
    wall_time: float = 0.0


RESULT_COLUMNS = (
    "dataset", "algorithm", "k", "suppression", "metric", "classifier",
    "seed", "accuracy", "precision", "recall", "f1", "num_classes",
    "suppressed_count", "node_levels",
)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        from .hierarchy import format_number
        return format_number(value)
    return str(value)


def _record_key(r: RunRecord):
    return (r.algorithm != "none", r.algorithm, r.k, r.suppression,
            r.metric, r.classifier)


def write_results_csv(records: Sequence[RunRecord], path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(RESULT_COLUMNS)
        for r in sorted(records, key=_record_key):
            writer.writerow([_fmt(getattr(r, c)) for c in RESULT_COLUMNS])


def write_timings_csv(records: Sequence[RunRecord], path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(("algorithm", "k", "suppression", "metric",
                         "classifier", "wall_time_s"))
        for r in sorted(records, key=_record_key):
            writer.writerow([r.algorithm, r.k, _fmt(r.suppression), r.metric,
                             r.classifier, f"{r.wall_time:.3f}"])


def emit_generalisation_trace(records: Sequence[RunRecord],
                              qid_names: Sequence[str], path) -> int:
    """Write the per-k OLA trace: QID levels, suppressed count and F1."""
    rows = [r for r in records if r.algorithm == "ola" and r.node_levels]
    picked: dict[int, RunRecord] = {}
    for r in sorted(rows, key=_record_key):
        picked.setdefault(r.k, r)
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["k", *qid_names, "suppressed_count", "f1"])
        for k in sorted(picked):
            r = picked[k]
            writer.writerow(
                [k, *r.node_levels.split("|"), r.suppressed_count, _fmt(r.f1)]
            )
    return len(picked)


def emit_homogeneity_report(partition: Partition, table: Table, k: int,
                            path) -> None:
    """Per-class size and homogeneity rows plus a trailing summary row."""
    from .mlbridge import homogeneity_histogram

    rows = homogeneity_histogram(partition, table)
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(("class_id", "size", "homogeneity"))
        for class_id, homogeneity, size in rows:
            writer.writerow((class_id, size, _fmt(homogeneity)))
        mean_h = sum(h for _, h, _ in rows) / len(rows)
        writer.writerow(("summary", len(rows), _fmt(mean_h)))


def export_anonymised(table: Table, partition: Partition, path,
                      hierarchies=None, extra_meta: dict | None = None) -> None:
    """Write the generalised table plus a sidecar metadata JSON."""
    generalised = generalised_table_from_partition(partition, table, hierarchies)
    path = Path(path)
    write_csv(generalised, path)
    meta = {
        "algorithm": partition.algorithm,
        "k": partition.k,
        "node": list(partition.node) if partition.node else None,
        "num_classes": partition.num_classes,
        "suppressed_count": partition.suppressed_count,
        **partition.meta,
        **(extra_meta or {}),
    }
    path.with_suffix(path.suffix + ".meta.json").write_text(
        json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


@dataclass(frozen=True)
class Cell:
    algorithm: str
    k: int
    suppression: float
    metric: str


@dataclass
class CellFailure:
    cell: Cell
    message: str


@dataclass
class SweepResult:
    records: list[RunRecord]
    failures: list[CellFailure]
    output_dir: Path

    @property
    def ok(self) -> bool:
        return not self.failures


def _cells(config: ExperimentConfig) -> list[Cell]:
    cells = []
    for algo in config.algorithms:
        sups = config.suppression_levels if algo == "ola" else (0.0,)
        metric = config.metric.value if algo == "ola" else ""
        for k in config.k_values:
            for sup in sups:
                cells.append(Cell(algo, k, sup, metric))
    return sorted(cells, key=lambda c: (c.algorithm, c.k, c.suppression))


@dataclass
class _SweepContext:
    table: Table
    hierarchies: dict[str, GeneralisationHierarchy]
    train_ids: tuple[int, ...]
    test_ids: tuple[int, ...]
    config: ExperimentConfig
    verify: bool


def _score(ctx: _SweepContext, generalised: Table) -> dict[str, tuple]:
    encoded, labels = encode_for_ml(generalised)
    out = {}
    if "knn" in ctx.config.classifiers:
        train_x = encoded.rows[list(ctx.train_ids)]
        test_x = encoded.rows[list(ctx.test_ids)]
        train_y = [labels[i] for i in ctx.train_ids]
        test_y = [labels[i] for i in ctx.test_ids]
        pred = knn_classify(train_x, train_y, test_x,
                            n_neighbours=ctx.config.knn_neighbours)
        report = evaluate(pred, test_y,
                          positive_class=ctx.config.dataset.positive_class)
        out["knn"] = (report.accuracy, report.precision, report.recall, report.f1)
    return out


def _verify_cell(ctx: _SweepContext, partition: Partition,
                 generalised: Table, cell: Cell) -> None:
    table = ctx.table
    if table.n_rows <= VERIFY_CENSUS_LIMIT:
        census = brute_force_census(generalised)
        expected = {
            tuple(v.label for v in ec.signature): len(ec.member_ids)
            for ec in partition.classes
        }
        star = tuple("*" for _ in table.qid_indices)
        if partition.suppressed_count:
            expected[star] = expected.get(star, 0) + partition.suppressed_count
        observed = {
            tuple(v.label for v in sig): count
            for sig, count in census.groups
        }
        if observed != expected:
            raise AssertionError(
                "census mismatch between partition and generalised table"
            )
    if (cell.algorithm == "ola" and table.n_rows <= VERIFY_ROWS_LIMIT):
        heights = [ctx.hierarchies[a.name].height for a in table.qids]
        size = 1
        for h in heights:
            size *= h + 1
        if size <= EXHAUSTIVE_LATTICE_LIMIT:
            params = AlgoParams(k=cell.k, max_sup=cell.suppression,
                                metric=MetricKind(cell.metric))
            from .anonymizers import ola_search
            result = ola_search(table, ctx.hierarchies, params)
            _, best_loss = exhaustive_ola(table, ctx.hierarchies, params)
            if result.loss != best_loss:
                raise AssertionError(
                    f"OLA loss {result.loss} differs from exhaustive {best_loss}"
                )


def _run_cell(ctx: _SweepContext, cell: Cell) -> list[RunRecord]:
    config = ctx.config
    started = time.perf_counter()
    params = AlgoParams(
        k=cell.k,
        max_sup=cell.suppression,
        metric=MetricKind(cell.metric) if cell.metric else config.metric,
        seed=config.algo_seed,
    )
    partition = ANONYMISERS[cell.algorithm](ctx.table, ctx.hierarchies, params)
    violation = partition_violation(partition, ctx.table, cell.k, ctx.hierarchies)
    if violation is not None:
        raise AssertionError(f"verification failed: {violation}")
    generalised = generalised_table_from_partition(partition, ctx.table,
                                                   ctx.hierarchies)
    if ctx.verify:
        _verify_cell(ctx, partition, generalised, cell)
    out_dir = Path(config.output_dir)
    stem = f"{config.dataset.name}_{cell.algorithm}_k{cell.k}"
    if cell.algorithm == "ola":
        stem += f"_s{cell.suppression:g}_{cell.metric}"
    if config.write_exports or "export_only" in config.classifiers:
        (out_dir / "exports").mkdir(parents=True, exist_ok=True)
        export_anonymised(
            ctx.table, partition, out_dir / "exports" / f"{stem}.csv",
            ctx.hierarchies,
            extra_meta={"suppression": cell.suppression, "metric": cell.metric,
                        "seed": config.algo_seed,
                        "split_seed": config.split.seed},
        )
        if "export_only" in config.classifiers:
            from .mlbridge import export_encoded_csv

            encoded, labels = encode_for_ml(generalised)
            export_encoded_csv(
                encoded, labels, out_dir / "exports" / f"{stem}.encoded.csv",
                train_ids=ctx.train_ids, test_ids=ctx.test_ids,
            )
    if config.write_homogeneity:
        (out_dir / "homogeneity").mkdir(parents=True, exist_ok=True)
        emit_homogeneity_report(partition, ctx.table, cell.k,
                                out_dir / "homogeneity" / f"{stem}.csv")
    node_levels = "|".join(str(l) for l in partition.node) if partition.node else ""
    scores = _score(ctx, generalised)
    elapsed = time.perf_counter() - started
    records = []
    base = dict(
        dataset=config.dataset.name, algorithm=cell.algorithm, k=cell.k,
        suppression=cell.suppression, metric=cell.metric,
        seed=config.algo_seed, num_classes=partition.num_classes,
        suppressed_count=partition.suppressed_count, node_levels=node_levels,
        wall_time=elapsed,
    )
    for classifier, (acc, prec, rec, f1) in scores.items():
        records.append(RunRecord(classifier=classifier, accuracy=acc,
                                 precision=prec, recall=rec, f1=f1, **base))
    if not scores:
        records.append(RunRecord(classifier="export_only", accuracy=None,
                                 precision=None, recall=None, f1=None, **base))
    return records


def _baseline_records(ctx: _SweepContext) -> list[RunRecord]:
    config = ctx.config
    records = []
    test_y = [ctx.table.target_labels()[i] for i in ctx.test_ids]
    base = dict(
        dataset=config.dataset.name, algorithm="none", k=0, suppression=0.0,
        metric="", seed=config.algo_seed, num_classes=0, suppressed_count=0,
        node_levels="",
    )
    if "zero_rule" in config.classifiers:
        started = time.perf_counter()
        pred, _ = zero_rule_predict(test_y)
        report = evaluate(pred, test_y,
                          positive_class=config.dataset.positive_class)
        records.append(RunRecord(
            classifier="zero_rule", accuracy=report.accuracy,
            precision=report.precision, recall=report.recall, f1=report.f1,
            wall_time=time.perf_counter() - started, **base,
        ))
    scores = _score(ctx, ctx.table)
    for classifier, (acc, prec, rec, f1) in scores.items():
        records.append(RunRecord(classifier=classifier, accuracy=acc,
                                 precision=prec, recall=rec, f1=f1,
                                 wall_time=0.0, **base))
    return records


def run_sweep(config: ExperimentConfig, jobs: int = 1,
              verify: bool = False) -> SweepResult:
    """Execute the sweep; returns records plus per-cell failures."""
    from .tabular import split_train_test

    table, hierarchies = load_dataset(config.dataset)
    train_ids, test_ids = split_train_test(table, config.split)
    ctx = _SweepContext(table, hierarchies, train_ids, test_ids, config, verify)
    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    records: list[RunRecord] = _baseline_records(ctx)
    failures: list[CellFailure] = []
    cells = _cells(config)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [(cell, pool.submit(_run_cell, ctx, cell))
                       for cell in cells]
            for cell, future in futures:
                try:
                    records.extend(future.result())
                except Exception as exc:  # cell isolation: record and go on
                    failures.append(CellFailure(cell, str(exc)))
    else:
        for cell in cells:
            try:
                records.extend(_run_cell(ctx, cell))
            except Exception as exc:
                failures.append(CellFailure(cell, str(exc)))
    write_results_csv(records, out_dir / "results.csv")
    write_timings_csv(records, out_dir / "timings.csv")
    qid_names = [a.name for a in table.qids]
    if any(r.algorithm == "ola" for r in records):
        for sup in config.suppression_levels:
            subset = [r for r in records
                      if r.algorithm == "ola" and r.suppression == sup]
            if subset:
                emit_generalisation_trace(
                    subset, qid_names,
                    out_dir / f"trace_ola_{config.metric.value}_s{sup:g}.csv",
                )
    if failures:
        with (out_dir / "failures.csv").open("w", newline="",
                                             encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(("algorithm", "k", "suppression", "metric", "error"))
            for f in failures:
                writer.writerow((f.cell.algorithm, f.cell.k,
                                 _fmt(f.cell.suppression), f.cell.metric,
                                 f.message))
    return SweepResult(records, failures, out_dir)


def spearman_report(table: Table) -> list[tuple[str, float]]:
    """Spearman correlation of every encoded feature against the target."""
    from .mlbridge import spearman_rank_correlation

    encoded, labels = encode_for_ml(table)
    classes = sorted(set(labels))
    code = {label: i for i, label in enumerate(classes)}
    target = [float(code[l]) for l in labels]
    out = []
    for ci, name in enumerate(encoded.feature_names):
        out.append((name, spearman_rank_correlation(encoded.rows[:, ci], target)))
    return out
