"""Encoding of (anonymised) tables plus the built-in classifiers and scoring.

Numerical cells always occupy exactly one column: a generalised interval
contributes its midpoint, never a one-hot of its label text. Categorical
cells are one-hot over the labels present in the encoded table.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import stats

from .errors import ContractError, SchemaError
from .hierarchy import GeneralisedValue
from .tabular import Table


@dataclass(frozen=True)
class EncodedMatrix:
    feature_names: tuple[str, ...]
    rows: np.ndarray  # N x d, float64, aligned with the source table's ids

    @property
    def n_rows(self) -> int:
        return self.rows.shape[0]


def _numeric_value(cell, attr_name: str) -> float:
    if isinstance(cell, GeneralisedValue):
        if cell.interval is None:
            raise SchemaError(
                f"{attr_name}: generalised numeric cell {cell.label!r} "
                f"has no interval to take the midpoint of"
            )
        return cell.midpoint()
    return float(cell)


def _label_value(cell) -> str:
    if isinstance(cell, GeneralisedValue):
        return cell.label
    return str(cell)


def encode_for_ml(table: Table) -> tuple[EncodedMatrix, list[str]]:
    """Encode every non-target attribute; return the matrix and target labels.

    Numerical: interval midpoint (a leaf is its own midpoint). Categorical:
    one-hot over the distinct labels present in this table, in sorted
    order. Encode the whole table once and slice by split ids so train and
    test share one vocabulary.
    """
    names: list[str] = []
    columns: list[np.ndarray] = []
    n = table.n_rows
    for attr, j in ((a, i) for i, a in enumerate(table.schema)):
        if attr.role == "target":
            continue
        if attr.kind == "numerical":
            names.append(attr.name)
            columns.append(
                np.array([_numeric_value(row[j], attr.name) for row in table.rows])
            )
        else:
            labels = [_label_value(row[j]) for row in table.rows]
            vocabulary = sorted(set(labels))
            index = {label: li for li, label in enumerate(vocabulary)}
            codes = np.array([index[l] for l in labels])
            for li, label in enumerate(vocabulary):
                names.append(f"{attr.name}={label}")
                columns.append((codes == li).astype(float))
    matrix = np.column_stack(columns) if columns else np.zeros((n, 0))
    if not np.isfinite(matrix).all():
        raise ContractError("encoded matrix contains non-finite entries")
    return EncodedMatrix(tuple(names), matrix), table.target_labels()


def export_encoded_csv(encoded: EncodedMatrix, labels: Sequence[str], path,
                       train_ids: Sequence[int] | None = None,
                       test_ids: Sequence[int] | None = None) -> None:
    """Write the encoded matrix for external classifiers.

    Columns are the feature names plus "target"; when a split is given, a
    final "split" column marks each row train or test.
    """
    import csv
    from pathlib import Path

    from .hierarchy import format_number

    split_of = {}
    if train_ids is not None:
        split_of.update((i, "train") for i in train_ids)
    if test_ids is not None:
        split_of.update((i, "test") for i in test_ids)
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        header = list(encoded.feature_names) + ["target"]
        if split_of:
            header.append("split")
        writer.writerow(header)
        for i in range(encoded.n_rows):
            row = [format_number(float(v)) for v in encoded.rows[i]]
            row.append(labels[i])
            if split_of:
                row.append(split_of.get(i, ""))
            writer.writerow(row)


def knn_classify(train_rows: np.ndarray, train_labels: Sequence[str],
                 test_rows: np.ndarray, n_neighbours: int = 10,
                 chunk: int = 512) -> list[str]:
    """Euclidean k-NN with a deterministic, order-independent vote.

    The neighbourhood is every training point within the n-th smallest
    distance (distance ties are all included). Vote ties break by the
    smaller cumulative distance among the tied classes, then label order.
    """
    if train_rows.shape[0] == 0:
        raise ContractError("k-NN needs a nonempty training set")
    if n_neighbours > train_rows.shape[0]:
        raise ContractError(
            f"n_neighbours={n_neighbours} exceeds the {train_rows.shape[0]} "
            f"training rows"
        )
    labels = sorted(set(train_labels))
    label_idx = {l: i for i, l in enumerate(labels)}
    y = np.array([label_idx[l] for l in train_labels])
    one_hot = np.zeros((len(y), len(labels)))
    one_hot[np.arange(len(y)), y] = 1.0
    train_sq = (train_rows ** 2).sum(axis=1)
    predictions: list[str] = []
    for start in range(0, test_rows.shape[0], chunk):
        block = test_rows[start : start + chunk]
        d2 = (
            (block ** 2).sum(axis=1)[:, None]
            + train_sq[None, :]
            - 2.0 * block @ train_rows.T
        )
        np.maximum(d2, 0.0, out=d2)
        kth = np.partition(d2, n_neighbours - 1, axis=1)[:, n_neighbours - 1]
        mask = d2 <= kth[:, None]
        votes = mask.astype(float) @ one_hot
        cumdist = (np.sqrt(d2) * mask) @ one_hot
        for r in range(block.shape[0]):
            order = np.lexsort(
                (np.arange(len(labels)), cumdist[r], -votes[r])
            )
            predictions.append(labels[int(order[0])])
    return predictions


def zero_rule_predict(test_labels: Sequence[str]) -> tuple[list[str], float]:
    """Predict the modal test label everywhere; returns (predictions, accuracy)."""
    if not test_labels:
        raise ContractError("zero-rule needs a nonempty label vector")
    counts: dict[str, int] = {}
    for l in test_labels:
        counts[l] = counts.get(l, 0) + 1
    modal = min(counts, key=lambda l: (-counts[l], l))
    accuracy = counts[modal] / len(test_labels)
    return [modal] * len(test_labels), accuracy


@dataclass(frozen=True)
class ClassCounts:
    tp: int
    tn: int
    fp: int
    fn: int


@dataclass(frozen=True)
class EvalReport:
    accuracy: float
    precision: float
    recall: float
    f1: float
    per_class: dict[str, ClassCounts]


def _prf(counts: ClassCounts) -> tuple[float, float, float]:
    prec = counts.tp / (counts.tp + counts.fp) if counts.tp + counts.fp else 0.0
    rec = counts.tp / (counts.tp + counts.fn) if counts.tp + counts.fn else 0.0
    f1 = 2 * prec * rec / (prec + rec) if prec + rec else 0.0
    return prec, rec, f1


def evaluate(predicted: Sequence[str], actual: Sequence[str],
             positive_class: str | None = None, average: str = "macro",
             labels: Sequence[str] | None = None) -> EvalReport:
    """Score predictions with one-vs-rest counts.

    With a positive class the binary convention applies; otherwise
    precision/recall/F1 are averaged over the label set (macro or
    weighted). Predictions outside the label set are wrong for every
    positive class.
    """
    if len(predicted) != len(actual) or not actual:
        raise ContractError("predicted and actual must have equal nonzero length")
    if average not in ("macro", "weighted"):
        raise SchemaError(f"unknown averaging scheme {average!r}")
    universe = list(labels) if labels is not None else sorted(set(actual))
    n = len(actual)
    per_class: dict[str, ClassCounts] = {}
    for cls in universe:
        tp = sum(1 for p, a in zip(predicted, actual) if p == cls and a == cls)
        fp = sum(1 for p, a in zip(predicted, actual) if p == cls and a != cls)
        fn = sum(1 for p, a in zip(predicted, actual) if p != cls and a == cls)
        per_class[cls] = ClassCounts(tp, n - tp - fp - fn, fp, fn)
    accuracy = sum(1 for p, a in zip(predicted, actual) if p == a) / n
    if positive_class is not None:
        if positive_class not in per_class:
            per_class[positive_class] = ClassCounts(
                0,
                sum(1 for p, a in zip(predicted, actual)
                    if p != positive_class and a != positive_class),
                sum(1 for p in predicted if p == positive_class),
                sum(1 for a in actual if a == positive_class),
            )
        prec, rec, f1 = _prf(per_class[positive_class])
        return EvalReport(accuracy, prec, rec, f1, per_class)
    triples = [_prf(per_class[cls]) for cls in universe]
    if average == "macro":
        weights = [1.0 / len(universe)] * len(universe)
    else:
        weights = [
            sum(1 for a in actual if a == cls) / n for cls in universe
        ]
    prec = sum(w * t[0] for w, t in zip(weights, triples))
    rec = sum(w * t[1] for w, t in zip(weights, triples))
    f1 = sum(w * t[2] for w, t in zip(weights, triples))
    return EvalReport(accuracy, prec, rec, f1, per_class)


def spearman_rank_correlation(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Spearman's rank correlation; nan when either column has no variance."""
    if len(xs) != len(ys) or len(xs) < 2:
        raise ContractError("need two equally long columns of length >= 2")
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if np.all(x == x[0]) or np.all(y == y[0]):
        return float("nan")
    return float(stats.spearmanr(x, y).statistic)


def homogeneity_histogram(partition, table: Table) -> list[tuple[int, float, int]]:
    """(class id, homogeneity, size) per class; homogeneity is the modal share."""
    target = table.target_index
    out = []
    for ci, ec in enumerate(partition.classes):
        counts: dict[str, int] = {}
        for rid in ec.member_ids:
            label = str(table.rows[rid][target])
            counts[label] = counts.get(label, 0) + 1
        modal = max(counts.values())
        out.append((ci, modal / len(ec.member_ids), len(ec.member_ids)))
    return out
