"""Command-line interface: sweep runner, one-shot anonymiser and analyses.

Exit codes: 0 on full success, 2 when any sweep cell fails.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

from .anonymizers import ANONYMISERS, AlgoParams, partition_violation
from .errors import AnonylatError
from .experiment import (
    DatasetSpec,
    ExperimentConfig,
    emit_generalisation_trace,
    emit_homogeneity_report,
    export_anonymised,
    load_dataset,
    run_sweep,
    spearman_report,
)
from .metrics import MetricKind


def _dataset_from_args(args) -> DatasetSpec:
    spec = DatasetSpec.from_json(args.schema)
    if getattr(args, "hier", None):
        spec = spec.with_hierarchy_dir(args.hier)
    return spec


def _cmd_run(args) -> int:
    config = ExperimentConfig.from_json(args.config)
    result = run_sweep(config, jobs=args.jobs, verify=args.verify)
    print(f"wrote {len(result.records)} records to {result.output_dir}/results.csv")
    if result.failures:
        for failure in result.failures:
            print(f"cell failed: {failure.cell} -> {failure.message}",
                  file=sys.stderr)
        return 2
    return 0


def _cmd_anonymise(args) -> int:
    spec = _dataset_from_args(args)
    table, hierarchies = load_dataset(spec, csv_path=args.dataset)
    params = AlgoParams(k=args.k, max_sup=args.max_sup,
                        metric=MetricKind(args.metric), seed=args.seed)
    partition = ANONYMISERS[args.algo](table, hierarchies, params)
    violation = partition_violation(partition, table, args.k, hierarchies)
    if violation is not None:
        print(f"verification failed: {violation}", file=sys.stderr)
        return 2
    export_anonymised(table, partition, args.out, hierarchies,
                      extra_meta={"suppression": args.max_sup,
                                  "metric": args.metric, "seed": args.seed})
    print(f"{args.algo}: {partition.num_classes} classes, "
          f"{partition.suppressed_count} suppressed -> {args.out}")
    return 0


def _cmd_analyse_trace(args) -> int:
    rows = []
    with Path(args.results).open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            rows.append(row)
    ola_rows = [r for r in rows if r["algorithm"] == "ola" and r["node_levels"]]
    skipped = len(rows) - len(ola_rows)
    if skipped:
        print(f"skipping {skipped} non-OLA rows")
    if not ola_rows:
        print("no OLA runs with recorded nodes in the results file",
              file=sys.stderr)
        return 2
    n_qids = len(ola_rows[0]["node_levels"].split("|"))
    if args.schema:
        spec = DatasetSpec.from_json(args.schema)
        qid_names = [a.name for a in spec.schema if a.role == "qid"]
    else:
        qid_names = [f"qid{i}" for i in range(n_qids)]
    from .experiment import RunRecord

    records = [
        RunRecord(
            dataset=r["dataset"], algorithm=r["algorithm"], k=int(r["k"]),
            suppression=float(r["suppression"]), metric=r["metric"],
            classifier=r["classifier"], seed=int(r["seed"]),
            accuracy=None, precision=None, recall=None,
            f1=float(r["f1"]) if r["f1"] else None,
            num_classes=int(r["num_classes"]),
            suppressed_count=int(r["suppressed_count"]),
            node_levels=r["node_levels"],
        )
        for r in ola_rows
    ]
    count = emit_generalisation_trace(records, qid_names, args.out)
    print(f"wrote trace for {count} k values to {args.out}")
    return 0


def _cmd_analyse_homogeneity(args) -> int:
    spec = _dataset_from_args(args)
    table, hierarchies = load_dataset(spec, csv_path=args.dataset)
    params = AlgoParams(k=args.k, max_sup=args.max_sup,
                        metric=MetricKind(args.metric), seed=args.seed)
    partition = ANONYMISERS[args.algo](table, hierarchies, params)
    violation = partition_violation(partition, table, args.k, hierarchies)
    if violation is not None:
        print(f"verification failed: {violation}", file=sys.stderr)
        return 2
    emit_homogeneity_report(partition, table, args.k, args.out)
    print(f"{partition.num_classes} classes -> {args.out}")
    return 0


def _cmd_analyse_spearman(args) -> int:
    spec = _dataset_from_args(args)
    table, _ = load_dataset(spec, csv_path=args.dataset)
    with Path(args.out).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(("feature", "spearman"))
        for name, r in spearman_report(table):
            writer.writerow((name, "" if r != r else f"{r:.6f}"))
    print(f"wrote correlations to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="anonylat",
        description="k-anonymisation sweeps and utility analyses",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a sweep from a JSON config")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--jobs", type=int, default=1)
    p_run.add_argument("--verify", action="store_true",
                       help="attach oracle cross-checks (test-scale inputs)")
    p_run.set_defaults(func=_cmd_run)

    def dataset_args(p, with_out=True):
        p.add_argument("--dataset", required=True, help="CSV file")
        p.add_argument("--schema", required=True, help="dataset schema JSON")
        p.add_argument("--hier", help="override directory for file hierarchies")
        if with_out:
            p.add_argument("--out", required=True)

    p_anon = sub.add_parser("anonymise", help="anonymise one dataset once")
    dataset_args(p_anon)
    p_anon.add_argument("--algo", required=True, choices=sorted(ANONYMISERS))
    p_anon.add_argument("--k", type=int, required=True)
    p_anon.add_argument("--max-sup", type=float, default=0.0, dest="max_sup")
    p_anon.add_argument("--metric", default="gweight",
                        choices=[m.value for m in MetricKind])
    p_anon.add_argument("--seed", type=int, default=0)
    p_anon.set_defaults(func=_cmd_anonymise)

    p_analyse = sub.add_parser("analyse", help="post-hoc analyses")
    sub_analyse = p_analyse.add_subparsers(dest="analysis", required=True)

    p_trace = sub_analyse.add_parser(
        "trace", help="per-k OLA generalisation levels from a results.csv")
    p_trace.add_argument("--results", required=True)
    p_trace.add_argument("--schema", help="dataset schema JSON, names the QID columns")
    p_trace.add_argument("--out", required=True)
    p_trace.set_defaults(func=_cmd_analyse_trace)

    p_homog = sub_analyse.add_parser(
        "homogeneity", help="equivalence-class homogeneity for one run")
    dataset_args(p_homog)
    p_homog.add_argument("--algo", required=True, choices=sorted(ANONYMISERS))
    p_homog.add_argument("--k", type=int, required=True)
    p_homog.add_argument("--max-sup", type=float, default=0.0, dest="max_sup")
    p_homog.add_argument("--metric", default="gweight",
                         choices=[m.value for m in MetricKind])
    p_homog.add_argument("--seed", type=int, default=0)
    p_homog.set_defaults(func=_cmd_analyse_homogeneity)

    p_spear = sub_analyse.add_parser(
        "spearman", help="feature/target rank correlations of a dataset")
    dataset_args(p_spear)
    p_spear.set_defaults(func=_cmd_analyse_spearman)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except AnonylatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
