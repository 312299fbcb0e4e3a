import csv
import json

import pytest

from anonylat.cli import main
from anonylat.datagen import write_synthetic_dataset
from anonylat.errors import SchemaError
from anonylat.experiment import (
    DatasetSpec,
    ExperimentConfig,
    load_dataset,
    run_sweep,
    spearman_report,
)
from anonylat.metrics import MetricKind
from anonylat.oracle import brute_force_census
from anonylat.tabular import SplitSpec, load_csv


@pytest.fixture(scope="module")
def synth_dir(tmp_path_factory):
    directory = tmp_path_factory.mktemp("synth")
    write_synthetic_dataset(directory, n=120, seed=5)
    return directory


def make_config(synth_dir, out_dir, **overrides) -> ExperimentConfig:
    dataset = DatasetSpec.from_json(synth_dir / "synth.schema.json")
    defaults = dict(
        dataset=dataset,
        algorithms=("ola", "mondrian", "tdg", "cb"),
        k_values=(1, 2, 4),
        suppression_levels=(0.03,),
        metric=MetricKind.GWEIGHT,
        classifiers=("knn", "zero_rule"),
        knn_neighbours=5,
        split=SplitSpec(0.7, 17),
        algo_seed=3,
        output_dir=out_dir,
        write_exports=True,
        write_homogeneity=True,
    )
    defaults.update(overrides)
    return ExperimentConfig(**defaults)


class TestConfig:
    def test_from_json_roundtrip(self, synth_dir, tmp_path):
        doc = {
            "dataset": "synth.schema.json",
            "algorithms": ["mondrian"],
            "k_values": [2, 5],
            "metric": "dm",
            "classifiers": ["knn"],
            "split": {"train_fraction": 0.7, "seed": 4},
            "output_dir": str(tmp_path / "out"),
        }
        cfg_path = synth_dir / "config_test.json"
        cfg_path.write_text(json.dumps(doc), encoding="utf-8")
        config = ExperimentConfig.from_json(cfg_path)
        assert config.metric is MetricKind.DM
        assert config.dataset.name == "synth"

    def test_unsorted_k_rejected(self, synth_dir, tmp_path):
        with pytest.raises(SchemaError):
            make_config(synth_dir, tmp_path, k_values=(5, 2))

    def test_k_below_two_only_leading_one(self, synth_dir, tmp_path):
        with pytest.raises(SchemaError):
            make_config(synth_dir, tmp_path, k_values=(1, 1, 2))

    def test_unknown_algorithm_rejected(self, synth_dir, tmp_path):
        with pytest.raises(SchemaError):
            make_config(synth_dir, tmp_path, algorithms=("magic",))

    def test_qid_without_hierarchy_rejected(self, synth_dir):
        doc = json.loads((synth_dir / "synth.schema.json").read_text())
        del doc["attributes"][0]["hierarchy"]
        bad = synth_dir / "bad.schema.json"
        bad.write_text(json.dumps(doc), encoding="utf-8")
        with pytest.raises(SchemaError):
            DatasetSpec.from_json(bad)


class TestSweep:
    def test_record_counts_and_baselines(self, synth_dir, tmp_path):
        config = make_config(synth_dir, tmp_path / "out")
        result = run_sweep(config)
        assert result.ok
        # 2 baselines + 4 algorithms x 3 k values x 1 classifier
        assert len(result.records) == 2 + 4 * 3
        by_cell = {(r.algorithm, r.k, r.classifier): r for r in result.records}
        baseline = by_cell[("none", 0, "knn")]
        for algo in ("ola", "mondrian", "tdg", "cb"):
            k1 = by_cell[(algo, 1, "knn")]
            assert (k1.accuracy, k1.precision, k1.recall, k1.f1) == (
                baseline.accuracy, baseline.precision, baseline.recall,
                baseline.f1,
            ), algo

    def test_zero_rule_accuracy_is_modal_frequency(self, synth_dir, tmp_path):
        config = make_config(synth_dir, tmp_path / "out")
        result = run_sweep(config)
        table, _ = load_dataset(config.dataset)
        from anonylat.tabular import split_train_test

        _, test_ids = split_train_test(table, config.split)
        labels = [table.target_labels()[i] for i in test_ids]
        modal_freq = max(labels.count(l) for l in set(labels)) / len(labels)
        zero = next(r for r in result.records if r.classifier == "zero_rule")
        assert zero.accuracy == modal_freq

    def test_rerun_is_byte_identical(self, synth_dir, tmp_path):
        config_a = make_config(synth_dir, tmp_path / "a")
        config_b = make_config(synth_dir, tmp_path / "b")
        run_sweep(config_a)
        run_sweep(config_b)
        for name in ("results.csv", "trace_ola_gweight_s0.03.csv"):
            assert (tmp_path / "a" / name).read_bytes() == \
                (tmp_path / "b" / name).read_bytes()
        exports_a = sorted((tmp_path / "a" / "exports").iterdir())
        exports_b = sorted((tmp_path / "b" / "exports").iterdir())
        assert [p.name for p in exports_a] == [p.name for p in exports_b]
        for pa, pb in zip(exports_a, exports_b):
            assert pa.read_bytes() == pb.read_bytes()

    def test_jobs_parallel_matches_serial(self, synth_dir, tmp_path):
        serial = make_config(synth_dir, tmp_path / "serial",
                             k_values=(2, 4), algorithms=("mondrian", "cb"))
        parallel = make_config(synth_dir, tmp_path / "parallel",
                               k_values=(2, 4), algorithms=("mondrian", "cb"))
        run_sweep(serial, jobs=1)
        run_sweep(parallel, jobs=2)
        assert (tmp_path / "serial" / "results.csv").read_bytes() == \
            (tmp_path / "parallel" / "results.csv").read_bytes()

    def test_census_matches_export(self, synth_dir, tmp_path):
        from dataclasses import replace

        config = make_config(synth_dir, tmp_path / "out",
                             algorithms=("ola", "tdg"), k_values=(2, 4))
        result = run_sweep(config)
        # reload exports as raw text: suppressed rows carry '*' in numeric QIDs
        text_schema = tuple(
            replace(a, kind="categorical") for a in config.dataset.schema
        )
        for record in result.records:
            if record.algorithm == "none":
                continue
            stem = f"synth_{record.algorithm}_k{record.k}"
            if record.algorithm == "ola":
                stem += f"_s{record.suppression:g}_{record.metric}"
            export = tmp_path / "out" / "exports" / f"{stem}.csv"
            exported = load_csv(export, text_schema, drop_missing=False)
            census = brute_force_census(exported)
            star = tuple("*" for _ in exported.qid_indices)
            groups = census.as_dict()
            if record.suppressed_count:
                assert groups.get(star, 0) == record.suppressed_count
                assert census.num_groups == record.num_classes + 1
            else:
                assert census.num_groups == record.num_classes

    def test_failing_cell_is_isolated(self, synth_dir, tmp_path):
        config = make_config(synth_dir, tmp_path / "out",
                             algorithms=("mondrian",), k_values=(2, 1000))
        result = run_sweep(config)
        assert not result.ok
        assert len(result.failures) == 1
        assert result.failures[0].cell.k == 1000
        assert (tmp_path / "out" / "failures.csv").exists()
        ks = {r.k for r in result.records if r.algorithm == "mondrian"}
        assert ks == {2}

    def test_export_only_writes_encoded_matrices(self, synth_dir, tmp_path):
        config = make_config(synth_dir, tmp_path / "out",
                             algorithms=("mondrian",), k_values=(4,),
                             classifiers=("export_only",))
        result = run_sweep(config)
        assert result.ok
        record = next(r for r in result.records if r.algorithm == "mondrian")
        assert record.classifier == "export_only" and record.accuracy is None
        encoded = tmp_path / "out" / "exports" / "synth_mondrian_k4.encoded.csv"
        rows = list(csv.reader(encoded.open()))
        header = rows[0]
        assert header[-2:] == ["target", "split"]
        assert "age" in header
        assert {r[-1] for r in rows[1:]} == {"train", "test"}
        # one numeric column per numeric attribute, one-hot for categoricals
        assert sum(1 for h in header[:-2] if "=" not in h) == 2

    def test_homogeneity_report_written(self, synth_dir, tmp_path):
        config = make_config(synth_dir, tmp_path / "out",
                             algorithms=("mondrian",), k_values=(4,))
        run_sweep(config)
        path = tmp_path / "out" / "homogeneity" / "synth_mondrian_k4.csv"
        rows = list(csv.reader(path.open()))
        assert rows[0] == ["class_id", "size", "homogeneity"]
        assert rows[-1][0] == "summary"


class TestSpearmanReport:
    def test_feature_columns_scored(self, synth_dir):
        table, _ = load_dataset(DatasetSpec.from_json(
            synth_dir / "synth.schema.json"))
        report = dict(spearman_report(table))
        assert "age" in report
        assert all(-1.0 <= v <= 1.0 for v in report.values() if v == v)


class TestCli:
    def test_run_exit_codes(self, synth_dir, tmp_path):
        doc = {
            "dataset": "synth.schema.json",
            "algorithms": ["mondrian"],
            "k_values": [2],
            "classifiers": ["knn"],
            "split": {"train_fraction": 0.7, "seed": 1},
            "output_dir": str(tmp_path / "ok"),
        }
        good = synth_dir / "cli_ok.json"
        good.write_text(json.dumps(doc), encoding="utf-8")
        assert main(["run", "--config", str(good)]) == 0
        doc["k_values"] = [2, 1000]
        doc["output_dir"] = str(tmp_path / "fail")
        bad = synth_dir / "cli_fail.json"
        bad.write_text(json.dumps(doc), encoding="utf-8")
        assert main(["run", "--config", str(bad)]) == 2

    def test_anonymise_and_analyse(self, synth_dir, tmp_path):
        out = tmp_path / "anon.csv"
        rc = main([
            "anonymise", "--dataset", str(synth_dir / "synth.csv"),
            "--schema", str(synth_dir / "synth.schema.json"),
            "--hier", str(synth_dir / "hierarchies"),
            "--algo", "mondrian", "--k", "3", "--out", str(out),
        ])
        assert rc == 0
        assert out.exists()
        meta = json.loads((tmp_path / "anon.csv.meta.json").read_text())
        assert meta["algorithm"] == "mondrian" and meta["k"] == 3

        homog = tmp_path / "homog.csv"
        rc = main([
            "analyse", "homogeneity",
            "--dataset", str(synth_dir / "synth.csv"),
            "--schema", str(synth_dir / "synth.schema.json"),
            "--algo", "cb", "--k", "4", "--seed", "2", "--out", str(homog),
        ])
        assert rc == 0 and homog.exists()

        spear = tmp_path / "spearman.csv"
        rc = main([
            "analyse", "spearman",
            "--dataset", str(synth_dir / "synth.csv"),
            "--schema", str(synth_dir / "synth.schema.json"),
            "--out", str(spear),
        ])
        assert rc == 0
        header = spear.read_text().splitlines()[0]
        assert header == "feature,spearman"

    def test_trace_from_results(self, synth_dir, tmp_path):
        config_doc = {
            "dataset": "synth.schema.json",
            "algorithms": ["ola"],
            "k_values": [2, 4],
            "classifiers": ["knn"],
            "split": {"train_fraction": 0.7, "seed": 1},
            "output_dir": str(tmp_path / "out"),
        }
        cfg = synth_dir / "cli_trace.json"
        cfg.write_text(json.dumps(config_doc), encoding="utf-8")
        assert main(["run", "--config", str(cfg)]) == 0
        trace = tmp_path / "trace.csv"
        rc = main([
            "analyse", "trace",
            "--results", str(tmp_path / "out" / "results.csv"),
            "--schema", str(synth_dir / "synth.schema.json"),
            "--out", str(trace),
        ])
        assert rc == 0
        rows = list(csv.reader(trace.open()))
        assert rows[0] == ["k", "zip", "sex", "education", "age",
                           "suppressed_count", "f1"]
        assert [r[0] for r in rows[1:]] == ["2", "4"]
