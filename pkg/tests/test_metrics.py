import pytest

from anonylat.anonymizers import build_partition
from anonylat.errors import DegeneratePartitionError
from anonylat.hierarchy import GeneralisedValue
from anonylat.lattice import apply_node, check_k_anonymous, iter_lattice
from anonylat.metrics import (
    MetricKind,
    aecs_from_sizes,
    dm_from_sizes,
    metric_aecs,
    metric_dm,
    metric_gweight,
    metric_prec,
    ncp_class,
    ncp_merge,
)
from anonylat.tabular import AttributeSchema
from helpers import postal_vgh, random_table


def make_partition(sizes, suppressed=()):
    sig = (GeneralisedValue("*"),)
    classes = []
    next_id = 0
    for size in sizes:
        classes.append((sig + (GeneralisedValue(str(len(classes))),),
                        list(range(next_id, next_id + size))))
        next_id += size
    return build_partition(classes, suppressed, 1, "mondrian")


class TestPrec:
    def test_bottom_node_is_zero(self):
        assert metric_prec((0, 0), (2, 2), 10).value == 0.0

    def test_top_node_is_one(self):
        assert metric_prec((2, 2), (2, 2), 10).value == 1.0

    def test_derived_example(self):
        assert metric_prec((1, 2), (2, 2), 10, 0).value == 0.75

    def test_suppressed_count_as_fully_generalised(self):
        # everything suppressed is equivalent to the top node
        assert metric_prec((0, 0), (2, 2), 10, 10).value == 1.0

    def test_height_zero_qid_excluded(self):
        assert metric_prec((1, 0), (2, 0), 10).value == 0.5


class TestGweight:
    def test_bottom(self):
        assert metric_gweight((0, 0, 0), (1, 2, 3)).value == 0.0

    def test_top_unit_weights(self):
        assert metric_gweight((1, 2, 3), (1, 2, 3)).value == 3.0

    def test_derived_example(self):
        assert metric_gweight((1, 1), (2, 1)).value == 1.5

    def test_weights(self):
        assert metric_gweight((1, 1), (2, 1), weights=(2.0, 0.5)).value == 1.5


class TestAecs:
    def test_singletons(self):
        assert metric_aecs(make_partition([1] * 6)).value == 1.0

    def test_single_class(self):
        assert metric_aecs(make_partition([9])).value == 9.0

    def test_derived(self):
        assert metric_aecs(make_partition([3, 3])).value == 3.0

    def test_degenerate(self):
        with pytest.raises(DegeneratePartitionError):
            aecs_from_sizes([])


class TestDm:
    def test_single_class(self):
        assert metric_dm(make_partition([7]), 7).value == 49.0

    def test_all_suppressed(self):
        assert dm_from_sizes([], 5, 5) == 25.0

    def test_derived(self):
        part = make_partition([2, 3], suppressed=[5])
        assert metric_dm(part, 6).value == 19.0


ZIP_ATTR = AttributeSchema("zip", "categorical", "qid")
AGE_ATTR = AttributeSchema("age", "numerical", "qid")


class TestNcp:
    def setup_method(self):
        self.hiers = {"zip": postal_vgh()}
        self.domains = {"age": (20.0, 60.0)}
        self.qids = (ZIP_ATTR, AGE_ATTR)

    def sig(self, zip_label, lo, hi):
        label = f"[{lo}-{hi})" if lo != hi else str(lo)
        return (GeneralisedValue(zip_label),
                GeneralisedValue(label, (float(lo), float(hi))))

    def test_all_leaf_signature_is_zero(self):
        assert ncp_class(self.sig("3500", 25, 25), self.qids, self.hiers,
                         self.domains) == 0.0

    def test_fully_generalised_is_qid_count(self):
        sig = (GeneralisedValue("*"), GeneralisedValue("*", (20.0, 60.0)))
        assert ncp_class(sig, self.qids, self.hiers, self.domains) == 2.0

    def test_numeric_interval_fraction(self):
        sig = (GeneralisedValue("3500"),
               GeneralisedValue("[20-30)", (20.0, 30.0)))
        assert ncp_class(sig, self.qids, self.hiers, self.domains) == 0.25

    def test_zero_width_domain_contributes_zero(self):
        sig = (GeneralisedValue("3500"), GeneralisedValue("5", (5.0, 5.0)))
        assert ncp_class(sig, self.qids, self.hiers, {"age": (5.0, 5.0)}) == 0.0

    def test_merge_identical_singletons_is_zero(self):
        a = self.sig("3500", 25, 25)
        assert ncp_merge(a, a, self.qids, self.hiers, self.domains) == 0.0

    def test_merge_zip_siblings(self):
        a = self.sig("3500", 25, 25)
        b = self.sig("3506", 25, 25)
        assert ncp_merge(a, b, self.qids, self.hiers, self.domains) == 0.5

    def test_merge_with_root_absorbs(self):
        a = self.sig("3500", 25, 25)
        root = (GeneralisedValue("*"), GeneralisedValue("*", (20.0, 60.0)))
        merged = ncp_merge(a, root, self.qids, self.hiers, self.domains)
        assert merged == ncp_class(root, self.qids, self.hiers, self.domains)

    def test_merge_symmetry(self):
        a = self.sig("3500", 25, 30)
        b = self.sig("3104", 40, 40)
        ab = ncp_merge(a, b, self.qids, self.hiers, self.domains)
        ba = ncp_merge(b, a, self.qids, self.hiers, self.domains)
        assert ab == ba


def test_node_metrics_monotone_on_upward_paths():
    # with k=1 nothing is suppressed, so all four metrics must not decrease
    # along any one-step-up move anywhere in the lattice
    for seed in range(6):
        table, hiers = random_table(seed, max_qids=3, max_rows=25)
        heights = tuple(hiers[a.name].height for a in table.qids)
        n = table.n_rows
        for node in iter_lattice(heights):
            gen = apply_node(table, node, hiers)
            _, candidates = check_k_anonymous(gen, 1, 0.0)
            assert candidates == ()
            sizes = _census_sizes(gen)
            base = {
                MetricKind.PREC: metric_prec(node, heights, n).value,
                MetricKind.GWEIGHT: metric_gweight(node, heights).value,
                MetricKind.AECS: aecs_from_sizes(sizes),
                MetricKind.DM: dm_from_sizes(sizes, 0, n),
            }
            for i, h in enumerate(heights):
                if node[i] == h:
                    continue
                up = node[:i] + (node[i] + 1,) + node[i + 1 :]
                gen_up = apply_node(table, up, hiers)
                sizes_up = _census_sizes(gen_up)
                assert metric_prec(up, heights, n).value >= base[MetricKind.PREC]
                assert metric_gweight(up, heights).value >= base[MetricKind.GWEIGHT]
                assert aecs_from_sizes(sizes_up) >= base[MetricKind.AECS]
                assert dm_from_sizes(sizes_up, 0, n) >= base[MetricKind.DM]


def _census_sizes(table):
    from collections import Counter

    counts = Counter(
        tuple(row[j] for j in table.qid_indices) for row in table.rows
    )
    return list(counts.values())


def test_dm_lower_bound_with_min_class_size():
    part = make_partition([3, 4, 5])
    k = 3
    assert metric_dm(part, 12).value >= k * k * len(part.classes)
