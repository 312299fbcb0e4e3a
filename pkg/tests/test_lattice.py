import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from anonylat.errors import TaggingError
from anonylat.lattice import (
    Tag,
    TagStore,
    apply_node,
    check_k_anonymous,
    iter_between_at_height,
    iter_lattice,
    k_minimal_nodes,
    lattice_size,
    tag_and_propagate,
)
from anonylat.tabular import AttributeSchema, Table
from helpers import random_table


class TestApplyNode:
    def test_identity_node(self, zip_sex):
        table, hiers = zip_sex
        out = apply_node(table, (0, 0), hiers)
        assert [c.label for row in out.rows for c in row[:2]] == [
            str(c) for row in table.rows for c in row[:2]
        ]

    def test_top_node(self, zip_sex):
        table, hiers = zip_sex
        out = apply_node(table, (2, 1), hiers)
        assert all(row[0].label == "*" and row[1].label == "*" for row in out.rows)

    def test_toy_zip_level_one(self, zip_sex):
        table, hiers = zip_sex
        out = apply_node(table, (1, 0), hiers)
        assert {row[0].label for row in out.rows} == {"350*", "310*"}
        assert [row[1].label for row in out.rows] == [
            str(row[1]) for row in table.rows
        ]

    def test_target_untouched(self, zip_sex):
        table, hiers = zip_sex
        out = apply_node(table, (2, 1), hiers)
        assert [row[2] for row in out.rows] == [row[2] for row in table.rows]


class TestCheckKAnonymous:
    def make_groups_table(self):
        # zip groups of sizes {3, 2, 1} once sex is fully generalised
        schema = (
            AttributeSchema("zip", "categorical", "qid"),
            AttributeSchema("cls", "categorical", "target"),
        )
        rows = tuple(
            (z, "A") for z in ["3500", "3500", "3500", "3506", "3506", "3104"]
        )
        return Table(schema, rows)

    def test_k1_always_satisfied(self):
        table = self.make_groups_table()
        ok, suppressed = check_k_anonymous(table, 1, 0.0)
        assert ok and suppressed == ()

    def test_fully_generalised_satisfies_any_k(self, zip_sex):
        table, hiers = zip_sex
        out = apply_node(table, (2, 1), hiers)
        for k in (1, 2, 8):
            ok, suppressed = check_k_anonymous(out, k, 0.0)
            assert ok and suppressed == ()

    def test_group_sizes_three_two_one(self):
        table = self.make_groups_table()
        ok, _ = check_k_anonymous(table, 3, 0.0)
        assert not ok
        ok, suppressed = check_k_anonymous(table, 3, 0.5)
        assert ok and len(suppressed) == 3  # the 2-group and the 1-group

    def test_antitone_in_k(self):
        for seed in range(8):
            table, hiers = random_table(seed)
            node = tuple(0 for _ in table.qids)
            out = apply_node(table, node, hiers)
            results = [check_k_anonymous(out, k, 0.1)[0] for k in range(1, 8)]
            # once unsatisfied, never satisfied again at larger k
            assert results == sorted(results, reverse=True)


class TestTagStore:
    def test_bottom_not_kanon_tags_only_bottom(self):
        store = TagStore((1, 1))
        tag_and_propagate(store, (0, 0), Tag.NOT_KANON)
        assert store.tag((0, 0)) is Tag.NOT_KANON
        assert store.tag((0, 1)) is Tag.UNTAGGED

    def test_bottom_kanon_tags_everything(self):
        store = TagStore((1, 1))
        tag_and_propagate(store, (0, 0), Tag.KANON)
        assert all(store.tag(n) is Tag.KANON for n in iter_lattice((1, 1)))

    def test_propagation_set_heights_2_1(self):
        store = TagStore((2, 1))
        tag_and_propagate(store, (1, 0), Tag.KANON)
        kanon = {n for n in iter_lattice((2, 1)) if store.tag(n) is Tag.KANON}
        assert kanon == {(1, 0), (2, 0), (1, 1), (2, 1)}

    def test_conflicting_retag_rejected(self):
        store = TagStore((1, 1))
        tag_and_propagate(store, (0, 0), Tag.KANON)
        with pytest.raises(TaggingError):
            tag_and_propagate(store, (1, 1), Tag.NOT_KANON)


class TestKMinimalNodes:
    def complete(self, store):
        for node in iter_lattice(store.heights):
            if store.tag(node) is Tag.UNTAGGED:
                tag_and_propagate(store, node, Tag.NOT_KANON)

    def test_all_kanon_gives_bottom(self):
        store = TagStore((1, 2))
        tag_and_propagate(store, (0, 0), Tag.KANON)
        assert k_minimal_nodes(store) == [(0, 0)]

    def test_only_top_kanon(self):
        store = TagStore((1, 1))
        tag_and_propagate(store, (1, 1), Tag.KANON)
        self.complete(store)
        assert k_minimal_nodes(store) == [(1, 1)]

    def test_two_incomparable_minimal_nodes(self):
        store = TagStore((1, 1))
        tag_and_propagate(store, (1, 0), Tag.KANON)
        tag_and_propagate(store, (0, 1), Tag.KANON)
        tag_and_propagate(store, (0, 0), Tag.NOT_KANON)
        assert k_minimal_nodes(store) == [(0, 1), (1, 0)]

    def test_incomplete_tagging_rejected(self):
        store = TagStore((1, 1))
        tag_and_propagate(store, (1, 1), Tag.KANON)
        with pytest.raises(TaggingError):
            k_minimal_nodes(store)

    @settings(max_examples=30, deadline=None)
    @given(st.data())
    def test_matches_pairwise_dominance(self, data):
        heights = tuple(data.draw(
            st.lists(st.integers(1, 2), min_size=2, max_size=3)))
        store = TagStore(heights)
        nodes = list(iter_lattice(heights))
        seeds = data.draw(st.lists(
            st.sampled_from(nodes), min_size=1, max_size=3))
        for seed in seeds:
            tag_and_propagate(store, seed, Tag.KANON)
        self.complete(store)
        got = set(k_minimal_nodes(store))
        kanon = set(store.kanon_nodes())
        expected = {
            n for n in kanon
            if not any(m != n and all(a <= b for a, b in zip(m, n))
                       for m in kanon)
        }
        assert got == expected


def test_lattice_size_matches_enumeration():
    for heights in [(1,), (2, 1), (1, 1, 3), (2, 2, 2)]:
        assert lattice_size(heights) == len(list(iter_lattice(heights)))


def test_iter_between_at_height():
    bottom, top = (0, 0), (2, 1)
    got = set(iter_between_at_height(bottom, top, 2))
    expected = {
        n for n in itertools.product(range(3), range(2)) if sum(n) == 2
    }
    assert got == expected
    assert set(iter_between_at_height((1, 0), (2, 1), 2)) == {(2, 0), (1, 1)}
