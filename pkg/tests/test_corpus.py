"""Corpus file round-trip and validation tests."""

import json
from fractions import Fraction

import pytest

from declarith.core import Concept, Leaf, Node, OpKind, leaf_set, render
from declarith.corpus import (
    CorpusError,
    load_corpus,
    problem_from_record,
    write_records,
)

TRANSFER_TEXT = "Tom has 5 books. Dan gave him 4 books. How many books does Tom have now?"


def write_lines(path, *lines):
    path.write_text("\n".join(lines) + "\n")
    return str(path)


class TestProblemFromRecord:
    def test_minimal(self, xrules):
        p = problem_from_record({"id": "x", "text": TRANSFER_TEXT}, xrules)
        assert p.id == "x"
        assert p.gold is None
        assert [q.value for q in p.quantities] == [5, 4]

    def test_solution_indices_are_one_based(self, xrules):
        p = problem_from_record(
            {"id": "x", "text": TRANSFER_TEXT, "solution": "5[1]+4[2]"}, xrules
        )
        assert p.gold.expression == Node(OpKind.ADD, Leaf(0), Leaf(1))

    def test_reverse_division_solution(self, xrules):
        p = problem_from_record(
            {
                "id": "x",
                "text": "A grocer packs 6 apples in each basket. The grocer has 48 apples. "
                "How many baskets can the grocer fill?",
                "solution": "6[1]\\48[2]",
                "rates": [1],
            },
            xrules,
        )
        assert p.gold.expression == Node(OpKind.DIV_REV, Leaf(0), Leaf(1))
        assert p.gold.rate_indices == frozenset({0})
        assert render(p.gold.expression, p) == "6[1]\\48[2]"

    def test_fractional_values(self, xrules):
        p = problem_from_record(
            {
                "id": "x",
                "text": "A jug holds 2.5 liters. Nine jugs were filled. How many liters in all?",
                "solution": "2.5[1]*9[2]",
                "rates": [1],
            },
            xrules,
        )
        assert [q.value for q in p.quantities] == [Fraction(5, 2), Fraction(9)]
        assert render(p.gold.expression, p) == "2.5[1]*9[2]"

    def test_numbers_field_subselects(self, xrules):
        p = problem_from_record(
            {
                "id": "x",
                "text": "On day 1 Tom had 5 books. Dan gave him 4 books. How many books now?",
                "numbers": [5, 4],
                "solution": "5[1]+4[2]",
            },
            xrules,
        )
        assert [q.value for q in p.quantities] == [5, 4]

    def test_value_mismatch_rejected(self, xrules):
        with pytest.raises(ValueError, match="quantity 1 is 5"):
            problem_from_record(
                {"id": "x", "text": TRANSFER_TEXT, "solution": "6[1]+4[2]"}, xrules
            )

    def test_out_of_range_leaf_rejected(self, xrules):
        with pytest.raises(ValueError, match="only 2 detected"):
            problem_from_record(
                {"id": "x", "text": TRANSFER_TEXT, "solution": "5[1]+4[3]"}, xrules
            )

    def test_bad_rate_index(self, xrules):
        with pytest.raises(ValueError, match="rate index"):
            problem_from_record(
                {"id": "x", "text": TRANSFER_TEXT, "solution": "5[1]+4[2]", "rates": [3]},
                xrules,
            )

    def test_concept_paths(self, xrules):
        p = problem_from_record(
            {
                "id": "x",
                "text": "Six kittens were born. Nine more kittens arrived. "
                "Then 3 kittens were adopted. How many kittens are left?",
                "solution": "(6[1]+9[2])-3[3]",
                "concepts": {"L": "Transfer", "": "Transfer"},
            },
            xrules,
        )
        got = {tuple(sorted(ls)): c for ls, c in p.gold.concepts}
        assert got == {(0, 1): Concept.TRANSFER, (0, 1, 2): Concept.TRANSFER}

    def test_concept_path_must_name_an_operation(self, xrules):
        base = {"id": "x", "text": TRANSFER_TEXT, "solution": "5[1]+4[2]"}
        with pytest.raises(ValueError, match="does not name an operation"):
            problem_from_record({**base, "concepts": {"L": "Transfer"}}, xrules)
        with pytest.raises(ValueError, match="does not name an operation"):
            problem_from_record({**base, "concepts": {"X": "Transfer"}}, xrules)

    def test_schema_overrides(self, xrules):
        plain = problem_from_record({"id": "x", "text": TRANSFER_TEXT}, xrules)
        assert plain.quantities[0].schema.unit == (3, 4)
        p = problem_from_record(
            {
                "id": "x",
                "text": TRANSFER_TEXT,
                "schemas": {"1": {"unit": [9, 10], "indirect_object": None}},
            },
            xrules,
        )
        assert p.quantities[0].schema.unit == (9, 10)
        assert p.quantities[0].schema.indirect_object is None
        # untouched fields survive
        assert p.quantities[0].schema.verb == plain.quantities[0].schema.verb

    def test_schema_override_errors(self, xrules):
        with pytest.raises(ValueError, match="missing quantity"):
            problem_from_record(
                {"id": "x", "text": TRANSFER_TEXT, "schemas": {"9": {"unit": [0, 1]}}},
                xrules,
            )
        with pytest.raises(ValueError, match="unknown schema field"):
            problem_from_record(
                {"id": "x", "text": TRANSFER_TEXT, "schemas": {"1": {"sujet": [0, 1]}}},
                xrules,
            )

    def test_missing_required_fields(self, xrules):
        with pytest.raises(ValueError, match="missing field"):
            problem_from_record({"text": "Tom has 5 books."}, xrules)
        with pytest.raises(ValueError, match="missing field"):
            problem_from_record({"id": "x"}, xrules)


class TestLoadCorpus:
    def test_round_trip(self, tmp_path, xrules):
        records = [
            {"id": "a", "text": TRANSFER_TEXT, "solution": "5[1]+4[2]"},
            {
                "id": "b",
                "text": "Jason has 5 bags with 4 books in each bag. How many books?",
                "solution": "5[1]*4[2]",
                "rates": [2],
                "concepts": {"": "DimensionalAnalysis"},
            },
        ]
        path = tmp_path / "corpus.jsonl"
        write_records(records, path)
        problems = load_corpus(str(path), xrules)
        assert [p.id for p in problems] == ["a", "b"]
        assert render(problems[0].gold.expression, problems[0]) == "5[1]+4[2]"
        assert problems[1].gold.rate_indices == frozenset({1})
        assert problems[1].gold.concepts == (
            (frozenset({0, 1}), Concept.DIMENSIONAL),
        )

    def test_comments_and_blanks_skipped_but_counted(self, tmp_path, xrules):
        path = write_lines(
            tmp_path / "c.jsonl",
            "# header comment",
            "",
            json.dumps({"id": "a", "text": TRANSFER_TEXT, "solution": "5[1]+4[2]"}),
        )
        assert [p.id for p in load_corpus(path, xrules)] == ["a"]

    def test_bad_json_reports_line(self, tmp_path, xrules):
        path = write_lines(
            tmp_path / "c.jsonl",
            "# header",
            "",
            "{not json",
        )
        with pytest.raises(CorpusError) as err:
            load_corpus(path, xrules)
        assert err.value.line == 3
        assert "bad JSON" in str(err.value)

    def test_bad_record_reports_line(self, tmp_path, xrules):
        path = write_lines(
            tmp_path / "c.jsonl",
            json.dumps({"id": "a", "text": TRANSFER_TEXT, "solution": "5[1]+4[2]"}),
            json.dumps({"id": "b", "text": TRANSFER_TEXT, "solution": "6[1]+4[2]"}),
        )
        with pytest.raises(CorpusError) as err:
            load_corpus(path, xrules)
        assert err.value.line == 2

    def test_duplicate_ids_rejected(self, tmp_path, xrules):
        row = json.dumps({"id": "a", "text": TRANSFER_TEXT, "solution": "5[1]+4[2]"})
        path = write_lines(tmp_path / "c.jsonl", row, row)
        with pytest.raises(CorpusError, match="duplicate id"):
            load_corpus(path, xrules)


class TestGoldAnnotation:
    def test_concept_map_keyed_by_leafset(self, xrules):
        p = problem_from_record(
            {
                "id": "x",
                "text": TRANSFER_TEXT,
                "solution": "5[1]+4[2]",
                "concepts": {"": "Transfer"},
            },
            xrules,
        )
        cmap = p.gold.concept_map()
        assert cmap == {leaf_set(p.gold.expression): Concept.TRANSFER}
