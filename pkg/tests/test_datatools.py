"""Perturbation, bias audit, folds, and comparison tests.

The bias oracle case is hand-computed: one text used with both an
addition and a subtraction solution puts every window word at exactly
one bit; the addition-only corpus sits at zero."""

from fractions import Fraction

import hypothesis.strategies as st
import pytest
from hypothesis import given

from declarith.core import (
    Leaf,
    Node,
    OpKind,
    evaluate_values,
    internal_nodes,
    normal_form,
)
from declarith.corpus import problem_from_record
from declarith.datatools import (
    InvalidK,
    LengthMismatch,
    bias_entropy,
    evaluate_model,
    kfold_split,
    perturb_expression,
    significance,
)

TRANSFER_TEXT = "Tom has 5 books. Dan gave him 4 books. How many books does Tom have now?"


def fr(n):
    return Fraction(n)


class TestPerturbExpression:
    def test_single_subtraction(self):
        expr = Node(OpKind.SUB, Leaf(0), Leaf(1))
        values = [fr(3), fr(2)]
        got = perturb_expression(expr, values)
        assert len(got) == 1
        assert got[0] == Node(OpKind.ADD, Leaf(0), Leaf(1))
        assert evaluate_values(got[0], values) == 5

    def test_nested_division(self):
        expr = Node(OpKind.DIV, Node(OpKind.SUB, Leaf(0), Leaf(1)), Leaf(2))
        values = [fr(10), fr(2), fr(4)]
        got = {normal_form(v, values) for v in perturb_expression(expr, values)}
        want = {
            normal_form(Node(OpKind.DIV, Node(OpKind.ADD, Leaf(0), Leaf(1)), Leaf(2)), values),
            normal_form(Node(OpKind.MUL, Node(OpKind.SUB, Leaf(0), Leaf(1)), Leaf(2)), values),
        }
        assert got == want

    def test_small_values_dropped(self):
        # The swapped variant evaluates to 1, under the keep threshold.
        expr = Node(OpKind.ADD, Leaf(0), Leaf(1))
        assert perturb_expression(expr, [fr(1), fr(0)]) == []

    def test_zero_division_dropped(self):
        expr = Node(OpKind.MUL, Leaf(0), Leaf(1))
        assert perturb_expression(expr, [fr(5), fr(0)]) == []

    def test_reverse_division_swaps_to_product(self):
        expr = Node(OpKind.DIV_REV, Leaf(0), Leaf(1))
        got = perturb_expression(expr, [fr(2), fr(12)])
        assert got == [Node(OpKind.MUL, Leaf(0), Leaf(1))]

    @given(
        st.lists(
            st.integers(min_value=2, max_value=9).map(Fraction), min_size=2, max_size=4
        ),
        st.randoms(use_true_random=False),
    )
    def test_variants_change_exactly_one_node(self, values, rnd):
        # Build a random left-leaning tree over all the values.
        expr = Leaf(0)
        for i in range(1, len(values)):
            op = rnd.choice([OpKind.ADD, OpKind.SUB, OpKind.MUL, OpKind.DIV])
            expr = Node(op, expr, Leaf(i))
        try:
            evaluate_values(expr, values)
        except ZeroDivisionError:
            return
        original_nf = normal_form(expr, values)
        original_ops = sorted(n.op.value for n in internal_nodes(expr))
        for variant in perturb_expression(expr, values):
            assert evaluate_values(variant, values) > 1
            assert normal_form(variant, values) != original_nf
            variant_ops = sorted(n.op.value for n in internal_nodes(variant))
            assert len(variant_ops) == len(original_ops)
            assert leaf_indices(variant) == leaf_indices(expr)
            assert count_op_changes(expr, variant) == 1


def leaf_indices(expr):
    if isinstance(expr, Leaf):
        return [expr.index]
    return leaf_indices(expr.left) + leaf_indices(expr.right)


def count_op_changes(a, b):
    if isinstance(a, Leaf):
        return 0
    return (
        (a.op != b.op)
        + count_op_changes(a.left, b.left)
        + count_op_changes(a.right, b.right)
    )


class TestBiasEntropy:
    def problems(self, xrules):
        pa = problem_from_record({"id": "a", "text": TRANSFER_TEXT, "solution": "5[1]+4[2]"}, xrules)
        pb = problem_from_record({"id": "b", "text": TRANSFER_TEXT, "solution": "5[1]-4[2]"}, xrules)
        return pa, pb

    def test_single_operation_corpus_is_fully_biased(self, xrules):
        pa, _ = self.problems(xrules)
        report = bias_entropy([pa])
        assert report.mean_bits == 0.0
        assert report.occurrences == 9

    def test_balanced_corpus_hits_one_bit(self, xrules):
        pa, pb = self.problems(xrules)
        report = bias_entropy([pa, pb])
        assert report.mean_bits == pytest.approx(1.0)
        assert report.occurrences == 18
        # per-word counts: "books" and "dan" sit in both windows
        as_dict = {w: (n, bits) for w, n, bits in report.words}
        assert as_dict["books"] == (4, pytest.approx(1.0))
        assert as_dict["dan"] == (4, pytest.approx(1.0))
        assert as_dict["how"] == (2, pytest.approx(1.0))
        assert list(as_dict) == sorted(as_dict)

    def test_debiasing_raises_entropy(self, xrules):
        pa, pb = self.problems(xrules)
        biased = bias_entropy([pa, pa])
        debiased = bias_entropy([pa, pa, pb])
        assert biased.mean_bits < debiased.mean_bits

    def test_empty_corpus(self):
        report = bias_entropy([])
        assert (report.mean_bits, report.occurrences, report.words) == (0.0, 0, ())

    def test_unannotated_problems_skipped(self, xrules):
        from declarith.extraction import build_problem

        p = build_problem("x", TRANSFER_TEXT, xrules)
        assert bias_entropy([p]).occurrences == 0


class TestKFold:
    def test_partition_properties(self):
        folds = kfold_split(10, 3, seed=42)
        assert len(folds) == 3
        sizes = [len(test) for _, test in folds]
        assert sorted(sizes) == [3, 3, 4]
        all_test = [i for _, test in folds for i in test]
        assert sorted(all_test) == list(range(10))
        for train, test in folds:
            assert set(train) | set(test) == set(range(10))
            assert set(train) & set(test) == set()

    def test_deterministic(self):
        assert kfold_split(20, 4, seed=9) == kfold_split(20, 4, seed=9)
        assert kfold_split(20, 4, seed=9) != kfold_split(20, 4, seed=10)

    def test_invalid_k(self):
        with pytest.raises(InvalidK):
            kfold_split(10, 1)
        with pytest.raises(InvalidK):
            kfold_split(10, 11)
        # k == count is leave-one-out and allowed
        assert len(kfold_split(10, 10)) == 10


class TestEvaluateModel:
    def test_held_out_accuracy(self, trained, corpus_heldout, lexicon, xrules):
        model, _ = trained
        report = evaluate_model(model, corpus_heldout, lexicon, xrules)
        assert report.accuracy == 1.0
        assert len(report.results) == 12
        labels = [label for label, _, _ in report.by_concept]
        assert labels == sorted(labels)
        assert sum(n for _, _, n in report.by_concept) == 12

    def test_requires_annotations(self, trained, lexicon, xrules):
        from declarith.extraction import build_problem

        model, _ = trained
        p = build_problem("x", TRANSFER_TEXT, xrules)
        with pytest.raises(ValueError):
            evaluate_model(model, [p], lexicon, xrules)

    def test_underivable_problem_scores_wrong(self, trained, lexicon, xrules):
        model, _ = trained
        p = problem_from_record(
            {
                "id": "dead",
                "text": "Inside: 5 apples. Outside: 4 apples. How many apples?",
                "solution": "5[1]+4[2]",
            },
            xrules,
        )
        report = evaluate_model(model, [p], lexicon, xrules)
        assert report.accuracy == 0.0
        assert report.results[0].predicted is None
        assert report.results[0].expected == 9


class TestSignificance:
    def test_identical_results(self):
        a = [True] * 30 + [False] * 10
        assert significance(a, list(a)) == 1.0

    def test_single_disagreement(self):
        a = [True] * 10
        b = [True] * 9 + [False]
        assert significance(a, b) == 1.0

    def test_total_disagreement_is_significant(self):
        a = [True] * 50
        b = [False] * 50
        assert significance(a, b) < 0.001

    def test_symmetry(self):
        a = [True, True, False, True, False] * 8
        b = [False, True, True, True, True] * 8
        assert significance(a, b) == significance(b, a)

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            significance([True], [True, False])
