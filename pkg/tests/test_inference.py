"""Beam search tests, with the brute-force enumerator as the reference.

Random-weight comparisons use dyadic weights (multiples of 1/8) so float
sums stay exact and score ties resolve identically in both searches."""

import random

import pytest

from declarith.core import (
    Concept,
    Hyperparams,
    Leaf,
    Model,
    evaluate_values,
    normal_form,
    render,
)
from declarith.extraction import build_problem
from declarith.inference import (
    NoDerivation,
    exhaustive_solve,
    pair_features,
    representative,
    solve,
)


def zero_model():
    return Model(w_r={}, w_k={}, features=frozenset(), hyper=Hyperparams())


def random_model(features, rng):
    w_r, w_k = {}, {}
    for name in features:
        weight = rng.randrange(-16, 17) / 8.0
        (w_r if name.startswith("r:") else w_k)[name] = weight
    return Model(w_r=w_r, w_k=w_k, features=frozenset(features), hyper=Hyperparams())


class TestRepresentative:
    def test_dimensional_keeps_count_side(self, corpus_train):
        by_id = {p.id: p for p in corpus_train}
        # rate on the second quantity: the first carries the plain count
        assert representative(Concept.DIMENSIONAL, by_id["d01"], 0, 1) == 0
        # rate on the first quantity
        assert representative(Concept.DIMENSIONAL, by_id["d07"], 0, 1) == 1

    def test_explicit_keeps_plain_side(self, corpus_train):
        by_id = {p.id: p for p in corpus_train}
        # math term on the first mention ("twice")
        assert representative(Concept.EXPLICIT_MATH, by_id["e05"], 0, 1) == 1
        # math term on the second mention ("2 more ... than")
        assert representative(Concept.EXPLICIT_MATH, by_id["e09"], 0, 1) == 0

    def test_transfer_and_part_whole_keep_first(self, corpus_train):
        by_id = {p.id: p for p in corpus_train}
        assert representative(Concept.TRANSFER, by_id["t01"], 0, 1) == 0
        assert representative(Concept.PART_WHOLE, by_id["p01"], 0, 1) == 0


class TestPairFeatures:
    def test_cache_reuse(self, corpus_train, lexicon, xrules):
        p = corpus_train[0]
        cache = {}
        first = pair_features(p, 0, 1, lexicon, xrules, cache=cache)
        again = pair_features(p, 0, 1, lexicon, xrules, cache=cache)
        assert again is first

    def test_covers_all_applicable_concepts(self, corpus_train, lexicon, xrules):
        by_id = {p.id: p for p in corpus_train}
        entries = pair_features(by_id["d05"], 0, 1, lexicon, xrules)
        concepts = {c for c, *_ in entries}
        assert Concept.TRANSFER in concepts
        assert Concept.PART_WHOLE in concepts


class TestSolve:
    def test_transfer_solution(self, trained, corpus_train, lexicon, xrules):
        model, _ = trained
        by_id = {p.id: p for p in corpus_train}
        p = by_id["t01"]
        deriv, _ = solve(p, model, lexicon, xrules)
        assert render(deriv.expression, p) == "5[1]+4[2]"
        assert evaluate_values(deriv.expression, p.values()) == 9
        assert [(s.concept, s.rule_id) for s in deriv.steps] == [
            (Concept.TRANSFER, "T12")
        ]

    def test_two_step_solution(self, trained, corpus_train, lexicon, xrules):
        model, _ = trained
        by_id = {p.id: p for p in corpus_train}
        p = by_id["d05"]
        deriv, _ = solve(p, model, lexicon, xrules)
        assert render(deriv.expression, p) == "(16[1]+14[2])/5[3]"
        assert evaluate_values(deriv.expression, p.values()) == 6
        assert [(s.concept, s.rule_id, s.left_rep, s.right_rep) for s in deriv.steps] == [
            (Concept.PART_WHOLE, "P1", 0, 1),
            (Concept.DIMENSIONAL, "D2", 0, 2),
        ]

    def test_single_relevant_quantity_is_a_leaf(self, lexicon, xrules):
        p = build_problem(
            "one", "Tom has 5 books. Joan has 3 cats. How many books does Tom have?", xrules
        )
        deriv, score = solve(p, zero_model(), lexicon, xrules)
        assert deriv.expression == Leaf(0)
        assert deriv.steps == ()
        assert score == 0

    def test_no_usable_quantities(self, lexicon, xrules):
        p = build_problem(
            "none", "Tom has 5 books. Dan has 4 pens. How many cars does Tom have?", xrules
        )
        with pytest.raises(NoDerivation):
            solve(p, zero_model(), lexicon, xrules)
        with pytest.raises(NoDerivation):
            exhaustive_solve(p, zero_model(), lexicon, xrules)

    def test_dead_end_without_applicable_rules(self, lexicon, xrules):
        # Verbless mentions, same bare unit, no grouping cue anywhere.
        p = build_problem(
            "dead", "Inside: 5 apples. Outside: 4 apples. How many apples?", xrules
        )
        assert len(p.quantities) == 2
        with pytest.raises(NoDerivation):
            solve(p, zero_model(), lexicon, xrules)


class TestBeamAgainstExhaustive:
    PIDS = ["t01", "t03", "t09", "t11", "d01", "d05", "d07", "e05", "e09", "p05"]

    def feature_pool(self, problem, lexicon, xrules):
        names = set()
        n = len(problem.quantities)
        for i in range(n):
            for j in range(i + 1, n):
                for _, _, _, _, phi_r, phi_k in pair_features(problem, i, j, lexicon, xrules):
                    names |= set(phi_r) | set(phi_k)
        return sorted(names)

    def test_full_beam_matches_reference(self, corpus_train, lexicon, xrules):
        rng = random.Random(7)
        by_id = {p.id: p for p in corpus_train}
        for pid in self.PIDS:
            p = by_id[pid]
            for _ in range(3):
                model = random_model(self.feature_pool(p, lexicon, xrules), rng)
                d1, s1 = solve(p, model, lexicon, xrules, beam_size=1000)
                d2, s2 = exhaustive_solve(p, model, lexicon, xrules)
                assert s1 == s2, pid
                assert normal_form(d1.expression, p.values()) == normal_form(
                    d2.expression, p.values()
                ), pid

    def test_wider_beams_never_score_worse(self, corpus_train, lexicon, xrules):
        rng = random.Random(11)
        by_id = {p.id: p for p in corpus_train}
        for pid in ["t11", "d05", "t03"]:
            p = by_id[pid]
            model = random_model(self.feature_pool(p, lexicon, xrules), rng)
            scores = [
                solve(p, model, lexicon, xrules, beam_size=b)[1] for b in (1, 10, 100, 1000)
            ]
            for narrow, wide in zip(scores, scores[1:]):
                assert narrow <= wide, pid

    def test_zero_weight_ties_are_deterministic(self, corpus_train, lexicon, xrules):
        by_id = {p.id: p for p in corpus_train}
        p = by_id["t11"]
        runs = {
            render(solve(p, zero_model(), lexicon, xrules)[0].expression, p)
            for _ in range(3)
        }
        assert len(runs) == 1
