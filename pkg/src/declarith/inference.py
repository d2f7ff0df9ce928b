"""Derivation search: beam decoding plus a brute-force reference.

Search state is a forest of scored subexpressions over the relevant
quantities.  Each step joins two subtrees with an operation licensed by
an applicable rule; the forest shrinks by one per level until a single
expression remains.  Ties prefer combining textually earlier quantities
first.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import (
    Concept,
    Derivation,
    DerivationStep,
    DivisionByZero,
    Expression,
    Leaf,
    Model,
    Node,
    WordProblem,
    evaluate_values,
    leaf_set,
    normal_form,
)
from .extraction import ExtractionRules, default_rules, extract_question_unit, filter_irrelevant
from .knowledge import (
    VerbLexicon,
    applicable_rules,
    default_lexicon,
    has_rate,
    problem_cues,
)
from .scoring import dot, phi_concept, phi_rule


class NoDerivation(Exception):
    """No complete derivation exists for the problem."""


def representative(concept: Concept, problem: WordProblem, first: int, second: int) -> int:
    """Quantity that stands for the combined subtree in later steps."""
    if concept == Concept.DIMENSIONAL:
        ra, rb = has_rate(problem, first), has_rate(problem, second)
        if ra and not rb:
            return second
        if rb and not ra:
            return first
        return first
    if concept == Concept.EXPLICIT_MATH:
        ma = problem.quantities[first].schema.math_term is not None
        mb = problem.quantities[second].schema.math_term is not None
        if ma and not mb:
            return second
        if mb and not ma:
            return first
        return first
    return first  # transfer and part-whole keep the earlier mention


def pair_features(
    problem: WordProblem,
    first: int,
    second: int,
    lexicon: VerbLexicon | None = None,
    xrules: ExtractionRules | None = None,
    asked_unit=None,
    cues=None,
    cache: dict | None = None,
):
    """All rule applications for an operand pair, with feature vectors.

    Returns ``(concept, rule, op, evidence, phi_r, phi_k)`` tuples.  The
    cache key is the pair alone, so a cache must not outlive its problem.
    """
    if cache is not None:
        hit = cache.get((first, second))
        if hit is not None:
            return hit
    xrules = xrules or default_rules()
    entries = []
    for concept in Concept:
        phi_k = phi_concept(problem, concept, first, second)
        for rule, op, evidence in applicable_rules(
            problem, concept, first, second, lexicon, xrules, asked_unit=asked_unit, cues=cues
        ):
            phi_r = phi_rule(problem, rule, evidence, first, second, xrules)
            entries.append((concept, rule, op, evidence, phi_r, phi_k))
    if cache is not None:
        cache[(first, second)] = entries
    return entries


def _score_table(problem, relevant, model, lexicon, xrules, feat_cache):
    asked_unit = extract_question_unit(problem.tokens, problem.question, xrules)
    cues = problem_cues(problem, xrules)
    table = {}
    for a_pos, first in enumerate(relevant):
        for second in relevant[a_pos + 1 :]:
            scored = []
            for concept, rule, op, evidence, phi_r, phi_k in pair_features(
                problem, first, second, lexicon, xrules, asked_unit, cues, feat_cache
            ):
                score = dot(model.w_r, phi_r) + dot(model.w_k, phi_k)
                scored.append((concept, rule, op, score))
            table[(first, second)] = scored
    return table


@dataclass(frozen=True)
class BeamItem:
    exprs: tuple  # ((expression, representative), ...) ordered by representative
    score: object
    steps: tuple
    history: tuple  # chronological (first_rep, second_rep) pairs

    def sort_key(self, values):
        canon = tuple(sorted(repr(normal_form(e, values)) for e, _ in self.exprs))
        return (-self.score, self.history, canon)


def _successors(item, table, problem, values, step_bonus):
    for a_pos in range(len(item.exprs)):
        for b_pos in range(a_pos + 1, len(item.exprs)):
            a_expr, a_rep = item.exprs[a_pos]
            b_expr, b_rep = item.exprs[b_pos]
            for concept, rule, op, score in table[(a_rep, b_rep)]:
                new_expr = Node(op, a_expr, b_expr)
                try:
                    evaluate_values(new_expr, values)
                except DivisionByZero:
                    continue
                bonus = step_bonus(op, a_expr, b_expr) if step_bonus is not None else 0
                rep = representative(concept, problem, a_rep, b_rep)
                step = DerivationStep(leaf_set(new_expr), concept, rule.id, a_rep, b_rep)
                rest = tuple(
                    pair for k, pair in enumerate(item.exprs) if k not in (a_pos, b_pos)
                )
                exprs = tuple(sorted(rest + ((new_expr, rep),), key=lambda pair: pair[1]))
                yield BeamItem(
                    exprs=exprs,
                    score=item.score + score + bonus,
                    steps=item.steps + (step,),
                    history=item.history + ((a_rep, b_rep),),
                )


def _relevant_indices(problem, xrules):
    excluded = filter_irrelevant(problem, xrules)
    return [q.index for q in problem.quantities if q.index not in excluded]


def solve(
    problem: WordProblem,
    model: Model,
    lexicon: VerbLexicon | None = None,
    xrules: ExtractionRules | None = None,
    beam_size: int | None = None,
    step_bonus=None,
    feat_cache: dict | None = None,
):
    """Beam-decode the best derivation.  Returns (derivation, score)."""
    lexicon = lexicon or default_lexicon()
    xrules = xrules or default_rules()
    beam_size = beam_size if beam_size is not None else model.hyper.beam
    relevant = _relevant_indices(problem, xrules)
    if not relevant:
        raise NoDerivation(f"{problem.id}: no usable quantities")
    values = problem.values()
    table = _score_table(problem, relevant, model, lexicon, xrules, feat_cache)

    items = [BeamItem(exprs=tuple((Leaf(i), i) for i in relevant), score=0, steps=(), history=())]
    for _ in range(len(relevant) - 1):
        best = {}
        for item in items:
            for succ in _successors(item, table, problem, values, step_bonus):
                key = frozenset((normal_form(e, values), rep) for e, rep in succ.exprs)
                seen = best.get(key)
                if seen is None or succ.sort_key(values) < seen.sort_key(values):
                    best[key] = succ
        if not best:
            raise NoDerivation(f"{problem.id}: search dead-ends with no applicable rule")
        items = sorted(best.values(), key=lambda it: it.sort_key(values))[:beam_size]

    top = items[0]
    return Derivation(expression=top.exprs[0][0], steps=top.steps), top.score


def exhaustive_solve(
    problem: WordProblem,
    model: Model,
    lexicon: VerbLexicon | None = None,
    xrules: ExtractionRules | None = None,
    step_bonus=None,
    feat_cache: dict | None = None,
):
    """Enumerate every derivation and return the best, as (derivation, score).

    Independent of the beam search except for the shared step scorer;
    used as a reference to check beam decoding.
    """
    lexicon = lexicon or default_lexicon()
    xrules = xrules or default_rules()
    relevant = _relevant_indices(problem, xrules)
    if not relevant:
        raise NoDerivation(f"{problem.id}: no usable quantities")
    values = problem.values()
    table = _score_table(problem, relevant, model, lexicon, xrules, feat_cache)

    best: list = []  # single-element: the minimal (key, item) found

    def consider(item):
        key = item.sort_key(values)
        if not best or key < best[0][0]:
            best[:] = [(key, item)]

    def recurse(item):
        if len(item.exprs) == 1:
            consider(item)
            return
        for succ in _successors(item, table, problem, values, step_bonus):
            recurse(succ)

    recurse(BeamItem(exprs=tuple((Leaf(i), i) for i in relevant), score=0, steps=(), history=()))
    if not best:
        raise NoDerivation(f"{problem.id}: search dead-ends with no applicable rule")
    top = best[0][1]
    return Derivation(expression=top.exprs[0][0], steps=top.steps), top.score
