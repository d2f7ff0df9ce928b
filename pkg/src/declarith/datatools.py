"""Dataset tooling: perturbation, bias auditing, folds, evaluation.

The perturbation generator swaps one operation per variant so a solver
cannot rely on surface cues alone.  The bias audit measures how
predictable a quantity's operation is from single context words.  The
evaluator scores exact rational answers, and model comparisons use a
paired randomization test.
"""

from __future__ import annotations

import math
import random
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

from .core import (
    Concept,
    DivisionByZero,
    Expression,
    Leaf,
    Node,
    OpKind,
    WordProblem,
    evaluate,
    evaluate_values,
    internal_nodes,
    leaf_set,
    normal_form,
)
from .extraction import ExtractionRules, default_rules
from .inference import NoDerivation, solve
from .knowledge import VerbLexicon, default_lexicon

_SWAPS = {
    OpKind.ADD: OpKind.SUB,
    OpKind.SUB: OpKind.ADD,
    OpKind.MUL: OpKind.DIV,
    OpKind.DIV: OpKind.MUL,
    OpKind.DIV_REV: OpKind.MUL,
}


def _replace_node(expr: Expression, target: Expression, new_op: OpKind) -> Expression:
    if expr is target:
        return Node(new_op, expr.left, expr.right)
    if isinstance(expr, Leaf):
        return expr
    return Node(
        expr.op,
        _replace_node(expr.left, target, new_op),
        _replace_node(expr.right, target, new_op),
    )


def perturb_expression(expr: Expression, values) -> list[Expression]:
    """Single-operation swaps of the expression, kept when they stay sane.

    A variant survives if it evaluates (no zero division), its value is
    greater than one, and it is not equivalent to the original or to an
    earlier variant.  Leaves are never touched.
    """
    seen = {normal_form(expr, values)}
    out = []
    for node in internal_nodes(expr):
        variant = _replace_node(expr, node, _SWAPS[node.op])
        try:
            value = evaluate_values(variant, values)
        except DivisionByZero:
            continue
        if value <= 1:
            continue
        nf = normal_form(variant, values)
        if nf in seen:
            continue
        seen.add(nf)
        out.append(variant)
    return out


# ---------------------------------------------------------------------------
# lexical bias audit


@dataclass(frozen=True)
class BiasReport:
    mean_bits: float
    occurrences: int
    words: tuple  # (word, occurrences, entropy bits) sorted by word


def _parent_ops(expr: Expression) -> dict:
    """Leaf index -> operation of the node directly above it."""
    ops: dict = {}

    def walk(node):
        if isinstance(node, Leaf):
            return
        for child in (node.left, node.right):
            if isinstance(child, Leaf):
                ops[child.index] = node.op
            else:
                walk(child)

    walk(expr)
    return ops


def _window_words(problem: WordProblem, index: int, window: int) -> tuple:
    from .extraction import _neighborhood

    span = problem.quantities[index].span
    if span is None:
        return problem.quantities[index].schema.neighborhood
    return _neighborhood(problem.tokens, span[0], window)


def bias_entropy(problems, window: int = 3) -> BiasReport:
    """How sharply context words predict the gold operation.

    Counts, over every (quantity, window word) occurrence, the operation
    the gold tree applies to that quantity; reports the mean Shannon
    entropy of P(operation | word) per occurrence.  Low values mean
    single words give the answer away.
    """
    by_word: dict = {}
    occurrences = []
    for problem in problems:
        if problem.gold is None:
            continue
        parents = _parent_ops(problem.gold.expression)
        for q in problem.quantities:
            op = parents.get(q.index)
            if op is None:
                continue
            for word in _window_words(problem, q.index, window):
                by_word.setdefault(word, Counter())[op] += 1
                occurrences.append(word)
    entropy = {}
    for word, counts in by_word.items():
        total = sum(counts.values())
        h = 0.0
        for n in counts.values():
            p = n / total
            h -= p * math.log2(p)
        entropy[word] = h
    if not occurrences:
        return BiasReport(mean_bits=0.0, occurrences=0, words=())
    mean = sum(entropy[w] for w in occurrences) / len(occurrences)
    words = tuple(
        (w, sum(by_word[w].values()), entropy[w]) for w in sorted(by_word)
    )
    return BiasReport(mean_bits=mean, occurrences=len(occurrences), words=words)


# ---------------------------------------------------------------------------
# folds and evaluation


class InvalidK(ValueError):
    pass


def kfold_split(count: int, k: int, seed: int = 42) -> list[tuple[list, list]]:
    """Index folds: k (train, test) pairs with test sizes differing by at most one."""
    if k < 2 or k > count:
        raise InvalidK(f"k={k} with {count} items")
    order = list(range(count))
    random.Random(seed).shuffle(order)
    base, extra = divmod(count, k)
    folds = []
    at = 0
    for i in range(k):
        size = base + (1 if i < extra else 0)
        folds.append(order[at : at + size])
        at += size
    out = []
    for i in range(k):
        test = sorted(folds[i])
        train = sorted(x for j, f in enumerate(folds) for x in f if j != i)
        out.append((train, test))
    return out


@dataclass(frozen=True)
class ProblemResult:
    id: str
    correct: bool
    predicted: Fraction | None
    expected: Fraction
    root_concept: Concept | None


@dataclass(frozen=True)
class EvalReport:
    results: tuple
    accuracy: float
    by_concept: tuple  # (concept label, correct, total) sorted by label

    def correct_flags(self) -> list[bool]:
        return [r.correct for r in self.results]


def evaluate_model(
    model,
    problems,
    lexicon: VerbLexicon | None = None,
    xrules: ExtractionRules | None = None,
) -> EvalReport:
    """Solve each problem and compare exact rational answers."""
    lexicon = lexicon or default_lexicon()
    xrules = xrules or default_rules()
    results = []
    for problem in problems:
        if problem.gold is None:
            raise ValueError(f"{problem.id}: cannot score without an annotation")
        expected = evaluate(problem.gold.expression, problem)
        root = problem.gold.expression
        concept = None
        if not isinstance(root, Leaf):
            try:
                from .learning import annotate_concepts

                concept = annotate_concepts(problem, lexicon, xrules)[leaf_set(root)]
            except Exception:
                concept = None
        try:
            derivation, _ = solve(problem, model, lexicon, xrules)
            predicted = evaluate(derivation.expression, problem)
        except NoDerivation:
            predicted = None
        results.append(
            ProblemResult(
                id=problem.id,
                correct=(predicted == expected),
                predicted=predicted,
                expected=expected,
                root_concept=concept,
            )
        )
    totals: dict = {}
    for r in results:
        label = r.root_concept.value if r.root_concept else "unknown"
        got, n = totals.get(label, (0, 0))
        totals[label] = (got + (1 if r.correct else 0), n + 1)
    accuracy = sum(1 for r in results if r.correct) / len(results) if results else 0.0
    by_concept = tuple((label, *totals[label]) for label in sorted(totals))
    return EvalReport(results=tuple(results), accuracy=accuracy, by_concept=by_concept)


# ---------------------------------------------------------------------------
# paired comparison


class LengthMismatch(ValueError):
    pass


def significance(a, b, rounds: int = 10000, seed: int = 42) -> float:
    """Paired randomization p-value for two per-item correctness lists.

    Flips the sign of each per-item difference uniformly and counts how
    often the flipped total is at least as extreme as the observed one;
    identical result lists give p = 1.
    """
    if len(a) != len(b):
        raise LengthMismatch(f"{len(a)} vs {len(b)} results")
    diffs = [int(bool(x)) - int(bool(y)) for x, y in zip(a, b)]
    observed = abs(sum(diffs))
    rng = random.Random(seed)
    live = [d for d in diffs if d != 0]
    hits = 0
    for _ in range(rounds):
        total = 0
        for d in live:
            total += d if rng.random() < 0.5 else -d
        if abs(total) >= observed:
            hits += 1
    return (1 + hits) / (1 + rounds)
