"""Two-stage max-margin training.

Stage one fits rule weights node by node: within each gold node's
concept, every applicable rule competes against the rules producing the
required operation under a 0/1-loss-augmented hinge.  Stage two fixes
rule weights and fits concept weights with a structured hinge, comparing
the loss-augmented beam decode against the gold decomposition.  Both
stages run a projected subgradient schedule with per-epoch checkpointing
on the exact objective, so the reported objective never increases.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .core import (
    Concept,
    Expression,
    Hyperparams,
    Leaf,
    Model,
    Node,
    OpKind,
    WordProblem,
    evaluate,
    leaf_set,
)
from .extraction import ExtractionRules, default_rules, extract_question_unit, filter_irrelevant
from .inference import (
    NoDerivation,
    pair_features,
    representative,
    solve,
)
from .knowledge import VerbLexicon, default_lexicon, has_rate, problem_cues, verb_word
from .scoring import dot, phi_concept

PHI_CONCEPT_NAMES = (
    "k:tr:bias",
    "k:dim:bias",
    "k:dim:rate_on_left",
    "k:dim:rate_on_right",
    "k:pw:bias",
    "k:pw:same_verb",
    "k:pw:verbs_differ",
    "k:em:bias",
)


class AnnotationGap(Exception):
    """No concept heuristic covers a gold node."""

    def __init__(self, problem_id: str, node: frozenset):
        super().__init__(f"{problem_id}: no concept for node over quantities {sorted(node)}")
        self.problem_id = problem_id
        self.node = node


class TrainingError(Exception):
    pass


def _swap_op(op: OpKind) -> OpKind:
    if op is OpKind.DIV:
        return OpKind.DIV_REV
    if op is OpKind.DIV_REV:
        return OpKind.DIV
    return op  # +, * commute; - compares magnitudes


def canonical_op(op: OpKind) -> str:
    return "/" if op is OpKind.DIV_REV else op.value


def annotate_concepts(
    problem: WordProblem,
    lexicon: VerbLexicon | None = None,
    xrules: ExtractionRules | None = None,
) -> dict:
    """Concept per gold internal node, honoring explicit labels first.

    The fallback heuristics: a comparison term near either operand reads
    as explicit math; products and quotients need a rate mention; sums
    and differences with one shared verb read as part-whole, otherwise
    as transfer.
    """
    if problem.gold is None:
        raise ValueError(f"{problem.id}: problem has no annotation")
    overrides = problem.gold.concept_map()
    concepts: dict = {}

    def walk(expr: Expression) -> int:
        if isinstance(expr, Leaf):
            return expr.index
        rep_l = walk(expr.left)
        rep_r = walk(expr.right)
        first, second = min(rep_l, rep_r), max(rep_l, rep_r)
        ls = leaf_set(expr)
        concept = overrides.get(ls)
        if concept is None:
            concept = _heuristic_concept(problem, expr.op, first, second)
            if concept is None:
                raise AnnotationGap(problem.id, ls)
        concepts[ls] = concept
        return representative(concept, problem, first, second)

    walk(problem.gold.expression)
    return concepts


def heuristic_concepts(
    problem: WordProblem,
    lexicon: VerbLexicon | None = None,
    xrules: ExtractionRules | None = None,
) -> dict:
    """Concept per gold node from the heuristics alone, labels ignored.

    Comparing this map against annotate_concepts measures how often the
    cheap annotation rules agree with curated labels.  Undecidable nodes
    map to None instead of raising.
    """
    if problem.gold is None:
        raise ValueError(f"{problem.id}: problem has no annotation")
    concepts: dict = {}

    def walk(expr: Expression) -> int:
        if isinstance(expr, Leaf):
            return expr.index
        rep_l = walk(expr.left)
        rep_r = walk(expr.right)
        first, second = min(rep_l, rep_r), max(rep_l, rep_r)
        ls = leaf_set(expr)
        concept = _heuristic_concept(problem, expr.op, first, second)
        concepts[ls] = concept
        if concept is None:
            return first
        return representative(concept, problem, first, second)

    walk(problem.gold.expression)
    return concepts


def _heuristic_concept(problem, op, first, second):
    schemas = (problem.quantities[first].schema, problem.quantities[second].schema)
    if any(s.math_term is not None for s in schemas):
        return Concept.EXPLICIT_MATH
    if op in (OpKind.MUL, OpKind.DIV, OpKind.DIV_REV):
        if has_rate(problem, first) or has_rate(problem, second):
            return Concept.DIMENSIONAL
        return None
    va, vb = verb_word(problem, first), verb_word(problem, second)
    if va is not None and va == vb:
        return Concept.PART_WHOLE
    return Concept.TRANSFER


@dataclass(frozen=True)
class NodeDecomp:
    """One gold node in operand order, with precomputed features."""

    leafset: frozenset
    concept: Concept
    required_op: OpKind
    first: int
    second: int
    phi_k: dict
    all_entries: tuple  # (rule_id, effective op, phi_r) at the gold concept
    gold_entries: tuple  # (rule_id, phi_r) whose effective op is required


@dataclass
class TrainingExample:
    problem: WordProblem
    nodes: tuple
    signatures: frozenset  # (canonical op, {left leafset, right leafset}) per gold node
    gold_phi_k: dict
    cache: dict = field(default_factory=dict)


def decompose(problem, concepts, lexicon=None, xrules=None) -> TrainingExample:
    """Precompute per-node features and the gold step signatures."""
    lexicon = lexicon or default_lexicon()
    xrules = xrules or default_rules()
    asked = extract_question_unit(problem.tokens, problem.question, xrules)
    cues = problem_cues(problem, xrules)
    cache: dict = {}
    nodes = []
    signatures = set()
    gold_phi_k: dict = {}

    def walk(expr: Expression) -> int:
        if isinstance(expr, Leaf):
            return expr.index
        rep_l = walk(expr.left)
        rep_r = walk(expr.right)
        first, second = min(rep_l, rep_r), max(rep_l, rep_r)
        required = expr.op if rep_l <= rep_r else _swap_op(expr.op)
        ls = leaf_set(expr)
        concept = concepts[ls]
        entries = pair_features(problem, first, second, lexicon, xrules, asked, cues, cache)
        all_entries = tuple(
            (rule.id, op, phi_r)
            for c, rule, op, _, phi_r, _ in entries
            if c == concept
        )
        gold_entries = tuple((rid, phi_r) for rid, op, phi_r in all_entries if op == required)
        phi_k = phi_concept(problem, concept, first, second)
        nodes.append(
            NodeDecomp(ls, concept, required, first, second, phi_k, all_entries, gold_entries)
        )
        signatures.add(
            (canonical_op(expr.op), frozenset({leaf_set(expr.left), leaf_set(expr.right)}))
        )
        for name, value in phi_k.items():
            gold_phi_k[name] = gold_phi_k.get(name, 0.0) + value
        return representative(concept, problem, first, second)

    walk(problem.gold.expression)
    return TrainingExample(
        problem=problem,
        nodes=tuple(nodes),
        signatures=frozenset(signatures),
        gold_phi_k=gold_phi_k,
        cache=cache,
    )


def build_examples(problems, lexicon=None, xrules=None):
    """Training examples plus human-readable skip warnings."""
    lexicon = lexicon or default_lexicon()
    xrules = xrules or default_rules()
    examples = []
    warnings = []
    for problem in problems:
        if problem.gold is None:
            warnings.append(f"{problem.id}: skipped, no annotation")
            continue
        gold_leaves = leaf_set(problem.gold.expression)
        usable = set(range(len(problem.quantities))) - set(filter_irrelevant(problem, xrules))
        if not gold_leaves <= usable:
            missing = sorted(gold_leaves - usable)
            warnings.append(f"{problem.id}: skipped, answer uses filtered quantities {missing}")
            continue
        if usable - gold_leaves:
            # the decoder joins every unfiltered quantity, so leftovers
            # make the gold tree unreachable
            extra = sorted(usable - gold_leaves)
            warnings.append(f"{problem.id}: skipped, quantities {extra} not in the answer survive filtering")
            continue
        try:
            concepts = annotate_concepts(problem, lexicon, xrules)
        except AnnotationGap as gap:
            warnings.append(f"{problem.id}: skipped, {gap}")
            continue
        example = decompose(problem, concepts, lexicon, xrules)
        blocked = [n for n in example.nodes if not n.gold_entries]
        if blocked:
            spots = ", ".join(str(sorted(n.leafset)) for n in blocked)
            warnings.append(f"{problem.id}: skipped, no rule derives the gold step at {spots}")
            continue
        if len(example.nodes) == 0:
            warnings.append(f"{problem.id}: skipped, single-quantity answer")
            continue
        examples.append(example)
    return examples, warnings


# ---------------------------------------------------------------------------
# subgradient machinery


def _best_entry(w, entries, required_op=None, augment=False):
    """Highest-scoring entry; first wins ties, so order must be stable."""
    best = None
    best_score = None
    for rule_id, op, phi_r in entries:
        score = dot(w, phi_r)
        if augment and op != required_op:
            score += 1
        if best_score is None or score > best_score:
            best_score = score
            best = (rule_id, op, phi_r)
    return best, best_score


def _best_gold(w, gold_entries):
    best = None
    best_score = None
    for rule_id, phi_r in gold_entries:
        score = dot(w, phi_r)
        if best_score is None or score > best_score:
            best_score = score
            best = (rule_id, phi_r)
    return best, best_score


def _norm_sq(w: dict) -> float:
    return sum(v * v for v in w.values())


def _scale(w: dict, factor: float) -> None:
    for name in w:
        w[name] *= factor


def _rule_objective(w, samples, lam):
    hinge = 0.0
    for node in samples:
        _, s_all = _best_entry(w, node.all_entries, node.required_op, augment=True)
        _, s_gold = _best_gold(w, node.gold_entries)
        hinge += max(0.0, s_all - s_gold)
    return lam / 2 * _norm_sq(w) + hinge / len(samples)


def train_rule_weights(examples, hyper: Hyperparams, seed: int = 42):
    """Stage one: per-node hinge over rules within the gold concept."""
    samples = [node for ex in examples for node in ex.nodes]
    if hyper.C == 0 or not samples:
        return {}, []
    lam = 1.0 / (hyper.C * len(samples))
    rng = random.Random(seed)
    w: dict = {}
    best_w: dict = {}
    best_obj = _rule_objective(w, samples, lam)
    log = []
    t = 0
    for _ in range(hyper.epochs):
        order = list(range(len(samples)))
        rng.shuffle(order)
        for idx in order:
            t += 1
            node = samples[idx]
            eta = 1.0 / (lam * t)
            (_, _, phi_up), s_all = _best_entry(w, node.all_entries, node.required_op, augment=True)
            (_, phi_down), s_gold = _best_gold(w, node.gold_entries)
            _scale(w, 1.0 - 1.0 / t)
            if s_all - s_gold > 0:
                for name, value in phi_up.items():
                    w[name] = w.get(name, 0.0) - eta * value
                for name, value in phi_down.items():
                    w[name] = w.get(name, 0.0) + eta * value
        obj = _rule_objective(w, samples, lam)
        if obj < best_obj:
            best_obj = obj
            best_w = dict(w)
        log.append(best_obj)
    return best_w, log


def _gold_score(w_r, w_k, example):
    total = 0.0
    for node in example.nodes:
        _, s_gold = _best_gold(w_r, node.gold_entries)
        total += s_gold + dot(w_k, node.phi_k)
    return total


def _step_bonus_for(example):
    def bonus(op, left, right):
        sig = (canonical_op(op), frozenset({leaf_set(left), leaf_set(right)}))
        return 0 if sig in example.signatures else 1

    return bonus


def _decode_phi_k(example, derivation):
    total: dict = {}
    for step in derivation.steps:
        for name, value in phi_concept(
            example.problem, step.concept, step.left_rep, step.right_rep
        ).items():
            total[name] = total.get(name, 0.0) + value
    return total


def _concept_objective(model, examples, lam, lexicon, xrules):
    hinge = 0.0
    for ex in examples:
        _, aug = solve(
            ex.problem,
            model,
            lexicon,
            xrules,
            step_bonus=_step_bonus_for(ex),
            feat_cache=ex.cache,
        )
        hinge += max(0.0, aug - _gold_score(model.w_r, model.w_k, ex))
    return lam / 2 * _norm_sq(model.w_k) + hinge / len(examples)


def _train_accuracy(model, examples, lexicon, xrules):
    correct = 0
    for ex in examples:
        try:
            derivation, _ = solve(ex.problem, model, lexicon, xrules, feat_cache=ex.cache)
        except NoDerivation:
            continue
        if evaluate(derivation.expression, ex.problem) == evaluate(
            ex.problem.gold.expression, ex.problem
        ):
            correct += 1
    return correct / len(examples)


def train_concept_weights(examples, w_r, hyper: Hyperparams, lexicon=None, xrules=None, seed=42):
    """Stage two: structured hinge on full decodes, updating concept weights."""
    lexicon = lexicon or default_lexicon()
    xrules = xrules or default_rules()
    if hyper.C == 0 or not examples:
        return {}, [], []
    lam = 1.0 / (hyper.C * len(examples))
    rng = random.Random(seed + 1)
    w_k: dict = {}
    model = Model(w_r=w_r, w_k=w_k, features=frozenset(), hyper=hyper)
    best_obj = _concept_objective(model, examples, lam, lexicon, xrules)
    best_w = dict(w_k)
    log = []
    accuracy = []
    t = 0
    for _ in range(hyper.epochs):
        order = list(range(len(examples)))
        rng.shuffle(order)
        for idx in order:
            t += 1
            ex = examples[idx]
            eta = 1.0 / (lam * t)
            derivation, aug = solve(
                ex.problem,
                model,
                lexicon,
                xrules,
                step_bonus=_step_bonus_for(ex),
                feat_cache=ex.cache,
            )
            violated = aug - _gold_score(w_r, w_k, ex) > 0
            _scale(w_k, 1.0 - 1.0 / t)
            if violated:
                phi_up = _decode_phi_k(ex, derivation)
                for name, value in phi_up.items():
                    w_k[name] = w_k.get(name, 0.0) - eta * value
                for name, value in ex.gold_phi_k.items():
                    w_k[name] = w_k.get(name, 0.0) + eta * value
        obj = _concept_objective(model, examples, lam, lexicon, xrules)
        if obj < best_obj:
            best_obj = obj
            best_w = dict(w_k)
        log.append(best_obj)
        accuracy.append(_train_accuracy(model, examples, lexicon, xrules))
    w_k.clear()
    w_k.update(best_w)
    return dict(w_k), log, accuracy


@dataclass(frozen=True)
class TrainLog:
    stage1: tuple
    stage2: tuple
    stage2_accuracy: tuple
    warnings: tuple


def feature_dictionary(examples) -> frozenset:
    """Closed feature set: everything observable on gold-side nodes."""
    names = set(PHI_CONCEPT_NAMES)
    for ex in examples:
        for node in ex.nodes:
            for _, _, phi_r in node.all_entries:
                names.update(phi_r)
    return frozenset(names)


def train(
    problems,
    hyper: Hyperparams = Hyperparams(),
    lexicon: VerbLexicon | None = None,
    xrules: ExtractionRules | None = None,
    seed: int = 42,
):
    """Full pipeline: build examples, fit both stages, assemble the model."""
    lexicon = lexicon or default_lexicon()
    xrules = xrules or default_rules()
    examples, warnings = build_examples(problems, lexicon, xrules)
    if not examples:
        raise TrainingError("no trainable problems: " + "; ".join(warnings[:5]))
    w_r, stage1 = train_rule_weights(examples, hyper, seed)
    w_k, stage2, accuracy = train_concept_weights(examples, w_r, hyper, lexicon, xrules, seed)
    model = Model(
        w_r=w_r,
        w_k=w_k,
        features=feature_dictionary(examples),
        hyper=hyper,
    )
    log = TrainLog(
        stage1=tuple(stage1),
        stage2=tuple(stage2),
        stage2_accuracy=tuple(accuracy),
        warnings=tuple(warnings),
    )
    return model, log
