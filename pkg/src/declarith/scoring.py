"""Feature maps and model file handling.

Rule features (``r:`` namespace) describe how well a rule's soft
coreference evidence holds, plus lexical context around both operand
quantities.  Concept features (``k:`` namespace) are a small fixed set
gating concept choice.  Both namespaces share one closed dictionary:
features never seen in training keep weight zero.
"""

from __future__ import annotations

from .core import Concept, Model, WordProblem
from .extraction import ExtractionRules, default_rules
from .knowledge import Rule, RuleEvidence, RULES, has_rate, verb_word
from .textutil import normalize_argument

COREF_BACKOFF = "coref"  # rule-independent copies of every slot feature


def jaccard_bucket(value) -> str:
    if value <= 0:
        return "0"
    if value >= 1:
        return "eq"
    return "hi" if value >= 0.5 else "lo"


def _span_tokens(problem: WordProblem, span):
    return problem.tokens[span[0] : span[1]]


def _is_pronoun_span(problem: WordProblem, span, xrules: ExtractionRules) -> bool:
    toks = _span_tokens(problem, span)
    return len(toks) == 1 and toks[0].lower in xrules.pronouns


def _bump(feats: dict, name: str, amount: float = 1.0) -> None:
    feats[name] = feats.get(name, 0.0) + amount


def _slot_features(feats, problem, rule_id, slot, a, b, xrules) -> None:
    names = (f"r:{rule_id}:{slot}", f"r:{COREF_BACKOFF}")
    if a is None or b is None:
        for n in names:
            _bump(feats, f"{n}:absent")
        return
    if _is_pronoun_span(problem, a, xrules) or _is_pronoun_span(problem, b, xrules):
        for n in names:
            _bump(feats, f"{n}:pron")
        return
    set_a = normalize_argument(t.lower for t in _span_tokens(problem, a))
    set_b = normalize_argument(t.lower for t in _span_tokens(problem, b))
    union = set_a | set_b
    if not union:
        for n in names:
            _bump(feats, f"{n}:absent")
        return
    bucket = jaccard_bucket(len(set_a & set_b) / len(union))
    for n in names:
        _bump(feats, f"{n}:jac={bucket}")


def phi_rule(
    problem: WordProblem,
    rule: Rule,
    evidence: RuleEvidence,
    first: int,
    second: int,
    xrules: ExtractionRules | None = None,
) -> dict:
    """Feature vector for applying one rule to an operand pair."""
    xrules = xrules or default_rules()
    feats: dict = {}
    _bump(feats, f"r:{rule.id}:bias")
    for slot, a, b in evidence.slots:
        _slot_features(feats, problem, rule.id, slot, a, b, xrules)
    for w in evidence.cues:
        _bump(feats, f"r:{rule.id}:cue={w}")
    for index in (first, second):
        for w in problem.quantities[index].schema.neighborhood:
            _bump(feats, f"r:{rule.id}:nb={w}")
    return feats


def phi_concept(problem: WordProblem, concept: Concept, first: int, second: int) -> dict:
    """Fixed-name features gating which concept combines the pair."""
    feats: dict = {}
    if concept == Concept.TRANSFER:
        _bump(feats, "k:tr:bias")
    elif concept == Concept.DIMENSIONAL:
        _bump(feats, "k:dim:bias")
        if has_rate(problem, first):
            _bump(feats, "k:dim:rate_on_left")
        if has_rate(problem, second):
            _bump(feats, "k:dim:rate_on_right")
    elif concept == Concept.PART_WHOLE:
        _bump(feats, "k:pw:bias")
        va = verb_word(problem, first)
        vb = verb_word(problem, second)
        if va is not None and vb is not None:
            _bump(feats, "k:pw:same_verb" if va == vb else "k:pw:verbs_differ")
    elif concept == Concept.EXPLICIT_MATH:
        _bump(feats, "k:em:bias")
    else:
        raise ValueError(f"unknown concept: {concept!r}")
    return feats


def dot(weights: dict, feats: dict):
    total = 0
    for name, value in feats.items():
        w = weights.get(name)
        if w:
            total += w * value
    return total


def score_step(
    model: Model,
    problem: WordProblem,
    concept: Concept,
    rule: Rule,
    evidence: RuleEvidence,
    first: int,
    second: int,
    xrules: ExtractionRules | None = None,
):
    """w_k . phi_k + w_r . phi_r for one combination step."""
    return dot(model.w_k, phi_concept(problem, concept, first, second)) + dot(
        model.w_r, phi_rule(problem, rule, evidence, first, second, xrules)
    )


class UnknownRule(ValueError):
    """Derivation step names a rule that is not in the catalog."""


class InapplicableRule(ValueError):
    """Derivation step's rule does not fire on its operand pair."""


def score_derivation(model, problem, derivation, lexicon=None, xrules=None):
    """Recompute the model score of a stored derivation."""
    from .knowledge import applicable_rules

    total = 0
    for step in derivation.steps:
        if step.rule_id not in RULES:
            raise UnknownRule(step.rule_id)
        entries = applicable_rules(
            problem, step.concept, step.left_rep, step.right_rep, lexicon, xrules
        )
        match = [(r, op, ev) for r, op, ev in entries if r.id == step.rule_id]
        if not match:
            raise InapplicableRule(f"{step.rule_id} on pair ({step.left_rep}, {step.right_rep})")
        rule, _, evidence = match[0]
        total += score_step(model, problem, step.concept, rule, evidence, step.left_rep, step.right_rep, xrules)
    return total


# ---------------------------------------------------------------------------
# model files

MODEL_HEADER = "# declarith model v1"


class ModelFormatError(ValueError):
    pass


def save_model(model: Model, path) -> None:
    """Write a model as stable, sorted, tab-separated text."""
    h = model.hyper
    lines = [MODEL_HEADER, f"C={h.C!r} epochs={h.epochs} beam={h.beam} window={h.window}"]
    for name in sorted(model.features):
        if name.startswith("r:"):
            weight = model.w_r.get(name, 0.0)
        else:
            weight = model.w_k.get(name, 0.0)
        lines.append(f"{name}\t{float(weight)!r}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def load_model(path) -> Model:
    from .core import Hyperparams

    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0] != MODEL_HEADER:
        raise ModelFormatError(f"{path}: missing header line")
    try:
        settings = dict(kv.split("=") for kv in lines[1].split())
        hyper = Hyperparams(
            C=float(settings["C"]),
            epochs=int(settings["epochs"]),
            beam=int(settings["beam"]),
            window=int(settings["window"]),
        )
    except (IndexError, KeyError, ValueError) as err:
        raise ModelFormatError(f"{path}: bad settings line") from err
    w_r: dict = {}
    w_k: dict = {}
    features = set()
    for n, line in enumerate(lines[2:], start=3):
        if not line:
            continue
        try:
            name, raw = line.split("\t")
            weight = float(raw)
        except ValueError as err:
            raise ModelFormatError(f"{path}:{n}: bad weight line") from err
        if name in features:
            raise ModelFormatError(f"{path}:{n}: duplicate feature {name}")
        features.add(name)
        if name.startswith("r:"):
            w_r[name] = weight
        elif name.startswith("k:"):
            w_k[name] = weight
        else:
            raise ModelFormatError(f"{path}:{n}: unknown namespace in {name}")
    return Model(w_r=w_r, w_k=w_k, features=frozenset(features), hyper=hyper)
