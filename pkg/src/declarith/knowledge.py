"""Declarative knowledge: verb classes, inference rules, applicability.

The solver chooses operations by applying inference rules under a math
concept.  Each rule pairs a hard trigger (verb-class pair, rate or
comparison-term placement, container relation between units) with soft
coreference evidence that is scored by learned weights rather than
enforced.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .core import Concept, OpKind, Quantity, Span, WordProblem
from .extraction import ExtractionRules, default_rules, extract_question_unit
from .textutil import DETERMINERS, edit_distance, singularize


class VerbClass(enum.Enum):
    HAVE = "HAVE"
    GET = "GET"
    GIVE = "GIVE"
    CONSTRUCT = "CONSTRUCT"
    DESTROY = "DESTROY"


class MathClass(enum.Enum):
    ADD = "ADD"
    SUB = "SUB"
    MUL = "MUL"


class PartWholeRelation(enum.Enum):
    SIBLING = "Sibling"
    HYPONYM = "Hyponym"  # first quantity is a part of the second
    HYPERNYM = "Hypernym"  # first quantity is the whole


# ---------------------------------------------------------------------------
# verb classification


class LexiconError(ValueError):
    """Seed or embedding data is unusable."""


@dataclass
class VerbLexicon:
    """Seed verbs per class plus dense vectors for nearest-seed backoff."""

    seeds: dict
    vectors: dict
    _cache: dict

    def classify(self, word: str) -> VerbClass:
        w = word.lower()
        hit = self._cache.get(w)
        if hit is not None:
            return hit
        if w in self.seeds:
            cls = self.seeds[w]
        elif w in self.vectors:
            cls = self._nearest_by_cosine(self.vectors[w])
        else:
            cls = self._nearest_by_edits(w)
        self._cache[w] = cls
        return cls

    def _nearest_by_cosine(self, vec) -> VerbClass:
        best = None
        best_cos = -2.0
        norm = float(np.linalg.norm(vec))
        for seed in sorted(self.seeds):
            sv = self.vectors[seed]
            denom = norm * float(np.linalg.norm(sv))
            cos = float(np.dot(vec, sv)) / denom if denom else -1.0
            if cos > best_cos:
                best_cos = cos
                best = seed
        return self.seeds[best]

    def _nearest_by_edits(self, word: str) -> VerbClass:
        best = min(sorted(self.seeds), key=lambda s: (edit_distance(word, s), s))
        return self.seeds[best]


def load_verb_lexicon(seeds_path=None, embeddings_path=None) -> VerbLexicon:
    def read(path, default_name):
        if path is None:
            return resources.files("declarith.data").joinpath(default_name).read_text("utf-8")
        with open(path, encoding="utf-8") as fh:
            return fh.read()

    seeds = {}
    for line in read(seeds_path, "verb_seeds.txt").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        cls, word = line.split()
        seeds[word.lower()] = VerbClass(cls)

    vectors = {}
    for line in read(embeddings_path, "verb_embeddings.tsv").splitlines():
        if not line.strip():
            continue
        parts = line.split("\t")
        vectors[parts[0]] = np.array([float(x) for x in parts[1:]], dtype=float)

    missing = [w for w in seeds if w not in vectors]
    if missing:
        raise LexiconError(f"seed verbs lack embeddings: {sorted(missing)}")
    return VerbLexicon(seeds=seeds, vectors=vectors, _cache={})


_DEFAULT_LEXICON = None


def default_lexicon() -> VerbLexicon:
    global _DEFAULT_LEXICON
    if _DEFAULT_LEXICON is None:
        _DEFAULT_LEXICON = load_verb_lexicon()
    return _DEFAULT_LEXICON


# ---------------------------------------------------------------------------
# rule catalog

# verb-class groups used by the transfer table
_GROUP = {
    VerbClass.HAVE: "H",
    VerbClass.GET: "GC",
    VerbClass.CONSTRUCT: "GC",
    VerbClass.GIVE: "GD",
    VerbClass.DESTROY: "GD",
}

_TRANSFER_TABLE = (
    ("H", "H", OpKind.SUB),
    ("H", "GC", OpKind.ADD),
    ("H", "GD", OpKind.SUB),
    ("GC", "H", OpKind.SUB),
    ("GC", "GC", OpKind.ADD),
    ("GC", "GD", OpKind.SUB),
    ("GD", "H", OpKind.ADD),
    ("GD", "GC", OpKind.SUB),
    ("GD", "GD", OpKind.ADD),
)


@dataclass(frozen=True)
class Rule:
    id: str
    concept: Concept
    op: OpKind
    pair: tuple | None = None  # transfer verb-group pair
    mirror: bool = False  # coreference runs subject-to-recipient


@dataclass(frozen=True)
class RuleEvidence:
    """Span pairs to softly compare, plus any trigger words matched."""

    slots: tuple = ()
    cues: tuple = ()


def _build_catalog() -> tuple[Rule, ...]:
    rules = []
    for i, (a, b, op) in enumerate(_TRANSFER_TABLE, start=1):
        rules.append(Rule(f"T{i:02d}", Concept.TRANSFER, op, pair=(a, b)))
    for i, (a, b, op) in enumerate(_TRANSFER_TABLE, start=1):
        rules.append(Rule(f"T{i + 9:02d}", Concept.TRANSFER, op, pair=(a, b), mirror=True))
    rules.append(Rule("D1", Concept.DIMENSIONAL, OpKind.MUL))
    rules.append(Rule("D2", Concept.DIMENSIONAL, OpKind.DIV))
    rules.append(Rule("D3", Concept.DIMENSIONAL, OpKind.DIV_REV))
    rules.append(Rule("E1", Concept.EXPLICIT_MATH, OpKind.ADD))
    rules.append(Rule("E2", Concept.EXPLICIT_MATH, OpKind.SUB))
    rules.append(Rule("E3", Concept.EXPLICIT_MATH, OpKind.SUB))
    rules.append(Rule("E4", Concept.EXPLICIT_MATH, OpKind.ADD))
    rules.append(Rule("E5", Concept.EXPLICIT_MATH, OpKind.DIV_REV))
    rules.append(Rule("E6", Concept.EXPLICIT_MATH, OpKind.DIV))
    rules.append(Rule("E7", Concept.EXPLICIT_MATH, OpKind.MUL))
    rules.append(Rule("P1", Concept.PART_WHOLE, OpKind.ADD))
    rules.append(Rule("P2", Concept.PART_WHOLE, OpKind.SUB))
    rules.append(Rule("P3", Concept.PART_WHOLE, OpKind.SUB))
    return tuple(rules)


CATALOG: tuple[Rule, ...] = _build_catalog()
RULES: dict = {r.id: r for r in CATALOG}


def rules_for(concept: Concept) -> tuple[Rule, ...]:
    return tuple(r for r in CATALOG if r.concept == concept)


def flip_add_sub(op: OpKind) -> OpKind:
    if op == OpKind.ADD:
        return OpKind.SUB
    if op == OpKind.SUB:
        return OpKind.ADD
    return op


# ---------------------------------------------------------------------------
# shared predicates


def has_rate(problem: WordProblem, index: int) -> bool:
    """Rate marking from the extracted schema or the problem annotation."""
    if problem.quantities[index].schema.rate is not None:
        return True
    gold = problem.gold
    return gold is not None and index in gold.rate_indices


def verb_word(problem: WordProblem, index: int) -> str | None:
    span = problem.quantities[index].schema.verb
    if span is None:
        return None
    return problem.tokens[span[0]].lower


def verb_class(problem: WordProblem, index: int, lexicon: VerbLexicon) -> VerbClass | None:
    word = verb_word(problem, index)
    if word is None:
        return None
    return lexicon.classify(word)


def math_class(problem: WordProblem, index: int) -> MathClass | None:
    mark = problem.quantities[index].schema.math_term
    if mark is None:
        return None
    return MathClass(mark.cls)


def problem_cues(problem: WordProblem, xrules: ExtractionRules) -> tuple:
    """(word, group) cue pairs present anywhere in the text, in order."""
    found = []
    for tok in problem.tokens:
        group = xrules.cue_group(tok.lower)
        if group is not None:
            found.append((tok.lower, group))
    return tuple(found)


def _unit_mods(tokens, span: Span) -> frozenset:
    mods = set()
    for tok in tokens[span[0] : span[1] - 1]:
        if tok.lower in DETERMINERS:
            continue
        mods.add(singularize(tok.lower))
    return frozenset(mods)


def part_whole_relation(
    tokens, qa: Quantity, qb: Quantity, cue_groups: frozenset
) -> PartWholeRelation | None:
    """Container relation between two quantities, judged from unit spans.

    Heads must match.  Distinct modifiers read as siblings unless a
    complement cue ("rest", "remaining") promotes the earlier mention to
    the whole.  A bare head against a modified one is a container only
    when some cue licenses it.  Identical spellings need a cue to pick
    between sibling and hierarchy readings.
    """
    ua, ub = qa.schema.unit, qb.schema.unit
    if ua is None or ub is None:
        return None
    if singularize(tokens[ua[1] - 1].lower) != singularize(tokens[ub[1] - 1].lower):
        return None
    mods_a = _unit_mods(tokens, ua)
    mods_b = _unit_mods(tokens, ub)
    a_first = qa.span[0] <= qb.span[0]

    def hierarchy(a_is_whole: bool) -> PartWholeRelation:
        return PartWholeRelation.HYPERNYM if a_is_whole else PartWholeRelation.HYPONYM

    if mods_a and mods_b and mods_a != mods_b:
        if "complement" in cue_groups:
            return hierarchy(a_first)
        return PartWholeRelation.SIBLING
    if bool(mods_a) != bool(mods_b):
        if cue_groups:
            return hierarchy(not mods_a)
        return None
    if "complement" in cue_groups:
        return hierarchy(a_first)
    if "sum" in cue_groups:
        return PartWholeRelation.SIBLING
    return None


# ---------------------------------------------------------------------------
# applicability


def applicable_rules(
    problem: WordProblem,
    concept: Concept,
    first: int,
    second: int,
    lexicon: VerbLexicon | None = None,
    xrules: ExtractionRules | None = None,
    asked_unit: Span | None = None,
    cues: tuple | None = None,
):
    """Rules usable to combine two quantities under a concept.

    ``first`` and ``second`` are quantity indices in operand order (the
    textually earlier representative first).  Returns a list of
    ``(rule, operation, evidence)`` where the operation already accounts
    for mirrored transfer direction.
    """
    lexicon = lexicon or default_lexicon()
    xrules = xrules or default_rules()
    if cues is None:
        cues = problem_cues(problem, xrules)
    qa = problem.quantities[first]
    qb = problem.quantities[second]
    sa, sb = qa.schema, qb.schema

    if concept == Concept.TRANSFER:
        ca = verb_class(problem, first, lexicon)
        cb = verb_class(problem, second, lexicon)
        if ca is None or cb is None:
            return []
        pair = (_GROUP[ca], _GROUP[cb])
        out = []
        for rule in CATALOG:
            if rule.concept != Concept.TRANSFER or rule.pair != pair:
                continue
            if not rule.mirror:
                ev = RuleEvidence(slots=(("subj", sa.subject, sb.subject),))
                out.append((rule, rule.op, ev))
            else:
                hard = {VerbClass.CONSTRUCT, VerbClass.DESTROY}
                op = rule.op if (ca in hard or cb in hard) else flip_add_sub(rule.op)
                ev = RuleEvidence(
                    slots=(
                        ("s1io2", sa.subject, sb.indirect_object),
                        ("s2io1", sb.subject, sa.indirect_object),
                    )
                )
                out.append((rule, op, ev))
        return out

    if concept == Concept.DIMENSIONAL:
        ra = has_rate(problem, first)
        rb = has_rate(problem, second)
        if not ra and not rb:
            return []
        if asked_unit is None:
            asked_unit = extract_question_unit(problem.tokens, problem.question, xrules)
        out = []
        if ra != rb:
            carrier, other = (sa, sb) if ra else (sb, sa)
            ev = RuleEvidence(slots=(("unitrate", other.unit, carrier.rate),))
            out.append((RULES["D1"], OpKind.MUL, ev))
        if rb:
            ev = RuleEvidence(slots=(("unit", sa.unit, sb.unit), ("ansrate", asked_unit, sb.rate)))
            out.append((RULES["D2"], OpKind.DIV, ev))
        if ra:
            ev = RuleEvidence(slots=(("unit", sa.unit, sb.unit), ("ansrate", asked_unit, sa.rate)))
            out.append((RULES["D3"], OpKind.DIV_REV, ev))
        return out

    if concept == Concept.EXPLICIT_MATH:
        ma = math_class(problem, first)
        mb = math_class(problem, second)
        if ma is None and mb is None:
            return []

        def evidence(carrier_first: bool) -> RuleEvidence:
            carrier, other = (sa, sb) if carrier_first else (sb, sa)
            return RuleEvidence(
                slots=(
                    ("subj", sa.subject, sb.subject),
                    ("cmp", other.subject, carrier.indirect_object),
                )
            )

        out = []
        for cls, plain, flipped in (
            (MathClass.ADD, "E1", "E3"),
            (MathClass.SUB, "E2", "E4"),
        ):
            if ma == cls or mb == cls:
                ev = evidence(carrier_first=(ma == cls))
                out.append((RULES[plain], RULES[plain].op, ev))
                out.append((RULES[flipped], RULES[flipped].op, ev))
        if ma == MathClass.MUL:
            out.append((RULES["E5"], OpKind.DIV_REV, evidence(True)))
        if mb == MathClass.MUL:
            out.append((RULES["E6"], OpKind.DIV, evidence(False)))
        if ma == MathClass.MUL or mb == MathClass.MUL:
            out.append((RULES["E7"], OpKind.MUL, evidence(ma == MathClass.MUL)))
        return out

    if concept == Concept.PART_WHOLE:
        groups = frozenset(g for _, g in cues)
        relation = part_whole_relation(problem.tokens, qa, qb, groups)
        if relation is None:
            return []
        rule_id = {
            PartWholeRelation.SIBLING: "P1",
            PartWholeRelation.HYPONYM: "P2",
            PartWholeRelation.HYPERNYM: "P3",
        }[relation]
        rule = RULES[rule_id]
        ev = RuleEvidence(
            slots=(("subj", sa.subject, sb.subject),),
            cues=tuple(w for w, _ in cues),
        )
        return [(rule, rule.op, ev)]

    raise ValueError(f"unknown concept: {concept!r}")
