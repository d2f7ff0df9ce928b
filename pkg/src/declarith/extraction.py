"""Parser-free schema extraction.

Rebuilds the shallow quantity frames (verb, subject, indirect object,
unit, rate, comparison term, neighborhood words) from surface patterns
over a plain tokenization, driven by small bundled lexicons.  No
dependency parser is involved; every decision is a local token rule.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import lru_cache
from importlib import resources

from .core import MathTermMark, Quantity, QuantitySchema, Span, Token, WordProblem
from .textutil import (
    AUXILIARIES,
    CONJUNCTIONS,
    DETERMINERS,
    LIGHT_ADVERBS,
    PREPOSITIONS,
    QUANTIFIER_WORDS,
    is_wordlike,
    singularize,
)

ABBREVIATIONS = {"mr", "mrs", "ms", "dr", "st", "mt", "jr", "sr"}

_TOKEN_RE = re.compile(r"\d+(?:,\d{3})+(?:\.\d+)?|\d+\.\d+|\d+|[A-Za-z]+|'[A-Za-z]+|[^\s]")

_NUMBER_RE = re.compile(r"^\d+(?:,\d{3})*(?:\.\d+)?$")

IOBJ_CUES = ("to", "from", "than", "as")

RATE_SKIP = {"each", "apiece", "every", "per"}


@dataclass(frozen=True)
class ExtractionRules:
    """Lexicons and the window size that drive extraction."""

    window: int = 3
    number_words: tuple[tuple[str, Fraction], ...] = ()
    verb_forms: frozenset = frozenset()
    pronouns: frozenset = frozenset()
    math_patterns: tuple = ()  # ((token, ...), class) with "~" as a short gap
    whole_cues: tuple = ()  # (word, group) with group in {sum, complement}

    def number_value(self, word: str) -> Fraction | None:
        for w, v in self.number_words:
            if w == word:
                return v
        return None

    def cue_group(self, word: str) -> str | None:
        for w, g in self.whole_cues:
            if w == word:
                return g
        return None


def _read_data(name: str) -> str:
    return resources.files("declarith.data").joinpath(name).read_text(encoding="utf-8")


def _data_lines(text: str) -> list[str]:
    out = []
    for line in text.splitlines():
        line = line.rstrip("\n")
        if not line or line.lstrip().startswith("#"):
            continue
        out.append(line)
    return out


def load_rules(
    window: int = 3,
    number_words_path=None,
    verb_lexicon_path=None,
    pronouns_path=None,
    math_patterns_path=None,
    whole_cues_path=None,
) -> ExtractionRules:
    """Load extraction lexicons, from bundled data unless paths are given."""

    def read(path, default_name):
        if path is None:
            return _read_data(default_name)
        with open(path, encoding="utf-8") as fh:
            return fh.read()

    number_words = []
    for line in _data_lines(read(number_words_path, "number_words.tsv")):
        word, value = line.split("\t")
        number_words.append((word, Fraction(value)))

    verb_forms = frozenset(_data_lines(read(verb_lexicon_path, "verb_lexicon.txt")))
    pronouns = frozenset(_data_lines(read(pronouns_path, "pronouns.txt")))

    math_patterns = []
    for line in _data_lines(read(math_patterns_path, "math_patterns.txt")):
        pattern, cls = line.split("\t")
        math_patterns.append((tuple(pattern.split()), cls))

    whole_cues = []
    for line in _data_lines(read(whole_cues_path, "whole_cues.txt")):
        word, group = line.split("\t")
        whole_cues.append((word, group))

    return ExtractionRules(
        window=window,
        number_words=tuple(number_words),
        verb_forms=verb_forms,
        pronouns=pronouns,
        math_patterns=tuple(math_patterns),
        whole_cues=tuple(whole_cues),
    )


@lru_cache(maxsize=8)
def default_rules(window: int = 3) -> ExtractionRules:
    return load_rules(window=window)


# ---------------------------------------------------------------------------
# tokenization


def tokenize(text: str) -> tuple[tuple[Token, ...], tuple[Span, ...]]:
    """Tokens with character offsets, plus sentence spans over tokens."""
    raw: list[Token] = []
    for m in _TOKEN_RE.finditer(text):
        raw.append(Token(m.group(), m.group().lower(), m.start(), m.end()))

    tokens: list[Token] = []
    i = 0
    while i < len(raw):
        tok = raw[i]
        nxt = raw[i + 1] if i + 1 < len(raw) else None
        if (
            nxt is not None
            and nxt.surface == "."
            and nxt.start == tok.end
            and tok.lower in ABBREVIATIONS
        ):
            merged = tok.surface + "."
            tokens.append(Token(merged, merged.lower(), tok.start, nxt.end))
            i += 2
            continue
        tokens.append(tok)
        i += 1

    sentences: list[Span] = []
    start = 0
    for idx, tok in enumerate(tokens):
        if tok.surface in {".", "!", "?"}:
            sentences.append((start, idx + 1))
            start = idx + 1
    if start < len(tokens):
        sentences.append((start, len(tokens)))
    return tuple(tokens), tuple(sentences)


def detect_numbers(tokens: tuple[Token, ...], rules: ExtractionRules) -> list[tuple[Fraction, Span]]:
    """Numeric mentions in token order: digits, number words, twice/thrice."""
    found = []
    for i, tok in enumerate(tokens):
        if _NUMBER_RE.match(tok.surface):
            found.append((Fraction(tok.surface.replace(",", "")), (i, i + 1)))
            continue
        value = rules.number_value(tok.lower)
        if value is not None:
            found.append((value, (i, i + 1)))
    return found


# ---------------------------------------------------------------------------
# schema pieces


def _sentence_of(sentences: tuple[Span, ...], index: int) -> Span:
    for span in sentences:
        if span[0] <= index < span[1]:
            return span
    return (0, 0) if not sentences else sentences[-1]


def _is_noun_candidate(tok: Token, rules: ExtractionRules) -> bool:
    if not is_wordlike(tok.lower):
        return False
    if tok.lower in rules.verb_forms or tok.lower in rules.pronouns:
        return False
    if tok.lower in DETERMINERS or tok.lower in PREPOSITIONS:
        return False
    if tok.lower in CONJUNCTIONS or tok.lower in QUANTIFIER_WORDS:
        return False
    if tok.lower in LIGHT_ADVERBS or tok.lower in AUXILIARIES:
        return False
    if rules.cue_group(tok.lower) is not None:
        return False
    return True


def _noun_run_after(tokens, start: int, end: int, rules: ExtractionRules) -> Span | None:
    """Contiguous noun-ish run beginning at or just after position start."""
    j = start
    while j < end and (tokens[j].lower in DETERMINERS or tokens[j].lower in QUANTIFIER_WORDS):
        j += 1
    first = j
    while j < end and _is_noun_candidate(tokens[j], rules):
        j += 1
    if j == first:
        return None
    return (first, j)


def _find_verb(tokens, q_index: int, sentence: Span, rules: ExtractionRules) -> Span | None:
    for i in range(q_index - 1, sentence[0] - 1, -1):
        if tokens[i].lower in rules.verb_forms:
            return (i, i + 1)
    for i in range(q_index + 1, sentence[1]):
        if tokens[i].lower in rules.verb_forms:
            return (i, i + 1)
    return None


def _subject_before(tokens, verb_start: int, sentence: Span, rules: ExtractionRules) -> Span | None:
    j = verb_start - 1
    while j >= sentence[0] and tokens[j].lower in LIGHT_ADVERBS:
        j -= 1
    end = j + 1
    while j >= sentence[0]:
        tok = tokens[j]
        if tok.lower == "'s" or _is_noun_candidate(tok, rules) or tok.lower in rules.pronouns:
            j -= 1
            continue
        break
    start = j + 1
    while start < end and tokens[start].lower in DETERMINERS:
        start += 1
    if start >= end:
        return None
    return (start, end)


def _indirect_object(tokens, q_index: int, verb: Span | None, sentence: Span, rules) -> Span | None:
    if verb is not None and verb[1] < sentence[1]:
        after = tokens[verb[1]]
        if after.lower in rules.pronouns:
            return (verb[1], verb[1] + 1)
    scan_from = (verb[1] if verb is not None else q_index + 1)
    positions = [i for i in range(scan_from, sentence[1]) if tokens[i].lower in IOBJ_CUES]
    ordered = []
    for i in positions:
        if tokens[i].lower == "as":
            ordered.append((1, -i, i))  # prefer the last "as": "as many ... as X"
        else:
            ordered.append((0, i, i))
    for _, _, i in sorted(ordered):
        if i + 1 >= sentence[1]:
            continue
        nxt = tokens[i + 1]
        if nxt.lower in rules.pronouns:
            return (i + 1, i + 2)
        run = _noun_run_after(tokens, i + 1, sentence[1], rules)
        if run is not None and run[0] == i + 1:
            return run
        if tokens[i + 1].lower in DETERMINERS and run is not None:
            return run
    return None


def _unit_after(tokens, q_index: int, sentence: Span, rules: ExtractionRules) -> Span | None:
    j = q_index + 1
    while j < sentence[1] and tokens[j].lower in QUANTIFIER_WORDS:
        j += 1
    run = []
    while j < sentence[1] and _is_noun_candidate(tokens[j], rules) and tokens[j].lower not in RATE_SKIP:
        run.append(j)
        j += 1
    if not run:
        return None
    return (run[0], run[-1] + 1)


def _rate_for(
    tokens,
    q_index: int,
    unit: Span | None,
    sentence: Span,
    rules,
    subject: Span | None = None,
    number_positions: tuple = (),
) -> Span | None:
    send = sentence[1]
    after = unit[1] if unit is not None else q_index + 1

    # "per X" / "a X" straight after the unit
    if after < send and tokens[after].lower == "per":
        run = _noun_run_after(tokens, after + 1, send, rules)
        if run is not None:
            return (run[1] - 1, run[1])
    if unit is not None and after < send and tokens[after].lower in {"a", "an"}:
        run = _noun_run_after(tokens, after + 1, send, rules)
        if run is not None and run[0] == after + 1:
            return (run[1] - 1, run[1])

    # trailing "each": the container is the noun before "of", else the subject
    if after < send and tokens[after].lower in {"each", "apiece"}:
        for i in range(q_index - 1, sentence[0], -1):
            if tokens[i].lower == "of" and _is_noun_candidate(tokens[i - 1], rules):
                return (i - 1, i)
        if subject is not None:
            return (subject[1] - 1, subject[1])
        return None

    # "each X" / "every X" elsewhere, claimed by the nearest number only
    local = [p for p in number_positions if sentence[0] <= p < send]
    for i in range(sentence[0], send - 1):
        if tokens[i].lower not in {"each", "every"}:
            continue
        if local and _nearest_number(local, i) != q_index:
            continue
        run = _noun_run_after(tokens, i + 1, send, rules)
        if run is None or run[0] != i + 1:
            continue
        rate_span = (run[0], run[0] + 1)
        if unit is not None and not (rate_span[1] <= unit[0] or rate_span[0] >= unit[1]):
            continue  # unit and rate must stay disjoint
        return rate_span
    return None


def _nearest_number(numbers: list[int], position: int) -> int | None:
    if not numbers:
        return None
    return min(numbers, key=lambda q: (abs(q - position), q))


def _math_term(tokens, q_index: int, sentence: Span, rules: ExtractionRules) -> MathTermMark | None:
    if tokens[q_index].lower in {"twice", "thrice"}:
        return MathTermMark((q_index, q_index + 1), "MUL")
    limit = min(sentence[1], q_index + 6)
    for start in range(q_index + 1, limit):
        for pattern, cls in rules.math_patterns:
            matched = _match_pattern(tokens, start, limit, pattern)
            if matched is not None:
                return MathTermMark((start, matched), cls)
    return None


def _match_pattern(tokens, start: int, limit: int, pattern: tuple[str, ...]) -> int | None:
    pos = start
    for p, word in enumerate(pattern):
        if word == "~":
            nxt = pattern[p + 1]
            for gap in range(0, 3):
                if pos + gap < limit and tokens[pos + gap].lower == nxt:
                    pos = pos + gap
                    break
            else:
                return None
            continue
        if pos >= limit or tokens[pos].lower != word:
            return None
        pos += 1
    return pos


def _neighborhood(tokens, q_index: int, window: int) -> tuple[str, ...]:
    out = []
    for i in range(max(0, q_index - window), min(len(tokens), q_index + window + 1)):
        if i == q_index:
            continue
        tok = tokens[i]
        if not is_wordlike(tok.lower):
            continue
        if _NUMBER_RE.match(tok.surface):
            continue
        out.append(tok.lower)
    return tuple(out)


# ---------------------------------------------------------------------------
# question handling


def question_span(tokens, sentences) -> Span | None:
    if not sentences:
        return None
    asking = []
    for span in sentences:
        lows = [t.lower for t in tokens[span[0] : span[1]]]
        if "?" in [t.surface for t in tokens[span[0] : span[1]]]:
            asking.append(span)
        elif "how" in lows or "what" in lows:
            asking.append(span)
    return asking[-1] if asking else sentences[-1]


def extract_question_unit(tokens, q_span: Span | None, rules: ExtractionRules) -> Span | None:
    """Noun phrase asked about, from a "how many X" / "how much X" frame."""
    if q_span is None:
        return None
    for i in range(q_span[0], q_span[1] - 1):
        if tokens[i].lower == "how" and tokens[i + 1].lower in {"many", "much"}:
            run = _noun_run_after(tokens, i + 2, q_span[1], rules)
            if run is not None and run[0] == i + 2:
                return run
            return None
    return None


# ---------------------------------------------------------------------------
# assembly


def extract_schema(
    tokens: tuple[Token, ...],
    sentences: tuple[Span, ...],
    q_span: Span,
    rules: ExtractionRules,
    fallback_unit: Span | None = None,
    number_positions: tuple = (),
) -> QuantitySchema:
    """Schema for one number mention at the given token span."""
    q_index = q_span[0]
    sentence = _sentence_of(sentences, q_index)
    verb = _find_verb(tokens, q_index, sentence, rules)
    subject = _subject_before(tokens, verb[0], sentence, rules) if verb else None
    iobj = _indirect_object(tokens, q_index, verb, sentence, rules)
    unit = _unit_after(tokens, q_index, sentence, rules)
    if unit is None:
        unit = fallback_unit
    rate = _rate_for(
        tokens,
        q_index,
        unit if unit and unit[0] > q_index else None,
        sentence,
        rules,
        subject=subject,
        number_positions=number_positions,
    )
    if rate is not None and unit is not None and not (rate[1] <= unit[0] or rate[0] >= unit[1]):
        rate = None
    math = _math_term(tokens, q_index, sentence, rules)
    return QuantitySchema(
        verb=verb,
        subject=subject,
        indirect_object=iobj,
        unit=unit,
        rate=rate,
        math_term=math,
        neighborhood=_neighborhood(tokens, q_index, rules.window),
    )


def build_problem(
    id: str,
    text: str,
    rules: ExtractionRules | None = None,
    gold=None,
    values_override: list[Fraction] | None = None,
) -> WordProblem:
    """Tokenize, detect numbers, and extract a schema per number."""
    rules = rules or default_rules()
    tokens, sentences = tokenize(text)
    detected = detect_numbers(tokens, rules)
    if values_override is not None:
        detected = _reconcile_numbers(detected, values_override)
    q_span_q = question_span(tokens, sentences)
    asked = extract_question_unit(tokens, q_span_q, rules)

    # rate cues never fire inside the asked-unit phrase
    positions = tuple(span[0] for _, span in detected)
    quantities = []
    for index, (value, span) in enumerate(detected):
        schema = extract_schema(
            tokens, sentences, span, rules, fallback_unit=asked, number_positions=positions
        )
        if schema.rate is not None and asked is not None:
            if asked[0] <= schema.rate[0] < asked[1]:
                schema = replace(schema, rate=None)
        quantities.append(Quantity(index=index, value=value, span=span, schema=schema))

    return WordProblem(
        id=id,
        text=text,
        tokens=tokens,
        sentences=sentences,
        quantities=tuple(quantities),
        question=q_span_q,
        gold=gold,
    )


class NumberMismatch(ValueError):
    """Provided number list cannot be aligned with the detected mentions."""


def _reconcile_numbers(detected, override_values):
    """Keep the detected mentions matching the given value sequence."""
    values = [Fraction(v) for v in override_values]
    picked = []
    at = 0
    for value, span in detected:
        if at < len(values) and value == values[at]:
            picked.append((value, span))
            at += 1
    if at != len(values):
        raise NumberMismatch(
            f"could not align numbers {[str(v) for v in values]} with detected mentions"
        )
    return picked


def head_noun(tokens, span: Span | None) -> str | None:
    """Singularized head (last token) of a noun span."""
    if span is None:
        return None
    return singularize(tokens[span[1] - 1].lower)


def filter_irrelevant(problem: WordProblem, rules: ExtractionRules | None = None) -> frozenset[int]:
    """Indices of quantities excluded from search.

    A quantity is excluded iff its unit head matches neither the asked
    unit, nor any other quantity's unit, nor any other quantity's rate.
    Quantities without a unit are never excluded.
    """
    rules = rules or default_rules()
    asked = extract_question_unit(problem.tokens, problem.question, rules)
    asked_head = head_noun(problem.tokens, asked)
    heads = [head_noun(problem.tokens, q.schema.unit) for q in problem.quantities]
    rates = [head_noun(problem.tokens, q.schema.rate) for q in problem.quantities]
    excluded = set()
    for i, q in enumerate(problem.quantities):
        mine = heads[i]
        if mine is None:
            continue
        others = {h for j, h in enumerate(heads) if j != i and h is not None}
        others |= {r for j, r in enumerate(rates) if j != i and r is not None}
        if asked_head is not None:
            others.add(asked_head)
        if mine not in others:
            excluded.add(i)
    return frozenset(excluded)
