"""Small token-level helpers shared by extraction, scoring, and knowledge."""

from __future__ import annotations

IRREGULAR_PLURALS = {
    "children": "child",
    "men": "man",
    "women": "woman",
    "people": "person",
    "feet": "foot",
    "teeth": "tooth",
    "geese": "goose",
    "mice": "mouse",
    "oxen": "ox",
    "sheep": "sheep",
    "fish": "fish",
    "deer": "deer",
    "leaves": "leaf",
    "loaves": "loaf",
    "shelves": "shelf",
    "knives": "knife",
    "lives": "life",
    "wives": "wife",
    "halves": "half",
    "wolves": "wolf",
    "calves": "calf",
}

DETERMINERS = {
    "the", "a", "an", "this", "that", "these", "those", "each", "every",
    "some", "any", "no", "his", "her", "their", "its", "my", "your", "our",
}

QUANTIFIER_WORDS = {"more", "fewer", "less", "many", "much", "few", "little", "several", "other"}

PREPOSITIONS = {
    "of", "in", "on", "at", "to", "from", "with", "for", "by", "than",
    "as", "per", "into", "onto", "over", "under", "about", "after",
    "before", "during", "around", "near", "among", "between", "along",
}

CONJUNCTIONS = {"and", "or", "but", "so", "because", "when", "while", "if", "then"}

LIGHT_ADVERBS = {
    "now", "then", "also", "just", "still", "already", "yesterday",
    "today", "tomorrow", "finally", "later", "often", "always", "usually",
    "first", "next", "last", "again", "currently",
}

AUXILIARIES = {
    "will", "would", "can", "could", "shall", "should", "may", "might",
    "must", "do", "does", "did",
}


def singularize(word: str) -> str:
    """Naive singular form of a lowercase noun."""
    if word in IRREGULAR_PLURALS:
        return IRREGULAR_PLURALS[word]
    if len(word) > 4 and word.endswith("ies"):
        return word[:-3] + "y"
    if len(word) > 3 and word.endswith(("ses", "xes", "zes", "ches", "shes")):
        return word[:-2]
    if len(word) > 3 and word.endswith("s") and not word.endswith(("ss", "us", "is")):
        return word[:-1]
    return word


def is_wordlike(text: str) -> bool:
    """True for tokens that look like words, including abbreviations."""
    return bool(text) and text[0].isalpha()


def normalize_argument(tokens) -> frozenset[str]:
    """Token set used for coreference similarity: singularized content words."""
    out = set()
    for tok in tokens:
        if not is_wordlike(tok):
            continue
        if tok in DETERMINERS:
            continue
        out.add(singularize(tok))
    return frozenset(out)


def edit_distance(a: str, b: str) -> int:
    """Levenshtein distance, used only as a classification fallback."""
    if len(a) < len(b):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i]
        for j, cb in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[-1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]
