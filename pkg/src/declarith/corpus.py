"""Corpus files: one JSON object per line.

Fields: ``id`` and ``text`` always; ``solution`` as a fully
parenthesized expression whose leaves carry one-based quantity
subscripts, e.g. ``(16[1]+14[2])/5[3]``; optional ``numbers`` picking
which detected mentions count as quantities; optional ``rates`` with
one-based indices of rate-marked quantities; optional ``concepts``
mapping root paths ("", "L", "RL", ...) to concept labels; optional
``schemas`` overriding extracted span fields per quantity.
"""

from __future__ import annotations

import dataclasses
import json
from fractions import Fraction

from .core import (
    Concept,
    ExpressionSyntaxError,
    GoldAnnotation,
    Leaf,
    Node,
    WordProblem,
    leaf_set,
    parse_annotated,
)
from .extraction import (
    ExtractionRules,
    NumberMismatch,
    build_problem,
    default_rules,
)

_SCHEMA_FIELDS = ("verb", "subject", "indirect_object", "unit", "rate")


class CorpusError(ValueError):
    def __init__(self, path, line: int, message: str):
        super().__init__(f"{path}:{line}: {message}")
        self.path = path
        self.line = line


def _node_at_path(expr, path: str):
    node = expr
    for step in path:
        if isinstance(node, Leaf):
            return None
        if step == "L":
            node = node.left
        elif step == "R":
            node = node.right
        else:
            return None
    return node


def _apply_schema_overrides(problem: WordProblem, overrides: dict) -> WordProblem:
    quantities = list(problem.quantities)
    for key, fields in overrides.items():
        index = int(key) - 1
        if not 0 <= index < len(quantities):
            raise ValueError(f"schema override for missing quantity {key}")
        schema = quantities[index].schema
        patch = {}
        for name, span in fields.items():
            if name not in _SCHEMA_FIELDS:
                raise ValueError(f"unknown schema field {name!r}")
            patch[name] = None if span is None else (int(span[0]), int(span[1]))
        schema = dataclasses.replace(schema, **patch)
        quantities[index] = dataclasses.replace(quantities[index], schema=schema)
    return dataclasses.replace(problem, quantities=tuple(quantities))


def problem_from_record(record: dict, xrules: ExtractionRules | None = None) -> WordProblem:
    """Build one annotated problem from a decoded corpus record."""
    xrules = xrules or default_rules()
    for required in ("id", "text"):
        if required not in record:
            raise ValueError(f"missing field {required!r}")
    numbers = record.get("numbers")
    values_override = None
    if numbers is not None:
        values_override = [Fraction(str(x)) for x in numbers]
    problem = build_problem(
        str(record["id"]), record["text"], xrules, values_override=values_override
    )
    if "schemas" in record:
        problem = _apply_schema_overrides(problem, record["schemas"])
    if "solution" not in record:
        return problem

    expression, stated = parse_annotated(record["solution"])
    count = len(problem.quantities)
    for index, value in stated.items():
        if index >= count:
            raise ValueError(
                f"solution references quantity {index + 1} but only {count} detected"
            )
        actual = problem.quantities[index].value
        if actual != value:
            raise ValueError(
                f"quantity {index + 1} is {actual}, solution says {value}"
            )

    rate_indices = set()
    for raw in record.get("rates", ()):
        index = int(raw) - 1
        if not 0 <= index < count:
            raise ValueError(f"rate index {raw} out of range")
        rate_indices.add(index)

    concepts = []
    for path, label in sorted(record.get("concepts", {}).items()):
        node = _node_at_path(expression, path)
        if node is None or isinstance(node, Leaf):
            raise ValueError(f"concept path {path!r} does not name an operation")
        concepts.append((leaf_set(node), Concept.from_label(label)))

    gold = GoldAnnotation(
        expression=expression,
        rate_indices=frozenset(rate_indices),
        concepts=tuple(concepts),
    )
    return dataclasses.replace(problem, gold=gold)


def load_corpus(path, xrules: ExtractionRules | None = None) -> list[WordProblem]:
    xrules = xrules or default_rules()
    problems = []
    seen_ids = set()
    with open(path, encoding="utf-8") as fh:
        for n, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as err:
                raise CorpusError(path, n, f"bad JSON: {err}") from err
            try:
                problem = problem_from_record(record, xrules)
            except (ValueError, NumberMismatch, ExpressionSyntaxError) as err:
                raise CorpusError(path, n, str(err)) from err
            if problem.id in seen_ids:
                raise CorpusError(path, n, f"duplicate id {problem.id!r}")
            seen_ids.add(problem.id)
            problems.append(problem)
    return problems


def write_records(records, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record, sort_keys=False) + "\n")
