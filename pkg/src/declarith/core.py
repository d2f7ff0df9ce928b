"""Core data model: word problems, quantity schemas, expression trees, models.

Expressions are binary trees over quantity indices.  Subtraction is
order-free: it always evaluates as larger-minus-smaller.  Division comes
in two kinds, left-over-right and right-over-left, because inference
rules may emit either orientation.  All arithmetic is exact (fractions).
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction


Span = tuple[int, int]  # token index range, end exclusive


class DivisionByZero(ZeroDivisionError):
    """Raised when an expression divides by a zero-valued subtree."""


class ExpressionSyntaxError(ValueError):
    """Raised when an expression string does not match the grammar."""


class OpKind(Enum):
    ADD = "+"
    SUB = "-"
    MUL = "*"
    DIV = "/"
    DIV_REV = "\\"  # right operand divided by left


class Concept(Enum):
    TRANSFER = "Transfer"
    DIMENSIONAL = "DimensionalAnalysis"
    PART_WHOLE = "PartWhole"
    EXPLICIT_MATH = "ExplicitMath"

    @classmethod
    def from_label(cls, label: str) -> "Concept":
        for c in cls:
            if c.value == label:
                return c
        raise ValueError(f"unknown concept label: {label!r}")


# ---------------------------------------------------------------------------
# expression trees


@dataclass(frozen=True)
class Leaf:
    index: int  # position in the problem's quantity list, 0-based


@dataclass(frozen=True)
class Node:
    op: OpKind
    left: "Expression"
    right: "Expression"


Expression = Leaf | Node


def leaves(expr: Expression) -> tuple[int, ...]:
    """Leaf quantity indices in left-to-right tree order."""
    if isinstance(expr, Leaf):
        return (expr.index,)
    return leaves(expr.left) + leaves(expr.right)


def leaf_set(expr: Expression) -> frozenset[int]:
    return frozenset(leaves(expr))


def internal_nodes(expr: Expression) -> list[Node]:
    """All internal nodes, parents before children."""
    if isinstance(expr, Leaf):
        return []
    return [expr] + internal_nodes(expr.left) + internal_nodes(expr.right)


def evaluate_values(expr: Expression, values: list[Fraction] | tuple[Fraction, ...]) -> Fraction:
    """Evaluate against a value list indexed by leaf index."""
    if isinstance(expr, Leaf):
        return Fraction(values[expr.index])
    a = evaluate_values(expr.left, values)
    b = evaluate_values(expr.right, values)
    op = expr.op
    if op is OpKind.ADD:
        return a + b
    if op is OpKind.SUB:
        return a - b if a >= b else b - a
    if op is OpKind.MUL:
        return a * b
    if op is OpKind.DIV:
        if b == 0:
            raise DivisionByZero("zero divisor in expression")
        return a / b
    if op is OpKind.DIV_REV:
        if a == 0:
            raise DivisionByZero("zero divisor in expression")
        return b / a
    raise AssertionError(op)


def evaluate(expr: Expression, problem: "WordProblem") -> Fraction:
    return evaluate_values(expr, [q.value for q in problem.quantities])


def op_multiset(expr: Expression) -> Counter:
    """Multiset of operation kinds; the two division kinds stay distinct."""
    return Counter(node.op for node in internal_nodes(expr))


def normal_form(expr: Expression, values) -> tuple:
    """Hashable canonical form under commutativity, the magnitude rule for
    subtraction, and the equivalence of the two division orientations."""
    if isinstance(expr, Leaf):
        return ("q", expr.index)
    lf = normal_form(expr.left, values)
    rf = normal_form(expr.right, values)
    op = expr.op
    if op in (OpKind.ADD, OpKind.MUL):
        return (op.value, *sorted([lf, rf], key=repr))
    if op is OpKind.SUB:
        va = evaluate_values(expr.left, values)
        vb = evaluate_values(expr.right, values)
        if va > vb:
            return ("-", lf, rf)
        if vb > va:
            return ("-", rf, lf)
        return ("-", *sorted([lf, rf], key=repr))
    if op is OpKind.DIV:
        return ("/", lf, rf)
    if op is OpKind.DIV_REV:
        return ("/", rf, lf)
    raise AssertionError(op)


def expressions_equivalent(a: Expression, b: Expression, problem: "WordProblem") -> bool:
    values = [q.value for q in problem.quantities]
    return normal_form(a, values) == normal_form(b, values)


# ---------------------------------------------------------------------------
# expression text format: fully parenthesized infix, leaf = value[index]
# with 1-based indices, e.g. (16[1]+14[2])/5[3]


def _format_value(v: Fraction) -> str:
    if v.denominator == 1:
        return str(v.numerator)
    den = v.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den == 1:  # terminating decimal
        k = max(twos, fives)
        scaled = abs(v.numerator) * 10**k // v.denominator
        digits = str(scaled).rjust(k + 1, "0")
        sign = "-" if v.numerator < 0 else ""
        return f"{sign}{digits[:-k]}.{digits[-k:]}"
    return f"{v.numerator}:{v.denominator}"  # exact non-decimal rational


def render(expr: Expression, problem: "WordProblem", top: bool = True) -> str:
    """Render to the value[index] infix format; the root carries no parens."""
    if isinstance(expr, Leaf):
        value = problem.quantities[expr.index].value
        return f"{_format_value(value)}[{expr.index + 1}]"
    body = (
        render(expr.left, problem, top=False)
        + expr.op.value
        + render(expr.right, problem, top=False)
    )
    return body if top else f"({body})"


_OPS = {op.value: op for op in OpKind}


def _tokenize_expr(text: str):
    tokens = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch in "()":
            tokens.append((ch, i))
            i += 1
            continue
        if ch in _OPS and not (ch == "-" and _prev_expects_value(tokens)):
            tokens.append((ch, i))
            i += 1
            continue
        j = i
        if text[j] == "-":
            j += 1
        while j < n and (text[j].isdigit() or text[j] in ".:"):
            j += 1
        if j < n and text[j] == "[":
            k = text.find("]", j)
            if k < 0:
                raise ExpressionSyntaxError(f"unterminated leaf index at {i}")
            tokens.append((("leaf", text[i:j], text[j + 1 : k]), i))
            i = k + 1
            continue
        raise ExpressionSyntaxError(f"unexpected character {ch!r} at {i}")
    return tokens


def _prev_expects_value(tokens) -> bool:
    return not tokens or tokens[-1][0] in ("(", *_OPS)


def _parse_value(text: str, pos: int) -> Fraction:
    try:
        if ":" in text:
            num, den = text.split(":")
            return Fraction(int(num), int(den))
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ExpressionSyntaxError(f"bad leaf value {text!r} at {pos}") from exc


def parse_annotated(text: str) -> tuple[Expression, dict[int, Fraction]]:
    """Parse an expression string; returns the tree and leaf values by index."""
    tokens = _tokenize_expr(text)
    values: dict[int, Fraction] = {}
    pos = 0

    def peek():
        return tokens[pos][0] if pos < len(tokens) else None

    def parse_operand() -> Expression:
        nonlocal pos
        tok = peek()
        if tok == "(":
            pos += 1
            inner = parse_binary()
            if peek() != ")":
                raise ExpressionSyntaxError("expected ')'")
            pos += 1
            return inner
        if isinstance(tok, tuple) and tok[0] == "leaf":
            _, raw_value, raw_index = tok
            at = tokens[pos][1]
            pos += 1
            try:
                index = int(raw_index) - 1
            except ValueError as exc:
                raise ExpressionSyntaxError(f"bad leaf index {raw_index!r} at {at}") from exc
            if index < 0:
                raise ExpressionSyntaxError(f"leaf index must be >= 1 at {at}")
            values[index] = _parse_value(raw_value, at)
            return Leaf(index)
        raise ExpressionSyntaxError(f"expected operand, found {tok!r}")

    def parse_binary() -> Expression:
        nonlocal pos
        left = parse_operand()
        tok = peek()
        if tok in _OPS:
            pos += 1
            right = parse_operand()
            left = Node(_OPS[tok], left, right)
        return left

    expr = parse_binary()
    if pos != len(tokens):
        raise ExpressionSyntaxError(f"trailing input at token {pos}")
    return expr, values


def parse(text: str) -> Expression:
    return parse_annotated(text)[0]


def normalize_division(expr: Expression) -> Expression:
    """Rewrite right-over-left division nodes as plain division (display form)."""
    if isinstance(expr, Leaf):
        return expr
    left = normalize_division(expr.left)
    right = normalize_division(expr.right)
    if expr.op is OpKind.DIV_REV:
        return Node(OpKind.DIV, right, left)
    return Node(expr.op, left, right)


# ---------------------------------------------------------------------------
# word problems


@dataclass(frozen=True)
class Token:
    surface: str
    lower: str
    start: int  # character offsets into the problem text
    end: int


@dataclass(frozen=True)
class MathTermMark:
    span: Span
    cls: str  # ADD | SUB | MUL


@dataclass(frozen=True)
class QuantitySchema:
    """Shallow semantic frame attached to one quantity mention."""

    verb: Span | None = None
    subject: Span | None = None
    indirect_object: Span | None = None
    unit: Span | None = None
    rate: Span | None = None
    math_term: MathTermMark | None = None
    neighborhood: tuple[str, ...] = ()


@dataclass(frozen=True)
class Quantity:
    index: int
    value: Fraction
    span: Span | None
    schema: QuantitySchema = field(default_factory=QuantitySchema)


@dataclass(frozen=True)
class GoldAnnotation:
    expression: Expression
    rate_indices: frozenset[int] = frozenset()
    # concept label per internal node, keyed by the node's leaf-index set
    concepts: tuple[tuple[frozenset[int], Concept], ...] = ()

    def concept_map(self) -> dict[frozenset[int], Concept]:
        return dict(self.concepts)


@dataclass(frozen=True)
class WordProblem:
    id: str
    text: str
    tokens: tuple[Token, ...]
    sentences: tuple[Span, ...]
    quantities: tuple[Quantity, ...]
    question: Span | None = None
    gold: GoldAnnotation | None = None

    def token_text(self, span: Span | None) -> tuple[str, ...]:
        if span is None:
            return ()
        return tuple(t.lower for t in self.tokens[span[0] : span[1]])

    def schema(self, index: int) -> QuantitySchema:
        return self.quantities[index].schema

    def values(self) -> list[Fraction]:
        return [q.value for q in self.quantities]


@dataclass(frozen=True)
class DerivationStep:
    """One combination step: which node it built and what licensed it."""

    node: frozenset[int]  # leaf indices under the built node
    concept: Concept
    rule_id: str
    left_rep: int
    right_rep: int


@dataclass(frozen=True)
class Derivation:
    expression: Expression
    steps: tuple[DerivationStep, ...]

    def concept_at(self, node: frozenset[int]) -> Concept:
        for step in self.steps:
            if step.node == node:
                return step.concept
        raise KeyError(node)


# ---------------------------------------------------------------------------
# model


@dataclass(frozen=True)
class Hyperparams:
    C: float = 1.0
    epochs: int = 30
    beam: int = 1000
    window: int = 3


@dataclass
class Model:
    """Two sparse weight vectors over disjoint feature namespaces."""

    w_r: dict  # rule features, names prefixed "r:"
    w_k: dict  # concept features, names prefixed "k:"
    features: frozenset  # closed feature dictionary fixed at training time
    hyper: Hyperparams = Hyperparams()

    @classmethod
    def empty(cls, hyper: Hyperparams = Hyperparams()) -> "Model":
        return cls(w_r={}, w_k={}, features=frozenset(), hyper=hyper)

    def rule_score(self, feats: dict):
        w = self.w_r
        return sum(w.get(name, 0) * value for name, value in feats.items())

    def concept_score(self, feats: dict):
        w = self.w_k
        return sum(w.get(name, 0) * value for name, value in feats.items())
