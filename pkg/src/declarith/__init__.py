"""Arithmetic word problem solver driven by declarative inference rules.

Pipeline: extract a schema per quantity from the text, pick a math
concept and a declarative rule for every combination step, and score
candidate expression trees with two learned sparse linear models (rule
choice and concept choice), decoded by beam search.
"""

from .core import (
    Concept,
    Derivation,
    DerivationStep,
    DivisionByZero,
    Expression,
    GoldAnnotation,
    Hyperparams,
    Leaf,
    Model,
    Node,
    OpKind,
    Quantity,
    QuantitySchema,
    WordProblem,
    evaluate_values,
    normal_form,
    parse_annotated,
    render,
)
from .corpus import CorpusError, load_corpus, problem_from_record, write_records
from .datatools import (
    BiasReport,
    EvalReport,
    InvalidK,
    LengthMismatch,
    ProblemResult,
    bias_entropy,
    evaluate_model,
    kfold_split,
    perturb_expression,
    significance,
)
from .extraction import (
    ExtractionRules,
    NumberMismatch,
    build_problem,
    default_rules,
    filter_irrelevant,
    load_rules,
)
from .inference import NoDerivation, exhaustive_solve, solve
from .knowledge import (
    CATALOG,
    MathClass,
    PartWholeRelation,
    Rule,
    VerbClass,
    VerbLexicon,
    applicable_rules,
    default_lexicon,
    load_verb_lexicon,
    part_whole_relation,
)
from .learning import (
    AnnotationGap,
    TrainingError,
    TrainLog,
    annotate_concepts,
    build_examples,
    heuristic_concepts,
    train,
    train_concept_weights,
    train_rule_weights,
)
from .minicorpus import heldout_problems, train_problems, write_minicorpus
from .scoring import load_model, phi_concept, phi_rule, save_model, score_derivation

__version__ = "0.1.0"

__all__ = [
    "AnnotationGap",
    "BiasReport",
    "CATALOG",
    "Concept",
    "CorpusError",
    "Derivation",
    "DerivationStep",
    "DivisionByZero",
    "EvalReport",
    "Expression",
    "ExtractionRules",
    "GoldAnnotation",
    "Hyperparams",
    "InvalidK",
    "Leaf",
    "LengthMismatch",
    "MathClass",
    "Model",
    "NoDerivation",
    "Node",
    "NumberMismatch",
    "OpKind",
    "PartWholeRelation",
    "ProblemResult",
    "Quantity",
    "QuantitySchema",
    "Rule",
    "TrainLog",
    "TrainingError",
    "VerbClass",
    "VerbLexicon",
    "WordProblem",
    "annotate_concepts",
    "applicable_rules",
    "bias_entropy",
    "build_examples",
    "build_problem",
    "default_lexicon",
    "default_rules",
    "evaluate_model",
    "evaluate_values",
    "exhaustive_solve",
    "filter_irrelevant",
    "heldout_problems",
    "heuristic_concepts",
    "kfold_split",
    "load_corpus",
    "load_model",
    "load_rules",
    "load_verb_lexicon",
    "normal_form",
    "part_whole_relation",
    "parse_annotated",
    "perturb_expression",
    "phi_concept",
    "phi_rule",
    "problem_from_record",
    "render",
    "save_model",
    "score_derivation",
    "significance",
    "solve",
    "train",
    "train_concept_weights",
    "train_problems",
    "train_rule_weights",
    "write_minicorpus",
    "write_records",
]
