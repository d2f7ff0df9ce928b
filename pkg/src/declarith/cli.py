"""Command line interface.

Subcommands: train, solve, eval, perturb, bias, mkcorpus.  Options come
from flags or an optional key=value config file; flags win.  Exit codes:
0 success, 1 usage problem, 2 data problem.
"""

from __future__ import annotations

import argparse
import json
import multiprocessing
import sys
from fractions import Fraction

from .core import DivisionByZero, Hyperparams, Leaf, evaluate_values, render
from .corpus import CorpusError, load_corpus
from .datatools import (
    InvalidK,
    LengthMismatch,
    bias_entropy,
    evaluate_model,
    kfold_split,
    perturb_expression,
    significance,
)
from .extraction import ExtractionRules, NumberMismatch, build_problem, load_rules
from .inference import NoDerivation, solve
from .knowledge import LexiconError, load_verb_lexicon
from .learning import TrainingError, train
from .minicorpus import write_minicorpus
from .scoring import load_model, save_model

USAGE_EXIT = 1
DATA_EXIT = 2


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage; this interface reserves 2 for
    # data problems
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(USAGE_EXIT)


class ConfigError(Exception):
    pass


def parse_config(path) -> dict:
    """key=value lines; blank lines and # comments ignored."""
    out: dict = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key=value, got {line!r}")
            key, _, value = line.partition("=")
            out[key.strip()] = value.strip()
    return out


_CONFIG_KEYS = {
    "c": float,
    "epochs": int,
    "beam": int,
    "window": int,
    "seed": int,
    "jobs": int,
    "number_words": str,
    "verb_lexicon": str,
    "pronouns": str,
    "math_patterns": str,
    "whole_cues": str,
    "verb_seeds": str,
    "verb_embeddings": str,
}


def _setting(args, config: dict, key: str, default):
    flag = getattr(args, key, None)
    if flag is not None:
        return flag
    if key in config:
        caster = _CONFIG_KEYS[key]
        try:
            return caster(config[key])
        except ValueError as exc:
            raise ConfigError(f"config key {key}: {exc}") from exc
    return default


def _add_common(parser: _Parser) -> None:
    parser.add_argument("--config", help="key=value settings file; flags override it")
    parser.add_argument("--seed", type=int, help="RNG seed (default 42)")
    parser.add_argument("--window", type=int, help="neighborhood window (default 3)")
    parser.add_argument("--beam", type=int, help="beam width (default 1000)")
    parser.add_argument("--jobs", type=int, help="worker processes for solving (default 1)")
    for flag in ("number-words", "verb-lexicon", "pronouns", "math-patterns",
                 "whole-cues", "verb-seeds", "verb-embeddings"):
        parser.add_argument(f"--{flag}", help=f"override bundled {flag.replace('-', ' ')} file")


def _add_hyper(parser: _Parser) -> None:
    parser.add_argument("--c", type=float, help="regularization constant C (default 1.0)")
    parser.add_argument("--epochs", type=int, help="training epochs per stage (default 30)")


class Settings:
    def __init__(self, args):
        config = parse_config(args.config) if getattr(args, "config", None) else {}
        unknown = set(config) - set(_CONFIG_KEYS)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
        self.seed = _setting(args, config, "seed", 42)
        self.jobs = _setting(args, config, "jobs", 1)
        defaults = Hyperparams()
        self.hyper = Hyperparams(
            C=_setting(args, config, "c", defaults.C),
            epochs=_setting(args, config, "epochs", defaults.epochs),
            beam=_setting(args, config, "beam", defaults.beam),
            window=_setting(args, config, "window", defaults.window),
        )
        self.xrules = load_rules(
            window=self.hyper.window,
            number_words_path=_setting(args, config, "number_words", None),
            verb_lexicon_path=_setting(args, config, "verb_lexicon", None),
            pronouns_path=_setting(args, config, "pronouns", None),
            math_patterns_path=_setting(args, config, "math_patterns", None),
            whole_cues_path=_setting(args, config, "whole_cues", None),
        )
        seeds_path = _setting(args, config, "verb_seeds", None)
        emb_path = _setting(args, config, "verb_embeddings", None)
        if seeds_path or emb_path:
            self.lexicon = load_verb_lexicon(seeds_path, emb_path)
        else:
            self.lexicon = None  # module default


# ---------------------------------------------------------------------------
# solving helpers, shared by solve/eval

_WORKER: dict = {}


def _solve_worker_init(model, lexicon, xrules, beam):
    _WORKER["model"] = model
    _WORKER["lexicon"] = lexicon
    _WORKER["xrules"] = xrules
    _WORKER["beam"] = beam


def _solve_worker(problem):
    try:
        deriv, score = solve(
            problem,
            _WORKER["model"],
            _WORKER["lexicon"],
            _WORKER["xrules"],
            beam_size=_WORKER["beam"],
        )
    except NoDerivation:
        return None
    try:
        value = evaluate_values(deriv.expression, problem.values())
    except DivisionByZero:
        return None
    return deriv, value


def _solve_all(problems, model, settings: Settings, beam):
    """One (derivation, value)-or-None per problem, input order kept."""
    if settings.jobs <= 1 or len(problems) <= 1:
        _solve_worker_init(model, settings.lexicon, settings.xrules, beam)
        return [_solve_worker(p) for p in problems]
    ctx = multiprocessing.get_context()
    with ctx.Pool(
        processes=settings.jobs,
        initializer=_solve_worker_init,
        initargs=(model, settings.lexicon, settings.xrules, beam),
    ) as pool:
        return pool.map(_solve_worker, problems)


def _format_fraction(value: Fraction) -> str:
    return str(value.numerator) if value.denominator == 1 else str(value)


# ---------------------------------------------------------------------------
# commands


def cmd_train(args) -> int:
    settings = Settings(args)
    problems = load_corpus(args.corpus, settings.xrules)
    model, log = train(
        problems,
        settings.hyper,
        lexicon=settings.lexicon,
        xrules=settings.xrules,
        seed=settings.seed,
    )
    for warning in log.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    save_model(model, args.model_out)
    lines = []
    for epoch, value in enumerate(log.stage1, start=1):
        lines.append(f"stage1 epoch {epoch}: objective {value:.6f}")
    for epoch, (value, acc) in enumerate(zip(log.stage2, log.stage2_accuracy), start=1):
        lines.append(f"stage2 epoch {epoch}: objective {value:.6f} train accuracy {acc:.4f}")
    lines.append(f"model: {args.model_out}")
    final = log.stage2_accuracy[-1] if log.stage2_accuracy else 0.0
    lines.append(f"train accuracy: {final:.4f}")
    text = "\n".join(lines)
    if args.log:
        with open(args.log, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    print(text)
    return 0


def _load_input_problems(args, settings: Settings):
    if args.text is not None:
        return [build_problem("input", args.text, settings.xrules)]
    if args.corpus is None:
        return []
    return load_corpus(args.corpus, settings.xrules)


def cmd_solve(args) -> int:
    settings = Settings(args)
    model = load_model(args.model)
    problems = _load_input_problems(args, settings)
    beam = settings.hyper.beam
    for problem, outcome in zip(problems, _solve_all(problems, model, settings, beam)):
        if outcome is None:
            print(f"{problem.id}: no derivation")
            continue
        deriv, value = outcome
        print(f"{problem.id}: {render(deriv.expression, problem)} = {_format_fraction(value)}")
        trace = ", ".join(f"{s.concept.value}:{s.rule_id}" for s in deriv.steps)
        print(f"  steps: {trace}")
    return 0


def _accuracy_line(label: str, report) -> str:
    total = len(report.results)
    right = sum(report.correct_flags())
    return f"{label} accuracy: {report.accuracy:.4f} ({right}/{total})"


def cmd_eval(args) -> int:
    settings = Settings(args)
    if args.folds is not None:
        if args.train or args.test or args.model:
            raise ConfigError("--folds excludes --train/--test/--model")
        if args.corpus is None:
            raise ConfigError("--folds needs a corpus")
        problems = load_corpus(args.corpus, settings.xrules)
        folds = kfold_split(len(problems), args.folds, settings.seed)
        accuracies = []
        for index, (train_idx, test_idx) in enumerate(folds, start=1):
            model, _ = train(
                [problems[i] for i in train_idx],
                settings.hyper,
                lexicon=settings.lexicon,
                xrules=settings.xrules,
                seed=settings.seed,
            )
            report = evaluate_model(
                model, [problems[i] for i in test_idx], settings.lexicon, settings.xrules
            )
            accuracies.append(report.accuracy)
            print(_accuracy_line(f"fold {index}", report))
        print(f"mean accuracy: {sum(accuracies) / len(accuracies):.4f}")
        return 0

    if args.model:
        if args.train:
            raise ConfigError("--model excludes --train")
        model = load_model(args.model)
    elif args.train:
        model, log = train(
            load_corpus(args.train, settings.xrules),
            settings.hyper,
            lexicon=settings.lexicon,
            xrules=settings.xrules,
            seed=settings.seed,
        )
        for warning in log.warnings:
            print(f"warning: {warning}", file=sys.stderr)
    else:
        raise ConfigError("need --folds, or --train/--model with --test")
    if not args.test:
        raise ConfigError("need --test with --train or --model")
    report = evaluate_model(
        model, load_corpus(args.test, settings.xrules), settings.lexicon, settings.xrules
    )
    print(_accuracy_line("test", report))
    parts = ", ".join(f"{label} {right}/{total}" for label, right, total in report.by_concept)
    if parts:
        print(f"by concept: {parts}")
    if args.compare:
        other = evaluate_model(
            model, load_corpus(args.compare, settings.xrules), settings.lexicon, settings.xrules
        )
        print(_accuracy_line("compare", other))
        p = significance(report.correct_flags(), other.correct_flags(), seed=settings.seed)
        print(f"significance: p = {p:.4f}")
    return 0


def cmd_perturb(args) -> int:
    settings = Settings(args)
    problems = load_corpus(args.corpus, settings.xrules)
    out = open(args.out, "w", encoding="utf-8") if args.out else sys.stdout
    try:
        for problem in problems:
            if problem.gold is None:
                print(f"warning: {problem.id}: no solution, skipped", file=sys.stderr)
                continue
            values = problem.values()
            for variant in perturb_expression(problem.gold.expression, values):
                row = {
                    "source": problem.id,
                    "text": problem.text,
                    "solution": render(problem.gold.expression, problem),
                    "perturbed": render(variant, problem),
                    "value": _format_fraction(evaluate_values(variant, values)),
                }
                print(json.dumps(row), file=out)
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def cmd_bias(args) -> int:
    settings = Settings(args)
    problems = load_corpus(args.corpus, settings.xrules)
    report = bias_entropy(problems, window=settings.hyper.window)
    if report.occurrences == 0:
        print("warning: no annotated quantity contexts found", file=sys.stderr)
    print(f"bias entropy: {report.mean_bits:.4f} bits over {report.occurrences} occurrences")
    contributors = sorted(report.words, key=lambda row: (row[2], -row[1], row[0]))
    if contributors:
        print("top contributors (word, occurrences, bits):")
        for word, count, bits in contributors[: args.top]:
            print(f"  {word}  {count}  {bits:.4f}")
    return 0


def cmd_mkcorpus(args) -> int:
    train_path, heldout_path = write_minicorpus(args.dir)
    print(train_path)
    print(heldout_path)
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="declarith", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("train", help="fit a model on an annotated corpus")
    p.add_argument("corpus", help="JSONL corpus with solutions")
    p.add_argument("--model-out", required=True, help="where to write the model file")
    p.add_argument("--log", help="also write the training log here")
    _add_common(p)
    _add_hyper(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("solve", help="derive expressions for problems")
    p.add_argument("corpus", nargs="?", help="JSONL corpus to solve")
    p.add_argument("--text", help="solve a single problem given inline")
    p.add_argument("--model", required=True, help="model file from train")
    _add_common(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("eval", help="accuracy by cross-validation or split")
    p.add_argument("corpus", nargs="?", help="corpus for --folds mode")
    p.add_argument("--folds", type=int, help="k-fold cross-validation")
    p.add_argument("--train", help="training corpus for split mode")
    p.add_argument("--model", help="pretrained model instead of --train")
    p.add_argument("--test", help="test corpus for split mode")
    p.add_argument("--compare", help="second test corpus; adds a paired significance test")
    _add_common(p)
    _add_hyper(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("perturb",
                       help="emit one-swap expression variants for annotators")
    p.add_argument("corpus")
    p.add_argument("--out", help="write JSONL rows here instead of stdout")
    _add_common(p)
    p.set_defaults(func=cmd_perturb)

    p = sub.add_parser("bias",
                       help="how sharply single context words predict operations")
    p.add_argument("corpus")
    p.add_argument("--top", type=int, default=10, help="contributor rows to print")
    _add_common(p)
    p.set_defaults(func=cmd_bias)

    p = sub.add_parser("mkcorpus", help="write the bundled corpus to disk")
    p.add_argument("--dir", required=True, help="output directory")
    p.set_defaults(func=cmd_mkcorpus)

    return parser


_DATA_ERRORS = (
    CorpusError,
    ConfigError,
    InvalidK,
    LengthMismatch,
    TrainingError,
    LexiconError,
    NumberMismatch,
    OSError,
    ValueError,
)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _DATA_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return DATA_EXIT


if __name__ == "__main__":
    sys.exit(main())
