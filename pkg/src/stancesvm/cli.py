"""Command-line interface.

Subcommands: ``kappa``, ``cv``, ``ner``, ``ner-eval``, ``ne-stats``,
``train`` and ``predict``. Results go to stdout, diagnostics to stderr.
Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.
"""

from __future__ import annotations

import argparse
import hashlib
import sys
from pathlib import Path

from . import __version__
from .corpus import (
    Dataset,
    DatasetError,
    StanceLabel,
    Target,
    Tweet,
    agreement_report,
    load_dataset,
)
from .evaluation import RunReport, cross_validate, labeled, render_csv, render_table
from .features import (
    ALL_FAMILIES,
    FeatureConfig,
    NeSource,
    Vocabulary,
    build_vocabulary,
    prepare,
    prepare_all,
    vectorize,
)
from .ner import (
    AnnotationError,
    EntityType,
    NerOptions,
    demo_gazetteer,
    format_annotations,
    load_annotations,
    load_gazetteer,
    ne_statistics,
    recognize,
    recognize_dataset,
    score_by_cell,
)
from .rounding import format_percent
from .svm import ModelFormatError, TrainConfig, load_model, predict, save_model, train
from .text import default_emoticons, default_stopwords, load_emoticons, load_stopwords

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INTERNAL = 0, 1, 2, 3
VOCAB_MAGIC = "#stancesvm-vocab 1"
BUILTIN = "builtin"

DATA_ERRORS = (DatasetError, AnnotationError, ModelFormatError, ValueError, OSError, UnicodeDecodeError)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# -- shared option groups ------------------------------------------------------


def _add_resources(p):
    p.add_argument("--stopwords", default=BUILTIN, help="stopword file (one entry per line)")
    p.add_argument("--emoticons", default=BUILTIN, help="emoticon lexicon (POS/NEG<TAB>token)")


def _add_ner_options(p):
    p.add_argument("--gazetteer", help="gazetteer file (TYPE<TAB>name); 'builtin' for the demo list")
    p.add_argument("--strict-case", action="store_true", help="require capitalized names")
    p.add_argument("--no-diacritics-fold", action="store_true", help="do not match names written without diacritics")
    p.add_argument("--no-unmarked-suffix", action="store_true",
                   help="only strip suffixes introduced by an apostrophe")


def _add_features(p):
    p.add_argument("--features", default="unigram",
                   help=f"comma list over {{{','.join(ALL_FAMILIES)}}} (default: unigram)")
    p.add_argument("--ne-source", choices=["gold", "auto"], default="gold")
    p.add_argument("--gold-ne", help="gold entity annotations (tweet_id<TAB>start<TAB>end<TAB>TYPE)")
    p.add_argument("--min-term-freq", type=int, default=1)
    p.add_argument("--no-case-fold", action="store_true", help="keep the original case of unigrams/bigrams")
    p.add_argument("--c", type=float, default=1.0, help="box constraint C")
    p.add_argument("--tol", type=float, default=1e-3, help="KKT tolerance")
    p.add_argument("--max-passes", type=int, default=10_000)
    _add_resources(p)
    _add_ner_options(p)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="stancesvm", description="SVM-based stance detection on tweets", allow_abbrev=False)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", help="key=value file of option defaults (flag names as keys)")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("kappa", help="inter-annotator agreement")
    p.add_argument("dataset")
    p.add_argument("--chance", choices=["uniform", "marginal"], default="uniform",
                   help="p_e model: fixed 0.5 (uniform) or from label marginals")
    p.add_argument("--rounding", choices=["half-up", "half-even"], default="half-up")

    p = sub.add_parser("cv", help="stratified k-fold cross-validation")
    p.add_argument("dataset")
    p.add_argument("--target", choices=["1", "2", "both"], default="both")
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--whole-set-vocab", action="store_true", help="build the vocabulary from all tweets")
    p.add_argument("--per-fold-mean", action="store_true", help="average per-fold metrics instead of pooling")
    p.add_argument("--rounding", choices=["half-up", "half-even"], default="half-up")
    p.add_argument("--out-table", help="also write the text table here")
    p.add_argument("--out-csv", help="write target,class,precision,recall,f1 here")
    _add_features(p)

    p = sub.add_parser("ner", help="tag a data set with the gazetteer recognizer")
    p.add_argument("dataset")
    _add_ner_options(p)

    p = sub.add_parser("ner-eval", help="exact-match NER scores per target and stance")
    p.add_argument("dataset")
    p.add_argument("--gold", required=True, help="gold entity annotations")
    p.add_argument("--predictions", help="predicted annotations; default: run the recognizer")
    p.add_argument("--self-test", action="store_true", help="score the gold annotations against themselves")
    _add_ner_options(p)

    p = sub.add_parser("ne-stats", help="annotated entity counts per target, stance and type")
    p.add_argument("dataset")
    p.add_argument("--gold", required=True)

    p = sub.add_parser("train", help="train one target's model and save it")
    p.add_argument("dataset")
    p.add_argument("--model", required=True, help="model path; the vocabulary goes to <model>.vocab")
    p.add_argument("--target", choices=["1", "2"], required=True)
    _add_features(p)

    p = sub.add_parser("predict", help="label tweets read one per line")
    p.add_argument("--model", required=True)
    p.add_argument("--input", default="-", help="input file, '-' for stdin")
    p.add_argument("--gazetteer", help="override the gazetteer recorded in the model")
    return parser


# -- config file ---------------------------------------------------------------


def _read_config(path: str) -> dict[str, str]:
    values = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise UsageError(f"config line {line_no}: expected key=value")
            values[key.strip().lstrip("-")] = value.strip()
    return values


def _apply_config(parser: argparse.ArgumentParser, argv: list[str]) -> None:
    subparsers = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    command = next((a for a in argv if a in subparsers.choices), None)
    # only look before the subcommand, and never expand prefixes: "--c" is the SVM C
    head = argv[:argv.index(command)] if command else argv
    pre = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(head)
    if not known.config:
        return
    values = _read_config(known.config)
    targets = [parser] + ([subparsers.choices[command]] if command else [])
    used = set()
    for p in targets:
        for action in p._actions:
            names = {opt.lstrip("-") for opt in action.option_strings}
            hit = names & values.keys()
            if not hit or action.dest in ("help", "config", "version"):
                continue
            raw = values[hit.pop()]
            if isinstance(action, argparse._StoreTrueAction):
                if raw.lower() not in ("true", "false", "1", "0", "yes", "no"):
                    raise UsageError(f"config: {action.dest} expects true/false, got {raw!r}")
                value = raw.lower() in ("true", "1", "yes")
            else:
                value = action.type(raw) if action.type else raw
                if action.choices is not None and value not in action.choices:
                    raise UsageError(f"config: invalid value {raw!r} for {action.dest}")
            action.required = False
            p.set_defaults(**{action.dest: value})
            used.update(names & values.keys())
    unknown = values.keys() - used
    if unknown:
        raise UsageError(f"config: unknown keys {', '.join(sorted(unknown))}")


# -- helpers -------------------------------------------------------------------


def _stopwords(source):
    return default_stopwords() if source == BUILTIN else load_stopwords(source)


def _emoticons(source):
    return default_emoticons() if source == BUILTIN else load_emoticons(source)


def _gazetteer(source):
    if source is None:
        raise UsageError("--gazetteer is required")
    return demo_gazetteer() if source == BUILTIN else load_gazetteer(source)


def _ner_options(args) -> NerOptions:
    return NerOptions(
        relax_capitalization=not args.strict_case,
        fold_diacritics=not args.no_diacritics_fold,
        match_unmarked_suffixes=not args.no_unmarked_suffix,
    )


def _feature_config(args) -> FeatureConfig:
    return FeatureConfig.from_families(
        args.features,
        ne_source=NeSource(args.ne_source),
        min_term_freq=args.min_term_freq,
        case_fold=not args.no_case_fold,
    )


def _train_config(args) -> TrainConfig:
    return TrainConfig(c=args.c, kkt_tol=args.tol, max_passes=args.max_passes)


def _entities(args, cfg: FeatureConfig, ds: Dataset):
    if not cfg.use_named_entities:
        return None
    if cfg.ne_source is NeSource.GOLD:
        if not args.gold_ne:
            raise UsageError("--features ne with --ne-source gold needs --gold-ne")
        return load_annotations(args.gold_ne, ds)
    return recognize_dataset(ds, _gazetteer(args.gazetteer), _ner_options(args))


def _targets(choice: str) -> list[Target]:
    return list(Target) if choice == "both" else [Target.TARGET1 if choice == "1" else Target.TARGET2]


def _pct(x: float, digits: int, mode: str = "half-up") -> str:
    return format_percent(x, digits, mode)


# -- commands ------------------------------------------------------------------


def cmd_kappa(args, out) -> int:
    ds = load_dataset(args.dataset)
    scopes = [None] + [t for t in Target if any(tw.target is t for tw in ds)]
    for scope in scopes:
        rep = agreement_report(ds, scope, chance=args.chance)
        name = "all" if scope is None else scope.value
        out.write(
            f"scope {name}: tweets {rep.n_total}, matching {rep.n_match}, "
            f"p_o {_pct(rep.p_o, 2, args.rounding)}%, p_e {_pct(rep.p_e, 2, args.rounding)}%, "
            f"kappa {_pct(rep.kappa, 1, args.rounding)}%\n"
        )
    return EXIT_OK


def cmd_cv(args, out) -> int:
    if args.k < 2:
        raise UsageError("--k must be at least 2")
    ds = load_dataset(args.dataset)
    cfg = _feature_config(args)
    tcfg = _train_config(args)
    entities = _entities(args, cfg, ds)
    reports = {}
    for target in _targets(args.target):
        tweets = [t for t in ds.tweets if t.target is target]
        if not tweets:
            if args.target == "both":
                continue
            raise DatasetError(f"no tweets for {target.value}")
        prepared = prepare_all(tweets, _stopwords(args.stopwords), _emoticons(args.emoticons),
                               cfg.case_fold, entities)
        reports[target] = cross_validate(
            prepared, tweets, cfg, tcfg, k=args.k, seed=args.seed,
            whole_set_vocab=args.whole_set_vocab, per_fold_mean=args.per_fold_mean,
        )
    if not reports:
        raise DatasetError("data set has no tweets for the requested targets")
    config = {
        "dataset": Path(args.dataset).name,
        "features": ",".join(cfg.families),
        "ne-source": cfg.ne_source.value if cfg.use_named_entities else "-",
        "c": repr(tcfg.c),
        "tol": repr(tcfg.kkt_tol),
        "seed": str(args.seed),
        "vocabulary": "whole-set" if args.whole_set_vocab else "per-fold",
        "pooling": "per-fold-mean" if args.per_fold_mean else "micro",
        "case-fold": "off" if args.no_case_fold else "on",
        "rounding": args.rounding,
    }
    report = RunReport(reports, args.k, config)
    table = render_table(report, args.rounding)
    out.write(table)
    if args.out_table:
        Path(args.out_table).write_text(table, encoding="utf-8")
    if args.out_csv:
        Path(args.out_csv).write_text(render_csv(report, args.rounding), encoding="utf-8")
    return EXIT_OK


def cmd_ner(args, out) -> int:
    ds = load_dataset(args.dataset)
    spans = recognize_dataset(ds, _gazetteer(args.gazetteer), _ner_options(args))
    out.write(format_annotations(spans, ds))
    return EXIT_OK


def cmd_ner_eval(args, out) -> int:
    ds = load_dataset(args.dataset)
    gold = load_annotations(args.gold, ds)
    if args.self_test:
        predicted = gold
    elif args.predictions:
        predicted = load_annotations(args.predictions, ds)
    else:
        predicted = recognize_dataset(ds, _gazetteer(args.gazetteer), _ner_options(args))
    cells, overall = score_by_cell(ds, gold, predicted)
    out.write(f"{'Target':<9} {'Class':<8} {'P (%)':>7} {'R (%)':>7} {'F (%)':>7}\n")
    for (target, label), s in cells.items():
        out.write(f"{'Target-' + str(target.number):<9} {label.value.title():<8} "
                  f"{_pct(s.precision, 2):>7} {_pct(s.recall, 2):>7} {_pct(s.f1, 2):>7}\n")
    out.write(f"{'Overall':<9} {'':<8} {_pct(overall.precision, 2):>7} "
              f"{_pct(overall.recall, 2):>7} {_pct(overall.f1, 2):>7}\n")
    return EXIT_OK


def cmd_ne_stats(args, out) -> int:
    ds = load_dataset(args.dataset)
    stats = ne_statistics(ds, load_annotations(args.gold, ds))
    types = list(EntityType)
    out.write("Target    Class    Tweets  Person  Location  Organization  Total\n")
    for cell, n in stats.tweets.items():
        c = stats.counts[cell]
        out.write(f"Target-{cell[0].number:<2} {cell[1].value.title():<8} {n:>6}  "
                  f"{c[types[0]]:>6}  {c[types[1]]:>8}  {c[types[2]]:>12}  {stats.cell_total(cell):>5}\n")
    out.write(f"{'Total':<18} {stats.total_tweets:>6}  {stats.type_total(types[0]):>6}  "
              f"{stats.type_total(types[1]):>8}  {stats.type_total(types[2]):>12}  {stats.total:>5}\n")
    return EXIT_OK


def _vocab_text(vocab: Vocabulary) -> str:
    return f"{VOCAB_MAGIC}\n{vocab.dump()}"


def cmd_train(args, out) -> int:
    ds = load_dataset(args.dataset)
    cfg = _feature_config(args)
    target = _targets(args.target)[0]
    tweets = [t for t in ds.tweets if t.target is target]
    if not tweets:
        raise DatasetError(f"no tweets for {target.value}")
    entities = _entities(args, cfg, ds)
    if cfg.use_named_entities and args.gazetteer is None:
        raise UsageError("--features ne needs --gazetteer so that predict can recognize entities")
    prepared = list(prepare_all(tweets, _stopwords(args.stopwords), _emoticons(args.emoticons),
                                cfg.case_fold, entities).values())
    vocab = build_vocabulary(prepared, cfg)
    model = train(labeled(prepared, vocab), _train_config(args), dimension=vocab.dimension)
    vocab_text = _vocab_text(vocab)
    model.info.update({
        "features": ",".join(cfg.families),
        "case-fold": "off" if args.no_case_fold else "on",
        "stopwords": args.stopwords,
        "emoticons": args.emoticons,
        "gazetteer": args.gazetteer or "-",
        "ner-options": f"{int(not args.strict_case)}{int(not args.no_diacritics_fold)}{int(not args.no_unmarked_suffix)}",
        "target": target.value,
        "vocab-sha256": hashlib.sha256(vocab_text.encode("utf-8")).hexdigest(),
    })
    save_model(model, args.model)
    Path(args.model + ".vocab").write_text(vocab_text, encoding="utf-8")
    out.write(f"trained {target.value} on {len(prepared)} tweets, dimension {vocab.dimension}, "
              f"{model.n_support} support vectors, converged {model.converged}\n")
    return EXIT_OK


def cmd_predict(args, out) -> int:
    model = load_model(args.model)
    vocab_path = Path(args.model + ".vocab")
    vocab_text = vocab_path.read_text(encoding="utf-8")
    if not vocab_text.startswith(VOCAB_MAGIC + "\n"):
        raise ModelFormatError(f"{vocab_path}: expected vocabulary header {VOCAB_MAGIC!r}")
    if hashlib.sha256(vocab_text.encode("utf-8")).hexdigest() != model.info.get("vocab-sha256"):
        raise ModelFormatError("model/vocabulary version mismatch: the vocabulary was not written with this model")
    vocab = Vocabulary.parse(vocab_text)
    info = model.info
    cfg = FeatureConfig.from_families(info.get("features", "unigram"), case_fold=info.get("case-fold") != "off")
    stops, lexicon = _stopwords(info.get("stopwords", BUILTIN)), _emoticons(info.get("emoticons", BUILTIN))
    gaz = None
    if cfg.use_named_entities:
        gaz = _gazetteer(args.gazetteer or info.get("gazetteer"))
        flags = info.get("ner-options", "111")
        opts = NerOptions(*(c == "1" for c in flags))
    source = sys.stdin if args.input == "-" else open(args.input, encoding="utf-8")
    try:
        for line_no, line in enumerate(source, start=1):
            text = line.rstrip("\n")
            if not text.strip():
                raise DatasetError(f"input line {line_no}: empty tweet")
            tweet = Tweet(str(line_no), text, Target.TARGET1, StanceLabel.FAVOR)
            spans = recognize(text, gaz, opts) if gaz is not None else ()
            pt = prepare(tweet, stops, lexicon, cfg.case_fold, spans)
            out.write(predict(model, vectorize(pt, vocab)).value + "\n")
    finally:
        if source is not sys.stdin:
            source.close()
    return EXIT_OK


COMMANDS = {
    "kappa": cmd_kappa,
    "cv": cmd_cv,
    "ner": cmd_ner,
    "ner-eval": cmd_ner_eval,
    "ne-stats": cmd_ne_stats,
    "train": cmd_train,
    "predict": cmd_predict,
}


def main(argv: list[str] | None = None, out=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    out = out or sys.stdout
    parser = build_parser()
    try:
        _apply_config(parser, argv)
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"stancesvm: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"stancesvm: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args, out)
    except UsageError as exc:
        print(f"stancesvm: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DATA_ERRORS as exc:
        print(f"stancesvm: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception as exc:  # noqa: BLE001
        print(f"stancesvm: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
