"""``hatescope`` command line: one subcommand per analysis, file inputs only.

Exit codes: 0 success, 1 usage error, 2 data or format error.
"""

from __future__ import annotations

import argparse
import csv
import functools
import io
import json
import os
import sys
from pathlib import Path

from hatescope import __version__
from hatescope.classify import (
    TRAINERS,
    dumps_model,
    kfoldcv,
    load_model,
)
from hatescope.corpus import ColumnMapping, daily_timeline, detect_spikes, load_corpus, monthly_timeline
from hatescope.embed import expand_dictionary, load_embeddings, nearest, project_2d, spherical_kmeans
from hatescope.errors import HatescopeError, ParameterError
from hatescope.features import FeatureConfig, vectorize
from hatescope.keywords import KeywordLexicon, collocations, demo_keywords, extract_keywords, highlight, keywords_csv
from hatescope.lexicon import (
    CategoryLexicon,
    SentimentLexicon,
    category_profile,
    demo_categories,
    demo_emoji,
    demo_sentiment,
    load_emoji,
    negativity_markers,
    polarity,
    style_profile,
)
from hatescope.report import dumps_report, export_tree, summary_report, word_tree

CONFIG_ENV = "HATESCOPE_CONFIG"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _column(value: str):
    return int(value) if value.isdigit() else value


def _int_set(value: str) -> frozenset:
    if value.strip() in ("", "none"):
        return frozenset()
    try:
        return frozenset(int(v) for v in value.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {value!r}") from None


def _common(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("common")
    g.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    g.add_argument("--out", help="write output to this file instead of standard output")
    g.add_argument("--pretty", action="store_true", help="human-readable output instead of JSON")
    g.add_argument("--config", help=f"JSON config file (default: ${CONFIG_ENV})")


def _corpus_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("corpus input")
    g.add_argument("--format", choices=("csv", "jsonl"), help="input format (default: from file extension)")
    g.add_argument("--text-col", type=_column, help="text column: header name or 0-based index")
    g.add_argument("--id-col", type=_column, help="id column")
    g.add_argument("--label-col", type=_column, help="label column")
    g.add_argument("--time-col", type=_column, help="timestamp column (RFC 3339 or YYYY-MM-DD)")
    g.add_argument("--source-col", type=_column, help="source column")
    g.add_argument("--lang-col", type=_column, help="language column")
    g.add_argument("--no-header", action="store_true", help="CSV has no header row")
    g.add_argument("--label-prefixes", help="keep only rows whose label starts with one of these (comma-separated)")
    g.add_argument("--allow-empty", action="store_true", help="accept documents with empty text")


def _feature_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("features")
    g.add_argument("--char-ngrams", type=_int_set, help="char n-gram sizes, e.g. 1,2,3 (default 1,2,3; tree: none)")
    g.add_argument("--word-ngrams", type=_int_set, help="word n-gram sizes, e.g. 1,2 (default 1,2; tree: 1)")
    g.add_argument("--weighting", choices=("count", "binary"), default="count", help="feature weights")


def _model_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--model", choices=sorted(TRAINERS), default="perceptron", help="classifier")
    p.add_argument("--epochs", type=int, default=10, help="training epochs (perceptron, svm)")
    p.add_argument("--lambda", dest="lam", type=float, default=1e-4, help="L2 regularization (svm)")
    p.add_argument("--min-leaf", type=int, default=100, help="minimum leaf size (tree)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hatescope", description="Corpus analytics for online hate speech.")
    parser.add_argument("--version", action="version", version=f"hatescope {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    def add(name, help, corpus=True):
        p = sub.add_parser(name, help=help, description=help)
        _common(p)
        if corpus:
            _corpus_flags(p)
        return p

    p = add("ingest", "Validate a corpus and re-serialize it as JSONL.")
    p.add_argument("corpus")

    p = add("timeline", "Documents per month (or day) and activity spikes.")
    p.add_argument("corpus")
    p.add_argument("--daily", action="store_true", help="bucket by day instead of month")
    p.add_argument("--spikes", action="store_true", help="report days at least FACTOR times the monthly median")
    p.add_argument("--factor", type=float, default=3.0, help="spike factor (default 3)")

    p = add("train", "Train a binary classifier and save it as JSON.")
    p.add_argument("corpus")
    _model_flags(p)
    _feature_flags(p)

    p = add("crossval", "Stratified k-fold precision/recall of a classifier.")
    p.add_argument("corpus")
    _model_flags(p)
    _feature_flags(p)
    p.add_argument("--k", type=int, default=10, help="number of folds (default 10)")
    p.add_argument("--task", default="", help="task name for the --pretty table")

    p = add("predict", "Label every document with a saved model.")
    p.add_argument("model")
    p.add_argument("corpus")

    p = add("keywords", "Chi-square keywords of corpus A against corpus B.")
    p.add_argument("corpus_a")
    p.add_argument("corpus_b")
    p.add_argument("--min-count", type=int, default=5)
    p.add_argument("--alpha", type=float, default=0.05, choices=(0.05, 0.01, 0.001))
    p.add_argument("--unit", choices=("document", "token"), default="document", help="contingency counts")
    p.add_argument("--top", type=int, help="keep only the first N keywords")
    p.add_argument("--significant-only", action="store_true")
    p.add_argument("--csv", action="store_true", help="emit CSV instead of JSON")

    p = add("collocations", "Adjacent word pairs ranked by PMI.")
    p.add_argument("corpus")
    p.add_argument("--min-count", type=int, default=5)
    p.add_argument("--top", type=int)

    p = add("expand", "Expand a seed dictionary with embedding neighbors.", corpus=False)
    p.add_argument("embeddings")
    p.add_argument("--seeds", help="comma-separated seed words")
    p.add_argument("--seeds-file", help="one seed word per line")
    p.add_argument("--k", type=int, default=10, help="neighbors per seed")
    p.add_argument("--threshold", type=float, default=0.5, help="minimum cosine similarity")

    p = add("neighbors", "Nearest neighbors of a word.", corpus=False)
    p.add_argument("embeddings")
    p.add_argument("word")
    p.add_argument("--k", type=int, default=10)

    p = add("cluster", "Spherical k-means over embedding vectors.", corpus=False)
    p.add_argument("embeddings")
    p.add_argument("--k", type=int, required=False, default=8)
    p.add_argument("--words-file", help="cluster only these words (default: whole table)")
    p.add_argument("--max-iters", type=int, default=50)
    p.add_argument("--csv", action="store_true", help="emit word,cluster CSV")

    p = add("project", "2-D PCA coordinates of embedding vectors.", corpus=False)
    p.add_argument("embeddings")
    p.add_argument("--words-file", help="project only these words (default: whole table)")
    p.add_argument("--csv", action="store_true", help="emit word,x,y CSV")

    p = add("sentiment", "Lexicon polarity per document.")
    p.add_argument("corpus")
    p.add_argument("--lexicon", help="TSV entry<TAB>score (default: bundled demo lexicon)")
    p.add_argument("--override", action="append", default=[], metavar="WORD=SCORE",
                   help="re-score an entry; WORD= removes it (repeatable)")

    p = add("profile", "Category rates, negativity markers and style rates per document.")
    p.add_argument("corpus")
    p.add_argument("--categories", help="TSV entry<TAB>cat1,cat2 (default: bundled demo lexicon)")
    p.add_argument("--emoji", help="emoji list, one per line (default: bundled list)")

    p = add("wordtree", "Word tree of the contexts around a keyword.")
    p.add_argument("corpus")
    p.add_argument("--keyword", required=True)
    p.add_argument("--direction", choices=("right", "left"), default="right")
    p.add_argument("--max-depth", type=int, default=4)
    p.add_argument("--min-count", type=int, default=1)

    p = add("export-tree", "Export a saved decision tree as DOT or JSON.", corpus=False)
    p.add_argument("model")
    p.add_argument("--to", dest="to_format", choices=("dot", "json"), default="dot", help="output format")

    p = add("highlight", "Spans of dictionary words for moderators.")
    p.add_argument("corpus", nargs="?")
    p.add_argument("--text", help="highlight this text instead of a corpus")
    p.add_argument("--lexicon", help="TSV entry<TAB>category (default: bundled demo lexicon)")

    p = add("report", "Summary report of a corpus as JSON.")
    p.add_argument("corpus")
    p.add_argument("--reference", help="reference corpus for the keywords section")
    p.add_argument("--lexicon", help="sentiment lexicon for the polarity section")
    p.add_argument("--demo-lexicon", action="store_true", help="use the bundled sentiment lexicon")
    p.add_argument("--markers", action="store_true", help="include negativity marker means")
    p.add_argument("--top", type=int, default=20)
    p.add_argument("--min-count", type=int, default=5)
    p.add_argument("--alpha", type=float, default=0.05, choices=(0.05, 0.01, 0.001))
    return parser


# -- helpers -----------------------------------------------------------------


def _mapping(args, path: str) -> ColumnMapping:
    fmt = args.format or ("csv" if Path(path).suffix.lower() == ".csv" else "jsonl")
    header = not args.no_header
    fields = {}
    for name, flag in (("text", "text_col"), ("id", "id_col"), ("label", "label_col"),
                       ("timestamp", "time_col"), ("source", "source_col"), ("lang", "lang_col")):
        value = getattr(args, flag)
        if value is None:
            # by-name defaults only make sense when names can be resolved
            value = name if (fmt == "jsonl" or header) else None
        fields[name] = value
    if fields["text"] is None:
        raise UsageError("--text-col is required for headerless CSV")
    prefixes = tuple(p for p in args.label_prefixes.split(",") if p) if args.label_prefixes else None
    return ColumnMapping(header=header, label_prefixes=prefixes, allow_empty=args.allow_empty, **fields)


def _load(args, path: str):
    fmt = args.format or ("csv" if Path(path).suffix.lower() == ".csv" else "jsonl")
    return load_corpus(path, fmt, _mapping(args, path))


def _feature_config(args) -> FeatureConfig:
    tree = args.model == "tree"
    chars = args.char_ngrams if args.char_ngrams is not None else (frozenset() if tree else frozenset({1, 2, 3}))
    words = args.word_ngrams if args.word_ngrams is not None else (frozenset({1}) if tree else frozenset({1, 2}))
    return FeatureConfig(chars, words, args.weighting)


def _train_params(args, config: FeatureConfig) -> dict:
    if args.model == "tree":
        return {"min_leaf": args.min_leaf, "config": config}
    params = {"epochs": args.epochs, "seed": args.seed, "config": config}
    if args.model == "svm":
        params["lam"] = args.lam
    return params


def _labeled(corpus, config: FeatureConfig):
    data = [(vectorize(d.text, config), d.label) for d in corpus if d.label is not None]
    if not data:
        raise UsageError("corpus has no labeled documents (see --label-col)")
    return data


def _json(obj) -> str:
    return json.dumps(obj, ensure_ascii=False, indent=2) + "\n"


def _word_list(path: str | None, table) -> list[str]:
    if path is None:
        return list(table.words)
    return [w.strip() for w in Path(path).read_text(encoding="utf-8").splitlines() if w.strip()]


def _csv_rows(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


# -- commands ----------------------------------------------------------------


def cmd_ingest(args):
    return _load(args, args.corpus).to_jsonl()


def cmd_timeline(args):
    corpus = _load(args, args.corpus)
    tl = daily_timeline(corpus) if (args.daily or args.spikes) else monthly_timeline(corpus)
    out = {"timeline": tl.to_list()}
    if args.spikes:
        out["spikes"] = [{"period": k, "count": c, "baseline": b} for k, c, b in detect_spikes(tl, args.factor)]
    if args.pretty:
        lines = [f"{k}\t{c}" for k, c in tl]
        return "\n".join(lines) + "\n"
    return _json(out)


def cmd_train(args):
    corpus = _load(args, args.corpus)
    config = _feature_config(args)
    model = TRAINERS[args.model](_labeled(corpus, config), **_train_params(args, config))
    return dumps_model(model)


def cmd_crossval(args):
    corpus = _load(args, args.corpus)
    config = _feature_config(args)
    params = _train_params(args, config)
    # kfoldcv's own seed drives the fold split; the trainer gets the same seed
    trainer = functools.partial(TRAINERS[args.model], **params)
    m = kfoldcv(trainer, _labeled(corpus, config), k=args.k, seed=args.seed)
    if args.pretty:
        return m.table(args.task or args.model)
    return _json(m.to_dict())


def cmd_predict(args):
    model = load_model(args.model)
    corpus = _load(args, args.corpus)
    rows = []
    for d in corpus:
        label, score = model.predict(vectorize(d.text, model.config))
        rows.append({"id": d.id, "label": label, "score": score})
    if args.pretty:
        return "".join(f"{r['id']}\t{r['label']}\t{r['score']:.4f}\n" for r in rows)
    return _json(rows)


def cmd_keywords(args):
    a = _load(args, args.corpus_a)
    b = _load(args, args.corpus_b)
    stats = extract_keywords(a, b, min_count=args.min_count, alpha=args.alpha, unit=args.unit)
    if args.significant_only:
        stats = [s for s in stats if s.significant]
    if args.top is not None:
        stats = stats[: args.top]
    if args.csv:
        return keywords_csv(stats)
    if args.pretty:
        rows = [f"{s.word:<20} {s.count_a:>7} {s.count_b:>7} {s.chi2:>10.2f} {'*' if s.significant else ' '} "
                f"{s.posterior:.3f} {s.direction}" for s in stats]
        return "\n".join(rows) + "\n"
    return _json([s.to_dict() for s in stats])


def cmd_collocations(args):
    cols = collocations(_load(args, args.corpus), min_count=args.min_count)
    if args.top is not None:
        cols = cols[: args.top]
    return _json([{"left": c.left, "right": c.right, "count": c.count, "pmi": c.pmi} for c in cols])


def cmd_expand(args):
    table = load_embeddings(args.embeddings)
    seeds = set()
    if args.seeds:
        seeds.update(s.strip() for s in args.seeds.split(",") if s.strip())
    if args.seeds_file:
        seeds.update(_word_list(args.seeds_file, table))
    if not seeds:
        raise UsageError("give --seeds or --seeds-file")
    result = expand_dictionary(seeds, table, k=args.k, threshold=args.threshold)
    return _json({"words": sorted(result.words), "skipped": result.skipped})


def cmd_neighbors(args):
    table = load_embeddings(args.embeddings)
    try:
        hits = nearest(table, args.word, args.k)
    except KeyError:
        raise UsageError(f"word {args.word!r} not in the embedding table") from None
    return _json([{"word": w, "similarity": s} for w, s in hits])


def cmd_cluster(args):
    table = load_embeddings(args.embeddings)
    words = _word_list(args.words_file, table)
    try:
        res = spherical_kmeans(table, words, args.k, seed=args.seed, max_iters=args.max_iters)
    except KeyError as exc:
        raise UsageError(f"word {exc.args[0]!r} not in the embedding table") from None
    if args.csv:
        return _csv_rows(["word", "cluster"], res.assignments.items())
    return _json(res.to_dict())


def cmd_project(args):
    table = load_embeddings(args.embeddings)
    words = _word_list(args.words_file, table)
    missing = [w for w in words if w not in table]
    if missing:
        raise UsageError(f"word {missing[0]!r} not in the embedding table")
    proj = project_2d(table, words, seed=args.seed)
    if args.csv:
        return _csv_rows(["word", "x", "y"], ((w, repr(x), repr(y)) for w, (x, y) in proj.coords.items()))
    return _json(proj.to_dict())


def _parse_overrides(items) -> dict:
    out = {}
    for item in items:
        word, sep, score = item.rpartition("=")
        if not sep or not word:
            raise UsageError(f"--override expects WORD=SCORE, got {item!r}")
        try:
            out[word] = float(score) if score else None
        except ValueError:
            raise UsageError(f"--override score must be a number, got {score!r}") from None
    return out


def cmd_sentiment(args):
    lex = SentimentLexicon.load(args.lexicon) if args.lexicon else demo_sentiment()
    if args.override:
        lex = lex.override(_parse_overrides(args.override))
    corpus = _load(args, args.corpus)
    rows = []
    for d in corpus:
        score, hits = polarity(d.text, lex)
        rows.append({"id": d.id, "polarity": score, "matches": hits})
    mean = sum(r["polarity"] for r in rows) / len(rows) if rows else 0.0
    if args.pretty:
        return "".join(f"{r['id']}\t{r['polarity']:+.3f}\t{r['matches']}\n" for r in rows) + f"mean\t{mean:+.3f}\n"
    return _json({"mean": mean, "documents": rows})


def cmd_profile(args):
    cats = CategoryLexicon.load(args.categories) if args.categories else demo_categories()
    emoji = load_emoji(args.emoji) if args.emoji else demo_emoji()
    corpus = _load(args, args.corpus)
    rows = []
    for d in corpus:
        rows.append({
            "id": d.id,
            "categories": category_profile(d.text, cats),
            "negativity": negativity_markers(d.text, emoji).to_dict(),
            "style": style_profile(d.text),
        })
    return _json(rows)


def cmd_wordtree(args):
    tree = word_tree(_load(args, args.corpus), args.keyword, args.direction, args.max_depth, args.min_count)
    if args.pretty:
        lines = []

        def walk(node, indent):
            lines.append(f"{'  ' * indent}{node.token} ({node.count})")
            for c in node.children:
                walk(c, indent + 1)

        walk(tree, 0)
        return "\n".join(lines) + "\n"
    return _json(tree.to_dict())


def cmd_export_tree(args):
    model = load_model(args.model)
    if getattr(model, "kind", None) != "tree":
        raise UsageError("export-tree needs a decision tree model")
    return export_tree(model, args.to_format)


def cmd_highlight(args):
    lex = KeywordLexicon.load(args.lexicon) if args.lexicon else demo_keywords()
    if args.text is not None:
        return _json([s.to_dict() for s in highlight(args.text, lex)])
    if args.corpus is None:
        raise UsageError("give a corpus file or --text")
    corpus = _load(args, args.corpus)
    return _json([{"id": d.id, "spans": [s.to_dict() for s in highlight(d.text, lex)]} for d in corpus])


def cmd_report(args):
    corpus = _load(args, args.corpus)
    reference = _load(args, args.reference) if args.reference else None
    lex = SentimentLexicon.load(args.lexicon) if args.lexicon else (demo_sentiment() if args.demo_lexicon else None)
    rep = summary_report(corpus, reference, lex, markers=args.markers, top_k=args.top,
                         min_count=args.min_count, alpha=args.alpha)
    return dumps_report(rep)


COMMANDS = {
    "ingest": cmd_ingest,
    "timeline": cmd_timeline,
    "train": cmd_train,
    "crossval": cmd_crossval,
    "predict": cmd_predict,
    "keywords": cmd_keywords,
    "collocations": cmd_collocations,
    "expand": cmd_expand,
    "neighbors": cmd_neighbors,
    "cluster": cmd_cluster,
    "project": cmd_project,
    "sentiment": cmd_sentiment,
    "profile": cmd_profile,
    "wordtree": cmd_wordtree,
    "export-tree": cmd_export_tree,
    "highlight": cmd_highlight,
    "report": cmd_report,
}


def _apply_config(parser: argparse.ArgumentParser, argv: list[str]) -> None:
    """Install config-file values as parser defaults, so explicit flags win.

    The file is a JSON object; top-level keys apply to every subcommand and a
    nested object under a subcommand name applies to that subcommand only.
    Keys are flag names without dashes (``min_leaf`` or ``min-leaf``).
    """
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    path = known.config or os.environ.get(CONFIG_ENV)
    if not path:
        return
    try:
        cfg = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    if not isinstance(cfg, dict):
        raise UsageError("config file must hold a JSON object")
    subparsers = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    all_dests = {a.dest for sp in subparsers.choices.values() for a in sp._actions} | {"lambda"}
    for key, value in cfg.items():
        if not isinstance(value, dict) and key.replace("-", "_") not in all_dests:
            raise UsageError(f"unknown config key {key!r}")
        if isinstance(value, dict) and key not in subparsers.choices:
            raise UsageError(f"unknown subcommand section {key!r} in config")
    for name, sp in subparsers.choices.items():
        dests = {a.dest for a in sp._actions}
        values = {k: v for k, v in cfg.items() if not isinstance(v, dict)}
        values.update(cfg.get(name, {}) if isinstance(cfg.get(name), dict) else {})
        defaults = {}
        for key, value in values.items():
            dest = key.replace("-", "_")
            if dest == "lambda":
                dest = "lam"
            if dest not in dests:
                if name in cfg and key in cfg[name]:
                    raise UsageError(f"unknown config key {key!r} for {name}")
                continue
            defaults[dest] = value
        sp.set_defaults(**defaults)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    if not argv:
        parser.print_help(sys.stderr)
        return 1
    try:
        _apply_config(parser, argv)
    except UsageError as exc:
        print(f"hatescope: error: {exc}", file=sys.stderr)
        return 1
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command is None:
        parser.print_help(sys.stderr)
        return 1
    try:
        text = COMMANDS[args.command](args)
        _emit(text, args.out)
    except (UsageError, ParameterError) as exc:
        print(f"hatescope {args.command}: error: {exc}", file=sys.stderr)
        return 1
    except (HatescopeError, OSError, KeyError) as exc:
        print(f"hatescope {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
