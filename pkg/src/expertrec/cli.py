"""Command-line pipeline.

    expertrec vocab --corpus c.jsonl --out vocab.tsv
    expertrec vectorize --corpus c.jsonl --vocab vocab.tsv --out matrix.tsv
    expertrec train --matrix matrix.tsv --out model.bin
    expertrec index --model model.bin --matrix matrix.tsv --out index.bin
    expertrec query --index index.bin --model model.bin --vocab vocab.tsv --text "bibliometria"

Every subcommand reads only the files it is given. ``--config FILE`` supplies
``key=value`` defaults (keys are flag names without dashes); flags win.
A corpus path of the form ``bundled:NAME`` selects a shipped synthetic corpus.
"""

from __future__ import annotations

import argparse
import sys
from contextlib import nullcontext
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import corpus as corpus_mod
from .errors import ExpertRecError
from .evaluate import evaluate
from .neural import (TrainConfig, gradient_check, init_model, load_model,
                     min_abs_preactivation, save_model, train)
from .retrieve import build_index, export_viz, fit_pca, load_index, query, save_index
from .synthetic import bundled_path
from .textproc import StemRuleSet, StopwordTable
from .vectorize import (build_documents, build_matrix, build_vocabulary, read_matrix,
                        read_vocabulary, write_matrix, write_vocabulary)

DEFAULT_SEED = 1
SUBCOMMANDS = ("stats", "vocab", "vectorize", "train", "index", "query", "viz", "eval", "gradcheck")


@dataclass
class RunConfig:
    paths: dict[str, Path] = field(default_factory=dict)
    train: TrainConfig = field(default_factory=TrainConfig)
    stopwords: StopwordTable | None = None
    stem_rules: StemRuleSet | None = None
    min_df: int = 1
    weighting: str = "tfidf"
    seed: int = DEFAULT_SEED

    @classmethod
    def from_args(cls, args) -> "RunConfig":
        paths = {}
        for key in ("corpus", "vocab", "matrix", "model", "index", "out"):
            value = getattr(args, key, None)
            if value is not None:
                paths[key] = _resolve_path(value)
        cfg = cls(paths=paths, seed=args.seed)
        cfg.min_df = getattr(args, "min_df", 1)
        cfg.weighting = "raw" if getattr(args, "raw_counts", False) else "tfidf"
        cfg.stopwords = _table_override(getattr(args, "stopwords", None), StopwordTable)
        cfg.stem_rules = _table_override(getattr(args, "stem_rules", None), StemRuleSet)
        if args.command == "train":
            cfg.train = TrainConfig(epochs=args.epochs, batch_size=args.batch_size, seed=args.seed,
                                    lr=args.lr, alpha=args.alpha, hidden=tuple(args.hidden),
                                    float32=args.float32)
        return cfg

    def require(self, *keys: str) -> None:
        for key in keys:
            path = self.paths.get(key)
            if path is None:
                raise ExpertRecError(f"--{key} is required")
            if key != "out" and not path.exists():
                raise ExpertRecError(f"{key} file not found: {path}")


def _resolve_path(value) -> Path:
    value = str(value)
    if value.startswith("bundled:"):
        return bundled_path(value.split(":", 1)[1])
    return Path(value)


def _table_override(specs, cls):
    """Built-in tables with ``LANG=PATH`` overrides applied."""
    if not specs:
        return None
    default = cls.default()
    mapping = dict(default.words if cls is StopwordTable else default.steps)
    for spec in specs:
        lang, _, path = spec.partition("=")
        loaded = cls.from_files({lang: path})
        mapping.update(loaded.words if cls is StopwordTable else loaded.steps)
    return cls(mapping)


def _int_list(text: str) -> list[int]:
    return [int(t) for t in str(text).replace(" ", "").split(",") if t]


def build_parser() -> argparse.ArgumentParser:
    def global_opts(suppress: bool) -> argparse.ArgumentParser:
        # subcommand copies use SUPPRESS so they never clobber values given
        # before the subcommand name
        d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
        g = argparse.ArgumentParser(add_help=False)
        g.add_argument("--seed", type=int, default=d(DEFAULT_SEED))
        g.add_argument("--threads", type=int, default=d(None), help="BLAS thread cap")
        g.add_argument("--config", type=Path, default=d(None), help="key=value defaults file")
        return g

    common = global_opts(suppress=True)

    text_opts = argparse.ArgumentParser(add_help=False)
    text_opts.add_argument("--stopwords", action="append", metavar="LANG=PATH",
                           help="replace a stopword list (one word per line)")
    text_opts.add_argument("--stem-rules", action="append", metavar="LANG=PATH",
                           help="replace a suffix rule file")

    p = argparse.ArgumentParser(prog="expertrec", description="Expert recommendation pipeline.",
                                parents=[global_opts(suppress=False)])
    sub = p.add_subparsers(dest="command", required=True, metavar="{" + ",".join(SUBCOMMANDS) + "}")

    s = sub.add_parser("stats", parents=[common, text_opts], help="corpus counts table")
    s.add_argument("--corpus", required=False)
    s.add_argument("--reference", action="store_true", help="add full-scale reference column")

    s = sub.add_parser("vocab", parents=[common, text_opts], help="build the radical dictionary")
    s.add_argument("--corpus")
    s.add_argument("--out")
    s.add_argument("--min-df", type=int, default=1)

    s = sub.add_parser("vectorize", parents=[common, text_opts], help="TF-IDF specialist matrix")
    s.add_argument("--corpus")
    s.add_argument("--vocab")
    s.add_argument("--out")
    s.add_argument("--raw-counts", action="store_true")

    s = sub.add_parser("train", parents=[common], help="train the autoencoder")
    s.add_argument("--matrix")
    s.add_argument("--out")
    s.add_argument("--epochs", type=int, default=18)
    s.add_argument("--lr", type=float, default=1e-5)
    s.add_argument("--batch-size", type=int, default=32)
    s.add_argument("--alpha", type=float, default=0.01)
    s.add_argument("--hidden", type=_int_list, default=[512, 128, 48, 20],
                   help="encoder widths after the input, comma separated")
    s.add_argument("--float32", action="store_true")

    s = sub.add_parser("index", parents=[common], help="encode every specialist")
    s.add_argument("--model")
    s.add_argument("--matrix")
    s.add_argument("--out")

    s = sub.add_parser("query", parents=[common, text_opts], help="rank specialists for a text")
    s.add_argument("--index")
    s.add_argument("--model")
    s.add_argument("--vocab")
    s.add_argument("--text", required=False)
    s.add_argument("--k", type=int, default=10)
    s.add_argument("--raw-counts", action="store_true")

    s = sub.add_parser("viz", parents=[common], help="PCA 3-D coordinates as CSV")
    s.add_argument("--index")
    s.add_argument("--corpus")
    s.add_argument("--out")

    s = sub.add_parser("eval", parents=[common], help="self-retrieval and area purity")
    s.add_argument("--index")
    s.add_argument("--model")
    s.add_argument("--matrix")
    s.add_argument("--corpus")
    s.add_argument("--k", type=int, default=10)

    s = sub.add_parser("gradcheck", parents=[common], help="finite-difference gradient check")
    s.add_argument("--models", type=int, default=100)
    s.add_argument("--max-dims", type=_int_list, default=[40, 24, 16, 8, 4])
    s.add_argument("--h", type=float, default=1e-5)
    s.add_argument("--samples", type=int, default=3)
    return p


def _config_defaults(path: Path) -> dict[str, str]:
    out = {}
    for line_no, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ExpertRecError(f"{path}:{line_no}: expected key=value")
        out[key.strip().replace("-", "_")] = value.strip()
    return out


def _apply_config(parser: argparse.ArgumentParser, argv: list[str]) -> None:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config", type=Path)
    pre.add_argument("command", nargs="?")
    known, _ = pre.parse_known_args(argv)
    if known.config is None:
        return
    values = _config_defaults(known.config)
    subs = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    for name, sp in subs.choices.items():
        defaults = {}
        for action in sp._actions:
            if action.dest not in values:
                continue
            raw = values[action.dest]
            if isinstance(action, argparse._StoreTrueAction):
                defaults[action.dest] = raw.lower() in ("1", "true", "yes", "on")
            elif isinstance(action, argparse._AppendAction):
                defaults[action.dest] = [v.strip() for v in raw.split(";") if v.strip()]
            else:
                defaults[action.dest] = action.type(raw) if action.type else raw
        sp.set_defaults(**defaults)


# -- subcommands ----------------------------------------------------------------


def cmd_stats(args, cfg: RunConfig) -> None:
    cfg.require("corpus")
    records = corpus_mod.load_records(cfg.paths["corpus"])
    stats = corpus_mod.corpus_stats(records)
    docs = build_documents(records, cfg.stopwords, cfg.stem_rules)
    if any(not d.is_empty for d in docs):
        vocab = build_vocabulary(docs)
        stats = corpus_mod.CorpusStats(stats.kind_counts, stats.n_records, len(vocab), vocab.total_uses)
    print(corpus_mod.format_stats(stats, reference=args.reference))


def cmd_vocab(args, cfg: RunConfig) -> None:
    cfg.require("corpus", "out")
    records = corpus_mod.load_records(cfg.paths["corpus"])
    docs = build_documents(records, cfg.stopwords, cfg.stem_rules)
    vocab = build_vocabulary(docs, min_df=cfg.min_df)
    write_vocabulary(vocab, cfg.paths["out"])
    empty = sum(d.is_empty for d in docs)
    print(f"vocab: V={len(vocab)} n_docs={vocab.n_docs} uses={vocab.total_uses} "
          f"empty_docs={empty} -> {cfg.paths['out']}")


def cmd_vectorize(args, cfg: RunConfig) -> None:
    cfg.require("corpus", "vocab", "out")
    records = corpus_mod.load_records(cfg.paths["corpus"])
    vocab = read_vocabulary(cfg.paths["vocab"])
    docs = build_documents(records, cfg.stopwords, cfg.stem_rules)
    matrix = build_matrix(docs, vocab, cfg.weighting)
    write_matrix(matrix, cfg.paths["out"])
    excluded = ",".join(matrix.excluded) or "-"
    print(f"vectorize: rows={len(matrix)} dim={matrix.dim} weighting={cfg.weighting} "
          f"excluded={excluded} -> {cfg.paths['out']}")


def cmd_train(args, cfg: RunConfig) -> None:
    cfg.require("matrix", "out")
    matrix = read_matrix(cfg.paths["matrix"])

    def progress(epoch, loss, seconds):
        print(f"epoch={epoch} mean_loss={loss!r} seconds={seconds:.3f}", file=sys.stderr, flush=True)

    model, report = train(matrix, cfg.train, progress)
    save_model(model, cfg.paths["out"])
    print(f"train: dims={model.encoder_dims} epochs={len(report.epoch_loss)} "
          f"first_loss={report.epoch_loss[0]!r} final_loss={report.final_loss!r} "
          f"min_loss={report.min_loss!r} -> {cfg.paths['out']}")


def cmd_index(args, cfg: RunConfig) -> None:
    cfg.require("model", "matrix", "out")
    model = load_model(cfg.paths["model"])
    index = build_index(model, read_matrix(cfg.paths["matrix"]))
    save_index(index, cfg.paths["out"])
    excluded = ",".join(index.excluded) or "-"
    print(f"index: entries={len(index)} dim={index.dim} excluded={excluded} "
          f"fingerprint={index.fingerprint.hex()[:16]} -> {cfg.paths['out']}")


def cmd_query(args, cfg: RunConfig) -> None:
    cfg.require("index", "model", "vocab")
    if not args.text:
        raise ExpertRecError("--text is required")
    results = query(load_index(cfg.paths["index"]), load_model(cfg.paths["model"]),
                    read_vocabulary(cfg.paths["vocab"]), args.text, args.k,
                    cfg.stopwords, cfg.stem_rules, cfg.weighting)
    for r in results:
        print(f"{r.rank}\t{r.specialist_id}\t{r.score!r}")
    print(f"query: returned={len(results)} k={args.k}", file=sys.stderr)


def cmd_viz(args, cfg: RunConfig) -> None:
    cfg.require("index", "corpus", "out")
    index = load_index(cfg.paths["index"])
    pca = fit_pca(index)
    n = export_viz(index, pca, corpus_mod.load_records(cfg.paths["corpus"]), cfg.paths["out"])
    ratios = " ".join(f"{r:.4f}" for r in pca.explained_ratio)
    print(f"viz: rows={n} explained_ratio=[{ratios}] -> {cfg.paths['out']}")


def cmd_eval(args, cfg: RunConfig) -> None:
    cfg.require("index", "model", "matrix", "corpus")
    report = evaluate(load_index(cfg.paths["index"]), load_model(cfg.paths["model"]),
                      read_matrix(cfg.paths["matrix"]),
                      corpus_mod.load_records(cfg.paths["corpus"]), args.k)
    print(f"eval: {report.summary()}")


def random_gradcheck(n_models: int, max_dims, h: float = 1e-5, seed: int = DEFAULT_SEED,
                     samples: int = 3, kink_tol: float = 1e-6) -> tuple[float, int, int]:
    """Gradient check over seeded random models; returns (max error, checked, skipped)."""
    rng = np.random.default_rng(seed)
    worst, checked, skipped = 0.0, 0, 0
    for i in range(n_models):
        dims = [int(rng.integers(1 if j == 4 else 2, d + 1)) for j, d in enumerate(max_dims)]
        model = init_model(dims, alpha=0.01, seed=int(rng.integers(2**31)))
        for b in model.biases:
            b[:] = rng.normal(0.0, 0.1, b.shape)
        x = rng.random((samples, dims[0]))
        if min_abs_preactivation(model, x) < kink_tol:
            skipped += 1
            continue
        worst = max(worst, gradient_check(model, x, h))
        checked += 1
    return worst, checked, skipped


def cmd_gradcheck(args, cfg: RunConfig) -> None:
    worst, checked, skipped = random_gradcheck(args.models, args.max_dims, args.h, cfg.seed, args.samples)
    print(f"gradcheck: models={checked} skipped_near_kink={skipped} h={args.h} max_rel_error={worst:.3e}")


HANDLERS = {name: globals()[f"cmd_{name}"] for name in SUBCOMMANDS}


def run(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        _apply_config(parser, argv)
    except (ExpertRecError, OSError) as exc:
        print(f"expertrec: error: {exc}", file=sys.stderr)
        return 1
    args = parser.parse_args(argv)  # exits 2 on usage errors
    if args.threads is not None:
        from threadpoolctl import threadpool_limits
        limiter = threadpool_limits(limits=args.threads)
    else:
        limiter = nullcontext()
    try:
        with limiter:
            HANDLERS[args.command](args, RunConfig.from_args(args))
    except (ExpertRecError, OSError, KeyError) as exc:
        print(f"expertrec {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
