"""Full pipeline on a bundled corpus: vocabulary, TF-IDF, training, index, PCA, evaluation.

    python3 scripts/run_desk_experiment.py --corpus desk --out-dir runs/desk
"""

import argparse
import time
from pathlib import Path

from expertrec.corpus import CorpusStats, corpus_stats, format_stats
from expertrec.evaluate import evaluate
from expertrec.neural import TrainConfig, save_model, train
from expertrec.neural.training import REFERENCE_MIN_LOSS, REFERENCE_MINUTES_PER_EPOCH
from expertrec.retrieve import build_index, export_viz, fit_pca, save_index
from expertrec.synthetic import load_bundled
from expertrec.vectorize import build_documents, build_matrix, build_vocabulary, write_matrix, write_vocabulary


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--corpus", default="desk", choices=["sample", "desk", "disjoint"])
    ap.add_argument("--out-dir", type=Path, default=Path("runs/desk"))
    ap.add_argument("--epochs", type=int, default=18)
    ap.add_argument("--lr", type=float, default=1e-5)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--k", type=int, default=10)
    args = ap.parse_args()
    args.out_dir.mkdir(parents=True, exist_ok=True)

    records = load_bundled(args.corpus)
    t0 = time.perf_counter()
    docs = build_documents(records)
    vocab = build_vocabulary(docs)
    base = corpus_stats(records)
    print(format_stats(CorpusStats(base.kind_counts, base.n_records, len(vocab), vocab.total_uses)))
    matrix = build_matrix(docs, vocab)
    write_vocabulary(vocab, args.out_dir / "vocab.tsv")
    write_matrix(matrix, args.out_dir / "matrix.tsv")
    print(f"\nvectorized n={len(matrix)} V={matrix.dim} excluded={len(matrix.excluded)} "
          f"seconds={time.perf_counter() - t0:.2f}")

    cfg = TrainConfig(epochs=args.epochs, lr=args.lr, seed=args.seed)
    model, report = train(matrix, cfg, lambda e, l, s: print(f"epoch={e} mean_loss={l:.6f} seconds={s:.2f}"))
    save_model(model, args.out_dir / "model.bin")
    print(f"min_loss={report.min_loss:.6f} (full-scale reference {REFERENCE_MIN_LOSS}, "
          f"{REFERENCE_MINUTES_PER_EPOCH} min/epoch)")

    index = build_index(model, matrix)
    save_index(index, args.out_dir / "index.bin")
    pca = fit_pca(index)
    export_viz(index, pca, records, args.out_dir / "viz.csv")
    print("pca explained_ratio=" + ",".join(f"{r:.4f}" for r in pca.explained_ratio))

    print(evaluate(index, model, matrix, records, k=args.k).summary())


if __name__ == "__main__":
    main()
