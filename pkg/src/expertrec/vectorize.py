"""Radical dictionary, TF-IDF weighting and the sparse specialist-term matrix."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .corpus import CurriculumRecord, collect_texts
from .errors import ContractError, EmptyCorpusError, FileFormatError
from .textproc import StemRuleSet, StopwordTable, process

WEIGHTINGS = ("tfidf", "raw")


@dataclass(frozen=True)
class SpecialistDocument:
    specialist_id: str
    radical_counts: dict[str, int]

    @property
    def is_empty(self) -> bool:
        return not self.radical_counts


@dataclass(frozen=True)
class VocabEntry:
    index: int
    df: int
    cf: int


@dataclass(frozen=True)
class Vocabulary:
    entries: dict[str, VocabEntry]
    n_docs: int

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, radical) -> bool:
        return radical in self.entries

    def __getitem__(self, radical) -> VocabEntry:
        return self.entries[radical]

    @property
    def radicals(self) -> list[str]:
        return list(self.entries)

    @property
    def total_uses(self) -> int:
        return sum(e.cf for e in self.entries.values())


@dataclass(frozen=True, eq=False)
class SparseVector:
    dim: int
    indices: np.ndarray  # int64, strictly increasing
    weights: np.ndarray  # float64

    @property
    def is_empty(self) -> bool:
        return self.indices.size == 0

    def to_dense(self, dtype=np.float64) -> np.ndarray:
        out = np.zeros(self.dim, dtype=dtype)
        out[self.indices] = self.weights
        return out

    def norm(self) -> float:
        return float(np.sqrt(np.sum(self.weights * self.weights)))

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseVector):
            return NotImplemented
        return (self.dim == other.dim and np.array_equal(self.indices, other.indices)
                and np.array_equal(self.weights, other.weights))


@dataclass(frozen=True, eq=False)
class SpecialistMatrix:
    dim: int
    ids: tuple[str, ...]
    rows: tuple[SparseVector, ...]
    excluded: tuple[str, ...] = field(default=())

    def __len__(self) -> int:
        return len(self.ids)

    def row(self, specialist_id: str) -> SparseVector:
        return self.rows[self.ids.index(specialist_id)]

    def dense(self, which: Sequence[int] | None = None, dtype=np.float64) -> np.ndarray:
        which = range(len(self.rows)) if which is None else which
        out = np.zeros((len(which), self.dim), dtype=dtype)
        for i, r in enumerate(which):
            row = self.rows[r]
            out[i, row.indices] = row.weights
        return out


def build_documents(records: Iterable[CurriculumRecord], table: StopwordTable | None = None,
                    rules: StemRuleSet | None = None) -> list[SpecialistDocument]:
    docs = []
    for rec in records:
        counts: Counter = Counter()
        for text, _kind in collect_texts(rec):
            counts.update(process(text, table, rules))
        docs.append(SpecialistDocument(rec.specialist_id, dict(counts)))
    return docs


def build_vocabulary(documents: Iterable[SpecialistDocument], min_df: int = 1) -> Vocabulary:
    """Count df/cf over non-empty documents and index radicals lexicographically."""
    df: Counter = Counter()
    cf: Counter = Counter()
    n_docs = 0
    for doc in documents:
        if doc.is_empty:
            continue
        n_docs += 1
        df.update(doc.radical_counts.keys())
        cf.update(doc.radical_counts)
    if n_docs == 0:
        raise EmptyCorpusError("empty corpus after processing")
    kept = sorted(r for r in df if df[r] >= min_df)
    entries = {r: VocabEntry(i, df[r], cf[r]) for i, r in enumerate(kept)}
    return Vocabulary(entries, n_docs)


def tfidf_weight(tf: int, df: int, n_docs: int) -> float:
    if tf < 1:
        raise ContractError(f"tf must be >= 1, got {tf}")
    if df < 1 or df > n_docs:
        raise ContractError(f"df must lie in [1, n_docs={n_docs}], got {df}")
    return tf * math.log(n_docs / df)


def vectorize_document(doc: SpecialistDocument, vocab: Vocabulary, weighting: str = "tfidf",
                       normalize: bool = True) -> SparseVector:
    if weighting not in WEIGHTINGS:
        raise ContractError(f"unknown weighting {weighting!r}")
    pairs = []
    for radical, tf in doc.radical_counts.items():
        entry = vocab.entries.get(radical)
        if entry is None:
            continue
        w = float(tf) if weighting == "raw" else tfidf_weight(tf, entry.df, vocab.n_docs)
        if w > 0.0:
            pairs.append((entry.index, w))
    pairs.sort()
    idx = np.array([p[0] for p in pairs], dtype=np.int64)
    w = np.array([p[1] for p in pairs], dtype=np.float64)
    if normalize and w.size:
        w = w / math.sqrt(math.fsum(w * w))
    return SparseVector(len(vocab), idx, w)


def build_matrix(documents: Iterable[SpecialistDocument], vocab: Vocabulary,
                 weighting: str = "tfidf") -> SpecialistMatrix:
    """One unit-norm row per document with any weight; rows sorted by id."""
    ids, rows, excluded = [], [], []
    for doc in sorted(documents, key=lambda d: d.specialist_id):
        vec = vectorize_document(doc, vocab, weighting)
        if vec.is_empty:
            excluded.append(doc.specialist_id)
            continue
        ids.append(doc.specialist_id)
        rows.append(vec)
    if not rows:
        raise EmptyCorpusError("no specialist has a non-empty vector")
    return SpecialistMatrix(len(vocab), tuple(ids), tuple(rows), tuple(excluded))


# -- files --------------------------------------------------------------------


def write_vocabulary(vocab: Vocabulary, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"#n_docs\t{vocab.n_docs}\n")
        for r, e in vocab.entries.items():
            fh.write(f"{r}\t{e.index}\t{e.df}\t{e.cf}\n")


def read_vocabulary(path) -> Vocabulary:
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or not lines[0].startswith("#n_docs\t"):
        raise FileFormatError(f"{path}: missing '#n_docs' header")
    try:
        n_docs = int(lines[0].split("\t")[1])
        entries = {}
        for line in lines[1:]:
            if not line:
                continue
            r, i, df, cf = line.split("\t")
            entries[r] = VocabEntry(int(i), int(df), int(cf))
    except ValueError as exc:
        raise FileFormatError(f"{path}: bad vocabulary line ({exc})") from None
    if sorted(e.index for e in entries.values()) != list(range(len(entries))):
        raise FileFormatError(f"{path}: indices are not a permutation of 0..V-1")
    return Vocabulary(entries, n_docs)


def write_matrix(matrix: SpecialistMatrix, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"#dim\t{matrix.dim}\n")
        for sid, row in zip(matrix.ids, matrix.rows):
            cells = ",".join(f"{i}:{w!r}" for i, w in zip(row.indices.tolist(), row.weights.tolist()))
            fh.write(f"{sid}\t{cells}\n")


def read_matrix(path) -> SpecialistMatrix:
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or not lines[0].startswith("#dim\t"):
        raise FileFormatError(f"{path}: missing '#dim' header")
    ids, rows = [], []
    try:
        dim = int(lines[0].split("\t")[1])
        for line in lines[1:]:
            if not line:
                continue
            sid, cells = line.split("\t")
            pairs = [c.split(":") for c in cells.split(",") if c]
            idx = np.array([int(i) for i, _ in pairs], dtype=np.int64)
            w = np.array([float(v) for _, v in pairs], dtype=np.float64)
            ids.append(sid)
            rows.append(SparseVector(dim, idx, w))
    except ValueError as exc:
        raise FileFormatError(f"{path}: bad matrix line ({exc})") from None
    return SpecialistMatrix(dim, tuple(ids), tuple(rows))
