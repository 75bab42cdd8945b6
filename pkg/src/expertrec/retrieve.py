"""Embedding index, cosine ranking, and PCA export for 3-D plots."""

from __future__ import annotations

import csv
import struct
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .corpus import CurriculumRecord
from .errors import (ContractError, EmptyQueryError, FileFormatError,
                     FingerprintMismatchError)
from .neural import AutoencoderModel, encode, fingerprint
from .textproc import StemRuleSet, StopwordTable, process
from .vectorize import SpecialistDocument, SpecialistMatrix, Vocabulary, vectorize_document

INDEX_MAGIC = b"AIDX"
INDEX_VERSION = 1
PCA_TOL = 1e-10
PCA_MAX_ITER = 10_000


@dataclass(frozen=True, eq=False)
class EmbeddingIndex:
    ids: tuple[str, ...]
    embeddings: np.ndarray  # (n, d4), rows unit norm
    fingerprint: bytes
    excluded: tuple[str, ...] = field(default=())

    def __len__(self) -> int:
        return len(self.ids)

    @property
    def dim(self) -> int:
        return self.embeddings.shape[1]


@dataclass(frozen=True)
class QueryResult:
    specialist_id: str
    score: float
    rank: int


@dataclass(frozen=True, eq=False)
class PcaModel:
    mean: np.ndarray
    components: np.ndarray  # (d, k), orthonormal columns
    explained_variance: np.ndarray
    total_variance: float

    @property
    def explained_ratio(self) -> np.ndarray:
        if self.total_variance == 0:
            return np.zeros_like(self.explained_variance)
        return self.explained_variance / self.total_variance


def cosine_similarity(a, b) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0 or nb == 0:
        raise ContractError("cosine similarity undefined for a zero-norm vector")
    return float(np.clip(np.dot(a, b) / (na * nb), -1.0, 1.0))


def _unit_rows(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    norms = np.linalg.norm(x, axis=1)
    ok = norms > 0
    out = np.zeros_like(x)
    out[ok] = x[ok] / norms[ok, None]
    return out, ok


def build_index(model: AutoencoderModel, matrix: SpecialistMatrix, batch_size: int = 256) -> EmbeddingIndex:
    if model.dims[0] != matrix.dim:
        raise ContractError(f"model input dim {model.dims[0]} != matrix dim {matrix.dim}")
    chunks = []
    for lo in range(0, len(matrix), batch_size):
        rows = range(lo, min(lo + batch_size, len(matrix)))
        chunks.append(encode(model, matrix.dense(rows, dtype=model.dtype)).astype(np.float64))
    emb = np.vstack(chunks) if chunks else np.zeros((0, model.embedding_dim))
    unit, ok = _unit_rows(emb)
    ids = tuple(sid for sid, keep in zip(matrix.ids, ok) if keep)
    excluded = tuple(sid for sid, keep in zip(matrix.ids, ok) if not keep)
    return EmbeddingIndex(ids, unit[ok], fingerprint(model), excluded)


def rank(index: EmbeddingIndex, embedding, k: int) -> list[QueryResult]:
    """Top-k entries by cosine with ``embedding``; ties go to the smaller id."""
    if k < 1:
        raise ContractError(f"k must be >= 1, got {k}")
    q = np.asarray(embedding, dtype=np.float64)
    norm = np.linalg.norm(q)
    if norm == 0:
        raise EmptyQueryError("query embedding has zero norm")
    # row-wise sums so identical rows always get identical scores
    scores = np.sum(index.embeddings * (q / norm), axis=1)
    order = sorted(range(len(index)), key=lambda i: (-scores[i], index.ids[i]))[:k]
    return [QueryResult(index.ids[i], float(scores[i]), r) for r, i in enumerate(order, start=1)]


def embed_query(model: AutoencoderModel, vocab: Vocabulary, text: str,
                table: StopwordTable | None = None, rules: StemRuleSet | None = None,
                weighting: str = "tfidf") -> np.ndarray:
    doc = SpecialistDocument("<query>", dict(process(text, table, rules)))
    vec = vectorize_document(doc, vocab, weighting)
    if vec.is_empty:
        raise EmptyQueryError("empty query after indexing: no in-vocabulary radicals")
    return encode(model, vec.to_dense(model.dtype)).astype(np.float64)


def query(index: EmbeddingIndex, model: AutoencoderModel, vocab: Vocabulary, text: str, k: int = 10,
          table: StopwordTable | None = None, rules: StemRuleSet | None = None,
          weighting: str = "tfidf") -> list[QueryResult]:
    if k < 1:
        raise ContractError(f"k must be >= 1, got {k}")
    if fingerprint(model) != index.fingerprint:
        raise FingerprintMismatchError("index was built with a different model")
    return rank(index, embed_query(model, vocab, text, table, rules, weighting), k)


# -- PCA ----------------------------------------------------------------------


def _orthogonalize(v: np.ndarray, basis: list[np.ndarray]) -> np.ndarray:
    for _ in range(2):  # repeated Gram-Schmidt for numerical orthogonality
        for u in basis:
            v = v - np.dot(u, v) * u
    return v


def _fallback_direction(dim: int, basis: list[np.ndarray]) -> np.ndarray:
    for i in range(dim):
        e = np.zeros(dim)
        e[i] = 1.0
        v = _orthogonalize(e, basis)
        n = np.linalg.norm(v)
        if n > 1e-8:
            return v / n
    raise ContractError("no direction left to complete the basis")


def _fix_sign(v: np.ndarray) -> np.ndarray:
    i = int(np.argmax(np.abs(v)))
    return -v if v[i] < 0 else v


def power_iteration(cov: np.ndarray, basis: list[np.ndarray], tol: float = PCA_TOL,
                    max_iter: int = PCA_MAX_ITER) -> np.ndarray:
    """Dominant eigenvector of ``cov`` restricted to the complement of ``basis``."""
    dim = cov.shape[0]
    v = _orthogonalize(np.ones(dim) / np.sqrt(dim) + np.arange(dim) * 1e-3, basis)
    n = np.linalg.norm(v)
    v = v / n if n > 1e-8 else _fallback_direction(dim, basis)
    scale = max(np.abs(cov).max(), 1e-300)
    for _ in range(max_iter):
        w = _orthogonalize(cov @ v, basis)
        nw = np.linalg.norm(w)
        if nw <= 1e-14 * scale:
            # remaining subspace carries no variance
            return _fix_sign(v)
        w /= nw
        if np.dot(w, v) < 0:
            w = -w
        if np.linalg.norm(w - v) < tol:
            return _fix_sign(w)
        v = w
    return _fix_sign(v)


def fit_pca(index_or_points, n_components: int = 3) -> PcaModel:
    """PCA by power iteration with Gram-Schmidt deflation (1/(n-1) covariance)."""
    x = index_or_points.embeddings if isinstance(index_or_points, EmbeddingIndex) else index_or_points
    x = np.asarray(x, dtype=np.float64)
    if x.shape[0] < 4:
        raise ContractError(f"PCA needs at least 4 points, got {x.shape[0]}")
    if n_components > x.shape[1]:
        raise ContractError(f"cannot extract {n_components} components from {x.shape[1]} dims")
    mean = x.mean(axis=0)
    xc = x - mean
    cov = xc.T @ xc / (x.shape[0] - 1)
    basis: list[np.ndarray] = []
    variances = []
    for _ in range(n_components):
        v = power_iteration(cov, basis)
        basis.append(v)
        variances.append(max(float(v @ cov @ v), 0.0))
    return PcaModel(mean, np.column_stack(basis), np.array(variances), float(np.trace(cov)))


def project(pca: PcaModel, embedding) -> np.ndarray:
    e = np.asarray(embedding, dtype=np.float64)
    if e.shape[-1] != pca.mean.shape[0]:
        raise ContractError(f"embedding dim {e.shape[-1]} != PCA dim {pca.mean.shape[0]}")
    return (e - pca.mean) @ pca.components


def export_viz(index: EmbeddingIndex, pca: PcaModel, records: Iterable[CurriculumRecord], path) -> int:
    areas = {r.specialist_id: r.major_area for r in records}
    coords = project(pca, index.embeddings)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["id", "area", "x", "y", "z"])
        for sid, xyz in zip(index.ids, coords):
            if sid not in areas:
                raise ContractError(f"indexed specialist {sid!r} missing from records")
            w.writerow([sid, areas[sid], *(repr(float(c)) for c in xyz[:3])])
    return len(index)


# -- index file ---------------------------------------------------------------


def index_to_bytes(index: EmbeddingIndex) -> bytes:
    n, d = index.embeddings.shape
    parts = [INDEX_MAGIC, struct.pack("<I", INDEX_VERSION), index.fingerprint,
             struct.pack("<II", n, d)]
    for sid, row in zip(index.ids, index.embeddings):
        raw = sid.encode("utf-8")
        parts.append(struct.pack("<I", len(raw)))
        parts.append(raw)
        parts.append(np.ascontiguousarray(row, dtype="<f8").tobytes())
    return b"".join(parts)


def index_from_bytes(data: bytes) -> EmbeddingIndex:
    if data[:4] != INDEX_MAGIC:
        raise FileFormatError("not an index file (bad magic)")
    if len(data) < 8:
        raise FileFormatError("truncated index file (header)")
    (version,) = struct.unpack_from("<I", data, 4)
    if version != INDEX_VERSION:
        raise FileFormatError(f"unsupported index file version {version}")
    off = 8
    if len(data) < off + 32 + 8:
        raise FileFormatError("truncated index file (header)")
    fp = data[off:off + 32]
    off += 32
    n, d = struct.unpack_from("<II", data, off)
    off += 8
    ids, rows = [], []
    for _ in range(n):
        if len(data) < off + 4:
            raise FileFormatError("truncated index file (entry)")
        (length,) = struct.unpack_from("<I", data, off)
        off += 4
        if len(data) < off + length + 8 * d:
            raise FileFormatError("truncated index file (entry)")
        ids.append(data[off:off + length].decode("utf-8"))
        off += length
        rows.append(np.frombuffer(data, "<f8", d, off).astype(np.float64))
        off += 8 * d
    if off != len(data):
        raise FileFormatError(f"trailing {len(data) - off} bytes after index entries")
    emb = np.vstack(rows) if rows else np.zeros((0, d))
    return EmbeddingIndex(tuple(ids), emb, fp)


def save_index(index: EmbeddingIndex, path) -> None:
    with open(path, "wb") as fh:
        fh.write(index_to_bytes(index))


def load_index(path) -> EmbeddingIndex:
    with open(path, "rb") as fh:
        return index_from_bytes(fh.read())
