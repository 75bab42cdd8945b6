from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpus import CurriculumRecord
from .neural import AutoencoderModel, encode
from .retrieve import EmbeddingIndex, rank
from .vectorize import SpecialistMatrix


@dataclass(frozen=True)
class EvalReport:
    n: int
    k: int
    self_retrieval: float  # share of specialists ranked first for their own document
    area_purity: float     # mean share of top-k neighbours (self excluded) sharing the area
    n_labelled: int

    def summary(self) -> str:
        return (f"specialists={self.n} self_retrieval={self.self_retrieval:.4f} "
                f"purity@{self.k}={self.area_purity:.4f} labelled={self.n_labelled}")


def area_purity(index: EmbeddingIndex, areas: dict[str, str], k: int) -> tuple[float, int]:
    """Mean fraction of each labelled specialist's k nearest neighbours in its area."""
    emb = index.embeddings
    sims = emb @ emb.T
    ids = np.array(index.ids)
    total, counted = 0.0, 0
    for i, sid in enumerate(index.ids):
        label = areas.get(sid, "")
        if not label:
            continue
        s = sims[i].copy()
        s[i] = -np.inf
        order = sorted(range(len(ids)), key=lambda j: (-s[j], ids[j]))
        neigh = [j for j in order if j != i][:k]
        if not neigh:
            continue
        total += sum(areas.get(ids[j], "") == label for j in neigh) / len(neigh)
        counted += 1
    return (total / counted if counted else 0.0), counted


def evaluate(index: EmbeddingIndex, model: AutoencoderModel, matrix: SpecialistMatrix,
             records: list[CurriculumRecord], k: int = 10) -> EvalReport:
    in_index = set(index.ids)
    hits, n = 0, 0
    for sid, row in zip(matrix.ids, matrix.rows):
        if sid not in in_index:
            continue
        emb = encode(model, row.to_dense(model.dtype)).astype(np.float64)
        n += 1
        hits += rank(index, emb, 1)[0].specialist_id == sid
    areas = {r.specialist_id: r.major_area for r in records}
    purity, labelled = area_purity(index, areas, k)
    return EvalReport(n, k, hits / n if n else 0.0, purity, labelled)
