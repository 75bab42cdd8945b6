import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from expertrec.corpus import CurriculumRecord, Work
from expertrec.errors import ContractError, EmptyCorpusError
from expertrec.vectorize import (SpecialistDocument, build_documents, build_matrix, build_vocabulary,
                                 read_matrix, read_vocabulary, tfidf_weight, vectorize_document,
                                 write_matrix, write_vocabulary)


def doc(sid, **counts):
    return SpecialistDocument(sid, counts)


def random_docs(rng, n_docs, n_terms):
    docs = []
    for i in range(n_docs):
        k = int(rng.integers(0, min(8, n_terms) + 1))
        terms = rng.choice(n_terms, size=k, replace=False)
        docs.append(SpecialistDocument(f"d{i:03d}", {f"t{t:02d}": int(rng.integers(1, 5)) for t in terms}))
    return docs


def brute_force_weights(docs, normalize=True):
    """Independent recount: scan every document for every (doc, term) pair."""
    live = [d for d in docs if d.radical_counts]
    n = len(live)
    out = {}
    for d in live:
        w = {}
        for term, tf in d.radical_counts.items():
            df = 0
            for other in live:
                if term in other.radical_counts:
                    df += 1
            val = tf * math.log(n / df)
            if val > 0:
                w[term] = val
        if normalize and w:
            norm = math.sqrt(sum(v * v for v in w.values()))
            w = {t: v / norm for t, v in w.items()}
        out[d.specialist_id] = w
    return out


def test_build_documents_hand_traced():
    rec = CurriculumRecord("S1", works=(Work("journal_article", "Bibliometria", ("análise bibliométrica",)),))
    (d,) = build_documents([rec])
    assert d.radical_counts == {"bibliometr": 2, "analis": 1}


def test_build_documents_flags_empty_and_keeps_ids():
    recs = [CurriculumRecord("A", works=(Work("journal_article", "em no como o"),)),
            CurriculumRecord("B", works=(Work("journal_article", "redes"),))]
    docs = build_documents(recs)
    assert [d.specialist_id for d in docs] == ["A", "B"]
    assert docs[0].is_empty and not docs[1].is_empty


class TestVocabulary:
    def test_example(self):
        v = build_vocabulary([doc("x", a=2), doc("y", a=1, b=1)])
        assert v.n_docs == 2
        assert (v["a"].index, v["a"].df, v["a"].cf) == (0, 2, 3)
        assert (v["b"].index, v["b"].df, v["b"].cf) == (1, 1, 1)

    def test_min_df(self):
        v = build_vocabulary([doc("x", a=2), doc("y", a=1, b=1)], min_df=2)
        assert v.radicals == ["a"]

    def test_all_empty(self):
        with pytest.raises(EmptyCorpusError, match="empty corpus after processing"):
            build_vocabulary([doc("x"), doc("y")])

    @pytest.mark.parametrize("seed", range(10))
    def test_brute_force_recount(self, seed):
        rng = np.random.default_rng(seed)
        docs = random_docs(rng, 50, 30)
        v = build_vocabulary(docs)
        live = [d for d in docs if d.radical_counts]
        assert v.n_docs == len(live)
        for term, e in v.entries.items():
            assert e.df == sum(1 for d in live if term in d.radical_counts)
            assert e.cf == sum(d.radical_counts.get(term, 0) for d in live)
            assert 1 <= e.df <= v.n_docs and e.cf >= e.df
        assert sorted(e.index for e in v.entries.values()) == list(range(len(v)))
        assert v.radicals == sorted(v.radicals)
        assert v.total_uses == sum(sum(d.radical_counts.values()) for d in docs)


class TestTfidf:
    def test_examples(self):
        assert tfidf_weight(2, 1, 3) == pytest.approx(2 * math.log(3), abs=1e-15)
        assert tfidf_weight(2, 1, 3) == pytest.approx(2.1972, abs=5e-5)
        assert tfidf_weight(7, 4, 4) == 0.0
        assert tfidf_weight(1, 2, 4) == pytest.approx(0.6931, abs=5e-5)

    @pytest.mark.parametrize("tf,df,n", [(1, 0, 3), (1, 4, 3), (0, 1, 3)])
    def test_contract(self, tf, df, n):
        with pytest.raises(ContractError):
            tfidf_weight(tf, df, n)

    @given(st.integers(1, 50), st.integers(1, 50), st.integers(1, 60))
    def test_monotone(self, tf, df, extra):
        n = df + extra
        assert tfidf_weight(tf + 1, df, n) >= tfidf_weight(tf, df, n)
        if df < n:
            assert tfidf_weight(tf, df, n) > tfidf_weight(tf, df + 1, n)


class TestVectorize:
    def test_single_component(self):
        v = build_vocabulary([doc("x", a=2), doc("y", a=1, b=1)])
        # a has df == n_docs, so its tf-idf weight is zero; raw mode keeps it
        assert vectorize_document(doc("q", a=2), v).is_empty
        vec = vectorize_document(doc("q", a=2), v, weighting="raw")
        assert vec.indices.tolist() == [0] and vec.weights.tolist() == [1.0]
        vec = vectorize_document(doc("q", b=3), v)
        assert vec.indices.tolist() == [1] and vec.weights.tolist() == [1.0]

    def test_oov_only(self):
        v = build_vocabulary([doc("x", a=2), doc("y", a=1, b=1)])
        assert vectorize_document(doc("q", zz=4), v).is_empty

    @pytest.mark.parametrize("seed", range(5))
    def test_against_brute_force(self, seed):
        rng = np.random.default_rng(100 + seed)
        docs = random_docs(rng, 20, 15)
        v = build_vocabulary(docs)
        raw = brute_force_weights(docs, normalize=False)
        unit = brute_force_weights(docs)
        for d in docs:
            if not d.radical_counts:
                continue
            for normalize, expected in ((False, raw), (True, unit)):
                vec = vectorize_document(d, v, normalize=normalize)
                got = {v.radicals[i]: w for i, w in zip(vec.indices, vec.weights)}
                assert got.keys() == expected[d.specialist_id].keys()
                for t, w in got.items():
                    assert abs(w - expected[d.specialist_id][t]) <= 1e-12
            if not vec.is_empty:
                assert abs(vec.norm() - 1.0) <= 1e-9
                assert np.all(np.diff(vec.indices) > 0) and np.all(vec.weights > 0)


class TestMatrix:
    def test_exclusion(self):
        docs = [doc("c", a=1, b=2), doc("a"), doc("b", a=3, c=1)]
        m = build_matrix(docs, build_vocabulary(docs))
        assert m.ids == ("b", "c") and m.excluded == ("a",)
        assert all(r.dim == m.dim == 3 for r in m.rows)

    def test_no_rows(self):
        docs = [doc("x", a=1), doc("y", a=1)]
        with pytest.raises(EmptyCorpusError):
            build_matrix(docs, build_vocabulary(docs))

    def test_order_invariant_bytes(self, tmp_path, rng):
        docs = random_docs(rng, 40, 25)
        outs = []
        for k, order in enumerate([docs, docs[::-1], [docs[i] for i in rng.permutation(len(docs))]]):
            v = build_vocabulary(order)
            write_vocabulary(v, tmp_path / f"v{k}.tsv")
            write_matrix(build_matrix(order, v), tmp_path / f"m{k}.tsv")
            outs.append(((tmp_path / f"v{k}.tsv").read_bytes(), (tmp_path / f"m{k}.tsv").read_bytes()))
        assert outs[0] == outs[1] == outs[2]

    def test_file_round_trip(self, tmp_path, sample):
        write_vocabulary(sample.vocab, tmp_path / "v.tsv")
        write_matrix(sample.matrix, tmp_path / "m.tsv")
        v2 = read_vocabulary(tmp_path / "v.tsv")
        m2 = read_matrix(tmp_path / "m.tsv")
        assert v2 == sample.vocab
        assert m2.ids == sample.matrix.ids and m2.dim == sample.matrix.dim
        assert all(a == b for a, b in zip(m2.rows, sample.matrix.rows))

    def test_sample_rows_unit_norm(self, sample):
        for r in sample.matrix.rows:
            assert abs(r.norm() - 1.0) <= 1e-9
