from collections import Counter

import pytest
from hypothesis import given, strategies as st

from expertrec.errors import ConfigurationError
from expertrec.textproc import (LanguageTag, StemRule, StemRuleSet, StopwordTable, detect_language,
                                fold, normalize, parse_rules, process, remove_stopwords, stem)

PT, EN, ES, UNK = LanguageTag.PT, LanguageTag.EN, LanguageTag.ES, LanguageTag.UNKNOWN


class TestDetect:
    def test_portuguese(self):
        assert detect_language("o impacto da bibliometria em redes no brasil") is PT

    def test_english(self):
        assert detect_language("the analysis of the networks in the system") is EN

    def test_spanish(self):
        assert detect_language("el análisis de las redes y los sistemas") is ES

    def test_empty_and_content_only(self):
        assert detect_language("") is UNK
        assert detect_language("bibliometria cientometria") is UNK
        assert detect_language("2018 1999") is UNK

    def test_tie_prefers_portuguese(self):
        # "de" is a stopword in both pt and es
        assert detect_language("de xyzw") is PT


class TestNormalize:
    def test_examples(self):
        assert normalize("Análise Bibliométrica") == ["analise", "bibliometrica"]
        assert normalize("TF-IDF 2018") == ["tf", "idf"]
        assert normalize("a") == []

    def test_fold(self):
        assert fold("Ação Científica ÇÃ") == "acao cientifica ca"

    @given(st.text())
    def test_idempotent(self, text):
        once = normalize(text)
        assert normalize(" ".join(once)) == once

    @given(st.text())
    def test_token_filters(self, text):
        for tok in normalize(text):
            assert len(tok) >= 2 and not tok.isdigit() and tok == tok.lower()


class TestStopwords:
    def test_listed_examples_in_pt(self):
        table = StopwordTable.default()
        assert {"como", "o", "a", "em", "no"} <= table[PT]

    def test_examples(self):
        assert remove_stopwords(["o", "impacto", "em", "redes"], PT) == ["impacto", "redes"]
        assert remove_stopwords(["network", "of", "things"], EN) == ["network", "things"]
        assert remove_stopwords([], PT) == []

    def test_unknown_uses_pt(self):
        assert remove_stopwords(["o", "the", "impacto"], UNK) == ["the", "impacto"]

    @given(st.lists(st.sampled_from(["o", "em", "redes", "impacto", "de", "the", "x1"])),
           st.sampled_from([PT, EN, ES, UNK]))
    def test_order_preserving_and_idempotent(self, tokens, lang):
        out = remove_stopwords(tokens, lang)
        it = iter(tokens)
        assert all(any(t == u for u in it) for t in out)  # subsequence
        assert remove_stopwords(out, lang) == out

    def test_tables_must_be_normalized(self):
        with pytest.raises(ConfigurationError):
            StopwordTable({PT: frozenset({"Ação"}), EN: frozenset({"the"}), ES: frozenset({"el"})})
        with pytest.raises(ConfigurationError):
            StopwordTable({PT: frozenset(), EN: frozenset({"the"}), ES: frozenset({"el"})})

    def test_from_files(self, tmp_path):
        paths = {}
        for lang, words in (("pt", "de\nxyz\n"), ("en", "# comment\nthe\n"), ("es", "el\n")):
            p = tmp_path / f"{lang}.txt"
            p.write_text(words, encoding="utf-8")
            paths[lang] = p
        table = StopwordTable.from_files(paths)
        assert table[PT] == {"de", "xyz"} and table[EN] == {"the"}


class TestStem:
    def test_conflation_pair(self):
        assert stem("bibliometria", PT) == "bibliometr"
        assert stem("bibliometrico", PT) == "bibliometr"
        assert stem(fold("bibliométrico"), PT) == "bibliometr"

    def test_english_plural(self):
        assert stem("networks", EN) == "network"
        assert stem("classes", EN) == "class"

    @pytest.mark.parametrize("word,radical", [
        ("redes", "red"), ("colaboracao", "colabor"), ("analise", "analis"),
        ("sistemas", "sistem"), ("bibliometrica", "bibliometr"),
    ])
    def test_portuguese_samples(self, word, radical):
        assert stem(word, PT) == radical

    def test_unknown_uses_pt_rules(self):
        assert stem("bibliometria", UNK) == "bibliometr"

    @given(st.text(st.characters(min_codepoint=97, max_codepoint=122), min_size=1, max_size=20),
           st.sampled_from([PT, EN, ES, UNK]))
    def test_never_lengthens_never_empties(self, token, lang):
        out = stem(token, lang)
        assert 0 < len(out) <= len(token)
        assert stem(token, lang) == out

    def test_rule_file_format(self, tmp_path):
        p = tmp_path / "rules.txt"
        p.write_text("[plural]\nes\t2\t\ns\t2\t\n[tail:else]\ninho\t3\t\n", encoding="utf-8")
        steps = parse_rules(p.read_text(encoding="utf-8"))
        assert [s.name for s in steps] == ["plural", "tail"]
        assert steps[1].only_if_unchanged
        rules = StemRuleSet.from_files({"pt": p, "en": p, "es": p})
        assert stem("gatinhos", PT, rules) == "gatinho"   # plural fired, tail skipped
        assert stem("gatinho", PT, rules) == "gat"

    def test_lengthening_rule_rejected(self):
        with pytest.raises(ConfigurationError):
            StemRule("a", 1, "abc")
        with pytest.raises(ConfigurationError):
            parse_rules("x\ty\tz\n")


class TestProcess:
    def test_hand_traced(self):
        # normalize -> [bibliometria, bibliometrica] ("a", "e" too short);
        # detection sees a, e, a as pt stopwords (3/5); both stems -> bibliometr
        assert process("A Bibliometria e a bibliométrica") == Counter({"bibliometr": 2})

    def test_empty(self):
        assert process("") == Counter()

    def test_only_stopwords(self):
        assert process("em no como") == Counter()

    @given(st.text(max_size=80))
    def test_composition_and_no_stopwords(self, text):
        table = StopwordTable.default()
        lang = detect_language(text)
        expected = Counter(stem(t, lang) for t in remove_stopwords(normalize(text), lang))
        out = process(text)
        assert not set(out) & table[lang]
        # only radicals colliding with stopwords may be dropped
        assert out == Counter({r: c for r, c in expected.items() if r not in table[lang]})

    @given(st.lists(st.sampled_from(["o", "de", "bibliometria", "redes", "analise", "the", "sistema"]),
                    max_size=12))
    def test_no_stopword_in_output(self, words):
        text = " ".join(words)
        assert not set(process(text)) & StopwordTable.default()[detect_language(text)]
