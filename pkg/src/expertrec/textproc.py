"""Text treatment: language id, lowercasing/folding, stopwords, stemming.

Titles and keywords become multisets of radicals::

    >>> process("A Bibliometria e a bibliométrica")
    Counter({'bibliometr': 2})
"""

from __future__ import annotations

import re
import unicodedata
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .errors import ConfigurationError


class LanguageTag(str, Enum):
    PT = "pt"
    EN = "en"
    ES = "es"
    UNKNOWN = "unknown"


LANGUAGES = (LanguageTag.PT, LanguageTag.EN, LanguageTag.ES)  # also the tie-break order
DETECTION_THRESHOLD = 0.15
MIN_TOKEN_LEN = 2

_WORD_RE = re.compile(r"[^\W_]+")


def fold(text: str) -> str:
    """Lowercase and strip diacritics (é -> e, ç -> c)."""
    out = text
    # two passes: lowercasing can expose new decomposable characters
    for _ in range(2):
        decomposed = unicodedata.normalize("NFKD", out.lower())
        out = "".join(ch for ch in decomposed if not unicodedata.combining(ch))
    return out


def _words(text: str) -> list[str]:
    return _WORD_RE.findall(fold(text))


def normalize(text: str) -> list[str]:
    return [t for t in _words(text) if len(t) >= MIN_TOKEN_LEN and not t.isdigit()]


# -- tables -----------------------------------------------------------------


def _resolve(lang) -> LanguageTag:
    lang = LanguageTag(lang)
    return LanguageTag.PT if lang is LanguageTag.UNKNOWN else lang


@dataclass(frozen=True)
class StopwordTable:
    words: Mapping[LanguageTag, frozenset[str]]

    def __post_init__(self):
        for lang in LANGUAGES:
            entries = self.words.get(lang)
            if not entries:
                raise ConfigurationError(f"stopword set for {lang.value} is empty")
            for w in entries:
                if _words(w) != [w]:
                    raise ConfigurationError(f"stopword {w!r} ({lang.value}) is not normalized")

    def __getitem__(self, lang) -> frozenset[str]:
        return self.words[_resolve(lang)]

    @classmethod
    def from_files(cls, paths: Mapping[str, str | Path]) -> "StopwordTable":
        words = {LanguageTag(k): frozenset(_read_list(Path(p).read_text(encoding="utf-8")))
                 for k, p in paths.items()}
        return cls(words)

    @classmethod
    def default(cls) -> "StopwordTable":
        return _default_stopwords()


def _read_list(text: str) -> list[str]:
    out = []
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            out.append(line)
    return out


@dataclass(frozen=True)
class StemRule:
    suffix: str
    min_stem: int
    replacement: str = ""

    def __post_init__(self):
        if not self.suffix:
            raise ConfigurationError("empty suffix in stem rule")
        if len(self.replacement) > len(self.suffix):
            raise ConfigurationError(f"rule {self.suffix!r} -> {self.replacement!r} lengthens tokens")
        if self.min_stem < 0:
            raise ConfigurationError("negative minimum stem length")


@dataclass(frozen=True)
class StemStep:
    name: str
    rules: tuple[StemRule, ...]
    only_if_unchanged: bool = False


@dataclass(frozen=True)
class StemRuleSet:
    steps: Mapping[LanguageTag, tuple[StemStep, ...]]

    def __getitem__(self, lang) -> tuple[StemStep, ...]:
        return self.steps[_resolve(lang)]

    @classmethod
    def from_files(cls, paths: Mapping[str, str | Path]) -> "StemRuleSet":
        return cls({LanguageTag(k): parse_rules(Path(p).read_text(encoding="utf-8"))
                    for k, p in paths.items()})

    @classmethod
    def default(cls) -> "StemRuleSet":
        return _default_rules()


def parse_rules(text: str) -> tuple[StemStep, ...]:
    """Parse ``suffix<TAB>min_stem_len<TAB>replacement`` lines grouped under
    ``[step]`` / ``[step:else]`` headers (a leading headerless block is one step)."""
    steps: list[StemStep] = []
    name, cond, rules = "rules", False, []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip("\r\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        if line.startswith("["):
            if rules:
                steps.append(StemStep(name, tuple(rules), cond))
            head = line.strip()[1:-1]
            name, _, flag = head.partition(":")
            cond, rules = flag == "else", []
            continue
        parts = line.split("\t")
        if len(parts) == 2:
            parts.append("")
        if len(parts) != 3:
            raise ConfigurationError(f"rule line {line_no}: expected 3 tab-separated fields")
        try:
            rules.append(StemRule(parts[0], int(parts[1]), parts[2]))
        except ValueError as exc:
            raise ConfigurationError(f"rule line {line_no}: {exc}") from None
    if rules:
        steps.append(StemStep(name, tuple(rules), cond))
    return tuple(steps)


def _data_text(name: str) -> str:
    return resources.files("expertrec").joinpath("data", name).read_text(encoding="utf-8")


@lru_cache(maxsize=None)
def _default_stopwords() -> StopwordTable:
    return StopwordTable({lang: frozenset(_read_list(_data_text(f"stopwords_{lang.value}.txt")))
                          for lang in LANGUAGES})


@lru_cache(maxsize=None)
def _default_rules() -> StemRuleSet:
    return StemRuleSet({lang: parse_rules(_data_text(f"stem_{lang.value}.txt"))
                        for lang in LANGUAGES})


# -- operations ---------------------------------------------------------------


def detect_language(text: str, table: StopwordTable | None = None) -> LanguageTag:
    """Pick the language whose stopwords cover the largest share of tokens.

    Single-letter words count here (they are strong cues: "o", "a", "y")
    even though normalize() drops them.
    """
    table = table or StopwordTable.default()
    tokens = [t for t in _words(text) if not t.isdigit()]
    if not tokens:
        return LanguageTag.UNKNOWN
    best, best_score = LanguageTag.UNKNOWN, 0.0
    for lang in LANGUAGES:
        stops = table[lang]
        score = sum(t in stops for t in tokens) / len(tokens)
        if score > best_score:
            best, best_score = lang, score
    return best if best_score >= DETECTION_THRESHOLD else LanguageTag.UNKNOWN


def remove_stopwords(tokens: Sequence[str], lang, table: StopwordTable | None = None) -> list[str]:
    stops = (table or StopwordTable.default())[lang]
    return [t for t in tokens if t not in stops]


def _apply_step(token: str, step: StemStep) -> str | None:
    for rule in step.rules:
        if token.endswith(rule.suffix):
            stem_len = len(token) - len(rule.suffix)
            if stem_len < rule.min_stem:
                continue
            out = token[:stem_len] + rule.replacement
            if out:
                return out
    return None


def stem(token: str, lang, rules: StemRuleSet | None = None) -> str:
    rules = rules or StemRuleSet.default()
    fired = False
    for step in rules[lang]:
        if step.only_if_unchanged and fired:
            continue
        out = _apply_step(token, step)
        if not step.only_if_unchanged:
            fired = out is not None
        elif out is not None:
            fired = True
        if out is not None:
            token = out
    return token


def process(text: str, table: StopwordTable | None = None,
            rules: StemRuleSet | None = None) -> Counter:
    """Radical multiset of one text.

    Radicals that themselves coincide with a stopword of the detected
    language are dropped as well.
    """
    table = table or StopwordTable.default()
    lang = detect_language(text, table)
    stops = table[lang]
    radicals = (stem(t, lang, rules) for t in remove_stopwords(normalize(text), lang, table))
    return Counter(r for r in radicals if r not in stops)


def process_many(texts: Iterable[str], table: StopwordTable | None = None,
                 rules: StemRuleSet | None = None) -> Counter:
    total: Counter = Counter()
    for text in texts:
        total.update(process(text, table, rules))
    return total
