"""Seeded synthetic curricula with a controlled radical vocabulary.

Pseudo-word roots are generated per area plus a shared pool; each root is
emitted under several Portuguese-looking suffixes that the pt stemmer folds
back to one radical, so the number of distinct radicals is known up front.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .corpus import CurriculumRecord, Work, load_records, save_records
from .textproc import LanguageTag, StopwordTable, stem

AREAS = (
    "Ciencias Exatas e da Terra",
    "Ciencias Biologicas",
    "Engenharias",
    "Ciencias Humanas",
    "Ciencias da Saude",
    "Ciencias Agrarias",
    "Ciencias Sociais Aplicadas",
    "Linguistica, Letras e Artes",
)
SUFFIXES = ("ia", "ico", "ica", "ismo", "ista", "os")
ACCENTED = {"a": "á", "e": "é", "i": "í", "o": "ó", "u": "ú"}
CONNECTORS = ("de", "da", "do", "em", "para", "com", "e", "no", "na", "sobre", "entre", "a", "o")
KIND_WEIGHTS = {
    "conference_paper": 0.50,
    "journal_article": 0.35,
    "research_project": 0.10,
    "extension_project": 0.05,
}
_CONSONANTS = "bcdfglmnprstv"
_VOWELS = "aeiou"

BUNDLED = {
    "sample": "sample_corpus.jsonl",
    "desk": "desk_corpus.jsonl",
    "disjoint": "disjoint_corpus.jsonl",
}


@dataclass(frozen=True)
class SynthConfig:
    n_specialists: int = 100
    n_areas: int = 4
    roots_per_area: int = 120
    shared_roots: int = 40
    niche_size: int = 25
    works: tuple[int, int] = (6, 14)
    words_per_title: tuple[int, int] = (3, 6)
    max_keywords: int = 3
    p_niche: float = 0.6
    p_area: float = 0.25  # remainder comes from the shared pool
    disjoint: bool = False
    private_roots: int = 6  # per specialist, disjoint mode only
    seed: int = 0


def _root_ok(root: str, radicals: set[str], stops: frozenset[str]) -> str | None:
    forms = {stem(root + s, LanguageTag.PT) for s in SUFFIXES}
    if len(forms) != 1:
        return None
    radical = forms.pop()
    if radical in radicals or radical in stops or len(radical) < 4:
        return None
    return radical


def make_roots(n: int, rng: np.random.Generator, taken: set[str]) -> list[str]:
    """``n`` fresh pseudo-word roots whose suffixed forms all stem alike."""
    stops = StopwordTable.default()[LanguageTag.PT]
    roots = []
    while len(roots) < n:
        n_syl = int(rng.integers(2, 4))
        root = "".join(_CONSONANTS[rng.integers(len(_CONSONANTS))] + _VOWELS[rng.integers(len(_VOWELS))]
                       for _ in range(n_syl))
        root += "rtnlmd"[rng.integers(6)]
        radical = _root_ok(root, taken, stops)
        if radical is None:
            continue
        taken.add(radical)
        roots.append(root)
    return roots


def _surface(root: str, rng: np.random.Generator) -> str:
    word = root + SUFFIXES[rng.integers(len(SUFFIXES))]
    if rng.random() < 0.2:
        vowels = [i for i, c in enumerate(word[:len(root)]) if c in ACCENTED]
        if vowels:
            i = vowels[rng.integers(len(vowels))]
            word = word[:i] + ACCENTED[word[i]] + word[i + 1:]
    if rng.random() < 0.15:
        word = word.capitalize()
    return word


def _title(words: list[str], rng: np.random.Generator) -> str:
    out = [words[0]]
    for w in words[1:]:
        out.append(CONNECTORS[rng.integers(len(CONNECTORS))])
        out.append(w)
    return " ".join(out)


def generate_corpus(config: SynthConfig = SynthConfig()) -> list[CurriculumRecord]:
    rng = np.random.default_rng(config.seed)
    areas = AREAS[: config.n_areas]
    taken: set[str] = set()
    kinds = list(KIND_WEIGHTS)
    kind_p = np.array(list(KIND_WEIGHTS.values()))
    if config.disjoint:
        area_pools = shared = None
    else:
        area_pools = [make_roots(config.roots_per_area, rng, taken) for _ in areas]
        shared = make_roots(config.shared_roots, rng, taken)

    records = []
    for i in range(config.n_specialists):
        a = i % len(areas)
        if config.disjoint:
            private = make_roots(config.private_roots, rng, taken)

            def draw():
                return private[rng.integers(len(private))]
        else:
            pool = area_pools[a]
            niche = [pool[j] for j in rng.choice(len(pool), size=min(config.niche_size, len(pool)), replace=False)]

            def draw():
                u = rng.random()
                src = niche if u < config.p_niche else pool if u < config.p_niche + config.p_area else shared
                return src[rng.integers(len(src))]

        works = []
        for _ in range(int(rng.integers(config.works[0], config.works[1] + 1))):
            kind = kinds[rng.choice(len(kinds), p=kind_p)]
            n_words = int(rng.integers(config.words_per_title[0], config.words_per_title[1] + 1))
            title = _title([_surface(draw(), rng) for _ in range(n_words)], rng)
            keywords = tuple(_surface(draw(), rng) for _ in range(int(rng.integers(0, config.max_keywords + 1))))
            year = int(rng.integers(1980, 2019)) if rng.random() < 0.9 else None
            works.append(Work(kind, title, keywords, year))
        records.append(CurriculumRecord(f"S{i + 1:04d}", f"Especialista {i + 1:04d}", areas[a], tuple(works)))
    return records


# configurations of the corpora shipped with the package
BUNDLED_CONFIGS = {
    "sample": SynthConfig(n_specialists=100, seed=11),
    "desk": SynthConfig(n_specialists=500, roots_per_area=450, shared_roots=200,
                        niche_size=40, works=(8, 16), seed=1),
    "disjoint": SynthConfig(n_specialists=60, disjoint=True, works=(3, 6), seed=5),
}


def bundled_path(name: str) -> Path:
    if name not in BUNDLED:
        raise KeyError(f"no bundled corpus {name!r}; choose from {sorted(BUNDLED)}")
    return Path(str(resources.files("expertrec").joinpath("data").joinpath(BUNDLED[name])))


def load_bundled(name: str) -> list[CurriculumRecord]:
    return load_records(bundled_path(name))


def write_bundled(out_dir: Path | None = None) -> dict[str, Path]:
    written = {}
    for name, cfg in BUNDLED_CONFIGS.items():
        path = (out_dir / BUNDLED[name]) if out_dir else bundled_path(name)
        save_records(generate_corpus(cfg), path)
        written[name] = path
    return written
