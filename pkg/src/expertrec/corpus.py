"""Curriculum records: line-delimited JSON ingestion, text gathering, counts.

Each input line is one specialist::

    {"id": "S1", "name": "...", "area": "Engenharias",
     "works": [{"kind": "journal_article", "title": "...",
                "keywords": ["..."], "year": 2015}]}
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from typing import IO, Iterable, Iterator

from .errors import DuplicateRecordError, MalformedRecordError

WORK_KINDS = (
    "conference_paper",
    "journal_article",
    "research_project",
    "extension_project",
)

# display labels for the stats table, in row order
KIND_LABELS = {
    "conference_paper": "Conference papers",
    "journal_article": "Journal articles",
    "research_project": "Research projects",
    "extension_project": "Extension projects",
}

YEAR_RANGE = (1900, 2100)

# Full-scale reference values (doctorate holders, Jan 2018 snapshot). Not
# reproducible here; kept for documentation and the stats table footer.
REFERENCE_RECORDS = 308_256
REFERENCE_RADICALS = 68_417
REFERENCE_TERM_USES = 193_440_564
REFERENCE_KIND_COUNTS = {
    "conference_paper": 12_456_432,
    "journal_article": 6_897_234,
    "research_project": 234_897,
    "extension_project": 198_345,
}


@dataclass(frozen=True)
class Work:
    kind: str
    title: str
    keywords: tuple[str, ...] = ()
    year: int | None = None

    def __post_init__(self):
        if self.kind not in WORK_KINDS:
            raise ValueError(f"unknown work kind {self.kind!r}")
        if self.year is not None and not (YEAR_RANGE[0] <= self.year <= YEAR_RANGE[1]):
            raise ValueError(f"year {self.year} outside {YEAR_RANGE}")


@dataclass(frozen=True)
class CurriculumRecord:
    specialist_id: str
    name: str = ""
    major_area: str = ""
    works: tuple[Work, ...] = ()

    def __post_init__(self):
        if not self.specialist_id:
            raise ValueError("specialist_id must be non-empty")


@dataclass(frozen=True)
class CorpusStats:
    kind_counts: dict[str, int] = field(default_factory=lambda: {k: 0 for k in WORK_KINDS})
    n_records: int = 0
    # filled in once the vocabulary is built
    n_terms: int = 0
    n_term_uses: int = 0


def _work_from_obj(obj, line_no: int) -> Work:
    if not isinstance(obj, dict):
        raise MalformedRecordError(line_no, "work must be an object")
    for key in ("kind", "title"):
        if key not in obj:
            raise MalformedRecordError(line_no, f"work missing {key!r}")
    kind, title = obj["kind"], obj["title"]
    if kind not in WORK_KINDS:
        raise MalformedRecordError(line_no, f"unknown work kind {kind!r}")
    if not isinstance(title, str):
        raise MalformedRecordError(line_no, "work title must be a string")
    keywords = obj.get("keywords", [])
    if not isinstance(keywords, list) or not all(isinstance(k, str) for k in keywords):
        raise MalformedRecordError(line_no, "keywords must be a list of strings")
    year = obj.get("year")
    if year is not None:
        if isinstance(year, bool) or not isinstance(year, int):
            raise MalformedRecordError(line_no, "year must be an integer")
        if not (YEAR_RANGE[0] <= year <= YEAR_RANGE[1]):
            raise MalformedRecordError(line_no, f"year {year} outside {YEAR_RANGE}")
    return Work(kind=kind, title=title, keywords=tuple(keywords), year=year)


def record_from_json(line: str, line_no: int = 0) -> CurriculumRecord:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise MalformedRecordError(line_no, f"invalid JSON ({exc.msg})") from None
    if not isinstance(obj, dict):
        raise MalformedRecordError(line_no, "record must be an object")
    sid = obj.get("id")
    if not isinstance(sid, str) or not sid:
        raise MalformedRecordError(line_no, "missing or empty 'id'")
    name = obj.get("name", "")
    area = obj.get("area", "")
    if not isinstance(name, str) or not isinstance(area, str):
        raise MalformedRecordError(line_no, "'name' and 'area' must be strings")
    works = obj.get("works", [])
    if not isinstance(works, list):
        raise MalformedRecordError(line_no, "'works' must be a list")
    return CurriculumRecord(
        specialist_id=sid,
        name=name,
        major_area=area,
        works=tuple(_work_from_obj(w, line_no) for w in works),
    )


def record_to_json(record: CurriculumRecord) -> str:
    works = []
    for w in record.works:
        obj = {"kind": w.kind, "title": w.title, "keywords": list(w.keywords)}
        if w.year is not None:
            obj["year"] = w.year
        works.append(obj)
    obj = {"id": record.specialist_id, "name": record.name,
           "area": record.major_area, "works": works}
    return json.dumps(obj, ensure_ascii=False)


def iter_records(lines: Iterable[str], areas: Iterable[str] | None = None) -> Iterator[CurriculumRecord]:
    """Stream records, checking id uniqueness (and area labels if given)."""
    allowed = set(areas) if areas is not None else None
    seen: set[str] = set()
    for line_no, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        rec = record_from_json(line, line_no)
        if rec.specialist_id in seen:
            raise DuplicateRecordError(rec.specialist_id, line_no)
        if allowed is not None and rec.major_area and rec.major_area not in allowed:
            raise MalformedRecordError(line_no, f"undeclared area {rec.major_area!r}")
        seen.add(rec.specialist_id)
        yield rec


def parse_records(stream: IO[str] | Iterable[str], areas: Iterable[str] | None = None) -> list[CurriculumRecord]:
    return list(iter_records(stream, areas))


def load_records(path, areas=None) -> list[CurriculumRecord]:
    with open(path, encoding="utf-8") as fh:
        return parse_records(fh, areas)


def serialize_records(records: Iterable[CurriculumRecord]) -> str:
    return "".join(record_to_json(r) + "\n" for r in records)


def save_records(records: Iterable[CurriculumRecord], path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(serialize_records(records))


def collect_texts(record: CurriculumRecord) -> list[tuple[str, str]]:
    """Every title and keyword of the record, tagged with its work kind."""
    out = []
    for w in record.works:
        out.append((w.title, w.kind))
        out.extend((kw, w.kind) for kw in w.keywords)
    return out


def corpus_stats(records: Iterable[CurriculumRecord]) -> CorpusStats:
    counts = Counter({k: 0 for k in WORK_KINDS})
    n = 0
    for rec in records:
        n += 1
        counts.update(w.kind for w in rec.works)
    return CorpusStats(kind_counts={k: counts[k] for k in WORK_KINDS}, n_records=n)


def format_stats(stats: CorpusStats, reference: bool = False) -> str:
    rows = [(KIND_LABELS[k], stats.kind_counts.get(k, 0)) for k in WORK_KINDS]
    rows += [
        ("Extracted radicals", stats.n_terms),
        ("Term utilizations", stats.n_term_uses),
        ("Records", stats.n_records),
    ]
    if reference:
        ref = [REFERENCE_KIND_COUNTS[k] for k in WORK_KINDS]
        ref += [REFERENCE_RADICALS, REFERENCE_TERM_USES, REFERENCE_RECORDS]
    width = max(len(label) for label, _ in rows)
    header = f"{'Data type':<{width}}  {'Count':>12}"
    if reference:
        header += f"  {'Reference':>14}"
    lines = [header, "-" * len(header)]
    for i, (label, value) in enumerate(rows):
        line = f"{label:<{width}}  {value:>12,}"
        if reference:
            line += f"  {ref[i]:>14,}"
        lines.append(line)
    return "\n".join(lines)
