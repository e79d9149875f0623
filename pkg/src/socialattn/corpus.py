"""Article and journal records: parsing, validation, indexing and filtering.

Input files are UTF-8 comma-delimited exports with a header row. Articles use
the canonical columns in ``ARTICLE_COLUMNS``; third-party headers are adapted
with a ``canonical=source`` mapping file.
"""
from __future__ import annotations

import csv
import io
import math
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import IO, Iterable, Mapping, Optional, Sequence, Union

ARTICLE_COLUMNS = (
    "article_id",
    "journal_id",
    "pub_year",
    "n_authors",
    "open_access",
    "funded",
    "citations",
    "attention",
)
JOURNAL_COLUMNS = (
    "journal_id",
    "name",
    "n_articles_2020",
    "jif",
    "jif_percentile",
    "jif_quartile",
    "jif_5yr",
)
# Optional trailing column carrying a reported indicator value (as in the bundled journal table).
JOURNAL_ATTENTION_COLUMN = "social_attention_2021"

DEFAULT_YEARS = (2012, 2021)
QUARTILES = ("Q1", "Q2", "Q3", "Q4")
# Nominal lower percentile bound of each quartile band.
_QUARTILE_FLOOR = {"Q1": 75.0, "Q2": 50.0, "Q3": 25.0, "Q4": 0.0}
BOUNDARY_MARGIN = 1.5

_TRUE = {"1", "true"}
_FALSE = {"0", "false"}

Source = Union[str, Path, IO[str]]


class CorpusError(ValueError):
    """Fatal problem with an input file (bad schema, empty stream, duplicates)."""


class SchemaError(CorpusError):
    pass


@dataclass(frozen=True, slots=True)
class ArticleRecord:
    article_id: str
    journal_id: str
    pub_year: int
    n_authors: int
    open_access: bool
    funded: bool
    citations: int
    # Integer for parsed data; synthetic corpora may carry real-valued scores.
    attention: float


@dataclass(frozen=True, slots=True)
class JournalRecord:
    journal_id: str
    name: str
    n_articles_2020: int
    jif: float
    jif_5yr: float
    jif_percentile: float
    jif_quartile: str
    reported_attention: Optional[float] = None


@dataclass
class ValidationReport:
    errors: list[tuple[int, str, str]] = field(default_factory=list)
    warnings: list[tuple[int, str, str]] = field(default_factory=list)
    read: int = 0
    accepted: int = 0
    rejected: int = 0

    @property
    def ok(self) -> bool:
        return not self.errors

    def error(self, row: int, column: str, message: str) -> None:
        self.errors.append((row, column, message))

    def warn(self, row: int, column: str, message: str) -> None:
        self.warnings.append((row, column, message))

    def messages(self) -> list[str]:
        out = [f"error row {r} [{c}]: {m}" for r, c, m in self.errors]
        out += [f"warning row {r} [{c}]: {m}" for r, c, m in self.warnings]
        return out


class Corpus:
    """Immutable collection of articles and journals with a (journal, year) index.

    The index is built once at construction; nothing is mutated afterwards,
    so a corpus can be shared freely between threads.
    """

    __slots__ = ("_articles", "_journals", "_index")

    def __init__(
        self,
        articles: Iterable[ArticleRecord],
        journals: Iterable[JournalRecord] = (),
    ) -> None:
        self._articles = tuple(articles)
        self._journals = {j.journal_id: j for j in journals}
        index: dict[tuple[str, int], list[ArticleRecord]] = {}
        for art in self._articles:
            index.setdefault((art.journal_id, art.pub_year), []).append(art)
        self._index = {k: tuple(v) for k, v in index.items()}

    @property
    def articles(self) -> tuple[ArticleRecord, ...]:
        return self._articles

    @property
    def journals(self) -> Mapping[str, JournalRecord]:
        return dict(self._journals)

    @property
    def index(self) -> Mapping[tuple[str, int], tuple[ArticleRecord, ...]]:
        return dict(self._index)

    def journal(self, journal_id: str) -> Optional[JournalRecord]:
        return self._journals.get(journal_id)

    def articles_in(self, journal_id: str, year: int) -> tuple[ArticleRecord, ...]:
        return self._index.get((journal_id, year), ())

    def journal_ids(self) -> list[str]:
        """Ids of journals that have articles or a journal record, sorted."""
        ids = {a.journal_id for a in self._articles} | set(self._journals)
        return sorted(ids)

    def years(self) -> list[int]:
        return sorted({a.pub_year for a in self._articles})

    def __len__(self) -> int:
        return len(self._articles)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Corpus):
            return NotImplemented
        return self._articles == other._articles and self._journals == other._journals

    def __repr__(self) -> str:
        return f"Corpus({len(self._articles)} articles, {len(self._journals)} journals)"


# -- parsing ---------------------------------------------------------------


def read_mapping(source: Source) -> dict[str, str]:
    """Read a ``canonical_name=source_header`` mapping file.

    Blank lines and ``#`` comments are ignored. Unknown canonical names are
    rejected so that typos don't silently fall back to identity mapping.
    """
    text = _read_text(source)
    mapping: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise SchemaError(f"mapping line {lineno}: expected canonical=source, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in ARTICLE_COLUMNS:
            raise SchemaError(f"mapping line {lineno}: unknown canonical column {key!r}")
        mapping[key] = value
    return mapping


def parse_articles(
    stream: Source,
    mapping: Optional[Mapping[str, str]] = None,
    years: Optional[tuple[int, int]] = DEFAULT_YEARS,
) -> tuple[list[ArticleRecord], ValidationReport]:
    """Parse article rows from a delimited export.

    Parameters
    ----------
    stream : path or text stream
        UTF-8 comma-delimited text with a header row.
    mapping : dict, optional
        Canonical column name -> header used in the file. Missing keys map
        to themselves.
    years : (first, last), optional
        Inclusive accepted publication-year range; ``None`` disables the check.

    Returns
    -------
    records, report
        Accepted records in input order, and a report listing every rejected
        row (1-based data row numbers) with its reason.

    Raises
    ------
    SchemaError
        If the stream is empty or a mapped column is absent from the header.
    """
    mapping = dict(mapping or {})
    header, rows = _read_rows(stream)
    columns = {}
    for name in ARTICLE_COLUMNS:
        src = mapping.get(name, name)
        if src not in header:
            raise SchemaError(f"missing column {src!r} (canonical {name!r})")
        columns[name] = header.index(src)

    report = ValidationReport()
    records: list[ArticleRecord] = []
    seen: set[str] = set()
    for rowno, row in enumerate(rows, start=1):
        report.read += 1
        cells = {name: _cell(row, idx) for name, idx in columns.items()}
        rec = _article_from_cells(rowno, cells, report, years)
        if rec is not None and rec.article_id in seen:
            report.error(rowno, "article_id", f"duplicate id {rec.article_id!r}")
            rec = None
        if rec is None:
            report.rejected += 1
            continue
        seen.add(rec.article_id)
        records.append(rec)
        report.accepted += 1
    return records, report


def _article_from_cells(
    rowno: int,
    cells: Mapping[str, str],
    report: ValidationReport,
    years: Optional[tuple[int, int]],
) -> Optional[ArticleRecord]:
    n_errors = len(report.errors)
    article_id = cells["article_id"]
    journal_id = cells["journal_id"]
    if not article_id:
        report.error(rowno, "article_id", "article_id is empty")
    if not journal_id:
        report.error(rowno, "journal_id", "journal_id is empty")

    pub_year = _parse_int(rowno, "pub_year", cells["pub_year"], report)
    n_authors = _parse_int(rowno, "n_authors", cells["n_authors"], report)
    citations = _parse_int(rowno, "citations", cells["citations"], report)
    open_access = _parse_bool(rowno, "open_access", cells["open_access"], report)
    funded = _parse_bool(rowno, "funded", cells["funded"], report)

    raw_attention = cells["attention"]
    attention: Optional[float]
    if raw_attention == "":
        report.warn(rowno, "attention", "blank attention treated as 0")
        attention = 0
    else:
        attention = _parse_score(rowno, raw_attention, report)

    if n_authors is not None and n_authors < 1:
        report.error(rowno, "n_authors", "n_authors must be ≥ 1")
    if citations is not None and citations < 0:
        report.error(rowno, "citations", "citations must be ≥ 0")
    if attention is not None and attention < 0:
        report.error(rowno, "attention", "attention must be ≥ 0")
    if pub_year is not None and years is not None and not years[0] <= pub_year <= years[1]:
        report.error(rowno, "pub_year", f"pub_year {pub_year} outside {years[0]}-{years[1]}")

    if len(report.errors) > n_errors:
        return None
    return ArticleRecord(
        article_id, journal_id, pub_year, n_authors, open_access, funded, citations, attention
    )


def parse_journals(stream: Source) -> tuple[list[JournalRecord], ValidationReport]:
    """Parse journal rows (JIF metrics, percentile, quartile).

    Rows with an out-of-range percentile or unparseable number are rejected.
    Quartile labels that sit oddly against the printed percentile only raise
    warnings, since JCR assigns quartiles by rank.
    """
    header, rows = _read_rows(stream)
    missing = [c for c in JOURNAL_COLUMNS if c not in header]
    if missing:
        raise SchemaError(f"missing journal columns: {', '.join(missing)}")
    pos = {c: header.index(c) for c in JOURNAL_COLUMNS}
    att_pos = header.index(JOURNAL_ATTENTION_COLUMN) if JOURNAL_ATTENTION_COLUMN in header else None

    report = ValidationReport()
    records: list[JournalRecord] = []
    seen: set[str] = set()
    for rowno, row in enumerate(rows, start=1):
        report.read += 1
        n_errors = len(report.errors)
        cells = {c: _cell(row, i) for c, i in pos.items()}
        jid = cells["journal_id"]
        if not jid:
            report.error(rowno, "journal_id", "journal_id is empty")
        elif jid in seen:
            raise CorpusError(f"duplicate journal_id {jid!r} at row {rowno}")
        n_art = _parse_int(rowno, "n_articles_2020", cells["n_articles_2020"], report)
        jif = _parse_real(rowno, "jif", cells["jif"], report)
        jif5 = _parse_real(rowno, "jif_5yr", cells["jif_5yr"], report)
        pct = _parse_real(rowno, "jif_percentile", cells["jif_percentile"], report)
        quartile = cells["jif_quartile"].upper()
        if quartile not in QUARTILES:
            report.error(rowno, "jif_quartile", f"unknown quartile {cells['jif_quartile']!r}")
        for name, value in (("n_articles_2020", n_art), ("jif", jif), ("jif_5yr", jif5)):
            if value is not None and value < 0:
                report.error(rowno, name, f"{name} must be ≥ 0")
        if pct is not None and not 0.0 <= pct <= 100.0:
            report.error(rowno, "jif_percentile", f"percentile {pct} outside [0, 100]")
        reported = None
        if att_pos is not None and _cell(row, att_pos) != "":
            reported = _parse_real(rowno, JOURNAL_ATTENTION_COLUMN, _cell(row, att_pos), report)

        if len(report.errors) > n_errors:
            report.rejected += 1
            continue
        note = quartile_consistency(pct, quartile)
        if note:
            report.warn(rowno, "jif_quartile", note)
        seen.add(jid)
        records.append(
            JournalRecord(jid, cells["name"] or jid, n_art, jif, jif5, pct, quartile, reported)
        )
        report.accepted += 1
    return records, report


def nominal_quartile(percentile: float) -> str:
    """Quartile implied by thresholding a percentile at 25/50/75 (top band is Q1)."""
    if percentile > 75.0:
        return "Q1"
    if percentile > 50.0:
        return "Q2"
    if percentile > 25.0:
        return "Q3"
    return "Q4"


def quartile_consistency(percentile: float, quartile: str) -> Optional[str]:
    """Return a warning message if the label and percentile look inconsistent."""
    nominal = nominal_quartile(percentile)
    bands = abs(QUARTILES.index(nominal) - QUARTILES.index(quartile))
    if bands > 1:
        return f"quartile {quartile} disagrees with percentile {percentile:g} by {bands} bands"
    near = min(abs(percentile - b) for b in (25.0, 50.0, 75.0))
    if near <= BOUNDARY_MARGIN:
        return f"percentile {percentile:g} within {BOUNDARY_MARGIN} of a quartile boundary (labelled {quartile})"
    if bands == 1:
        return f"quartile {quartile} is one band from nominal {nominal} for percentile {percentile:g}"
    return None


def load_journal_fixture() -> tuple[list[JournalRecord], ValidationReport]:
    """Journal-level table for 76 library and information science journals (JCR 2020)."""
    ref = resources.files("socialattn") / "data" / "journals_2020.csv"
    with ref.open("r", encoding="utf-8", newline="") as fh:
        return parse_journals(fh)


# -- corpus-level checks ---------------------------------------------------


def validate_corpus(corpus: Corpus, years: Optional[tuple[int, int]] = DEFAULT_YEARS) -> ValidationReport:
    """Report unresolved journals, duplicate article ids and out-of-range years.

    Row numbers refer to positions (1-based) in ``corpus.articles``. The
    corpus is never modified.
    """
    report = ValidationReport()
    counts = Counter(a.article_id for a in corpus.articles)
    first_seen: set[str] = set()
    for rowno, art in enumerate(corpus.articles, start=1):
        report.read += 1
        bad = False
        if corpus.journal(art.journal_id) is None:
            report.warn(rowno, "journal_id", f"unresolved journal {art.journal_id!r}")
        if counts[art.article_id] > 1:
            if art.article_id in first_seen:
                report.error(rowno, "article_id", f"duplicate id {art.article_id!r}")
                bad = True
            first_seen.add(art.article_id)
        if years is not None and not years[0] <= art.pub_year <= years[1]:
            report.error(rowno, "pub_year", f"pub_year {art.pub_year} outside {years[0]}-{years[1]}")
            bad = True
        if bad:
            report.rejected += 1
        else:
            report.accepted += 1
    return report


def filter_corpus(
    corpus: Corpus,
    years: tuple[int, int],
    journals: Optional[Iterable[str]] = None,
) -> Corpus:
    """Restrict a corpus to an inclusive year range and optionally a journal set.

    The journal list keeps journals that still have articles plus any
    explicitly requested ones that have a record.
    """
    first, last = years
    if first > last:
        raise ValueError(f"inverted year range {first}-{last}")
    wanted = None if journals is None else set(journals)
    kept = [
        a
        for a in corpus.articles
        if first <= a.pub_year <= last and (wanted is None or a.journal_id in wanted)
    ]
    keep_ids = {a.journal_id for a in kept} | (wanted or set())
    kept_journals = [j for jid, j in corpus.journals.items() if jid in keep_ids]
    return Corpus(kept, kept_journals)


# -- export ----------------------------------------------------------------


def _format_number(value: float) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, int):
        return str(value)
    if float(value).is_integer():
        return str(int(value))
    return repr(float(value))


def write_articles(articles: Iterable[ArticleRecord], stream: IO[str]) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(ARTICLE_COLUMNS)
    for a in articles:
        writer.writerow(
            [
                a.article_id,
                a.journal_id,
                a.pub_year,
                a.n_authors,
                _format_number(a.open_access),
                _format_number(a.funded),
                a.citations,
                _format_number(a.attention),
            ]
        )


def write_journals(journals: Iterable[JournalRecord], stream: IO[str]) -> None:
    journals = list(journals)
    with_attention = any(j.reported_attention is not None for j in journals)
    writer = csv.writer(stream, lineterminator="\n")
    header = list(JOURNAL_COLUMNS) + ([JOURNAL_ATTENTION_COLUMN] if with_attention else [])
    writer.writerow(header)
    for j in journals:
        row = [
            j.journal_id,
            j.name,
            j.n_articles_2020,
            repr(j.jif),
            repr(j.jif_percentile),
            j.jif_quartile,
            repr(j.jif_5yr),
        ]
        if with_attention:
            row.append("" if j.reported_attention is None else repr(j.reported_attention))
        writer.writerow(row)


def export_corpus(corpus: Corpus, articles_path: Union[str, Path], journals_path: Union[str, Path, None] = None) -> None:
    with open(articles_path, "w", encoding="utf-8", newline="") as fh:
        write_articles(corpus.articles, fh)
    if journals_path is not None:
        with open(journals_path, "w", encoding="utf-8", newline="") as fh:
            write_journals(corpus.journals.values(), fh)


def load_corpus(
    articles: Source,
    journals: Optional[Source] = None,
    mapping: Optional[Mapping[str, str]] = None,
    years: Optional[tuple[int, int]] = DEFAULT_YEARS,
) -> tuple[Corpus, ValidationReport]:
    """Parse both files and assemble a corpus; reports are merged."""
    arts, report = parse_articles(articles, mapping, years)
    jrecs: Sequence[JournalRecord] = ()
    if journals is not None:
        jrecs, jreport = parse_journals(journals)
        report.errors += [(r, f"journals:{c}", m) for r, c, m in jreport.errors]
        report.warnings += [(r, f"journals:{c}", m) for r, c, m in jreport.warnings]
    return Corpus(arts, jrecs), report


# -- low-level helpers -----------------------------------------------------


def _read_text(source: Source) -> str:
    if isinstance(source, (str, Path)):
        return Path(source).read_text(encoding="utf-8")
    return source.read()


def _read_rows(source: Source) -> tuple[list[str], list[list[str]]]:
    text = _read_text(source)
    if text.startswith("﻿"):
        text = text[1:]
    rows = [r for r in csv.reader(io.StringIO(text)) if r and any(c.strip() for c in r)]
    if not rows:
        raise SchemaError("empty input: no header row")
    header = [h.strip() for h in rows[0]]
    return header, rows[1:]


def _cell(row: Sequence[str], idx: int) -> str:
    return row[idx].strip() if idx < len(row) else ""


def _parse_int(rowno: int, column: str, text: str, report: ValidationReport) -> Optional[int]:
    try:
        return int(text)
    except ValueError:
        report.error(rowno, column, f"cannot parse integer from {text!r}")
        return None


def _parse_real(rowno: int, column: str, text: str, report: ValidationReport) -> Optional[float]:
    try:
        value = float(text)
    except ValueError:
        value = math.nan
    if not math.isfinite(value):
        report.error(rowno, column, f"cannot parse number from {text!r}")
        return None
    return value


def _parse_bool(rowno: int, column: str, text: str, report: ValidationReport) -> Optional[bool]:
    low = text.lower()
    if low in _TRUE:
        return True
    if low in _FALSE:
        return False
    report.error(rowno, column, f"cannot parse boolean from {text!r}")
    return None


def _parse_score(rowno: int, text: str, report: ValidationReport) -> Optional[float]:
    try:
        return int(text)
    except ValueError:
        pass
    value = _parse_real(rowno, "attention", text, report)
    if value is not None:
        if value.is_integer():
            return int(value)
        report.warn(rowno, "attention", f"non-integer attention {text!r} kept as real")
    return value
