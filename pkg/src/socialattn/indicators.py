"""Journal social attention indicator, per-year descriptives and quartile groups."""
from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Iterable, Mapping, Optional, Sequence

from .corpus import QUARTILES, ArticleRecord, Corpus, JournalRecord
from .stats import BoxSummary, box_summary, mean

DEFAULT_WINDOW = 3


class NoArticlesInWindow(LookupError):
    """The journal published nothing in the requested window."""


@dataclass(frozen=True)
class JournalAttention:
    journal_id: str
    edition_year: int
    window: int
    n_articles: int
    total_attention: float
    value: float

    @property
    def first_year(self) -> int:
        return self.edition_year - self.window + 1


@dataclass(frozen=True)
class YearDescriptives:
    """One row of the article-level descriptive table.

    ``pub_year`` and ``years_since_pub`` are ``None`` on the aggregate row.
    """

    pub_year: Optional[int]
    years_since_pub: Optional[int]
    n_articles: int
    mean_authors: float
    pct_oa: float
    pct_funded: float
    mean_citations: float
    mean_attention: float
    marginal_variation: Optional[float] = None

    @property
    def is_total(self) -> bool:
        return self.pub_year is None


@dataclass(frozen=True)
class QuartileGroup:
    quartile: str
    journal_ids: tuple[str, ...]
    values: tuple[float, ...]
    summary: BoxSummary

    @property
    def mean(self) -> float:
        return self.summary.mean


def _total(scores: Iterable[float]) -> float:
    # Exact for integer scores; correctly rounded (order independent) for reals.
    scores = list(scores)
    if all(isinstance(s, int) for s in scores):
        return sum(scores)
    return math.fsum(scores)


def journal_social_attention(
    corpus: Corpus,
    journal_id: str,
    edition_year: int,
    window: int = DEFAULT_WINDOW,
) -> JournalAttention:
    """Mean attention per article over the ``window`` publication years ending at ``edition_year``.

    Scores are the snapshot totals stored on each article.

    Raises
    ------
    NoArticlesInWindow
        If the journal has no articles in the window. Such journals are left
        out of tables rather than reported as zero.
    """
    if window < 1:
        raise ValueError(f"window must be >= 1, got {window}")
    members: list[ArticleRecord] = []
    for year in range(edition_year - window + 1, edition_year + 1):
        members.extend(corpus.articles_in(journal_id, year))
    if not members:
        raise NoArticlesInWindow(
            f"{journal_id}: no articles in {edition_year - window + 1}-{edition_year}"
        )
    total = _total(a.attention for a in members)
    n = len(members)
    return JournalAttention(journal_id, edition_year, window, n, total, total / n)


def journal_attention_table(
    corpus: Corpus,
    edition_year: int,
    window: int = DEFAULT_WINDOW,
    journal_ids: Optional[Sequence[str]] = None,
    workers: int = 1,
) -> tuple[list[JournalAttention], list[str]]:
    """Indicator for every journal, sorted by id.

    Returns the computed values and the ids skipped for having no articles in
    the window. Output is identical for any ``workers`` count.
    """
    ids = sorted(journal_ids if journal_ids is not None else corpus.journal_ids())

    def one(jid: str) -> Optional[JournalAttention]:
        try:
            return journal_social_attention(corpus, jid, edition_year, window)
        except NoArticlesInWindow:
            return None

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one, ids))
    else:
        results = [one(jid) for jid in ids]
    values = [r for r in results if r is not None]
    skipped = [jid for jid, r in zip(ids, results) if r is None]
    return values, skipped


def marginal_variation(means: Sequence[float]) -> list[float]:
    """Consecutive differences ``means[i + 1] - means[i]``."""
    if len(means) < 2:
        raise ValueError("marginal_variation needs at least two values")
    return [b - a for a, b in zip(means, means[1:])]


def _year_row(
    articles: Sequence[ArticleRecord],
    pub_year: Optional[int],
    years_since: Optional[int],
) -> YearDescriptives:
    n = len(articles)
    return YearDescriptives(
        pub_year=pub_year,
        years_since_pub=years_since,
        n_articles=n,
        mean_authors=mean([a.n_authors for a in articles]),
        pct_oa=100.0 * sum(a.open_access for a in articles) / n,
        pct_funded=100.0 * sum(a.funded for a in articles) / n,
        mean_citations=mean([a.citations for a in articles]),
        mean_attention=_total(a.attention for a in articles) / n,
    )


def describe_by_year(corpus: Corpus, collection_year: int) -> list[YearDescriptives]:
    """Per-publication-year descriptives, newest year first, plus an aggregate row.

    Years since publication count from the collection year, so articles from
    the year before collection get 1. Marginal variation on a row is its mean
    attention minus that of the row above it (the next younger cohort); the
    youngest row has none. The aggregate row is computed from the raw
    articles, not by averaging row means.
    """
    if len(corpus) == 0:
        raise ValueError("cannot describe an empty corpus")
    by_year: dict[int, list[ArticleRecord]] = {}
    for art in corpus.articles:
        by_year.setdefault(art.pub_year, []).append(art)
    newest = max(by_year)
    if collection_year <= newest:
        raise ValueError(
            f"collection year {collection_year} must be after the newest publication year {newest}"
        )
    rows = []
    previous: Optional[float] = None
    for year in sorted(by_year, reverse=True):
        row = _year_row(by_year[year], year, collection_year - year)
        if previous is not None:
            row = replace(row, marginal_variation=row.mean_attention - previous)
        previous = row.mean_attention
        rows.append(row)
    rows.append(_year_row(corpus.articles, None, None))
    return rows


def quartile_groups(
    journals: Sequence[JournalRecord],
    values: Mapping[str, float],
) -> list[QuartileGroup]:
    """Group per-journal values by JIF quartile (Q1 first, empty groups omitted).

    Journals without a value are skipped with a ``UserWarning``.
    """
    members: dict[str, list[tuple[str, float]]] = {q: [] for q in QUARTILES}
    missing = []
    for j in journals:
        if j.jif_quartile not in members:
            raise ValueError(f"{j.journal_id}: unknown quartile {j.jif_quartile!r}")
        if j.journal_id not in values:
            missing.append(j.journal_id)
            continue
        members[j.jif_quartile].append((j.journal_id, values[j.journal_id]))
    if missing:
        warnings.warn(
            f"{len(missing)} journal(s) without a value excluded: {', '.join(missing)}",
            UserWarning,
            stacklevel=2,
        )
    groups = []
    for q in QUARTILES:
        if members[q]:
            ids, vals = zip(*members[q])
            groups.append(QuartileGroup(q, tuple(ids), tuple(vals), box_summary(vals)))
    return groups
