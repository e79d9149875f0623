"""Assemble the article-level regression design and plot-ready slices.

The design pairs articles published in ``year`` with the journal indicator of
edition ``year + window - 1`` (the window starting at ``year``), the journal's
5-year JIF and four article covariates.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

from .corpus import Corpus, JournalRecord
from .indicators import NoArticlesInWindow, journal_social_attention
from .regress import Diagnostics, RegressionFit, diagnostics, fit_ols

RESPONSE = "attention"
PREDICTORS = ("journal_attention", "n_authors", "open_access", "funded", "citations", "jif_5yr")
LABELS = {
    "Constant": "Constant",
    "attention": "Article Social Attention",
    "journal_attention": "Journal Social Attention",
    "n_authors": "Num. Authors",
    "open_access": "OA Article (1, Closed = 0)",
    "funded": "Funded Article (1, Not = 0)",
    "citations": "Article Citation",
    "jif_5yr": "Journal Impact Factor",
}


class EmptyDesign(ValueError):
    pass


@dataclass
class Design:
    year: int
    window: int
    edition_year: int
    response: list[float]
    columns: dict[str, list[float]]
    article_ids: list[str]
    dropped_unresolved: list[str] = field(default_factory=list)
    dropped_no_indicator: list[str] = field(default_factory=list)

    @property
    def n(self) -> int:
        return len(self.response)

    @property
    def n_dropped(self) -> int:
        return len(self.dropped_unresolved) + len(self.dropped_no_indicator)


@dataclass
class PipelineResult:
    design: Design
    fit: RegressionFit
    diagnostics: Diagnostics


def _journal_lookup(corpus: Corpus, journals: Optional[Sequence[JournalRecord]]) -> Mapping[str, JournalRecord]:
    if journals is None:
        return corpus.journals
    return {j.journal_id: j for j in journals}


def build_design(
    corpus: Corpus,
    year: int,
    window: int = 3,
    journals: Optional[Sequence[JournalRecord]] = None,
) -> Design:
    """Response and predictor columns for articles published in ``year``.

    Articles whose journal has no record (hence no JIF) or no computable
    indicator are dropped and listed, never imputed.
    """
    if window < 1:
        raise ValueError(f"window must be >= 1, got {window}")
    lookup = _journal_lookup(corpus, journals)
    edition = year + window - 1
    design = Design(year, window, edition, [], {name: [] for name in PREDICTORS}, [])
    cache: dict[str, Optional[float]] = {}
    for art in corpus.articles:
        if art.pub_year != year:
            continue
        jrec = lookup.get(art.journal_id)
        if jrec is None:
            design.dropped_unresolved.append(art.article_id)
            continue
        if art.journal_id not in cache:
            try:
                cache[art.journal_id] = journal_social_attention(corpus, art.journal_id, edition, window).value
            except NoArticlesInWindow:
                cache[art.journal_id] = None
        jsa = cache[art.journal_id]
        if jsa is None:
            design.dropped_no_indicator.append(art.article_id)
            continue
        design.response.append(float(art.attention))
        design.article_ids.append(art.article_id)
        cols = design.columns
        cols["journal_attention"].append(jsa)
        cols["n_authors"].append(float(art.n_authors))
        cols["open_access"].append(1.0 if art.open_access else 0.0)
        cols["funded"].append(1.0 if art.funded else 0.0)
        cols["citations"].append(float(art.citations))
        cols["jif_5yr"].append(jrec.jif_5yr)
    return design


def run_regression_pipeline(
    corpus: Corpus,
    year: int,
    window: int = 3,
    intercept: bool = True,
    journals: Optional[Sequence[JournalRecord]] = None,
    bins: int = 30,
) -> PipelineResult:
    """Fit article attention on the six article/journal predictors.

    Raises
    ------
    EmptyDesign
        If no article of ``year`` survives the journal-covariate checks.
    """
    design = build_design(corpus, year, window, journals)
    if design.n == 0:
        raise EmptyDesign(
            f"no usable articles for {year} ({design.n_dropped} dropped for missing journal covariates)"
        )
    fit = fit_ols(design.columns, design.response, names=PREDICTORS, intercept=intercept, response=RESPONSE)
    return PipelineResult(design, fit, diagnostics(fit, bins))


@dataclass
class ScatterData:
    year: int
    rows: list[tuple[str, str, float, float]]
    n_zero: int
    n_unresolved: int


def emit_scatter(
    corpus: Corpus,
    year: int,
    journals: Optional[Sequence[JournalRecord]] = None,
) -> ScatterData:
    """(article, journal, 5-year JIF, attention) for every article of ``year``.

    Zero-attention articles stay in the table; their count is reported so a
    log-scale plot can note them.

    Raises
    ------
    LookupError
        If the corpus has no articles published in ``year``.
    """
    lookup = _journal_lookup(corpus, journals)
    rows = []
    n_zero = n_unresolved = 0
    seen_year = False
    for art in corpus.articles:
        if art.pub_year != year:
            continue
        seen_year = True
        jrec = lookup.get(art.journal_id)
        if jrec is None:
            n_unresolved += 1
            continue
        if art.attention == 0:
            n_zero += 1
        rows.append((art.article_id, art.journal_id, jrec.jif_5yr, art.attention))
    if not seen_year:
        raise LookupError(f"no articles published in {year}")
    return ScatterData(year, rows, n_zero, n_unresolved)
