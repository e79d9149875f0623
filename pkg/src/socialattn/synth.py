"""Seeded synthetic corpora and window-size variability experiments.

Random numbers come from numpy's PCG64 generator. Every journal draws from
its own stream, ``SeedSequence(seed, spawn_key=(journal_index,))``, so adding
journals never changes the data of existing ones and journals can be
generated in any order or in parallel.
"""
from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from .corpus import ArticleRecord, Corpus, JournalRecord
from .indicators import NoArticlesInWindow, journal_social_attention
from .stats import summary


@dataclass(frozen=True)
class LogNormal:
    mu: float = 0.0
    sigma: float = 1.5

    def validate(self) -> None:
        if not (math.isfinite(self.mu) and self.sigma > 0):
            raise ValueError(f"lognormal needs finite mu and sigma > 0, got {self}")

    def draw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.lognormal(self.mu, self.sigma, size)

    @property
    def mean(self) -> float:
        return math.exp(self.mu + self.sigma ** 2 / 2)


@dataclass(frozen=True)
class NegativeBinomial:
    r: float = 0.5
    p: float = 0.1

    def validate(self) -> None:
        if not (self.r > 0 and 0 < self.p <= 1):
            raise ValueError(f"negative binomial needs r > 0 and 0 < p <= 1, got {self}")

    def draw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.negative_binomial(self.r, self.p, size).astype(float)

    @property
    def mean(self) -> float:
        return self.r * (1 - self.p) / self.p


_MODELS = {"lognormal": LogNormal, "negative-binomial": NegativeBinomial}


@dataclass(frozen=True)
class SynthConfig:
    n_journals: int = 20
    years: tuple[int, int] = (2012, 2021)
    articles_per_journal_year: float = 10.0
    attention_model: Union[LogNormal, NegativeBinomial] = field(default_factory=LogNormal)
    seed: int = 0
    # "poisson": counts ~ Poisson(mean, at least 1); "fixed": exactly the mean.
    counts: str = "poisson"
    # False keeps real-valued scores (no rounding) for distributional tests.
    integer_scores: bool = True

    def validate(self) -> None:
        if self.n_journals < 1:
            raise ValueError("n_journals must be >= 1")
        if self.years[0] > self.years[1]:
            raise ValueError(f"empty year range {self.years}")
        if not self.articles_per_journal_year > 0:
            raise ValueError("articles_per_journal_year must be positive")
        if self.counts not in ("poisson", "fixed"):
            raise ValueError(f"unknown count model {self.counts!r}")
        if self.counts == "fixed" and not float(self.articles_per_journal_year).is_integer():
            raise ValueError("fixed counts need an integer articles_per_journal_year")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        self.attention_model.validate()

    def to_json(self) -> str:
        data = asdict(self)
        model = self.attention_model
        data["attention_model"] = {"kind": _model_kind(model), **asdict(model)}
        data["years"] = list(self.years)
        return json.dumps(data, indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "SynthConfig":
        data = json.loads(text)
        model = dict(data.pop("attention_model", {"kind": "lognormal"}))
        kind = model.pop("kind", "lognormal")
        if kind not in _MODELS:
            raise ValueError(f"unknown attention model {kind!r}")
        years = tuple(data.pop("years", (2012, 2021)))
        cfg = cls(attention_model=_MODELS[kind](**model), years=years, **data)
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path: Union[str, Path]) -> "SynthConfig":
        return cls.from_json(Path(path).read_text(encoding="utf-8"))


def _model_kind(model) -> str:
    for kind, cls in _MODELS.items():
        if isinstance(model, cls):
            return kind
    raise TypeError(f"unsupported attention model {model!r}")


@dataclass
class VariabilityReport:
    window: int
    per_journal_cv: dict[str, float]
    mean_cv: float
    n_journals_evaluated: int
    # Journals without a usable series: fewer than 2 points, or mean 0.
    excluded: list[str] = field(default_factory=list)


def journal_stream(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(index,))))


def _journal_id(index: int) -> str:
    return f"J{index:04d}"


def _integerize(scores: np.ndarray) -> list[int]:
    # np.rint rounds half to even.
    return [int(v) for v in np.clip(np.rint(scores), 0, None)]


def _generate_journal(cfg: SynthConfig, index: int):
    rng = journal_stream(cfg.seed, index)
    jid = _journal_id(index)
    jif_5yr = float(np.round(rng.gamma(2.0, 1.5), 3))
    jif = float(np.round(jif_5yr * rng.uniform(0.8, 1.1), 3))
    articles = []
    first, last = cfg.years
    for year in range(first, last + 1):
        if cfg.counts == "fixed":
            n = int(cfg.articles_per_journal_year)
        else:
            n = max(1, int(rng.poisson(cfg.articles_per_journal_year)))
        raw = cfg.attention_model.draw(rng, n)
        scores = _integerize(raw) if cfg.integer_scores else [float(v) for v in raw]
        authors = rng.poisson(1.8, n) + 1
        oa = rng.random(n) < 0.4
        funded = rng.random(n) < 0.21
        age = last + 1 - year
        cites = rng.poisson(2.5 * age, n)
        for i in range(n):
            articles.append(
                ArticleRecord(
                    f"{jid}-{year}-{i:04d}",
                    jid,
                    year,
                    int(authors[i]),
                    bool(oa[i]),
                    bool(funded[i]),
                    int(cites[i]),
                    scores[i],
                )
            )
    n_2020 = sum(1 for a in articles if a.pub_year == 2020)
    return articles, (jid, jif, jif_5yr, n_2020)


def generate_corpus(config: SynthConfig, workers: int = 1) -> Corpus:
    """Draw a synthetic corpus; identical for identical configs.

    Journal quartiles are assigned by rank of the drawn 2-year JIF, and the
    percentile is the rank position scaled to [0, 100].
    """
    config.validate()
    indices = range(config.n_journals)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda i: _generate_journal(config, i), indices))
    else:
        parts = [_generate_journal(config, i) for i in indices]
    articles = [a for arts, _ in parts for a in arts]
    metas = [meta for _, meta in parts]
    return Corpus(articles, _rank_journals(metas))


def _rank_journals(metas) -> list[JournalRecord]:
    n = len(metas)
    order = sorted(range(n), key=lambda i: (metas[i][1], metas[i][0]))
    rank = {i: r for r, i in enumerate(order)}
    out = []
    for i, (jid, jif, jif5, n_2020) in enumerate(metas):
        pct = round(100.0 * (rank[i] + 1) / n, 2)
        # Top quarter by rank is Q1.
        band = min(3, 4 * (n - 1 - rank[i]) // n)
        out.append(JournalRecord(jid, jid, n_2020, jif, jif5, pct, f"Q{band + 1}"))
    return out


# -- variability -----------------------------------------------------------


def _span(corpus: Corpus) -> tuple[int, int]:
    years = corpus.years()
    if not years:
        raise ValueError("corpus has no articles")
    return years[0], years[-1]


def indicator_series(corpus: Corpus, journal_id: str, window: int) -> list[float]:
    """Indicator values for every admissible edition year of the corpus span."""
    first, last = _span(corpus)
    series = []
    for edition in range(first + window - 1, last + 1):
        try:
            series.append(journal_social_attention(corpus, journal_id, edition, window).value)
        except NoArticlesInWindow:
            continue
    return series


def _cv(series: Sequence[float]) -> Optional[float]:
    if len(series) < 2:
        return None
    s = summary(series)
    if s.mean == 0:
        return None
    return s.sd / s.mean


def window_variability(
    corpus: Corpus,
    window: int,
    journal_ids: Optional[Sequence[str]] = None,
) -> VariabilityReport:
    """Coefficient of variation of each journal's indicator series.

    A window equal to the corpus span leaves one point per journal, so every
    journal is excluded and ``mean_cv`` is NaN.

    Raises
    ------
    ValueError
        If the window is < 1 or longer than the corpus span.
    """
    if window < 1:
        raise ValueError(f"window must be >= 1, got {window}")
    first, last = _span(corpus)
    span = last - first + 1
    if window > span:
        raise ValueError(f"window {window} exceeds corpus span of {span} years")
    ids = sorted(journal_ids) if journal_ids is not None else sorted(
        {a.journal_id for a in corpus.articles}
    )
    cvs: dict[str, float] = {}
    excluded = []
    for jid in ids:
        cv = _cv(indicator_series(corpus, jid, window))
        if cv is None:
            excluded.append(jid)
        else:
            cvs[jid] = cv
    mean_cv = math.fsum(cvs.values()) / len(cvs) if cvs else math.nan
    return VariabilityReport(window, cvs, mean_cv, len(cvs), excluded)


def compare_windows(corpus: Corpus, windows: Sequence[int]) -> list[VariabilityReport]:
    """One report per window over a shared journal universe.

    The universe is the set of journals with a defined CV at every requested
    window (in particular at the largest), so all reports average the same
    journals.
    """
    if not windows:
        raise ValueError("at least one window is required")
    first = [window_variability(corpus, w) for w in windows]
    universe = set(first[0].per_journal_cv)
    for rep in first[1:]:
        universe &= set(rep.per_journal_cv)
    out = []
    for rep in first:
        cvs = {j: rep.per_journal_cv[j] for j in sorted(universe)}
        dropped = sorted(set(rep.per_journal_cv) - universe) + rep.excluded
        mean_cv = math.fsum(cvs.values()) / len(cvs) if cvs else math.nan
        out.append(VariabilityReport(rep.window, cvs, mean_cv, len(cvs), sorted(dropped)))
    return out


def scale_scores(corpus: Corpus, factor: float) -> Corpus:
    """Copy of the corpus with every attention score multiplied by ``factor``."""
    if not factor > 0:
        raise ValueError("factor must be positive")
    arts = [replace(a, attention=a.attention * factor) for a in corpus.articles]
    return Corpus(arts, corpus.journals.values())
