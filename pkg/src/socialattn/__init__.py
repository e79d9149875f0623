"""Journal social attention indicator and article-level attention regression toolkit."""
from .corpus import (
    ArticleRecord,
    Corpus,
    JournalRecord,
    ValidationReport,
    filter_corpus,
    load_journal_fixture,
    parse_articles,
    parse_journals,
    validate_corpus,
)
from .indicators import (
    JournalAttention,
    NoArticlesInWindow,
    describe_by_year,
    journal_social_attention,
    marginal_variation,
    quartile_groups,
)
from .regress import RankDeficient, RegressionFit, betas_from_correlations, fit_ols, predict, standardized_betas
from .synth import SynthConfig, compare_windows, generate_corpus, window_variability

__version__ = "0.1.0"

__all__ = [
    "ArticleRecord",
    "Corpus",
    "JournalRecord",
    "ValidationReport",
    "filter_corpus",
    "load_journal_fixture",
    "parse_articles",
    "parse_journals",
    "validate_corpus",
    "JournalAttention",
    "NoArticlesInWindow",
    "describe_by_year",
    "journal_social_attention",
    "marginal_variation",
    "quartile_groups",
    "RankDeficient",
    "RegressionFit",
    "betas_from_correlations",
    "fit_ols",
    "predict",
    "standardized_betas",
    "SynthConfig",
    "compare_windows",
    "generate_corpus",
    "window_variability",
]
