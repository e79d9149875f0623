import math

import numpy as np
import pytest

from conftest import art
from socialattn.corpus import Corpus
from socialattn.synth import (
    LogNormal,
    NegativeBinomial,
    SynthConfig,
    compare_windows,
    generate_corpus,
    indicator_series,
    journal_stream,
    scale_scores,
    window_variability,
)


def test_same_seed_same_corpus():
    cfg = SynthConfig(n_journals=5, seed=42)
    assert generate_corpus(cfg) == generate_corpus(cfg)


def test_workers_do_not_change_output():
    cfg = SynthConfig(n_journals=9, seed=5)
    assert generate_corpus(cfg, workers=1) == generate_corpus(cfg, workers=4)


def test_different_seeds_differ():
    a = generate_corpus(SynthConfig(n_journals=3, seed=1))
    b = generate_corpus(SynthConfig(n_journals=3, seed=2))
    assert a != b


def test_adding_journals_keeps_existing_streams():
    small = generate_corpus(SynthConfig(n_journals=3, seed=9))
    large = generate_corpus(SynthConfig(n_journals=6, seed=9))
    keep = [a for a in large.articles if a.journal_id in small.journal_ids()]
    assert keep == list(small.articles)


def test_stream_is_pcg64():
    rng = journal_stream(7, 3)
    expected = np.random.Generator(np.random.PCG64(np.random.SeedSequence(7, spawn_key=(3,))))
    assert rng.random() == expected.random()


def test_corpus_shape():
    cfg = SynthConfig(n_journals=4, years=(2015, 2018), articles_per_journal_year=6, counts="fixed", seed=0)
    corpus = generate_corpus(cfg)
    assert len(corpus) == 4 * 4 * 6
    assert corpus.years() == [2015, 2016, 2017, 2018]
    assert sorted(corpus.journal_ids()) == ["J0000", "J0001", "J0002", "J0003"]
    quartiles = {j.jif_quartile for j in corpus.journals.values()}
    assert quartiles <= {"Q1", "Q2", "Q3", "Q4"}
    for a in corpus.articles:
        assert isinstance(a.attention, int) and a.attention >= 0 and a.n_authors >= 1


def test_real_valued_scores():
    corpus = generate_corpus(SynthConfig(n_journals=2, integer_scores=False, seed=1))
    assert any(not float(a.attention).is_integer() for a in corpus.articles)


def test_lognormal_sample_mean():
    model = LogNormal(mu=0.2, sigma=0.5)
    draws = model.draw(np.random.default_rng(0), 200_000)
    assert draws.mean() == pytest.approx(model.mean, rel=0.01)
    assert model.mean == pytest.approx(math.exp(0.2 + 0.125))


def test_negative_binomial_sample_mean():
    model = NegativeBinomial(r=2.0, p=0.25)
    draws = model.draw(np.random.default_rng(0), 200_000)
    assert draws.mean() == pytest.approx(model.mean, rel=0.01)
    assert model.mean == 6.0


@pytest.mark.parametrize("bad", [
    dict(n_journals=0), dict(years=(2021, 2012)), dict(articles_per_journal_year=0),
    dict(counts="uniform"), dict(counts="fixed", articles_per_journal_year=2.5), dict(seed=-1),
    dict(attention_model=LogNormal(sigma=-1)), dict(attention_model=NegativeBinomial(r=1, p=1.5)),
])
def test_config_validation(bad):
    with pytest.raises(ValueError):
        SynthConfig(**bad).validate()


def test_config_json_round_trip(tmp_path):
    cfg = SynthConfig(n_journals=7, attention_model=NegativeBinomial(0.5, 0.1), seed=3, counts="fixed")
    path = tmp_path / "cfg.json"
    path.write_text(cfg.to_json())
    assert SynthConfig.load(path) == cfg
    with pytest.raises(ValueError):
        SynthConfig.from_json('{"attention_model": {"kind": "pareto"}}')


# -- variability -----------------------------------------------------------


def test_indicator_series_length():
    corpus = generate_corpus(SynthConfig(n_journals=1, counts="fixed", seed=0))
    assert len(indicator_series(corpus, "J0000", 1)) == 10
    assert len(indicator_series(corpus, "J0000", 3)) == 8


def test_window_equal_to_span_excludes_everything():
    corpus = generate_corpus(SynthConfig(n_journals=3, years=(2018, 2020), seed=0))
    rep = window_variability(corpus, 3)
    assert rep.n_journals_evaluated == 0 and math.isnan(rep.mean_cv)
    assert rep.excluded == ["J0000", "J0001", "J0002"]


def test_window_longer_than_span_errors():
    corpus = generate_corpus(SynthConfig(n_journals=1, years=(2018, 2020), seed=0))
    with pytest.raises(ValueError):
        window_variability(corpus, 4)
    with pytest.raises(ValueError):
        window_variability(corpus, 0)


def test_zero_mean_series_excluded():
    arts = [art(f"a{y}", "Z", y, 0) for y in range(2015, 2020)] + [art(f"b{y}", "P", y, y - 2014) for y in range(2015, 2020)]
    rep = window_variability(Corpus(arts), 1)
    assert rep.excluded == ["Z"] and list(rep.per_journal_cv) == ["P"]


def test_cv_is_sample_sd_over_mean():
    arts = [art(f"a{y}", "P", y, s) for y, s in zip(range(2015, 2019), [2, 4, 6, 8])]
    rep = window_variability(Corpus(arts), 1)
    assert rep.per_journal_cv["P"] == pytest.approx(np.std([2, 4, 6, 8], ddof=1) / 5, rel=1e-15)


def test_cv_is_scale_invariant():
    corpus = generate_corpus(SynthConfig(n_journals=5, seed=4))
    base = window_variability(corpus, 2)
    scaled = window_variability(scale_scores(corpus, 7.5), 2)
    for jid, cv in base.per_journal_cv.items():
        assert scaled.per_journal_cv[jid] == pytest.approx(cv, rel=1e-12)
    with pytest.raises(ValueError):
        scale_scores(corpus, 0)


def test_compare_windows_shares_journal_universe():
    corpus = generate_corpus(SynthConfig(n_journals=8, seed=2))
    reports = compare_windows(corpus, [1, 2, 3])
    universes = {tuple(r.per_journal_cv) for r in reports}
    assert len(universes) == 1
    assert [r.window for r in reports] == [1, 2, 3]
    with pytest.raises(ValueError):
        compare_windows(corpus, [])


def test_wider_window_smoother_on_skewed_corpus():
    corpus = generate_corpus(SynthConfig(seed=0))
    w1, w3 = compare_windows(corpus, [1, 3])
    assert w3.mean_cv < w1.mean_cv


def test_constant_scores_give_zero_cv():
    arts = [art(f"{j}{y}{i}", j, y, 4) for j in "AB" for y in range(2012, 2022) for i in range(3)]
    for rep in compare_windows(Corpus(arts), [1, 2, 3]):
        assert rep.mean_cv == 0.0 and set(rep.per_journal_cv.values()) == {0.0}


def test_single_window_matches_window_variability():
    corpus = generate_corpus(SynthConfig(n_journals=6, seed=8))
    assert compare_windows(corpus, [2]) == [window_variability(corpus, 2)]


def test_real_valued_mode_cv_scale_invariance():
    corpus = generate_corpus(SynthConfig(n_journals=5, integer_scores=False, seed=6))
    base = window_variability(corpus, 3).per_journal_cv
    scaled = window_variability(scale_scores(corpus, 0.37), 3).per_journal_cv
    assert base.keys() == scaled.keys()
    for jid in base:
        assert scaled[jid] == pytest.approx(base[jid], rel=1e-12)
