import io

import pytest

from socialattn.corpus import ArticleRecord, Corpus, JournalRecord, load_journal_fixture

# Article counts per publication year in the source dataset.
YEAR_COUNTS = {
    2021: 6156, 2020: 5687, 2019: 4880, 2018: 4811, 2017: 4897,
    2016: 4592, 2015: 4521, 2014: 4551, 2013: 4613, 2012: 4494,
}

ACCEPTANCE_LINES: list[str] = []


def art(aid, jid, year, attention=0, n_authors=1, oa=False, funded=False, citations=0):
    return ArticleRecord(aid, jid, year, n_authors, oa, funded, citations, attention)


def journal(jid, quartile="Q1", jif=1.0, jif_5yr=1.0, percentile=90.0):
    return JournalRecord(jid, jid, 10, jif, jif_5yr, percentile, quartile)


def csv_text(rows, header="article_id,journal_id,pub_year,n_authors,open_access,funded,citations,attention"):
    return io.StringIO("\n".join([header, *rows]) + "\n")


@pytest.fixture(scope="session")
def journal_fixture():
    records, report = load_journal_fixture()
    return records, report


@pytest.fixture(scope="session")
def year_shaped_corpus():
    articles = []
    for year, count in YEAR_COUNTS.items():
        for i in range(count):
            articles.append(art(f"{year}-{i}", f"J{i % 76:02d}", year, attention=i % 7))
    journals = [journal(f"J{k:02d}") for k in range(76)]
    return Corpus(articles, journals)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
