"""Command-line entry point: ``socialattn <subcommand> [options]``.

Each invocation writes exactly one report (stdout or ``--output``). Exit
codes: 0 success, 1 data or validation failure, 2 usage error.
"""
from __future__ import annotations

import argparse
import itertools
import math
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from pathlib import Path
from typing import Optional, Sequence

from . import corpus as corpus_mod
from .corpus import CorpusError, load_corpus, load_journal_fixture, parse_journals, read_mapping
from .indicators import describe_by_year, journal_attention_table, quartile_groups
from .pipeline import LABELS, PREDICTORS, RESPONSE, EmptyDesign, build_design, emit_scatter, run_regression_pipeline
from .regress import RankDeficient
from .report import FORMATS, Report, format_cell
from .stats import correlation_matrix, significance_stars, welch_test
from .synth import LogNormal, NegativeBinomial, SynthConfig, compare_windows, generate_corpus

SUBCOMMANDS = (
    "validate",
    "describe",
    "journal-attention",
    "correlate",
    "regress",
    "quartiles",
    "scatter",
    "synth-windows",
)


class DataError(Exception):
    """Input data cannot support the requested analysis (exit code 1)."""


class UsageError(Exception):
    """Inconsistent options that argparse cannot catch (exit code 2)."""


def _year_range(text: str) -> tuple[int, int]:
    try:
        if "-" in text.strip("-"):
            a, b = text.split("-", 1)
            first, last = int(a), int(b)
        else:
            first = last = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected YEAR or FIRST-LAST, got {text!r}")
    if first > last:
        raise argparse.ArgumentTypeError(f"inverted year range {text!r}")
    return first, last


def _int_list(text: str) -> list[int]:
    try:
        values = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not values or any(v < 1 for v in values):
        raise argparse.ArgumentTypeError("windows must be positive integers")
    return values


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="socialattn",
        description="Journal social attention indicator and article-level regression reports.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="SUBCOMMAND")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=FORMATS, default="markdown", help="output format (default markdown)")
    common.add_argument("--output", "-o", type=Path, help="write the report here instead of stdout")
    common.add_argument("--workers", type=_positive, default=1, help="threads for per-journal work")

    def articles_opts(p, required=True):
        p.add_argument("--articles", type=Path, required=required, help="articles CSV export")
        p.add_argument("--mapping", type=Path, help="column mapping file (canonical=source per line)")
        p.add_argument("--years", type=_year_range, default=corpus_mod.DEFAULT_YEARS,
                       help="accepted publication years, FIRST-LAST (default 2012-2021)")

    p = sub.add_parser("validate", parents=[common], help="check input files")
    articles_opts(p, required=False)
    p.add_argument("--journals", type=Path, help="journals CSV")

    p = sub.add_parser("describe", parents=[common], help="per-year descriptive table")
    articles_opts(p)
    p.add_argument("--collected", type=int, required=True, help="year the data were collected")

    p = sub.add_parser("journal-attention", parents=[common], help="journal indicator table")
    articles_opts(p)
    p.add_argument("--journals", type=Path, help="journals CSV (adds JIF columns)")
    p.add_argument("--edition", type=int, required=True, help="edition year y (window ends at y)")
    p.add_argument("--window", type=_positive, default=3)

    for name, helptext in (("correlate", "means, SDs and Pearson correlations"),
                           ("regress", "multiple linear regression coefficient table")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        articles_opts(p)
        p.add_argument("--journals", type=Path, required=True)
        p.add_argument("--year", type=int, required=True, help="publication year of the response articles")
        p.add_argument("--window", type=_positive, default=3)
        if name == "regress":
            p.add_argument("--intercept", choices=("include", "none"), default="include")
            p.add_argument("--bins", type=_positive, default=30, help="residual histogram bins")

    p = sub.add_parser("quartiles", parents=[common], help="box summaries by JIF quartile")
    articles_opts(p, required=False)
    p.add_argument("--journals", type=Path, help="journals CSV (default: bundled 2020 table)")
    p.add_argument("--edition", type=int, help="indicator edition year when --articles is given")
    p.add_argument("--window", type=_positive, default=3)

    p = sub.add_parser("scatter", parents=[common], help="5-year JIF vs article attention pairs")
    articles_opts(p)
    p.add_argument("--journals", type=Path, required=True)
    p.add_argument("--year", type=int, required=True)

    p = sub.add_parser("synth-windows", parents=[common], help="indicator variability by window size")
    p.add_argument("--config", type=Path, help="synthetic corpus config (JSON)")
    p.add_argument("--n-journals", type=_positive, default=20)
    p.add_argument("--span", type=_year_range, default=(2012, 2021), help="years, FIRST-LAST")
    p.add_argument("--articles-per-year", type=float, default=10.0)
    p.add_argument("--model", choices=("lognormal", "negative-binomial"), default="lognormal")
    p.add_argument("--mu", type=float, default=0.0)
    p.add_argument("--sigma", type=float, default=1.5)
    p.add_argument("--nb-r", type=float, default=0.5)
    p.add_argument("--nb-p", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=0, help="first seed")
    p.add_argument("--runs", type=_positive, default=1, help="corpora to draw (seeds seed..seed+runs-1)")
    p.add_argument("--windows", type=_int_list, default=[1, 2, 3])
    return parser


# -- subcommands -----------------------------------------------------------


def _load(args, journals_path: Optional[Path] = None):
    mapping = read_mapping(args.mapping) if getattr(args, "mapping", None) else None
    corpus, report = load_corpus(args.articles, journals_path, mapping, args.years)
    if len(corpus) == 0:
        raise DataError(f"{args.articles}: no usable article rows ({report.rejected} rejected)")
    return corpus, report


def _intake_notes(rep: Report, intake) -> None:
    if intake is None:
        return
    if intake.rejected or intake.errors:
        rep.footnotes.append(f"Input: {intake.rejected} article row(s) rejected, "
                             f"{len(intake.errors)} error(s); run `validate` for details.")
    if intake.warnings:
        rep.footnotes.append(f"Input: {len(intake.warnings)} warning(s).")


def _load_journals(path: Optional[Path]):
    if path is None:
        records, report = load_journal_fixture()
    else:
        records, report = parse_journals(path)
    if report.errors:
        raise DataError("journal file rejected:\n  " + "\n  ".join(report.messages()))
    return records


def cmd_validate(args) -> tuple[Report, int]:
    if args.articles is None and args.journals is None:
        raise UsageError("validate needs --articles and/or --journals")
    rep = Report("Validation report", ["file", "row", "field", "severity", "message"])
    totals = []
    failed = False
    if args.journals is not None:
        _, jrep = parse_journals(args.journals)
        for r, c, m in jrep.errors:
            rep.add_row(["journals", r, c, "error", m])
        for r, c, m in jrep.warnings:
            rep.add_row(["journals", r, c, "warning", m])
        totals.append(f"journals: read {jrep.read}, accepted {jrep.accepted}, rejected {jrep.rejected}")
        failed |= bool(jrep.errors)
    if args.articles is not None:
        mapping = read_mapping(args.mapping) if args.mapping else None
        arts, arep = corpus_mod.parse_articles(args.articles, mapping, args.years)
        for r, c, m in arep.errors:
            rep.add_row(["articles", r, c, "error", m])
        for r, c, m in arep.warnings:
            rep.add_row(["articles", r, c, "warning", m])
        totals.append(f"articles: read {arep.read}, accepted {arep.accepted}, rejected {arep.rejected}")
        failed |= bool(arep.errors)
        if args.journals is not None:
            jrecs, _ = parse_journals(args.journals)
            crep = corpus_mod.validate_corpus(corpus_mod.Corpus(arts, jrecs), args.years)
            for r, c, m in crep.errors:
                rep.add_row(["corpus", r, c, "error", m])
            for r, c, m in crep.warnings:
                rep.add_row(["corpus", r, c, "warning", m])
            failed |= bool(crep.errors)
    rep.footnotes.extend(totals)
    return rep, 1 if failed else 0


def cmd_describe(args) -> tuple[Report, int]:
    corpus, intake = _load(args)
    rows = describe_by_year(corpus, args.collected)
    cols = ["Years since Pub.", "Year of Pub.", "Num. Art.", "Num. Authors (Mean)", "OA Art. (%)",
            "Funded Art. (%)", "Citations (Mean)", "Art. Social Attention Mean Score", "Marg. Var."]
    rep = Report(
        "Descriptive statistics at the article level",
        cols,
        decimals={c: 2 for c in cols[3:]},
    )
    for r in rows:
        rep.add_row([
            "All" if r.is_total else r.years_since_pub,
            r.pub_year,
            r.n_articles,
            r.mean_authors,
            r.pct_oa,
            r.pct_funded,
            r.mean_citations,
            r.mean_attention,
            r.marginal_variation,
        ])
    rep.footnotes.append(f"Years since publication counted to the collection year {args.collected}.")
    rep.footnotes.append("Marg. Var. = mean score of the row minus the mean score of the row above.")
    _intake_notes(rep, intake)
    return rep, 0


def cmd_journal_attention(args) -> tuple[Report, int]:
    corpus, intake = _load(args, args.journals)
    values, skipped = journal_attention_table(corpus, args.edition, args.window, workers=args.workers)
    first = args.edition - args.window + 1
    label = f"Journal Social Attention {args.edition}"
    if args.journals is not None:
        cols = ["Journal", "Num. Art. 2020", "JIF 2020", "JIF Percentile 2020", "JIF Quartile 2020",
                "5-Year JIF 2020", f"Num. Art. {first}-{args.edition}", label]
        rep = Report(f"Journal-level indicators (window {first}-{args.edition})", cols,
                     decimals={"JIF 2020": 3, "JIF Percentile 2020": 2, "5-Year JIF 2020": 3, label: 2})
        for v in values:
            j = corpus.journal(v.journal_id)
            if j is None:
                rep.add_row([v.journal_id, None, None, None, None, None, v.n_articles, v.value])
            else:
                rep.add_row([j.name, j.n_articles_2020, j.jif, j.jif_percentile, j.jif_quartile, j.jif_5yr,
                             v.n_articles, v.value])
    else:
        cols = ["Journal", f"Num. Art. {first}-{args.edition}", "Total Attention", label]
        rep = Report(f"Journal social attention (window {first}-{args.edition})", cols, decimals={label: 2})
        for v in values:
            rep.add_row([v.journal_id, v.n_articles, v.total_attention, v.value])
    if skipped:
        rep.footnotes.append(f"{len(skipped)} journal(s) without articles in {first}-{args.edition} omitted: "
                             + ", ".join(skipped))
    _intake_notes(rep, intake)
    return rep, 0


def cmd_correlate(args) -> tuple[Report, int]:
    corpus, intake = _load(args, args.journals)
    design = build_design(corpus, args.year, args.window)
    if design.n < 3:
        raise DataError(f"only {design.n} usable articles for {args.year}")
    names = (RESPONSE,) + PREDICTORS
    columns = {RESPONSE: design.response, **design.columns}
    cm = correlation_matrix(columns)
    index_cols = [str(i + 1) for i in range(len(names))]
    rep = Report("Means, SDs and Pearson correlations", ["Variable", "Mean", "SD"] + index_cols,
                 decimals={"Mean": 2, "SD": 2})
    for i, a in enumerate(names):
        s = cm.summaries[a]
        cells = []
        for j, b in enumerate(names):
            if j < i:
                cells.append(None)
            elif j == i:
                cells.append("-")
            else:
                res = cm.get(a, b)
                cells.append(format_cell(res.r, 2) + res.stars)
        rep.add_row([f"{i + 1}. {LABELS[a]}", s.mean, s.sd] + cells)
    rep.footnotes.append("*p < 0.05. **p < 0.01.")
    rep.footnotes.append(f"N = {design.n}; journal indicator edition {design.edition_year} "
                         f"(window {args.year}-{design.edition_year}).")
    if design.n_dropped:
        rep.footnotes.append(f"{design.n_dropped} article(s) dropped for missing journal covariates.")
    _intake_notes(rep, intake)
    return rep, 0


def cmd_regress(args) -> tuple[Report, int]:
    corpus, intake = _load(args, args.journals)
    intercept = args.intercept == "include"
    res = run_regression_pipeline(corpus, args.year, args.window, intercept, bins=args.bins)
    fit, diag, design = res.fit, res.diagnostics, res.design
    cols = ["Variable", "B (Coeff.)", "95% CI low", "95% CI high", "β (Standardized Coeff.)", "t", "p (Sig.)"]
    rep = Report("Regression coefficients for the prediction of Article Social Attention", cols,
                 decimals={"B (Coeff.)": 3, "95% CI low": 3, "95% CI high": 3,
                           "β (Standardized Coeff.)": 3, "t": 3, "p (Sig.)": 3})
    if not intercept:
        # Constant fixed at zero; shown as in the published layout.
        rep.add_row([LABELS["Constant"], 0.0, None, None, 0.0, None, None])
    for row in fit.coefficients:
        rep.add_row([LABELS.get(row.name, row.name), row.b, row.ci_low, row.ci_high, row.beta,
                     row.t_stat, row.p_two_tailed])
    if intercept:
        rep.footnotes.append(f"Adjusted R-square = {fit.adj_r2:.3f}; R-square = {fit.r2:.4f} (N={fit.n}).")
    else:
        rep.footnotes.append("No constant term. "
                             f"Uncentered R-square = {fit.r2_uncentered:.4f} (adjusted {fit.adj_r2:.3f}); "
                             f"centered R-square = {fit.r2_centered:.4f} (N={fit.n}).")
    rep.footnotes.append(f"ANOVA F({fit.df_model}, {fit.df_resid}) = {fit.f_stat:.3f}, p = {_p_text(fit.p_f)}.")
    rep.footnotes.append("CI = 95% confidence interval for B (Student t, residual df).")
    rep.footnotes.append(f"Journal social attention edition {design.edition_year} "
                         f"(window {args.year}-{design.edition_year}); JIF = 5-year JIF.")
    if design.n_dropped:
        rep.footnotes.append(f"{len(design.dropped_unresolved)} article(s) dropped: journal not in journal list; "
                             f"{len(design.dropped_no_indicator)} dropped: no indicator.")
    kurt = "undefined" if diag.excess_kurtosis is None else f"{diag.excess_kurtosis:.3f}"
    rep.footnotes.append(f"Residual skewness {diag.skewness:.3f}, excess kurtosis {kurt}; "
                         f"max VIF {max(diag.vif.values()):.3f}; condition number {fit.condition:.3g}.")
    _intake_notes(rep, intake)
    return rep, 0


def _p_text(p: float) -> str:
    return "0.000" if p < 5e-4 else f"{p:.3f}"


def cmd_quartiles(args) -> tuple[Report, int]:
    journals = _load_journals(args.journals)
    intake = None
    if args.articles is not None:
        if args.edition is None:
            raise UsageError("--edition is required with --articles")
        corpus, intake = _load(args)
        values, _ = journal_attention_table(corpus, args.edition, args.window,
                                            journal_ids=[j.journal_id for j in journals], workers=args.workers)
        attention = {v.journal_id: v.value for v in values}
        att_label = f"Journal Social Attention {args.edition}"
    else:
        attention = {j.journal_id: j.reported_attention for j in journals if j.reported_attention is not None}
        if not attention:
            raise DataError("journal file has no reported attention column; pass --articles and --edition")
        att_label = "Journal Social Attention (reported)"
    series = [("5-Year JIF", {j.journal_id: j.jif_5yr for j in journals}), (att_label, attention)]
    cols = ["Variable", "Quartile", "n", "Min", "Whisker low", "Q1", "Median", "Mean", "Q3",
            "Whisker high", "Max", "Outliers"]
    rep = Report("Journal indicators by JIF quartile", cols,
                 decimals={c: 3 for c in cols[3:11]})
    for label, values in series:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            groups = quartile_groups(journals, values)
        for w in caught:
            rep.footnotes.append(f"{label}: {w.message}")
        for g in groups:
            s = g.summary
            rep.add_row([label, g.quartile, len(g.values), s.min, s.whisker_low, s.q1, s.median, s.mean,
                         s.q3, s.whisker_high, s.max, len(s.outliers)])
        for a, b in itertools.combinations(groups, 2):
            if len(a.values) < 2 or len(b.values) < 2:
                continue
            t = welch_test(a.values, b.values)
            stars = significance_stars(t.p_two_tailed)
            rep.footnotes.append(f"{label} {a.quartile} vs {b.quartile}: Welch t = {t.statistic:.3f}, "
                                 f"df = {t.df:.2f}, p = {_p_text(t.p_two_tailed)}{stars}")
    rep.footnotes.append("Quartiles by type-7 interpolation; whiskers at the most extreme points within 1.5 IQR.")
    _intake_notes(rep, intake)
    return rep, 0


def cmd_scatter(args) -> tuple[Report, int]:
    corpus, intake = _load(args, args.journals)
    try:
        data = emit_scatter(corpus, args.year)
    except LookupError as exc:
        raise DataError(str(exc)) from exc
    rep = Report(f"Article social attention vs 5-year JIF, articles published in {args.year}",
                 ["article_id", "journal_id", "jif_5yr", "attention"])
    for row in data.rows:
        rep.add_row(list(row))
    rep.footnotes.append(f"{data.n_zero} article(s) with zero attention (undefined on a log scale).")
    if data.n_unresolved:
        rep.footnotes.append(f"{data.n_unresolved} article(s) omitted: journal not in journal list.")
    _intake_notes(rep, intake)
    return rep, 0


def _synth_config(args, seed: int) -> SynthConfig:
    if args.config is not None:
        base = SynthConfig.load(args.config)
        return replace(base, seed=base.seed + (seed - args.seed))
    model = LogNormal(args.mu, args.sigma) if args.model == "lognormal" else NegativeBinomial(args.nb_r, args.nb_p)
    return SynthConfig(args.n_journals, args.span, args.articles_per_year, model, seed)


def cmd_synth_windows(args) -> tuple[Report, int]:
    windows = args.windows
    seeds = [args.seed + i for i in range(args.runs)]
    configs = [_synth_config(args, s) for s in seeds]

    def one(cfg: SynthConfig):
        return compare_windows(generate_corpus(cfg), windows)

    if args.workers > 1:
        with ThreadPoolExecutor(max_workers=args.workers) as pool:
            results = list(pool.map(one, configs))
    else:
        results = [one(c) for c in configs]

    cols = ["Window", "Runs", "Mean CV (avg over runs)", "SD across runs", "Journals evaluated (avg)"]
    rep = Report("Inter-annual variability of the journal indicator by window size", cols,
                 decimals={cols[2]: 4, cols[3]: 4, cols[4]: 2})
    for k, w in enumerate(windows):
        cvs = [r[k].mean_cv for r in results if not math.isnan(r[k].mean_cv)]
        mean_cv = math.fsum(cvs) / len(cvs) if cvs else math.nan
        sd = math.sqrt(math.fsum((c - mean_cv) ** 2 for c in cvs) / (len(cvs) - 1)) if len(cvs) > 1 else None
        n_eval = math.fsum(r[k].n_journals_evaluated for r in results) / len(results)
        rep.add_row([w, len(results), mean_cv, sd, n_eval])
    if len(windows) > 1:
        order = sorted(range(len(windows)), key=lambda k: windows[k])
        lo, hi = order[0], order[-1]
        lower = sum(1 for r in results if r[hi].mean_cv < r[lo].mean_cv)
        mono = sum(
            1 for r in results
            if all(r[order[i]].mean_cv >= r[order[i + 1]].mean_cv for i in range(len(order) - 1))
        )
        rep.footnotes.append(f"mean CV(window {windows[hi]}) < mean CV(window {windows[lo]}) in "
                             f"{lower} of {len(results)} runs.")
        rep.footnotes.append(f"mean CV non-increasing across windows in {mono} of {len(results)} runs.")
    cfg = configs[0]
    rep.footnotes.append(f"Seeds {seeds[0]}-{seeds[-1]}; {cfg.n_journals} journals, years "
                         f"{cfg.years[0]}-{cfg.years[1]}, {cfg.articles_per_journal_year:g} articles per "
                         f"journal-year, attention {cfg.attention_model}.")
    return rep, 0


HANDLERS = {
    "validate": cmd_validate,
    "describe": cmd_describe,
    "journal-attention": cmd_journal_attention,
    "correlate": cmd_correlate,
    "regress": cmd_regress,
    "quartiles": cmd_quartiles,
    "scatter": cmd_scatter,
    "synth-windows": cmd_synth_windows,
}


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2
    try:
        report, code = HANDLERS[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"socialattn {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (DataError, CorpusError, EmptyDesign, RankDeficient, LookupError, ValueError, OSError) as exc:
        print(f"socialattn {args.command}: {exc}", file=sys.stderr)
        return 1
    text = report.render(args.format)
    if args.output is not None:
        args.output.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
