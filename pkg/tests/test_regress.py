import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats as sps

from socialattn.regress import (
    CONSTANT,
    DesignSpec,
    RankDeficient,
    adjusted_r2,
    betas_from_correlations,
    diagnostics,
    fit_ols,
    predict,
    standardized_betas,
    variance_inflation,
)


def _problem(seed, n=60, p=3, noise=1.0):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(n, p)) * [1, 5, 0.2][:p] + 3
    y = 1.5 + x @ np.array([0.5, -0.2, 4.0][:p]) + rng.normal(scale=noise, size=n)
    return x, y


def _oracle(a, y):
    n, k = a.shape
    b = np.linalg.solve(a.T @ a, a.T @ y)
    resid = y - a @ b
    s2 = resid @ resid / (n - k)
    se = np.sqrt(np.diag(np.linalg.inv(a.T @ a)) * s2)
    return b, se, resid


def test_fit_matches_closed_form_inference():
    x, y = _problem(0)
    fit = fit_ols(x, y, names=["a", "b", "c"], response="y")
    a = np.column_stack([np.ones(len(y)), x])
    b, se, resid = _oracle(a, y)
    assert [r.name for r in fit.coefficients] == [CONSTANT, "a", "b", "c"]
    assert np.allclose([r.b for r in fit.coefficients], b, rtol=1e-12)
    assert np.allclose([r.se for r in fit.coefficients], se, rtol=1e-10)
    df = len(y) - 4
    tcrit = sps.t.ppf(0.975, df)
    for row, bi, si in zip(fit.coefficients, b, se):
        assert row.ci_low == pytest.approx(bi - tcrit * si, rel=1e-9)
        assert row.ci_high == pytest.approx(bi + tcrit * si, rel=1e-9)
        assert row.t_stat == pytest.approx(bi / si, rel=1e-10)
        assert row.p_two_tailed == pytest.approx(2 * sps.t.sf(abs(bi / si), df), rel=1e-8, abs=1e-300)
    sst = np.sum((y - y.mean()) ** 2)
    sse = resid @ resid
    assert fit.r2 == pytest.approx(1 - sse / sst, rel=1e-12)
    assert fit.adj_r2 == pytest.approx(1 - (sse / df) / (sst / (len(y) - 1)), rel=1e-12)
    f = ((sst - sse) / 3) / (sse / df)
    assert fit.f_stat == pytest.approx(f, rel=1e-10)
    assert fit.p_f == pytest.approx(sps.f.sf(f, 3, df), rel=1e-8, abs=1e-300)
    assert (fit.n, fit.df_model, fit.df_resid) == (60, 3, 56)


def test_mapping_input_uses_keys_as_names():
    x, y = _problem(1, p=2)
    fit = fit_ols({"u": x[:, 0].tolist(), "v": x[:, 1].tolist()}, y.tolist())
    assert [r.name for r in fit.slopes] == ["u", "v"]
    assert fit.b["u"] == pytest.approx(fit_ols(x, y).coefficients[1].b, rel=1e-14)


def test_level_changes_ci_width():
    x, y = _problem(2)
    w95 = fit_ols(x, y).coef("x1")
    w99 = fit_ols(x, y, level=0.99).coef("x1")
    assert (w99.ci_high - w99.ci_low) > (w95.ci_high - w95.ci_low)


def test_no_intercept_mode_reports_both_r2():
    x, y = _problem(3)
    fit = fit_ols(x, y, intercept=False)
    assert all(r.name != CONSTANT for r in fit.coefficients)
    b, se, resid = _oracle(x, y)
    assert np.allclose([r.b for r in fit.coefficients], b, rtol=1e-12)
    sse = resid @ resid
    assert fit.r2 == fit.r2_uncentered == pytest.approx(1 - sse / (y @ y), rel=1e-12)
    assert fit.r2_centered == pytest.approx(1 - sse / np.sum((y - y.mean()) ** 2), rel=1e-12)
    assert fit.adj_r2 == pytest.approx(1 - (1 - fit.r2) * 60 / 57, rel=1e-12)
    assert fit.df_resid == 57


def test_rank_deficient_names_column():
    x, y = _problem(4)
    dup = np.column_stack([x, 2 * x[:, 1] - x[:, 0]])
    with pytest.raises(RankDeficient) as exc:
        fit_ols(dup, y, names=["a", "b", "c", "d"])
    assert exc.value.column in {"a", "b", "d"}


def test_constant_column_is_rank_deficient_with_intercept():
    x, y = _problem(5, p=1)
    with pytest.raises(RankDeficient):
        fit_ols(np.column_stack([x, np.full(len(y), 3.0)]), y)


def test_too_few_observations():
    with pytest.raises(ValueError):
        fit_ols([[1.0], [2.0]], [1.0, 2.0])


def test_design_spec_validation():
    with pytest.raises(ValueError):
        DesignSpec("y", ())
    with pytest.raises(ValueError):
        DesignSpec("y", ("a", "a"))
    with pytest.raises(ValueError):
        DesignSpec("y", ("y",))


def test_exact_fit_has_infinite_f():
    x = np.arange(10.0)
    fit = fit_ols(x[:, None], 2 * x + 1)
    assert fit.f_stat == math.inf and fit.p_f == 0.0
    assert fit.coef("x1").b == pytest.approx(2.0, rel=1e-14)


def test_fitted_plus_residuals_reproduces_response():
    x, y = _problem(6)
    fit = fit_ols(x, y)
    # Equal up to one rounding of the addition.
    assert np.all(np.abs(fit.fitted + fit.residuals - y) <= 2 * np.spacing(np.abs(y)))


def test_beta_column_uses_sample_sds():
    x, y = _problem(7)
    fit = fit_ols(x, y)
    for j, row in enumerate(fit.slopes):
        assert row.beta == pytest.approx(row.b * x[:, j].std(ddof=1) / y.std(ddof=1), rel=1e-12)
    assert fit.coef(CONSTANT).beta == 0.0


def test_standardized_betas_worked_example():
    # b = 0.741 with sd(x) = 4.29 and sd(y) = 22.42 gives 0.1418.
    x, y = _problem(8, p=1)
    fit = fit_ols(x, y, names=["jsa"], response="att")
    fit.coefficients[1] = replace(fit.coefficients[1], b=0.741)
    assert standardized_betas(fit, {"jsa": 4.29, "att": 22.42})[0] == pytest.approx(0.1418, abs=1e-4)


def test_standardized_betas_rejects_zero_sd():
    x, y = _problem(9, p=1)
    fit = fit_ols(x, y, names=["a"])
    with pytest.raises(ValueError):
        standardized_betas(fit, {"a": 0.0, "y": 1.0})


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000), st.floats(0.01, 1e4), st.floats(-1e3, 1e3))
def test_standardized_betas_invariant_to_affine_rescaling(seed, scale, shift):
    x, y = _problem(seed)
    base = standardized_betas(fit_ols(x, y))
    moved = x.copy()
    moved[:, 0] = moved[:, 0] * scale + shift
    again = standardized_betas(fit_ols(moved, y))
    assert np.allclose(base, again, rtol=1e-7, atol=1e-9)


def test_betas_from_correlations_matches_refit():
    x, y = _problem(10)
    z = np.column_stack([x, y])
    r = np.corrcoef(z, rowvar=False)
    beta = betas_from_correlations(r[:3, :3], r[:3, 3])
    assert np.allclose(beta, standardized_betas(fit_ols(x, y)), rtol=1e-10)


def test_betas_from_correlations_validation():
    with pytest.raises(ValueError, match="positive definite"):
        betas_from_correlations([[1, 1.2], [1.2, 1]], [0.1, 0.2])
    with pytest.raises(ValueError, match="symmetric"):
        betas_from_correlations([[1, 0.2], [0.3, 1]], [0.1, 0.2])
    with pytest.raises(ValueError, match="diagonal"):
        betas_from_correlations([[2, 0.2], [0.2, 1]], [0.1, 0.2])


def test_adjusted_r2():
    assert adjusted_r2(0.198, 4880, 6) == pytest.approx(1 - 0.802 * 4879 / 4873, rel=1e-15)
    with pytest.raises(ValueError):
        adjusted_r2(0.5, 7, 6)


def test_predict():
    assert predict({"a": 2.0, "b": -1.0}, {"a": 3.0, "b": 4.0, "c": 9.0}, intercept=0.5) == 2.5
    with pytest.raises(ValueError, match="b"):
        predict({"a": 2.0, "b": -1.0}, {"a": 3.0})


def test_vif_against_auxiliary_regressions():
    rng = np.random.default_rng(11)
    x = rng.normal(size=(200, 3))
    x[:, 2] = x[:, 0] + 0.3 * rng.normal(size=200)
    vif = variance_inflation(x, ["a", "b", "c"])
    for j, name in enumerate("abc"):
        others = np.column_stack([np.ones(200), np.delete(x, j, axis=1)])
        coef, *_ = np.linalg.lstsq(others, x[:, j], rcond=None)
        resid = x[:, j] - others @ coef
        r2 = 1 - resid @ resid / np.sum((x[:, j] - x[:, j].mean()) ** 2)
        assert vif[name] == pytest.approx(1 / (1 - r2), rel=1e-9)
    assert vif["b"] < 1.2 < vif["a"]


def test_vif_single_predictor():
    assert variance_inflation(np.arange(5.0)[:, None], ["a"]) == {"a": 1.0}


def test_diagnostics_shapes():
    x, y = _problem(12, n=120)
    fit = fit_ols(x, y)
    diag = diagnostics(fit, bins=12)
    assert len(diag.residual_histogram) == 12
    assert sum(c for _, _, c in diag.residual_histogram) == 120
    assert len(diag.resid_vs_fitted) == 120
    assert set(diag.vif) == {"x1", "x2", "x3"}
    g1, g2 = sps.skew(fit.residuals), sps.kurtosis(fit.residuals)
    assert diag.skewness == pytest.approx(g1, rel=1e-9) and diag.excess_kurtosis == pytest.approx(g2, rel=1e-9)


def test_diagnostics_exact_fit_single_bin():
    x = np.arange(12.0)
    fit = fit_ols(x[:, None], 3 * x - 2)
    diag = diagnostics(fit)
    assert len(diag.residual_histogram) == 1 and diag.residual_histogram[0][2] == 12
    assert diag.skewness == 0.0 and diag.excess_kurtosis is None


def test_diagnostics_bins_validated():
    x, y = _problem(13)
    with pytest.raises(ValueError):
        diagnostics(fit_ols(x, y), bins=0)


def test_condition_number_grows_with_collinearity():
    rng = np.random.default_rng(14)
    a = rng.normal(size=100)
    y = rng.normal(size=100)
    loose = fit_ols(np.column_stack([a, rng.normal(size=100)]), y)
    tight = fit_ols(np.column_stack([a, a + 1e-4 * rng.normal(size=100)]), y)
    assert tight.condition > 100 * loose.condition
