"""Ordinary least squares with inference and residual diagnostics.

The solver is a Householder QR factorization with column pivoting written
out in numpy, so results are bit-reproducible for a fixed input and do not
depend on LAPACK threading.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from .stats import describe_skew, f_sf, summary, t_ppf, t_two_tailed

CONSTANT = "Constant"
RANK_TOL = 1e-10


class RankDeficient(ValueError):
    """The design matrix is (numerically) rank deficient."""

    def __init__(self, column: str, ratio: float) -> None:
        super().__init__(f"design is rank deficient: column {column!r} is linearly dependent "
                         f"(pivot ratio {ratio:.3g})")
        self.column = column
        self.ratio = ratio


@dataclass(frozen=True)
class DesignSpec:
    response: str
    predictors: tuple[str, ...]
    include_intercept: bool = True

    def __post_init__(self) -> None:
        if not self.predictors:
            raise ValueError("at least one predictor is required")
        if len(set(self.predictors)) != len(self.predictors):
            raise ValueError("predictor names must be distinct")
        if self.response in self.predictors:
            raise ValueError(f"response {self.response!r} is also a predictor")


@dataclass(frozen=True)
class CoefficientRow:
    name: str
    b: float
    se: float
    ci_low: float
    ci_high: float
    beta: float
    t_stat: float
    p_two_tailed: float


@dataclass
class RegressionFit:
    spec: DesignSpec
    coefficients: list[CoefficientRow]
    n: int
    df_model: int
    df_resid: int
    r2: float
    adj_r2: float
    f_stat: float
    p_f: float
    residuals: np.ndarray
    fitted: np.ndarray
    # Centered R^2 (about the mean of y) and uncentered R^2 (about 0). With an
    # intercept ``r2`` is the centered one; without, it is the uncentered one.
    r2_centered: float = math.nan
    r2_uncentered: float = math.nan
    condition: float = math.nan
    ss_resid: float = math.nan
    sd: Mapping[str, float] = field(default_factory=dict)
    design: Optional[np.ndarray] = field(default=None, repr=False)
    observed: Optional[np.ndarray] = field(default=None, repr=False)

    def coef(self, name: str) -> CoefficientRow:
        for row in self.coefficients:
            if row.name == name:
                return row
        raise KeyError(name)

    @property
    def b(self) -> dict[str, float]:
        return {row.name: row.b for row in self.coefficients}

    @property
    def slopes(self) -> list[CoefficientRow]:
        return [row for row in self.coefficients if row.name != CONSTANT]


@dataclass
class Diagnostics:
    residual_histogram: list[tuple[float, float, int]]
    skewness: float
    excess_kurtosis: Optional[float]
    resid_vs_fitted: list[tuple[float, float]]
    vif: dict[str, float]


# -- linear algebra --------------------------------------------------------


def _householder_qr(a: np.ndarray, names: Sequence[str]):
    """Pivoted Householder QR of ``a`` (n x p, n >= p).

    Returns (reflectors, R, perm). Each reflector is (v, beta) acting on rows
    k: of the working matrix. Raises RankDeficient when a pivot falls below
    RANK_TOL times the leading pivot.
    """
    a = np.array(a, dtype=float, copy=True)
    n, p = a.shape
    perm = list(range(p))
    reflectors = []
    lead = None
    for k in range(p):
        norms = np.einsum("ij,ij->j", a[k:, k:], a[k:, k:])
        j = k + int(np.argmax(norms))
        if j != k:
            a[:, [k, j]] = a[:, [j, k]]
            perm[k], perm[j] = perm[j], perm[k]
        x = a[k:, k]
        alpha = math.sqrt(float(x @ x))
        if lead is None:
            lead = alpha
        if lead == 0.0 or alpha <= RANK_TOL * lead:
            ratio = 0.0 if lead == 0.0 else alpha / lead
            raise RankDeficient(names[perm[k]], ratio)
        v = x.copy()
        v[0] += math.copysign(alpha, x[0]) if x[0] != 0 else alpha
        vnorm2 = float(v @ v)
        beta = 2.0 / vnorm2
        a[k:, k:] -= beta * np.outer(v, v @ a[k:, k:])
        reflectors.append((v, beta))
    r = np.triu(a[:p, :p])
    return reflectors, r, perm


def _apply_qt(reflectors, y: np.ndarray) -> np.ndarray:
    y = np.array(y, dtype=float, copy=True)
    for k, (v, beta) in enumerate(reflectors):
        y[k:] -= beta * v * float(v @ y[k:])
    return y


def _back_substitute(r: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    p = r.shape[0]
    x = np.zeros(p)
    for i in range(p - 1, -1, -1):
        x[i] = (rhs[i] - float(r[i, i + 1:] @ x[i + 1:])) / r[i, i]
    return x


def _r_inverse(r: np.ndarray) -> np.ndarray:
    p = r.shape[0]
    eye = np.eye(p)
    return np.column_stack([_back_substitute(r, eye[:, i]) for i in range(p)])


# -- fitting ---------------------------------------------------------------


def _as_design(
    x,
    names: Optional[Sequence[str]],
) -> tuple[np.ndarray, tuple[str, ...]]:
    if isinstance(x, Mapping):
        names = tuple(x) if names is None else tuple(names)
        cols = [np.asarray(x[name], dtype=float) for name in names]
        return np.column_stack(cols), names
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    if names is None:
        names = tuple(f"x{i + 1}" for i in range(arr.shape[1]))
    if len(names) != arr.shape[1]:
        raise ValueError(f"{len(names)} names for {arr.shape[1]} columns")
    return arr, tuple(names)


def fit_ols(
    x,
    y: Sequence[float],
    names: Optional[Sequence[str]] = None,
    intercept: bool = True,
    response: str = "y",
    level: float = 0.95,
) -> RegressionFit:
    """Fit y = X b (+ constant) by least squares.

    Parameters
    ----------
    x : array (n, p) or mapping name -> column
        Predictor columns, without a constant column.
    y : sequence
        Response.
    names : sequence of str, optional
        Predictor names (defaults to mapping keys or x1..xp).
    intercept : bool
        Prepend a ``Constant`` column.
    level : float
        Confidence level of the coefficient intervals.

    Raises
    ------
    RankDeficient
        If a column is linearly dependent on earlier pivoted columns.
    ValueError
        If there are not more observations than parameters.
    """
    xp, names = _as_design(x, names)
    yv = np.asarray(y, dtype=float)
    n, p = xp.shape
    if yv.shape != (n,):
        raise ValueError(f"response has shape {yv.shape}, expected ({n},)")
    spec = DesignSpec(response, names, intercept)
    full_names = ((CONSTANT,) if intercept else ()) + names
    design = np.column_stack([np.ones(n), xp]) if intercept else xp
    k = design.shape[1]
    if n <= k:
        raise ValueError(f"need more observations ({n}) than parameters ({k})")

    reflectors, r, perm = _householder_qr(design, full_names)
    qty = _apply_qt(reflectors, yv)
    b_perm = _back_substitute(r, qty[:k])
    b = np.empty(k)
    b[perm] = b_perm

    fitted = design @ b
    resid = yv - fitted
    sse = math.fsum(resid * resid)
    df_resid = n - k
    s2 = sse / df_resid
    rinv = _r_inverse(r)
    cov_perm = rinv @ rinv.T
    cov = np.empty_like(cov_perm)
    cov[np.ix_(perm, perm)] = cov_perm
    se = np.sqrt(np.diag(cov) * s2)

    y_mean = math.fsum(yv) / n
    sst_c = math.fsum((yv - y_mean) ** 2)
    sst_u = math.fsum(yv * yv)
    r2_c = 1.0 - sse / sst_c if sst_c > 0 else math.nan
    r2_u = 1.0 - sse / sst_u if sst_u > 0 else math.nan
    df_model = p
    if intercept:
        r2 = r2_c
        adj = adjusted_r2(r2, n, p)
        ss_model = sst_c - sse
    else:
        r2 = r2_u
        adj = 1.0 - (1.0 - r2) * n / df_resid
        ss_model = sst_u - sse
    if sse == 0.0:
        f_stat, p_f = math.inf, 0.0
    else:
        f_stat = (ss_model / df_model) / s2
        p_f = f_sf(max(f_stat, 0.0), df_model, df_resid)

    sds = {name: _sd(xp[:, i]) for i, name in enumerate(names)}
    sds[response] = _sd(yv)
    tcrit = t_ppf(0.5 + level / 2.0, df_resid)
    rows = []
    for i, name in enumerate(full_names):
        bi, sei = float(b[i]), float(se[i])
        if sei > 0:
            t = bi / sei
            pval = t_two_tailed(t, df_resid)
        else:
            t = math.copysign(math.inf, bi) if bi != 0 else 0.0
            pval = 0.0 if bi != 0 else 1.0
        if name == CONSTANT or sds[response] == 0:
            beta = 0.0
        else:
            beta = bi * sds[name] / sds[response]
        rows.append(CoefficientRow(name, bi, sei, bi - tcrit * sei, bi + tcrit * sei, beta, t, pval))

    diag_r = np.abs(np.diag(r))
    return RegressionFit(
        spec=spec,
        coefficients=rows,
        n=n,
        df_model=df_model,
        df_resid=df_resid,
        r2=r2,
        adj_r2=adj,
        f_stat=f_stat,
        p_f=p_f,
        residuals=resid,
        fitted=fitted,
        r2_centered=r2_c,
        r2_uncentered=r2_u,
        condition=float(diag_r.max() / diag_r.min()),
        ss_resid=sse,
        sd=sds,
        design=xp,
        observed=yv,
    )


def _sd(col: np.ndarray) -> float:
    return summary(col.tolist()).sd


def adjusted_r2(r2: float, n: int, p: int) -> float:
    """R^2 adjusted for p predictors (plus an intercept) on n observations."""
    if n - p - 1 <= 0:
        raise ValueError(f"adjusted R^2 undefined for n={n}, p={p}")
    return 1.0 - (1.0 - r2) * (n - 1) / (n - p - 1)


def standardized_betas(fit: RegressionFit, sds: Optional[Mapping[str, float]] = None) -> list[float]:
    """Slopes rescaled to standard-deviation units: b_j * sd(x_j) / sd(y).

    ``sds`` maps predictor names and the response name to sample SDs; it
    defaults to the SDs of the data the model was fitted on.
    """
    sds = fit.sd if sds is None else sds
    sd_y = sds[fit.spec.response]
    out = []
    for row in fit.slopes:
        sd_x = sds[row.name]
        if sd_x <= 0 or sd_y <= 0:
            raise ValueError(f"standard deviations must be positive ({row.name}: {sd_x}, y: {sd_y})")
        out.append(row.b * sd_x / sd_y)
    return out


def betas_from_correlations(rxx, rxy) -> list[float]:
    """Standardized coefficients from a correlation matrix: solve Rxx beta = rxy.

    Rxx must be symmetric with a unit diagonal and positive definite; the
    system is solved through its Cholesky factor.
    """
    rxx = np.asarray(rxx, dtype=float)
    rxy = np.asarray(rxy, dtype=float)
    p = rxx.shape[0]
    if rxx.shape != (p, p) or rxy.shape != (p,):
        raise ValueError("rxx must be p x p and rxy length p")
    if not np.allclose(rxx, rxx.T, atol=1e-12):
        raise ValueError("correlation matrix is not symmetric")
    if not np.allclose(np.diag(rxx), 1.0, atol=1e-12):
        raise ValueError("correlation matrix must have a unit diagonal")
    try:
        chol = np.linalg.cholesky(rxx)
    except np.linalg.LinAlgError as exc:
        raise ValueError("correlation matrix is not positive definite") from exc
    z = np.linalg.solve(chol, rxy)
    return np.linalg.solve(chol.T, z).tolist()


def predict(coeffs: Mapping[str, float], row: Mapping[str, float], intercept: float = 0.0) -> float:
    """intercept + sum_j b_j x_j over the named coefficients."""
    missing = [name for name in coeffs if name not in row]
    if missing:
        raise ValueError(f"row lacks values for: {', '.join(missing)}")
    return intercept + math.fsum(b * row[name] for name, b in coeffs.items())


# -- diagnostics -----------------------------------------------------------


def variance_inflation(x, names: Optional[Sequence[str]] = None) -> dict[str, float]:
    """VIF_j = 1 / (1 - R_j^2) from regressing each predictor on the others.

    Computed as SST_j / SSE_j so near-collinear predictors report a large
    finite value instead of cancelling to infinity.
    """
    xp, names = _as_design(x, names)
    out = {}
    for j, name in enumerate(names):
        target = xp[:, j]
        others = np.delete(xp, j, axis=1)
        dev = target - target.mean()
        sst = float(dev @ dev)
        if others.shape[1] == 0:
            out[name] = 1.0
            continue
        design = np.column_stack([np.ones(len(target)), others])
        reflectors, r, perm = _householder_qr(design, (CONSTANT,) + tuple(n for n in names if n != name))
        qty = _apply_qt(reflectors, target)
        # Residual sum of squares is the norm of Q^T y beyond the first k rows.
        tail = qty[design.shape[1]:]
        sse = float(tail @ tail)
        out[name] = math.inf if sse == 0.0 else sst / sse
    return out


def diagnostics(fit: RegressionFit, bins: int = 30) -> Diagnostics:
    """Residual histogram, moment shape statistics, residual-vs-fitted pairs and VIFs."""
    if bins < 1:
        raise ValueError(f"bins must be >= 1, got {bins}")
    resid = np.asarray(fit.residuals, dtype=float)
    scale = max(1.0, float(np.max(np.abs(fit.observed)))) if fit.observed is not None else 1.0
    lo, hi = float(resid.min()), float(resid.max())
    if hi - lo <= 1e-12 * scale:
        hist = [(lo, hi, int(resid.size))]
        skew, kurt = 0.0, None
    else:
        counts, edges = np.histogram(resid, bins=bins, range=(lo, hi))
        hist = [(float(edges[i]), float(edges[i + 1]), int(counts[i])) for i in range(bins)]
        skew, kurt = describe_skew(resid.tolist())
    pairs = list(zip(np.asarray(fit.fitted).tolist(), resid.tolist()))
    vif = variance_inflation(fit.design, fit.spec.predictors) if fit.design is not None else {}
    return Diagnostics(hist, skew, kurt, pairs, vif)
