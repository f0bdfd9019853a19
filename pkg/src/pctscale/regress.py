"""Least squares on percentage scales.

When the dependent variable and every predictor sit on 0-1 percentage scales
(0-or-1 for dummies), the OLS slope is the percentage coefficient ``b_p``:
the change in the DV, as a fraction of its conceptual range, per full-range
change of the predictor.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from statistics import NormalDist
from typing import Mapping, Optional, Sequence

import numpy as np
from scipy import linalg

from .errors import EmptyGroup, InsufficientRows, RankDeficient, ZeroVariance
from .percentize import PercentizedDataset, percentize_value
from .scales import ScaleAnchor

INTERCEPT = "intercept"
RANK_TOL = 1e-10


@dataclass(frozen=True)
class DesignMatrix:
    """Complete-case design: DV vector plus named predictor columns.

    The intercept is implicit and always leads the fitted coefficients.
    ``dummies`` names the 0/1 predictors, which keep their coding under the
    0-100 POMP view of a fit.
    """

    names: tuple
    X: np.ndarray
    y: np.ndarray
    dv_name: str = "y"
    dv_anchor: Optional[ScaleAnchor] = None
    iv_anchors: Mapping[str, Optional[ScaleAnchor]] = field(default_factory=dict)
    dummies: frozenset = frozenset()
    rows_dropped: int = 0

    def __post_init__(self):
        names = tuple(self.names)
        X = np.asarray(self.X, dtype=float).reshape(len(self.y), len(names))
        y = np.asarray(self.y, dtype=float)
        if len(set(names)) != len(names):
            raise ValueError("duplicate predictor names")
        if INTERCEPT in names:
            raise ValueError(f"{INTERCEPT!r} is reserved for the constant column")
        if np.isnan(X).any() or np.isnan(y).any():
            raise ValueError("design contains missing values; apply listwise deletion first")
        n, k = len(y), len(names) + 1
        if n < k + 1:
            raise InsufficientRows(f"{n} complete rows cannot estimate {k} coefficients with residual df >= 1")
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "iv_anchors", dict(self.iv_anchors))
        object.__setattr__(self, "dummies", frozenset(self.dummies))

    @classmethod
    def from_columns(cls, y, predictors: Mapping[str, Sequence[float]], dv_name="y", **kwargs):
        """Build a design with listwise deletion of rows holding any NaN."""
        y = np.asarray(y, dtype=float)
        names = tuple(predictors)
        X = np.column_stack([np.asarray(predictors[k], dtype=float) for k in names]) if names else np.empty((len(y), 0))
        keep = ~np.isnan(y) & ~np.isnan(X).any(axis=1)
        return cls(names, X[keep], y[keep], dv_name, rows_dropped=int((~keep).sum()), **kwargs)

    @property
    def n(self) -> int:
        return len(self.y)

    @property
    def matrix(self) -> np.ndarray:
        """Predictors with the leading constant column."""
        return np.column_stack([np.ones(self.n), self.X])

    @property
    def column_names(self) -> tuple:
        return (INTERCEPT,) + self.names


def build_design(
    data: PercentizedDataset,
    dv: str,
    predictors: Sequence[str],
    rows: Optional[np.ndarray] = None,
) -> DesignMatrix:
    """Assemble a complete-case design from percentized columns.

    ``rows`` optionally restricts the fit to a boolean row mask before
    listwise deletion (used to fit several equations on one sample).
    """
    y = np.asarray(data[dv], dtype=float)
    cols = {p: np.asarray(data[p], dtype=float) for p in predictors}
    if rows is not None:
        y = y[rows]
        cols = {k: v[rows] for k, v in cols.items()}
    return DesignMatrix.from_columns(
        y,
        cols,
        dv_name=dv,
        dv_anchor=data.anchor_of(dv),
        iv_anchors={p: data.anchor_of(p) for p in predictors},
        dummies={p for p in predictors if data.is_dummy(p)},
    )


@dataclass(frozen=True)
class BpRegressionResult:
    names: tuple
    coefficients: dict
    standard_errors: dict
    covariance: np.ndarray
    r_squared: float
    residual_variance: float
    n_used: int
    df_resid: int
    residuals: np.ndarray = field(repr=False)
    dv_name: str = "y"
    dv_anchor: Optional[ScaleAnchor] = None
    iv_anchors: dict = field(default_factory=dict)
    dummies: frozenset = frozenset()
    rows_dropped: int = 0

    @property
    def predictors(self) -> tuple:
        return self.names[1:]

    def conf_int(self, level: float = 0.95) -> dict:
        """Normal-theory intervals ``b +/- z * se``."""
        z = NormalDist().inv_cdf(0.5 + level / 2)
        return {
            k: (self.coefficients[k] - z * self.standard_errors[k], self.coefficients[k] + z * self.standard_errors[k])
            for k in self.names
        }

    def wald_contrast(self, first: str, second: str) -> tuple[float, float, float, float]:
        """Difference of two coefficients with its SE, z and two-sided p.

        A convenience test: equal units make the difference meaningful, but
        no particular test for comparing two b_p values is prescribed by the
        percentage framework itself.
        """
        i, j = self.names.index(first), self.names.index(second)
        diff = self.coefficients[first] - self.coefficients[second]
        var = self.covariance[i, i] + self.covariance[j, j] - 2 * self.covariance[i, j]
        se = float(np.sqrt(max(var, 0.0)))
        z = diff / se if se > 0 else float("nan")
        p = 2 * (1 - NormalDist().cdf(abs(z))) if se > 0 else float("nan")
        return diff, se, z, p


def fit_ols(design: DesignMatrix) -> BpRegressionResult:
    """Fit by column-pivoted Householder QR.

    Raises :class:`RankDeficient` naming the columns the pivoting pushed
    past the numerical rank (``|R_ii| <= 1e-10 * |R_00|``).
    """
    A = design.matrix
    y = design.y
    n, k = A.shape
    Q, R, piv = linalg.qr(A, mode="economic", pivoting=True)
    diag = np.abs(np.diag(R))
    rank = int(np.sum(diag > RANK_TOL * diag[0])) if diag[0] > 0 else 0
    if rank < k:
        cols = design.column_names
        raise RankDeficient([cols[i] for i in piv[rank:]])

    beta = np.empty(k)
    beta[piv] = linalg.solve_triangular(R, Q.T @ y)
    resid = y - A @ beta
    rss = float(resid @ resid)
    df = n - k
    sigma2 = rss / df
    r_inv = linalg.solve_triangular(R, np.eye(k))
    cov = np.empty((k, k))
    cov[np.ix_(piv, piv)] = sigma2 * (r_inv @ r_inv.T)

    centered = y - y.mean()
    tss = float(centered @ centered)
    if tss == 0:
        raise ZeroVariance(design.dv_name)
    r2 = min(max(1.0 - rss / tss, 0.0), 1.0)

    names = design.column_names
    se = np.sqrt(np.diag(cov))
    return BpRegressionResult(
        names=names,
        coefficients={nm: float(b) for nm, b in zip(names, beta)},
        standard_errors={nm: float(s) for nm, s in zip(names, se)},
        covariance=cov,
        r_squared=r2,
        residual_variance=sigma2,
        n_used=n,
        df_resid=df,
        residuals=resid,
        dv_name=design.dv_name,
        dv_anchor=design.dv_anchor,
        iv_anchors=dict(design.iv_anchors),
        dummies=design.dummies,
        rows_dropped=design.rows_dropped,
    )


def _affine(anchor: Optional[ScaleAnchor]) -> tuple[float, float]:
    # percentized = offset + slope * raw
    if anchor is None:
        return 0.0, 1.0
    slope = anchor.target_span / anchor.span
    return anchor.target_min - anchor.c_n * slope, slope


def rescale_coefficient(b_raw: float, iv_anchor: ScaleAnchor, dv_anchor: ScaleAnchor) -> float:
    """Convert a raw-scale slope to the slope on the anchors' target scales.

    With 0-1 targets this is ``b_raw * (IV conceptual range) / (DV conceptual range)``.
    """
    _, iv_slope = _affine(iv_anchor)
    _, dv_slope = _affine(dv_anchor)
    return b_raw * dv_slope / iv_slope


def rescale_result(
    raw: BpRegressionResult,
    iv_anchors: Mapping[str, Optional[ScaleAnchor]],
    dv_anchor: ScaleAnchor,
) -> dict:
    """All coefficients of a raw-scale fit re-expressed on percentage scales.

    Predictors mapped to ``None`` are dummies and keep their 0/1 coding.
    """
    dv_off, dv_slope = _affine(dv_anchor)
    out = {}
    shift = 0.0
    for name in raw.predictors:
        off, slope = _affine(iv_anchors.get(name))
        b = raw.coefficients[name]
        out[name] = b * dv_slope / slope
        shift += b * off / slope
    intercept = dv_off + dv_slope * (raw.coefficients[INTERCEPT] - shift)
    return {INTERCEPT: intercept, **out}


def pomp_coefficients(result: BpRegressionResult) -> dict:
    """Coefficients as they read with the DV and numerical IVs on 0-100.

    Numerical slopes are unchanged since both sides scale by 100; dummy
    slopes and the intercept scale by 100 with the DV.
    """
    if result.dv_anchor is not None and result.dv_anchor.target != (0.0, 1.0):
        raise ValueError("POMP view needs a fit on 0-1 percentage scales")
    out = {}
    for name in result.names:
        b = result.coefficients[name]
        out[name] = b * 100 if (name == INTERCEPT or name in result.dummies) else b
    return out


def standardized_coefficients(design: DesignMatrix) -> dict:
    """Beta weights from z-scored DV and predictors (sample SD, ddof=1)."""
    def z(values, name):
        sd = values.std(ddof=1)
        if not sd > 0:
            raise ZeroVariance(name)
        return (values - values.mean()) / sd

    zy = z(design.y, design.dv_name)
    zX = np.column_stack([z(design.X[:, j], nm) for j, nm in enumerate(design.names)])
    fit = fit_ols(DesignMatrix(design.names, zX, zy, design.dv_name))
    return {nm: fit.coefficients[nm] for nm in design.names}


@dataclass(frozen=True)
class PercentDifference:
    estimate: float
    standard_error: float
    n_treatment: int
    n_control: int
    mean_treatment: float
    mean_control: float


def percent_difference(treatment_dv, control_dv, dv_anchor: ScaleAnchor) -> PercentDifference:
    """Treatment minus control mean of the percentized DV.

    The estimate is in DV-fraction units (x100 for percentage points). The
    standard error is the pooled-variance two-sample one, which coincides
    with the classical OLS error of a 0/1 group dummy. Missing values are
    dropped.
    """
    t = np.asarray(treatment_dv, dtype=float)
    c = np.asarray(control_dv, dtype=float)
    t = np.asarray(percentize_value(t[~np.isnan(t)], dv_anchor))
    c = np.asarray(percentize_value(c[~np.isnan(c)], dv_anchor))
    if t.size == 0 or c.size == 0:
        raise EmptyGroup("both groups need at least one non-missing observation")
    n1, n0 = t.size, c.size
    est = float(t.mean() - c.mean())
    df = n1 + n0 - 2
    if df > 0:
        ss = float(((t - t.mean()) ** 2).sum() + ((c - c.mean()) ** 2).sum())
        se = float(np.sqrt(ss / df * (1 / n1 + 1 / n0)))
    else:
        se = float("nan")
    return PercentDifference(est, se, n1, n0, float(t.mean()), float(c.mean()))
