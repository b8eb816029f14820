"""Lag-augmented local projections for an AR(1) series.

At horizon ``h`` the regression is ``y_{t+h} = beta*y_t + gamma*y_{t-1} + xi_t``
for ``t = 1..n-h`` (no intercept). It is computed in the equivalent
partialled-out form: with ``rho_h = sum(y_t y_{t-1}) / sum(y_{t-1}^2)`` and
``u_t = y_t - rho_h y_{t-1}``, the columns ``(u_t, y_{t-1})`` are orthogonal and
span the same space as ``(y_t, y_{t-1})``. That gives ``beta`` as a simple
ratio, the HC standard error's ``u_t`` for free, and a closed-form leverage.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .dgp import Series
from .errors import DegenerateVariance, DomainError, HorizonTooLarge, SingularDesign
from .numerics import GRAM_RTOL, solve_ls1

MIN_OBS = 3


class SeKind(str, enum.Enum):
    HC = "HC"
    HC2 = "HC2"
    HC3 = "HC3"


@dataclass
class LpBatch:
    """Row-wise LP results for a stack of series; singular rows hold NaN."""

    beta: np.ndarray
    gamma: np.ndarray
    rho_h: np.ndarray
    se_hc: np.ndarray
    se_hc2: np.ndarray
    se_hc3: np.ndarray
    singular: np.ndarray
    xi: np.ndarray | None = None
    u: np.ndarray | None = None
    leverage: np.ndarray | None = None

    def se(self, kind: SeKind) -> np.ndarray:
        return {SeKind.HC: self.se_hc, SeKind.HC2: self.se_hc2, SeKind.HC3: self.se_hc3}[SeKind(kind)]


def check_horizon(n: int, h: int) -> None:
    if h < 1:
        raise DomainError(f"horizon must be >= 1, got {h}")
    if n - h < MIN_OBS:
        raise HorizonTooLarge(f"horizon {h} leaves {n - h} observations; need at least {MIN_OBS}")


def lp_fit_batch(Y: np.ndarray, h: int, keep_vectors: bool = False) -> LpBatch:
    """Fit the LP regression at horizon ``h`` for every row of ``Y`` (shape (B, n+1))."""
    Y = np.asarray(Y, dtype=float)
    if Y.ndim != 2:
        raise ValueError("Y must be 2-d (one series per row)")
    n = Y.shape[1] - 1
    check_horizon(n, h)
    m = n - h
    yt = Y[:, 1:m + 1]
    ylag = Y[:, :m]
    ylead = Y[:, 1 + h:]

    with np.errstate(divide="ignore", invalid="ignore"):
        syy_lag = np.einsum("ij,ij->i", ylag, ylag)
        syy = np.einsum("ij,ij->i", yt, yt)
        sxy = np.einsum("ij,ij->i", yt, ylag)
        rho_h = sxy / syy_lag
        u = yt - rho_h[:, None] * ylag
        suu = np.einsum("ij,ij->i", u, u)
        # det of the (y_t, y_{t-1}) Gram matrix equals syy_lag * suu
        half_trace = 0.5 * (syy + syy_lag)
        singular = ~(syy_lag * suu > GRAM_RTOL * half_trace * half_trace)

        beta = np.einsum("ij,ij->i", u, ylead) / suu
        delta = np.einsum("ij,ij->i", ylag, ylead) / syy_lag
        gamma = delta - beta * rho_h
        xi = ylead - beta[:, None] * u - delta[:, None] * ylag
        lev = u * u / suu[:, None] + ylag * ylag / syy_lag[:, None]

        w = xi * xi * u * u
        one_m = 1.0 - lev
        se_hc = np.sqrt(w.sum(axis=1)) / suu
        se_hc2 = np.sqrt((w / one_m).sum(axis=1)) / suu
        se_hc3 = np.sqrt((w / (one_m * one_m)).sum(axis=1)) / suu

    out = LpBatch(beta, gamma, rho_h, se_hc, se_hc2, se_hc3, singular)
    if singular.any():
        for arr in (beta, gamma, rho_h, se_hc, se_hc2, se_hc3):
            arr[singular] = np.nan
    if keep_vectors:
        out.xi, out.u, out.leverage = xi, u, lev
    return out


@dataclass(frozen=True)
class LpFit:
    h: int
    beta_hat: float
    gamma_hat: float
    xi_resid: np.ndarray
    rho_hat_h: float
    u_resid_h: np.ndarray
    se_hc: float
    se_hc2: float
    se_hc3: float
    leverage: np.ndarray

    def se(self, kind: SeKind = SeKind.HC) -> float:
        kind = SeKind(kind)
        return {SeKind.HC: self.se_hc, SeKind.HC2: self.se_hc2, SeKind.HC3: self.se_hc3}[kind]


def fit_lp(series: Series, h: int) -> LpFit:
    """LP coefficients, residuals, AR(1) coefficient over the same sample, leverage and SEs."""
    res = lp_fit_batch(series.y[None, :], h, keep_vectors=True)
    if res.singular[0]:
        raise SingularDesign(f"collinear or zero LP design at horizon {h}")
    return LpFit(
        h=h,
        beta_hat=float(res.beta[0]),
        gamma_hat=float(res.gamma[0]),
        xi_resid=res.xi[0],
        rho_hat_h=float(res.rho_h[0]),
        u_resid_h=res.u[0],
        se_hc=float(res.se_hc[0]),
        se_hc2=float(res.se_hc2[0]),
        se_hc3=float(res.se_hc3[0]),
        leverage=res.leverage[0],
    )


def hc_standard_errors(xi, u, leverage=None) -> tuple[float, float, float]:
    """(HC, HC2, HC3) standard errors of the LP slope from residual vectors.

    ``sqrt(sum(xi^2 u^2)) / sum(u^2)``; HC2 and HC3 divide ``xi^2`` by
    ``1 - P_tt`` and ``(1 - P_tt)^2`` respectively.
    """
    xi = np.asarray(xi, dtype=float)
    u = np.asarray(u, dtype=float)
    lev = np.zeros_like(u) if leverage is None else np.asarray(leverage, dtype=float)
    suu = u @ u
    if suu == 0.0:
        raise DegenerateVariance("sum of squared u residuals is zero")
    w = xi * xi * u * u
    return (
        float(np.sqrt(w.sum()) / suu),
        float(np.sqrt((w / (1.0 - lev)).sum()) / suu),
        float(np.sqrt((w / (1.0 - lev) ** 2).sum()) / suu),
    )


def rho_hat_full(series: Series) -> float:
    """Full-sample AR(1) OLS coefficient over t = 1..n."""
    y = series.y
    return solve_ls1(y[:-1], y[1:])


def impulse_response(rho: float, h: int) -> float:
    if h < 0:
        raise DomainError("horizon must be >= 0")
    return float(rho) ** int(h)


@dataclass(frozen=True)
class Root:
    value: float
    beta_hat: float
    se_used: float
    se_kind: SeKind
    beta_ref: float


def root(fit: LpFit, beta_ref: float, se_kind: SeKind = SeKind.HC) -> Root:
    se_kind = SeKind(se_kind)
    se = fit.se(se_kind)
    if not se > 0:
        raise DegenerateVariance(f"{se_kind.value} standard error is zero")
    return Root((fit.beta_hat - beta_ref) / se, fit.beta_hat, se, se_kind, float(beta_ref))
