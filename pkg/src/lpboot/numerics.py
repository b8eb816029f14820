"""Small numeric primitives used throughout the package.

Everything here is a pure function of its arguments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import ndtr

from .errors import DomainError, EmptyInput, SingularDesign

# determinant <= GRAM_RTOL * (trace/2)**2 counts as singular
GRAM_RTOL = 1e-14


@dataclass(frozen=True)
class Ls2Solution:
    coef: np.ndarray
    residuals: np.ndarray
    gram_ok: bool = True


def gram_is_singular(a, b, c):
    """Singularity test for the symmetric 2x2 Gram matrix [[a, b], [b, c]].

    Works elementwise on arrays. The ratio det / (trace/2)**2 is a cheap proxy
    for the inverse condition number of a 2x2 SPD matrix.
    """
    det = a * c - b * b
    half_trace = 0.5 * (a + c)
    return det <= GRAM_RTOL * half_trace * half_trace


def solve_ls2(x1, x2, y) -> Ls2Solution:
    """Least squares of ``y`` on two columns, no intercept.

    Solves the 2x2 normal equations in closed form.

    Raises
    ------
    SingularDesign
        If the Gram matrix is (numerically) singular.
    """
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    y = np.asarray(y, dtype=float)
    if not (x1.ndim == x2.ndim == y.ndim == 1) or not (len(x1) == len(x2) == len(y)):
        raise ValueError("x1, x2 and y must be 1-d vectors of equal length")
    if len(y) < 2:
        raise ValueError("need at least two observations")

    a = x1 @ x1
    b = x1 @ x2
    c = x2 @ x2
    if gram_is_singular(a, b, c):
        raise SingularDesign("2x2 Gram matrix is singular or ill-conditioned")
    det = a * c - b * b
    r1 = x1 @ y
    r2 = x2 @ y
    coef = np.array([(c * r1 - b * r2) / det, (a * r2 - b * r1) / det])
    resid = y - coef[0] * x1 - coef[1] * x2
    return Ls2Solution(coef=coef, residuals=resid, gram_ok=True)


def solve_ls1(x, y) -> float:
    """Slope of a no-intercept regression of ``y`` on ``x``: sum(x*y) / sum(x*x)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1 or len(x) < 1:
        raise ValueError("x and y must be nonempty 1-d vectors of equal length")
    sxx = x @ x
    if sxx == 0.0:
        raise SingularDesign("regressor is identically zero")
    return float((x @ y) / sxx)


def normal_cdf(x):
    """Standard normal CDF; accepts scalars or arrays."""
    return ndtr(x)


# Acklam's rational approximation to the inverse normal CDF
_A = (-3.969683028665376e01, 2.209460984245205e02, -2.759285104469687e02,
      1.383577518672690e02, -3.066479806614716e01, 2.506628277459239e00)
_B = (-5.447609879822406e01, 1.615858368580409e02, -1.556989798598866e02,
      6.680131188771972e01, -1.328068155288572e01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e00,
      -2.549732539343734e00, 4.374664141464968e00, 2.938163982698783e00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e00,
      3.754408661907416e00)
_P_LOW = 0.02425
_SQRT_2PI = math.sqrt(2.0 * math.pi)


def _acklam_lower(p: float) -> float:
    # valid for 0 < p <= 0.5
    if p < _P_LOW:
        q = math.sqrt(-2.0 * math.log(p))
        num = ((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]
        den = (((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0
        return num / den
    q = p - 0.5
    r = q * q
    num = (((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]) * q
    den = ((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0
    return num / den


def normal_quantile(p: float) -> float:
    """Inverse standard normal CDF.

    Acklam's approximation (relative error ~1e-9) followed by one Halley step
    against an erfc-based CDF. Exactly antisymmetric: ``q(p) == -q(1 - p)``.
    """
    p = float(p)
    if not (0.0 < p < 1.0):
        raise DomainError(f"probability must lie in (0, 1), got {p!r}")
    if p > 0.5:
        return -normal_quantile(1.0 - p)
    x = _acklam_lower(p)
    e = 0.5 * math.erfc(-x / math.sqrt(2.0)) - p
    u = e * _SQRT_2PI * math.exp(0.5 * x * x)
    return x - u / (1.0 + 0.5 * x * u)


def order_index(size: int, level: float) -> int:
    """Smallest k in 1..size with k/size >= level (1-based)."""
    k = max(1, math.ceil(size * level))
    # guard against rounding in size*level; the comparison mirrors the ECDF definition
    while k > 1 and (k - 1) / size >= level:
        k -= 1
    while k < size and k / size < level:
        k += 1
    return k


def empirical_quantile_inf(values, level: float) -> float:
    """inf{u : ECDF(u) >= level}, i.e. the ceil(B*level)-th order statistic.

    No interpolation is performed.
    """
    v = np.asarray(values, dtype=float).ravel()
    if v.size == 0:
        raise EmptyInput("empirical quantile of an empty sample")
    if not (0.0 < level < 1.0):
        raise DomainError(f"level must lie in (0, 1), got {level!r}")
    k = order_index(v.size, level)
    return float(np.partition(v, k - 1)[k - 1])


def ks_distance(sample, reference_cdf: Callable = normal_cdf) -> float:
    """Kolmogorov-Smirnov distance between the ECDF of ``sample`` and a reference CDF.

    The reference CDF is called once on the sorted sample (vectorised if it
    accepts arrays, pointwise otherwise).
    """
    x = np.sort(np.asarray(sample, dtype=float).ravel())
    m = x.size
    if m == 0:
        raise EmptyInput("KS distance of an empty sample")
    try:
        f = np.asarray(reference_cdf(x), dtype=float)
        if f.shape != x.shape:
            raise TypeError
    except (TypeError, ValueError):
        f = np.array([reference_cdf(float(xi)) for xi in x])
    i = np.arange(1, m + 1)
    d_plus = np.max(i / m - f)
    d_minus = np.max(f - (i - 1) / m)
    return float(max(d_plus, d_minus))
