"""The eight confidence intervals for the LP impulse response."""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .bootstrap import BootstrapDraws, Scheme, critical_value_sym, quantile_pair_equal_tail
from .errors import MismatchedDraws
from .lp import LpFit, SeKind
from .numerics import normal_quantile


class IntervalMethod(str, enum.Enum):
    RB = "RB"
    RB_PER_T = "RB_per_t"
    RB_HC3 = "RB_hc3"
    WB = "WB"
    WB_PER_T = "WB_per_t"
    AA = "AA"
    AA_HC2 = "AA_hc2"
    AA_HC3 = "AA_hc3"


@dataclass(frozen=True)
class MethodRule:
    # "normal", "symmetric" (bootstrap |root| quantile) or "percentile_t"
    critical: str
    se_kind: SeKind
    scheme: Scheme | None = None


METHOD_RULES: dict[IntervalMethod, MethodRule] = {
    IntervalMethod.RB: MethodRule("symmetric", SeKind.HC, Scheme.RESIDUAL),
    IntervalMethod.RB_PER_T: MethodRule("percentile_t", SeKind.HC, Scheme.RESIDUAL),
    IntervalMethod.RB_HC3: MethodRule("symmetric", SeKind.HC3, Scheme.RESIDUAL),
    IntervalMethod.WB: MethodRule("symmetric", SeKind.HC, Scheme.WILD),
    IntervalMethod.WB_PER_T: MethodRule("percentile_t", SeKind.HC, Scheme.WILD),
    IntervalMethod.AA: MethodRule("normal", SeKind.HC),
    IntervalMethod.AA_HC2: MethodRule("normal", SeKind.HC2),
    IntervalMethod.AA_HC3: MethodRule("normal", SeKind.HC3),
}

ALL_METHODS = tuple(IntervalMethod)


def parse_method(name) -> IntervalMethod:
    if isinstance(name, IntervalMethod):
        return name
    key = str(name).strip().replace("-", "_").lower()
    for m in IntervalMethod:
        if m.value.lower() == key or m.name.lower() == key:
            return m
    raise ValueError(f"unknown interval method {name!r}")


@dataclass(frozen=True)
class ConfidenceInterval:
    lower: float
    upper: float
    method: IntervalMethod
    h: int
    level: float
    center: float

    @property
    def length(self) -> float:
        return self.upper - self.lower


def build_interval(fit: LpFit, method, alpha: float, draws: BootstrapDraws | None = None) -> ConfidenceInterval:
    """Interval of level 1 - alpha around the LP estimate ``fit.beta_hat``.

    Bootstrap methods need ``draws`` made with the matching scheme and SE kind
    (see ``METHOD_RULES``).
    """
    method = parse_method(method)
    rule = METHOD_RULES[method]
    beta = fit.beta_hat
    se = fit.se(rule.se_kind)

    if rule.critical == "normal":
        z = normal_quantile(1.0 - alpha / 2.0)
        lower, upper = beta - z * se, beta + z * se
    else:
        if draws is None:
            raise MismatchedDraws(f"{method.value} needs bootstrap draws")
        if draws.scheme != rule.scheme or draws.se_kind != rule.se_kind or draws.h != fit.h:
            raise MismatchedDraws(
                f"{method.value} needs {rule.scheme.value}+{rule.se_kind.value} draws at h={fit.h}, "
                f"got {draws.scheme.value}+{draws.se_kind.value} at h={draws.h}"
            )
        if rule.critical == "symmetric":
            c = critical_value_sym(draws, alpha)
            lower, upper = beta - c * se, beta + c * se
        else:
            q_lo, q_hi = quantile_pair_equal_tail(draws, alpha)
            lower, upper = beta - q_hi * se, beta - q_lo * se
    if not lower <= upper:
        raise AssertionError(f"inverted interval for {method.value}: [{lower}, {upper}]")
    return ConfidenceInterval(lower, upper, method, fit.h, 1.0 - alpha, beta)


def covers(ci: ConfidenceInterval, beta_true: float) -> bool:
    """Closed-interval coverage indicator."""
    return ci.lower <= beta_true <= ci.upper
