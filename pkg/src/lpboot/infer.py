"""Impulse-response intervals for a single observed series."""

from __future__ import annotations

from dataclasses import dataclass

from .bootstrap import bootstrap_draw_sets
from .dgp import Series
from .errors import ConfigError
from .harness import needed_draw_sets
from .intervals import METHOD_RULES, IntervalMethod, build_interval, parse_method
from .lp import MIN_OBS, fit_lp
from .rng import RngStream


@dataclass(frozen=True)
class InferenceRow:
    h: int
    method: IntervalMethod
    level: float
    beta_hat: float
    se: float
    lower: float
    upper: float


@dataclass
class InferenceResult:
    rows: list
    n: int
    rho_hat: float | None = None

    def __len__(self):
        return len(self.rows)


def infer(series: Series, horizons, alpha: float = 0.10, methods=("RB",), B: int = 1000,
          seed: int = 0, threads: int = 1) -> InferenceResult:
    """Build the requested intervals at each horizon for one series."""
    methods = [parse_method(m) for m in methods]
    horizons = sorted(int(h) for h in horizons)
    for h in horizons:
        if h < 1 or series.n - h < MIN_OBS:
            raise ConfigError(
                f"horizon {h} is not valid for a series with n = {series.n} (need 1 <= h <= n - {MIN_OBS})",
                field="horizons",
            )
    stream = RngStream(seed)
    draw_sets = {
        scheme: bootstrap_draw_sets(series, horizons, scheme, B, stream, kinds, threads)
        for scheme, kinds in needed_draw_sets(methods).items()
    }
    rows = []
    rho_hat = None
    for h in horizons:
        fit = fit_lp(series, h)
        for m in methods:
            rule = METHOD_RULES[m]
            draws = draw_sets[rule.scheme][(h, rule.se_kind)] if rule.scheme else None
            if draws is not None:
                rho_hat = draws.rho_hat
            ci = build_interval(fit, m, alpha, draws)
            rows.append(InferenceRow(h, m, 1.0 - alpha, fit.beta_hat, fit.se(rule.se_kind), ci.lower, ci.upper))
    return InferenceResult(rows, series.n, rho_hat)
