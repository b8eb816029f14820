"""LP-residual and LP-wild bootstrap for the studentized LP root.

Both schemes rebuild AR(1) paths from the full-sample OLS coefficient and the
centered OLS residuals; they differ only in how the bootstrap shocks are made
(i.i.d. resampling vs. multiplying each residual, in place, by a standard
normal). Each draw ``b`` has its own random stream, derived from the caller's
stream as ``child(scheme_label, b, attempt)``, so results do not depend on how
draws are scheduled. Attempt 0 is the regular draw; attempts 1.. are redraws
after a degenerate LP fit.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import rng as rng_labels
from .dgp import Series, ar1_paths
from .errors import EmptyInput, TooManyDegenerateDraws
from .lp import SeKind, check_horizon, impulse_response, lp_fit_batch, rho_hat_full
from .numerics import empirical_quantile_inf
from .rng import RngStream

MAX_REDRAWS = 10
MAX_FAILED_FRACTION = 0.01


class Scheme(str, enum.Enum):
    RESIDUAL = "Residual"
    WILD = "Wild"


_SCHEME_LABEL = {Scheme.RESIDUAL: rng_labels.RESIDUAL, Scheme.WILD: rng_labels.WILD}


@dataclass(frozen=True)
class BootstrapSpec:
    scheme: Scheme = Scheme.RESIDUAL
    B: int = 1000
    se_kind: SeKind = SeKind.HC
    rng: RngStream = field(default_factory=lambda: RngStream(0))

    def __post_init__(self):
        object.__setattr__(self, "scheme", Scheme(self.scheme))
        object.__setattr__(self, "se_kind", SeKind(self.se_kind))
        if self.B < 2:
            raise ValueError("need at least 2 bootstrap draws")


@dataclass(frozen=True)
class BootstrapDraws:
    roots: np.ndarray
    rho_hat: float
    beta_center: float
    h: int
    scheme: Scheme
    se_kind: SeKind
    redraws: int = 0
    failed: int = 0


def centered_residuals(series: Series) -> np.ndarray:
    """OLS residuals y_t - rho_hat * y_{t-1} (t = 1..n) minus their mean."""
    rho = rho_hat_full(series)
    y = series.y
    u = y[1:] - rho * y[:-1]
    return u - u.mean()


def _draw_shocks(scheme: Scheme, centered: np.ndarray, stream: RngStream) -> np.ndarray:
    gen = stream.generator()
    n = centered.size
    if scheme is Scheme.RESIDUAL:
        return centered[gen.integers(0, n, size=n)]
    return centered * gen.standard_normal(n)


def bootstrap_sample_residual(rho_hat: float, centered, rng: RngStream, indices=None) -> Series:
    """One residual-bootstrap path; ``indices`` overrides the resampling (testing hook)."""
    centered = np.asarray(centered, dtype=float)
    if centered.size == 0:
        raise EmptyInput("no residuals to resample")
    if indices is None:
        shocks = _draw_shocks(Scheme.RESIDUAL, centered, rng)
    else:
        shocks = centered[np.asarray(indices)]
    return Series(ar1_paths(rho_hat, shocks))


def bootstrap_sample_wild(rho_hat: float, centered, rng: RngStream, multipliers=None) -> Series:
    """One wild-bootstrap path; ``multipliers`` overrides the normal draws (testing hook)."""
    centered = np.asarray(centered, dtype=float)
    if centered.size == 0:
        raise EmptyInput("no residuals to resample")
    if multipliers is None:
        shocks = _draw_shocks(Scheme.WILD, centered, rng)
    else:
        shocks = centered * np.asarray(multipliers, dtype=float)
    return Series(ar1_paths(rho_hat, shocks))


def _chunks(total: int, parts: int) -> list[range]:
    parts = max(1, min(parts, total))
    step = math.ceil(total / parts)
    return [range(i, min(i + step, total)) for i in range(0, total, step)]


def bootstrap_draw_sets(
    series: Series,
    horizons,
    scheme: Scheme,
    B: int,
    rng: RngStream,
    se_kinds=(SeKind.HC,),
    threads: int = 1,
) -> dict[tuple[int, SeKind], BootstrapDraws]:
    """Bootstrap roots for several horizons and SE kinds from one set of B paths.

    Returns a mapping ``(h, se_kind) -> BootstrapDraws``. The paths do not
    depend on the horizon, so every horizon sees the same B samples (except
    for redraws of fits that are degenerate at that horizon).
    """
    scheme = Scheme(scheme)
    se_kinds = [SeKind(k) for k in se_kinds]
    horizons = list(horizons)
    if B < 2:
        raise ValueError("need at least 2 bootstrap draws")
    for h in horizons:
        check_horizon(series.n, h)

    rho = rho_hat_full(series)
    centered = centered_residuals(series)
    label = _SCHEME_LABEL[scheme]

    def draw_rows(rows) -> np.ndarray:
        S = np.empty((len(rows), series.n))
        for i, b in enumerate(rows):
            S[i] = _draw_shocks(scheme, centered, rng.child(label, b, 0))
        return ar1_paths(rho, S)

    def run_chunk(rows: range):
        Y = draw_rows(rows)
        out = {}
        for h in horizons:
            center = impulse_response(rho, h)
            fit = lp_fit_batch(Y, h)
            roots = {k: (fit.beta - center) / fit.se(k) for k in se_kinds}
            bad = fit.singular | ~(fit.se_hc > 0)
            for k in se_kinds:
                bad |= ~np.isfinite(roots[k])
            redraws = 0
            failed = np.zeros(len(rows), dtype=bool)
            for i in np.flatnonzero(bad):
                b = rows[i]
                for attempt in range(1, MAX_REDRAWS + 1):
                    redraws += 1
                    s = _draw_shocks(scheme, centered, rng.child(label, b, attempt))
                    f1 = lp_fit_batch(ar1_paths(rho, s)[None, :], h)
                    r1 = {k: (f1.beta[0] - center) / f1.se(k)[0] for k in se_kinds}
                    if not f1.singular[0] and f1.se_hc[0] > 0 and all(np.isfinite(v) for v in r1.values()):
                        for k in se_kinds:
                            roots[k][i] = r1[k]
                        break
                else:
                    failed[i] = True
            out[h] = (roots, redraws, failed)
        return out

    chunks = _chunks(B, threads)
    if len(chunks) == 1:
        results = [run_chunk(chunks[0])]
    else:
        with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
            results = list(pool.map(run_chunk, chunks))

    draws = {}
    for h in horizons:
        failed = np.concatenate([r[h][2] for r in results])
        n_failed = int(failed.sum())
        redraws = sum(r[h][1] for r in results)
        if n_failed > MAX_FAILED_FRACTION * B:
            raise TooManyDegenerateDraws(
                f"{n_failed} of {B} bootstrap draws degenerate at horizon {h} "
                f"after {MAX_REDRAWS} redraws each"
            )
        for k in se_kinds:
            roots = np.concatenate([r[h][0][k] for r in results])[~failed]
            roots.setflags(write=False)
            draws[(h, k)] = BootstrapDraws(
                roots=roots,
                rho_hat=rho,
                beta_center=impulse_response(rho, h),
                h=h,
                scheme=scheme,
                se_kind=k,
                redraws=redraws,
                failed=n_failed,
            )
    return draws


def bootstrap_roots(series: Series, h: int, spec: BootstrapSpec, threads: int = 1) -> BootstrapDraws:
    """B bootstrap roots (beta* - rho_hat^h) / se* at horizon ``h``."""
    sets = bootstrap_draw_sets(series, [h], spec.scheme, spec.B, spec.rng, [spec.se_kind], threads)
    return sets[(h, spec.se_kind)]


def critical_value_sym(draws: BootstrapDraws, alpha: float) -> float:
    """(1 - alpha) empirical quantile of |roots| (infimum definition)."""
    return empirical_quantile_inf(np.abs(draws.roots), 1.0 - alpha)


def quantile_pair_equal_tail(draws: BootstrapDraws, alpha: float) -> tuple[float, float]:
    """Signed-root quantiles at alpha/2 and 1 - alpha/2."""
    lo = empirical_quantile_inf(draws.roots, alpha / 2.0)
    hi = empirical_quantile_inf(draws.roots, 1.0 - alpha / 2.0)
    return lo, hi
