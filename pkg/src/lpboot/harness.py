"""Monte Carlo coverage study: simulate, fit, bootstrap, build intervals, tally.

Work is split by replication. Replication ``r`` of design ``d`` draws all of
its randomness from ``RngStream(base_seed).child(d, r)``, so the outcome of a
study does not depend on how replications are scheduled. The same shocks are
used for every value of rho (common random numbers).
"""

from __future__ import annotations

import logging
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor, ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import rng as rng_labels
from .bootstrap import Scheme, bootstrap_draw_sets
from .dgp import ShockDesign, generate_shocks, paper_design, simulate_ar1
from .errors import ConfigError, LpBootError
from .intervals import ALL_METHODS, METHOD_RULES, IntervalMethod, build_interval, covers, parse_method
from .lp import MIN_OBS, SeKind, fit_lp, impulse_response
from .rng import RngStream

log = logging.getLogger(__name__)

PAPER_R = 5000
PAPER_B = 1000


@dataclass(frozen=True)
class StudyConfig:
    designs: tuple = (1,)
    rhos: tuple = (0.95, 1.0)
    n: int = 95
    horizons: tuple = (1, 6, 12, 18)
    alpha: float = 0.10
    replications: int = 1000
    bootstrap_B: int = 500
    methods: tuple = ALL_METHODS
    base_seed: int = 0
    threads: int = 1
    burn_in: int = 100
    variance_convention: str = "variance"

    def __post_init__(self):
        def as_tuple(name, value):
            if isinstance(value, (int, float, str)):
                value = [value]
            try:
                value = tuple(value)
            except TypeError:
                raise ConfigError(f"{name} must be a list", field=name) from None
            if not value:
                raise ConfigError(f"{name} must not be empty", field=name)
            return value

        object.__setattr__(self, "designs", as_tuple("designs", self.designs))
        object.__setattr__(self, "rhos", tuple(float(r) for r in as_tuple("rhos", self.rhos)))
        object.__setattr__(self, "horizons", as_tuple("horizons", self.horizons))
        try:
            methods = tuple(parse_method(m) for m in as_tuple("methods", self.methods))
        except ValueError as exc:
            raise ConfigError(str(exc), field="methods") from None
        object.__setattr__(self, "methods", methods)

        for d in self.designs:
            if d not in (1, 2, 3, 4):
                raise ConfigError(f"unknown design {d!r}; expected 1-4", field="designs")
        for r in self.rhos:
            if not -1.0 <= r <= 1.0:
                raise ConfigError(f"rho {r} outside [-1, 1]", field="rhos")
        if not isinstance(self.n, int) or self.n < MIN_OBS + 1:
            raise ConfigError(f"n must be an integer >= {MIN_OBS + 1}", field="n")
        for h in self.horizons:
            if not isinstance(h, int) or h < 1:
                raise ConfigError(f"horizon {h!r} must be a positive integer", field="horizons")
            if self.n - h < MIN_OBS:
                raise ConfigError(f"horizon {h} leaves n - h = {self.n - h} < {MIN_OBS}", field="horizons")
        if not 0.0 < self.alpha < 1.0:
            raise ConfigError(f"alpha must lie in (0, 1), got {self.alpha}", field="alpha")
        if not isinstance(self.replications, int) or self.replications < 1:
            raise ConfigError("replications must be an integer >= 1", field="replications")
        if not isinstance(self.bootstrap_B, int) or self.bootstrap_B < 2:
            raise ConfigError("bootstrap_B must be an integer >= 2", field="bootstrap_B")
        if not isinstance(self.threads, int) or self.threads < 1:
            raise ConfigError("threads must be an integer >= 1", field="threads")
        if self.burn_in < 0:
            raise ConfigError("burn_in must be >= 0", field="burn_in")
        if self.variance_convention not in ("variance", "as_printed"):
            raise ConfigError("variance_convention must be 'variance' or 'as_printed'",
                              field="variance_convention")

    def paper_scale(self) -> "StudyConfig":
        return replace(self, replications=PAPER_R, bootstrap_B=PAPER_B)

    def cells(self):
        for d in self.designs:
            for rho in self.rhos:
                yield StudyCell(
                    design_id=d,
                    design=paper_design(d, burn_in=self.burn_in,
                                        variance_convention=self.variance_convention),
                    rho=rho,
                    n=self.n,
                    horizons=tuple(sorted(self.horizons)),
                    alpha=self.alpha,
                    B=self.bootstrap_B,
                    methods=self.methods,
                    base_seed=self.base_seed,
                )


@dataclass(frozen=True)
class StudyCell:
    """One (design, rho) block; all horizons and methods share its replications."""

    design_id: int
    design: ShockDesign
    rho: float
    n: int
    horizons: tuple
    alpha: float
    B: int
    methods: tuple
    base_seed: int

    def replication_stream(self, replication_id: int) -> RngStream:
        return RngStream(self.base_seed).child(self.design_id, replication_id)


@dataclass(frozen=True)
class IntervalOutcome:
    covered: bool
    length: float
    lower: float
    upper: float


@dataclass
class ReplicationOutcome:
    replication_id: int
    intervals: dict = field(default_factory=dict)   # (h, method) -> IntervalOutcome
    failed_horizons: dict = field(default_factory=dict)   # h -> reason


def needed_draw_sets(methods) -> dict[Scheme, list[SeKind]]:
    """Bootstrap schemes and SE kinds required by a set of interval methods."""
    need: dict[Scheme, list[SeKind]] = {}
    for m in methods:
        rule = METHOD_RULES[parse_method(m)]
        if rule.scheme is not None and rule.se_kind not in need.setdefault(rule.scheme, []):
            need[rule.scheme].append(rule.se_kind)
    return need


def run_replication(cell: StudyCell, replication_id: int) -> ReplicationOutcome:
    stream = cell.replication_stream(replication_id)
    shocks = generate_shocks(cell.design, cell.n, stream.child(rng_labels.SHOCKS))
    series = simulate_ar1(cell.rho, shocks)
    out = ReplicationOutcome(replication_id)

    draw_sets = {}
    try:
        for scheme, kinds in needed_draw_sets(cell.methods).items():
            draw_sets[scheme] = bootstrap_draw_sets(series, cell.horizons, scheme, cell.B, stream, kinds)
    except LpBootError as exc:
        for h in cell.horizons:
            out.failed_horizons[h] = f"{type(exc).__name__}: {exc}"
        return out

    for h in cell.horizons:
        beta_true = impulse_response(cell.rho, h)
        try:
            fit = fit_lp(series, h)
            results = {}
            for m in cell.methods:
                rule = METHOD_RULES[m]
                draws = draw_sets[rule.scheme][(h, rule.se_kind)] if rule.scheme else None
                ci = build_interval(fit, m, cell.alpha, draws)
                results[(h, m)] = IntervalOutcome(covers(ci, beta_true), ci.length, ci.lower, ci.upper)
        except LpBootError as exc:
            out.failed_horizons[h] = f"{type(exc).__name__}: {exc}"
            continue
        out.intervals.update(results)
    return out


def _run_block(cell: StudyCell, rep_ids) -> list[ReplicationOutcome]:
    return [run_replication(cell, r) for r in rep_ids]


@dataclass(frozen=True)
class CoverageRecord:
    design: int
    rho: float
    n: int
    h: int
    method: IntervalMethod
    coverage_rate: float
    mc_se: float
    median_length: float
    failed_replications: int
    wall_time: float
    replications: int

    @property
    def coverage_pct(self) -> float:
        return 100.0 * self.coverage_rate

    @property
    def mc_se_pct(self) -> float:
        return 100.0 * self.mc_se


@dataclass
class CoverageReport:
    records: list
    config: StudyConfig | None = None

    def get(self, design: int, rho: float, h: int, method) -> CoverageRecord:
        method = parse_method(method)
        for rec in self.records:
            if rec.design == design and rec.rho == rho and rec.h == h and rec.method == method:
                return rec
        raise KeyError((design, rho, h, method))

    def __len__(self):
        return len(self.records)


def aggregate(cell: StudyCell, outcomes, wall_time: float = 0.0) -> list[CoverageRecord]:
    records = []
    for h in cell.horizons:
        failed = sum(1 for o in outcomes if h in o.failed_horizons)
        for m in cell.methods:
            vals = [o.intervals[(h, m)] for o in outcomes if (h, m) in o.intervals]
            if vals:
                p = sum(v.covered for v in vals) / len(vals)
                se = math.sqrt(p * (1.0 - p) / len(vals))
                med = float(np.median([v.length for v in vals]))
            else:
                p = se = med = float("nan")
            records.append(CoverageRecord(cell.design_id, cell.rho, cell.n, h, m, p, se, med,
                                          failed, wall_time, len(vals)))
    return records


def _blocks(total: int, size: int) -> list[range]:
    return [range(i, min(i + size, total)) for i in range(0, total, size)]


def run_study(cfg: StudyConfig, executor: str = "process", progress=None) -> CoverageReport:
    """Run every (design, rho) cell of ``cfg`` and aggregate coverage records.

    ``executor`` is "process" or "thread" and only matters when
    ``cfg.threads > 1``. Replications are gathered into indexed slots, so the
    report is identical for any worker count.
    """
    if not isinstance(cfg, StudyConfig):
        raise ConfigError("run_study needs a StudyConfig")
    if executor not in ("process", "thread"):
        raise ConfigError("executor must be 'process' or 'thread'", field="executor")
    workers = cfg.threads
    pool = None
    if workers > 1:
        pool_cls = ProcessPoolExecutor if executor == "process" else ThreadPoolExecutor
        pool = pool_cls(max_workers=workers)
    records = []
    try:
        for cell in cfg.cells():
            t0 = time.perf_counter()
            R = cfg.replications
            if pool is None:
                outcomes = _run_block(cell, range(R))
            else:
                block = max(1, min(50, math.ceil(R / (4 * workers))))
                futures = [pool.submit(_run_block, cell, ids) for ids in _blocks(R, block)]
                outcomes = [o for f in futures for o in f.result()]
            elapsed = time.perf_counter() - t0
            log.info("design %d rho %.4g: %d replications in %.1fs", cell.design_id, cell.rho, R, elapsed)
            if progress is not None:
                progress(cell, elapsed)
            records.extend(aggregate(cell, outcomes, elapsed))
    finally:
        if pool is not None:
            pool.shutdown()
    return CoverageReport(records, cfg)


def default_threads() -> int:
    env = os.environ.get("LPBOOT_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError(f"LPBOOT_THREADS must be an integer, got {env!r}", field="threads") from None
    return 1
