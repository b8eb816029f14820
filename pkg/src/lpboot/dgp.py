"""Shock designs and the AR(1) recursion.

Shocks follow a GARCH(1,1) scheme ``u_t = tau_t v_t`` with
``tau_t^2 = omega0 + omega1 u_{t-1}^2 + omega2 tau_{t-1}^2``; the four shipped
designs differ in the law of ``v_t`` and in the GARCH coefficients.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import lfilter

from .errors import ConfigError, DomainError
from .rng import RngStream


class Innovation(str, enum.Enum):
    GAUSSIAN = "gaussian"
    STUDENT_T4 = "student_t4"
    MIXTURE = "mixture"


@dataclass(frozen=True)
class MixtureParams:
    """Raw (unscaled) two-component normal mixture; component 1 has probability ``p``."""

    p: float = 0.25
    m0: float = 2.0
    m1: float = -6.0
    s0: float = 0.5
    s1: float = 2.0


VARIANCE_CONVENTIONS = ("variance", "as_printed")


@dataclass(frozen=True)
class ShockDesign:
    innovation: Innovation = Innovation.GAUSSIAN
    omega0: float = 1.0
    omega1: float = 0.0
    omega2: float = 0.0
    burn_in: int = 100
    mixture: MixtureParams = field(default_factory=MixtureParams)
    # how the s_j terms enter the mixture normaliser: as variances (s_j**2,
    # unit-variance v) or linearly, exactly as the formula is typeset
    variance_convention: str = "variance"
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "innovation", Innovation(self.innovation))
        if not self.omega0 > 0:
            raise ConfigError("omega0 must be positive", field="omega0")
        if self.omega1 < 0 or self.omega2 < 0:
            raise ConfigError("GARCH coefficients must be nonnegative", field="omega1")
        if self.omega1 + self.omega2 >= 1:
            raise ConfigError("omega1 + omega2 must be < 1", field="omega1")
        if self.burn_in < 0:
            raise ConfigError("burn_in must be >= 0", field="burn_in")
        if self.variance_convention not in VARIANCE_CONVENTIONS:
            raise ConfigError(
                f"variance_convention must be one of {VARIANCE_CONVENTIONS}",
                field="variance_convention",
            )
        mp = self.mixture
        if self.innovation is Innovation.MIXTURE and not (0 < mp.p < 1 and mp.s0 > 0 and mp.s1 > 0):
            raise ConfigError("mixture needs 0 < p < 1 and positive scales", field="mixture")

    @property
    def unconditional_variance(self) -> float:
        """Variance of tau_t^2 at the GARCH fixed point (assumes E v^2 = 1)."""
        return self.omega0 / (1.0 - self.omega1 - self.omega2)

    @property
    def mixture_scale(self) -> float:
        """The normaliser sigma_2 that divides the raw mixture draws."""
        mp = self.mixture
        if self.variance_convention == "variance":
            s0, s1 = mp.s0**2, mp.s1**2
        else:
            s0, s1 = mp.s0, mp.s1
        return math.sqrt(mp.p * (mp.m1**2 + s1) + (1.0 - mp.p) * (mp.m0**2 + s0))


def paper_design(k: int, *, burn_in: int = 100, variance_convention: str = "variance") -> ShockDesign:
    """Designs 1-4 of the coverage study.

    1: Gaussian i.i.d.; 2: Gaussian GARCH; 3: t4/sqrt(2) i.i.d.;
    4: skewed normal-mixture GARCH.
    """
    garch = dict(omega0=0.05, omega1=0.3, omega2=0.65)
    iid = dict(omega0=1.0, omega1=0.0, omega2=0.0)
    table = {
        1: dict(innovation=Innovation.GAUSSIAN, **iid),
        2: dict(innovation=Innovation.GAUSSIAN, **garch),
        3: dict(innovation=Innovation.STUDENT_T4, **iid),
        4: dict(innovation=Innovation.MIXTURE, **garch),
    }
    if k not in table:
        raise ConfigError(f"unknown design {k!r}; expected one of 1, 2, 3, 4", field="designs")
    return ShockDesign(burn_in=burn_in, variance_convention=variance_convention,
                       name=f"design{k}", **table[k])


def draw_innovations(design: ShockDesign, size: int, gen: np.random.Generator) -> np.ndarray:
    """``size`` i.i.d. draws of v_t with mean 0 and (nominally) variance 1.

    Draw order per call: Gaussian -> one standard_normal block; Student-t ->
    standard_normal block then chisquare(4) block; mixture -> uniform block
    (component labels) then standard_normal block.
    """
    kind = design.innovation
    if kind is Innovation.GAUSSIAN:
        return gen.standard_normal(size)
    if kind is Innovation.STUDENT_T4:
        z = gen.standard_normal(size)
        chi2 = gen.chisquare(4.0, size)
        # t4 has variance 2
        return z / np.sqrt(chi2 / 4.0) / math.sqrt(2.0)
    mp = design.mixture
    comp = gen.random(size) < mp.p
    z = gen.standard_normal(size)
    raw = np.where(comp, mp.m1 + mp.s1 * z, mp.m0 + mp.s0 * z)
    return raw / design.mixture_scale


def draw_innovation(design: ShockDesign, rng: RngStream) -> float:
    return float(draw_innovations(design, 1, rng.generator())[0])


def garch_filter(design: ShockDesign, v: np.ndarray) -> np.ndarray:
    """Run the GARCH(1,1) recursion over innovations ``v`` (no burn-in removed).

    tau_1^2 starts at the unconditional variance.
    """
    v = np.asarray(v, dtype=float)
    if design.omega1 == 0.0 and design.omega2 == 0.0:
        return math.sqrt(design.omega0) * v
    w0, w1, w2 = design.omega0, design.omega1, design.omega2
    u = np.empty_like(v)
    tau2 = design.unconditional_variance
    prev_u = 0.0
    for t, vt in enumerate(v.tolist()):
        if t:
            tau2 = w0 + w1 * prev_u * prev_u + w2 * tau2
        prev_u = math.sqrt(tau2) * vt
        u[t] = prev_u
    return u


def generate_shocks(design: ShockDesign, n: int, rng: RngStream, innovations=None) -> np.ndarray:
    """Shocks u_1..u_n after discarding ``design.burn_in`` start-up periods.

    ``innovations`` (length burn_in + n) replaces the random draws; it exists
    for testing.
    """
    if n < 1:
        raise DomainError("n must be >= 1")
    total = design.burn_in + n
    if innovations is None:
        v = draw_innovations(design, total, rng.generator())
    else:
        v = np.asarray(innovations, dtype=float)
        if v.shape != (total,):
            raise ValueError(f"innovations must have length burn_in + n = {total}")
    return garch_filter(design, v)[design.burn_in:]


@dataclass(frozen=True)
class Series:
    """An observed or simulated path y_0, ..., y_n.

    Simulated paths start at y_0 = 0; ingested data use the first observation
    as y_0.
    """

    y: np.ndarray
    rho_true: float | None = None

    def __post_init__(self):
        y = np.asarray(self.y, dtype=float)
        if y.ndim != 1 or y.size < 2:
            raise ValueError("a series needs at least two values (y_0 and y_1)")
        y.setflags(write=False)
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return self.y.size - 1

    def scaled(self, c: float) -> "Series":
        return Series(c * self.y, self.rho_true)


def _check_rho(rho: float) -> float:
    rho = float(rho)
    if abs(rho) > 1.0 + 1e-12:
        raise DomainError(f"|rho| must be <= 1, got {rho!r}")
    return max(-1.0, min(1.0, rho))


def ar1_paths(rho: float, shocks: np.ndarray) -> np.ndarray:
    """Batch AR(1) recursion along the last axis, prepending y_0 = 0.

    ``shocks`` of shape (..., n) gives paths of shape (..., n + 1). ``rho`` is
    not range-checked here; bootstrap coefficients may exceed one slightly.
    """
    shocks = np.asarray(shocks, dtype=float)
    out = np.zeros(shocks.shape[:-1] + (shocks.shape[-1] + 1,))
    out[..., 1:] = lfilter([1.0], [1.0, -float(rho)], shocks, axis=-1)
    return out


def simulate_ar1(rho: float, shocks) -> Series:
    """y_0 = 0 and y_t = rho * y_{t-1} + shocks[t-1]."""
    shocks = np.asarray(shocks, dtype=float)
    if shocks.ndim != 1 or shocks.size == 0:
        raise ValueError("shocks must be a nonempty vector")
    rho = _check_rho(rho)
    return Series(ar1_paths(rho, shocks), rho_true=rho)
