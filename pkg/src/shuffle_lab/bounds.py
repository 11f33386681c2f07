"""Executable lower-bound lemmas and the Chebyshev threshold certificate.

Given a statistic phi with maximum phi_max, decay rate gamma in (0, 1/2), a
second-moment bound r on its one-step increments, and (for the extended form)
an almost-sure drift defect rho, these produce the largest T such that the
chain is still at total variation >= 1 - eps from stationarity for all
t <= T, together with the concrete threshold test that witnesses it.

All logs are natural.  T <= 0 is a vacuous-but-valid result (the guarantee
set is empty), never an error; gamma >= 1/2 is a hard error because the
variance recursion needs 1 - 2*gamma >= 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

_PI2 = math.pi * math.pi


class InapplicableLemmaError(ValueError):
    """The lemma hypothesis gamma in (0, 1/2) fails."""


@dataclass(frozen=True)
class BoundInputs:
    phi_max: float
    r: float
    gamma: float
    eps: float
    rho: float = 0.0

    def __post_init__(self):
        if not 0.0 < self.gamma < 0.5:
            raise InapplicableLemmaError(
                f"gamma={self.gamma!r} outside (0, 1/2); the lemma does not apply"
            )
        if self.r <= 0.0:
            raise ValueError("r must be positive")
        if self.rho < 0.0:
            raise ValueError("rho must be >= 0")
        if not 0.0 < self.eps < 1.0:
            raise ValueError("eps must lie in (0, 1)")
        if self.phi_max <= 0.0:
            raise ValueError("phi_max must be positive")


@dataclass(frozen=True)
class BoundResult:
    t_real: float
    t_steps: int
    threshold: float
    eps: float
    vacuous: bool

    @property
    def guarantee(self) -> str:
        if self.vacuous:
            return "vacuous (T < 0): no step is certified"
        return f"TV >= {1.0 - self.eps} for all t <= {self.t_steps}"


def wilson_T(b: BoundInputs) -> BoundResult:
    """T = (log phi_max - (1/2) log(4r/(gamma eps))) / (-log(1-gamma));
    requires rho = 0.  Threshold sqrt(r/(gamma eps))."""
    if b.rho != 0.0:
        raise ValueError("wilson_T requires rho = 0 (use extended_T)")
    t = (
        math.log(b.phi_max) - 0.5 * math.log(4.0 * b.r / (b.gamma * b.eps))
    ) / -math.log1p(-b.gamma)
    return BoundResult(
        t_real=t,
        t_steps=math.floor(t),
        threshold=math.sqrt(b.r / (b.gamma * b.eps)),
        eps=b.eps,
        vacuous=t < 0.0,
    )


def extended_T(b: BoundInputs) -> BoundResult:
    """T = (log phi_max - log(2 rho/gamma + sqrt(4(r + 6 rho phi_max)/
    (gamma eps)))) / (-log(1-gamma)); reduces to wilson_T at rho = 0.
    Threshold rho/gamma + sqrt((r + 6 rho phi_max)/(gamma eps))."""
    core = (b.r + 6.0 * b.rho * b.phi_max) / (b.gamma * b.eps)
    inner = 2.0 * b.rho / b.gamma + math.sqrt(4.0 * core)
    t = (math.log(b.phi_max) - math.log(inner)) / -math.log1p(-b.gamma)
    return BoundResult(
        t_real=t,
        t_steps=math.floor(t),
        threshold=b.rho / b.gamma + math.sqrt(core),
        eps=b.eps,
        vacuous=t < 0.0,
    )


@dataclass(frozen=True)
class Certificate:
    cut_level: float
    separation: float
    t: int
    t_max: float
    guaranteed: bool

    @property
    def statement(self) -> str:
        if not self.guaranteed:
            return f"no guarantee at t={self.t} (T={self.t_max:.6g})"
        return (
            f"P_t(phi > {self.cut_level:.6g}) >= 1 - eps/2 and "
            f"P_uniform(phi > {self.cut_level:.6g}) <= eps/2, "
            f"so TV >= {self.separation:.6g} at t={self.t}"
        )


def threshold_certificate(b: BoundInputs, t: int) -> Certificate:
    """The concrete distinguishing test behind the bound: the event
    {phi > c} has probability >= 1 - eps/2 under the chain at any t <= T and
    <= eps/2 under stationarity (two Chebyshev budgets of eps/2 each)."""
    res = extended_T(b)
    guaranteed = (not res.vacuous) and t <= res.t_real
    return Certificate(
        cut_level=res.threshold,
        separation=1.0 - b.eps,
        t=t,
        t_max=res.t_real,
        guaranteed=guaranteed,
    )


# --- closed-form asymptotic bounds ------------------------------------------


def overhand_theorem_coefficient(p: float) -> float:
    """p^2 (2-p) / (8 pi^2 (1-p^2)); equals 1/(16 pi^2) at p = 1/2."""
    return p * p * (2.0 - p) / (8.0 * _PI2 * (1.0 - p * p))


def overhand_displacement_coefficient(p: float) -> float:
    """Coefficient implied by the two-sided geometric displacement law,
    p^2 / (8 pi^2 (1-p)): gamma = 4 pi^2 (1-p)/(p^2 n^2) and T ~ (ln n)/
    (2 gamma).  Coincides with the theorem coefficient at p = 1/2; the two
    are reported side by side and agreement is asserted only at p = 1/2."""
    return p * p / (8.0 * _PI2 * (1.0 - p))


@dataclass(frozen=True)
class AsymptoticBounds:
    theorem31: float
    theorem33: float
    rudvalis: float


def asymptotic_bounds(n: int, p: float | None = None) -> AsymptoticBounds:
    """Closed-form lower-bound values at deck size n (natural log):
    overhand circular / linear (identical formulas) and rudvalis
    n^3 ln(n) / (8 pi^2).  Overhand values need p."""
    if n < 2:
        raise ValueError("asymptotic bounds need n >= 2")
    rud = n**3 * math.log(n) / (8.0 * _PI2)
    if p is None:
        return AsymptoticBounds(math.nan, math.nan, rud)
    if not 0.0 < p < 1.0:
        raise ValueError("p must lie in (0, 1)")
    ov = overhand_theorem_coefficient(p) * n * n * math.log(n)
    return AsymptoticBounds(ov, ov, rud)
