"""The cosine distinguishing statistic and its spectral analysis.

For a deck state with card i at position Z_i, the tracked statistic is

    phi = sum over tracked cards of cos(2*pi*Z_i / n)

with m = floor(n/2) cards tracked by default.  This module computes the
associated decay rate gamma (one minus the relevant eigenvalue), the
second-moment bounds that control phi's fluctuations, and the per-position
drift defect delta(k) measuring how far the kernel is from exact eigenvector
behavior; rho_hat aggregates the m worst defects.

Log convention: natural logs everywhere except the explicit log2 in the
single-card tail bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import backend
from .chain import position_kernel, rudvalis_nstep_kernel
from .models import RUDVALIS, ShuffleModel
from .perm import DeckState, SizeMismatchError


@dataclass(frozen=True)
class TrackedStatistic:
    n: int
    m: int = 0
    tracked: tuple[int, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.m == 0:
            object.__setattr__(self, "m", self.n // 2)
        if not self.tracked:
            object.__setattr__(self, "tracked", tuple(range(1, self.m + 1)))
        if not 1 <= self.m <= self.n:
            raise ValueError(f"m={self.m} out of 1..{self.n}")
        if len(self.tracked) != self.m or len(set(self.tracked)) != self.m:
            raise ValueError("tracked labels must be m distinct cards")
        if any(not 1 <= c <= self.n for c in self.tracked):
            raise ValueError("tracked label out of range")

    def cos_table(self) -> np.ndarray:
        """cos(2*pi*k/n) for positions k = 1..n (index k-1)."""
        return np.cos(2.0 * np.pi * np.arange(1, self.n + 1) / self.n)

    def tracked_flags(self, d: DeckState) -> np.ndarray:
        """uint8 flags per position: does a tracked card sit there."""
        flags = np.zeros(self.n, dtype=np.uint8)
        tracked = set(self.tracked)
        for card, pos in enumerate(d.position_of, start=1):
            if card in tracked:
                flags[pos - 1] = 1
        return flags


def phi(s: TrackedStatistic, d: DeckState) -> float:
    if s.n != d.n:
        raise SizeMismatchError(f"phi: sizes differ ({s.n} vs {d.n})")
    cosv = s.cos_table()
    return float(sum(cosv[d.position_of[c - 1] - 1] for c in s.tracked))


def phi_max_start(s: TrackedStatistic) -> tuple[DeckState, float]:
    """A deck state achieving the maximal phi: tracked cards on the m
    positions with the largest cosines (ties toward smaller position)."""
    n, m = s.n, s.m
    cosv = s.cos_table()
    order = np.lexsort((np.arange(1, n + 1), -cosv))
    best = [int(k) + 1 for k in order[:m]]
    rest = [int(k) + 1 for k in order[m:]]
    position_of = [0] * n
    for card, pos in zip(s.tracked, best):
        position_of[card - 1] = pos
    others = [c for c in range(1, n + 1) if c not in set(s.tracked)]
    for card, pos in zip(others, sorted(rest)):
        position_of[card - 1] = pos
    state = DeckState(tuple(position_of))
    return state, float(cosv[[b - 1 for b in best]].sum())


# --- gamma ------------------------------------------------------------------


def _series_cutoff(r: float, floor: float = 1e-22) -> int:
    return max(8, int(math.ceil(math.log(floor) / math.log(r))))


def gamma_exact(m: ShuffleModel, n: int) -> float:
    """Decay rate of the cosine statistic.

    Overhand (both conventions): gamma = 1 - c*(1 + 2*sum_k (1-p)^k cos(2 pi
    k/n)) with c = p/(2-p), the circulant eigenvalue of the single-card
    displacement law.  The linear chain uses the same value by definition;
    its deviation is carried entirely by the drift defect.

    Rudvalis: the n-step chain's rate, 1 - [cos(2 pi/n)/2 + 1/4 +
    sum_{i>=1} 2^-(2+i) cos(2 pi i/n)].
    """
    if n < 3:
        raise ValueError("gamma needs n >= 3")
    th = 2.0 * math.pi / n
    if m.kind == RUDVALIS:
        i = np.arange(1, _series_cutoff(0.5) + 1)
        tail = np.sum(0.5 ** (2 + i) * np.cos(i * th))
        return 1.0 - (0.5 * math.cos(th) + 0.25 + float(tail))
    p = m.p
    c = p / (2.0 - p)
    k = np.arange(1, _series_cutoff(1.0 - p) + 1)
    series = np.sum((1.0 - p) ** k * np.cos(k * th))
    return 1.0 - c * (1.0 + 2.0 * float(series))


def gamma_closed_form(m: ShuffleModel, n: int) -> float:
    """Geometric-cosine closed form of the same quantities (cross-check)."""
    th = 2.0 * math.pi / n

    def geo_cos(r: float) -> float:  # sum_{k>=1} r^k cos(k th)
        return (r * math.cos(th) - r * r) / (1.0 - 2.0 * r * math.cos(th) + r * r)

    if m.kind == RUDVALIS:
        return 1.0 - (0.5 * math.cos(th) + 0.25 + 0.25 * geo_cos(0.5))
    c = m.p / (2.0 - m.p)
    return 1.0 - c * (1.0 + 2.0 * geo_cos(1.0 - m.p))


# --- second moments ---------------------------------------------------------


def v_series(m: ShuffleModel, n: int) -> float:
    """Single-card variance bound.

    Overhand: 8c * sum_k (1-p)^k sin^2(2 pi k/n) (the p=1/2 series has
    coefficient 8/3).  Direct evaluation gives (1+o(1)) * 32 pi^2 (1-p)/p^2
    * n^-2; the value reported is the computed series, not any constant
    shortcut.  Rudvalis: the rotating-frame bound m_tracked * 4 / n^2 for the
    whole n-step block (at most 2/n when tracking half the deck).
    """
    if m.kind == RUDVALIS:
        return (n // 2) * 4.0 / (n * n)
    p = m.p
    c = p / (2.0 - p)
    k = np.arange(1, _series_cutoff(1.0 - p) + 1)
    th = 2.0 * math.pi / n
    return 8.0 * c * float(np.sum((1.0 - p) ** k * np.sin(k * th) ** 2))


@dataclass(frozen=True)
class SecondMoment:
    v_series: float
    r_analytic: float
    r_empirical: float


def second_moment_bound(
    s: TrackedStatistic,
    m: ShuffleModel,
    n: int,
    trials: int,
    seed: int,
    draws_per_state: int = 256,
    harvest_trajectories: int = 32,
) -> SecondMoment:
    """Analytic and empirical bounds on E[(phi' - phi)^2 | state].

    ``r_analytic``: overhand, 20 * v_series * n * ln n; rudvalis, the block
    variance bound plus the squared worst-case block drift.

    ``r_empirical``: Monte Carlo sup over ``trials`` sampled states (the
    maximal-phi start plus states harvested along seeded trajectories over a
    ~2n-step horizon), each state estimated with ``draws_per_state``
    independent one-step (one-block for rudvalis) draws.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    v = v_series(m, n)
    start, phi_hat = phi_max_start(s)
    if m.kind == RUDVALIS:
        gamma = gamma_exact(m, n)
        _, rho_hat = drift_defect(s, m, n)
        r_analytic = v + (gamma * phi_hat + rho_hat) ** 2
        block = n
    else:
        r_analytic = 20.0 * v * n * math.log(n)
        block = 1

    kern = backend.active
    kind = backend.kind_id(m.kind)
    cosv = s.cos_table()
    p = m.p if m.p is not None else 0.0
    flags0 = s.tracked_flags(start)

    states = [flags0]
    if trials > 1:
        per_traj = -(-(trials - 1) // harvest_trajectories)  # ceil
        horizon = max(2 * n, per_traj)
        stride = max(1, horizon // per_traj)
        ts = stride * np.arange(1, per_traj + 1, dtype=np.int64)
        if m.kind == RUDVALIS:
            ts = ts * n  # whole blocks
        harvested = kern.simulate_states(
            kind, n, p, flags0, ts, harvest_trajectories, seed, backend.STREAMS_CHAIN
        )
        flat = harvested.reshape(-1, n)[: trials - 1]
        states.extend(flat)

    r_emp = 0.0
    for i, st in enumerate(states):
        est = kern.phi_second_moment(
            kind,
            n,
            p,
            np.ascontiguousarray(st, dtype=np.uint8),
            cosv,
            block,
            draws_per_state,
            seed,
            backend.STREAMS_SECOND_MOMENT + i * draws_per_state,
        )
        r_emp = max(r_emp, est)
    return SecondMoment(v, r_analytic, r_emp)


# --- drift defect -----------------------------------------------------------


def drift_defect(
    s: TrackedStatistic, m: ShuffleModel, n: int
) -> tuple[np.ndarray, float]:
    """Per-position defect delta(k) = sum_j K[k,j] cos(2 pi j/n) -
    (1-gamma) cos(2 pi k/n), and rho_hat = the sum of the m largest |delta|
    (worst-case placement of the tracked cards, so the almost-sure drift
    bracket holds)."""
    if m.kind == RUDVALIS:
        K = rudvalis_nstep_kernel(n)
    else:
        K = position_kernel(m, n)
    gamma = gamma_exact(m, n)
    cosv = s.cos_table()
    delta = K.rows @ cosv - (1.0 - gamma) * cosv
    mags = np.sort(np.abs(delta))[::-1]
    rho_hat = float(mags[: s.m].sum())
    return delta, rho_hat


@dataclass(frozen=True)
class SpectralReport:
    n: int
    model: ShuffleModel
    gamma: float
    lam: float
    phi_max: float
    v_series: float
    r_analytic: float
    r_empirical: float
    defect: np.ndarray
    rho_hat: float


def spectral_report(
    m: ShuffleModel,
    n: int,
    trials: int = 1000,
    seed: int = 0,
    s: TrackedStatistic | None = None,
) -> SpectralReport:
    if s is None:
        s = TrackedStatistic(n)
    gamma = gamma_exact(m, n)
    _, phi_hat = phi_max_start(s)
    sm = second_moment_bound(s, m, n, trials=trials, seed=seed)
    delta, rho_hat = drift_defect(s, m, n)
    return SpectralReport(
        n=n,
        model=m,
        gamma=gamma,
        lam=1.0 - gamma,
        phi_max=phi_hat,
        v_series=sm.v_series,
        r_analytic=sm.r_analytic,
        r_empirical=sm.r_empirical,
        defect=delta,
        rho_hat=rho_hat,
    )
