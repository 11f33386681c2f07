"""Total-variation lab: exact small-deck evolution and Monte Carlo
statistic-based lower bounds.

Exact side: the full distribution over S_n (dense, indexed by lexicographic
rank) is convolved with a one-step law; the composition convention is
new_state = step_permutation o old_state, i.e. mu_{t+1}(g) = sum_sigma
q(sigma) mu_t(sigma^{-1} o g).

Monte Carlo side: trajectories start from the phi-maximizing state; at time t
the empirical law of phi is compared against fresh uniform-deck phi samples
by scanning threshold levels.  sup_c [P(phi_t > c) - P(phi_U > c)] is a
total-variation lower bound by the data-processing inequality; a normal
binomial confidence interval (z = 2.576) is attached at the maximizing level.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import backend
from .models import RUDVALIS, ShuffleModel, StepLaw, exact_step_law
from .perm import (
    DEFAULT_CAP,
    DeckState,
    Permutation,
    SizeMismatchError,
    images_array,
    perm_rank,
    rank_lookup,
)
from .spectral import TrackedStatistic, phi_max_start

Z_CI = 2.576
GRID_LIMIT = 10_000
GRID_LEVELS = 512


@dataclass(frozen=True)
class GroupDistribution:
    n: int
    mass: np.ndarray

    def __post_init__(self):
        mass = np.asarray(self.mass, dtype=np.float64)
        object.__setattr__(self, "mass", mass)
        if mass.size != math.factorial(self.n):
            raise ValueError(f"mass must have n! = {math.factorial(self.n)} entries")
        if np.any(mass < -1e-15):
            raise ValueError("negative mass")
        if abs(mass.sum() - 1.0) > 1e-10:
            raise ValueError(f"mass sums to {mass.sum()!r}")

    @classmethod
    def point(cls, d: DeckState) -> "GroupDistribution":
        n = d.n
        mass = np.zeros(math.factorial(n))
        mass[perm_rank(Permutation(d.position_of))] = 1.0
        return cls(n, mass)

    @classmethod
    def uniform(cls, n: int) -> "GroupDistribution":
        size = math.factorial(n)
        return cls(n, np.full(size, 1.0 / size))


@dataclass(frozen=True)
class TVPoint:
    t: int
    tv: float
    ci_low: float | None = None
    ci_high: float | None = None


@dataclass(frozen=True)
class TVCurve:
    rows: tuple[TVPoint, ...]

    def __post_init__(self):
        ts = [r.t for r in self.rows]
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise ValueError("curve times must be strictly increasing")
        if any(not 0.0 <= r.tv <= 1.0 + 1e-12 for r in self.rows):
            raise ValueError("tv values must lie in [0, 1]")


def tv_distance(a: GroupDistribution, b: GroupDistribution) -> float:
    if a.n != b.n:
        raise SizeMismatchError(f"tv: sizes differ ({a.n} vs {b.n})")
    return 0.5 * float(np.abs(a.mass - b.mass).sum())


class StepAction:
    """Precomputed rank-to-rank action of a step law's support."""

    def __init__(self, law: StepLaw, cap: int = DEFAULT_CAP):
        n = law.n
        imgs = images_array(n, cap)
        lookup = rank_lookup(imgs)
        self.n = n
        self.probs = law.probs
        self.tables = []
        for sigma in law.perms:
            sig = np.asarray(sigma.image, dtype=np.int64)
            composed = sig[imgs - 1]  # (sigma o g).image for every g
            self.tables.append(
                np.fromiter(
                    (lookup[row.tobytes()] for row in composed),
                    dtype=np.int64,
                    count=imgs.shape[0],
                )
            )

    def convolve(self, mass: np.ndarray) -> np.ndarray:
        out = np.zeros_like(mass)
        for q, table in zip(self.probs, self.tables):
            np.add.at(out, table, q * mass)
        return out

    def expectation_next(self, f: np.ndarray) -> np.ndarray:
        """E[f(X_{t+1}) | X_t = g] for every rank g."""
        out = np.zeros_like(f, dtype=np.float64)
        for q, table in zip(self.probs, self.tables):
            out += q * f[table]
        return out


def evolve_exact(
    q: StepLaw, t: int, start: DeckState, cap: int = DEFAULT_CAP
) -> GroupDistribution:
    """t-fold convolution applied to the point mass at ``start``."""
    if t < 0:
        raise ValueError("t must be >= 0")
    action = StepAction(q, cap)
    mass = GroupDistribution.point(start).mass
    for _ in range(t):
        mass = action.convolve(mass)
    return GroupDistribution(start.n, mass)


def exact_tv_curve(
    m: ShuffleModel,
    n: int,
    t_max: int,
    start: DeckState | None = None,
    cap: int = DEFAULT_CAP,
) -> TVCurve:
    """TV to uniform after each of 0..t_max steps from ``start``
    (default: the identity deck)."""
    if start is None:
        start = DeckState.identity(n)
    action = StepAction(exact_step_law(m, n, cap), cap)
    uniform = GroupDistribution.uniform(n).mass
    mass = GroupDistribution.point(start).mass
    rows = [TVPoint(0, 0.5 * float(np.abs(mass - uniform).sum()))]
    for t in range(1, t_max + 1):
        mass = action.convolve(mass)
        rows.append(TVPoint(t, 0.5 * float(np.abs(mass - uniform).sum())))
    return TVCurve(tuple(rows))


class MixingNotReachedError(RuntimeError):
    pass


def mixing_time_exact(
    m: ShuffleModel,
    n: int,
    delta: float,
    t_max: int = 100_000,
    cap: int = DEFAULT_CAP,
) -> int:
    """Smallest t with exact TV(t) <= delta, from the identity deck."""
    action = StepAction(exact_step_law(m, n, cap), cap)
    uniform = GroupDistribution.uniform(n).mass
    mass = GroupDistribution.point(DeckState.identity(n)).mass
    t = 0
    while True:
        tv = 0.5 * float(np.abs(mass - uniform).sum())
        if tv <= delta:
            return t
        if t >= t_max:
            raise MixingNotReachedError(
                f"TV still {tv:.4g} > {delta} after t_max={t_max} steps"
            )
        mass = action.convolve(mass)
        t += 1


# --- Monte Carlo statistic-based lower bounds -------------------------------


def threshold_scan(
    phi_chain: np.ndarray, phi_uniform: np.ndarray
) -> tuple[float, float]:
    """(sup_c [P(chain > c) - P(uniform > c)], CI half-width at the argmax).

    Grid: every distinct sampled value when the chain sample is small,
    else GRID_LEVELS quantile-spaced levels.
    """
    x = np.sort(phi_chain)
    y = np.sort(phi_uniform)
    if x.size <= GRID_LIMIT:
        grid = np.unique(np.concatenate([x, y]))
    else:
        qs = np.linspace(0.0, 1.0, GRID_LEVELS)
        grid = np.unique(np.quantile(np.concatenate([x, y]), qs))
    px = 1.0 - np.searchsorted(x, grid, side="right") / x.size
    py = 1.0 - np.searchsorted(y, grid, side="right") / y.size
    diff = px - py
    i = int(np.argmax(diff))
    var = px[i] * (1 - px[i]) / x.size + py[i] * (1 - py[i]) / y.size
    return max(float(diff[i]), 0.0), Z_CI * math.sqrt(var)


def mc_phi_curve(
    m: ShuffleModel,
    n: int,
    ts: np.ndarray,
    trials: int,
    seed: int,
    s: TrackedStatistic | None = None,
) -> TVCurve:
    """Statistic lower-bound estimates at each record time, with fresh
    uniform reference samples per time (CIs stay independent)."""
    if trials < 100:
        raise ValueError("trials must be >= 100")
    if s is None:
        s = TrackedStatistic(n)
    start, _ = phi_max_start(s)
    flags = s.tracked_flags(start)
    cosv = s.cos_table()
    kern = backend.active
    kind = backend.kind_id(m.kind)
    p = m.p if m.p is not None else 0.0
    ts = np.asarray(sorted(set(int(t) for t in ts)), dtype=np.int64)
    phis = kern.simulate_phi(
        kind, n, p, flags, cosv, ts, trials, seed, backend.STREAMS_CHAIN
    )
    rows = []
    for ti, t in enumerate(ts):
        ref = kern.uniform_phi(
            n, flags, cosv, trials, seed, backend.STREAMS_UNIFORM + int(ti) * trials
        )
        est, ci = threshold_scan(phis[:, ti], ref)
        rows.append(
            TVPoint(int(t), est, max(est - ci, 0.0), min(est + ci, 1.0))
        )
    return TVCurve(tuple(rows))


def mc_statistic_tv(
    m: ShuffleModel,
    n: int,
    t: int,
    trials: int,
    seed: int,
    s: TrackedStatistic | None = None,
) -> TVPoint:
    """Lower-bound estimate at a single time t."""
    return mc_phi_curve(m, n, np.array([t]), trials, seed, s).rows[0]


def mixing_time_proxy(
    m: ShuffleModel,
    n: int,
    delta: float,
    trials: int,
    seed: int,
    t_max: int | None = None,
    points: int = 512,
    s: TrackedStatistic | None = None,
) -> tuple[int | None, TVCurve]:
    """First recorded t at which the statistic lower bound drops below
    ``delta`` (None if it never does by t_max), plus the whole curve.

    Default horizon: 2.2x the overhand asymptotic scale n^2 ln(n)/(16 pi^2),
    or n^3 ln(n)/(8 pi^2) for rudvalis.  Rudvalis records only at whole
    blocks of n steps: the statistic co-rotates with the deck, so off-block
    times would show a spurious dip at t ~ n/4.
    """
    if t_max is None:
        if m.kind == RUDVALIS:
            t_max = int(2.2 * n**3 * math.log(n) / (8.0 * math.pi**2)) + 20
        else:
            t_max = int(2.2 * n * n * math.log(n) / (16.0 * math.pi**2)) + 20
    block = n if m.kind == RUDVALIS else 1
    stride = block * max(1, t_max // (block * points))
    ts = np.arange(stride, t_max + 1, stride, dtype=np.int64)
    if ts.size == 0:
        raise ValueError(f"t_max={t_max} leaves no record times (block {block})")
    curve = mc_phi_curve(m, n, ts, trials, seed, s)
    for row in curve.rows:
        if row.tv < delta:
            return row.t, curve
    return None, curve
