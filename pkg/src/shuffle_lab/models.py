"""The three shuffle step rules: exact samplers and exact small-n step laws.

Models
------
overhand
    i.i.d. Bernoulli(p) cutpoints in the n-1 slots between adjacent cards
    split the deck into packets; every packet is reversed in place (packet
    order unchanged).
circular
    Same rule on the circle: the deck's top and bottom are adjacent, slots
    1..n (slot n between position n and position 1), patterns conditioned on
    at least one cut (zero-cut draws are resampled).  Each maximal arc between
    consecutive cuts is reversed in place on the circle.
rudvalis
    Fair coin: move the bottom card (coin 0) or the card above it (coin 1) to
    the top of the deck.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .perm import (
    DEFAULT_CAP,
    DeckState,
    Permutation,
    SizeMismatchError,
    apply_perm,
    perm_rank,
)
from .rng import Stream

OVERHAND = "overhand"
CIRCULAR = "circular"
RUDVALIS = "rudvalis"
KINDS = (OVERHAND, CIRCULAR, RUDVALIS)


@dataclass(frozen=True)
class ShuffleModel:
    kind: str
    p: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown shuffle kind {self.kind!r}")
        if self.kind == RUDVALIS:
            if self.p is not None:
                raise ValueError("rudvalis takes no cut probability")
        else:
            if self.p is None or not (0.0 < self.p < 1.0):
                raise ValueError(
                    f"{self.kind} needs a cut probability strictly in (0,1), got {self.p}"
                )


def overhand(p: float) -> ShuffleModel:
    return ShuffleModel(OVERHAND, p)


def circular_overhand(p: float) -> ShuffleModel:
    return ShuffleModel(CIRCULAR, p)


def rudvalis() -> ShuffleModel:
    return ShuffleModel(RUDVALIS)


@dataclass(frozen=True)
class CutPattern:
    n: int
    slots: tuple[bool, ...]
    circular: bool = False

    def __post_init__(self):
        object.__setattr__(self, "slots", tuple(bool(s) for s in self.slots))
        want = self.n if self.circular else self.n - 1
        if len(self.slots) != want:
            raise ValueError(
                f"pattern needs {want} slots for n={self.n} "
                f"({'circular' if self.circular else 'linear'}), got {len(self.slots)}"
            )
        if self.circular and not any(self.slots):
            raise ValueError("circular pattern must carry at least one cut")


# --- position maps ----------------------------------------------------------


def overhand_position_map(c: CutPattern) -> tuple[int, ...]:
    """dest[k-1] = new position of the occupant of position k (1-based)."""
    if c.circular:
        raise ValueError("linear pattern required")
    n = c.n
    dest = [0] * n
    start = 1
    for s in range(1, n):  # slot s between positions s and s+1
        if c.slots[s - 1]:
            for z in range(start, s + 1):
                dest[z - 1] = start + s - z
            start = s + 1
    for z in range(start, n + 1):
        dest[z - 1] = start + n - z
    return tuple(dest)


def circular_position_map(c: CutPattern) -> tuple[int, ...]:
    """Arc-reversal map: an occupant at position z in the arc that starts
    after cut slot a and ends at cut slot b moves to a+b+1-z (mod n)."""
    if not c.circular:
        raise ValueError("circular pattern required")
    n = c.n
    cuts = [s for s in range(1, n + 1) if c.slots[s - 1]]
    dest = [0] * n
    for i, a in enumerate(cuts):
        b = cuts[i + 1] if i + 1 < len(cuts) else cuts[0] + n
        for z in range(a + 1, b + 1):
            d = (a + b + 1 - z - 1) % n + 1
            dest[(z - 1) % n] = d
    return tuple(dest)


def rudvalis_position_map(n: int, coin: int) -> tuple[int, ...]:
    """coin 0: bottom card to top; coin 1: the card above it to top."""
    if n < 2:
        raise ValueError("rudvalis needs n >= 2")
    if coin == 0:
        # position n -> 1, everything else shifts down one
        return tuple([k + 1 for k in range(1, n)] + [1])
    dest = [k + 1 for k in range(1, n - 1)] + [1, n]
    return tuple(dest)


def overhand_step(d: DeckState, c: CutPattern) -> DeckState:
    if d.n != c.n:
        raise SizeMismatchError(f"step: sizes differ ({d.n} vs {c.n})")
    return apply_perm(Permutation(overhand_position_map(c)), d)


def circular_overhand_step(d: DeckState, c: CutPattern) -> DeckState:
    if d.n != c.n:
        raise SizeMismatchError(f"step: sizes differ ({d.n} vs {c.n})")
    return apply_perm(Permutation(circular_position_map(c)), d)


def rudvalis_step(d: DeckState, coin: int) -> DeckState:
    return apply_perm(Permutation(rudvalis_position_map(d.n, coin)), d)


# --- samplers ---------------------------------------------------------------


def draw_linear_pattern(n: int, p: float, stream: Stream) -> CutPattern:
    """One u64 per slot, in slot order."""
    return CutPattern(n, tuple(stream.uniform() < p for _ in range(n - 1)))


def draw_circular_pattern(n: int, p: float, stream: Stream) -> CutPattern:
    """n draws per attempt; zero-cut attempts are discarded and redrawn."""
    while True:
        slots = tuple(stream.uniform() < p for _ in range(n))
        if any(slots):
            return CutPattern(n, slots, circular=True)


def draw_coin(stream: Stream) -> int:
    return stream.next_u64() >> 63


def sample_step(m: ShuffleModel, d: DeckState, stream: Stream) -> DeckState:
    if m.kind == OVERHAND:
        return overhand_step(d, draw_linear_pattern(d.n, m.p, stream))
    if m.kind == CIRCULAR:
        return circular_overhand_step(d, draw_circular_pattern(d.n, m.p, stream))
    return rudvalis_step(d, draw_coin(stream))


# --- exact one-step law over S_n -------------------------------------------


@dataclass(frozen=True)
class StepLaw:
    perms: tuple[Permutation, ...]
    probs: np.ndarray

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=np.float64)
        object.__setattr__(self, "probs", probs)
        if len(self.perms) != probs.size:
            raise ValueError("entry count mismatch")
        if np.any(probs < 0):
            raise ValueError("negative probability in step law")
        if abs(probs.sum() - 1.0) > 1e-12:
            raise ValueError(f"step law sums to {probs.sum()!r}, not 1")

    @property
    def n(self) -> int:
        return self.perms[0].n


def _merged_law(n: int, weighted: list[tuple[tuple[int, ...], float]]) -> StepLaw:
    acc: dict[tuple[int, ...], float] = {}
    for img, w in weighted:
        acc[img] = acc.get(img, 0.0) + w
    entries = sorted(acc.items(), key=lambda kv: perm_rank(Permutation(kv[0])))
    return StepLaw(
        tuple(Permutation(img) for img, _ in entries),
        np.array([w for _, w in entries]),
    )


def exact_step_law(m: ShuffleModel, n: int, cap: int = DEFAULT_CAP) -> StepLaw:
    """Enumerate every cut pattern / coin; duplicate permutations merged,
    entries in rank order."""
    if n > cap:
        from .perm import CapExceededError

        raise CapExceededError(f"exact step law: n={n} exceeds cap {cap}")
    weighted: list[tuple[tuple[int, ...], float]] = []
    if m.kind == OVERHAND:
        p = m.p
        for bits in range(1 << (n - 1)):
            slots = tuple(bool(bits >> i & 1) for i in range(n - 1))
            w = p ** sum(slots) * (1 - p) ** (n - 1 - sum(slots))
            weighted.append((overhand_position_map(CutPattern(n, slots)), w))
    elif m.kind == CIRCULAR:
        p = m.p
        norm = 1.0 - (1.0 - p) ** n
        for bits in range(1, 1 << n):
            slots = tuple(bool(bits >> i & 1) for i in range(n))
            w = p ** sum(slots) * (1 - p) ** (n - sum(slots)) / norm
            weighted.append(
                (circular_position_map(CutPattern(n, slots, circular=True)), w)
            )
    else:
        weighted = [
            (rudvalis_position_map(n, 0), 0.5),
            (rudvalis_position_map(n, 1), 0.5),
        ]
    return _merged_law(n, weighted)


# --- diagnostics ------------------------------------------------------------


def cut_gap_exceedance(
    n: int,
    p: float,
    n_patterns: int,
    seed: int,
    radius: float | None = None,
    chunk: int = 4096,
) -> dict:
    """Fraction of sampled linear patterns in which two consecutive cuts are
    more than ``radius`` slots apart (default radius 10*ln(n); natural log,
    recorded in the result)."""
    if radius is None:
        radius = 10.0 * math.log(n)
    bad = 0
    seen = 0
    stream = Stream(seed, 0)
    slots = np.arange(1, n, dtype=np.int64)
    while seen < n_patterns:
        b = min(chunk, n_patterns - seen)
        u = stream.take_uniform(b * (n - 1)).reshape(b, n - 1)
        cuts = u < p
        cutslot = np.where(cuts, slots[None, :], 0)
        prev = np.maximum.accumulate(cutslot, axis=1)
        before = np.zeros_like(prev)
        before[:, 1:] = prev[:, :-1]
        gap = np.where(cuts & (before > 0), cutslot - before, 0)
        # fewer than two cuts leaves no finite gap; count those rows as bad
        bad += int(((gap.max(axis=1) > radius) | (cuts.sum(axis=1) < 2)).sum())
        seen += b
    return {
        "n": n,
        "p": p,
        "radius": radius,
        "log_base": "e",
        "patterns": n_patterns,
        "exceedance": bad / n_patterns,
    }
